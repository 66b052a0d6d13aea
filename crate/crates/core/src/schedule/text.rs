//! Compact text form of schedules:
//! `const:0.01`, `power:scale=0.1,h=0.25`, `paper-opt:h=0.5,beta=1,L=2,r=inf[,shift=capped]`.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so
//! `format → parse` reproduces every field bit for bit.

use super::{PaperOptimal, ScheduleError, ScheduleSpec, Shift};
use std::fmt;
use std::str::FromStr;

fn parse_number(key: &str, raw: &str) -> Result<f64, ScheduleError> {
    let raw = raw.trim();
    match raw {
        "inf" | "+inf" | "Inf" | "infinity" => Ok(f64::INFINITY),
        _ => raw.parse::<f64>().map_err(|_| ScheduleError::Parse(format!("{key}: cannot parse '{raw}' as a number"))),
    }
}

fn write_number(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    if x == f64::INFINITY {
        write!(f, "inf")
    } else {
        write!(f, "{x:?}")
    }
}

fn key_values(body: &str) -> Result<Vec<(&str, &str)>, ScheduleError> {
    body.split(',')
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| ScheduleError::Parse(format!("expected key=value, found '{kv}'")))
        })
        .collect()
}

impl FromStr for ScheduleSpec {
    type Err = ScheduleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, body) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| ScheduleError::Parse(format!("missing ':' in schedule '{s}'")))?;
        match kind {
            "const" => ScheduleSpec::constant(parse_number("eta", body)?),
            "power" => {
                let (mut scale, mut h) = (None, None);
                for (k, v) in key_values(body)? {
                    match k {
                        "scale" => scale = Some(parse_number(k, v)?),
                        "h" => h = Some(parse_number(k, v)?),
                        _ => return Err(ScheduleError::Parse(format!("unknown power-law key '{k}'"))),
                    }
                }
                let missing = |k: &str| ScheduleError::Parse(format!("power-law schedule needs '{k}'"));
                ScheduleSpec::power_law(scale.ok_or_else(|| missing("scale"))?, h.ok_or_else(|| missing("h"))?)
            }
            "paper-opt" => {
                let (mut h, mut beta, mut l, mut r, mut shift) = (None, None, None, f64::INFINITY, Shift::Paper);
                for (k, v) in key_values(body)? {
                    match k {
                        "h" => h = Some(parse_number(k, v)?),
                        "beta" => beta = Some(parse_number(k, v)?),
                        "L" => l = Some(parse_number(k, v)?),
                        "r" => r = parse_number(k, v)?,
                        "shift" => {
                            shift = match v {
                                "paper" => Shift::Paper,
                                "capped" => Shift::Capped,
                                _ => return Err(ScheduleError::Parse(format!("unknown shift '{v}'"))),
                            }
                        }
                        _ => return Err(ScheduleError::Parse(format!("unknown paper-opt key '{k}'"))),
                    }
                }
                let missing = |k: &str| ScheduleError::Parse(format!("paper-opt schedule needs '{k}'"));
                let p = PaperOptimal::new(
                    h.ok_or_else(|| missing("h"))?,
                    beta.ok_or_else(|| missing("beta"))?,
                    l.ok_or_else(|| missing("L"))?,
                    r,
                )?
                .with_shift(shift);
                Ok(ScheduleSpec::PaperOptimal(p))
            }
            _ => Err(ScheduleError::Parse(format!("unknown schedule kind '{kind}'"))),
        }
    }
}

impl fmt::Display for ScheduleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleSpec::Constant { eta } => {
                write!(f, "const:")?;
                write_number(f, *eta)
            }
            ScheduleSpec::PowerLaw { scale, h } => {
                write!(f, "power:scale=")?;
                write_number(f, *scale)?;
                write!(f, ",h=")?;
                write_number(f, *h)
            }
            ScheduleSpec::PaperOptimal(p) => {
                write!(f, "paper-opt:h=")?;
                write_number(f, p.h)?;
                write!(f, ",beta=")?;
                write_number(f, p.beta)?;
                write!(f, ",L=")?;
                write_number(f, p.l)?;
                write!(f, ",r=")?;
                write_number(f, p.r)?;
                if p.shift == Shift::Capped {
                    write!(f, ",shift=capped")?;
                }
                Ok(())
            }
        }
    }
}
