//! Dense vector helpers shared by the objectives and the SGD loop.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Squared Euclidean distance `‖a − b‖²`.
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `y ← y + alpha · x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// In-place Cholesky factorization of a symmetric matrix stored row-major.
/// Returns `false` when the matrix is not (numerically) positive definite: a
/// pivot at or below `1e-12` times its original diagonal entry counts as zero.
pub fn cholesky_in_place(m: &mut [f64], d: usize) -> bool {
    for j in 0..d {
        let original = m[j * d + j];
        let mut diag = original;
        for k in 0..j {
            diag -= m[j * d + k] * m[j * d + k];
        }
        if diag <= 1e-12 * original.abs() || !diag.is_finite() {
            return false;
        }
        let ljj = diag.sqrt();
        m[j * d + j] = ljj;
        for i in (j + 1)..d {
            let mut s = m[i * d + j];
            for k in 0..j {
                s -= m[i * d + k] * m[j * d + k];
            }
            m[i * d + j] = s / ljj;
        }
    }
    true
}
