//! Small dense-matrix helpers shared by the residual checks.

use nalgebra::DMatrix;

use crate::fock::FockTruncation;

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.iter().all(|v| *v == 0.0) {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |acc, v| acc.max(*v))
}

pub fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

/// max |m_ij - m_ji|
pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Diagonal projector onto photon numbers `<= n_max - guard` on both atomic levels.
pub fn guard_projector(trunc: &FockTruncation, guard: usize) -> DMatrix<f64> {
    let dim = trunc.dim();
    let fock = trunc.fock_dim();
    let top = trunc.n_max().saturating_sub(guard);
    let keep = guard <= trunc.n_max();
    DMatrix::from_fn(
        dim,
        dim,
        |i, j| {
            if i == j && keep && i % fock <= top {
                1.0
            } else {
                0.0
            }
        },
    )
}

/// Spectral norm of `m · P`, with `P` the guard projector. Removes the columns
/// whose images reach the truncation edge.
pub fn guarded_norm(m: &DMatrix<f64>, trunc: &FockTruncation, guard: usize) -> f64 {
    spectral_norm(&(m * guard_projector(trunc, guard)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_norm_of_diagonal() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -4.0, 2.0]));
        assert!((spectral_norm(&m) - 4.0).abs() < 1e-14);
        assert_eq!(spectral_norm(&DMatrix::zeros(3, 3)), 0.0);
    }

    #[test]
    fn projector_keeps_interior_levels() {
        let t = FockTruncation::new(4).unwrap();
        let p = guard_projector(&t, 2);
        let kept: Vec<usize> = (0..t.dim()).filter(|&i| p[(i, i)] == 1.0).collect();
        assert_eq!(kept, vec![0, 1, 2, 5, 6, 7]);
    }
}
