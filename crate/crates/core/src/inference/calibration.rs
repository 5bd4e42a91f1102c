use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative threshold below which eigenvalues count as zero.
pub const EIGEN_REL_TOL: f64 = 1e-8;

/// Plug-in quantities for one group entering the limiting covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationInput {
    pub lambda: f64,
    pub sigma2: f64,
    pub gamma2: f64,
    pub xi: f64,
}

/// `I - s s^T / (s^T s)` for `s_j = lambda_j^{1/2} / sd_j`.
pub fn projection(lambdas: &[f64], variances: &[f64]) -> Result<DMatrix<f64>> {
    let k = lambdas.len();
    if variances.len() != k {
        return Err(Error::Shape(
            "lambda and variance lists differ in length".into(),
        ));
    }
    if let Some(v) = variances.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::calibration(
            "*",
            format!("variance {v} is not positive"),
        ));
    }
    let s: Vec<f64> = lambdas
        .iter()
        .zip(variances)
        .map(|(l, v)| l.sqrt() / v.sqrt())
        .collect();
    let norm2: f64 = s.iter().map(|x| x * x).sum();
    Ok(DMatrix::from_fn(k, k, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - s[i] * s[j] / norm2
    }))
}

/// The `2k x 2k` matrix `[[A, A diag(xi) B], [B diag(xi) A, B]]` whose
/// positive eigenvalues weight the limiting chi-squared law.
pub fn limiting_matrix(groups: &[CalibrationInput]) -> Result<DMatrix<f64>> {
    let k = groups.len();
    if k < 2 {
        return Err(Error::Domain(format!("need at least two groups, got {k}")));
    }
    let lambdas: Vec<f64> = groups.iter().map(|g| g.lambda).collect();
    let a = projection(
        &lambdas,
        &groups.iter().map(|g| g.sigma2).collect::<Vec<_>>(),
    )?;
    let b = projection(
        &lambdas,
        &groups.iter().map(|g| g.gamma2).collect::<Vec<_>>(),
    )?;
    let xi = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        k,
        groups.iter().map(|g| g.xi),
    ));
    let upper = &a * &xi * &b;
    let lower = &b * &xi * &a;
    let mut m = DMatrix::zeros(2 * k, 2 * k);
    m.view_mut((0, 0), (k, k)).copy_from(&a);
    m.view_mut((0, k), (k, k)).copy_from(&upper);
    m.view_mut((k, 0), (k, k)).copy_from(&lower);
    m.view_mut((k, k), (k, k)).copy_from(&b);
    // Remove rounding asymmetry between the off-diagonal blocks.
    let sym = (&m + m.transpose()) * 0.5;
    Ok(sym)
}

/// Positive eigenvalues (above `1e-8 * max(1, largest)`) in descending
/// order, keeping at most `cap`. Returns the kept and the dropped values.
pub fn positive_eigenvalues(m: &DMatrix<f64>, cap: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if !m.is_square() {
        return Err(Error::Shape("eigenvalues of a non-square matrix".into()));
    }
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-10 {
                return Err(Error::Domain(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let eig = m
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numeric("symmetric eigen-decomposition did not converge".into()))?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    let largest = values.first().copied().unwrap_or(0.0);
    let tau = EIGEN_REL_TOL * largest.max(1.0);
    let positive: Vec<f64> = values.into_iter().filter(|v| *v > tau).collect();
    if positive.len() > cap {
        let dropped = positive[cap..].to_vec();
        Ok((positive[..cap].to_vec(), dropped))
    } else {
        Ok((positive, Vec::new()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(xi: f64) -> CalibrationInput {
        CalibrationInput {
            lambda: 0.5,
            sigma2: 2.0,
            gamma2: 3.0,
            xi,
        }
    }

    #[test]
    fn uncorrelated_equal_groups() {
        let m = limiting_matrix(&[input(0.0), input(0.0)]).unwrap();
        let p = [[0.5, -0.5], [-0.5, 0.5]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[(i, j)] - p[i][j]).abs() < 1e-15);
                assert!((m[(i + 2, j + 2)] - p[i][j]).abs() < 1e-15);
                assert!(m[(i, j + 2)].abs() < 1e-15);
            }
        }
        let (phi, dropped) = positive_eigenvalues(&m, 2).unwrap();
        assert!(dropped.is_empty());
        assert_eq!(phi.len(), 2);
        assert!(phi.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn correlated_equal_groups() {
        for &xi in &[0.3, -0.6, 0.9] {
            let m = limiting_matrix(&[input(xi), input(xi)]).unwrap();
            let (phi, _) = positive_eigenvalues(&m, 2).unwrap();
            assert!((phi[0] - (1.0 + xi.abs())).abs() < 1e-12);
            assert!((phi[1] - (1.0 - xi.abs())).abs() < 1e-12);
        }
    }

    #[test]
    fn projections_are_idempotent() {
        let a = projection(&[0.2, 0.5, 0.3], &[1.0, 4.0, 0.25]).unwrap();
        let a2 = &a * &a;
        assert!((a2 - &a).abs().max() < 1e-12);
        let (phi, _) = positive_eigenvalues(&a, 3).unwrap();
        assert_eq!(phi.len(), 2);
    }

    #[test]
    fn identity_and_rank_one_projection() {
        let (phi, _) = positive_eigenvalues(&DMatrix::identity(2, 2), 2).unwrap();
        assert_eq!(phi.len(), 2);
        let a = projection(&[0.5, 0.5], &[1.0, 1.0]).unwrap();
        let (phi, _) = positive_eigenvalues(&a, 2).unwrap();
        assert_eq!(phi.len(), 1);
        assert!((phi[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cap_reports_dropped() {
        let (kept, dropped) = positive_eigenvalues(&DMatrix::identity(3, 3), 2).unwrap();
        assert_eq!(kept.len(), 2);
        assert_eq!(dropped.len(), 1);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert_eq!(positive_eigenvalues(&m, 2).unwrap_err().code(), "domain");
    }
}
