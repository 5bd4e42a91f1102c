//! Eigenvalues of the limiting matrix against power sums `tr(M^p)`, which
//! by Newton's identities fix the characteristic polynomial.

use proptest::prelude::*;

use repfrechet::inference::{limiting_matrix, positive_eigenvalues, CalibrationInput};

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn power_traces(m: &[Vec<f64>], up_to: usize) -> Vec<f64> {
    let mut p = m.to_vec();
    let mut out = Vec::new();
    for _ in 0..up_to {
        out.push((0..m.len()).map(|i| p[i][i]).sum());
        p = mat_mul(&p, m);
    }
    out
}

fn inputs() -> impl Strategy<Value = Vec<CalibrationInput>> {
    prop::collection::vec((1.0f64..10.0, 0.1f64..5.0, 0.1f64..5.0, -1.0f64..1.0), 2..5).prop_map(
        |v| {
            let total: f64 = v.iter().map(|t| t.0).sum();
            v.into_iter()
                .map(|(w, sigma2, gamma2, xi)| CalibrationInput {
                    lambda: w / total,
                    sigma2,
                    gamma2,
                    xi,
                })
                .collect()
        },
    )
}

proptest! {
    #[test]
    fn eigenvalues_match_power_sums(groups in inputs()) {
        let k = groups.len();
        let m = limiting_matrix(&groups).unwrap();
        let rows: Vec<Vec<f64>> = (0..2 * k).map(|i| (0..2 * k).map(|j| m[(i, j)]).collect()).collect();
        let (phis, _) = positive_eigenvalues(&m, 2 * k - 2).unwrap();
        prop_assert!(phis.len() <= 2 * k - 2);
        prop_assert!(phis.windows(2).all(|w| w[0] >= w[1]));
        for (p, t) in power_traces(&rows, 2 * k).iter().enumerate() {
            let s: f64 = phis.iter().map(|x| x.powi(p as i32 + 1)).sum();
            prop_assert!((s - t).abs() <= 1e-9 * t.abs().max(1.0), "p = {}: {} vs {}", p + 1, s, t);
        }
    }

    #[test]
    fn uncorrelated_groups_give_unit_weights(groups in inputs()) {
        let k = groups.len();
        let flat: Vec<CalibrationInput> = groups.into_iter().map(|g| CalibrationInput { xi: 0.0, ..g }).collect();
        let (phis, _) = positive_eigenvalues(&limiting_matrix(&flat).unwrap(), 2 * k - 2).unwrap();
        prop_assert_eq!(phis.len(), 2 * k - 2);
        prop_assert!(phis.iter().all(|p| (p - 1.0).abs() < 1e-10));
    }
}
