mod common;

use common::{exact_test, micro_dataset, rel_err, scalar_dataset, to_f64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use repfrechet::estimators::{pooled_variance, summarize};
use repfrechet::{run_test, TestConfig};

const TOL: f64 = 1e-12;

#[test]
fn estimators_match_exact_nested_loops() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    let mut worst = 0.0f64;
    while checked < 300 {
        let data = micro_dataset(&mut rng, 2, 5, 4);
        let Some(exact) = exact_test(&data) else {
            continue;
        };
        let ds = scalar_dataset(&data);
        let summaries = summarize(&ds).unwrap();
        for (s, e) in summaries.iter().zip(&exact.groups) {
            let pairs = [
                (s.v_hat, to_f64(&e.v)),
                (s.rho_hat.unwrap(), to_f64(&e.rho)),
                (s.sigma2_hat, to_f64(&e.sigma2)),
                (s.gamma2_hat.unwrap(), to_f64(&e.gamma2)),
                (s.cross_cov_hat.unwrap(), to_f64(&e.cross)),
                (s.xi_hat.unwrap(), e.xi()),
            ];
            for (k, (got, want)) in pairs.iter().enumerate() {
                let err = rel_err(*got, *want);
                worst = worst.max(err);
                assert!(
                    err < TOL,
                    "dataset {checked}, estimate {k}: {got} vs {want} ({data:?})"
                );
            }
        }
        let r = run_test(&ds, &TestConfig::default()).unwrap();
        let c = &r.components;
        let (_, vp) = pooled_variance(&ds).unwrap();
        for (name, got, want) in [
            ("d_n", c.d_n, to_f64(&exact.d_n)),
            ("u_n", c.u_n, to_f64(&exact.u_n)),
            ("r_n", c.r_n.unwrap(), to_f64(&exact.r_n)),
            ("q_n", c.q_n, to_f64(&exact.q_n)),
        ] {
            let err = rel_err(got, want);
            worst = worst.max(err);
            assert!(
                err < TOL,
                "dataset {checked}, {name}: {got} vs {want}, pooled V {vp} ({data:?})"
            );
        }
        checked += 1;
    }
    eprintln!("worst relative error {worst:e}");
}
