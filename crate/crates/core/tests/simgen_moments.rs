use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use repfrechet::simgen::{
    exchangeable, generate, GroupParams, RSpec, ScenarioConfig, ScenarioKind,
};
use repfrechet::MetricObject;

const SUBJECTS: usize = 100_000;

struct Moments {
    var: f64,
    cov: f64,
    var_se: f64,
    cov_se: f64,
}

/// Sample variance of the first coordinate and covariance of the first two,
/// with normal-theory standard errors.
fn moments(pairs: &[(f64, f64)]) -> Moments {
    let n = pairs.len() as f64;
    let (mx, my) = pairs
        .iter()
        .fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    let var = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>() / (n - 1.0);
    let var_y = pairs.iter().map(|p| (p.1 - my).powi(2)).sum::<f64>() / (n - 1.0);
    let cov = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / (n - 1.0);
    Moments {
        var,
        cov,
        var_se: var * (2.0 / (n - 1.0)).sqrt(),
        cov_se: ((var * var_y + cov * cov) / n).sqrt(),
    }
}

#[test]
fn exchangeable_latents_have_the_stated_moments() {
    for (beta, eps, iota) in [(1.0, 1.0, 0.5), (-2.0, 0.5, 0.0), (0.0, 2.0, 0.9)] {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let loc = Normal::new(beta, eps).unwrap();
        let pairs: Vec<(f64, f64)> = (0..SUBJECTS)
            .map(|_| {
                let a = loc.sample(&mut rng);
                let t = exchangeable(&mut rng, a, iota, 3);
                (t[0], t[2])
            })
            .collect();
        let m = moments(&pairs);
        let (var, cov) = (eps * eps + 1.0, eps * eps + iota);
        assert!(
            (m.var - var).abs() < 3.0 * m.var_se,
            "var {} vs {var}",
            m.var
        );
        assert!(
            (m.cov - cov).abs() < 3.0 * m.cov_se,
            "cov {} vs {cov}",
            m.cov
        );
    }
}

fn vector_scenario(iota: f64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(ScenarioKind::Vector);
    let g = GroupParams {
        r: RSpec::Fixed(2),
        iota,
        beta: 0.0,
        eps: 0.0,
        tau: 3,
    };
    cfg.n1 = SUBJECTS / 2;
    cfg.n2 = SUBJECTS / 2;
    cfg.group1 = g;
    cfg.group2 = g;
    cfg
}

fn coords(o: &MetricObject) -> &[f64] {
    match o {
        MetricObject::Vector(v) => v.coords(),
        _ => panic!("vector expected"),
    }
}

#[test]
fn independent_vector_coordinates_and_repeats() {
    let ds = generate(&vector_scenario(0.0), 0).unwrap();
    let subjects = ds.groups().iter().flat_map(|g| g.subjects());
    let mut between = Vec::new();
    let mut within = Vec::new();
    for s in subjects {
        let (a, b) = (coords(&s.observations()[0]), coords(&s.observations()[1]));
        between.push((a[0], a[1]));
        within.push((a[3], b[3]));
    }
    for m in [moments(&between), moments(&within)] {
        assert!(m.cov.abs() < 3.0 * m.cov_se, "cov {}", m.cov);
        assert!((m.var - 1.0).abs() < 3.0 * m.var_se, "var {}", m.var);
    }
}

#[test]
fn vector_repeat_correlation_follows_iota() {
    let ds = generate(&vector_scenario(0.7), 1).unwrap();
    let within: Vec<(f64, f64)> = ds
        .groups()
        .iter()
        .flat_map(|g| g.subjects())
        .map(|s| {
            (
                coords(&s.observations()[0])[2],
                coords(&s.observations()[1])[2],
            )
        })
        .collect();
    let m = moments(&within);
    assert!((m.cov - 0.7).abs() < 3.0 * m.cov_se, "cov {}", m.cov);
}
