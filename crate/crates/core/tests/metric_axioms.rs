use proptest::prelude::*;

use repfrechet::metric::{CompositeObject, EuclideanVector, GraphLaplacian, QuantileDistribution};
use repfrechet::MetricObject;

fn quantiles(m: usize) -> impl Strategy<Value = MetricObject> {
    prop::collection::vec(-10.0f64..10.0, m).prop_map(|mut v| {
        v.sort_by(f64::total_cmp);
        MetricObject::Distribution(QuantileDistribution::new(v).unwrap())
    })
}

fn laplacian(nodes: usize) -> impl Strategy<Value = MetricObject> {
    prop::collection::vec(any::<bool>(), nodes * (nodes - 1) / 2).prop_map(move |bits| {
        let mut edges = Vec::new();
        let mut k = 0;
        for a in 0..nodes {
            for b in (a + 1)..nodes {
                if bits[k] {
                    edges.push((a, b));
                }
                k += 1;
            }
        }
        MetricObject::Laplacian(GraphLaplacian::from_edges(nodes, &edges).unwrap())
    })
}

fn vector(dim: usize) -> impl Strategy<Value = MetricObject> {
    prop::collection::vec(-5.0f64..5.0, dim)
        .prop_map(|v| MetricObject::Vector(EuclideanVector::new(v).unwrap()))
}

fn composite() -> impl Strategy<Value = MetricObject> {
    (quantiles(8), laplacian(4), vector(3))
        .prop_map(|(a, b, c)| MetricObject::Composite(CompositeObject::new(vec![a, b, c]).unwrap()))
}

fn check_axioms(x: &MetricObject, y: &MetricObject, z: &MetricObject) -> Result<(), TestCaseError> {
    let d = |a: &MetricObject, b: &MetricObject| a.distance(b).unwrap();
    prop_assert_eq!(d(x, x), 0.0);
    prop_assert!(d(x, y) >= 0.0);
    prop_assert_eq!(d(x, y), d(y, x));
    let slack = 1e-12 * (1.0 + d(x, y) + d(y, z));
    prop_assert!(d(x, z) <= d(x, y) + d(y, z) + slack);
    Ok(())
}

proptest! {
    #[test]
    fn wasserstein_is_a_metric(x in quantiles(16), y in quantiles(16), z in quantiles(16)) {
        check_axioms(&x, &y, &z)?;
    }

    #[test]
    fn frobenius_is_a_metric(x in laplacian(6), y in laplacian(6), z in laplacian(6)) {
        check_axioms(&x, &y, &z)?;
    }

    #[test]
    fn euclidean_is_a_metric(x in vector(5), y in vector(5), z in vector(5)) {
        check_axioms(&x, &y, &z)?;
    }

    #[test]
    fn composite_is_a_metric(x in composite(), y in composite(), z in composite()) {
        check_axioms(&x, &y, &z)?;
    }

    #[test]
    fn composite_squares_add(x in composite(), y in composite()) {
        let (MetricObject::Composite(a), MetricObject::Composite(b)) = (&x, &y) else { unreachable!() };
        let parts: f64 = a.parts().iter().zip(b.parts()).map(|(p, q)| p.distance_squared(q).unwrap()).sum();
        let whole = x.distance_squared(&y).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-12 * whole.max(1.0));
    }

    #[test]
    fn single_edge_toggle_has_frobenius_two(bits in prop::collection::vec(any::<bool>(), 10), pick in 0usize..10) {
        let pairs: Vec<(usize, usize)> = (0..5).flat_map(|a| ((a + 1)..5).map(move |b| (a, b))).collect();
        let edges = |flip: bool| -> Vec<(usize, usize)> {
            pairs.iter().enumerate()
                .filter(|(i, _)| bits[*i] ^ (flip && *i == pick))
                .map(|(_, p)| *p)
                .collect()
        };
        let g = MetricObject::Laplacian(GraphLaplacian::from_edges(5, &edges(false)).unwrap());
        let h = MetricObject::Laplacian(GraphLaplacian::from_edges(5, &edges(true)).unwrap());
        // two off-diagonal entries and two degrees change by one
        prop_assert_eq!(g.distance_squared(&h).unwrap(), 4.0);
    }
}
