use super::objects::{CompositeObject, EuclideanVector, GraphLaplacian, QuantileDistribution};
use crate::error::{Error, Result};

#[inline]
fn sum_sq_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

pub(crate) fn wasserstein_sq(a: &QuantileDistribution, b: &QuantileDistribution) -> Result<f64> {
    if a.grid_size() != b.grid_size() {
        return Err(Error::Shape(format!(
            "quantile grids differ: {} vs {} points",
            a.grid_size(),
            b.grid_size()
        )));
    }
    Ok(sum_sq_diff(a.values(), b.values()) / a.grid_size() as f64)
}

pub(crate) fn frobenius_sq(a: &GraphLaplacian, b: &GraphLaplacian) -> Result<f64> {
    if a.nodes() != b.nodes() {
        return Err(Error::Shape(format!(
            "laplacians differ in size: {} vs {} nodes",
            a.nodes(),
            b.nodes()
        )));
    }
    Ok(sum_sq_diff(a.entries(), b.entries()))
}

pub(crate) fn euclidean_sq(a: &EuclideanVector, b: &EuclideanVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Shape(format!(
            "vectors differ in dimension: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(sum_sq_diff(a.coords(), b.coords()))
}

pub(crate) fn composite_sq(a: &CompositeObject, b: &CompositeObject) -> Result<f64> {
    if a.parts().len() != b.parts().len() {
        return Err(Error::Shape(format!(
            "composite objects have {} and {} parts",
            a.parts().len(),
            b.parts().len()
        )));
    }
    let mut total = 0.0;
    for (i, (x, y)) in a.parts().iter().zip(b.parts()).enumerate() {
        total += x
            .distance_squared(y)
            .map_err(|e| e.context(format!("part {i}")))?;
    }
    Ok(total)
}

/// 2-Wasserstein distance between two distributions on a common quantile
/// grid, using the midpoint rule for the integral over `(0, 1)`.
pub fn wasserstein_distance(a: &QuantileDistribution, b: &QuantileDistribution) -> Result<f64> {
    wasserstein_sq(a, b).map(f64::sqrt)
}

/// Frobenius distance `sqrt(trace((K1 - K2)^T (K1 - K2)))`.
pub fn frobenius_distance(a: &GraphLaplacian, b: &GraphLaplacian) -> Result<f64> {
    frobenius_sq(a, b).map(f64::sqrt)
}

pub fn euclidean_distance(a: &EuclideanVector, b: &EuclideanVector) -> Result<f64> {
    euclidean_sq(a, b).map(f64::sqrt)
}

/// Square root of the sum of squared part distances.
pub fn composite_distance(a: &CompositeObject, b: &CompositeObject) -> Result<f64> {
    composite_sq(a, b).map(f64::sqrt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{quantile_from_samples, MetricObject, RawSampleDistribution};

    fn q(v: &[f64]) -> QuantileDistribution {
        QuantileDistribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn wasserstein_examples() {
        let a = q(&[-1.0, 0.0, 0.5, 2.0]);
        assert_eq!(wasserstein_distance(&a, &a).unwrap(), 0.0);
        let shifted = q(&a.values().iter().map(|v| v + 1.5).collect::<Vec<_>>());
        assert!((wasserstein_distance(&a, &shifted).unwrap() - 1.5).abs() < 1e-12);

        // Sorted-sample oracle: d^2 = mean of squared differences of order statistics.
        let xs = [0.0, 1.0, 2.0];
        let ys = [1.0, 2.0, 3.0];
        let oracle: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            / 3.0;
        let qa =
            quantile_from_samples(&RawSampleDistribution::new(xs.to_vec()).unwrap(), 3).unwrap();
        let qb =
            quantile_from_samples(&RawSampleDistribution::new(ys.to_vec()).unwrap(), 3).unwrap();
        assert!((wasserstein_distance(&qa, &qb).unwrap() - oracle.sqrt()).abs() < 1e-15);
        assert_eq!(wasserstein_distance(&qa, &qb).unwrap(), 1.0);
    }

    #[test]
    fn wasserstein_grid_mismatch() {
        let err = wasserstein_distance(&q(&[0.0, 1.0]), &q(&[0.0, 1.0, 2.0])).unwrap_err();
        assert_eq!(err.code(), "shape");
    }

    #[test]
    fn frobenius_examples() {
        let path = GraphLaplacian::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let single = GraphLaplacian::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(frobenius_distance(&path, &path).unwrap(), 0.0);
        // entrywise oracle
        let oracle: f64 = path
            .entries()
            .iter()
            .zip(single.entries())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        assert_eq!(oracle, 4.0);
        assert_eq!(frobenius_distance(&path, &single).unwrap(), 2.0);

        let c = 2.5;
        let scale = |l: &GraphLaplacian| {
            GraphLaplacian::new(3, l.entries().iter().map(|v| v * c).collect()).unwrap()
        };
        let d1 = frobenius_distance(&scale(&path), &scale(&single)).unwrap();
        assert!((d1 - c * 2.0).abs() < 1e-12);

        let four = GraphLaplacian::from_edges(4, &[(0, 1)]).unwrap();
        assert_eq!(
            frobenius_distance(&path, &four).unwrap_err().code(),
            "shape"
        );
    }

    #[test]
    fn euclidean_examples() {
        let a = EuclideanVector::new(vec![0.0, 0.0]).unwrap();
        let b = EuclideanVector::new(vec![3.0, 4.0]).unwrap();
        assert_eq!(euclidean_distance(&a, &b).unwrap(), 5.0);
        assert_eq!(euclidean_distance(&b, &b).unwrap(), 0.0);
        let c = EuclideanVector::new(vec![1.0]).unwrap();
        assert_eq!(euclidean_distance(&a, &c).unwrap_err().code(), "shape");
    }

    #[test]
    fn composite_single_part_differs() {
        let v1 = MetricObject::Vector(EuclideanVector::new(vec![0.0, 0.0]).unwrap());
        let v2 = MetricObject::Vector(EuclideanVector::new(vec![3.0, 4.0]).unwrap());
        let d = MetricObject::Distribution(q(&[0.0, 1.0]));
        let a = CompositeObject::new(vec![d.clone(), v1.clone()]).unwrap();
        let b = CompositeObject::new(vec![d.clone(), v2]).unwrap();
        assert_eq!(composite_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(composite_distance(&a, &b).unwrap(), 5.0);
        let short = CompositeObject::new(vec![d]).unwrap();
        assert_eq!(composite_distance(&a, &short).unwrap_err().code(), "shape");
    }
}
