use super::objects::{CompositeObject, EuclideanVector, GraphLaplacian, QuantileDistribution};
use super::MetricObject;
use crate::error::{Error, Result};
use crate::sum::ExactSum;

/// Weighted Fréchet mean: the minimizer of `sum_i w_i d^2(x, objects[i])`.
///
/// For distributions, Laplacians and vectors the minimizer has a closed form
/// (pointwise average of quantile functions, entrywise average, coordinate
/// average). Composite objects are averaged part by part. Points of a
/// precomputed space use the medoid: the listed point with the smallest
/// weighted sum of squared distances, lowest space index on ties.
pub fn frechet_mean(objects: &[MetricObject], weights: Option<&[f64]>) -> Result<MetricObject> {
    let first = objects
        .first()
        .ok_or_else(|| Error::Domain("Fréchet mean of an empty list".into()))?;
    let schema = first.schema();
    if let Some(i) = objects.iter().position(|o| o.schema() != schema) {
        return Err(Error::Shape(format!(
            "object {i} has schema {} but object 0 has {schema}",
            objects[i].schema()
        )));
    }
    if let Some(w) = weights {
        if w.len() != objects.len() {
            return Err(Error::Shape(format!(
                "{} weights for {} objects",
                w.len(),
                objects.len()
            )));
        }
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::Domain(
                "weights must be finite and non-negative".into(),
            ));
        }
        if w.iter().sum::<f64>() <= 0.0 {
            return Err(Error::Domain("weights must have a positive sum".into()));
        }
    }
    mean_unchecked(objects, weights)
}

fn mean_unchecked(objects: &[MetricObject], weights: Option<&[f64]>) -> Result<MetricObject> {
    Ok(match &objects[0] {
        MetricObject::Distribution(_) => {
            let arrays: Vec<&[f64]> = objects
                .iter()
                .map(|o| match o {
                    MetricObject::Distribution(q) => q.values(),
                    _ => unreachable!("schema checked"),
                })
                .collect();
            let values = average_arrays(&arrays, weights);
            MetricObject::Distribution(QuantileDistribution::from_sorted_unchecked(values))
        }
        MetricObject::Laplacian(l) => {
            let arrays: Vec<&[f64]> = objects
                .iter()
                .map(|o| match o {
                    MetricObject::Laplacian(l) => l.entries(),
                    _ => unreachable!("schema checked"),
                })
                .collect();
            MetricObject::Laplacian(GraphLaplacian::from_entries_unchecked(
                l.nodes(),
                average_arrays(&arrays, weights),
            ))
        }
        MetricObject::Vector(_) => {
            let arrays: Vec<&[f64]> = objects
                .iter()
                .map(|o| match o {
                    MetricObject::Vector(v) => v.coords(),
                    _ => unreachable!("schema checked"),
                })
                .collect();
            MetricObject::Vector(EuclideanVector::new(average_arrays(&arrays, weights))?)
        }
        MetricObject::Composite(c) => {
            let mut parts = Vec::with_capacity(c.parts().len());
            for p in 0..c.parts().len() {
                let column: Vec<MetricObject> = objects
                    .iter()
                    .map(|o| match o {
                        MetricObject::Composite(c) => c.parts()[p].clone(),
                        _ => unreachable!("schema checked"),
                    })
                    .collect();
                parts.push(mean_unchecked(&column, weights)?);
            }
            MetricObject::Composite(CompositeObject::new(parts)?)
        }
        MetricObject::Indexed(_) => {
            let mut best: Option<(f64, usize, usize)> = None;
            for (c, cand) in objects.iter().enumerate() {
                let mut cost = ExactSum::new();
                for (i, o) in objects.iter().enumerate() {
                    let w = weights.map_or(1.0, |w| w[i]);
                    cost.add(w * cand.distance_squared(o)?);
                }
                let cost = cost.value();
                let idx = match cand {
                    MetricObject::Indexed(p) => p.index(),
                    _ => unreachable!("schema checked"),
                };
                let better = match best {
                    None => true,
                    Some((bc, bi, _)) => cost < bc || (cost == bc && idx < bi),
                };
                if better {
                    best = Some((cost, idx, c));
                }
            }
            objects[best.expect("nonempty").2].clone()
        }
    })
}

/// Coordinate-wise (weighted) average with correctly rounded sums, so the
/// result does not depend on the order of `arrays`.
fn average_arrays(arrays: &[&[f64]], weights: Option<&[f64]>) -> Vec<f64> {
    let len = arrays[0].len();
    let total = match weights {
        Some(w) => crate::sum::exact_sum(w.iter().copied()),
        None => arrays.len() as f64,
    };
    let mut out = Vec::with_capacity(len);
    for m in 0..len {
        let mut acc = ExactSum::new();
        match weights {
            Some(w) => {
                for (a, wi) in arrays.iter().zip(w) {
                    acc.add(wi * a[m]);
                }
            }
            None => {
                for a in arrays {
                    acc.add(a[m]);
                }
            }
        }
        out.push(acc.value() / total);
    }
    // Correct rounding keeps averages of non-decreasing arrays non-decreasing.
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{IndexedPoint, PrecomputedSpace};
    use std::sync::Arc;

    fn q(v: &[f64]) -> MetricObject {
        MetricObject::Distribution(QuantileDistribution::new(v.to_vec()).unwrap())
    }

    #[test]
    fn identical_inputs() {
        let y = q(&[0.0, 0.3, 0.9]);
        let m = frechet_mean(&[y.clone(), y.clone(), y.clone()], None).unwrap();
        assert_eq!(m, y);
    }

    #[test]
    fn point_masses() {
        let m = frechet_mean(&[q(&[0.0; 4]), q(&[2.0; 4])], None).unwrap();
        assert_eq!(m, q(&[1.0; 4]));
    }

    #[test]
    fn weighted_vector_mean() {
        let a = MetricObject::Vector(EuclideanVector::new(vec![0.0, 0.0]).unwrap());
        let b = MetricObject::Vector(EuclideanVector::new(vec![4.0, 8.0]).unwrap());
        let m = frechet_mean(&[a.clone(), b.clone()], Some(&[3.0, 1.0])).unwrap();
        assert_eq!(
            m,
            MetricObject::Vector(EuclideanVector::new(vec![1.0, 2.0]).unwrap())
        );
        assert_eq!(
            frechet_mean(&[a.clone(), b.clone()], Some(&[0.0, 0.0]))
                .unwrap_err()
                .code(),
            "domain"
        );
        assert_eq!(
            frechet_mean(&[a, q(&[1.0])], None).unwrap_err().code(),
            "shape"
        );
        assert_eq!(frechet_mean(&[], None).unwrap_err().code(), "domain");
    }

    #[test]
    fn medoid_matches_exhaustive_scan() {
        let rows = vec![
            vec![0.0, 1.0, 2.0, 3.0],
            vec![1.0, 0.0, 1.5, 2.5],
            vec![2.0, 1.5, 0.0, 1.0],
            vec![3.0, 2.5, 1.0, 0.0],
        ];
        let space = Arc::new(PrecomputedSpace::from_rows(&rows).unwrap());
        let objs: Vec<MetricObject> = (0..4)
            .map(|i| MetricObject::Indexed(IndexedPoint::new(space.clone(), i).unwrap()))
            .collect();
        let costs: Vec<f64> = (0..4)
            .map(|c| (0..4).map(|i| rows[c][i] * rows[c][i]).sum())
            .collect();
        let best = (0..4)
            .min_by(|&a, &b| costs[a].partial_cmp(&costs[b]).unwrap())
            .unwrap();
        match frechet_mean(&objs, None).unwrap() {
            MetricObject::Indexed(p) => assert_eq!(p.index(), best),
            _ => panic!("medoid must be an indexed point"),
        }
    }

    #[test]
    fn medoid_tie_breaks_on_lowest_index() {
        let rows = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let space = Arc::new(PrecomputedSpace::from_rows(&rows).unwrap());
        let objs: Vec<MetricObject> = [1, 0]
            .iter()
            .map(|&i| MetricObject::Indexed(IndexedPoint::new(space.clone(), i).unwrap()))
            .collect();
        match frechet_mean(&objs, None).unwrap() {
            MetricObject::Indexed(p) => assert_eq!(p.index(), 0),
            _ => unreachable!(),
        }
    }
}
