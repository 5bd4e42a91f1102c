use rayon::prelude::*;

use super::MetricObject;
use crate::dataset::Dataset;
use crate::error::Result;

/// Symmetric matrix of pairwise distances between all observations of a
/// dataset, in group → subject → repeat order.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    size: usize,
    dist: Vec<f64>,
}

impl DistanceMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.dist[u * self.size + v]
    }

    pub fn into_rows(self) -> Vec<Vec<f64>> {
        self.dist.chunks(self.size).map(|r| r.to_vec()).collect()
    }

    pub(crate) fn into_flat(self) -> (usize, Vec<f64>) {
        (self.size, self.dist)
    }
}

/// Computes every pairwise distance once. Rows are filled in parallel;
/// each cell is written by exactly one worker so the result does not depend
/// on scheduling.
pub fn distance_matrix(dataset: &Dataset) -> Result<DistanceMatrix> {
    let objects: Vec<&MetricObject> = dataset.observations().collect();
    let n = objects.len();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|u| {
            ((u + 1)..n)
                .map(|v| objects[u].distance(objects[v]))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut dist = vec![0.0; n * n];
    for (u, row) in upper.into_iter().enumerate() {
        for (off, d) in row.into_iter().enumerate() {
            let v = u + 1 + off;
            dist[u * n + v] = d;
            dist[v * n + u] = d;
        }
    }
    Ok(DistanceMatrix { size: n, dist })
}
