use std::sync::Arc;

use crate::error::{Error, Result};

/// Absolute tolerance for structural invariants (symmetry, zero row sums).
pub const STRUCTURE_TOL: f64 = 1e-10;

/// A univariate distribution stored as its quantile function on the midpoint
/// grid `t_m = (m - 1/2) / M`, `m = 1..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileDistribution {
    values: Arc<[f64]>,
}

impl QuantileDistribution {
    /// Builds a distribution from quantile values; rejects non-finite or
    /// decreasing arrays.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::validation("quantiles", "empty quantile array"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(
                format!("quantiles[{i}]"),
                "non-finite quantile value",
            ));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::validation(
                format!("quantiles[{}]", i + 1),
                format!(
                    "quantile array is not non-decreasing ({} < {})",
                    values[i + 1],
                    values[i]
                ),
            ));
        }
        Ok(Self {
            values: values.into(),
        })
    }

    pub(crate) fn from_sorted_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        Self {
            values: values.into(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    /// Checks that every quantile lies in `[lo, hi]`.
    pub fn check_support(&self, lo: f64, hi: f64) -> Result<()> {
        let first = self.values[0];
        let last = self.values[self.values.len() - 1];
        if first < lo || last > hi {
            return Err(Error::validation(
                "quantiles",
                format!("values [{first}, {last}] leave the support interval [{lo}, {hi}]"),
            ));
        }
        Ok(())
    }
}

/// Midpoint quadrature grid `t_m = (m - 1/2) / M`.
pub fn midpoint_grid(grid_size: usize) -> Vec<f64> {
    let m = grid_size as f64;
    (0..grid_size).map(|i| (i as f64 + 0.5) / m).collect()
}

/// Raw draws from a distribution that was not observed directly.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSampleDistribution {
    samples: Vec<f64>,
}

impl RawSampleDistribution {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Domain(
                "sample distribution needs at least one draw".into(),
            ));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(
                "sample distribution contains non-finite draws".into(),
            ));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

/// Graph Laplacian `K = E - A` of an undirected weighted graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphLaplacian {
    nodes: usize,
    entries: Arc<[f64]>,
}

impl GraphLaplacian {
    /// Builds a Laplacian from a row-major `nodes x nodes` matrix.
    pub fn new(nodes: usize, entries: Vec<f64>) -> Result<Self> {
        if nodes == 0 || entries.len() != nodes * nodes {
            return Err(Error::Shape(format!(
                "laplacian needs {} entries for {} nodes, got {}",
                nodes * nodes,
                nodes,
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("laplacian", "non-finite entry"));
        }
        for i in 0..nodes {
            let row = &entries[i * nodes..(i + 1) * nodes];
            let sum: f64 = row.iter().sum();
            if sum.abs() > STRUCTURE_TOL {
                return Err(Error::validation(
                    format!("laplacian row {i}"),
                    format!("row sum {sum} is not zero"),
                ));
            }
            for j in 0..nodes {
                let a = entries[i * nodes + j];
                let b = entries[j * nodes + i];
                if (a - b).abs() > STRUCTURE_TOL {
                    return Err(Error::validation(
                        format!("laplacian[{i}][{j}]"),
                        format!("matrix is not symmetric ({a} vs {b})"),
                    ));
                }
                if i != j && a > STRUCTURE_TOL {
                    return Err(Error::validation(
                        format!("laplacian[{i}][{j}]"),
                        format!("off-diagonal entry {a} is positive"),
                    ));
                }
            }
        }
        Ok(Self {
            nodes,
            entries: entries.into(),
        })
    }

    /// Builds a Laplacian from rows, optionally replacing `K` by `(K + K^T)/2`
    /// before validation.
    pub fn from_rows(rows: &[Vec<f64>], symmetrize: bool) -> Result<Self> {
        let p = rows.len();
        if let Some(i) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::Shape(format!(
                "laplacian row {i} has {} entries, expected {p}",
                rows[i].len()
            )));
        }
        let mut entries: Vec<f64> = rows.iter().flatten().copied().collect();
        if symmetrize {
            for i in 0..p {
                for j in (i + 1)..p {
                    let avg = 0.5 * (entries[i * p + j] + entries[j * p + i]);
                    entries[i * p + j] = avg;
                    entries[j * p + i] = avg;
                }
            }
        }
        Self::new(p, entries)
    }

    /// Laplacian of an unweighted simple graph given by an edge list.
    pub fn from_edges(nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut k = vec![0.0; nodes * nodes];
        for &(a, b) in edges {
            if a >= nodes || b >= nodes || a == b {
                return Err(Error::Domain(format!("invalid edge ({a}, {b})")));
            }
            k[a * nodes + b] -= 1.0;
            k[b * nodes + a] -= 1.0;
            k[a * nodes + a] += 1.0;
            k[b * nodes + b] += 1.0;
        }
        Self::new(nodes, k)
    }

    pub(crate) fn from_entries_unchecked(nodes: usize, entries: Vec<f64>) -> Self {
        Self {
            nodes,
            entries: entries.into(),
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.nodes + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .chunks(self.nodes)
            .map(|r| r.to_vec())
            .collect()
    }
}

/// A point of `R^p` with the Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanVector {
    coords: Arc<[f64]>,
}

impl EuclideanVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Shape(
                "vector must have at least one coordinate".into(),
            ));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("vector", "non-finite coordinate"));
        }
        Ok(Self {
            coords: coords.into(),
        })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Product-space object; squared distances add across parts.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeObject {
    parts: Vec<super::MetricObject>,
}

impl CompositeObject {
    pub fn new(parts: Vec<super::MetricObject>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Shape(
                "composite object needs at least one part".into(),
            ));
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[super::MetricObject] {
        &self.parts
    }
}

/// A finite metric space given only by its distance matrix.
///
/// The triangle inequality is not checked; callers supplying a
/// non-metric dissimilarity are responsible for the consequences.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecomputedSpace {
    size: usize,
    dist: Vec<f64>,
}

impl PrecomputedSpace {
    pub fn new(size: usize, dist: Vec<f64>) -> Result<Self> {
        if size == 0 || dist.len() != size * size {
            return Err(Error::Shape(format!(
                "distance matrix needs {} entries, got {}",
                size * size,
                dist.len()
            )));
        }
        for i in 0..size {
            if dist[i * size + i] != 0.0 {
                return Err(Error::validation(
                    format!("distances[{i}][{i}]"),
                    "diagonal entry is not zero",
                ));
            }
            for j in 0..size {
                let d = dist[i * size + j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::validation(
                        format!("distances[{i}][{j}]"),
                        format!("distance {d} is not a finite non-negative number"),
                    ));
                }
                if d != dist[j * size + i] {
                    return Err(Error::validation(
                        format!("distances[{i}][{j}]"),
                        "distance matrix is not symmetric",
                    ));
                }
            }
        }
        Ok(Self { size, dist })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(i) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::Shape(format!(
                "distance row {i} has {} entries, expected {n}",
                rows[i].len()
            )));
        }
        Self::new(n, rows.iter().flatten().copied().collect())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.size + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.dist.chunks(self.size).map(|r| r.to_vec()).collect()
    }

    /// Same space with every distance multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            size: self.size,
            dist: self.dist.iter().map(|d| d * c).collect(),
        }
    }
}

/// Reference to one point of a [`PrecomputedSpace`].
#[derive(Debug, Clone)]
pub struct IndexedPoint {
    space: Arc<PrecomputedSpace>,
    index: usize,
}

impl IndexedPoint {
    pub fn new(space: Arc<PrecomputedSpace>, index: usize) -> Result<Self> {
        if index >= space.size() {
            return Err(Error::validation(
                format!("index {index}"),
                format!("index outside the {}-point distance matrix", space.size()),
            ));
        }
        Ok(Self { space, index })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn space(&self) -> &Arc<PrecomputedSpace> {
        &self.space
    }
}

impl PartialEq for IndexedPoint {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index
            && (Arc::ptr_eq(&self.space, &other.space) || self.space == other.space)
    }
}
