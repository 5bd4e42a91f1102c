//! Metric objects, their distances and Fréchet means.

mod distance;
mod matrix;
mod mean;
mod objects;
mod quantile;

use std::fmt;

pub use distance::{
    composite_distance, euclidean_distance, frobenius_distance, wasserstein_distance,
};
pub use matrix::{distance_matrix, DistanceMatrix};
pub use mean::frechet_mean;
pub use objects::{
    midpoint_grid, CompositeObject, EuclideanVector, GraphLaplacian, IndexedPoint,
    PrecomputedSpace, QuantileDistribution, RawSampleDistribution, STRUCTURE_TOL,
};
pub use quantile::{quantile_from_samples, DEFAULT_GRID_SIZE};

use crate::error::{Error, Result};

/// One observation of a random object.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricObject {
    /// Distribution under the 2-Wasserstein metric.
    Distribution(QuantileDistribution),
    /// Graph Laplacian under the Frobenius metric.
    Laplacian(GraphLaplacian),
    /// Vector under the Euclidean metric.
    Vector(EuclideanVector),
    Composite(CompositeObject),
    /// Point of a precomputed finite metric space.
    Indexed(IndexedPoint),
}

/// Shape signature every object in a dataset must share.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjectSchema {
    Distribution { grid_size: usize },
    Laplacian { nodes: usize },
    Vector { dim: usize },
    Composite(Vec<ObjectSchema>),
    Precomputed { size: usize },
}

impl fmt::Display for ObjectSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectSchema::Distribution { grid_size } => write!(f, "distribution(M={grid_size})"),
            ObjectSchema::Laplacian { nodes } => write!(f, "laplacian({nodes}x{nodes})"),
            ObjectSchema::Vector { dim } => write!(f, "vector({dim})"),
            ObjectSchema::Composite(parts) => {
                write!(f, "composite[")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "]")
            }
            ObjectSchema::Precomputed { size } => write!(f, "precomputed({size})"),
        }
    }
}

impl MetricObject {
    pub fn schema(&self) -> ObjectSchema {
        match self {
            MetricObject::Distribution(q) => ObjectSchema::Distribution {
                grid_size: q.grid_size(),
            },
            MetricObject::Laplacian(l) => ObjectSchema::Laplacian { nodes: l.nodes() },
            MetricObject::Vector(v) => ObjectSchema::Vector { dim: v.dim() },
            MetricObject::Composite(c) => {
                ObjectSchema::Composite(c.parts().iter().map(|p| p.schema()).collect())
            }
            MetricObject::Indexed(p) => ObjectSchema::Precomputed {
                size: p.space().size(),
            },
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            MetricObject::Distribution(_) => "distribution",
            MetricObject::Laplacian(_) => "laplacian",
            MetricObject::Vector(_) => "vector",
            MetricObject::Composite(_) => "composite",
            MetricObject::Indexed(_) => "precomputed",
        }
    }

    /// Whether the metric comes from an inner product, so the Fréchet mean
    /// is an average and variances decompose like Euclidean ones.
    pub fn is_hilbert(&self) -> bool {
        match self {
            MetricObject::Composite(c) => c.parts().iter().all(|p| p.is_hilbert()),
            MetricObject::Indexed(_) => false,
            _ => true,
        }
    }

    /// Squared distance under the kind-appropriate metric.
    pub fn distance_squared(&self, other: &MetricObject) -> Result<f64> {
        use MetricObject::*;
        match (self, other) {
            (Distribution(a), Distribution(b)) => distance::wasserstein_sq(a, b),
            (Laplacian(a), Laplacian(b)) => distance::frobenius_sq(a, b),
            (Vector(a), Vector(b)) => distance::euclidean_sq(a, b),
            (Composite(a), Composite(b)) => distance::composite_sq(a, b),
            (Indexed(a), Indexed(b)) => {
                if !std::sync::Arc::ptr_eq(a.space(), b.space()) && a.space() != b.space() {
                    return Err(Error::Shape(
                        "indexed points belong to different distance matrices".into(),
                    ));
                }
                let d = a.space().get(a.index(), b.index());
                Ok(d * d)
            }
            (a, b) => Err(Error::Shape(format!(
                "cannot measure distance between {} and {}",
                a.kind_name(),
                b.kind_name()
            ))),
        }
    }

    pub fn distance(&self, other: &MetricObject) -> Result<f64> {
        match (self, other) {
            (MetricObject::Indexed(a), MetricObject::Indexed(b))
                if std::sync::Arc::ptr_eq(a.space(), b.space()) =>
            {
                Ok(a.space().get(a.index(), b.index()))
            }
            _ => self.distance_squared(other).map(f64::sqrt),
        }
    }
}
