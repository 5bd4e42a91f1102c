use super::objects::{QuantileDistribution, RawSampleDistribution};
use crate::error::{Error, Result};

pub const DEFAULT_GRID_SIZE: usize = 1000;

/// Empirical quantile function of `raw` on the midpoint grid of size
/// `grid_size`, using the left-continuous inverse of the empirical CDF:
/// the value at `t` is the order statistic `X_(ceil(t W))`.
pub fn quantile_from_samples(
    raw: &RawSampleDistribution,
    grid_size: usize,
) -> Result<QuantileDistribution> {
    if grid_size < 2 {
        return Err(Error::Domain(format!(
            "quantile grid needs at least 2 points, got {grid_size}"
        )));
    }
    let mut sorted = raw.samples().to_vec();
    sorted.sort_by(f64::total_cmp);
    let w = sorted.len();
    // ceil((2m - 1) W / 2M) in exact integer arithmetic.
    let two_m = 2 * grid_size;
    let values = (1..=grid_size)
        .map(|m| {
            let rank = ((2 * m - 1) * w).div_ceil(two_m);
            sorted[rank.clamp(1, w) - 1]
        })
        .collect();
    Ok(QuantileDistribution::from_sorted_unchecked(values))
}
