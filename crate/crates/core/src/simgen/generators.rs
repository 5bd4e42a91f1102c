use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::normal::truncated_normal_quantiles;
use super::{GroupParams, ScenarioConfig, ScenarioKind, SUPPORT, VECTOR_DIM};
use crate::dataset::{Dataset, Group, Subject};
use crate::error::Result;
use crate::metric::{
    midpoint_grid, CompositeObject, EuclideanVector, GraphLaplacian, MetricObject,
    QuantileDistribution,
};

/// Random stream of one replicate: the seed selects the generator, the
/// replicate index selects an independent stream of it.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Dataset of replicate `replicate` of the configured scenario.
pub fn generate(cfg: &ScenarioConfig, replicate: u64) -> Result<Dataset> {
    cfg.validate()?;
    let mut rng = replicate_rng(cfg.seed, replicate);
    match cfg.kind {
        ScenarioKind::Distributional => gen_distributional(cfg, &mut rng),
        ScenarioKind::Network => gen_network(cfg, &mut rng),
        ScenarioKind::Vector => gen_vector(cfg, &mut rng),
        ScenarioKind::Composite => gen_composite(cfg, &mut rng),
    }
}

pub fn gen_distributional<R: Rng>(cfg: &ScenarioConfig, rng: &mut R) -> Result<Dataset> {
    let grid = midpoint_grid(cfg.grid_size);
    build(cfg, rng, |p, r, rng| {
        let eta = rng.random_range(1.0..1.5);
        let a = location(p, rng);
        let theta = exchangeable(rng, a, p.iota, r);
        Ok(theta.iter().map(|&t| distribution(t, eta, &grid)).collect())
    })
}

pub fn gen_network<R: Rng>(cfg: &ScenarioConfig, rng: &mut R) -> Result<Dataset> {
    build(cfg, rng, |p, r, rng| {
        let eta = rng.random_range(1.0..1.5);
        network_repeats(cfg.nodes, eta, p.tau, r, rng)
    })
}

pub fn gen_vector<R: Rng>(cfg: &ScenarioConfig, rng: &mut R) -> Result<Dataset> {
    build(cfg, rng, |p, r, rng| {
        let a = location(p, rng);
        vectors(rng, a, p.iota, r)
    })
}

/// Distribution, network and vector parts per observation. The
/// distributional and network parts share `eta_i`; the distributional and
/// vector parts share `a_i` and the exchangeable correlation.
pub fn gen_composite<R: Rng>(cfg: &ScenarioConfig, rng: &mut R) -> Result<Dataset> {
    let grid = midpoint_grid(cfg.grid_size);
    build(cfg, rng, |p, r, rng| {
        let eta = rng.random_range(1.0..1.5);
        let a = location(p, rng);
        let theta = exchangeable(rng, a, p.iota, r);
        let graphs = network_repeats(cfg.nodes, eta, p.tau, r, rng)?;
        let vecs = vectors(rng, a, p.iota, r)?;
        theta
            .iter()
            .zip(graphs)
            .zip(vecs)
            .map(|((&t, g), v)| {
                CompositeObject::new(vec![distribution(t, eta, &grid), g, v])
                    .map(MetricObject::Composite)
            })
            .collect()
    })
}

fn build<R, F>(cfg: &ScenarioConfig, rng: &mut R, mut subject: F) -> Result<Dataset>
where
    R: Rng,
    F: FnMut(&GroupParams, usize, &mut R) -> Result<Vec<MetricObject>>,
{
    let mut groups = Vec::with_capacity(2);
    for (j, (n, params)) in cfg.groups().into_iter().enumerate() {
        let (rs, redraws) = params.r.draw(n, rng);
        if redraws > 0 {
            log::warn!(
                "group {}: r_i redrawn {redraws} times to obtain a repeated subject",
                j + 1
            );
        }
        let subjects = rs
            .into_iter()
            .enumerate()
            .map(|(i, r)| Subject::new(format!("s{}", i + 1), subject(params, r, rng)?))
            .collect::<Result<Vec<_>>>()?;
        groups.push(Group::new(format!("g{}", j + 1), subjects)?);
    }
    Dataset::new(groups)
}

fn location<R: Rng>(p: &GroupParams, rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    p.beta + p.eps * z
}

/// `a + sqrt(iota) z_0 + sqrt(1 - iota) z_l`, `l = 1..r`: unit variances and
/// pairwise correlation `iota`.
pub fn exchangeable<R: Rng>(rng: &mut R, a: f64, iota: f64, r: usize) -> Vec<f64> {
    let z0: f64 = rng.sample(StandardNormal);
    let shared = a + iota.sqrt() * z0;
    let own = (1.0 - iota).sqrt();
    (0..r)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            shared + own * z
        })
        .collect()
}

fn distribution(theta: f64, eta: f64, grid: &[f64]) -> MetricObject {
    let q = truncated_normal_quantiles(theta, eta, SUPPORT.0, SUPPORT.1, grid);
    MetricObject::Distribution(QuantileDistribution::from_sorted_unchecked(q))
}

fn vectors<R: Rng>(rng: &mut R, a: f64, iota: f64, r: usize) -> Result<Vec<MetricObject>> {
    let coords: Vec<Vec<f64>> = (0..VECTOR_DIM)
        .map(|_| exchangeable(rng, a, iota, r))
        .collect();
    (0..r)
        .map(|l| {
            EuclideanVector::new(coords.iter().map(|c| c[l]).collect()).map(MetricObject::Vector)
        })
        .collect()
}

fn network_repeats<R: Rng>(
    nodes: usize,
    eta: f64,
    tau: usize,
    r: usize,
    rng: &mut R,
) -> Result<Vec<MetricObject>> {
    let base = ba_graph(nodes, eta, rng);
    (0..r)
        .map(|_| {
            let adj = toggle_pairs(&base, nodes, tau, rng);
            laplacian(&adj, nodes).map(MetricObject::Laplacian)
        })
        .collect()
}

/// Adjacency matrix (row-major) of a graph grown from the edge 0-1 by
/// attaching each new node to one existing node chosen with probability
/// proportional to `(degree + 0.01)^(-2 eta)`.
pub fn ba_graph<R: Rng>(nodes: usize, eta: f64, rng: &mut R) -> Vec<bool> {
    let mut adj = vec![false; nodes * nodes];
    let mut degree = vec![0usize; nodes];
    if nodes < 2 {
        return adj;
    }
    adj[1] = true;
    adj[nodes] = true;
    degree[0] = 1;
    degree[1] = 1;
    for v in 2..nodes {
        let w: Vec<f64> = degree[..v]
            .iter()
            .map(|&c| (c as f64 + 0.01).powf(-2.0 * eta))
            .collect();
        let total: f64 = w.iter().sum();
        let mut u = rng.random::<f64>() * total;
        let mut target = v - 1;
        for (i, wi) in w.iter().enumerate() {
            if u < *wi {
                target = i;
                break;
            }
            u -= wi;
        }
        adj[v * nodes + target] = true;
        adj[target * nodes + v] = true;
        degree[v] += 1;
        degree[target] += 1;
    }
    adj
}

/// Copy of `adj` with `tau` distinct uniformly chosen unordered node pairs
/// flipped.
pub fn toggle_pairs<R: Rng>(adj: &[bool], nodes: usize, tau: usize, rng: &mut R) -> Vec<bool> {
    let pairs: Vec<(usize, usize)> = (0..nodes)
        .flat_map(|a| (a + 1..nodes).map(move |b| (a, b)))
        .collect();
    let mut out = adj.to_vec();
    for k in sample(rng, pairs.len(), tau) {
        let (a, b) = pairs[k];
        out[a * nodes + b] = !out[a * nodes + b];
        out[b * nodes + a] = !out[b * nodes + a];
    }
    out
}

fn laplacian(adj: &[bool], nodes: usize) -> Result<GraphLaplacian> {
    let edges: Vec<(usize, usize)> = (0..nodes)
        .flat_map(|a| (a + 1..nodes).map(move |b| (a, b)))
        .filter(|&(a, b)| adj[a * nodes + b])
        .collect();
    GraphLaplacian::from_edges(nodes, &edges)
}
