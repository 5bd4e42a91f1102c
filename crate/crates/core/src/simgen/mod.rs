//! Synthetic repeated-measures data and the rejection-rate study harness.
//!
//! Four families of objects are generated: truncated normal distributions,
//! Laplacians of preferential-attachment networks, 5-dimensional vectors,
//! and the composite of all three. Repeats within a subject are
//! exchangeable with correlation `iota`; subject locations `a_i` are drawn
//! from `N(beta, eps^2)`.

mod generators;
pub mod normal;
mod study;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generators::{
    ba_graph, exchangeable, gen_composite, gen_distributional, gen_network, gen_vector, generate,
    replicate_rng, toggle_pairs,
};
pub use study::{run_study, MethodSummary, StudyMethod, StudyReport};

/// Support of the generated distributions.
pub const SUPPORT: (f64, f64) = (-10.0, 10.0);
/// Dimension of the generated vectors.
pub const VECTOR_DIM: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Distributional,
    Network,
    Vector,
    Composite,
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Distributional => "dist",
            ScenarioKind::Network => "graph",
            ScenarioKind::Vector => "vector",
            ScenarioKind::Composite => "composite",
        }
    }
}

impl std::str::FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dist" | "distributional" => Ok(ScenarioKind::Distributional),
            "graph" | "network" => Ok(ScenarioKind::Network),
            "vector" => Ok(ScenarioKind::Vector),
            "composite" => Ok(ScenarioKind::Composite),
            _ => Err(Error::Domain(format!("unknown scenario '{s}'"))),
        }
    }
}

/// Number of repeats per subject.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RSpec {
    Fixed(usize),
    /// Uniform over {1, 2, 3}; the group is redrawn until some subject has
    /// at least two repeats.
    Uniform123,
}

impl RSpec {
    pub(crate) fn draw<R: Rng>(&self, n: usize, rng: &mut R) -> (Vec<usize>, usize) {
        match *self {
            RSpec::Fixed(r) => (vec![r; n], 0),
            RSpec::Uniform123 => {
                let mut redraws = 0;
                loop {
                    let rs: Vec<usize> = (0..n).map(|_| rng.random_range(1..=3)).collect();
                    if rs.iter().any(|&r| r >= 2) {
                        return (rs, redraws);
                    }
                    redraws += 1;
                }
            }
        }
    }
}

impl std::fmt::Display for RSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RSpec::Fixed(r) => write!(f, "{r}"),
            RSpec::Uniform123 => f.write_str("u123"),
        }
    }
}

impl std::str::FromStr for RSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "u123" || s == "uniform" {
            return Ok(RSpec::Uniform123);
        }
        match s.parse::<usize>() {
            Ok(r) if r >= 1 => Ok(RSpec::Fixed(r)),
            _ => Err(Error::Domain(format!(
                "r specification '{s}' is neither a positive integer nor 'u123'"
            ))),
        }
    }
}

/// Parameters of one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupParams {
    pub r: RSpec,
    pub iota: f64,
    pub beta: f64,
    pub eps: f64,
    pub tau: usize,
}

impl Default for GroupParams {
    fn default() -> Self {
        Self {
            r: RSpec::Fixed(2),
            iota: 0.5,
            beta: 1.0,
            eps: 1.0,
            tau: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub n1: usize,
    pub n2: usize,
    pub group1: GroupParams,
    pub group2: GroupParams,
    /// Quantile grid size of the distributional part.
    pub grid_size: usize,
    /// Node count of the network part.
    pub nodes: usize,
    pub alpha: f64,
    pub replicates: usize,
    pub seed: u64,
    pub methods: Vec<StudyMethod>,
}

impl ScenarioConfig {
    pub fn new(kind: ScenarioKind) -> Self {
        Self {
            kind,
            n1: 100,
            n2: 100,
            group1: GroupParams::default(),
            group2: GroupParams::default(),
            grid_size: crate::metric::DEFAULT_GRID_SIZE,
            nodes: 10,
            alpha: 0.05,
            replicates: 500,
            seed: 1,
            methods: vec![StudyMethod::Qn],
        }
    }

    pub fn groups(&self) -> [(usize, &GroupParams); 2] {
        [(self.n1, &self.group1), (self.n2, &self.group2)]
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 == 0 || self.n2 == 0 {
            return Err(Error::Domain("group sizes must be positive".into()));
        }
        if self.replicates == 0 {
            return Err(Error::Domain("replicates must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Domain(format!(
                "alpha {} is not in (0, 1)",
                self.alpha
            )));
        }
        if self.grid_size < 2 {
            return Err(Error::Domain("grid size must be at least 2".into()));
        }
        if self.nodes < 3 {
            return Err(Error::Domain("networks need at least 3 nodes".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Domain("no test method selected".into()));
        }
        let pairs = self.nodes * (self.nodes - 1) / 2;
        for (j, (_, g)) in self.groups().iter().enumerate() {
            let name = format!("group {}", j + 1);
            if !(0.0..=1.0).contains(&g.iota) {
                return Err(Error::Domain(format!(
                    "{name}: iota {} is not in [0, 1]",
                    g.iota
                )));
            }
            if !(g.eps >= 0.0 && g.eps.is_finite()) {
                return Err(Error::Domain(format!("{name}: eps {} is negative", g.eps)));
            }
            if !g.beta.is_finite() {
                return Err(Error::Domain(format!("{name}: beta is not finite")));
            }
            if g.tau > pairs {
                return Err(Error::Domain(format!(
                    "{name}: tau {} exceeds the {pairs} node pairs",
                    g.tau
                )));
            }
            if g.r == RSpec::Fixed(0) {
                return Err(Error::Domain(format!("{name}: r must be at least 1")));
            }
        }
        Ok(())
    }

    /// The first parameter that differs between the groups, with the
    /// group-2 value; `("none", "")` under identical settings.
    pub fn contrast(&self) -> (&'static str, String) {
        let (a, b) = (&self.group1, &self.group2);
        if a.r != b.r {
            ("r", b.r.to_string())
        } else if a.iota != b.iota {
            ("iota", b.iota.to_string())
        } else if a.beta != b.beta {
            ("beta", b.beta.to_string())
        } else if a.eps != b.eps {
            ("eps", b.eps.to_string())
        } else if a.tau != b.tau
            && self.kind != ScenarioKind::Distributional
            && self.kind != ScenarioKind::Vector
        {
            ("tau", b.tau.to_string())
        } else {
            ("none", String::new())
        }
    }
}
