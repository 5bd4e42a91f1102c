//! Independent reference implementations shared by the integration tests.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use repfrechet::metric::EuclideanVector;
use repfrechet::{Dataset, Group, MetricObject, Subject};

pub type Groups = Vec<Vec<Vec<f64>>>;

fn q(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite input")
}

fn f(x: &BigRational) -> f64 {
    x.to_f64().unwrap()
}

fn n(k: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

/// Exact estimates of one group of scalar observations.
#[derive(Debug, Clone)]
pub struct ExactGroup {
    pub n_obs: usize,
    pub mean: BigRational,
    pub v: BigRational,
    pub rho: BigRational,
    pub sigma2: BigRational,
    pub gamma2: BigRational,
    pub cross: BigRational,
}

impl ExactGroup {
    pub fn xi(&self) -> f64 {
        let s = f(&self.sigma2).max(0.0);
        let g = f(&self.gamma2).max(0.0);
        (f(&self.cross) / (s * g).sqrt()).clamp(-1.0, 1.0)
    }
}

/// Nested-loop evaluation of every group estimator in exact arithmetic.
pub fn exact_group(subjects: &[Vec<f64>]) -> ExactGroup {
    let mut n_obs = 0usize;
    let mut total = BigRational::zero();
    for s in subjects {
        for &y in s {
            total += q(y);
            n_obs += 1;
        }
    }
    let nj = n(n_obs);
    let mean = &total / &nj;

    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut sum_r2 = 0usize;
    for s in subjects {
        let mut ai = BigRational::zero();
        for &y in s {
            let d = q(y) - &mean;
            ai += &d * &d;
        }
        let mut bi = BigRational::zero();
        for (x, &ys) in s.iter().enumerate() {
            for (z, &yt) in s.iter().enumerate() {
                if x != z {
                    let d = q(ys) - q(yt);
                    bi += &d * &d;
                }
            }
        }
        a.push(ai);
        b.push(bi);
        sum_r2 += s.len() * s.len();
    }
    let v = a.iter().fold(BigRational::zero(), |acc, x| acc + x) / &nj;
    let pairs = n(sum_r2 - n_obs);
    let rho = b.iter().fold(BigRational::zero(), |acc, x| acc + x) / &pairs;

    let sum_a2 = a.iter().fold(BigRational::zero(), |acc, x| acc + x * x);
    let sigma2 = &sum_a2 / &nj - n(sum_r2) / &nj * &v * &v;

    let sum_b2 = b.iter().fold(BigRational::zero(), |acc, x| acc + x * x);
    let w: usize = subjects
        .iter()
        .map(|s| s.len() * s.len() * (s.len() - 1) * (s.len() - 1))
        .sum();
    let p2 = &pairs * &pairs;
    let gamma2 = &nj / &p2 * &sum_b2 - &nj * n(w) / &p2 * &rho * &rho;

    let sum_ab = a
        .iter()
        .zip(&b)
        .fold(BigRational::zero(), |acc, (x, y)| acc + x * y);
    let w3: usize = subjects
        .iter()
        .map(|s| s.len() * s.len() * (s.len() - 1))
        .sum();
    let cross = (sum_ab - n(w3) * &v * &rho) / &pairs;

    ExactGroup {
        n_obs,
        mean,
        v,
        rho,
        sigma2,
        gamma2,
        cross,
    }
}

/// Exact two-or-more group statistics.
#[derive(Debug, Clone)]
pub struct ExactTest {
    pub groups: Vec<ExactGroup>,
    pub d_n: BigRational,
    pub u_n: BigRational,
    pub r_n: BigRational,
    pub q_n: BigRational,
}

/// `None` when some group has a non-positive variance estimate, where the
/// statistic is undefined.
pub fn exact_test(data: &Groups) -> Option<ExactTest> {
    let groups: Vec<ExactGroup> = data.iter().map(|g| exact_group(g)).collect();
    if groups
        .iter()
        .any(|g| g.sigma2 <= BigRational::zero() || g.gamma2 <= BigRational::zero())
    {
        return None;
    }
    let pooled: Vec<Vec<f64>> = data.iter().flatten().cloned().collect();
    let vp = exact_group(&pooled).v;
    let total: usize = groups.iter().map(|g| g.n_obs).sum();
    let nn = n(total);
    let lam: Vec<BigRational> = groups.iter().map(|g| n(g.n_obs) / &nn).collect();

    let mut d_n = vp;
    for (g, l) in groups.iter().zip(&lam) {
        d_n -= l * &g.v;
    }
    let mut u_n = BigRational::zero();
    let mut r_n = BigRational::zero();
    for j in 0..groups.len() {
        for l in (j + 1)..groups.len() {
            let (a, b) = (&groups[j], &groups[l]);
            let ll = &lam[j] * &lam[l];
            let dv = &a.v - &b.v;
            u_n += &ll / (&a.sigma2 * &b.sigma2) * &dv * &dv;
            let dr = &a.rho - &b.rho;
            r_n += &ll / (&a.gamma2 * &b.gamma2) * &dr * &dr;
        }
    }
    let s_mean = groups
        .iter()
        .zip(&lam)
        .fold(BigRational::zero(), |acc, (g, l)| acc + l * l * &g.sigma2);
    let s_var = groups
        .iter()
        .zip(&lam)
        .fold(BigRational::zero(), |acc, (g, l)| acc + l / &g.sigma2);
    let s_rho = groups
        .iter()
        .zip(&lam)
        .fold(BigRational::zero(), |acc, (g, l)| acc + l / &g.gamma2);
    let q_n = &nn * &d_n * &d_n / s_mean + &nn * &u_n / s_var + &nn * &r_n / s_rho;
    Some(ExactTest {
        groups,
        d_n,
        u_n,
        r_n,
        q_n,
    })
}

pub fn to_f64(x: &BigRational) -> f64 {
    f(x)
}

/// Random scalar micro-dataset: `k` groups of 2..=`max_n` subjects with
/// 1..=`max_r` repeats, values on a quarter-integer lattice. The first two
/// subjects of every group have at least two repeats.
pub fn micro_dataset<R: Rng>(rng: &mut R, k: usize, max_n: usize, max_r: usize) -> Groups {
    (0..k)
        .map(|_| {
            let n = rng.random_range(2..=max_n);
            (0..n)
                .map(|i| {
                    let lo = if i < 2 { 2 } else { 1 };
                    let r = rng.random_range(lo..=max_r);
                    (0..r)
                        .map(|_| rng.random_range(-40..=40) as f64 / 4.0)
                        .collect()
                })
                .collect()
        })
        .collect()
}

pub fn scalar_dataset(data: &Groups) -> Dataset {
    let groups = data
        .iter()
        .enumerate()
        .map(|(j, g)| {
            let subjects = g
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let obs = s
                        .iter()
                        .map(|&y| MetricObject::Vector(EuclideanVector::new(vec![y]).unwrap()))
                        .collect();
                    Subject::new(format!("s{i}"), obs).unwrap()
                })
                .collect();
            Group::new(format!("g{j}"), subjects).unwrap()
        })
        .collect();
    Dataset::new(groups).unwrap()
}

/// `|a - b| / |b|`, with `0/0 = 0`.
pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}
