//! Monte-Carlo estimate of how often a random 4x4 co-occurrence matrix
//! admits a CHSH-violating partition, for entries drawn i.i.d. from a
//! bounded Zipfian, homogeneous or truncated Poisson law on `1..=B`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chsh::{max_abs_chsh, SubMatrix};
use crate::error::{Error, Result};

/// Default number of matrices per grid point.
pub const DEFAULT_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistributionKind {
    Zipf,
    Homogeneous,
    Poisson,
}

impl fmt::Display for DistributionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistributionKind::Zipf => "zipf",
            DistributionKind::Homogeneous => "homogeneous",
            DistributionKind::Poisson => "poisson",
        })
    }
}

impl FromStr for DistributionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zipf" => Ok(DistributionKind::Zipf),
            "homogeneous" => Ok(DistributionKind::Homogeneous),
            "poisson" => Ok(DistributionKind::Poisson),
            other => Err(Error::InvalidArgument(format!("unknown distribution {other:?}"))),
        }
    }
}

/// A law on the support `1..=bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DistributionSpec {
    /// `P(n) ∝ n^-lambda`.
    Zipf {
        lambda: f64,
        bound: usize,
    },
    Homogeneous {
        bound: usize,
    },
    /// `P(n) ∝ mu^n e^-mu / n!`, renormalized on the support.
    Poisson {
        mu: f64,
        bound: usize,
    },
}

impl DistributionSpec {
    pub fn zipf(lambda: f64, bound: usize) -> Result<Self> {
        Self::Zipf { lambda, bound }.validated()
    }

    pub fn homogeneous(bound: usize) -> Result<Self> {
        Self::Homogeneous { bound }.validated()
    }

    pub fn poisson(mu: f64, bound: usize) -> Result<Self> {
        Self::Poisson { mu, bound }.validated()
    }

    /// Poisson with the default mean `B / 10`.
    pub fn poisson_default(bound: usize) -> Result<Self> {
        Self::poisson(bound as f64 / 10.0, bound)
    }

    pub fn kind(&self) -> DistributionKind {
        match self {
            Self::Zipf { .. } => DistributionKind::Zipf,
            Self::Homogeneous { .. } => DistributionKind::Homogeneous,
            Self::Poisson { .. } => DistributionKind::Poisson,
        }
    }

    pub fn bound(&self) -> usize {
        match *self {
            Self::Zipf { bound, .. } | Self::Homogeneous { bound } | Self::Poisson { bound, .. } => bound,
        }
    }

    pub fn lambda(&self) -> Option<f64> {
        match *self {
            Self::Zipf { lambda, .. } => Some(lambda),
            _ => None,
        }
    }

    pub fn mu(&self) -> Option<f64> {
        match *self {
            Self::Poisson { mu, .. } => Some(mu),
            _ => None,
        }
    }

    fn validated(self) -> Result<Self> {
        if self.bound() < 1 {
            return Err(Error::InvalidArgument("support bound B must be at least 1".into()));
        }
        match self {
            Self::Zipf { lambda, .. } if !(lambda >= 0.0 && lambda.is_finite()) => Err(Error::InvalidArgument(
                format!("zipf exponent must be non-negative, got {lambda}"),
            )),
            Self::Zipf { lambda: 0.0, .. } => {
                log::warn!("zipf exponent 0 is the homogeneous distribution");
                Ok(self)
            }
            Self::Poisson { mu, .. } if !(mu > 0.0 && mu.is_finite()) => Err(Error::InvalidArgument(format!(
                "poisson mean must be positive, got {mu}"
            ))),
            _ => Ok(self),
        }
    }

    /// Probabilities of the values `1..=B`, in order.
    pub fn pmf(&self) -> Result<Vec<f64>> {
        self.validated()?;
        let bound = self.bound();
        let weights: Vec<f64> = match *self {
            Self::Zipf { lambda, .. } => (1..=bound).map(|n| (n as f64).powf(-lambda)).collect(),
            Self::Homogeneous { .. } => vec![1.0; bound],
            Self::Poisson { mu, .. } => {
                // Log-space to survive large B; shifted by the maximum.
                let mut log_fact = 0.0;
                let logs: Vec<f64> = (1..=bound)
                    .map(|n| {
                        log_fact += (n as f64).ln();
                        n as f64 * mu.ln() - mu - log_fact
                    })
                    .collect();
                let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                logs.iter().map(|l| (l - max).exp()).collect()
            }
        };
        let total: f64 = weights.iter().sum();
        Ok(weights.into_iter().map(|w| w / total).collect())
    }
}

/// Inverse-CDF sampler over `1..=B`.
#[derive(Debug, Clone)]
pub struct Sampler {
    cdf: Vec<f64>,
}

impl Sampler {
    pub fn new(spec: &DistributionSpec) -> Result<Self> {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = spec
            .pmf()?
            .into_iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        *cdf.last_mut().expect("bound is at least 1") = 1.0;
        Ok(Self { cdf })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.gen();
        let idx = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        idx as u64 + 1
    }
}

/// Sixteen i.i.d. entries, rows and columns labeled `0..4`.
pub fn sample_submatrix<R: Rng + ?Sized>(sampler: &Sampler, rng: &mut R) -> SubMatrix {
    let mut f = [[0; 4]; 4];
    for row in &mut f {
        for v in row.iter_mut() {
            *v = sampler.sample(rng);
        }
    }
    SubMatrix::new(f)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationEstimate {
    pub spec: DistributionSpec,
    pub n_samples: usize,
    pub p_hat: f64,
    pub std_err: f64,
    pub seed: u64,
}

pub fn estimate_violation_probability(
    spec: &DistributionSpec,
    n_samples: usize,
    seed: u64,
) -> Result<ViolationEstimate> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let sampler = Sampler::new(spec)?;
    let mut rng = rng_from_seed(seed);
    let violations = (0..n_samples)
        .filter(|_| max_abs_chsh(&sample_submatrix(&sampler, &mut rng)).violated)
        .count();
    let p_hat = violations as f64 / n_samples as f64;
    Ok(ViolationEstimate {
        spec: *spec,
        n_samples,
        p_hat,
        std_err: (p_hat * (1.0 - p_hat) / n_samples as f64).sqrt(),
        seed,
    })
}

/// SplitMix64 finalizer, used to derive independent per-point seeds.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn point_seed(seed: u64, index: usize) -> u64 {
    mix64(seed ^ mix64(index as u64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSet {
    pub grid: Vec<DistributionSpec>,
    pub estimates: Vec<ViolationEstimate>,
}

/// Grid points for a sweep, bound-major: for each B, every shape value.
///
/// `shape` holds exponents for zipf and means for poisson; it is ignored for
/// homogeneous (one point per B). An empty poisson `shape` uses `B / 10`.
pub fn sweep_grid(kind: DistributionKind, shape: &[f64], bounds: &[usize]) -> Result<Vec<DistributionSpec>> {
    if bounds.is_empty() {
        return Err(Error::InvalidArgument("empty bound set".into()));
    }
    let mut grid = Vec::new();
    for &bound in bounds {
        match kind {
            DistributionKind::Zipf => {
                if shape.is_empty() {
                    return Err(Error::InvalidArgument("empty lambda grid".into()));
                }
                for &lambda in shape {
                    grid.push(DistributionSpec::zipf(lambda, bound)?);
                }
            }
            DistributionKind::Homogeneous => grid.push(DistributionSpec::homogeneous(bound)?),
            DistributionKind::Poisson if shape.is_empty() => grid.push(DistributionSpec::poisson_default(bound)?),
            DistributionKind::Poisson => {
                for &mu in shape {
                    grid.push(DistributionSpec::poisson(mu, bound)?);
                }
            }
        }
    }
    Ok(grid)
}

/// Estimate every grid point; point `i` uses seed `point_seed(seed, i)`.
pub fn parameter_sweep(
    kind: DistributionKind,
    shape: &[f64],
    bounds: &[usize],
    n_samples: usize,
    seed: u64,
) -> Result<CurveSet> {
    let grid = sweep_grid(kind, shape, bounds)?;
    let estimates = grid
        .par_iter()
        .enumerate()
        .map(|(i, spec)| estimate_violation_probability(spec, n_samples, point_seed(seed, i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveSet { grid, estimates })
}

impl CurveSet {
    /// CSV with columns `kind,lambda,mu,B,n_samples,p_hat,std_err,seed`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["kind", "lambda", "mu", "B", "n_samples", "p_hat", "std_err", "seed"])?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for e in &self.estimates {
            w.write_record([
                e.spec.kind().to_string(),
                opt(e.spec.lambda()),
                opt(e.spec.mu()),
                e.spec.bound().to_string(),
                e.n_samples.to_string(),
                e.p_hat.to_string(),
                e.std_err.to_string(),
                e.seed.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

/// Parse `start:stop:step` (inclusive) or a comma-separated list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("malformed grid {text:?}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step.is_nan() || step <= 0.0 || stop < start {
                return Err(bad());
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
            // Rounded so 0.1 * 3 prints as 0.3.
            Ok((0..n)
                .map(|i| ((start + i as f64 * step) * 1e10).round() / 1e10)
                .collect())
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(bad()),
    }
}
