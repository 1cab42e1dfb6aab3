//! Weighted deviance information criterion.
//!
//! Each observation `y_i` carries a utility `φ(y_i) ≥ 0`. The weighted
//! log-likelihood is `Σ φ(y_i) log g(y_i | θ)` (no `1/n`), the weighted deviance
//! is `−2` times that, and
//!
//! ```text
//! p_D^w = mean over draws of DE^w(θ_s) − DE^w(θ̂),    WDIC = DE^w(θ̂) + 2 p_D^w.
//! ```
//!
//! With all weights equal to one these are the classical deviance, `p_D` and DIC.
//! Sums over draws and over parameter coordinates are taken in sorted order, so
//! every result is bit-identical under any permutation of the draws.

use std::f64::consts::PI;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{CentralWeight, KahanSum};

/// Minimum number of posterior draws accepted.
pub const MIN_DRAWS: usize = 100;

/// Observations `y_i` with their weights `φ(y_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedDataset {
    observations: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl WeightedDataset {
    pub fn new(observations: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if observations.len() != weights.len() {
            return Err(Error::InvalidData(format!(
                "{} observations but {} weights",
                observations.len(),
                weights.len()
            )));
        }
        if observations.is_empty() {
            return Err(Error::InvalidData("no observations".into()));
        }
        let d = observations[0].len();
        for (i, y) in observations.iter().enumerate() {
            if y.len() != d || d == 0 {
                return Err(Error::InvalidData(format!("observation {i} has {} components, expected {d}", y.len())));
            }
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidData(format!("observation {i} is not finite")));
            }
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidData(format!("weight {i} is {w}; weights must be finite and >= 0")));
            }
        }
        Ok(Self { observations, weights })
    }

    /// Every weight set to one.
    pub fn unweighted(observations: Vec<Vec<f64>>) -> Result<Self> {
        let n = observations.len();
        Self::new(observations, vec![1.0; n])
    }

    /// Weights `φ(y_i) = ∏_k (y_ik − a_k)²`.
    pub fn with_central_weight(observations: Vec<Vec<f64>>, weight: &CentralWeight) -> Result<Self> {
        let mut w = Vec::with_capacity(observations.len());
        for (i, y) in observations.iter().enumerate() {
            if y.len() != weight.dim() {
                return Err(Error::InvalidData(format!(
                    "observation {i} has {} components but the weight has {} centers",
                    y.len(),
                    weight.dim()
                )));
            }
            w.push(weight.eval(y));
        }
        Self::new(observations, w)
    }

    pub fn observations(&self) -> &[Vec<f64>] {
        &self.observations
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn data_dim(&self) -> usize {
        self.observations[0].len()
    }

    /// Same observations with replacement weights.
    pub fn reweighted(&self, weights: Vec<f64>) -> Result<Self> {
        Self::new(self.observations.clone(), weights)
    }
}

/// A parametric family `g(y | θ)`.
pub trait Model: Sync {
    fn name(&self) -> &str;
    /// Parameter dimension.
    fn dim(&self) -> usize;
    /// Observation dimension.
    fn data_dim(&self) -> usize {
        1
    }
    /// Closed box `[lo, hi]` per parameter.
    fn bounds(&self) -> Vec<(f64, f64)>;
    fn log_density(&self, y: &[f64], theta: &[f64]) -> f64;
    /// Starting point for the sampler.
    fn initial(&self, data: &WeightedDataset) -> Vec<f64>;
    /// One observation from `g(· | θ)`.
    fn draw(&self, theta: &[f64], rng: &mut dyn RngCore) -> Vec<f64>;

    fn in_bounds(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim() && theta.iter().zip(self.bounds()).all(|(&t, (lo, hi))| t >= lo && t <= hi)
    }
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn sample_mean(data: &WeightedDataset) -> f64 {
    data.observations().iter().map(|y| y[0]).sum::<f64>() / data.len() as f64
}

fn sample_sd(data: &WeightedDataset) -> f64 {
    let m = sample_mean(data);
    let v = data.observations().iter().map(|y| (y[0] - m).powi(2)).sum::<f64>() / data.len() as f64;
    v.sqrt().max(1e-3)
}

/// `N(μ, σ²)` with known `σ`; `θ = (μ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalMean {
    pub sigma: f64,
}

impl Model for NormalMean {
    fn name(&self) -> &str {
        "normal-mean"
    }
    fn dim(&self) -> usize {
        1
    }
    fn bounds(&self) -> Vec<(f64, f64)> {
        vec![(-1e6, 1e6)]
    }
    fn log_density(&self, y: &[f64], theta: &[f64]) -> f64 {
        let z = (y[0] - theta[0]) / self.sigma;
        -LN_SQRT_2PI - self.sigma.ln() - 0.5 * z * z
    }
    fn initial(&self, data: &WeightedDataset) -> Vec<f64> {
        vec![sample_mean(data)]
    }
    fn draw(&self, theta: &[f64], rng: &mut dyn RngCore) -> Vec<f64> {
        let z: f64 = StandardNormal.sample(rng);
        vec![theta[0] + self.sigma * z]
    }
}

/// `N(μ, σ²)`; `θ = (μ, σ)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Normal;

impl Model for Normal {
    fn name(&self) -> &str {
        "normal"
    }
    fn dim(&self) -> usize {
        2
    }
    fn bounds(&self) -> Vec<(f64, f64)> {
        vec![(-1e6, 1e6), (1e-9, 1e6)]
    }
    fn log_density(&self, y: &[f64], theta: &[f64]) -> f64 {
        let z = (y[0] - theta[0]) / theta[1];
        -LN_SQRT_2PI - theta[1].ln() - 0.5 * z * z
    }
    fn initial(&self, data: &WeightedDataset) -> Vec<f64> {
        vec![sample_mean(data), sample_sd(data)]
    }
    fn draw(&self, theta: &[f64], rng: &mut dyn RngCore) -> Vec<f64> {
        let z: f64 = StandardNormal.sample(rng);
        vec![theta[0] + theta[1] * z]
    }
}

/// Laplace location-scale; `θ = (μ, b)`, density `exp(−|y − μ|/b) / (2b)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Laplace;

impl Model for Laplace {
    fn name(&self) -> &str {
        "laplace"
    }
    fn dim(&self) -> usize {
        2
    }
    fn bounds(&self) -> Vec<(f64, f64)> {
        vec![(-1e6, 1e6), (1e-9, 1e6)]
    }
    fn log_density(&self, y: &[f64], theta: &[f64]) -> f64 {
        -(2.0 * theta[1]).ln() - (y[0] - theta[0]).abs() / theta[1]
    }
    fn initial(&self, data: &WeightedDataset) -> Vec<f64> {
        let mut ys: Vec<f64> = data.observations().iter().map(|y| y[0]).collect();
        ys.sort_by(f64::total_cmp);
        let med = ys[ys.len() / 2];
        let b = ys.iter().map(|y| (y - med).abs()).sum::<f64>() / ys.len() as f64;
        vec![med, b.max(1e-3)]
    }
    fn draw(&self, theta: &[f64], rng: &mut dyn RngCore) -> Vec<f64> {
        let e1: f64 = Exp1.sample(rng);
        let e2: f64 = Exp1.sample(rng);
        vec![theta[0] + theta[1] * (e1 - e2)]
    }
}

/// `n` seeded draws from `g(· | θ)`.
pub fn simulate(model: &dyn Model, theta: &[f64], n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    check_theta(model, theta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| model.draw(theta, &mut rng)).collect())
}

/// Looks up a built-in model; `sigma` is used by `normal-mean` only.
pub fn model_by_name(name: &str, sigma: f64) -> Result<Box<dyn Model>> {
    match name {
        "normal-mean" => {
            if !(sigma.is_finite() && sigma > 0.0) {
                return Err(Error::Domain(format!("normal-mean needs sigma > 0, got {sigma}")));
            }
            Ok(Box::new(NormalMean { sigma }))
        }
        "normal" => Ok(Box::new(Normal)),
        "laplace" => Ok(Box::new(Laplace)),
        other => Err(Error::Domain(format!("unknown model '{other}' (expected normal-mean, normal or laplace)"))),
    }
}

/// Prior density on `θ`, restricted to the model bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Prior {
    Flat,
    /// Independent normals per coordinate.
    Normal { mean: Vec<f64>, sd: Vec<f64> },
}

impl Prior {
    pub fn log_density(&self, theta: &[f64]) -> f64 {
        match self {
            Prior::Flat => 0.0,
            Prior::Normal { mean, sd } => theta
                .iter()
                .zip(mean.iter().zip(sd))
                .map(|(t, (m, s))| {
                    let z = (t - m) / s;
                    -LN_SQRT_2PI - s.ln() - 0.5 * z * z
                })
                .sum(),
        }
    }

    fn check(&self, dim: usize) -> Result<()> {
        if let Prior::Normal { mean, sd } = self {
            if mean.len() != dim || sd.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: mean.len().min(sd.len()) });
            }
            if sd.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
                return Err(Error::Domain("prior standard deviations must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Where a set of posterior draws came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum Provenance {
    File { path: String },
    Sampler { seed: u64, steps: usize, burn_in: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    draws: Vec<Vec<f64>>,
    provenance: Provenance,
}

impl PosteriorDraws {
    /// Checks the count and that every draw lies inside the model bounds.
    pub fn new(model: &dyn Model, draws: Vec<Vec<f64>>, provenance: Provenance) -> Result<Self> {
        if draws.is_empty() {
            return Err(Error::EmptyDraws);
        }
        if draws.len() < MIN_DRAWS {
            return Err(Error::InvalidData(format!("{} posterior draws (need at least {MIN_DRAWS})", draws.len())));
        }
        for d in &draws {
            if d.len() != model.dim() {
                return Err(Error::DimensionMismatch { expected: model.dim(), found: d.len() });
            }
            if !model.in_bounds(d) {
                return Err(Error::OutOfBounds { theta: d.clone() });
            }
        }
        Ok(Self { draws, provenance })
    }

    pub fn draws(&self) -> &[Vec<f64>] {
        &self.draws
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    /// Coordinate-wise mean, each coordinate summed in sorted order.
    pub fn mean(&self) -> Vec<f64> {
        let p = self.draws[0].len();
        (0..p)
            .map(|k| {
                let mut col: Vec<f64> = self.draws.iter().map(|d| d[k]).collect();
                sorted_mean(&mut col)
            })
            .collect()
    }
}

/// Mean as `min + Σ(x − min)/n` over sorted values: permutation invariant and
/// exact when all values coincide.
fn sorted_mean(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let lo = xs[0];
    let mut s = KahanSum::default();
    for &x in xs.iter() {
        s.add(x - lo);
    }
    lo + s.value() / xs.len() as f64
}

fn check_model_data(model: &dyn Model, data: &WeightedDataset) -> Result<()> {
    if data.data_dim() != model.data_dim() {
        return Err(Error::DimensionMismatch { expected: model.data_dim(), found: data.data_dim() });
    }
    Ok(())
}

fn check_theta(model: &dyn Model, theta: &[f64]) -> Result<()> {
    if theta.len() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), found: theta.len() });
    }
    if !model.in_bounds(theta) {
        return Err(Error::OutOfBounds { theta: theta.to_vec() });
    }
    Ok(())
}

fn loglik_unchecked(model: &dyn Model, theta: &[f64], data: &WeightedDataset) -> Result<f64> {
    let mut s = KahanSum::default();
    for (i, (y, &w)) in data.observations().iter().zip(data.weights()).enumerate() {
        if w == 0.0 {
            continue;
        }
        let l = model.log_density(y, theta);
        if l == f64::NEG_INFINITY || l.is_nan() {
            return Err(Error::OutOfSupport { index: i });
        }
        s.add(w * l);
    }
    Ok(s.value())
}

/// `Σ φ(y_i) log g(y_i | θ)`. Observations with zero weight are skipped.
pub fn weighted_loglik(model: &dyn Model, theta: &[f64], data: &WeightedDataset) -> Result<f64> {
    check_model_data(model, data)?;
    check_theta(model, theta)?;
    loglik_unchecked(model, theta, data)
}

/// `−2 Σ φ(y_i) log g(y_i | θ)`.
pub fn weighted_deviance(model: &dyn Model, theta: &[f64], data: &WeightedDataset) -> Result<f64> {
    Ok(-2.0 * weighted_loglik(model, theta, data)?)
}

fn mean_deviance(model: &dyn Model, draws: &PosteriorDraws, data: &WeightedDataset) -> Result<f64> {
    check_model_data(model, data)?;
    let devs: Result<Vec<f64>> = draws
        .draws()
        .par_iter()
        .map(|t| {
            check_theta(model, t)?;
            Ok(-2.0 * loglik_unchecked(model, t, data)?)
        })
        .collect();
    let mut devs = devs?;
    Ok(sorted_mean(&mut devs))
}

/// `p_D^w`: mean deviance over the draws minus the deviance at `θ̂`.
pub fn penalty_pwd(
    model: &dyn Model,
    draws: &PosteriorDraws,
    theta_hat: &[f64],
    data: &WeightedDataset,
) -> Result<f64> {
    if draws.is_empty() {
        return Err(Error::EmptyDraws);
    }
    let at_hat = weighted_deviance(model, theta_hat, data)?;
    Ok(mean_deviance(model, draws, data)? - at_hat)
}

/// Rule for the plug-in estimate `θ̂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaHatRule {
    /// Coordinate-wise mean of the draws.
    #[default]
    Mean,
    /// Draw with the highest unweighted log posterior; ties go to the
    /// lexicographically smallest draw.
    Mode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WdicResult {
    pub wdic: f64,
    pub pwd: f64,
    pub dev_at_hat: f64,
    pub theta_hat: Vec<f64>,
}

/// Unweighted `log L(θ | y) + log Π(θ)`.
pub fn log_posterior(model: &dyn Model, prior: &Prior, theta: &[f64], data: &WeightedDataset) -> f64 {
    if !model.in_bounds(theta) {
        return f64::NEG_INFINITY;
    }
    let mut s = KahanSum::default();
    for y in data.observations() {
        s.add(model.log_density(y, theta));
    }
    let v = s.value() + prior.log_density(theta);
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

pub fn theta_hat(
    model: &dyn Model,
    draws: &PosteriorDraws,
    data: &WeightedDataset,
    rule: ThetaHatRule,
    prior: &Prior,
) -> Result<Vec<f64>> {
    prior.check(model.dim())?;
    Ok(match rule {
        ThetaHatRule::Mean => draws.mean(),
        ThetaHatRule::Mode => {
            let scored: Vec<f64> = draws.draws().par_iter().map(|t| log_posterior(model, prior, t, data)).collect();
            let mut best = 0;
            for k in 1..scored.len() {
                let better = match scored[k].total_cmp(&scored[best]) {
                    std::cmp::Ordering::Greater => true,
                    std::cmp::Ordering::Equal => lex_less(&draws.draws()[k], &draws.draws()[best]),
                    std::cmp::Ordering::Less => false,
                };
                if better {
                    best = k;
                }
            }
            draws.draws()[best].clone()
        }
    })
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

/// `WDIC = DE^w(θ̂) + 2 p_D^w`.
pub fn wdic(
    model: &dyn Model,
    draws: &PosteriorDraws,
    data: &WeightedDataset,
    rule: ThetaHatRule,
    prior: &Prior,
) -> Result<WdicResult> {
    let hat = theta_hat(model, draws, data, rule, prior)?;
    let dev_at_hat = weighted_deviance(model, &hat, data)?;
    let pwd = mean_deviance(model, draws, data)? - dev_at_hat;
    Ok(WdicResult { wdic: dev_at_hat + 2.0 * pwd, pwd, dev_at_hat, theta_hat: hat })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub steps: usize,
    pub burn_in: usize,
    pub step_size: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRun {
    pub draws: PosteriorDraws,
    /// Fraction of accepted proposals after burn-in.
    pub acceptance_rate: f64,
}

/// Random-walk Metropolis on the unweighted posterior, with isotropic
/// Gaussian proposals of scale `step_size`. Proposals outside the model
/// bounds are rejected. Every post-burn-in state is kept.
pub fn metropolis_sample(
    model: &dyn Model,
    prior: &Prior,
    data: &WeightedDataset,
    cfg: SamplerConfig,
) -> Result<SampleRun> {
    check_model_data(model, data)?;
    prior.check(model.dim())?;
    if cfg.steps <= cfg.burn_in {
        return Err(Error::Domain(format!("steps ({}) must exceed burn_in ({})", cfg.steps, cfg.burn_in)));
    }
    if !(cfg.step_size.is_finite() && cfg.step_size > 0.0) {
        return Err(Error::Domain(format!("step size must be positive, got {}", cfg.step_size)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut theta = model.initial(data);
    let mut lp = log_posterior(model, prior, &theta, data);
    if lp == f64::NEG_INFINITY {
        return Err(Error::OutOfBounds { theta });
    }
    let p = model.dim();
    let mut proposal = vec![0.0; p];
    let mut draws = Vec::with_capacity(cfg.steps - cfg.burn_in);
    let mut accepted = 0usize;
    for step in 0..cfg.steps {
        for (q, t) in proposal.iter_mut().zip(&theta) {
            let z: f64 = rng.sample(StandardNormal);
            *q = t + cfg.step_size * z;
        }
        let u: f64 = rng.random();
        let lq = log_posterior(model, prior, &proposal, data);
        let accept = lq > f64::NEG_INFINITY && u.ln() < lq - lp;
        if accept {
            theta.copy_from_slice(&proposal);
            lp = lq;
        }
        if step >= cfg.burn_in {
            accepted += accept as usize;
            draws.push(theta.clone());
        }
    }
    let rate = accepted as f64 / (cfg.steps - cfg.burn_in) as f64;
    if rate < 1e-3 {
        return Err(Error::ZeroAcceptance { rate });
    }
    let provenance = Provenance::Sampler { seed: cfg.seed, steps: cfg.steps, burn_in: cfg.burn_in };
    Ok(SampleRun { draws: PosteriorDraws::new(model, draws, provenance)?, acceptance_rate: rate })
}

/// Deviance of `N(θ, σ²)` data written out directly; used by tests as an
/// independent reference.
#[doc(hidden)]
pub fn normal_mean_deviance_reference(y: &[f64], mu: f64, sigma: f64) -> f64 {
    let ss: f64 = y.iter().map(|v| (v - mu) * (v - mu)).sum();
    y.len() as f64 * (2.0 * PI * sigma * sigma).ln() + ss / (sigma * sigma)
}
