//! Seeded Monte Carlo estimate of `D^w_φ(f ‖ g) = E_f[φ log(f/g)]`.
//!
//! Samples are drawn in fixed-size blocks; block `b` uses its own ChaCha8
//! stream, so the estimate does not depend on how blocks are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Density, Sampler, Weight};
use crate::error::{Error, Result};
use crate::gaussian::MAX_DIM;

const BLOCK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
}

impl McConfig {
    pub fn new(samples: usize, seed: u64) -> Result<Self> {
        if samples < 1000 {
            return Err(Error::Domain(format!("{samples} Monte Carlo samples (need at least 1000)")));
        }
        Ok(Self { samples, seed })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    /// Sample standard deviation over `√samples`.
    pub stderr: f64,
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Welford) -> Welford {
        if o.n == 0.0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Welford { n, mean: self.mean + d * o.n / n, m2: self.m2 + o.m2 + d * d * self.n * o.n / n }
    }
}

pub fn relative_wde_monte_carlo(
    sampler: &dyn Sampler,
    f: &dyn Density,
    g: &dyn Density,
    weight: &Weight,
    cfg: McConfig,
) -> Result<McEstimate> {
    let cfg = McConfig::new(cfg.samples, cfg.seed)?;
    let n = sampler.dim();
    for d in [f.dim(), g.dim()] {
        if d != n {
            return Err(Error::DimensionMismatch { expected: n, found: d });
        }
    }
    weight.check_dim(n)?;

    let blocks = cfg.samples.div_ceil(BLOCK);
    let partial: Vec<Result<Welford>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b as u64);
            let count = BLOCK.min(cfg.samples - b * BLOCK);
            let mut x = [0.0; MAX_DIM];
            let mut acc = Welford::default();
            for _ in 0..count {
                sampler.sample(&mut rng, &mut x[..n]);
                let x = &x[..n];
                let w = weight.eval(x);
                let v = if w == 0.0 {
                    0.0
                } else {
                    let lg = g.ln_pdf(x);
                    if lg == f64::NEG_INFINITY {
                        return Err(Error::SupportMismatch { at: x.to_vec() });
                    }
                    w * (f.ln_pdf(x) - lg)
                };
                acc.push(v);
            }
            Ok(acc)
        })
        .collect();
    let mut total = Welford::default();
    for p in partial {
        total = total.merge(p?);
    }
    let var = total.m2 / (total.n - 1.0);
    Ok(McEstimate { estimate: total.mean, stderr: (var / total.n).sqrt() })
}
