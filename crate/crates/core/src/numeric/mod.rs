//! Independent numerical oracles for the entropy functionals.
//!
//! - [`quadrature`]: midpoint tensor-grid integration of weighted entropies,
//!   divergences and moments.
//! - [`monte_carlo`]: seeded Monte Carlo estimate of the weighted divergence.
//! - [`discrete`]: finite-support surrogates on which the chain rules and
//!   decompositions hold verbatim with sums in place of integrals.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod discrete;
pub mod monte_carlo;
pub mod quadrature;

pub use discrete::{
    chain_rule_de_check, chain_rule_wde_check, mutual_de_decomposition_check, mutual_wde_decomposition_check,
    relative_de_identity_check, relative_we_identity_check, ChainRuleWde, DiscreteJoint, IdentitySides, MutualDe, PsiForm,
};
pub use monte_carlo::{relative_wde_monte_carlo, McConfig, McEstimate};
pub use quadrature::{
    conditional_wde_quadrature, expectation_quadrature, gibbs_condition_value, mutual_wde_quadrature,
    relative_wde_quadrature, wde_quadrature, wde_quadrature_checked, weighted_cross_entropy_quadrature, Axis,
    GridSpec, Marginal, QuadResult,
};

/// Probability density given through its logarithm.
pub trait Density: Sync {
    fn dim(&self) -> usize;

    /// `ln f(x)`; `-inf` outside the support.
    fn ln_pdf(&self, x: &[f64]) -> f64;

    fn pdf(&self, x: &[f64]) -> f64 {
        self.ln_pdf(x).exp()
    }
}

/// Draws from a distribution into a caller-provided buffer.
pub trait Sampler: Sync {
    fn dim(&self) -> usize;
    fn sample(&self, rng: &mut dyn RngCore, out: &mut [f64]);
}

/// Density given by a closure returning `ln f(x)`.
pub struct FnDensity<F> {
    dim: usize,
    ln_pdf: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnDensity<F> {
    pub fn new(dim: usize, ln_pdf: F) -> Self {
        Self { dim, ln_pdf }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Density for FnDensity<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn ln_pdf(&self, x: &[f64]) -> f64 {
        (self.ln_pdf)(x)
    }
}

/// Central-moments weight `φ(x) = ∏ (x_i − a_i)²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralWeight {
    pub centers: Vec<f64>,
}

impl CentralWeight {
    pub fn new(centers: impl Into<Vec<f64>>) -> Result<Self> {
        let centers = centers.into();
        if let Some(c) = centers.iter().find(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("non-finite weight center {c}")));
        }
        Ok(Self { centers })
    }

    pub fn dim(&self) -> usize {
        self.centers.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.centers.iter().zip(x).map(|(a, xi)| (xi - a) * (xi - a)).product()
    }
}

/// Weight function used by the quadrature and Monte Carlo routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Weight {
    /// `φ ≡ 1`, recovering the unweighted functionals.
    Unit,
    Constant(f64),
    Central(CentralWeight),
}

impl Weight {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Weight::Unit => 1.0,
            Weight::Constant(c) => *c,
            Weight::Central(w) => w.eval(x),
        }
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        match self {
            Weight::Central(w) if w.dim() != n => Err(Error::DimensionMismatch { expected: n, found: w.dim() }),
            _ => Ok(()),
        }
    }
}

impl From<CentralWeight> for Weight {
    fn from(w: CentralWeight) -> Self {
        Weight::Central(w)
    }
}

/// Compensated (Neumaier) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
