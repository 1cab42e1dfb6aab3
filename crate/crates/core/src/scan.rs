//! `(ρ, x3)` sweeps over the two worked examples.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::{gibbs_gap_centered, printed, relative_de_pair, relative_we_pair, FormulaMode, PairConditional};
use crate::error::{Error, Result};
use crate::gaussian::{example1_cov, example2_cov, EntropyMode, GaussianDist};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Example {
    /// `Σ = [[1, ρ, ρ²], [ρ, 1, 0], [ρ², 0, 1]]`.
    One,
    /// Unit variances, `Σ12 = 1 − 2ρ`, `Σ13 = Σ23 = 1 − ρ`.
    Two,
}

impl Example {
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Example::One),
            2 => Ok(Example::Two),
            _ => Err(Error::Domain(format!("example must be 1 or 2, got {n}"))),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Example::One => 1,
            Example::Two => 2,
        }
    }

    pub fn cov(self, rho: f64) -> Result<GaussianDist> {
        match self {
            Example::One => {
                printed::check_example1(rho, 0.0)?;
                example1_cov(rho)
            }
            Example::Two => example2_cov(rho),
        }
    }

    /// Published closed-form weighted relative entropy.
    pub fn relative_we_printed(self, rho: f64, x3: f64) -> Result<f64> {
        match self {
            Example::One => printed::example1_relative_we_paper(rho, x3),
            Example::Two => printed::example2_relative_we_paper(rho, x3),
        }
    }

    fn check_rho(self, rho: f64) -> Result<()> {
        match self {
            Example::One => printed::check_example1(rho, 0.0),
            Example::Two => printed::check_example2(rho, 0.0),
        }
    }
}

/// `steps` evenly spaced values from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Range {
    /// A single value is written `lo == hi` with `steps == 1`.
    pub fn validate(&self, name: &str) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) {
            return Err(Error::Domain(format!("{name} range must be finite")));
        }
        if self.lo > self.hi {
            return Err(Error::Domain(format!("{name} range has lo {} > hi {}", self.lo, self.hi)));
        }
        let single = self.steps == 1 && self.lo == self.hi;
        if self.steps < 2 && !single {
            return Err(Error::Domain(format!("{name} range needs steps >= 2, got {}", self.steps)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let h = (self.hi - self.lo) / (self.steps - 1) as f64;
        (0..self.steps).map(|k| if k + 1 == self.steps { self.hi } else { self.lo + k as f64 * h }).collect()
    }
}

/// Column families a scan can compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    /// `D_paper` and `Dw_printed`.
    Paper,
    /// `D_corrected`.
    Corrected,
    /// `Dw_wick`.
    Wick,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub example: Example,
    pub rho: Range,
    pub x3: Range,
    pub modes: BTreeSet<ScanMode>,
}

impl ScanGrid {
    pub fn validate(&self) -> Result<()> {
        self.rho.validate("rho")?;
        self.x3.validate("x3")?;
        self.example.check_rho(self.rho.lo)?;
        self.example.check_rho(self.rho.hi)?;
        if self.example == Example::One {
            // validity is monotone in |ρ|; an interval straddling 0 is covered by its endpoints
            self.example.check_rho(self.rho.lo.abs().max(self.rho.hi.abs()))?;
        }
        if self.modes.is_empty() {
            return Err(Error::Domain("no scan modes selected".into()));
        }
        Ok(())
    }
}

pub const COLUMNS: [&str; 7] = ["rho", "x3", "D_paper", "D_corrected", "Dw_wick", "Dw_printed", "gibbs_gap"];

/// One `(ρ, x3)` point. Columns of unselected modes are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub rho: f64,
    pub x3: f64,
    pub d_paper: Option<f64>,
    pub d_corrected: Option<f64>,
    pub dw_wick: Option<f64>,
    pub dw_printed: Option<f64>,
    /// `Θ(x3) − E[X1² X2²]` from exact moments.
    pub gibbs_gap: f64,
}

impl ScanRow {
    /// Values in [`COLUMNS`] order.
    pub fn values(&self) -> [Option<f64>; 7] {
        [
            Some(self.rho),
            Some(self.x3),
            self.d_paper,
            self.d_corrected,
            self.dw_wick,
            self.dw_printed,
            Some(self.gibbs_gap),
        ]
    }
}

pub fn scan_point(example: Example, rho: f64, x3: f64, modes: &BTreeSet<ScanMode>) -> Result<ScanRow> {
    let pc = PairConditional::new(example.cov(rho)?, x3)?;
    let paper = modes.contains(&ScanMode::Paper);
    Ok(ScanRow {
        rho,
        x3,
        d_paper: paper.then(|| relative_de_pair(&pc, EntropyMode::Paper)).transpose()?,
        d_corrected: modes.contains(&ScanMode::Corrected).then(|| relative_de_pair(&pc, EntropyMode::Corrected)).transpose()?,
        dw_wick: modes.contains(&ScanMode::Wick).then(|| relative_we_pair(&pc, FormulaMode::Wick)).transpose()?,
        dw_printed: paper.then(|| example.relative_we_printed(rho, x3)).transpose()?,
        gibbs_gap: gibbs_gap_centered(&pc)?,
    })
}

/// Rows in `(ρ, x3)` lexicographic order, computed in parallel.
pub fn run_scan(grid: &ScanGrid) -> Result<Vec<ScanRow>> {
    grid.validate()?;
    let points: Vec<(f64, f64)> =
        grid.rho.values().into_iter().flat_map(|r| grid.x3.values().into_iter().map(move |x| (r, x))).collect();
    points.par_iter().map(|&(r, x)| scan_point(grid.example, r, x, &grid.modes)).collect()
}
