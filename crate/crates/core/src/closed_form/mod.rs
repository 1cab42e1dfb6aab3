//! Closed forms for the trivariate Gaussian with weight `∏ (x_i − μ_i)²`.
//!
//! Every moment-bearing expression can be evaluated two ways:
//!
//! - [`FormulaMode::Paper`] uses the factored moment expressions exactly as
//!   they were published, including known slips, so their values can be
//!   reproduced and compared;
//! - [`FormulaMode::Wick`] supplies every moment from [`crate::wick`] and is the
//!   reference value.
//!
//! Indices are zero-based throughout: `0, 1` are the pair `(X1, X2)` and `2`
//! is the conditioning coordinate `X3`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{condition, ConditionSpec, EntropyMode, GaussianDist};
use crate::numeric::CentralWeight;
use crate::wick::{central_moment, shifted_moment, MomentSpec, ShiftSpec};

pub mod printed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulaMode {
    Paper,
    Wick,
}

/// The pair `(X1, X2)` of a trivariate Gaussian, marginally and given `X3 = x3`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairConditional {
    base: GaussianDist,
    x3: f64,
    marginal: GaussianDist,
    conditional: GaussianDist,
}

impl PairConditional {
    pub fn new(base: GaussianDist, x3: f64) -> Result<Self> {
        if base.dim() != 3 {
            return Err(Error::UnsupportedDimension(base.dim()));
        }
        if !x3.is_finite() {
            return Err(Error::Domain(format!("non-finite x3 {x3}")));
        }
        let marginal = base.marginal(&[0, 1])?;
        let conditional = condition(&base, &ConditionSpec::new(vec![0, 1], vec![2], vec![x3]))?;
        Ok(Self { base, x3, marginal, conditional })
    }

    pub fn base(&self) -> &GaussianDist {
        &self.base
    }

    pub fn x3(&self) -> f64 {
        self.x3
    }

    /// Law of `(X1, X2)`, covariance `Σ1`.
    pub fn marginal(&self) -> &GaussianDist {
        &self.marginal
    }

    /// Law of `(X1, X2) | X3 = x3`, parameters `(μ̄, Σ̄)`.
    pub fn conditional(&self) -> &GaussianDist {
        &self.conditional
    }

    pub fn sigma1(&self) -> &DMatrix<f64> {
        self.marginal.cov()
    }

    pub fn sigma_bar(&self) -> &DMatrix<f64> {
        self.conditional.cov()
    }

    /// `μ̄ − μ1`.
    pub fn delta(&self) -> [f64; 2] {
        let (mb, m) = (self.conditional.mean(), self.marginal.mean());
        [mb[0] - m[0], mb[1] - m[1]]
    }

    /// Entries of `Σ1⁻¹`.
    pub fn sigma1_inv(&self) -> Result<DMatrix<f64>> {
        self.marginal.precision()
    }

    pub fn sigma_bar_inv(&self) -> Result<DMatrix<f64>> {
        self.conditional.precision()
    }

    fn default_centers(&self) -> CentralWeight {
        CentralWeight { centers: self.marginal.mean().iter().copied().collect() }
    }
}

fn check_trivariate(cov: &DMatrix<f64>) -> Result<()> {
    if cov.nrows() != 3 || cov.ncols() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: cov.nrows() });
    }
    Ok(())
}

fn check_index(i: usize, n: usize) -> Result<()> {
    if i >= n {
        return Err(Error::InvalidCondition(format!("index {i} out of range for dimension {n}")));
    }
    Ok(())
}

/// `Ξ = E[∏ (X_k − μ_k)²]` from the factored expression.
pub fn xi(cov: &DMatrix<f64>) -> Result<f64> {
    check_trivariate(cov)?;
    let s = |i: usize, j: usize| cov[(i, j)];
    Ok(s(0, 0) * (s(1, 1) * s(2, 2) + 2.0 * s(1, 2).powi(2))
        + 2.0 * s(0, 1) * (s(0, 1) * s(2, 2) + 2.0 * s(0, 2) * s(1, 2))
        + 2.0 * s(0, 2) * (2.0 * s(0, 1) * s(1, 2) + s(0, 2) * s(1, 1)))
}

/// Factored `Λ_ij = (Σ11Σ22 + 2Σ12²)(Σ33Σij + 2Σ3iΣ3j)`.
pub fn lambda_paper(cov: &DMatrix<f64>, i: usize, j: usize) -> Result<f64> {
    check_trivariate(cov)?;
    check_index(i, 3)?;
    check_index(j, 3)?;
    let s = |a: usize, b: usize| cov[(a, b)];
    Ok((s(0, 0) * s(1, 1) + 2.0 * s(0, 1).powi(2)) * (s(2, 2) * s(i, j) + 2.0 * s(2, i) * s(2, j)))
}

/// `Λ_ij = E[Y1² Y2² Y3² Y_i Y_j]` by full pair-partition summation.
pub fn lambda_wick(cov: &DMatrix<f64>, i: usize, j: usize) -> Result<f64> {
    check_trivariate(cov)?;
    check_index(i, 3)?;
    check_index(j, 3)?;
    let mut r = vec![2, 2, 2];
    r[i] += 1;
    r[j] += 1;
    central_moment(cov, &MomentSpec::new(r))
}

/// Weighted entropy of a trivariate Gaussian with weight centred at its mean:
/// `½ log((2π)³|Σ|) Ξ + ½ ∑ Σ⁻¹_ij Λ_ij`.
pub fn wde_trivariate(dist: &GaussianDist, mode: FormulaMode) -> Result<f64> {
    let cov = dist.cov();
    check_trivariate(cov)?;
    let prec = dist.precision()?;
    let xi = match mode {
        FormulaMode::Paper => xi(cov)?,
        FormulaMode::Wick => central_moment(cov, &MomentSpec::new([2, 2, 2]))?,
    };
    let mut quad = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let l = match mode {
                FormulaMode::Paper => lambda_paper(cov, i, j)?,
                FormulaMode::Wick => lambda_wick(cov, i, j)?,
            };
            quad += prec[(i, j)] * l;
        }
    }
    Ok(0.5 * (3.0 * (2.0 * PI).ln() + dist.log_det()?) * xi + 0.5 * quad)
}

/// Relative entropy `D(f_{pair|x3} ‖ f_pair)`.
///
/// `Paper` evaluates the published representation, which lacks the `−n/2`
/// term; `Corrected` subtracts it and equals the Gaussian KL.
pub fn relative_de_pair(pc: &PairConditional, mode: EntropyMode) -> Result<f64> {
    let p = pc.sigma1_inv()?;
    let sb = pc.sigma_bar();
    let mb = pc.conditional().mean();
    let m = pc.marginal().mean();
    let mut sum = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            sum += p[(i, j)] * (sb[(i, j)] + mb[i] * mb[j] - m[j] * mb[i] - m[i] * mb[j] + m[i] * m[j]);
        }
    }
    let c = 2.0 * (2.0 * PI).ln();
    let paper = 0.5 * (c + pc.marginal().log_det()?) - 0.5 * (c + pc.conditional().log_det()?) + 0.5 * sum;
    Ok(match mode {
        EntropyMode::Paper => paper,
        EntropyMode::Corrected => paper - 1.0,
    })
}

/// `Θ(x3) = E[∏_{k≤2} (X_k − a_k)² | X3 = x3]` as a shifted conditional moment.
pub fn theta(pc: &PairConditional, centers: &CentralWeight) -> Result<f64> {
    if centers.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: centers.dim() });
    }
    let mb = pc.conditional().mean();
    let shift = ShiftSpec::new([mb[0] - centers.centers[0], mb[1] - centers.centers[1]]);
    shifted_moment(pc.sigma_bar(), &shift, &MomentSpec::new([2, 2]))
}

/// `Θ(x3)` with centers at `μ1`, from the expanded expression.
pub fn theta_paper(pc: &PairConditional) -> f64 {
    let s = pc.sigma_bar();
    let [d1, d2] = pc.delta();
    (s[(0, 0)] * s[(1, 1)] + 2.0 * s[(0, 1)].powi(2))
        + s[(0, 0)] * d2 * d2
        + s[(1, 1)] * d1 * d1
        + 4.0 * s[(0, 1)] * d1 * d2
        + (d1 * d2).powi(2)
}

fn theta_mode(pc: &PairConditional, mode: FormulaMode) -> Result<f64> {
    match mode {
        FormulaMode::Paper => Ok(theta_paper(pc)),
        FormulaMode::Wick => theta(pc, &pc.default_centers()),
    }
}

/// Conditional-covariance moments in their printed closed forms
/// (`Ȳ ~ N(0, Σ̄)`, indices in `{0, 1}`).
mod pm {
    use nalgebra::DMatrix;

    /// `E[Ȳ1 Ȳ2 Ȳi Ȳj]`.
    pub fn e_12ij(s: &DMatrix<f64>, i: usize, j: usize) -> f64 {
        s[(0, 1)] * s[(i, j)] + s[(0, i)] * s[(1, j)] + s[(0, j)] * s[(1, i)]
    }

    /// `E[Ȳi² Ȳj Ȳk]`.
    pub fn e_iijk(s: &DMatrix<f64>, i: usize, j: usize, k: usize) -> f64 {
        s[(i, i)] * s[(j, k)] + 2.0 * s[(i, j)] * s[(i, k)]
    }

    /// `E[Ȳ1² Ȳ2²]`.
    pub fn e_1122(s: &DMatrix<f64>) -> f64 {
        s[(0, 0)] * s[(1, 1)] + 2.0 * s[(0, 1)].powi(2)
    }

    /// `E[Ȳ1² Ȳ2² Ȳi Ȳj]`.
    pub fn e_1122ij(s: &DMatrix<f64>, i: usize, j: usize) -> f64 {
        s[(0, 0)] * (s[(1, 1)] * s[(i, j)] + 2.0 * s[(1, i)] * s[(1, j)])
            + 2.0 * s[(0, 1)] * (s[(0, 1)] * s[(i, j)] + s[(0, i)] * s[(1, j)] + s[(0, j)] * s[(1, i)])
            + s[(0, i)] * (2.0 * s[(0, 1)] * s[(1, j)] + s[(1, 1)] * s[(0, j)])
            + s[(0, j)] * (2.0 * s[(0, 1)] * s[(1, i)] + s[(1, 1)] * s[(0, i)])
    }
}

/// Covariance of `(Ȳ_{idx[0]}, Ȳ_{idx[1]}, …)`, repeated coordinates allowed.
fn augmented(s: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |a, b| s[(idx[a], idx[b])])
}

/// `Λ̄_ij = E[∏_{k≤2}(X_k − μ_k)² (X_i − μ̄_i)(X_j − μ̄_j) | X3]`.
///
/// `Paper` follows the published expansion term by term, including its
/// `∑_k δ_k² E[Ȳ_k² Ȳ_i Ȳ_j]` cross term.
pub fn lambda_bar(pc: &PairConditional, i: usize, j: usize, mode: FormulaMode) -> Result<f64> {
    check_index(i, 2)?;
    check_index(j, 2)?;
    let s = pc.sigma_bar();
    let d = pc.delta();
    match mode {
        FormulaMode::Wick => shifted_moment(
            &augmented(s, &[0, 1, i, j]),
            &ShiftSpec::new([d[0], d[1], 0.0, 0.0]),
            &MomentSpec::new([2, 2, 1, 1]),
        ),
        FormulaMode::Paper => Ok(pm::e_1122ij(s, i, j)
            + (0..2).map(|k| d[k] * d[k] * pm::e_iijk(s, k, i, j)).sum::<f64>()
            + (d[0] * d[1]).powi(2) * s[(i, j)]
            + 4.0 * d[0] * d[1] * pm::e_12ij(s, i, j)),
    }
}

/// `Υ_ij = E[∏_{k≤2}(X_k − μ_k)² (X_i − μ_i)(X_j − μ_j) | X3]`.
pub fn upsilon(pc: &PairConditional, i: usize, j: usize, mode: FormulaMode) -> Result<f64> {
    check_index(i, 2)?;
    check_index(j, 2)?;
    let s = pc.sigma_bar();
    let d = pc.delta();
    match mode {
        FormulaMode::Wick => shifted_moment(
            &augmented(s, &[0, 1, i, j]),
            &ShiftSpec::new([d[0], d[1], d[i], d[j]]),
            &MomentSpec::new([2, 2, 1, 1]),
        ),
        FormulaMode::Paper => {
            let (d1, d2, di, dj) = (d[0], d[1], d[i], d[j]);
            Ok(pm::e_1122ij(s, i, j)
                + pm::e_1122(s) * di * dj
                + 2.0 * pm::e_iijk(s, 0, 1, i) * d2 * dj
                + 2.0 * pm::e_iijk(s, 0, 1, j) * d2 * di
                + pm::e_iijk(s, 0, i, j) * d2 * d2
                + s[(0, 0)] * d2 * d2 * di * dj
                + 2.0 * pm::e_iijk(s, 1, 0, i) * d1 * dj
                + 2.0 * pm::e_iijk(s, 1, 0, j) * d1 * di
                + 4.0 * pm::e_12ij(s, i, j) * d1 * d2
                + 4.0 * s[(0, 1)] * d1 * d2 * di * dj
                + 2.0 * s[(0, i)] * dj * d1 * d2 * d2
                + 2.0 * s[(0, j)] * di * d1 * d2 * d2
                + pm::e_iijk(s, 1, i, j) * d1 * d1
                + s[(1, 1)] * d1 * d1 * di * dj
                + 2.0 * s[(1, i)] * d2 * d1 * d1 * dj
                + 2.0 * s[(1, j)] * d2 * d1 * d1 * di
                + s[(i, j)] * (d1 * d2).powi(2)
                + (d1 * d2).powi(2) * di * dj)
        }
    }
}

fn contract(m: &DMatrix<f64>, mut entry: impl FnMut(usize, usize) -> Result<f64>) -> Result<f64> {
    let mut sum = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            sum += m[(i, j)] * entry(i, j)?;
        }
    }
    Ok(sum)
}

/// `H^w_φ(X1, X2 | X3 = x3) = ½ log((2π)²|Σ̄|) Θ + ½ ∑ Σ̄⁻¹_ij Λ̄_ij`.
pub fn cond_wde_pair(pc: &PairConditional, mode: FormulaMode) -> Result<f64> {
    let th = theta_mode(pc, mode)?;
    let q = contract(&pc.sigma_bar_inv()?, |i, j| lambda_bar(pc, i, j, mode))?;
    Ok(0.5 * (2.0 * (2.0 * PI).ln() + pc.conditional().log_det()?) * th + 0.5 * q)
}

/// `−∫ φ f(x | x3) log f(x)`: `½ log((2π)²|Σ1|) Θ + ½ ∑ Σ1⁻¹_ij Υ_ij`.
pub fn cross_wde_pair(pc: &PairConditional, mode: FormulaMode) -> Result<f64> {
    let th = theta_mode(pc, mode)?;
    let q = contract(&pc.sigma1_inv()?, |i, j| upsilon(pc, i, j, mode))?;
    Ok(0.5 * (2.0 * (2.0 * PI).ln() + pc.marginal().log_det()?) * th + 0.5 * q)
}

/// `D^w_φ(f_{pair|x3} ‖ f_pair) = ½ log(|Σ1|/|Σ̄|) Θ + ½ ∑ Σ1⁻¹_ij Υ_ij − ½ ∑ Σ̄⁻¹_ij Λ̄_ij`.
pub fn relative_we_pair(pc: &PairConditional, mode: FormulaMode) -> Result<f64> {
    let th = theta_mode(pc, mode)?;
    let up = contract(&pc.sigma1_inv()?, |i, j| upsilon(pc, i, j, mode))?;
    let lb = contract(&pc.sigma_bar_inv()?, |i, j| lambda_bar(pc, i, j, mode))?;
    Ok(0.5 * (pc.marginal().log_det()? - pc.conditional().log_det()?) * th + 0.5 * up - 0.5 * lb)
}

/// `Θ(x3) − E[∏_{k≤2}(X_k − a_k)²]`: the weighted Gibbs condition for the pair.
pub fn gibbs_gap(pc: &PairConditional, centers: &CentralWeight) -> Result<f64> {
    let th = theta(pc, centers)?;
    let m = pc.marginal().mean();
    let shift = ShiftSpec::new([m[0] - centers.centers[0], m[1] - centers.centers[1]]);
    Ok(th - shifted_moment(pc.sigma1(), &shift, &MomentSpec::new([2, 2]))?)
}

/// [`gibbs_gap`] with centers at the pair means.
pub fn gibbs_gap_centered(pc: &PairConditional) -> Result<f64> {
    gibbs_gap(pc, &pc.default_centers())
}
