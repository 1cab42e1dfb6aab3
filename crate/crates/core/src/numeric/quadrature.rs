//! Midpoint-rule tensor quadrature.
//!
//! Cells with `f ≤ 1e-300` are skipped, which implements `0·log 0 = 0` and
//! `0·log(0/0) = 0`. Slices along the first axis are summed in parallel and
//! combined in index order, so results do not depend on the worker count.

use rayon::prelude::*;

use super::{Density, KahanSum, Weight};
use crate::error::{Error, Result};
use crate::gaussian::{GaussianDist, MAX_DIM};

const TINY: f64 = 1e-300;
const MAX_CELLS: f64 = 1e8;

/// One grid axis: `points` midpoint nodes over `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Axis {
    fn step(&self) -> f64 {
        (self.hi - self.lo) / self.points as f64
    }

    fn node(&self, k: usize) -> f64 {
        self.lo + (k as f64 + 0.5) * self.step()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        let grid = Self { axes };
        grid.validate()?;
        Ok(grid)
    }

    /// Same number of points on every axis.
    pub fn uniform(bounds: &[(f64, f64)], points: usize) -> Result<Self> {
        Self::new(bounds.iter().map(|&(lo, hi)| Axis { lo, hi, points }).collect())
    }

    /// Box `μ_i ± sigmas·σ_i` around a Gaussian.
    pub fn around(dist: &GaussianDist, sigmas: f64, points: usize) -> Result<Self> {
        let bounds: Vec<_> = (0..dist.dim())
            .map(|i| {
                let s = dist.cov()[(i, i)].sqrt();
                (dist.mean()[i] - sigmas * s, dist.mean()[i] + sigmas * s)
            })
            .collect();
        Self::uniform(&bounds, points)
    }

    /// Smallest box containing both grids' boxes, with the larger point count.
    pub fn union(&self, other: &GridSpec) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Self::new(
            self.axes
                .iter()
                .zip(&other.axes)
                .map(|(a, b)| Axis { lo: a.lo.min(b.lo), hi: a.hi.max(b.hi), points: a.points.max(b.points) })
                .collect(),
        )
    }

    /// Doubles the number of points on every axis.
    pub fn refined(&self) -> Self {
        Self { axes: self.axes.iter().map(|a| Axis { points: 2 * a.points, ..*a }).collect() }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn cells(&self) -> f64 {
        self.axes.iter().map(|a| a.points as f64).product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::step).product()
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > MAX_DIM {
            return Err(Error::InvalidGrid(format!("{} axes (supported: 1..=6)", self.axes.len())));
        }
        for (i, a) in self.axes.iter().enumerate() {
            if !(a.lo < a.hi) || !a.lo.is_finite() || !a.hi.is_finite() {
                return Err(Error::InvalidGrid(format!("axis {i}: need finite lo < hi, got [{}, {}]", a.lo, a.hi)));
            }
            if a.points < 16 {
                return Err(Error::InvalidGrid(format!("axis {i}: {} points (< 16)", a.points)));
            }
        }
        if self.cells() > MAX_CELLS {
            return Err(Error::InvalidGrid(format!("{:e} cells exceed 1e8", self.cells())));
        }
        Ok(())
    }

    /// `∑_cells g(x) · cellVolume` for `K` integrands at once.
    pub fn integrate<const K: usize, G>(&self, g: G) -> [f64; K]
    where
        G: Fn(&[f64]) -> [f64; K] + Sync,
    {
        let n = self.dim();
        let first = self.axes[0];
        let rest = &self.axes[1..];
        let inner: usize = rest.iter().map(|a| a.points).product();
        let slices: Vec<[KahanSum; K]> = (0..first.points)
            .into_par_iter()
            .map(|k0| {
                let mut acc = [KahanSum::default(); K];
                let mut x = [0.0; MAX_DIM];
                x[0] = first.node(k0);
                let mut idx = [0usize; MAX_DIM];
                for _ in 0..inner {
                    for (d, a) in rest.iter().enumerate() {
                        x[d + 1] = a.node(idx[d]);
                    }
                    let v = g(&x[..n]);
                    for (s, vi) in acc.iter_mut().zip(v) {
                        s.add(vi);
                    }
                    for (d, a) in rest.iter().enumerate().rev() {
                        idx[d] += 1;
                        if idx[d] < a.points {
                            break;
                        }
                        idx[d] = 0;
                    }
                }
                acc
            })
            .collect();
        let vol = self.cell_volume();
        let mut out = [0.0; K];
        for (k, o) in out.iter_mut().enumerate() {
            let mut total = KahanSum::default();
            for s in &slices {
                total.add(s[k].value());
            }
            *o = total.value() * vol;
        }
        out
    }

    /// First node (in scan order) where `pred` holds.
    fn find(&self, pred: impl Fn(&[f64]) -> bool) -> Option<Vec<f64>> {
        let n = self.dim();
        let total: usize = self.axes.iter().map(|a| a.points).product();
        let mut x = vec![0.0; n];
        for flat in 0..total {
            let mut r = flat;
            for d in (0..n).rev() {
                let a = self.axes[d];
                x[d] = a.node(r % a.points);
                r /= a.points;
            }
            if pred(&x) {
                return Some(x);
            }
        }
        None
    }
}

/// A quadrature value with the weighted mass `∫ φ f` seen by the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub weighted_mass: f64,
}

fn check_dims(grid: &GridSpec, pdf: &dyn Density, weight: &Weight) -> Result<()> {
    grid.validate()?;
    if pdf.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: pdf.dim() });
    }
    weight.check_dim(grid.dim())
}

/// `H^w_φ(f) = −∫ φ f log f`.
pub fn wde_quadrature(pdf: &dyn Density, weight: &Weight, grid: &GridSpec) -> Result<QuadResult> {
    check_dims(grid, pdf, weight)?;
    let [value, weighted_mass] = grid.integrate(|x| {
        let lf = pdf.ln_pdf(x);
        let f = lf.exp();
        if f <= TINY {
            return [0.0, 0.0];
        }
        let w = weight.eval(x);
        [-w * f * lf, w * f]
    });
    Ok(QuadResult { value, weighted_mass })
}

/// [`wde_quadrature`] with a refinement self-check: errors with
/// `GridTooCoarse` when doubling the points moves the value by more than `tol`.
pub fn wde_quadrature_checked(pdf: &dyn Density, weight: &Weight, grid: &GridSpec, tol: f64) -> Result<QuadResult> {
    let coarse = wde_quadrature(pdf, weight, grid)?;
    let fine = wde_quadrature(pdf, weight, &grid.refined())?;
    if (fine.value - coarse.value).abs() > tol {
        return Err(Error::GridTooCoarse { coarse: coarse.value, fine: fine.value, tol });
    }
    Ok(fine)
}

/// `H^w_φ(X_A | X_B) = −∫ φ f log(f / f_B)`, with `given` listing the grid
/// coordinates of `X_B` in the order `given_marginal` expects them.
pub fn conditional_wde_quadrature(
    joint: &dyn Density,
    given_marginal: &dyn Density,
    given: &[usize],
    weight: &Weight,
    grid: &GridSpec,
) -> Result<QuadResult> {
    check_dims(grid, joint, weight)?;
    check_coords(given, given_marginal, grid.dim())?;
    let [value, weighted_mass] = grid.integrate(|x| {
        let lf = joint.ln_pdf(x);
        let f = lf.exp();
        if f <= TINY {
            return [0.0, 0.0];
        }
        let xb = gather(x, given);
        let w = weight.eval(x);
        [-w * f * (lf - given_marginal.ln_pdf(&xb[..given.len()])), w * f]
    });
    Ok(QuadResult { value, weighted_mass })
}

/// A marginal density acting on a subset of grid coordinates.
pub struct Marginal<'a> {
    pub coords: Vec<usize>,
    pub density: &'a dyn Density,
}

/// `I^w_φ = ∫ φ f log(f / ∏_k f_k)` over the given marginal factors.
pub fn mutual_wde_quadrature(
    joint: &dyn Density,
    marginals: &[Marginal<'_>],
    weight: &Weight,
    grid: &GridSpec,
) -> Result<QuadResult> {
    check_dims(grid, joint, weight)?;
    for m in marginals {
        check_coords(&m.coords, m.density, grid.dim())?;
    }
    let [value, weighted_mass] = grid.integrate(|x| {
        let lf = joint.ln_pdf(x);
        let f = lf.exp();
        if f <= TINY {
            return [0.0, 0.0];
        }
        let lprod: f64 = marginals
            .iter()
            .map(|m| m.density.ln_pdf(&gather(x, &m.coords)[..m.coords.len()]))
            .sum();
        let w = weight.eval(x);
        [w * f * (lf - lprod), w * f]
    });
    Ok(QuadResult { value, weighted_mass })
}

/// `D^w_φ(f ‖ g) = ∫ φ f log(f / g)`.
pub fn relative_wde_quadrature(f: &dyn Density, g: &dyn Density, weight: &Weight, grid: &GridSpec) -> Result<QuadResult> {
    check_dims(grid, f, weight)?;
    check_dims(grid, g, weight)?;
    let [value, weighted_mass, mismatches] = grid.integrate(|x| {
        let lf = f.ln_pdf(x);
        let fx = lf.exp();
        let w = weight.eval(x);
        if w * fx <= TINY {
            return [0.0, 0.0, 0.0];
        }
        let lg = g.ln_pdf(x);
        if lg == f64::NEG_INFINITY {
            return [0.0, 0.0, 1.0];
        }
        [w * fx * (lf - lg), w * fx, 0.0]
    });
    if mismatches > 0.0 {
        let at = grid
            .find(|x| weight.eval(x) * f.pdf(x) > TINY && g.ln_pdf(x) == f64::NEG_INFINITY)
            .unwrap_or_default();
        return Err(Error::SupportMismatch { at });
    }
    Ok(QuadResult { value, weighted_mass })
}

/// Weighted cross entropy `−∫ φ f log g`.
pub fn weighted_cross_entropy_quadrature(
    f: &dyn Density,
    g: &dyn Density,
    weight: &Weight,
    grid: &GridSpec,
) -> Result<QuadResult> {
    check_dims(grid, f, weight)?;
    check_dims(grid, g, weight)?;
    let [value, weighted_mass] = grid.integrate(|x| {
        let fx = f.pdf(x);
        if fx <= TINY {
            return [0.0, 0.0];
        }
        let w = weight.eval(x);
        [-w * fx * g.ln_pdf(x), w * fx]
    });
    Ok(QuadResult { value, weighted_mass })
}

/// `∫ φ (f − g)`: the weighted Gibbs condition.
pub fn gibbs_condition_value(f: &dyn Density, g: &dyn Density, weight: &Weight, grid: &GridSpec) -> Result<f64> {
    check_dims(grid, f, weight)?;
    check_dims(grid, g, weight)?;
    let [v] = grid.integrate(|x| [weight.eval(x) * (f.pdf(x) - g.pdf(x))]);
    Ok(v)
}

/// `∫ h f` over the grid.
pub fn expectation_quadrature(pdf: &dyn Density, h: impl Fn(&[f64]) -> f64 + Sync, grid: &GridSpec) -> Result<f64> {
    grid.validate()?;
    if pdf.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: pdf.dim() });
    }
    let [v] = grid.integrate(|x| {
        let f = pdf.pdf(x);
        if f <= TINY {
            [0.0]
        } else {
            [h(x) * f]
        }
    });
    Ok(v)
}

fn check_coords(coords: &[usize], density: &dyn Density, n: usize) -> Result<()> {
    if coords.len() != density.dim() {
        return Err(Error::DimensionMismatch { expected: density.dim(), found: coords.len() });
    }
    if let Some(&c) = coords.iter().find(|&&c| c >= n) {
        return Err(Error::InvalidCondition(format!("coordinate {c} outside grid of dimension {n}")));
    }
    Ok(())
}

fn gather(x: &[f64], coords: &[usize]) -> [f64; MAX_DIM] {
    let mut out = [0.0; MAX_DIM];
    for (o, &c) in out.iter_mut().zip(coords) {
        *o = x[c];
    }
    out
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::gaussian::{gaussian_kl, ConditionSpec, GaussianDist};
    use crate::numeric::{CentralWeight, FnDensity};
    use nalgebra::{DMatrix, DVector};

    fn std_normal() -> GaussianDist {
        GaussianDist::zero_mean(1, &[1.0]).unwrap()
    }

    #[test]
    fn standard_normal_entropy() {
        let d = std_normal();
        let grid = GridSpec::around(&d, 8.0, 400).unwrap();
        let r = wde_quadrature(&d.density().unwrap(), &Weight::Unit, &grid).unwrap();
        assert!((r.value - 0.5 * (2.0 * PI * std::f64::consts::E).ln()).abs() < 1e-10);
        assert!((r.weighted_mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn standard_normal_weighted_entropy() {
        let d = std_normal();
        let grid = GridSpec::around(&d, 8.0, 400).unwrap();
        let w = Weight::Central(CentralWeight::new([0.0]).unwrap());
        let r = wde_quadrature(&d.density().unwrap(), &w, &grid).unwrap();
        assert!((r.value - (0.5 * (2.0 * PI).ln() + 1.5)).abs() < 1e-10);
    }

    #[test]
    fn uniform_entropy_is_zero() {
        let u = FnDensity::new(1, |x: &[f64]| if (0.0..=1.0).contains(&x[0]) { 0.0 } else { f64::NEG_INFINITY });
        let grid = GridSpec::uniform(&[(-0.5, 1.5)], 200).unwrap();
        let r = wde_quadrature(&u, &Weight::Unit, &grid).unwrap();
        assert_eq!(r.value, 0.0);
        assert!((r.weighted_mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditional_of_independent_factors_is_first_entropy() {
        let d = GaussianDist::zero_mean(2, &[2.0, 0.0, 0.0, 0.5]).unwrap();
        let grid = GridSpec::around(&d, 8.0, 200).unwrap();
        let m2 = d.marginal(&[1]).unwrap().density().unwrap();
        let r = conditional_wde_quadrature(&d.density().unwrap(), &m2, &[1], &Weight::Unit, &grid).unwrap();
        let h1 = 0.5 * (2.0 * PI * std::f64::consts::E * 2.0).ln();
        assert!((r.value - h1).abs() < 1e-9);
        let zero = conditional_wde_quadrature(&d.density().unwrap(), &m2, &[1], &Weight::Constant(0.0), &grid).unwrap();
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn bivariate_mutual_information() {
        let rho: f64 = 0.6;
        let d = GaussianDist::zero_mean(2, &[1.0, rho, rho, 1.0]).unwrap();
        let grid = GridSpec::around(&d, 8.0, 300).unwrap();
        let m = d.marginal(&[0]).unwrap().density().unwrap();
        let marg = [Marginal { coords: vec![0], density: &m }, Marginal { coords: vec![1], density: &m }];
        let r = mutual_wde_quadrature(&d.density().unwrap(), &marg, &Weight::Unit, &grid).unwrap();
        assert!((r.value + 0.5 * (1.0 - rho * rho).ln()).abs() < 1e-4);
    }

    #[test]
    fn relative_unit_weight_matches_gaussian_kl() {
        let f = GaussianDist::new(DVector::from_vec(vec![0.3]), DMatrix::from_element(1, 1, 0.7)).unwrap();
        let g = GaussianDist::new(DVector::from_vec(vec![-0.2]), DMatrix::from_element(1, 1, 1.4)).unwrap();
        let grid = GridSpec::around(&f, 10.0, 800).unwrap();
        let r = relative_wde_quadrature(&f.density().unwrap(), &g.density().unwrap(), &Weight::Unit, &grid).unwrap();
        assert!((r.value - gaussian_kl(&f, &g).unwrap()).abs() < 1e-6);
        let same = relative_wde_quadrature(&f.density().unwrap(), &f.density().unwrap(), &Weight::Unit, &grid).unwrap();
        assert_eq!(same.value, 0.0);
    }

    #[test]
    fn support_mismatch_is_reported() {
        let f = std_normal().density().unwrap();
        let g = FnDensity::new(1, |x: &[f64]| if x[0] > 0.0 { 0.0 } else { f64::NEG_INFINITY });
        let grid = GridSpec::uniform(&[(-4.0, 4.0)], 64).unwrap();
        assert!(matches!(
            relative_wde_quadrature(&f, &g, &Weight::Unit, &grid),
            Err(Error::SupportMismatch { .. })
        ));
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::uniform(&[(0.0, 1.0)], 8).is_err());
        assert!(GridSpec::uniform(&[(1.0, 0.0)], 32).is_err());
        assert!(GridSpec::uniform(&[(0.0, 1.0); 3], 1000).is_err());
    }

    #[test]
    fn coarse_grid_is_flagged() {
        let d = std_normal();
        let grid = GridSpec::uniform(&[(-2.0, 2.0)], 16).unwrap();
        let r = wde_quadrature_checked(&d.density().unwrap(), &Weight::Unit, &grid, 1e-12);
        assert!(matches!(r, Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn chain_rule_via_quadrature_on_example1() {
        let d = crate::gaussian::example1_cov(0.4).unwrap();
        let grid = GridSpec::around(&d, 8.0, 96).unwrap();
        let m3 = d.marginal(&[2]).unwrap();
        let cond = conditional_wde_quadrature(&d.density().unwrap(), &m3.density().unwrap(), &[2], &Weight::Unit, &grid)
            .unwrap();
        let h123 = wde_quadrature(&d.density().unwrap(), &Weight::Unit, &grid).unwrap();
        let h3 = crate::gaussian::gaussian_de(&m3, crate::EntropyMode::Corrected).unwrap();
        assert!((cond.value - (h123.value - h3)).abs() < 1e-6);
        // sanity: the conditional is a fixed Gaussian, so the average equals its entropy
        let c = crate::gaussian::condition(&d, &ConditionSpec::new(vec![0, 1], vec![2], vec![0.0])).unwrap();
        let hc = crate::gaussian::gaussian_de(&c, crate::EntropyMode::Corrected).unwrap();
        assert!((cond.value - hc).abs() < 1e-6);
    }
}
