//! Finite-support joint distributions and exact checks of the entropy
//! identities with sums in place of integrals.
//!
//! Conditional entropies over conditioning values of probability zero
//! contribute nothing, and `0·log 0 = 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::CentralWeight;
use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-12;

/// Joint pmf on a rectangular grid of real labels, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJoint", into = "RawJoint")]
pub struct DiscreteJoint {
    dims: Vec<usize>,
    support: Vec<Vec<f64>>,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawJoint {
    dims: Vec<usize>,
    support: Vec<Vec<f64>>,
    probs: Vec<f64>,
}

impl TryFrom<RawJoint> for DiscreteJoint {
    type Error = Error;

    fn try_from(r: RawJoint) -> Result<Self> {
        DiscreteJoint::new(r.dims, r.support, r.probs)
    }
}

impl From<DiscreteJoint> for RawJoint {
    fn from(j: DiscreteJoint) -> Self {
        RawJoint { dims: j.dims, support: j.support, probs: j.probs }
    }
}

impl DiscreteJoint {
    pub fn new(dims: Vec<usize>, support: Vec<Vec<f64>>, probs: Vec<f64>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidPmf(format!("dims must be nonempty and positive, got {dims:?}")));
        }
        if support.len() != dims.len() {
            return Err(Error::InvalidPmf(format!("{} support vectors for {} dims", support.len(), dims.len())));
        }
        for (k, (s, &d)) in support.iter().zip(&dims).enumerate() {
            if s.len() != d {
                return Err(Error::InvalidPmf(format!("support {k} has {} labels, expected {d}", s.len())));
            }
            if s.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidPmf(format!("support {k} has a non-finite label")));
            }
        }
        let cells: usize = dims.iter().product();
        if probs.len() != cells {
            return Err(Error::InvalidPmf(format!("{} probabilities for {cells} cells", probs.len())));
        }
        if let Some(i) = probs.iter().position(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidPmf(format!("probability {i} is {}", probs[i])));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidPmf(format!("probabilities sum to {total}")));
        }
        Ok(Self { dims, support, probs })
    }

    /// Pmf with labels `0, 1, …, k−1` on every axis.
    pub fn with_default_labels(dims: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let support = dims.iter().map(|&d| (0..d).map(|v| v as f64).collect()).collect();
        Self::new(dims, support, probs)
    }

    /// Seeded random pmf with default labels. Each cell is zeroed with
    /// probability `zero_fraction`; at least one cell keeps positive mass.
    pub fn random(dims: &[usize], seed: u64, zero_fraction: f64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cells: usize = dims.iter().product();
        let mut w: Vec<f64> = (0..cells)
            .map(|_| {
                let keep = rng.random::<f64>() >= zero_fraction;
                let u: f64 = rng.random();
                if keep {
                    u + 1e-3
                } else {
                    0.0
                }
            })
            .collect();
        if w.iter().all(|&x| x == 0.0) {
            w[rng.random_range(0..cells)] = 1.0;
        }
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        Self::with_default_labels(dims.to_vec(), w)
    }

    /// Product of one-dimensional pmfs.
    pub fn product(marginals: &[Vec<f64>]) -> Result<Self> {
        let dims: Vec<usize> = marginals.iter().map(Vec::len).collect();
        let cells: usize = dims.iter().product();
        let mut probs = vec![1.0; cells];
        let strides = strides(&dims);
        for (flat, p) in probs.iter_mut().enumerate() {
            for (k, m) in marginals.iter().enumerate() {
                *p *= m[(flat / strides[k]) % dims[k]];
            }
        }
        Self::with_default_labels(dims, probs)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn support(&self) -> &[Vec<f64>] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    /// Same labels, replaced by `support`.
    pub fn relabeled(&self, support: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(self.dims.clone(), support, self.probs.clone())
    }

    /// Marginal over `coords`, with axes in the order given.
    pub fn marginal(&self, coords: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.ndim()];
        for &c in coords {
            if c >= self.ndim() || std::mem::replace(&mut seen[c], true) {
                return Err(Error::InvalidCondition(format!("bad coordinate list {coords:?}")));
            }
        }
        let dims: Vec<usize> = coords.iter().map(|&c| self.dims[c]).collect();
        let support = coords.iter().map(|&c| self.support[c].clone()).collect();
        let mut probs = vec![0.0; dims.iter().product()];
        let src = strides(&self.dims);
        let dst = strides(&dims);
        for (flat, &p) in self.probs.iter().enumerate() {
            let mut j = 0;
            for (k, &c) in coords.iter().enumerate() {
                j += ((flat / src[c]) % self.dims[c]) * dst[k];
            }
            probs[j] += p;
        }
        Ok(Self { dims, support, probs })
    }

    fn index(&self, flat: usize, out: &mut [usize]) {
        let mut r = flat;
        for k in (0..self.ndim()).rev() {
            out[k] = r % self.dims[k];
            r /= self.dims[k];
        }
    }

    fn values(&self, idx: &[usize], out: &mut [f64]) {
        for (k, (&i, o)) in idx.iter().zip(out.iter_mut()).enumerate() {
            *o = self.support[k][i];
        }
    }

    /// Flat index of the sub-multi-index `idx[coords]` in the marginal over `coords`.
    fn sub_flat(&self, idx: &[usize], coords: &[usize]) -> usize {
        coords.iter().fold(0, |acc, &c| acc * self.dims[c] + idx[c])
    }

    /// Calls `f(index, values, p)` for every cell with positive mass.
    fn for_each_cell(&self, mut f: impl FnMut(&[usize], &[f64], f64)) {
        let n = self.ndim();
        let mut idx = vec![0; n];
        let mut vals = vec![0.0; n];
        for (flat, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                self.index(flat, &mut idx);
                self.values(&idx, &mut vals);
                f(&idx, &vals, p);
            }
        }
    }

    /// `E[g(X) | X_B]` as a table over the marginal cells of `given`
    /// (zero where the conditioning value has probability zero).
    pub fn conditional_expectation(&self, given: &[usize], g: impl Fn(&[f64]) -> f64) -> Result<Vec<f64>> {
        let mb = self.marginal(given)?;
        let mut num = vec![0.0; mb.probs.len()];
        self.for_each_cell(|idx, vals, p| num[self.sub_flat(idx, given)] += g(vals) * p);
        Ok(num.iter().zip(&mb.probs).map(|(n, &pb)| if pb > 0.0 { n / pb } else { 0.0 }).collect())
    }

    /// `H^w_ψ(X_A | X_B) = −∑ ψ p(x_A, x_B) log p(x_A | x_B)`, summed over
    /// the cells of the `(A, B)` marginal. `psi` receives the labels in the
    /// order `A` then `B` together with the flat index of that marginal cell.
    pub fn conditional_weighted_entropy(
        &self,
        a: &[usize],
        b: &[usize],
        psi: impl Fn(&[f64], usize) -> f64,
    ) -> Result<f64> {
        let ab: Vec<usize> = a.iter().chain(b).copied().collect();
        let m = self.marginal(&ab)?;
        let tail: Vec<usize> = (a.len()..ab.len()).collect();
        let pb = m.marginal(&tail)?;
        let mut total = 0.0;
        let mut idx = vec![0; ab.len()];
        let mut vals = vec![0.0; ab.len()];
        for (flat, &p) in m.probs.iter().enumerate() {
            if p > 0.0 {
                m.index(flat, &mut idx);
                m.values(&idx, &mut vals);
                let q = pb.probs[m.sub_flat(&idx, &tail)];
                total -= psi(&vals, flat) * p * (p / q).ln();
            }
        }
        Ok(total)
    }

    /// `H^w_φ(X) = −∑ φ p log p` over the full table.
    pub fn weighted_entropy(&self, phi: impl Fn(&[f64]) -> f64) -> f64 {
        let mut total = 0.0;
        self.for_each_cell(|_, vals, p| total -= phi(vals) * p * p.ln());
        total
    }

    /// `I^w_φ = ∑ φ p log(p / ∏ p_k)` over the full table.
    pub fn weighted_mutual(&self, phi: impl Fn(&[f64]) -> f64) -> Result<f64> {
        let margs: Vec<DiscreteJoint> = (0..self.ndim()).map(|k| self.marginal(&[k])).collect::<Result<_>>()?;
        let mut total = 0.0;
        self.for_each_cell(|idx, vals, p| {
            let prod: f64 = idx.iter().zip(&margs).map(|(&i, m)| m.probs[i]).product();
            total += phi(vals) * p * (p / prod).ln();
        });
        Ok(total)
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn check_ndim(joint: &DiscreteJoint, max: usize) -> Result<()> {
    if joint.ndim() > max {
        return Err(Error::UnsupportedDimension(joint.ndim()));
    }
    Ok(())
}

fn check_weight(joint: &DiscreteJoint, w: &CentralWeight) -> Result<()> {
    if w.dim() != joint.ndim() {
        return Err(Error::DimensionMismatch { expected: joint.ndim(), found: w.dim() });
    }
    Ok(())
}

/// Both sides of `H(X_1, …, X_n) = ∑_i H(X_i | X_{i−1}, …, X_1)`.
pub fn chain_rule_de_check(joint: &DiscreteJoint) -> Result<(f64, f64)> {
    check_ndim(joint, 4)?;
    let lhs = joint.weighted_entropy(|_| 1.0);
    let mut rhs = 0.0;
    for i in 0..joint.ndim() {
        let before: Vec<usize> = (0..i).collect();
        rhs += joint.conditional_weighted_entropy(&[i], &before, |_, _| 1.0)?;
    }
    Ok((lhs, rhs))
}

/// Which conditional moment enters the weight `ψ_i` of the weighted chain rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PsiForm {
    /// `∏_{j≤i}(x_j−a_j)² · E[(X_{i+1}−a_{i+1})² | X_{≤i}]`, the one-step form.
    Printed,
    /// `∏_{j≤i}(x_j−a_j)² · E[∏_{j>i}(X_j−a_j)² | X_{≤i}]`, exact for every `n`.
    Tail,
}

/// Result of [`chain_rule_wde_check`]: `psi[i]` tabulates `ψ_{i+1}` over the
/// marginal cells of `(X_1, …, X_{i+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRuleWde {
    pub lhs: f64,
    pub rhs: f64,
    pub psi: Vec<Vec<f64>>,
}

/// Both sides of the weighted chain rule
/// `H^w_φ(X_1..X_n) = H^w_φ(X_n | X_{<n}) + ∑_{i<n} H^w_{ψ_i}(X_i | X_{<i})`.
pub fn chain_rule_wde_check(joint: &DiscreteJoint, weight: &CentralWeight, form: PsiForm) -> Result<ChainRuleWde> {
    check_ndim(joint, 4)?;
    check_weight(joint, weight)?;
    let n = joint.ndim();
    let a = &weight.centers;
    let lhs = joint.weighted_entropy(|x| weight.eval(x));

    let last_before: Vec<usize> = (0..n - 1).collect();
    // labels arrive as (x_n, x_1, …, x_{n−1})
    let mut rhs = joint.conditional_weighted_entropy(&[n - 1], &last_before, |v, _| {
        let mut w = (v[0] - a[n - 1]).powi(2);
        for (j, x) in v[1..].iter().enumerate() {
            w *= (x - a[j]).powi(2);
        }
        w
    })?;

    let mut psi = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let head: Vec<usize> = (0..=i).collect();
        let upper = match form {
            PsiForm::Printed => i + 2,
            PsiForm::Tail => n,
        };
        let cond = joint.conditional_expectation(&head, |x| (i + 1..upper).map(|j| (x[j] - a[j]).powi(2)).product())?;
        let table: Vec<f64> = joint
            .marginal(&head)?
            .cells_values()
            .iter()
            .zip(&cond)
            .map(|(vals, e)| vals.iter().zip(a).map(|(x, c)| (x - c).powi(2)).product::<f64>() * e)
            .collect();
        // H^w_ψ(X_i | X_{<i}): the (A, B) marginal has order (x_i, x_1..x_{i−1}),
        // so its flat index must be mapped back to the head order.
        let before: Vec<usize> = (0..i).collect();
        let dims_head: Vec<usize> = head.iter().map(|&c| joint.dims()[c]).collect();
        let di = joint.dims()[i];
        let inner: usize = dims_head[..i].iter().product();
        rhs += joint.conditional_weighted_entropy(&[i], &before, |_, flat| {
            let xi = flat / inner.max(1);
            let rest = flat % inner.max(1);
            table[rest * di + xi]
        })?;
        psi.push(table);
    }
    Ok(ChainRuleWde { lhs, rhs, psi })
}

impl DiscreteJoint {
    /// Label vectors of all cells in row-major order.
    fn cells_values(&self) -> Vec<Vec<f64>> {
        let mut idx = vec![0; self.ndim()];
        let mut vals = vec![0.0; self.ndim()];
        (0..self.probs.len())
            .map(|flat| {
                self.index(flat, &mut idx);
                self.values(&idx, &mut vals);
                vals.clone()
            })
            .collect()
    }
}

/// Both sides of `I^w_φ = ∑_{j<n} H^w_{ψ'_j}(X_j) − H^w_φ(X_1..X_{n−1} | X_n)`
/// with `ψ'_j(x_j) = (x_j−a_j)² E[∏_{i≠j}(X_i−a_i)² | X_j = x_j]`.
pub fn mutual_wde_decomposition_check(joint: &DiscreteJoint, weight: &CentralWeight) -> Result<(f64, f64)> {
    check_ndim(joint, 4)?;
    check_weight(joint, weight)?;
    let n = joint.ndim();
    let a = &weight.centers;
    let lhs = joint.weighted_mutual(|x| weight.eval(x))?;

    let mut rhs = 0.0;
    for j in 0..n - 1 {
        let cond = joint.conditional_expectation(&[j], |x| {
            (0..n).filter(|&i| i != j).map(|i| (x[i] - a[i]).powi(2)).product()
        })?;
        rhs += joint.conditional_weighted_entropy(&[j], &[], |v, flat| (v[0] - a[j]).powi(2) * cond[flat])?;
    }
    let first: Vec<usize> = (0..n - 1).collect();
    // labels arrive as (x_1, …, x_{n−1}, x_n)
    rhs -= joint.conditional_weighted_entropy(&first, &[n - 1], |v, _| weight.eval(v))?;
    Ok((lhs, rhs))
}

/// Result of [`mutual_de_decomposition_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutualDe {
    /// `I(X_1, …, X_n)` from the joint table.
    pub lhs: f64,
    /// `∑_{i<n} [H(X_i) − H(X_i | X_{i+1}, …, X_n)]`.
    pub rhs: f64,
    /// The same sum with each conditional entropy taken as an explicit
    /// expectation over the conditioning values.
    pub remark: f64,
}

pub fn mutual_de_decomposition_check(joint: &DiscreteJoint) -> Result<MutualDe> {
    check_ndim(joint, 4)?;
    let n = joint.ndim();
    let lhs = joint.weighted_mutual(|_| 1.0)?;
    let mut rhs = 0.0;
    let mut remark = 0.0;
    for i in 0..n - 1 {
        let after: Vec<usize> = (i + 1..n).collect();
        let hi = joint.conditional_weighted_entropy(&[i], &[], |_, _| 1.0)?;
        rhs += hi - joint.conditional_weighted_entropy(&[i], &after, |_, _| 1.0)?;

        // E_{x_{>i}} [H(X_i) − H(X_i | x_{>i})]
        let mut coords = after.clone();
        coords.push(i);
        let m = joint.marginal(&coords)?;
        let di = joint.dims()[i];
        for row in m.probs.chunks(di) {
            let py: f64 = row.iter().sum();
            if py <= 0.0 {
                continue;
            }
            let h_given: f64 = row.iter().filter(|&&p| p > 0.0).map(|&p| -(p / py) * (p / py).ln()).sum();
            remark += py * (hi - h_given);
        }
    }
    Ok(MutualDe { lhs, rhs, remark })
}

/// Per-conditioning-value sides of a relative-entropy identity.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentitySides {
    /// `(lhs, rhs)` for every value `y` of positive probability, in row-major order.
    pub per_y: Vec<(f64, f64)>,
    /// Expectation over `Y` of the left-hand side.
    pub expectation: f64,
    /// The mutual (weighted) entropy it should equal.
    pub mutual: f64,
}

impl IdentitySides {
    /// Largest absolute discrepancy over all per-`y` pairs and the expectation form.
    pub fn max_abs_dev(&self) -> f64 {
        self.per_y
            .iter()
            .map(|(l, r)| (l - r).abs())
            .fold((self.expectation - self.mutual).abs(), f64::max)
    }
}

/// Splits the joint into `(X, Y)` tables, returning `p(x, y)` as rows indexed by `y`.
fn split(joint: &DiscreteJoint, x_coords: &[usize]) -> Result<(DiscreteJoint, DiscreteJoint, Vec<usize>)> {
    if x_coords.is_empty() || x_coords.len() >= joint.ndim() {
        return Err(Error::InvalidCondition("X must be a proper nonempty subset of the coordinates".into()));
    }
    let y_coords: Vec<usize> = (0..joint.ndim()).filter(|c| !x_coords.contains(c)).collect();
    let mut order = y_coords.clone();
    order.extend_from_slice(x_coords);
    let yx = joint.marginal(&order)?;
    let px = joint.marginal(x_coords)?;
    Ok((yx, px, y_coords))
}

/// Both sides of `D(f_{X|y} ‖ f_X) = H^w_{φ_{X|y}}(X) − H(X | y)` for every `y`,
/// with `φ_{X|y} = f(x|y) / f_X(x)`, plus `E_Y[D] = I(X; Y)`.
pub fn relative_de_identity_check(joint: &DiscreteJoint, x_coords: &[usize]) -> Result<IdentitySides> {
    check_ndim(joint, 4)?;
    let (yx, px, _) = split(joint, x_coords)?;
    let nx = px.probs.len();
    let mut per_y = Vec::new();
    let mut expectation = 0.0;
    let mut mutual = 0.0;
    for row in yx.probs.chunks(nx) {
        let py: f64 = row.iter().sum();
        if py <= 0.0 {
            continue;
        }
        let (mut d, mut hw, mut h) = (0.0, 0.0, 0.0);
        for (&pxy, &pxm) in row.iter().zip(&px.probs) {
            if pxm <= 0.0 {
                continue;
            }
            let c = pxy / py;
            hw -= (c / pxm) * pxm * pxm.ln();
            if c > 0.0 {
                d += c * (c / pxm).ln();
                h -= c * c.ln();
                mutual += pxy * (pxy / (pxm * py)).ln();
            }
        }
        per_y.push((d, hw - h));
        expectation += py * d;
    }
    Ok(IdentitySides { per_y, expectation, mutual })
}

/// Weighted analogue: `D^w_φ(f_{X|y} ‖ f_X) = H^w_{φ'}(X) − H^w_φ(X | y)` with
/// `φ' = φ · f(x|y) / f_X(x)`, and `E_Y[ψ(Y) D^w_φ] = I^w_{φψ}(X; Y)`.
/// `wx` has one center per `X` coordinate and `wy` one per `Y` coordinate.
pub fn relative_we_identity_check(
    joint: &DiscreteJoint,
    x_coords: &[usize],
    wx: &CentralWeight,
    wy: &CentralWeight,
) -> Result<IdentitySides> {
    check_ndim(joint, 4)?;
    let (yx, px, y_coords) = split(joint, x_coords)?;
    if wx.dim() != x_coords.len() {
        return Err(Error::DimensionMismatch { expected: x_coords.len(), found: wx.dim() });
    }
    if wy.dim() != y_coords.len() {
        return Err(Error::DimensionMismatch { expected: y_coords.len(), found: wy.dim() });
    }
    let nx = px.probs.len();
    let x_vals = px.cells_values();
    let y_vals = joint.marginal(&y_coords)?.cells_values();
    let mut per_y = Vec::new();
    let mut expectation = 0.0;
    let mut mutual = 0.0;
    for (row, yv) in yx.probs.chunks(nx).zip(&y_vals) {
        let py: f64 = row.iter().sum();
        if py <= 0.0 {
            continue;
        }
        let psi = wy.eval(yv);
        let (mut d, mut hw_prime, mut hw_cond) = (0.0, 0.0, 0.0);
        for ((&pxy, &pxm), xv) in row.iter().zip(&px.probs).zip(&x_vals) {
            if pxm <= 0.0 {
                continue;
            }
            let phi = wx.eval(xv);
            let c = pxy / py;
            hw_prime -= phi * (c / pxm) * pxm * pxm.ln();
            if c > 0.0 {
                d += phi * c * (c / pxm).ln();
                hw_cond -= phi * c * c.ln();
                mutual += phi * psi * pxy * (pxy / (pxm * py)).ln();
            }
        }
        per_y.push((d, hw_prime - hw_cond));
        expectation += psi * py * d;
    }
    Ok(IdentitySides { per_y, expectation, mutual })
}
