//! Exact moments of jointly Gaussian vectors by pair-partition summation.
//!
//! For `Y ~ N(0, Σ)` the moment `E[∏ Y_i^{r_i}]` is expanded into a flat symbol
//! list (coordinate `i` repeated `r_i` times) and summed over all perfect
//! matchings of that list, each matching contributing the product of the
//! covariances of its pairs. Odd total order gives exactly zero.
//!
//! The covariance is only required to be square and symmetric: singular
//! matrices (for instance a covariance with duplicated coordinates) are
//! accepted, since the expansion is purely algebraic.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest total order accepted (11!! = 10395 matchings).
pub const MAX_ORDER: usize = 12;

/// Exponents `r_i` of `E[∏ Y_i^{r_i}]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MomentSpec {
    pub exponents: Vec<usize>,
}

impl MomentSpec {
    pub fn new(exponents: impl Into<Vec<usize>>) -> Self {
        Self { exponents: exponents.into() }
    }

    /// Total order `M = Σ r_i`.
    pub fn order(&self) -> usize {
        self.exponents.iter().sum()
    }

    /// Flat symbol list, e.g. `(2, 2, 1, 1)` → `[0, 0, 1, 1, 2, 3]`.
    pub fn symbols(&self) -> Vec<usize> {
        self.exponents
            .iter()
            .enumerate()
            .flat_map(|(i, &r)| std::iter::repeat_n(i, r))
            .collect()
    }

    fn check(&self, dim: usize) -> Result<()> {
        if self.exponents.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: self.exponents.len() });
        }
        let order = self.order();
        if order > MAX_ORDER {
            return Err(Error::OrderCapExceeded { order, cap: MAX_ORDER });
        }
        Ok(())
    }
}

/// Per-coordinate shifts `δ_i` for non-central moments `E[∏ (Y_i + δ_i)^{r_i}]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftSpec {
    pub deltas: Vec<f64>,
}

impl ShiftSpec {
    pub fn new(deltas: impl Into<Vec<f64>>) -> Self {
        Self { deltas: deltas.into() }
    }

    pub fn zeros(n: usize) -> Self {
        Self { deltas: vec![0.0; n] }
    }
}

/// A moment value together with the number of matchings that were summed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentValue {
    pub value: f64,
    pub matchings: u64,
}

fn check_cov(cov: &DMatrix<f64>) -> Result<usize> {
    if cov.nrows() != cov.ncols() {
        return Err(Error::DimensionMismatch { expected: cov.nrows(), found: cov.ncols() });
    }
    Ok(cov.nrows())
}

/// `E[∏ Y_i^{r_i}]` for `Y ~ N(0, cov)`.
pub fn central_moment(cov: &DMatrix<f64>, spec: &MomentSpec) -> Result<f64> {
    Ok(central_moment_counted(cov, spec)?.value)
}

/// As [`central_moment`], also reporting how many matchings were enumerated.
pub fn central_moment_counted(cov: &DMatrix<f64>, spec: &MomentSpec) -> Result<MomentValue> {
    let n = check_cov(cov)?;
    spec.check(n)?;
    if spec.order() % 2 == 1 {
        return Ok(MomentValue { value: 0.0, matchings: 0 });
    }
    Ok(sum_over_matchings(cov, &spec.symbols()))
}

/// `E[∏ (Y_i + δ_i)^{r_i}]` by multi-binomial expansion into central moments.
pub fn shifted_moment(cov: &DMatrix<f64>, shift: &ShiftSpec, spec: &MomentSpec) -> Result<f64> {
    Ok(shifted_moment_counted(cov, shift, spec)?.value)
}

pub fn shifted_moment_counted(cov: &DMatrix<f64>, shift: &ShiftSpec, spec: &MomentSpec) -> Result<MomentValue> {
    let n = check_cov(cov)?;
    spec.check(n)?;
    if shift.deltas.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: shift.deltas.len() });
    }
    if let Some(d) = shift.deltas.iter().find(|d| !d.is_finite()) {
        return Err(Error::Domain(format!("non-finite shift {d}")));
    }

    let r = &spec.exponents;
    let mut k = vec![0usize; n];
    let mut total = 0.0;
    let mut matchings = 0;
    loop {
        // coefficient ∏ C(r_i, k_i) δ_i^{r_i − k_i}
        let coef: f64 = (0..n)
            .map(|i| binomial(r[i], k[i]) * shift.deltas[i].powi((r[i] - k[i]) as i32))
            .product();
        if coef != 0.0 && k.iter().sum::<usize>() % 2 == 0 {
            let m = sum_over_matchings(cov, &MomentSpec::new(k.clone()).symbols());
            total += coef * m.value;
            matchings += m.matchings;
        }
        // odometer over 0..=r_i
        let mut i = 0;
        loop {
            if i == n {
                return Ok(MomentValue { value: total, matchings });
            }
            if k[i] < r[i] {
                k[i] += 1;
                break;
            }
            k[i] = 0;
            i += 1;
        }
    }
}

/// Number of perfect matchings of `order` symbols, counted by enumeration.
pub fn count_matchings(order: usize) -> Result<u64> {
    if order % 2 == 1 {
        return Err(Error::OddOrder(order));
    }
    if order > MAX_ORDER {
        return Err(Error::OrderCapExceeded { order, cap: MAX_ORDER });
    }
    let ones = DMatrix::from_element(1, 1, 1.0);
    Ok(sum_over_matchings(&ones, &vec![0; order]).matchings)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn sum_over_matchings(cov: &DMatrix<f64>, symbols: &[usize]) -> MomentValue {
    debug_assert!(symbols.len() % 2 == 0 && symbols.len() <= 16);
    let mut out = MomentValue { value: 0.0, matchings: 0 };
    pair_first_unpaired(cov, symbols, 0, 1.0, &mut out);
    out
}

fn pair_first_unpaired(cov: &DMatrix<f64>, symbols: &[usize], used: u32, acc: f64, out: &mut MomentValue) {
    let Some(first) = (0..symbols.len()).find(|&i| used & (1 << i) == 0) else {
        out.value += acc;
        out.matchings += 1;
        return;
    };
    let used = used | (1 << first);
    for partner in (first + 1)..symbols.len() {
        if used & (1 << partner) == 0 {
            let c = cov[(symbols[first], symbols[partner])];
            pair_first_unpaired(cov, symbols, used | (1 << partner), acc * c, out);
        }
    }
}
