//! Multivariate Gaussian representation, conditioning and the unweighted
//! entropy / divergence closed forms.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{Density, Sampler};

/// Largest dimension accepted by the generic routines.
pub const MAX_DIM: usize = 6;

const SYMMETRY_TOL: f64 = 1e-12;
const EIGEN_FLOOR: f64 = 1e-10;

/// Which constant the Gaussian entropy formula carries.
///
/// `Paper` evaluates `½ log((2π)ⁿ |Σ|)` as printed; `Corrected` adds the `n/2`
/// term of the true differential entropy. For pairwise divergences the same
/// switch decides whether the `-n/2` term of the Gaussian KL is present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyMode {
    Paper,
    Corrected,
}

/// A Gaussian `N(mean, cov)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GaussianJson", into = "GaussianJson")]
pub struct GaussianDist {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

/// Wire format shared with the CLI: `{"mean": [...], "cov": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct GaussianJson {
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

impl TryFrom<GaussianJson> for GaussianDist {
    type Error = Error;

    fn try_from(raw: GaussianJson) -> Result<Self> {
        let n = raw.mean.len();
        if raw.cov.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: raw.cov.len() });
        }
        for row in &raw.cov {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
        }
        let cov = DMatrix::from_fn(n, n, |i, j| raw.cov[i][j]);
        GaussianDist::new(DVector::from_vec(raw.mean), cov)
    }
}

impl From<GaussianDist> for GaussianJson {
    fn from(d: GaussianDist) -> Self {
        let n = d.dim();
        GaussianJson {
            mean: d.mean.iter().copied().collect(),
            cov: (0..n).map(|i| (0..n).map(|j| d.cov[(i, j)]).collect()).collect(),
        }
    }
}

impl GaussianDist {
    /// Builds and validates a Gaussian.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dist = Self::from_parts_unchecked(mean, cov);
        validate(&dist)?;
        Ok(dist)
    }

    /// Builds a Gaussian without validation; pair with [`validate`].
    pub fn from_parts_unchecked(mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        Self { mean, cov }
    }

    /// Zero-mean Gaussian from a row-major covariance.
    pub fn zero_mean(n: usize, cov_row_major: &[f64]) -> Result<Self> {
        if cov_row_major.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: cov_row_major.len() });
        }
        Self::new(DVector::zeros(n), DMatrix::from_row_slice(n, n, cov_row_major))
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn cholesky(&self) -> Result<Cholesky<f64, Dyn>> {
        Cholesky::new(self.cov.clone()).ok_or(Error::NotPositiveDefinite {
            order: self.dim(),
            value: self.cov.determinant(),
        })
    }

    /// `ln |Σ|` from the Cholesky factor.
    pub fn log_det(&self) -> Result<f64> {
        let chol = self.cholesky()?;
        Ok(2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>())
    }

    pub fn precision(&self) -> Result<DMatrix<f64>> {
        Ok(self.cholesky()?.inverse())
    }

    /// Marginal on the listed coordinates, in the listed order.
    pub fn marginal(&self, keep: &[usize]) -> Result<Self> {
        check_indices(keep, self.dim())?;
        let mean = DVector::from_iterator(keep.len(), keep.iter().map(|&i| self.mean[i]));
        let cov = DMatrix::from_fn(keep.len(), keep.len(), |a, b| self.cov[(keep[a], keep[b])]);
        Ok(Self { mean, cov })
    }

    /// Evaluation-ready density (precision and Cholesky factor cached).
    pub fn density(&self) -> Result<GaussianDensity> {
        GaussianDensity::new(self)
    }
}

/// Checks symmetry, positive leading principal minors and the eigenvalue floor.
pub fn validate(dist: &GaussianDist) -> Result<()> {
    let n = dist.mean.len();
    if n == 0 || n > MAX_DIM {
        return Err(Error::UnsupportedDimension(n));
    }
    if dist.cov.nrows() != n || dist.cov.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: dist.cov.nrows() });
    }
    if let Some((row, col, diff)) = asymmetry(&dist.cov) {
        return Err(Error::NotSymmetric { row, col, diff });
    }
    for order in 1..=n {
        let minor = dist.cov.view((0, 0), (order, order)).determinant();
        if !(minor > 0.0) {
            return Err(Error::NotPositiveDefinite { order, value: minor });
        }
    }
    let eig = SymmetricEigen::new(dist.cov.clone()).eigenvalues;
    let lo = eig.min();
    let hi = eig.max();
    if lo < EIGEN_FLOOR * hi {
        return Err(Error::NearSingular { ratio: lo / hi });
    }
    Ok(())
}

fn asymmetry(m: &DMatrix<f64>) -> Option<(usize, usize, f64)> {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let diff = (m[(i, j)] - m[(j, i)]).abs();
            if !(diff <= SYMMETRY_TOL) {
                return Some((i, j, diff));
            }
        }
    }
    None
}

fn check_indices(idx: &[usize], n: usize) -> Result<()> {
    for (k, &i) in idx.iter().enumerate() {
        if i >= n {
            return Err(Error::InvalidCondition(format!("index {i} out of range for dimension {n}")));
        }
        if idx[..k].contains(&i) {
            return Err(Error::InvalidCondition(format!("index {i} repeated")));
        }
    }
    Ok(())
}

/// Which coordinates to keep and which to fix, with the fixed values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSpec {
    pub kept: Vec<usize>,
    pub given: Vec<usize>,
    pub value: Vec<f64>,
}

impl ConditionSpec {
    pub fn new(kept: Vec<usize>, given: Vec<usize>, value: Vec<f64>) -> Self {
        Self { kept, given, value }
    }

    fn check(&self, n: usize) -> Result<()> {
        check_indices(&self.kept, n)?;
        check_indices(&self.given, n)?;
        if let Some(i) = self.kept.iter().find(|i| self.given.contains(i)) {
            return Err(Error::InvalidCondition(format!("index {i} is both kept and given")));
        }
        if self.kept.is_empty() {
            return Err(Error::InvalidCondition("no coordinates kept".into()));
        }
        if self.value.len() != self.given.len() {
            return Err(Error::DimensionMismatch { expected: self.given.len(), found: self.value.len() });
        }
        Ok(())
    }
}

/// Conditional law of `X_A | X_B = value` via the Schur complement.
pub fn condition(dist: &GaussianDist, spec: &ConditionSpec) -> Result<GaussianDist> {
    spec.check(dist.dim())?;
    let marginal = dist.marginal(&spec.kept)?;
    if spec.given.is_empty() {
        return Ok(marginal);
    }
    let a = &spec.kept;
    let b = &spec.given;
    let s_bb = DMatrix::from_fn(b.len(), b.len(), |i, j| dist.cov[(b[i], b[j])]);
    let s_ba = DMatrix::from_fn(b.len(), a.len(), |i, j| dist.cov[(b[i], a[j])]);
    let chol = Cholesky::new(s_bb).ok_or(Error::SingularGivenBlock)?;
    // K = Σ_BB⁻¹ Σ_BA
    let k = chol.solve(&s_ba);
    let resid = DVector::from_iterator(b.len(), b.iter().zip(&spec.value).map(|(&i, v)| v - dist.mean[i]));
    let mean = &marginal.mean + k.transpose() * resid;
    let schur = &marginal.cov - s_ba.transpose() * &k;
    let cov = (&schur + schur.transpose()) * 0.5;
    GaussianDist::new(mean, cov)
}

/// Example 1 covariance `[[1, ρ, ρ²], [ρ, 1, 0], [ρ², 0, 1]]`, zero mean.
pub fn example1_cov(rho: f64) -> Result<GaussianDist> {
    let r2 = rho * rho;
    GaussianDist::zero_mean(3, &[1.0, rho, r2, rho, 1.0, 0.0, r2, 0.0, 1.0])
}

/// Example 2 covariance: unit variances, `Σ12 = 1 − 2ρ`, `Σ13 = Σ23 = 1 − ρ`,
/// defined for `0 < ρ < 1/2`.
pub fn example2_cov(rho: f64) -> Result<GaussianDist> {
    if !(rho > 0.0 && rho < 0.5) {
        return Err(Error::Domain(format!("rho outside (0, 0.5): {rho}")));
    }
    let a = 1.0 - 2.0 * rho;
    let b = 1.0 - rho;
    GaussianDist::zero_mean(3, &[1.0, a, b, a, 1.0, b, b, b, 1.0])
}

/// `CᵀΣC` for Example 2 next to two sum-of-squares decompositions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticFormSides {
    pub lhs: f64,
    /// `(1−ρ)(C1+C2+C3)² + ρ(C1+C2)² + ρC3²`, as published.
    pub printed: f64,
    /// `(1−ρ)(C1+C2+C3)² + ρ(C1−C2)² + ρC3²`, which matches `CᵀΣC` for all `C`.
    pub corrected: f64,
}

pub fn example2_quadratic_form(rho: f64, c: [f64; 3]) -> Result<QuadraticFormSides> {
    let dist = example2_cov(rho)?;
    let v = DVector::from_column_slice(&c);
    let lhs = v.dot(&(dist.cov() * &v));
    let s = c[0] + c[1] + c[2];
    let printed = (1.0 - rho) * s * s + rho * (c[0] + c[1]).powi(2) + rho * c[2] * c[2];
    let corrected = (1.0 - rho) * s * s + rho * (c[0] - c[1]).powi(2) + rho * c[2] * c[2];
    Ok(QuadraticFormSides { lhs, printed, corrected })
}

/// Seeded random SPD matrix `AAᵀ/n + I/2` with standard normal `A`.
pub fn random_spd(n: usize, seed: u64) -> DMatrix<f64> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let a: DMatrix<f64> = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
    let m = &a * a.transpose() / n as f64 + DMatrix::identity(n, n) * 0.5;
    // exact symmetry
    DMatrix::from_fn(n, n, |i, j| if i <= j { m[(i, j)] } else { m[(j, i)] })
}

/// Differential entropy of a Gaussian in nats.
pub fn gaussian_de(dist: &GaussianDist, mode: EntropyMode) -> Result<f64> {
    let n = dist.dim() as f64;
    let paper = 0.5 * (n * (2.0 * PI).ln() + dist.log_det()?);
    Ok(match mode {
        EntropyMode::Paper => paper,
        EntropyMode::Corrected => paper + 0.5 * n,
    })
}

/// `KL(f ‖ g)` between two Gaussians of equal dimension.
pub fn gaussian_kl(f: &GaussianDist, g: &GaussianDist) -> Result<f64> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: g.dim() });
    }
    if f == g {
        return Ok(0.0);
    }
    let n = f.dim() as f64;
    let chol_g = g.cholesky()?;
    let trace = chol_g.solve(&f.cov).trace();
    let diff = &g.mean - &f.mean;
    let maha = diff.dot(&chol_g.solve(&diff));
    let log_ratio = g.log_det()? - f.log_det()?;
    Ok(0.5 * (trace + maha - n + log_ratio))
}

/// Cached Gaussian density for repeated evaluation (quadrature, sampling).
#[derive(Debug, Clone)]
pub struct GaussianDensity {
    n: usize,
    mean: Vec<f64>,
    /// Row-major precision matrix.
    precision: Vec<f64>,
    /// Row-major lower Cholesky factor.
    chol: Vec<f64>,
    log_norm: f64,
}

impl GaussianDensity {
    pub fn new(dist: &GaussianDist) -> Result<Self> {
        let n = dist.dim();
        let chol = dist.cholesky()?;
        let l = chol.l();
        let prec = chol.inverse();
        let log_det = 2.0 * l.diagonal().iter().map(|d| d.ln()).sum::<f64>();
        Ok(Self {
            n,
            mean: dist.mean.iter().copied().collect(),
            precision: (0..n * n).map(|k| prec[(k / n, k % n)]).collect(),
            chol: (0..n * n).map(|k| l[(k / n, k % n)]).collect(),
            log_norm: 0.5 * (n as f64 * (2.0 * PI).ln() + log_det),
        })
    }

    /// `(x − μ)ᵀ Σ⁻¹ (x − μ)`.
    pub fn mahalanobis_sq(&self, x: &[f64]) -> f64 {
        let n = self.n;
        let mut d = [0.0; MAX_DIM];
        for i in 0..n {
            d[i] = x[i] - self.mean[i];
        }
        let mut q = 0.0;
        for i in 0..n {
            let row = &self.precision[i * n..(i + 1) * n];
            let mut s = 0.0;
            for j in 0..n {
                s += row[j] * d[j];
            }
            q += d[i] * s;
        }
        q
    }
}

impl Density for GaussianDensity {
    fn dim(&self) -> usize {
        self.n
    }

    fn ln_pdf(&self, x: &[f64]) -> f64 {
        -self.log_norm - 0.5 * self.mahalanobis_sq(x)
    }
}

impl Sampler for GaussianDensity {
    fn dim(&self) -> usize {
        self.n
    }

    fn sample(&self, rng: &mut dyn RngCore, out: &mut [f64]) {
        let n = self.n;
        let mut z = [0.0; MAX_DIM];
        for zi in z.iter_mut().take(n) {
            *zi = StandardNormal.sample(rng);
        }
        for i in 0..n {
            let row = &self.chol[i * n..(i + 1) * n];
            out[i] = self.mean[i] + (0..=i).map(|j| row[j] * z[j]).sum::<f64>();
        }
    }
}
