//! Published closed forms for the two worked examples, transcribed term by
//! term. They are kept verbatim so that their deviations from the exact
//! values in [`super`] can be measured; several carry known slips.
//!
//! Example 1: `μ = 0`, `Σ = [[1, ρ, ρ²], [ρ, 1, 0], [ρ², 0, 1]]`, valid while
//! `1 − ρ² − ρ⁴ > 0`. Example 2: unit variances, `Σ12 = 1 − 2ρ`,
//! `Σ13 = Σ23 = 1 − ρ`, valid for `0 < ρ < ½`. Pair indices are zero-based.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub fn check_example1(rho: f64, x3: f64) -> Result<()> {
    if !rho.is_finite() || !x3.is_finite() {
        return Err(Error::Domain(format!("non-finite point (rho {rho}, x3 {x3})")));
    }
    let det = 1.0 - rho * rho - rho.powi(4);
    if det <= 0.0 {
        return Err(Error::Domain(format!("rho outside 1 - rho^2 - rho^4 > 0: {rho}")));
    }
    Ok(())
}

pub fn check_example2(rho: f64, x3: f64) -> Result<()> {
    if !x3.is_finite() {
        return Err(Error::Domain(format!("non-finite x3 {x3}")));
    }
    if !(rho > 0.0 && rho < 0.5) {
        return Err(Error::Domain(format!("rho outside (0, 0.5): {rho}")));
    }
    Ok(())
}

fn check_pair_index(i: usize, j: usize) -> Result<()> {
    if i > 1 || j > 1 {
        return Err(Error::InvalidCondition(format!("pair index ({i}, {j}) out of range")));
    }
    Ok(())
}

/// `½ log[(1−ρ²)/(1−ρ²−ρ⁴)] + ρ⁴(x3²−1)/(2(1−ρ²)) + 1`.
pub fn example1_relative_de_printed(rho: f64, x3: f64) -> Result<f64> {
    check_example1(rho, x3)?;
    let (r2, r4) = (rho * rho, rho.powi(4));
    Ok(0.5 * ((1.0 - r2) / (1.0 - r2 - r4)).ln() + r4 / (2.0 * (1.0 - r2)) * (x3 * x3 - 1.0) + 1.0)
}

/// `½[1 + ρ + (1−ρ)x3² − log ρ] − 1`.
pub fn example2_relative_de_printed(rho: f64, x3: f64) -> Result<f64> {
    check_example2(rho, x3)?;
    Ok(0.5 * (1.0 + rho + (1.0 - rho) * x3 * x3 - rho.ln()) - 1.0)
}

/// `1 + 2ρ² + ρ⁴(x3² − 1)`.
pub fn example1_theta_printed(rho: f64, x3: f64) -> Result<f64> {
    check_example1(rho, x3)?;
    Ok(1.0 + 2.0 * rho * rho + rho.powi(4) * (x3 * x3 - 1.0))
}

/// `ρ²(2−ρ)² + 4ρ⁴ + 2ρ(2−ρ)(1−ρ)²x3² − 4ρ²(1−ρ)²x3² + (1−ρ)⁴x3⁴`.
pub fn example2_theta_printed(rho: f64, x3: f64) -> Result<f64> {
    check_example2(rho, x3)?;
    let (t, u, x2) = (2.0 - rho, 1.0 - rho, x3 * x3);
    Ok(rho * rho * t * t + 4.0 * rho.powi(4) + 2.0 * rho * t * u * u * x2 - 4.0 * rho * rho * u * u * x2
        + u.powi(4) * x2 * x2)
}

/// `ρ⁴(x3² − 1)`.
pub fn example1_gibbs_printed(rho: f64, x3: f64) -> Result<f64> {
    check_example1(rho, x3)?;
    Ok(rho.powi(4) * (x3 * x3 - 1.0))
}

/// Printed `Θ(x3) − (1 + (1−2ρ)²)`.
pub fn example2_gibbs_printed(rho: f64, x3: f64) -> Result<f64> {
    Ok(example2_theta_printed(rho, x3)? - 1.0 - (1.0 - 2.0 * rho).powi(2))
}

/// Example 1 conditional covariance `Σ̄ = [[1−ρ⁴, ρ], [ρ, 1]]`.
fn ex1_sigma_bar(rho: f64) -> [[f64; 2]; 2] {
    [[1.0 - rho.powi(4), rho], [rho, 1.0]]
}

/// `α_ij(ρ)` of Example 1.
pub fn example1_alpha_printed(rho: f64, i: usize, j: usize) -> Result<f64> {
    check_example1(rho, 0.0)?;
    check_pair_index(i, j)?;
    let s = ex1_sigma_bar(rho);
    let r4 = rho.powi(4);
    Ok((1.0 - r4) * (s[i][j] + 2.0 * s[1][i] * s[1][j])
        + 2.0 * rho * (rho * s[i][j] + s[0][i] * s[1][j] + s[0][j] * s[1][i])
        + s[0][i] * (2.0 * rho * s[1][j] + s[0][j])
        + s[0][j] * (2.0 * rho * s[1][i] + s[0][i]))
}

/// `Λ̄_ij = α_ij + ρ⁴x3²((1−ρ⁴)Σ̄ij + 2Σ̄1iΣ̄1j)` for Example 1.
pub fn example1_lambda_bar_printed(rho: f64, x3: f64, i: usize, j: usize) -> Result<f64> {
    check_example1(rho, x3)?;
    let s = ex1_sigma_bar(rho);
    let r4 = rho.powi(4);
    Ok(example1_alpha_printed(rho, i, j)? + r4 * x3 * x3 * ((1.0 - r4) * s[i][j] + 2.0 * s[0][i] * s[0][j]))
}

/// `Υ_ij` for Example 1 with `β_ij = (μ̄_i − μ_i)(μ̄_j − μ_j)`.
pub fn example1_upsilon_printed(rho: f64, x3: f64, i: usize, j: usize) -> Result<f64> {
    check_example1(rho, x3)?;
    let s = ex1_sigma_bar(rho);
    let r2 = rho * rho;
    let d = [r2 * x3, 0.0];
    let beta = d[i] * d[j];
    let th = 1.0 + 2.0 * r2 + rho.powi(4) * (x3 * x3 - 1.0);
    Ok(example1_alpha_printed(rho, i, j)?
        + beta * th
        + 2.0 * r2 * x3 * d[j] * (s[0][i] + 2.0 * rho * s[1][i])
        + 2.0 * r2 * x3 * d[i] * (s[i][j] + 2.0 * rho * s[1][j])
        + rho.powi(4) * x3 * x3 * (s[i][j] + 2.0 * s[1][i] * s[1][j]))
}

/// Example 1 weighted relative entropy as published.
pub fn example1_relative_we_paper(rho: f64, x3: f64) -> Result<f64> {
    check_example1(rho, x3)?;
    let x2 = x3 * x3;
    let r = |k: i32| rho.powi(k);
    let a = 1.0 - r(4);
    let log_term = 0.5 * ((1.0 - r(2)) / (1.0 - r(2) - r(4))).ln() * (1.0 + 2.0 * r(2) + r(4) * (x2 - 1.0));
    let second = (3.0 * a * a + 3.0 * a + 6.0 * r(2) - 6.0 * r(4) - 6.0 * r(6) * x2 + 9.0 * r(4) * x2
        - 6.0 * r(8) * x2
        + r(8) * x2)
        / (2.0 * (1.0 - r(2)));
    let third = (6.0 * r(2) * a + 6.0 * a * a + 4.0 * r(4) * a * x2 - 12.0 * r(4) - 4.0 * r(6) * a * x2)
        / (2.0 * (1.0 - r(2) - r(4)));
    Ok(log_term + second - third)
}

/// Example 2 expanded polynomial for `Λ̄_ij`.
pub fn example2_lambda_bar_printed(rho: f64, x3: f64, i: usize, j: usize) -> Result<f64> {
    check_example2(rho, x3)?;
    check_pair_index(i, j)?;
    let (t, u, x2) = (2.0 - rho, 1.0 - rho, x3 * x3);
    let r = |k: i32| rho.powi(k);
    Ok(if i == j {
        if i == 0 {
            12.0 * r(5) * t + 3.0 * r(3) * t.powi(3) + 4.0 * x2 * r(2) * t * t * u * u
                + 2.0 * r(4) * x2 * u * u
                + x2 * x2 * rho * t * u.powi(4)
                - 12.0 * r(3) * x2 * t * u * u
        } else {
            3.0 * r(4) * t.powi(3) + 12.0 * r(5) * t + 4.0 * r(2) * x2 * t * t * u * u + 2.0 * r(4) * x2 * u * u
                + x2 * x2 * rho * t * u.powi(4)
                - 12.0 * x2 * r(3) * t * u * u
        }
    } else {
        -9.0 * r(4) * t * t - 6.0 * r(6) - 6.0 * x2 * u * u * r(3) * t - r(2) * x2 * x2 * u.powi(4)
            + 8.0 * r(4) * x2 * u * u
            + 4.0 * r(2) * x2 * u * u * t * t
    })
}

/// Example 2 expanded polynomial for `Υ_ij`.
pub fn example2_upsilon_printed(rho: f64, x3: f64, i: usize, j: usize) -> Result<f64> {
    check_example2(rho, x3)?;
    check_pair_index(i, j)?;
    let (t, u, x2) = (2.0 - rho, 1.0 - rho, x3 * x3);
    let r = |k: i32| rho.powi(k);
    let q = r(2) * t * t + 2.0 * r(4);
    Ok(if i == j {
        if i == 0 {
            12.0 * r(5) * t + 3.0 * r(3) * t.powi(3) + 2.0 * u * u * x2 * q - 24.0 * u * u * x2 * r(3) * t
                + 3.0 * u * u * x2 * r(2) * t * t
                + u.powi(6) * x2.powi(3)
                + 4.0 * u * u * x2 * (r(2) * t * t - 2.0 * r(3) * t)
                - 8.0 * r(2) * u.powi(4) * x2 * x2
                + 7.0 * rho * t * u.powi(4) * x2 * x2
        } else {
            3.0 * r(4) * t.powi(3) + 12.0 * r(5) * t + 6.0 * u * u * x2 * q - 24.0 * u * u * x2 * r(3) * t
                + u.powi(6) * x2.powi(3)
                + 7.0 * rho * t * u.powi(4) * x2 * x2
                - 8.0 * r(2) * u.powi(4) * x2 * x2
                + 3.0 * r(2) * t * t * u * u * x2
        }
    } else {
        -9.0 * r(4) * t * t - 6.0 * r(6) + 9.0 * u * u * x2 * q + u.powi(6) * x2.powi(3)
            - 18.0 * u * u * x2 * r(3) * t
            + 6.0 * rho * t * u.powi(4) * x2 * x2
            - 6.0 * r(2) * u.powi(4) * x2 * x2
    })
}

/// Example 2 weighted relative entropy as published, with the printed `Θ`,
/// expanded `Λ̄`/`Υ` polynomials, the `(2π)²` factor inside the logarithm and
/// the `(2ρ − 1)` coefficient on `Υ12`.
pub fn example2_relative_we_paper(rho: f64, x3: f64) -> Result<f64> {
    check_example2(rho, x3)?;
    let t = 2.0 - rho;
    let det_bar = rho * rho * t * t - rho.powi(4);
    let th = example2_theta_printed(rho, x3)?;
    let up = |i, j| example2_upsilon_printed(rho, x3, i, j);
    let lb = |i, j| example2_lambda_bar_printed(rho, x3, i, j);
    let log_term = 0.5 * ((2.0 * PI).powi(2) * (4.0 * rho * (1.0 - rho) / det_bar)).ln() * th;
    let up_term = ((up(0, 0)? + up(1, 1)?) + (2.0 * rho - 1.0) * up(0, 1)?) / (8.0 * rho * (1.0 - rho));
    let lb_term = (rho * t * (lb(0, 0)? + lb(1, 1)?) + 2.0 * rho * rho * lb(0, 1)?) / (2.0 * det_bar);
    Ok(log_term + up_term - lb_term)
}
