//! Shared grids and evaluation points for the end-to-end acceptance suite.

use std::path::PathBuf;

use wentropy_core::scan::Example;

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

pub fn x3_axis() -> Vec<f64> {
    linspace(-3.0, 3.0, 31)
}

pub fn example1_rhos() -> Vec<f64> {
    linspace(-0.7, 0.7, 29)
}

/// Interior of `(0, ½)`.
pub fn example2_rhos() -> Vec<f64> {
    linspace(0.01, 0.49, 29)
}

/// `(ρ, x3)` pairs, `ρ` outermost.
pub fn grid(rhos: &[f64]) -> Vec<(f64, f64)> {
    let xs = x3_axis();
    rhos.iter().flat_map(|&r| xs.iter().map(move |&x| (r, x))).collect()
}

pub const TRIVARIATE_BASKET: [(Example, f64); 6] = [
    (Example::One, 0.0),
    (Example::One, 0.3),
    (Example::One, 0.5),
    (Example::Two, 0.1),
    (Example::Two, 0.25),
    (Example::Two, 0.4),
];

pub const PAIR_BASKET: [(Example, f64, f64); 8] = [
    (Example::One, 0.3, 1.5),
    (Example::One, 0.5, 1.0),
    (Example::One, -0.4, -0.7),
    (Example::One, 0.5, 0.2),
    (Example::Two, 0.25, 1.0),
    (Example::Two, 0.1, -0.5),
    (Example::Two, 0.4, 2.0),
    (Example::Two, 0.25, 2.0),
];

/// Bundled toy dataset, posterior draws and golden DIC.
pub fn toy_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../cli/data")
}
