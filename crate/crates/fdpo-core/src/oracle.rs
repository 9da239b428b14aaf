//! Brute-force references used to validate solvers, gradients, and argmin
//! results: exhaustive lattice search over small simplexes, central finite
//! differences, and dense scalar scans.

use alloc::vec::Vec;
use core::fmt;

use crate::generators::Generator;

#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

/// Lattice description for [`grid_maximize`].
///
/// The lattice is `{k * resolution : k integer}` intersected with the
/// simplex. Dimensions above 4 and resolutions below 1e-4 are rejected to
/// keep enumeration tractable.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub resolution: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    /// Grid enumeration supports n <= 4 only.
    DimensionTooLarge(usize),
    /// Resolution must be in [1e-4, 1].
    BadResolution(f64),
    /// The evaluator returned no finite value anywhere.
    NonFinite,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::DimensionTooLarge(n) => write!(f, "grid oracle supports n <= 4, got {n}"),
            OracleError::BadResolution(r) => write!(f, "grid resolution must be in [1e-4, 1], got {r}"),
            OracleError::NonFinite => write!(f, "evaluator produced no finite value"),
        }
    }
}

impl core::error::Error for OracleError {}

impl GridSpec {
    pub fn new(resolution: f64, n: usize) -> Result<Self, OracleError> {
        if n < 2 || n > 4 {
            return Err(OracleError::DimensionTooLarge(n));
        }
        if !(1e-4..=1.0).contains(&resolution) {
            return Err(OracleError::BadResolution(resolution));
        }
        Ok(GridSpec { resolution, n })
    }
}

/// Exhaustively maximize `objective` over the simplex lattice described by
/// `spec`. Returns the best lattice point and its value; non-finite values
/// other than negative infinity are skipped.
pub fn grid_maximize(
    objective: impl Fn(&[f64]) -> f64,
    spec: &GridSpec,
) -> Result<(Vec<f64>, f64), OracleError> {
    let m = (1.0 / spec.resolution).round() as u64;
    let mf = m as f64;
    let mut best_v = f64::NEG_INFINITY;
    let mut best_p: Option<Vec<f64>> = None;
    let mut buf = alloc::vec![0.0f64; spec.n];
    let mut consider = |p: &mut Vec<f64>, v: f64, best_v: &mut f64, best_p: &mut Option<Vec<f64>>| {
        if v.is_nan() {
            return;
        }
        if best_p.is_none() || v > *best_v {
            *best_v = v;
            *best_p = Some(p.clone());
        }
    };
    match spec.n {
        2 => {
            for k0 in 0..=m {
                buf[0] = k0 as f64 / mf;
                buf[1] = (m - k0) as f64 / mf;
                let v = objective(&buf);
                consider(&mut buf, v, &mut best_v, &mut best_p);
            }
        }
        3 => {
            for k0 in 0..=m {
                buf[0] = k0 as f64 / mf;
                for k1 in 0..=(m - k0) {
                    buf[1] = k1 as f64 / mf;
                    buf[2] = (m - k0 - k1) as f64 / mf;
                    let v = objective(&buf);
                    consider(&mut buf, v, &mut best_v, &mut best_p);
                }
            }
        }
        4 => {
            for k0 in 0..=m {
                buf[0] = k0 as f64 / mf;
                for k1 in 0..=(m - k0) {
                    buf[1] = k1 as f64 / mf;
                    for k2 in 0..=(m - k0 - k1) {
                        buf[2] = k2 as f64 / mf;
                        buf[3] = (m - k0 - k1 - k2) as f64 / mf;
                        let v = objective(&buf);
                        consider(&mut buf, v, &mut best_v, &mut best_p);
                    }
                }
            }
        }
        _ => return Err(OracleError::DimensionTooLarge(spec.n)),
    }
    match best_p {
        Some(p) => Ok((p, best_v)),
        None => Err(OracleError::NonFinite),
    }
}

/// Central finite differences of `fn` at `point`, step `h` per coordinate.
pub fn finite_diff_gradient(
    f: impl Fn(&[f64]) -> f64,
    point: &[f64],
    h: f64,
) -> Result<Vec<f64>, OracleError> {
    let mut grad = Vec::with_capacity(point.len());
    let mut x = point.to_vec();
    for i in 0..point.len() {
        x[i] = point[i] + h;
        let up = f(&x);
        x[i] = point[i] - h;
        let down = f(&x);
        x[i] = point[i];
        let g = (up - down) / (2.0 * h);
        if !g.is_finite() {
            return Err(OracleError::NonFinite);
        }
        grad.push(g);
    }
    Ok(grad)
}

/// Detect a derivative kink at `point[i]` by comparing one-sided slopes.
///
/// Used to exclude clip-boundary points from strict gradient tolerances.
pub fn is_near_kink(f: impl Fn(&[f64]) -> f64, point: &[f64], i: usize, h: f64, tol: f64) -> bool {
    let mut x = point.to_vec();
    let mid = f(&x);
    x[i] = point[i] + h;
    let up = f(&x);
    x[i] = point[i] - h;
    let down = f(&x);
    let right = (up - mid) / h;
    let left = (mid - down) / h;
    (right - left).abs() > tol * (1.0 + right.abs().max(left.abs()))
}

/// Dense log-spaced scan for the minimum of a scalar function on [lo, hi].
pub fn grid_argmin_scalar(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<(f64, f64), OracleError> {
    assert!(lo > 0.0 && lo < hi, "need 0 < lo < hi");
    let llo = lo.ln();
    let lhi = hi.ln();
    let mut best: Option<(f64, f64)> = None;
    for i in 0..points {
        let x = (llo + (lhi - llo) * i as f64 / (points - 1) as f64).exp();
        let v = f(x);
        if !v.is_finite() {
            continue;
        }
        if best.map_or(true, |(_, bv)| v < bv) {
            best = Some((x, v));
        }
    }
    best.ok_or(OracleError::NonFinite)
}

/// Upper bound on |f'| over the interval [tlo, thi].
///
/// f' is monotone for the convex catalog entries, so endpoint values
/// suffice; for the non-convex entries the interior critical points of f'
/// (t = e for `squaredpo`, t = 1/e for `t_log_sq`) are included as well.
pub fn f_prime_abs_bound(gen: Generator, tlo: f64, thi: f64) -> f64 {
    let mut bound = gen.f_prime(tlo).abs().max(gen.f_prime(thi).abs());
    for c in [core::f64::consts::E, 1.0 / core::f64::consts::E] {
        if c > tlo && c < thi {
            bound = bound.max(gen.f_prime(c).abs());
        }
    }
    bound
}

/// Lipschitz-based bound on how far the best lattice value can sit below
/// the objective value at `p`, for the reward-minus-divergence objective
/// with reward vector `r`, reference `q`, and coefficient `beta`.
///
/// Some lattice point is within L1 distance `n * h` of `p`; the objective
/// changes by at most that distance times a gradient bound along the way.
pub fn lattice_slack(r: &[f64], q: &[f64], beta: f64, gen: Generator, p: &[f64], h: f64) -> f64 {
    let n = p.len() as f64;
    let r_max = r.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let mut fp_max = 0.0f64;
    for (&pi, &qi) in p.iter().zip(q.iter()) {
        let lo = ((pi - n * h).max(h * 1e-3)) / qi;
        let hi = (pi + n * h) / qi;
        fp_max = fp_max.max(f_prime_abs_bound(gen, lo, hi));
    }
    n * h * (r_max + beta * fp_max)
}
