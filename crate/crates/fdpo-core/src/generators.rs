//! Catalog of f-divergence generating functions.
//!
//! An f-divergence is built from a scalar generator f: R+ -> R with f(1) = 0:
//!
//! D_f(p || q) = sum_i q_i f(p_i / q_i)
//!
//! | id           | f(t)                              | f'(t)              |
//! |--------------|-----------------------------------|--------------------|
//! | kl           | t log t                           | log t + 1          |
//! | reverse_kl   | -log t                            | -1/t               |
//! | jeffrey      | t log t - log t                   | log t + 1 - 1/t    |
//! | js           | -(t+1) log((t+1)/2) + t log t     | log(2t/(t+1))      |
//! | alpha:a      | (t^(1-a) - (1-a)t - a)/(a(a-1))   | (1 - t^-a)/a       |
//! | chi2         | (t-1)^2                           | 2(t-1)             |
//! | chipo        | (t-1)^2/2 + t log t               | t + log t          |
//! | squaredpo    | (log t)^2 / 2                     | (log t)/t          |
//! | t_log_sq     | t (log t)^2 / 2                   | (log t)^2/2 + log t|
//!
//! All logarithms are natural. Values at t = 0 are stored as explicit
//! extended reals: `f_at_zero` is `f64::INFINITY` where the limit diverges,
//! and the analytic limit otherwise (e.g. 0 for `t log t`, log 2 for `js`).

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

// Float supplies ln/exp for f64 in no_std builds; tests link std, whose
// inherent methods shadow it.
#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

/// Products `t * log(t)` are defined to be 0 below this threshold, making
/// the identity 0 * log 0 = 0 explicit instead of relying on IEEE corner
/// cases.
const TINY_T: f64 = 1e-300;

/// Default parameter for the alpha-divergence entry of [`Generator::catalog`].
pub const DEFAULT_ALPHA: f64 = 0.5;

/// A named f-divergence generating function.
///
/// The `Alpha` variant carries its parameter; construct it through
/// [`Generator::alpha`] so the excluded values 0 and 1 are rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    /// f(t) = t log t (the KL divergence, i.e. plain DPO).
    Kl,
    /// f(t) = -log t.
    ReverseKl,
    /// f(t) = t log t - log t.
    Jeffrey,
    /// f(t) = -(t+1) log((t+1)/2) + t log t (Jensen-Shannon).
    JensenShannon,
    /// f(t) = (t^(1-a) - (1-a)t - a) / (a(a-1)), a not in {0, 1}.
    Alpha(f64),
    /// f(t) = (t-1)^2.
    ChiSquared,
    /// f(t) = (t-1)^2/2 + t log t.
    ChiPo,
    /// f(t) = (log t)^2 / 2.
    SquaredPo,
    /// f(t) = t (log t)^2 / 2.
    TLogSquared,
}

/// Errors from generator construction and lookup.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorError {
    /// Alpha-divergence parameter was 0, 1, or not finite.
    InvalidAlpha(f64),
    /// No catalog entry with the given id.
    UnknownId(String),
}

impl fmt::Display for GeneratorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorError::InvalidAlpha(a) => {
                write!(f, "alpha-divergence parameter must be finite and not 0 or 1, got {a}")
            }
            GeneratorError::UnknownId(id) => write!(f, "unknown generator id: {id}"),
        }
    }
}

impl core::error::Error for GeneratorError {}

impl Generator {
    /// Checked constructor for the alpha-divergence.
    pub fn alpha(a: f64) -> Result<Self, GeneratorError> {
        if !a.is_finite() || a == 0.0 || a == 1.0 {
            return Err(GeneratorError::InvalidAlpha(a));
        }
        Ok(Generator::Alpha(a))
    }

    /// The nine catalog entries, with the alpha-divergence at its default
    /// parameter.
    pub fn catalog() -> Vec<Generator> {
        Self::catalog_with_alpha(DEFAULT_ALPHA).expect("default alpha is valid")
    }

    /// The nine catalog entries with a caller-supplied alpha parameter.
    pub fn catalog_with_alpha(a: f64) -> Result<Vec<Generator>, GeneratorError> {
        Ok(vec![
            Generator::Kl,
            Generator::ReverseKl,
            Generator::Jeffrey,
            Generator::JensenShannon,
            Generator::alpha(a)?,
            Generator::ChiSquared,
            Generator::ChiPo,
            Generator::SquaredPo,
            Generator::TLogSquared,
        ])
    }

    /// Parse a catalog id: `kl`, `reverse_kl`, `jeffrey`, `js`,
    /// `alpha:<value>` (bare `alpha` uses the default parameter), `chi2`,
    /// `chipo`, `squaredpo`, `t_log_sq`.
    pub fn parse(id: &str) -> Result<Self, GeneratorError> {
        match id {
            "kl" => Ok(Generator::Kl),
            "reverse_kl" => Ok(Generator::ReverseKl),
            "jeffrey" => Ok(Generator::Jeffrey),
            "js" => Ok(Generator::JensenShannon),
            "alpha" => Generator::alpha(DEFAULT_ALPHA),
            "chi2" => Ok(Generator::ChiSquared),
            "chipo" => Ok(Generator::ChiPo),
            "squaredpo" => Ok(Generator::SquaredPo),
            "t_log_sq" => Ok(Generator::TLogSquared),
            other => {
                if let Some(v) = other.strip_prefix("alpha:") {
                    let a: f64 = v
                        .parse()
                        .map_err(|_| GeneratorError::UnknownId(String::from(other)))?;
                    Generator::alpha(a)
                } else {
                    Err(GeneratorError::UnknownId(String::from(other)))
                }
            }
        }
    }

    /// Catalog id string; the alpha entry renders as `alpha:<value>`.
    pub fn id(&self) -> String {
        match self {
            Generator::Kl => String::from("kl"),
            Generator::ReverseKl => String::from("reverse_kl"),
            Generator::Jeffrey => String::from("jeffrey"),
            Generator::JensenShannon => String::from("js"),
            Generator::Alpha(a) => format!("alpha:{a}"),
            Generator::ChiSquared => String::from("chi2"),
            Generator::ChiPo => String::from("chipo"),
            Generator::SquaredPo => String::from("squaredpo"),
            Generator::TLogSquared => String::from("t_log_sq"),
        }
    }

    /// The alpha parameter, for the alpha-divergence entry.
    pub fn alpha_value(&self) -> Option<f64> {
        match self {
            Generator::Alpha(a) => Some(*a),
            _ => None,
        }
    }

    /// Whether f is convex on R+ (analytic metadata).
    pub fn is_convex(&self) -> bool {
        !matches!(self, Generator::SquaredPo | Generator::TLogSquared)
    }

    /// The extended-real value f(0): the limit of f as t -> 0+, or
    /// `f64::INFINITY` where it diverges.
    pub fn f_at_zero(&self) -> f64 {
        match self {
            Generator::Kl => 0.0,
            Generator::ReverseKl => f64::INFINITY,
            Generator::Jeffrey => f64::INFINITY,
            Generator::JensenShannon => core::f64::consts::LN_2,
            Generator::Alpha(a) => {
                if *a > 1.0 {
                    f64::INFINITY
                } else {
                    1.0 / (1.0 - a)
                }
            }
            Generator::ChiSquared => 1.0,
            Generator::ChiPo => 0.5,
            Generator::SquaredPo => f64::INFINITY,
            Generator::TLogSquared => 0.0,
        }
    }

    /// Evaluate f(t) for t >= 0. Returns `f_at_zero` at t = 0 (which may be
    /// `f64::INFINITY`).
    pub fn f(&self, t: f64) -> f64 {
        assert!(t >= 0.0, "generator argument must be non-negative, got {t}");
        if t < TINY_T {
            return self.f_at_zero();
        }
        let lt = t.ln();
        match self {
            Generator::Kl => t * lt,
            Generator::ReverseKl => -lt,
            Generator::Jeffrey => (t - 1.0) * lt,
            Generator::JensenShannon => -(t + 1.0) * ((t + 1.0) / 2.0).ln() + t * lt,
            Generator::Alpha(a) => {
                (t.powf(1.0 - a) - (1.0 - a) * t - a) / (a * (a - 1.0))
            }
            Generator::ChiSquared => (t - 1.0) * (t - 1.0),
            Generator::ChiPo => 0.5 * (t - 1.0) * (t - 1.0) + t * lt,
            Generator::SquaredPo => 0.5 * lt * lt,
            Generator::TLogSquared => 0.5 * t * lt * lt,
        }
    }

    /// Evaluate f'(t) for t > 0.
    pub fn f_prime(&self, t: f64) -> f64 {
        assert!(t > 0.0, "f' is defined on t > 0, got {t}");
        let lt = t.ln();
        match self {
            Generator::Kl => lt + 1.0,
            Generator::ReverseKl => -1.0 / t,
            Generator::Jeffrey => lt + 1.0 - 1.0 / t,
            Generator::JensenShannon => (2.0 * t / (t + 1.0)).ln(),
            Generator::Alpha(a) => (1.0 - t.powf(-a)) / a,
            Generator::ChiSquared => 2.0 * (t - 1.0),
            Generator::ChiPo => t + lt,
            Generator::SquaredPo => lt / t,
            Generator::TLogSquared => 0.5 * lt * lt + lt,
        }
    }

    /// Whether f' is invertible (strictly monotone) on R++.
    pub fn has_invertible_f_prime(&self) -> bool {
        !matches!(self, Generator::SquaredPo | Generator::TLogSquared)
    }

    /// The inverse of f', extended to all of R for monotone entries: values
    /// below the range of f' map to 0 and values above it to
    /// `f64::INFINITY`. Returns `None` for the non-monotone entries
    /// (`squaredpo`, `t_log_sq`).
    pub fn f_prime_inverse(&self, u: f64) -> Option<f64> {
        match self {
            Generator::Kl => Some((u - 1.0).exp()),
            Generator::ReverseKl => {
                if u < 0.0 {
                    Some(-1.0 / u)
                } else {
                    Some(f64::INFINITY)
                }
            }
            Generator::Jeffrey => Some(invert_increasing(|t| self.f_prime(t), u)),
            Generator::JensenShannon => {
                if u < core::f64::consts::LN_2 {
                    let e = u.exp();
                    Some(e / (2.0 - e))
                } else {
                    Some(f64::INFINITY)
                }
            }
            Generator::Alpha(a) => {
                let w = 1.0 - a * u;
                if w > 0.0 {
                    Some(w.powf(-1.0 / a))
                } else if *a > 0.0 {
                    // u >= 1/a is above the range of f'.
                    Some(f64::INFINITY)
                } else {
                    // u <= 1/a is below the range of f'.
                    Some(0.0)
                }
            }
            Generator::ChiSquared => {
                if u > -2.0 {
                    Some(u / 2.0 + 1.0)
                } else {
                    Some(0.0)
                }
            }
            Generator::ChiPo => Some(invert_increasing(|t| self.f_prime(t), u)),
            Generator::SquaredPo | Generator::TLogSquared => None,
        }
    }

    /// f'(e^delta), computed in a form that stays stable for large |delta|.
    pub fn f_prime_exp(&self, delta: f64) -> f64 {
        match self {
            Generator::Kl => delta + 1.0,
            Generator::ReverseKl => -(-delta).exp(),
            Generator::Jeffrey => delta + 1.0 - (-delta).exp(),
            Generator::JensenShannon => core::f64::consts::LN_2 - softplus(-delta),
            Generator::Alpha(a) => (-(-a * delta).exp_m1()) / a,
            Generator::ChiSquared => 2.0 * delta.exp_m1(),
            Generator::ChiPo => delta.exp() + delta,
            Generator::SquaredPo => delta * (-delta).exp(),
            Generator::TLogSquared => 0.5 * delta * delta + delta,
        }
    }

    /// Derivative of delta -> f'(e^delta), i.e. f''(e^delta) * e^delta.
    pub fn f_prime_exp_deriv(&self, delta: f64) -> f64 {
        match self {
            Generator::Kl => 1.0,
            Generator::ReverseKl => (-delta).exp(),
            Generator::Jeffrey => 1.0 + (-delta).exp(),
            Generator::JensenShannon => sigmoid(-delta),
            Generator::Alpha(a) => (-a * delta).exp(),
            Generator::ChiSquared => 2.0 * delta.exp(),
            Generator::ChiPo => delta.exp() + 1.0,
            Generator::SquaredPo => (1.0 - delta) * (-delta).exp(),
            Generator::TLogSquared => delta + 1.0,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// Numerically stable log(1 + e^x).
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Numerically stable 1 / (1 + e^-x).
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Invert a strictly increasing function by bisection in log space.
///
/// The bracket starts at [1e-18, 1e18] and doubles (in log space) up to 60
/// times on each side before bisecting, so the result is accurate to about
/// one ulp for any target inside the function's range.
fn invert_increasing(fp: impl Fn(f64) -> f64, u: f64) -> f64 {
    let mut lo = -18.0 * core::f64::consts::LN_10;
    let mut hi = 18.0 * core::f64::consts::LN_10;
    let mut expand = 0;
    while fp(lo.exp()) > u && expand < 60 {
        lo *= 2.0;
        expand += 1;
    }
    expand = 0;
    while fp(hi.exp()) < u && expand < 60 {
        hi *= 2.0;
        expand += 1;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if fp(mid.exp()) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

/// A probability vector: non-negative entries summing to 1 within 1e-12,
/// length at least 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution(Vec<f64>);

/// Errors from distribution construction and divergence evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionError {
    /// Fewer than two entries.
    TooShort(usize),
    /// An entry was negative or not finite.
    BadEntry(f64),
    /// Entries do not sum to 1 within 1e-12.
    NotNormalized(f64),
    /// The two distributions have different lengths.
    LengthMismatch(usize, usize),
    /// The reference distribution has a zero entry.
    ZeroReference(usize),
}

impl fmt::Display for DistributionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionError::TooShort(n) => write!(f, "distribution needs >= 2 entries, got {n}"),
            DistributionError::BadEntry(v) => write!(f, "distribution entry must be finite and >= 0, got {v}"),
            DistributionError::NotNormalized(s) => write!(f, "distribution entries sum to {s}, not 1"),
            DistributionError::LengthMismatch(a, b) => write!(f, "distribution lengths differ: {a} vs {b}"),
            DistributionError::ZeroReference(i) => write!(f, "reference distribution has zero entry at index {i}"),
        }
    }
}

impl core::error::Error for DistributionError {}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self, DistributionError> {
        if probs.len() < 2 {
            return Err(DistributionError::TooShort(probs.len()));
        }
        for &p in &probs {
            if !p.is_finite() || p < 0.0 {
                return Err(DistributionError::BadEntry(p));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(DistributionError::NotNormalized(sum));
        }
        Ok(Distribution(probs))
    }

    /// Build from unnormalized non-negative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self, DistributionError> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) {
            return Err(DistributionError::NotNormalized(sum));
        }
        let probs: Vec<f64> = weights.iter().map(|w| w / sum).collect();
        Self::new(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Whether every entry is strictly positive.
    pub fn is_interior(&self) -> bool {
        self.0.iter().all(|&p| p > 0.0)
    }
}

/// D_f(p || q) = sum_i q_i f(p_i / q_i).
///
/// Requires strictly positive q. Evaluation short-circuits to
/// `f64::INFINITY` as soon as a term with p_i = 0 and infinite f(0)
/// appears; terms with p_i = 0 and finite f(0) contribute q_i * f(0).
pub fn f_divergence(p: &Distribution, q: &Distribution, gen: Generator) -> Result<f64, DistributionError> {
    f_divergence_slice(p.probs(), q.probs(), gen)
}

/// [`f_divergence`] over raw slices, for callers that maintain their own
/// feasibility invariants.
pub fn f_divergence_slice(p: &[f64], q: &[f64], gen: Generator) -> Result<f64, DistributionError> {
    if p.len() != q.len() {
        return Err(DistributionError::LengthMismatch(p.len(), q.len()));
    }
    let mut total = 0.0;
    for (i, (&pi, &qi)) in p.iter().zip(q.iter()).enumerate() {
        if qi <= 0.0 {
            return Err(DistributionError::ZeroReference(i));
        }
        let term = if pi == 0.0 { gen.f_at_zero() } else { gen.f(pi / qi) };
        if term == f64::INFINITY {
            return Ok(f64::INFINITY);
        }
        total += qi * term;
    }
    Ok(total)
}
