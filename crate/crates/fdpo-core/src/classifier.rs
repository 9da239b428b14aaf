//! Numeric classification of generating functions: DPO-inducing and
//! displacement-resistant tests, plus the taxonomy table over the catalog.
//!
//! A generator is DPO-inducing when f'(t) tends to -infinity as t -> 0+
//! (or, for finite f(0), when (f(t) - f(0))/t is unbounded below near 0).
//! It is displacement-resistant when the global minimizer of f on R+ sits
//! at or above 1. Both are decided by sampling rather than symbolically,
//! with an explicit `Inconclusive` escape hatch.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::generators::Generator;

#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

/// Sampled sequences are treated as diverging below once they pass this.
const DIVERGENCE_THRESHOLD: f64 = -1e6;
/// Successive differences below this count as a plateau.
const PLATEAU_TOL: f64 = 1e-6;
/// Default smallest sample point for the limit test.
pub const DEFAULT_T_MIN: f64 = 1e-12;
/// Default argmin search window.
pub const ARGMIN_LO: f64 = 1e-8;
pub const ARGMIN_HI: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Inducing,
    NotInducing,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestMethod {
    LimitTest,
    RatioTest,
}

/// Outcome of [`is_dpo_inducing`] with the sampled evidence attached.
#[derive(Debug, Clone)]
pub struct InducingVerdict {
    pub verdict: Verdict,
    /// Sampled (t, value) pairs from the test that produced the verdict.
    pub evidence: Vec<(f64, f64)>,
    pub method: TestMethod,
}

/// Result of the scalar argmin search for f.
#[derive(Debug, Clone, Copy)]
pub struct ArgminResult {
    pub location: f64,
    pub value: f64,
    /// location >= 1 - 1e-9.
    pub resistant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierError {
    /// f was non-finite on the whole search grid.
    NonFiniteEverywhere,
}

impl fmt::Display for ClassifierError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifierError::NonFiniteEverywhere => write!(f, "f is non-finite on the whole grid"),
        }
    }
}

impl core::error::Error for ClassifierError {}

/// How a sampled sequence behaves as t -> 0+.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Trend {
    /// Settles on a finite value (plateau).
    Converges,
    /// Decreasing with non-vanishing steps, or already past the
    /// divergence threshold.
    DivergesDown,
    /// Non-decreasing tail with all samples above the divergence
    /// threshold: bounded below on the evidence.
    BoundedBelow,
    /// Contains NaN or matches none of the above.
    Unclear,
}

fn classify_trend(values: &[f64]) -> Trend {
    if values.iter().any(|v| v.is_nan()) || values.len() < 5 {
        return Trend::Unclear;
    }
    let tail = &values[values.len() - 4..];
    let diffs: Vec<f64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
    let last = *values.last().expect("non-empty");
    if last.is_finite() && diffs.iter().all(|d| d.abs() < PLATEAU_TOL) {
        return Trend::Converges;
    }
    let tail_decreasing = diffs.iter().all(|d| *d < 0.0);
    if tail_decreasing && (last < DIVERGENCE_THRESHOLD || diffs.iter().all(|d| d.abs() >= PLATEAU_TOL)) {
        return Trend::DivergesDown;
    }
    let tail_non_decreasing = diffs.iter().all(|d| *d >= 0.0);
    if tail_non_decreasing && values.iter().all(|v| *v > DIVERGENCE_THRESHOLD) {
        return Trend::BoundedBelow;
    }
    Trend::Unclear
}

/// Decide whether `gen` is DPO-inducing by sampling f' (and, if needed,
/// the difference quotient of f) at t = 10^-k down to `DEFAULT_T_MIN`.
pub fn is_dpo_inducing(gen: Generator) -> InducingVerdict {
    is_dpo_inducing_from(gen, DEFAULT_T_MIN)
}

/// [`is_dpo_inducing`] with a caller-supplied smallest sample point.
pub fn is_dpo_inducing_from(gen: Generator, t_min: f64) -> InducingVerdict {
    assert!(t_min > 0.0 && t_min < 0.1, "t_min must be in (0, 0.1)");
    let k_max = (-t_min.log10()).round().max(2.0) as i32;
    let ts: Vec<f64> = (1..=k_max).map(|k| 10f64.powi(-k)).collect();

    // Limit test on f' itself.
    let fp: Vec<(f64, f64)> = ts.iter().map(|&t| (t, gen.f_prime(t))).collect();
    let fp_values: Vec<f64> = fp.iter().map(|&(_, v)| v).collect();
    match classify_trend(&fp_values) {
        Trend::DivergesDown => {
            return InducingVerdict { verdict: Verdict::Inducing, evidence: fp, method: TestMethod::LimitTest };
        }
        Trend::Converges => {
            return InducingVerdict { verdict: Verdict::NotInducing, evidence: fp, method: TestMethod::LimitTest };
        }
        Trend::BoundedBelow | Trend::Unclear => {}
    }

    // Ratio test on (f(t) - f(0)) / t. An infinite f(0) already settles it.
    let f0 = gen.f_at_zero();
    if f0 == f64::INFINITY {
        return InducingVerdict { verdict: Verdict::Inducing, evidence: fp, method: TestMethod::RatioTest };
    }
    let ratio: Vec<(f64, f64)> = ts.iter().map(|&t| (t, (gen.f(t) - f0) / t)).collect();
    let ratio_values: Vec<f64> = ratio.iter().map(|&(_, v)| v).collect();
    let verdict = match classify_trend(&ratio_values) {
        Trend::DivergesDown => Verdict::Inducing,
        Trend::Converges | Trend::BoundedBelow => Verdict::NotInducing,
        Trend::Unclear => Verdict::Inconclusive,
    };
    InducingVerdict { verdict, evidence: ratio, method: TestMethod::RatioTest }
}

/// Golden-section refinement of a minimum bracketed by [a, b].
fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Locate the global minimizer of f on [`ARGMIN_LO`, `ARGMIN_HI`].
pub fn argmin_f(gen: Generator) -> Result<ArgminResult, ClassifierError> {
    argmin_f_on(gen, ARGMIN_LO, ARGMIN_HI)
}

/// [`argmin_f`] on a caller-supplied window: a dense log-spaced scan
/// (1e5 points) followed by golden-section refinement of the bracketing
/// interval to 1e-12 in location.
pub fn argmin_f_on(gen: Generator, lo: f64, hi: f64) -> Result<ArgminResult, ClassifierError> {
    assert!(lo > 0.0 && lo < hi, "need 0 < lo < hi");
    const POINTS: usize = 100_000;
    let llo = lo.ln();
    let lhi = hi.ln();
    let grid = |i: usize| (llo + (lhi - llo) * i as f64 / (POINTS - 1) as f64).exp();
    let mut best: Option<(usize, f64)> = None;
    for i in 0..POINTS {
        let v = gen.f(grid(i));
        if !v.is_finite() {
            continue;
        }
        if best.map_or(true, |(_, bv)| v < bv) {
            best = Some((i, v));
        }
    }
    let (idx, _) = best.ok_or(ClassifierError::NonFiniteEverywhere)?;
    let a = grid(idx.saturating_sub(1));
    let b = grid((idx + 1).min(POINTS - 1));
    let (location, value) = golden_section_min(|t| gen.f(t), a, b, 1e-12);
    Ok(ArgminResult { location, value, resistant: location >= 1.0 - 1e-9 })
}

/// True when the global argmin of f sits at or above 1.
pub fn is_displacement_resistant(gen: Generator) -> Result<bool, ClassifierError> {
    Ok(argmin_f(gen)?.resistant)
}

/// One row of the taxonomy table.
#[derive(Debug, Clone)]
pub struct TaxonomyRow {
    pub id: String,
    pub convex: bool,
    pub inducing: bool,
    pub resistant: bool,
    pub argmin_location: f64,
}

/// Run both classifiers over a single generator.
pub fn classify_one(gen: Generator) -> Result<TaxonomyRow, ClassifierError> {
    let argmin = argmin_f(gen)?;
    Ok(TaxonomyRow {
        id: gen.id(),
        convex: gen.is_convex(),
        inducing: is_dpo_inducing(gen).verdict == Verdict::Inducing,
        resistant: argmin.resistant,
        argmin_location: argmin.location,
    })
}

/// Run both classifiers over the full catalog (alpha-divergence at its
/// default parameter).
pub fn classify_taxonomy() -> Result<Vec<TaxonomyRow>, ClassifierError> {
    Generator::catalog().into_iter().map(classify_one).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kl_is_inducing_via_limit_test() {
        let v = is_dpo_inducing(Generator::Kl);
        assert_eq!(v.verdict, Verdict::Inducing);
        assert_eq!(v.method, TestMethod::LimitTest);
    }

    #[test]
    fn chi2_is_not_inducing() {
        // f'(t) = 2(t-1) stabilizes at -2.
        let v = is_dpo_inducing(Generator::ChiSquared);
        assert_eq!(v.verdict, Verdict::NotInducing);
        assert_eq!(v.method, TestMethod::LimitTest);
    }

    #[test]
    fn squaredpo_is_inducing() {
        // f'(t) = (log t)/t blows past the divergence threshold.
        let v = is_dpo_inducing(Generator::SquaredPo);
        assert_eq!(v.verdict, Verdict::Inducing);
    }

    #[test]
    fn t_log_sq_is_not_inducing() {
        // f'(t) = (log t)^2/2 + log t tends to +infinity, and the
        // difference quotient (f(t) - f(0))/t = (log t)^2/2 does too, so
        // the ratio test reports a function bounded below near 0.
        let v = is_dpo_inducing(Generator::TLogSquared);
        assert_eq!(v.verdict, Verdict::NotInducing);
        assert_eq!(v.method, TestMethod::RatioTest);
    }

    #[test]
    fn negative_alpha_is_not_inducing() {
        let v = is_dpo_inducing(Generator::alpha(-0.5).unwrap());
        assert_eq!(v.verdict, Verdict::NotInducing);
    }

    #[test]
    fn infinite_f_at_zero_implies_inducing() {
        for gen in Generator::catalog() {
            if gen.f_at_zero() == f64::INFINITY {
                assert_eq!(is_dpo_inducing(gen).verdict, Verdict::Inducing, "{gen}");
            }
        }
    }

    #[test]
    fn shrinking_t_min_never_flips_inducing_off() {
        for gen in Generator::catalog() {
            let base = is_dpo_inducing(gen).verdict;
            for t_min in [1e-13, 1e-14, 1e-15, 1e-16] {
                let v = is_dpo_inducing_from(gen, t_min).verdict;
                if base == Verdict::Inducing {
                    assert_eq!(v, Verdict::Inducing, "{gen} flipped at t_min={t_min}");
                }
            }
        }
    }

    #[test]
    fn argmin_constants() {
        // Reference constants frozen from a dense-scan oracle: exp(-1) for
        // kl, the omega constant W(1) for chipo, 1 for squaredpo.
        let kl = argmin_f(Generator::Kl).unwrap();
        assert!((kl.location - 0.36787944117144233).abs() < 1e-6);
        assert!(!kl.resistant);

        let chipo = argmin_f(Generator::ChiPo).unwrap();
        assert!((chipo.location - 0.5671432904097838).abs() < 1e-6);
        assert!(!chipo.resistant);

        let sq = argmin_f(Generator::SquaredPo).unwrap();
        assert!((sq.location - 1.0).abs() < 1e-9);
        assert!(sq.resistant);

        assert!(kl.location < chipo.location && chipo.location < sq.location);
    }

    #[test]
    fn reverse_kl_reports_grid_infimum_and_is_resistant() {
        // -log t is strictly decreasing: the scan bottoms out at the hi
        // endpoint, which is >= 1, so the entry counts as resistant.
        let r = argmin_f(Generator::ReverseKl).unwrap();
        assert!((r.location - ARGMIN_HI).abs() < 1e-6);
        assert!(r.resistant);
    }

    #[test]
    fn jeffrey_and_js_minimize_at_one() {
        // (t-1) log t and the Jensen-Shannon generator are both
        // non-negative with a unique zero at t = 1; the dense-scan oracle
        // confirms the minimizer, so both entries are resistant.
        for gen in [Generator::Jeffrey, Generator::JensenShannon] {
            let r = argmin_f(gen).unwrap();
            assert!((r.location - 1.0).abs() < 1e-7, "{gen}: {}", r.location);
            assert!(r.resistant);
        }
    }

    #[test]
    fn argmin_stable_under_window_change() {
        for gen in [Generator::Kl, Generator::ChiPo, Generator::SquaredPo] {
            let a = argmin_f_on(gen, 1e-8, 50.0).unwrap();
            let b = argmin_f_on(gen, 1e-7, 40.0).unwrap();
            assert!((a.location - b.location).abs() < 1e-6, "{gen}");
        }
    }

    #[test]
    fn taxonomy_matches_expected_regions() {
        // (id, convex, inducing, resistant)
        let expected = [
            ("kl", true, true, false),
            ("reverse_kl", true, true, true),
            ("jeffrey", true, true, true),
            ("js", true, true, true),
            ("alpha:0.5", true, true, true),
            ("chi2", true, false, true),
            ("chipo", true, true, false),
            ("squaredpo", false, true, true),
            ("t_log_sq", false, false, true),
        ];
        let rows = classify_taxonomy().unwrap();
        assert_eq!(rows.len(), expected.len());
        for (row, (id, convex, inducing, resistant)) in rows.iter().zip(expected) {
            assert_eq!(row.id, id);
            assert_eq!(row.convex, convex, "{id} convex");
            assert_eq!(row.inducing, inducing, "{id} inducing");
            assert_eq!(row.resistant, resistant, "{id} resistant");
        }
    }
}
