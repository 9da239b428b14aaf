//! Preference-optimization losses with analytic gradients.
//!
//! Every loss here is a negative log-sigmoid of an implied reward gap; the
//! variants differ in how the gap is built from the four log-probabilities
//! of a preference triple:
//!
//! - `dpo`: beta * (delta_w - delta_l) with delta = lp_theta - lp_ref.
//! - `fdpo:<gen>`: beta * (f'(e^delta_w) - f'(e^delta_l)).
//! - `squaredpo`: the f-DPO gap for f(t) = (log t)^2 / 2, rewritten with
//!   per-response adaptive coefficients beta_theta = beta * e^-delta and
//!   clipped from above for numerical safety.
//!
//! Gradients are with respect to the policy log-probabilities `lp_theta_w`
//! and `lp_theta_l`; the reference values are fixed per triple.

use alloc::string::String;
use core::fmt;

use crate::generators::{sigmoid, softplus, Generator, GeneratorError};

#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

/// Clip threshold applied to log(pi_ref / pi_theta) inside the adaptive
/// coefficient. One-sided: only clipping from above is needed, since a
/// coefficient tending to zero is harmless.
pub const DEFAULT_CLIP: f64 = 50.0;

/// Log-probabilities of a preference triple under the current and the
/// frozen reference policy. All values are natural logs and must be finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleLogProbs {
    pub lp_theta_w: f64,
    pub lp_ref_w: f64,
    pub lp_theta_l: f64,
    pub lp_ref_l: f64,
}

impl TripleLogProbs {
    /// Winner log-ratio log(pi_theta(y_w) / pi_ref(y_w)).
    pub fn delta_w(&self) -> f64 {
        self.lp_theta_w - self.lp_ref_w
    }

    /// Loser log-ratio.
    pub fn delta_l(&self) -> f64 {
        self.lp_theta_l - self.lp_ref_l
    }
}

/// A loss value with its partial derivatives with respect to
/// `lp_theta_w` and `lp_theta_l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossValue {
    pub value: f64,
    pub grad_w: f64,
    pub grad_l: f64,
}

/// Bradley-Terry negative log-likelihood of a reward gap:
/// -log sigmoid(gap), computed as softplus(-gap).
pub fn bt_nll(reward_gap: f64) -> f64 {
    softplus(-reward_gap)
}

/// Plain DPO loss.
pub fn dpo_loss(t: &TripleLogProbs, beta: f64) -> LossValue {
    let gap = beta * (t.delta_w() - t.delta_l());
    let s = sigmoid(-gap);
    LossValue { value: softplus(-gap), grad_w: -beta * s, grad_l: beta * s }
}

/// f-DPO loss for an arbitrary generator: the reward gap is
/// beta * (f'(e^delta_w) - f'(e^delta_l)).
pub fn fdpo_loss(t: &TripleLogProbs, gen: Generator, beta: f64) -> LossValue {
    let dw = t.delta_w();
    let dl = t.delta_l();
    let gap = beta * (gen.f_prime_exp(dw) - gen.f_prime_exp(dl));
    let s = sigmoid(-gap);
    LossValue {
        value: softplus(-gap),
        grad_w: -s * beta * gen.f_prime_exp_deriv(dw),
        grad_l: s * beta * gen.f_prime_exp_deriv(dl),
    }
}

/// The adaptive coefficient beta_theta = beta * exp(min(lp_ref - lp_theta, clip)).
pub fn adaptive_coefficient(beta: f64, lp_theta: f64, lp_ref: f64, clip: f64) -> f64 {
    beta * (lp_ref - lp_theta).min(clip).exp()
}

/// SquaredPO loss with the coefficient differentiated through (the exact
/// f-DPO gradient for f(t) = (log t)^2 / 2, apart from clipping).
pub fn squaredpo_loss(t: &TripleLogProbs, beta: f64, clip: f64) -> LossValue {
    squaredpo_loss_impl(t, beta, clip, false)
}

/// SquaredPO variant that treats the adaptive coefficient as a constant
/// when differentiating. Ablation only; off by default.
pub fn squaredpo_loss_detached(t: &TripleLogProbs, beta: f64, clip: f64) -> LossValue {
    squaredpo_loss_impl(t, beta, clip, true)
}

fn squaredpo_loss_impl(t: &TripleLogProbs, beta: f64, clip: f64, detach: bool) -> LossValue {
    let dw = t.delta_w();
    let dl = t.delta_l();
    let bw = adaptive_coefficient(beta, t.lp_theta_w, t.lp_ref_w, clip);
    let bl = adaptive_coefficient(beta, t.lp_theta_l, t.lp_ref_l, clip);
    let gap = bw * dw - bl * dl;
    // In the clipped regime the coefficient is constant, so only the
    // log-ratio factor carries gradient.
    let dgap_dw = if detach || -dw >= clip { bw } else { bw * (1.0 - dw) };
    let dgap_dl = if detach || -dl >= clip { bl } else { bl * (1.0 - dl) };
    let s = sigmoid(-gap);
    LossValue { value: softplus(-gap), grad_w: -s * dgap_dw, grad_l: s * dgap_dl }
}

/// Loss selection by string id: `dpo`, `squaredpo`, `fdpo:<generator-id>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossSpec {
    Dpo,
    SquaredPo { detach_coefficient: bool },
    FDpo(Generator),
}

#[derive(Debug, Clone, PartialEq)]
pub enum LossParseError {
    Unknown(String),
    BadGenerator(GeneratorError),
}

impl fmt::Display for LossParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LossParseError::Unknown(id) => write!(f, "unknown loss id: {id}"),
            LossParseError::BadGenerator(e) => write!(f, "bad fdpo generator: {e}"),
        }
    }
}

impl core::error::Error for LossParseError {}

impl LossSpec {
    pub fn parse(id: &str) -> Result<Self, LossParseError> {
        match id {
            "dpo" => Ok(LossSpec::Dpo),
            "squaredpo" => Ok(LossSpec::SquaredPo { detach_coefficient: false }),
            other => {
                if let Some(gen_id) = other.strip_prefix("fdpo:") {
                    Generator::parse(gen_id).map(LossSpec::FDpo).map_err(LossParseError::BadGenerator)
                } else {
                    Err(LossParseError::Unknown(String::from(other)))
                }
            }
        }
    }

    pub fn id(&self) -> String {
        match self {
            LossSpec::Dpo => String::from("dpo"),
            LossSpec::SquaredPo { .. } => String::from("squaredpo"),
            LossSpec::FDpo(gen) => alloc::format!("fdpo:{}", gen.id()),
        }
    }

    /// Evaluate the selected loss. `clip` only affects `squaredpo`.
    pub fn eval(&self, t: &TripleLogProbs, beta: f64, clip: f64) -> LossValue {
        match self {
            LossSpec::Dpo => dpo_loss(t, beta),
            LossSpec::SquaredPo { detach_coefficient } => {
                squaredpo_loss_impl(t, beta, clip, *detach_coefficient)
            }
            LossSpec::FDpo(gen) => fdpo_loss(t, *gen, beta),
        }
    }
}

impl fmt::Display for LossSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN_2: f64 = core::f64::consts::LN_2;

    fn triple(dw: f64, dl: f64) -> TripleLogProbs {
        TripleLogProbs { lp_theta_w: dw - 1.3, lp_ref_w: -1.3, lp_theta_l: dl - 2.1, lp_ref_l: -2.1 }
    }

    #[test]
    fn bt_nll_values() {
        assert!((bt_nll(0.0) - LN_2).abs() < 1e-15);
        assert!(bt_nll(700.0) == 0.0);
        assert!(bt_nll(40.0) < 1e-15);
        // Frozen oracle value: log(1 + e^2).
        assert!((bt_nll(-2.0) - 2.1269280110429727).abs() < 1e-14);
        assert!(bt_nll(-745.0).is_finite());
    }

    #[test]
    fn dpo_symmetric_point() {
        let lv = dpo_loss(&triple(0.4, 0.4), 0.25);
        assert!((lv.value - LN_2).abs() < 1e-15);
        assert!((lv.grad_w + 0.25 / 2.0).abs() < 1e-15);
        assert!((lv.grad_l - 0.25 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn dpo_small_beta_example() {
        // bt_nll(0.02), frozen from a high-precision evaluation.
        let lv = dpo_loss(&triple(1.0, -1.0), 0.01);
        assert!((lv.value - 0.6831971797266342).abs() < 1e-14);
    }

    #[test]
    fn fdpo_with_kl_equals_dpo() {
        for (dw, dl) in [(0.0, 0.0), (1.5, -0.7), (-3.2, 0.4), (4.9, 4.8)] {
            let t = triple(dw, dl);
            for beta in [0.01, 0.5, 2.0] {
                let a = dpo_loss(&t, beta);
                let b = fdpo_loss(&t, Generator::Kl, beta);
                assert!((a.value - b.value).abs() < 1e-12);
                assert!((a.grad_w - b.grad_w).abs() < 1e-12);
                assert!((a.grad_l - b.grad_l).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fdpo_with_squaredpo_matches_adaptive_form() {
        for (dw, dl) in [(0.0, 0.0), (1.5, -0.7), (-3.2, 0.4), (-4.9, -4.8)] {
            let t = triple(dw, dl);
            let a = squaredpo_loss(&t, 0.01, f64::INFINITY);
            let b = fdpo_loss(&t, Generator::SquaredPo, 0.01);
            assert!((a.value - b.value).abs() < 1e-12);
            assert!((a.grad_w - b.grad_w).abs() < 1e-12);
            assert!((a.grad_l - b.grad_l).abs() < 1e-12);
        }
    }

    #[test]
    fn squaredpo_symmetric_point_and_coefficient() {
        let lv = squaredpo_loss(&triple(0.0, 0.0), 0.01, DEFAULT_CLIP);
        assert!((lv.value - LN_2).abs() < 1e-15);
        // Displaced winner: beta_theta = beta * e^1.
        let c = adaptive_coefficient(0.01, -1.0, 0.0, DEFAULT_CLIP);
        assert!((c - 0.027182818284590453).abs() < 1e-17);
        assert!(c > 0.01);
    }

    #[test]
    fn clip_saturates_at_threshold() {
        // At lp_ref - lp_theta = 60 the coefficient is exactly beta * e^50.
        let c = adaptive_coefficient(0.01, -60.0, 0.0, 50.0);
        assert_eq!(c, 0.01 * 50f64.exp());
        // Clipped regime: coefficient gradient is zero, the log-ratio
        // factor still carries gradient.
        let t = triple(-60.0, 0.0);
        let lv = squaredpo_loss(&t, 0.01, 50.0);
        let b = 0.01 * 50f64.exp();
        let gap = b * -60.0 - 0.01 * 0.0;
        let s = sigmoid(-gap);
        assert!((lv.grad_w + s * b).abs() < 1e-9 * b);
    }

    #[test]
    fn detached_variant_drops_coefficient_gradient() {
        let t = triple(-0.5, 0.2);
        let full = squaredpo_loss(&t, 0.01, DEFAULT_CLIP);
        let det = squaredpo_loss_detached(&t, 0.01, DEFAULT_CLIP);
        assert_eq!(full.value, det.value);
        assert!(full.grad_w != det.grad_w);
    }

    #[test]
    fn shift_invariance() {
        let t = triple(0.8, -0.3);
        let shifted = TripleLogProbs {
            lp_theta_w: t.lp_theta_w + 5.0,
            lp_ref_w: t.lp_ref_w + 5.0,
            lp_theta_l: t.lp_theta_l - 2.0,
            lp_ref_l: t.lp_ref_l - 2.0,
        };
        for spec in [
            LossSpec::Dpo,
            LossSpec::SquaredPo { detach_coefficient: false },
            LossSpec::FDpo(Generator::JensenShannon),
        ] {
            let a = spec.eval(&t, 0.1, DEFAULT_CLIP);
            let b = spec.eval(&shifted, 0.1, DEFAULT_CLIP);
            assert!((a.value - b.value).abs() < 1e-12, "{spec}");
            assert!((a.grad_w - b.grad_w).abs() < 1e-12, "{spec}");
        }
    }

    #[test]
    fn loss_ids_round_trip() {
        for id in ["dpo", "squaredpo", "fdpo:kl", "fdpo:alpha:0.25"] {
            let spec = LossSpec::parse(id).unwrap();
            assert_eq!(spec.id(), id);
        }
        assert!(LossSpec::parse("ipo").is_err());
        assert!(LossSpec::parse("fdpo:nosuch").is_err());
    }

    #[test]
    fn gradients_match_finite_differences_spot() {
        let h = 1e-6;
        let specs = [
            LossSpec::Dpo,
            LossSpec::SquaredPo { detach_coefficient: false },
            LossSpec::FDpo(Generator::ChiPo),
            LossSpec::FDpo(Generator::ReverseKl),
        ];
        for spec in specs {
            for (dw, dl) in [(0.3, -0.6), (-1.2, 0.9), (2.0, 1.0)] {
                let t = triple(dw, dl);
                let lv = spec.eval(&t, 0.05, DEFAULT_CLIP);
                let up = spec.eval(&TripleLogProbs { lp_theta_w: t.lp_theta_w + h, ..t }, 0.05, DEFAULT_CLIP);
                let dn = spec.eval(&TripleLogProbs { lp_theta_w: t.lp_theta_w - h, ..t }, 0.05, DEFAULT_CLIP);
                let fd = (up.value - dn.value) / (2.0 * h);
                assert!(
                    (fd - lv.grad_w).abs() <= 1e-6 * (1.0 + lv.grad_w.abs()),
                    "{spec} at ({dw},{dl}): fd={fd} grad={}",
                    lv.grad_w
                );
            }
        }
    }
}
