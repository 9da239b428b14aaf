//! Finite-alphabet reward maximization with f-divergence regularization.
//!
//! Two objectives over the probability simplex, for a reward vector r,
//! an interior reference q, and a coefficient beta > 0:
//!
//! - full:    r.p - beta * sum_i q_i f(p_i / q_i)
//! - partial: r.p - beta * sum_{i in S} q_i f(p_i / q_i)
//!
//! where S is a strict subset of the alphabet (the in-sample responses).
//!
//! `solve_full` and `solve_partial_numeric` run multi-start softmax-
//! parametrized gradient ascent; DPO-inducing generators force interior
//! optima, so the unconstrained parametrization is exact there, and a
//! support-restricted polish handles the boundary optima that non-inducing
//! generators and the partial objective admit. `solve_partial_convex`
//! evaluates the closed-form optimal set for convex generators with
//! invertible f': either a family spreading leftover mass over the
//! best out-of-sample rewards, or a unique solution pinned by the
//! multiplier of the mass constraint.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::classifier::{self, Verdict};
use crate::generators::{Distribution, DistributionError, Generator};

#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

/// Default number of seeded restarts for the iterative solvers.
pub const DEFAULT_RESTARTS: usize = 8;
const MAX_ITERS: usize = 5000;
const GRAD_TOL: f64 = 1e-10;
const SOLVER_SEED: u64 = 0x5EED_F0D0;
/// Ratio floor shielding f' from exact zeros produced by underflow.
const RATIO_FLOOR: f64 = 1e-300;

/// A single-prompt alignment instance: rewards, reference, coefficient,
/// and the in-sample index set.
#[derive(Debug, Clone)]
pub struct SimplexInstance {
    r: Vec<f64>,
    q: Distribution,
    beta: f64,
    s_set: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimplexError {
    Invalid(&'static str),
    Distribution(DistributionError),
    /// Iterative solver failed to reach the gradient tolerance; the best
    /// iterate found is attached.
    NonConvergence { best: Vec<f64>, grad_norm: f64 },
    /// Bisection could not bracket the mass-equation root.
    BracketNotFound,
    /// Bisection exhausted without meeting the mass-equation tolerance.
    MassEquationUnsolved { mu: f64, residual: f64 },
    /// The generator's f' has no inverse.
    NotInvertible,
    /// The closed-form partial solver requires a convex generator.
    NotConvex,
    /// The closed-form partial solver requires a DPO-inducing generator.
    NotInducing,
    /// The displacement bound's reward hypothesis does not hold.
    HypothesisViolated,
    /// The displacement bound needs a unique global argmin in (0, 1].
    ArgminOutsideUnitInterval(f64),
    /// Implied reward gaps need strictly positive probability ratios.
    ZeroRatio,
}

impl fmt::Display for SimplexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimplexError::Invalid(msg) => write!(f, "invalid instance: {msg}"),
            SimplexError::Distribution(e) => write!(f, "{e}"),
            SimplexError::NonConvergence { grad_norm, .. } => {
                write!(f, "solver did not converge (gradient norm {grad_norm:.3e})")
            }
            SimplexError::BracketNotFound => write!(f, "mass-equation bracket not found"),
            SimplexError::MassEquationUnsolved { mu, residual } => {
                write!(f, "mass equation unsolved at mu={mu} (residual {residual:.3e})")
            }
            SimplexError::NotInvertible => write!(f, "generator f' is not invertible"),
            SimplexError::NotConvex => write!(f, "generator is not convex"),
            SimplexError::NotInducing => write!(f, "generator is not DPO-inducing"),
            SimplexError::HypothesisViolated => {
                write!(f, "in-sample rewards exceed every out-of-sample reward")
            }
            SimplexError::ArgminOutsideUnitInterval(c) => {
                write!(f, "generator argmin {c} is not in (0, 1]")
            }
            SimplexError::ZeroRatio => write!(f, "probability ratios must be strictly positive"),
        }
    }
}

impl core::error::Error for SimplexError {}

impl From<DistributionError> for SimplexError {
    fn from(e: DistributionError) -> Self {
        SimplexError::Distribution(e)
    }
}

impl SimplexInstance {
    /// Validates: r finite and matching q's length, q interior, beta > 0,
    /// and s_set a non-empty strict subset of the alphabet.
    pub fn new(r: Vec<f64>, q: Distribution, beta: f64, s_set: &[usize]) -> Result<Self, SimplexError> {
        let n = q.len();
        if r.len() != n {
            return Err(SimplexError::Invalid("reward and reference lengths differ"));
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(SimplexError::Invalid("rewards must be finite"));
        }
        if !q.is_interior() {
            return Err(SimplexError::Invalid("reference must be strictly positive"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(SimplexError::Invalid("beta must be positive and finite"));
        }
        let mut s: Vec<usize> = s_set.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.iter().any(|&i| i >= n) {
            return Err(SimplexError::Invalid("s_set index out of range"));
        }
        if s.is_empty() {
            return Err(SimplexError::Invalid("s_set must be non-empty"));
        }
        if s.len() == n {
            return Err(SimplexError::Invalid("s_set must be a strict subset"));
        }
        Ok(SimplexInstance { r, q, beta, s_set: s })
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn q(&self) -> &Distribution {
        &self.q
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn s_set(&self) -> &[usize] {
        &self.s_set
    }

    fn is_in_s(&self, i: usize) -> bool {
        self.s_set.binary_search(&i).is_ok()
    }

    /// Indices outside S attaining the maximal out-of-sample reward.
    pub fn argmax_outside_s(&self) -> (f64, Vec<usize>) {
        let mut r_hat = f64::NEG_INFINITY;
        for i in 0..self.n() {
            if !self.is_in_s(i) && self.r[i] > r_hat {
                r_hat = self.r[i];
            }
        }
        let set = (0..self.n()).filter(|&i| !self.is_in_s(i) && self.r[i] == r_hat).collect();
        (r_hat, set)
    }
}

fn divergence_term(gen: Generator, p: f64, q: f64) -> f64 {
    if p == 0.0 {
        gen.f_at_zero()
    } else {
        gen.f(p / q)
    }
}

/// r.p - beta * D_f(p || q). Returns negative infinity when the divergence
/// diverges (a zero coordinate under a generator with infinite f(0)).
pub fn objective_full(inst: &SimplexInstance, gen: Generator, p: &[f64]) -> Result<f64, SimplexError> {
    if p.len() != inst.n() {
        return Err(SimplexError::Invalid("point has wrong length"));
    }
    Ok(objective_full_unchecked(inst, gen, p))
}

fn objective_full_unchecked(inst: &SimplexInstance, gen: Generator, p: &[f64]) -> f64 {
    let q = inst.q.probs();
    let mut reward = 0.0;
    let mut div = 0.0;
    for i in 0..p.len() {
        reward += inst.r[i] * p[i];
        let term = divergence_term(gen, p[i], q[i]);
        if term == f64::INFINITY {
            return f64::NEG_INFINITY;
        }
        div += q[i] * term;
    }
    reward - inst.beta * div
}

/// As [`objective_full`], but the divergence penalty runs only over the
/// in-sample set S.
pub fn objective_partial(inst: &SimplexInstance, gen: Generator, p: &[f64]) -> Result<f64, SimplexError> {
    if p.len() != inst.n() {
        return Err(SimplexError::Invalid("point has wrong length"));
    }
    Ok(objective_partial_unchecked(inst, gen, p))
}

fn objective_partial_unchecked(inst: &SimplexInstance, gen: Generator, p: &[f64]) -> f64 {
    let q = inst.q.probs();
    let mut reward = 0.0;
    for i in 0..p.len() {
        reward += inst.r[i] * p[i];
    }
    let mut div = 0.0;
    for &i in &inst.s_set {
        let term = divergence_term(gen, p[i], q[i]);
        if term == f64::INFINITY {
            return f64::NEG_INFINITY;
        }
        div += q[i] * term;
    }
    reward - inst.beta * div
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    Full,
    Partial,
}

struct Ascent {
    p: Vec<f64>,
    objective: f64,
    grad_norm: f64,
    converged: bool,
}

/// Gradient ascent in softmax logits restricted to `support`; coordinates
/// off the support stay at exactly zero.
fn ascend_softmax(
    inst: &SimplexInstance,
    gen: Generator,
    kind: ObjectiveKind,
    support: &[usize],
    init_logits: &[f64],
) -> Ascent {
    let q = inst.q.probs();
    let m = support.len();
    let mut z = init_logits.to_vec();
    let mut p_full = vec![0.0f64; inst.n()];
    let objective = |p: &[f64]| match kind {
        ObjectiveKind::Full => objective_full_unchecked(inst, gen, p),
        ObjectiveKind::Partial => objective_partial_unchecked(inst, gen, p),
    };
    let embed = |z: &[f64], p_full: &mut Vec<f64>| {
        let zmax = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for &zi in z {
            sum += (zi - zmax).exp();
        }
        for v in p_full.iter_mut() {
            *v = 0.0;
        }
        for (k, &i) in support.iter().enumerate() {
            p_full[i] = (z[k] - zmax).exp() / sum;
        }
    };

    embed(&z, &mut p_full);
    let mut obj = objective(&p_full);
    let mut step = 1.0f64;
    let mut grad = vec![0.0f64; m];
    let mut grad_norm = f64::INFINITY;
    let mut converged = false;

    for _ in 0..MAX_ITERS {
        // Euclidean gradient over positive coordinates, then the softmax
        // chain rule in logit space.
        let mut mean_g = 0.0;
        let mut gs = vec![0.0f64; m];
        for (k, &i) in support.iter().enumerate() {
            let ratio = (p_full[i] / q[i]).max(RATIO_FLOOR);
            let fp = match kind {
                ObjectiveKind::Full => gen.f_prime(ratio),
                ObjectiveKind::Partial => {
                    if inst.is_in_s(i) {
                        gen.f_prime(ratio)
                    } else {
                        0.0
                    }
                }
            };
            gs[k] = inst.r[i] - inst.beta * fp;
            mean_g += p_full[i] * gs[k];
        }
        grad_norm = 0.0;
        for (k, &i) in support.iter().enumerate() {
            grad[k] = p_full[i] * (gs[k] - mean_g);
            grad_norm += grad[k] * grad[k];
        }
        grad_norm = grad_norm.sqrt();
        if grad_norm < GRAD_TOL {
            converged = true;
            break;
        }

        // Backtracking line search along the gradient.
        let dir_sq = grad_norm * grad_norm;
        let mut eta = (step * 2.0).clamp(1e-12, 1e9);
        let mut accepted = false;
        for _ in 0..60 {
            let z_new: Vec<f64> = z.iter().zip(&grad).map(|(zi, gi)| zi + eta * gi).collect();
            embed(&z_new, &mut p_full);
            let obj_new = objective(&p_full);
            if obj_new >= obj + 1e-4 * eta * dir_sq && obj_new.is_finite() {
                z = z_new;
                obj = obj_new;
                step = eta;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            embed(&z, &mut p_full);
            converged = grad_norm < GRAD_TOL * 100.0;
            break;
        }
        let zmax = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for zi in z.iter_mut() {
            *zi -= zmax;
        }
    }
    embed(&z, &mut p_full);
    let objective_final = objective(&p_full);
    Ascent { p: p_full, objective: objective_final, grad_norm, converged: converged || m == 1 }
}

/// Softmax of log q + r / beta, the closed-form optimum of the full
/// KL-regularized objective.
pub fn kl_closed_form(inst: &SimplexInstance) -> Vec<f64> {
    let q = inst.q.probs();
    let logits: Vec<f64> = (0..inst.n()).map(|i| q[i].ln() + inst.r[i] / inst.beta).collect();
    softmax(&logits)
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let zmax = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - zmax).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

fn warm_start_logits(inst: &SimplexInstance, support: &[usize]) -> Vec<f64> {
    let q = inst.q.probs();
    support.iter().map(|&i| q[i].ln() + inst.r[i] / inst.beta).collect()
}

fn random_logits(rng: &mut ChaCha12Rng, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect()
}

fn run_restarts(
    inst: &SimplexInstance,
    gen: Generator,
    kind: ObjectiveKind,
    support: &[usize],
    extra_inits: &[Vec<f64>],
    restarts: usize,
    seed_salt: u64,
) -> Option<Ascent> {
    let mut best: Option<Ascent> = None;
    let mut inits: Vec<Vec<f64>> = vec![warm_start_logits(inst, support)];
    inits.extend_from_slice(extra_inits);
    let mut rng = ChaCha12Rng::seed_from_u64(SOLVER_SEED ^ seed_salt);
    while inits.len() < restarts.max(1) {
        inits.push(random_logits(&mut rng, support.len()));
    }
    for init in inits {
        let res = ascend_softmax(inst, gen, kind, support, &init);
        if res.objective.is_nan() {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => res.objective > b.objective,
        };
        if better {
            best = Some(res);
        }
    }
    best
}

/// Candidate supports for boundary-capable search: coordinates of `p`
/// above a threshold, always retaining `keep` (the in-sample set for the
/// partial objective, the reward argmax for the full one).
fn snap_supports(p: &[f64], keep: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for theta in [1e-2, 1e-4] {
        let mut s: Vec<usize> = (0..p.len())
            .filter(|&i| p[i] >= theta || keep.contains(&i))
            .collect();
        s.sort_unstable();
        if s.len() >= 1 && s.len() < p.len() && !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

/// Maximize the full objective by multi-start softmax ascent.
///
/// DPO-inducing generators admit only interior optima, so the softmax
/// parametrization is exact for them; for generators with finite f(0) a
/// support-restricted polish chases boundary optima as well.
pub fn solve_full(inst: &SimplexInstance, gen: Generator, restarts: usize) -> Result<Vec<f64>, SimplexError> {
    let full_support: Vec<usize> = (0..inst.n()).collect();
    let mut best = run_restarts(inst, gen, ObjectiveKind::Full, &full_support, &[], restarts, 0)
        .ok_or(SimplexError::Invalid("objective not finite anywhere"))?;

    if gen.f_at_zero().is_finite() {
        // Boundary optima are possible; re-ascend on trimmed supports.
        let r_argmax = (0..inst.n())
            .max_by(|&a, &b| inst.r[a].partial_cmp(&inst.r[b]).expect("finite rewards"))
            .expect("n >= 2");
        for support in snap_supports(&best.p, &[r_argmax]) {
            let init: Vec<f64> = support.iter().map(|&i| best.p[i].max(1e-12).ln()).collect();
            if let Some(res) =
                run_restarts(inst, gen, ObjectiveKind::Full, &support, &[init], restarts.min(4), 1)
            {
                if res.objective > best.objective {
                    best = res;
                }
            }
        }
    }
    if !best.converged {
        return Err(SimplexError::NonConvergence { best: best.p, grad_norm: best.grad_norm });
    }
    Ok(best.p)
}

/// Maximize the partial objective by multi-start softmax ascent over the
/// full simplex plus the sub-simplexes suggested by the closed-form
/// analysis (S with the best out-of-sample rewards, and S alone).
pub fn solve_partial_numeric(
    inst: &SimplexInstance,
    gen: Generator,
    restarts: usize,
) -> Result<Vec<f64>, SimplexError> {
    let full_support: Vec<usize> = (0..inst.n()).collect();
    let (_, argmax_set) = inst.argmax_outside_s();
    let mut supports: Vec<Vec<usize>> = vec![full_support];
    let mut with_argmax: Vec<usize> = inst.s_set.to_vec();
    with_argmax.extend(argmax_set.iter().copied());
    with_argmax.sort_unstable();
    supports.push(with_argmax);
    if inst.s_set.len() < inst.n() {
        supports.push(inst.s_set.to_vec());
    }

    let mut best: Option<Ascent> = None;
    for (k, support) in supports.iter().enumerate() {
        if let Some(res) =
            run_restarts(inst, gen, ObjectiveKind::Partial, support, &[], restarts, 10 + k as u64)
        {
            let better = match &best {
                None => true,
                Some(b) => res.objective > b.objective,
            };
            if better {
                best = Some(res);
            }
        }
    }
    let best = best.ok_or(SimplexError::Invalid("objective not finite anywhere"))?;
    if !best.converged {
        return Err(SimplexError::NonConvergence { best: best.p, grad_norm: best.grad_norm });
    }
    Ok(best.p)
}

/// The closed-form optimal set of the partial objective for a convex,
/// DPO-inducing generator with invertible f'.
#[derive(Debug, Clone)]
pub enum PartialOptimalSet {
    /// sum of in-sample masses z_i < 1: in-sample probabilities are pinned
    /// at z_i and the leftover mass may sit anywhere on the out-of-sample
    /// reward argmax set.
    FamilyOnArgmax {
        /// (index, probability) for each i in S.
        fixed_s_probs: Vec<(usize, f64)>,
        /// 1 - sum z_i.
        free_mass: f64,
        /// Out-of-sample indices attaining the max reward.
        argmax_set: Vec<usize>,
    },
    /// sum z_i >= 1: the unique optimum places zero mass outside S, with
    /// in-sample probabilities pinned by the multiplier mu.
    UniqueInteriorMu {
        s_probs: Vec<(usize, f64)>,
        mu: f64,
    },
}

impl PartialOptimalSet {
    /// A canonical representative: the family case spreads the leftover
    /// mass uniformly over the argmax set.
    pub fn canonical(&self, n: usize) -> Vec<f64> {
        let mut p = vec![0.0f64; n];
        match self {
            PartialOptimalSet::FamilyOnArgmax { fixed_s_probs, free_mass, argmax_set } => {
                for &(i, v) in fixed_s_probs {
                    p[i] = v;
                }
                let share = free_mass / argmax_set.len() as f64;
                for &i in argmax_set {
                    p[i] = share;
                }
            }
            PartialOptimalSet::UniqueInteriorMu { s_probs, .. } => {
                for &(i, v) in s_probs {
                    p[i] = v;
                }
            }
        }
        p
    }
}

/// Solve the partial objective in closed form (convex generator with
/// invertible f', DPO-inducing).
pub fn solve_partial_convex(inst: &SimplexInstance, gen: Generator) -> Result<PartialOptimalSet, SimplexError> {
    if !gen.is_convex() {
        return Err(SimplexError::NotConvex);
    }
    if !gen.has_invertible_f_prime() {
        return Err(SimplexError::NotInvertible);
    }
    if classifier::is_dpo_inducing(gen).verdict != Verdict::Inducing {
        return Err(SimplexError::NotInducing);
    }
    let q = inst.q.probs();
    let (r_hat, argmax_set) = inst.argmax_outside_s();

    let inv = |u: f64| gen.f_prime_inverse(u).expect("invertibility checked");
    let z: Vec<(usize, f64)> = inst
        .s_set
        .iter()
        .map(|&i| (i, q[i] * inv((inst.r[i] - r_hat) / inst.beta)))
        .collect();
    let z_sum: f64 = z.iter().map(|&(_, v)| v).sum();

    if z_sum < 1.0 {
        return Ok(PartialOptimalSet::FamilyOnArgmax {
            fixed_s_probs: z,
            free_mass: 1.0 - z_sum,
            argmax_set,
        });
    }

    // Mass equation: sum_{i in S} q_i inv((r_i + mu) / beta) = 1, with the
    // left side nondecreasing in mu.
    let mass = |mu: f64| -> f64 {
        inst.s_set.iter().map(|&i| q[i] * inv((inst.r[i] + mu) / inst.beta)).sum()
    };
    let r_inf = inst.r.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let mut lo = -r_inf - 10.0 * inst.beta;
    let mut hi = r_inf + 10.0 * inst.beta;
    let mut width = hi - lo;
    let mut doublings = 0;
    while mass(lo) > 1.0 {
        lo -= width;
        width *= 2.0;
        doublings += 1;
        if doublings > 60 {
            return Err(SimplexError::BracketNotFound);
        }
    }
    doublings = 0;
    width = hi - lo;
    while mass(hi) < 1.0 {
        hi += width;
        width *= 2.0;
        doublings += 1;
        if doublings > 60 {
            return Err(SimplexError::BracketNotFound);
        }
    }
    let mut best_mu = 0.5 * (lo + hi);
    let mut best_res = f64::INFINITY;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let h = mass(mid);
        let res = (h - 1.0).abs();
        if res < best_res {
            best_res = res;
            best_mu = mid;
        }
        if res <= 1e-12 {
            break;
        }
        if h < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best_res > 1e-9 {
        return Err(SimplexError::MassEquationUnsolved { mu: best_mu, residual: best_res });
    }
    let s_probs: Vec<(usize, f64)> = inst
        .s_set
        .iter()
        .map(|&i| (i, q[i] * inv((inst.r[i] + best_mu) / inst.beta)))
        .collect();
    Ok(PartialOptimalSet::UniqueInteriorMu { s_probs, mu: best_mu })
}

/// Check the stationarity condition: all coordinates carrying more than
/// `tol` probability must share the same partial derivative of the
/// objective, within `tol`.
pub fn verify_kkt_equal_partials(
    inst: &SimplexInstance,
    gen: Generator,
    p: &[f64],
    tol: f64,
    kind: ObjectiveKind,
) -> bool {
    if p.len() != inst.n() {
        return false;
    }
    let q = inst.q.probs();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..p.len() {
        if p[i] <= tol {
            continue;
        }
        let with_div = match kind {
            ObjectiveKind::Full => true,
            ObjectiveKind::Partial => inst.is_in_s(i),
        };
        let d = if with_div {
            inst.r[i] - inst.beta * gen.f_prime(p[i] / q[i])
        } else {
            inst.r[i]
        };
        lo = lo.min(d);
        hi = hi.max(d);
    }
    if !lo.is_finite() || !hi.is_finite() {
        // Zero or one qualifying coordinate: vacuously stationary.
        return true;
    }
    hi - lo <= tol
}

/// Verify the in-sample contraction bound p_i <= c q_i for i in S, where
/// c is the generator's global argmin location.
///
/// Preconditions are reported as distinct errors: the generator must have
/// a unique global argmin in (0, 1], and no in-sample reward may exceed
/// every out-of-sample reward.
pub fn check_displacement_bound(
    inst: &SimplexInstance,
    gen: Generator,
    p: &[f64],
) -> Result<bool, SimplexError> {
    if p.len() != inst.n() {
        return Err(SimplexError::Invalid("point has wrong length"));
    }
    let argmin = classifier::argmin_f(gen)
        .map_err(|_| SimplexError::Invalid("argmin search failed"))?;
    let c = argmin.location;
    if !(c > 0.0 && c <= 1.0 + 1e-9) || (c - classifier::ARGMIN_HI).abs() < 1e-6 {
        return Err(SimplexError::ArgminOutsideUnitInterval(c));
    }
    let (r_hat, _) = inst.argmax_outside_s();
    let s_max = inst.s_set.iter().map(|&i| inst.r[i]).fold(f64::NEG_INFINITY, f64::max);
    if s_max > r_hat {
        return Err(SimplexError::HypothesisViolated);
    }
    let q = inst.q.probs();
    Ok(inst.s_set.iter().all(|&i| p[i] <= c * q[i] + 1e-9))
}

/// The reward gap implied by a pair of policy/reference probability
/// ratios: beta * (f'(w_ratio) - f'(l_ratio)).
pub fn implied_reward_gap(
    gen: Generator,
    beta: f64,
    w_ratio: f64,
    l_ratio: f64,
) -> Result<f64, SimplexError> {
    if !(w_ratio > 0.0) || !(l_ratio > 0.0) {
        return Err(SimplexError::ZeroRatio);
    }
    Ok(beta * (gen.f_prime(w_ratio) - gen.f_prime(l_ratio)))
}
