//! Closed-form Bellman functions with domain validation and branch bookkeeping.
//!
//! Variable naming: `norm` is the norm-type constraint `F` (an `L^p` average,
//! a weak-norm power or a Lorentz quasinorm depending on the function), `mean`
//! is `f = ∫φ`, and `floor` is `L`, the largest average over the cubes
//! containing the base cube.

use serde::{Deserialize, Serialize};

use crate::error::{domain, precondition, Error, Result};
use crate::hardy::{self, Evaluation, FunctionalSpec};
use crate::measure_fn::{lower_envelope, PiecewisePower};
use crate::quadrature::{integrate, integrate_power_substituted, QuadratureOptions};
use crate::special::{self, conjugate, AlphaSolution, MIN_EXPONENT_GAP};

/// Relative guard band applied to the domain inequalities.
pub const GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryKind {
    I5,
    Thm2,
    Thm3,
    Thm4,
}

impl QueryKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            QueryKind::I5 => "i5",
            QueryKind::Thm2 => "thm2",
            QueryKind::Thm3 => "thm3",
            QueryKind::Thm4 => "thm4",
        }
    }
}

impl std::str::FromStr for QueryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "i5" => Ok(QueryKind::I5),
            "thm2" => Ok(QueryKind::Thm2),
            "thm3" => Ok(QueryKind::Thm3),
            "thm4" => Ok(QueryKind::Thm4),
            other => Err(precondition(format!("unknown query kind '{other}'"))),
        }
    }
}

/// Which case of a piecewise formula produced the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// `L < p' f`: `F ω_p(...)^p`.
    I5Inner,
    /// `L ≥ p' f`: `L^p + p'^p (F - f^p)`.
    I5Outer,
    Thm2,
    /// `L ≤ L*`.
    Thm3Upper,
    /// `L ≥ L*`.
    Thm3Lower,
    /// `1 < p ≤ q`.
    Thm4CaseI,
    /// `1 < q < p`.
    Thm4CaseII,
    /// `q = 1`: `p'(F - f)`.
    Thm4QOne,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::I5Inner => "i5_inner",
            Branch::I5Outer => "i5_outer",
            Branch::Thm2 => "thm2",
            Branch::Thm3Upper => "thm3_upper",
            Branch::Thm3Lower => "thm3_lower",
            Branch::Thm4CaseI => "thm4_case_i",
            Branch::Thm4CaseII => "thm4_case_ii",
            Branch::Thm4QOne => "thm4_q1",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellmanResult {
    pub value: f64,
    pub branch: Branch,
    pub sigma: Option<f64>,
    pub alpha: Option<f64>,
    pub z: Option<f64>,
    /// `L* = (p')^{p'} (F/f)^{1/(p-1)}` for the weak-to-Lorentz function.
    pub threshold: Option<f64>,
    /// Non-fatal observations (marginal domain inputs, post-hoc checks).
    pub flags: Vec<String>,
}

impl BellmanResult {
    fn new(value: f64, branch: Branch) -> Self {
        BellmanResult {
            value,
            branch,
            sigma: None,
            alpha: None,
            z: None,
            threshold: None,
            flags: Vec::new(),
        }
    }
}

/// A weak-type constraint `‖φ‖_{p,∞}^p ≤ F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakConstraint {
    pub p: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BellmanQuery {
    I5 {
        p: f64,
        norm: f64,
        mean: f64,
        floor: f64,
    },
    Thm2 {
        weak: Vec<WeakConstraint>,
        mean: f64,
        spec: FunctionalSpec,
    },
    Thm3 {
        p: f64,
        q: f64,
        r: f64,
        norm: f64,
        mean: f64,
        floor: f64,
    },
    Thm4 {
        p: f64,
        q: f64,
        norm: f64,
        mean: f64,
    },
}

impl BellmanQuery {
    pub fn kind(&self) -> QueryKind {
        match self {
            BellmanQuery::I5 { .. } => QueryKind::I5,
            BellmanQuery::Thm2 { .. } => QueryKind::Thm2,
            BellmanQuery::Thm3 { .. } => QueryKind::Thm3,
            BellmanQuery::Thm4 { .. } => QueryKind::Thm4,
        }
    }

    pub fn evaluate(&self) -> Result<BellmanResult> {
        match self {
            BellmanQuery::I5 { p, norm, mean, floor } => bellman_i5(*p, *norm, *mean, *floor),
            BellmanQuery::Thm2 { weak, mean, spec } => bellman_thm2(weak, *mean, spec),
            BellmanQuery::Thm3 {
                p,
                q,
                r,
                norm,
                mean,
                floor,
            } => bellman_thm3(*p, *q, *r, *norm, *mean, *floor),
            BellmanQuery::Thm4 { p, q, norm, mean } => bellman_thm4(*p, *q, *norm, *mean),
        }
    }
}

fn finite_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(precondition(format!("{name} must be finite and > 0 (got {x})")));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !p.is_finite() || !(p > 1.0 + MIN_EXPONENT_GAP) {
        return Err(precondition(format!("p must exceed 1 (got {p})")));
    }
    Ok(())
}

fn exceeds(lhs: f64, rhs: f64) -> bool {
    lhs > rhs * (1.0 + GUARD)
}

/// The `L^p` Bellman function with fixed `Av(φ^p) = F`, `Av(φ) = f` and outer average `L`.
pub fn bellman_i5(p: f64, norm: f64, mean: f64, floor: f64) -> Result<BellmanResult> {
    check_p(p)?;
    if !(mean >= 0.0) || !(norm >= 0.0) || !floor.is_finite() || !norm.is_finite() {
        return Err(precondition(format!("need finite F, f >= 0 (got F={norm}, f={mean})")));
    }
    if exceeds(mean, floor) {
        return Err(domain(format!("requires 0 <= f <= L (got f={mean}, L={floor})")));
    }
    if exceeds(mean.powf(p), norm) {
        return Err(domain(format!(
            "requires f^p <= F (got f^p={}, F={norm})",
            mean.powf(p)
        )));
    }
    let pc = conjugate(p);
    if floor < pc * mean {
        let mut y = (p * floor.powf(p - 1.0) * mean - (p - 1.0) * floor.powf(p)) / norm;
        if !(-GUARD..=1.0 + GUARD).contains(&y) {
            return Err(Error::Numerical(format!("omega_p argument {y} left [0, 1]")));
        }
        y = y.clamp(0.0, 1.0);
        let z = special::omega_q(p, y)?;
        let mut res = BellmanResult::new(norm * z.powf(p), Branch::I5Inner);
        res.z = Some(z);
        Ok(res)
    } else {
        Ok(BellmanResult::new(
            floor.powf(p) + pc.powf(p) * (norm - mean.powf(p)),
            Branch::I5Outer,
        ))
    }
}

/// The envelope `R(u) = min_j (F_j/u)^{1/p_j}` of a set of weak constraints.
pub fn weak_envelope(weak: &[WeakConstraint]) -> Result<PiecewisePower> {
    let curves: Vec<(f64, f64)> = weak.iter().map(|w| (w.norm, w.p)).collect();
    lower_envelope(&curves)
}

/// Bellman function under `∫φ = f` and several weak-type constraints, for the
/// supported `(G, h)` pairs.
pub fn bellman_thm2(weak: &[WeakConstraint], mean: f64, spec: &FunctionalSpec) -> Result<BellmanResult> {
    bellman_thm2_with(weak, mean, spec, Evaluation::Auto)
}

/// [`bellman_thm2`] with an explicit evaluation mode; `Evaluation::Quadrature`
/// gives an independent numerical value for the same quantity.
pub fn bellman_thm2_with(
    weak: &[WeakConstraint],
    mean: f64,
    spec: &FunctionalSpec,
    mode: Evaluation,
) -> Result<BellmanResult> {
    finite_positive("f", mean)?;
    spec.validate()?;
    let envelope = weak_envelope(weak)?;
    let capacity = envelope.cumulative(1.0);
    if exceeds(mean, capacity) {
        return Err(domain(format!(
            "requires f <= ∫₀¹ min_j (F_j/u)^(1/p_j) du = {capacity} (got f={mean})"
        )));
    }
    let sigma = special::solve_sigma(&envelope, mean.min(capacity))?;
    let value = hardy::functional_with(&envelope, spec, Some(sigma), mode)?;
    let mut res = BellmanResult::new(value, Branch::Thm2);
    res.sigma = Some(sigma);
    Ok(res)
}

/// `L* = (p')^{p'} (F/f)^{1/(p-1)}`, where the two weak-to-Lorentz branches meet.
pub fn thm3_threshold(p: f64, norm: f64, mean: f64) -> f64 {
    let pc = conjugate(p);
    pc.powf(pc) * (norm / mean).powf(1.0 / (p - 1.0))
}

fn check_thm3(p: f64, q: f64, r: f64, norm: f64, mean: f64, floor: f64) -> Result<()> {
    check_p(p)?;
    if !q.is_finite() || !(q > 1.0 + MIN_EXPONENT_GAP) {
        return Err(precondition(format!("q must exceed 1 (got {q})")));
    }
    if !(q < p) {
        return Err(Error::Unsupported(format!(
            "the weak-to-Lorentz function needs 1 < q < p (got p={p}, q={q})"
        )));
    }
    finite_positive("r", r)?;
    finite_positive("F", norm)?;
    finite_positive("f", mean)?;
    let cap = conjugate(p) * norm.powf(1.0 / p);
    if !(mean < cap * (1.0 - GUARD)) {
        return Err(domain(format!("requires 0 < f < p' F^(1/p) = {cap} (got f={mean})")));
    }
    if exceeds(mean, floor) {
        return Err(domain(format!("requires f <= L (got f={mean}, L={floor})")));
    }
    Ok(())
}

/// Both weak-to-Lorentz closed-form branches evaluated at the same point, `(upper, lower)`.
pub fn thm3_branches(p: f64, q: f64, r: f64, norm: f64, mean: f64, floor: f64) -> (f64, f64) {
    let pc = conjugate(p);
    let qc = conjugate(q);
    let upper = q * (p - 1.0) * qc / (r * (p - q))
        * pc.powf(pc * r / qc)
        * mean.powf(r * (p - q) / (q * (p - 1.0)))
        * norm.powf(r * (q - 1.0) / (q * (p - 1.0)))
        + q / r * floor.powf(r)
        - q / r * qc * mean.powf(r / q) * floor.powf(r / q * (q - 1.0));
    let lower = q * pc.powf(r * p / q) / (r * (p / q - 1.0)) * norm.powf(r / q) * floor.powf(r * (1.0 - p / q))
        + q / r * floor.powf(r);
    (upper, lower)
}

/// The weak-`L^p` to Lorentz `L^{q,r}` Bellman function, `1 < q < p`.
pub fn bellman_thm3(p: f64, q: f64, r: f64, norm: f64, mean: f64, floor: f64) -> Result<BellmanResult> {
    check_thm3(p, q, r, norm, mean, floor)?;
    let threshold = thm3_threshold(p, norm, mean);
    let (upper, lower) = thm3_branches(p, q, r, norm, mean, floor);
    let (value, branch) = if floor <= threshold {
        (upper, Branch::Thm3Upper)
    } else {
        (lower, Branch::Thm3Lower)
    };
    let mut res = BellmanResult::new(value, branch);
    res.threshold = Some(threshold);
    res.sigma = Some((mean / (conjugate(p) * norm.powf(1.0 / p))).powf(conjugate(p)));
    Ok(res)
}

/// `∫₀¹ t^{r/q - 1} Σ(t)^r dt` with `Σ(t) = max(min(p'(F/t)^{1/p}, f/t), L)`,
/// integrated numerically from the pointwise definition.
pub fn thm3_by_quadrature(p: f64, q: f64, r: f64, norm: f64, mean: f64, floor: f64) -> Result<f64> {
    check_thm3(p, q, r, norm, mean, floor)?;
    let pc = conjugate(p);
    let profile = |t: f64| (pc * (norm / t).powf(1.0 / p)).min(mean / t).max(floor);
    let s = r / q - 1.0;
    let sigma = (mean / (pc * norm.powf(1.0 / p))).powf(pc);
    let mut cuts: Vec<f64> = [sigma, mean / floor, (pc / floor).powf(p) * norm]
        .into_iter()
        .filter(|&x| x > 0.0 && x < 1.0)
        .collect();
    cuts.push(0.0);
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let opts = QuadratureOptions::default();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let part = if a == 0.0 {
            // Σ(t) = p'(F/t)^{1/p} near 0; fold that power into the substitution.
            let gamma = s - r / p;
            integrate_power_substituted(|t| profile(t).powf(r) * t.powf(r / p), gamma, a, b, &opts)?
        } else {
            integrate(|t| t.powf(s) * profile(t).powf(r), a, b, &opts)?
        };
        total += part.value;
    }
    Ok(total)
}

/// The Lorentz `L^{p,q}` Bellman function (q = 1 handled separately).
pub fn bellman_thm4(p: f64, q: f64, norm: f64, mean: f64) -> Result<BellmanResult> {
    check_p(p)?;
    finite_positive("F", norm)?;
    finite_positive("f", mean)?;
    if q == 1.0 {
        if exceeds(mean, norm) {
            return Err(domain(format!("q = 1 requires f <= F (got f={mean}, F={norm})")));
        }
        let mut res = BellmanResult::new(conjugate(p) * (norm - mean).max(0.0), Branch::Thm4QOne);
        if norm - mean <= GUARD * norm {
            res.flags.push("marginal: F - f is at rounding level".into());
        }
        return Ok(res);
    }
    if !q.is_finite() || !(q > 1.0 + MIN_EXPONENT_GAP) {
        return Err(Error::Unsupported(format!(
            "q must be 1 or exceed 1 + {MIN_EXPONENT_GAP:e} (got {q})"
        )));
    }
    let delta = conjugate(p) / conjugate(q);
    let y = mean.powf(q) / (delta.powf(q - 1.0) * norm);
    let branch = if p <= q {
        if exceeds(y, 1.0) {
            return Err(domain(format!(
                "case (i) p <= q requires f^q <= (p'/q')^(q-1) F (got f^q={}, bound {})",
                mean.powf(q),
                delta.powf(q - 1.0) * norm
            )));
        }
        Branch::Thm4CaseI
    } else {
        if exceeds(mean.powf(q), q / p * norm) {
            return Err(domain(format!(
                "case (ii) q < p requires f^q <= (q/p) F (got f^q={}, bound {})",
                mean.powf(q),
                q / p * norm
            )));
        }
        Branch::Thm4CaseII
    };
    let z = special::omega_q(q, y.min(1.0))?;
    let mut res = BellmanResult::new(delta.powf(q) * z.powf(q) * norm, branch);
    res.z = Some(z);
    res.alpha = Some(1.0 - 1.0 / (delta * z));
    if branch == Branch::Thm4CaseII && z < (1.0 / delta) * (1.0 - GUARD) {
        res.flags.push(format!("z = {z} below q'/p' = {}", 1.0 / delta));
    }
    Ok(res)
}

/// `g_α(t) = f(1 - α) t^{-α}`.
pub fn g_alpha(mean: f64, alpha: f64) -> Result<PiecewisePower> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(precondition(format!("alpha must lie in [0, 1) (got {alpha})")));
    }
    PiecewisePower::single(mean * (1.0 - alpha), -alpha)
}

/// The Lorentz extremal `g_α` and its value of `Δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Thm4Extremal {
    pub solution: AlphaSolution,
    pub g: PiecewisePower,
    pub delta: f64,
}

/// Solves for `α`, builds `g_α` and evaluates `Δ(g_α)` through the averaging operator.
pub fn thm4_extremal(p: f64, q: f64, norm: f64, mean: f64) -> Result<Thm4Extremal> {
    let solution = special::solve_alpha(p, q, norm, mean)?;
    let g = g_alpha(mean, solution.alpha)?;
    let delta = hardy::delta_functional(&g, p, q)?;
    Ok(Thm4Extremal { solution, g, delta })
}
