//! Scalar special functions: `H_q`, its inverse `ω_q`, and the two scalar
//! equations the closed forms depend on (the mass equation for `σ` and the
//! norm equation for `α`).

use crate::error::{domain, precondition, Error, Result};
use crate::measure_fn::{PiecewisePower, MASS_TOL};

/// Exponents this close to 1 make `q'` blow up and are rejected by the solvers.
pub const MIN_EXPONENT_GAP: f64 = 1e-9;
const OMEGA_MAX_ITER: usize = 200;

/// An exponent `p > 1` together with its conjugate `p' = p/(p - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugatePair {
    pub exponent: f64,
    pub conjugate: f64,
}

impl ConjugatePair {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(precondition(format!("exponent must be > 1 (got {p})")));
        }
        Ok(ConjugatePair {
            exponent: p,
            conjugate: p / (p - 1.0),
        })
    }
}

/// `p' = p/(p - 1)`.
pub fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

fn check_q(q: f64) -> Result<()> {
    if !q.is_finite() || !(q > 1.0 + MIN_EXPONENT_GAP) {
        return Err(precondition(format!(
            "q must exceed 1 + {MIN_EXPONENT_GAP:e} (got {q})"
        )));
    }
    Ok(())
}

fn hq_raw(q: f64, z: f64) -> f64 {
    z.powf(q - 1.0) * (q - (q - 1.0) * z)
}

/// `H_q(z) = -(q - 1)z^q + q z^{q-1}` on `[1, q']`.
pub fn hq(q: f64, z: f64) -> Result<f64> {
    check_q(q)?;
    let qc = conjugate(q);
    let slack = 1e-12 * qc;
    if !(z >= 1.0 - slack && z <= qc + slack) {
        return Err(precondition(format!("H_q is defined on [1, {qc}] (got z = {z})")));
    }
    Ok(hq_raw(q, z))
}

/// `-ln H_q(1 + u)`, evaluated without cancelling the leading terms so that
/// small values keep their relative accuracy.
fn hq_log_gap(q: f64, u: f64) -> f64 {
    -(q - 1.0) * u.ln_1p() - (-(q - 1.0) * u).ln_1p()
}

/// `ω_q = H_q^{-1}: [0, 1] → [1, q']`.
///
/// Solves `-ln H_q(1 + u) = -ln y` for `u = z - 1` with safeguarded Newton
/// steps. Near `y = 1`, `z - 1` behaves like `sqrt(1 - y)`, and working with
/// `u` and the log gap keeps full relative accuracy there.
pub fn omega_q(q: f64, y: f64) -> Result<f64> {
    check_q(q)?;
    if !(0.0..=1.0).contains(&y) {
        return Err(domain(format!("omega_q is defined on [0, 1] (got y = {y})")));
    }
    let qc = conjugate(q);
    if y == 1.0 {
        return Ok(1.0);
    }
    if y == 0.0 {
        return Ok(qc);
    }
    let target = -y.ln();
    let (mut lo, mut hi) = (0.0, 1.0 / (q - 1.0));
    // -ln H_q(1 + u) ≈ q(q-1)u²/2 for small u
    let mut u = (2.0 * target / (q * (q - 1.0))).sqrt().min(0.5 * hi);
    for _ in 0..OMEGA_MAX_ITER {
        let resid = hq_log_gap(q, u) - target;
        if resid == 0.0 {
            break;
        }
        if resid < 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        let slope = q * (q - 1.0) * u / ((1.0 + u) * (1.0 - (q - 1.0) * u));
        let mut next = u - resid / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let done = (next - u).abs() <= 2.0 * f64::EPSILON * u || hi - lo <= 2.0 * f64::EPSILON * hi;
        u = next;
        if done {
            break;
        }
    }
    Ok((1.0 + u).min(qc))
}

/// Solves `∫₀^σ R = f` for `σ ∈ (0, u_max]` by inverting the exact antiderivative.
pub fn solve_sigma(r: &PiecewisePower, f: f64) -> Result<f64> {
    if !(f > 0.0) || !f.is_finite() {
        return Err(precondition(format!("mass f must be > 0 (got {f})")));
    }
    let total = r.cumulative(1.0);
    if f > total * (1.0 + MASS_TOL) {
        return Err(Error::Infeasible(format!(
            "mass f = {f} exceeds the envelope integral {total}"
        )));
    }
    if f >= total {
        return Ok(r.u_max());
    }
    let mut acc = 0.0;
    for seg in r.segments() {
        let part = seg.integral(seg.start, seg.end);
        if acc + part >= f {
            let k = seg.exponent + 1.0;
            let start_pow = if seg.start == 0.0 { 0.0 } else { seg.start.powf(k) };
            let sigma = (start_pow + (f - acc) * k / seg.coeff).powf(1.0 / k);
            return Ok(sigma.clamp(seg.start, seg.end));
        }
        acc += part;
    }
    Ok(r.u_max())
}

/// `w(α) = (p/q)(1 - α)^q / (1 - αp)` on `[0, 1/p)`.
pub fn alpha_objective(p: f64, q: f64, alpha: f64) -> f64 {
    ((p / q).ln() + q * (-alpha).ln_1p() - (-alpha * p).ln_1p()).exp()
}

/// Which half of the norm-constraint domain a solution lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaCase {
    /// `1 < p ≤ q`; `α ∈ [α₀, 1/p)` with `α₀ = (q - p)/(p(q - 1))`.
    PAtMostQ,
    /// `1 < q < p`; `α ∈ [0, 1/p)`.
    QBelowP,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaSolution {
    pub alpha: f64,
    pub case: AlphaCase,
    /// `|w(α) - F/f^q|`.
    pub residual: f64,
    /// Set when the target is so large that α sits at the top of the bracket.
    pub saturated: bool,
}

impl AlphaSolution {
    /// `z` defined by `1/(1 - α) = δ z` with `δ = p'/q'`.
    pub fn z(&self, p: f64, q: f64) -> f64 {
        let delta = conjugate(p) / conjugate(q);
        1.0 / ((1.0 - self.alpha) * delta)
    }
}

/// `α₀ = (q - p)/(p(q - 1))`, the minimiser of `w` when `p ≤ q`.
pub fn alpha_floor(p: f64, q: f64) -> f64 {
    if p <= q {
        (q - p) / (p * (q - 1.0))
    } else {
        0.0
    }
}

/// `ln w(lo + h) - ln w(lo)`, the log of `w` relative to the bottom of the bracket.
fn alpha_log_gap(p: f64, q: f64, lo: f64, h: f64) -> f64 {
    q * (-h / (1.0 - lo)).ln_1p() - (-h * p / (1.0 - lo * p)).ln_1p()
}

const ALPHA_MAX_ITER: usize = 1100;

/// Solves `w(α) = F/f^q` on the case-appropriate interval by bisection.
///
/// The unknown is the offset `h = α - lo` from the bottom of the bracket and
/// the equation is taken in log form relative to `w(lo)`. In case (i) `w` is
/// flat at `lo = α₀`, so `h` behaves like the square root of the target gap;
/// the offset form resolves it to full relative precision.
pub fn solve_alpha(p: f64, q: f64, norm: f64, mean: f64) -> Result<AlphaSolution> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(precondition(format!("p must be > 1 (got {p})")));
    }
    check_q(q)?;
    if !(norm > 0.0) || !(mean > 0.0) || !norm.is_finite() || !mean.is_finite() {
        return Err(precondition(format!("F and f must be > 0 (got F={norm}, f={mean})")));
    }
    let target = norm / mean.powf(q);
    let (case, lo, floor_value, gap) = if p <= q {
        // w(α₀) = δ^{1-q}, the edge of f^q ≤ δ^{q-1}F.
        let delta = conjugate(p) / conjugate(q);
        let y = mean.powf(q) / (delta.powf(q - 1.0) * norm);
        (AlphaCase::PAtMostQ, alpha_floor(p, q), delta.powf(1.0 - q), -y.ln())
    } else {
        let y = p * mean.powf(q) / (q * norm);
        (AlphaCase::QBelowP, 0.0, p / q, -y.ln())
    };
    if gap < -MASS_TOL {
        let msg = match case {
            AlphaCase::PAtMostQ => {
                format!("case (i) p <= q requires f^q <= (p'/q')^(q-1) F, i.e. F/f^q >= {floor_value} (got {target})")
            }
            AlphaCase::QBelowP => {
                format!("case (ii) q < p requires f^q <= (q/p) F, i.e. F/f^q >= {floor_value} (got {target})")
            }
        };
        return Err(domain(msg));
    }
    let finish = |alpha: f64, saturated: bool| AlphaSolution {
        alpha,
        case,
        residual: (alpha_objective(p, q, alpha) - target).abs(),
        saturated,
    };
    if gap <= 0.0 {
        return Ok(finish(lo, false));
    }
    let top = (1.0 / p) * (1.0 - 1e-15) - lo;
    if alpha_log_gap(p, q, lo, top) < gap {
        return Ok(finish(lo + top, true));
    }
    let (mut a, mut b) = (0.0, top);
    for _ in 0..ALPHA_MAX_ITER {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b || b - a <= f64::EPSILON * b {
            break;
        }
        if alpha_log_gap(p, q, lo, mid) < gap {
            a = mid;
        } else {
            b = mid;
        }
    }
    let ga = (alpha_log_gap(p, q, lo, a) - gap).abs();
    let gb = (alpha_log_gap(p, q, lo, b) - gap).abs();
    Ok(finish(lo + if ga <= gb { a } else { b }, false))
}
