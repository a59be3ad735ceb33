//! The averaging operator `Hg(t) = (1/t)∫₀ᵗ g` and the functionals
//! `∫₀ᵏ G(Hg(t)) t^s dt` built on it.
//!
//! Averages of step and power functions are again sums of power terms on each
//! segment, so [`hardy_of`] is exact. [`functional`] integrates segment by
//! segment: in closed form when a segment carries a single power term and
//! with adaptive Gauss–Kronrod otherwise.

use crate::error::{precondition, Error, Result};
use crate::measure_fn::{power_integral, PowerPieces, BREAK_TOL};
use crate::quadrature::{integrate_geometric, integrate_power_substituted, QuadratureOptions};

/// Tolerance in `t` for locating the crossing `Hg(t) = L`.
pub const CROSSING_TOL: f64 = 1e-14;

const GEOMETRIC_RATIO: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub coeff: f64,
    pub exponent: f64,
}

impl PowerTerm {
    fn eval(&self, t: f64) -> f64 {
        if self.exponent == 0.0 {
            self.coeff
        } else {
            self.coeff * t.powf(self.exponent)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSegment {
    pub start: f64,
    pub end: f64,
    pub terms: Vec<PowerTerm>,
}

impl ProfileSegment {
    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|term| term.eval(t)).sum()
    }

    /// Smallest exponent with a nonzero coefficient, or `None` for the zero profile.
    fn leading_exponent(&self) -> Option<f64> {
        self.terms
            .iter()
            .filter(|t| t.coeff != 0.0)
            .map(|t| t.exponent)
            .reduce(f64::min)
    }
}

/// Piecewise sum of power terms on contiguous segments covering (0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralProfile {
    segments: Vec<ProfileSegment>,
}

impl GeneralProfile {
    pub fn segments(&self) -> &[ProfileSegment] {
        &self.segments
    }

    pub fn eval(&self, t: f64) -> f64 {
        let idx = self.segments.partition_point(|s| s.end < t);
        self.segments[idx.min(self.segments.len() - 1)].eval(t)
    }

    /// Largest relative jump across interior junctions.
    pub fn max_junction_jump(&self) -> f64 {
        self.segments
            .windows(2)
            .map(|w| {
                let t = w[0].end;
                let (l, r) = (w[0].eval(t), w[1].eval(t));
                (l - r).abs() / l.abs().max(r.abs()).max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }
}

/// Builds the exact profile of `Hg`. With `truncation = Some(σ)` the profile is
/// that of `g·χ_(0, σ]`, i.e. `(1/t)∫₀^{min(t, σ)} g`.
pub fn hardy_of<G: PowerPieces + ?Sized>(g: &G, truncation: Option<f64>) -> Result<GeneralProfile> {
    let mut pieces = g.power_pieces();
    for piece in &pieces {
        if piece.coeff != 0.0 && piece.exponent > 0.0 {
            return Err(precondition("hardy_of expects a nonincreasing function"));
        }
    }
    if let Some(sigma) = truncation {
        if !(sigma > 0.0 && sigma <= 1.0) {
            return Err(precondition(format!("truncation must lie in (0, 1] (got {sigma})")));
        }
        if sigma < 1.0 {
            let mut clipped = Vec::with_capacity(pieces.len() + 1);
            for mut piece in pieces {
                if piece.start >= sigma {
                    break;
                }
                piece.end = piece.end.min(sigma);
                clipped.push(piece);
            }
            clipped.push(crate::measure_fn::PowerPiece {
                start: sigma,
                end: 1.0,
                coeff: 0.0,
                exponent: 0.0,
            });
            pieces = clipped;
        }
    }

    let mut segments = Vec::with_capacity(pieces.len());
    let mut mass = 0.0;
    for piece in &pieces {
        if piece.end - piece.start <= BREAK_TOL {
            continue;
        }
        let mut terms = Vec::with_capacity(2);
        if piece.coeff == 0.0 {
            if mass != 0.0 {
                terms.push(PowerTerm {
                    coeff: mass,
                    exponent: -1.0,
                });
            }
        } else {
            let k = piece.exponent + 1.0;
            if !(k > 0.0) {
                return Err(Error::Domain(format!(
                    "g is not integrable on ({}, {}] (exponent {})",
                    piece.start, piece.end, piece.exponent
                )));
            }
            terms.push(PowerTerm {
                coeff: piece.coeff / k,
                exponent: piece.exponent,
            });
            let carried = mass - piece.coeff * piece.start.powf(k) / k;
            if carried != 0.0 {
                terms.push(PowerTerm {
                    coeff: carried,
                    exponent: -1.0,
                });
            }
        }
        segments.push(ProfileSegment {
            start: piece.start,
            end: piece.end,
            terms,
        });
        mass += piece.integral(piece.start, piece.end);
        if !mass.is_finite() {
            return Err(Error::Domain(format!(
                "g is not integrable on ({}, {}]",
                piece.start, piece.end
            )));
        }
    }
    Ok(GeneralProfile { segments })
}

/// The outer function `G` of the functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OuterFn {
    /// `x^r`
    Pow { r: f64 },
    /// `max(x, L)^r`
    MaxPow { r: f64, floor: f64 },
}

impl OuterFn {
    pub fn exponent(&self) -> f64 {
        match *self {
            OuterFn::Pow { r } | OuterFn::MaxPow { r, .. } => r,
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            OuterFn::Pow { r } => x.powf(r),
            OuterFn::MaxPow { r, floor } => x.max(floor).powf(r),
        }
    }
}

/// `∫₀ᵏ G(Hg(t)) t^s dt`, with `G` one of [`OuterFn`] and weight `t^s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalSpec {
    pub outer: OuterFn,
    pub weight_exponent: f64,
    pub k: f64,
}

impl FunctionalSpec {
    pub fn new(outer: OuterFn, weight_exponent: f64, k: f64) -> Result<Self> {
        let spec = FunctionalSpec {
            outer,
            weight_exponent,
            k,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.outer.exponent();
        if !(r > 0.0) || !r.is_finite() {
            return Err(precondition(format!("G exponent r must be > 0 (got {r})")));
        }
        if let OuterFn::MaxPow { floor, .. } = self.outer {
            if !(floor >= 0.0) || !floor.is_finite() {
                return Err(precondition(format!("G floor L must be >= 0 (got {floor})")));
            }
        }
        if !(self.weight_exponent > -1.0) || !self.weight_exponent.is_finite() {
            return Err(precondition(format!(
                "weight exponent s must be > -1 (got {})",
                self.weight_exponent
            )));
        }
        if !(self.k > 0.0 && self.k <= 1.0) {
            return Err(precondition(format!("k must lie in (0, 1] (got {})", self.k)));
        }
        Ok(())
    }

    /// `∫ₐᵇ t^s dt`.
    pub fn weight_integral(&self, a: f64, b: f64) -> f64 {
        power_integral(1.0, self.weight_exponent, a, b)
    }
}

/// How [`functional_with`] treats single-term segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Evaluation {
    /// Closed form where available, quadrature elsewhere.
    #[default]
    Auto,
    /// Quadrature on every segment; used as a cross-check of the closed forms.
    Quadrature,
}

pub fn functional<G: PowerPieces + ?Sized>(g: &G, spec: &FunctionalSpec, truncation: Option<f64>) -> Result<f64> {
    functional_with(g, spec, truncation, Evaluation::Auto)
}

pub fn functional_with<G: PowerPieces + ?Sized>(
    g: &G,
    spec: &FunctionalSpec,
    truncation: Option<f64>,
    mode: Evaluation,
) -> Result<f64> {
    spec.validate()?;
    let profile = hardy_of(g, truncation)?;
    profile_functional(&profile, spec, mode)
}

/// `Δ(g) = ∫₀¹ (t^{1/p - 1}∫₀ᵗ g)^q dt/t`, i.e. the functional with `G = x^q`,
/// `h = t^{q/p - 1}` and `k = 1`.
pub fn delta_functional<G: PowerPieces + ?Sized>(g: &G, p: f64, q: f64) -> Result<f64> {
    functional(g, &delta_spec(p, q)?, None)
}

pub fn delta_spec(p: f64, q: f64) -> Result<FunctionalSpec> {
    if !(p > 1.0) || !(q >= 1.0) {
        return Err(precondition(format!(
            "delta functional needs p > 1 and q >= 1 (got p={p}, q={q})"
        )));
    }
    FunctionalSpec::new(OuterFn::Pow { r: q }, q / p - 1.0, 1.0)
}

/// Integrates `G(profile(t))·t^s` over `(0, k]`.
pub fn profile_functional(profile: &GeneralProfile, spec: &FunctionalSpec, mode: Evaluation) -> Result<f64> {
    let mut total = 0.0;
    for seg in &profile.segments {
        if seg.start >= spec.k {
            break;
        }
        let end = seg.end.min(spec.k);
        total += segment_functional(seg, seg.start, end, spec, mode)?;
    }
    Ok(total)
}

fn segment_functional(seg: &ProfileSegment, a: f64, b: f64, spec: &FunctionalSpec, mode: Evaluation) -> Result<f64> {
    let r = spec.outer.exponent();
    match spec.outer {
        OuterFn::Pow { .. } => powered_integral(seg, a, b, r, spec.weight_exponent, mode),
        OuterFn::MaxPow { floor, .. } => {
            // The profile is nonincreasing, so {H > L} is an initial part of the segment.
            let above = |t: f64| seg.eval(t) > floor;
            let split = if above(b) {
                b
            } else if !above(a + (b - a) * 1e-15) && !(a == 0.0 && seg.leading_exponent().is_some_and(|e| e < 0.0)) {
                a
            } else {
                let (mut lo, mut hi) = (a, b);
                while hi - lo > CROSSING_TOL {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if above(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            };
            let mut value = 0.0;
            if split > a {
                value += powered_integral(seg, a, split, r, spec.weight_exponent, mode)?;
            }
            if b > split {
                value += floor.powf(r) * spec.weight_integral(split, b);
            }
            Ok(value)
        }
    }
}

/// `∫ₐᵇ profile(t)^r t^s dt` on one segment.
fn powered_integral(seg: &ProfileSegment, a: f64, b: f64, r: f64, s: f64, mode: Evaluation) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let live: Vec<PowerTerm> = seg.terms.iter().copied().filter(|t| t.coeff != 0.0).collect();
    if live.is_empty() {
        return Ok(0.0);
    }
    let divergence = || {
        Error::Domain(format!(
            "functional diverges on segment ({}, {}] of the averaged profile",
            seg.start, seg.end
        ))
    };
    let leading = live.iter().map(|t| t.exponent).fold(f64::INFINITY, f64::min);
    // Near t = 0 the integrand behaves like t^{r·e + s}.
    let gamma = if a == 0.0 { s + r * leading.min(0.0) } else { s };
    if a == 0.0 && !(gamma > -1.0) {
        return Err(divergence());
    }
    if live.len() == 1 && mode == Evaluation::Auto {
        let term = live[0];
        let value = power_integral(term.coeff.powf(r), r * term.exponent + s, a, b);
        if !value.is_finite() {
            return Err(divergence());
        }
        return Ok(value);
    }
    let opts = QuadratureOptions::default();
    let wrap = |e: Error| Error::Numerical(format!("segment ({}, {}]: {e}", seg.start, seg.end));
    let res = if a == 0.0 {
        let reduced = |t: f64| {
            let h = seg.eval(t);
            if h <= 0.0 {
                0.0
            } else {
                h.powf(r) * t.powf(s - gamma)
            }
        };
        integrate_power_substituted(reduced, gamma, a, b, &opts).map_err(wrap)?
    } else {
        let integrand = |t: f64| {
            let h = seg.eval(t);
            if h <= 0.0 {
                0.0
            } else {
                h.powf(r) * t.powf(s)
            }
        };
        integrate_geometric(integrand, a, b, GEOMETRIC_RATIO, &opts).map_err(wrap)?
    };
    Ok(res.value)
}
