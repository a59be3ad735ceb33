//! Exact step and piecewise-power functions on (0, 1].
//!
//! Everything here is closed-form: integrals use antiderivatives of `c·t^e`,
//! rearrangement is a sort, and the lower envelope of power curves is found
//! by intersecting lines in log-log coordinates.

use crate::error::{precondition, Error, Result};

/// Breakpoints closer than this are merged.
pub const BREAK_TOL: f64 = 1e-15;
/// Allowed deviation of a measure sum from 1.
pub const MASS_TOL: f64 = 1e-12;
/// Exponent gaps below this are treated as parallel curves.
pub const PARALLEL_TOL: f64 = 1e-14;
/// Relative slack used when checking monotonicity across junctions.
const MONO_TOL: f64 = 1e-12;

/// `c·t^e` on `(start, end]`. A zero coefficient is the zero function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPiece {
    pub start: f64,
    pub end: f64,
    pub coeff: f64,
    pub exponent: f64,
}

impl PowerPiece {
    pub fn eval(&self, t: f64) -> f64 {
        if self.coeff == 0.0 {
            0.0
        } else if self.exponent == 0.0 {
            self.coeff
        } else {
            self.coeff * t.powf(self.exponent)
        }
    }

    /// Value approached from the right at `start` (infinite for a singular piece at 0).
    pub fn left_limit(&self) -> f64 {
        if self.coeff == 0.0 || self.exponent == 0.0 {
            self.coeff
        } else if self.start == 0.0 {
            if self.exponent < 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            self.eval(self.start)
        }
    }

    /// Integral over `(a, b] ∩ (start, end]`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let lo = a.max(self.start);
        let hi = b.min(self.end);
        if hi <= lo {
            return 0.0;
        }
        power_integral(self.coeff, self.exponent, lo, hi)
    }
}

/// `∫_a^b c·t^γ dt` for `0 ≤ a ≤ b`, returning `+∞` when the integral diverges at 0.
pub fn power_integral(c: f64, gamma: f64, a: f64, b: f64) -> f64 {
    if c == 0.0 || b <= a {
        return 0.0;
    }
    let k = gamma + 1.0;
    if k.abs() < PARALLEL_TOL {
        if a == 0.0 {
            return f64::INFINITY;
        }
        return c * (b / a).ln();
    }
    if k < 0.0 && a == 0.0 {
        return f64::INFINITY;
    }
    if gamma == 0.0 {
        return c * (b - a);
    }
    let upper = b.powf(k);
    let lower = if a == 0.0 { 0.0 } else { a.powf(k) };
    c * (upper - lower) / k
}

/// Anything that can be written as contiguous power pieces covering (0, 1].
pub trait PowerPieces {
    fn power_pieces(&self) -> Vec<PowerPiece>;
}

fn pieces_nonincreasing(pieces: &[PowerPiece]) -> bool {
    for piece in pieces {
        if piece.coeff != 0.0 && piece.exponent > 0.0 {
            return false;
        }
    }
    for pair in pieces.windows(2) {
        let left = pair[0].eval(pair[0].end);
        let right = pair[1].left_limit();
        if right > left + MONO_TOL * left.abs().max(1.0) {
            return false;
        }
    }
    true
}

/// Non-negative step function on (0, 1]: `values[i]` on `(breaks[i], breaks[i + 1]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    /// Builds a step function, merging near-duplicate breakpoints and adjacent equal values.
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || breaks.len() != values.len() + 1 {
            return Err(precondition(format!(
                "step function needs n+1 breakpoints for n values (got {} and {})",
                breaks.len(),
                values.len()
            )));
        }
        if breaks[0].abs() > BREAK_TOL {
            return Err(precondition("first breakpoint must be 0"));
        }
        if (breaks[breaks.len() - 1] - 1.0).abs() > BREAK_TOL {
            return Err(precondition("last breakpoint must be 1"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(precondition(format!("step values must be finite and >= 0 (got {v})")));
        }
        for pair in breaks.windows(2) {
            if !(pair[1] > pair[0] - BREAK_TOL) || !pair[1].is_finite() {
                return Err(precondition("breakpoints must be increasing"));
            }
        }

        let mut out_breaks = vec![0.0];
        let mut out_values: Vec<f64> = Vec::with_capacity(values.len());
        for (i, &v) in values.iter().enumerate() {
            let end = if i + 1 == values.len() { 1.0 } else { breaks[i + 1] };
            let start = *out_breaks.last().unwrap();
            if end - start <= BREAK_TOL {
                continue;
            }
            match out_values.last() {
                Some(&last) if last == v => {
                    *out_breaks.last_mut().unwrap() = end;
                }
                _ => {
                    out_values.push(v);
                    out_breaks.push(end);
                }
            }
        }
        if out_values.is_empty() {
            return Err(precondition("step function has no piece of positive length"));
        }
        *out_breaks.last_mut().unwrap() = 1.0;
        Ok(StepFunction {
            breaks: out_breaks,
            values: out_values,
        })
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::new(vec![0.0, 1.0], vec![value])
    }

    /// Consecutive pieces given as `(length, value)`, laid out from 0.
    pub fn from_lengths(pieces: &[(f64, f64)]) -> Result<Self> {
        check_masses(pieces)?;
        let mut breaks = Vec::with_capacity(pieces.len() + 1);
        breaks.push(0.0);
        let mut acc = 0.0;
        for &(m, _) in pieces {
            acc += m;
            breaks.push(acc);
        }
        *breaks.last_mut().unwrap() = 1.0;
        Self::new(breaks, pieces.iter().map(|p| p.1).collect())
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(start, end, value)` triples.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.breaks[i], self.breaks[i + 1], v))
    }

    /// `(length, value)` pairs, suitable for [`rearrange`].
    pub fn lengths(&self) -> Vec<(f64, f64)> {
        self.pieces().map(|(a, b, v)| (b - a, v)).collect()
    }

    /// Value at `t`; pieces are closed on the right. Points `t ≤ 0` read the first value.
    pub fn eval(&self, t: f64) -> f64 {
        if t > 1.0 {
            return 0.0;
        }
        let idx = self.breaks[1..].partition_point(|&b| b < t);
        self.values[idx.min(self.values.len() - 1)]
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    /// `∫₀ᵗ g`, with `t` clamped to [0, 1].
    pub fn cumulative(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        let mut acc = 0.0;
        for (a, b, v) in self.pieces() {
            if a >= t {
                break;
            }
            acc += v * (b.min(t) - a);
        }
        acc
    }

    /// Measure of `{g > λ}`.
    pub fn distribution(&self, level: f64) -> f64 {
        self.pieces()
            .filter(|&(_, _, v)| v > level)
            .map(|(a, b, _)| b - a)
            .sum()
    }

    /// The distribution function sampled at every distinct value and at 0.
    pub fn distribution_points(&self) -> Vec<DistributionPoint> {
        let mut levels: Vec<f64> = self.values.clone();
        levels.push(0.0);
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        levels
            .into_iter()
            .map(|level| DistributionPoint {
                level,
                measure: self.distribution(level),
            })
            .collect()
    }

    /// The equimeasurable nonincreasing rearrangement.
    pub fn rearranged(&self) -> StepFunction {
        rearrange(&self.lengths()).expect("pieces of a valid step function")
    }

    pub fn scaled(&self, factor: f64) -> Result<StepFunction> {
        Self::new(self.breaks.clone(), self.values.iter().map(|v| v * factor).collect())
    }
}

impl PowerPieces for StepFunction {
    fn power_pieces(&self) -> Vec<PowerPiece> {
        self.pieces()
            .map(|(start, end, coeff)| PowerPiece {
                start,
                end,
                coeff,
                exponent: 0.0,
            })
            .collect()
    }
}

/// A sample of the distribution function `λ ↦ |{g > λ}|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionPoint {
    pub level: f64,
    pub measure: f64,
}

/// Positive piecewise power function `c·u^e` on contiguous segments covering `(0, u_max]`,
/// taken to be zero on `(u_max, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePower {
    segments: Vec<PowerPiece>,
}

impl PiecewisePower {
    pub fn new(mut segments: Vec<PowerPiece>) -> Result<Self> {
        if segments.is_empty() {
            return Err(precondition("piecewise power needs at least one segment"));
        }
        if segments[0].start.abs() > BREAK_TOL {
            return Err(precondition("first segment must start at 0"));
        }
        segments[0].start = 0.0;
        for i in 0..segments.len() {
            let s = segments[i];
            if !(s.coeff > 0.0) || !s.coeff.is_finite() {
                return Err(precondition(format!(
                    "segment coefficient must be > 0 (got {})",
                    s.coeff
                )));
            }
            if !(s.exponent > -1.0) || !s.exponent.is_finite() {
                return Err(precondition(format!(
                    "segment exponent must be > -1 for integrability (got {})",
                    s.exponent
                )));
            }
            if !(s.end > s.start) {
                return Err(precondition("segments must have positive length"));
            }
            if i + 1 < segments.len() {
                let next_start = segments[i + 1].start;
                if (next_start - s.end).abs() > BREAK_TOL {
                    return Err(precondition("segments must be contiguous"));
                }
                segments[i + 1].start = s.end;
            }
        }
        let last = segments.len() - 1;
        if segments[last].end > 1.0 + BREAK_TOL {
            return Err(precondition("segments must end at or before 1"));
        }
        segments[last].end = segments[last].end.min(1.0);
        Ok(PiecewisePower { segments })
    }

    /// A single arc `c·u^e` on (0, 1].
    pub fn single(coeff: f64, exponent: f64) -> Result<Self> {
        Self::new(vec![PowerPiece {
            start: 0.0,
            end: 1.0,
            coeff,
            exponent,
        }])
    }

    pub fn segments(&self) -> &[PowerPiece] {
        &self.segments
    }

    pub fn u_max(&self) -> f64 {
        self.segments[self.segments.len() - 1].end
    }

    pub fn eval(&self, u: f64) -> f64 {
        if u > self.u_max() {
            return 0.0;
        }
        let idx = self.segments.partition_point(|s| s.end < u);
        self.segments[idx.min(self.segments.len() - 1)].eval(u)
    }

    /// `∫₀ᵘ R`, with `u` clamped to [0, 1].
    pub fn cumulative(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        self.segments.iter().map(|s| s.integral(0.0, u)).sum()
    }

    /// `∫ₐᵇ R` for `0 ≤ a ≤ b ≤ u_max`.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        integrate_pp(self, a, b)
    }

    pub fn is_nonincreasing(&self) -> bool {
        pieces_nonincreasing(&self.segments)
    }

    /// `R·χ_(0, σ]` as a piecewise power with `u_max = σ`.
    pub fn truncated(&self, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || sigma > self.u_max() + BREAK_TOL {
            return Err(precondition(format!(
                "truncation point must lie in (0, {}] (got {sigma})",
                self.u_max()
            )));
        }
        let mut segments = Vec::new();
        for s in &self.segments {
            if s.start >= sigma - BREAK_TOL && !segments.is_empty() {
                break;
            }
            let mut piece = *s;
            if piece.end >= sigma {
                piece.end = sigma;
                segments.push(piece);
                break;
            }
            segments.push(piece);
        }
        Self::new(segments)
    }
}

impl PowerPieces for PiecewisePower {
    fn power_pieces(&self) -> Vec<PowerPiece> {
        let mut out = self.segments.clone();
        let u_max = self.u_max();
        if u_max < 1.0 {
            out.push(PowerPiece {
                start: u_max,
                end: 1.0,
                coeff: 0.0,
                exponent: 0.0,
            });
        }
        out
    }
}

/// Either representation, for callers that pick one at runtime.
#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    Step(StepFunction),
    Power(PiecewisePower),
}

impl Density {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Density::Step(g) => g.eval(t),
            Density::Power(g) => g.eval(t),
        }
    }

    pub fn cumulative(&self, t: f64) -> f64 {
        match self {
            Density::Step(g) => g.cumulative(t),
            Density::Power(g) => g.cumulative(t),
        }
    }

    pub fn is_nonincreasing(&self) -> bool {
        match self {
            Density::Step(g) => g.is_nonincreasing(),
            Density::Power(g) => g.is_nonincreasing(),
        }
    }
}

impl PowerPieces for Density {
    fn power_pieces(&self) -> Vec<PowerPiece> {
        match self {
            Density::Step(g) => g.power_pieces(),
            Density::Power(g) => g.power_pieces(),
        }
    }
}

impl From<StepFunction> for Density {
    fn from(g: StepFunction) -> Self {
        Density::Step(g)
    }
}

impl From<PiecewisePower> for Density {
    fn from(g: PiecewisePower) -> Self {
        Density::Power(g)
    }
}

fn check_masses(pieces: &[(f64, f64)]) -> Result<()> {
    if pieces.is_empty() {
        return Err(precondition("at least one piece is required"));
    }
    let mut total = 0.0;
    for &(m, w) in pieces {
        if !(m > 0.0) || !m.is_finite() {
            return Err(precondition(format!("piece measures must be > 0 (got {m})")));
        }
        if !(w >= 0.0) || !w.is_finite() {
            return Err(precondition(format!("piece values must be finite and >= 0 (got {w})")));
        }
        total += m;
    }
    if (total - 1.0).abs() > MASS_TOL {
        return Err(precondition(format!("piece measures must sum to 1 (got {total})")));
    }
    Ok(())
}

/// Decreasing rearrangement of a simple function given as `(measure, value)` pieces.
///
/// Equal values are merged into one piece.
pub fn rearrange(pieces: &[(f64, f64)]) -> Result<StepFunction> {
    check_masses(pieces)?;
    let mut sorted = pieces.to_vec();
    sorted.sort_by(|x, y| y.1.total_cmp(&x.1));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    for (m, w) in sorted {
        match merged.last_mut() {
            Some(last) if last.1 == w => last.0 += m,
            _ => merged.push((m, w)),
        }
    }
    StepFunction::from_lengths(&merged)
}

/// Measure of `{φ > λ}` for a simple function given as pieces.
pub fn distribution(pieces: &[(f64, f64)], level: f64) -> f64 {
    pieces.iter().filter(|p| p.1 > level).map(|p| p.0).sum()
}

/// Exact `∫ₐᵇ g` for a step function.
pub fn integrate_step(g: &StepFunction, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a > b {
        return Err(precondition(format!(
            "integration bounds must satisfy 0 <= a <= b <= 1 (got {a}, {b})"
        )));
    }
    Ok(g.cumulative(b) - g.cumulative(a))
}

/// Exact `∫ₐᵇ R` for a piecewise power function.
pub fn integrate_pp(r: &PiecewisePower, a: f64, b: f64) -> Result<f64> {
    if !(a >= 0.0) || a > b || b > r.u_max() + BREAK_TOL {
        return Err(precondition(format!(
            "integration bounds must satisfy 0 <= a <= b <= {} (got {a}, {b})",
            r.u_max()
        )));
    }
    Ok(r.segments.iter().map(|s| s.integral(a, b)).sum())
}

fn check_exponents(p: f64, q: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(precondition(format!("p must be > 1 (got {p})")));
    }
    if !(q >= 1.0) || !q.is_finite() {
        return Err(precondition(format!("q must be >= 1 (got {q})")));
    }
    Ok(())
}

/// `∫₀¹ (t^{1/p} g(t))^q dt/t` (the q-th power of the Lorentz quasinorm) for nonincreasing `g`.
pub fn lorentz_qnorm<G: PowerPieces + ?Sized>(g: &G, p: f64, q: f64) -> Result<f64> {
    check_exponents(p, q)?;
    let pieces = g.power_pieces();
    if !pieces_nonincreasing(&pieces) {
        return Err(precondition(
            "lorentz_qnorm expects a nonincreasing function; rearrange first",
        ));
    }
    let mut total = 0.0;
    for piece in &pieces {
        if piece.coeff == 0.0 {
            continue;
        }
        let gamma = q * piece.exponent + q / p - 1.0;
        let part = power_integral(piece.coeff.powf(q), gamma, piece.start, piece.end);
        if !part.is_finite() {
            return Err(Error::Domain(format!(
                "Lorentz integral diverges on ({}, {}] (combined exponent {gamma} <= -1)",
                piece.start, piece.end
            )));
        }
        total += part;
    }
    Ok(total)
}

/// `sup_t t^{1/p} g(t)` for nonincreasing `g`. May be `+∞`.
pub fn weak_qnorm<G: PowerPieces + ?Sized>(g: &G, p: f64) -> Result<f64> {
    check_exponents(p, 1.0)?;
    let pieces = g.power_pieces();
    if !pieces_nonincreasing(&pieces) {
        return Err(precondition(
            "weak_qnorm expects a nonincreasing function; rearrange first",
        ));
    }
    let mut sup: f64 = 0.0;
    for piece in &pieces {
        if piece.coeff == 0.0 {
            continue;
        }
        // t^{1/p}·c·t^e is monotone on each piece, so the sup sits at an endpoint.
        let beta = piece.exponent + 1.0 / p;
        let at_end = piece.coeff * piece.end.powf(beta);
        let at_start = if piece.start == 0.0 {
            if beta < 0.0 {
                f64::INFINITY
            } else if beta == 0.0 {
                piece.coeff
            } else {
                0.0
            }
        } else {
            piece.coeff * piece.start.powf(beta)
        };
        sup = sup.max(at_end).max(at_start);
    }
    Ok(sup)
}

/// Pointwise minimum on (0, 1] of the curves `u ↦ (F_j/u)^{1/p_j}`, given as `(F_j, p_j)`.
pub fn lower_envelope(curves: &[(f64, f64)]) -> Result<PiecewisePower> {
    if curves.is_empty() {
        return Err(precondition("lower envelope needs at least one curve"));
    }
    // In x = ln u each curve is the line y = ln c - a·x with c = F^{1/p}, a = 1/p.
    let mut lines: Vec<(f64, f64)> = Vec::with_capacity(curves.len());
    for &(big_f, p) in curves {
        if !(big_f > 0.0) || !big_f.is_finite() {
            return Err(precondition(format!("weak constraint F must be > 0 (got {big_f})")));
        }
        if !(p > 1.0) || !p.is_finite() {
            return Err(precondition(format!("weak constraint p must be > 1 (got {p})")));
        }
        lines.push((1.0 / p, big_f.ln() / p));
    }
    lines.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let mut distinct: Vec<(f64, f64)> = Vec::with_capacity(lines.len());
    for (slope, ln_c) in lines {
        match distinct.last_mut() {
            Some(last) if (slope - last.0).abs() < PARALLEL_TOL => {
                if ln_c < last.1 {
                    *last = (slope, ln_c);
                }
            }
            _ => distinct.push((slope, ln_c)),
        }
    }

    // Near u = 0 the flattest curve is lowest.
    let mut current = 0;
    let mut x_current = f64::NEG_INFINITY;
    let mut segments = Vec::new();
    loop {
        let (a_cur, c_cur) = distinct[current];
        let mut next: Option<(usize, f64)> = None;
        for (k, &(a_k, c_k)) in distinct.iter().enumerate().skip(current + 1) {
            let x_k = ((c_k - c_cur) / (a_k - a_cur)).max(x_current);
            match next {
                Some((_, best)) if x_k > best => {}
                _ => next = Some((k, x_k)),
            }
        }
        let start = if x_current == f64::NEG_INFINITY {
            0.0
        } else {
            x_current.exp()
        };
        let coeff = c_cur.exp();
        match next {
            Some((k, x_k)) if x_k < 0.0 => {
                let end = x_k.exp();
                if end > start {
                    segments.push(PowerPiece {
                        start,
                        end,
                        coeff,
                        exponent: -a_cur,
                    });
                }
                current = k;
                x_current = x_k;
            }
            _ => {
                segments.push(PowerPiece {
                    start,
                    end: 1.0,
                    coeff,
                    exponent: -a_cur,
                });
                break;
            }
        }
    }
    PiecewisePower::new(segments)
}
