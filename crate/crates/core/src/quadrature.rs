//! Globally adaptive 7/15-point Gauss–Kronrod quadrature.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections applied to any one interval.
    pub max_depth: u32,
    pub max_intervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_depth: 40,
            max_intervals: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Interval {}

impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = fc * WG[3];
    let mut kronrod = fc * WGK[7];
    let mut abs_sum = kronrod.abs();
    let mut values = [(0.0, 0.0); 7];
    for (j, node) in XGK.iter().take(7).enumerate() {
        let dx = half * node;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        values[j] = (f1, f2);
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for (j, (f1, f2)) in values.iter().enumerate() {
        asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Integrates `f` over `[a, b]`, subdividing the worst interval until the summed
/// error estimate meets `max(abs_tol, rel_tol·|I|)`.
///
/// Returns [`Error::Numerical`] when an interval would exceed `max_depth`
/// bisections, the interval budget runs out, or the integrand is not finite.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadratureOptions) -> Result<QuadratureResult> {
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            intervals: 0,
        });
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Numerical(format!("bad quadrature interval [{a}, {b}]")));
    }
    let (value, error) = kronrod15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Interval {
        a,
        b,
        value,
        error,
        depth: 0,
    });
    let mut total = value;
    let mut total_err = error;
    loop {
        if !total.is_finite() {
            return Err(Error::Numerical(format!("non-finite integrand on [{a}, {b}]")));
        }
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Numerical(format!(
                "quadrature on [{a}, {b}] exhausted {} intervals (error {total_err:e}, target {tol:e})",
                opts.max_intervals
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        if worst.depth >= opts.max_depth {
            return Err(Error::Numerical(format!(
                "quadrature on [{a}, {b}] hit depth {} near [{}, {}] (error {total_err:e}, target {tol:e})",
                opts.max_depth, worst.a, worst.b
            )));
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = kronrod15(&f, worst.a, mid);
        let (v2, e2) = kronrod15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Interval {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
            depth: worst.depth + 1,
        });
        heap.push(Interval {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
            depth: worst.depth + 1,
        });
    }
    // Re-sum to shed the drift of the running update.
    let value: f64 = heap.iter().map(|i| i.value).sum();
    let error_estimate: f64 = heap.iter().map(|i| i.error).sum();
    Ok(QuadratureResult {
        value,
        error_estimate,
        intervals: heap.len(),
    })
}

/// `∫ₐᵇ φ(t) dt` after the substitution `t = u^{1/(γ+1)}`, which turns a factor
/// `t^γ` into the constant `1/(γ+1)`. `reduced(t)` must return `φ(t)·t^{-γ}`.
pub fn integrate_power_substituted<F: Fn(f64) -> f64>(
    reduced: F,
    gamma: f64,
    a: f64,
    b: f64,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult> {
    let k = gamma + 1.0;
    if !(k > 0.0) {
        return Err(Error::Numerical(format!(
            "substitution exponent {gamma} must exceed -1"
        )));
    }
    let ua = a.powf(k);
    let ub = b.powf(k);
    let inv = 1.0 / k;
    let res = integrate(|u: f64| reduced(u.powf(inv)) * inv, ua, ub, opts)?;
    Ok(res)
}

/// `∫ₐᵇ f` for `0 < a < b`, split into geometric panels `[a·ρ^i, a·ρ^{i+1}]`.
/// Integrands with power-law behaviour near `a` then look alike on every
/// panel, however many decades `[a, b]` spans.
pub fn integrate_geometric<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    ratio: f64,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult> {
    if !(a > 0.0) || !(ratio > 1.0) {
        return Err(Error::Numerical(format!(
            "geometric panels need a > 0 and ratio > 1 (got a = {a}, ratio = {ratio})"
        )));
    }
    let mut total = QuadratureResult {
        value: 0.0,
        error_estimate: 0.0,
        intervals: 0,
    };
    let mut lo = a;
    while lo < b {
        let hi = if lo * ratio >= b / ratio.sqrt() { b } else { lo * ratio };
        let r = integrate(&f, lo, hi, opts)?;
        total.value += r.value;
        total.error_estimate += r.error_estimate;
        total.intervals += r.intervals;
        lo = hi;
    }
    Ok(total)
}
