//! Test-side numerics, kept separate from the library's adaptive quadrature so
//! that reference values do not share code with the values they check.

#![allow(dead_code)]

use std::sync::OnceLock;

const GL_POINTS: usize = 20;

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton on `P_n`.
pub fn gauss_legendre() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_POINTS;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

/// Composite Gauss–Legendre on `[a, b]` with equal panels.
pub fn composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let (nodes, weights) = gauss_legendre();
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for j in 0..panels {
        let mid = a + (j as f64 + 0.5) * h;
        let mut part = 0.0;
        for (x, w) in nodes.iter().zip(weights) {
            part += w * f(mid + 0.5 * h * x);
        }
        total += 0.5 * h * part;
    }
    total
}

/// `∫ₐᵇ f(t) dt` for `0 < a < b`, through `t = e^x`.
pub fn log_integral<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    composite(|x: f64| f(x.exp()) * x.exp(), a.ln(), b.ln(), panels)
}

/// `∫₀ᵇ t^γ φ(t) dt` through `u = t^{γ+1}`; `phi` must be smooth up to 0.
pub fn singular_integral<F: Fn(f64) -> f64>(phi: F, gamma: f64, b: f64, panels: usize) -> f64 {
    let k = gamma + 1.0;
    assert!(k > 0.0);
    composite(|u: f64| phi(u.powf(1.0 / k)) / k, 0.0, b.powf(k), panels)
}

/// `∫₀ᵏ f` split at `cuts`, with `f(t) ~ t^γ φ(t)` on the first piece.
pub fn piecewise_integral<F: Fn(f64) -> f64>(f: F, gamma: f64, cuts: &[f64], k: f64, panels: usize) -> f64 {
    let mut pts: Vec<f64> = cuts.iter().copied().filter(|&c| c > 0.0 && c < k).collect();
    pts.push(k);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut total = singular_integral(
        |t| if t == 0.0 { 0.0 } else { f(t) * t.powf(-gamma) },
        gamma,
        pts[0],
        panels,
    );
    for w in pts.windows(2) {
        total += log_integral(&f, w[0], w[1], panels);
    }
    total
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}
