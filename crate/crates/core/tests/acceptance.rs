//! Acceptance suite. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; exits nonzero if any criterion fails.

mod common;

use std::process::ExitCode;

use common::{piecewise_integral, rel_err};
use dyadic_bellman::bellman::{
    bellman_i5, bellman_thm2, bellman_thm3, bellman_thm4, g_alpha, thm3_branches, thm3_threshold, thm4_extremal,
    weak_envelope, Branch, WeakConstraint,
};
use dyadic_bellman::hardy::{delta_functional, FunctionalSpec, OuterFn};
use dyadic_bellman::measure_fn::{lorentz_qnorm, Density, PiecewisePower, StepFunction};
use dyadic_bellman::sampling::{random_leaf_vector, random_nonincreasing_step};
use dyadic_bellman::special::{omega_q, solve_sigma};
use dyadic_bellman::tree_sim::{lemma2_trials, verify_symmetrization, ExtremizerSpec};
use dyadic_bellman::verify::thm4_dominance;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn conj(p: f64) -> f64 {
    p / (p - 1.0)
}

const EXPONENTS: [f64; 4] = [1.25, 1.5, 2.0, 3.0];

/// Smallest admissible `F/f^q` for the Lorentz Bellman function.
fn thm4_floor(p: f64, q: f64) -> f64 {
    if p <= q {
        (conj(p) / conj(q)).powf(1.0 - q)
    } else {
        p / q
    }
}

/// `∫₀¹ (Hg)^q t^{q/p-1} dt` for a step function, from its pieces.
fn delta_oracle(g: &StepFunction, p: f64, q: f64) -> f64 {
    let pieces: Vec<(f64, f64, f64)> = g.pieces().collect();
    let hg = |t: f64| {
        let mut mass = 0.0;
        for &(a, b, v) in &pieces {
            if t <= a {
                break;
            }
            mass += v * (t.min(b) - a);
        }
        mass / t
    };
    let cuts: Vec<f64> = pieces.iter().map(|&(_, b, _)| b).collect();
    let s = q / p - 1.0;
    piecewise_integral(|t| hg(t).powf(q) * t.powf(s), s, &cuts, 1.0, 24)
}

fn criterion_1() -> Outcome {
    let pairs: [(f64, f64); 5] = [(1.0, 1.0 + 1e-9), (0.5, 1.01), (2.0, 2.0), (1.0, 5.0), (3.0, 50.0)];
    let mut worst_value = 0.0_f64;
    let mut worst_norm = 0.0_f64;
    let mut worst_oracle = 0.0_f64;
    let mut violations = 0;
    let mut max_excess = f64::NEG_INFINITY;
    let mut checked = 0;
    let mut errors = Vec::new();
    for (idx, (p, q)) in EXPONENTS
        .iter()
        .flat_map(|&p| EXPONENTS.iter().map(move |&q| (p, q)))
        .enumerate()
    {
        for &(mean, m) in &pairs {
            let norm = thm4_floor(p, q) * m * mean.powf(q);
            let run = || -> dyadic_bellman::Result<(f64, f64)> {
                let bound = bellman_thm4(p, q, norm, mean)?.value;
                let ext = thm4_extremal(p, q, norm, mean)?;
                let g = g_alpha(mean, ext.solution.alpha)?;
                let delta = delta_functional(&g, p, q)?;
                let f_g = lorentz_qnorm(&g, p, q)?;
                Ok((rel_err(delta, bound), rel_err(f_g, norm)))
            };
            match run() {
                Ok((dv, dn)) => {
                    worst_value = worst_value.max(dv);
                    worst_norm = worst_norm.max(dn);
                    checked += 1;
                }
                Err(e) => errors.push(format!("p={p} q={q} F={norm} f={mean}: {e}")),
            }
        }
        let mean = if idx % 2 == 0 { 1.0 } else { 2.5 };
        match thm4_dominance(p, q, mean, 1000, 2024 + idx as u64, 1e-8) {
            Ok(r) => {
                violations += r.violations;
                max_excess = max_excess.max(r.max_excess);
            }
            Err(e) => errors.push(format!("dominance p={p} q={q}: {e}")),
        }
        // Independent check of the functional on the first sampled functions.
        for i in 0..5u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(2024 + idx as u64);
            rng.set_stream(i);
            let g = random_nonincreasing_step(&mut rng, 12);
            let lib = delta_functional(&g, p, q).unwrap_or(f64::NAN);
            let oracle = delta_oracle(&g, p, q);
            let e = rel_err(lib, oracle);
            worst_oracle = if e.is_nan() { f64::INFINITY } else { worst_oracle.max(e) };
        }
    }
    let pass = errors.is_empty()
        && checked == 80
        && worst_value <= 1e-8
        && worst_norm <= 1e-8
        && violations == 0
        && worst_oracle <= 1e-8;
    let mut detail = format!(
        "{checked} squeeze points, max rel err {worst_value:.2e} (F of g_alpha {worst_norm:.2e}); \
         16000 random steps, {violations} violations, max excess {max_excess:.2e}; \
         functional vs test quadrature {worst_oracle:.2e}"
    );
    if !errors.is_empty() {
        detail.push_str(&format!("; errors: {}", errors.join(" | ")));
    }
    Outcome::new(pass, detail)
}

/// `∫₀¹ t^{r/q-1} Σ(t)^r dt` from the pointwise profile.
fn thm3_oracle(p: f64, q: f64, r: f64, norm: f64, mean: f64, floor: f64) -> f64 {
    let pc = conj(p);
    let sigma_t = |t: f64| (pc * (norm / t).powf(1.0 / p)).min(mean / t).max(floor);
    let s = r / q - 1.0;
    let cuts = [
        (mean / (pc * norm.powf(1.0 / p))).powf(pc),
        mean / floor,
        (pc / floor).powf(p) * norm,
    ];
    piecewise_integral(|t| t.powf(s) * sigma_t(t).powf(r), s - r / p, &cuts, 1.0, 32)
}

struct Thm3Point {
    p: f64,
    q: f64,
    r: f64,
    norm: f64,
    mean: f64,
    floor: f64,
}

fn thm3_grid() -> Vec<Thm3Point> {
    let mut pts = Vec::new();
    for p in [2.0, 3.0, 4.0] {
        for q in [1.25, 1.5, 0.5 * (p + 1.0)] {
            for r in [0.8, q, 2.0] {
                for norm in [1.0, 2.5] {
                    for mean in [0.4, 1.0] {
                        let star = thm3_threshold(p, norm, mean);
                        for m in [0.2, 0.9, 1.1, 3.0] {
                            pts.push(Thm3Point {
                                p,
                                q,
                                r,
                                norm,
                                mean,
                                floor: (star * m).max(mean),
                            });
                        }
                    }
                }
            }
        }
    }
    pts
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0_f64;
    let mut worst_cont = 0.0_f64;
    let (mut upper, mut lower) = (0, 0);
    let mut errors = Vec::new();
    for pt in thm3_grid() {
        match bellman_thm3(pt.p, pt.q, pt.r, pt.norm, pt.mean, pt.floor) {
            Ok(res) => {
                match res.branch {
                    Branch::Thm3Upper => upper += 1,
                    _ => lower += 1,
                }
                let oracle = thm3_oracle(pt.p, pt.q, pt.r, pt.norm, pt.mean, pt.floor);
                worst = worst.max(rel_err(res.value, oracle));
                let star = thm3_threshold(pt.p, pt.norm, pt.mean);
                let (u, l) = thm3_branches(pt.p, pt.q, pt.r, pt.norm, pt.mean, star);
                worst_cont = worst_cont.max(rel_err(u, l));
            }
            Err(e) => errors.push(e.to_string()),
        }
    }
    let hand = bellman_thm3(2.0, 4.0 / 3.0, 4.0 / 3.0, 1.0, 1.0, 8.0)
        .map(|r| r.value)
        .unwrap_or(f64::NAN);
    let hand_oracle = thm3_oracle(2.0, 4.0 / 3.0, 4.0 / 3.0, 1.0, 1.0, 8.0);
    let hand_ok = rel_err(hand, 18.0) <= 1e-8 && rel_err(hand_oracle, 18.0) <= 1e-8;
    let pass = errors.is_empty() && worst <= 1e-8 && worst_cont <= 1e-10 && upper > 0 && lower > 0 && hand_ok;
    Outcome::new(
        pass,
        format!(
            "{} points ({upper} upper, {lower} lower), max rel err {worst:.2e}, continuity at L* {worst_cont:.2e}, \
             hand value {hand} (test quadrature {hand_oracle}){}",
            upper + lower,
            if errors.is_empty() {
                String::new()
            } else {
                format!("; errors: {}", errors.join(" | "))
            }
        ),
    )
}

/// Neumaier-compensated sum, so the reference is accurate well below the tolerance.
fn exact_sum(values: &[f64]) -> f64 {
    let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
    for &v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() {
            (sum - t) + v
        } else {
            (v - t) + sum
        };
        sum = t;
    }
    sum + comp
}

/// Maximal function on the leaves by direct averaging over all ancestors.
fn brute_maximal(values: &[f64], depth: u32) -> Vec<f64> {
    let n = values.len();
    let mut best = vec![f64::NEG_INFINITY; n];
    for level in 0..=depth {
        let width = n >> level;
        for block in values.chunks(width).enumerate() {
            let avg = exact_sum(block.1) / width as f64;
            for m in &mut best[block.0 * width..(block.0 + 1) * width] {
                *m = m.max(avg);
            }
        }
    }
    best
}

fn criterion_3() -> Outcome {
    const DEPTH: u32 = 12;
    const TRIALS: usize = 10_000;
    const SEED: u64 = 12;
    let lib = lemma2_trials(DEPTH, TRIALS, SEED, 1e-12);
    let oracle: Vec<(usize, f64)> = (0..TRIALS)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            rng.set_stream(i as u64);
            let phi = random_leaf_vector(&mut rng, DEPTH);
            let mut m = brute_maximal(phi.values(), DEPTH);
            let mut sorted = phi.values().to_vec();
            m.sort_by(|a, b| b.total_cmp(a));
            sorted.sort_by(|a, b| b.total_cmp(a));
            let (mut acc, mut comp) = (0.0_f64, 0.0_f64);
            let mut bad = 0;
            let mut slack = f64::INFINITY;
            for (j, (&mj, &vj)) in m.iter().zip(&sorted).enumerate() {
                let t = acc + vj;
                comp += if acc.abs() >= vj.abs() {
                    (acc - t) + vj
                } else {
                    (vj - t) + acc
                };
                acc = t;
                let s = (acc + comp) / (j + 1) as f64 - mj;
                slack = slack.min(s);
                if s < -1e-12 {
                    bad += 1;
                }
            }
            (bad, slack)
        })
        .collect();
    let oracle_violations: usize = oracle.iter().map(|o| o.0).sum();
    let oracle_min = oracle.iter().map(|o| o.1).fold(f64::INFINITY, f64::min);
    match lib {
        Ok(r) => Outcome::new(
            r.violations == 0 && oracle_violations == 0,
            format!(
                "{TRIALS} leaf vectors at depth {DEPTH}: {} violations (min slack {:.2e}); \
                 brute-force maximal: {oracle_violations} violations (min slack {oracle_min:.2e})",
                r.violations, r.min_slack
            ),
        ),
        Err(e) => Outcome::new(false, e.to_string()),
    }
}

struct SymCase {
    g: Density,
    fspec: FunctionalSpec,
    /// Test-side `(1/t)∫₀ᵗ g`.
    hg: Box<dyn Fn(f64) -> f64>,
    /// Behaviour of the weighted integrand near 0 is `t^lead`.
    lead: f64,
    cuts: Vec<f64>,
}

fn step_case(lengths: &[(f64, f64)], outer: OuterFn, s: f64, k: f64) -> SymCase {
    let g = StepFunction::from_lengths(lengths).unwrap();
    let mut pieces = Vec::new();
    let mut a = 0.0;
    for &(len, v) in lengths {
        pieces.push((a, a + len, v));
        a += len;
    }
    let cuts = pieces.iter().map(|p| p.1).collect();
    let hg = move |t: f64| {
        let mut mass = 0.0;
        for &(a, b, v) in &pieces {
            if t <= a {
                break;
            }
            mass += v * (t.min(b) - a);
        }
        mass / t
    };
    SymCase {
        g: g.into(),
        fspec: FunctionalSpec::new(outer, s, k).unwrap(),
        hg: Box::new(hg),
        lead: s,
        cuts,
    }
}

fn power_case(c: f64, a: f64, outer: OuterFn, s: f64, k: f64) -> SymCase {
    SymCase {
        g: PiecewisePower::single(c, -a).unwrap().into(),
        fspec: FunctionalSpec::new(outer, s, k).unwrap(),
        hg: Box::new(move |t: f64| c * t.powf(-a) / (1.0 - a)),
        lead: s - outer.exponent() * a,
        cuts: Vec::new(),
    }
}

/// `∫₀ᵏ G(Hg(t)) t^s dt`, splitting where `Hg` crosses the floor of `G`.
fn functional_oracle(case: &SymCase) -> f64 {
    let spec = case.fspec;
    let mut cuts = case.cuts.clone();
    if let OuterFn::MaxPow { floor, .. } = spec.outer {
        let (mut lo, mut hi) = (1e-300_f64, 1.0_f64);
        if (case.hg)(hi) < floor && (case.hg)(lo) > floor {
            for _ in 0..200 {
                let mid = (lo * hi).sqrt();
                if (case.hg)(mid) > floor {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            cuts.push(hi);
        }
    }
    piecewise_integral(
        |t| spec.outer.apply((case.hg)(t)) * t.powf(spec.weight_exponent),
        case.lead,
        &cuts,
        spec.k,
        32,
    )
}

fn criterion_4() -> Outcome {
    let cases = [
        step_case(&[(0.4, 2.0), (0.6, 1.0)], OuterFn::Pow { r: 2.0 }, -0.5, 0.8),
        step_case(
            &[(0.1, 5.0), (0.3, 2.0), (0.6, 0.5)],
            OuterFn::MaxPow { r: 1.5, floor: 1.5 },
            0.0,
            1.0,
        ),
        power_case(1.0, 0.5, OuterFn::Pow { r: 1.2 }, 0.3, 0.5),
        power_case(2.0, 0.3, OuterFn::MaxPow { r: 2.0, floor: 2.5 }, -0.2, 1.0),
        step_case(&[(1.0, 1.0)], OuterFn::Pow { r: 3.0 }, 1.0, 0.25),
    ];
    let ns = [4u32, 16, 64, 256];
    let mut pass = true;
    let mut lines = Vec::new();
    for (i, case) in cases.iter().enumerate() {
        let t_oracle = functional_oracle(case);
        let mut gaps = Vec::new();
        let mut bound = true;
        let mut t_err = 0.0_f64;
        for &n in &ns {
            let report = ExtremizerSpec::new(case.g.clone(), case.fspec.k, n)
                .and_then(|spec| verify_symmetrization(&spec, &case.fspec));
            match report {
                Ok(r) => {
                    t_err = t_err.max(rel_err(r.t, t_oracle));
                    bound &= r.s_n <= t_oracle * (1.0 + 1e-10);
                    gaps.push(t_oracle - r.s_n);
                }
                Err(e) => {
                    pass = false;
                    lines.push(format!("case {}: {e}", i + 1));
                }
            }
        }
        if gaps.len() != ns.len() {
            continue;
        }
        let monotone = gaps.windows(2).all(|w| w[1] <= w[0] + 1e-12 * t_oracle);
        let last = gaps[gaps.len() - 1] / t_oracle;
        let ok = bound && monotone && last <= 0.02 && t_err <= 1e-8;
        pass &= ok;
        lines.push(format!(
            "case {}: T {t_oracle:.6} (lib err {t_err:.1e}), gap(256)/T {last:.2e}{}{}",
            i + 1,
            if monotone { "" } else { ", gap not monotone" },
            if bound { "" } else { ", S_N > T" }
        ));
    }
    Outcome::new(pass, lines.join("; "))
}

fn criterion_5() -> Outcome {
    let mut worst = 0.0_f64;
    let mut worst_sqrt = 0.0_f64;
    let mut errors = 0;
    for q in [1.1, 1.5, 2.0, 3.0, 10.0] {
        for i in 0..100 {
            let y = i as f64 / 99.0;
            match omega_q(q, y) {
                Ok(z) => {
                    let h = z.powf(q - 1.0) * (q - (q - 1.0) * z);
                    worst = worst.max((h - y).abs());
                    if q == 2.0 {
                        worst_sqrt = worst_sqrt.max((z - (1.0 + (1.0 - y).sqrt())).abs());
                    }
                }
                Err(_) => errors += 1,
            }
        }
    }
    Outcome::new(
        errors == 0 && worst <= 1e-12 && worst_sqrt <= 1e-12,
        format!("500 points: max |H(omega(y)) - y| {worst:.2e}, omega_2 vs 1+sqrt(1-y) {worst_sqrt:.2e}"),
    )
}

fn criterion_6() -> Outcome {
    let mut worst_i5 = 0.0_f64;
    let mut q1_exact = true;
    let mut errors = Vec::new();
    let mut count = 0;
    for p in [1.25, 1.5, 2.0, 3.0, 5.0] {
        for mean in [0.5_f64, 1.0, 2.0] {
            for m in [1.0001, 1.5, 4.0, 30.0] {
                let norm = mean.powf(p) * m;
                match (bellman_thm4(p, p, norm, mean), bellman_i5(p, norm, mean, mean)) {
                    (Ok(a), Ok(b)) => {
                        worst_i5 = worst_i5.max(rel_err(a.value, b.value));
                        count += 1;
                    }
                    (a, b) => errors.push(format!("p={p} F={norm} f={mean}: {:?} {:?}", a.err(), b.err())),
                }
                let big = mean * m;
                match bellman_thm4(p, 1.0, big, mean) {
                    Ok(r) => q1_exact &= r.value == p / (p - 1.0) * (big - mean),
                    Err(e) => errors.push(e.to_string()),
                }
            }
        }
    }
    let mut worst_thm2 = 0.0_f64;
    let mut thm2_count = 0;
    for pt in thm3_grid() {
        let spec = FunctionalSpec::new(
            OuterFn::MaxPow {
                r: pt.r,
                floor: pt.floor,
            },
            pt.r / pt.q - 1.0,
            1.0,
        );
        let weak = [WeakConstraint { p: pt.p, norm: pt.norm }];
        let thm2 = spec.and_then(|s| bellman_thm2(&weak, pt.mean, &s));
        match (thm2, bellman_thm3(pt.p, pt.q, pt.r, pt.norm, pt.mean, pt.floor)) {
            (Ok(a), Ok(b)) => {
                worst_thm2 = worst_thm2.max(rel_err(a.value, b.value));
                thm2_count += 1;
            }
            (a, b) => errors.push(format!("thm2/thm3: {:?} {:?}", a.err(), b.err())),
        }
    }
    Outcome::new(
        errors.is_empty() && worst_i5 <= 1e-12 && q1_exact && worst_thm2 <= 1e-8,
        format!(
            "thm4(q=p) vs i5 on {count} points {worst_i5:.2e}; q=1 exact: {q1_exact}; \
             thm2 vs thm3 on {thm2_count} points {worst_thm2:.2e}{}",
            if errors.is_empty() {
                String::new()
            } else {
                format!("; errors: {}", errors.join(" | "))
            }
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut worst3 = 0.0_f64;
    let mut worst4 = 0.0_f64;
    let mut errors = Vec::new();
    for c in [0.5_f64, 2.0, 10.0] {
        for pt in thm3_grid().iter().step_by(7) {
            let base = bellman_thm3(pt.p, pt.q, pt.r, pt.norm, pt.mean, pt.floor);
            let scaled = bellman_thm3(pt.p, pt.q, pt.r, c.powf(pt.p) * pt.norm, c * pt.mean, c * pt.floor);
            match (base, scaled) {
                (Ok(a), Ok(b)) => worst3 = worst3.max(rel_err(b.value, c.powf(pt.r) * a.value)),
                (a, b) => errors.push(format!("thm3: {:?} {:?}", a.err(), b.err())),
            }
        }
        for &p in &EXPONENTS {
            for &q in &EXPONENTS {
                for m in [1.01, 3.0, 40.0] {
                    let (norm, mean) = (thm4_floor(p, q) * m, 1.0);
                    let base = bellman_thm4(p, q, norm, mean);
                    let scaled = bellman_thm4(p, q, c.powf(q) * norm, c * mean);
                    match (base, scaled) {
                        (Ok(a), Ok(b)) => worst4 = worst4.max(rel_err(b.value, c.powf(q) * a.value)),
                        (a, b) => errors.push(format!("thm4: {:?} {:?}", a.err(), b.err())),
                    }
                }
            }
        }
    }
    Outcome::new(
        errors.is_empty() && worst3 <= 1e-10 && worst4 <= 1e-10,
        format!("thm3 scaling {worst3:.2e}, thm4 scaling {worst4:.2e}"),
    )
}

/// `∫₀^σ min_j (F_j/u)^{1/p_j} du` from the pairwise crossings.
fn envelope_mass(weak: &[WeakConstraint], sigma: f64) -> f64 {
    let curve = |w: &WeakConstraint, u: f64| (w.norm / u).powf(1.0 / w.p);
    let mut pts = vec![0.0, sigma];
    for (i, a) in weak.iter().enumerate() {
        for b in &weak[i + 1..] {
            let x = (b.norm.ln() / b.p - a.norm.ln() / a.p) / (1.0 / b.p - 1.0 / a.p);
            let u = x.exp();
            if u > 0.0 && u < sigma {
                pts.push(u);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut mass = 0.0;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let probe = if a == 0.0 { 0.5 * b } else { (a * b).sqrt() };
        let active = weak
            .iter()
            .min_by(|x, y| curve(x, probe).total_cmp(&curve(y, probe)))
            .unwrap();
        let k = 1.0 - 1.0 / active.p;
        mass += active.norm.powf(1.0 / active.p) * (b.powf(k) - a.powf(k)) / k;
    }
    mass
}

fn criterion_8() -> Outcome {
    let mut worst_single = 0.0_f64;
    let mut worst_multi = 0.0_f64;
    let mut errors = Vec::new();
    for p in [1.25, 1.5, 2.0, 3.0, 6.0] {
        for norm in [0.3_f64, 1.0, 4.0] {
            let cap = conj(p) * norm.powf(1.0 / p);
            for frac in [0.01, 0.3, 0.7, 0.99] {
                let mean = frac * cap;
                let weak = [WeakConstraint { p, norm }];
                match weak_envelope(&weak).and_then(|r| solve_sigma(&r, mean)) {
                    Ok(sigma) => {
                        let expected = (mean / (conj(p) * norm.powf(1.0 / p))).powf(conj(p));
                        worst_single = worst_single.max(rel_err(sigma, expected));
                    }
                    Err(e) => errors.push(e.to_string()),
                }
            }
        }
    }
    let sets: Vec<Vec<WeakConstraint>> = vec![
        vec![
            WeakConstraint { p: 2.0, norm: 1.0 },
            WeakConstraint { p: 3.0, norm: 0.5 },
        ],
        vec![
            WeakConstraint { p: 1.5, norm: 2.0 },
            WeakConstraint { p: 4.0, norm: 0.3 },
            WeakConstraint { p: 2.5, norm: 1.0 },
        ],
        vec![
            WeakConstraint { p: 1.2, norm: 0.05 },
            WeakConstraint { p: 2.0, norm: 0.5 },
            WeakConstraint { p: 8.0, norm: 3.0 },
        ],
    ];
    for weak in &sets {
        let total = envelope_mass(weak, 1.0);
        for frac in [0.05, 0.5, 0.95] {
            let mean = frac * total;
            match weak_envelope(weak).and_then(|r| solve_sigma(&r, mean)) {
                Ok(sigma) => worst_multi = worst_multi.max(rel_err(envelope_mass(weak, sigma), mean)),
                Err(e) => errors.push(e.to_string()),
            }
        }
    }
    Outcome::new(
        errors.is_empty() && worst_single <= 1e-13 && worst_multi <= 1e-13,
        format!("single-constraint sigma {worst_single:.2e}; multi-constraint mass {worst_multi:.2e}"),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("Lorentz Bellman sharpness squeeze", criterion_1),
        ("weak-to-Lorentz closed form vs quadrature", criterion_2),
        ("rearranged maximal function bound", criterion_3),
        ("symmetrization convergence", criterion_4),
        ("omega_q round trip", criterion_5),
        ("cross-form consistency", criterion_6),
        ("homogeneity", criterion_7),
        ("sigma correctness", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let out = run();
        if !out.pass {
            failed += 1;
        }
        println!(
            "criterion {} {:<44} {}  [{:.1}s] {}",
            i + 1,
            name,
            if out.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            out.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
