//! Maximal operators on the dyadic tree of [0, 1] and the chain extremizers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{precondition, Result};
use crate::hardy::{self, FunctionalSpec};
use crate::measure_fn::{rearrange, Density, StepFunction};
use crate::sampling;

pub const MAX_DEPTH: u32 = 24;

/// Levels at least this wide are processed in parallel.
const PAR_LEVEL: usize = 1 << 14;

/// Smallest annulus measure kept by default in the chain construction.
pub const DEFAULT_RANK_FLOOR: f64 = 1e-12;

/// Values on the `2^D` dyadic leaves `(i 2^{-D}, (i+1) 2^{-D}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafVector {
    depth: u32,
    values: Vec<f64>,
}

impl LeafVector {
    pub fn new(depth: u32, values: Vec<f64>) -> Result<Self> {
        if depth == 0 || depth > MAX_DEPTH {
            return Err(precondition(format!("depth must lie in 1..={MAX_DEPTH} (got {depth})")));
        }
        if values.len() != 1usize << depth {
            return Err(precondition(format!(
                "depth {depth} needs {} leaves (got {})",
                1usize << depth,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(precondition(format!("leaf values must be finite and >= 0 (got {v})")));
        }
        Ok(LeafVector { depth, values })
    }

    pub fn constant(depth: u32, value: f64) -> Result<Self> {
        Self::new(depth, vec![value; 1usize.checked_shl(depth).unwrap_or(0)])
    }

    pub fn depth(&self) -> u32 {
        self.depth
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

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// The leaf values as a step function on (0, 1].
    pub fn to_step(&self) -> StepFunction {
        let n = self.values.len();
        let breaks = (0..=n).map(|i| i as f64 / n as f64).collect();
        StepFunction::new(breaks, self.values.clone()).expect("leaf vector is a valid step function")
    }

    /// Decreasing rearrangement over equal-measure leaves.
    pub fn rearranged(&self) -> StepFunction {
        let w = 1.0 / self.values.len() as f64;
        let pieces: Vec<(f64, f64)> = self.values.iter().map(|&v| (w, v)).collect();
        rearrange(&pieces).expect("leaf vector pieces")
    }
}

fn halve_level(children: &[f64]) -> Vec<f64> {
    if children.len() / 2 >= PAR_LEVEL {
        children.par_chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
    } else {
        children.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
    }
}

fn push_down(parent_best: &[f64], level: &mut [f64]) {
    if level.len() >= PAR_LEVEL {
        level
            .par_iter_mut()
            .enumerate()
            .for_each(|(j, v)| *v = v.max(parent_best[j / 2]));
    } else {
        for (j, v) in level.iter_mut().enumerate() {
            *v = v.max(parent_best[j / 2]);
        }
    }
}

/// `Mφ` on the depth-`D` dyadic tree: each leaf gets the largest average over
/// its ancestors, itself and the root included.
pub fn dyadic_maximal(phi: &LeafVector) -> LeafVector {
    let depth = phi.depth as usize;
    // levels[l] holds the 2^l averages at level l, for l < depth
    let mut levels: Vec<Vec<f64>> = Vec::with_capacity(depth);
    let mut current = halve_level(&phi.values);
    for _ in 0..depth {
        let next = if current.len() > 1 {
            Some(halve_level(&current))
        } else {
            None
        };
        levels.push(current);
        match next {
            Some(n) => current = n,
            None => break,
        }
    }
    levels.reverse();
    for l in 1..levels.len() {
        let (upper, lower) = levels.split_at_mut(l);
        push_down(&upper[l - 1], &mut lower[0]);
    }
    let mut out = phi.values.clone();
    push_down(&levels[depth - 1], &mut out);
    LeafVector {
        depth: phi.depth,
        values: out,
    }
}

/// `(Mφ)*` as a step function.
pub fn maximal_rearranged(phi: &LeafVector) -> StepFunction {
    dyadic_maximal(phi).rearranged()
}

/// Worst case of `(1/t)∫₀ᵗ φ* - (Mφ)*(t)` over the leaf grid `t = i 2^{-D}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma2Slack {
    pub min_slack: f64,
    pub at: f64,
}

/// Compares `(Mφ)*` against the averages of `φ*` at every leaf endpoint. Since
/// `(Mφ)*` only jumps there and the averages decrease, these are the binding points.
pub fn lemma2_slack(phi: &LeafVector) -> Lemma2Slack {
    let n = phi.len();
    let mut sorted = phi.values.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut maximal = dyadic_maximal(phi).values;
    maximal.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut best = Lemma2Slack {
        min_slack: f64::INFINITY,
        at: 1.0,
    };
    for i in 0..n {
        acc += sorted[i];
        let slack = acc / (i + 1) as f64 - maximal[i];
        if slack < best.min_slack {
            best = Lemma2Slack {
                min_slack: slack,
                at: (i + 1) as f64 / n as f64,
            };
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma2Report {
    pub depth: u32,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub violations: usize,
    /// Smallest slack seen over all trials; negative beyond `-tolerance` is a violation.
    pub min_slack: f64,
    pub worst_trial: usize,
}

/// Runs `trials` seeded random leaf vectors through [`lemma2_slack`]. Trial `i`
/// draws from its own stream so the outcome does not depend on thread scheduling.
pub fn lemma2_trials(depth: u32, trials: usize, seed: u64, tolerance: f64) -> Result<Lemma2Report> {
    if depth == 0 || depth > MAX_DEPTH {
        return Err(precondition(format!("depth must lie in 1..={MAX_DEPTH} (got {depth})")));
    }
    let slacks: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let phi = sampling::random_leaf_vector(&mut rng, depth);
            lemma2_slack(&phi).min_slack
        })
        .collect();
    let mut report = Lemma2Report {
        depth,
        trials,
        seed,
        tolerance,
        violations: 0,
        min_slack: f64::INFINITY,
        worst_trial: 0,
    };
    for (i, &s) in slacks.iter().enumerate() {
        if s < -tolerance {
            report.violations += 1;
        }
        if s < report.min_slack {
            report.min_slack = s;
            report.worst_trial = i;
        }
    }
    Ok(report)
}

/// Chain construction parameters: `ψ* = g`, measure parameter `k`, index `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremizerSpec {
    pub g: Density,
    pub k: f64,
    pub n: u32,
    /// Annuli kept before the tail; `None` keeps them down to measure 1e-12.
    pub ranks: Option<usize>,
}

impl ExtremizerSpec {
    pub fn new(g: impl Into<Density>, k: f64, n: u32) -> Result<Self> {
        let spec = ExtremizerSpec {
            g: g.into(),
            k,
            n,
            ranks: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k <= 1.0) {
            return Err(precondition(format!("k must lie in (0, 1] (got {})", self.k)));
        }
        if self.n == 0 {
            return Err(precondition("N must be at least 1"));
        }
        if !self.g.is_nonincreasing() {
            return Err(precondition("g must be nonincreasing"));
        }
        Ok(())
    }

    /// `1 - α_N`: `(1-k)^{1/N}`, with base ½ in place of `1 - k` when `k = 1`.
    pub fn ratio(&self) -> f64 {
        let base = if self.k < 1.0 { 1.0 - self.k } else { 0.5 };
        base.powf(1.0 / self.n as f64)
    }

    pub fn alpha(&self) -> f64 {
        let base: f64 = if self.k < 1.0 { 1.0 - self.k } else { 0.5 };
        -(base.ln() / self.n as f64).exp_m1()
    }

    pub fn rank_count(&self) -> usize {
        self.ranks.unwrap_or_else(|| {
            let m = (DEFAULT_RANK_FLOOR.ln() / self.ratio().ln()).ceil();
            (m.max(1.0)) as usize
        })
    }
}

/// The chain realization of the construction: `ψ` (here `g` itself) and the
/// certified lower bound for `(Mψ)*`, equal to `(1/s)∫₀ˢ g` with `s = (1-α)^m`
/// on the annulus `((1-α)^{m+1}, (1-α)^m]`.
pub fn extremizer_profile(spec: &ExtremizerSpec) -> Result<(Density, StepFunction)> {
    spec.validate()?;
    let ratio = spec.ratio();
    let ranks = spec.rank_count();
    let mut breaks = Vec::with_capacity(ranks + 2);
    let mut values = Vec::with_capacity(ranks + 1);
    // built from the right end; reversed below
    let mut s = 1.0_f64;
    breaks.push(1.0);
    for _ in 0..ranks {
        values.push(spec.g.cumulative(s) / s);
        s *= ratio;
        breaks.push(s);
    }
    values.push(spec.g.cumulative(s) / s);
    breaks.push(0.0);
    breaks.reverse();
    values.reverse();
    let lower = StepFunction::new(breaks, values)?;
    Ok((spec.g.clone(), lower))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetrizationReport {
    pub n: u32,
    pub alpha: f64,
    pub ranks: usize,
    /// `∫₀ᵏ G(lower(t)) h(t) dt`.
    pub s_n: f64,
    /// `∫₀ᵏ G(Hg(t)) h(t) dt`.
    pub t: f64,
    pub gap: f64,
    pub bound_holds: bool,
}

pub const SYMMETRIZATION_TOL: f64 = 1e-10;

/// Lower sum from the chain profile against the Hardy functional of `g`.
pub fn verify_symmetrization(spec: &ExtremizerSpec, fspec: &FunctionalSpec) -> Result<SymmetrizationReport> {
    fspec.validate()?;
    if (fspec.k - spec.k).abs() > 1e-15 {
        return Err(precondition(format!(
            "functional k = {} differs from construction k = {}",
            fspec.k, spec.k
        )));
    }
    let (_, lower) = extremizer_profile(spec)?;
    let mut s_n = 0.0;
    for (a, b, v) in lower.pieces() {
        if a >= fspec.k {
            break;
        }
        s_n += fspec.outer.apply(v) * fspec.weight_integral(a, b.min(fspec.k));
    }
    let t = hardy::functional(&spec.g, fspec, None)?;
    let gap = t - s_n;
    Ok(SymmetrizationReport {
        n: spec.n,
        alpha: spec.alpha(),
        ranks: spec.rank_count(),
        s_n,
        t,
        gap,
        bound_holds: s_n <= t + SYMMETRIZATION_TOL * t.abs().max(1.0),
    })
}

/// Per-leaf averages of `g` at depth `D`: the dyadic chain `(0, 2^{-m}]` with
/// annuli `(2^{-m-1}, 2^{-m}]` carrying `g` itself.
pub fn dyadic_extremizer(g: &Density, depth: u32) -> Result<LeafVector> {
    if depth == 0 || depth > MAX_DEPTH {
        return Err(precondition(format!("depth must lie in 1..={MAX_DEPTH} (got {depth})")));
    }
    let n = 1usize << depth;
    let h = 1.0 / n as f64;
    let mut prev = 0.0;
    let mut values = Vec::with_capacity(n);
    for i in 1..=n {
        let c = g.cumulative(i as f64 * h);
        values.push(((c - prev) * n as f64).max(0.0));
        prev = c;
    }
    LeafVector::new(depth, values)
}
