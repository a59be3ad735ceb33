//! Numerical checks pairing each closed form with an independent computation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bellman::{self, thm3_branches, thm3_by_quadrature, thm3_threshold};
use crate::error::Result;
use crate::hardy::{delta_functional, FunctionalSpec};
use crate::measure_fn::{lorentz_qnorm, Density};
use crate::sampling;
use crate::special::conjugate;
use crate::tree_sim::{verify_symmetrization, ExtremizerSpec, SymmetrizationReport};

pub const ORACLE_TOL: f64 = 1e-8;
pub const CONTINUITY_TOL: f64 = 1e-10;

pub fn rel_err(value: f64, reference: f64) -> f64 {
    if value == reference {
        return 0.0;
    }
    (value - reference).abs() / reference.abs().max(f64::MIN_POSITIVE)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thm3Check {
    pub closed_form: f64,
    pub quadrature: f64,
    pub rel_err: f64,
    pub threshold: f64,
    pub upper_at_threshold: f64,
    pub lower_at_threshold: f64,
    pub continuity_rel_err: f64,
    pub pass: bool,
}

/// Closed form against quadrature of the `Σ(t)` integral, plus branch continuity at `L*`.
pub fn thm3_check(p: f64, q: f64, r: f64, norm: f64, mean: f64, floor: f64) -> Result<Thm3Check> {
    let closed_form = bellman::bellman_thm3(p, q, r, norm, mean, floor)?.value;
    let quadrature = thm3_by_quadrature(p, q, r, norm, mean, floor)?;
    let threshold = thm3_threshold(p, norm, mean);
    let (upper_at_threshold, lower_at_threshold) = thm3_branches(p, q, r, norm, mean, threshold);
    let rel = rel_err(closed_form, quadrature);
    let cont = rel_err(upper_at_threshold, lower_at_threshold);
    Ok(Thm3Check {
        closed_form,
        quadrature,
        rel_err: rel,
        threshold,
        upper_at_threshold,
        lower_at_threshold,
        continuity_rel_err: cont,
        pass: rel <= ORACLE_TOL && cont <= CONTINUITY_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thm4Check {
    pub value: f64,
    pub extremal_delta: f64,
    pub alpha: f64,
    pub saturated: bool,
    pub rel_err: f64,
    pub pass: bool,
}

/// `Δ(g_α)` for the solved `α` against the closed form.
pub fn thm4_check(p: f64, q: f64, norm: f64, mean: f64) -> Result<Thm4Check> {
    let value = bellman::bellman_thm4(p, q, norm, mean)?.value;
    let ext = bellman::thm4_extremal(p, q, norm, mean)?;
    let rel = rel_err(ext.delta, value);
    Ok(Thm4Check {
        value,
        extremal_delta: ext.delta,
        alpha: ext.solution.alpha,
        saturated: ext.solution.saturated,
        rel_err: rel,
        pass: rel <= ORACLE_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub p: f64,
    pub q: f64,
    pub mean: f64,
    pub trials: usize,
    pub seed: u64,
    pub violations: usize,
    /// Largest `Δ(g) - B(F_g, f)` seen; negative when every sample is dominated.
    pub max_excess: f64,
}

/// Random nonincreasing step functions rescaled to `∫g = mean`, each compared
/// with the Bellman function at its own Lorentz quasinorm.
pub fn thm4_dominance(p: f64, q: f64, mean: f64, trials: usize, seed: u64, tol: f64) -> Result<DominanceReport> {
    let excess: Vec<Result<f64>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let g = sampling::random_nonincreasing_step(&mut rng, 12);
            let g = g.scaled(mean / g.cumulative(1.0))?;
            let norm = lorentz_qnorm(&g, p, q)?;
            let bound = bellman::bellman_thm4(p, q, norm, mean)?.value;
            Ok(delta_functional(&g, p, q)? - bound)
        })
        .collect();
    let mut report = DominanceReport {
        p,
        q,
        mean,
        trials,
        seed,
        violations: 0,
        max_excess: f64::NEG_INFINITY,
    };
    for e in excess {
        let e = e?;
        if e > tol {
            report.violations += 1;
        }
        report.max_excess = report.max_excess.max(e);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetrizationSequence {
    pub reports: Vec<SymmetrizationReport>,
    pub gap_nonincreasing: bool,
    pub bound_holds: bool,
}

/// [`verify_symmetrization`] over increasing construction indices.
pub fn symmetrization_sequence(g: &Density, fspec: &FunctionalSpec, ns: &[u32]) -> Result<SymmetrizationSequence> {
    let reports = ns
        .iter()
        .map(|&n| verify_symmetrization(&ExtremizerSpec::new(g.clone(), fspec.k, n)?, fspec))
        .collect::<Result<Vec<_>>>()?;
    let gap_nonincreasing = reports
        .windows(2)
        .all(|w| w[1].gap <= w[0].gap + 1e-12 * w[0].t.abs().max(1.0));
    let bound_holds = reports.iter().all(|r| r.bound_holds);
    Ok(SymmetrizationSequence {
        reports,
        gap_nonincreasing,
        bound_holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct I5Continuity {
    pub switch: f64,
    pub inner: f64,
    pub outer: f64,
    pub rel_err: f64,
}

/// Both branches of the `L^p` Bellman function at the switch `L = p' f`.
pub fn i5_continuity(p: f64, norm: f64, mean: f64) -> Result<I5Continuity> {
    let switch = conjugate(p) * mean;
    let outer = bellman::bellman_i5(p, norm, mean, switch)?.value;
    let inner = bellman::bellman_i5(p, norm, mean, switch * (1.0 - 4.0 * f64::EPSILON))?.value;
    Ok(I5Continuity {
        switch,
        inner,
        outer,
        rel_err: rel_err(inner, outer),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::OuterFn;
    use crate::measure_fn::StepFunction;

    #[test]
    fn thm3_check_passes() {
        let c = thm3_check(2.0, 4.0 / 3.0, 4.0 / 3.0, 1.0, 1.0, 8.0).unwrap();
        assert!(c.pass, "{c:?}");
        assert!((c.closed_form - 18.0).abs() < 1e-12);
    }

    #[test]
    fn thm4_check_passes() {
        let c = thm4_check(2.0, 2.0, 2.0, 1.0).unwrap();
        assert!(c.pass, "{c:?}");
    }

    #[test]
    fn dominance_small_run() {
        let r = thm4_dominance(2.0, 1.5, 1.0, 50, 1, 1e-8).unwrap();
        assert_eq!(r.violations, 0, "{r:?}");
    }

    #[test]
    fn symmetrization_sequence_monotone() {
        let g: Density = StepFunction::new(vec![0.0, 0.4, 1.0], vec![2.0, 1.0]).unwrap().into();
        let fspec = FunctionalSpec::new(OuterFn::Pow { r: 2.0 }, -0.5, 0.8).unwrap();
        let s = symmetrization_sequence(&g, &fspec, &[4, 16, 64]).unwrap();
        assert!(s.gap_nonincreasing && s.bound_holds, "{s:?}");
    }

    #[test]
    fn i5_switch_is_continuous() {
        let c = i5_continuity(3.0, 2.0, 1.0).unwrap();
        assert!(c.rel_err < 1e-12, "{c:?}");
    }
}
