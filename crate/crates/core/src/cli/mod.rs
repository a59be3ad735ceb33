//! The `dyadic-bellman` command-line harness.

pub mod args;
pub mod format;
pub mod query;
pub mod sweep;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use crate::bellman::QueryKind;
use crate::error::Error;
use crate::hardy::{FunctionalSpec, OuterFn};
use crate::measure_fn::{Density, StepFunction};
use crate::tree_sim::{self, ExtremizerSpec};
use crate::verify;
use args::{Cli, Command, EvalKind, ExtremalKind, FunctionalArgs, Params, Pieces, VerifyKind};
use format::g17;
use query::{BuildError, QueryInput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

/// A command's failure, already mapped to an exit status.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure {
            code: EXIT_IO,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_domain() { EXIT_DOMAIN } else { EXIT_NUMERICAL },
            message: e.to_string(),
        }
    }
}

impl From<BuildError> for Failure {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::Missing(m) => Failure::usage(m),
            BuildError::Invalid(e) => e.into(),
        }
    }
}

type CmdResult = Result<i32, Failure>;

/// Runs the CLI with process stdio; returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return EXIT_OK;
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let result = match cli.command {
        Command::Eval {
            kind,
            params,
            functional,
            json,
        } => eval(kind, &params, &functional, json, out),
        Command::Verify {
            check,
            params,
            functional,
            depth,
            trials,
            seed,
            pieces,
            n,
            json,
        } => {
            let v = VerifyArgs {
                params,
                functional,
                depth,
                trials,
                seed,
                pieces,
                n,
            };
            verify_cmd(check, &v, json, out)
        }
        Command::Extremal {
            kind,
            params,
            pieces,
            k,
            n,
            depth,
            out: path,
        } => extremal(kind, &params, pieces.as_ref(), k, n, depth, path.as_deref(), out),
        Command::Sweep {
            config,
            out: csv,
            json_out,
            jobs,
            timing,
        } => sweep_cmd(&config, csv.as_deref(), json_out.as_deref(), jobs, timing, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn query_kind(kind: EvalKind) -> QueryKind {
    match kind {
        EvalKind::I5 => QueryKind::I5,
        EvalKind::Thm2 => QueryKind::Thm2,
        EvalKind::Thm3 => QueryKind::Thm3,
        EvalKind::Thm4 => QueryKind::Thm4,
    }
}

fn input_from(kind: QueryKind, params: &Params, functional: &FunctionalArgs) -> QueryInput {
    QueryInput {
        kind,
        p: params.p,
        q: params.q,
        r: params.r,
        norm: params.norm,
        mean: params.mean,
        floor: params.floor,
        k: functional.k,
        weak: params.weak.as_ref().map(|w| w.0.clone()),
        outer: functional.outer,
        weight: functional.weight,
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("stdout: {e}"),
    })
}

fn emit_json(out: &mut dyn Write, value: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    emit(out, &(text + "\n"))
}

fn eval(kind: EvalKind, params: &Params, functional: &FunctionalArgs, json: bool, out: &mut dyn Write) -> CmdResult {
    let input = input_from(query_kind(kind), params, functional);
    let query = query::build(&input)?;
    let res = query.evaluate()?;
    let record = json!({
        "kind": input.kind,
        "branch": res.branch.as_str(),
        "value": res.value,
        "sigma": res.sigma,
        "alpha": res.alpha,
        "z": res.z,
        "threshold": res.threshold,
        "flags": res.flags,
    });
    if json {
        emit_json(out, &record)?;
    } else {
        let mut text = format!(
            "kind {}\nbranch {}\nvalue {}\n",
            input.kind.as_str(),
            res.branch.as_str(),
            g17(res.value)
        );
        for (name, v) in [
            ("sigma", res.sigma),
            ("alpha", res.alpha),
            ("z", res.z),
            ("threshold", res.threshold),
        ] {
            if let Some(v) = v {
                text.push_str(&format!("{name} {}\n", g17(v)));
            }
        }
        for f in &res.flags {
            text.push_str(&format!("flag {f}\n"));
        }
        emit(out, &text)?;
    }
    Ok(EXIT_OK)
}

struct VerifyArgs {
    params: Params,
    functional: FunctionalArgs,
    depth: u32,
    trials: usize,
    seed: u64,
    pieces: Option<Pieces>,
    n: Vec<u32>,
}

fn need(name: &str, v: Option<f64>) -> Result<f64, Failure> {
    v.ok_or_else(|| Failure::usage(format!("missing --{name}")))
}

const DEFAULT_PIECES: [(f64, f64); 2] = [(0.3, 3.0), (0.7, 1.0)];

fn step_from(pieces: Option<&Pieces>) -> Result<StepFunction, Failure> {
    let pieces = pieces.map(|p| p.0.as_slice()).unwrap_or(&DEFAULT_PIECES);
    let g = StepFunction::from_lengths(pieces)?;
    if !g.is_nonincreasing() {
        return Err(Error::Precondition("--pieces must be nonincreasing".into()).into());
    }
    Ok(g)
}

fn status(pass: bool) -> i32 {
    if pass {
        EXIT_OK
    } else {
        EXIT_NUMERICAL
    }
}

fn verify_cmd(check: VerifyKind, v: &VerifyArgs, json: bool, out: &mut dyn Write) -> CmdResult {
    match check {
        VerifyKind::Lemma2 => {
            let rep = tree_sim::lemma2_trials(v.depth, v.trials, v.seed, 1e-12)?;
            if json {
                emit_json(out, &rep)?;
            } else {
                emit(
                    out,
                    &format!(
                        "depth {}\ntrials {}\nseed {}\nviolations {}\nmin_slack {}\nworst_trial {}\n",
                        rep.depth,
                        rep.trials,
                        rep.seed,
                        rep.violations,
                        g17(rep.min_slack),
                        rep.worst_trial
                    ),
                )?;
            }
            Ok(status(rep.violations == 0))
        }
        VerifyKind::Symmetrization => {
            let g: Density = step_from(v.pieces.as_ref())?.into();
            let fspec = FunctionalSpec::new(
                v.functional.outer.unwrap_or(OuterFn::Pow { r: 1.0 }),
                v.functional.weight.unwrap_or(0.0),
                v.functional.k.unwrap_or(1.0),
            )?;
            let seq = verify::symmetrization_sequence(&g, &fspec, &v.n)?;
            if json {
                emit_json(out, &seq)?;
            } else {
                let mut text = String::from("n alpha s_n t gap bound_holds\n");
                for r in &seq.reports {
                    text.push_str(&format!(
                        "{} {} {} {} {} {}\n",
                        r.n,
                        g17(r.alpha),
                        g17(r.s_n),
                        g17(r.t),
                        g17(r.gap),
                        r.bound_holds
                    ));
                }
                text.push_str(&format!("gap_nonincreasing {}\n", seq.gap_nonincreasing));
                emit(out, &text)?;
            }
            Ok(status(seq.bound_holds && seq.gap_nonincreasing))
        }
        VerifyKind::SharpnessThm3 => {
            let p = &v.params;
            let c = verify::thm3_check(
                need("p", p.p)?,
                need("q", p.q)?,
                need("r", p.r)?,
                need("F", p.norm)?,
                need("f", p.mean)?,
                need("L", p.floor)?,
            )?;
            if json {
                emit_json(out, &c)?;
            } else {
                emit(
                    out,
                    &format!(
                        "closed_form {}\nquadrature {}\nrel_err {}\nthreshold {}\ncontinuity_rel_err {}\npass {}\n",
                        g17(c.closed_form),
                        g17(c.quadrature),
                        g17(c.rel_err),
                        g17(c.threshold),
                        g17(c.continuity_rel_err),
                        c.pass
                    ),
                )?;
            }
            Ok(status(c.pass))
        }
        VerifyKind::SharpnessThm4 => {
            let p = &v.params;
            let (pp, q, norm, mean) = (need("p", p.p)?, need("q", p.q)?, need("F", p.norm)?, need("f", p.mean)?);
            let c = verify::thm4_check(pp, q, norm, mean)?;
            let d = verify::thm4_dominance(pp, q, mean, v.trials, v.seed, 1e-8)?;
            let pass = c.pass && d.violations == 0;
            if json {
                emit_json(out, &json!({ "extremal": c, "dominance": d, "pass": pass }))?;
            } else {
                emit(
                    out,
                    &format!(
                        "value {}\nextremal_delta {}\nalpha {}\nrel_err {}\ntrials {}\nviolations {}\nmax_excess {}\npass {}\n",
                        g17(c.value),
                        g17(c.extremal_delta),
                        g17(c.alpha),
                        g17(c.rel_err),
                        d.trials,
                        d.violations,
                        g17(d.max_excess),
                        pass
                    ),
                )?;
            }
            Ok(status(pass))
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::io(path, e))
}

#[allow(clippy::too_many_arguments)]
fn extremal(
    kind: ExtremalKind,
    params: &Params,
    pieces: Option<&Pieces>,
    k: Option<f64>,
    n: u32,
    depth: u32,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let text = match kind {
        ExtremalKind::Galpha => {
            let (p, q, norm, mean) = (
                need("p", params.p)?,
                need("q", params.q)?,
                need("F", params.norm)?,
                need("f", params.mean)?,
            );
            let ext = crate::bellman::thm4_extremal(p, q, norm, mean)?;
            let seg = ext.g.segments()[0];
            format!(
                "alpha {}\nz {}\ncoeff {}\nexponent {}\ndelta {}\nsaturated {}\n",
                g17(ext.solution.alpha),
                g17(ext.solution.z(p, q)),
                g17(seg.coeff),
                g17(seg.exponent),
                g17(ext.delta),
                ext.solution.saturated
            )
        }
        ExtremalKind::Chain => {
            let g = step_from(pieces)?;
            let spec = ExtremizerSpec::new(g, k.unwrap_or(1.0), n)?;
            let (_, lower) = tree_sim::extremizer_profile(&spec)?;
            let mut text = String::from("start,end,lower\n");
            for (a, b, v) in lower.pieces() {
                text.push_str(&format!("{},{},{}\n", g17(a), g17(b), g17(v)));
            }
            text
        }
        ExtremalKind::Dyadic => {
            let g: Density = step_from(pieces)?.into();
            let psi = tree_sim::dyadic_extremizer(&g, depth)?;
            let m = tree_sim::dyadic_maximal(&psi);
            let len = psi.len() as f64;
            let mut text = String::from("start,end,psi,maximal\n");
            for (i, (a, b)) in psi.values().iter().zip(m.values()).enumerate() {
                text.push_str(&format!(
                    "{},{},{},{}\n",
                    g17(i as f64 / len),
                    g17((i + 1) as f64 / len),
                    g17(*a),
                    g17(*b)
                ));
            }
            text
        }
    };
    match path {
        Some(path) => write_file(path, &text)?,
        None => emit(out, &text)?,
    }
    Ok(EXIT_OK)
}

fn sweep_cmd(
    config_path: &Path,
    csv: Option<&Path>,
    json_out: Option<&Path>,
    jobs: Option<usize>,
    timing: bool,
    out: &mut dyn Write,
) -> CmdResult {
    let text = fs::read_to_string(config_path).map_err(|e| Failure::io(config_path, e))?;
    let config: sweep::SweepConfig =
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", config_path.display())))?;
    let csv = csv.map(Path::to_path_buf).or_else(|| config.out.clone());
    let json_out = json_out.map(Path::to_path_buf).or_else(|| config.json_out.clone());
    let jobs = match jobs {
        Some(0) => return Err(Failure::usage("--jobs must be at least 1")),
        Some(j) => j,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::usage(format!("thread pool: {e}")))?;
    let report = pool.install(|| sweep::run(&config, timing)).map_err(|e| match e {
        sweep::SweepError::Config(m) => Failure::usage(m),
        sweep::SweepError::Domain(m) => Failure {
            code: EXIT_DOMAIN,
            message: m,
        },
    })?;
    match &csv {
        Some(path) => write_file(path, &report.csv())?,
        None => emit(out, &report.csv())?,
    }
    if let Some(path) = &json_out {
        let text = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
        write_file(path, &text)?;
    }
    if csv.is_some() {
        let s = &report.summary;
        emit(
            out,
            &format!(
                "rows {} pass {} fail {} skipped {}\n",
                s.rows, s.pass_count, s.fail_count, s.skipped_count
            ),
        )?;
    }
    Ok(status(report.all_pass()))
}
