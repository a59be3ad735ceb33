use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bellman::WeakConstraint;
use crate::hardy::OuterFn;

#[derive(Debug, Parser)]
#[command(
    name = "dyadic-bellman",
    version,
    about = "Evaluate and verify sharp Bellman functions for dyadic maximal operators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one Bellman function.
    Eval {
        #[arg(value_enum)]
        kind: EvalKind,
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        functional: FunctionalArgs,
        /// Print the result as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run a numerical verification.
    Verify {
        #[arg(value_enum)]
        check: VerifyKind,
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        functional: FunctionalArgs,
        #[arg(long, default_value_t = 12)]
        depth: u32,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Nonincreasing step function as `length:value,...`.
        #[arg(long, value_parser = parse_pieces)]
        pieces: Option<Pieces>,
        /// Construction indices for the symmetrization check.
        #[arg(long = "n", value_delimiter = ',', default_values_t = [4u32, 16, 64, 256])]
        n: Vec<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Build an extremal function and report its profile.
    Extremal {
        #[arg(long, value_enum)]
        kind: ExtremalKind,
        #[command(flatten)]
        params: Params,
        #[arg(long, value_parser = parse_pieces)]
        pieces: Option<Pieces>,
        /// Measure parameter of the chain construction.
        #[arg(long)]
        k: Option<f64>,
        #[arg(long = "n", default_value_t = 16)]
        n: u32,
        #[arg(long, default_value_t = 10)]
        depth: u32,
        /// Write the profile as CSV instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a parameter grid from a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// CSV output; overrides the config's `out`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON report; overrides the config's `json_out`.
        #[arg(long = "json-out")]
        json_out: Option<PathBuf>,
        /// Worker threads (default: available parallelism).
        #[arg(long)]
        jobs: Option<usize>,
        /// Include wall times in the JSON report.
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalKind {
    I5,
    Thm2,
    Thm3,
    Thm4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyKind {
    Lemma2,
    Symmetrization,
    #[value(name = "sharpness-thm3")]
    SharpnessThm3,
    #[value(name = "sharpness-thm4")]
    SharpnessThm4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExtremalKind {
    /// `g_α` for the Lorentz Bellman function.
    Galpha,
    /// Chain construction lower profile.
    Chain,
    /// Dyadic-tree realization and its maximal function.
    Dyadic,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Params {
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long = "F")]
    pub norm: Option<f64>,
    #[arg(long = "f")]
    pub mean: Option<f64>,
    #[arg(long = "L")]
    pub floor: Option<f64>,
    /// Weak constraints as `p1:F1,p2:F2,...`.
    #[arg(long, value_parser = parse_weak)]
    pub weak: Option<WeakList>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct FunctionalArgs {
    /// `pow:R` or `maxpow:R:L`.
    #[arg(long = "G", value_parser = parse_outer)]
    pub outer: Option<OuterFn>,
    /// `pow:S` for the weight `t^S`.
    #[arg(long = "h", value_parser = parse_weight)]
    pub weight: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakList(pub Vec<WeakConstraint>);

#[derive(Debug, Clone, PartialEq)]
pub struct Pieces(pub Vec<(f64, f64)>);

fn number(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if !x.is_finite() {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(x)
}

fn pairs(s: &str) -> Result<Vec<(f64, f64)>, String> {
    s.split(',')
        .map(|item| {
            let (a, b) = item
                .split_once(':')
                .ok_or_else(|| format!("expected 'a:b', got '{item}'"))?;
            Ok((number(a)?, number(b)?))
        })
        .collect()
}

pub fn parse_weak(s: &str) -> Result<WeakList, String> {
    Ok(WeakList(
        pairs(s)?
            .into_iter()
            .map(|(p, norm)| WeakConstraint { p, norm })
            .collect(),
    ))
}

pub fn parse_pieces(s: &str) -> Result<Pieces, String> {
    pairs(s).map(Pieces)
}

pub fn parse_outer(s: &str) -> Result<OuterFn, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["pow", r] => Ok(OuterFn::Pow { r: number(r)? }),
        ["maxpow", r, floor] => Ok(OuterFn::MaxPow {
            r: number(r)?,
            floor: number(floor)?,
        }),
        _ => Err(format!("expected 'pow:R' or 'maxpow:R:L', got '{s}'")),
    }
}

pub fn parse_weight(s: &str) -> Result<f64, String> {
    match s.split_once(':') {
        Some(("pow", exp)) => number(exp),
        _ => Err(format!("expected 'pow:S', got '{s}'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_values() {
        assert_eq!(
            parse_weak("2:1,3:0.5").unwrap().0,
            vec![
                WeakConstraint { p: 2.0, norm: 1.0 },
                WeakConstraint { p: 3.0, norm: 0.5 }
            ]
        );
        assert_eq!(
            parse_outer("maxpow:1.5:2").unwrap(),
            OuterFn::MaxPow { r: 1.5, floor: 2.0 }
        );
        assert_eq!(parse_outer("pow:2").unwrap(), OuterFn::Pow { r: 2.0 });
        assert!(parse_outer("exp:1").is_err());
        assert_eq!(parse_weight("pow:-0.5").unwrap(), -0.5);
        assert!(parse_weight("0.5").is_err());
        assert!(parse_pieces("0.5:2,0.5").is_err());
    }

    #[test]
    fn definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
