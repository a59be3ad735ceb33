use crate::bellman::{BellmanQuery, QueryKind, WeakConstraint};
use crate::error::{Error, Result};
use crate::hardy::{FunctionalSpec, OuterFn};

/// One point of parameters as given on the command line or in a sweep grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryInput {
    pub kind: QueryKind,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub norm: Option<f64>,
    pub mean: Option<f64>,
    pub floor: Option<f64>,
    pub k: Option<f64>,
    pub weak: Option<Vec<WeakConstraint>>,
    pub outer: Option<OuterFn>,
    pub weight: Option<f64>,
}

impl QueryInput {
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        for (name, v) in [
            ("p", self.p),
            ("q", self.q),
            ("r", self.r),
            ("F", self.norm),
            ("f", self.mean),
            ("L", self.floor),
            ("k", self.k),
        ] {
            if let Some(v) = v {
                parts.push(format!("{name}={v}"));
            }
        }
        format!("{} {}", self.kind.as_str(), parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BuildError {
    /// A parameter the query kind needs was not given.
    Missing(String),
    Invalid(Error),
}

impl From<Error> for BuildError {
    fn from(e: Error) -> Self {
        BuildError::Invalid(e)
    }
}

impl std::fmt::Display for BuildError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BuildError::Missing(m) => f.write_str(m),
            BuildError::Invalid(e) => e.fmt(f),
        }
    }
}

fn need(name: &str, v: Option<f64>, kind: QueryKind) -> std::result::Result<f64, BuildError> {
    v.ok_or_else(|| BuildError::Missing(format!("{} needs --{name}", kind.as_str())))
}

/// The functional for a thm2 query. Without `--G`/`--h` it falls back to the
/// Lorentz-type choice `G = max(x, L)^r`, `h = t^{r/q - 1}` when those
/// parameters are present, and to `G = x`, `h = 1` otherwise.
pub fn thm2_spec(input: &QueryInput) -> Result<FunctionalSpec> {
    let outer = match (input.outer, input.r, input.floor) {
        (Some(o), _, _) => o,
        (None, Some(r), Some(floor)) => OuterFn::MaxPow { r, floor },
        (None, Some(r), None) => OuterFn::Pow { r },
        (None, None, _) => OuterFn::Pow { r: 1.0 },
    };
    let weight = match (input.weight, input.r, input.q) {
        (Some(s), _, _) => s,
        (None, Some(r), Some(q)) => r / q - 1.0,
        _ => 0.0,
    };
    FunctionalSpec::new(outer, weight, input.k.unwrap_or(1.0))
}

pub fn build(input: &QueryInput) -> std::result::Result<BellmanQuery, BuildError> {
    let kind = input.kind;
    Ok(match kind {
        QueryKind::I5 => BellmanQuery::I5 {
            p: need("p", input.p, kind)?,
            norm: need("F", input.norm, kind)?,
            mean: need("f", input.mean, kind)?,
            floor: need("L", input.floor, kind)?,
        },
        QueryKind::Thm2 => {
            let weak = match &input.weak {
                Some(w) => w.clone(),
                None => vec![WeakConstraint {
                    p: need("p", input.p, kind)?,
                    norm: need("F", input.norm, kind)?,
                }],
            };
            BellmanQuery::Thm2 {
                weak,
                mean: need("f", input.mean, kind)?,
                spec: thm2_spec(input)?,
            }
        }
        QueryKind::Thm3 => BellmanQuery::Thm3 {
            p: need("p", input.p, kind)?,
            q: need("q", input.q, kind)?,
            r: need("r", input.r, kind)?,
            norm: need("F", input.norm, kind)?,
            mean: need("f", input.mean, kind)?,
            floor: need("L", input.floor, kind)?,
        },
        QueryKind::Thm4 => BellmanQuery::Thm4 {
            p: need("p", input.p, kind)?,
            q: need("q", input.q, kind)?,
            norm: need("F", input.norm, kind)?,
            mean: need("f", input.mean, kind)?,
        },
    })
}
