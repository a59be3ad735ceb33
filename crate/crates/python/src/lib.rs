//! Python bindings: the Bellman evaluators, the special functions and the
//! dyadic-tree utilities, with plain floats and lists on the Python side.

use bellman::bellman::{self as bf, BellmanResult, WeakConstraint};
use bellman::hardy::{self, FunctionalSpec, OuterFn};
use bellman::measure_fn::{self, StepFunction};
use bellman::special;
use bellman::tree_sim;
use bellman::Error;
use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

create_exception!(
    _dyadic_bellman,
    DomainError,
    PyValueError,
    "Inputs outside the domain of the quantity."
);
create_exception!(
    _dyadic_bellman,
    NumericalError,
    PyArithmeticError,
    "Quadrature or root finding failed."
);

fn to_py(e: Error) -> PyErr {
    if e.is_domain() {
        DomainError::new_err(e.to_string())
    } else {
        NumericalError::new_err(e.to_string())
    }
}

/// Result of a Bellman function evaluation.
#[pyclass(name = "BellmanResult", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct PyBellmanResult {
    value: f64,
    branch: String,
    sigma: Option<f64>,
    alpha: Option<f64>,
    z: Option<f64>,
    threshold: Option<f64>,
    flags: Vec<String>,
}

#[pymethods]
impl PyBellmanResult {
    fn __repr__(&self) -> String {
        format!("BellmanResult(value={}, branch='{}')", self.value, self.branch)
    }

    fn __float__(&self) -> f64 {
        self.value
    }
}

impl From<BellmanResult> for PyBellmanResult {
    fn from(r: BellmanResult) -> Self {
        PyBellmanResult {
            value: r.value,
            branch: r.branch.as_str().to_owned(),
            sigma: r.sigma,
            alpha: r.alpha,
            z: r.z,
            threshold: r.threshold,
            flags: r.flags,
        }
    }
}

fn weak_list(weak: Vec<(f64, f64)>) -> Vec<WeakConstraint> {
    weak.into_iter().map(|(p, norm)| WeakConstraint { p, norm }).collect()
}

fn outer_fn(g: &str) -> PyResult<OuterFn> {
    let parts: Vec<&str> = g.split(':').collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| PyValueError::new_err(format!("'{s}' is not a number")))
    };
    match parts.as_slice() {
        ["pow", r] => Ok(OuterFn::Pow { r: num(r)? }),
        ["maxpow", r, floor] => Ok(OuterFn::MaxPow {
            r: num(r)?,
            floor: num(floor)?,
        }),
        _ => Err(PyValueError::new_err(format!(
            "expected 'pow:R' or 'maxpow:R:L', got '{g}'"
        ))),
    }
}

fn step(pieces: Vec<(f64, f64)>) -> PyResult<StepFunction> {
    StepFunction::from_lengths(&pieces).map_err(to_py)
}

/// `L^p` Bellman function with outer average `L`.
#[pyfunction]
#[pyo3(signature = (p, F, f, L))]
#[allow(non_snake_case)]
fn bellman_i5(p: f64, F: f64, f: f64, L: f64) -> PyResult<PyBellmanResult> {
    bf::bellman_i5(p, F, f, L).map(Into::into).map_err(to_py)
}

/// Bellman function under weak-type constraints `[(p_j, F_j), ...]` and `∫φ = f`.
#[pyfunction]
#[pyo3(signature = (weak, f, G = "pow:1", h = 0.0, k = 1.0))]
#[allow(non_snake_case)]
fn bellman_thm2(weak: Vec<(f64, f64)>, f: f64, G: &str, h: f64, k: f64) -> PyResult<PyBellmanResult> {
    let spec = FunctionalSpec::new(outer_fn(G)?, h, k).map_err(to_py)?;
    bf::bellman_thm2(&weak_list(weak), f, &spec)
        .map(Into::into)
        .map_err(to_py)
}

/// Weak-`L^p` to Lorentz `L^{q,r}` Bellman function, `1 < q < p`.
#[pyfunction]
#[pyo3(signature = (p, q, r, F, f, L))]
#[allow(non_snake_case)]
fn bellman_thm3(p: f64, q: f64, r: f64, F: f64, f: f64, L: f64) -> PyResult<PyBellmanResult> {
    bf::bellman_thm3(p, q, r, F, f, L).map(Into::into).map_err(to_py)
}

/// Lorentz `L^{p,q}` Bellman function.
#[pyfunction]
#[pyo3(signature = (p, q, F, f))]
#[allow(non_snake_case)]
fn bellman_thm4(p: f64, q: f64, F: f64, f: f64) -> PyResult<PyBellmanResult> {
    bf::bellman_thm4(p, q, F, f).map(Into::into).map_err(to_py)
}

#[pyfunction]
fn hq(q: f64, z: f64) -> PyResult<f64> {
    special::hq(q, z).map_err(to_py)
}

#[pyfunction]
fn omega_q(q: f64, y: f64) -> PyResult<f64> {
    special::omega_q(q, y).map_err(to_py)
}

/// `(alpha, saturated)` solving the norm equation for `g_α`.
#[pyfunction]
#[pyo3(signature = (p, q, F, f))]
#[allow(non_snake_case)]
fn solve_alpha(p: f64, q: f64, F: f64, f: f64) -> PyResult<(f64, bool)> {
    let s = special::solve_alpha(p, q, F, f).map_err(to_py)?;
    Ok((s.alpha, s.saturated))
}

/// `σ` with `∫₀^σ min_j (F_j/u)^{1/p_j} du = f`.
#[pyfunction]
fn solve_sigma(weak: Vec<(f64, f64)>, f: f64) -> PyResult<f64> {
    let env = bf::weak_envelope(&weak_list(weak)).map_err(to_py)?;
    special::solve_sigma(&env, f).map_err(to_py)
}

/// Nonincreasing rearrangement of `[(length, value), ...]`, in the same form.
#[pyfunction]
fn rearrange(pieces: Vec<(f64, f64)>) -> PyResult<Vec<(f64, f64)>> {
    Ok(measure_fn::rearrange(&pieces).map_err(to_py)?.lengths())
}

#[pyfunction]
fn lorentz_qnorm(pieces: Vec<(f64, f64)>, p: f64, q: f64) -> PyResult<f64> {
    measure_fn::lorentz_qnorm(&step(pieces)?, p, q).map_err(to_py)
}

#[pyfunction]
fn delta_functional(pieces: Vec<(f64, f64)>, p: f64, q: f64) -> PyResult<f64> {
    hardy::delta_functional(&step(pieces)?, p, q).map_err(to_py)
}

/// `∫₀ᵏ G((1/t)∫₀ᵗ g) t^h dt` for a step function `g`.
#[pyfunction]
#[pyo3(signature = (pieces, G, h = 0.0, k = 1.0))]
#[allow(non_snake_case)]
fn functional(pieces: Vec<(f64, f64)>, G: &str, h: f64, k: f64) -> PyResult<f64> {
    let spec = FunctionalSpec::new(outer_fn(G)?, h, k).map_err(to_py)?;
    hardy::functional(&step(pieces)?, &spec, None).map_err(to_py)
}

/// Dyadic maximal function of `2^depth` leaf values.
#[pyfunction]
fn dyadic_maximal(depth: u32, values: Vec<f64>) -> PyResult<Vec<f64>> {
    let phi = tree_sim::LeafVector::new(depth, values).map_err(to_py)?;
    Ok(tree_sim::dyadic_maximal(&phi).values().to_vec())
}

/// `(violations, min_slack)` over seeded random leaf vectors.
#[pyfunction]
#[pyo3(signature = (depth, trials, seed = 0, tolerance = 1e-12))]
fn lemma2_trials(depth: u32, trials: usize, seed: u64, tolerance: f64) -> PyResult<(usize, f64)> {
    let r = tree_sim::lemma2_trials(depth, trials, seed, tolerance).map_err(to_py)?;
    Ok((r.violations, r.min_slack))
}

#[pymodule]
fn _dyadic_bellman(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBellmanResult>()?;
    m.add("DomainError", m.py().get_type::<DomainError>())?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_function(wrap_pyfunction!(bellman_i5, m)?)?;
    m.add_function(wrap_pyfunction!(bellman_thm2, m)?)?;
    m.add_function(wrap_pyfunction!(bellman_thm3, m)?)?;
    m.add_function(wrap_pyfunction!(bellman_thm4, m)?)?;
    m.add_function(wrap_pyfunction!(hq, m)?)?;
    m.add_function(wrap_pyfunction!(omega_q, m)?)?;
    m.add_function(wrap_pyfunction!(solve_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(solve_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(rearrange, m)?)?;
    m.add_function(wrap_pyfunction!(lorentz_qnorm, m)?)?;
    m.add_function(wrap_pyfunction!(delta_functional, m)?)?;
    m.add_function(wrap_pyfunction!(functional, m)?)?;
    m.add_function(wrap_pyfunction!(dyadic_maximal, m)?)?;
    m.add_function(wrap_pyfunction!(lemma2_trials, m)?)?;
    Ok(())
}
