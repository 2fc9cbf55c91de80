//! Python bindings. Rationals cross the boundary as `"p/q"` strings, which
//! `fractions.Fraction` parses directly.

use mpsynth::fixtures;
use mpsynth::lp::ExportOptions;
use mpsynth::mdp::explicit::{load_explicit_model, write_explicit_model};
use mpsynth::mdp::Model;
use mpsynth::pareto::{write_csv, write_svg};
use mpsynth::prism::{load_prism_model, parse_property, print_property, DEFAULT_STATE_CAP};
use mpsynth::query::{evaluate, export_query, QueryOutcome};
use mpsynth::rational::{fmt_rational, parse_rational, Rational};
use mpsynth::strategy::{
    expected_mean_payoffs, product_chain, simulate as run_simulation, strategy_from_json, strategy_to_json,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(mpsynth_py, MpsynthError, PyException);

fn to_py(e: mpsynth::Error) -> PyErr {
    MpsynthError::new_err(e.to_string())
}

fn rational(text: &str) -> PyResult<Rational> {
    parse_rational(text).map_err(PyValueError::new_err)
}

#[pyclass(name = "Model", frozen)]
struct PyModel {
    inner: Model,
}

#[pymethods]
impl PyModel {
    #[staticmethod]
    fn from_explicit(text: &str) -> PyResult<Self> {
        Ok(PyModel {
            inner: load_explicit_model(text).map_err(to_py)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (text, max_states = DEFAULT_STATE_CAP))]
    fn from_prism(text: &str, max_states: usize) -> PyResult<Self> {
        Ok(PyModel {
            inner: load_prism_model(text, max_states).map_err(to_py)?,
        })
    }

    /// One of the reference models `"m1"`, `"m2"`, `"m3"`.
    #[staticmethod]
    fn fixture(name: &str) -> PyResult<Self> {
        let inner = match name {
            "m1" => fixtures::m1(),
            "m2" => fixtures::m2(),
            "m3" => fixtures::m3(),
            other => return Err(PyValueError::new_err(format!("unknown fixture {other:?}"))),
        };
        Ok(PyModel { inner })
    }

    #[getter]
    fn num_states(&self) -> usize {
        self.inner.mdp.num_states()
    }

    #[getter]
    fn num_actions(&self) -> usize {
        self.inner.mdp.num_actions()
    }

    #[getter]
    fn state_names(&self) -> Vec<String> {
        self.inner.mdp.state_names().to_vec()
    }

    #[getter]
    fn reward_names(&self) -> Vec<String> {
        self.inner.rewards.iter().map(|r| r.name.clone()).collect()
    }

    fn to_explicit(&self) -> String {
        write_explicit_model(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(states={}, actions={}, rewards={:?})",
            self.num_states(),
            self.num_actions(),
            self.reward_names()
        )
    }
}

#[pyclass(name = "Outcome", frozen)]
struct PyOutcome {
    outcome: QueryOutcome,
    strategy_json: Option<String>,
}

#[pymethods]
impl PyOutcome {
    /// `"boolean"`, `"numerical"` or `"pareto"`.
    #[getter]
    fn kind(&self) -> &'static str {
        match self.outcome {
            QueryOutcome::Boolean { .. } => "boolean",
            QueryOutcome::Numerical { .. } => "numerical",
            QueryOutcome::Pareto { .. } => "pareto",
        }
    }

    #[getter]
    fn holds(&self) -> Option<bool> {
        match &self.outcome {
            QueryOutcome::Boolean { holds, .. } => Some(*holds),
            _ => None,
        }
    }

    /// Optimum of a single numerical item; `None` when infeasible.
    #[getter]
    fn value(&self) -> Option<String> {
        match &self.outcome {
            QueryOutcome::Numerical { value, .. } => value.as_ref().map(fmt_rational),
            _ => None,
        }
    }

    #[getter]
    fn summary(&self) -> String {
        self.outcome.summary()
    }

    #[getter]
    fn strategy_json(&self) -> Option<String> {
        self.strategy_json.clone()
    }

    /// Pareto points in maximization orientation (negated for `min=?`).
    #[getter]
    fn pareto_points(&self) -> Vec<(String, String)> {
        match &self.outcome {
            QueryOutcome::Pareto { approx, .. } => approx
                .points
                .iter()
                .map(|p| (fmt_rational(&p.value.0), fmt_rational(&p.value.1)))
                .collect(),
            _ => Vec::new(),
        }
    }

    fn csv(&self) -> Option<String> {
        match &self.outcome {
            QueryOutcome::Pareto { approx, .. } => Some(write_csv(approx)),
            _ => None,
        }
    }

    #[pyo3(signature = (width = 640, height = 480))]
    fn svg(&self, width: u32, height: u32) -> PyResult<String> {
        match &self.outcome {
            QueryOutcome::Pareto { approx, .. } => write_svg(approx, width, height).map_err(to_py),
            _ => Err(PyValueError::new_err("not a Pareto outcome")),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Outcome({:?})",
            self.outcome.summary().lines().next().unwrap_or("")
        )
    }
}

/// Evaluates a `multi(...)` or `mlessmulti(...)` property.
#[pyfunction]
#[pyo3(signature = (model, prop, epsilon = "1/100"))]
fn check(model: &PyModel, prop: &str, epsilon: &str) -> PyResult<PyOutcome> {
    let query = parse_property(prop).map_err(to_py)?;
    let outcome = evaluate(&model.inner, &query, &rational(epsilon)?).map_err(to_py)?;
    let strategy_json = outcome
        .strategy()
        .map(|st| strategy_to_json(&model.inner.mdp, st));
    Ok(PyOutcome {
        outcome,
        strategy_json,
    })
}

/// Canonical text of a property.
#[pyfunction]
fn normalize_property(prop: &str) -> PyResult<String> {
    Ok(print_property(&parse_property(prop).map_err(to_py)?))
}

/// Exact expected mean payoff of each reward structure under a strategy.
#[pyfunction]
fn expected_values(model: &PyModel, strategy_json: &str) -> PyResult<Vec<String>> {
    let m = &model.inner;
    let st = strategy_from_json(&m.mdp, strategy_json).map_err(to_py)?;
    let chain = product_chain(&m.mdp, &st).chain;
    let values = expected_mean_payoffs(&chain, &m.rewards).map_err(to_py)?;
    Ok(values.iter().map(fmt_rational).collect())
}

/// Samples a run; each step is `(state, action, running averages)`.
#[pyfunction]
#[pyo3(signature = (model, strategy_json, steps, seed = 0))]
fn simulate(
    model: &PyModel,
    strategy_json: &str,
    steps: usize,
    seed: u64,
) -> PyResult<Vec<(String, String, Vec<f64>)>> {
    let m = &model.inner;
    let st = strategy_from_json(&m.mdp, strategy_json).map_err(to_py)?;
    let chain = product_chain(&m.mdp, &st).chain;
    Ok(run_simulation(&chain, &m.rewards, steps, seed)
        .into_iter()
        .map(|s| {
            (
                chain.state_names[s.state].clone(),
                m.mdp.action(s.action).name.clone(),
                s.averages,
            )
        })
        .collect())
}

/// The LP (or MILP for `mlessmulti`) behind a property, in CPLEX LP format.
#[pyfunction]
#[pyo3(signature = (model, prop, big_m = None, strict_eps = None))]
fn export_lp(model: &PyModel, prop: &str, big_m: Option<&str>, strict_eps: Option<&str>) -> PyResult<String> {
    let opts = ExportOptions {
        big_m: big_m.map(rational).transpose()?,
        strict_epsilon: strict_eps.map(rational).transpose()?,
    };
    export_query(&model.inner, &parse_property(prop).map_err(to_py)?, &opts).map_err(to_py)
}

#[pymodule]
fn mpsynth_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MpsynthError", m.py().get_type::<MpsynthError>())?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyOutcome>()?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_property, m)?)?;
    m.add_function(wrap_pyfunction!(expected_values, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(export_lp, m)?)?;
    Ok(())
}
