//! Python bindings. Algebras, points and templates are passed by builtin
//! name or file path, exactly as on the command line.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use schreier::files::{load_algebra, load_point, load_template};
use schreier::points::is_strong_point;
use schreier::schreier::{intrinsic_schreier_check, Homogeneity};
use schreier::special::{builtin_examples, extract_loop, is_s_special};
use schreier::terms::enumerate_splittings_at_generator;

fn err(e: schreier::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn hand(name: &str) -> PyResult<Homogeneity> {
    match name {
        "right" => Ok(Homogeneity::Right),
        "left" => Ok(Homogeneity::Left),
        other => Err(PyValueError::new_err(format!("hand must be `left` or `right`, not `{other}`"))),
    }
}

/// Names of the builtin examples.
#[pyfunction]
fn builtins() -> PyResult<Vec<&'static str>> {
    Ok(builtin_examples().map_err(err)?.iter().map(|e| e.name).collect())
}

/// `(x, q(x))` label pairs, or `None` when the point is not intrinsic Schreier.
#[pyfunction]
#[pyo3(signature = (point, template = "direct"))]
fn retraction(point: &str, template: &str) -> PyResult<Option<Vec<(String, String)>>> {
    let p = load_point(point).map_err(err)?;
    let t = load_template(template).map_err(err)?;
    let v = intrinsic_schreier_check(&p, &t).map_err(err)?;
    Ok(v.retraction().map(|r| r.labelled()))
}

/// Strongness and the labels of the subalgebra generated by kernel and section.
#[pyfunction]
fn strong(point: &str) -> PyResult<(bool, Vec<String>)> {
    let p = load_point(point).map_err(err)?;
    let s = is_strong_point(&p);
    Ok((s.strong, s.generated.labels()))
}

/// `None` when s-special, else the label of the first bad element of `X × X`
/// and the size of its decomposition set.
#[pyfunction]
#[pyo3(signature = (algebra, template = "direct"))]
fn special_failure(algebra: &str, template: &str) -> PyResult<Option<(String, usize)>> {
    let x = load_algebra(algebra).map_err(err)?;
    let t = load_template(template).map_err(err)?;
    let v = is_s_special(&x, &t).map_err(err)?;
    Ok(v.failure().map(|f| {
        let n = x.size();
        let label = format!("({},{})", x.label(f.element / n), x.label(f.element % n));
        (label, f.candidates.len())
    }))
}

/// The loop division table as rows of labels, or `None`.
#[pyfunction]
#[pyo3(signature = (algebra, side = "right"))]
fn loop_table(algebra: &str, side: &str) -> PyResult<Option<Vec<Vec<String>>>> {
    let x = load_algebra(algebra).map_err(err)?;
    let ex = extract_loop(&x, hand(side)?).map_err(err)?;
    Ok(ex.loop_structure().map(|l| {
        let n = x.size();
        (0..n)
            .map(|a| (0..n).map(|b| x.label(l.op(a, b)).to_string()).collect())
            .collect()
    }))
}

/// Alternating words over `ℕ + ℕ` with at most `max_len` blocks mapping to `(1, 1)`.
#[pyfunction]
fn splittings(max_len: usize) -> Vec<String> {
    enumerate_splittings_at_generator(max_len)
        .iter()
        .map(ToString::to_string)
        .collect()
}

/// Runs the command-line front end; returns `(output, exit code)`.
#[pyfunction]
fn run(args: Vec<String>) -> (String, i32) {
    let mut full = vec!["schreier".to_string()];
    full.extend(args);
    schreier::cli::run_args(full)
}

#[pymodule]
fn pyschreier(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(builtins, m)?)?;
    m.add_function(wrap_pyfunction!(retraction, m)?)?;
    m.add_function(wrap_pyfunction!(strong, m)?)?;
    m.add_function(wrap_pyfunction!(special_failure, m)?)?;
    m.add_function(wrap_pyfunction!(loop_table, m)?)?;
    m.add_function(wrap_pyfunction!(splittings, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
