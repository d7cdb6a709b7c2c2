//! Python bindings. Targets and sequences cross the boundary as JSON strings in the same
//! schema the command-line tool writes.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use fejerqsp::pipeline::{run_pipeline, PipelineOptions, PipelineOutput};
use fejerqsp::targets::{self, AccessibilityFamily, TargetPair};

fn py_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_json(pair: &TargetPair) -> PyResult<String> {
    serde_json::to_string(pair).map_err(py_err)
}

#[pyfunction]
fn truncation_hs(tau: f64, eps: f64) -> PyResult<usize> {
    targets::truncation_hs(tau, eps).map_err(py_err)
}

#[pyfunction]
fn bessel_j(order: usize, x: f64) -> PyResult<f64> {
    fejerqsp::special::bessel_j(order, x).map_err(py_err)
}

/// Truncated `½ e^{iτ cos θ}` as target JSON.
#[pyfunction]
fn hamiltonian_sim(tau: f64, eps: f64) -> PyResult<String> {
    to_json(&targets::build_hamiltonian_sim(tau, eps).map_err(py_err)?)
}

#[pyfunction]
fn random_target(n: usize, seed: u64) -> PyResult<String> {
    to_json(&targets::build_random(n, seed).map_err(py_err)?)
}

#[pyfunction]
fn threshold_target(delta: f64, eps: f64) -> PyResult<String> {
    to_json(&targets::build_threshold(delta, eps).and_then(|p| p.to_target_pair()).map_err(py_err)?)
}

pub fn pipeline_inner(target_json: &str, eps_fejer: f64, max_iter: usize, grid_points: Option<usize>) -> Result<PipelineOutput, String> {
    let pair: TargetPair = serde_json::from_str(target_json).map_err(|e| e.to_string())?;
    let opts = PipelineOptions { eps_fejer, max_iter, grid_points, ..Default::default() };
    run_pipeline(&pair, &opts).map_err(|e| e.to_string())
}

/// Complete, decompose and verify a target. Returns the summary numbers and the sequence JSON.
#[pyfunction]
#[pyo3(signature = (target_json, eps_fejer = 1e-14, max_iter = 200, grid_points = None))]
fn pipeline<'py>(
    py: Python<'py>,
    target_json: &str,
    eps_fejer: f64,
    max_iter: usize,
    grid_points: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let out = pipeline_inner(target_json, eps_fejer, max_iter, grid_points).map_err(PyValueError::new_err)?;
    let (n, iterations, residual, eps_qsp, seconds) = out.summary_fields();
    let d = PyDict::new(py);
    d.set_item("degree", n)?;
    d.set_item("iterations", iterations)?;
    d.set_item("residual", residual)?;
    d.set_item("eps_qsp", eps_qsp)?;
    d.set_item("completion_seconds", seconds)?;
    d.set_item("converged", out.quadruple.report.wilson.converged)?;
    d.set_item("sequence", serde_json::to_string(&out.sequence).map_err(py_err)?)?;
    Ok(d)
}

pub fn accessibility_inner(family: &str, params: &[f64], levels: &[u32]) -> Result<String, String> {
    let fam = match family {
        "rect" => AccessibilityFamily::Rect,
        "threshold" => AccessibilityFamily::Threshold,
        other => return Err(format!("unknown accessibility family '{other}' (expected rect or threshold)")),
    };
    let cells = targets::accessibility_map(fam, params, levels).map_err(|e| e.to_string())?;
    Ok(targets::accessibility_csv(fam, &cells))
}

/// Accessibility map as CSV text.
#[pyfunction]
fn accessibility(family: &str, params: Vec<f64>, levels: Vec<u32>) -> PyResult<String> {
    accessibility_inner(family, &params, &levels).map_err(PyValueError::new_err)
}

#[pymodule]
fn fejerqsp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(truncation_hs, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(hamiltonian_sim, m)?)?;
    m.add_function(wrap_pyfunction!(random_target, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_target, m)?)?;
    m.add_function(wrap_pyfunction!(pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(accessibility, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pipeline_from_json() {
        let json = serde_json::to_string(&targets::build_hamiltonian_sim(20.0, 1e-14).unwrap()).unwrap();
        let out = pipeline_inner(&json, 1e-14, 200, None).unwrap();
        assert!(out.verification.eps_qsp <= 1e-12);
        assert!(pipeline_inner("{}", 1e-14, 200, None).is_err());
    }

    #[test]
    fn accessibility_csv_text() {
        let csv = accessibility_inner("rect", &[0.5], &[1, 2]).unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert!(accessibility_inner("sign", &[0.5], &[1]).is_err());
    }
}
