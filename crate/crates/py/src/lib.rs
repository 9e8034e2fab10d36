//! Python bindings. Requests and plans cross the boundary as the same JSON
//! documents the command line reads and writes.

use gsx::graph::{Graph, VertexId};
use gsx::planners::{self, ExtractionRequest, Strategy};
use gsx::primitives::Plan;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(gsx_py, PlanningError, PyException);
create_exception!(gsx_py, VerificationError, PyException);

enum Fail {
    Input(String),
    Planning(String),
    Verify(String),
}

impl From<Fail> for PyErr {
    fn from(f: Fail) -> PyErr {
        match f {
            Fail::Input(m) => PyValueError::new_err(m),
            Fail::Planning(m) => PlanningError::new_err(m),
            Fail::Verify(m) => VerificationError::new_err(m),
        }
    }
}

fn input(e: impl ToString) -> Fail {
    Fail::Input(e.to_string())
}

fn plan_json(request: &str, strategy: Option<&str>) -> Result<String, Fail> {
    let mut req = ExtractionRequest::from_json(request).map_err(input)?;
    if let Some(s) = strategy {
        req.strategy = s.parse::<Strategy>().map_err(input)?;
    }
    planners::plan(&req).map(|p| p.to_json()).map_err(|e| Fail::Planning(e.to_string()))
}

fn verify_json(plan: &str, mode: &str, seed: Option<u64>) -> Result<(), Fail> {
    let plan = Plan::from_json(plan).map_err(input)?;
    let fail = |e: gsx::Error| Fail::Verify(e.to_string());
    match mode {
        "graph" => planners::execute_plan(&plan)
            .and_then(|(g, _)| planners::check_extraction(&plan, &g))
            .map_err(fail),
        "tableau" => planners::verify_tableau(&plan, seed).map(|_| ()).map_err(fail),
        "statevector" => planners::verify_statevector(&plan, seed, gsx::oracle::DEFAULT_CAP).map_err(fail),
        other => Err(Fail::Input(format!("unknown verify mode {other:?}"))),
    }
}

fn render_json(plan: &str, format: &str) -> Result<String, Fail> {
    let plan = Plan::from_json(plan).map_err(input)?;
    match format {
        "ascii" => Ok(gsx::render::render_ascii(&plan)),
        "svg" => Ok(gsx::render::render_svg(&plan)),
        other => Err(Fail::Input(format!("unknown format {other:?}"))),
    }
}

/// Plans a request given as JSON text and returns the plan as JSON text.
#[pyfunction]
#[pyo3(signature = (request, strategy=None))]
fn plan(request: &str, strategy: Option<&str>) -> PyResult<String> {
    Ok(plan_json(request, strategy)?)
}

/// Checks a plan by replaying it (`graph`) or against an oracle
/// (`tableau`, `statevector`). Raises `VerificationError` on mismatch.
#[pyfunction]
#[pyo3(signature = (plan, mode="tableau", seed=None))]
fn verify(plan: &str, mode: &str, seed: Option<u64>) -> PyResult<()> {
    Ok(verify_json(plan, mode, seed)?)
}

#[pyfunction]
#[pyo3(signature = (plan, format="ascii"))]
fn render(plan: &str, format: &str) -> PyResult<String> {
    Ok(render_json(plan, format)?)
}

/// Cost report of a plan as a dict.
#[pyfunction]
fn cost_report<'py>(py: Python<'py>, plan: &str) -> PyResult<Bound<'py, PyAny>> {
    let plan = Plan::from_json(plan).map_err(input)?;
    let text = serde_json::to_string(&planners::cost_report(&plan)).map_err(input)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Local complement of the graph on `edges` at `v`, as a sorted edge list.
#[pyfunction]
fn local_complement(edges: Vec<(VertexId, VertexId)>, v: VertexId) -> PyResult<Vec<(VertexId, VertexId)>> {
    let vertices: Vec<VertexId> = edges.iter().flat_map(|(a, b)| [*a, *b]).chain([v]).collect();
    let g = Graph::from_edges(vertices, edges).map_err(input)?;
    Ok(g.local_complement(v).map_err(input)?.edges().collect())
}

#[pymodule]
fn gsx_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(render, m)?)?;
    m.add_function(wrap_pyfunction!(cost_report, m)?)?;
    m.add_function(wrap_pyfunction!(local_complement, m)?)?;
    m.add("PlanningError", m.py().get_type::<PlanningError>())?;
    m.add("VerificationError", m.py().get_type::<VerificationError>())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BELL: &str = r#"{"grid":{"width":6,"height":6},"targets":[{"label":"a","x":0,"y":5},{"label":"b","x":5,"y":0}],"edges":[["a","b"]]}"#;

    #[test]
    fn plan_verify_render() {
        let p = plan_json(BELL, Some("ovde")).ok().unwrap();
        assert!(verify_json(&p, "tableau", Some(1)).is_ok());
        assert!(render_json(&p, "ascii").ok().unwrap().contains('T'));
        assert!(matches!(render_json(&p, "png"), Err(Fail::Input(_))));
    }

    #[test]
    fn bad_strategy_is_an_input_error() {
        assert!(matches!(plan_json(BELL, Some("fastest")), Err(Fail::Input(_))));
    }
}
