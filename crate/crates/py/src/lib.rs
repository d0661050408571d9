//! Python bindings for the `gmconn` library.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use gmconn::approx::{default_strips, greedy_uniform, horizontal_manhattan, naive_vertical_dc, vertical_manhattan};
use gmconn::bounds::{boundary_is, ir_exact, vs_exact};
use gmconn::exact::{exact_opt, ExactConfig};
use gmconn::generators;
use gmconn::io;
use gmconn::model::SCALE;
use gmconn::sat::{sat_reduce, CnfFormula};
use gmconn::special::{disk_solve, kpartite_solve, two_disk_solve, unit_disk_solve, DiskMode};
use gmconn::svg::render_svg;
use gmconn::verify::verify_solution;
use gmconn::{GmcError, Point, Pt};

fn err(e: GmcError) -> PyErr {
    match e {
        GmcError::CapExceeded { .. } | GmcError::BudgetExceeded(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn unscaled(v: i64) -> f64 {
    v as f64 / SCALE as f64
}

/// A set of points with demand pairs.
#[pyclass(name = "Instance", module = "gmconn_py", skip_from_py_object)]
#[derive(Clone)]
struct PyInstance {
    inner: gmconn::Instance,
}

#[pymethods]
impl PyInstance {
    /// Explicit instance from `[(id, x, y), ...]` and `[(id, id), ...]`.
    #[new]
    fn new(points: Vec<(String, i64, i64)>, demands: Vec<(String, String)>) -> PyResult<Self> {
        let pts = points
            .into_iter()
            .map(|(id, x, y)| Ok(Point::new(id, Pt::from_input(x, y)?)))
            .collect::<gmconn::Result<Vec<_>>>()
            .map_err(err)?;
        let index = |id: &str| {
            pts.iter()
                .position(|p| p.id == id)
                .ok_or_else(|| PyValueError::new_err(format!("unknown point `{id}`")))
        };
        let pairs = demands
            .iter()
            .map(|(a, b)| Ok((index(a)?, index(b)?)))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyInstance {
            inner: gmconn::Instance::explicit(pts, pairs).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyInstance {
            inner: io::instance_from_str(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        io::instance_to_string(&self.inner).map_err(err)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind.name()
    }

    /// `[(id, x, y), ...]` in input units.
    #[getter]
    fn points(&self) -> Vec<(String, f64, f64)> {
        self.inner
            .points
            .iter()
            .map(|p| (p.id.clone(), unscaled(p.pos.x), unscaled(p.pos.y)))
            .collect()
    }

    #[getter]
    fn demands(&self) -> Vec<(String, String)> {
        self.inner
            .demands
            .iter()
            .map(|d| (self.inner.points[d.a].id.clone(), self.inner.points[d.b].id.clone()))
            .collect()
    }

    fn is_strict(&self) -> bool {
        self.inner.is_strict()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(kind={}, points={}, demands={})",
            self.inner.kind.name(),
            self.inner.len(),
            self.inner.demands.len()
        )
    }
}

/// Auxiliary points added to an instance.
#[pyclass(name = "Solution", module = "gmconn_py", skip_from_py_object)]
#[derive(Clone)]
struct PySolution {
    inner: gmconn::Solution,
}

#[pymethods]
impl PySolution {
    #[new]
    fn new(points: Vec<(f64, f64)>) -> PyResult<Self> {
        let scale = |v: f64| {
            let s = v * SCALE as f64;
            if s.fract() != 0.0 {
                Err(PyValueError::new_err(format!("{v} is not a multiple of 1/{SCALE}")))
            } else {
                Ok(s as i64)
            }
        };
        let aux = points
            .into_iter()
            .map(|(x, y)| Ok(Pt::new(scale(x)?, scale(y)?)))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PySolution {
            inner: gmconn::Solution::new(aux),
        })
    }

    #[getter]
    fn cost(&self) -> usize {
        self.inner.cost()
    }

    #[getter]
    fn points(&self) -> Vec<(f64, f64)> {
        self.inner.aux.iter().map(|p| (unscaled(p.x), unscaled(p.y))).collect()
    }

    fn to_json(&self) -> String {
        io::solution_to_string(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.cost()
    }

    fn __repr__(&self) -> String {
        format!("Solution(cost={})", self.inner.cost())
    }
}

/// Run a solver by name: horizontal, vertical, naive, greedy, unit-disk,
/// disk, disk-dense, two-disk, kpartite or exact.
#[pyfunction]
#[pyo3(signature = (instance, alg, strips=None))]
fn solve(instance: &PyInstance, alg: &str, strips: Option<usize>) -> PyResult<PySolution> {
    let inst = &instance.inner;
    let sol = match alg {
        "horizontal" => Ok(horizontal_manhattan(inst)),
        "vertical" => vertical_manhattan(inst, strips.unwrap_or_else(|| default_strips(inst.len()))),
        "naive" => Ok(naive_vertical_dc(inst)),
        "greedy" => greedy_uniform(inst),
        "unit-disk" => unit_disk_solve(inst),
        "disk" => disk_solve(inst, DiskMode::Closest).map(|r| r.0),
        "disk-dense" => disk_solve(inst, DiskMode::Dense).map(|r| r.0),
        "two-disk" => two_disk_solve(inst),
        "kpartite" => kpartite_solve(inst),
        "exact" => exact_opt(inst, &ExactConfig::default()).map(|r| r.1),
        other => return Err(PyValueError::new_err(format!("unknown algorithm `{other}`"))),
    }
    .map_err(err)?;
    Ok(PySolution { inner: sol })
}

/// Whether every demand is connected; returns `(feasible, violated pairs)`.
#[pyfunction]
fn verify(instance: &PyInstance, solution: &PySolution) -> (bool, Vec<(String, String)>) {
    let inst = &instance.inner;
    let r = verify_solution(inst, &solution.inner);
    let violated = r
        .violated
        .iter()
        .map(|d| (inst.points[d.a].id.clone(), inst.points[d.b].id.clone()))
        .collect();
    (r.feasible, violated)
}

#[pyfunction]
fn bound_is(instance: &PyInstance) -> usize {
    boundary_is(&instance.inner).0
}

#[pyfunction]
#[pyo3(signature = (instance, cap=20))]
fn bound_ir(instance: &PyInstance, cap: usize) -> PyResult<usize> {
    ir_exact(&instance.inner, cap).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (instance, cap=16))]
fn bound_vs(instance: &PyInstance, cap: usize) -> PyResult<usize> {
    vs_exact(&instance.inner, cap).map(|r| r.0).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (instance, cap=24, budget=5_000_000))]
fn optimum(instance: &PyInstance, cap: usize, budget: u64) -> PyResult<(usize, PySolution)> {
    let (k, sol) = exact_opt(&instance.inner, &ExactConfig { cap, budget }).map_err(err)?;
    Ok((k, PySolution { inner: sol }))
}

#[pyfunction]
#[pyo3(signature = (instance, solution=None))]
fn render(instance: &PyInstance, solution: Option<&PySolution>) -> String {
    render_svg(&instance.inner, solution.map(|s| &s.inner), None)
}

#[pyfunction]
#[pyo3(signature = (n, density, seed=0))]
fn gen_random(n: usize, density: f64, seed: u64) -> PyResult<PyInstance> {
    Ok(PyInstance {
        inner: generators::gen_random(n, density, seed).map_err(err)?,
    })
}

#[pyfunction]
fn gen_diagonal(n: usize) -> PyResult<PyInstance> {
    Ok(PyInstance {
        inner: generators::gen_diagonal(n).map_err(err)?,
    })
}

#[pyfunction]
fn gen_triangular(n: usize) -> PyResult<PyInstance> {
    Ok(PyInstance {
        inner: generators::gen_triangular(n).map_err(err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (n, k, seed=0))]
fn gen_kpartite(n: usize, k: usize, seed: u64) -> PyResult<PyInstance> {
    Ok(PyInstance {
        inner: generators::gen_kpartite(n, k, seed).map_err(err)?,
    })
}

/// Compiled 3-CNF formula.
#[pyclass(name = "Gadget", module = "gmconn_py")]
struct PyGadget {
    inner: gmconn::sat::GadgetInstance,
}

#[pymethods]
impl PyGadget {
    #[getter]
    fn alpha(&self) -> usize {
        self.inner.alpha
    }

    #[getter]
    fn instance(&self) -> PyInstance {
        PyInstance {
            inner: self.inner.instance.clone(),
        }
    }

    /// Boolean solution for an assignment; returns `(solution, satisfied clause indices)`.
    fn boolean_solution(&self, assignment: Vec<bool>) -> PyResult<(PySolution, Vec<usize>)> {
        let (sol, sat) = self.inner.boolean_solution(&assignment).map_err(err)?;
        Ok((PySolution { inner: sol }, sat.into_iter().collect()))
    }
}

/// Compile a formula given as a DIMACS string.
#[pyfunction]
fn reduce_dimacs(text: &str) -> PyResult<PyGadget> {
    let phi = CnfFormula::parse_dimacs(text).map_err(err)?;
    Ok(PyGadget {
        inner: sat_reduce(&phi).map_err(err)?,
    })
}

#[pymodule]
fn gmconn_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PySolution>()?;
    m.add_class::<PyGadget>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(bound_is, m)?)?;
    m.add_function(wrap_pyfunction!(bound_ir, m)?)?;
    m.add_function(wrap_pyfunction!(bound_vs, m)?)?;
    m.add_function(wrap_pyfunction!(optimum, m)?)?;
    m.add_function(wrap_pyfunction!(render, m)?)?;
    m.add_function(wrap_pyfunction!(gen_random, m)?)?;
    m.add_function(wrap_pyfunction!(gen_diagonal, m)?)?;
    m.add_function(wrap_pyfunction!(gen_triangular, m)?)?;
    m.add_function(wrap_pyfunction!(gen_kpartite, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_dimacs, m)?)?;
    Ok(())
}
