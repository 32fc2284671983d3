//! Python bindings: shapes, point clouds, the Monte-Carlo estimator, persistence
//! diagrams and the Steiner extraction.

use persivol_core::cubical::{random_pair_complex, FilteredPairComplex};
use persivol_core::geometry::{self, ShapeSpec};
use persivol_core::montecarlo::{self, EstimatorConfig};
use persivol_core::persistence::{self, Bar, PersistenceDiagram};
use persivol_core::{steiner, Error};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    if e.is_configuration() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

#[pyclass(name = "Shape", module = "persivol", from_py_object)]
#[derive(Clone)]
struct PyShape(ShapeSpec);

#[pymethods]
impl PyShape {
    #[staticmethod]
    fn ball(dim: usize, radius: f64) -> PyResult<Self> {
        let s = ShapeSpec::ball(dim, radius);
        s.validate().map_err(py_err)?;
        Ok(Self(s))
    }

    #[staticmethod]
    #[pyo3(name = "box")]
    fn cuboid(sides: Vec<f64>) -> PyResult<Self> {
        let s = ShapeSpec::cuboid(sides);
        s.validate().map_err(py_err)?;
        Ok(Self(s))
    }

    #[staticmethod]
    fn segment(dim: usize, length: f64) -> PyResult<Self> {
        let s = ShapeSpec::segment(dim, length);
        s.validate().map_err(py_err)?;
        Ok(Self(s))
    }

    #[staticmethod]
    fn annulus(dim: usize, inner_radius: f64, outer_radius: f64) -> PyResult<Self> {
        let s = ShapeSpec::annulus(dim, inner_radius, outer_radius);
        s.validate().map_err(py_err)?;
        Ok(Self(s))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim
    }

    #[getter]
    fn is_convex(&self) -> bool {
        self.0.is_convex()
    }

    /// `n` uniform points from the shape.
    fn sample(&self, n: usize, seed: u64) -> PyResult<PyPointCloud> {
        geometry::generate_shape(&self.0, n, seed)
            .map(PyPointCloud)
            .map_err(py_err)
    }

    /// Exact `V_0..V_d` of the offset `X^t`.
    #[pyo3(signature = (t = 0.0))]
    fn intrinsic_volumes(&self, t: f64) -> PyResult<Vec<f64>> {
        geometry::exact_intrinsic_volumes(&self.0, t).map_err(py_err)
    }

    /// Exact `Vol(X^r)`.
    fn steiner_value(&self, r: f64) -> PyResult<f64> {
        geometry::exact_steiner_value(&self.0, r).map_err(py_err)
    }

    fn distance(&self, p: Vec<f64>) -> PyResult<f64> {
        if p.len() != self.0.dim {
            return Err(PyValueError::new_err("point has the wrong dimension"));
        }
        Ok(self.0.distance(&p))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("shape serializes")
    }

    fn __repr__(&self) -> String {
        format!("Shape({})", self.to_json())
    }
}

#[pyclass(name = "PointCloud", module = "persivol", from_py_object)]
#[derive(Clone)]
struct PyPointCloud(geometry::PointCloud);

#[pymethods]
impl PyPointCloud {
    #[new]
    fn new(points: Vec<Vec<f64>>) -> PyResult<Self> {
        let dim = points.first().map_or(0, Vec::len);
        geometry::PointCloud::from_points(dim, &points)
            .map(Self)
            .map_err(py_err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn points(&self) -> Vec<Vec<f64>> {
        self.0.iter().map(<[f64]>::to_vec).collect()
    }

    /// Every point moved by a uniform draw from the `epsilon`-ball.
    fn perturb(&self, epsilon: f64, seed: u64) -> PyResult<Self> {
        geometry::perturb_hausdorff(&self.0, epsilon, seed)
            .map(Self)
            .map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("PointCloud(n={}, dim={})", self.0.len(), self.0.dim())
    }
}

#[pyclass(name = "EstimatorConfig", module = "persivol", from_py_object)]
#[derive(Clone)]
struct PyConfig(EstimatorConfig);

#[pymethods]
impl PyConfig {
    #[new]
    #[pyo3(signature = (epsilon, grid_spacing, mc_samples, seed, dim, r_max = 1.0, grid_correction = true))]
    fn new(
        epsilon: f64,
        grid_spacing: f64,
        mc_samples: usize,
        seed: u64,
        dim: usize,
        r_max: f64,
        grid_correction: bool,
    ) -> PyResult<Self> {
        let c = EstimatorConfig {
            r_max,
            grid_correction,
            ..EstimatorConfig::new(epsilon, grid_spacing, mc_samples, seed, dim)
        };
        c.validate().map_err(py_err)?;
        Ok(Self(c))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let c: EstimatorConfig =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        c.validate().map_err(py_err)?;
        Ok(Self(c))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("config serializes")
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.0.epsilon
    }

    #[getter]
    fn r_max(&self) -> f64 {
        self.0.r_max
    }

    #[getter]
    fn mc_samples(&self) -> usize {
        self.0.mc_samples
    }

    fn __repr__(&self) -> String {
        format!("EstimatorConfig({})", self.to_json())
    }
}

#[pyclass(
    name = "VolumeEstimate",
    module = "persivol",
    frozen,
    skip_from_py_object
)]
struct PyVolumeEstimate(montecarlo::VolumeEstimate);

#[pymethods]
impl PyVolumeEstimate {
    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.values.clone()
    }

    #[getter]
    fn stderr(&self) -> Vec<f64> {
        self.0.stderr.clone()
    }

    #[getter]
    fn inner_products(&self) -> Vec<f64> {
        self.0.inner_products.clone()
    }

    #[getter]
    fn samples_in_support(&self) -> usize {
        self.0.samples_in_support
    }

    #[getter]
    fn domain_volume(&self) -> f64 {
        self.0.domain_volume
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("estimate serializes")
    }

    fn __repr__(&self) -> String {
        format!(
            "VolumeEstimate(values={:?}, stderr={:?})",
            self.0.values, self.0.stderr
        )
    }
}

/// Runs the full Monte-Carlo estimator. `workers=None` uses all cores.
#[pyfunction]
#[pyo3(signature = (cloud, config, workers = None))]
fn estimate_volumes(
    py: Python<'_>,
    cloud: &PyPointCloud,
    config: &PyConfig,
    workers: Option<usize>,
) -> PyResult<PyVolumeEstimate> {
    let (cloud, config) = (cloud.0.clone(), config.0.clone());
    let run = py.detach(move || {
        montecarlo::Estimator::new(&cloud, &config)?
            .run(workers)?
            .volume_estimate()
    });
    run.map(PyVolumeEstimate).map_err(py_err)
}

/// `⟨χ(D^x(·)), P^R_j⟩` for `j = 0..d` at one point.
#[pyfunction]
fn per_sample(x: Vec<f64>, cloud: &PyPointCloud, config: &PyConfig) -> PyResult<Vec<f64>> {
    montecarlo::per_sample(&x, &cloud.0, &config.0).map_err(py_err)
}

/// `(r, Q̂(r), stderr)` for each radius.
#[pyfunction]
fn steiner_function_probe(
    py: Python<'_>,
    cloud: &PyPointCloud,
    config: &PyConfig,
    r_values: Vec<f64>,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let (cloud, config) = (cloud.0.clone(), config.0.clone());
    let probes = py.detach(move || montecarlo::steiner_function_probe(&cloud, &config, &r_values));
    Ok(probes
        .map_err(py_err)?
        .into_iter()
        .map(|p| (p.r, p.value, p.stderr))
        .collect())
}

#[pyclass(name = "PersistenceDiagram", module = "persivol", from_py_object)]
#[derive(Clone)]
struct PyDiagram(PersistenceDiagram);

#[pymethods]
impl PyDiagram {
    /// Bars as `(degree, birth, death)`; `death = float("inf")` for essential classes.
    #[new]
    fn new(bars: Vec<(usize, f64, f64)>) -> PyResult<Self> {
        let bars = bars
            .into_iter()
            .map(|(j, b, d)| {
                if d == f64::INFINITY {
                    Bar::infinite(j, b)
                } else {
                    Bar::finite(j, b, d)
                }
            })
            .collect();
        let d = PersistenceDiagram::new(bars);
        d.check(usize::MAX).map_err(py_err)?;
        Ok(Self(d))
    }

    fn bars(&self) -> Vec<(usize, f64, f64)> {
        self.0
            .clone()
            .sorted()
            .bars
            .iter()
            .map(|b| (b.degree, b.birth, b.death.value()))
            .collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// Number of bars whose closed interval meets `[a, b]`.
    fn count_bars(&self, a: f64, b: f64) -> PyResult<usize> {
        persistence::count_bars(&self.0, a, b).map_err(py_err)
    }

    fn euler_characteristic(&self, r: f64) -> i64 {
        persistence::euler_characteristic(&self.0, r)
    }

    fn to_text(&self) -> String {
        self.0.clone().sorted().to_text()
    }

    fn __repr__(&self) -> String {
        format!("PersistenceDiagram({} bars)", self.0.len())
    }
}

#[pyfunction]
fn bottleneck_distance(a: &PyDiagram, b: &PyDiagram) -> f64 {
    persistence::bottleneck_distance(&a.0, &b.0)
}

#[pyclass(name = "PairComplex", module = "persivol", frozen, skip_from_py_object)]
struct PyComplex(FilteredPairComplex);

#[pymethods]
impl PyComplex {
    /// Seeded random pair complex with at most `max_cells` cells.
    #[staticmethod]
    fn random(max_cells: usize, dim: usize, seed: u64) -> PyResult<Self> {
        random_pair_complex(max_cells, dim, seed)
            .map(Self)
            .map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn a_count(&self) -> usize {
        self.0.a_count()
    }

    fn image_persistence(&self) -> PyResult<PyDiagram> {
        persistence::image_persistence(&self.0)
            .map(PyDiagram)
            .map_err(py_err)
    }

    fn ordinary_persistence(&self) -> PyResult<PyDiagram> {
        persistence::ordinary_persistence(&self.0)
            .map(PyDiagram)
            .map_err(py_err)
    }

    /// Image diagram recomputed from ranks; slow, for checking.
    fn oracle_diagram(&self) -> PyResult<PyDiagram> {
        persistence::diagram_from_ranks(&self.0)
            .map(PyDiagram)
            .map_err(py_err)
    }

    fn dump(&self) -> String {
        self.0.dump()
    }
}

/// Coefficient lists (ascending degree) of the orthonormal basis on `[0, R]`.
#[pyfunction]
#[pyo3(signature = (d, r_max = 1.0))]
fn legendre_basis(d: usize, r_max: f64) -> PyResult<Vec<Vec<f64>>> {
    Ok(steiner::legendre_basis(d, r_max)
        .map_err(py_err)?
        .into_iter()
        .map(|p| p.coeffs)
        .collect())
}

/// Volumes `V_0..V_d` from the inner products with the basis.
#[pyfunction]
#[pyo3(signature = (inner_products, d, r_max = 1.0))]
fn project_and_extract(inner_products: Vec<f64>, d: usize, r_max: f64) -> PyResult<Vec<f64>> {
    steiner::project_and_extract(&inner_products, r_max, d).map_err(py_err)
}

#[pyfunction]
fn error_constant(i: usize, d: usize) -> PyResult<f64> {
    steiner::error_constant(i, d).map_err(py_err)
}

/// `(breakpoints, values)` of `r ↦ χ(D(r))` on `[0, R]`.
#[pyfunction]
#[pyo3(signature = (diagram, r_max = 1.0))]
fn chi_profile(diagram: &PyDiagram, r_max: f64) -> PyResult<(Vec<f64>, Vec<i64>)> {
    let p = steiner::chi_profile(&diagram.0, r_max).map_err(py_err)?;
    Ok((p.breakpoints().to_vec(), p.values().to_vec()))
}

#[pymodule]
#[pyo3(name = "persivol")]
fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", persivol_core::VERSION)?;
    m.add_class::<PyShape>()?;
    m.add_class::<PyPointCloud>()?;
    m.add_class::<PyConfig>()?;
    m.add_class::<PyVolumeEstimate>()?;
    m.add_class::<PyDiagram>()?;
    m.add_class::<PyComplex>()?;
    m.add_function(wrap_pyfunction!(estimate_volumes, m)?)?;
    m.add_function(wrap_pyfunction!(per_sample, m)?)?;
    m.add_function(wrap_pyfunction!(steiner_function_probe, m)?)?;
    m.add_function(wrap_pyfunction!(bottleneck_distance, m)?)?;
    m.add_function(wrap_pyfunction!(legendre_basis, m)?)?;
    m.add_function(wrap_pyfunction!(project_and_extract, m)?)?;
    m.add_function(wrap_pyfunction!(error_constant, m)?)?;
    m.add_function(wrap_pyfunction!(chi_profile, m)?)?;
    Ok(())
}
