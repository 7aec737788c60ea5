//! Python bindings: configurations, volume types, the canonical chart, sets and
//! the counting experiments. Errors surface as `ValueError`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use voltype_core::measure::{
    box_count_volume_types_multi, chain_measure_estimate_multi, count_distinct_volume_types,
    lp_scaling_check, pair_count_statistic, sharpness_scaling, BoxCountReport, CountOptions,
    CountReport, PairCountOptions, PairMap, SpectralMeasure, SpectralOptions, TupleMode,
};
use voltype_core::sets::sample_configurations;
use voltype_core::{self as core, ControlKind, LatticeSpec};

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// `k` points of `R^d`, given as a sequence of equal-length rows.
#[pyclass(frozen, module = "voltype")]
struct Configuration {
    inner: core::Configuration,
}

#[pymethods]
impl Configuration {
    #[new]
    fn new(points: Vec<Vec<f64>>) -> PyResult<Self> {
        let d = points.first().map_or(0, Vec::len);
        Ok(Self {
            inner: core::Configuration::new(d, &points).map_err(err)?,
        })
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    fn points(&self) -> Vec<Vec<f64>> {
        self.inner.points().map(<[f64]>::to_vec).collect()
    }

    /// Signed volumes over all d-subsets in lexicographic order.
    fn volume_type(&self) -> Vec<f64> {
        core::volume_type(&self.inner).values
    }

    fn volume_labels(&self) -> Vec<String> {
        core::volume_type(&self.inner).labels()
    }

    fn chain_volumes(&self) -> Vec<f64> {
        core::chain_volume_type(&self.inner).values
    }

    #[pyo3(signature = (tol = 1e-10))]
    fn is_degenerate(&self, tol: f64) -> bool {
        core::is_degenerate(&self.inner, tol)
    }

    /// Applies the row-major d x d matrix `g` to every point.
    fn transformed(&self, g: Vec<Vec<f64>>) -> PyResult<Self> {
        let d = self.inner.d();
        if g.len() != d || g.iter().any(|r| r.len() != d) {
            return Err(PyValueError::new_err(format!("g must be {d} x {d}")));
        }
        let flat: Vec<f64> = g.concat();
        Ok(Self {
            inner: self.inner.transformed(&flat),
        })
    }

    #[pyo3(signature = (tol = 1e-10))]
    fn canonical(&self, tol: f64) -> PyResult<CanonicalCoordinates> {
        Ok(CanonicalCoordinates {
            inner: core::canonical_form(&self.inner, tol).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Configuration(d={}, k={})", self.inner.d(), self.inner.k())
    }
}

/// Chart coordinates `(t, z)` of a volume type.
#[pyclass(frozen, module = "voltype")]
struct CanonicalCoordinates {
    inner: core::CanonicalCoordinates,
}

#[pymethods]
impl CanonicalCoordinates {
    #[new]
    fn new(d: usize, k: usize, t: f64, z: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: core::CanonicalCoordinates::new(d, k, t, z).map_err(err)?,
        })
    }

    #[getter]
    fn t(&self) -> f64 {
        self.inner.t()
    }

    #[getter]
    fn z(&self) -> Vec<f64> {
        self.inner.z().to_vec()
    }

    fn to_vector(&self) -> Vec<f64> {
        self.inner.to_vector()
    }

    /// The volume type this chart point represents.
    fn embed(&self) -> Vec<f64> {
        core::embed_phi(&self.inner).values
    }

    /// The representative configuration `(e_1, .., e_{d-1}, t e_d, z..)`.
    fn configuration(&self) -> Configuration {
        Configuration {
            inner: self.inner.configuration(),
        }
    }

    /// Numerical rank of the embedding's Jacobian and its singular values.
    #[pyo3(signature = (step = None))]
    fn jacobian<'py>(&self, py: Python<'py>, step: Option<f64>) -> PyResult<Bound<'py, PyDict>> {
        let j = core::phi_jacobian(&self.inner, step).map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("rank", j.rank)?;
        out.set_item("full_rank", j.full_rank)?;
        out.set_item("singular_values", j.singular_values)?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!(
            "CanonicalCoordinates(t={}, z={:?})",
            self.inner.t(),
            self.inner.z()
        )
    }
}

/// Finite union of balls with a common radius, with its sampling measure.
#[pyclass(frozen, module = "voltype")]
struct ThickenedSet {
    inner: core::ThickenedSet,
}

#[pymethods]
impl ThickenedSet {
    #[staticmethod]
    fn sharpness(q: u32, s: f64, d: usize) -> PyResult<Self> {
        let spec = LatticeSpec::new(q, s, d).map_err(err)?;
        Ok(Self {
            inner: core::build_sharpness_set(&spec),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (d, depth, ratio = 1.0 / 3.0))]
    fn cantor_product(d: usize, depth: u32, ratio: f64) -> PyResult<Self> {
        Self::control(ControlKind::CantorProduct { d, depth, ratio })
    }

    #[staticmethod]
    #[pyo3(signature = (d, n, seed = 0))]
    fn annulus_uniform(d: usize, n: usize, seed: u64) -> PyResult<Self> {
        Self::control(ControlKind::AnnulusUniform { d, n, seed })
    }

    #[staticmethod]
    #[pyo3(signature = (normal, n, seed = 0))]
    fn hyperplane(normal: Vec<f64>, n: usize, seed: u64) -> PyResult<Self> {
        Self::control(ControlKind::Hyperplane { normal, n, seed })
    }

    #[staticmethod]
    #[pyo3(signature = (points, radius = 0.0))]
    fn from_points(points: Vec<Vec<f64>>, radius: f64) -> PyResult<Self> {
        Ok(Self {
            inner: core::ThickenedSet::from_points(&points, radius, "points").map_err(err)?,
        })
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.inner.radius()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn centers(&self) -> Vec<Vec<f64>> {
        self.inner
            .centers()
            .chunks_exact(self.inner.d())
            .map(<[f64]>::to_vec)
            .collect()
    }

    #[pyo3(signature = (n, seed = 0))]
    fn sample(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        core::sample_points(&self.inner, n, seed)
            .chunks_exact(self.inner.d())
            .map(<[f64]>::to_vec)
            .collect()
    }

    /// Distinct volume types of k-tuples of centers; `samples` switches to sampled mode.
    #[pyo3(signature = (k, delta = None, samples = None, seed = 0, budget = None))]
    fn count_distinct<'py>(
        &self,
        py: Python<'py>,
        k: usize,
        delta: Option<f64>,
        samples: Option<u64>,
        seed: u64,
        budget: Option<u64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let opts = count_options(delta, samples, seed, budget);
        let r = py
            .detach(|| count_distinct_volume_types(&self.inner, k, &opts))
            .map_err(err)?;
        count_dict(py, &r)
    }

    /// Box counts of volume types (`map="volume_chart"`) or chain volumes (`map="chain"`)
    /// of `samples` sampled k-tuples, one dict per epsilon.
    #[pyo3(signature = (k, epsilons, samples = 100_000, seed = 0, map = "volume_chart"))]
    fn box_count<'py>(
        &self,
        py: Python<'py>,
        k: usize,
        epsilons: Vec<f64>,
        samples: usize,
        seed: u64,
        map: &str,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let pair_map = parse_map(map)?;
        let reports = py
            .detach(|| {
                let tuples = sample_configurations(&self.inner, k, samples, seed)?;
                match pair_map {
                    PairMap::VolumeChart => box_count_volume_types_multi(&tuples, &epsilons),
                    PairMap::Chain => chain_measure_estimate_multi(&tuples, &epsilons),
                }
            })
            .map_err(err)?;
        reports.iter().map(|r| box_dict(py, r)).collect()
    }

    /// Pair statistic `eps^{-n} P(|Phi(x) - Phi(y)| <= eps)`, one dict per epsilon.
    #[pyo3(signature = (k, epsilons, pairs = 1_000_000, seed = 0, map = "volume_chart"))]
    fn pair_statistic<'py>(
        &self,
        py: Python<'py>,
        k: usize,
        epsilons: Vec<f64>,
        pairs: u64,
        seed: u64,
        map: &str,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let opts = PairCountOptions {
            k,
            map: parse_map(map)?,
            epsilons,
            num_pairs: pairs,
            seed,
        };
        let reports = py
            .detach(|| pair_count_statistic(&self.inner, &opts))
            .map_err(err)?;
        reports
            .iter()
            .map(|r| {
                let out = PyDict::new(py);
                out.set_item("epsilon", r.epsilon)?;
                out.set_item("n", r.n)?;
                out.set_item("num_pairs", r.num_pairs)?;
                out.set_item("skipped_pairs", r.skipped_pairs)?;
                out.set_item("hits", r.hits)?;
                out.set_item("statistic", r.statistic)?;
                out.set_item("standard_error", r.standard_error)?;
                Ok(out)
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "ThickenedSet(d={}, n={}, radius={})",
            self.inner.d(),
            self.inner.len(),
            self.inner.radius()
        )
    }
}

impl ThickenedSet {
    fn control(kind: ControlKind) -> PyResult<Self> {
        Ok(Self {
            inner: core::control_set(&kind).map_err(err)?,
        })
    }
}

fn parse_map(map: &str) -> PyResult<PairMap> {
    match map {
        "volume_chart" => Ok(PairMap::VolumeChart),
        "chain" => Ok(PairMap::Chain),
        other => Err(PyValueError::new_err(format!(
            "unknown map {other:?}; use volume_chart or chain"
        ))),
    }
}

fn count_options(
    delta: Option<f64>,
    samples: Option<u64>,
    seed: u64,
    budget: Option<u64>,
) -> CountOptions {
    let mut opts = CountOptions::default();
    if let Some(delta) = delta {
        opts.delta = delta;
    }
    if let Some(n) = samples {
        opts.mode = TupleMode::Sampled { n, seed };
    }
    if let Some(budget) = budget {
        opts.budget = budget;
    }
    opts
}

fn count_dict<'py>(py: Python<'py>, r: &CountReport) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("q", r.q)?;
    out.set_item("s", r.s)?;
    out.set_item("d", r.d)?;
    out.set_item("k", r.k)?;
    out.set_item("num_centers", r.num_centers)?;
    out.set_item("num_tuples", r.num_tuples_evaluated)?;
    out.set_item("exhaustive", r.exhaustive)?;
    out.set_item("distinct_count", r.distinct_count)?;
    out.set_item("epsilon", r.epsilon)?;
    out.set_item("measure_upper_estimate", r.measure_upper_estimate)?;
    Ok(out)
}

fn box_dict<'py>(py: Python<'py>, r: &BoxCountReport) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("epsilon", r.epsilon)?;
    out.set_item("n", r.n)?;
    out.set_item("num_samples", r.num_samples)?;
    out.set_item("occupied_boxes", r.occupied_boxes)?;
    out.set_item("degenerate_boxes", r.degenerate_boxes)?;
    out.set_item("measure_estimate", r.measure_estimate)?;
    out.set_item("skipped_degenerate_fraction", r.skipped_degenerate_fraction)?;
    Ok(out)
}

#[pyfunction]
fn volume_type(points: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    Ok(Configuration::new(points)?.volume_type())
}

#[pyfunction]
#[pyo3(signature = (x, y, tol = 1e-9))]
fn same_volume_type(x: &Configuration, y: &Configuration, tol: f64) -> PyResult<bool> {
    core::same_volume_type(&x.inner, &y.inner, tol).map_err(err)
}

/// The unimodular `g` with `y = g x`, as rows; raises if there is none.
#[pyfunction]
#[pyo3(signature = (x, y, tol = 1e-9))]
fn recover_group_element(
    x: &Configuration,
    y: &Configuration,
    tol: f64,
) -> PyResult<Vec<Vec<f64>>> {
    let g = core::recover_group_element(&x.inner, &y.inner, tol).map_err(err)?;
    Ok(g.matrix()
        .chunks_exact(x.inner.d())
        .map(<[f64]>::to_vec)
        .collect())
}

#[pyfunction]
fn manifold_dim(k: usize, d: usize) -> usize {
    core::manifold_dim(k, d)
}

/// Distinct counts on sharpness sets across `qs`, with the log-log slope.
#[pyfunction]
#[pyo3(signature = (qs, s, d = 2, k = 2, delta = None, samples = None, seed = 0, budget = None))]
#[allow(clippy::too_many_arguments)]
fn sharpness<'py>(
    py: Python<'py>,
    qs: Vec<u32>,
    s: f64,
    d: usize,
    k: usize,
    delta: Option<f64>,
    samples: Option<u64>,
    seed: u64,
    budget: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = count_options(delta, samples, seed, budget);
    let report = py
        .detach(|| sharpness_scaling(&qs, s, d, k, &opts))
        .map_err(err)?;
    let out = PyDict::new(py);
    let rows = report
        .reports
        .iter()
        .map(|r| count_dict(py, r))
        .collect::<PyResult<Vec<_>>>()?;
    out.set_item("reports", rows)?;
    out.set_item("slope", report.slope)?;
    out.set_item("reference_exponent", report.reference_exponent)?;
    out.set_item("warnings", report.warnings)?;
    Ok(out)
}

/// Littlewood-Paley norms of `uniform` on [0, 1] or a `cantor` measure of the given depth.
#[pyfunction]
#[pyo3(signature = (measure, depth = 10, grid_size = 65536, j_min = 4, j_max = 12))]
fn spectral<'py>(
    py: Python<'py>,
    measure: &str,
    depth: u32,
    grid_size: usize,
    j_min: u32,
    j_max: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let m = match measure {
        "uniform" => SpectralMeasure::Uniform {
            start: 0.0,
            end: 1.0,
        },
        "cantor" => SpectralMeasure::Cantor {
            depth,
            ratio: 1.0 / 3.0,
        },
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown measure {other:?}; use uniform or cantor"
            )))
        }
    };
    let opts = SpectralOptions {
        grid_size,
        j_min,
        j_max,
        ..SpectralOptions::default()
    };
    let r = py.detach(|| lp_scaling_check(&m, &opts)).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("s", r.s)?;
    out.set_item("target_exponent", r.target_exponent)?;
    out.set_item("total_mass", r.total_mass)?;
    out.set_item("scales", r.scales)?;
    out.set_item("sup_norms", r.sup_norms)?;
    out.set_item("l2_norms", r.l2_norms)?;
    out.set_item("fitted_slope_sup", r.fitted_slope_sup)?;
    out.set_item("fitted_slope_l2", r.fitted_slope_l2)?;
    Ok(out)
}

#[pymodule]
fn voltype(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", core::VERSION)?;
    m.add_class::<Configuration>()?;
    m.add_class::<CanonicalCoordinates>()?;
    m.add_class::<ThickenedSet>()?;
    m.add_function(wrap_pyfunction!(volume_type, m)?)?;
    m.add_function(wrap_pyfunction!(same_volume_type, m)?)?;
    m.add_function(wrap_pyfunction!(recover_group_element, m)?)?;
    m.add_function(wrap_pyfunction!(manifold_dim, m)?)?;
    m.add_function(wrap_pyfunction!(sharpness, m)?)?;
    m.add_function(wrap_pyfunction!(spectral, m)?)?;
    Ok(())
}
