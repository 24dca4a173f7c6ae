//! Python module `umbilic`: surfaces, principal directions, indices,
//! umbilic detection and classification, lines of curvature.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use umbilic_core as core;
use umbilic_core::umbilic::enrich;
use umbilic_core::{Branch, MongeSurface, TraceOptions};

create_exception!(umbilic, NumericalError, PyRuntimeError);

fn to_py(e: core::Error) -> PyErr {
    if e.is_numerical() {
        NumericalError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn branch(name: &str) -> PyResult<Branch> {
    name.parse().map_err(to_py)
}

#[pyclass(frozen, module = "umbilic")]
pub struct Surface {
    inner: MongeSurface,
}

#[pymethods]
impl Surface {
    /// `sphere_base` adds `1 - sqrt(1 - x^2 - y^2)`; `quadratic` is `[a, b, c]`
    /// for `a x^2 + 2 b x y + c y^2`; `poly` lists `(i, j, coeff)` terms.
    #[new]
    #[pyo3(signature = (sphere_base, quadratic, poly, domain_radius))]
    fn new(
        sphere_base: bool,
        quadratic: [f64; 3],
        poly: Vec<(u32, u32, f64)>,
        domain_radius: f64,
    ) -> PyResult<Self> {
        MongeSurface::new(sphere_base, quadratic, poly, domain_radius)
            .map(|inner| Surface { inner })
            .map_err(to_py)
    }

    /// Sphere base plus `sum a_k x^(d-k) y^k`.
    #[staticmethod]
    fn family(d: u32, a: Vec<f64>) -> PyResult<Self> {
        core::make_s_d_a(d, &a).map(|inner| Surface { inner }).map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (a, b, c, poly = Vec::new(), domain_radius = 1.0))]
    fn paraboloid(
        a: f64,
        b: f64,
        c: f64,
        poly: Vec<(u32, u32, f64)>,
        domain_radius: f64,
    ) -> PyResult<Self> {
        MongeSurface::paraboloid([a, b, c], poly, domain_radius)
            .map(|inner| Surface { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        MongeSurface::from_json(text).map(|inner| Surface { inner }).map_err(to_py)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn domain_radius(&self) -> f64 {
        self.inner.domain_radius()
    }

    fn origin_is_umbilic(&self) -> bool {
        self.inner.origin_is_umbilic()
    }

    fn height(&self, x: f64, y: f64) -> PyResult<f64> {
        self.inner.height(x, y).map_err(to_py)
    }

    /// `(h, h_x, h_y, h_xx, h_xy, h_yy)`.
    fn jet(&self, x: f64, y: f64) -> PyResult<(f64, f64, f64, f64, f64, f64)> {
        let j = self.inner.eval_jet(x, y).map_err(to_py)?;
        Ok((j.h, j.h_x, j.h_y, j.h_xx, j.h_xy, j.h_yy))
    }

    /// Rodrigues coefficients `(c_uu, c_uv, c_vv)`.
    fn rodrigues(&self, x: f64, y: f64) -> PyResult<(f64, f64, f64)> {
        let q = core::quad_at(&self.inner, x, y).map_err(to_py)?;
        Ok((q.c_uu, q.c_uv, q.c_vv))
    }

    fn principal(&self, x: f64, y: f64) -> PyResult<Principal> {
        let p = core::principal_at(&self.inner, x, y).map_err(to_py)?;
        Ok(Principal {
            dir_max: p.dir_max,
            dir_min: p.dir_min,
            kappa_max: p.kappa_max,
            kappa_min: p.kappa_min,
            umbilic: p.umbilic_flag,
        })
    }

    /// Copy rotated by `angle` about the z-axis.
    fn rotated(&self, angle: f64) -> Self {
        Surface {
            inner: self.inner.rotate_parameters(angle),
        }
    }

    fn __repr__(&self) -> String {
        format!("Surface({})", self.inner.to_json())
    }
}

#[pyclass(frozen, get_all, module = "umbilic")]
pub struct Principal {
    dir_max: Option<[f64; 2]>,
    dir_min: Option<[f64; 2]>,
    kappa_max: f64,
    kappa_min: f64,
    umbilic: bool,
}

#[pyclass(frozen, get_all, module = "umbilic")]
pub struct IndexReport {
    center: [f64; 2],
    radius: f64,
    /// Index as a float, a multiple of one half.
    index: f64,
    refinements: usize,
    valid: bool,
    /// `(theta, psi)` pairs in turns for the max branch.
    samples: Vec<(f64, f64)>,
}

#[pymethods]
impl IndexReport {
    fn __repr__(&self) -> String {
        format!(
            "IndexReport(center={:?}, radius={}, index={}, valid={})",
            self.center, self.radius, self.index, self.valid
        )
    }
}

#[pyfunction]
fn index_at(surface: &Surface, center: [f64; 2], radius: f64) -> PyResult<IndexReport> {
    let r = core::index_at(&surface.inner, center, radius).map_err(to_py)?;
    Ok(IndexReport {
        center: r.center,
        radius: r.radius,
        index: r.index.value(),
        refinements: r.refinements,
        valid: r.valid,
        samples: r.samples_max.iter().map(|s| (s.theta, s.psi)).collect(),
    })
}

#[pyclass(frozen, get_all, module = "umbilic")]
pub struct Umbilic {
    location: [f64; 2],
    residual: f64,
    index: Option<f64>,
    #[pyo3(name = "J")]
    j: Option<f64>,
    /// `"star"`, `"non-star"` or `"degenerate"`.
    classification: Option<String>,
}

#[pymethods]
impl Umbilic {
    fn __repr__(&self) -> String {
        format!(
            "Umbilic(location={:?}, index={:?}, J={:?}, classification={:?})",
            self.location, self.index, self.j, self.classification
        )
    }
}

fn class_name(c: core::Classification) -> String {
    match c {
        core::Classification::Star => "star",
        core::Classification::NonStar => "non-star",
        core::Classification::Degenerate => "degenerate",
    }
    .to_string()
}

/// Umbilics in the disk, each with index, J and classification. The
/// organizing umbilic at the origin is listed first when present.
#[pyfunction]
#[pyo3(signature = (surface, disk_radius, grid_n = 64, tol = 1e-9, index_radius = 0.005))]
fn find_umbilics(
    py: Python<'_>,
    surface: &Surface,
    disk_radius: f64,
    grid_n: usize,
    tol: f64,
    index_radius: f64,
) -> PyResult<Vec<Umbilic>> {
    let s = &surface.inner;
    let records = py.detach(|| -> core::Result<Vec<core::UmbilicRecord>> {
        let found = core::find_umbilics(s, disk_radius, grid_n, tol)?;
        let mut recs: Vec<_> = core::umbilic::origin_record(s).into_iter().chain(found).collect();
        enrich(s, &mut recs, index_radius);
        Ok(recs)
    });
    Ok(records
        .map_err(to_py)?
        .into_iter()
        .map(|r| Umbilic {
            location: r.location,
            residual: r.residual,
            index: r.index.map(|i| i.value()),
            j: r.j,
            classification: r.classification.map(class_name),
        })
        .collect())
}

#[pyfunction]
fn paraboloid_umbilics(a: f64, b: f64, c: f64) -> PyResult<Vec<[f64; 2]>> {
    core::paraboloid_umbilics(a, b, c).map_err(to_py)
}

#[pyclass(frozen, get_all, module = "umbilic")]
pub struct MongeForm {
    k: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    #[pyo3(name = "J")]
    j: f64,
    classification: String,
}

/// Cubic normal form at an umbilic.
#[pyfunction]
fn monge_at_umbilic(surface: &Surface, chi: [f64; 2]) -> PyResult<MongeForm> {
    let m = core::monge_at_umbilic(&surface.inner, chi).map_err(to_py)?;
    let tol = core::monge_reduce::default_tol_j(&surface.inner, &m);
    Ok(MongeForm {
        k: m.k,
        alpha: m.alpha,
        beta: m.beta,
        gamma: m.gamma,
        delta: m.delta,
        j: core::berry_hannay_j(&m),
        classification: class_name(core::classify(&m, tol)),
    })
}

#[pyclass(frozen, get_all, module = "umbilic")]
pub struct Trace {
    points: Vec<[f64; 2]>,
    branch: String,
    termination: String,
    arclength: f64,
}

fn trace_options(
    max_arclength: Option<f64>,
    bounds: Option<[f64; 4]>,
    umbilics: Vec<[f64; 2]>,
) -> TraceOptions {
    TraceOptions {
        max_arclength: max_arclength.unwrap_or(f64::INFINITY),
        bounds,
        umbilics,
        ..TraceOptions::default()
    }
}

/// One direction of the line of curvature through `start`.
#[pyfunction]
#[pyo3(signature = (surface, start, branch_name = "max", max_arclength = None, bounds = None, umbilics = Vec::new()))]
fn integrate_curvature_line(
    py: Python<'_>,
    surface: &Surface,
    start: [f64; 2],
    branch_name: &str,
    max_arclength: Option<f64>,
    bounds: Option<[f64; 4]>,
    umbilics: Vec<[f64; 2]>,
) -> PyResult<Trace> {
    let b = branch(branch_name)?;
    let opts = trace_options(max_arclength, bounds, umbilics);
    let s = &surface.inner;
    let t = py
        .detach(|| core::integrate_curvature_line(s, start, b, &opts))
        .map_err(to_py)?;
    Ok(Trace {
        points: t.points,
        branch: t.branch.to_string(),
        termination: t.termination.to_string(),
        arclength: t.arclength,
    })
}

/// Distances along `ray` (from the origin) of successive crossings, and the
/// reason the trace stopped.
#[pyfunction]
#[pyo3(signature = (surface, ray, start, n_returns, branch_name = "max", bounds = None))]
fn poincare_returns(
    py: Python<'_>,
    surface: &Surface,
    ray: [f64; 2],
    start: [f64; 2],
    n_returns: usize,
    branch_name: &str,
    bounds: Option<[f64; 4]>,
) -> PyResult<(Vec<f64>, String)> {
    let b = branch(branch_name)?;
    let ray = core::Ray::new(ray).map_err(to_py)?;
    let opts = trace_options(None, bounds, Vec::new());
    let s = &surface.inner;
    let res = py
        .detach(|| core::poincare_returns(s, ray, start, b, n_returns, &opts))
        .map_err(to_py)?;
    Ok((res.returns, res.termination.to_string()))
}

#[pymodule]
fn umbilic(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Surface>()?;
    m.add_class::<Principal>()?;
    m.add_class::<IndexReport>()?;
    m.add_class::<Umbilic>()?;
    m.add_class::<MongeForm>()?;
    m.add_class::<Trace>()?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_function(wrap_pyfunction!(index_at, m)?)?;
    m.add_function(wrap_pyfunction!(find_umbilics, m)?)?;
    m.add_function(wrap_pyfunction!(paraboloid_umbilics, m)?)?;
    m.add_function(wrap_pyfunction!(monge_at_umbilic, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_curvature_line, m)?)?;
    m.add_function(wrap_pyfunction!(poincare_returns, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_names() {
        assert_eq!(branch("max").unwrap(), Branch::Max);
        assert_eq!(branch("min").unwrap(), Branch::Min);
        assert!(branch("mid").is_err());
    }
}
