//! Scenario files. Every numeric parameter is spelled out in the file; the
//! parser has no defaults, so a scenario alone fixes the output.

use std::path::Path;

use serde::{Deserialize, Serialize};
use umbilic_core::{Branch, MongeSurface, SamplingOptions, SurfaceDescription, TraceOptions};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub surface: SurfaceDescription,
    pub index: Option<IndexSection>,
    pub foliation: Option<FoliationSection>,
    pub umbilics: Option<UmbilicSearch>,
    pub scan: Option<ScanSection>,
    pub poincare: Option<PoincareSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circle {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    pub n0: usize,
    pub max_gap: f64,
    pub max_samples: usize,
}

impl From<Sampling> for SamplingOptions {
    fn from(s: Sampling) -> Self {
        SamplingOptions {
            n0: s.n0,
            max_gap: s.max_gap,
            max_samples: s.max_samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexSection {
    pub circles: Vec<Circle>,
    pub sampling: Sampling,
}

/// Umbilic search in a disk about the origin, plus the circle radius used
/// to measure each umbilic's index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UmbilicSearch {
    pub disk_radius: f64,
    pub grid_n: usize,
    pub tol: f64,
    pub index_radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Integrator {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
    /// `null` for no limit.
    pub max_arclength: Option<f64>,
    pub umbilic_standoff: f64,
    pub closure_tol: f64,
    pub closure_dot: f64,
    pub min_closure_steps: usize,
    pub detect_closure: bool,
}

impl Integrator {
    pub fn options(&self, umbilics: Vec<[f64; 2]>, bounds: Option<[f64; 4]>) -> TraceOptions {
        TraceOptions {
            rtol: self.rtol,
            atol: self.atol,
            max_step: self.max_step,
            min_step: self.min_step,
            max_steps: self.max_steps,
            max_arclength: self.max_arclength.unwrap_or(f64::INFINITY),
            umbilic_standoff: self.umbilic_standoff,
            umbilics,
            closure_tol: self.closure_tol,
            closure_dot: self.closure_dot,
            min_closure_steps: self.min_closure_steps,
            detect_closure: self.detect_closure,
            bounds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoliationSection {
    pub branches: Vec<Branch>,
    /// Seeds are equally spaced on this circle, starting at angle zero.
    pub seed_circle: Circle,
    pub seeds: usize,
    /// Extra seeds, traced after the circle seeds.
    pub extra_seeds: Vec<[f64; 2]>,
    /// `[x_min, x_max, y_min, y_max]`; traces stop here and the plot shows it.
    pub bounds: [f64; 4],
    pub integrator: Integrator,
    /// Umbilics found here are drawn and stop traces.
    pub umbilics: UmbilicSearch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    /// Coefficient of `x^i y^j` in the polynomial part.
    Poly([u32; 2]),
    /// Entry of `[a, b, c]` in `a x^2 + 2 b x y + c y^2`.
    Quadratic(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub parameter: Parameter,
    pub range: [f64; 2],
    pub steps: usize,
    /// The origin index is measured on this circle at every step.
    pub index_circle: Circle,
    pub sampling: Sampling,
    pub umbilics: UmbilicSearch,
    /// Width to which every index jump is bisected.
    pub bisect_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoincareSection {
    pub ray: [f64; 2],
    pub start: [f64; 2],
    pub branch: Branch,
    pub returns: usize,
    pub bounds: [f64; 4],
    pub integrator: Integrator,
    /// Umbilics found here stop the trace.
    pub umbilics: UmbilicSearch,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        let sc: Scenario = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        sc.surface()?;
        Ok(sc)
    }

    pub fn surface(&self) -> Result<MongeSurface, CliError> {
        MongeSurface::from_description(&self.surface)
            .map_err(|e| CliError::Input(format!("surface: {e}")))
    }
}

impl Parameter {
    pub fn apply(&self, s: &MongeSurface, value: f64) -> Result<MongeSurface, CliError> {
        match *self {
            Parameter::Poly([i, j]) => Ok(s.with_coeff(i, j, value)),
            Parameter::Quadratic(k) if k < 3 => {
                let mut q = s.quadratic();
                q[k] = value;
                Ok(s.with_quadratic(q))
            }
            Parameter::Quadratic(k) => Err(CliError::Input(format!(
                "quadratic parameter index {k} out of range 0..3"
            ))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Parameter::Poly([i, j]) => format!("x^{i} y^{j}"),
            Parameter::Quadratic(k) => ["a", "b", "c"].get(*k).unwrap_or(&"?").to_string(),
        }
    }
}
