//! Lines of curvature as integral curves of a principal line field.
//!
//! A line field has no global orientation, so each trace lifts it to a
//! vector field by keeping every new direction within 90 degrees of the
//! previous one. Steps are Dormand-Prince 5(4) with error control.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::Branch;
use crate::rodrigues::principal_at;
use crate::surface::MongeSurface;
use crate::umbilic::{newton_polish, residual_at, detector_tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedBoundary,
    NearUmbilic,
    StepLimit,
    Closed,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::ReachedBoundary => "reached_boundary",
            Termination::NearUmbilic => "near_umbilic",
            Termination::StepLimit => "step_limit",
            Termination::Closed => "closed",
        }
    }
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub points: Vec<[f64; 2]>,
    /// Unit tangent of the lifted field at each point.
    pub tangents: Vec<[f64; 2]>,
    pub branch: Branch,
    pub termination: Termination,
    /// Length of the polyline in the chart.
    pub arclength: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
    pub max_arclength: f64,
    pub umbilic_standoff: f64,
    /// Known umbilics; a trace passing within the standoff of one stops.
    pub umbilics: Vec<[f64; 2]>,
    pub closure_tol: f64,
    pub closure_dot: f64,
    pub min_closure_steps: usize,
    pub detect_closure: bool,
    /// Optional box `[x_min, x_max, y_min, y_max]` inside the chart.
    pub bounds: Option<[f64; 4]>,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-12,
            max_step: 1e-3,
            min_step: 1e-12,
            max_steps: 200_000,
            max_arclength: f64::INFINITY,
            umbilic_standoff: 2e-6,
            umbilics: Vec::new(),
            closure_tol: 1e-5,
            closure_dot: 0.999,
            min_closure_steps: 10,
            detect_closure: true,
            bounds: None,
        }
    }
}

// Dormand-Prince 5(4).
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fail {
    Outside,
    Umbilic,
}

struct Step {
    end: [f64; 2],
    dir: [f64; 2],
    err: f64,
}

struct Integrator<'a> {
    s: &'a MongeSurface,
    branch: Branch,
    opts: &'a TraceOptions,
    umbilics: Vec<[f64; 2]>,
}

/// The caller's umbilics plus an organizing umbilic at the origin.
fn known_umbilics(s: &MongeSurface, opts: &TraceOptions) -> Vec<[f64; 2]> {
    let mut u = opts.umbilics.clone();
    if s.origin_is_umbilic() && !u.iter().any(|p| p[0].hypot(p[1]) < opts.umbilic_standoff) {
        u.push([0.0, 0.0]);
    }
    u
}

impl<'a> Integrator<'a> {
    fn new(s: &'a MongeSurface, branch: Branch, opts: &'a TraceOptions) -> Self {
        Self {
            s,
            branch,
            opts,
            umbilics: known_umbilics(s, opts),
        }
    }
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Distance from `q` to the segment `[a, b]`, with the closest point.
fn segment_distance(a: [f64; 2], b: [f64; 2], q: [f64; 2]) -> (f64, [f64; 2]) {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = dot(ab, ab);
    let t = if len2 > 0.0 {
        (dot([q[0] - a[0], q[1] - a[1]], ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let c = [a[0] + t * ab[0], a[1] + t * ab[1]];
    (dist(c, q), c)
}

impl Integrator<'_> {
    fn inside(&self, p: [f64; 2]) -> bool {
        if !p[0].is_finite() || !p[1].is_finite() || !self.s.contains(p[0], p[1]) {
            return false;
        }
        match self.opts.bounds {
            Some([x0, x1, y0, y1]) => p[0] >= x0 && p[0] <= x1 && p[1] >= y0 && p[1] <= y1,
            None => true,
        }
    }

    fn field(&self, p: [f64; 2], reference: [f64; 2]) -> std::result::Result<[f64; 2], Fail> {
        if !self.inside(p) {
            return Err(Fail::Outside);
        }
        let pair = principal_at(self.s, p[0], p[1]).map_err(|_| Fail::Umbilic)?;
        let d = match self.branch {
            Branch::Max => pair.dir_max,
            Branch::Min => pair.dir_min,
        }
        .ok_or(Fail::Umbilic)?;
        Ok(if dot(d, reference) < 0.0 {
            [-d[0], -d[1]]
        } else {
            d
        })
    }

    fn step(&self, p: [f64; 2], dir: [f64; 2], h: f64) -> std::result::Result<Step, Fail> {
        let mut k = [[0.0; 2]; 7];
        k[0] = dir;
        for i in 1..7 {
            let mut q = p;
            for (j, kj) in k.iter().enumerate().take(i) {
                q[0] += h * A[i][j] * kj[0];
                q[1] += h * A[i][j] * kj[1];
            }
            debug_assert!(C[i] > 0.0);
            k[i] = self.field(q, dir)?;
        }
        let mut end = p;
        let mut e = [0.0; 2];
        for i in 0..7 {
            end[0] += h * B5[i] * k[i][0];
            end[1] += h * B5[i] * k[i][1];
            e[0] += h * (B5[i] - B4[i]) * k[i][0];
            e[1] += h * (B5[i] - B4[i]) * k[i][1];
        }
        // The last stage is evaluated at the endpoint.
        Ok(Step {
            end,
            dir: k[6],
            err: e[0].hypot(e[1]),
        })
    }

    fn umbilic_near(&self, p: [f64; 2]) -> bool {
        let standoff = self.opts.umbilic_standoff;
        if self.umbilics.iter().any(|u| dist(*u, p) < standoff) {
            return true;
        }
        match newton_polish(self.s, p, 30) {
            Some(u) if dist(u, p) < standoff => residual_at(self.s, u)
                .map(|r| r <= detector_tolerance(self.s, u, 1e-9))
                .unwrap_or(false),
            _ => false,
        }
    }

    /// Runs the integration. `observe(prev, step, h)` sees each accepted
    /// step and returns true to stop with [`Termination::StepLimit`].
    fn run(
        &self,
        start: [f64; 2],
        dir0: [f64; 2],
        mut observe: impl FnMut(&Self, [f64; 2], [f64; 2], &Step, f64) -> bool,
    ) -> Trace {
        let o = self.opts;
        let mut p = start;
        let mut d = dir0;
        let mut points = vec![start];
        let mut tangents = vec![dir0];
        let mut arclength = 0.0;
        let mut h = o.max_step;
        let mut steps = 0usize;
        let termination = loop {
            if steps >= o.max_steps || arclength >= o.max_arclength {
                break Termination::StepLimit;
            }
            if h < o.min_step {
                break if self.umbilic_near(p) {
                    Termination::NearUmbilic
                } else {
                    Termination::StepLimit
                };
            }
            let step = match self.step(p, d, h) {
                Ok(step) => step,
                Err(Fail::Outside) => {
                    if h <= 1e-9 {
                        break Termination::ReachedBoundary;
                    }
                    h *= 0.5;
                    continue;
                }
                Err(Fail::Umbilic) => {
                    if self.umbilic_near(p) {
                        break Termination::NearUmbilic;
                    }
                    h *= 0.5;
                    continue;
                }
            };
            let tol = o.atol + o.rtol * p[0].hypot(p[1]).max(step.end[0].hypot(step.end[1]));
            if step.err > tol {
                h *= (0.9 * (tol / step.err).powf(0.2)).max(0.2);
                continue;
            }
            steps += 1;
            let prev = p;
            let prev_dir = d;
            arclength += dist(prev, step.end);
            points.push(step.end);
            tangents.push(step.dir);
            p = step.end;
            d = step.dir;
            if self
                .umbilics
                .iter()
                .any(|u| segment_distance(prev, p, *u).0 < o.umbilic_standoff)
            {
                break Termination::NearUmbilic;
            }
            if o.detect_closure && steps > o.min_closure_steps {
                let (gap, _) = segment_distance(prev, p, start);
                if gap < o.closure_tol && dot(d, dir0) > o.closure_dot {
                    points.pop();
                    points.push(start);
                    tangents.pop();
                    tangents.push(dir0);
                    arclength += dist(prev, start) - dist(prev, p);
                    break Termination::Closed;
                }
            }
            if observe(self, prev, prev_dir, &step, h) {
                break Termination::StepLimit;
            }
            let grow = if step.err == 0.0 {
                5.0
            } else {
                (0.9 * (tol / step.err).powf(0.2)).clamp(0.2, 5.0)
            };
            h = (h * grow).min(o.max_step);
        };
        Trace {
            points,
            tangents,
            branch: self.branch,
            termination,
            arclength,
        }
    }
}

fn start_direction(s: &MongeSurface, start: [f64; 2], branch: Branch, opts: &TraceOptions) -> Result<[f64; 2]> {
    if known_umbilics(s, opts)
        .iter()
        .any(|u| dist(*u, start) < opts.umbilic_standoff)
    {
        return Err(Error::StartAtUmbilic {
            x: start[0],
            y: start[1],
        });
    }
    let pair = principal_at(s, start[0], start[1])?;
    let d = match branch {
        Branch::Max => pair.dir_max,
        Branch::Min => pair.dir_min,
    };
    d.ok_or(Error::StartAtUmbilic {
        x: start[0],
        y: start[1],
    })
}

fn check_start(s: &MongeSurface, start: [f64; 2], opts: &TraceOptions) -> Result<()> {
    let integ = Integrator::new(s, Branch::Max, opts);
    if !integ.inside(start) {
        return Err(Error::Domain {
            x: start[0],
            y: start[1],
            radius: start[0].hypot(start[1]),
            limit: s.domain_radius(),
        });
    }
    Ok(())
}

/// Integrates from `start` along the canonical principal direction.
pub fn integrate_curvature_line(
    s: &MongeSurface,
    start: [f64; 2],
    branch: Branch,
    opts: &TraceOptions,
) -> Result<Trace> {
    let d = start_direction(s, start, branch, opts)?;
    integrate_from(s, start, d, branch, opts)
}

/// Integrates from `start`, leaving along the principal direction closest
/// to `initial`.
pub fn integrate_from(
    s: &MongeSurface,
    start: [f64; 2],
    initial: [f64; 2],
    branch: Branch,
    opts: &TraceOptions,
) -> Result<Trace> {
    check_start(s, start, opts)?;
    let d = start_direction(s, start, branch, opts)?;
    let d = if dot(d, initial) < 0.0 { [-d[0], -d[1]] } else { d };
    let integ = Integrator::new(s, branch, opts);
    Ok(integ.run(start, d, |_, _, _, _, _| false))
}

/// A line of curvature traced both ways from its seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureLine {
    pub seed: [f64; 2],
    pub forward: Trace,
    /// Absent when the forward trace closed up.
    pub backward: Option<Trace>,
}

impl CurvatureLine {
    /// Polyline from the backward end through the seed to the forward end.
    pub fn points(&self) -> Vec<[f64; 2]> {
        let mut pts: Vec<[f64; 2]> = match &self.backward {
            Some(b) => b.points.iter().rev().copied().collect(),
            None => Vec::new(),
        };
        let skip = usize::from(!pts.is_empty());
        pts.extend(self.forward.points.iter().skip(skip).copied());
        pts
    }

    pub fn arclength(&self) -> f64 {
        self.forward.arclength + self.backward.as_ref().map_or(0.0, |b| b.arclength)
    }
}

pub fn integrate_both(
    s: &MongeSurface,
    seed: [f64; 2],
    branch: Branch,
    opts: &TraceOptions,
) -> Result<CurvatureLine> {
    let d = start_direction(s, seed, branch, opts)?;
    let forward = integrate_from(s, seed, d, branch, opts)?;
    let backward = if forward.termination == Termination::Closed {
        None
    } else {
        Some(integrate_from(s, seed, [-d[0], -d[1]], branch, opts)?)
    };
    Ok(CurvatureLine {
        seed,
        forward,
        backward,
    })
}

/// Traces every seed, in parallel; results keep the seed order.
pub fn integrate_seeds(
    s: &MongeSurface,
    seeds: &[[f64; 2]],
    branch: Branch,
    opts: &TraceOptions,
) -> Vec<Result<CurvatureLine>> {
    seeds
        .par_iter()
        .map(|&seed| integrate_both(s, seed, branch, opts))
        .collect()
}

/// Half-line from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub direction: [f64; 2],
}

impl Ray {
    pub fn new(direction: [f64; 2]) -> Result<Self> {
        let n = direction[0].hypot(direction[1]);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Argument("ray direction must be nonzero".into()));
        }
        Ok(Self {
            direction: [direction[0] / n, direction[1] / n],
        })
    }

    fn side(&self, p: [f64; 2]) -> f64 {
        self.direction[0] * p[1] - self.direction[1] * p[0]
    }

    fn along(&self, p: [f64; 2]) -> f64 {
        dot(self.direction, p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareReturns {
    /// Distances from the origin along the ray, in crossing order.
    pub returns: Vec<f64>,
    pub points: Vec<[f64; 2]>,
    pub termination: Termination,
    pub trace: Trace,
}

/// Records the first `n_returns` crossings of `ray` made in the same sense
/// as the trace leaves `start`.
pub fn poincare_returns(
    s: &MongeSurface,
    ray: Ray,
    start: [f64; 2],
    branch: Branch,
    n_returns: usize,
    opts: &TraceOptions,
) -> Result<PoincareReturns> {
    let off = ray.side(start).abs();
    if off > 1e-12 * start[0].hypot(start[1]).max(1.0) || ray.along(start) <= 0.0 {
        return Err(Error::Argument(format!(
            "start ({}, {}) is not on the ray",
            start[0], start[1]
        )));
    }
    check_start(s, start, opts)?;
    let d = start_direction(s, start, branch, opts)?;
    let opts = TraceOptions {
        detect_closure: false,
        ..opts.clone()
    };
    let integ = Integrator::new(s, branch, &opts);
    let mut sense = 0.0f64;
    let mut returns = Vec::new();
    let mut points = Vec::new();
    let mut trace = integ.run(start, d, |integ, prev, prev_dir, step, h| {
        let (a, b) = (ray.side(prev), ray.side(step.end));
        if sense == 0.0 {
            if b != 0.0 {
                sense = b.signum();
            }
            return false;
        }
        if !(a * sense < 0.0 && b * sense >= 0.0) {
            return false;
        }
        // Secant (Illinois) on the step length within this step.
        let (mut lo, mut hi, mut flo, mut fhi) = (0.0, h, a, b);
        let mut cross = step.end;
        let mut side_lo = 0;
        for _ in 0..100 {
            let t = if fhi != flo { hi - fhi * (hi - lo) / (fhi - flo) } else { 0.5 * (lo + hi) };
            let t = if t > lo && t < hi { t } else { 0.5 * (lo + hi) };
            let Ok(st) = integ.step(prev, prev_dir, t) else { break };
            cross = st.end;
            let ft = ray.side(st.end);
            if ft == 0.0 || (hi - lo) < 1e-16 * h.max(1e-300) {
                break;
            }
            if ft * flo < 0.0 {
                hi = t;
                fhi = ft;
                if side_lo == -1 {
                    flo *= 0.5;
                }
                side_lo = -1;
            } else {
                lo = t;
                flo = ft;
                if side_lo == 1 {
                    fhi *= 0.5;
                }
                side_lo = 1;
            }
            if ft.abs() < 1e-17 {
                break;
            }
        }
        if ray.along(cross) > 0.0 {
            returns.push(ray.along(cross));
            points.push(cross);
        }
        returns.len() >= n_returns
    });
    let termination = if returns.len() >= n_returns {
        trace.termination = Termination::StepLimit;
        Termination::StepLimit
    } else {
        trace.termination
    };
    Ok(PoincareReturns {
        returns,
        points,
        termination,
        trace,
    })
}
