//! Winding number of the principal line field along circles.
//!
//! Angles are measured in turns. A line field is defined modulo half a turn,
//! so each sample's angle `psi` is folded into `[-1/4, 1/4]` and increments
//! between neighbours are lifted into `(-1/4, 1/4]`.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rodrigues::principal_at;
use crate::surface::MongeSurface;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Max,
    Min,
}

impl Branch {
    pub fn other(self) -> Branch {
        match self {
            Branch::Max => Branch::Min,
            Branch::Min => Branch::Max,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Max => "max",
            Branch::Min => "min",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(Branch::Max),
            "min" => Ok(Branch::Min),
            other => Err(Error::Argument(format!("unknown branch {other:?}"))),
        }
    }
}

/// An index: an integer multiple of one half, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfIndex(i32);

impl HalfIndex {
    pub fn from_halves(halves: i32) -> Self {
        HalfIndex(halves)
    }

    pub fn halves(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl fmt::Display for HalfIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for HalfIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for HalfIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        let halves = (2.0 * v).round();
        if (2.0 * v - halves).abs() > 1e-9 {
            return Err(serde::de::Error::custom(format!("{v} is not a half-integer")));
        }
        Ok(HalfIndex(halves as i32))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleSample {
    /// Position on the circle, in turns.
    pub theta: f64,
    /// Line-field angle, in turns, folded into `[-1/4, 1/4]`.
    pub psi: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub center: [f64; 2],
    pub radius: f64,
    pub index: HalfIndex,
    pub samples_max: Vec<CircleSample>,
    pub samples_min: Vec<CircleSample>,
    pub refinements: usize,
    pub valid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingOptions {
    /// Initial number of equally spaced samples.
    pub n0: usize,
    /// Largest admissible lifted gap between neighbours, in turns.
    pub max_gap: f64,
    pub max_samples: usize,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self {
            n0: 360,
            max_gap: 0.125,
            max_samples: 1 << 16,
        }
    }
}

/// Largest rounding residual accepted when snapping a lifted total to a
/// half-integer.
pub const WINDING_RESIDUAL_TOL: f64 = 0.05;

/// Intervals narrower than this (in turns of theta) that still show a large
/// jump can only straddle a singularity of the line field.
const MIN_DTHETA: f64 = 1e-14;

/// Folds a difference of line angles into `(-1/4, 1/4]`.
pub fn lift(delta: f64) -> f64 {
    let mut d = delta - 0.5 * (delta / 0.5).round();
    if d <= -0.25 {
        d += 0.5;
    } else if d > 0.25 {
        d -= 0.5;
    }
    d
}

fn psi_at(s: &MongeSurface, center: [f64; 2], radius: f64, branch: Branch, theta: f64) -> Result<f64> {
    let t = std::f64::consts::TAU * theta;
    let (x, y) = (center[0] + radius * t.cos(), center[1] + radius * t.sin());
    let pp = principal_at(s, x, y)?;
    let dir = match branch {
        Branch::Max => pp.dir_max,
        Branch::Min => pp.dir_min,
    };
    match dir {
        Some([u, v]) => Ok(v.atan2(u) / std::f64::consts::TAU),
        None => Err(Error::UmbilicOnContour { theta }),
    }
}

/// Samples one principal branch along a circle, bisecting every interval
/// whose lifted gap exceeds `max_gap`.
pub fn sample_circle(
    s: &MongeSurface,
    center: [f64; 2],
    radius: f64,
    branch: Branch,
    opts: &SamplingOptions,
) -> Result<(Vec<CircleSample>, usize)> {
    if !(radius > 0.0) || opts.n0 < 3 {
        return Err(Error::Argument(format!(
            "need a positive radius and at least 3 samples, got r = {radius}, n0 = {}",
            opts.n0
        )));
    }
    let far = center[0].hypot(center[1]) + radius;
    if far >= s.domain_radius() {
        return Err(Error::Domain {
            x: center[0],
            y: center[1],
            radius: far,
            limit: s.domain_radius(),
        });
    }
    let mut pts: Vec<(f64, f64)> = (0..opts.n0)
        .map(|k| {
            let th = k as f64 / opts.n0 as f64;
            psi_at(s, center, radius, branch, th).map(|p| (th, p))
        })
        .collect::<Result<_>>()?;
    let mut passes = 0;
    loop {
        let n = pts.len();
        let mut next = Vec::with_capacity(n + 16);
        let mut inserted = false;
        for i in 0..n {
            let (t0, p0) = pts[i];
            next.push((t0, p0));
            let (mut t1, p1) = pts[(i + 1) % n];
            if i + 1 == n {
                t1 += 1.0;
            }
            if lift(p1 - p0).abs() > opts.max_gap {
                if t1 - t0 < MIN_DTHETA {
                    return Err(Error::UmbilicOnContour {
                        theta: (0.5 * (t0 + t1)).rem_euclid(1.0),
                    });
                }
                let tm = 0.5 * (t0 + t1);
                let tm = if tm >= 1.0 { tm - 1.0 } else { tm };
                next.push((tm, psi_at(s, center, radius, branch, tm)?));
                inserted = true;
            }
        }
        if next.len() > opts.max_samples {
            return Err(Error::UnresolvedContour {
                max_samples: opts.max_samples,
            });
        }
        next.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts = next;
        if !inserted {
            break;
        }
        passes += 1;
    }
    let samples = pts
        .into_iter()
        .map(|(theta, psi)| CircleSample { theta, psi, branch })
        .collect();
    Ok((samples, passes))
}

/// Lifted total rotation of a closed loop of samples, in turns.
pub fn lifted_total(samples: &[CircleSample]) -> f64 {
    let n = samples.len();
    (0..n)
        .map(|i| lift(samples[(i + 1) % n].psi - samples[i].psi))
        .sum()
}

pub fn winding_number(samples: &[CircleSample]) -> Result<HalfIndex> {
    if samples.is_empty() {
        return Err(Error::Argument("no samples".into()));
    }
    let total = lifted_total(samples);
    let halves = (2.0 * total).round();
    let residual = (total - halves / 2.0).abs();
    if residual >= WINDING_RESIDUAL_TOL {
        return Err(Error::AmbiguousWinding { total, residual });
    }
    Ok(HalfIndex(halves as i32))
}

/// True when every lifted increment is below a quarter turn.
pub fn increments_resolved(samples: &[CircleSample]) -> bool {
    let n = samples.len();
    (0..n).all(|i| lift(samples[(i + 1) % n].psi - samples[i].psi).abs() < 0.25)
}

pub fn index_at(s: &MongeSurface, center: [f64; 2], radius: f64) -> Result<IndexReport> {
    index_at_with(s, center, radius, &SamplingOptions::default())
}

/// Winding of both principal branches along the circle; they must agree.
pub fn index_at_with(
    s: &MongeSurface,
    center: [f64; 2],
    radius: f64,
    opts: &SamplingOptions,
) -> Result<IndexReport> {
    let (samples_max, passes_max) = sample_circle(s, center, radius, Branch::Max, opts)?;
    let (samples_min, passes_min) = sample_circle(s, center, radius, Branch::Min, opts)?;
    let imax = winding_number(&samples_max)?;
    let imin = winding_number(&samples_min)?;
    if imax != imin {
        return Err(Error::BranchDisagreement {
            max: imax.value(),
            min: imin.value(),
        });
    }
    let valid = increments_resolved(&samples_max) && increments_resolved(&samples_min);
    Ok(IndexReport {
        center,
        radius,
        index: imax,
        samples_max,
        samples_min,
        refinements: passes_max.max(passes_min),
        valid,
    })
}
