//! Locating umbilics: damped Newton from a seed grid, the x-axis merger
//! condition of the sphere-based families, and paraboloid closed forms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{index_at, HalfIndex};
use crate::monge_reduce::{berry_hannay_j, classify, default_tol_j, monge_at_umbilic};
use crate::rodrigues::{quad_at, quad_gradient};
use crate::surface::MongeSurface;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Star,
    NonStar,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UmbilicRecord {
    pub location: [f64; 2],
    /// `max(|c_uu|, |c_uv|, |c_vv|)` at the location.
    pub residual: f64,
    pub index: Option<HalfIndex>,
    #[serde(rename = "J")]
    pub j: Option<f64>,
    pub classification: Option<Classification>,
}

impl UmbilicRecord {
    fn bare(location: [f64; 2], residual: f64) -> Self {
        Self {
            location,
            residual,
            index: None,
            j: None,
            classification: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinderOptions {
    pub grid_n: usize,
    /// Acceptance threshold relative to [`MongeSurface::coefficient_scale`].
    pub tol: f64,
    pub max_iter: usize,
    pub dedupe_radius: f64,
}

impl Default for FinderOptions {
    fn default() -> Self {
        Self {
            grid_n: 64,
            tol: 1e-9,
            max_iter: 50,
            dedupe_radius: 1e-6,
        }
    }
}

/// Rodrigues residual at a point.
pub fn residual_at(s: &MongeSurface, p: [f64; 2]) -> Result<f64> {
    Ok(quad_at(s, p[0], p[1])?.max_abs())
}

/// Absolute detector tolerance at a point.
pub fn detector_tolerance(s: &MongeSurface, p: [f64; 2], tol: f64) -> f64 {
    tol * s.coefficient_scale(p[0], p[1])
}

fn merit(s: &MongeSurface, p: [f64; 2]) -> Option<f64> {
    let q = quad_at(s, p[0], p[1]).ok()?;
    Some(q.c_uu.hypot(q.c_uv) / s.coefficient_scale(p[0], p[1]))
}

/// Damped Newton on `(c_uu, c_uv)` from `seed`. Returns the converged point,
/// or `None` when the iteration stalls, diverges or leaves the chart.
pub fn newton_polish(s: &MongeSurface, seed: [f64; 2], max_iter: usize) -> Option<[f64; 2]> {
    let mut p = seed;
    let mut m = merit(s, p)?;
    for _ in 0..max_iter {
        let q = quad_at(s, p[0], p[1]).ok()?;
        let g = quad_gradient(&s.eval_jet3(p[0], p[1]).ok()?);
        let (a, b, c, d) = (g[0][0], g[0][1], g[1][0], g[1][1]);
        let det = a * d - b * c;
        let step = if det.abs() > 1e-12 * (a.abs() + b.abs()) * (c.abs() + d.abs()) && det != 0.0 {
            [
                -(d * q.c_uu - b * q.c_uv) / det,
                -(-c * q.c_uu + a * q.c_uv) / det,
            ]
        } else {
            // Gauss-Newton on all three coefficients.
            let rows = [(g[0], q.c_uu), (g[1], q.c_uv), (g[2], q.c_vv)];
            let (mut n11, mut n12, mut n22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for (row, f) in rows {
                n11 += row[0] * row[0];
                n12 += row[0] * row[1];
                n22 += row[1] * row[1];
                r1 += row[0] * f;
                r2 += row[1] * f;
            }
            let nd = n11 * n22 - n12 * n12;
            if nd == 0.0 {
                return None;
            }
            [-(n22 * r1 - n12 * r2) / nd, -(-n12 * r1 + n11 * r2) / nd]
        };
        let mut lambda = 1.0;
        let mut accepted = None;
        while lambda >= 1.0 / 64.0 {
            let trial = [p[0] + lambda * step[0], p[1] + lambda * step[1]];
            if let Some(mt) = merit(s, trial) {
                if mt < m || mt == 0.0 {
                    accepted = Some((trial, mt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let (trial, mt) = accepted?;
        let moved = (trial[0] - p[0]).hypot(trial[1] - p[1]);
        p = trial;
        m = mt;
        if moved <= 1e-14 * p[0].hypot(p[1]).max(1e-3) || m == 0.0 {
            return Some(p);
        }
    }
    // Accept an iterate that has stopped moving appreciably.
    Some(p)
}

/// Umbilics inside the disk of radius `disk_radius`, excluding an
/// organizing umbilic at the origin.
pub fn find_umbilics(
    s: &MongeSurface,
    disk_radius: f64,
    grid_n: usize,
    tol: f64,
) -> Result<Vec<UmbilicRecord>> {
    find_umbilics_with(
        s,
        disk_radius,
        &FinderOptions {
            grid_n,
            tol,
            ..FinderOptions::default()
        },
    )
}

pub fn find_umbilics_with(
    s: &MongeSurface,
    disk_radius: f64,
    opts: &FinderOptions,
) -> Result<Vec<UmbilicRecord>> {
    if !(disk_radius > 0.0) || disk_radius >= s.domain_radius() {
        return Err(Error::Argument(format!(
            "search disk {disk_radius} must lie inside the chart of radius {}",
            s.domain_radius()
        )));
    }
    if opts.grid_n < 2 {
        return Err(Error::Argument("grid needs at least 2 points per side".into()));
    }
    let n = opts.grid_n;
    let seeds: Vec<[f64; 2]> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let t = |m: usize| -disk_radius + 2.0 * disk_radius * (m as f64 + 0.5) / n as f64;
            [t(i), t(j)]
        })
        .filter(|p| p[0].hypot(p[1]) < disk_radius)
        .collect();
    let origin_umbilic = s.origin_is_umbilic();
    let found: Vec<Option<UmbilicRecord>> = seeds
        .par_iter()
        .map(|&seed| {
            let p = newton_polish(s, seed, opts.max_iter)?;
            let r = p[0].hypot(p[1]);
            if r >= disk_radius || (origin_umbilic && r < opts.dedupe_radius) {
                return None;
            }
            let res = residual_at(s, p).ok()?;
            (res <= detector_tolerance(s, p, opts.tol)).then(|| UmbilicRecord::bare(p, res))
        })
        .collect();
    let mut out: Vec<UmbilicRecord> = Vec::new();
    for rec in found.into_iter().flatten() {
        let dup = out.iter().any(|o| {
            (o.location[0] - rec.location[0]).hypot(o.location[1] - rec.location[1])
                < opts.dedupe_radius
        });
        if !dup {
            out.push(rec);
        }
    }
    out.sort_by(|a, b| {
        let ka = a.location[1].atan2(a.location[0]);
        let kb = b.location[1].atan2(b.location[0]);
        ka.total_cmp(&kb)
    });
    Ok(out)
}

/// Record for the organizing umbilic at the origin, when there is one.
pub fn origin_record(s: &MongeSurface) -> Option<UmbilicRecord> {
    s.origin_is_umbilic()
        .then(|| UmbilicRecord::bare([0.0, 0.0], residual_at(s, [0.0, 0.0]).unwrap_or(0.0)))
}

/// Fills index (on a circle of radius `index_radius`, shrunk if another
/// umbilic is closer), J and classification. Failures leave fields empty.
pub fn enrich(s: &MongeSurface, records: &mut [UmbilicRecord], index_radius: f64) {
    let mut others: Vec<[f64; 2]> = records.iter().map(|r| r.location).collect();
    if let Some(o) = origin_record(s) {
        if !others.iter().any(|p| p[0].hypot(p[1]) < 1e-12) {
            others.push(o.location);
        }
    }
    let updates: Vec<(Option<HalfIndex>, Option<f64>, Option<Classification>)> = records
        .par_iter()
        .map(|rec| {
            let p = rec.location;
            let nearest = others
                .iter()
                .map(|o| (o[0] - p[0]).hypot(o[1] - p[1]))
                .filter(|&d| d > 1e-12)
                .fold(f64::INFINITY, f64::min);
            let radius = index_radius.min(0.5 * nearest);
            let index = index_at(s, p, radius).ok().map(|r| r.index);
            let (j, class) = match monge_at_umbilic(s, p) {
                Ok(m) => {
                    let j = berry_hannay_j(&m);
                    (Some(j), Some(classify(&m, default_tol_j(s, &m))))
                }
                Err(_) => (None, None),
            };
            (index, j, class)
        })
        .collect();
    for (rec, (index, j, class)) in records.iter_mut().zip(updates) {
        rec.index = index;
        rec.j = j;
        rec.classification = class;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct XAxisUmbilics {
    /// Roots in ascending order, mirrored to `+-x`.
    pub roots: Vec<f64>,
    /// Set when `a_1 != 0`; the condition only applies with `a_1 = 0`.
    pub a1_nonzero: bool,
}

/// Roots in `(0, x_max]` of `d(d-1)a_0 - 2a_2 - 2(d a_0 + a_2) x^2 = 0`.
pub fn x_axis_umbilics(d: u32, a: &[f64], x_max: f64) -> XAxisUmbilics {
    if a.len() < 3 || a[1] != 0.0 {
        return XAxisUmbilics {
            roots: Vec::new(),
            a1_nonzero: a.len() >= 2 && a[1] != 0.0,
        };
    }
    let df = f64::from(d);
    let num = df * (df - 1.0) * a[0] - 2.0 * a[2];
    let den = 2.0 * (df * a[0] + a[2]);
    let mut roots = Vec::new();
    if den != 0.0 {
        let x2 = num / den;
        if x2 > 0.0 {
            let x = x2.sqrt();
            if x <= x_max {
                roots = vec![-x, x];
            }
        }
    }
    XAxisUmbilics {
        roots,
        a1_nonzero: false,
    }
}

/// Umbilics of the paraboloid `a x^2 + 2 b x y + c y^2`.
///
/// The cross term is first rotated away; for the axis-aligned paraboloid the
/// umbilics lie on the axis of the larger coefficient:
/// `(+-sqrt((a - c) / (4 a^2 c)), 0)` when `a > c` and
/// `(0, +-sqrt((c - a) / (4 a c^2)))` when `c > a`.
pub fn paraboloid_umbilics(a: f64, b: f64, c: f64) -> Result<Vec<[f64; 2]>> {
    if !(a > 0.0 && c > 0.0 && b * b - a * c < 0.0) {
        return Err(Error::Argument(format!(
            "paraboloid ({a}, {b}, {c}) is not convex"
        )));
    }
    let angle = 0.5 * (2.0 * b).atan2(c - a);
    let rotated = MongeSurface::paraboloid([a, b, c], [], 1.0)
        .expect("finite coefficients")
        .rotate_parameters(angle);
    let [ar, _, cr] = rotated.quadratic();
    let local: Vec<[f64; 2]> = if ar > cr {
        let x = ((ar - cr) / (4.0 * ar * ar * cr)).sqrt();
        vec![[x, 0.0], [-x, 0.0]]
    } else if cr > ar {
        let y = ((cr - ar) / (4.0 * ar * cr * cr)).sqrt();
        vec![[0.0, y], [0.0, -y]]
    } else {
        Vec::new()
    };
    // Points of the rotated graph map back by the inverse rotation.
    let (sn, cs) = (-angle).sin_cos();
    Ok(local
        .into_iter()
        .map(|[x, y]| [cs * x - sn * y, sn * x + cs * y])
        .collect())
}
