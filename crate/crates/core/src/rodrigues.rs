//! The Rodrigues quadratic `c_uu u^2 + c_uv u v + c_vv v^2` whose roots are
//! the principal directions, and its lowest-order truncation for the
//! sphere-based homogeneous families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly2;
use crate::surface::{Jet2, Jet3, MongeSurface, SplitJet};

/// Absolute slack allowed on a negative discriminant.
pub const EPS_DISC: f64 = 1e-12;

/// Relative umbilic threshold, multiplied by [`MongeSurface::coefficient_scale`].
pub const DEFAULT_TOL_UMBILIC: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadCoeffs {
    pub x: f64,
    pub y: f64,
    pub c_uu: f64,
    pub c_uv: f64,
    pub c_vv: f64,
}

impl QuadCoeffs {
    pub fn max_abs(&self) -> f64 {
        self.c_uu.abs().max(self.c_uv.abs()).max(self.c_vv.abs())
    }

    pub fn discriminant(&self) -> f64 {
        self.c_uv * self.c_uv - 4.0 * self.c_uu * self.c_vv
    }

    /// Value of the quadratic form at `(u, v)`.
    pub fn form(&self, u: f64, v: f64) -> f64 {
        self.c_uu * u * u + self.c_uv * u * v + self.c_vv * v * v
    }
}

/// Principal directions in the chart, each a unit `(u, v)` with `u >= 0`
/// (and `v >= 0` when `u == 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrincipalPair {
    pub dir_max: Option<[f64; 2]>,
    pub dir_min: Option<[f64; 2]>,
    pub kappa_max: f64,
    pub kappa_min: f64,
    pub umbilic_flag: bool,
}

/// Coefficients straight from a total jet.
pub fn rodrigues_quadratic(x: f64, y: f64, jet: &Jet2) -> QuadCoeffs {
    let zero = Jet2::default();
    rodrigues_split(x, y, &SplitJet { base: zero, pert: *jet })
}

/// Coefficients from a split jet, with the sphere's identically vanishing
/// contribution cancelled symbolically.
///
/// With `E = 1 + h_x^2`, `F = h_x h_y`, `G = 1 + h_y^2`:
/// `c_uu = F h_xx - E h_xy`, `c_uv = G h_xx - E h_yy`, `c_vv = G h_xy - F h_yy`.
pub fn rodrigues_split(x: f64, y: f64, jet: &SplitJet) -> QuadCoeffs {
    let b = &jet.base;
    let p = &jet.pert;
    let hx = (b.h_x, p.h_x);
    let hy = (b.h_y, p.h_y);
    let hxx = (b.h_xx, p.h_xx);
    let hxy = (b.h_xy, p.h_xy);
    let hyy = (b.h_yy, p.h_yy);
    QuadCoeffs {
        x,
        y,
        c_uu: triple_delta(hx, hy, hxx) - p.h_xy - triple_delta(hx, hx, hxy),
        c_uv: p.h_xx - p.h_yy + triple_delta(hy, hy, hxx) - triple_delta(hx, hx, hyy),
        c_vv: p.h_xy + triple_delta(hy, hy, hxy) - triple_delta(hx, hy, hyy),
    }
}

/// `(a0 + a1)(b0 + b1)(c0 + c1) - a0 b0 c0`, telescoped so that no term is
/// free of a perturbation factor.
fn triple_delta(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    let (bt, ct) = (b.0 + b.1, c.0 + c.1);
    a.1 * bt * ct + a.0 * b.1 * ct + a.0 * b.0 * c.1
}

/// Rodrigues coefficients of `s` at `(x, y)`.
pub fn quad_at(s: &MongeSurface, x: f64, y: f64) -> Result<QuadCoeffs> {
    Ok(rodrigues_split(x, y, &s.eval_split(x, y)?))
}

/// Partial derivatives of `(c_uu, c_uv, c_vv)` with respect to x and y.
pub fn quad_gradient(jet: &Jet3) -> [[f64; 2]; 3] {
    let j = &jet.second;
    let dx = [j.h_xx, j.h_xy, jet.h_xxx, jet.h_xxy, jet.h_xyy];
    let dy = [j.h_xy, j.h_yy, jet.h_xxy, jet.h_xyy, jet.h_yyy];
    let v = [j.h_x, j.h_y, j.h_xx, j.h_xy, j.h_yy];
    let dc = |d: &[f64; 5]| {
        let (hx, hy, hxx, hxy, hyy) = (v[0], v[1], v[2], v[3], v[4]);
        let (dhx, dhy, dhxx, dhxy, dhyy) = (d[0], d[1], d[2], d[3], d[4]);
        let uu = dhx * hy * hxx + hx * dhy * hxx + hx * hy * dhxx
            - dhxy
            - 2.0 * hx * dhx * hxy
            - hx * hx * dhxy;
        let uv = dhxx - dhyy + 2.0 * hy * dhy * hxx + hy * hy * dhxx
            - 2.0 * hx * dhx * hyy
            - hx * hx * dhyy;
        let vv = dhxy + 2.0 * hy * dhy * hxy + hy * hy * dhxy
            - dhx * hy * hyy
            - hx * dhy * hyy
            - hx * hy * dhyy;
        [uu, uv, vv]
    };
    let gx = dc(&dx);
    let gy = dc(&dy);
    [[gx[0], gy[0]], [gx[1], gy[1]], [gx[2], gy[2]]]
}

/// Normal curvature of the graph in chart direction `(u, v)`.
pub fn normal_curvature(jet: &Jet2, u: f64, v: f64) -> f64 {
    let [e, f, g] = jet.metric();
    let alpha = 1.0 / (1.0 + jet.h_x * jet.h_x + jet.h_y * jet.h_y).sqrt();
    let second = jet.h_xx * u * u + 2.0 * jet.h_xy * u * v + jet.h_yy * v * v;
    let first = e * u * u + 2.0 * f * u * v + g * v * v;
    alpha * second / first
}

/// Canonical representative of a line direction: `u > 0`, or `u == 0, v >= 0`.
pub fn canonical(d: [f64; 2]) -> [f64; 2] {
    if d[0] < 0.0 || (d[0] == 0.0 && d[1] < 0.0) {
        [-d[0], -d[1]]
    } else {
        d
    }
}

fn unit(d: [f64; 2]) -> [f64; 2] {
    let n = d[0].hypot(d[1]);
    [d[0] / n, d[1] / n]
}

/// Roots of the Rodrigues quadratic, labelled by normal curvature.
///
/// `tol_umbilic` is absolute. The roots are taken in homogeneous form,
/// `(q, c_uu)` and `(c_vv, q)` with `q = -(c_uv + sgn(c_uv) sqrt(disc)) / 2`,
/// which never divides by a vanishing coefficient.
pub fn principal_directions(jet: &Jet2, q: &QuadCoeffs, tol_umbilic: f64) -> Result<PrincipalPair> {
    let scale = q.max_abs();
    if scale < tol_umbilic || scale == 0.0 {
        let k = 0.5 * (normal_curvature(jet, 1.0, 0.0) + normal_curvature(jet, 0.0, 1.0));
        return Ok(PrincipalPair {
            dir_max: None,
            dir_min: None,
            kappa_max: k,
            kappa_min: k,
            umbilic_flag: true,
        });
    }
    let disc = q.discriminant();
    if disc < -EPS_DISC.max(1e-12 * scale * scale) {
        return Err(Error::Inconsistent(format!(
            "negative discriminant {disc:e} at ({}, {})",
            q.x, q.y
        )));
    }
    let root = disc.max(0.0).sqrt();
    let sgn = if q.c_uv < 0.0 { -1.0 } else { 1.0 };
    let qq = -0.5 * (q.c_uv + sgn * root);
    let r1 = [qq, q.c_uu];
    let r2 = [q.c_vv, qq];
    let n1 = r1[0].hypot(r1[1]);
    let n2 = r2[0].hypot(r2[1]);
    if !(n1 > 1e-14 * scale && n2 > 1e-14 * scale) {
        return Err(Error::Inconsistent(format!(
            "Rodrigues quadratic has a repeated root at ({}, {})",
            q.x, q.y
        )));
    }
    let v1 = unit(r1);
    let v2 = unit(r2);
    // Turning counterclockwise through a principal direction, the normal
    // curvature increases exactly where the form changes from positive to
    // negative, so the sign of its angular derivative labels the root.
    let turn = |v: [f64; 2]| {
        let w = [-v[1], v[0]];
        w[0] * (q.c_uu * v[0] + 0.5 * q.c_uv * v[1]) + w[1] * (0.5 * q.c_uv * v[0] + q.c_vv * v[1])
    };
    let (dmax, dmin) = if turn(v1) > 0.0 { (v1, v2) } else { (v2, v1) };
    Ok(PrincipalPair {
        dir_max: Some(canonical(dmax)),
        dir_min: Some(canonical(dmin)),
        kappa_max: normal_curvature(jet, dmax[0], dmax[1]),
        kappa_min: normal_curvature(jet, dmin[0], dmin[1]),
        umbilic_flag: false,
    })
}

/// Principal directions of `s` at `(x, y)` with the default scaled tolerance.
pub fn principal_at(s: &MongeSurface, x: f64, y: f64) -> Result<PrincipalPair> {
    let split = s.eval_split(x, y)?;
    let q = rodrigues_split(x, y, &split);
    let tol = DEFAULT_TOL_UMBILIC * s.coefficient_scale(x, y);
    principal_directions(&split.total(), &q, tol)
}

/// Lowest-order (degree `d - 2`) parts of the Rodrigues coefficients of the
/// sphere-based family with perturbation `sum a_k x^(d-k) y^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedCoeffs {
    pub uu: Poly2,
    pub uv: Poly2,
    pub vv: Poly2,
}

impl TruncatedCoeffs {
    pub fn eval(&self, x: f64, y: f64) -> [f64; 3] {
        [self.uu.eval(x, y), self.uv.eval(x, y), self.vv.eval(x, y)]
    }
}

/// The truncation is `(-p_xy, p_xx - p_yy, p_xy)`.
pub fn truncated_coeffs(d: u32, a: &[f64]) -> Result<TruncatedCoeffs> {
    if d < 4 || d % 2 != 0 || a.len() != d as usize + 1 {
        return Err(Error::Argument(format!(
            "need even d >= 4 and d + 1 coefficients, got d = {d} with {}",
            a.len()
        )));
    }
    let (mut uu, mut uv, mut vv) = (Poly2::new(), Poly2::new(), Poly2::new());
    let di = d as i64;
    for k in 1..di {
        let (i, j) = ((di - 1 - k) as u32, (k - 1) as u32);
        let kf = k as f64;
        let mixed = kf * (di - k) as f64 * a[k as usize];
        uu.insert(i, j, -mixed);
        vv.insert(i, j, mixed);
        let from_xx = ((di - k + 1) * (di - k)) as f64 * a[(k - 1) as usize];
        let from_yy = kf * (kf + 1.0) * a[(k + 1) as usize];
        uv.insert(i, j, from_xx - from_yy);
    }
    Ok(TruncatedCoeffs { uu, uv, vv })
}
