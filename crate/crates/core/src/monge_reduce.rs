//! Monge form at an umbilic: translate, rotate the normal to the vertical,
//! renormalize by a multiplier, then read off the cubic normal form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rodrigues::quad_at;
use crate::surface::MongeSurface;
use crate::umbilic::Classification;

/// Residual allowed at `chi`, relative to the coefficient scale. Looser than
/// the detector since callers may pass a point found by other means.
pub const MONGE_UMBILIC_TOL: f64 = 1e-7;

/// Truncated polynomial in `(x, y, z)` of total degree at most 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Poly3([f64; 64]);

impl Default for Poly3 {
    fn default() -> Self {
        Self([0.0; 64])
    }
}

const fn slot(i: usize, j: usize, k: usize) -> usize {
    i * 16 + j * 4 + k
}

impl Poly3 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        let mut p = Self::zero();
        p.0[0] = 1.0;
        p
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        if i + j + k > 3 {
            0.0
        } else {
            self.0[slot(i, j, k)]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, c: f64) {
        assert!(i + j + k <= 3, "degree above 3");
        self.0[slot(i, j, k)] = c;
    }

    pub fn add_to(&mut self, i: usize, j: usize, k: usize, c: f64) {
        assert!(i + j + k <= 3, "degree above 3");
        self.0[slot(i, j, k)] += c;
    }

    /// Exponents of every monomial of total degree `deg`.
    pub fn monomials(deg: usize) -> impl Iterator<Item = (usize, usize, usize)> {
        (0..=deg).flat_map(move |i| (0..=deg - i).map(move |j| (i, j, deg - i - j)))
    }

    fn all() -> impl Iterator<Item = (usize, usize, usize)> {
        (0..=3).flat_map(Self::monomials)
    }

    pub fn mul(&self, other: &Poly3) -> Poly3 {
        let mut out = Poly3::zero();
        for (i, j, k) in Self::all() {
            let a = self.get(i, j, k);
            if a == 0.0 {
                continue;
            }
            for (p, q, r) in Self::all() {
                if i + j + k + p + q + r > 3 {
                    continue;
                }
                out.add_to(i + p, j + q, k + r, a * other.get(p, q, r));
            }
        }
        out
    }

    pub fn linear(cx: f64, cy: f64, cz: f64) -> Poly3 {
        let mut p = Poly3::zero();
        p.set(1, 0, 0, cx);
        p.set(0, 1, 0, cy);
        p.set(0, 0, 1, cz);
        p
    }

    /// Substitutes `x_a = sum_b m[a][b] q_b`.
    pub fn compose_linear(&self, m: &[[f64; 3]; 3]) -> Poly3 {
        let lin: Vec<Poly3> = m.iter().map(|r| Poly3::linear(r[0], r[1], r[2])).collect();
        let powers = |l: &Poly3| {
            let p2 = l.mul(l);
            [Poly3::one(), *l, p2, p2.mul(l)]
        };
        let (px, py, pz) = (powers(&lin[0]), powers(&lin[1]), powers(&lin[2]));
        let mut out = Poly3::zero();
        for (i, j, k) in Self::all() {
            let c = self.get(i, j, k);
            if c == 0.0 {
                continue;
            }
            let term = px[i].mul(&py[j]).mul(&pz[k]);
            for (a, b, e) in Self::all() {
                out.add_to(a, b, e, c * term.get(a, b, e));
            }
        }
        out
    }
}

/// Coefficients of the multiplier `g = 1 + b_x x + b_y y + b_z z + ...`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Multiplier {
    pub b_x: f64,
    pub b_y: f64,
    pub b_z: f64,
    pub b_xx: f64,
    pub b_xy: f64,
    pub b_yy: f64,
    pub b_xz: f64,
    pub b_yz: f64,
    pub b_zz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MongeFrame {
    /// The umbilic as a point of space.
    pub translation: [f64; 3],
    /// Rotation about the z-axis placing `chi` on the positive x-axis.
    pub pre_rotation: f64,
    /// Total rotation: rows are the Monge frame axes in original coordinates.
    pub rotation: [[f64; 3]; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MongeForm3 {
    pub k: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub frame: MongeFrame,
    /// Reduced height 2-jet: coefficients of `x`, `y`.
    pub linear: [f64; 2],
    /// Reduced height: coefficients of `x^2`, `xy`, `y^2`.
    pub quadratic: [f64; 3],
    pub multiplier: Multiplier,
}

impl MongeForm3 {
    /// `[x^3, x^2 y, x y^2, y^3]` coefficients of the reduced height.
    pub fn cubic_coefficients(&self) -> [f64; 4] {
        [
            self.alpha / 6.0,
            self.beta / 2.0,
            self.gamma / 2.0,
            self.delta / 6.0,
        ]
    }

    /// Largest deviation of the quadratic part from `k/2 (x^2 + y^2)`.
    pub fn umbilic_defect(&self) -> f64 {
        let [a, b, c] = self.quadratic;
        (a - 0.5 * self.k)
            .abs()
            .max(b.abs())
            .max((c - 0.5 * self.k).abs())
    }
}

fn matmul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..3).map(|l| a[i][l] * b[l][j]).sum();
        }
    }
    out
}

fn transpose(a: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

/// Minimal rotation taking the unit vector `n` to `e_z`.
fn align_to_vertical(n: [f64; 3]) -> [[f64; 3]; 3] {
    let v = [n[1], -n[0], 0.0];
    let c = n[2];
    let vx = [[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]];
    let vx2 = matmul(&vx, &vx);
    let f = 1.0 / (1.0 + c);
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = f64::from(u8::from(i == j)) + vx[i][j] + f * vx2[i][j];
        }
    }
    r
}

/// Multiplier `g` with `g H = H_z z + (terms free of z) + O(4)`, built one
/// degree at a time. `h` must have no linear `x`, `y` terms.
fn multiplier(h: &Poly3) -> Poly3 {
    let hz = h.get(0, 0, 1);
    let mut g = Poly3::one();
    for deg in 2..=3 {
        let prod = g.mul(h);
        for (i, j, k) in Poly3::monomials(deg) {
            if k >= 1 {
                g.add_to(i, j, k - 1, -prod.get(i, j, k) / hz);
            }
        }
    }
    g
}

pub fn monge_at_umbilic(s: &MongeSurface, chi: [f64; 2]) -> Result<MongeForm3> {
    monge_at_umbilic_with(s, chi, MONGE_UMBILIC_TOL)
}

/// As [`monge_at_umbilic`] with an explicit relative umbilic tolerance.
pub fn monge_at_umbilic_with(s: &MongeSurface, chi: [f64; 2], tol: f64) -> Result<MongeForm3> {
    let q = quad_at(s, chi[0], chi[1])?;
    let limit = tol * s.coefficient_scale(chi[0], chi[1]);
    if !(q.max_abs() <= limit) {
        return Err(Error::NotUmbilic {
            x: chi[0],
            y: chi[1],
            residual: q.max_abs(),
            tol: limit,
        });
    }

    // Translate: chi onto the positive x-axis, then to the origin.
    let r = chi[0].hypot(chi[1]);
    let phi = if r > 0.0 { chi[1].atan2(chi[0]) } else { 0.0 };
    let sr = s.rotate_parameters(-phi);
    let j3 = sr.eval_jet3(r, 0.0)?;
    let j = j3.second;

    // Third-order Taylor polynomial of H = z - h at chi.
    let mut h = Poly3::zero();
    h.set(0, 0, 1, 1.0);
    h.set(1, 0, 0, -j.h_x);
    h.set(0, 1, 0, -j.h_y);
    h.set(2, 0, 0, -0.5 * j.h_xx);
    h.set(1, 1, 0, -j.h_xy);
    h.set(0, 2, 0, -0.5 * j.h_yy);
    h.set(3, 0, 0, -j3.h_xxx / 6.0);
    h.set(2, 1, 0, -0.5 * j3.h_xxy);
    h.set(1, 2, 0, -0.5 * j3.h_xyy);
    h.set(0, 3, 0, -j3.h_yyy / 6.0);

    // Rotate: the normal becomes vertical.
    let norm = (1.0 + j.h_x * j.h_x + j.h_y * j.h_y).sqrt();
    let n = [-j.h_x / norm, -j.h_y / norm, 1.0 / norm];
    let rot = align_to_vertical(n);
    let mut ht = h.compose_linear(&transpose(&rot));
    let hz = ht.get(0, 0, 1);
    if !(hz.abs() > 1e-12) {
        return Err(Error::DegenerateChart(format!(
            "vanishing z-derivative {hz:e} after rotation at ({}, {})",
            chi[0], chi[1]
        )));
    }
    let linear = [-ht.get(1, 0, 0) / hz, -ht.get(0, 1, 0) / hz];
    ht.set(1, 0, 0, 0.0);
    ht.set(0, 1, 0, 0.0);

    let g = multiplier(&ht);
    let reduced = g.mul(&ht);
    let c = |i, jj| -reduced.get(i, jj, 0) / hz;

    let quadratic = [c(2, 0), c(1, 1), c(0, 2)];
    let rz = {
        let (sn, cs) = (-phi).sin_cos();
        [[cs, -sn, 0.0], [sn, cs, 0.0], [0.0, 0.0, 1.0]]
    };
    let height = s.height(chi[0], chi[1])?;
    Ok(MongeForm3 {
        k: quadratic[0] + quadratic[2],
        alpha: 6.0 * c(3, 0),
        beta: 2.0 * c(2, 1),
        gamma: 2.0 * c(1, 2),
        delta: 6.0 * c(0, 3),
        frame: MongeFrame {
            translation: [chi[0], chi[1], height],
            pre_rotation: -phi,
            rotation: matmul(&rot, &rz),
        },
        linear,
        quadratic,
        multiplier: Multiplier {
            b_x: g.get(1, 0, 0),
            b_y: g.get(0, 1, 0),
            b_z: g.get(0, 0, 1),
            b_xx: g.get(2, 0, 0),
            b_xy: g.get(1, 1, 0),
            b_yy: g.get(0, 2, 0),
            b_xz: g.get(1, 0, 1),
            b_yz: g.get(0, 1, 1),
            b_zz: g.get(0, 0, 2),
        },
    })
}

pub fn berry_hannay_j(m: &MongeForm3) -> f64 {
    j_of(m.alpha, m.beta, m.gamma, m.delta)
}

pub fn j_of(alpha: f64, beta: f64, gamma: f64, delta: f64) -> f64 {
    alpha * gamma - gamma * gamma + beta * delta - beta * beta
}

pub fn classify(m: &MongeForm3, tol_j: f64) -> Classification {
    classify_j(berry_hannay_j(m), tol_j)
}

pub fn classify_j(j: f64, tol_j: f64) -> Classification {
    if j < -tol_j {
        Classification::Star
    } else if j > tol_j {
        Classification::NonStar
    } else {
        Classification::Degenerate
    }
}

/// `1e-9 |k|^3 |chi|^(2(d-3))` for homogeneous perturbations of degree `d`,
/// `1e-9 |k|^3` otherwise.
pub fn default_tol_j(s: &MongeSurface, m: &MongeForm3) -> f64 {
    let [x, y, _] = m.frame.translation;
    let base = 1e-9 * m.k.abs().powi(3);
    match s.homogeneous_degree() {
        Some(d) if s.sphere_base() && d > 3 => base * x.hypot(y).powi(2 * (d as i32 - 3)),
        _ => base,
    }
}
