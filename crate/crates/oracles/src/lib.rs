//! Reference computations that share no algebra with `umbilic-core`.
//!
//! They only use surface heights (and, for the shape operator, the first and
//! second derivatives), so they can check the Rodrigues coefficients, the
//! Monge reduction and the index computation from the outside.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use umbilic_core::{Jet2, MongeSurface};

/// Second-order jet by central differences of `height`, Richardson
/// extrapolated over four step halvings.
pub fn richardson_jet(s: &MongeSurface, x: f64, y: f64, h0: f64) -> Jet2 {
    let f = |dx: f64, dy: f64| s.height_delta(x, y, dx, dy).expect("stencil inside chart");
    let raw = |h: f64| {
        [
            (f(h, 0.0) - f(-h, 0.0)) / (2.0 * h),
            (f(0.0, h) - f(0.0, -h)) / (2.0 * h),
            (f(h, 0.0) + f(-h, 0.0)) / (h * h),
            (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h),
            (f(0.0, h) + f(0.0, -h)) / (h * h),
        ]
    };
    let levels = 4;
    let mut table: Vec<[f64; 5]> = (0..levels).map(|l| raw(h0 / f64::from(1 << l))).collect();
    for order in 1..levels {
        let factor = 4f64.powi(order as i32);
        for l in (order..levels).rev() {
            for c in 0..5 {
                table[l][c] = (factor * table[l][c] - table[l - 1][c]) / (factor - 1.0);
            }
        }
    }
    let d = table[levels - 1];
    Jet2 {
        h: s.height(x, y).expect("point inside chart"),
        h_x: d[0],
        h_y: d[1],
        h_xx: d[2],
        h_xy: d[3],
        h_yy: d[4],
    }
}

/// Principal curvatures (ascending) and their directions in the parameter
/// plane, from a symmetric eigenproblem of the shape operator.
pub fn shape_operator(jet: &Jet2) -> [(f64, [f64; 2]); 2] {
    let first = Matrix2::new(
        1.0 + jet.h_x * jet.h_x,
        jet.h_x * jet.h_y,
        jet.h_x * jet.h_y,
        1.0 + jet.h_y * jet.h_y,
    );
    let w = (1.0 + jet.h_x * jet.h_x + jet.h_y * jet.h_y).sqrt();
    let second = Matrix2::new(jet.h_xx, jet.h_xy, jet.h_xy, jet.h_yy) / w;
    let l = first.cholesky().expect("metric is positive definite").l();
    let li = l.try_inverse().expect("invertible");
    let m = li * second * li.transpose();
    let m = (m + m.transpose()) * 0.5;
    let eig = m.symmetric_eigen();
    let mut pairs: Vec<(f64, [f64; 2])> = (0..2)
        .map(|i| {
            let v: Vector2<f64> = li.transpose() * eig.eigenvectors.column(i);
            let n = v.norm();
            (eig.eigenvalues[i], [v[0] / n, v[1] / n])
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    [pairs[0], pairs[1]]
}

/// Height-graph coefficients over the plane through the surface point at
/// `chi` spanned by `e1`, `e2`, measured along `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regraph {
    /// Coefficients of `u`, `v`.
    pub linear: [f64; 2],
    /// Coefficients of `u^2`, `uv`, `v^2`.
    pub quadratic: [f64; 3],
    /// Coefficients of `u^3`, `u^2 v`, `u v^2`, `v^3`.
    pub cubic: [f64; 4],
}

fn offset_along_normal(
    s: &MongeSurface,
    chi: [f64; 2],
    frame: &[[f64; 3]; 3],
    u: f64,
    v: f64,
) -> f64 {
    let [e1, e2, n] = frame;
    let mut w = 0.0;
    for _ in 0..60 {
        let dx = u * e1[0] + v * e2[0] + w * n[0];
        let dy = u * e1[1] + v * e2[1] + w * n[1];
        let dz = u * e1[2] + v * e2[2] + w * n[2];
        let g = s.height_delta(chi[0], chi[1], dx, dy).expect("stencil inside chart") - dz;
        let jet = s.eval_jet(chi[0] + dx, chi[1] + dy).expect("stencil inside chart");
        let dg = jet.h_x * n[0] + jet.h_y * n[1] - n[2];
        let step = g / dg;
        w -= step;
        if step.abs() <= 1e-18 * w.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    w
}

const EXPONENTS: [(i32, i32); 15] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
    (4, 0),
    (3, 1),
    (2, 2),
    (1, 3),
    (0, 4),
];

fn fit(s: &MongeSurface, chi: [f64; 2], frame: &[[f64; 3]; 3], rho: f64) -> Vec<f64> {
    let nodes: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let mut a = DMatrix::zeros(25, EXPONENTS.len());
    let mut b = DVector::zeros(25);
    for (row, (i, j)) in (0..5).flat_map(|i| (0..5).map(move |j| (i, j))).enumerate() {
        let (su, sv) = (nodes[i], nodes[j]);
        for (col, &(p, q)) in EXPONENTS.iter().enumerate() {
            a[(row, col)] = su.powi(p) * sv.powi(q);
        }
        b[row] = offset_along_normal(s, chi, frame, su * rho, sv * rho);
    }
    let sol = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .expect("least squares solve");
    EXPONENTS
        .iter()
        .zip(sol.iter())
        .map(|(&(p, q), c)| c / rho.powi(p + q))
        .collect()
}

/// Least-squares quartic fit on a 5x5 grid of half-width `rho` and again at
/// `rho / 2`, Richardson combined to cancel the `rho^2` leakage of
/// higher-order terms.
pub fn regraph(s: &MongeSurface, chi: [f64; 2], frame: &[[f64; 3]; 3], rho: f64) -> Regraph {
    let coarse = fit(s, chi, frame, rho);
    let fine = fit(s, chi, frame, 0.5 * rho);
    let c: Vec<f64> = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect();
    Regraph {
        linear: [c[1], c[2]],
        quadratic: [c[3], c[4], c[5]],
        cubic: [c[6], c[7], c[8], c[9]],
    }
}

/// Tangent frame at `chi`: the images of `(1, 0)` and `(0, 1)` made
/// orthonormal, and the unit normal.
pub fn tangent_frame(s: &MongeSurface, chi: [f64; 2]) -> [[f64; 3]; 3] {
    let jet = s.eval_jet(chi[0], chi[1]).expect("point inside chart");
    let norm3 = |v: [f64; 3]| {
        let l = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / l, v[1] / l, v[2] / l]
    };
    let e1 = norm3([1.0, 0.0, jet.h_x]);
    let n = norm3([-jet.h_x, -jet.h_y, 1.0]);
    let e2 = [
        n[1] * e1[2] - n[2] * e1[1],
        n[2] * e1[0] - n[0] * e1[2],
        n[0] * e1[1] - n[1] * e1[0],
    ];
    [e1, e2, n]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_regraph_is_a_sphere() {
        let s = MongeSurface::sphere(0.9).unwrap();
        let chi = [0.3, -0.2];
        let g = regraph(&s, chi, &tangent_frame(&s, chi), 1e-3);
        assert!((g.quadratic[0] - 0.5).abs() < 1e-9);
        assert!((g.quadratic[2] - 0.5).abs() < 1e-9);
        assert!(g.quadratic[1].abs() < 1e-9);
        for c in g.cubic {
            assert!(c.abs() < 1e-7, "{g:?}");
        }
    }

    #[test]
    fn shape_operator_of_paraboloid_at_origin() {
        let s = MongeSurface::paraboloid([0.5, 0.0, 0.4], [], 2.0).unwrap();
        let [lo, hi] = shape_operator(&s.eval_jet(0.0, 0.0).unwrap());
        assert!((lo.0 - 0.8).abs() < 1e-15 && (hi.0 - 1.0).abs() < 1e-15);
        assert!(lo.1[1].abs() > 0.999_999 && hi.1[0].abs() > 0.999_999);
    }

    #[test]
    fn richardson_matches_exact_jet() {
        let s = MongeSurface::paraboloid([0.3, 0.1, 0.7], [(3, 0, 0.2), (1, 2, -0.4)], 2.0).unwrap();
        let fd = richardson_jet(&s, 0.2, 0.1, 1e-2);
        let ex = s.eval_jet(0.2, 0.1).unwrap();
        for (a, b) in [
            (fd.h_x, ex.h_x),
            (fd.h_y, ex.h_y),
            (fd.h_xx, ex.h_xx),
            (fd.h_xy, ex.h_xy),
            (fd.h_yy, ex.h_yy),
        ] {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }
}

/// Winding of the min-curvature line field around a circle, in turns, from
/// `n` uniform samples of shape-operator eigenvectors. No refinement.
pub fn brute_force_winding(s: &MongeSurface, center: [f64; 2], radius: f64, n: usize) -> f64 {
    let angle = |k: usize| {
        let t = std::f64::consts::TAU * k as f64 / n as f64;
        let p = [center[0] + radius * t.cos(), center[1] + radius * t.sin()];
        let jet = s.eval_jet(p[0], p[1]).expect("circle inside chart");
        let [lo, _] = shape_operator(&jet);
        lo.1[1].atan2(lo.1[0])
    };
    let first = angle(0);
    let mut prev = first;
    let mut total = 0.0;
    for k in 1..=n {
        let a = if k == n { first } else { angle(k) };
        let mut d = a - prev;
        // Directions are defined modulo half a turn.
        while d > std::f64::consts::FRAC_PI_2 {
            d -= std::f64::consts::PI;
        }
        while d <= -std::f64::consts::FRAC_PI_2 {
            d += std::f64::consts::PI;
        }
        total += d;
        prev = a;
    }
    total / std::f64::consts::TAU
}
