//! Monge surfaces `z = h(x, y)` and their exact jets.
//!
//! A surface is the sum of three optional parts: the unit-sphere base
//! `1 - sqrt(1 - x^2 - y^2)`, a paraboloid `a x^2 + 2 b x y + c y^2`, and a
//! sparse polynomial perturbation. All derivatives are analytic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly2;

/// Value and first and second partial derivatives of `h` at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Jet2 {
    pub h: f64,
    pub h_x: f64,
    pub h_y: f64,
    pub h_xx: f64,
    pub h_xy: f64,
    pub h_yy: f64,
}

impl Jet2 {
    pub fn is_finite(&self) -> bool {
        [self.h, self.h_x, self.h_y, self.h_xx, self.h_xy, self.h_yy]
            .iter()
            .all(|v| v.is_finite())
    }

    fn sum(&self, other: &Jet2) -> Jet2 {
        Jet2 {
            h: self.h + other.h,
            h_x: self.h_x + other.h_x,
            h_y: self.h_y + other.h_y,
            h_xx: self.h_xx + other.h_xx,
            h_xy: self.h_xy + other.h_xy,
            h_yy: self.h_yy + other.h_yy,
        }
    }

    /// First fundamental form `(E, F, G)` of the graph.
    pub fn metric(&self) -> [f64; 3] {
        [
            1.0 + self.h_x * self.h_x,
            self.h_x * self.h_y,
            1.0 + self.h_y * self.h_y,
        ]
    }
}

/// A [`Jet2`] together with its third derivatives.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet3 {
    pub second: Jet2,
    pub h_xxx: f64,
    pub h_xxy: f64,
    pub h_xyy: f64,
    pub h_yyy: f64,
}

/// The jet of the sphere base and the jet of everything else, kept apart.
///
/// The Rodrigues coefficients vanish identically on the sphere, so they can
/// be formed from products that each carry at least one perturbation factor.
/// That keeps their relative precision when they are many orders of magnitude
/// below the sphere's curvature.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SplitJet {
    pub base: Jet2,
    pub pert: Jet2,
}

impl SplitJet {
    pub fn total(&self) -> Jet2 {
        self.base.sum(&self.pert)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MongeSurface {
    sphere_base: bool,
    quadratic: [f64; 3],
    poly: Poly2,
    domain_radius: f64,
}

/// On-disk surface description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDescription {
    pub sphere_base: bool,
    pub quadratic: [f64; 3],
    pub poly: Vec<(u32, u32, f64)>,
    pub domain_radius: f64,
}

pub const DEFAULT_SPHERE_DOMAIN: f64 = 0.9;

impl MongeSurface {
    pub fn new(
        sphere_base: bool,
        quadratic: [f64; 3],
        terms: impl IntoIterator<Item = (u32, u32, f64)>,
        domain_radius: f64,
    ) -> Result<Self> {
        if !(domain_radius.is_finite() && domain_radius > 0.0) {
            return Err(Error::Argument(format!(
                "domain radius must be positive and finite, got {domain_radius}"
            )));
        }
        if sphere_base && domain_radius >= 1.0 {
            return Err(Error::Argument(format!(
                "sphere-base surfaces need a domain radius below 1, got {domain_radius}"
            )));
        }
        if quadratic.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("non-finite quadratic coefficient".into()));
        }
        let mut poly = Poly2::new();
        for (i, j, c) in terms {
            if !c.is_finite() {
                return Err(Error::Argument(format!("non-finite coefficient for x^{i} y^{j}")));
            }
            if poly.insert(i, j, c).is_some() {
                return Err(Error::Argument(format!("monomial x^{i} y^{j} listed twice")));
            }
        }
        Ok(Self {
            sphere_base,
            quadratic,
            poly,
            domain_radius,
        })
    }

    /// The paraboloid `a x^2 + 2 b x y + c y^2` plus optional extra terms.
    pub fn paraboloid(
        quadratic: [f64; 3],
        terms: impl IntoIterator<Item = (u32, u32, f64)>,
        domain_radius: f64,
    ) -> Result<Self> {
        Self::new(false, quadratic, terms, domain_radius)
    }

    /// The pure unit-sphere base.
    pub fn sphere(domain_radius: f64) -> Result<Self> {
        Self::new(true, [0.0; 3], [], domain_radius)
    }

    pub fn from_description(desc: &SurfaceDescription) -> Result<Self> {
        Self::new(
            desc.sphere_base,
            desc.quadratic,
            desc.poly.iter().copied(),
            desc.domain_radius,
        )
    }

    pub fn description(&self) -> SurfaceDescription {
        SurfaceDescription {
            sphere_base: self.sphere_base,
            quadratic: self.quadratic,
            poly: self.poly.terms().collect(),
            domain_radius: self.domain_radius,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let desc: SurfaceDescription = serde_json::from_str(text)?;
        Self::from_description(&desc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.description()).expect("surface description serializes")
    }

    pub fn sphere_base(&self) -> bool {
        self.sphere_base
    }

    pub fn quadratic(&self) -> [f64; 3] {
        self.quadratic
    }

    pub fn poly(&self) -> &Poly2 {
        &self.poly
    }

    pub fn poly_terms(&self) -> Vec<(u32, u32, f64)> {
        self.poly.terms().collect()
    }

    pub fn domain_radius(&self) -> f64 {
        self.domain_radius
    }

    pub fn with_domain_radius(mut self, r: f64) -> Result<Self> {
        self = Self::new(self.sphere_base, self.quadratic, self.poly.terms(), r)?;
        Ok(self)
    }

    /// Replaces (or adds) the coefficient of `x^i y^j`.
    pub fn with_coeff(&self, i: u32, j: u32, coeff: f64) -> MongeSurface {
        let mut out = self.clone();
        out.poly.insert(i, j, coeff);
        out
    }

    pub fn with_quadratic(&self, quadratic: [f64; 3]) -> MongeSurface {
        let mut out = self.clone();
        out.quadratic = quadratic;
        out
    }

    fn has_quadratic(&self) -> bool {
        self.quadratic.iter().any(|&c| c != 0.0)
    }

    /// The common total degree of all perturbation terms, or `None` when the
    /// perturbation is empty or of mixed degree. A nonzero paraboloid part
    /// counts as degree-2 terms.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.poly.degrees();
        if self.has_quadratic() {
            degrees.insert(2);
        }
        if degrees.len() == 1 {
            degrees.into_iter().next()
        } else {
            None
        }
    }

    /// Magnitude of the Rodrigues coefficients expected near `(x, y)`.
    ///
    /// On a sphere-base surface with a homogeneous degree-`d` perturbation the
    /// coefficients scale like `|coeff| r^(d-2)`; elsewhere they are `O(1)`.
    /// Umbilic tolerances are taken relative to this scale.
    pub fn coefficient_scale(&self, x: f64, y: f64) -> f64 {
        match (self.sphere_base, self.homogeneous_degree()) {
            (true, Some(d)) if d >= 3 => {
                let r = x.hypot(y);
                let mag = self.poly.max_abs_coeff().max(f64::MIN_POSITIVE);
                (mag * r.powi(d as i32 - 2)).max(1e-300)
            }
            _ => 1.0,
        }
    }

    /// Whether the origin is an exact umbilic (sphere base plus a
    /// perturbation of degree three or more, or a round paraboloid).
    pub fn origin_is_umbilic(&self) -> bool {
        let no_low_terms = self.poly.terms().all(|(i, j, c)| i + j >= 3 || c == 0.0);
        let [a, b, c] = self.quadratic;
        no_low_terms && b == 0.0 && a == c
    }

    fn check_domain(&self, x: f64, y: f64) -> Result<()> {
        let r = x.hypot(y);
        if !(r < self.domain_radius) {
            return Err(Error::Domain {
                x,
                y,
                radius: r,
                limit: self.domain_radius,
            });
        }
        Ok(())
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x.hypot(y) < self.domain_radius
    }

    pub fn height(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.eval_jet(x, y)?.h)
    }

    pub fn eval_jet(&self, x: f64, y: f64) -> Result<Jet2> {
        Ok(self.eval_split(x, y)?.total())
    }

    pub fn eval_split(&self, x: f64, y: f64) -> Result<SplitJet> {
        self.check_domain(x, y)?;
        let base = if self.sphere_base {
            sphere_jet3(x, y).second
        } else {
            Jet2::default()
        };
        let [a, b, c] = self.quadratic;
        let p = &self.poly;
        let pert = Jet2 {
            h: a * x * x + 2.0 * b * x * y + c * y * y + p.eval(x, y),
            h_x: 2.0 * (a * x + b * y) + p.derivative(x, y, 1, 0),
            h_y: 2.0 * (b * x + c * y) + p.derivative(x, y, 0, 1),
            h_xx: 2.0 * a + p.derivative(x, y, 2, 0),
            h_xy: 2.0 * b + p.derivative(x, y, 1, 1),
            h_yy: 2.0 * c + p.derivative(x, y, 0, 2),
        };
        Ok(SplitJet { base, pert })
    }

    pub fn eval_jet3(&self, x: f64, y: f64) -> Result<Jet3> {
        let second = self.eval_jet(x, y)?;
        let base = if self.sphere_base {
            sphere_jet3(x, y)
        } else {
            Jet3::default()
        };
        let p = &self.poly;
        Ok(Jet3 {
            second,
            h_xxx: base.h_xxx + p.derivative(x, y, 3, 0),
            h_xxy: base.h_xxy + p.derivative(x, y, 2, 1),
            h_xyy: base.h_xyy + p.derivative(x, y, 1, 2),
            h_yyy: base.h_yyy + p.derivative(x, y, 0, 3),
        })
    }

    /// `h(x0 + dx, y0 + dy) - h(x0, y0)`, accurate for small offsets.
    pub fn height_delta(&self, x0: f64, y0: f64, dx: f64, dy: f64) -> Result<f64> {
        self.check_domain(x0, y0)?;
        self.check_domain(x0 + dx, y0 + dy)?;
        let mut d = 0.0;
        if self.sphere_base {
            // sqrt(1 - r0^2) - sqrt(1 - r1^2) = (r1^2 - r0^2) / (s0 + s1)
            let dr2 = 2.0 * (x0 * dx + y0 * dy) + dx * dx + dy * dy;
            let s0 = (1.0 - x0 * x0 - y0 * y0).sqrt();
            let (x1, y1) = (x0 + dx, y0 + dy);
            let s1 = (1.0 - x1 * x1 - y1 * y1).sqrt();
            d += dr2 / (s0 + s1);
        }
        let [a, b, c] = self.quadratic;
        d += a * (2.0 * x0 * dx + dx * dx)
            + 2.0 * b * (x0 * dy + y0 * dx + dx * dy)
            + c * (2.0 * y0 * dy + dy * dy);
        d += self.poly.delta(x0, y0, dx, dy);
        Ok(d)
    }

    /// The surface whose graph is this graph rotated by `angle` about the
    /// z-axis: `h'(R p) = h(p)`. The sphere base is untouched.
    pub fn rotate_parameters(&self, angle: f64) -> MongeSurface {
        let [a, b, c] = self.quadratic;
        let quad: Poly2 = [(2, 0, a), (1, 1, 2.0 * b), (0, 2, c)].into_iter().collect();
        let rq = quad.rotated(angle);
        MongeSurface {
            sphere_base: self.sphere_base,
            quadratic: [rq.coeff(2, 0), 0.5 * rq.coeff(1, 1), rq.coeff(0, 2)],
            poly: self.poly.rotated(angle),
            domain_radius: self.domain_radius,
        }
    }
}

/// Builds the family member `1 - sqrt(1 - x^2 - y^2) + sum a_k x^(d-k) y^k`.
pub fn make_s_d_a(d: u32, a: &[f64]) -> Result<MongeSurface> {
    if d < 4 || d % 2 != 0 {
        return Err(Error::Argument(format!(
            "degree must be even and at least 4, got {d}"
        )));
    }
    if a.len() != d as usize + 1 {
        return Err(Error::Argument(format!(
            "degree {d} needs {} coefficients, got {}",
            d + 1,
            a.len()
        )));
    }
    if a.iter().all(|&c| c == 0.0) {
        return Err(Error::Argument(
            "zero perturbation leaves the sphere, whose umbilics are not isolated".into(),
        ));
    }
    let terms = a.iter().enumerate().map(|(k, &c)| (d - k as u32, k as u32, c));
    MongeSurface::new(true, [0.0; 3], terms, DEFAULT_SPHERE_DOMAIN)
}

/// Closed-form third-order jet of `1 - sqrt(1 - x^2 - y^2)`.
fn sphere_jet3(x: f64, y: f64) -> Jet3 {
    let s2 = 1.0 - x * x - y * y;
    let s = s2.sqrt();
    let s3 = s2 * s;
    let s5 = s3 * s2;
    let second = Jet2 {
        // 1 - s = r^2 / (1 + s)
        h: (x * x + y * y) / (1.0 + s),
        h_x: x / s,
        h_y: y / s,
        h_xx: (1.0 - y * y) / s3,
        h_xy: x * y / s3,
        h_yy: (1.0 - x * x) / s3,
    };
    Jet3 {
        second,
        h_xxx: 3.0 * x * (1.0 - y * y) / s5,
        h_xxy: y * (1.0 + 2.0 * x * x - y * y) / s5,
        h_xyy: x * (1.0 + 2.0 * y * y - x * x) / s5,
        h_yyy: 3.0 * y * (1.0 - x * x) / s5,
    }
}
