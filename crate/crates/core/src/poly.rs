//! Sparse bivariate polynomials with exact differentiation, shifting and
//! rotation re-expansion.

use std::collections::{BTreeMap, BTreeSet};

/// Sparse polynomial `sum c_ij x^i y^j`, keyed by exponent pair.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), f64>,
}

impl Poly2 {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets the coefficient of `x^i y^j`, returning the previous one if the
    /// monomial was already present.
    pub fn insert(&mut self, i: u32, j: u32, coeff: f64) -> Option<f64> {
        self.terms.insert((i, j), coeff)
    }

    /// Adds to the coefficient of `x^i y^j`, creating the monomial if needed.
    pub fn add(&mut self, i: u32, j: u32, coeff: f64) {
        *self.terms.entry((i, j)).or_insert(0.0) += coeff;
    }

    pub fn coeff(&self, i: u32, j: u32) -> f64 {
        self.terms.get(&(i, j)).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, i: u32, j: u32) -> bool {
        self.terms.contains_key(&(i, j))
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.terms.iter().map(|(&(i, j), &c)| (i, j, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every stored coefficient is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|&c| c == 0.0)
    }

    /// Total degrees of the stored monomials.
    pub fn degrees(&self) -> BTreeSet<u32> {
        self.terms.keys().map(|&(i, j)| i + j).collect()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.derivative(x, y, 0, 0)
    }

    /// Evaluates `d^m/dx^m d^n/dy^n` of the polynomial at `(x, y)`.
    pub fn derivative(&self, x: f64, y: f64, m: u32, n: u32) -> f64 {
        let mut sum = 0.0;
        for (&(i, j), &c) in &self.terms {
            if i < m || j < n || c == 0.0 {
                continue;
            }
            let f = falling(i, m) * falling(j, n);
            sum += c * f * x.powi((i - m) as i32) * y.powi((j - n) as i32);
        }
        sum
    }

    /// `p(x0 + dx, y0 + dy) - p(x0, y0)` without forming either value.
    ///
    /// Each monomial is re-expanded about `(x0, y0)` and only the terms that
    /// carry at least one power of the offset are summed, so the difference
    /// keeps its relative precision when the offset is small.
    pub fn delta(&self, x0: f64, y0: f64, dx: f64, dy: f64) -> f64 {
        let mut sum = 0.0;
        for (&(i, j), &c) in &self.terms {
            if c == 0.0 {
                continue;
            }
            for a in 0..=i {
                let xa = binomial(i, a) * x0.powi((i - a) as i32) * dx.powi(a as i32);
                for b in 0..=j {
                    if a == 0 && b == 0 {
                        continue;
                    }
                    sum += c * xa * binomial(j, b) * y0.powi((j - b) as i32) * dy.powi(b as i32);
                }
            }
        }
        sum
    }

    /// Re-expands `q(x, y) = p(cos t x + sin t y, -sin t x + cos t y)`.
    ///
    /// The graph of `q` is the graph of `p` rotated by `t` about the z-axis.
    /// The result is dense in every degree present in `p`; coefficients that
    /// cancel to rounding level are snapped to exactly zero.
    pub fn rotated(&self, angle: f64) -> Poly2 {
        let (s, c) = angle.sin_cos();
        let mut out = Poly2::new();
        let mut scale: BTreeMap<u32, f64> = BTreeMap::new();
        for &deg in &self.degrees() {
            for i in 0..=deg {
                out.insert(i, deg - i, 0.0);
            }
        }
        for (&(i, j), &coeff) in &self.terms {
            let entry = scale.entry(i + j).or_insert(0.0);
            *entry = entry.max(coeff.abs());
            if coeff == 0.0 {
                continue;
            }
            // (c x + s y)^i (-s x + c y)^j
            for a in 0..=i {
                let fa = binomial(i, a) * c.powi((i - a) as i32) * s.powi(a as i32);
                for b in 0..=j {
                    let fb = binomial(j, b) * (-s).powi((j - b) as i32) * c.powi(b as i32);
                    out.add((i - a) + (j - b), a + b, coeff * fa * fb);
                }
            }
        }
        for (&(i, j), v) in out.terms.iter_mut() {
            let deg = i + j;
            let tol = 1e-13 * scale.get(&deg).copied().unwrap_or(0.0) * f64::from(deg + 1);
            if v.abs() <= tol {
                *v = 0.0;
            }
        }
        out
    }
}

impl FromIterator<(u32, u32, f64)> for Poly2 {
    fn from_iter<T: IntoIterator<Item = (u32, u32, f64)>>(iter: T) -> Self {
        let mut p = Poly2::new();
        for (i, j, c) in iter {
            p.add(i, j, c);
        }
        p
    }
}

/// n (n-1) ... (n-k+1)
pub(crate) fn falling(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, t| acc * f64::from(n - t))
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, t| acc * f64::from(n - t) / f64::from(t + 1))
}
