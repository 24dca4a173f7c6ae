//! Principal foliations near umbilics of analytic Monge surfaces.
//!
//! The crate evaluates exact jets of surfaces `z = h(x, y)`, solves the
//! Rodrigues quadratic for principal directions, measures line-field indices
//! along circles, locates and classifies umbilics, and integrates lines of
//! curvature.

pub mod error;
pub mod foliation;
pub mod index;
pub mod monge_reduce;
pub mod poly;
pub mod rodrigues;
pub mod surface;
pub mod umbilic;

pub use error::{Error, Result};
pub use poly::Poly2;
pub use rodrigues::{
    principal_at, principal_directions, quad_at, rodrigues_quadratic, rodrigues_split,
    truncated_coeffs, PrincipalPair, QuadCoeffs, TruncatedCoeffs,
};
pub use surface::{make_s_d_a, Jet2, Jet3, MongeSurface, SplitJet, SurfaceDescription};
pub use index::{
    index_at, index_at_with, sample_circle, winding_number, Branch, CircleSample, HalfIndex,
    IndexReport, SamplingOptions,
};
pub use monge_reduce::{berry_hannay_j, classify, monge_at_umbilic, MongeForm3};
pub use umbilic::{
    find_umbilics, paraboloid_umbilics, x_axis_umbilics, Classification, UmbilicRecord,
};
pub use foliation::{
    integrate_both, integrate_curvature_line, poincare_returns, CurvatureLine, PoincareReturns,
    Ray, Termination, Trace, TraceOptions,
};
