use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({x}, {y}) at radius {radius} lies outside the chart of radius {limit}")]
    Domain {
        x: f64,
        y: f64,
        radius: f64,
        limit: f64,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("umbilic on contour at theta = {theta}")]
    UmbilicOnContour { theta: f64 },

    #[error("unresolved contour: refinement exceeded {max_samples} samples")]
    UnresolvedContour { max_samples: usize },

    #[error("ambiguous winding: lifted total {total} is {residual} turns away from a half-integer")]
    AmbiguousWinding { total: f64, residual: f64 },

    #[error("branch disagreement: max branch winds {max}, min branch winds {min}")]
    BranchDisagreement { max: f64, min: f64 },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("point ({x}, {y}) is not an umbilic (residual {residual:e}, tolerance {tol:e})")]
    NotUmbilic { x: f64, y: f64, residual: f64, tol: f64 },

    #[error("degenerate chart: {0}")]
    DegenerateChart(String),

    #[error("start point ({x}, {y}) is an umbilic")]
    StartAtUmbilic { x: f64, y: f64 },

    #[error("surface description: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of a numerical contract (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::UmbilicOnContour { .. }
                | Error::UnresolvedContour { .. }
                | Error::AmbiguousWinding { .. }
                | Error::BranchDisagreement { .. }
                | Error::Inconsistent(_)
                | Error::NotUmbilic { .. }
                | Error::DegenerateChart(_)
                | Error::StartAtUmbilic { .. }
                | Error::Domain { .. }
        )
    }
}
