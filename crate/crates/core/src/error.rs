//! Error types shared by the geometry and solver modules.

use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// The tangent vectors are (numerically) parallel at the queried point.
    DegenerateChart { xi: [f64; 2], t: f64 },
    /// Numerical inversion of the change-of-variable Jacobian failed.
    SingularJacobian,
    /// Inputs violate an exact relation beyond tolerance (e.g. a negative
    /// principal-curvature discriminant).
    NumericalInconsistency { what: &'static str, value: f64 },
    /// The gap dropped below its positive floor.
    GapTooSmall { h: f64, floor: f64 },
    /// The assembled system has no Dirichlet node and is singular up to a
    /// constant.
    SingularSystem,
    /// The iterative linear solve did not reach the requested residual.
    NoConvergence { iterations: usize, residual: f64 },
    /// The requested time step exceeds the advective or viscous bound.
    CflViolation { dt: f64, limit: f64 },
    /// A field became non-finite during time integration.
    BlowUp { t: f64 },
    /// The gap collapsed below its floor during time integration.
    GapCollapse { t: f64, h: f64 },
    /// Grid construction parameters are invalid.
    InvalidGrid(&'static str),
    /// A non-finite value was handed to a field constructor.
    NonFiniteField,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateChart { xi, t } => write!(
                f,
                "degenerate chart: tangent vectors parallel at (xi1, xi2) = ({}, {}), t = {}",
                xi[0], xi[1], t
            ),
            Error::SingularJacobian => write!(f, "singular change-of-variable Jacobian"),
            Error::NumericalInconsistency { what, value } => {
                write!(f, "numerical inconsistency in {what}: {value}")
            }
            Error::GapTooSmall { h, floor } => {
                write!(f, "gap {h} below positive floor {floor}")
            }
            Error::SingularSystem => {
                write!(f, "singular system: no Dirichlet boundary node present")
            }
            Error::NoConvergence {
                iterations,
                residual,
            } => write!(
                f,
                "linear solver stalled after {iterations} iterations (residual {residual:e})"
            ),
            Error::CflViolation { dt, limit } => {
                write!(f, "time step {dt} exceeds stability limit {limit}")
            }
            Error::BlowUp { t } => write!(f, "non-finite field values at t = {t}"),
            Error::GapCollapse { t, h } => write!(f, "gap collapsed to {h} at t = {t}"),
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::NonFiniteField => write!(f, "field rejected: non-finite values"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
