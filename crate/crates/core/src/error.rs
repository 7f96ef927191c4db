use alloc::vec::Vec;
use core::fmt;

/// Errors produced by problem construction, the solvers and the reference oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// Hessian asymmetry above the accepted tolerance.
    NotSymmetric { max_asymmetry: f64 },
    /// Coupling matrix is not of full row rank (or has more rows than columns).
    RankDeficient { rows: usize, cols: usize },
    InvalidBox { index: usize },
    NonFinite(&'static str),
    InvalidParameter(&'static str),
    /// The inner solver hit its iteration cap before the stopping criterion held.
    InnerNotConverged {
        best: Vec<f64>,
        measured: f64,
        iters: usize,
    },
    /// A criterion that needs the true inner optimum was checked without one.
    MissingReference,
    /// A prescribed inner accuracy was supplied to a certified run.
    CertifiedOverride,
    /// Strong convexity of the inner problem is required but missing.
    NotStronglyConvex,
    EigenNotConverged,
    SingularSystem,
    Infeasible,
    NotConverged(&'static str),
    EnumerationBudget { n: usize, max: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                what,
                expected,
                found,
            } => write!(f, "dimension mismatch for {what}: expected {expected}, found {found}"),
            Error::NotSymmetric { max_asymmetry } => {
                write!(f, "Hessian is not symmetric (max asymmetry {max_asymmetry:e})")
            }
            Error::RankDeficient { rows, cols } => {
                write!(f, "coupling matrix {rows}x{cols} does not have full row rank")
            }
            Error::InvalidBox { index } => write!(f, "invalid box bounds at coordinate {index}"),
            Error::NonFinite(what) => write!(f, "non-finite entry in {what}"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::InnerNotConverged {
                measured, iters, ..
            } => write!(
                f,
                "inner solver stopped after {iters} iterations without certificate (measured {measured:e})"
            ),
            Error::MissingReference => write!(f, "criterion requires a reference inner solution"),
            Error::CertifiedOverride => {
                write!(f, "certified mode does not accept an inner accuracy override")
            }
            Error::NotStronglyConvex => write!(f, "inner problem is not strongly convex"),
            Error::EigenNotConverged => write!(f, "symmetric eigensolver did not converge"),
            Error::SingularSystem => write!(f, "singular linear system"),
            Error::Infeasible => write!(f, "problem is infeasible"),
            Error::NotConverged(what) => write!(f, "{what} did not converge"),
            Error::EnumerationBudget { n, max } => {
                write!(f, "active-set enumeration limited to n <= {max}, got n = {n}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_dim(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}
