use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Failures raised by the database, the evidence layer and the oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A mass, clamp value or support bound outside `[0, 1]` (or not finite).
    OutOfRange { what: &'static str, value: f64 },
    /// `lower > upper` in a support pair.
    InvertedPair { lower: f64, upper: f64 },
    /// The empty environment was declared inconsistent.
    EmptyNogood,
    EmptyAntecedents,
    /// A justification whose consequent also appears among its antecedents.
    SelfJustification(String),
    FalseAntecedent,
    UnknownNode(u32),
    UnknownAssumption(u32),
    UnknownDisjunction(u32),
    /// The node already carries an assumption.
    DuplicateAssumption(String),
    /// Structural problems with a one-of declaration.
    OneOf(String),
    /// Dempster normalisation constant vanished.
    TotalConflict,
    InconsistentKernel,
    FrameTooLarge { worlds: usize, cap: usize },
    /// Oracle inputs that do not describe a valid frame or mass function.
    InvalidFrame(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OutOfRange { what, value } => {
                write!(f, "{what} {value} is outside [0, 1]")
            }
            Error::InvertedPair { lower, upper } => {
                write!(f, "support pair [{lower}, {upper}] has lower > upper")
            }
            Error::EmptyNogood => f.write_str("the empty environment cannot be a nogood"),
            Error::EmptyAntecedents => f.write_str("justification has no antecedents"),
            Error::SelfJustification(d) => {
                write!(f, "justification concludes its own antecedent {d}")
            }
            Error::FalseAntecedent => f.write_str("the contradiction node cannot be an antecedent"),
            Error::UnknownNode(id) => write!(f, "unknown node #{id}"),
            Error::UnknownAssumption(id) => write!(f, "unknown assumption #{id}"),
            Error::UnknownDisjunction(id) => write!(f, "unknown disjunction #{id}"),
            Error::DuplicateAssumption(d) => write!(f, "{d} already carries an assumption"),
            Error::OneOf(msg) => write!(f, "one-of: {msg}"),
            Error::TotalConflict => f.write_str("total conflict: evidence is fully contradictory"),
            Error::InconsistentKernel => f.write_str("kernel environment is inconsistent"),
            Error::FrameTooLarge { worlds, cap } => {
                write!(f, "frame has {worlds} worlds, cap is {cap}")
            }
            Error::InvalidFrame(msg) => write!(f, "invalid frame: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_unit(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::OutOfRange { what, value })
    }
}
