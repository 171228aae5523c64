use alloc::string::String;
use core::fmt;

/// Errors raised by the core model.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar parameter is outside its allowed domain.
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// A BER curve table violates its shape constraints.
    InvalidCurve(&'static str),
    /// The BER target lies below the lowest BER the scheme can reach.
    Unreachable { target: f64, floor: f64 },
    /// The BER target lies above the highest calibrated BER of a curve table.
    OutsideCalibration { target: f64, ceiling: f64 },
    /// A service class is not known to the policy or cell state.
    UnknownClass(String),
    /// A release was requested for a class with no admitted users.
    NothingToRelease(String),
    /// Traffic mix fractions do not sum to one.
    MixMismatch { sum: f64 },
    /// The same class name appears twice.
    DuplicateClass(String),
    /// Policy partitions are inconsistent with the total threshold.
    InvalidPartitions { sum: f64, total: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter {
                name,
                value,
                expected,
            } => write!(f, "invalid {name} = {value}: expected {expected}"),
            Error::InvalidCurve(why) => write!(f, "invalid BER curve table: {why}"),
            Error::Unreachable { target, floor } => {
                write!(f, "BER target {target} is below the scheme's floor {floor}")
            }
            Error::OutsideCalibration { target, ceiling } => write!(
                f,
                "BER target {target} is above the calibrated range (max {ceiling})"
            ),
            Error::UnknownClass(name) => write!(f, "unknown service class `{name}`"),
            Error::NothingToRelease(name) => {
                write!(f, "class `{name}` has no admitted users to release")
            }
            Error::MixMismatch { sum } => {
                write!(f, "traffic mix fractions sum to {sum}, expected 1")
            }
            Error::DuplicateClass(name) => write!(f, "service class `{name}` is defined twice"),
            Error::InvalidPartitions { sum, total } => write!(
                f,
                "partitions sum to {sum}, which exceeds the total threshold {total}"
            ),
        }
    }
}

impl core::error::Error for Error {}
