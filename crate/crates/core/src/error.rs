use thiserror::Error;

/// Numerical and parameter errors raised by the model, barriers and controllers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RtaError {
    #[error("speed {speed} m/s is at or below the floor {floor} m/s")]
    SingularSpeed { speed: f64, floor: f64 },

    #[error("pitch {theta} rad is within {margin} rad of ±π/2")]
    SingularPitch { theta: f64, margin: f64 },

    #[error("aircraft coincides with obstacle centre (distance {distance} m)")]
    CoincidentPosition { distance: f64 },

    #[error("desired velocity norm {norm} m/s is too small to define velocity weights")]
    ZeroDesiredVelocity { norm: f64 },

    #[error("Lyapunov rate {lambda} must exceed extension gain {gamma_p}")]
    InvalidGainOrdering { lambda: f64, gamma_p: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

pub type Result<T, E = RtaError> = std::result::Result<T, E>;

pub(crate) fn require(cond: bool, name: &'static str, reason: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(RtaError::InvalidParameter { name, reason: reason.into() })
    }
}
