use thiserror::Error;

/// Failures raised by the forward models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{name} = {value} is out of domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("interband logarithm argument lies on the branch cut at {frequency} Hz")]
    BranchCut { frequency: f64 },
    #[error("evanescent wave in layer with eps_r = {eps_r} at incidence angle {angle} rad")]
    Evanescent { eps_r: f64, angle: f64 },
    #[error("invalid layer stack: {0}")]
    InvalidStack(&'static str),
    #[error("at {frequency} Hz: {source}")]
    AtFrequency {
        frequency: f64,
        #[source]
        source: Box<ModelError>,
    },
}

impl ModelError {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        ModelError::Domain {
            name,
            value,
            reason,
        }
    }

    pub(crate) fn at_frequency(self, frequency: f64) -> Self {
        match self {
            e @ ModelError::AtFrequency { .. } => e,
            e => ModelError::AtFrequency {
                frequency,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
