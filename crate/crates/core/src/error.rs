use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Variants group into the three failure classes the command line maps to
/// exit codes: schema problems, invariant or precondition violations, and
/// numerical conditioning failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("schema violation in field `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error("grid invariant violated: {0}")]
    Grid(String),

    #[error("invariant `{invariant}` violated: {detail}")]
    Invariant { invariant: &'static str, detail: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("evaluation point {z} lies within {distance:e} of a pole")]
    PoleProximity { z: String, distance: f64 },

    #[error("phase jump of {jump:.3} rad between k = {k0} and k = {k1}")]
    PhaseJump { k0: f64, k1: f64, jump: f64 },

    #[error("winding index {0} is outside the admissible set {{0, 1}}")]
    Index(i64),

    #[error("grids do not match: {0}")]
    GridMismatch(String),

    #[error("integrator failure: {0}")]
    Integrator(String),

    #[error("identity check `{identity}` failed: relative mismatch {mismatch:e}")]
    IdentityMismatch { identity: &'static str, mismatch: f64 },

    #[error("fit residual {residual:e} exceeds threshold {threshold:e}: {context}")]
    Fit {
        residual: f64,
        threshold: f64,
        context: String,
    },

    #[error("ill-conditioned system (condition estimate {estimate:e}): {context}")]
    Conditioning { estimate: f64, context: String },

    #[error("decay check failed: sup |J| over the last decade is {value:e} (limit {limit:e})")]
    Decay { value: f64, limit: f64 },
}

impl Error {
    pub fn invariant(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::Invariant {
            invariant,
            detail: detail.into(),
        }
    }

    pub fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 2 schema, 3 invariant/precondition, 4 numerical conditioning.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Schema { .. } => 2,
            Error::Conditioning { .. }
            | Error::Integrator(_)
            | Error::Fit { .. }
            | Error::Decay { .. }
            | Error::IdentityMismatch { .. } => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_failure_class() {
        assert_eq!(Error::schema("grid", "missing").exit_code(), 2);
        assert_eq!(Error::invariant("Im I(k) > 0", "I(1) = -1").exit_code(), 3);
        assert_eq!(Error::Grid("empty".into()).exit_code(), 3);
        assert_eq!(Error::Index(2).exit_code(), 3);
        let ill = Error::Conditioning {
            estimate: 1e12,
            context: "Marchenko".into(),
        };
        assert_eq!(ill.exit_code(), 4);
        assert_eq!(Error::Decay { value: 1.0, limit: 0.1 }.exit_code(), 4);
        assert!(ill.to_string().contains("1e12"));
    }
}
