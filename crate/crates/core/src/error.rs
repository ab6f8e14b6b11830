use thiserror::Error;

/// Errors raised by the library.
///
/// Variants fall into three groups: input errors (bad vertices, malformed
/// files, bad parameters), verdicts (the input does not have a property an
/// operation requires), and bug signals. A bug signal means an assertion
/// that holds for every valid input failed, so either the implementation or
/// a caller-asserted precondition is wrong. [`Error::is_bug_signal`] tells
/// them apart.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    OutOfRange { vertex: usize, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("graph6 parse error at byte {offset}: {reason}")]
    Parse { offset: usize, reason: String },

    #[error("malformed JSON graph: {0}")]
    Json(String),

    #[error("no path between {x} and {y}")]
    Unreachable { x: usize, y: usize },

    #[error("{{{0}, {1}, {2}}} is not a triangle")]
    NotATriangle(usize, usize, usize),

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("no sample passed the checks after {attempts} attempts")]
    SamplingExhausted { attempts: u32 },

    #[error("n = {n} exceeds the supported maximum of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("input is not diameter-critical: {0}")]
    NotDiameterCritical(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("counting violation: {0}")]
    CountingViolation(String),

    #[error("charging violation: {0}")]
    ChargingViolation(String),

    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    #[error("lemma violation: {0}")]
    LemmaViolation(String),

    #[error("bound violation: {0}")]
    BoundViolation(String),

    #[error("internal invariant broken at iteration {iteration}: {detail}")]
    InternalInvariant { iteration: usize, detail: String },
}

impl Error {
    /// True for the variants that can only fire when the code (or an asserted
    /// precondition) is wrong.
    pub fn is_bug_signal(&self) -> bool {
        matches!(
            self,
            Error::CountingViolation(_)
                | Error::ChargingViolation(_)
                | Error::TheoremViolation(_)
                | Error::LemmaViolation(_)
                | Error::BoundViolation(_)
                | Error::InternalInvariant { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
