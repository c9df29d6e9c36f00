//! Error type shared by all modules.

/// Errors surfaced by schedule construction, solvers, and geometry queries.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad parameters at construction time (family domain, malformed document, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A query reached past the precomputed horizon. Never extrapolated silently.
    #[error("horizon exceeded: requested level {requested}, horizon {horizon}")]
    Horizon { requested: usize, horizon: usize },

    /// A level violates the admissibility requirement `sum_j c_{k,j}^d <= 1`.
    #[error("inadmissible schedule at level {level}: sum c^d = {sum}")]
    Inadmissible { level: usize, sum: f64 },

    /// A declared analytic hint contradicts the computed horizon value.
    #[error("analytic hint mismatch for {name}: declared {declared}, observed {observed}")]
    HintMismatch {
        name: &'static str,
        declared: f64,
        observed: f64,
    },

    /// An enumeration (tree expansion, cut set) outgrew its cardinality cap.
    #[error("cap exceeded during {what} (cap {cap}, threshold {bottleneck})")]
    CapExceeded {
        what: &'static str,
        cap: usize,
        bottleneck: f64,
    },

    /// A query precondition does not hold (degenerate scales, zero depth, ...).
    #[error("precondition rejected: {0}")]
    Precondition(String),

    /// Contradictory internal state; always a bug or a broken invariant.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
