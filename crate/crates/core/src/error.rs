use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The Bogoliubov condition has no real solution: |g/ω| must stay below 1/2.
    #[error("threshold violation{}: |g/omega| = |{g}/{omega}| must be < 1/2", sample_suffix(*.index))]
    ThresholdViolation {
        omega: f64,
        g: f64,
        index: Option<usize>,
    },
    #[error("degenerate frequency: omega = 0 with g = {g} != 0")]
    DegenerateFrequency { g: f64 },
    #[error("epsilon = {0} outside the admissible range 0 < epsilon < 2")]
    EpsilonOutOfRange(f64),
    #[error("time step must be positive, got {0}")]
    NonpositiveStep(f64),
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("length mismatch: expected {expected}, got {got} ({what})")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid Fock truncation d = {0} (need d >= 2)")]
    InvalidTruncation(usize),
    #[error("Fock truncation d = {d} too small: {reason}")]
    TruncationTooSmall { d: usize, reason: String },
    #[error("generator is not Hermitian (max |H - H^+| = {0:e})")]
    NonHermitianInput(f64),
    #[error("step is not number-conserving (max off-diagonal = {0:e})")]
    NotNumberConserving(f64),
    #[error("regularization pole: |1 + i c Omega| = {0:e}")]
    PoleInScheme(f64),
    #[error("regularization c = {re}{im:+}i is not unitary (Re c must be 1/2)")]
    NonUnitaryScheme { re: f64, im: f64 },
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("phase under-resolved: node spacing {spacing:e} at t = {t:e} (spacing * |t| must be <= 0.1)")]
    PhaseUnderResolved { spacing: f64, t: f64 },
    #[error("smearing kernel under-resolved: {0}")]
    KernelUnderResolved(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

fn sample_suffix(index: Option<usize>) -> String {
    match index {
        Some(i) => format!(" at sample {i}"),
        None => String::new(),
    }
}
