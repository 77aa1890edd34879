use symkernel::SymError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("tensors live on different charts")]
    ChartMismatch,
    #[error("slot {slot} has the wrong variance for this operation")]
    Variance { slot: usize },
    #[error("slot index {slot} out of range for rank {rank}")]
    SlotRange { slot: usize, rank: usize },
    #[error("expected {expected} entries, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("metric is not invertible (determinant vanishes identically)")]
    SingularMetric,
    #[error("metric is not symmetric at ({0}, {1})")]
    AsymmetricMetric(usize, usize),
    #[error("connection is not torsion-free at Γ^{i}_{{{j}{k}}}", i = .0, j = .1, k = .2)]
    Torsion(usize, usize, usize),
    #[error("unsupported dimension {got}: {requirement}")]
    Dimension { got: usize, requirement: &'static str },
    #[error("chart has no fiber variables")]
    MissingFiber,
    #[error("right-hand side is not polynomial in the fiber variables")]
    NonPolynomial,
    #[error("right-hand side has degree {0} in the fiber variables; at most 3 is allowed")]
    FiberDegree(u32),
    #[error("ODE pair is not of projective type")]
    NonProjective,
    #[error("pole encountered at t = {t}")]
    Pole { t: f64 },
    #[error("integration diverged at t = {t}")]
    Diverged { t: f64 },
    #[error("invariant violated: {0}")]
    Invariant(String),
}
