use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("letter {letter} outside alphabet 1..={d}")]
    LetterOutOfRange { letter: u8, d: usize },

    #[error("the linear pencil is numerically singular (rcond = {rcond:e})")]
    SingularPencil { rcond: f64 },

    #[error("realizations have different state sizes ({0} vs {1})")]
    SizeMismatch(usize, usize),

    #[error("input realization is not minimal")]
    NotMinimalInput,

    #[error("realizations are not jointly similar (residual {residual:e})")]
    NotEquivalent { residual: f64 },

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("variable z{index} out of range for d = {d} (position {pos})")]
    VarOutOfRange { index: usize, d: usize, pos: usize },

    #[error("inverse of an expression with zero constant term")]
    NotRegularAtZero,

    #[error("dominant eigenvector of the CP map is not Hermitian (residual {residual:e})")]
    NonHermitianEigenvector { residual: f64 },

    #[error("lambda coincides with the value at zero")]
    LambdaEqualsValueAtZero,

    #[error("evaluation point is outside the domain")]
    ZNotInDomain,

    #[error("restriction is not column-isometric (residual {residual:e})")]
    NotColumnIsometric { residual: f64 },

    #[error("subspace is not invariant (residual {residual:e})")]
    NotInvariant { residual: f64 },

    #[error("joint spectral radius {jsr} is not 1")]
    JsrNotOne { jsr: f64 },

    #[error("Perron eigenvalue is not simple (gap {gap:e})")]
    PerronDegenerate { gap: f64 },

    #[error("fixed point is not positive definite (min eigenvalue {min_eig:e})")]
    PNotDefinite { min_eig: f64 },

    #[error("tuple is not a row coisometry (residual {residual:e})")]
    NotCoisometry { residual: f64 },

    #[error("vector is not a unit vector (norm {norm})")]
    NotUnitVector { norm: f64 },

    #[error("cyclicity failure: {0}")]
    CyclicityFailure(String),

    #[error("tail bound unavailable: jsr(A) = {jsr} >= 1")]
    TailBoundUnavailable { jsr: f64 },

    #[error("function is not inner (defect {defect:e})")]
    NotInner { defect: f64 },

    #[error("normalization failure: {0}")]
    NormalizationFailure(String),

    #[error("Gram matrix is not PSD (min eigenvalue {min_eig:e})")]
    GramNotPsd { min_eig: f64 },

    #[error("tuple is not irreducible")]
    NotIrreducible,

    #[error("eigenvalue 1 missing (closest distance {distance:e})")]
    EigenvalueOneMissing { distance: f64 },

    #[error("eigenvalue 1 is degenerate (gap {gap:e})")]
    EigenvalueOneDegenerate { gap: f64 },

    #[error("matrix size {n} exceeds the cap {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
