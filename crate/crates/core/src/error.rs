use thiserror::Error;

/// Errors produced by symbol construction and the numerical pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty coefficient list")]
    EmptySymbol,
    #[error("duplicate power {0} in coefficient list")]
    DuplicatePower(i32),
    #[error("symbol is one-sided after trimming (powers span [{lo}, {hi}]); a two-sided band with r,s >= 1 is required")]
    OneSided { lo: i32, hi: i32 },
    #[error("evaluation at z = 0 (the symbol has a pole there)")]
    EvalAtZero,
    #[error("constant symbol has no critical points")]
    ConstantSymbol,
    #[error("truncation bounds [-{r}, {s}] exclude every nonconstant retained term")]
    TruncationTooSmall { r: i32, s: i32 },
    #[error("zero polynomial passed to root finder")]
    ZeroPolynomial,
    #[error("nonfinite polynomial coefficient")]
    NonFiniteCoefficient,
    #[error("QR iteration failed to converge for matrix of order {0}")]
    QrNoConvergence(usize),
    #[error("curve is not closed: |rho(pi) - rho(-pi)| = {0:.3e}")]
    CurveNotClosed(f64),
    #[error("quadrature failed to reach tolerance {tol:.3e} (last error estimate {err:.3e})")]
    QuadratureNoConvergence { tol: f64, err: f64 },
    #[error("lambda lies on (or too close to) the limiting set: defect {0:.3e}")]
    OnLimitingSet(f64),
    #[error("insufficient moments: need {need}, have {have}")]
    InsufficientMoments { need: usize, have: usize },
    #[error("exact arithmetic requires a symbol with rational real coefficients")]
    NotRational,
    #[error("floating-point Hankel determinants are unreliable beyond n = 14 (requested n = {0}); use exact mode")]
    FloatHankelTooLarge(usize),
    #[error("moment matrix is not positive definite at n = {0}; the moment problem has no solution there")]
    NotPositiveDefinite(usize),
    #[error("Hessenberg determinant recurrence requires r = 1 (symbol has r = {0})")]
    NotHessenberg(u32),
    #[error("operation requires a certified class-R symbol (call is_class_r first)")]
    NotCertified,
    #[error("distribution shortcut requires a single monotone branch (curve has {0} interior critical angles)")]
    MultiBranch(usize),
    #[error("degenerate scan region or resolution ({0})")]
    BadScanParams(String),
    #[error("extrapolation did not converge near x = {0}")]
    ExtrapolationFailed(f64),
    #[error("newton continuation diverged at angle t = {0}")]
    ContinuationDiverged(f64),
    #[error("index {0} exceeds the number of computed Jacobi parameters {1}")]
    IndexOutOfRange(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
