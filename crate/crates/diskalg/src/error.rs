use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by construction and precondition checks across the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("not an odd homogeneous polynomial")]
    NotOddHomogeneous,

    #[error("polynomial is not complex-symmetric (deviation {deviation:e})")]
    NotComplexSymmetric { deviation: f64 },

    #[error("homogeneous symbol needs degree >= 2, got {0}")]
    SymbolDegreeTooSmall(u32),

    #[error("coefficient conditions need an even-degree symbol, got degree {0}")]
    OddSymbolDegree(u32),

    #[error("pivot coefficient vanishes at l = {0}")]
    PivotVanishes(i64),

    #[error("no admissible pivot: no nonzero coefficient with index <= {half_degree}")]
    NoAdmissiblePivot { half_degree: i64 },

    #[error("derived symbol needs certificate degree >= 3, got {0}")]
    CertificateDegreeTooSmall(u32),

    #[error("declared parity does not match the stored terms")]
    ParityMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("traces are sampled on different angle grids")]
    MismatchedTraces,

    #[error("first margin not nonnegative: f0({theta}) = {value:e}")]
    FirstMarginNegative { theta: f64, value: f64 },

    #[error("second certificate not positive on the zero set: f1({theta}) = {value:e}")]
    SecondMarginNotPositive { theta: f64, value: f64 },

    #[error("combined margin floor {floor:e} is below -1e-12")]
    CombinedFloorNegative { floor: f64 },

    #[error("shear polynomial must be odd with lowest total degree >= 3")]
    ShearNotAdmissible,

    #[error("point ({z1}, {z2}) outside the certified inversion region (radius {radius:e})")]
    OutsideInversionRegion {
        z1: Complex64,
        z2: Complex64,
        radius: f64,
    },

    #[error("inversion did not converge within {max_iter} iterations (residual {residual:e})")]
    InversionDiverged { max_iter: usize, residual: f64 },

    #[error("four-disk parametrization needs an explicit first-form generator, not a direct one")]
    DirectGeneratorHasNoSheets,

    #[error("second generator vanishes at nonzero sample z = {0}")]
    VanishingSecondGenerator(Complex64),

    #[error("perturbation rewrite needs a vanishing constant term")]
    ConstantTermNotZero,

    #[error("basis numerically rank-deficient; increase ridge or reduce degree")]
    RankDeficient,

    #[error("training sample count {samples} below column count {columns}")]
    InsufficientSamples { samples: usize, columns: usize },
}
