use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("cutoff {cutoff} too small: discarded probability {tail:e} exceeds {tol:e}")]
    CutoffTooSmall { cutoff: usize, tail: f64, tol: f64 },

    #[error("creation operator pushes support past cutoff {cutoff}")]
    CutoffOverflow { cutoff: usize },

    #[error("cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: usize, right: usize },

    #[error("state is not normalized (norm² = {norm_sqr})")]
    Unnormalized { norm_sqr: f64 },

    #[error("state is the zero vector")]
    ZeroState,

    #[error("state is not supported on a single photon-number band (off-band mass {off_band:e})")]
    NotSingleBand { off_band: f64 },

    #[error("empty coefficient sequence")]
    EmptyCoefficients,

    #[error("field vanishes on the contour at ({x}, {y}); perturb the contour")]
    ZeroOnContour { x: f64, y: f64 },

    #[error("contour does not enclose every zero: needs radius ≥ {required}, smallest is {actual}")]
    ContourTooSmall { required: f64, actual: f64 },

    #[error("winding sum {value} is not within 1e-6 of an integer")]
    NonIntegerWinding { value: f64 },

    #[error("singularity set did not stabilise after {doublings} grid doublings")]
    RefinementDiverged { doublings: usize },

    #[error("quadrature did not converge in {stage}: order-doubling disagreement {disagreement:e}")]
    QuadratureNotConverged { stage: &'static str, disagreement: f64 },

    #[error("imaginary residue {residue:e} in a real-valued quantity")]
    ImaginaryResidue { residue: f64 },

    #[error("at r = {r}: {source}")]
    ScanPoint { r: f64, source: Box<Error> },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument { name, reason: reason.into() }
    }

    /// True for failures of a numerical method (truncation, quadrature,
    /// refinement) as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::CutoffTooSmall { .. }
            | Error::QuadratureNotConverged { .. }
            | Error::RefinementDiverged { .. }
            | Error::ImaginaryResidue { .. }
            | Error::NonIntegerWinding { .. } => true,
            Error::ScanPoint { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
