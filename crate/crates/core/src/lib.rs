//! Photon-subtracted two-mode squeezed vacuum: Fock-space engine, closed-form
//! wavefunctions, Wigner functions, vortex charges and entanglement
//! measures.
//!
//! ```
//! use tmsv_core::{SqueezeParams, subtracted_wavefunction, locate_singularities, GridSpec};
//!
//! let params = SqueezeParams::new(0.8, std::f64::consts::FRAC_PI_2)?;
//! let psi = subtracted_wavefunction(params, 3);
//! let found = locate_singularities(&psi, GridSpec::square(3.0, 201)?)?;
//! assert_eq!(found.total_charge.abs(), 3);
//! # Ok::<(), tmsv_core::Error>(())
//! ```

// `!(x < tol)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    pub struct Readme;
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/conventions.md")]
    pub struct Conventions;
    #[doc = include_str!("../../../book/src/wavefunctions.md")]
    pub struct Wavefunctions;
    #[doc = include_str!("../../../book/src/wigner.md")]
    pub struct Wigner;
    #[doc = include_str!("../../../book/src/vortices.md")]
    pub struct Vortices;
    #[doc = include_str!("../../../book/src/entanglement.md")]
    pub struct Entanglement;
    #[doc = include_str!("../../../book/src/heralding.md")]
    pub struct Heralding;
}

pub mod entanglement;
pub mod error;
pub mod fock;
pub mod grid;
pub mod quadrature;
pub mod specfun;
pub mod states;
pub mod vortexmap;
pub mod wigner;

pub use entanglement::{
    coefficients, ef_paper, entanglement_entropy, log_negativity, negativity_ratio, scan, CoefficientKind,
    CoefficientSource, EntanglementCurve, MeasureKind, NegativityFormula,
};
pub use error::{Error, Result};
pub use fock::{
    apply_ladder, fidelity, herald_subtract, schmidt_coefficients, tmsv, FockState2, HeraldConfig, Ladder, Mode,
    SchmidtState, SqueezeParams,
};
pub use grid::{Field2, GridSpec};
pub use specfun::{laguerre, oscillator_eigenfunction, LaguerreOrder};
pub use states::{intensity_phase_grid, subtracted_wavefunction, tmsv_wavefunction, PolyGauss, QuadraturePoint};
pub use vortexmap::{locate_singularities, total_charge, winding_number, ChargeResult, Contour, LatticeLoop, Singularity};
pub use wigner::{
    negativity_volume, slice_field, squeeze_map, wigner_numeric_oracle, wigner_tmsv, MomentumPair,
    NegativityDomain, NegativityReport, PhaseSpacePoint4, SlicePlane, SqueezeMap, WignerSliceSpec,
};
