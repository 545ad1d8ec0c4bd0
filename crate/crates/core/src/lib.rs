#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Numerics for high-dimensional angular two-photon interference.
//!
//! Twin photons from a down-conversion source pass through masks of `N`
//! angular slits. The joint path ("pathway") degree of freedom forms a qudit
//! whose coherence shows up as fringes in the coincidence rate over the
//! orbital-angular-momentum (OAM) modes `(l_s, l_i)` of the two photons.
//!
//! The crate is split along that pipeline:
//!
//! - [`physics`]: source spectra, angular masks, slit Fourier amplitudes and
//!   the SLM capacity estimate.
//! - [`state`]: pathway-basis density matrices and their expansion into the
//!   truncated OAM product basis.
//! - [`interference`]: coincidence rates, fringe scans and visibility.
//! - [`entanglement`]: partial transpose, trace norm, logarithmic negativity
//!   and two-qubit concurrence.
//! - [`witness`]: local measurement operators and the semidefinite program
//!   that turns incomplete measurement data into a certified lower bound on
//!   the logarithmic negativity.
//!
//! Everything here is `no_std` with `alloc`; file formats and the command
//! line front end live in the `angular-qudit` crate.

extern crate alloc;

mod error;
mod float;

pub mod entanglement;
pub mod interference;
pub mod linalg;
pub mod physics;
pub mod state;
pub mod witness;

pub use crate::error::{Error, Result};
pub use crate::linalg::{CMatrix, Complex64};

pub use crate::entanglement::{
    concurrence_two_qubit, hermitian_eigenvalues, logarithmic_negativity, partial_transpose, trace_norm,
    Spectrum,
};
pub use crate::interference::{
    coincidence_rate, coincidence_rate_asymmetric, diffraction_envelope, fringe_scan,
    visibility_from_fringes, FringeGrid, RateNormalization, VisibilityEstimate,
};
pub use crate::physics::{
    slit_fourier, slit_fourier_numeric, slit_transmission, slm_capacity, AngularMask, MaskCheck, SlmCapacity,
    SlmSpec, SpiralSpectrum,
};
pub use crate::state::{
    asymmetric_mixed_state, normalization_constant, pathway_to_oam, pure_qudit_state, validate_density,
    Basis, DensityMatrix, OamExpansion, PathwayStateParams, PhaseConvention, ValidationReport,
};
pub use crate::witness::{
    adaptive_measurement_set, embed_pathway_state, expectation_values, negativity_lower_bound,
    oam_projectors, superposition_projectors, tomographically_complete_set, verify_certificate,
    CertificateCheck, MeasurementOperator, SolverConfig, SolverStatus, SuperpositionSpec, WitnessCertificate,
};
