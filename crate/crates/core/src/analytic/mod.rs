//! Floating-point analytic infrastructure: smooth test functions with jet
//! derivatives, adaptive oscillatory quadrature, Bessel kernels, the
//! delta-symbol expansion, and stationary-phase checks.

pub mod bessel;
pub mod delta;
pub mod jet;
pub mod phase;
pub mod quad;
pub mod testfn;

pub use bessel::{bessel_i0, bessel_j, bessel_k0, bessel_y0, bessel_y1, bessel_yn};
pub use delta::{delta_indicator_error, g_properties_check, DeltaExpansion, GPropertiesReport};
pub use jet::Jet;
pub use phase::{
    bessel_z_plus, bessel_z_plus_derivative, nonstationary_decay_check,
    stationary_phase_compare, DecayReport, OscIntegral, Phase, PhaseError, StationaryPhaseReport,
};
pub use quad::{integrate, integrate_complex, integrate_oscillatory, qk15};
pub use testfn::TestFunction;
