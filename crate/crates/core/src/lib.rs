//! Verification kernels for the arithmetic of prime-power character sums.
//!
//! The crate is organised around the objects that show up when a GL(3)×GL(2)
//! Rankin–Selberg sum is opened with the delta method and dualised with
//! Voronoi summation:
//!
//! * [`residue`] — exact arithmetic in Z/m with prime-power structure
//!   (inverses, primitive roots, discrete logs, Hensel lifting);
//! * [`characters`] — Dirichlet characters of conductor p^r, Gauss sums and
//!   the additive (Postnikov-type) constants attached to them;
//! * [`expsums`] — Kloosterman and Ramanujan sums with batched inverse
//!   kernels;
//! * [`charsum`] — the triple character sum 𝒞(a,b,β), its closed reduction,
//!   the post-Poisson average, and tuple-counting verifiers;
//! * [`analytic`] — smooth test functions, oscillatory quadrature, Bessel
//!   functions, the delta-symbol expansion and stationary-phase checks;
//! * [`voronoi`] — coefficient generators (Ramanujan τ, d, d₃) and two-sided
//!   Voronoi summation checks on GL(2) and the d₃ specialisation of GL(3);
//! * [`harness`] — grid runners, report emission and the benchmark kernels
//!   behind the `charsum` CLI.
//!
//! Every identity-style operation comes in two independently computed forms
//! (brute force vs closed form, or quadrature vs asymptotics) so each lemma
//! can be certified numerically on small parameters.

pub mod analytic;
pub mod characters;
pub mod charsum;
pub mod expsums;
pub mod harness;
pub mod residue;
pub mod voronoi;

pub use num_complex::Complex64;

/// Root-of-unity values carried as double-precision complex numbers.
pub type UnitComplex = Complex64;

/// e(x) = exp(2πix).
pub fn e(x: f64) -> Complex64 {
    let (s, c) = (std::f64::consts::TAU * x).sin_cos();
    Complex64::new(c, s)
}

/// e(a/q) with the argument reduced mod q first, so the phase handed to
/// `sin_cos` stays in [0, 2π) regardless of how large `a` is.
pub fn e_frac(a: i128, q: u64) -> Complex64 {
    let q = q as i128;
    let r = a.rem_euclid(q);
    e(r as f64 / q as f64)
}
