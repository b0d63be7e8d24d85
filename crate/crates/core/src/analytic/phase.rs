//! Oscillatory integrals I = ∫ g(t) e^{i f(t)} dt: first/second derivative
//! tests and the stationary-phase leading term, each checked against direct
//! oscillation-aware quadrature.

use super::bessel::{bessel_j, bessel_yn};
use super::quad::{integrate, integrate_oscillatory};
use super::testfn::TestFunction;
use crate::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Clone)]
pub enum PhaseError {
    #[error("no stationary point inside the integration interval")]
    NoStationaryPoint,
    #[error("more than one stationary point inside the interval")]
    MultipleStationaryPoints,
    #[error("second derivative dips below the required floor {floor} (min {min})")]
    SecondDerivativeTooSmall { floor: f64, min: f64 },
    #[error("asymptotic regime requires x ≥ {0}")]
    AsymptoticRegimeRequired(f64),
}

/// Real phase with analytic derivatives: a polynomial Σ cᵢ tⁱ plus an
/// optional c·√t term (the shape the Voronoi dual integrals produce).
#[derive(Debug, Clone)]
pub struct Phase {
    pub poly: Vec<f64>,
    pub sqrt_coeff: f64,
}

impl Phase {
    pub fn poly(coeffs: Vec<f64>) -> Phase {
        Phase { poly: coeffs, sqrt_coeff: 0.0 }
    }

    pub fn linear(slope: f64) -> Phase {
        Phase::poly(vec![0.0, slope])
    }

    /// Y (t − t₀)².
    pub fn quadratic(scale: f64, center: f64) -> Phase {
        Phase::poly(vec![scale * center * center, -2.0 * scale * center, scale])
    }

    pub fn with_sqrt(mut self, c: f64) -> Phase {
        self.sqrt_coeff = c;
        self
    }

    pub fn value(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.poly.iter().rev() {
            acc = acc * t + c;
        }
        acc + self.sqrt_coeff * t.max(0.0).sqrt()
    }

    pub fn d1(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for i in (1..self.poly.len()).rev() {
            acc = acc * t + self.poly[i] * i as f64;
        }
        if self.sqrt_coeff != 0.0 {
            acc += 0.5 * self.sqrt_coeff / t.sqrt();
        }
        acc
    }

    pub fn d2(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for i in (2..self.poly.len()).rev() {
            acc = acc * t + self.poly[i] * (i * (i - 1)) as f64;
        }
        if self.sqrt_coeff != 0.0 {
            acc -= 0.25 * self.sqrt_coeff / t.powf(1.5);
        }
        acc
    }
}

/// One oscillatory integral ∫_a^b g(t) e^{i f(t)} dt with its scale data.
#[derive(Debug, Clone)]
pub struct OscIntegral {
    pub amplitude: TestFunction,
    pub phase: Phase,
    pub a: f64,
    pub b: f64,
    /// Floor Y/Q² for f″ when a stationary-phase evaluation is requested.
    pub second_derivative_floor: f64,
}

impl OscIntegral {
    /// Direct evaluation by oscillation-aware quadrature.
    pub fn direct(&self, tol: f64) -> Complex64 {
        let (sa, sb) = self.amplitude.support();
        let a = self.a.max(sa);
        let b = self.b.min(sb);
        if a >= b {
            return Complex64::new(0.0, 0.0);
        }
        // local cycle density from |f′| on a coarse scan
        let mut max_d1: f64 = 0.0;
        for i in 0..=64 {
            let t = a + (b - a) * i as f64 / 64.0;
            max_d1 = max_d1.max(self.phase.d1(t).abs());
        }
        let cycles = max_d1 / std::f64::consts::TAU;
        integrate_oscillatory(
            |t| {
                let g = self.amplitude.value(t);
                if g == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                g * Complex64::new(0.0, self.phase.value(t)).exp()
            },
            a,
            b,
            cycles,
            tol,
        )
    }

    fn stationary_point(&self) -> Result<f64, PhaseError> {
        // sign changes of f′ on a fine grid, then bisection
        let n = 512;
        let mut roots = Vec::new();
        let mut prev_t = self.a;
        let mut prev = self.phase.d1(prev_t);
        for i in 1..=n {
            let t = self.a + (self.b - self.a) * i as f64 / n as f64;
            let cur = self.phase.d1(t);
            if prev == 0.0 {
                roots.push(prev_t);
            } else if prev * cur < 0.0 {
                let (mut lo, mut hi) = (prev_t, t);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if self.phase.d1(lo) * self.phase.d1(mid) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            prev_t = t;
            prev = cur;
        }
        match roots.len() {
            0 => Err(PhaseError::NoStationaryPoint),
            1 => Ok(roots[0]),
            _ => Err(PhaseError::MultipleStationaryPoints),
        }
    }
}

/// Stationary-phase comparison: direct quadrature vs the n = 0 term
/// √(2π) e^{iπ/4} g(t₀) e^{i f(t₀)} / √(f″(t₀)).
#[derive(Debug, Clone)]
pub struct StationaryPhaseReport {
    pub t0: f64,
    pub direct: Complex64,
    pub leading: Complex64,
    pub abs_error: f64,
    pub rel_error: f64,
}

pub fn stationary_phase_compare(integral: &OscIntegral) -> Result<StationaryPhaseReport, PhaseError> {
    // amplitude ≡ 0 short-circuits to 0 = 0
    let (sa, sb) = integral.amplitude.support();
    if sa >= integral.b || sb <= integral.a {
        return Ok(StationaryPhaseReport {
            t0: f64::NAN,
            direct: Complex64::new(0.0, 0.0),
            leading: Complex64::new(0.0, 0.0),
            abs_error: 0.0,
            rel_error: 0.0,
        });
    }
    let t0 = integral.stationary_point()?;
    // verify the f″ floor on the interval before using the expansion
    let mut min_d2 = f64::INFINITY;
    for i in 0..=256 {
        let t = integral.a + (integral.b - integral.a) * i as f64 / 256.0;
        min_d2 = min_d2.min(integral.phase.d2(t).abs());
    }
    if min_d2 < integral.second_derivative_floor {
        return Err(PhaseError::SecondDerivativeTooSmall {
            floor: integral.second_derivative_floor,
            min: min_d2,
        });
    }
    let f2 = integral.phase.d2(t0);
    let g0 = integral.amplitude.value(t0);
    let phase0 = Complex64::new(0.0, integral.phase.value(t0)).exp();
    let rotate = Complex64::new(0.0, std::f64::consts::FRAC_PI_4 * f2.signum()).exp();
    let leading = (std::f64::consts::TAU).sqrt() * rotate * g0 * phase0 / f2.abs().sqrt();
    let direct = integral.direct(1e-11);
    let abs_error = (direct - leading).norm();
    Ok(StationaryPhaseReport {
        t0,
        direct,
        leading,
        abs_error,
        rel_error: abs_error / direct.norm().max(f64::MIN_POSITIVE),
    })
}

/// First-derivative (nonstationary) decay report over a doubling ladder in
/// the slope B: measures |I| against Var(g)/B and fits the decay exponent.
#[derive(Debug, Clone)]
pub struct DecayReport {
    pub ladder: Vec<(f64, f64)>,
    pub first_derivative_ratios: Vec<f64>,
    pub fitted_slope: f64,
}

pub fn nonstationary_decay_check(
    amplitude: &TestFunction,
    b_values: &[f64],
) -> DecayReport {
    let (sa, sb) = amplitude.support();
    let var_g = integrate(|t| amplitude.derivative(t, 1).abs(), sa, sb, 1e-10);
    let mut ladder = Vec::new();
    let mut ratios = Vec::new();
    for &b in b_values {
        let integral = OscIntegral {
            amplitude: amplitude.clone(),
            phase: Phase::linear(b),
            a: sa,
            b: sb,
            second_derivative_floor: 0.0,
        };
        let v = integral.direct(1e-13).norm();
        ladder.push((b, v));
        ratios.push(v / (var_g / b));
    }
    // least-squares slope of log|I| vs log B
    let n = ladder.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(b, v) in &ladder {
        let x = b.ln();
        let y = v.max(1e-300).ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let fitted_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    DecayReport { ladder, first_derivative_ratios: ratios, fitted_slope }
}

/// Z⁺ extracted from the Hankel decomposition: J_ν(2πx) = e(x)Z⁺ + e(−x)Z⁻,
/// Z⁺(x) = ½ (J_ν + iY_ν)(2πx) e(−x), Z⁻ = conj(Z⁺).
pub fn bessel_z_plus(order: u32, x: f64) -> Result<Complex64, PhaseError> {
    if x < 2.0 {
        return Err(PhaseError::AsymptoticRegimeRequired(2.0));
    }
    let z = std::f64::consts::TAU * x;
    let h = Complex64::new(bessel_j(order, z), bessel_yn(order, z));
    Ok(0.5 * h * crate::e(-x))
}

/// d^j/dx^j Z⁺(x) for j ≤ 2, from the Bessel recurrences.
pub fn bessel_z_plus_derivative(order: u32, x: f64, j: u32) -> Result<Complex64, PhaseError> {
    if x < 2.0 {
        return Err(PhaseError::AsymptoticRegimeRequired(2.0));
    }
    let tau = std::f64::consts::TAU;
    let z = tau * x;
    let h = |nu: i32, z: f64| -> Complex64 {
        let nu_abs = nu.unsigned_abs();
        let v = Complex64::new(bessel_j(nu_abs, z), bessel_yn(nu_abs, z));
        if nu < 0 && nu_abs % 2 == 1 {
            -v
        } else {
            v
        }
    };
    let nu = order as i32;
    // H′ = (H_{ν−1} − H_{ν+1})/2, scaled by the inner 2π per x-derivative
    let h0 = h(nu, z);
    let h1 = (h(nu - 1, z) - h(nu + 1, z)) * 0.5;
    let value = match j {
        0 => h0,
        1 => tau * h1 - Complex64::new(0.0, tau) * h0,
        2 => {
            let h2 = (h(nu - 2, z) - 2.0 * h(nu, z) + h(nu + 2, z)) * 0.25;
            tau * tau * (h2 - Complex64::new(0.0, 2.0) * h1 - h0)
        }
        _ => return Err(PhaseError::AsymptoticRegimeRequired(2.0)),
    };
    Ok(0.5 * value * crate::e(-x))
}
