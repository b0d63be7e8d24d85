//! Complex gamma via the Lanczos approximation, and the γ±(s) factors of
//! the degree-3 Mellin transform specialised to trivial Langlands
//! parameters (the d₃ case).

use crate::Complex64;

/// Lanczos g = 7, n = 9 coefficients (GSL's table).
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// log sin(πz) without overflow at large |Im z|:
/// sin(πz) = (e^{iπz} − e^{−iπz})/(2i) = ∓e^{∓iπz}(1 − e^{±2iπz})/(2i·∓1)…
/// organised so the exponential that is taken out is the decaying one.
fn log_sin_pi(z: Complex64) -> Complex64 {
    let pi = std::f64::consts::PI;
    let i = Complex64::new(0.0, 1.0);
    if z.im >= 0.0 {
        // sin(πz) = e^{iπz}(1 − e^{−2iπz}) · (−1/(2i)) · (−1) … derive:
        // sin = (e^{iπz} − e^{−iπz})/(2i); |e^{iπz}| = e^{−π Im z} ≤ 1,
        // factor the growing one: −e^{−iπz}(1 − e^{2iπz})/(2i)
        let small = (2.0 * pi * i * z).exp();
        (-i * pi * z) + (Complex64::new(1.0, 0.0) - small).ln() - (2.0 * i).ln() + pi * i
    } else {
        let small = (-2.0 * pi * i * z).exp();
        (i * pi * z) + (Complex64::new(1.0, 0.0) - small).ln() - (2.0 * i).ln()
    }
}

/// log Γ(z) for complex z, principal branch up to 2πi multiples.
pub fn lgamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // reflection: Γ(z)Γ(1−z) = π/sin(πz)
        let pi = std::f64::consts::PI;
        return Complex64::new(pi.ln(), 0.0) - log_sin_pi(z) - lgamma(Complex64::new(1.0, 0.0) - z);
    }
    let zm1 = z - 1.0;
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (zm1 + i as f64);
    }
    let t = zm1 + 7.5;
    (zm1 + 0.5) * t.ln() - t + (2.0 * std::f64::consts::PI).sqrt().ln() + acc.ln()
}

pub fn gamma(z: Complex64) -> Complex64 {
    lgamma(z).exp()
}

/// γ_ℓ(s) = (π^(−3s−3/2)/2) · [Γ((1+s+ℓ)/2) / Γ((−s+ℓ)/2)]³ for ℓ ∈ {0,1}.
pub fn gamma_ell_d3(ell: u32, s: Complex64) -> Complex64 {
    let pi = std::f64::consts::PI;
    let ell = ell as f64;
    let log_ratio = lgamma((s + (1.0 + ell)) / 2.0) - lgamma((-s + ell) / 2.0);
    let log_pref = -(3.0 * s + 1.5) * pi.ln() - std::f64::consts::LN_2;
    (log_pref + 3.0 * log_ratio).exp()
}

/// γ_±(s) = γ₀(s) ∓ γ₁(s).
pub fn gamma_pm_d3(plus: bool, s: Complex64) -> Complex64 {
    let g0 = gamma_ell_d3(0, s);
    let g1 = gamma_ell_d3(1, s);
    if plus {
        g0 - g1
    } else {
        g0 + g1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gamma_reference_points() {
        assert!((gamma(c(1.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-13);
        assert!((gamma(c(5.0, 0.0)) - c(24.0, 0.0)).norm() < 1e-11);
        assert!((gamma(c(0.5, 0.0)) - c(std::f64::consts::PI.sqrt(), 0.0)).norm() < 1e-13);
        // |Γ(i)|² = π/sinh(π)
        let gi = gamma(c(0.0, 1.0));
        let expect = std::f64::consts::PI / std::f64::consts::PI.sinh();
        assert!((gi.norm_sqr() - expect).abs() < 1e-12);
    }

    #[test]
    fn reflection_identity() {
        // Γ(z)Γ(1−z) = π/sin(πz) across the contour heights the transform uses
        for &im in &[0.5, 3.0, 17.0] {
            for &re in &[-0.5, 0.25, 1.25] {
                let z = c(re, im);
                let lhs = lgamma(z) + lgamma(c(1.0, 0.0) - z);
                let pi = std::f64::consts::PI;
                let rhs = Complex64::new(pi.ln(), 0.0) - (pi * z).sin().ln();
                // compare exp to dodge 2πi branch offsets in the logs
                assert!(
                    (lhs.exp() - rhs.exp()).norm() <= 1e-9 * rhs.exp().norm(),
                    "z={z}"
                );
            }
        }
    }

    #[test]
    fn duplication_identity() {
        // Γ(z)Γ(z+1/2) = 2^(1−2z) √π Γ(2z)
        for &im in &[0.0, 2.0, 11.0] {
            let z = c(0.8, im);
            let lhs = lgamma(z) + lgamma(z + 0.5);
            let rhs = (1.0 - 2.0 * z) * std::f64::consts::LN_2
                + 0.5 * std::f64::consts::PI.ln()
                + lgamma(2.0 * z);
            assert!((lhs.exp() - rhs.exp()).norm() <= 1e-9 * rhs.exp().norm(), "z={z}");
        }
    }

    #[test]
    fn gamma_pm_combines() {
        let s = c(1.0, 4.0);
        let g0 = gamma_ell_d3(0, s);
        let g1 = gamma_ell_d3(1, s);
        assert_eq!(gamma_pm_d3(true, s), g0 - g1);
        assert_eq!(gamma_pm_d3(false, s), g0 + g1);
    }
}
