//! Smooth compactly supported test functions (the W, U, W₁, V, g weights).
//!
//! All evaluation goes through jet arithmetic, so values and the first six
//! derivatives come from one pass with closed-form accuracy. The basic
//! profile is the classical bump exp(−1/(1−t²)); a Gaussian windowed by a
//! bump gives localized weights with a genuine mean/width, and products and
//! rescalings build the rest.

use super::jet::Jet;
use crate::Complex64;

#[derive(Debug, Clone)]
pub enum TestFunction {
    /// exp(1 − 1/(1−t²)) mapped onto [a, b]; peak value 1 at the midpoint.
    Bump { a: f64, b: f64 },
    /// exp(−((x−c)/w)²) windowed by a bump on [c−4w, c+4w].
    GaussianBump { center: f64, width: f64 },
    /// Pointwise product.
    Product(Box<TestFunction>, Box<TestFunction>),
    /// x ↦ inner(x/s).
    Scaled { inner: Box<TestFunction>, scale: f64 },
    /// Plateau: 1 on [−flat, flat], smooth decay to 0 at ±(flat+ramp), even.
    Plateau { flat: f64, ramp: f64 },
}

/// One-sided smooth step: h(s) = exp(−1/s) for s > 0, else 0, as a jet.
fn h_jet(s: &Jet) -> Jet {
    if s.value() <= 0.0 {
        Jet::constant(0.0)
    } else {
        s.recip().scale(-1.0).exp()
    }
}

/// The normalized bump profile exp(1 − 1/(1−t²)) on (−1, 1), as a jet.
fn bump_profile(t: &Jet) -> Jet {
    if t.value().abs() >= 1.0 {
        return Jet::constant(0.0);
    }
    let one_minus = Jet::constant(1.0).sub(&t.mul(t));
    one_minus.recip().scale(-1.0).exp().scale(std::f64::consts::E)
}

/// Smoothstep that is 0 for s ≤ 0 and 1 for s ≥ 1.
fn smoothstep(s: &Jet) -> Jet {
    let a = h_jet(s);
    let b = h_jet(&Jet::constant(1.0).sub(s));
    if s.value() <= 0.0 {
        Jet::constant(0.0)
    } else if s.value() >= 1.0 {
        Jet::constant(1.0)
    } else {
        a.div(&a.add(&b))
    }
}

impl TestFunction {
    pub fn bump(a: f64, b: f64) -> TestFunction {
        assert!(b > a);
        TestFunction::Bump { a, b }
    }

    pub fn gaussian_bump(center: f64, width: f64) -> TestFunction {
        assert!(width > 0.0);
        TestFunction::GaussianBump { center, width }
    }

    pub fn plateau(flat: f64, ramp: f64) -> TestFunction {
        assert!(flat >= 0.0 && ramp > 0.0);
        TestFunction::Plateau { flat, ramp }
    }

    pub fn scaled(self, scale: f64) -> TestFunction {
        TestFunction::Scaled { inner: Box::new(self), scale }
    }

    pub fn product(a: TestFunction, b: TestFunction) -> TestFunction {
        TestFunction::Product(Box::new(a), Box::new(b))
    }

    /// Support interval (zero outside, closed hull).
    pub fn support(&self) -> (f64, f64) {
        match self {
            TestFunction::Bump { a, b } => (*a, *b),
            TestFunction::GaussianBump { center, width } => {
                (center - 4.0 * width, center + 4.0 * width)
            }
            TestFunction::Product(f, g) => {
                let (fa, fb) = f.support();
                let (ga, gb) = g.support();
                (fa.max(ga), fb.min(gb))
            }
            TestFunction::Scaled { inner, scale } => {
                let (a, b) = inner.support();
                (a * scale, b * scale)
            }
            TestFunction::Plateau { flat, ramp } => (-(flat + ramp), flat + ramp),
        }
    }

    /// Full jet at x (value and derivatives).
    pub fn jet(&self, x: f64) -> Jet {
        match self {
            TestFunction::Bump { a, b } => {
                let t = Jet::variable(x)
                    .sub(&Jet::constant(*a))
                    .scale(2.0 / (b - a))
                    .sub(&Jet::constant(1.0));
                bump_profile(&t)
            }
            TestFunction::GaussianBump { center, width } => {
                let u = Jet::variable(x).sub(&Jet::constant(*center)).scale(1.0 / width);
                let gauss = u.mul(&u).scale(-1.0).exp();
                let t = u.scale(0.25);
                gauss.mul(&bump_profile(&t))
            }
            TestFunction::Product(f, g) => f.jet(x).mul(&g.jet(x)),
            TestFunction::Scaled { inner, scale } => {
                // d/dx f(x/s) picks up 1/s per order; rescale the jet
                let mut inner_jet = inner.jet(x / scale);
                let mut pw = 1.0;
                for i in 0..super::jet::JET_LEN {
                    inner_jet.c[i] *= pw;
                    pw /= scale;
                }
                inner_jet
            }
            TestFunction::Plateau { flat, ramp } => {
                let ax = x.abs();
                if ax <= *flat {
                    return Jet::constant(1.0);
                }
                if ax >= flat + ramp {
                    return Jet::constant(0.0);
                }
                // 1 − smoothstep((|x|−flat)/ramp), with the sign of x folded in
                let sgn = if x < 0.0 { -1.0 } else { 1.0 };
                let s = Jet::variable(x)
                    .scale(sgn / ramp)
                    .sub(&Jet::constant(flat / ramp));
                Jet::constant(1.0).sub(&smoothstep(&s))
            }
        }
    }

    /// Value-only fast path (the jet machinery is for derivatives).
    pub fn value(&self, x: f64) -> f64 {
        match self {
            TestFunction::Bump { a, b } => {
                let t = 2.0 * (x - a) / (b - a) - 1.0;
                if t.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - t * t)).exp()
                }
            }
            TestFunction::GaussianBump { center, width } => {
                let u = (x - center) / width;
                let t = 0.25 * u;
                if t.abs() >= 1.0 {
                    0.0
                } else {
                    (-u * u).exp() * (1.0 - 1.0 / (1.0 - t * t)).exp()
                }
            }
            TestFunction::Product(f, g) => {
                let fv = f.value(x);
                if fv == 0.0 {
                    0.0
                } else {
                    fv * g.value(x)
                }
            }
            TestFunction::Scaled { inner, scale } => inner.value(x / scale),
            TestFunction::Plateau { flat, ramp } => {
                let ax = x.abs();
                if ax <= *flat {
                    1.0
                } else if ax >= flat + ramp {
                    0.0
                } else {
                    let s = (ax - flat) / ramp;
                    let ha = (-1.0 / s).exp();
                    let hb = (-1.0 / (1.0 - s)).exp();
                    1.0 - ha / (ha + hb)
                }
            }
        }
    }

    /// k-th derivative at x, k ≤ 6.
    pub fn derivative(&self, x: f64, k: usize) -> f64 {
        self.jet(x).derivative(k)
    }

    /// Numeric Mellin transform g̃(s) = ∫ g(x) x^(s−1) dx over the support.
    pub fn mellin(&self, s: Complex64) -> Complex64 {
        let (a, b) = self.support();
        let lo = a.max(1e-12);
        super::quad::integrate_complex(
            |x| {
                let xs = Complex64::new(x.ln(), 0.0) * (s - Complex64::new(1.0, 0.0));
                self.value(x) * xs.exp()
            },
            lo,
            b,
            1e-12,
        )
    }

    /// ∫ g(x) x^(s−1) (log x)^k dx — the k-th s-derivative of the Mellin
    /// transform, needed for g̃′(1) and g̃″(1).
    pub fn mellin_log_moment(&self, k: u32, s: f64) -> f64 {
        let (a, b) = self.support();
        let lo = a.max(1e-12);
        super::quad::integrate(
            |x| self.value(x) * x.powf(s - 1.0) * x.ln().powi(k as i32),
            lo,
            b,
            1e-12,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central_diff(f: &TestFunction, x: f64, k: usize, h: f64) -> f64 {
        // fourth-order central stencils so the oracle's truncation error
        // stays below the 1e−6 relative agreement being verified
        let v = |d: f64| f.value(x + d * h);
        match k {
            1 => (-v(2.0) + 8.0 * v(1.0) - 8.0 * v(-1.0) + v(-2.0)) / (12.0 * h),
            2 => {
                (-v(2.0) + 16.0 * v(1.0) - 30.0 * v(0.0) + 16.0 * v(-1.0) - v(-2.0))
                    / (12.0 * h * h)
            }
            3 => {
                (v(-3.0) - 8.0 * v(-2.0) + 13.0 * v(-1.0) - 13.0 * v(1.0) + 8.0 * v(2.0)
                    - v(3.0))
                    / (8.0 * h * h * h)
            }
            4 => {
                (-v(-3.0) + 12.0 * v(-2.0) - 39.0 * v(-1.0) + 56.0 * v(0.0) - 39.0 * v(1.0)
                    + 12.0 * v(2.0)
                    - v(3.0))
                    / (6.0 * h * h * h * h)
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn zero_outside_support() {
        let f = TestFunction::bump(1.0, 2.0);
        assert_eq!(f.value(0.999), 0.0);
        assert_eq!(f.value(2.001), 0.0);
        assert!(f.value(1.5) > 0.9);
        let g = TestFunction::gaussian_bump(1000.0, 200.0);
        assert_eq!(g.value(199.0), 0.0);
        assert!(g.value(1000.0) > 0.99);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let cases = [
            TestFunction::bump(1.0, 2.0),
            TestFunction::gaussian_bump(10.0, 3.0),
            TestFunction::bump(0.5, 1.0).scaled(2.0),
            TestFunction::plateau(1.0, 1.0),
        ];
        for f in &cases {
            let (a, b) = f.support();
            // 100 interior points; the outer tenth of a bump's support holds
            // exp(−1/ε)-scale values where differencing is pure noise
            let lo = a + 0.1 * (b - a);
            let hi = b - 0.1 * (b - a);
            let grid: Vec<f64> = (0..=100).map(|i| lo + (hi - lo) * i as f64 / 100.0).collect();
            for k in 1..=4usize {
                // relative error is measured against the derivative's sup
                // over the grid: pointwise relative error is meaningless at
                // the derivative's interior zeros
                let sup = grid
                    .iter()
                    .map(|&x| f.derivative(x, k).abs())
                    .fold(0.0f64, f64::max);
                // k = 4 trades truncation against rounding hardest
                let h = match k { 4 => 1.5e-3, 3 => 2.5e-4, _ => 5e-4 } * (b - a);
                for &x in &grid {
                    if k == 4 && (x < a + 0.18 * (b - a) || x > b - 0.18 * (b - a)) {
                        continue;
                    }
                    // Richardson extrapolation of the 4th-order stencil;
                    // the pair difference bounds the oracle's own error,
                    // which explodes near the exp(−1/s)-type ramp corners
                    let fd_h = central_diff(f, x, k, h);
                    let fd_h2 = central_diff(f, x, k, h / 2.0);
                    let fd = (16.0 * fd_h2 - fd_h) / 15.0;
                    let fd_err = (fd_h2 - fd_h).abs() / 15.0;
                    let an = f.derivative(x, k);
                    assert!(
                        (fd - an).abs() <= 1e-6 * sup + 4.0 * fd_err,
                        "k={k} x={x}: jet {an} vs fd {fd} (sup {sup}, fd_err {fd_err})"
                    );
                }
            }
        }
    }

    #[test]
    fn mellin_scaling_law() {
        // g_s(x) = g(x/s) has g̃_s(1) = s·g̃(1) and Mellin value s^z·g̃(z)
        let g = TestFunction::bump(1.0, 2.0);
        let s = 3.0;
        let gs = g.clone().scaled(s);
        let m1 = g.mellin(Complex64::new(1.0, 0.0));
        let m1s = gs.mellin(Complex64::new(1.0, 0.0));
        assert!((m1s - m1 * s).norm() < 1e-9);
        let z = Complex64::new(2.0, 1.0);
        let mz = g.mellin(z);
        let mzs = gs.mellin(z);
        let sz = Complex64::new(s.ln(), 0.0) * z;
        assert!((mzs - mz * sz.exp()).norm() < 1e-8 * mzs.norm());
    }
}
