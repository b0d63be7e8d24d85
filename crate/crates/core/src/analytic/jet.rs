//! Truncated Taylor (jet) arithmetic.
//!
//! A `Jet` holds the coefficients [f, f′, f″/2!, …] of a function's Taylor
//! expansion at a point, truncated at `JET_LEN` terms. Propagating jets
//! through the elementary operations gives derivatives that are exact up to
//! rounding, with no differencing noise; the smooth test functions evaluate
//! all their derivatives this way.

/// Jet length: value plus six derivatives.
pub const JET_LEN: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub c: [f64; JET_LEN],
}

impl Jet {
    pub fn constant(v: f64) -> Jet {
        let mut c = [0.0; JET_LEN];
        c[0] = v;
        Jet { c }
    }

    /// The identity function at base point t: value t, derivative 1.
    pub fn variable(t: f64) -> Jet {
        let mut c = [0.0; JET_LEN];
        c[0] = t;
        c[1] = 1.0;
        Jet { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// k-th derivative: k! times the k-th Taylor coefficient.
    pub fn derivative(&self, k: usize) -> f64 {
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        self.c[k] * fact
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for i in 0..JET_LEN {
            c[i] = self.c[i] + o.c[i];
        }
        Jet { c }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for i in 0..JET_LEN {
            c[i] = self.c[i] - o.c[i];
        }
        Jet { c }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for i in 0..JET_LEN {
            for j in 0..JET_LEN - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Jet { c }
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut c = self.c;
        for v in &mut c {
            *v *= s;
        }
        Jet { c }
    }

    /// 1/self; requires a nonzero constant term.
    pub fn recip(&self) -> Jet {
        let a0 = self.c[0];
        debug_assert!(a0 != 0.0);
        let mut c = [0.0; JET_LEN];
        c[0] = 1.0 / a0;
        for k in 1..JET_LEN {
            let mut s = 0.0;
            for j in 1..=k {
                s += self.c[j] * c[k - j];
            }
            c[k] = -s / a0;
        }
        Jet { c }
    }

    pub fn div(&self, o: &Jet) -> Jet {
        self.mul(&o.recip())
    }

    /// exp(self), by the standard recurrence e' = e·f'.
    pub fn exp(&self) -> Jet {
        let mut c = [0.0; JET_LEN];
        c[0] = self.c[0].exp();
        for k in 1..JET_LEN {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.c[j] * c[k - j];
            }
            c[k] = s / k as f64;
        }
        Jet { c }
    }

    /// ln(self); requires a positive constant term.
    pub fn ln(&self) -> Jet {
        let a0 = self.c[0];
        debug_assert!(a0 > 0.0);
        let mut c = [0.0; JET_LEN];
        c[0] = a0.ln();
        // l' = f'/f
        let fp_over_f = {
            let mut d = [0.0; JET_LEN];
            for i in 1..JET_LEN {
                d[i - 1] = i as f64 * self.c[i];
            }
            Jet { c: d }.div(self)
        };
        for k in 1..JET_LEN {
            c[k] = fp_over_f.c[k - 1] / k as f64;
        }
        Jet { c }
    }

    /// self^s for real s via exp(s·ln self).
    pub fn powf(&self, s: f64) -> Jet {
        self.ln().scale(s).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives() {
        // f(t) = (t² + 1)(t − 3) at t = 2
        let t = Jet::variable(2.0);
        let f = t.mul(&t).add(&Jet::constant(1.0)).mul(&t.sub(&Jet::constant(3.0)));
        // f = t³ − 3t² + t − 3: f(2) = −5, f' = 3t²−6t+1 = 1, f'' = 6t−6 = 6, f''' = 6
        assert!((f.value() + 5.0).abs() < 1e-14);
        assert!((f.derivative(1) - 1.0).abs() < 1e-14);
        assert!((f.derivative(2) - 6.0).abs() < 1e-13);
        assert!((f.derivative(3) - 6.0).abs() < 1e-13);
        assert!(f.derivative(4).abs() < 1e-13);
    }

    #[test]
    fn exp_recip_chain() {
        // f(t) = exp(-1/t) at t = 2: f' = exp(-1/t)/t²
        let t = Jet::variable(2.0);
        let f = t.recip().scale(-1.0).exp();
        let v = (-0.5f64).exp();
        assert!((f.value() - v).abs() < 1e-15);
        assert!((f.derivative(1) - v / 4.0).abs() < 1e-15);
    }

    #[test]
    fn ln_and_powf() {
        let t = Jet::variable(3.0);
        let f = t.powf(2.5);
        let v = 3f64.powf(2.5);
        assert!((f.value() - v).abs() < 1e-12);
        assert!((f.derivative(1) - 2.5 * 3f64.powf(1.5)).abs() < 1e-12);
        assert!((f.derivative(2) - 2.5 * 1.5 * 3f64.powf(0.5)).abs() < 1e-12);
    }
}
