//! The delta-symbol expansion δ(n) = (1/Q) Σ_{q≤Q} (1/q) Σ*_a e(na/q) ∫ W₁ g(q,x) e(nx/qQ) dx.
//!
//! The kernel g is built from the divisor-pairing identity: with a smooth
//! bump w on [1/2, 1] and c = Σ_d w(d/Q),
//!
//!   δ(n) = (1/c) Σ_q Σ*_{a mod q} e(na/q) Δ_q(n),
//!   Δ_q(u) = Σ_{j≥1} (1/(qj)) [w(qj/Q) − w(|u|/(qjQ))],
//!
//! holds exactly for every integer n (pair d ↔ |n|/d). g(q,·) is recovered
//! from Δ_q by Fourier duality: ∫ g(q,x) e(nx/(qQ)) dx must equal
//! (qQ/c) Δ_q(n) for every |n| ≤ 2L. Δ_q(u) tends to the nonzero constant
//! Δ_q(∞) = Σ_j w(qj/Q)/(qj) − ĉ/q (ĉ = ∫ w(s)/s ds), so the transform is
//! regularised: with T a smooth plateau vanishing on [−1,1] and equal to 1
//! beyond |ζ| = 2, and ψ = 1 − T,
//!
//!   Δ̂_q(u) = Δ_q(u) − Δ_q(∞) · T(u/(qQ)) · (1 − ψ(u/Q²)),
//!   g(q,x) = (2/c) ∫₀^∞ Δ̂_q(u) cos(2πux/(qQ)) du.
//!
//! Δ̂_q decays superpolynomially (the subtraction only turns on past the
//! band edge u = Q², where Δ_q has settled to its limit), and since
//! ψ(n/Q²) = 1 on |n| ≤ 2L the correction never touches band frequencies:
//! the x-integral identity stays exact there. The four bound checks on g
//! are measured, not assumed.

use super::quad::integrate;
use super::testfn::TestFunction;
use crate::expsums::ramanujan_exact;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Clone)]
pub enum DeltaError {
    #[error("|n| = {0} outside the valid range [−2L, 2L] = [−{1}, {1}]")]
    OutOfRange(i64, i64),
    #[error("L = {0} above the desk-scale cap {1}")]
    TooLarge(f64, f64),
}

pub const MAX_L: f64 = 10_000.0;

/// The delta-symbol expansion at range parameter L, with Q = 2√L.
pub struct DeltaExpansion {
    pub l: f64,
    pub q: f64,
    /// x-integral cutoff: W₁ = 1 on [−x0, x0], supported on [−2x0, 2x0].
    pub x_cutoff: f64,
    w: TestFunction,
    w1: TestFunction,
    psi: TestFunction,
    c: f64,
    c_hat: f64,
    /// per-q cached Fourier data for g(q, ·)
    tables: Vec<QTable>,
    /// Ŵ₁(ξ) = ∫W₁(x)e(ξx)dx on a uniform grid (superpoly-small beyond it)
    w1_hat: Vec<f64>,
    w1_hat_step: f64,
}

struct QTable {
    /// nodes and weights of the u-quadrature, with Δ̂_q(u) pre-evaluated
    u_nodes: Vec<f64>,
    u_weights: Vec<f64>,
    delta_vals: Vec<f64>,
}

/// Gauss–Legendre 15-point nodes/weights on [0,1] assembled from the
/// Kronrod table would do, but a plain fixed composite grid is simpler:
/// panels of 15-point qk nodes reused as a fixed rule.
fn panel_nodes(a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    // 8-point Gauss–Legendre per panel (enough at the panel widths we pick)
    const X: [f64; 4] = [
        0.183_434_642_495_649_805,
        0.525_532_409_916_328_986,
        0.796_666_477_413_626_740,
        0.960_289_856_497_536_232,
    ];
    const W: [f64; 4] = [
        0.362_683_783_378_361_983,
        0.313_706_645_877_887_287,
        0.222_381_034_453_374_471,
        0.101_228_536_290_376_259,
    ];
    let mut nodes = Vec::with_capacity(panels * 8);
    let mut weights = Vec::with_capacity(panels * 8);
    let width = (b - a) / panels as f64;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        let half = 0.5 * width;
        for i in 0..4 {
            nodes.push(mid - half * X[i]);
            weights.push(half * W[i]);
            nodes.push(mid + half * X[i]);
            weights.push(half * W[i]);
        }
    }
    (nodes, weights)
}

impl DeltaExpansion {
    pub fn new(l: f64) -> Result<Self, DeltaError> {
        Self::with_cutoff(l, l.powf(0.4).max(20.0))
    }

    /// The g kernel built from a fixed bump decays only like exp(−c√x), so
    /// the plateau cutoff is a genuine accuracy knob; the default makes the
    /// window truncation error invisible next to the 1e−3 delta tolerance.
    pub fn with_cutoff(l: f64, x_cutoff: f64) -> Result<Self, DeltaError> {
        if l > MAX_L {
            return Err(DeltaError::TooLarge(l, MAX_L));
        }
        let q = 2.0 * l.sqrt();
        let w = TestFunction::bump(0.5, 1.0);
        let w1 = TestFunction::plateau(x_cutoff, x_cutoff);
        // ψ: plateau, 1 on [−1,1], supported [−2,2]; T = 1 − ψ
        let psi = TestFunction::plateau(1.0, 1.0);
        let c: f64 = (1..=(q.floor() as u64)).map(|d| w.value(d as f64 / q)).sum();
        let c_hat = integrate(|s| w.value(s) / s, 0.5, 1.0, 1e-13);
        let mut me = DeltaExpansion {
            l,
            q,
            x_cutoff,
            w,
            w1,
            psi,
            c,
            c_hat,
            tables: Vec::new(),
            w1_hat: Vec::new(),
            w1_hat_step: 0.0,
        };
        me.build_w1_hat();
        let qmax = q.floor() as u64;
        for qq in 1..=qmax {
            me.tables.push(me.build_table(qq));
        }
        Ok(me)
    }

    /// Tabulate Ŵ₁(ξ) = 2∫₀^{2x₀} W₁ cos(2πξx) dx out to where it has
    /// decayed below float noise (the plateau transform drops
    /// superpolynomially). The flat part integrates in closed form; the
    /// ramp is sampled once on a fixed fine grid and reused for every ξ.
    fn build_w1_hat(&mut self) {
        let x0 = self.x_cutoff;
        let step = 1.0 / (256.0 * x0);
        let xi_max = 6.0;
        let n = (xi_max / step).ceil() as usize;
        // fixed quadrature samples of the ramp on [x0, 2x0]: the largest ξ
        // sees xi_max·x0 cycles there, so size the panel count from that
        let ramp_panels = ((4.0 * xi_max * x0).ceil() as usize).max(64);
        let (ramp_nodes, ramp_weights) = panel_nodes(x0, 2.0 * x0, ramp_panels);
        let ramp_vals: Vec<f64> = ramp_nodes.iter().map(|&x| self.w1.value(x)).collect();
        let mut grid = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let xi = i as f64 * step;
            let flat = if xi == 0.0 {
                2.0 * x0
            } else {
                (std::f64::consts::TAU * xi * x0).sin() / (std::f64::consts::PI * xi)
            };
            let mut ramp = 0.0;
            for j in 0..ramp_nodes.len() {
                ramp += ramp_weights[j]
                    * ramp_vals[j]
                    * (std::f64::consts::TAU * xi * ramp_nodes[j]).cos();
            }
            grid.push(flat + 2.0 * ramp);
        }
        self.w1_hat = grid;
        self.w1_hat_step = step;
    }

    /// Ŵ₁(ξ) by cubic interpolation on the cached grid; 0 beyond it.
    fn w1_hat_at(&self, xi: f64) -> f64 {
        let a = xi.abs() / self.w1_hat_step;
        let i = a.floor() as usize;
        if i + 2 >= self.w1_hat.len() {
            return 0.0;
        }
        let t = a - i as f64;
        // four-point (Catmull-Rom style) cubic
        let p0 = self.w1_hat[i.saturating_sub(1)];
        let p1 = self.w1_hat[i];
        let p2 = self.w1_hat[i + 1];
        let p3 = self.w1_hat[i + 2];
        let a0 = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
        let a1 = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
        let a2 = -0.5 * p0 + 0.5 * p2;
        a0 * t * t * t + a1 * t * t + a2 * t + p1
    }

    /// Δ_q(u) = Σ_j (1/(qj)) [w(qj/Q) − w(|u|/(qjQ))] (finite sums).
    fn delta_q(&self, q: u64, u: f64) -> f64 {
        let qf = q as f64;
        let mut total = 0.0;
        // w(qj/Q) ≠ 0 needs qj/Q ∈ [1/2, 1]
        let j_lo = (0.5 * self.q / qf).ceil().max(1.0) as u64;
        let j_hi = (self.q / qf).floor() as u64;
        for j in j_lo..=j_hi {
            total += self.w.value(qf * j as f64 / self.q) / (qf * j as f64);
        }
        // w(|u|/(qjQ)) ≠ 0 needs j ∈ [|u|/(qQ), 2|u|/(qQ)]
        let au = u.abs();
        if au > 0.0 {
            let denom = qf * self.q;
            let j_lo = (au / denom).floor().max(1.0) as u64;
            let j_hi = (2.0 * au / denom).ceil() as u64;
            for j in j_lo..=j_hi {
                total -= self.w.value(au / (denom * j as f64)) / (qf * j as f64);
            }
        }
        total
    }

    /// Smooth plateau T(ζ): 0 for |ζ| ≤ 1, 1 for |ζ| ≥ 2.
    fn t_fn(&self, zeta: f64) -> f64 {
        1.0 - self.psi.value(zeta)
    }

    fn build_table(&self, q: u64) -> QTable {
        let qf = q as f64;
        let qq = qf * self.q;
        // Δ_q(∞): the first j-sum minus ĉ/q
        let mut head = 0.0;
        let j_lo = (0.5 * self.q / qf).ceil().max(1.0) as u64;
        let j_hi = (self.q / qf).floor() as u64;
        for j in j_lo..=j_hi {
            head += self.w.value(qf * j as f64 / self.q) / (qf * j as f64);
        }
        let delta_inf = head - self.c_hat / qf;
        // u-grid out to where Δ̂ has died; panel width follows the fastest
        // x-oscillation cos(2πux/(qQ)) over |x| ≤ 2·x_cutoff
        let u_max = (50.0 * qq).max(3.0 * self.q * self.q);
        let max_freq = 2.0 * self.x_cutoff / qq; // cycles per unit u
        let panels = ((u_max * max_freq * 4.0).ceil() as usize).clamp(64, 60_000);
        let (u_nodes, u_weights) = panel_nodes(0.0, u_max, panels);
        let q2 = self.q * self.q;
        let delta_vals = u_nodes
            .iter()
            .map(|&u| {
                self.delta_q(q, u)
                    - delta_inf * self.t_fn(u / qq) * (1.0 - self.psi.value(u / q2))
            })
            .collect();
        QTable { u_nodes, u_weights, delta_vals }
    }

    /// The kernel g(q, x) = (2/c) ∫₀^∞ Δ̂_q(u) cos(2πux/(qQ)) du.
    pub fn g(&self, q: u64, x: f64) -> f64 {
        let table = &self.tables[(q - 1) as usize];
        let qq = q as f64 * self.q;
        let omega = std::f64::consts::TAU * x / qq;
        let mut ft = 0.0;
        for i in 0..table.u_nodes.len() {
            ft += table.u_weights[i] * table.delta_vals[i] * (omega * table.u_nodes[i]).cos();
        }
        ft * 2.0 / self.c
    }

    /// ∫ W₁(x) g(q,x) e(nx/(qQ)) dx, with the x-integral exchanged against
    /// the u-transform defining g:
    ///   I(q,n) = (1/c) ∫₀^∞ Δ̂_q(u) [Ŵ₁((n+u)/(qQ)) + Ŵ₁((n−u)/(qQ))] du.
    /// Ŵ₁ acts as a qQ-scaled approximate identity whose moments all vanish
    /// (the plateau is flat at 0), so I(q,n) ≈ (qQ/c) Δ_q(n) beyond all
    /// orders in 1/x₀.
    pub fn x_integral(&self, q: u64, n: i64) -> f64 {
        let table = &self.tables[(q - 1) as usize];
        let qq = q as f64 * self.q;
        let nf = n as f64;
        let mut acc = 0.0;
        for i in 0..table.u_nodes.len() {
            let u = table.u_nodes[i];
            let k = self.w1_hat_at((nf + u) / qq) + self.w1_hat_at((nf - u) / qq);
            if k != 0.0 {
                acc += table.u_weights[i] * table.delta_vals[i] * k;
            }
        }
        acc / self.c
    }

    /// δ(n) through the full expansion: Ramanujan sums for the a-sum and
    /// quadrature for the x-integral against the implemented g.
    pub fn dfi_delta(&self, n: i64) -> Result<f64, DeltaError> {
        let bound = (2.0 * self.l) as i64;
        if n.abs() > bound {
            return Err(DeltaError::OutOfRange(n, bound));
        }
        let mut total = 0.0;
        for q in 1..=(self.q.floor() as u64) {
            let cq = ramanujan_exact(n, q) as f64;
            if cq == 0.0 {
                continue;
            }
            total += cq / q as f64 * self.x_integral(q, n);
        }
        Ok(total / self.q)
    }

    /// Exact reference value (qQ/c)·Δ_q(n) that the x-integral must match.
    pub fn x_integral_reference(&self, q: u64, n: i64) -> f64 {
        q as f64 * self.q / self.c * self.delta_q(q, n as f64)
    }

    /// Window-sensitivity of the x-integral against a pre-built wider
    /// expansion: the operative "effective support" statement is that
    /// widening the plateau does not move the windowed integral.
    pub fn window_sensitivity(&self, wider: &DeltaExpansion, q: u64, n: i64) -> f64 {
        (self.x_integral(q, n) - wider.x_integral(q, n)).abs()
    }
}

/// Measured worst-case ratios for the four kernel properties.
#[derive(Debug, Clone, serde::Serialize)]
pub struct GPropertiesReport {
    /// |g−1| / ((Q/q)(q/Q+|x|)^B) at B = 2 over the small-(q/Q+|x|) grid.
    pub near_one_ratio: f64,
    /// x^j ∂^j g vs log Q · min(Q/q, 1/|x|), j = 0,1,2.
    pub derivative_ratios: [f64; 3],
    /// |g(q,x)| · |x|^3 over large |x| (decay check at B = 3).
    pub far_decay_ratio: f64,
    /// ∫|g| dx / Q^0.1 per q, maximised.
    pub l1_ratio: f64,
}

pub fn g_properties_check(expansion: &DeltaExpansion) -> GPropertiesReport {
    let qmax = expansion.q.floor() as u64;
    let qs: Vec<u64> = (1..=qmax).collect();
    let mut near_one_ratio: f64 = 0.0;
    let mut derivative_ratios = [0.0f64; 3];
    let mut far_decay_ratio: f64 = 0.0;
    let mut l1_ratio: f64 = 0.0;
    let bigq = expansion.q;
    for &q in &qs {
        let qf = q as f64;
        // property 1 on the region q/Q + |x| ≤ 1 (it is vacuous elsewhere)
        for i in 0..=20 {
            let x = i as f64 * (1.0 - qf / bigq).max(0.0) / 20.0;
            if qf / bigq + x > 1.0 {
                break;
            }
            let g = expansion.g(q, x);
            let bound = (bigq / qf) * (qf / bigq + x).powi(2);
            near_one_ratio = near_one_ratio.max((g - 1.0).abs() / bound);
        }
        // property 2 via central differences of the cached kernel, j = 0,1,2
        let h = 1e-3;
        for i in 1..=30 {
            let x = i as f64 * 2.0 * expansion.x_cutoff / 30.0;
            let g0 = expansion.g(q, x);
            let gp = (expansion.g(q, x + h) - expansion.g(q, x - h)) / (2.0 * h);
            let gpp =
                (expansion.g(q, x + h) - 2.0 * g0 + expansion.g(q, x - h)) / (h * h);
            let cap = bigq.ln() * (bigq / qf).min(1.0 / x.abs());
            derivative_ratios[0] = derivative_ratios[0].max(g0.abs() / cap);
            derivative_ratios[1] = derivative_ratios[1].max((x * gp).abs() / cap);
            derivative_ratios[2] = derivative_ratios[2].max((x * x * gpp).abs() / cap);
        }
        // property 3: |g| ≤ |x|^−3 with measured constant, far field
        for i in 1..=10 {
            let x = expansion.x_cutoff * (1.0 + i as f64 * 0.3);
            far_decay_ratio = far_decay_ratio.max(expansion.g(q, x).abs() * x.powi(3));
        }
        // property 4: ∫|g| ≤ C Q^ε with ε = 0.1
        let mass = integrate(
            |x| expansion.g(q, x).abs(),
            -2.0 * expansion.x_cutoff,
            2.0 * expansion.x_cutoff,
            1e-8,
        );
        l1_ratio = l1_ratio.max(mass / bigq.powf(0.1));
    }
    GPropertiesReport { near_one_ratio, derivative_ratios, far_decay_ratio, l1_ratio }
}

/// Convenience wrapper: max |dfi_delta(n) − [n=0]| over |n| ≤ 2L.
pub fn delta_indicator_error(expansion: &DeltaExpansion, n_max: i64) -> Result<f64, DeltaError> {
    let mut worst: f64 = 0.0;
    for n in -n_max..=n_max {
        let v = expansion.dfi_delta(n)?;
        let target = if n == 0 { 1.0 } else { 0.0 };
        worst = worst.max((v - target).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_integral_matches_divisor_side() {
        // the Fourier recovery must reproduce (qQ/c)Δ_q(n); at the default
        // window the agreement is ~1e−4 except at edge-resonant n ≈ qQ/2,
        // where the kernel's bump edge slows convergence to ~1e−3
        let d = DeltaExpansion::new(25.0).unwrap();
        for q in [1u64, 2, 5, 9] {
            for n in [0i64, 1, 5, 7, 40] {
                let got = d.x_integral(q, n);
                let want = d.x_integral_reference(q, n);
                assert!(
                    (got - want).abs() <= 2e-3 * (1.0 + want.abs()),
                    "q={q} n={n}: {got} vs {want}"
                );
            }
        }
        // widening the window tightens everything, edge cases included
        let wide = DeltaExpansion::with_cutoff(25.0, 40.0).unwrap();
        for (q, n) in [(1u64, 0i64), (1, 5), (2, 7), (5, 40)] {
            let got = wide.x_integral(q, n);
            let want = wide.x_integral_reference(q, n);
            assert!(
                (got - want).abs() <= 1.5e-4 * (1.0 + want.abs()),
                "wide q={q} n={n}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn delta_examples() {
        let d = DeltaExpansion::new(50.0).unwrap();
        let v0 = d.dfi_delta(0).unwrap();
        assert!((v0 - 1.0).abs() <= 1e-3, "δ(0) = {v0}");
        let v7 = d.dfi_delta(7).unwrap();
        assert!(v7.abs() <= 1e-3, "δ(7) = {v7}");
        let edge = d.dfi_delta(-100).unwrap();
        assert!(edge.abs() <= 1e-2, "δ(−2L) = {edge}");
        assert!(d.dfi_delta(101).is_err());
    }

    #[test]
    fn window_already_converged() {
        // measured: the bump-built kernel converges like exp(−c√x₀) with an
        // oscillatory residue peaking at n ≈ qQ/2; by x₀ = 40 every probe
        // point is stable to ~1e−4 under further widening
        let d = DeltaExpansion::with_cutoff(25.0, 40.0).unwrap();
        let wider = DeltaExpansion::with_cutoff(25.0, 60.0).unwrap();
        for q in [1u64, 3, 7] {
            for n in [0i64, 5] {
                let moved = d.window_sensitivity(&wider, q, n);
                assert!(moved <= 1e-4, "q={q} n={n}: window sensitivity {moved}");
            }
        }
    }
}

#[cfg(test)]
mod exploration {
    use super::*;

    #[test]
    #[ignore]
    fn window_point_diagnostic() {
        for &x0 in &[16.0, 20.0, 24.0, 30.0, 40.0] {
            let d = DeltaExpansion::with_cutoff(25.0, x0).unwrap();
            let got = d.x_integral(1, 5);
            let want = d.x_integral_reference(1, 5);
            println!("x0={x0:5.1}: I(1,5) = {got:.9}  ref = {want:.9}  err = {:.3e}", (got-want).abs());
        }
    }

    #[test]
    #[ignore]
    fn window_convergence_ladder() {
        for &x0 in &[9.0, 14.0, 20.0, 28.0, 40.0, 56.0, 80.0] {
            let d = DeltaExpansion::with_cutoff(25.0, x0).unwrap();
            let mut worst: f64 = 0.0;
            for q in [1u64, 2, 5] {
                for n in [0i64, 7, 40] {
                    let got = d.x_integral(q, n);
                    let want = d.x_integral_reference(q, n);
                    worst = worst.max((got - want).abs() / (1.0 + want.abs()));
                }
            }
            println!("x0 = {x0:5.1}: worst rel x-integral error = {worst:.3e}");
        }
    }

    #[test]
    #[ignore]
    fn delta_accuracy_ladder() {
        for &x0 in &[9.0, 14.0, 20.0, 28.0] {
            let d = DeltaExpansion::with_cutoff(50.0, x0).unwrap();
            let err = delta_indicator_error(&d, 100).unwrap();
            println!("x0 = {x0:5.1}: max |delta - indicator| = {err:.3e}");
        }
    }
}
