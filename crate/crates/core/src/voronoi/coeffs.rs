//! Arithmetic coefficient generators: Ramanujan τ (exact integers from the
//! weight-12 cusp form's q-expansion), divisor functions d and d₃, and the
//! σ₀,₀ double-divisor weights of the d₃ dual side.

use crate::expsums::divisors;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum CoeffError {
    #[error("requested bound {0} above the cap {1}")]
    TooLarge(u64, u64),
}

pub const TAU_MAX: u64 = 100_000;

/// τ(n) for 1 ≤ n ≤ bound, exact in i128.
///
/// Δ = q Π (1−q^n)^24 = Σ τ(n) q^n; with F = Π(1−q^n)^24,
/// q F′/F = −24 Σ σ(n) q^n gives the recursion
/// n·a(n) = −24 Σ_{k≤n} σ(k) a(n−k), τ(n) = a(n−1).
pub fn tau_table(bound: u64) -> Result<Vec<i128>, CoeffError> {
    if bound > TAU_MAX {
        return Err(CoeffError::TooLarge(bound, TAU_MAX));
    }
    let n = bound as usize;
    // σ(k) table
    let mut sigma = vec![0i128; n];
    for d in 1..n {
        let mut m = d;
        while m < n {
            sigma[m] += d as i128;
            m += d;
        }
    }
    let mut a = vec![0i128; n.max(1)];
    if n > 0 {
        a[0] = 1;
    }
    for m in 1..n {
        let mut acc: i128 = 0;
        for k in 1..=m {
            acc += sigma[k] * a[m - k];
        }
        // a(m) = −24·acc/m exactly; split the division so 24·acc cannot
        // overflow i128 near the τ cap
        let mi = m as i128;
        let (q, r) = (acc.div_euclid(mi), acc.rem_euclid(mi));
        debug_assert_eq!(24 * r % mi, 0, "divisibility in the τ recursion");
        a[m] = -24 * q - 24 * r / mi;
    }
    // τ(n) = a(n−1); index τ[0] unused
    let mut tau = vec![0i128; n + 1];
    for m in 1..=n {
        tau[m] = a[m - 1];
    }
    Ok(tau)
}

/// Hecke-normalised λ(n) = τ(n)/n^(11/2).
pub fn lambda_from_tau(tau: &[i128]) -> Vec<f64> {
    tau.iter()
        .enumerate()
        .map(|(n, &t)| {
            if n == 0 {
                0.0
            } else {
                t as f64 / (n as f64).powf(5.5)
            }
        })
        .collect()
}

/// d(n) for 0 ≤ n ≤ bound (d(0) unused).
pub fn divisor_table(bound: u64) -> Vec<u32> {
    let n = bound as usize;
    let mut d = vec![0u32; n + 1];
    for i in 1..=n {
        let mut m = i;
        while m <= n {
            d[m] += 1;
            m += i;
        }
    }
    d
}

/// d₃(n) = #{(a,b,c) : abc = n} for 0 ≤ n ≤ bound.
pub fn d3_table(bound: u64) -> Vec<u64> {
    let n = bound as usize;
    let d = divisor_table(bound);
    let mut d3 = vec![0u64; n + 1];
    for a in 1..=n {
        let mut m = a;
        while m <= n {
            d3[m] += d[m / a] as u64;
            m += a;
        }
    }
    d3
}

/// σ₀,₀(k₁, k₂) = Σ_{d₁|k₂} Σ_{d₂ : d₁d₂|k₂, (d₂,k₁)=1} 1.
pub fn sigma00(k1: u64, k2: u64) -> u64 {
    let mut count = 0;
    for &d1 in &divisors(k2) {
        for &d2 in &divisors(k2 / d1) {
            if crate::residue::gcd(d2, k1) == 1 {
                count += 1;
            }
        }
    }
    count
}

/// The d₃ dual-side coefficient a(n₁,n₂) = Σ_{n₃|n₁} Σ_{n₄|n₁/n₃} σ₀,₀(n₁/(n₃n₄), n₂);
/// reduces to d₃(n₂) at n₁ = 1.
pub fn d3_dual_coeff(n1: u64, n2: u64) -> u64 {
    let mut total = 0;
    for &n3 in &divisors(n1) {
        for &n4 in &divisors(n1 / n3) {
            total += sigma00(n1 / (n3 * n4), n2);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_values() {
        let tau = tau_table(30).unwrap();
        assert_eq!(tau[1], 1);
        assert_eq!(tau[2], -24);
        assert_eq!(tau[3], 252);
        assert_eq!(tau[4], -1472);
        assert_eq!(tau[5], 4830);
        assert_eq!(tau[6], -6048);
        assert_eq!(tau[6], tau[2] * tau[3]);
        assert_eq!(tau[25], tau[5] * tau[5] - 5i128.pow(11) * tau[1]);
    }

    #[test]
    fn tau_hecke_multiplicative_and_deligne() {
        let bound = 3000u64;
        let tau = tau_table(bound).unwrap();
        let d = divisor_table(bound);
        for m in 2..=50u64 {
            for n in 2..=(bound / m).min(50) {
                if crate::residue::gcd(m, n) == 1 {
                    assert_eq!(
                        tau[(m * n) as usize],
                        tau[m as usize] * tau[n as usize],
                        "τ({m}·{n})"
                    );
                }
            }
        }
        for n in 1..=bound {
            let bound_val = d[n as usize] as f64 * (n as f64).powf(5.5);
            assert!(
                (tau[n as usize] as f64).abs() <= bound_val * (1.0 + 1e-9),
                "Deligne bound at n={n}"
            );
        }
    }

    #[test]
    fn d3_hyperbolic_cross_check() {
        // Σ_{n≤x} d₃(n) = Σ_a Σ_{b≤x/a} ⌊x/(ab)⌋ exactly
        let x = 2000u64;
        let d3 = d3_table(x);
        let lhs: u64 = (1..=x).map(|n| d3[n as usize]).sum();
        let mut rhs = 0u64;
        for a in 1..=x {
            for b in 1..=(x / a) {
                rhs += x / (a * b);
            }
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn sigma00_reduces_to_d3() {
        let d3 = d3_table(60);
        for n in 1..=60u64 {
            assert_eq!(sigma00(1, n), d3[n as usize], "n={n}");
            assert_eq!(d3_dual_coeff(1, n), d3[n as usize], "n={n}");
        }
        // σ₀,₀(k₁, k₂) with everything coprime to k₁ counts pairs d₁d₂|k₂
        assert_eq!(sigma00(2, 9), 6); // d1|9, d2|9/d1: (1,1),(1,3),(1,9),(3,1),(3,3),(9,1)
        assert_eq!(sigma00(3, 9), 3); // d2 must avoid 3: (1,1),(3,1),(9,1)
    }
}
