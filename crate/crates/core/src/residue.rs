//! Exact arithmetic in Z/m with prime-power structure.
//!
//! Everything downstream (characters, Kloosterman sums, the congruence
//! systems h₁–h₄) reduces to the primitives here: modular inverses, p-adic
//! valuations, primitive roots of (Z/p^r)*, Pohlig–Hellman discrete logs,
//! and Hensel lifting of polynomial roots with the full singular branching.
//!
//! Moduli are capped at 2^40 so that every product fits comfortably in a
//! u128 intermediate; desk-scale parameters stay far below the cap.

use std::collections::HashMap;
use thiserror::Error;

/// Largest permitted modulus. Keeps `a * b` for reduced residues well under
/// the u128 limit and leaves headroom over the p^r ≤ ~10^6 actually used.
pub const MAX_MODULUS: u64 = 1 << 40;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum ResidueError {
    #[error("{value} is not invertible mod {modulus} (gcd = {gcd})")]
    NotInvertible { value: u64, modulus: u64, gcd: u64 },
    #[error("valuation of 0 is undefined")]
    UndefinedValuation,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = 2 is not supported: the unit group of Z/2^r is not cyclic")]
    EvenPrime,
    #[error("modulus {0} exceeds the 2^40 cap")]
    ModulusTooLarge(u64),
    #[error("{value} is not a unit mod {modulus}")]
    NotAUnit { value: u64, modulus: u64 },
    #[error("given residue is not a root of f modulo p^{0}")]
    NotARoot(u32),
    #[error("enumeration bound exceeded: {0} > {1}")]
    TooLarge(u64, u64),
    #[error("mismatched moduli: {0} vs {1}")]
    MixedModuli(u64, u64),
}

pub type Result<T> = std::result::Result<T, ResidueError>;

/// (a * b) mod m without overflow for m ≤ 2^40.
#[inline(always)]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// a^e mod m by binary exponentiation.
pub fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Modular inverse of `a` mod `m` by the extended Euclidean algorithm.
pub fn inv_mod(a: u64, m: u64) -> Result<u64> {
    if m == 1 {
        return Ok(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(ResidueError::NotInvertible {
            value: a % m,
            modulus: m,
            gcd: old_r.unsigned_abs() as u64,
        });
    }
    Ok(old_s.rem_euclid(m as i128) as u64)
}

/// Deterministic trial-division primality test; fine at desk scale.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = 11u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Trial-division factorisation, exponents collected.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Euler phi via factorisation.
pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// A residue together with the modulus it lives in.
///
/// Arithmetic is closed: combining elements of different moduli is a caller
/// bug and returns `MixedModuli`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueElement {
    pub value: u64,
    pub modulus: u64,
}

impl ResidueElement {
    pub fn new(value: i128, modulus: u64) -> Result<Self> {
        if modulus == 0 || modulus > MAX_MODULUS {
            return Err(ResidueError::ModulusTooLarge(modulus));
        }
        Ok(ResidueElement {
            value: value.rem_euclid(modulus as i128) as u64,
            modulus,
        })
    }

    fn same_ring(&self, other: &Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(ResidueError::MixedModuli(self.modulus, other.modulus));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let mut v = self.value + other.value;
        if v >= self.modulus {
            v -= self.modulus;
        }
        Ok(ResidueElement { value: v, modulus: self.modulus })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let v = if self.value >= other.value {
            self.value - other.value
        } else {
            self.modulus - other.value + self.value
        };
        Ok(ResidueElement { value: v, modulus: self.modulus })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        Ok(ResidueElement {
            value: mulmod(self.value, other.value, self.modulus),
            modulus: self.modulus,
        })
    }

    pub fn pow(&self, e: u64) -> Self {
        ResidueElement {
            value: powmod(self.value, e, self.modulus),
            modulus: self.modulus,
        }
    }

    pub fn is_unit(&self) -> bool {
        gcd(self.value, self.modulus) == 1
    }
}

/// Modular inverse; `NotInvertible` signals a parameter tuple outside a
/// lemma's coprimality hypotheses.
pub fn mod_inv(a: &ResidueElement) -> Result<ResidueElement> {
    Ok(ResidueElement {
        value: inv_mod(a.value, a.modulus)?,
        modulus: a.modulus,
    })
}

/// p-adic valuation v_p(n) for n ≠ 0.
pub fn valuation(n: i128, p: u64) -> Result<u32> {
    if n == 0 {
        return Err(ResidueError::UndefinedValuation);
    }
    let p = p as i128;
    let mut n = n.abs();
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    Ok(v)
}

/// An odd prime power p^r with the modulus cached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimePower {
    pub p: u64,
    pub r: u32,
    modulus: u64,
}

impl PrimePower {
    pub fn new(p: u64, r: u32) -> Result<Self> {
        if p == 2 {
            return Err(ResidueError::EvenPrime);
        }
        if !is_prime(p) {
            return Err(ResidueError::NotPrime(p));
        }
        if r == 0 {
            return Err(ResidueError::NotARoot(0));
        }
        let mut modulus: u64 = 1;
        for _ in 0..r {
            modulus = modulus
                .checked_mul(p)
                .filter(|&m| m <= MAX_MODULUS)
                .ok_or(ResidueError::ModulusTooLarge(u64::MAX))?;
        }
        Ok(PrimePower { p, r, modulus })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// φ(p^r) = p^(r−1)(p−1), the unit group order.
    pub fn phi(&self) -> u64 {
        self.modulus / self.p * (self.p - 1)
    }

    pub fn element(&self, value: i128) -> ResidueElement {
        ResidueElement {
            value: value.rem_euclid(self.modulus as i128) as u64,
            modulus: self.modulus,
        }
    }
}

/// Smallest positive generator of the cyclic group (Z/p^r)*.
///
/// Deterministic so character indices are reproducible across runs.
pub fn primitive_root(pp: &PrimePower) -> ResidueElement {
    let m = pp.modulus();
    let phi = pp.phi();
    let prime_factors: Vec<u64> = factorize(phi).into_iter().map(|(q, _)| q).collect();
    for g in 2..m {
        if g % pp.p == 0 {
            continue;
        }
        if prime_factors.iter().all(|&q| powmod(g, phi / q, m) != 1) {
            return pp.element(g as i128);
        }
    }
    unreachable!("(Z/p^r)* is cyclic for odd p, so a generator exists");
}

/// Baby-step giant-step for h = base^x in a subgroup of order `ord`.
fn bsgs(h: u64, base: u64, ord: u64, m: u64) -> Option<u64> {
    let step = (ord as f64).sqrt().ceil() as u64 + 1;
    let mut table = HashMap::with_capacity(step as usize);
    let mut cur = 1u64;
    for j in 0..step {
        table.entry(cur).or_insert(j);
        cur = mulmod(cur, base, m);
    }
    // giant stride base^(-step)
    let stride = inv_mod(powmod(base, step, m), m).ok()?;
    let mut gamma = h;
    for i in 0..=step {
        if let Some(&j) = table.get(&gamma) {
            return Some((i * step + j) % ord);
        }
        gamma = mulmod(gamma, stride, m);
    }
    None
}

/// Discrete log of x base g in (Z/p^r)* via Pohlig–Hellman over the
/// factorisation p^(r−1)(p−1) of the group order.
pub fn discrete_log(x: &ResidueElement, g: &ResidueElement, pp: &PrimePower) -> Result<u64> {
    let m = pp.modulus();
    if x.modulus != m || g.modulus != m {
        return Err(ResidueError::MixedModuli(x.modulus, m));
    }
    if x.value % pp.p == 0 {
        return Err(ResidueError::NotAUnit { value: x.value, modulus: m });
    }
    let n = pp.phi();
    let mut residues: Vec<(u64, u64)> = Vec::new(); // (x mod l^e, l^e)
    for (l, e) in factorize(n) {
        let le = l.pow(e);
        // digit-by-digit lift inside the l-part
        let g_l = powmod(g.value, n / le, m);
        let h_l = powmod(x.value, n / le, m);
        let gamma = powmod(g_l, le / l, m); // order l
        let mut x_l = 0u64;
        let mut lk = 1u64;
        for _ in 0..e {
            let exp = le / (l * lk);
            let g_inv_xl = inv_mod(powmod(g_l, x_l, m), m)?;
            let target = powmod(mulmod(h_l, g_inv_xl, m), exp, m);
            let digit = bsgs(target, gamma, l, m).ok_or(ResidueError::NotAUnit {
                value: x.value,
                modulus: m,
            })?;
            x_l += digit * lk;
            lk *= l;
        }
        residues.push((x_l, le));
    }
    // CRT over the coprime prime-power parts of the group order
    let mut acc = 0u64;
    let mut acc_mod = 1u64;
    for (r, le) in residues {
        let inv = inv_mod(acc_mod % le, le)?;
        let diff = (r as i128 - acc as i128).rem_euclid(le as i128) as u64;
        let t = mulmod(diff, inv, le);
        acc += acc_mod * t;
        acc_mod *= le;
    }
    Ok(acc % n)
}

/// Dense integer polynomial, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    pub coeffs: Vec<i128>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<i128>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0 {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// f(x) mod m with coefficients reduced first.
    pub fn eval_mod(&self, x: u64, m: u64) -> u64 {
        let x = x % m;
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = mulmod(acc, x, m);
            let c = c.rem_euclid(m as i128) as u64;
            acc += c;
            if acc >= m {
                acc -= m;
            }
        }
        acc
    }

    pub fn derivative(&self) -> IntPolynomial {
        if self.coeffs.len() <= 1 {
            return IntPolynomial::new(vec![0]);
        }
        IntPolynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as i128)
                .collect(),
        )
    }
}

/// All roots of f mod p^s lying above `root` (a root of f mod p^j).
///
/// Nonsingular roots (f′(root) a unit mod p) lift uniquely; singular roots
/// branch: x mod p^(j+1) above them is either every one of the p candidates
/// (when f vanishes there) or none. Returning the full list lets callers
/// check the paper-style "loose p, gain it back" arguments term by term.
pub fn hensel_lift(
    f: &IntPolynomial,
    root: &ResidueElement,
    j: u32,
    target: &PrimePower,
) -> Result<Vec<ResidueElement>> {
    let p = target.p;
    let s = target.r;
    let pj = p.pow(j);
    if root.modulus != pj {
        return Err(ResidueError::MixedModuli(root.modulus, pj));
    }
    if f.eval_mod(root.value, pj) != 0 {
        return Err(ResidueError::NotARoot(j));
    }
    if s <= j {
        // already at or below the requested precision: reduce
        let ps = p.pow(s);
        return Ok(vec![ResidueElement { value: root.value % ps, modulus: ps }]);
    }
    let fp = f.derivative();
    let mut level = j;
    let mut current = vec![root.value];
    while level < s {
        let next_mod = p.pow(level + 1);
        let mut next = Vec::new();
        for &x in &current {
            if fp.eval_mod(x, p) % p != 0 {
                // nonsingular: unique lift x - f(x)/f'(x)
                let fx = f.eval_mod(x, next_mod);
                let corr = mulmod(
                    fx / p.pow(level),
                    inv_mod(fp.eval_mod(x, p), p)?,
                    p,
                );
                let lift =
                    (x as i128 - corr as i128 * p.pow(level) as i128).rem_euclid(next_mod as i128);
                next.push(lift as u64);
            } else {
                // singular: all of x + t p^level work iff f(x) ≡ 0 mod p^(level+1)
                for t in 0..p {
                    let cand = x + t * p.pow(level);
                    if f.eval_mod(cand, next_mod) == 0 {
                        next.push(cand);
                    }
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        current = next;
        level += 1;
        if current.is_empty() {
            break;
        }
    }
    let ps = target.modulus();
    Ok(current
        .into_iter()
        .map(|v| ResidueElement { value: v, modulus: ps })
        .collect())
}

/// Enumeration bound for `count_roots`.
pub const COUNT_ROOTS_MAX: u64 = 10_000_000;

/// Exact number of x mod m with f(x) ≡ 0, by brute enumeration.
///
/// This is the oracle backing every "determined uniquely" claim made about
/// the congruence systems downstream.
pub fn count_roots(f: &IntPolynomial, m: u64) -> Result<u64> {
    if m > COUNT_ROOTS_MAX {
        return Err(ResidueError::TooLarge(m, COUNT_ROOTS_MAX));
    }
    let reduced: Vec<u64> = f
        .coeffs
        .iter()
        .map(|&c| c.rem_euclid(m as i128) as u64)
        .collect();
    let mut count = 0;
    for x in 0..m {
        let mut acc = 0u64;
        for &c in reduced.iter().rev() {
            acc = mulmod(acc, x, m) + c;
            if acc >= m {
                acc -= m;
            }
        }
        if acc == 0 {
            count += 1;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(v: i128, m: u64) -> ResidueElement {
        ResidueElement::new(v, m).unwrap()
    }

    #[test]
    fn mod_inv_examples() {
        assert_eq!(mod_inv(&el(3, 10)).unwrap(), el(7, 10));
        assert_eq!(mod_inv(&el(1, 97)).unwrap(), el(1, 97));
        assert_eq!(
            mod_inv(&el(6, 9)),
            Err(ResidueError::NotInvertible { value: 6, modulus: 9, gcd: 3 })
        );
    }

    #[test]
    fn mod_inv_involution() {
        for m in [7u64, 9, 10, 121, 720, 9973] {
            for a in 1..m.min(200) {
                if gcd(a, m) == 1 {
                    let x = el(a as i128, m);
                    assert_eq!(mod_inv(&mod_inv(&x).unwrap()).unwrap(), x);
                }
            }
        }
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(45, 3).unwrap(), 2);
        assert_eq!(valuation(7, 5).unwrap(), 0);
        assert_eq!(valuation(250, 5).unwrap(), 3);
        assert_eq!(valuation(0, 5), Err(ResidueError::UndefinedValuation));
    }

    #[test]
    fn primitive_root_examples() {
        // orders checked exhaustively below; these pin the deterministic choice
        let pp = PrimePower::new(5, 2).unwrap();
        assert_eq!(primitive_root(&pp).value, 2);
        let pp = PrimePower::new(3, 1).unwrap();
        assert_eq!(primitive_root(&pp).value, 2);
        let pp = PrimePower::new(7, 2).unwrap();
        assert_eq!(primitive_root(&pp).value, 3);
    }

    #[test]
    fn primitive_root_has_exact_order() {
        for (p, r) in [(3u64, 4u32), (5, 3), (7, 2), (11, 2), (13, 1), (101, 1)] {
            let pp = PrimePower::new(p, r).unwrap();
            let g = primitive_root(&pp);
            let phi = pp.phi();
            assert_eq!(g.pow(phi).value, 1);
            for (q, _) in factorize(phi) {
                assert_ne!(g.pow(phi / q).value, 1, "order divides phi/{q} for p^r={}", pp.modulus());
            }
        }
    }

    #[test]
    fn discrete_log_examples() {
        let pp = PrimePower::new(5, 2).unwrap();
        let g = primitive_root(&pp);
        assert_eq!(discrete_log(&pp.element(6), &g, &pp).unwrap(), 8);
        assert_eq!(discrete_log(&g, &g, &pp).unwrap(), 1);
        assert_eq!(discrete_log(&pp.element(1), &g, &pp).unwrap(), 0);
        assert!(discrete_log(&pp.element(10), &g, &pp).is_err());
    }

    #[test]
    fn discrete_log_matches_power_enumeration() {
        for (p, r) in [(3u64, 5u32), (5, 4), (7, 3), (41, 2), (9973, 1)] {
            let pp = PrimePower::new(p, r).unwrap();
            if pp.modulus() > 10_000 {
                continue;
            }
            let g = primitive_root(&pp);
            let mut cur = pp.element(1);
            for k in 0..pp.phi() {
                assert_eq!(discrete_log(&cur, &g, &pp).unwrap(), k);
                cur = cur.mul(&g).unwrap();
            }
        }
    }

    #[test]
    fn hensel_examples() {
        let f = IntPolynomial::new(vec![-6, 0, 1]); // x^2 - 6
        let p25 = PrimePower::new(5, 2).unwrap();
        let lifts = hensel_lift(&f, &el(4, 5), 1, &p25).unwrap();
        assert_eq!(lifts, vec![el(9, 25)]);
        let lifts = hensel_lift(&f, &el(1, 5), 1, &p25).unwrap();
        assert_eq!(lifts, vec![el(16, 25)]);

        let f = IntPolynomial::new(vec![0, 0, 1]); // x^2, singular at 0
        let lifts = hensel_lift(&f, &el(0, 5), 1, &p25).unwrap();
        let vals: Vec<u64> = lifts.iter().map(|e| e.value).collect();
        assert_eq!(vals, vec![0, 5, 10, 15, 20]);

        assert_eq!(
            hensel_lift(&f, &el(1, 5), 1, &p25),
            Err(ResidueError::NotARoot(1))
        );
    }

    #[test]
    fn hensel_agrees_with_count_roots() {
        // nonsingular roots: one lift each, totals match the enumeration oracle
        let cases = [
            (IntPolynomial::new(vec![-6, 0, 1]), 5u64, 3u32),
            (IntPolynomial::new(vec![-2, 1, 1]), 7, 4),
            (IntPolynomial::new(vec![3, 0, 0, 1]), 11, 3),
        ];
        for (f, p, s) in cases {
            let target = PrimePower::new(p, s).unwrap();
            let mut total = 0;
            for x in 0..p {
                if f.eval_mod(x, p) == 0 {
                    let root = el(x as i128, p);
                    let lifts = hensel_lift(&f, &root, 1, &target).unwrap();
                    if f.derivative().eval_mod(x, p) % p != 0 {
                        assert_eq!(lifts.len(), 1);
                    }
                    for l in &lifts {
                        assert_eq!(f.eval_mod(l.value, target.modulus()), 0);
                    }
                    total += lifts.len() as u64;
                }
            }
            assert_eq!(total, count_roots(&f, target.modulus()).unwrap());
        }
    }

    #[test]
    fn count_roots_examples() {
        assert_eq!(count_roots(&IntPolynomial::new(vec![-1, 0, 1]), 8).unwrap(), 4);
        assert_eq!(count_roots(&IntPolynomial::new(vec![-6, 0, 1]), 25).unwrap(), 2);
        assert_eq!(count_roots(&IntPolynomial::new(vec![-3, 1]), 11).unwrap(), 1);
        assert!(count_roots(&IntPolynomial::new(vec![1]), COUNT_ROOTS_MAX + 1).is_err());
    }

    #[test]
    fn even_prime_rejected() {
        assert_eq!(PrimePower::new(2, 3), Err(ResidueError::EvenPrime));
    }

    #[test]
    fn poly_eval_is_ring_hom() {
        // (f+g)(x) = f(x)+g(x), (f·g)(x) = f(x)·g(x) mod m on a few random pairs
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..20 {
            let m = 2 + next() % 1000;
            let f = IntPolynomial::new((0..4).map(|_| (next() % 2000) as i128 - 1000).collect());
            let g = IntPolynomial::new((0..4).map(|_| (next() % 2000) as i128 - 1000).collect());
            let x = next() % m;
            let sum = IntPolynomial::new(
                (0..4).map(|i| f.coeffs.get(i).unwrap_or(&0) + g.coeffs.get(i).unwrap_or(&0)).collect(),
            );
            let lhs = sum.eval_mod(x, m);
            let rhs = (f.eval_mod(x, m) + g.eval_mod(x, m)) % m;
            assert_eq!(lhs, rhs);
            let mut prod = vec![0i128; 7];
            for (i, &a) in f.coeffs.iter().enumerate() {
                for (j, &b) in g.coeffs.iter().enumerate() {
                    prod[i + j] += a * b;
                }
            }
            let prod = IntPolynomial::new(prod);
            assert_eq!(prod.eval_mod(x, m), mulmod(f.eval_mod(x, m), g.eval_mod(x, m), m));
        }
    }
}
