//! Dirichlet characters of prime-power conductor.
//!
//! A character mod p^r is stored as an exponent on the canonical (smallest)
//! primitive root g, i.e. χ(g) = e(index/φ(p^r)). Evaluation goes through a
//! cached discrete-log table, so χ(n) is available both as a complex number
//! and as an exact exponent mod φ(p^r). The exact form is what lets the
//! Postnikov constants be certified by integer arithmetic instead of floats.

use crate::residue::{
    discrete_log, mulmod, primitive_root, PrimePower, ResidueElement, ResidueError,
};
use crate::{e_frac, Complex64};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum CharacterError {
    #[error("need 2t ≥ r so that v ↦ χ(1+vp^t) is additive; got t={t}, r={r}")]
    NotAdditive { t: u32, r: u32 },
    #[error("no additive constant verified for χ (index {index} mod p^{r}); implementation bug")]
    NoConstant { index: u64, r: u32 },
    #[error("character must be primitive for this operation")]
    NotPrimitive,
    #[error("induction target exponent {s} is below the conductor exponent {r}")]
    BadInduction { s: u32, r: u32 },
    #[error(transparent)]
    Residue(#[from] ResidueError),
}

pub type Result<T> = std::result::Result<T, CharacterError>;

/// Largest modulus for which the full discrete-log table is built eagerly.
const DLOG_TABLE_MAX: u64 = 1 << 22;

/// A Dirichlet character mod p^r, primitive iff p ∤ index (r ≥ 2).
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    pub pp: PrimePower,
    pub generator: ResidueElement,
    pub index: u64,
    /// dlog[n] = discrete log of n base `generator`, u32::MAX on non-units.
    dlog: Vec<u32>,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.pp == other.pp && self.index == other.index
    }
}

impl DirichletCharacter {
    pub fn new(pp: PrimePower, index: u64) -> Self {
        let generator = primitive_root(&pp);
        let m = pp.modulus();
        let phi = pp.phi();
        let dlog = if m <= DLOG_TABLE_MAX {
            let mut table = vec![u32::MAX; m as usize];
            let mut cur = 1u64;
            for k in 0..phi {
                table[cur as usize] = k as u32;
                cur = mulmod(cur, generator.value, m);
            }
            table
        } else {
            Vec::new()
        };
        DirichletCharacter { pp, generator, index: index % phi, dlog }
    }

    pub fn modulus(&self) -> u64 {
        self.pp.modulus()
    }

    pub fn phi(&self) -> u64 {
        self.pp.phi()
    }

    /// Discrete log of n base the canonical generator, None on non-units.
    pub fn dlog(&self, n: i128) -> Option<u64> {
        let m = self.modulus();
        let v = n.rem_euclid(m as i128) as u64;
        if v % self.pp.p == 0 {
            return None;
        }
        if !self.dlog.is_empty() {
            let d = self.dlog[v as usize];
            return Some(d as u64);
        }
        discrete_log(&self.pp.element(v as i128), &self.generator, &self.pp).ok()
    }

    /// Exact exponent k with χ(n) = e(k/φ(p^r)), None when p | n.
    pub fn eval_exponent(&self, n: i128) -> Option<u64> {
        let d = self.dlog(n)?;
        Some(mulmod(self.index, d, self.phi()))
    }

    /// χ(n) as a complex number; exactly 0 when p | n.
    pub fn eval(&self, n: i128) -> Complex64 {
        match self.eval_exponent(n) {
            Some(k) => e_frac(k as i128, self.phi()),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// The conjugate character χ̄.
    pub fn conjugate(&self) -> DirichletCharacter {
        let phi = self.phi();
        let mut c = self.clone();
        c.index = (phi - self.index % phi) % phi;
        c
    }

    /// Primitive ⇔ no smaller modulus induces χ. For r ≥ 2 this is p ∤ index
    /// (χ nontrivial on 1 + p^(r−1)Z); for r = 1 it is index ≠ 0.
    pub fn is_primitive(&self) -> bool {
        if self.pp.r == 1 {
            self.index != 0
        } else {
            self.index % self.pp.p != 0
        }
    }

    pub fn is_principal(&self) -> bool {
        self.index == 0
    }
}

/// All indices of primitive characters mod p^r, in increasing order.
pub fn primitive_indices(pp: &PrimePower) -> Vec<u64> {
    let phi = pp.phi();
    (0..phi)
        .filter(|&i| if pp.r == 1 { i != 0 } else { i % pp.p != 0 })
        .collect()
}

/// τ(χ) = Σ_{β mod p^r} χ(β) e(β/p^r), by direct summation.
pub fn gauss_sum(chi: &DirichletCharacter) -> Complex64 {
    let m = chi.modulus();
    let phi = chi.phi();
    let mut sum = Complex64::new(0.0, 0.0);
    for beta in 1..m {
        if let Some(k) = chi.eval_exponent(beta as i128) {
            // χ(β) e(β/m) = e(k/φ + β/m)
            sum += crate::e(k as f64 / phi as f64 + beta as f64 / m as f64);
        }
    }
    sum
}

/// The character mod p^s induced from χ mod p^r (s ≥ r): equal to χ on
/// units, zero elsewhere, imprimitive for s > r.
pub fn induce(chi: &DirichletCharacter, s: u32) -> Result<DirichletCharacter> {
    let r = chi.pp.r;
    if s < r {
        return Err(CharacterError::BadInduction { s, r });
    }
    if s == r {
        return Ok(chi.clone());
    }
    let pp_s = PrimePower::new(chi.pp.p, s)?;
    let g_s = primitive_root(&pp_s);
    // χ₁(g_s) = χ(g_s mod p^r) fixes the new index:
    // index_s = index_r · dlog_{g_r}(g_s) · φ(p^s)/φ(p^r)  (mod φ(p^s))
    let d = chi
        .dlog(g_s.value as i128)
        .expect("a generator mod p^s reduces to a unit mod p^r");
    let stretch = pp_s.phi() / chi.phi();
    let index_s = mulmod(mulmod(chi.index, d, pp_s.phi()), stretch, pp_s.phi());
    Ok(DirichletCharacter::new(pp_s, index_s))
}

/// The constant A mod p^(r−t) with χ(1 + v p^t) = e(Av/p^(r−t)) for all v.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PostnikovConstant {
    pub t: u32,
    pub value: ResidueElement,
}

/// Computes the Postnikov-type constant of χ at split level t (2t ≥ r).
///
/// A is read off from one discrete log, A = index·dlog(1+p^t)/(p^(t−1)(p−1))
/// mod p^(r−t), then certified exhaustively over every v in exact exponent
/// arithmetic before being returned.
pub fn postnikov_constant(chi: &DirichletCharacter, t: u32) -> Result<PostnikovConstant> {
    let r = chi.pp.r;
    if 2 * t < r {
        return Err(CharacterError::NotAdditive { t, r });
    }
    if !chi.is_primitive() {
        return Err(CharacterError::NotPrimitive);
    }
    if t >= r {
        // χ(1 + v p^r) = χ(1) = 1 = e(0·v); the constant degenerates to 0
        return Ok(PostnikovConstant { t, value: ResidueElement::new(0, 1)? });
    }
    let p = chi.pp.p;
    let phi = chi.phi();
    let pt = p.pow(t);
    let prt = p.pow(r - t);
    // 1 + p^t has order p^(r−t), so its dlog is divisible by φ/p^(r−t)
    let d = chi
        .dlog((1 + pt) as i128)
        .expect("1 + p^t is a unit");
    let unit_part = phi / prt; // p^(t−1)(p−1)
    debug_assert_eq!(d % unit_part, 0);
    let a = mulmod(chi.index % prt, (d / unit_part) % prt, prt);
    // exhaustive certification: index·dlog(1+vp^t) ≡ A·v·(φ/p^(r−t)) mod φ
    for v in 0..prt {
        let x = (1 + v as i128 * pt as i128).rem_euclid(chi.modulus() as i128);
        let lhs = chi.eval_exponent(x).ok_or(CharacterError::NoConstant {
            index: chi.index,
            r,
        })?;
        let rhs = mulmod(mulmod(a, v, phi), unit_part, phi);
        if lhs != rhs {
            return Err(CharacterError::NoConstant { index: chi.index, r });
        }
    }
    Ok(PostnikovConstant { t, value: ResidueElement::new(a as i128, prt)? })
}

/// The constant B mod p^s with χ̄(1 − p^(r−s) u) = e(Bu/p^s) for all u,
/// the second additive constant of the u-sum reduction.
///
/// Conjugating flips one sign and the 1−… argument flips it back, so B is
/// the Postnikov constant of χ itself at level r−s; the identity is still
/// certified exhaustively in exact arithmetic before returning.
pub fn second_constant(chi: &DirichletCharacter, s: u32) -> Result<ResidueElement> {
    let r = chi.pp.r;
    if s > r || 2 * (r - s) < r {
        return Err(CharacterError::NotAdditive { t: r - s, r });
    }
    let a = postnikov_constant(chi, r - s)?;
    let p = chi.pp.p;
    let ps = p.pow(s);
    let b = a.value.value % ps;
    let phi = chi.phi();
    let unit_part = phi / ps;
    let chibar = chi.conjugate();
    for u in 0..ps {
        let x = (1 - u as i128 * p.pow(r - s) as i128).rem_euclid(chi.modulus() as i128);
        let lhs = chibar
            .eval_exponent(x)
            .ok_or(CharacterError::NoConstant { index: chi.index, r })?;
        let rhs = mulmod(mulmod(b, u, phi), unit_part, phi);
        if lhs != rhs {
            return Err(CharacterError::NoConstant { index: chi.index, r });
        }
    }
    ResidueElement::new(b as i128, ps).map_err(Into::into)
}

/// Conductor of χ: the smallest p^f from which χ is induced.
pub fn conductor(chi: &DirichletCharacter) -> u64 {
    if chi.index == 0 {
        return 1;
    }
    let p = chi.pp.p;
    let mut f = chi.pp.r;
    // χ factors through p^f iff p^(r−f) divides the index
    let mut idx = chi.index;
    while f > 1 && idx % p == 0 {
        idx /= p;
        f -= 1;
    }
    if f == 1 {
        // factors through the prime level; trivial iff index ≡ 0 mod (p−1)p^(r−1)/...
        // at this point idx ≠ 0 so the conductor is p
        p
    } else {
        p.pow(f)
    }
}
