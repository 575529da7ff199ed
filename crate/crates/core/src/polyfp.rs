//! Dense univariate polynomials over a prime field F_p and their complete
//! factorization (squarefree, then distinct-degree, then Cantor-Zassenhaus
//! equal-degree splitting).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime_u64, mod_pow_u64, mul_mod_u64};
use crate::error::{Error, Result};

/// Default seed for the randomized equal-degree splitting step.
pub const DEFAULT_SEED: u64 = 0x5eed_f00d;

/// A polynomial over F_p, coefficients lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyFp {
    p: u64,
    coeffs: Vec<u64>,
}

impl fmt::Debug for PolyFp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self, self.p)
    }
}

impl fmt::Display for PolyFp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, c) => write!(f, "{c}x")?,
                (i, 1) => write!(f, "x^{i}")?,
                (i, c) => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

#[inline]
fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    mod_pow_u64(a, p - 2, p)
}

impl PolyFp {
    /// Builds a polynomial from coefficients (lowest degree first), reducing
    /// them mod `p`. `p` must be prime.
    pub fn new(p: u64, coeffs: Vec<u64>) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        Ok(Self::from_reduced(
            p,
            coeffs.into_iter().map(|c| c % p).collect(),
        ))
    }

    pub fn from_i64(p: u64, coeffs: &[i64]) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        let pi = p as i128;
        let c = coeffs
            .iter()
            .map(|&c| (c as i128).rem_euclid(pi) as u64)
            .collect();
        Ok(Self::from_reduced(p, c))
    }

    /// Reduction of an integer polynomial mod `p`.
    pub fn from_bigints(p: u64, coeffs: &[BigInt]) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        Ok(Self::reduce_bigints(p, coeffs))
    }

    pub(crate) fn reduce_bigints(p: u64, coeffs: &[BigInt]) -> Self {
        let pb = BigInt::from(p);
        let c = coeffs
            .iter()
            .map(|c| c.mod_floor(&pb).to_u64().expect("reduced below p"))
            .collect();
        Self::from_reduced(p, c)
    }

    pub(crate) fn from_reduced(p: u64, mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PolyFp { p, coeffs }
    }

    pub fn zero(p: u64) -> Self {
        PolyFp {
            p,
            coeffs: Vec::new(),
        }
    }

    pub fn one(p: u64) -> Self {
        Self::constant(p, 1)
    }

    pub fn constant(p: u64, c: u64) -> Self {
        Self::from_reduced(p, vec![c % p])
    }

    /// The monomial `x`.
    pub fn x(p: u64) -> Self {
        Self::from_reduced(p, vec![0, 1])
    }

    /// `(x - c)`.
    pub fn linear(p: u64, c: u64) -> Self {
        Self::from_reduced(p, vec![(p - c % p) % p, 1])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub(crate) fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        let inv = inv_mod(self.leading(), self.p);
        self.scale(inv)
    }

    pub fn scale(&self, c: u64) -> Self {
        let p = self.p;
        Self::from_reduced(
            p,
            self.coeffs
                .iter()
                .map(|&a| mul_mod_u64(a, c % p, p))
                .collect(),
        )
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.p;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| (mul_mod_u64(acc, x % p, p) + c) % p)
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| mul_mod_u64(a, i as u64 % p, p))
            .collect();
        Self::from_reduced(p, c)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            Err(Error::ModulusMismatch(self.p, other.p))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self * other)
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        self.check_same(d)?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.div_rem_unchecked(d))
    }

    pub(crate) fn div_rem_unchecked(&self, d: &Self) -> (Self, Self) {
        let p = self.p;
        let dd = d.deg();
        if self.coeffs.len() < d.coeffs.len() {
            return (Self::zero(p), self.clone());
        }
        let inv = inv_mod(d.leading(), p);
        let mut r = self.coeffs.clone();
        let mut q = vec![0u64; r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = mul_mod_u64(r[i], inv, p);
            if c == 0 {
                continue;
            }
            q[i - dd] = c;
            for (j, &dj) in d.coeffs.iter().enumerate() {
                let k = i - dd + j;
                r[k] = (r[k] + p - mul_mod_u64(c, dj, p)) % p;
            }
        }
        r.truncate(dd);
        (Self::from_reduced(p, q), Self::from_reduced(p, r))
    }

    pub(crate) fn rem(&self, d: &Self) -> Self {
        self.div_rem_unchecked(d).1
    }

    /// Division that is known to be exact.
    pub(crate) fn exact_div(&self, d: &Self) -> Self {
        let (q, r) = self.div_rem_unchecked(d);
        debug_assert!(r.is_zero());
        q
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.gcd_unchecked(other))
    }

    pub(crate) fn gcd_unchecked(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn xgcd(&self, other: &Self) -> Result<(Self, Self, Self)> {
        self.check_same(other)?;
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(p), Self::zero(p));
        let (mut t0, mut t1) = (Self::zero(p), Self::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem_unchecked(&r1);
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        if r0.is_zero() {
            return Ok((r0, s0, t0));
        }
        let inv = inv_mod(r0.leading(), p);
        Ok((r0.scale(inv), s0.scale(inv), t0.scale(inv)))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut result = Self::one(self.p);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        result
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, e: &BigUint, m: &Self) -> Self {
        let mut result = Self::one(self.p).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            result = (&result * &result).rem(m);
            if e.bit(i) {
                result = (&result * &base).rem(m);
            }
        }
        result
    }

    fn pow_mod_u64(&self, e: u64, m: &Self) -> Self {
        self.pow_mod(&BigUint::from(e), m)
    }

    /// Complete factorization with the default splitting seed.
    pub fn factor(&self) -> Result<FactorizationFp> {
        factor_fp_seeded(self, DEFAULT_SEED)
    }

    pub fn is_irreducible(&self) -> bool {
        match self.degree() {
            None | Some(0) => false,
            Some(1) => true,
            Some(_) => {
                let f = self.monic();
                if !f.gcd_unchecked(&f.derivative()).is_one() {
                    return false;
                }
                let dd = distinct_degree(&f);
                dd.len() == 1 && dd[0].1 == f.deg()
            }
        }
    }
}

/// Canonical order: by degree, then coefficient vectors compared
/// lexicographically from the constant term up.
impl Ord for PolyFp {
    fn cmp(&self, other: &Self) -> Ordering {
        self.p
            .cmp(&other.p)
            .then(self.coeffs.len().cmp(&other.coeffs.len()))
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialOrd for PolyFp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &PolyFp {
    type Output = PolyFp;
    fn add(self, rhs: &PolyFp) -> PolyFp {
        assert_eq!(self.p, rhs.p, "modulus mismatch");
        let p = self.p;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let c = (0..n).map(|i| (self.coeff(i) + rhs.coeff(i)) % p).collect();
        PolyFp::from_reduced(p, c)
    }
}

impl Sub for &PolyFp {
    type Output = PolyFp;
    fn sub(self, rhs: &PolyFp) -> PolyFp {
        assert_eq!(self.p, rhs.p, "modulus mismatch");
        let p = self.p;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let c = (0..n)
            .map(|i| (self.coeff(i) + p - rhs.coeff(i)) % p)
            .collect();
        PolyFp::from_reduced(p, c)
    }
}

impl Neg for &PolyFp {
    type Output = PolyFp;
    fn neg(self) -> PolyFp {
        &PolyFp::zero(self.p) - self
    }
}

impl Mul for &PolyFp {
    type Output = PolyFp;
    fn mul(self, rhs: &PolyFp) -> PolyFp {
        assert_eq!(self.p, rhs.p, "modulus mismatch");
        let p = self.p;
        if self.is_zero() || rhs.is_zero() {
            return PolyFp::zero(p);
        }
        let mut c = vec![0u128; self.coeffs.len() + rhs.coeffs.len() - 1];
        let pm = p as u128;
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                c[i + j] = (c[i + j] + a as u128 * b as u128) % pm;
            }
        }
        PolyFp::from_reduced(p, c.into_iter().map(|v| v as u64).collect())
    }
}

/// Operation selector for [`poly_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
    DivMod,
    Gcd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyArithResult {
    Single(PolyFp),
    Pair(PolyFp, PolyFp),
}

pub fn poly_arith(a: &PolyFp, b: &PolyFp, op: PolyOp) -> Result<PolyArithResult> {
    Ok(match op {
        PolyOp::Add => PolyArithResult::Single(a.checked_add(b)?),
        PolyOp::Sub => PolyArithResult::Single(a.checked_sub(b)?),
        PolyOp::Mul => PolyArithResult::Single(a.checked_mul(b)?),
        PolyOp::DivMod => {
            let (q, r) = a.div_rem(b)?;
            PolyArithResult::Pair(q, r)
        }
        PolyOp::Gcd => PolyArithResult::Single(a.gcd(b)?),
    })
}

/// A complete factorization `unit * prod(factor^multiplicity)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationFp {
    pub unit: u64,
    /// Monic irreducible factors in canonical order.
    pub factors: Vec<(PolyFp, u32)>,
}

impl FactorizationFp {
    /// Multiplies the factorization back out.
    pub fn expand(&self, p: u64) -> PolyFp {
        self.factors
            .iter()
            .fold(PolyFp::constant(p, self.unit), |acc, (f, e)| {
                &acc * &f.pow(*e as u64)
            })
    }

    /// `(degree, multiplicity)` of each factor.
    pub fn degree_pattern(&self) -> Vec<(usize, u32)> {
        self.factors.iter().map(|(f, e)| (f.deg(), *e)).collect()
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

/// Factorization with the default seed.
pub fn factor_fp(f: &PolyFp) -> Result<FactorizationFp> {
    factor_fp_seeded(f, DEFAULT_SEED)
}

/// Complete factorization of a nonzero polynomial. The equal-degree step is
/// randomized from `seed`, but the returned factor list is canonically
/// sorted, so the result is independent of the seed.
pub fn factor_fp_seeded(f: &PolyFp, seed: u64) -> Result<FactorizationFp> {
    if f.is_zero() {
        return Err(Error::domain("cannot factor the zero polynomial"));
    }
    let p = f.p;
    let unit = f.leading();
    let monic = f.monic();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors = Vec::new();
    for (sqf, mult) in squarefree_decomposition(&monic) {
        for (part, d) in distinct_degree(&sqf) {
            for irr in equal_degree(&part, d, &mut rng) {
                factors.push((irr, mult));
            }
        }
    }
    factors.sort();
    debug_assert!(factors.iter().all(|(g, _)| g.p == p));
    Ok(FactorizationFp { unit, factors })
}

/// Squarefree decomposition of a monic polynomial: returns `(g_i, i)` with
/// `f = prod g_i^i`, each `g_i` squarefree and pairwise coprime.
pub fn squarefree_decomposition(f: &PolyFp) -> Vec<(PolyFp, u32)> {
    let p = f.p;
    let mut out = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    let c = f.gcd_unchecked(&f.derivative());
    let mut w = f.exact_div(&c);
    let mut c = c;
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd_unchecked(&c);
        let fac = w.exact_div(&y);
        if !fac.is_one() {
            out.push((fac, i));
        }
        i += 1;
        w = y;
        c = c.exact_div(&w);
    }
    if !c.is_one() {
        // c = h(x^p); in F_p the p-th root of the coefficients is the identity.
        let root: Vec<u64> = c.coeffs.iter().step_by(p as usize).copied().collect();
        let root = PolyFp::from_reduced(p, root);
        for (g, e) in squarefree_decomposition(&root) {
            out.push((g, e * p as u32));
        }
    }
    // merge equal multiplicities coming from the recursive branch
    out.sort_by_key(|(_, e)| *e);
    let mut merged: Vec<(PolyFp, u32)> = Vec::new();
    for (g, e) in out {
        match merged.last_mut() {
            Some((h, e2)) if *e2 == e => *h = &*h * &g,
            _ => merged.push((g, e)),
        }
    }
    merged
}

/// Distinct-degree factorization of a monic squarefree polynomial:
/// `(g_d, d)` where `g_d` is the product of all irreducible factors of degree `d`.
pub fn distinct_degree(f: &PolyFp) -> Vec<(PolyFp, usize)> {
    let p = f.p;
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = PolyFp::x(p);
    let mut h = x.rem(&rest);
    let mut d = 0;
    while rest.deg() >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod_u64(p, &rest);
        let g = rest.gcd_unchecked(&(&h - &x));
        if !g.is_one() {
            rest = rest.exact_div(&g);
            h = h.rem(&rest);
            out.push((g, d));
        }
    }
    if rest.deg() > 0 {
        let dr = rest.deg();
        out.push((rest, dr));
    }
    out
}

fn random_poly(p: u64, below_degree: usize, rng: &mut ChaCha8Rng) -> PolyFp {
    PolyFp::from_reduced(p, (0..below_degree).map(|_| rng.gen_range(0..p)).collect())
}

/// Splits a monic squarefree product of irreducibles of degree `d` into its
/// factors (Cantor-Zassenhaus; the trace map is used in characteristic 2).
pub fn equal_degree(f: &PolyFp, d: usize, rng: &mut ChaCha8Rng) -> Vec<PolyFp> {
    let n = f.deg();
    if n == d {
        return vec![f.clone()];
    }
    let p = f.p;
    let exponent = if p == 2 {
        BigUint::zero()
    } else {
        (BigUint::from(p).pow(d as u32) - 1u32) >> 1
    };
    loop {
        let a = random_poly(p, n, rng);
        if a.deg() == 0 {
            continue;
        }
        let b = if p == 2 {
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..d {
                t = (&t * &t).rem(f);
                acc = &acc + &t;
            }
            acc
        } else {
            &a.pow_mod(&exponent, f) - &PolyFp::one(p)
        };
        let g = f.gcd_unchecked(&b);
        if !g.is_one() && g.deg() < n {
            let other = f.exact_div(&g);
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&other, d, rng));
            return out;
        }
    }
}

/// All monic polynomials of degree `d` over F_p, in canonical order.
#[cfg(test)]
pub(crate) fn all_monic(p: u64, d: usize) -> Vec<PolyFp> {
    let count = p.pow(d as u32);
    (0..count)
        .map(|mut k| {
            let mut c = Vec::with_capacity(d + 1);
            for _ in 0..d {
                c.push(k % p);
                k /= p;
            }
            c.push(1);
            PolyFp::from_reduced(p, c)
        })
        .collect()
}
