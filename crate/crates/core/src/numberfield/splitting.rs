use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{FieldElement, NumberField};
use crate::arith::{is_prime_u64, mod_pow_u64, mul_mod_u64};
use crate::error::{Error, Result};
use crate::polyfp::{factor_fp, PolyFp};
use crate::polyq::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Inert,
    TotallyRamified,
    Other,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Inert => "inert",
            Classification::TotallyRamified => "totally ramified",
            Classification::Other => "other",
        })
    }
}

/// How a rational prime factors in a number field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingReport {
    pub p: u64,
    pub degree: usize,
    /// `(residue degree, ramification index)` per prime above `p`, read off
    /// the factorization of `f mod p` and sorted.
    pub pattern: Vec<(usize, u32)>,
    /// In degree one both the inert and the totally ramified patterns hold;
    /// the tag is then `inert` and [`SplittingReport::is_totally_ramified`]
    /// is also true.
    pub classification: Classification,
    /// `p` may divide the index `[O_K : Z[theta]]`; the pattern then only
    /// describes `f mod p` and is not certified ideal data.
    pub index_caveat: bool,
    /// `c` with `f ≡ (x - c)^m mod p`, when the pattern is totally ramified.
    pub ramified_root: Option<u64>,
}

impl SplittingReport {
    pub fn is_inert(&self) -> bool {
        self.pattern == [(self.degree, 1)]
    }

    pub fn is_totally_ramified(&self) -> bool {
        self.pattern == [(1, self.degree as u32)]
    }

    /// Inert and certified (no index caveat).
    pub fn certified_inert(&self) -> bool {
        self.is_inert() && !self.index_caveat
    }

    pub fn certified_totally_ramified(&self) -> bool {
        self.is_totally_ramified() && !self.index_caveat
    }

    pub fn pattern_string(&self) -> String {
        let parts: Vec<String> = self
            .pattern
            .iter()
            .map(|(f, e)| format!("({f},{e})"))
            .collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// Dedekind criterion: `true` iff `p` does not divide `[O_K : Z[theta]]`.
pub(crate) fn dedekind_test(k: &NumberField, p: u64) -> bool {
    let d = k.discriminant();
    let pb = BigInt::from(p);
    if d.is_zero() || !(d % (&pb * &pb)).is_zero() {
        // p^2 does not divide disc(f) = index^2 * disc(O_K)
        return true;
    }
    let fbar = PolyFp::reduce_bigints(p, k.poly());
    let fac = factor_fp(&fbar).expect("monic polynomial is nonzero");
    // g = product of the distinct irreducible factors, h = f / g (mod p)
    let g = fac
        .factors
        .iter()
        .fold(PolyFp::one(p), |acc, (gi, _)| &acc * gi);
    let h = fbar.exact_div(&g);
    let lift =
        |a: &PolyFp| -> Vec<BigInt> { a.coeffs().iter().map(|&c| BigInt::from(c)).collect() };
    let (gz, hz) = (lift(&g), lift(&h));
    let mut gh = vec![BigInt::zero(); gz.len() + hz.len() - 1];
    for (i, a) in gz.iter().enumerate() {
        for (j, b) in hz.iter().enumerate() {
            gh[i + j] += a * b;
        }
    }
    let n = gh.len().max(k.poly().len());
    let big_f: Vec<BigInt> = (0..n)
        .map(|i| {
            let a = gh.get(i).cloned().unwrap_or_default();
            let b = k.poly().get(i).cloned().unwrap_or_default();
            (a - b) / &pb
        })
        .collect();
    let fbar2 = PolyFp::reduce_bigints(p, &big_f);
    let common = g.gcd_unchecked(&h).gcd_unchecked(&fbar2);
    common.is_one()
}

/// Factors `f mod p`, runs the Dedekind index test at `p` and classifies.
pub fn split_prime(k: &NumberField, p: u64) -> Result<SplittingReport> {
    if !is_prime_u64(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    let m = k.degree();
    let fbar = PolyFp::reduce_bigints(p, k.poly());
    let fac = factor_fp(&fbar)?;
    let mut pattern: Vec<(usize, u32)> = fac.factors.iter().map(|(g, e)| (g.deg(), *e)).collect();
    pattern.sort_unstable();
    let index_caveat = !k.power_basis_ok(p);
    let classification = if pattern == [(m, 1)] {
        Classification::Inert
    } else if pattern == [(1, m as u32)] {
        Classification::TotallyRamified
    } else {
        Classification::Other
    };
    let ramified_root = (pattern == [(1, m as u32)]).then(|| {
        let lin = &fac.factors[0].0;
        (p - lin.coeff(0)) % p
    });
    Ok(SplittingReport {
        p,
        degree: m,
        pattern,
        classification,
        index_caveat,
        ramified_root,
    })
}

/// A valuation: an integer, or `+infinity` for zero. `Infinite` orders
/// above every finite value. Serialized as an integer or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(v) => Ok(Valuation::Finite(v)),
            Repr::Str(s) if s == "inf" => Ok(Valuation::Infinite),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("bad valuation {s:?}"))),
        }
    }
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

impl std::ops::Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

/// `v_p` of a nonzero integer.
pub(crate) fn vp_bigint(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// `v_p` of a rational number.
pub fn vp_rational(x: &Rational, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    Valuation::Finite(vp_bigint(x.numer(), p) - vp_bigint(x.denom(), p))
}

fn require_inert(k: &NumberField, p: u64) -> Result<()> {
    let rep = split_prime(k, p)?;
    if !rep.is_inert() {
        return Err(Error::precondition(format!(
            "{p} is not inert (pattern {})",
            rep.pattern_string()
        )));
    }
    if rep.index_caveat {
        return Err(Error::precondition(format!(
            "{p} may divide the index of Z[theta]"
        )));
    }
    Ok(())
}

/// Valuation at the prime `pO_K` for an inert, non-index-divisor prime `p`:
/// the minimum `v_p` over the power-basis coordinates.
pub fn val_inert(a: &FieldElement, p: u64) -> Result<Valuation> {
    require_inert(a.field(), p)?;
    Ok(val_inert_unchecked(a, p))
}

pub(crate) fn val_inert_unchecked(a: &FieldElement, p: u64) -> Valuation {
    a.coeffs()
        .iter()
        .map(|c| vp_rational(c, p))
        .min()
        .unwrap_or(Valuation::Infinite)
}

fn rational_mod_p(x: &Rational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let den = x.denom().mod_floor(&pb).to_u64()?;
    if den == 0 {
        return None;
    }
    let num = x.numer().mod_floor(&pb).to_u64()?;
    Some(mul_mod_u64(num, mod_pow_u64(den, p - 2, p), p))
}

/// Image of `a` in `O_K / q ≅ F_p`, where `q = (p, theta - c)` is the unique
/// prime above a totally ramified `p`.
pub fn residue_totally_ramified(a: &FieldElement, p: u64) -> Result<u64> {
    let rep = split_prime(a.field(), p)?;
    if !rep.is_totally_ramified() {
        return Err(Error::precondition(format!(
            "{p} is not totally ramified (pattern {})",
            rep.pattern_string()
        )));
    }
    if rep.index_caveat {
        return Err(Error::precondition(format!(
            "{p} may divide the index of Z[theta]"
        )));
    }
    let c = rep
        .ramified_root
        .expect("totally ramified pattern has a root");
    residue_at_root(a, p, c)
}

pub(crate) fn residue_at_root(a: &FieldElement, p: u64, c: u64) -> Result<u64> {
    let mut acc = 0u64;
    let mut cpow = 1u64;
    for coeff in a.coeffs() {
        let r = rational_mod_p(coeff, p).ok_or_else(|| {
            Error::precondition(format!("coordinate {coeff} is not {p}-integral"))
        })?;
        acc = (acc + mul_mod_u64(r, cpow, p)) % p;
        cpow = mul_mod_u64(cpow, c, p);
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidueSign {
    Plus,
    Minus,
    Neither,
}

/// Whether the residue of `u` at the totally ramified prime above `p` is
/// `+1`, `-1`, or neither. For `p = 2`, `+1 = -1` and `Plus` is reported.
pub fn residue_sign(u: &FieldElement, p: u64) -> Result<ResidueSign> {
    let r = residue_totally_ramified(u, p)?;
    Ok(if r == 1 % p {
        ResidueSign::Plus
    } else if r == p - 1 {
        ResidueSign::Minus
    } else {
        ResidueSign::Neither
    })
}

fn two_integral(a: &FieldElement) -> bool {
    a.coeffs().iter().all(|c| c.denom().is_odd())
}

/// Verifies `N(a) ≡ N(b) mod 2^n` for `a ≡ b mod P^n`, `P = 2O_K`.
///
/// Preconditions: 2 is inert without index caveat, `a` and `b` are
/// 2-integral and `v_P(a - b) >= n`. A violated precondition is an error,
/// never `false`.
pub fn norm_congruence_check(a: &FieldElement, b: &FieldElement, n: u32) -> Result<bool> {
    a.check_same(b)?;
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    require_inert(a.field(), 2)?;
    if !two_integral(a) || !two_integral(b) {
        return Err(Error::precondition("elements must be integral at 2"));
    }
    let diff = a - b;
    let v = val_inert_unchecked(&diff, 2);
    if v < Valuation::Finite(n as i64) {
        return Err(Error::precondition(format!("v_P(a - b) = {v} < {n}")));
    }
    let dn = a.norm() - b.norm();
    Ok(match vp_rational(&dn, 2) {
        Valuation::Infinite => true,
        Valuation::Finite(e) => e >= n as i64,
    })
}

impl PartialOrd<i64> for Valuation {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.cmp(&Valuation::Finite(*other)))
    }
}

impl PartialEq<i64> for Valuation {
    fn eq(&self, other: &i64) -> bool {
        *self == Valuation::Finite(*other)
    }
}
