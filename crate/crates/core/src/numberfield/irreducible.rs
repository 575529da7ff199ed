//! Exact irreducibility test over Q for monic integer polynomials.
//!
//! Strategy, cheapest first:
//! 1. squarefreeness over Q and rational roots;
//! 2. factor-degree patterns modulo a handful of good primes (irreducible
//!    modulo one prime is a proof; an empty intersection of the attainable
//!    factor degrees is also a proof);
//! 3. Zassenhaus: Hensel-lift the factorization modulo the best prime past
//!    twice the Mignotte bound and try every combination of lifted factors.
//!
//! Steps 1 and 3 produce a true factor when the polynomial is reducible, so
//! the test never rejects an irreducible input and never accepts a reducible one.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::primes_up_to;
use crate::error::{Error, Result};
use crate::polyfp::{factor_fp, PolyFp};
use crate::polyq::QPoly;

/// Largest lifted-factor count for which combinations are tried.
const MAX_RECOMBINATION_FACTORS: usize = 26;

/// `Ok(None)` if `f` is irreducible over Q, `Ok(Some(g))` with a nontrivial
/// monic factor `g` otherwise.
pub(crate) fn find_factor(f: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    let m = f.len() - 1;
    if m <= 1 {
        return Ok(None);
    }
    let fq = QPoly::from_ints(f);
    let g = fq.gcd(&fq.derivative());
    if g.deg() > 0 {
        let w = g
            .to_integer_coeffs()
            .ok_or_else(|| Error::internal("monic gcd of monic integer polynomials is integral"))?;
        return Ok(Some(w));
    }
    if let Some(r) = rational_root(f) {
        return Ok(Some(vec![-r, BigInt::one()]));
    }
    if m <= 3 {
        // no root and degree <= 3
        return Ok(None);
    }

    let mut attainable: Option<BTreeSet<usize>> = None;
    let mut best: Option<(u64, Vec<PolyFp>)> = None;
    let mut good_primes = 0;
    for p in primes_up_to(2000) {
        let fp = PolyFp::reduce_bigints(p, f);
        if fp.deg() != m || !fp.gcd_unchecked(&fp.derivative()).is_one() {
            continue;
        }
        let fac = factor_fp(&fp)?;
        if fac.is_irreducible() {
            return Ok(None);
        }
        let degrees: Vec<usize> = fac.factors.iter().map(|(g, _)| g.deg()).collect();
        let sums = subset_sums(&degrees, m);
        attainable = Some(match attainable {
            None => sums,
            Some(a) => a.intersection(&sums).copied().collect(),
        });
        if attainable.as_ref().is_some_and(|a| a.is_empty()) {
            return Ok(None);
        }
        let factors: Vec<PolyFp> = fac.factors.into_iter().map(|(g, _)| g).collect();
        if best.as_ref().is_none_or(|(_, b)| factors.len() < b.len()) {
            best = Some((p, factors));
        }
        good_primes += 1;
        if good_primes >= 16 {
            break;
        }
    }
    let (p, factors) =
        best.ok_or_else(|| Error::internal("no prime of good reduction below 2000"))?;
    let allowed = attainable.unwrap_or_default();
    zassenhaus(f, p, factors, &allowed)
}

/// Proper nonzero subset sums of `degrees`, restricted to `1..=total/2`.
fn subset_sums(degrees: &[usize], total: usize) -> BTreeSet<usize> {
    let mut reach = vec![false; total + 1];
    reach[0] = true;
    for &d in degrees {
        for s in (d..=total).rev() {
            if reach[s - d] {
                reach[s] = true;
            }
        }
    }
    (1..=total / 2).filter(|&s| reach[s]).collect()
}

fn rational_root(f: &[BigInt]) -> Option<BigInt> {
    if f[0].is_zero() {
        return Some(BigInt::zero());
    }
    let a0 = f[0].abs().to_u64()?;
    if a0 > 1_000_000_000_000 {
        return None;
    }
    let fq = QPoly::from_ints(f);
    let mut divisors = Vec::new();
    let mut d = 1u64;
    while d * d <= a0 {
        if a0 % d == 0 {
            divisors.push(d);
            if d * d != a0 {
                divisors.push(a0 / d);
            }
        }
        d += 1;
    }
    divisors.sort_unstable();
    for d in divisors {
        for cand in [BigInt::from(d), -BigInt::from(d)] {
            if fq
                .eval(&num_rational::BigRational::from_integer(cand.clone()))
                .is_zero()
            {
                return Some(cand);
            }
        }
    }
    None
}

// Integer polynomial helpers, coefficients lowest degree first.

fn zmul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    c
}

fn zmod(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let mut v: Vec<BigInt> = a.iter().map(|c| c.mod_floor(m)).collect();
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn zsymmetric(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let half = m >> 1;
    a.iter()
        .map(|c| {
            let r = c.mod_floor(m);
            if r > half {
                r - m
            } else {
                r
            }
        })
        .collect()
}

fn lift_fp(g: &PolyFp) -> Vec<BigInt> {
    g.coeffs().iter().map(|&c| BigInt::from(c)).collect()
}

fn to_fp(a: &[BigInt], p: u64) -> PolyFp {
    PolyFp::reduce_bigints(p, a)
}

/// Lifts `target ≡ g * h (mod p)` with monic `g`, `h` to a factorization
/// modulo `p^e`. `target` must be monic.
fn hensel_two(
    target: &[BigInt],
    g: &PolyFp,
    h: &PolyFp,
    p: u64,
    e: u32,
) -> (Vec<BigInt>, Vec<BigInt>) {
    let (_, _, t) = g.xgcd(h).expect("same modulus");
    let pb = BigInt::from(p);
    let mut gz = lift_fp(g);
    let mut hz = lift_fp(h);
    let mut pj = pb.clone();
    for _ in 1..e {
        let next = &pj * &pb;
        let prod = zmul(&gz, &hz);
        let n = target.len().max(prod.len());
        let err: Vec<BigInt> = (0..n)
            .map(|i| {
                let a = target.get(i).cloned().unwrap_or_default();
                let b = prod.get(i).cloned().unwrap_or_default();
                (a - b).mod_floor(&next) / &pj
            })
            .collect();
        let ebar = to_fp(&err, p);
        let a = (&t * &ebar).rem(g);
        let b = (&ebar - &(&a * h)).exact_div(g);
        for (i, c) in a.coeffs().iter().enumerate() {
            gz[i] += &pj * BigInt::from(*c);
        }
        for (i, c) in b.coeffs().iter().enumerate() {
            hz[i] += &pj * BigInt::from(*c);
        }
        pj = next;
    }
    (zmod(&gz, &pj), zmod(&hz, &pj))
}

/// Multifactor Hensel lifting by recursive halving.
fn hensel_multi(target: &[BigInt], factors: &[PolyFp], p: u64, e: u32) -> Vec<Vec<BigInt>> {
    if factors.len() == 1 {
        let m = BigInt::from(p).pow(e);
        return vec![zmod(target, &m)];
    }
    let mid = factors.len() / 2;
    let prod = |fs: &[PolyFp]| fs.iter().fold(PolyFp::one(p), |acc, g| &acc * g);
    let (g, h) = (prod(&factors[..mid]), prod(&factors[mid..]));
    let (gz, hz) = hensel_two(target, &g, &h, p, e);
    let mut out = hensel_multi(&gz, &factors[..mid], p, e);
    out.extend(hensel_multi(&hz, &factors[mid..], p, e));
    out
}

fn exact_divides(g: &[BigInt], f: &[BigInt]) -> bool {
    if !g.is_empty() && !g[0].is_zero() && !(&f[0] % &g[0]).is_zero() {
        return false;
    }
    let (_, r) = QPoly::from_ints(f)
        .div_rem(&QPoly::from_ints(g))
        .expect("nonzero");
    r.is_zero()
}

fn zassenhaus(
    f: &[BigInt],
    p: u64,
    factors: Vec<PolyFp>,
    allowed_degrees: &BTreeSet<usize>,
) -> Result<Option<Vec<BigInt>>> {
    let m = f.len() - 1;
    let r = factors.len();
    if r > MAX_RECOMBINATION_FACTORS {
        return Err(Error::domain(format!(
            "irreducibility test needs {r} modular factors; recombination is capped at {MAX_RECOMBINATION_FACTORS}"
        )));
    }
    // Mignotte: a factor of degree k has coefficients at most C(k, j) * |f|_2 <= 2^m |f|_2.
    let norm2: BigInt = f.iter().map(|c| c * c).sum::<BigInt>().sqrt() + 1;
    let bound = (norm2 << m) * 2;
    let pb = BigInt::from(p);
    let mut e = 1u32;
    let mut modulus = pb.clone();
    while modulus <= bound {
        modulus *= &pb;
        e += 1;
    }
    let lifted = hensel_multi(f, &factors, p, e);
    let degs: Vec<usize> = lifted.iter().map(|g| g.len() - 1).collect();

    // Any factorization f = g*h splits the lifted factors into two sets, one
    // of which has at most r/2 elements.
    for size in 1..=r / 2 {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let d: usize = idx.iter().map(|&i| degs[i]).sum();
            if allowed_degrees.is_empty()
                || allowed_degrees.contains(&d)
                || allowed_degrees.contains(&(m - d))
            {
                let prod = idx.iter().fold(vec![BigInt::one()], |acc, &i| {
                    zmod(&zmul(&acc, &lifted[i]), &modulus)
                });
                let cand = zsymmetric(&prod, &modulus);
                if exact_divides(&cand, f) {
                    if 2 * d <= m {
                        return Ok(Some(cand));
                    }
                    let (q, _) = QPoly::from_ints(f).div_rem(&QPoly::from_ints(&cand))?;
                    let q = q
                        .to_integer_coeffs()
                        .ok_or_else(|| Error::internal("cofactor of a monic factor is integral"))?;
                    return Ok(Some(q));
                }
            }
            if !next_combination(&mut idx, r) {
                break;
            }
        }
    }
    Ok(None)
}

/// Advances `idx` to the next `idx.len()`-subset of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let size = idx.len();
    for k in (0..size).rev() {
        if idx[k] < n - size + k {
            idx[k] += 1;
            for j in k + 1..size {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(c: &[i64]) -> Vec<BigInt> {
        c.iter().map(|&v| BigInt::from(v)).collect()
    }

    fn zpoly_mul(a: &[i64], b: &[i64]) -> Vec<BigInt> {
        zmul(&z(a), &z(b))
    }

    #[test]
    fn irreducible_examples() {
        assert_eq!(find_factor(&z(&[1, -2, -1, 1])).unwrap(), None);
        assert_eq!(find_factor(&z(&[-2, 0, 1])).unwrap(), None);
        assert_eq!(find_factor(&z(&[0, 1])).unwrap(), None);
        // x^4 + 1 is reducible modulo every prime but irreducible over Q
        assert_eq!(find_factor(&z(&[1, 0, 0, 0, 1])).unwrap(), None);
        // x^8 - 40x^6 + 352x^4 - 960x^2 + 576, minimal polynomial of sqrt2+sqrt3+sqrt5
        assert_eq!(
            find_factor(&z(&[576, 0, -960, 0, 352, 0, -40, 0, 1])).unwrap(),
            None
        );
    }

    #[test]
    fn reducible_with_witness() {
        assert_eq!(find_factor(&z(&[-1, 0, 1])).unwrap(), Some(z(&[-1, 1])));
        // (x^2 + 1)(x^2 + x + 3): no rational roots
        let f = zpoly_mul(&[1, 0, 1], &[3, 1, 1]);
        let w = find_factor(&f).unwrap().unwrap();
        assert!(exact_divides(&w, &f));
        assert_eq!(w.len(), 3);
        // (x^4 + 1)(x^4 + 2): both factors irreducible, split mod every prime
        let f = zpoly_mul(&[1, 0, 0, 0, 1], &[2, 0, 0, 0, 1]);
        let w = find_factor(&f).unwrap().unwrap();
        assert!(exact_divides(&w, &f) && w.len() == 5);
        // square factor
        let f = zpoly_mul(&[1, 1, 1], &[1, 1, 1]);
        assert_eq!(find_factor(&f).unwrap(), Some(z(&[1, 1, 1])));
    }

    #[test]
    fn hensel_lifting_is_consistent() {
        let f = zpoly_mul(&[1, 0, 1], &[3, 1, 1]);
        let p = 7;
        let fp = PolyFp::reduce_bigints(p, &f);
        let fac: Vec<PolyFp> = factor_fp(&fp)
            .unwrap()
            .factors
            .into_iter()
            .map(|(g, _)| g)
            .collect();
        let lifted = hensel_multi(&f, &fac, p, 6);
        let m = BigInt::from(7).pow(6u32);
        let prod = lifted
            .iter()
            .fold(vec![BigInt::one()], |acc, g| zmod(&zmul(&acc, g), &m));
        assert_eq!(prod, zmod(&f, &m));
    }

    #[test]
    fn cyclotomic_polynomials_are_irreducible() {
        // Phi_15 and Phi_21 split into many factors mod small primes
        let phi15 = z(&[1, -1, 0, 1, -1, 1, 0, -1, 1]);
        assert_eq!(find_factor(&phi15).unwrap(), None);
        let phi21 = z(&[1, -1, 0, 1, -1, 0, 1, 0, -1, 0, 1, -1, 0, 1]);
        assert_eq!(find_factor(&phi21).unwrap(), None);
    }
}
