//! Integer and modular arithmetic: fast modular exponentiation, primality
//! testing and Wieferich-type scanning.
//!
//! Public entry points take arbitrary precision integers. Internally the
//! common case (moduli below 2^64) runs on machine words with `u128`
//! intermediate products.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Miller-Rabin witnesses that make the test deterministic for every
/// `n < 3.3 * 10^24`, in particular for all 64-bit inputs.
pub const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Extra random rounds used above 2^64. A composite survives one random
/// round with probability at most 1/4, so the error bound is 4^-EXTRA_ROUNDS.
pub const EXTRA_ROUNDS: usize = 24;

#[inline]
pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod modulus` on machine words. Requires `modulus >= 1`.
pub fn mod_pow_u64(base: u64, mut exp: u64, modulus: u64) -> u64 {
    debug_assert!(modulus >= 1);
    if modulus == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod_u64(result, b, modulus);
        }
        b = mul_mod_u64(b, b, modulus);
        exp >>= 1;
    }
    result
}

/// `base^exponent mod modulus` by square-and-multiply.
pub fn mod_pow(base: &BigUint, exponent: &BigUint, modulus: &BigUint) -> Result<BigUint> {
    if *modulus < BigUint::from(2u32) {
        return Err(Error::domain(format!(
            "modulus must be >= 2, got {modulus}"
        )));
    }
    if let (Some(b), Some(e), Some(m)) = (base.to_u64(), exponent.to_u64(), modulus.to_u64()) {
        return Ok(BigUint::from(mod_pow_u64(b, e, m)));
    }
    Ok(base.modpow(exponent, modulus))
}

fn miller_rabin_round_u64(n: u64, d: u64, s: u32, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let mut x = mod_pow_u64(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod_u64(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality test for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_WITNESSES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    MR_WITNESSES
        .iter()
        .all(|&a| miller_rabin_round_u64(n, d, s, a))
}

fn miller_rabin_round_big(n: &BigUint, d: &BigUint, s: u64, a: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let mut x = a.modpow(d, n);
    if x == one || x == n_minus_one {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_one {
            return true;
        }
    }
    false
}

/// Primality test. Deterministic below 2^64; above that the fixed witnesses
/// are followed by [`EXTRA_ROUNDS`] rounds with bases drawn from a generator
/// seeded by `n` itself, so the answer is reproducible and a composite is
/// accepted with probability at most 4^-24.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &MR_WITNESSES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    if !MR_WITNESSES
        .iter()
        .all(|&a| miller_rabin_round_big(n, &d, s, &BigUint::from(a)))
    {
        return false;
    }
    let seed = n.iter_u64_digits().fold(0x9e37_79b9_7f4a_7c15u64, |h, w| {
        h.rotate_left(17) ^ w.wrapping_mul(0xff51_afd7_ed55_8ccd)
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = &n_minus_one - &one;
    (0..EXTRA_ROUNDS).all(|_| {
        let digits: Vec<u32> = (0..n.to_u32_digits().len()).map(|_| rng.gen()).collect();
        let a = BigUint::from_slice(&digits) % &bound + BigUint::from(2u32);
        miller_rabin_round_big(n, &d, s, &a)
    })
}

/// Outcome of testing `base^(l-1) mod l^2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WieferichReport {
    #[serde(with = "crate::serde_big")]
    pub base: BigUint,
    #[serde(with = "crate::serde_big")]
    pub prime: BigUint,
    /// `base^(prime-1) mod prime^2`.
    #[serde(with = "crate::serde_big")]
    pub residue: BigUint,
    pub is_wieferich_pair: bool,
}

fn wieferich_small(base: u64, l: u64) -> WieferichReport {
    let residue = if l < (1 << 32) {
        mod_pow_u64(base, l - 1, l * l) as u128
    } else {
        let m = BigUint::from(l) * BigUint::from(l);
        BigUint::from(base)
            .modpow(&BigUint::from(l - 1), &m)
            .to_u128()
            .expect("residue below l^2 < 2^128")
    };
    WieferichReport {
        base: BigUint::from(base),
        prime: BigUint::from(l),
        residue: BigUint::from(residue),
        is_wieferich_pair: residue == 1,
    }
}

/// Tests whether `(base, l)` is a Wieferich pair, i.e. `base^(l-1) ≡ 1 mod l^2`.
pub fn wieferich_test(base: &BigUint, l: &BigUint) -> Result<WieferichReport> {
    if *base < BigUint::from(2u32) {
        return Err(Error::domain("base must be >= 2"));
    }
    if !is_prime(l) || l.is_even() {
        return Err(Error::domain(format!("{l} is not an odd prime")));
    }
    if (base % l).is_zero() {
        return Err(Error::domain(format!("{l} divides the base {base}")));
    }
    if let (Some(b), Some(p)) = (base.to_u64(), l.to_u64()) {
        return Ok(wieferich_small(b, p));
    }
    let m = l * l;
    let residue = base.modpow(&(l - 1u32), &m);
    let is_pair = residue.is_one();
    Ok(WieferichReport {
        base: base.clone(),
        prime: l.clone(),
        residue,
        is_wieferich_pair: is_pair,
    })
}

/// Convenience wrapper over [`wieferich_test`] for machine-word inputs.
pub fn wieferich_test_u64(base: u64, l: u64) -> Result<WieferichReport> {
    wieferich_test(&BigUint::from(base), &BigUint::from(l))
}

const SCAN_CHUNK: u64 = 1 << 16;

/// Primes in `[lo, hi]` via a segmented sieve over `base_primes`
/// (which must contain every prime up to `sqrt(hi)`).
fn sieve_segment(lo: u64, hi: u64, base_primes: &[u64]) -> Vec<u64> {
    let len = (hi - lo + 1) as usize;
    let mut composite = vec![false; len];
    for &p in base_primes {
        let pp = p * p;
        if pp > hi {
            break;
        }
        let start = if pp >= lo { pp } else { lo.div_ceil(p) * p };
        let mut k = start;
        while k <= hi {
            composite[(k - lo) as usize] = true;
            k += p;
        }
    }
    (lo..=hi)
        .zip(composite)
        .filter(|&(n, c)| !c && n >= 2)
        .map(|(n, _)| n)
        .collect()
}

fn small_primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    sieve_segment(2, n, &small_primes_up_to_naive(integer_sqrt(n)))
}

fn small_primes_up_to_naive(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| is_prime_u64(k)).collect()
}

pub(crate) fn integer_sqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// All odd primes `l` in `[l_min, l_max]` for which `(base, l)` is a
/// Wieferich pair, in increasing order. Primes dividing `base` are skipped.
pub fn wieferich_scan(base: u64, l_min: u64, l_max: u64) -> Vec<WieferichReport> {
    wieferich_scan_chunked(base, l_min, l_max, SCAN_CHUNK)
}

/// Same as [`wieferich_scan`] with an explicit partition size. The result
/// does not depend on `chunk`.
pub fn wieferich_scan_chunked(
    base: u64,
    l_min: u64,
    l_max: u64,
    chunk: u64,
) -> Vec<WieferichReport> {
    let lo = l_min.max(3);
    if lo > l_max || base < 2 {
        return Vec::new();
    }
    let chunk = chunk.max(1);
    let base_primes = small_primes_up_to(integer_sqrt(l_max) + 1);
    let n_chunks = (l_max - lo) / chunk + 1;
    (0..n_chunks)
        .into_par_iter()
        .flat_map_iter(|i| {
            let a = lo + i * chunk;
            let b = a.saturating_add(chunk - 1).min(l_max);
            sieve_segment(a, b, &base_primes)
                .into_iter()
                .filter(|&l| l % 2 == 1 && !base.is_multiple_of(l))
                .map(move |l| wieferich_small(base, l))
                .filter(|r| r.is_wieferich_pair)
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Primes in `[2, n]`, in order.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    small_primes_up_to(n)
}

/// `p`-adic valuation of a nonzero integer.
pub fn vp_u64(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0 && p >= 2);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn mod_pow_examples() {
        assert_eq!(mod_pow(&big(2), &big(4), &big(25)).unwrap(), big(16));
        assert_eq!(mod_pow(&big(2), &big(0), &big(7)).unwrap(), big(1));
        assert_eq!(
            mod_pow(&big(2), &big(1092), &big(1093 * 1093)).unwrap(),
            big(1)
        );
    }

    #[test]
    fn mod_pow_rejects_small_modulus() {
        assert!(matches!(
            mod_pow(&big(2), &big(3), &big(1)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            mod_pow(&big(2), &big(3), &big(0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn mod_pow_agrees_with_naive_products() {
        for m in 2u64..=100 {
            for b in 0u64..=12 {
                let mut naive = 1 % m;
                for e in 0u64..=12 {
                    assert_eq!(mod_pow(&big(b), &big(e), &big(m)).unwrap(), big(naive));
                    naive = naive * b % m;
                }
            }
        }
    }

    #[test]
    fn mod_pow_big_modulus() {
        let m: BigUint = (BigUint::one() << 100u32) + 277u32;
        let r = mod_pow(&big(3), &big(1000), &m).unwrap();
        let mut naive = BigUint::one();
        for _ in 0..1000 {
            naive = naive * 3u32 % &m;
        }
        assert_eq!(r, naive);
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(&big(1093)));
        assert!(!is_prime(&big(1)));
        assert!(!is_prime(&big(0)));
        assert!(is_prime(&big(3511)));
        assert!(is_prime(&big(2)));
        // strong pseudoprime to bases 2..=11
        assert!(!is_prime_u64(3_215_031_751));
        assert!(is_prime_u64(18_446_744_073_709_551_557));
        assert!(!is_prime_u64(18_446_744_073_709_551_559));
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0u64..5000 {
            let trial = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_prime_u64(n), trial, "n = {n}");
        }
    }

    #[test]
    fn primality_above_64_bits() {
        // 2^89 - 1 is a Mersenne prime, 2^67 - 1 is not.
        let m89 = (BigUint::one() << 89u32) - 1u32;
        let m67 = (BigUint::one() << 67u32) - 1u32;
        assert!(is_prime(&m89));
        assert!(!is_prime(&m67));
    }

    #[test]
    fn wieferich_examples() {
        let r = wieferich_test_u64(2, 5).unwrap();
        assert_eq!(r.residue, big(16));
        assert!(!r.is_wieferich_pair);
        let r = wieferich_test_u64(2, 1093).unwrap();
        assert_eq!(r.residue, big(1));
        assert!(r.is_wieferich_pair);
        let r = wieferich_test_u64(3, 11).unwrap();
        assert_eq!(r.residue, big(1));
        assert!(r.is_wieferich_pair);
    }

    #[test]
    fn wieferich_errors() {
        assert!(wieferich_test_u64(2, 9).is_err());
        assert!(wieferich_test_u64(2, 2).is_err());
        assert!(wieferich_test_u64(10, 5).is_err());
        assert!(wieferich_test_u64(1, 5).is_err());
    }

    #[test]
    fn scan_partition_independent() {
        let reference: Vec<_> = wieferich_scan(2, 3, 20_000)
            .into_iter()
            .map(|r| r.prime)
            .collect();
        for chunk in [1, 7, 100, 1024, 1 << 20] {
            let got: Vec<_> = wieferich_scan_chunked(2, 3, 20_000, chunk)
                .into_iter()
                .map(|r| r.prime)
                .collect();
            assert_eq!(got, reference, "chunk {chunk}");
        }
    }

    #[test]
    fn scan_examples() {
        let primes = |b, lo, hi| -> Vec<u64> {
            wieferich_scan(b, lo, hi)
                .iter()
                .map(|r| r.prime.to_u64().unwrap())
                .collect()
        };
        assert_eq!(primes(2, 3, 100_000), vec![1093, 3511]);
        assert!(primes(2, 3, 1000).is_empty());
        assert_eq!(primes(3, 3, 100), vec![11]);
        assert!(primes(2, 10, 5).is_empty());
    }

    #[test]
    fn sieve_matches_primality() {
        let sieved = primes_up_to(10_000);
        let direct: Vec<u64> = (0..=10_000).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(sieved, direct);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn fermat_consistency(b in 2u64..10_000, idx in 1usize..1200) {
                let primes = primes_up_to(10_000);
                let l = primes[idx % primes.len()];
                prop_assume!(l % 2 == 1 && b % l != 0);
                let r = mod_pow_u64(b, l - 1, l * l);
                prop_assert_eq!(r % l, 1);
            }

            #[test]
            fn scan_agrees_with_pointwise(b in 2u64..50, lo in 3u64..3000, span in 0u64..3000) {
                let hi = lo + span;
                let scanned: Vec<u64> = wieferich_scan(b, lo, hi)
                    .iter().map(|r| r.prime.to_u64().unwrap()).collect();
                let pointwise: Vec<u64> = (lo..=hi)
                    .filter(|&l| l % 2 == 1 && is_prime_u64(l) && b % l != 0)
                    .filter(|&l| wieferich_test_u64(b, l).unwrap().is_wieferich_pair)
                    .collect();
                prop_assert_eq!(scanned, pointwise);
            }
        }
    }
}
