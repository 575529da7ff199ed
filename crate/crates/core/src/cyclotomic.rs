//! The degree `l^n` subfield `Q_{n,l}` of `Q(zeta_{l^(n+1)})`, built from
//! Gaussian periods, and composita `K * Q_{n,l}`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{gcd_u64, is_prime_u64, mod_pow_u64};
use crate::error::{Error, Result};
use crate::fieldspec::FieldSpec;
use crate::numberfield::{make_field, NumberField};
use crate::polyq::{interpolate, resultant, QPoly, Rational};

pub const DEFAULT_DEGREE_CAP: usize = 25;

/// Primitive-element shifts tried, in order, by [`build_compositum`].
pub const SHIFT_SCHEDULE: [i64; 5] = [1, 2, 3, -1, -2];

/// A constructed layer `Q_{n,l}`.
#[derive(Debug, Clone)]
pub struct LayerSpec {
    pub l: u64,
    pub n: u32,
    /// Conductor `l^(n+1)`.
    pub conductor: u64,
    /// Minimal polynomial of the period, constant term first.
    pub minpoly: Vec<BigInt>,
    /// The order-`(l-1)` subgroup `H` of `(Z/l^(n+1))^*`, sorted.
    pub subgroup: Vec<u64>,
    /// Coset representatives `r_j = 1 + l*j`; the roots are `eta_j = sum_{h in H} zeta^(h r_j)`.
    pub coset_reps: Vec<u64>,
    pub disc: BigInt,
    /// `disc(minpoly) = ±l^k`.
    pub disc_is_l_power: bool,
    /// Primes at which the Dedekind test fails for the period basis.
    pub index_caveats: Vec<u64>,
    /// Primes other than `l` dividing `[O : Z[alpha]]` for every generator
    /// `alpha`; when nonempty no discriminant `±l^k` is possible.
    pub common_index_divisors: Vec<u64>,
    pub field: Arc<NumberField>,
}

impl LayerSpec {
    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    /// Field-spec text with the period data as metadata.
    pub fn to_field_spec(&self) -> FieldSpec {
        let join = |v: &[u64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        FieldSpec::new(self.minpoly.clone())
            .with_meta("kind", "cyclotomic_layer")
            .with_meta("l", self.l)
            .with_meta("n", self.n)
            .with_meta("conductor", self.conductor)
            .with_meta("subgroup", join(&self.subgroup))
            .with_meta(
                "cosets",
                format!("1 + {}*j for j in 0..{}", self.l, self.coset_reps.len()),
            )
            .with_meta("disc", &self.disc)
    }

    pub fn report(&self) -> LayerReport {
        LayerReport {
            l: self.l,
            n: self.n,
            degree: self.degree(),
            conductor: self.conductor,
            minpoly: self.minpoly.clone(),
            poly: self.field.poly_string(),
            subgroup: self.subgroup.clone(),
            disc: self.disc.clone(),
            disc_is_l_power: self.disc_is_l_power,
            index_caveats: self.index_caveats.clone(),
            common_index_divisors: self.common_index_divisors.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerReport {
    pub l: u64,
    pub n: u32,
    pub degree: usize,
    pub conductor: u64,
    #[serde(with = "crate::serde_big::vec")]
    pub minpoly: Vec<BigInt>,
    pub poly: String,
    pub subgroup: Vec<u64>,
    #[serde(with = "crate::serde_big")]
    pub disc: BigInt,
    pub disc_is_l_power: bool,
    pub index_caveats: Vec<u64>,
    pub common_index_divisors: Vec<u64>,
}

/// Exponent vectors of `Z[x]/(x^N - 1)`.
type Cyc = Vec<BigInt>;

/// Reduces modulo `Phi_N(x) = sum_{i<l} x^(i l^n)` and returns the value when
/// the class is a rational integer.
fn cyc_to_integer(mut a: Cyc, l: usize, block: usize) -> Option<BigInt> {
    for r in 0..block {
        let top = std::mem::take(&mut a[(l - 1) * block + r]);
        if !top.is_zero() {
            for i in 0..l - 1 {
                a[i * block + r] -= &top;
            }
        }
    }
    a[1..].iter().all(|c| c.is_zero()).then(|| a.swap_remove(0))
}

fn strip_l(d: &BigInt, l: u64) -> BigInt {
    let lb = BigInt::from(l);
    let mut d = d.abs();
    while !d.is_zero() && (&d % &lb).is_zero() {
        d /= &lb;
    }
    d
}

fn prime_factors_bounded(n: &BigInt, bound: u64) -> Vec<u64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = 2u64;
    while p <= bound && n > BigInt::one() {
        let pb = BigInt::from(p);
        if (&n % &pb).is_zero() {
            out.push(p);
            while (&n % &pb).is_zero() {
                n /= &pb;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    out
}

struct Periods {
    l: u64,
    degree: usize,
    conductor: u64,
    subgroup: Vec<u64>,
    coset_reps: Vec<u64>,
}

impl Periods {
    fn new(l: u64, degree: usize) -> Result<Self> {
        let conductor = degree as u64 * l;
        // H: Teichmuller lifts a^(l^n) of 1..l-1
        let mut subgroup: Vec<u64> = (1..l)
            .map(|a| mod_pow_u64(a, degree as u64, conductor))
            .collect();
        subgroup.sort_unstable();
        subgroup.dedup();
        if subgroup.len() != (l - 1) as usize {
            return Err(Error::internal("period subgroup has the wrong order"));
        }
        let coset_reps = (0..degree as u64).map(|j| 1 + l * j).collect();
        Ok(Periods {
            l,
            degree,
            conductor,
            subgroup,
            coset_reps,
        })
    }

    /// Characteristic polynomial of `sum_j c_j eta_j`, as the exact product
    /// of `X - sigma(alpha)` over the Galois group `{zeta -> zeta^r_k}`.
    fn char_poly(&self, c: &[i64]) -> Result<Vec<BigInt>> {
        let nn = self.conductor as usize;
        let base: Vec<(u64, i64)> = c
            .iter()
            .zip(&self.coset_reps)
            .filter(|(cj, _)| **cj != 0)
            .flat_map(|(&cj, &r)| {
                self.subgroup
                    .iter()
                    .map(move |&h| (h * r % self.conductor, cj))
            })
            .collect();
        let mut poly: Vec<Cyc> = vec![{
            let mut one = vec![BigInt::zero(); nn];
            one[0] = BigInt::one();
            one
        }];
        for &k in &self.coset_reps {
            let terms: Vec<(usize, BigInt)> = base
                .iter()
                .map(|&(e, cj)| ((e * k % self.conductor) as usize, BigInt::from(cj)))
                .collect();
            let mut next: Vec<Cyc> = vec![vec![BigInt::zero(); nn]; poly.len() + 1];
            for (i, coeff) in poly.iter().enumerate() {
                for (slot, v) in next[i + 1].iter_mut().zip(coeff) {
                    *slot += v;
                }
                for (idx, v) in coeff.iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    for (e, cj) in &terms {
                        next[i][(idx + e) % nn] -= v * cj;
                    }
                }
            }
            poly = next;
        }
        poly.into_iter()
            .map(|cf| cyc_to_integer(cf, self.l as usize, self.degree))
            .collect::<Option<Vec<BigInt>>>()
            .ok_or_else(|| Error::internal("period polynomial has a non-rational coefficient"))
    }

    /// Primes `p != l` dividing the index of every generator of the layer:
    /// those with more primes above them than there are monic irreducibles
    /// of the residue degree over `F_p`.
    fn common_index_divisors(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for p in crate::arith::primes_up_to(self.degree as u64) {
            if p == self.l {
                continue;
            }
            // residue degree: order of p in (Z/N)^* / H
            let mut f = 1usize;
            let mut pf = p % self.conductor;
            while mod_pow_u64(pf, self.l - 1, self.conductor) != 1 {
                pf = pf * p % self.conductor;
                f += 1;
            }
            let g = self.degree / f;
            if BigInt::from(g) > monic_irreducible_count(p, f) {
                out.push(p);
            }
        }
        out
    }
}

/// Number of monic irreducible polynomials of degree `f` over `F_p`.
fn monic_irreducible_count(p: u64, f: usize) -> BigInt {
    let mut total = BigInt::zero();
    for d in 1..=f {
        if f.is_multiple_of(d) {
            let mu = mobius(d);
            if mu != 0 {
                total += BigInt::from(mu) * num_traits::pow(BigInt::from(p), f / d);
            }
        }
    }
    total / BigInt::from(f)
}

fn mobius(mut n: usize) -> i32 {
    let mut mu = 1;
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            n /= q;
            if n.is_multiple_of(q) {
                return 0;
            }
            mu = -mu;
        }
        q += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// Builds `Q_{n,l}` as `Q(eta)` for the Gaussian period
/// `eta = sum_{h in H} zeta^h` of conductor `l^(n+1)`.
///
/// `Z[eta]` need not be maximal away from `l` (for `l = 5` its index is 7);
/// primes dividing the index are reported in `index_caveats`.
pub fn build_layer(l: u64, n: u32, degree_cap: usize) -> Result<LayerSpec> {
    if l < 3 || !is_prime_u64(l) {
        return Err(Error::domain(format!("l = {l} must be an odd prime")));
    }
    if n == 0 {
        return Err(Error::domain("layer index n must be positive"));
    }
    let degree = l
        .checked_pow(n)
        .filter(|&d| d <= degree_cap as u64)
        .ok_or(Error::DegreeCap {
            degree: usize::try_from(l.saturating_pow(n)).unwrap_or(usize::MAX),
            cap: degree_cap,
        })? as usize;
    let periods = Periods::new(l, degree)?;
    let common = periods.common_index_divisors();

    let period: Vec<i64> = std::iter::once(1)
        .chain(std::iter::repeat_n(0, degree - 1))
        .collect();
    let minpoly = periods.char_poly(&period)?;

    let field = make_field(&minpoly)?;
    let disc = field.discriminant().clone();
    let rest = strip_l(&disc, l);
    let disc_is_l_power = rest.is_one();
    let mut index_caveats = Vec::new();
    if !field.power_basis_ok(l) {
        index_caveats.push(l);
    }
    if !disc_is_l_power {
        index_caveats.extend(
            prime_factors_bounded(&rest, 100_000)
                .into_iter()
                .filter(|&p| !field.power_basis_ok(p)),
        );
    }
    Ok(LayerSpec {
        l,
        n,
        conductor: periods.conductor,
        minpoly,
        subgroup: periods.subgroup,
        coset_reps: periods.coset_reps,
        disc,
        disc_is_l_power,
        index_caveats,
        common_index_divisors: common,
        field,
    })
}

/// `K * Q_{n,l}` with primitive element `theta + c * eta`.
#[derive(Debug, Clone)]
pub struct Compositum {
    pub field: Arc<NumberField>,
    /// The shift `c` that made the characteristic polynomial squarefree.
    pub shift: i64,
    /// Shifts tried before `shift` that failed the squarefree test.
    pub rejected_shifts: Vec<i64>,
}

/// `c^k g(x/c)`: the polynomial whose roots are `c` times those of `g`.
fn scale_roots(g: &[BigInt], c: i64) -> Vec<BigInt> {
    let k = g.len() - 1;
    let c = BigInt::from(c);
    g.iter()
        .enumerate()
        .map(|(i, gi)| gi * num_traits::pow(c.clone(), k - i))
        .collect()
}

/// `h(x0 - y)` as a polynomial in `y`.
fn reflect_at(h: &[BigInt], x0: i64) -> QPoly {
    let lin = QPoly::new(vec![
        Rational::from_integer(BigInt::from(x0)),
        -Rational::one(),
    ]);
    let mut acc = QPoly::zero();
    for c in h.iter().rev() {
        acc = &(&acc * &lin) + &QPoly::constant(Rational::from_integer(c.clone()));
    }
    acc
}

/// Characteristic polynomial of `theta + eta`, where `f`, `g` are the monic
/// minimal polynomials of `theta`, `eta`: `Res_y(f(y), g(x - y))`, computed by
/// evaluation at `x = 0..=deg f * deg g` and interpolation.
pub fn sum_char_poly(f: &[BigInt], g: &[BigInt]) -> QPoly {
    let fy = QPoly::from_ints(f);
    let total = (f.len() - 1) * (g.len() - 1);
    let xs: Vec<Rational> = (0..=total as i64)
        .map(|x| Rational::from_integer(x.into()))
        .collect();
    let ys: Vec<Rational> = (0..=total as i64)
        .map(|x| resultant(&fy, &reflect_at(g, x)))
        .collect();
    interpolate(&xs, &ys)
}

/// The compositum `K * Q_{n,l}`; requires `gcd([K:Q], l) = 1`, so the degree
/// is `[K:Q] l^n`.
pub fn build_compositum(
    k: &Arc<NumberField>,
    layer: &LayerSpec,
    degree_cap: usize,
) -> Result<Compositum> {
    let m = k.degree();
    if gcd_u64(m as u64, layer.l) != 1 {
        return Err(Error::precondition(format!(
            "l = {} divides [K:Q] = {m}",
            layer.l
        )));
    }
    let total = m * layer.degree();
    if total > degree_cap {
        return Err(Error::DegreeCap {
            degree: total,
            cap: degree_cap,
        });
    }
    if k.is_rationals() {
        return Ok(Compositum {
            field: layer.field.clone(),
            shift: 1,
            rejected_shifts: Vec::new(),
        });
    }
    let mut rejected = Vec::new();
    for &c in &SHIFT_SCHEDULE {
        let h = sum_char_poly(k.poly(), &scale_roots(&layer.minpoly, c));
        if h.deg() != total {
            return Err(Error::internal(
                "characteristic polynomial has the wrong degree",
            ));
        }
        if h.is_squarefree() {
            // deg h = [K * Q_{n,l} : Q] and theta + c eta has distinct
            // conjugates, so h is its minimal polynomial
            let coeffs = h.to_integer_coeffs().ok_or_else(|| {
                Error::internal("characteristic polynomial of an algebraic integer is not integral")
            })?;
            return Ok(Compositum {
                field: Arc::new(NumberField::from_irreducible(coeffs)),
                shift: c,
                rejected_shifts: rejected,
            });
        }
        rejected.push(c);
    }
    Err(Error::precondition(format!(
        "no shift in {SHIFT_SCHEDULE:?} gives a squarefree characteristic polynomial"
    )))
}

/// Whether the prime `d` is inert in every layer `Q_{n,l}`, i.e.
/// `d^(l-1) != 1 mod l^2`.
pub fn inert_in_layer(d: u64, l: u64) -> Result<bool> {
    if !is_prime_u64(d) || l < 3 || !is_prime_u64(l) {
        return Err(Error::domain("d must be prime and l an odd prime"));
    }
    if d == l {
        return Err(Error::domain("d must differ from l"));
    }
    let l2 = l as u128 * l as u128;
    let r = if l2 <= u64::MAX as u128 {
        mod_pow_u64(d % (l2 as u64), l - 1, l2 as u64) as u128
    } else {
        let lb = num_bigint::BigUint::from(l);
        let m = &lb * &lb;
        let r = num_bigint::BigUint::from(d).modpow(&(lb - 1u32), &m);
        u128::try_from(r).expect("residue below l^2")
    };
    Ok(r != 1)
}
