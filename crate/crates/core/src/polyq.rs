//! Univariate polynomials with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Polynomial over Q, coefficients lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QPoly {
    coeffs: Vec<Rational>,
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_poly(&self.coeffs, "x"))
    }
}

/// Human readable rendering, highest degree first.
pub fn format_poly<T: fmt::Display + Zero + One + PartialEq + Signed + Clone>(
    coeffs: &[T],
    var: &str,
) -> String {
    let mut s = String::new();
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        if i == 0 {
            s.push_str(&a.to_string());
        } else if a.is_one() {
            s.push_str(&mono);
        } else {
            s.push_str(&format!("{a}*{mono}"));
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn from_ints(c: &[BigInt]) -> Self {
        Self::new(c.iter().cloned().map(Rational::from_integer).collect())
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| rat(v)).collect())
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub(crate) fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading();
        Self::new(self.coeffs.iter().map(|c| c / &lc).collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat(i as i64))
                .collect(),
        )
    }

    /// Integer coefficients, if every coefficient is integral.
    pub fn to_integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.coeffs.len() < d.coeffs.len() {
            return Ok((Self::zero(), self.clone()));
        }
        let dd = d.deg();
        let lc = d.leading();
        let mut r = self.coeffs.clone();
        let mut q = vec![Rational::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            if r[i].is_zero() {
                continue;
            }
            let c = &r[i] / &lc;
            for (j, dj) in d.coeffs.iter().enumerate() {
                let k = i - dd + j;
                r[k] = &r[k] - &c * dj;
            }
            q[i - dd] = c;
        }
        r.truncate(dd);
        Ok((Self::new(q), Self::new(r)))
    }

    pub fn rem(&self, d: &Self) -> Result<Self> {
        Ok(self.div_rem(d)?.1)
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r.primitive_scaled();
        }
        a.monic()
    }

    /// Rescales to keep rational coefficient sizes in check; only the
    /// associate class matters for gcd computations.
    fn primitive_scaled(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let den_lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(den_lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        QPoly::new(
            ints.into_iter()
                .map(|c| Rational::from_integer(c / &g))
                .collect(),
        )
    }

    /// Extended gcd: `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn xgcd(&self, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).expect("nonzero divisor");
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.leading().recip();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn is_squarefree(&self) -> bool {
        self.deg() == 0 || self.gcd(&self.derivative()).deg() == 0
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut result = Self::one();
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

    /// `p(x + c)`.
    pub fn shift(&self, c: &Rational) -> Self {
        let lin = QPoly::new(vec![c.clone(), Rational::one()]);
        self.coeffs.iter().rev().fold(QPoly::zero(), |acc, a| {
            &(&acc * &lin) + &QPoly::constant(a.clone())
        })
    }
}

impl QPoly {
    /// Number of distinct real roots, by a Sturm sequence.
    pub fn real_root_count(&self) -> usize {
        if self.deg() == 0 {
            return 0;
        }
        let f = self.scale(&(Rational::one() / self.leading().abs()));
        let mut seq = vec![f.clone(), f.derivative()];
        loop {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]).expect("nonzero divisor");
            if r.is_zero() {
                break;
            }
            let r = -&r.scale(&(Rational::one() / r.leading().abs()));
            seq.push(r);
        }
        let changes = |signs: Vec<bool>| signs.windows(2).filter(|w| w[0] != w[1]).count();
        let at_pos: Vec<bool> = seq.iter().map(|p| p.leading().is_positive()).collect();
        let at_neg: Vec<bool> = seq
            .iter()
            .map(|p| p.leading().is_positive() == (p.deg() % 2 == 0))
            .collect();
        changes(at_neg) - changes(at_pos)
    }
}

impl Add for &QPoly {
    type Output = QPoly;
    fn add(self, rhs: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &QPoly {
    type Output = QPoly;
    fn sub(self, rhs: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &QPoly {
    type Output = QPoly;
    fn mul(self, rhs: &QPoly) -> QPoly {
        if self.is_zero() || rhs.is_zero() {
            return QPoly::zero();
        }
        let mut c = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        QPoly::new(c)
    }
}

/// Resultant `Res(a, b)` by the Euclidean recurrence
/// `Res(a, b) = (-1)^(deg a * deg b) * lc(b)^(deg a - deg r) * Res(b, r)`.
pub fn resultant(a: &QPoly, b: &QPoly) -> Rational {
    if a.is_zero() || b.is_zero() {
        return Rational::zero();
    }
    let mut a = a.clone();
    let mut b = b.clone();
    let mut acc = Rational::one();
    loop {
        let (da, db) = (a.deg(), b.deg());
        if db == 0 {
            return acc * num_traits::pow(b.leading(), da);
        }
        if da == 0 {
            return acc * num_traits::pow(a.leading(), db);
        }
        let r = a.rem(&b).expect("nonzero divisor");
        if r.is_zero() {
            return Rational::zero();
        }
        let dr = r.deg();
        if (da * db) % 2 == 1 {
            acc = -acc;
        }
        acc *= num_traits::pow(b.leading(), da - dr);
        a = b;
        b = r;
    }
}

/// Discriminant of a monic polynomial: `(-1)^(n(n-1)/2) * Res(f, f')`.
pub fn discriminant_monic(f: &QPoly) -> Rational {
    let n = f.deg();
    let r = resultant(f, &f.derivative());
    if (n * n.saturating_sub(1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

/// Newton interpolation through `(xs[i], ys[i])`.
pub fn interpolate(xs: &[Rational], ys: &[Rational]) -> QPoly {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let mut dd = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut result = QPoly::zero();
    for i in (0..n).rev() {
        let lin = QPoly::new(vec![-xs[i].clone(), Rational::one()]);
        result = &(&result * &lin) + &QPoly::constant(dd[i].clone());
    }
    result
}


#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn resultant_matches_sylvester() {
        let f = [1i64, -2, -1, 1];
        let g = [-2i64, 0, 3];
        let fb: Vec<BigInt> = f.iter().map(|&c| BigInt::from(c)).collect();
        let gb: Vec<BigInt> = g.iter().map(|&c| BigInt::from(c)).collect();
        let r = resultant(&QPoly::from_i64(&f), &QPoly::from_i64(&g));
        assert_eq!(
            r,
            Rational::from_integer(oracle::sylvester_resultant(&fb, &gb))
        );
    }

    #[test]
    fn discriminants() {
        assert_eq!(discriminant_monic(&QPoly::from_i64(&[-2, 0, 1])), rat(8));
        assert_eq!(
            discriminant_monic(&QPoly::from_i64(&[1, -2, -1, 1])),
            rat(49)
        );
        assert_eq!(discriminant_monic(&QPoly::from_i64(&[0, 1])), rat(1));
        // x^3 - 3x + 1 has discriminant 81
        assert_eq!(
            discriminant_monic(&QPoly::from_i64(&[1, -3, 0, 1])),
            rat(81)
        );
    }

    #[test]
    fn gcd_and_xgcd() {
        let a = QPoly::from_i64(&[-1, 0, 1]);
        let b = QPoly::from_i64(&[-1, 1]);
        assert_eq!(a.gcd(&b), b);
        let f = QPoly::from_i64(&[-2, 0, 1]);
        let (g, s, _) = QPoly::x().xgcd(&f);
        assert_eq!(g, QPoly::one());
        assert_eq!(s, QPoly::new(vec![rat(0), rat_frac(1, 2)]));
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = QPoly::from_i64(&[3, -1, 4, 1, -5]);
        let xs: Vec<Rational> = (0..5).map(rat).collect();
        let ys: Vec<Rational> = xs.iter().map(|x| p.eval(x)).collect();
        assert_eq!(interpolate(&xs, &ys), p);
    }

    #[test]
    fn sturm_counts() {
        assert_eq!(QPoly::from_i64(&[1, -2, -1, 1]).real_root_count(), 3);
        assert_eq!(QPoly::from_i64(&[1, 0, 1]).real_root_count(), 0);
        assert_eq!(QPoly::from_i64(&[-2, 0, 0, 1]).real_root_count(), 1);
        assert_eq!(QPoly::from_i64(&[0, 1]).real_root_count(), 1);
        assert_eq!(QPoly::from_i64(&[1, 3, -3, -4, 1, 1]).real_root_count(), 5);
        // (x - 1)^2 (x + 2): distinct roots only
        assert_eq!(QPoly::from_i64(&[2, -3, 0, 1]).real_root_count(), 2);
        assert_eq!(QPoly::from_i64(&[5]).real_root_count(), 0);
    }

    #[test]
    fn display() {
        assert_eq!(
            QPoly::from_i64(&[1, -2, -1, 1]).to_string(),
            "x^3 - x^2 - 2*x + 1"
        );
        assert_eq!(QPoly::zero().to_string(), "0");
    }

    proptest! {
        #[test]
        fn resultant_is_sylvester_determinant(
            a in prop::collection::vec(-9i64..10, 2..6),
            b in prop::collection::vec(-9i64..10, 2..6),
        ) {
            prop_assume!(*a.last().unwrap() != 0 && *b.last().unwrap() != 0);
            let ab: Vec<BigInt> = a.iter().map(|&c| BigInt::from(c)).collect();
            let bb: Vec<BigInt> = b.iter().map(|&c| BigInt::from(c)).collect();
            let r = resultant(&QPoly::from_i64(&a), &QPoly::from_i64(&b));
            prop_assert_eq!(r, Rational::from_integer(oracle::sylvester_resultant(&ab, &bb)));
        }

        #[test]
        fn division_identity(
            a in prop::collection::vec(-9i64..10, 0..7),
            b in prop::collection::vec(-9i64..10, 1..5),
        ) {
            let a = QPoly::from_i64(&a);
            let b = QPoly::from_i64(&b);
            prop_assume!(!b.is_zero());
            let (q, r) = a.div_rem(&b).unwrap();
            prop_assert_eq!(&(&q * &b) + &r, a);
            prop_assert!(r.is_zero() || r.deg() < b.deg());
        }
    }
}
