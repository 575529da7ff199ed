use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::NumberField;
use crate::error::{Error, Result};
use crate::polyq::{format_poly, resultant, QPoly, Rational};

/// An element `sum a_i theta^i` of a number field, stored by its exact
/// rational power-basis coordinates.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<NumberField>,
    coeffs: Vec<Rational>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_poly(&self.coeffs, "t"))
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && *self.field == *other.field
    }
}

impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

/// Canonical element order: coordinates compared lexicographically from
/// the constant term up.
impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.cmp(&other.coeffs)
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElemOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn elem_arith(a: &FieldElement, b: &FieldElement, op: ElemOp) -> Result<FieldElement> {
    a.check_same(b)?;
    match op {
        ElemOp::Add => Ok(a + b),
        ElemOp::Sub => Ok(a - b),
        ElemOp::Mul => Ok(a * b),
        ElemOp::Div => a.checked_div(b),
    }
}

impl FieldElement {
    /// Element with the given coordinates; shorter vectors are zero padded.
    pub fn new(field: &Arc<NumberField>, coeffs: Vec<Rational>) -> Result<Self> {
        let m = field.degree();
        if coeffs.len() > m {
            return Err(Error::domain(format!(
                "{} coordinates given for a degree {m} field",
                coeffs.len()
            )));
        }
        let mut coeffs = coeffs;
        coeffs.resize(m, Rational::zero());
        Ok(FieldElement {
            field: field.clone(),
            coeffs,
        })
    }

    pub fn from_ints(field: &Arc<NumberField>, coeffs: &[i64]) -> Result<Self> {
        Self::new(
            field,
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn from_bigints(field: &Arc<NumberField>, coeffs: &[BigInt]) -> Result<Self> {
        Self::new(
            field,
            coeffs.iter().cloned().map(Rational::from_integer).collect(),
        )
    }

    /// The rational number `c` embedded in the field.
    pub fn from_rational(field: &Arc<NumberField>, c: Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); field.degree()];
        coeffs[0] = c;
        FieldElement {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn from_int(field: &Arc<NumberField>, c: i64) -> Self {
        Self::from_rational(field, Rational::from_integer(BigInt::from(c)))
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        Self::from_int(field, 0)
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::from_int(field, 1)
    }

    /// The generator `theta` (which is `0` for Q presented as `Q[x]/(x)`).
    pub fn theta(field: &Arc<NumberField>) -> Self {
        if field.degree() == 1 {
            let c = -field.poly()[0].clone();
            return Self::from_rational(field, Rational::from_integer(c));
        }
        let mut coeffs = vec![Rational::zero(); field.degree()];
        coeffs[1] = Rational::one();
        FieldElement {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// `Some(c)` if the element is the rational number `c`.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.coeffs[1..]
            .iter()
            .all(|c| c.is_zero())
            .then(|| &self.coeffs[0])
    }

    /// All coordinates are integers, so the element lies in `Z[theta]`.
    pub fn is_integral_coords(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn integer_coords(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn as_qpoly(&self) -> QPoly {
        QPoly::new(self.coeffs.clone())
    }

    fn reduce_product(field: &Arc<NumberField>, prod: Vec<Rational>) -> Self {
        let m = field.degree();
        let mut out: Vec<Rational> = prod.iter().take(m).cloned().collect();
        out.resize(m, Rational::zero());
        for (k, c) in prod.iter().enumerate().skip(m) {
            if c.is_zero() {
                continue;
            }
            for (i, t) in field.power_table()[k - m].iter().enumerate() {
                if !t.is_zero() {
                    out[i] += c * Rational::from_integer(t.clone());
                }
            }
        }
        FieldElement {
            field: field.clone(),
            coeffs: out,
        }
    }

    /// Exact inverse via the extended gcd of the coordinate polynomial with `f`.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (g, s, _) = self.as_qpoly().xgcd(self.field.qpoly());
        if g.deg() != 0 {
            return Err(Error::internal(
                "element shares a factor with an irreducible modulus",
            ));
        }
        Self::new(&self.field, s.into_coeffs())
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self * &other.inverse()?)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut result = Self::one(&self.field);
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

    pub fn powi(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow(e as u32))
        } else {
            Ok(self.inverse()?.pow((-e) as u32))
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// `N_{K/Q}(a) = Res(f, A)` where `A` is the coordinate polynomial
    /// (`f` is monic).
    pub fn norm(&self) -> Rational {
        resultant(self.field.qpoly(), &self.as_qpoly())
    }

    pub fn trace(&self) -> Rational {
        let cp = self.char_poly();
        let m = self.field.degree();
        -cp.coeff(m - 1)
    }

    /// Matrix of multiplication by `self` in the power basis; column `j`
    /// holds the coordinates of `self * theta^j`.
    pub fn multiplication_matrix(&self) -> Vec<Vec<Rational>> {
        let m = self.field.degree();
        let mut cols = Vec::with_capacity(m);
        let theta = Self::theta(&self.field);
        let mut cur = self.clone();
        for _ in 0..m {
            cols.push(cur.coeffs.clone());
            cur = &cur * &theta;
        }
        (0..m)
            .map(|i| (0..m).map(|j| cols[j][i].clone()).collect())
            .collect()
    }

    /// Characteristic polynomial of multiplication by `self`, computed from
    /// the multiplication matrix by the Faddeev-LeVerrier recurrence.
    pub fn char_poly(&self) -> QPoly {
        let a = self.multiplication_matrix();
        let m = a.len();
        let matmul = |x: &Vec<Vec<Rational>>, y: &Vec<Vec<Rational>>| -> Vec<Vec<Rational>> {
            (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| {
                            let mut s = Rational::zero();
                            for k in 0..m {
                                if !x[i][k].is_zero() && !y[k][j].is_zero() {
                                    s += &x[i][k] * &y[k][j];
                                }
                            }
                            s
                        })
                        .collect()
                })
                .collect()
        };
        let mut coeffs = vec![Rational::zero(); m + 1];
        coeffs[m] = Rational::one();
        let mut mk = vec![vec![Rational::zero(); m]; m];
        for k in 1..=m {
            // M_k = A M_{k-1} + c_{m-k+1} I
            let mut next = matmul(&a, &mk);
            for (i, row) in next.iter_mut().enumerate() {
                row[i] += &coeffs[m - k + 1];
            }
            mk = next;
            let am = matmul(&a, &mk);
            let tr: Rational = (0..m).map(|i| am[i][i].clone()).sum();
            coeffs[m - k] = -tr / Rational::from_integer(BigInt::from(k as i64));
        }
        QPoly::new(coeffs)
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        debug_assert!(self.check_same(rhs).is_ok(), "field mismatch");
        FieldElement {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        debug_assert!(self.check_same(rhs).is_ok(), "field mismatch");
        FieldElement {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        debug_assert!(self.check_same(rhs).is_ok(), "field mismatch");
        let m = self.field.degree();
        let mut prod = vec![BigRational::zero(); 2 * m - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        FieldElement::reduce_product(&self.field, prod)
    }
}
