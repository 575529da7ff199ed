//! Number fields `Q[x]/(f)` given by a monic irreducible integer polynomial,
//! with exact element arithmetic in the power basis, norms, characteristic
//! polynomials, prime splitting and the valuations and residue maps used by
//! the hypothesis checks.

mod element;
mod irreducible;
mod splitting;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::polyq::{discriminant_monic, format_poly, QPoly};

pub use element::{elem_arith, ElemOp, FieldElement};
pub use splitting::{
    norm_congruence_check, residue_sign, residue_totally_ramified, split_prime, val_inert,
    vp_rational, Classification, ResidueSign, SplittingReport, Valuation,
};
pub(crate) use splitting::{val_inert_unchecked, vp_bigint};

/// A number field `K = Q[x]/(f)` with `f` monic, integral and irreducible.
pub struct NumberField {
    poly: Vec<BigInt>,
    qpoly: QPoly,
    disc: BigInt,
    /// `theta^(m + k)` in the power basis for `k = 0..m-1`.
    power_table: Vec<Vec<BigInt>>,
    /// Dedekind index test results by prime: `true` when `p` does not divide
    /// `[O_K : Z[theta]]`.
    power_basis_ok: RwLock<BTreeMap<u64, bool>>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumberField")
            .field("poly", &self.poly_string())
            .field("disc", &self.disc)
            .finish()
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.poly == other.poly
    }
}

impl Eq for NumberField {}

/// Builds `Q[x]/(f)` from integer coefficients, constant term first.
///
/// Rejects non-monic input and verifies irreducibility over Q exactly; a
/// reducible `f` yields [`Error::Reducible`] carrying a factor.
pub fn make_field(coeffs: &[BigInt]) -> Result<Arc<NumberField>> {
    let coeffs = trim(coeffs);
    if coeffs.len() < 2 {
        return Err(Error::domain("defining polynomial must have degree >= 1"));
    }
    if !coeffs.last().unwrap().is_one() {
        return Err(Error::NonMonic);
    }
    if let Some(w) = irreducible::find_factor(&coeffs)? {
        return Err(Error::Reducible {
            witness: w.iter().map(|c| c.to_string()).collect(),
        });
    }
    Ok(Arc::new(NumberField::from_irreducible(coeffs)))
}

pub fn make_field_i64(coeffs: &[i64]) -> Result<Arc<NumberField>> {
    make_field(&coeffs.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>())
}

fn trim(c: &[BigInt]) -> Vec<BigInt> {
    let mut v = c.to_vec();
    while v.last().is_some_and(|x| x.is_zero()) {
        v.pop();
    }
    v
}

impl NumberField {
    /// Q itself, presented as `Q[x]/(x)` with `theta = 0`.
    pub fn rationals() -> Arc<NumberField> {
        Arc::new(Self::from_irreducible(vec![BigInt::zero(), BigInt::one()]))
    }

    /// Caller guarantees `coeffs` is monic and irreducible over Q.
    pub(crate) fn from_irreducible(coeffs: Vec<BigInt>) -> NumberField {
        let m = coeffs.len() - 1;
        let qpoly = QPoly::from_ints(&coeffs);
        let disc = discriminant_monic(&qpoly).to_integer();
        // theta^m = -sum_{i<m} f_i theta^i, then shift repeatedly
        let mut power_table = Vec::with_capacity(m);
        let mut cur: Vec<BigInt> = coeffs[..m].iter().map(|c| -c).collect();
        for _ in 0..m {
            power_table.push(cur.clone());
            let top = cur[m - 1].clone();
            let mut next = vec![BigInt::zero(); m];
            for i in (1..m).rev() {
                next[i] = cur[i - 1].clone() - &top * &coeffs[i];
            }
            next[0] = -&top * &coeffs[0];
            cur = next;
        }
        NumberField {
            poly: coeffs,
            qpoly,
            disc,
            power_table,
            power_basis_ok: RwLock::new(BTreeMap::new()),
        }
    }

    pub fn degree(&self) -> usize {
        self.poly.len() - 1
    }

    /// Defining polynomial, constant term first.
    pub fn poly(&self) -> &[BigInt] {
        &self.poly
    }

    pub fn qpoly(&self) -> &QPoly {
        &self.qpoly
    }

    pub fn poly_string(&self) -> String {
        format_poly(&self.poly, "x")
    }

    /// `disc(f) = (-1)^(m(m-1)/2) Res(f, f')`.
    pub fn discriminant(&self) -> &BigInt {
        &self.disc
    }

    pub fn is_rationals(&self) -> bool {
        self.degree() == 1
    }

    pub(crate) fn power_table(&self) -> &[Vec<BigInt>] {
        &self.power_table
    }

    /// Whether `p` is known not to divide the index `[O_K : Z[theta]]`
    /// (Dedekind criterion); computed on first use and cached.
    pub fn power_basis_ok(&self, p: u64) -> bool {
        if let Some(&ok) = self.power_basis_ok.read().expect("cache lock").get(&p) {
            return ok;
        }
        let ok = splitting::dedekind_test(self, p);
        self.power_basis_ok
            .write()
            .expect("cache lock")
            .insert(p, ok);
        ok
    }
}
