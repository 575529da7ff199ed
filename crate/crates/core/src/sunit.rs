//! Desk-scale search for solutions of `lambda + mu = 1` in S-units.
//!
//! Two search routes exist. The box route enumerates integral elements of
//! `Z[theta]` with power-basis coordinates in `[-H, H]` whose norm is
//! supported on `S`, and then looks for `beta + gamma = delta` among them.
//! Over Q with an exponent window the rational route enumerates
//! `lambda = ±prod p^a` directly. Either way the result is complete only
//! relative to the chosen bounds.

// FieldElement ordering ignores the field's lazily filled caches.
#![allow(clippy::mutable_key_type)]

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::is_prime_u64;
use crate::error::{Error, Result};
use crate::numberfield::{
    split_prime, val_inert, val_inert_unchecked, vp_bigint, FieldElement, NumberField, Valuation,
};
use crate::polyq::Rational;

/// Largest box (number of coordinate vectors) the scan will enumerate.
pub const MAX_BOX_POINTS: u64 = 1 << 36;

#[derive(Debug, Clone)]
pub struct SUnitConfig {
    field: Arc<NumberField>,
    s_primes: Vec<u64>,
    height_bound: u32,
    exponent_bounds: Option<Vec<u32>>,
}

impl SUnitConfig {
    /// Validates `S`: every prime must be inert in the field with `Z[theta]`
    /// maximal at it, so that membership and valuations are decidable from
    /// norms and coordinates.
    pub fn new(field: &Arc<NumberField>, s_primes: &[u64], height_bound: u32) -> Result<Self> {
        if height_bound == 0 {
            return Err(Error::domain("height bound must be positive"));
        }
        let mut s: Vec<u64> = s_primes.to_vec();
        s.sort_unstable();
        s.dedup();
        for &p in &s {
            if !is_prime_u64(p) {
                return Err(Error::domain(format!("{p} is not prime")));
            }
            let rep = split_prime(field, p)?;
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
        }
        Ok(SUnitConfig {
            field: field.clone(),
            s_primes: s,
            height_bound,
            exponent_bounds: None,
        })
    }

    /// Per-prime window `|v_p| <= w_p` for the rational route, in the order
    /// of [`SUnitConfig::s_primes`].
    pub fn with_exponent_bounds(mut self, bounds: &[u32]) -> Result<Self> {
        if !self.field.is_rationals() {
            return Err(Error::precondition("exponent windows apply to K = Q only"));
        }
        if bounds.len() != self.s_primes.len() {
            return Err(Error::domain(format!(
                "{} exponent bounds for {} primes",
                bounds.len(),
                self.s_primes.len()
            )));
        }
        self.exponent_bounds = Some(bounds.to_vec());
        Ok(self)
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn s_primes(&self) -> &[u64] {
        &self.s_primes
    }

    pub fn height_bound(&self) -> u32 {
        self.height_bound
    }

    pub fn exponent_bounds(&self) -> Option<&[u32]> {
        self.exponent_bounds.as_deref()
    }

    fn strip_s(&self, n: &BigInt) -> BigInt {
        strip_primes(n, &self.s_primes)
    }
}

fn strip_primes(n: &BigInt, primes: &[u64]) -> BigInt {
    let mut n = n.abs();
    for &p in primes {
        let pb = BigInt::from(p);
        while !n.is_zero() && n.is_multiple_of(&pb) {
            n /= &pb;
        }
    }
    n
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SUnitSolution {
    pub lambda: FieldElement,
    pub mu: FieldElement,
    pub valuations: BTreeMap<u64, (Valuation, Valuation)>,
    pub normalized: bool,
}

impl SUnitSolution {
    fn new(lambda: FieldElement, mu: FieldElement, primes: &[u64]) -> Self {
        let valuations = primes
            .iter()
            .map(|&p| {
                (
                    p,
                    (val_inert_unchecked(&lambda, p), val_inert_unchecked(&mu, p)),
                )
            })
            .collect();
        SUnitSolution {
            lambda,
            mu,
            valuations,
            normalized: false,
        }
    }

    pub fn valuation_pair(&self, p: u64) -> Option<(Valuation, Valuation)> {
        self.valuations.get(&p).copied()
    }
}

// ---------------------------------------------------------------------------
// norms of integral elements

fn det_i128(mut a: Vec<Vec<i128>>) -> Option<i128> {
    let n = a.len();
    if n == 0 {
        return Some(1);
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Some(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[i][j]
                    .checked_mul(a[k][k])?
                    .checked_sub(a[i][k].checked_mul(a[k][j])?)?;
                a[i][j] = t / prev;
            }
        }
        prev = a[k][k];
    }
    Some(sign * a[n - 1][n - 1])
}

fn det_bigint(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = t / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Multiplication matrices of `theta^i`, so that the matrix of `sum c_i
/// theta^i` is `sum c_i T_i`.
struct NormMatrices {
    m: usize,
    mats: Vec<Vec<Vec<i128>>>,
}

impl NormMatrices {
    fn new(k: &Arc<NumberField>) -> Result<Self> {
        let m = k.degree();
        let theta = FieldElement::theta(k);
        let mut mats = Vec::with_capacity(m);
        let mut cur = FieldElement::one(k);
        for _ in 0..m {
            let mm = cur.multiplication_matrix();
            let conv: Option<Vec<Vec<i128>>> = mm
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|c| {
                            if c.is_integer() {
                                c.numer().to_i128()
                            } else {
                                None
                            }
                        })
                        .collect()
                })
                .collect();
            mats.push(conv.ok_or_else(|| Error::internal("power basis matrices overflow i128"))?);
            cur = &cur * &theta;
        }
        Ok(NormMatrices { m, mats })
    }

    fn norm(&self, c: &[i64]) -> BigInt {
        let m = self.m;
        let mut mat = vec![vec![0i128; m]; m];
        let mut ok = true;
        'fill: for (t, &ci) in self.mats.iter().zip(c) {
            if ci == 0 {
                continue;
            }
            for i in 0..m {
                for j in 0..m {
                    match t[i][j]
                        .checked_mul(ci as i128)
                        .and_then(|v| v.checked_add(mat[i][j]))
                    {
                        Some(v) => mat[i][j] = v,
                        None => {
                            ok = false;
                            break 'fill;
                        }
                    }
                }
            }
        }
        if ok {
            if let Some(d) = det_i128(mat) {
                return BigInt::from(d);
            }
        }
        let big: Vec<Vec<BigInt>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        self.mats
                            .iter()
                            .zip(c)
                            .map(|(t, &ci)| BigInt::from(t[i][j]) * ci)
                            .fold(BigInt::zero(), |a, b| a + b)
                    })
                    .collect()
            })
            .collect();
        det_bigint(big)
    }
}

// ---------------------------------------------------------------------------
// box enumeration

struct BoxGeometry {
    m: usize,
    h: i64,
    side: u64,
    points: u64,
}

impl BoxGeometry {
    fn new(m: usize, h: u32) -> Result<Self> {
        let side = 2 * h as u64 + 1;
        let points = (0..m).try_fold(1u64, |acc, _| acc.checked_mul(side));
        match points {
            Some(points) if points <= MAX_BOX_POINTS => Ok(BoxGeometry {
                m,
                h: h as i64,
                side,
                points,
            }),
            _ => Err(Error::precondition(format!(
                "box [-{h}, {h}]^{m} exceeds {MAX_BOX_POINTS} points"
            ))),
        }
    }

    fn decode(&self, mut idx: u64) -> Vec<i64> {
        let mut c = Vec::with_capacity(self.m);
        for _ in 0..self.m {
            c.push((idx % self.side) as i64 - self.h);
            idx /= self.side;
        }
        c
    }

    fn key(&self, c: &[i64]) -> Option<u64> {
        let mut k = 0u64;
        let mut scale = 1u64;
        for &x in c {
            if x.abs() > self.h {
                return None;
            }
            k += (x + self.h) as u64 * scale;
            scale *= self.side;
        }
        Some(k)
    }
}

fn box_units_coords(cfg: &SUnitConfig) -> Result<(BoxGeometry, Vec<Vec<i64>>)> {
    let geo = BoxGeometry::new(cfg.field.degree(), cfg.height_bound)?;
    let norms = NormMatrices::new(&cfg.field)?;
    let one = BigInt::one();
    let mut found: Vec<Vec<i64>> = (0..geo.points)
        .into_par_iter()
        .filter_map(|idx| {
            let c = geo.decode(idx);
            if c.iter().all(|&x| x == 0) {
                return None;
            }
            let n = norms.norm(&c);
            (cfg.strip_s(&n) == one).then_some(c)
        })
        .collect();
    found.sort();
    Ok((geo, found))
}

fn coords_to_element(k: &Arc<NumberField>, c: &[i64]) -> FieldElement {
    FieldElement::from_ints(k, c).expect("coordinate vector has field degree")
}

/// All nonzero `a` in `Z[theta]` with coordinates in `[-H, H]` and
/// `|N(a)| = prod p_i^{e_i}` over `p_i` in `S`, in canonical element order.
pub fn enumerate_box_sunits(cfg: &SUnitConfig) -> Result<Vec<FieldElement>> {
    let (_, coords) = box_units_coords(cfg)?;
    let mut out: Vec<FieldElement> = coords
        .iter()
        .map(|c| coords_to_element(&cfg.field, c))
        .collect();
    out.sort();
    Ok(out)
}

// ---------------------------------------------------------------------------
// solving

/// How a solution set was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    Box,
    RationalWindow,
}

impl SUnitConfig {
    pub fn method(&self) -> SearchMethod {
        if self.field.is_rationals() && self.exponent_bounds.is_some() {
            SearchMethod::RationalWindow
        } else {
            SearchMethod::Box
        }
    }
}

/// All `(lambda, mu)` with `lambda + mu = 1` reachable within the bounds of
/// `cfg`, as ordered pairs sorted by `(lambda, mu)`.
///
/// Box route: `lambda = beta / delta`, `mu = gamma / delta` with `beta`,
/// `gamma`, `delta` box S-units and `beta + gamma = delta`. Rational route:
/// `lambda = ±prod p^a` with every exponent of both `lambda` and `mu`
/// inside the window.
pub fn solve_sunit_equation(cfg: &SUnitConfig) -> Result<Vec<SUnitSolution>> {
    let pairs = match cfg.method() {
        SearchMethod::RationalWindow => solve_rational_window(cfg),
        SearchMethod::Box => solve_box(cfg)?,
    };
    Ok(pairs
        .into_iter()
        .map(|(l, m)| SUnitSolution::new(l, m, &cfg.s_primes))
        .collect())
}

fn solve_box(cfg: &SUnitConfig) -> Result<BTreeSet<(FieldElement, FieldElement)>> {
    let (geo, units) = box_units_coords(cfg)?;
    let index: HashSet<u64> = units
        .iter()
        .map(|c| geo.key(c).expect("box point"))
        .collect();
    let hits: Vec<(usize, usize)> = (0..units.len())
        .into_par_iter()
        .flat_map_iter(|bi| {
            let beta = &units[bi];
            let geo = &geo;
            let index = &index;
            units.iter().enumerate().filter_map(move |(di, delta)| {
                let gamma: Vec<i64> = delta.iter().zip(beta).map(|(d, b)| d - b).collect();
                geo.key(&gamma)
                    .filter(|k| index.contains(k))
                    .map(|_| (bi, di))
            })
        })
        .collect();
    let k = &cfg.field;
    let mut inverses: BTreeMap<usize, FieldElement> = BTreeMap::new();
    let mut out = BTreeSet::new();
    for (bi, di) in hits {
        let inv = match inverses.get(&di) {
            Some(v) => v.clone(),
            None => {
                let v = coords_to_element(k, &units[di]).inverse()?;
                inverses.insert(di, v.clone());
                v
            }
        };
        let lambda = &coords_to_element(k, &units[bi]) * &inv;
        let mu = &FieldElement::one(k) - &lambda;
        out.insert((lambda, mu));
    }
    Ok(out)
}

fn s_exponents(x: &Rational, primes: &[u64]) -> Option<Vec<i64>> {
    if x.is_zero() {
        return None;
    }
    let one = BigInt::one();
    if strip_primes(x.numer(), primes) != one || strip_primes(x.denom(), primes) != one {
        return None;
    }
    Some(
        primes
            .iter()
            .map(|&p| vp_bigint(x.numer(), p) - vp_bigint(x.denom(), p))
            .collect(),
    )
}

fn solve_rational_window(cfg: &SUnitConfig) -> BTreeSet<(FieldElement, FieldElement)> {
    let bounds = cfg.exponent_bounds.as_deref().unwrap_or_default();
    let primes = &cfg.s_primes;
    let inside = |e: &[i64]| {
        e.iter()
            .zip(bounds)
            .all(|(a, &w)| a.unsigned_abs() <= w as u64)
    };
    let mut values = vec![Rational::one()];
    for (&p, &w) in primes.iter().zip(bounds) {
        let pr = Rational::from_integer(BigInt::from(p));
        let mut next = Vec::with_capacity(values.len() * (2 * w as usize + 1));
        for v in &values {
            for e in -(w as i32)..=(w as i32) {
                next.push(v * pr.pow(e));
            }
        }
        values = next;
    }
    let k = &cfg.field;
    let one = Rational::one();
    values
        .par_iter()
        .flat_map_iter(|v| [v.clone(), -v.clone()])
        .filter_map(|lambda| {
            let mu = &one - &lambda;
            let e = s_exponents(&mu, primes)?;
            inside(&e).then(|| {
                (
                    FieldElement::from_rational(k, lambda),
                    FieldElement::from_rational(k, mu),
                )
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

// ---------------------------------------------------------------------------
// S-unit membership

/// Whether `a` is an S-unit, i.e. `(a)` is supported on the primes above
/// `S`. Decided from the norm of `D a` with `D` the S-part of the
/// coordinate denominator. A denominator prime outside `S` at which
/// `Z[theta]` may be non-maximal leaves the question undecided and is an
/// error.
pub fn is_s_unit(a: &FieldElement, s_primes: &[u64]) -> Result<bool> {
    if a.is_zero() {
        return Ok(false);
    }
    let den = a
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let outside = strip_primes(&den, s_primes);
    if !outside.is_one() {
        for q in small_prime_factors(&outside)? {
            if a.field().power_basis_ok(q) {
                return Ok(false);
            }
        }
        return Err(Error::precondition(format!(
            "denominator {outside} involves possible index divisors; S-unit status undecided"
        )));
    }
    let n = a.norm();
    let one = BigInt::one();
    Ok(strip_primes(n.numer(), s_primes) == one && strip_primes(n.denom(), s_primes) == one)
}

fn small_prime_factors(n: &BigInt) -> Result<Vec<u64>> {
    let mut n = n
        .to_u64()
        .ok_or_else(|| Error::precondition(format!("cannot factor denominator {n}")))?;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// orbit normalization

fn orbit(lambda: &FieldElement) -> Result<Vec<(FieldElement, FieldElement)>> {
    let k = lambda.field();
    let one = FieldElement::one(k);
    let mu = &one - lambda;
    let inv_l = lambda.inverse()?;
    let inv_m = mu.inverse()?;
    let a = lambda.clone();
    let b = mu.clone();
    let c = inv_l.clone();
    let d = &one - &inv_l;
    let e = inv_m.clone();
    let f = &one - &inv_m;
    Ok([a, b, c, d, e, f]
        .into_iter()
        .map(|x| {
            let y = &one - &x;
            (x, y)
        })
        .collect())
}

/// Moves a solution within its six-element orbit so that both valuations at
/// `p` are nonnegative and their maximum equals `max(|v_p(lambda)|,
/// |v_p(mu)|)`. A solution that already qualifies is returned unchanged
/// (apart from the `normalized` flag); otherwise the smallest valuation
/// pair wins, then the canonical element order.
pub fn normalize_solution(s: &SUnitSolution, p: u64) -> Result<SUnitSolution> {
    let vp = |x: &FieldElement| -> Result<Valuation> {
        if s.valuations.contains_key(&p) {
            Ok(val_inert_unchecked(x, p))
        } else {
            val_inert(x, p)
        }
    };
    let va = vp(&s.lambda)?;
    let vb = vp(&s.mu)?;
    let (Some(a), Some(b)) = (va.finite(), vb.finite()) else {
        return Err(Error::domain("lambda and mu must be nonzero"));
    };
    let target = a.abs().max(b.abs());
    let primes: Vec<u64> = s.valuations.keys().copied().collect();
    if a >= 0 && b >= 0 {
        let mut out = s.clone();
        out.normalized = true;
        return Ok(out);
    }
    let mut best: Option<((Valuation, Valuation), (FieldElement, FieldElement))> = None;
    for (x, y) in orbit(&s.lambda)? {
        let vx = vp(&x)?;
        let vy = vp(&y)?;
        let (Some(ex), Some(ey)) = (vx.finite(), vy.finite()) else {
            continue;
        };
        if ex < 0 || ey < 0 || ex.max(ey) != target {
            continue;
        }
        let key = (vx, vy);
        let better = match &best {
            None => true,
            Some((bk, (bx, by))) => key < *bk || (key == *bk && (&x, &y) < (bx, by)),
        };
        if better {
            best = Some((key, (x, y)));
        }
    }
    let (_, (x, y)) = best.ok_or_else(|| {
        Error::internal(format!(
            "no normalized orbit member for {} at {p}",
            s.lambda
        ))
    })?;
    let mut out = SUnitSolution::new(x, y, &primes);
    out.normalized = true;
    Ok(out)
}

// ---------------------------------------------------------------------------
// descent

#[derive(Debug, Clone)]
pub struct Descent {
    pub solution: SUnitSolution,
    /// Whether both outputs are S-units for the given `S`.
    pub s_unit: bool,
}

/// `(lambda'', mu'') = (-(1 - g)^2 / 4g, (1 + g)^2 / 4g)` for an S-unit `g`.
///
/// The pair always sums to 1. At an inert prime `P | 2` with `v_P(g) = 0`
/// the valuations are `2 v_P(1 - g) - 2` and `2 v_P(1 + g) - 2`; in general
/// `v_P(g)` is subtracted as well.
pub fn descent_step(gamma: &FieldElement, s_primes: &[u64]) -> Result<Descent> {
    let k = gamma.field();
    let one = FieldElement::one(k);
    if gamma.is_zero() || gamma.is_one() || (gamma + &one).is_zero() {
        return Err(Error::domain("gamma must not be 0, 1 or -1"));
    }
    let mut primes = s_primes.to_vec();
    primes.sort_unstable();
    primes.dedup();
    if !is_s_unit(gamma, &primes)? {
        return Err(Error::precondition(format!("{gamma} is not an S-unit")));
    }
    let four_g_inv = gamma
        .scale(&Rational::from_integer(BigInt::from(4)))
        .inverse()?;
    let am = &one - gamma;
    let ap = &one + gamma;
    let lambda = -&(&(&am * &am) * &four_g_inv);
    let mu = &(&ap * &ap) * &four_g_inv;
    let mut valuations = BTreeMap::new();
    for &p in &primes {
        valuations.insert(p, (val_inert(&lambda, p)?, val_inert(&mu, p)?));
    }
    let s_unit = is_s_unit(&lambda, &primes)? && is_s_unit(&mu, &primes)?;
    Ok(Descent {
        solution: SUnitSolution {
            lambda,
            mu,
            valuations,
            normalized: false,
        },
        s_unit,
    })
}

// ---------------------------------------------------------------------------
// valuation checks

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassificationMode {
    /// Pairs in `{(1, 0), (0, 1), (-1, -1)}`.
    ThreeTypes,
    /// `max(|v(lambda)|, |v(mu)|) <= 4`.
    PropBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationEntry {
    pub lambda: String,
    pub mu: String,
    pub pair: (Valuation, Valuation),
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub mode: ClassificationMode,
    pub prime: u64,
    pub entries: Vec<ClassificationEntry>,
    pub all_pass: bool,
}

impl ClassificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &ClassificationEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }
}

pub fn verify_valuation_classification(
    solutions: &[SUnitSolution],
    p: u64,
    mode: ClassificationMode,
) -> ClassificationReport {
    let entries: Vec<ClassificationEntry> = solutions
        .iter()
        .map(|s| {
            let pair = s.valuation_pair(p).unwrap_or_else(|| {
                (
                    val_inert_unchecked(&s.lambda, p),
                    val_inert_unchecked(&s.mu, p),
                )
            });
            let pass = match (pair.0.finite(), pair.1.finite()) {
                (Some(a), Some(b)) => match mode {
                    ClassificationMode::ThreeTypes => matches!((a, b), (1, 0) | (0, 1) | (-1, -1)),
                    ClassificationMode::PropBound => a.abs().max(b.abs()) <= 4,
                },
                _ => false,
            };
            ClassificationEntry {
                lambda: s.lambda.to_string(),
                mu: s.mu.to_string(),
                pair,
                pass,
            }
        })
        .collect();
    let all_pass = entries.iter().all(|e| e.pass);
    ClassificationReport {
        mode,
        prime: p,
        entries,
        all_pass,
    }
}

// ---------------------------------------------------------------------------
// reports

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub field: Vec<String>,
    pub s_primes: Vec<u64>,
    pub height_bound: u32,
    pub exponent_bounds: Option<Vec<u32>>,
    pub method: SearchMethod,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionRecord {
    /// Power-basis coordinates as exact rationals `a` or `a/b`.
    pub lambda: Vec<String>,
    pub mu: Vec<String>,
    pub valuations: BTreeMap<u64, (Valuation, Valuation)>,
    pub normalized: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SUnitReport {
    pub config: ConfigEcho,
    pub count: usize,
    pub completeness: String,
    pub solutions: Vec<SolutionRecord>,
}

fn coords_strings(a: &FieldElement) -> Vec<String> {
    a.coeffs().iter().map(|c| c.to_string()).collect()
}

fn parse_coords(k: &Arc<NumberField>, c: &[String]) -> Result<FieldElement> {
    let coeffs = c
        .iter()
        .map(|s| {
            Rational::from_str(s).map_err(|_| Error::Parse {
                line: 0,
                msg: format!("bad rational {s:?}"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    FieldElement::new(k, coeffs)
}

impl SUnitReport {
    pub fn new(cfg: &SUnitConfig, solutions: &[SUnitSolution]) -> Self {
        let bound = match cfg.method() {
            SearchMethod::Box => format!("height bound H = {}", cfg.height_bound),
            SearchMethod::RationalWindow => {
                format!(
                    "exponent window {:?}",
                    cfg.exponent_bounds.as_deref().unwrap_or_default()
                )
            }
        };
        let completeness = if solutions.is_empty() {
            format!("no solution within {bound}; says nothing beyond it")
        } else {
            format!("all solutions within {bound}; a lower bound for the full solution set")
        };
        SUnitReport {
            config: ConfigEcho {
                field: cfg.field.poly().iter().map(|c| c.to_string()).collect(),
                s_primes: cfg.s_primes.clone(),
                height_bound: cfg.height_bound,
                exponent_bounds: cfg.exponent_bounds.clone(),
                method: cfg.method(),
            },
            count: solutions.len(),
            completeness,
            solutions: solutions
                .iter()
                .map(|s| SolutionRecord {
                    lambda: coords_strings(&s.lambda),
                    mu: coords_strings(&s.mu),
                    valuations: s.valuations.clone(),
                    normalized: s.normalized,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })
    }

    /// Rebuilds the solutions over `k`, checking `lambda + mu = 1` for each.
    pub fn solutions(&self, k: &Arc<NumberField>) -> Result<Vec<SUnitSolution>> {
        self.solutions
            .iter()
            .map(|r| {
                let lambda = parse_coords(k, &r.lambda)?;
                let mu = parse_coords(k, &r.mu)?;
                if !(&lambda + &mu).is_one() {
                    return Err(Error::precondition(format!("{lambda} + {mu} != 1")));
                }
                Ok(SUnitSolution {
                    lambda,
                    mu,
                    valuations: r.valuations.clone(),
                    normalized: r.normalized,
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::make_field_i64;
    use proptest::prelude::*;

    fn q() -> Arc<NumberField> {
        NumberField::rationals()
    }

    fn cubic() -> Arc<NumberField> {
        make_field_i64(&[1, -2, -1, 1]).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn rational_pairs(sols: &[SUnitSolution]) -> BTreeSet<(Rational, Rational)> {
        sols.iter()
            .map(|s| {
                (
                    s.lambda.as_rational().unwrap().clone(),
                    s.mu.as_rational().unwrap().clone(),
                )
            })
            .collect()
    }

    fn smooth(n: i64, s: &[u64]) -> bool {
        let mut n = n.unsigned_abs();
        if n == 0 {
            return false;
        }
        for &p in s {
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        n == 1
    }

    /// Integer triples `b + c = d` with all three S-smooth and bounded by H.
    fn oracle_q(s: &[u64], h: i64) -> BTreeSet<(Rational, Rational)> {
        let mut out = BTreeSet::new();
        for b in -h..=h {
            for d in -h..=h {
                let c = d - b;
                if c.abs() <= h && smooth(b, s) && smooth(c, s) && smooth(d, s) {
                    out.insert((r(b, d), r(c, d)));
                }
            }
        }
        out
    }

    #[test]
    fn box_units_over_q() {
        let cfg = SUnitConfig::new(&q(), &[2], 8).unwrap();
        let u: Vec<Rational> = enumerate_box_sunits(&cfg)
            .unwrap()
            .iter()
            .map(|a| a.as_rational().unwrap().clone())
            .collect();
        let want: Vec<Rational> = [-8, -4, -2, -1, 1, 2, 4, 8]
            .iter()
            .map(|&n| r(n, 1))
            .collect();
        assert_eq!(u, want);
        let cfg = SUnitConfig::new(&q(), &[5, 2], 10).unwrap();
        let u = enumerate_box_sunits(&cfg).unwrap();
        assert_eq!(u.len(), 12);
        assert!(u
            .iter()
            .all(|a| smooth(a.as_rational().unwrap().numer().to_i64().unwrap(), &[2, 5])));
    }

    #[test]
    fn box_units_cubic_match_resultant_norms() {
        let k = cubic();
        let cfg = SUnitConfig::new(&k, &[2], 2).unwrap();
        let got = enumerate_box_sunits(&cfg).unwrap();
        let mut want = Vec::new();
        for a in -2..=2i64 {
            for b in -2..=2i64 {
                for c in -2..=2i64 {
                    let e = FieldElement::from_ints(&k, &[a, b, c]).unwrap();
                    if e.is_zero() {
                        continue;
                    }
                    let n = e.norm();
                    if n.is_integer() && smooth(n.numer().to_i64().unwrap(), &[2]) {
                        want.push(e);
                    }
                }
            }
        }
        want.sort();
        assert_eq!(got, want);
        assert!(got.contains(&FieldElement::theta(&k)));
        assert!(got.contains(&FieldElement::from_int(&k, -2)));
        // closed under negation
        for a in &got {
            assert!(got.contains(&-a));
        }
    }

    #[test]
    fn determinant_routes_agree() {
        let m = vec![vec![3i128, -1, 4], vec![1, 5, -9], vec![2, 6, 5]];
        let big: Vec<Vec<BigInt>> = m
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        assert_eq!(BigInt::from(det_i128(m).unwrap()), det_bigint(big));
        assert_eq!(det_i128(vec![vec![0, 1], vec![1, 0]]), Some(-1));
        assert_eq!(det_i128(vec![vec![0, 1], vec![0, 2]]), Some(0));
        assert_eq!(det_i128(vec![vec![i128::MAX, 2], vec![2, i128::MAX]]), None);
    }

    #[test]
    fn config_validation() {
        let k = cubic();
        assert!(matches!(
            SUnitConfig::new(&k, &[7], 2),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            SUnitConfig::new(&k, &[13], 2),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            SUnitConfig::new(&k, &[4], 2),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            SUnitConfig::new(&k, &[2], 0),
            Err(Error::Domain(_))
        ));
        let c = SUnitConfig::new(&k, &[2], 2).unwrap();
        assert!(c.with_exponent_bounds(&[3]).is_err());
        let c = SUnitConfig::new(&q(), &[2], 2).unwrap();
        assert!(c.clone().with_exponent_bounds(&[3, 3]).is_err());
        assert_eq!(
            c.with_exponent_bounds(&[3]).unwrap().method(),
            SearchMethod::RationalWindow
        );
        assert!(SUnitConfig::new(&k, &[2], 1 << 20).is_ok());
        let big = SUnitConfig::new(&k, &[2], 1 << 20).unwrap();
        assert!(matches!(
            enumerate_box_sunits(&big),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn solutions_over_q_s2() {
        let cfg = SUnitConfig::new(&q(), &[2], 8).unwrap();
        let sols = solve_sunit_equation(&cfg).unwrap();
        let want: BTreeSet<_> =
            [(r(2, 1), r(-1, 1)), (r(-1, 1), r(2, 1)), (r(1, 2), r(1, 2))].into();
        assert_eq!(rational_pairs(&sols), want);
        assert_eq!(rational_pairs(&sols), oracle_q(&[2], 8));
        for s in &sols {
            assert!((&s.lambda + &s.mu).is_one());
        }
        let v: BTreeSet<_> = sols.iter().map(|s| s.valuations[&2]).collect();
        let f = Valuation::Finite;
        assert_eq!(v, [(f(1), f(0)), (f(0), f(1)), (f(-1), f(-1))].into());
    }

    #[test]
    fn unit_equation_over_z_is_empty() {
        let cfg = SUnitConfig::new(&q(), &[], 8).unwrap();
        assert!(solve_sunit_equation(&cfg).unwrap().is_empty());
        let w = SUnitConfig::new(&q(), &[], 8)
            .unwrap()
            .with_exponent_bounds(&[])
            .unwrap();
        assert!(solve_sunit_equation(&w).unwrap().is_empty());
    }

    #[test]
    fn solutions_over_q_s25() {
        let cfg = SUnitConfig::new(&q(), &[2, 5], 25).unwrap();
        let sols = rational_pairs(&solve_sunit_equation(&cfg).unwrap());
        assert_eq!(sols, oracle_q(&[2, 5], 25));
        for (a, b) in [
            (5, 1, -4, 1),
            (-4, 1, 5, 1),
            (1, 5, 4, 5),
            (5, 4, -1, 4),
            (-1, 4, 5, 4),
        ]
        .map(|(a, b, c, d)| (r(a, b), r(c, d)))
        {
            assert!(sols.contains(&(a, b)));
        }
        // box and window routes agree on what both can see
        let w = SUnitConfig::new(&q(), &[2, 5], 25)
            .unwrap()
            .with_exponent_bounds(&[4, 2])
            .unwrap();
        let ws = rational_pairs(&solve_sunit_equation(&w).unwrap());
        for (a, b) in &sols {
            let e = s_exponents(a, &[2, 5]).unwrap();
            let f = s_exponents(b, &[2, 5]).unwrap();
            if e[0].abs() <= 4 && e[1].abs() <= 2 && f[0].abs() <= 4 && f[1].abs() <= 2 {
                assert!(ws.contains(&(a.clone(), b.clone())), "{a} {b}");
            }
        }
    }

    #[test]
    fn rational_window_matches_brute_force() {
        let w = SUnitConfig::new(&q(), &[2, 3], 1)
            .unwrap()
            .with_exponent_bounds(&[3, 2])
            .unwrap();
        let got = rational_pairs(&solve_sunit_equation(&w).unwrap());
        let mut want = BTreeSet::new();
        for a in -3..=3i32 {
            for b in -2..=2i32 {
                for sign in [1, -1] {
                    let lam = r(sign, 1)
                        * Rational::from_integer(BigInt::from(2)).pow(a)
                        * Rational::from_integer(BigInt::from(3)).pow(b);
                    let mu = Rational::one() - &lam;
                    if let Some(e) = s_exponents(&mu, &[2, 3]) {
                        if e[0].abs() <= 3 && e[1].abs() <= 2 {
                            want.insert((lam, mu));
                        }
                    }
                }
            }
        }
        assert_eq!(got, want);
        assert!(got.contains(&(r(9, 8), r(-1, 8))));
        assert!(got.contains(&(r(-3, 1), r(4, 1))));
    }

    #[test]
    fn cubic_unit_equation_has_exceptional_units() {
        let k = cubic();
        let cfg = SUnitConfig::new(&k, &[], 2).unwrap();
        let sols = solve_sunit_equation(&cfg).unwrap();
        let t = FieldElement::theta(&k);
        let one = FieldElement::one(&k);
        assert!(sols.iter().any(|s| s.lambda == t && s.mu == &one - &t));
        for s in &sols {
            assert!(is_s_unit(&s.lambda, &[]).unwrap());
            assert!(is_s_unit(&s.mu, &[]).unwrap());
            assert!((&s.lambda + &s.mu).is_one());
        }
    }

    #[test]
    fn normalization_examples() {
        let k = q();
        let mk = |a: Rational| {
            SUnitSolution::new(
                FieldElement::from_rational(&k, a.clone()),
                FieldElement::from_rational(&k, Rational::one() - a),
                &[2],
            )
        };
        let n = normalize_solution(&mk(r(1, 2)), 2).unwrap();
        assert_eq!(n.lambda.as_rational().unwrap(), &r(-1, 1));
        assert_eq!(n.mu.as_rational().unwrap(), &r(2, 1));
        assert!(n.normalized);
        let n = normalize_solution(&mk(r(2, 1)), 2).unwrap();
        assert_eq!(n.lambda.as_rational().unwrap(), &r(2, 1));
        let n = normalize_solution(&mk(r(5, 4)), 2).unwrap();
        let (a, b) = n.valuations[&2];
        assert!(a >= 0 && b >= 0);
        assert_eq!(a.max(b), Valuation::Finite(2));
        // orbit of 5/4: {5/4, -1/4, 4/5, 1/5, -4, 5}; (1/5, 4/5) and (5, -4)
        // share the pair (0, 2) and 1/5 comes first
        assert_eq!(n.lambda.as_rational().unwrap(), &r(1, 5));
    }

    #[test]
    fn normalization_over_q_s25() {
        let cfg = SUnitConfig::new(&q(), &[2, 5], 25).unwrap();
        for s in solve_sunit_equation(&cfg).unwrap() {
            let (a, b) = s.valuations[&2];
            let target = a.finite().unwrap().abs().max(b.finite().unwrap().abs());
            let n = normalize_solution(&s, 2).unwrap();
            let (x, y) = n.valuations[&2];
            assert!(x >= 0 && y >= 0);
            assert_eq!(x.max(y), Valuation::Finite(target));
            assert!((&n.lambda + &n.mu).is_one());
        }
    }

    #[test]
    fn descent_examples() {
        let k = q();
        let g = |n: i64| FieldElement::from_int(&k, n);
        let d = descent_step(&g(3), &[2, 3]).unwrap();
        assert_eq!(d.solution.lambda.as_rational().unwrap(), &r(-1, 3));
        assert_eq!(d.solution.mu.as_rational().unwrap(), &r(4, 3));
        assert_eq!(
            d.solution.valuations[&2],
            (Valuation::Finite(0), Valuation::Finite(2))
        );
        assert!(d.s_unit);
        let d = descent_step(&g(5), &[2, 5]).unwrap();
        assert_eq!(d.solution.lambda.as_rational().unwrap(), &r(-4, 5));
        assert_eq!(d.solution.mu.as_rational().unwrap(), &r(9, 5));
        assert!(!d.s_unit);
        let d = descent_step(&g(-3), &[2, 3]).unwrap();
        assert_eq!(d.solution.lambda.as_rational().unwrap(), &r(4, 3));
        assert_eq!(d.solution.mu.as_rational().unwrap(), &r(-1, 3));
        for bad in [0, 1, -1] {
            assert!(matches!(descent_step(&g(bad), &[2]), Err(Error::Domain(_))));
        }
        assert!(matches!(
            descent_step(&g(3), &[2]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn classification_modes() {
        let cfg = SUnitConfig::new(&q(), &[2], 8).unwrap();
        let sols = solve_sunit_equation(&cfg).unwrap();
        let rep = verify_valuation_classification(&sols, 2, ClassificationMode::ThreeTypes);
        assert!(rep.all_pass);
        let cfg = SUnitConfig::new(&q(), &[2, 5], 1)
            .unwrap()
            .with_exponent_bounds(&[8, 8])
            .unwrap();
        let sols = solve_sunit_equation(&cfg).unwrap();
        let rep = verify_valuation_classification(&sols, 2, ClassificationMode::PropBound);
        assert!(rep.all_pass);
        let rep = verify_valuation_classification(&sols, 2, ClassificationMode::ThreeTypes);
        assert!(!rep.all_pass);
        assert!(rep
            .failures()
            .any(|e| e.pair == (Valuation::Finite(2), Valuation::Finite(0))));
        // 16 - 15 = 1 but 15 is not a {2}-unit
        assert!(!is_s_unit(&FieldElement::from_int(&q(), -15), &[2]).unwrap());
    }

    #[test]
    fn s_unit_membership() {
        let k = cubic();
        let t = FieldElement::theta(&k);
        assert!(is_s_unit(&t, &[]).unwrap());
        assert!(is_s_unit(&t.scale(&r(1, 2)), &[2]).unwrap());
        assert!(!is_s_unit(&t.scale(&r(1, 2)), &[]).unwrap());
        assert!(!is_s_unit(&FieldElement::from_int(&k, 3), &[2]).unwrap());
        assert!(!is_s_unit(&FieldElement::zero(&k), &[2]).unwrap());
    }

    #[test]
    fn report_round_trip() {
        let cfg = SUnitConfig::new(&q(), &[2, 5], 10).unwrap();
        let sols = solve_sunit_equation(&cfg).unwrap();
        let rep = SUnitReport::new(&cfg, &sols);
        let text = rep.to_json();
        let back = SUnitReport::from_json(&text).unwrap();
        assert_eq!(back, rep);
        assert_eq!(back.to_json(), text);
        assert_eq!(back.solutions(&q()).unwrap(), sols);
        let empty = SUnitReport::new(&SUnitConfig::new(&q(), &[], 3).unwrap(), &[]);
        assert!(empty.completeness.starts_with("no solution within"));
        let k = cubic();
        let cfg = SUnitConfig::new(&k, &[2], 1).unwrap();
        let sols = solve_sunit_equation(&cfg).unwrap();
        let rep = SUnitReport::new(&cfg, &sols);
        assert_eq!(
            SUnitReport::from_json(&rep.to_json())
                .unwrap()
                .solutions(&k)
                .unwrap(),
            sols
        );
    }

    proptest! {
        #[test]
        fn descent_sums_to_one(a in -6i32..=6, b in -4i32..=4, neg: bool) {
            let k = q();
            let mut g = Rational::from_integer(BigInt::from(2)).pow(a)
                * Rational::from_integer(BigInt::from(3)).pow(b);
            if neg { g = -g; }
            prop_assume!(g.abs() != Rational::one());
            let ge = FieldElement::from_rational(&k, g.clone());
            let d = descent_step(&ge, &[2, 3]).unwrap();
            prop_assert!((&d.solution.lambda + &d.solution.mu).is_one());
            let v = |x: &Rational| vp_rational_i(x, 2);
            let one = Rational::one();
            let (l2, m2) = d.solution.valuations[&2];
            prop_assert_eq!(l2, Valuation::Finite(2 * v(&(&one - &g)) - 2 - v(&g)));
            prop_assert_eq!(m2, Valuation::Finite(2 * v(&(&one + &g)) - 2 - v(&g)));
        }

        #[test]
        fn solutions_closed_under_swap(h in 2u32..=12) {
            let cfg = SUnitConfig::new(&q(), &[2, 3], h).unwrap();
            let sols = rational_pairs(&solve_sunit_equation(&cfg).unwrap());
            for (a, b) in &sols {
                prop_assert!(sols.contains(&(b.clone(), a.clone())));
            }
            prop_assert_eq!(sols, oracle_q(&[2, 3], h as i64));
        }
    }

    fn vp_rational_i(x: &Rational, p: u64) -> i64 {
        crate::numberfield::vp_rational(x, p).finite().unwrap()
    }
}
