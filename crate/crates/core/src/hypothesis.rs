//! Hypothesis checklists for asymptotic Fermat-type statements over
//! cyclotomic Z_l-layers, and the certificates they produce.
//!
//! Every checklist evaluates all of its hypotheses in a fixed order, even
//! after a failure. A certificate's conclusion repeats its statement only
//! when every verdict is true; otherwise it reads `not applicable`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Pow;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd_u64, is_prime_u64, mod_pow_u64, primes_up_to, wieferich_test_u64};
use crate::error::{Error, Result};
use crate::numberfield::{split_prime, FieldElement, NumberField};

pub const NOT_APPLICABLE: &str = "not applicable";

/// Largest degree for which the square-class test modulo `32 O_K` is done
/// by exhausting `Z[theta] / 16`.
pub const SQUARE_SEARCH_MAX_DEGREE: usize = 5;

// ---------------------------------------------------------------------------
// scenario

/// A coefficient `u * 2^r * d^s` with `u = ±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffDescriptor {
    pub unit: i8,
    pub r: u32,
    pub s: u32,
}

impl CoeffDescriptor {
    pub fn new(unit: i8, r: u32, s: u32) -> Result<Self> {
        if unit != 1 && unit != -1 {
            return Err(Error::domain(format!(
                "unit flag must be 1 or -1, got {unit}"
            )));
        }
        Ok(CoeffDescriptor { unit, r, s })
    }

    pub fn value(&self, d: Option<u64>) -> Result<BigInt> {
        let mut v = BigInt::from(self.unit) * BigInt::from(2).pow(self.r);
        if self.s > 0 {
            let d = d.ok_or_else(|| {
                Error::MissingInput("d is needed for a coefficient with s > 0".into())
            })?;
            v *= BigInt::from(d).pow(self.s);
        }
        Ok(v)
    }
}

impl fmt::Display for CoeffDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.unit, self.r, self.s)
    }
}

impl FromStr for CoeffDescriptor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::domain(format!("coefficient descriptor must be u,r,s; got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let unit: i8 = parts[0].parse().map_err(|_| bad())?;
        let r: u32 = parts[1].parse().map_err(|_| bad())?;
        let e: u32 = parts[2].parse().map_err(|_| bad())?;
        CoeffDescriptor::new(unit, r, e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Odd,
    Even,
}

/// Declared parity of a narrow class number. Never computed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HPlus {
    pub parity: Parity,
    pub provenance: String,
}

impl FromStr for HPlus {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (p, prov) = s.split_once(':').ok_or_else(|| {
            Error::domain(format!(
                "h-plus must be odd:<source> or even:<source>; got {s:?}"
            ))
        })?;
        let parity = match p.trim() {
            "odd" => Parity::Odd,
            "even" => Parity::Even,
            other => return Err(Error::domain(format!("unknown parity {other:?}"))),
        };
        let provenance = prov.trim();
        if provenance.is_empty() {
            return Err(Error::domain("h-plus provenance must not be empty"));
        }
        Ok(HPlus {
            parity,
            provenance: provenance.to_string(),
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct Scenario {
    pub field: Option<Arc<NumberField>>,
    pub l: Option<u64>,
    pub n: Option<u32>,
    pub d: Option<u64>,
    pub coeffs: Option<[CoeffDescriptor; 3]>,
    pub h_plus: Option<HPlus>,
}

impl Scenario {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_field(mut self, k: &Arc<NumberField>) -> Self {
        self.field = Some(k.clone());
        self
    }

    pub fn with_l(mut self, l: u64) -> Self {
        self.l = Some(l);
        self
    }

    pub fn with_n(mut self, n: u32) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_d(mut self, d: u64) -> Self {
        self.d = Some(d);
        self
    }

    pub fn with_coeffs(
        mut self,
        a: CoeffDescriptor,
        b: CoeffDescriptor,
        c: CoeffDescriptor,
    ) -> Self {
        self.coeffs = Some([a, b, c]);
        self
    }

    pub fn with_h_plus(mut self, h: HPlus) -> Self {
        self.h_plus = Some(h);
        self
    }

    fn need_field(&self) -> Result<&Arc<NumberField>> {
        self.field
            .as_ref()
            .ok_or_else(|| Error::MissingInput("field K".into()))
    }

    fn need_l(&self) -> Result<u64> {
        self.l.ok_or_else(|| Error::MissingInput("l".into()))
    }

    fn need_n(&self) -> Result<u32> {
        self.n.ok_or_else(|| Error::MissingInput("n".into()))
    }

    fn need_d(&self) -> Result<u64> {
        self.d.ok_or_else(|| Error::MissingInput("d".into()))
    }

    fn need_coeffs(&self) -> Result<[CoeffDescriptor; 3]> {
        self.coeffs
            .ok_or_else(|| Error::MissingInput("coefficients A, B, C".into()))
    }

    fn need_h_plus(&self) -> Result<&HPlus> {
        self.h_plus.as_ref().ok_or_else(|| {
            Error::MissingInput(
                "h-plus parity: the narrow class number is never computed here and must be \
                 declared as odd:<source> or even:<source>"
                    .into(),
            )
        })
    }

    fn echo(&self) -> ScenarioEcho {
        ScenarioEcho {
            field: self
                .field
                .as_ref()
                .map(|k| k.poly().iter().map(|c| c.to_string()).collect()),
            l: self.l,
            n: self.n,
            d: self.d,
            a: self.coeffs.map(|c| c[0].to_string()),
            b: self.coeffs.map(|c| c[1].to_string()),
            c: self.coeffs.map(|c| c[2].to_string()),
            h_plus: self.h_plus.clone(),
        }
    }
}

// ---------------------------------------------------------------------------
// certificate

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "T_AFLT_layers")]
    AfltLayers,
    #[serde(rename = "T_GFE_layers")]
    GfeLayers,
    #[serde(rename = "T_GFE_K_2d")]
    GfeK2d,
    #[serde(rename = "T_GFE_Q_layers_2d")]
    GfeQLayers2d,
    #[serde(rename = "Prop_bound")]
    PropBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioEcho {
    /// Defining polynomial of K, constant term first.
    pub field: Option<Vec<String>>,
    pub l: Option<u64>,
    pub n: Option<u32>,
    pub d: Option<u64>,
    #[serde(rename = "A")]
    pub a: Option<String>,
    #[serde(rename = "B")]
    pub b: Option<String>,
    #[serde(rename = "C")]
    pub c: Option<String>,
    pub h_plus: Option<HPlus>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub verdict: bool,
    pub evidence: String,
    /// Set when the verdict rests on declared rather than computed input.
    pub caveat: bool,
}

impl Check {
    fn new(label: &str, verdict: bool, evidence: impl Into<String>) -> Self {
        Check {
            label: label.to_string(),
            verdict,
            evidence: evidence.into(),
            caveat: false,
        }
    }

    fn declared(label: &str, verdict: bool, evidence: impl Into<String>) -> Self {
        Check {
            caveat: true,
            ..Check::new(label, verdict, evidence)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub scenario: ScenarioEcho,
    pub theorem_id: TheoremId,
    pub checks: Vec<Check>,
    /// The statement that holds when every check passes.
    pub statement: String,
    pub conclusion: String,
    pub effectivity_note: String,
    pub remarks: Vec<String>,
}

impl Certificate {
    fn build(
        sc: &Scenario,
        theorem_id: TheoremId,
        checks: Vec<Check>,
        statement: String,
        effectivity_note: &str,
        remarks: Vec<String>,
    ) -> Self {
        let mut c = Certificate {
            scenario: sc.echo(),
            theorem_id,
            checks,
            statement,
            conclusion: String::new(),
            effectivity_note: effectivity_note.to_string(),
            remarks,
        };
        c.recompute();
        c
    }

    /// Re-derives the conclusion from the verdicts.
    pub fn recompute(&mut self) {
        self.conclusion = if self.all_pass() {
            self.statement.clone()
        } else {
            NOT_APPLICABLE.to_string()
        };
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.verdict)
    }

    pub fn applies(&self) -> bool {
        self.conclusion != NOT_APPLICABLE
    }

    pub fn failed_labels(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.verdict)
            .map(|c| c.label.as_str())
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })
    }
}

// ---------------------------------------------------------------------------
// individual checks

pub mod labels {
    pub const K_TOTALLY_REAL: &str = "K totally real";
    pub const M_ODD: &str = "[K:Q] odd";
    pub const TWO_INERT: &str = "2 inert in K";
    pub const L_PRIME: &str = "l >= 5 prime";
    pub const L_NMID_M: &str = "l does not divide [K:Q]";
    pub const GCD: &str = "gcd((l-1)/2, [K:Q]) = 1";
    pub const L_NON_WIEFERICH: &str = "2^(l-1) != 1 mod l^2";
    pub const L_TOTALLY_RAMIFIED: &str = "l totally ramified in K";
    pub const N_POSITIVE: &str = "n >= 1";
    pub const SIGN_SUMS: &str = "A +- B +- C != 0";
    pub const VAL_MAX: &str = "max(v_P(A), v_P(BC)) <= 4";
    pub const VAL_MOD3: &str = "v_P(ABC) = 0 or 2 mod 3";
    pub const H_PLUS_ODD: &str = "h+ odd";
    pub const D_PRIME: &str = "d >= 3 prime";
    pub const D_MOD4: &str = "d = 1 mod 4";
    pub const D_INERT: &str = "d inert in K";
    pub const D_M_MOD32: &str = "d^[K:Q] mod 32 not in {1,9,17,25}";
    pub const D_NE_L: &str = "d != l";
    pub const D_NON_WIEFERICH: &str = "d^(l-1) != 1 mod l^2";
    pub const D_MOD32: &str = "d mod 32 not in {1,9,17,25}";
    pub const D_NOT_SQUARE: &str = "d is not a square mod P^5";
}

use labels::*;

fn field_name(k: &NumberField) -> String {
    if k.is_rationals() {
        "Q".to_string()
    } else {
        format!("Q[x]/({})", k.poly_string())
    }
}

fn check_totally_real(k: &NumberField) -> Check {
    let m = k.degree();
    let r = k.qpoly().real_root_count();
    Check::new(
        K_TOTALLY_REAL,
        r == m,
        format!("{r} of {m} roots of f are real (Sturm)"),
    )
}

fn check_m_odd(m: usize) -> Check {
    Check::new(M_ODD, m % 2 == 1, format!("[K:Q] = {m}"))
}

fn check_inert(label: &str, k: &NumberField, p: u64) -> Check {
    if !is_prime_u64(p) {
        return Check::new(label, false, format!("{p} is not prime"));
    }
    match split_prime(k, p) {
        Ok(rep) if rep.index_caveat => Check::new(
            label,
            false,
            format!(
                "f mod {p} has pattern {} but {p} may divide the index; uncertified",
                rep.pattern_string()
            ),
        ),
        Ok(rep) => Check::new(
            label,
            rep.is_inert(),
            format!("f mod {p} has pattern {}", rep.pattern_string()),
        ),
        Err(e) => Check::new(label, false, e.to_string()),
    }
}

fn check_totally_ramified(k: &NumberField, l: u64) -> Check {
    let label = L_TOTALLY_RAMIFIED;
    if !is_prime_u64(l) {
        return Check::new(label, false, format!("{l} is not prime"));
    }
    match split_prime(k, l) {
        Ok(rep) if rep.index_caveat => Check::new(
            label,
            false,
            format!(
                "f mod {l} has pattern {} but {l} may divide the index; uncertified",
                rep.pattern_string()
            ),
        ),
        Ok(rep) => Check::new(
            label,
            rep.is_totally_ramified(),
            format!("f mod {l} has pattern {}", rep.pattern_string()),
        ),
        Err(e) => Check::new(label, false, e.to_string()),
    }
}

fn check_l_prime(l: u64) -> Check {
    Check::new(L_PRIME, l >= 5 && is_prime_u64(l), format!("l = {l}"))
}

fn check_d_prime(d: u64) -> Check {
    Check::new(D_PRIME, d >= 3 && is_prime_u64(d), format!("d = {d}"))
}

fn check_non_wieferich(label: &str, base: u64, l: u64) -> Check {
    if base.is_multiple_of(l) {
        return Check::new(
            label,
            true,
            format!("{l} divides {base}, so {base}^({l}-1) = 0 mod {l}"),
        );
    }
    match wieferich_test_u64(base, l) {
        Ok(rep) => Check::new(
            label,
            !rep.is_wieferich_pair,
            format!("{base}^{} mod {} = {}", l - 1, l * l, rep.residue),
        ),
        Err(e) => Check::new(label, false, e.to_string()),
    }
}

fn check_h_plus(h: &HPlus) -> Check {
    let odd = h.parity == Parity::Odd;
    Check::declared(
        H_PLUS_ODD,
        odd,
        format!(
            "declared {} ({}); not computed",
            if odd { "odd" } else { "even" },
            h.provenance
        ),
    )
}

fn check_d_mod4(d: u64) -> Check {
    Check::new(D_MOD4, d % 4 == 1, format!("d mod 4 = {}", d % 4))
}

/// `{a^2 mod 32 : a odd}`.
pub fn odd_squares_mod32() -> BTreeSet<u32> {
    let set: BTreeSet<u32> = (1..32u32).step_by(2).map(|a| a * a % 32).collect();
    assert_eq!(set, BTreeSet::from([1, 9, 17, 25]), "odd squares mod 32");
    set
}

fn in_odd_squares(x: u64) -> bool {
    odd_squares_mod32().contains(&((x % 32) as u32))
}

fn aflt_checks(k: &NumberField, l: u64, n: u32) -> Vec<Check> {
    let m = k.degree() as u64;
    let l_ok = l >= 5 && is_prime_u64(l);
    let half = if l_ok { (l - 1) / 2 } else { 0 };
    let g = gcd_u64(half, m);
    vec![
        check_totally_real(k),
        check_m_odd(m as usize),
        check_inert(TWO_INERT, k, 2),
        check_l_prime(l),
        Check::new(N_POSITIVE, n >= 1, format!("n = {n}")),
        Check::new(
            L_NMID_M,
            !m.is_multiple_of(l),
            format!("{m} mod {l} = {}", m % l),
        ),
        Check::new(GCD, l_ok && g == 1, format!("gcd({half}, {m}) = {g}")),
        if l_ok {
            check_non_wieferich(L_NON_WIEFERICH, 2, l)
        } else {
            Check::new(L_NON_WIEFERICH, false, format!("{l} is not a prime >= 5"))
        },
        check_totally_ramified(k, l),
    ]
}

const EFFECTIVITY_FULL_2_TORSION: &str = "Effective if every elliptic curve with full 2-torsion over the \
    field in question is modular; this condition is quoted, not verified. The constant V is not computed.";

/// Asymptotic FLT over every layer `K_{n,l}`.
pub fn check_theorem_aflt_layers(sc: &Scenario) -> Result<Certificate> {
    let k = sc.need_field()?;
    let l = sc.need_l()?;
    let n = sc.need_n()?;
    let checks = aflt_checks(k, l, n);
    let statement = format!(
        "x^p + y^p + z^p = 0 has only trivial solutions over K_{{n,{l}}} for all primes p beyond a \
         bound V, for every n >= 1 (K = {}; checked scenario n = {n})",
        field_name(k)
    );
    Ok(Certificate::build(
        sc,
        TheoremId::AfltLayers,
        checks,
        statement,
        EFFECTIVITY_FULL_2_TORSION,
        vec![],
    ))
}

fn coeff_string(c: &[CoeffDescriptor; 3], d: Option<u64>) -> Result<String> {
    Ok(format!(
        "A = {}, B = {}, C = {}",
        c[0].value(d)?,
        c[1].value(d)?,
        c[2].value(d)?
    ))
}

/// Generalized Fermat equation with `A, B, C` in `{±2^r}` over every layer.
pub fn check_theorem_gfe_layers(sc: &Scenario) -> Result<Certificate> {
    let k = sc.need_field()?;
    let l = sc.need_l()?;
    let n = sc.need_n()?;
    let c = sc.need_coeffs()?;
    if c.iter().any(|x| x.s > 0) {
        return Err(Error::WrongTheorem(
            "coefficients involve d (s > 0); use gfe-K-2d or gfe-Q-2d".into(),
        ));
    }
    let mut checks = aflt_checks(k, l, n);
    let vals: Vec<FieldElement> = c
        .iter()
        .map(|x| Ok(FieldElement::from_rational(k, x.value(None)?.into())))
        .collect::<Result<_>>()?;
    let (a, b, cc) = (&vals[0], &vals[1], &vals[2]);
    let sums = [a + &(b + cc), a + &(b - cc), a - &(b - cc), a - &(b + cc)];
    let shown: Vec<String> = sums.iter().map(|s| s.to_string()).collect();
    checks.push(Check::new(
        SIGN_SUMS,
        sums.iter().all(|s| !s.is_zero()),
        format!("A+B+C, A+B-C, A-B+C, A-B-C = {}", shown.join(", ")),
    ));
    let va = c[0].r;
    let vbc = c[1].r + c[2].r;
    let vabc = va + vbc;
    checks.push(Check::new(
        VAL_MAX,
        va.max(vbc) <= 4,
        format!("v_P(A) = {va}, v_P(BC) = {vbc}"),
    ));
    checks.push(Check::new(
        VAL_MOD3,
        vabc % 3 != 1,
        format!("v_P(ABC) = {vabc} = {} mod 3", vabc % 3),
    ));
    let statement = format!(
        "Ax^p + By^p + Cz^p = 0 with {} has no asymptotic solution over K_{{n,{l}}}, for every n >= 1 \
         (K = {}; checked scenario n = {n})",
        coeff_string(&c, None)?,
        field_name(k)
    );
    let remarks = vec![
        "The condition A +- B +- C != 0 is kept mandatory. For rational integer coefficients it is \
         known to be removable; that result is not used here."
            .to_string(),
        "v_P(u 2^r) = r since 2 is inert and u is a unit.".to_string(),
    ];
    Ok(Certificate::build(
        sc,
        TheoremId::GfeLayers,
        checks,
        statement,
        EFFECTIVITY_FULL_2_TORSION,
        remarks,
    ))
}

/// Generalized Fermat equation over K with `A, B, C` in `{±2^r d^s}`.
pub fn check_theorem_gfe_k_2d(sc: &Scenario) -> Result<Certificate> {
    let k = sc.need_field()?;
    let d = sc.need_d()?;
    let c = sc.need_coeffs()?;
    let h = sc.need_h_plus()?;
    let m = k.degree() as u32;
    let dm = mod_pow_u64(d, m as u64, 32);
    let checks = vec![
        check_totally_real(k),
        check_h_plus(h),
        check_inert(TWO_INERT, k, 2),
        check_d_prime(d),
        check_d_mod4(d),
        check_inert(D_INERT, k, d),
        Check::new(
            D_M_MOD32,
            !in_odd_squares(dm),
            format!("{d}^{m} mod 32 = {dm}"),
        ),
    ];
    let statement = format!(
        "Ax^p + By^p + Cz^p = 0 with {} has no asymptotic solution (a, b, c) in O_K^3 with 2O_K | abc \
         (K = {}, d = {d})",
        coeff_string(&c, Some(d))?,
        field_name(k)
    );
    let remarks = vec!["The narrow class number parity is a declared input.".to_string()];
    Ok(Certificate::build(
        sc,
        TheoremId::GfeK2d,
        checks,
        statement,
        EFFECTIVITY_FULL_2_TORSION,
        remarks,
    ))
}

/// Generalized Fermat equation over `Q_{n,l}` with `A, B, C` in `{±2^r d^s}`.
pub fn check_theorem_gfe_q_layers_2d(sc: &Scenario) -> Result<Certificate> {
    let l = sc.need_l()?;
    let n = sc.need_n()?;
    let d = sc.need_d()?;
    let c = sc.need_coeffs()?;
    let h = sc.need_h_plus()?;
    let l_ok = l >= 5 && is_prime_u64(l);
    let d_ok = d >= 3 && is_prime_u64(d);
    let wief = |label: &str, base: u64| {
        if l_ok {
            check_non_wieferich(label, base, l)
        } else {
            Check::new(label, false, format!("{l} is not a prime >= 5"))
        }
    };
    let checks = vec![
        check_l_prime(l),
        check_d_prime(d),
        Check::new(N_POSITIVE, n >= 1, format!("n = {n}")),
        Check::new(D_NE_L, d != l, format!("d = {d}, l = {l}")),
        wief(L_NON_WIEFERICH, 2),
        check_d_mod4(d),
        if d_ok {
            wief(D_NON_WIEFERICH, d)
        } else {
            Check::new(
                D_NON_WIEFERICH,
                false,
                format!("d = {d} is not an odd prime"),
            )
        },
        Check::new(
            D_MOD32,
            !in_odd_squares(d),
            format!("d mod 32 = {}", d % 32),
        ),
        check_h_plus(h),
    ];
    let statement = format!(
        "Ax^p + By^p + Cz^p = 0 with {} has no effective asymptotic solution (a, b, c) in the ring of \
         integers of Q_{{{n},{l}}} with 2 | abc (d = {d})",
        coeff_string(&c, Some(d))?
    );
    let note =
        "Effectivity rests on the modularity of all elliptic curves over Q_{n,l}, a theorem of \
        Thorne; quoted, not verified. The constant V is not computed.";
    let remarks =
        vec!["The narrow class number parity of Q_{n,l} is a declared input.".to_string()];
    Ok(Certificate::build(
        sc,
        TheoremId::GfeQLayers2d,
        checks,
        statement,
        note,
        remarks,
    ))
}

/// Whether `d ≡ v^2 mod 32 O_K` is solvable, by running `v` over
/// `Z[theta] / 16` (the square mod 32 only depends on `v mod 16`).
fn d_square_mod_32(k: &NumberField, d: u64) -> bool {
    let m = k.degree();
    let f: Vec<u32> = k
        .poly()
        .iter()
        .map(|c| c.mod_floor(&BigInt::from(32)).try_into().unwrap())
        .collect();
    let target = (d % 32) as u32;
    let total = 16u64.pow(m as u32);
    (0..total).into_par_iter().any(|idx| {
        let mut v = vec![0u32; m];
        let mut t = idx;
        for c in v.iter_mut() {
            *c = (t % 16) as u32;
            t /= 16;
        }
        let mut sq = vec![0u32; 2 * m - 1];
        for i in 0..m {
            for j in 0..m {
                sq[i + j] = (sq[i + j] + v[i] * v[j]) % 32;
            }
        }
        // reduce by the monic f
        for top in (m..2 * m - 1).rev() {
            let c = sq[top];
            if c != 0 {
                for i in 0..m {
                    sq[top - m + i] = (sq[top - m + i] + 32 * 32 - c * f[i] % 32) % 32;
                }
                sq[top] = 0;
            }
        }
        sq[0] == target && sq[1..m].iter().all(|&x| x == 0)
    })
}

fn check_not_square(k: &NumberField, d: u64) -> Check {
    let m = k.degree();
    if split_prime(k, 2)
        .map(|r| !r.certified_inert())
        .unwrap_or(true)
    {
        return Check::new(
            D_NOT_SQUARE,
            false,
            "needs 2 inert with Z[theta] maximal at 2",
        );
    }
    if m <= SQUARE_SEARCH_MAX_DEGREE {
        let sq = d_square_mod_32(k, d);
        return Check::new(
            D_NOT_SQUARE,
            !sq,
            format!(
                "exhaustive search over Z[theta]/16: {} v with v^2 = {d} mod 32",
                if sq { "found" } else { "no" }
            ),
        );
    }
    let dm = mod_pow_u64(d, m as u64, 32);
    if in_odd_squares(dm) {
        Check::new(
            D_NOT_SQUARE,
            false,
            format!("undecided: {d}^{m} mod 32 = {dm} is an odd square and degree {m} is too large to search"),
        )
    } else {
        Check::new(
            D_NOT_SQUARE,
            true,
            format!("N(v)^2 = {d}^{m} mod 32 = {dm} is impossible for odd N(v)"),
        )
    }
}

/// Bound `max |v_P| <= 4` on solutions of the `{2, d}`-unit equation.
pub fn check_prop_bound(sc: &Scenario) -> Result<Certificate> {
    let k = sc.need_field()?;
    let d = sc.need_d()?;
    let h = sc.need_h_plus()?;
    let d_ok = d >= 3 && is_prime_u64(d);
    let checks = vec![
        check_h_plus(h),
        check_inert(TWO_INERT, k, 2),
        check_d_prime(d),
        check_d_mod4(d),
        check_inert(D_INERT, k, d),
        if d_ok {
            check_not_square(k, d)
        } else {
            Check::new(D_NOT_SQUARE, false, format!("d = {d} is not an odd prime"))
        },
    ];
    let statement = format!(
        "every solution of lambda + mu = 1 in S-units for S = primes above 2d satisfies \
         max(|v_P(lambda)|, |v_P(mu)|) <= 4 (K = {}, d = {d})",
        field_name(k)
    );
    Ok(Certificate::build(
        sc,
        TheoremId::PropBound,
        checks,
        statement,
        "No effectivity clause.",
        vec![],
    ))
}

/// Primes `d <= d_max`, `d != l`, with `d ≡ 1 mod 4`, `d mod 32` not an odd
/// square and `d^(l-1) ≢ 1 mod l^2`.
pub fn search_valid_d(l: u64, d_max: u64) -> Result<Vec<u64>> {
    if l < 5 || !is_prime_u64(l) {
        return Err(Error::domain(format!("l = {l} must be a prime >= 5")));
    }
    if wieferich_test_u64(2, l)?.is_wieferich_pair {
        return Err(Error::precondition(format!(
            "2^({l}-1) = 1 mod {l}^2: l is a base-2 Wieferich prime, which blocks every d"
        )));
    }
    let primes = primes_up_to(d_max);
    let out: Vec<u64> = primes
        .par_iter()
        .copied()
        .filter(|&d| {
            d != l
                && d % 4 == 1
                && !in_odd_squares(d)
                && !wieferich_test_u64(d, l)
                    .map(|r| r.is_wieferich_pair)
                    .unwrap_or(true)
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::build_layer;
    use crate::numberfield::make_field_i64;
    use crate::polyfp::PolyFp;

    fn cubic() -> Arc<NumberField> {
        make_field_i64(&[1, -2, -1, 1]).unwrap()
    }

    fn cd(u: i8, r: u32, s: u32) -> CoeffDescriptor {
        CoeffDescriptor::new(u, r, s).unwrap()
    }

    fn odd() -> HPlus {
        "odd:table".parse().unwrap()
    }

    fn verdict(c: &Certificate, label: &str) -> bool {
        c.checks
            .iter()
            .find(|x| x.label == label)
            .unwrap_or_else(|| panic!("no check {label}"))
            .verdict
    }

    #[test]
    fn descriptors_and_h_plus() {
        let c: CoeffDescriptor = "-1,1,1".parse().unwrap();
        assert_eq!(c.value(Some(5)).unwrap(), BigInt::from(-10));
        assert_eq!(c.to_string(), "-1,1,1");
        assert!("2,0,0".parse::<CoeffDescriptor>().is_err());
        assert!("1,0".parse::<CoeffDescriptor>().is_err());
        assert!("1,-1,0".parse::<CoeffDescriptor>().is_err());
        assert!(matches!(c.value(None), Err(Error::MissingInput(_))));
        let h: HPlus = "even: user".parse().unwrap();
        assert_eq!(h.parity, Parity::Even);
        assert_eq!(h.provenance, "user");
        assert!("odd".parse::<HPlus>().is_err());
        assert!("odd:".parse::<HPlus>().is_err());
        assert!("maybe:x".parse::<HPlus>().is_err());
    }

    #[test]
    fn aflt_cubic_l5() {
        let sc = Scenario::new().with_field(&cubic()).with_l(5).with_n(1);
        let c = check_theorem_aflt_layers(&sc).unwrap();
        assert_eq!(c.failed_labels(), vec![L_TOTALLY_RAMIFIED]);
        assert_eq!(c.conclusion, NOT_APPLICABLE);
        assert!(c
            .checks
            .iter()
            .any(|x| x.label == L_NON_WIEFERICH && x.evidence == "2^4 mod 25 = 16"));
    }

    #[test]
    fn aflt_cubic_l7() {
        let sc = Scenario::new().with_field(&cubic()).with_l(7).with_n(1);
        let c = check_theorem_aflt_layers(&sc).unwrap();
        assert!(!verdict(&c, GCD));
        assert!(c
            .checks
            .iter()
            .any(|x| x.label == GCD && x.evidence == "gcd(3, 3) = 3"));
        // 7 is totally ramified in the cubic field
        assert!(verdict(&c, L_TOTALLY_RAMIFIED));
        assert!(!c.applies());
    }

    #[test]
    fn aflt_rationals() {
        let sc = Scenario::new()
            .with_field(&NumberField::rationals())
            .with_l(5)
            .with_n(1);
        let c = check_theorem_aflt_layers(&sc).unwrap();
        assert!(c.all_pass(), "{:?}", c.failed_labels());
        assert!(c.applies());
        assert_eq!(c.conclusion, c.statement);
        let c = check_theorem_aflt_layers(&sc.clone().with_l(1093)).unwrap();
        assert_eq!(c.failed_labels(), vec![L_NON_WIEFERICH]);
        assert!(matches!(
            check_theorem_aflt_layers(&Scenario::new().with_l(5)),
            Err(Error::MissingInput(_))
        ));
    }

    #[test]
    fn gfe_layers_examples() {
        let q = NumberField::rationals();
        let base = Scenario::new().with_field(&q).with_l(5).with_n(1);
        let c = check_theorem_gfe_layers(&base.clone().with_coeffs(
            cd(1, 0, 0),
            cd(1, 1, 0),
            cd(1, 2, 0),
        ))
        .unwrap();
        assert!(c.applies(), "{:?}", c.failed_labels());
        let c = check_theorem_gfe_layers(&base.clone().with_coeffs(
            cd(1, 0, 0),
            cd(1, 1, 0),
            cd(1, 1, 0),
        ))
        .unwrap();
        assert!(c.applies());
        let c = check_theorem_gfe_layers(&base.clone().with_coeffs(
            cd(1, 1, 0),
            cd(1, 1, 0),
            cd(1, 2, 0),
        ))
        .unwrap();
        assert!(c.failed_labels().contains(&SIGN_SUMS));
        assert!(!c.applies());
        let c = check_theorem_gfe_layers(&base.clone().with_coeffs(
            cd(1, 0, 0),
            cd(-1, 0, 0),
            cd(1, 2, 0),
        ))
        .unwrap();
        assert!(c.applies());
        let c = check_theorem_gfe_layers(&base.clone().with_coeffs(
            cd(1, 1, 0),
            cd(1, 0, 0),
            cd(-1, 0, 0),
        ))
        .unwrap();
        assert_eq!(c.failed_labels(), vec![SIGN_SUMS, VAL_MOD3]);
        let c = check_theorem_gfe_layers(&base.clone().with_coeffs(
            cd(1, 0, 0),
            cd(1, 3, 0),
            cd(1, 2, 0),
        ))
        .unwrap();
        assert_eq!(c.failed_labels(), vec![VAL_MAX]);
        let c = check_theorem_gfe_layers(&base.clone().with_coeffs(
            cd(1, 1, 0),
            cd(1, 0, 0),
            cd(1, 3, 0),
        ))
        .unwrap();
        assert_eq!(c.failed_labels(), vec![VAL_MOD3]);
        let e = check_theorem_gfe_layers(&base.clone().with_coeffs(
            cd(1, 0, 0),
            cd(1, 0, 1),
            cd(1, 0, 0),
        ));
        assert!(matches!(e, Err(Error::WrongTheorem(_))));
        assert!(matches!(
            check_theorem_gfe_layers(&base),
            Err(Error::MissingInput(_))
        ));
    }

    #[test]
    fn gfe_layers_reduces_to_aflt_for_unit_coefficients() {
        for (k, l) in [
            (NumberField::rationals(), 5),
            (NumberField::rationals(), 7),
            (cubic(), 5),
            (cubic(), 7),
        ] {
            let sc = Scenario::new().with_field(&k).with_l(l).with_n(1);
            let a = check_theorem_aflt_layers(&sc).unwrap();
            let g = check_theorem_gfe_layers(&sc.clone().with_coeffs(
                cd(1, 0, 0),
                cd(1, 0, 0),
                cd(1, 0, 0),
            ))
            .unwrap();
            assert_eq!(&g.checks[..a.checks.len()], &a.checks[..]);
            assert!(g.checks[a.checks.len()..].iter().all(|c| c.verdict));
            assert_eq!(a.applies(), g.applies());
        }
    }

    #[test]
    fn gfe_k_2d_examples() {
        let k = cubic();
        let abc = (cd(1, 0, 0), cd(-1, 1, 1), cd(1, 4, 2));
        let sc = Scenario::new()
            .with_field(&k)
            .with_d(5)
            .with_coeffs(abc.0, abc.1, abc.2)
            .with_h_plus(odd());
        let c = check_theorem_gfe_k_2d(&sc).unwrap();
        // independent oracle: 5 is inert iff f stays irreducible mod 5
        let f5 = PolyFp::from_i64(5, &[1, -2, -1, 1]).unwrap();
        let irreducible = f5.is_irreducible();
        assert_eq!(verdict(&c, D_INERT), irreducible);
        assert!(c
            .checks
            .iter()
            .any(|x| x.label == D_M_MOD32 && x.evidence == "5^3 mod 32 = 29"));
        assert!(verdict(&c, D_M_MOD32));
        let q = NumberField::rationals();
        let base = Scenario::new()
            .with_field(&q)
            .with_coeffs(abc.0, abc.1, abc.2)
            .with_h_plus(odd());
        let c = check_theorem_gfe_k_2d(&base.clone().with_d(41)).unwrap();
        assert_eq!(c.failed_labels(), vec![D_M_MOD32]);
        let c = check_theorem_gfe_k_2d(&base.clone().with_d(3)).unwrap();
        assert_eq!(c.failed_labels(), vec![D_MOD4]);
        let c = check_theorem_gfe_k_2d(&base.clone().with_d(5)).unwrap();
        assert!(c.applies());
        let mut no_h = base.clone().with_d(5);
        no_h.h_plus = None;
        assert!(matches!(
            check_theorem_gfe_k_2d(&no_h),
            Err(Error::MissingInput(_))
        ));
    }

    #[test]
    fn gfe_q_2d_examples() {
        let sc = Scenario::new()
            .with_l(7)
            .with_n(1)
            .with_d(5)
            .with_coeffs(cd(1, 0, 0), cd(-1, 1, 1), cd(1, 4, 2))
            .with_h_plus(odd());
        let c = check_theorem_gfe_q_layers_2d(&sc).unwrap();
        assert!(c.applies(), "{:?}", c.failed_labels());
        assert!(c.checks.iter().any(|x| x.evidence == "2^6 mod 49 = 15"));
        assert!(c.checks.iter().any(|x| x.evidence == "5^6 mod 49 = 43"));
        assert!(
            c.checks
                .iter()
                .find(|x| x.label == H_PLUS_ODD)
                .unwrap()
                .caveat
        );
        let fails = |sc: Scenario| {
            check_theorem_gfe_q_layers_2d(&sc)
                .unwrap()
                .failed_labels()
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(fails(sc.clone().with_d(97)), vec![D_NON_WIEFERICH, D_MOD32]);
        assert_eq!(fails(sc.clone().with_d(17)), vec![D_MOD32]);
        assert_eq!(fails(sc.clone().with_d(3)), vec![D_MOD4]);
        assert_eq!(fails(sc.clone().with_d(197)), vec![D_NON_WIEFERICH]);
        assert_eq!(fails(sc.clone().with_l(13).with_d(13)), vec![D_NE_L]);
        assert_eq!(
            fails(sc.clone().with_h_plus("even:table".parse().unwrap())),
            vec![H_PLUS_ODD]
        );
        assert_eq!(fails(sc.clone().with_n(0)), vec![N_POSITIVE]);
    }

    #[test]
    fn flipping_any_verdict_kills_the_conclusion() {
        let sc = Scenario::new()
            .with_l(7)
            .with_n(1)
            .with_d(5)
            .with_coeffs(cd(1, 0, 0), cd(-1, 1, 1), cd(1, 4, 2))
            .with_h_plus(odd());
        let q = NumberField::rationals();
        let certs = [
            check_theorem_gfe_q_layers_2d(&sc).unwrap(),
            check_theorem_aflt_layers(&sc.clone().with_field(&q)).unwrap(),
            check_theorem_gfe_k_2d(&sc.clone().with_field(&q)).unwrap(),
            check_prop_bound(&sc.clone().with_field(&q)).unwrap(),
        ];
        for c in certs {
            assert!(c.applies(), "{:?} {:?}", c.theorem_id, c.failed_labels());
            for i in 0..c.checks.len() {
                let mut m = c.clone();
                m.checks[i].verdict = false;
                m.recompute();
                assert_eq!(m.conclusion, NOT_APPLICABLE);
            }
        }
    }

    #[test]
    fn odd_squares() {
        let s = odd_squares_mod32();
        assert_eq!(s, BTreeSet::from([1, 9, 17, 25]));
        assert!(s.contains(&9) && s.contains(&17));
    }

    #[test]
    fn valid_d_search() {
        assert_eq!(search_valid_d(7, 30).unwrap(), vec![5, 13, 29]);
        assert_eq!(search_valid_d(7, 4).unwrap(), Vec::<u64>::new());
        assert_eq!(search_valid_d(5, 20).unwrap(), vec![13]);
        // independent oracle for the residues quoted in the examples
        for d in [13u64, 29] {
            let r = (1..=6).fold(1u64, |a, _| a * d % 49);
            assert_ne!(r, 1);
        }
        assert_eq!((1..=4).fold(1u64, |a, _| a * 13 % 25), 11);
        assert!(matches!(
            search_valid_d(1093, 10),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(search_valid_d(3, 10), Err(Error::Domain(_))));
    }

    #[test]
    fn search_results_certify() {
        for l in [5u64, 7, 11, 13] {
            for d in search_valid_d(l, 400).unwrap() {
                let sc = Scenario::new()
                    .with_l(l)
                    .with_n(1)
                    .with_d(d)
                    .with_coeffs(cd(1, 0, 0), cd(1, 0, 0), cd(-1, 1, 0))
                    .with_h_plus(odd());
                let c = check_theorem_gfe_q_layers_2d(&sc).unwrap();
                assert!(c.applies(), "l={l} d={d} {:?}", c.failed_labels());
            }
        }
    }

    #[test]
    fn prop_bound_square_test() {
        let q = NumberField::rationals();
        let sc = Scenario::new().with_field(&q).with_h_plus(odd());
        // over Q: d is a square mod 32 iff d mod 32 is an odd square
        for d in [5u64, 13, 17, 29, 37, 41, 53] {
            let c = check_prop_bound(&sc.clone().with_d(d)).unwrap();
            assert_eq!(verdict(&c, D_NOT_SQUARE), !in_odd_squares(d), "d = {d}");
        }
        let k = cubic();
        let c =
            check_prop_bound(&Scenario::new().with_field(&k).with_d(5).with_h_plus(odd())).unwrap();
        // 5^3 = 29 mod 32 is not an odd square, so no v can exist
        assert!(verdict(&c, D_NOT_SQUARE));
        // 1 is always a square
        assert!(d_square_mod_32(&k, 1));
        assert!(d_square_mod_32(&k, 9));
    }

    #[test]
    fn prop_bound_large_degree_uses_norm_criterion() {
        let layer = build_layer(5, 1, 25).unwrap();
        let k = layer.field.clone();
        assert!(split_prime(&k, 2).unwrap().certified_inert());
        let c = check_prop_bound(&Scenario::new().with_field(&k).with_d(13).with_h_plus(odd()))
            .unwrap();
        let e = &c
            .checks
            .iter()
            .find(|x| x.label == D_NOT_SQUARE)
            .unwrap()
            .evidence;
        assert!(e.starts_with("exhaustive"), "{e}");
    }

    #[test]
    fn certificate_round_trip_and_determinism() {
        let sc = Scenario::new()
            .with_l(7)
            .with_n(1)
            .with_d(5)
            .with_coeffs(cd(1, 0, 0), cd(-1, 1, 1), cd(1, 4, 2))
            .with_h_plus(odd());
        let a = check_theorem_gfe_q_layers_2d(&sc).unwrap().to_json();
        let b = check_theorem_gfe_q_layers_2d(&sc).unwrap().to_json();
        assert_eq!(a, b);
        let back = Certificate::from_json(&a).unwrap();
        assert_eq!(back.to_json(), a);
        assert!(a.find("\"scenario\"").unwrap() < a.find("\"theorem_id\"").unwrap());
        assert!(a.contains("\"T_GFE_Q_layers_2d\""));
    }
}
