//! Meromorphic tensors on projective space with poles along a divisor, and
//! the conditions under which they become holomorphic on coverings
//! ramified over that divisor.
//!
//! A candidate of type `(n, p, k)` is given by pole order `N` along `Q` and
//! one homogeneous polynomial `A_I` for each `p`-subset `I ⊂ {1..n}`. The
//! membership conditions are divisibility statements in the coordinate `X⁰`;
//! the thresholds `d ≤ D` bound the admissible pole order.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exact::poly::{parse_rational, rational_to_string};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoveringError {
    #[error("divisor has no components")]
    EmptyDivisor,
    #[error("malformed candidate: {0}")]
    MalformedCandidate(String),
    #[error("invalid divisor: {0}")]
    InvalidDivisor(String),
    #[error("the pullback oracle covers p = 1 with multiplicity 1 only (got p = {p}, a = {a})")]
    UnsupportedCase { p: usize, a: u32 },
    #[error("weight {0} is not divisible by 12")]
    BadWeight(u32),
}

pub type Result<T> = std::result::Result<T, CoveringError>;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Polynomial in `X⁰ … Xⁿ`, stored by exponent vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl HomogPoly {
    pub fn zero(nvars: usize) -> Self {
        HomogPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn var(nvars: usize, j: usize) -> Self {
        let mut e = vec![0; nvars];
        e[j] = 1;
        Self::monomial(e, BigRational::one())
    }

    pub fn monomial(exponents: Vec<u32>, c: BigRational) -> Self {
        let mut p = HomogPoly::zero(exponents.len());
        p.add_term(exponents, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, BigRational)>) -> Self {
        let mut p = HomogPoly::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, c: BigRational) {
        assert_eq!(exponents.len(), self.nvars, "exponent vector length");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponents.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exponents);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }

    /// Common total degree; `None` for zero or inhomogeneous polynomials.
    pub fn degree(&self) -> Option<u32> {
        let mut ds = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let d = ds.next()?;
        ds.all(|x| x == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    /// Largest `e` with `(X⁰)^e` dividing the polynomial; `None` for zero.
    pub fn x0_order(&self) -> Option<u32> {
        self.terms.keys().map(|e| e[0]).min()
    }

    /// Term with the lowest power of `X⁰` (first in exponent order on ties).
    pub fn lowest_x0_term(&self) -> Option<(Vec<u32>, BigRational)> {
        self.terms
            .iter()
            .min_by_key(|(e, _)| e[0])
            .map(|(e, c)| (e.clone(), c.clone()))
    }

    pub fn scale(&self, c: &BigRational) -> HomogPoly {
        if c.is_zero() {
            return HomogPoly::zero(self.nvars);
        }
        HomogPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect() }
    }

    pub fn add(&self, other: &HomogPoly) -> HomogPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &HomogPoly) -> HomogPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = HomogPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn times_var(&self, j: usize) -> HomogPoly {
        HomogPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e = e.clone();
                    e[j] += 1;
                    (e, c.clone())
                })
                .collect(),
        }
    }

    /// `t ↦ P(base + t·dir)` as coefficients in increasing degree.
    pub fn restrict_to_line(&self, base: &[BigRational], dir: &[BigRational]) -> Univariate {
        let mut out = Univariate::zero();
        for (e, c) in &self.terms {
            let mut term = Univariate::constant(c.clone());
            for (i, &k) in e.iter().enumerate() {
                let lin = Univariate(vec![base[i].clone(), dir[i].clone()]).trimmed();
                for _ in 0..k {
                    term = term.mul(&lin);
                }
            }
            out = out.add(&term);
        }
        out
    }
}

impl fmt::Display for HomogPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", rational_to_string(c))?;
            for (i, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => write!(f, "·X{i}")?,
                    _ => write!(f, "·X{i}^{x}")?,
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Int(i64),
    Text(String),
}

impl Serialize for HomogPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Entry>> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let mut row: Vec<Entry> = e.iter().map(|&x| Entry::Int(x as i64)).collect();
                row.push(Entry::Text(rational_to_string(c)));
                row
            })
            .collect();
        rows.serialize(s)
    }
}

/// Terms as read from JSON, before the number of variables is known.
#[derive(Debug, Clone, Default)]
pub struct RawPoly(Vec<(Vec<u32>, BigRational)>);

impl<'de> Deserialize<'de> for RawPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Entry>>::deserialize(d)?;
        let mut out = Vec::with_capacity(rows.len());
        for row in rows {
            let Some((coeff, exps)) = row.split_last() else {
                return Err(D::Error::custom("empty term"));
            };
            let c = match coeff {
                Entry::Int(n) => q(*n),
                Entry::Text(t) => parse_rational(t).map_err(D::Error::custom)?,
            };
            let e = exps
                .iter()
                .map(|x| match x {
                    Entry::Int(n) if *n >= 0 => Ok(*n as u32),
                    _ => Err(D::Error::custom("exponents must be nonnegative integers")),
                })
                .collect::<std::result::Result<Vec<u32>, _>>()?;
            out.push((e, c));
        }
        Ok(RawPoly(out))
    }
}

impl RawPoly {
    pub fn into_poly(self, nvars: usize) -> Result<HomogPoly> {
        let mut p = HomogPoly::zero(nvars);
        for (e, c) in self.0 {
            if e.len() != nvars {
                return Err(CoveringError::MalformedCandidate(format!(
                    "term has {} exponents, expected {nvars}",
                    e.len()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }
}

/// Dense univariate polynomial over the rationals, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Univariate(pub Vec<BigRational>);

impl Univariate {
    pub fn zero() -> Self {
        Univariate(Vec::new())
    }

    pub fn constant(c: BigRational) -> Self {
        Univariate(vec![c]).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let get = |v: &Vec<BigRational>, i: usize| v.get(i).cloned().unwrap_or_else(BigRational::zero);
        Univariate((0..n).map(|i| get(&self.0, i) + get(&other.0, i)).collect()).trimmed()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Univariate::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Univariate(out).trimmed()
    }

    pub fn derivative(&self) -> Self {
        Univariate(self.0.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect()).trimmed()
    }

    /// Remainder of division by a nonzero polynomial.
    pub fn rem(&self, d: &Self) -> Self {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.0[dd].clone();
        let mut r = self.0.clone();
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1;
            let factor = &r[k] / &lead;
            for (i, c) in d.0.iter().enumerate() {
                let idx = k - dd + i;
                r[idx] = &r[idx] - &factor * c;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        Univariate(r)
    }

    /// Exact quotient when `d` divides `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let dd = d.degree()?;
        let lead = d.0[dd].clone();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return r.is_empty().then(Univariate::zero);
        }
        let mut quot = vec![BigRational::zero(); r.len() - dd];
        for k in (dd..r.len()).rev() {
            let factor = &r[k] / &lead;
            for (i, c) in d.0.iter().enumerate() {
                let idx = k - dd + i;
                r[idx] = &r[idx] - &factor * c;
            }
            quot[k - dd] = factor;
        }
        r.iter().all(Zero::is_zero).then(|| Univariate(quot).trimmed())
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    fn monic(self) -> Self {
        match self.0.last().cloned() {
            Some(lead) => Univariate(self.0.iter().map(|c| c / &lead).collect()),
            None => self,
        }
    }
}

/// Deterministic pseudo-random lines used for generic restrictions.
fn test_lines(nvars: usize, count: usize) -> Vec<(Vec<BigRational>, Vec<BigRational>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..count)
        .map(|_| {
            let mut v = || (0..nvars).map(|_| q(rng.gen_range(-9..=9))).collect::<Vec<_>>();
            (v(), v())
        })
        .collect()
}

const LINE_TRIALS: usize = 8;

/// Restrictions of `p` to the test lines on which its degree is preserved.
fn generic_restrictions(p: &HomogPoly) -> Vec<(Univariate, (Vec<BigRational>, Vec<BigRational>))> {
    let deg = p.degree().unwrap_or(0) as usize;
    test_lines(p.nvars, LINE_TRIALS)
        .into_iter()
        .map(|line| (p.restrict_to_line(&line.0, &line.1), line))
        .filter(|(u, _)| u.degree() == Some(deg))
        .collect()
}

/// Square-freeness via `gcd(p, p′)` on a generic line: a repeated factor of
/// `p` survives on every line, while a square-free `p` stays square-free on
/// generic ones.
pub fn is_square_free(p: &HomogPoly) -> bool {
    if p.is_zero() {
        return false;
    }
    generic_restrictions(p)
        .iter()
        .any(|(u, _)| u.gcd(&u.derivative()).degree() == Some(0))
}

/// Coprimality via `gcd` of restrictions to a shared generic line.
pub fn are_coprime(a: &HomogPoly, b: &HomogPoly) -> bool {
    let (da, db) = (a.degree().unwrap_or(0) as usize, b.degree().unwrap_or(0) as usize);
    test_lines(a.nvars, LINE_TRIALS).iter().any(|(base, dir)| {
        let (ua, ub) = (a.restrict_to_line(base, dir), b.restrict_to_line(base, dir));
        ua.degree() == Some(da) && ub.degree() == Some(db) && ua.gcd(&ub).degree() == Some(0)
    })
}

/// Largest `e` with `q^e | a`, judged on generic lines; `None` if `a = 0`.
pub fn multiplicity_along(a: &HomogPoly, qpoly: &HomogPoly) -> Option<u32> {
    if a.is_zero() {
        return None;
    }
    let lines: Vec<_> = generic_restrictions(qpoly).into_iter().map(|(_, l)| l).collect();
    let per_line = |(base, dir): &(Vec<BigRational>, Vec<BigRational>)| {
        let qa = qpoly.restrict_to_line(base, dir);
        let mut ua = a.restrict_to_line(base, dir);
        let mut e = 0;
        while let Some(next) = ua.div_exact(&qa) {
            if next.is_zero() {
                break;
            }
            ua = next;
            e += 1;
        }
        e
    };
    lines.iter().map(per_line).min()
}

/// `Σ a_m·Z(Q_m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorSpec {
    pub components: Vec<(HomogPoly, u32)>,
}

impl DivisorSpec {
    pub fn new(components: Vec<(HomogPoly, u32)>) -> Self {
        DivisorSpec { components }
    }

    pub fn multiplicities(&self) -> Vec<u32> {
        self.components.iter().map(|(_, a)| *a).collect()
    }

    /// Each component homogeneous, square-free and prime to `X⁰`; components
    /// pairwise coprime.
    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(CoveringError::EmptyDivisor);
        }
        let nvars = self.components[0].0.nvars;
        for (i, (p, _)) in self.components.iter().enumerate() {
            check_divisor_poly(p, nvars).map_err(|m| CoveringError::InvalidDivisor(format!("component {i}: {m}")))?;
        }
        for i in 0..self.components.len() {
            for j in i + 1..self.components.len() {
                if !are_coprime(&self.components[i].0, &self.components[j].0) {
                    return Err(CoveringError::InvalidDivisor(format!("components {i} and {j} share a factor")));
                }
            }
        }
        Ok(())
    }
}

fn check_divisor_poly(p: &HomogPoly, nvars: usize) -> std::result::Result<(), String> {
    if p.nvars != nvars {
        return Err(format!("{} variables, expected {nvars}", p.nvars));
    }
    match p.degree() {
        None => return Err("zero or inhomogeneous".into()),
        Some(0) => return Err("constant".into()),
        Some(_) => {}
    }
    if p.x0_order() != Some(0) {
        return Err("divisible by X0".into());
    }
    if !is_square_free(p) {
        return Err("not square-free".into());
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    pub d: u64,
    #[serde(rename = "D")]
    pub big_d: u64,
}

pub fn thresholds(divisor: &DivisorSpec, k: u64) -> Result<Thresholds> {
    thresholds_for(&divisor.multiplicities(), k)
}

/// `d = max ⌊a·k/(a+1)⌋`, `D = max ⌊a·(k+1)/(a+1)⌋`.
pub fn thresholds_for(multiplicities: &[u32], k: u64) -> Result<Thresholds> {
    if multiplicities.is_empty() {
        return Err(CoveringError::EmptyDivisor);
    }
    let d = multiplicities.iter().map(|&a| a as u64 * k / (a as u64 + 1)).max().unwrap();
    let big_d = multiplicities.iter().map(|&a| a as u64 * (k + 1) / (a as u64 + 1)).max().unwrap();
    Ok(Thresholds { d, big_d })
}

/// Position of the pole order relative to the thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoleBand {
    /// `N ≤ d`: covering-holomorphic.
    Holomorphic,
    /// `d < N ≤ D`: not decided by the thresholds.
    Indeterminate,
    /// `N > D`: not covering-holomorphic.
    NotHolomorphic,
}

pub fn pole_band(pole_order: i64, t: &Thresholds) -> PoleBand {
    if pole_order <= t.d as i64 {
        PoleBand::Holomorphic
    } else if pole_order <= t.big_d as i64 {
        PoleBand::Indeterminate
    } else {
        PoleBand::NotHolomorphic
    }
}

/// Increasing subset of `{1..n}`.
pub type IndexSet = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorCandidate {
    pub n: usize,
    pub p: usize,
    pub k: u64,
    pub pole_order: i64,
    /// Missing subsets carry the zero polynomial.
    pub coeffs: BTreeMap<IndexSet, HomogPoly>,
}

/// JSON shape: `{"n", "p", "k", "N", "A": {"1,2": [terms…]}, "Q": [terms…]}`.
#[derive(Debug, Clone, Deserialize)]
pub struct CandidateRecord {
    #[serde(default)]
    pub name: Option<String>,
    pub n: usize,
    pub p: usize,
    pub k: u64,
    #[serde(rename = "N")]
    pub pole_order: i64,
    #[serde(rename = "A")]
    pub coeffs: BTreeMap<String, RawPoly>,
    #[serde(rename = "Q")]
    pub divisor: RawPoly,
    /// Multiplicity of the divisor; 1 when omitted.
    #[serde(default)]
    pub multiplicity: Option<u32>,
    #[serde(default)]
    pub expect: Option<String>,
}

fn parse_index_set(key: &str) -> Result<IndexSet> {
    let key = key.trim();
    if key.is_empty() {
        return Ok(Vec::new());
    }
    key.split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| CoveringError::MalformedCandidate(format!("bad index set {key:?}"))))
        .collect()
}

pub fn format_index_set(i: &IndexSet) -> String {
    i.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

impl CandidateRecord {
    pub fn into_parts(self) -> Result<(TensorCandidate, HomogPoly)> {
        let nvars = self.n + 1;
        let mut coeffs = BTreeMap::new();
        for (key, raw) in self.coeffs {
            coeffs.insert(parse_index_set(&key)?, raw.into_poly(nvars)?);
        }
        let candidate = TensorCandidate { n: self.n, p: self.p, k: self.k, pole_order: self.pole_order, coeffs };
        Ok((candidate, self.divisor.into_poly(nvars)?))
    }
}

fn subsets(pool: &[usize], size: usize) -> Vec<IndexSet> {
    if size == 0 {
        return vec![Vec::new()];
    }
    if pool.len() < size {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &x) in pool.iter().enumerate() {
        for mut rest in subsets(&pool[i + 1..], size - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

impl TensorCandidate {
    pub fn index_sets(&self) -> Vec<IndexSet> {
        subsets(&(1..=self.n).collect::<Vec<_>>(), self.p)
    }

    pub fn coeff(&self, i: &IndexSet) -> HomogPoly {
        self.coeffs.get(i).cloned().unwrap_or_else(|| HomogPoly::zero(self.n + 1))
    }

    fn check_structure(&self, divisor: &HomogPoly) -> Result<()> {
        let bad = |m: String| Err(CoveringError::MalformedCandidate(m));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.p > self.n {
            return bad(format!("p = {} exceeds n = {}", self.p, self.n));
        }
        let valid = self.index_sets();
        for (i, a) in &self.coeffs {
            if !valid.contains(i) {
                return bad(format!("{{{}}} is not a {}-subset of 1..{}", format_index_set(i), self.p, self.n));
            }
            if a.nvars != self.n + 1 {
                return bad(format!("A_{{{}}} has {} variables", format_index_set(i), a.nvars));
            }
            if !a.is_homogeneous() {
                return bad(format!("A_{{{}}} is not homogeneous", format_index_set(i)));
            }
        }
        if divisor.nvars != self.n + 1 || divisor.degree().is_none() {
            return bad("Q must be a nonzero homogeneous polynomial in n + 1 variables".into());
        }
        Ok(())
    }

    /// The same candidate with every coefficient multiplied by `c`.
    pub fn scaled(&self, c: &BigRational) -> TensorCandidate {
        TensorCandidate { coeffs: self.coeffs.iter().map(|(i, a)| (i.clone(), a.scale(c))).collect(), ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    #[serde(rename = "1")]
    NonnegativePole,
    #[serde(rename = "2")]
    Degree,
    #[serde(rename = "3")]
    Divisibility,
    #[serde(rename = "4")]
    Alternating,
    #[serde(rename = "3'")]
    TopDegree,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::NonnegativePole => "1",
            Condition::Degree => "2",
            Condition::Divisibility => "3",
            Condition::Alternating => "4",
            Condition::TopDegree => "3'",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Index set of the offending coefficient (`I`) or alternating sum (`J`).
    pub at: String,
    pub exponents: Vec<u32>,
    pub coefficient: String,
    pub required_x0_power: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionResult {
    pub condition: Condition,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MembershipReport {
    pub conditions: Vec<ConditionResult>,
    pub member: bool,
}

impl MembershipReport {
    pub fn failed(&self) -> Vec<Condition> {
        self.conditions.iter().filter(|c| !c.pass).map(|c| c.condition).collect()
    }
}

fn divisibility(condition: Condition, at: String, poly: &HomogPoly, power: u32) -> Option<ConditionResult> {
    match poly.x0_order() {
        Some(e) if e < power => {
            let (exponents, c) = poly.lowest_x0_term().expect("nonzero");
            Some(ConditionResult {
                condition,
                pass: false,
                witness: Some(Witness { at, exponents, coefficient: rational_to_string(&c), required_x0_power: power }),
                detail: None,
            })
        }
        _ => None,
    }
}

fn passed(condition: Condition) -> ConditionResult {
    ConditionResult { condition, pass: true, witness: None, detail: None }
}

fn x0_power(c: &TensorCandidate, extra: usize) -> u32 {
    (c.k as usize * (c.n + 1) + extra) as u32
}

fn condition_one(c: &TensorCandidate) -> ConditionResult {
    if c.pole_order >= 0 {
        passed(Condition::NonnegativePole)
    } else {
        ConditionResult {
            condition: Condition::NonnegativePole,
            pass: false,
            witness: None,
            detail: Some(format!("N = {}", c.pole_order)),
        }
    }
}

fn condition_two(c: &TensorCandidate, divisor: &HomogPoly) -> ConditionResult {
    let want = c.pole_order * divisor.degree().unwrap_or(0) as i64;
    for (i, a) in &c.coeffs {
        if let Some(d) = a.degree() {
            if d as i64 != want {
                return ConditionResult {
                    condition: Condition::Degree,
                    pass: false,
                    witness: None,
                    detail: Some(format!("deg A_{{{}}} = {d}, expected {want}", format_index_set(i))),
                };
            }
        }
    }
    passed(Condition::Degree)
}

fn condition_three(c: &TensorCandidate) -> ConditionResult {
    let power = x0_power(c, c.p);
    for i in c.index_sets() {
        if let Some(fail) = divisibility(Condition::Divisibility, format_index_set(&i), &c.coeff(&i), power) {
            return fail;
        }
    }
    passed(Condition::Divisibility)
}

/// `Σ_{j ∉ J} (−1)^{pos(j, J∪{j})}·X^j·A_{J∪{j}}`, with 1-based positions.
pub fn alternating_sum(c: &TensorCandidate, j_set: &IndexSet) -> HomogPoly {
    let mut sum = HomogPoly::zero(c.n + 1);
    for j in (1..=c.n).filter(|j| !j_set.contains(j)) {
        let mut i = j_set.clone();
        i.push(j);
        i.sort_unstable();
        let pos = i.iter().position(|&x| x == j).unwrap() + 1;
        let sign = if pos % 2 == 0 { q(1) } else { q(-1) };
        sum = sum.add(&c.coeff(&i).times_var(j).scale(&sign));
    }
    sum
}

fn condition_four(c: &TensorCandidate) -> ConditionResult {
    if c.p == 0 {
        return passed(Condition::Alternating);
    }
    let power = x0_power(c, c.p + 1);
    let pool: Vec<usize> = (2..=c.n).collect();
    for j_set in subsets(&pool, c.p - 1) {
        let s = alternating_sum(c, &j_set);
        if let Some(fail) = divisibility(Condition::Alternating, format!("J={{{}}}", format_index_set(&j_set)), &s, power) {
            return fail;
        }
    }
    passed(Condition::Alternating)
}

fn condition_top(c: &TensorCandidate) -> ConditionResult {
    let all: IndexSet = (1..=c.n).collect();
    let power = x0_power(c, c.n + 1);
    divisibility(Condition::TopDegree, format_index_set(&all), &c.coeff(&all), power)
        .unwrap_or_else(|| passed(Condition::TopDegree))
}

/// Conditions 1–4 regardless of `p`.
pub fn general_conditions(c: &TensorCandidate, divisor: &HomogPoly) -> Result<MembershipReport> {
    c.check_structure(divisor)?;
    let conditions = vec![condition_one(c), condition_two(c, divisor), condition_three(c), condition_four(c)];
    let member = conditions.iter().all(|r| r.pass);
    Ok(MembershipReport { conditions, member })
}

/// Conditions 1–4, with the single divisibility condition 3′ replacing 3
/// and 4 in top degree `p = n`.
pub fn membership_conditions(c: &TensorCandidate, divisor: &HomogPoly) -> Result<MembershipReport> {
    if c.p != c.n {
        return general_conditions(c, divisor);
    }
    c.check_structure(divisor)?;
    let conditions = vec![condition_one(c), condition_two(c, divisor), condition_top(c)];
    let member = conditions.iter().all(|r| r.pass);
    Ok(MembershipReport { conditions, member })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holomorphic,
    NotHolomorphic,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoefficientVerdict {
    pub order: i64,
    /// `ord ≥ −⌊(k+1)/2⌋`.
    pub necessary: bool,
    /// `ord ≥ −⌊k/2⌋`.
    pub sufficient: bool,
    pub verdict: Verdict,
    /// For the last coefficient: the exact criterion `2·ord ≥ −(k+1)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<bool>,
}

/// Classifies coefficients of a `p = 1` tensor by their order along a
/// multiplicity-one component, following the local double-cover pullback.
/// The last entry of `orders` is the coefficient in the ramified direction.
pub fn pullback_order_oracle(orders: &[i64], k: u64, p: usize, a: u32) -> Result<Vec<CoefficientVerdict>> {
    if p != 1 || a != 1 {
        return Err(CoveringError::UnsupportedCase { p, a });
    }
    let k = k as i64;
    let last = orders.len().saturating_sub(1);
    Ok(orders
        .iter()
        .enumerate()
        .map(|(j, &ord)| {
            let necessary = ord >= -((k + 1) / 2);
            let sufficient = ord >= -(k / 2);
            let verdict = if sufficient {
                Verdict::Holomorphic
            } else if !necessary {
                Verdict::NotHolomorphic
            } else {
                Verdict::Indeterminate
            };
            CoefficientVerdict { order: ord, necessary, sufficient, verdict, exact: (j == last).then_some(2 * ord >= -(k + 1)) }
        })
        .collect())
}

/// Worst verdict over a list.
pub fn combined_verdict(vs: &[CoefficientVerdict]) -> Verdict {
    if vs.iter().any(|v| v.verdict == Verdict::NotHolomorphic) {
        Verdict::NotHolomorphic
    } else if vs.iter().any(|v| v.verdict == Verdict::Indeterminate) {
        Verdict::Indeterminate
    } else {
        Verdict::Holomorphic
    }
}

pub fn band_verdict(b: PoleBand) -> Verdict {
    match b {
        PoleBand::Holomorphic => Verdict::Holomorphic,
        PoleBand::Indeterminate => Verdict::Indeterminate,
        PoleBand::NotHolomorphic => Verdict::NotHolomorphic,
    }
}

/// Orders of the coefficients `A_I / Q^N` along `Q`; zero coefficients
/// are skipped.
pub fn coefficient_orders(c: &TensorCandidate, divisor: &HomogPoly) -> Vec<i64> {
    c.index_sets()
        .iter()
        .filter_map(|i| multiplicity_along(&c.coeff(i), divisor))
        .map(|m| m as i64 - c.pole_order)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TensorCheck {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    pub p: usize,
    pub k: u64,
    #[serde(rename = "N")]
    pub pole_order: i64,
    pub membership: MembershipReport,
    pub thresholds: Thresholds,
    /// Pole order after cancelling factors of `Q` common to all coefficients.
    pub effective_pole_order: i64,
    pub band: PoleBand,
    /// Present for `p = 1`, multiplicity-one divisors.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_agrees: Option<bool>,
}

/// Membership, thresholds and (where supported) the pullback oracle for one
/// candidate.
pub fn check_candidate(record: CandidateRecord) -> Result<TensorCheck> {
    let name = record.name.clone();
    let a = record.multiplicity.unwrap_or(1);
    let (c, divisor) = record.into_parts()?;
    check_divisor_poly(&divisor, c.n + 1).map_err(CoveringError::InvalidDivisor)?;
    let membership = membership_conditions(&c, &divisor)?;
    let t = thresholds_for(&[a], c.k)?;
    let orders = coefficient_orders(&c, &divisor);
    let effective_pole_order = orders.iter().map(|o| -o).max().unwrap_or(0).max(0);
    let band = pole_band(effective_pole_order, &t);
    let oracle = match pullback_order_oracle(&orders, c.k, c.p, a) {
        Ok(v) => Some(combined_verdict(&v)),
        Err(CoveringError::UnsupportedCase { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(TensorCheck {
        name,
        n: c.n,
        p: c.p,
        k: c.k,
        pole_order: c.pole_order,
        membership,
        thresholds: t,
        effective_pole_order,
        band,
        oracle,
        oracle_agrees: oracle.map(|v| v == band_verdict(band)),
    })
}

/// Exponent bookkeeping linking weight-`r` vector-valued forms to tensors on
/// `P³` with poles along the ramification quadrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CorrespondenceNote {
    pub r: u32,
    pub s: u32,
    pub tensor_exponent: u32,
    pub thresholds: Thresholds,
    /// Pole order along the quadrics, `⌊2s·a/(a+1)⌋` with `a = 1`.
    pub pole_order: u32,
    /// Matching power of `χ₅` in the denominator (`χ₅² = ∏ Q_m`).
    pub chi5_pole_order: u32,
    pub f0_exponent: u32,
    pub coefficient_degree: u32,
    /// `coefficient_degree + f0_exponent = deg χ₅^{chi5_pole_order}`.
    pub degree_balance: bool,
}

pub fn modular_correspondence_note(r: u32) -> Result<CorrespondenceNote> {
    if r == 0 || r % 12 != 0 {
        return Err(CoveringError::BadWeight(r));
    }
    let s = r / 12;
    let tensor_exponent = 2 * s;
    let t = thresholds_for(&[1], tensor_exponent as u64)?;
    let pole_order = t.d as u32;
    let chi5_pole_order = 2 * pole_order;
    let f0_exponent = 8 * s + 1;
    let coefficient_degree = 12 * s - 1;
    // χ₅ has degree 10 in the f_a.
    let degree_balance = coefficient_degree + f0_exponent == 10 * chi5_pole_order;
    Ok(CorrespondenceNote {
        r,
        s,
        tensor_exponent,
        thresholds: t,
        pole_order,
        chi5_pole_order,
        f0_exponent,
        coefficient_degree,
        degree_balance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(nvars: usize, terms: &[(&[u32], i64)]) -> HomogPoly {
        HomogPoly::from_terms(nvars, terms.iter().map(|(e, c)| (e.to_vec(), q(*c))))
    }

    fn candidate(n: usize, p: usize, k: u64, pole: i64, coeffs: Vec<(IndexSet, HomogPoly)>) -> TensorCandidate {
        TensorCandidate { n, p, k, pole_order: pole, coeffs: coeffs.into_iter().collect() }
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(thresholds_for(&[1, 1], 2).unwrap(), Thresholds { d: 1, big_d: 1 });
        assert_eq!(thresholds_for(&[1], 1).unwrap(), Thresholds { d: 0, big_d: 1 });
        assert_eq!(thresholds_for(&[1, 2], 6).unwrap(), Thresholds { d: 4, big_d: 4 });
        assert_eq!(thresholds_for(&[], 3), Err(CoveringError::EmptyDivisor));
        assert_eq!(thresholds(&DivisorSpec::new(vec![]), 3), Err(CoveringError::EmptyDivisor));
    }

    #[test]
    fn square_free_and_coprime() {
        let q1 = poly(2, &[(&[0, 2], 1), (&[2, 0], -1)]);
        assert!(is_square_free(&q1));
        let square = poly(2, &[(&[0, 2], 1), (&[1, 1], -2), (&[2, 0], 1)]);
        assert!(!is_square_free(&square));
        let x1 = HomogPoly::var(2, 1);
        assert!(are_coprime(&q1, &x1));
        assert!(!are_coprime(&q1, &q1));
        let shared = DivisorSpec::new(vec![(q1.clone(), 1), (q1, 2)]);
        assert!(matches!(shared.validate(), Err(CoveringError::InvalidDivisor(_))));
        let bad = DivisorSpec::new(vec![(poly(2, &[(&[1, 1], 1)]), 1)]);
        assert!(matches!(bad.validate(), Err(CoveringError::InvalidDivisor(_))));
    }

    #[test]
    fn multiplicity_detection() {
        let q2 = poly(3, &[(&[0, 2, 0], 1), (&[1, 0, 1], -1)]);
        let a = q2.mul(&q2).mul(&HomogPoly::var(3, 0));
        assert_eq!(multiplicity_along(&a, &q2), Some(2));
        assert_eq!(multiplicity_along(&HomogPoly::var(3, 1), &q2), Some(0));
        assert_eq!(multiplicity_along(&HomogPoly::zero(3), &q2), None);
    }

    #[test]
    fn projective_line_examples() {
        let q1 = poly(2, &[(&[0, 2], 1), (&[2, 0], -1)]);
        let pass = candidate(1, 1, 0, 1, vec![(vec![1], poly(2, &[(&[2, 0], 5)]))]);
        assert!(membership_conditions(&pass, &q1).unwrap().member);
        let fail = candidate(1, 1, 0, 1, vec![(vec![1], poly(2, &[(&[1, 1], 1)]))]);
        let report = membership_conditions(&fail, &q1).unwrap();
        assert_eq!(report.failed(), vec![Condition::TopDegree]);
        let w = report.conditions[2].witness.as_ref().unwrap();
        assert_eq!((w.exponents.clone(), w.required_x0_power), (vec![1, 1], 2));
    }

    #[test]
    fn cancellation_in_the_alternating_sum() {
        let q2 = poly(3, &[(&[0, 2, 0], 1), (&[1, 0, 1], -1)]);
        let c = candidate(
            2,
            1,
            0,
            1,
            vec![(vec![1], poly(3, &[(&[1, 0, 1], 1)])), (vec![2], poly(3, &[(&[1, 1, 0], -1)]))],
        );
        assert!(alternating_sum(&c, &vec![]).is_zero());
        assert!(membership_conditions(&c, &q2).unwrap().member);
    }

    #[test]
    fn malformed_candidates() {
        let q1 = poly(2, &[(&[0, 2], 1), (&[2, 0], -1)]);
        let wrong_set = candidate(1, 1, 0, 1, vec![(vec![2], poly(2, &[(&[2, 0], 1)]))]);
        assert!(matches!(membership_conditions(&wrong_set, &q1), Err(CoveringError::MalformedCandidate(_))));
        let inhomog = candidate(1, 1, 0, 1, vec![(vec![1], poly(2, &[(&[2, 0], 1), (&[1, 0], 1)]))]);
        assert!(matches!(membership_conditions(&inhomog, &q1), Err(CoveringError::MalformedCandidate(_))));
        let big_p = candidate(1, 2, 0, 1, vec![]);
        assert!(matches!(membership_conditions(&big_p, &q1), Err(CoveringError::MalformedCandidate(_))));
    }

    #[test]
    fn degree_mismatch_fails_condition_two() {
        let q1 = poly(2, &[(&[0, 2], 1), (&[2, 0], -1)]);
        let c = candidate(1, 1, 0, 2, vec![(vec![1], poly(2, &[(&[2, 0], 1)]))]);
        let r = membership_conditions(&c, &q1).unwrap();
        assert!(r.failed().contains(&Condition::Degree));
        let neg = candidate(1, 1, 0, -1, vec![]);
        assert!(membership_conditions(&neg, &q1).unwrap().failed().contains(&Condition::NonnegativePole));
    }

    #[test]
    fn oracle_examples() {
        let v = pullback_order_oracle(&[-1], 2, 1, 1).unwrap()[0];
        assert!(v.necessary && v.sufficient);
        assert_eq!(v.verdict, Verdict::Holomorphic);
        let v = pullback_order_oracle(&[-1], 1, 1, 1).unwrap()[0];
        assert!(v.necessary && !v.sufficient);
        assert_eq!(v.verdict, Verdict::Indeterminate);
        assert_eq!(v.exact, Some(true));
        assert_eq!(pullback_order_oracle(&[0], 0, 1, 1).unwrap()[0].verdict, Verdict::Holomorphic);
        assert_eq!(pullback_order_oracle(&[0], 0, 2, 1), Err(CoveringError::UnsupportedCase { p: 2, a: 1 }));
        assert_eq!(pullback_order_oracle(&[0], 0, 1, 2), Err(CoveringError::UnsupportedCase { p: 1, a: 2 }));
    }

    #[test]
    fn correspondence_notes() {
        let n = modular_correspondence_note(12).unwrap();
        assert_eq!((n.chi5_pole_order, n.f0_exponent, n.coefficient_degree), (2, 9, 11));
        assert!(n.degree_balance);
        let n = modular_correspondence_note(24).unwrap();
        assert_eq!((n.chi5_pole_order, n.f0_exponent, n.coefficient_degree), (4, 17, 23));
        assert_eq!(n.thresholds.d, n.thresholds.big_d);
        assert_eq!(modular_correspondence_note(6), Err(CoveringError::BadWeight(6)));
    }

    #[test]
    fn polynomial_json() {
        let p = poly(3, &[(&[1, 0, 2], 3), (&[0, 3, 0], -1)]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"[[1,0,2,"3"],[0,3,0,"-1"]]"#);
        let raw: RawPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(raw.clone().into_poly(3).unwrap(), p);
        assert!(raw.into_poly(4).is_err());
        assert!(serde_json::from_str::<RawPoly>(r#"[[-1,0,"1"]]"#).is_err());
    }

    #[test]
    fn univariate_gcd() {
        // (t−1)(t+2) and (t−1)(t−3)
        let a = Univariate(vec![q(-2), q(1), q(1)]);
        let b = Univariate(vec![q(3), q(-4), q(1)]);
        assert_eq!(a.gcd(&b), Univariate(vec![q(-1), q(1)]));
        assert_eq!(a.mul(&b).div_exact(&a), Some(b.clone()));
        assert_eq!(b.div_exact(&a), None);
        assert!(a.gcd(&a.derivative()).degree() == Some(0));
    }
}
