//! Sparse polynomials in four graded variables `f₀ … f₃` with rational
//! coefficients.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exponent vector `(e₀, e₁, e₂, e₃)` of `f₀^e₀ f₁^e₁ f₂^e₂ f₃^e₃`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial4 {
    pub e: [u32; 4],
}

impl Monomial4 {
    pub fn new(e: [u32; 4]) -> Self {
        Monomial4 { e }
    }

    pub fn one() -> Self {
        Monomial4 { e: [0; 4] }
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0; 4];
        e[i] = 1;
        Monomial4 { e }
    }

    pub fn degree(&self) -> u32 {
        self.e.iter().sum()
    }

    pub fn times(&self, other: &Monomial4) -> Monomial4 {
        Monomial4 { e: std::array::from_fn(|i| self.e[i] + other.e[i]) }
    }

    /// `self / other` when `other` divides `self`.
    pub fn divided_by(&self, other: &Monomial4) -> Option<Monomial4> {
        let mut e = [0; 4];
        for i in 0..4 {
            e[i] = self.e[i].checked_sub(other.e[i])?;
        }
        Some(Monomial4 { e })
    }
}

impl fmt::Display for Monomial4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.e.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "·")?;
            }
            first = false;
            write!(f, "f{i}")?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// All monomials of total degree `d`, in descending lexicographic order
/// (`f₀^d` first, `f₃^d` last).
pub fn monomials_of_degree(d: u32) -> Vec<Monomial4> {
    let mut out = Vec::with_capacity(binomial(d as i64 + 3, 3) as usize);
    for e0 in (0..=d).rev() {
        for e1 in (0..=d - e0).rev() {
            for e2 in (0..=d - e0 - e1).rev() {
                out.push(Monomial4::new([e0, e1, e2, d - e0 - e1 - e2]));
            }
        }
    }
    out
}

/// `C(n, k)`, with the convention that it vanishes for `n < k` or `k < 0`.
pub fn binomial(n: i64, k: i64) -> u64 {
    if k < 0 || n < k {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Monomials of one degree together with their positions, used to index
/// matrix rows and columns.
#[derive(Debug, Clone)]
pub struct MonomialBasis {
    pub degree: u32,
    list: Vec<Monomial4>,
    index: HashMap<Monomial4, usize>,
}

impl MonomialBasis {
    pub fn new(degree: u32) -> Self {
        let list = monomials_of_degree(degree);
        let index = list.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        MonomialBasis { degree, list, index }
    }

    /// Basis for a possibly negative degree; empty below zero.
    pub fn of_signed(degree: i64) -> Self {
        if degree < 0 {
            MonomialBasis { degree: 0, list: Vec::new(), index: HashMap::new() }
        } else {
            Self::new(degree as u32)
        }
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial4] {
        &self.list
    }

    pub fn position(&self, m: &Monomial4) -> Option<usize> {
        self.index.get(m).copied()
    }
}

/// Polynomial in `f₀ … f₃`; only nonzero coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparsePoly {
    terms: BTreeMap<Monomial4, BigRational>,
}

impl SparsePoly {
    pub fn zero() -> Self {
        SparsePoly::default()
    }

    pub fn one() -> Self {
        Self::monomial(Monomial4::one(), BigRational::one())
    }

    /// The variable `f_i`.
    pub fn var(i: usize) -> Self {
        Self::monomial(Monomial4::var(i), BigRational::one())
    }

    pub fn monomial(m: Monomial4, c: BigRational) -> Self {
        let mut p = SparsePoly::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial4, BigRational)>) -> Self {
        let mut p = SparsePoly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c·m`, dropping the term if it cancels.
    pub fn add_term(&mut self, m: Monomial4, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial4, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial4) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Common degree of all terms, or `None` for the zero polynomial or a
    /// non-homogeneous one.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(Monomial4::degree);
        let d = degrees.next()?;
        degrees.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    pub fn scale(&self, c: &BigRational) -> SparsePoly {
        if c.is_zero() {
            return SparsePoly::zero();
        }
        SparsePoly { terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect() }
    }

    pub fn times_monomial(&self, m: &Monomial4) -> SparsePoly {
        SparsePoly { terms: self.terms.iter().map(|(k, x)| (k.times(m), x.clone())).collect() }
    }

    /// Coordinates in the monomial basis of `basis`; `None` if a term lies
    /// outside it.
    pub fn coordinates(&self, basis: &MonomialBasis) -> Option<Vec<(usize, BigRational)>> {
        let mut out: Vec<_> = self
            .terms
            .iter()
            .map(|(m, c)| basis.position(m).map(|i| (i, c.clone())))
            .collect::<Option<_>>()?;
        out.sort_by_key(|(i, _)| *i);
        Some(out)
    }
}

/// Exact product.
pub fn poly_mul(p: &SparsePoly, q: &SparsePoly) -> SparsePoly {
    let mut out = SparsePoly::zero();
    for (m1, c1) in &p.terms {
        for (m2, c2) in &q.terms {
            out.add_term(m1.times(m2), c1 * c2);
        }
    }
    out
}

impl Add for &SparsePoly {
    type Output = SparsePoly;
    fn add(self, rhs: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &SparsePoly {
    type Output = SparsePoly;
    fn sub(self, rhs: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        SparsePoly { terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }
}

impl Mul for &SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: &SparsePoly) -> SparsePoly {
        poly_mul(self, rhs)
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})·{m}")?;
        }
        Ok(())
    }
}

/// `"num/den"`, or just `"num"` for integers.
pub fn rational_to_string(c: &BigRational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| format!("bad numerator in {s:?}"))?;
    let den: BigInt = den.parse().map_err(|_| format!("bad denominator in {s:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(num, den))
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffRepr {
    Text(String),
    Int(i64),
}

#[derive(Serialize, Deserialize)]
struct TermRepr(u32, u32, u32, u32, CoeffRepr);

impl Serialize for SparsePoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<TermRepr> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| TermRepr(m.e[0], m.e[1], m.e[2], m.e[3], CoeffRepr::Text(rational_to_string(c))))
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SparsePoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let terms = Vec::<TermRepr>::deserialize(d)?;
        let mut p = SparsePoly::zero();
        for TermRepr(e0, e1, e2, e3, c) in terms {
            let c = match c {
                CoeffRepr::Text(t) => parse_rational(&t).map_err(D::Error::custom)?,
                CoeffRepr::Int(n) => BigRational::from_integer(n.into()),
            };
            p.add_term(Monomial4::new([e0, e1, e2, e3]), c);
        }
        Ok(p)
    }
}
