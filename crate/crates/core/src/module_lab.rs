//! Degreewise models of the two modules of `Sym²`-valued forms over the
//! polynomial ring `C[f₀, f₁, f₂, f₃]`.
//!
//! An even element of degree `r` is a tuple `(P₀, …, P₃)` of degree-`(r−1)`
//! polynomials, read as `Σ P_a·Df_a`, subject to `Σ f_a·P_a = 0`. An odd
//! element of degree `r` is an antisymmetric family `P_ab` of degree-`(r−4)`
//! polynomials, read as `Σ P_ab·Df_a∧Df_b`, subject to the four contractions
//! `Σ_a f_a·P_ab = 0`. Both are kernels of integer matrices, so every
//! dimension below is exact.

use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{
    binomial, kernel_basis, subspace_intersect, Monomial4, MonomialBasis, QMatrix, SparsePoly, SparseVec,
    SubspaceBasis,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("bracket indices must differ, got ({0}, {0})")]
    DuplicateIndex(usize),
    #[error("tribracket indices must satisfy i < j < k ≤ 3, got ({0}, {1}, {2})")]
    BadIndices(usize, usize, usize),
    #[error("index {0} is not a second-kind theta index")]
    IndexOutOfRange(usize),
}

/// Unordered pairs `a < b` in the fixed coordinate order of odd elements.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Triples `i < j < k`, the tribracket generators in order.
pub const TRIPLES: [(usize, usize, usize); 4] = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)];

pub fn pair_index(a: usize, b: usize) -> Option<usize> {
    PAIRS.iter().position(|&p| p == (a.min(b), a.max(b)))
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn f(i: usize) -> SparsePoly {
    SparsePoly::var(i)
}

fn signed_f(sign: i64, i: usize) -> SparsePoly {
    SparsePoly::var(i).scale(&q(sign))
}

/// Free module of rank `rank` over the polynomials of one degree, with
/// coordinates `slot·n + index(μ)`.
#[derive(Debug, Clone)]
pub struct FreeCoords {
    pub rank: usize,
    pub coeffs: MonomialBasis,
}

impl FreeCoords {
    pub fn new(rank: usize, coeff_degree: i64) -> Self {
        FreeCoords { rank, coeffs: MonomialBasis::of_signed(coeff_degree) }
    }

    pub fn ambient(&self) -> usize {
        self.rank * self.coeffs.len()
    }

    pub fn index(&self, slot: usize, m: &Monomial4) -> Option<usize> {
        self.coeffs.position(m).map(|i| slot * self.coeffs.len() + i)
    }

    pub fn vector(&self, polys: &[SparsePoly]) -> SparseVec {
        assert_eq!(polys.len(), self.rank);
        let mut v = Vec::new();
        for (slot, p) in polys.iter().enumerate() {
            for (m, c) in p.terms() {
                let i = self.index(slot, m).expect("polynomial has the coefficient degree");
                v.push((i, c.clone()));
            }
        }
        v.sort_by_key(|(i, _)| *i);
        v
    }

    pub fn polys(&self, v: &SparseVec) -> Vec<SparsePoly> {
        let n = self.coeffs.len();
        let mut out = vec![SparsePoly::zero(); self.rank];
        for (i, c) in v {
            out[i / n].add_term(self.coeffs.monomials()[i % n], c.clone());
        }
        out
    }

    /// Image of `v` under multiplication by the monomial `m`, expressed in
    /// `target`, whose coefficient degree must exceed ours by `deg m`.
    pub fn shift(&self, v: &SparseVec, m: &Monomial4, target: &FreeCoords) -> SparseVec {
        let n = self.coeffs.len();
        let mut out: SparseVec = v
            .iter()
            .map(|(i, c)| {
                let mu = self.coeffs.monomials()[i % n].times(m);
                (target.index(i / n, &mu).expect("degrees line up"), c.clone())
            })
            .collect();
        out.sort_by_key(|(i, _)| *i);
        out
    }
}

/// Even element `Σ P_a·Df_a` of degree `r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MPlusElement {
    pub r: u32,
    pub coeffs: [SparsePoly; 4],
}

impl MPlusElement {
    /// `Σ f_a·P_a`, zero for module elements.
    pub fn constraint(&self) -> SparsePoly {
        (0..4).fold(SparsePoly::zero(), |acc, a| &acc + &(&f(a) * &self.coeffs[a]))
    }

    pub fn satisfies_constraint(&self) -> bool {
        self.constraint().is_zero()
    }

    pub fn times(&self, m: &Monomial4) -> MPlusElement {
        MPlusElement {
            r: self.r + m.degree(),
            coeffs: self.coeffs.clone().map(|p| p.times_monomial(m)),
        }
    }

    pub fn negated(&self) -> MPlusElement {
        MPlusElement { r: self.r, coeffs: self.coeffs.clone().map(|p| -&p) }
    }

    pub fn coords(&self) -> SparseVec {
        FreeCoords::new(4, self.r as i64 - 1).vector(&self.coeffs)
    }
}

/// Odd element `Σ_{a<b} P_ab·Df_a∧Df_b` of degree `r`, stored in [`PAIRS`]
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MMinusElement {
    pub r: u32,
    pub coeffs: [SparsePoly; 6],
}

impl MMinusElement {
    /// `P_ab` with `P_ba = −P_ab` and `P_aa = 0`.
    pub fn get(&self, a: usize, b: usize) -> SparsePoly {
        match a.cmp(&b) {
            std::cmp::Ordering::Equal => SparsePoly::zero(),
            std::cmp::Ordering::Less => self.coeffs[pair_index(a, b).unwrap()].clone(),
            std::cmp::Ordering::Greater => -&self.coeffs[pair_index(a, b).unwrap()],
        }
    }

    /// The four contractions `Σ_a f_a·P_ab`, `b = 0..3`.
    pub fn constraints(&self) -> [SparsePoly; 4] {
        std::array::from_fn(|b| (0..4).fold(SparsePoly::zero(), |acc, a| &acc + &(&f(a) * &self.get(a, b))))
    }

    pub fn satisfies_constraints(&self) -> bool {
        self.constraints().iter().all(SparsePoly::is_zero)
    }

    pub fn times(&self, m: &Monomial4) -> MMinusElement {
        MMinusElement {
            r: self.r + m.degree(),
            coeffs: self.coeffs.clone().map(|p| p.times_monomial(m)),
        }
    }

    pub fn coords(&self) -> SparseVec {
        FreeCoords::new(6, self.r as i64 - 4).vector(&self.coeffs)
    }
}

/// `[f_i, f_j] = f_i·Df_j − f_j·Df_i`.
pub fn bracket_generator(i: usize, j: usize) -> Result<MPlusElement, ModuleError> {
    for x in [i, j] {
        if x > 3 {
            return Err(ModuleError::IndexOutOfRange(x));
        }
    }
    if i == j {
        return Err(ModuleError::DuplicateIndex(i));
    }
    let mut coeffs: [SparsePoly; 4] = Default::default();
    coeffs[j] = f(i);
    coeffs[i] = signed_f(-1, j);
    Ok(MPlusElement { r: 2, coeffs })
}

/// `{f_i, f_j, f_k} = f_i·Df_j∧Df_k − f_j·Df_i∧Df_k + f_k·Df_i∧Df_j`.
pub fn tribracket_generator(i: usize, j: usize, k: usize) -> Result<MMinusElement, ModuleError> {
    if !(i < j && j < k && k <= 3) {
        return Err(ModuleError::BadIndices(i, j, k));
    }
    let mut coeffs: [SparsePoly; 6] = Default::default();
    coeffs[pair_index(j, k).unwrap()] = f(i);
    coeffs[pair_index(i, k).unwrap()] = signed_f(-1, j);
    coeffs[pair_index(i, j).unwrap()] = f(k);
    Ok(MMinusElement { r: 5, coeffs })
}

fn brackets() -> Vec<MPlusElement> {
    PAIRS.iter().map(|&(i, j)| bracket_generator(i, j).unwrap()).collect()
}

fn tribrackets() -> Vec<MMinusElement> {
    TRIPLES.iter().map(|&(i, j, k)| tribracket_generator(i, j, k).unwrap()).collect()
}

/// Coordinates of the even module in degree `r`.
pub fn mplus_coords(r: u32) -> FreeCoords {
    FreeCoords::new(4, r as i64 - 1)
}

/// Coordinates of the odd module in degree `r`.
pub fn mminus_coords(r: u32) -> FreeCoords {
    FreeCoords::new(6, r as i64 - 4)
}

/// Kernel of `(P₀..P₃) ↦ Σ f_a·P_a` in degree `r`.
pub fn mplus_kernel(r: u32) -> SubspaceBasis {
    let src = mplus_coords(r);
    let rows = MonomialBasis::new(r);
    let mut columns = vec![Vec::new(); src.ambient()];
    for a in 0..4 {
        for mu in src.coeffs.monomials() {
            let col = src.index(a, mu).unwrap();
            let row = rows.position(&mu.times(&Monomial4::var(a))).unwrap();
            columns[col].push((row, BigRational::one()));
        }
    }
    let m = QMatrix::from_sparse_columns(rows.len(), &columns).expect("indices in range");
    kernel_basis(&m)
}

/// Joint kernel of the four contractions in degree `r`.
pub fn mminus_kernel(r: u32) -> SubspaceBasis {
    let src = mminus_coords(r);
    let targets = FreeCoords::new(4, r as i64 - 3);
    let mut columns = vec![Vec::new(); src.ambient()];
    for (p, &(a, b)) in PAIRS.iter().enumerate() {
        for mu in src.coeffs.monomials() {
            let col = src.index(p, mu).unwrap();
            // f_a·P_ab enters contraction b; f_b·P_ba = −f_b·P_ab enters contraction a.
            columns[col].push((targets.index(b, &mu.times(&Monomial4::var(a))).unwrap(), q(1)));
            columns[col].push((targets.index(a, &mu.times(&Monomial4::var(b))).unwrap(), q(-1)));
        }
    }
    let m = QMatrix::from_sparse_columns(targets.ambient(), &columns).expect("indices in range");
    kernel_basis(&m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModuleTag {
    #[serde(rename = "M+")]
    MPlus,
    #[serde(rename = "M-")]
    MMinus,
    /// Scalar forms with the multiplier of the `f_a` to the power `r`.
    #[serde(rename = "scalar")]
    Scalar,
    /// Scalar forms twisted by the square of that multiplier.
    #[serde(rename = "scalar-twisted")]
    ScalarTwisted,
    /// Scalar forms with trivial multiplier, indexed by integral weight.
    #[serde(rename = "scalar-trivial")]
    ScalarTrivial,
    /// Vector-valued forms with trivial multiplier, indexed by weight `k`.
    #[serde(rename = "trivial-combined")]
    TrivialCombined,
}

impl std::fmt::Display for ModuleTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        write!(f, "{}", s.as_str().unwrap_or_default())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertReport {
    pub module: ModuleTag,
    pub r: u32,
    pub computed: u64,
    pub formula: u64,
    #[serde(rename = "match")]
    pub matched: bool,
}

impl HilbertReport {
    fn new(module: ModuleTag, r: u32, computed: u64, formula: u64) -> Self {
        HilbertReport { module, r, computed, formula, matched: computed == formula }
    }
}

fn c(n: i64, k: i64) -> u64 {
    binomial(n, k)
}

pub fn mplus_formula(r: u32) -> u64 {
    let r = r as i64;
    3 * c(r + 1, 3) + 2 * c(r, 2) + c(r - 1, 1)
}

pub fn mminus_formula(r: u32) -> u64 {
    let r = r as i64;
    3 * c(r - 2, 3) + c(r - 3, 2)
}

pub fn mplus_dimension(r: u32) -> HilbertReport {
    HilbertReport::new(ModuleTag::MPlus, r, mplus_kernel(r).dim() as u64, mplus_formula(r))
}

pub fn mminus_dimension(r: u32) -> HilbertReport {
    HilbertReport::new(ModuleTag::MMinus, r, mminus_kernel(r).dim() as u64, mminus_formula(r))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub module: ModuleTag,
    pub r: u32,
    pub generated_dim: usize,
    pub kernel_dim: usize,
    /// The generated subspace coincides with the kernel model.
    pub equal: bool,
}

/// Span of `m·g` over monomials `m` of degree `r − deg g` accepted by
/// `keep`, in even-module coordinates.
fn mplus_generated(r: u32, keep: impl Fn(&Monomial4) -> bool) -> SubspaceBasis {
    let target = mplus_coords(r);
    let gens = brackets();
    let vectors: Vec<SparseVec> = MonomialBasis::of_signed(r as i64 - 2)
        .monomials()
        .iter()
        .filter(|m| keep(m))
        .flat_map(|m| gens.iter().map(|g| target.vector(&g.times(m).coeffs)).collect::<Vec<_>>())
        .collect();
    SubspaceBasis::span(target.ambient(), &vectors)
}

fn mminus_generated(r: u32, keep: impl Fn(&Monomial4) -> bool) -> SubspaceBasis {
    let target = mminus_coords(r);
    let gens = tribrackets();
    let vectors: Vec<SparseVec> = MonomialBasis::of_signed(r as i64 - 5)
        .monomials()
        .iter()
        .filter(|m| keep(m))
        .flat_map(|m| gens.iter().map(|g| target.vector(&g.times(m).coeffs)).collect::<Vec<_>>())
        .collect();
    SubspaceBasis::span(target.ambient(), &vectors)
}

pub fn generation_check_mplus(r: u32) -> GenerationReport {
    let generated = mplus_generated(r, |_| true);
    let kernel = mplus_kernel(r);
    GenerationReport {
        module: ModuleTag::MPlus,
        r,
        generated_dim: generated.dim(),
        kernel_dim: kernel.dim(),
        equal: generated == kernel,
    }
}

pub fn generation_check_mminus(r: u32) -> GenerationReport {
    let generated = mminus_generated(r, |_| true);
    let kernel = mminus_kernel(r);
    GenerationReport {
        module: ModuleTag::MMinus,
        r,
        generated_dim: generated.dim(),
        kernel_dim: kernel.dim(),
        equal: generated == kernel,
    }
}

/// The four linear relations among the six brackets, as coefficient tuples
/// in [`PAIRS`] order.
pub fn bracket_relations() -> [[SparsePoly; 6]; 4] {
    let z = SparsePoly::zero;
    [
        [signed_f(-1, 2), f(1), z(), signed_f(-1, 0), z(), z()],
        [signed_f(-1, 3), z(), f(1), z(), signed_f(-1, 0), z()],
        [z(), signed_f(-1, 3), f(2), z(), z(), signed_f(-1, 0)],
        [z(), z(), z(), signed_f(-1, 3), f(2), signed_f(-1, 1)],
    ]
}

/// The linear relation among the four tribrackets, in [`TRIPLES`] order.
pub fn tribracket_relation() -> [SparsePoly; 4] {
    [f(3), signed_f(-1, 2), f(1), signed_f(-1, 0)]
}

/// `Σ Q_g·g` for coefficient polynomials `Q_g` over the brackets.
pub fn combine_brackets(coeffs: &[SparsePoly; 6]) -> [SparsePoly; 4] {
    let mut out: [SparsePoly; 4] = Default::default();
    for (qc, g) in coeffs.iter().zip(brackets()) {
        for a in 0..4 {
            out[a] = &out[a] + &(qc * &g.coeffs[a]);
        }
    }
    out
}

/// `Σ Q_t·t` for coefficient polynomials `Q_t` over the tribrackets.
pub fn combine_tribrackets(coeffs: &[SparsePoly; 4]) -> [SparsePoly; 6] {
    let mut out: [SparsePoly; 6] = Default::default();
    for (qc, g) in coeffs.iter().zip(tribrackets()) {
        for p in 0..6 {
            out[p] = &out[p] + &(qc * &g.coeffs[p]);
        }
    }
    out
}

/// Whether `f₃R₁ − f₂R₂ + f₁R₃ − f₀R₄` vanishes as a tuple.
pub fn koszul_second_syzygy_holds() -> bool {
    let rel = bracket_relations();
    let weights = [signed_f(1, 3), signed_f(-1, 2), signed_f(1, 1), signed_f(-1, 0)];
    (0..6).all(|p| {
        (0..4)
            .fold(SparsePoly::zero(), |acc, k| &acc + &(&weights[k] * &rel[k][p]))
            .is_zero()
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyzygyReport {
    pub module: ModuleTag,
    pub r: u32,
    /// Dimension of all relations among the generators in this degree.
    pub full_dim: usize,
    /// Dimension of the span of monomial multiples of the known relations.
    pub span_dim: usize,
    /// Number of monomial multiples of the known relations.
    pub formal_count: usize,
    /// `formal_count − span_dim`: dependencies among the relation multiples.
    pub second_syzygy_dim: usize,
    /// The known relations lie in the relation space.
    pub relations_hold: bool,
    /// The known relations span the whole relation space.
    pub spanned: bool,
}

/// Relation space of `gens` (given as coordinate vectors in `target` after
/// multiplication by degree-`d` monomials) and span of `known` relations.
fn syzygy_report(
    module: ModuleTag,
    r: u32,
    gen_count: usize,
    gen_vectors: impl Fn(usize, &Monomial4) -> SparseVec,
    target_ambient: usize,
    gen_degree: u32,
    known: &[Vec<SparsePoly>],
) -> SyzygyReport {
    let src = FreeCoords::new(gen_count, r as i64 - gen_degree as i64);
    let mut columns = vec![Vec::new(); src.ambient()];
    for slot in 0..gen_count {
        for m in src.coeffs.monomials() {
            columns[src.index(slot, m).unwrap()] = gen_vectors(slot, m);
        }
    }
    let map = QMatrix::from_sparse_columns(target_ambient, &columns).expect("indices in range");
    let full = kernel_basis(&map);

    // Known relations have linear coefficients.
    let multipliers = MonomialBasis::of_signed(r as i64 - gen_degree as i64 - 1);
    let mut multiples = Vec::new();
    for rel in known {
        for m in multipliers.monomials() {
            let shifted: Vec<SparsePoly> = rel.iter().map(|p| p.times_monomial(m)).collect();
            multiples.push(src.vector(&shifted));
        }
    }
    let span = SubspaceBasis::span(src.ambient(), &multiples);
    let relations_hold = multiples.iter().all(|v| map.mul_vec(v).is_empty());
    SyzygyReport {
        module,
        r,
        full_dim: full.dim(),
        span_dim: span.dim(),
        formal_count: multiples.len(),
        second_syzygy_dim: multiples.len() - span.dim(),
        relations_hold,
        spanned: span == full,
    }
}

pub fn syzygy_check_mplus(r: u32) -> SyzygyReport {
    let target = mplus_coords(r);
    let gens = brackets();
    let known: Vec<Vec<SparsePoly>> = bracket_relations().into_iter().map(Vec::from).collect();
    syzygy_report(
        ModuleTag::MPlus,
        r,
        6,
        |slot, m| target.vector(&gens[slot].times(m).coeffs),
        target.ambient(),
        2,
        &known,
    )
}

pub fn syzygy_check_mminus(r: u32) -> SyzygyReport {
    let target = mminus_coords(r);
    let gens = tribrackets();
    let known = vec![Vec::from(tribracket_relation())];
    syzygy_report(
        ModuleTag::MMinus,
        r,
        4,
        |slot, m| target.vector(&gens[slot].times(m).coeffs),
        target.ambient(),
        5,
        &known,
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub r: u32,
    pub lhs_dim: usize,
    pub rhs_dim: usize,
    pub equal_as_subspaces: bool,
}

/// Image of the even kernel of degree `r − deg m` under multiplication by `m`.
fn mplus_shifted(r: u32, m: &Monomial4) -> SubspaceBasis {
    let target = mplus_coords(r);
    let d = m.degree();
    if r < d {
        return SubspaceBasis::zero(target.ambient());
    }
    let src = mplus_coords(r - d);
    let vectors: Vec<SparseVec> =
        mplus_kernel(r - d).vectors().iter().map(|v| src.shift(v, m, &target)).collect();
    SubspaceBasis::span(target.ambient(), &vectors)
}

/// Compares `∩_i (f₀f₁f₂f₃/f_i)·M⁺_{r−3}` with `f₀f₁f₂f₃·M⁺_{r−4}` inside the
/// degree-`r` coordinates.
pub fn intersection_check(r: u32) -> IntersectionReport {
    let all = Monomial4::new([1, 1, 1, 1]);
    let pieces: Vec<SubspaceBasis> = (0..4)
        .map(|i| mplus_shifted(r, &all.divided_by(&Monomial4::var(i)).unwrap()))
        .collect();
    let lhs = subspace_intersect(&pieces).expect("shared ambient");
    let rhs = mplus_shifted(r, &all);
    IntersectionReport { r, lhs_dim: lhs.dim(), rhs_dim: rhs.dim(), equal_as_subspaces: lhs == rhs }
}

/// Scalar ring dimensions at degree `r`: untwisted (`C[f]_r`), twisted by
/// the squared multiplier (`χ₅·C[f]_{r−10}`), and trivial multiplier at
/// integral weight `r` (`C[f]_{2r}` for even `r`, `χ₅·C[f]_{2r−10}` for odd
/// `r`).
pub fn scalar_ring_dims(r: u32) -> Vec<HilbertReport> {
    let r_i = r as i64;
    let count = |d: i64| MonomialBasis::of_signed(d).len() as u64;
    let untwisted = HilbertReport::new(ModuleTag::Scalar, r, count(r_i), c(r_i + 3, 3));
    let twisted = HilbertReport::new(ModuleTag::ScalarTwisted, r, count(r_i - 10), c(r_i - 7, 3));
    // Degree 2r lies in 4Z for even r; the χ₅-shifted degree 2r − 10 does for odd r.
    let trivial_computed = if r % 2 == 0 { count(2 * r_i) } else { count(2 * r_i - 10) };
    let trivial_formula = if r % 2 == 0 { c(2 * r_i + 3, 3) } else { c(2 * r_i - 7, 3) };
    let trivial = HilbertReport::new(ModuleTag::ScalarTrivial, r, trivial_computed, trivial_formula);
    vec![untwisted, twisted, trivial]
}

pub fn combined_formula(k: u32) -> u64 {
    let k = k as i64;
    if k % 2 == 0 {
        3 * c(2 * k + 1, 3) + 2 * c(2 * k, 2) + c(2 * k - 1, 1)
    } else {
        3 * c(2 * k - 2, 3) + c(2 * k - 3, 2)
    }
}

/// Vector-valued forms of weight `k` with trivial multiplier: the span of
/// brackets times monomials of degree `≡ 2 (mod 4)` (even `k`), or
/// tribrackets times monomials of degree `≡ 1 (mod 4)` (odd `k`).
pub fn combined_dim_trivial(k: u32) -> HilbertReport {
    let r = 2 * k;
    let computed = if k % 2 == 0 {
        mplus_generated(r, |m| m.degree() % 4 == 2).dim()
    } else {
        mminus_generated(r, |m| m.degree() % 4 == 1).dim()
    };
    HilbertReport::new(ModuleTag::TrivialCombined, k, computed as u64, combined_formula(k))
}

/// Hilbert table for one module, computed in parallel and returned in
/// degree order.
pub fn hilbert_table(tag: ModuleTag, max_r: u32) -> Vec<HilbertReport> {
    match tag {
        ModuleTag::MPlus => (0..=max_r).into_par_iter().map(mplus_dimension).collect(),
        ModuleTag::MMinus => (0..=max_r).into_par_iter().map(mminus_dimension).collect(),
        ModuleTag::TrivialCombined => (0..=max_r).into_par_iter().map(combined_dim_trivial).collect(),
        ModuleTag::Scalar | ModuleTag::ScalarTwisted | ModuleTag::ScalarTrivial => (0..=max_r)
            .flat_map(scalar_ring_dims)
            .filter(|h| h.module == tag)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_generator_shape() {
        let g = bracket_generator(0, 1).unwrap();
        assert_eq!(g.coeffs[0], signed_f(-1, 1));
        assert_eq!(g.coeffs[1], f(0));
        assert!(g.coeffs[2].is_zero() && g.coeffs[3].is_zero());
        assert!(g.satisfies_constraint());
        assert_eq!(bracket_generator(1, 0).unwrap(), g.negated());
        assert_eq!(bracket_generator(2, 2), Err(ModuleError::DuplicateIndex(2)));
    }

    #[test]
    fn tribracket_generator_shape() {
        let t = tribracket_generator(0, 1, 2).unwrap();
        assert_eq!(t.get(1, 2), f(0));
        assert_eq!(t.get(0, 2), signed_f(-1, 1));
        assert_eq!(t.get(0, 1), f(2));
        assert_eq!(t.get(2, 1), signed_f(-1, 0));
        for (i, j, k) in TRIPLES {
            assert!(tribracket_generator(i, j, k).unwrap().satisfies_constraints());
        }
        assert_eq!(tribracket_generator(1, 0, 2), Err(ModuleError::BadIndices(1, 0, 2)));
        assert_eq!(tribracket_generator(0, 0, 2), Err(ModuleError::BadIndices(0, 0, 2)));
    }

    #[test]
    fn small_hilbert_values() {
        assert_eq!(mplus_dimension(0).computed, 0);
        assert_eq!(mplus_dimension(2), HilbertReport::new(ModuleTag::MPlus, 2, 6, 6));
        assert_eq!(mplus_dimension(3).computed, 20);
        assert_eq!(mminus_dimension(4).computed, 0);
        assert_eq!(mminus_dimension(5), HilbertReport::new(ModuleTag::MMinus, 5, 4, 4));
        assert_eq!(mminus_dimension(6).computed, 15);
    }

    #[test]
    fn kernel_matrix_for_linear_coefficients() {
        // Four linear P_a map into quadrics: a 10×16 matrix with a 6-dim kernel.
        assert_eq!(mplus_coords(2).ambient(), 16);
        assert_eq!(MonomialBasis::new(2).len(), 10);
        assert_eq!(mplus_kernel(2).dim(), 6);
    }

    #[test]
    fn relations_are_exact_identities() {
        for rel in bracket_relations() {
            assert!(combine_brackets(&rel).iter().all(SparsePoly::is_zero));
        }
        assert!(combine_tribrackets(&tribracket_relation()).iter().all(SparsePoly::is_zero));
        assert!(koszul_second_syzygy_holds());
    }

    #[test]
    fn first_syzygies() {
        let s = syzygy_check_mplus(3);
        assert_eq!((s.full_dim, s.span_dim, s.second_syzygy_dim), (4, 4, 0));
        assert!(s.spanned && s.relations_hold);
        let s = syzygy_check_mminus(6);
        assert_eq!((s.full_dim, s.span_dim), (1, 1));
        assert!(s.spanned);
    }

    #[test]
    fn scalar_examples() {
        assert_eq!(scalar_ring_dims(4)[0].computed, 35);
        assert_eq!(scalar_ring_dims(10)[1].computed, 1);
        assert_eq!(scalar_ring_dims(9)[1].computed, 0);
        assert_eq!(scalar_ring_dims(0)[0].computed, 1);
        assert!(scalar_ring_dims(7).iter().all(|h| h.matched));
    }

    #[test]
    fn combined_examples() {
        assert_eq!(combined_formula(1), 0);
        assert_eq!(combined_formula(2), 45);
        assert_eq!(combined_formula(3), 15);
        assert!(combined_dim_trivial(2).matched);
        assert!(combined_dim_trivial(3).matched);
    }

    #[test]
    fn report_json_shape() {
        let s = serde_json::to_string(&mplus_dimension(4)).unwrap();
        assert_eq!(s, r#"{"module":"M+","r":4,"computed":45,"formula":45,"match":true}"#);
    }

    #[test]
    fn coordinates_round_trip() {
        let g = tribracket_generator(0, 2, 3).unwrap().times(&Monomial4::new([0, 1, 1, 0]));
        let coords = mminus_coords(g.r);
        assert_eq!(coords.polys(&g.coords()), g.coeffs.to_vec());
    }
}
