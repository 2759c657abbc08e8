//! Exact linear algebra over the rationals on row-sparse matrices.
//!
//! Elimination runs fraction-free on primitive integer rows: each reduction
//! step forms `p_c·r − r_c·p` and divides out the row content, so entries stay
//! integral and small. Only the final reduced echelon form is converted back
//! to rationals.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("ambient dimensions differ: {expected} vs {found}")]
    AmbientMismatch { expected: usize, found: usize },
    #[error("row {row} has {found} entries, expected {expected}")]
    NotRectangular { row: usize, expected: usize, found: usize },
    #[error("column index {col} out of range for {cols} columns")]
    ColumnOutOfRange { col: usize, cols: usize },
}

/// Sparse vector: strictly increasing column indices, nonzero entries.
pub type SparseVec = Vec<(usize, BigRational)>;

type IntRow = Vec<(usize, BigInt)>;

fn normalize(mut v: SparseVec) -> SparseVec {
    v.sort_by_key(|(c, _)| *c);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for (c, x) in v {
        match out.last_mut() {
            Some((lc, lx)) if *lc == c => *lx += x,
            _ => out.push((c, x)),
        }
    }
    out.retain(|(_, x)| !x.is_zero());
    out
}

/// Rational matrix stored by rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    cols: usize,
    rows: Vec<SparseVec>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { cols, rows: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        QMatrix {
            cols: n,
            rows: (0..n).map(|i| vec![(i, BigRational::one())]).collect(),
        }
    }

    pub fn from_dense(rows: Vec<Vec<BigRational>>, cols: usize) -> Result<Self, AlgebraError> {
        let mut out = Vec::with_capacity(rows.len());
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(AlgebraError::NotRectangular { row: i, expected: cols, found: row.len() });
            }
            out.push(row.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect());
        }
        Ok(QMatrix { cols, rows: out })
    }

    /// Builds from sparse rows; duplicate columns within a row are summed.
    pub fn from_sparse_rows(cols: usize, rows: Vec<SparseVec>) -> Result<Self, AlgebraError> {
        let rows: Vec<SparseVec> = rows.into_iter().map(normalize).collect();
        for row in &rows {
            if let Some((c, _)) = row.last() {
                if *c >= cols {
                    return Err(AlgebraError::ColumnOutOfRange { col: *c, cols });
                }
            }
        }
        Ok(QMatrix { cols, rows })
    }

    /// Builds the matrix whose columns are the given sparse vectors.
    pub fn from_sparse_columns(rows: usize, columns: &[SparseVec]) -> Result<Self, AlgebraError> {
        let mut out = vec![Vec::new(); rows];
        for (j, col) in columns.iter().enumerate() {
            for (i, x) in col {
                if *i >= rows {
                    return Err(AlgebraError::ColumnOutOfRange { col: *i, cols: rows });
                }
                out[*i].push((j, x.clone()));
            }
        }
        QMatrix::from_sparse_rows(columns.len(), out)
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> BigRational {
        self.rows[i]
            .binary_search_by_key(&j, |(c, _)| *c)
            .map(|k| self.rows[i][k].1.clone())
            .unwrap_or_else(|_| BigRational::zero())
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigRational) {
        assert!(j < self.cols, "column {j} out of range");
        let row = &mut self.rows[i];
        match row.binary_search_by_key(&j, |(c, _)| *c) {
            Ok(k) if x.is_zero() => {
                row.remove(k);
            }
            Ok(k) => row[k].1 = x,
            Err(_) if x.is_zero() => {}
            Err(k) => row.insert(k, (j, x)),
        }
    }

    pub fn transpose(&self) -> QMatrix {
        let mut out = vec![Vec::new(); self.cols];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, x) in row {
                out[*j].push((i, x.clone()));
            }
        }
        QMatrix { cols: self.rows.len(), rows: out }
    }

    pub fn mul_vec(&self, v: &SparseVec) -> SparseVec {
        let dense: BTreeMap<usize, &BigRational> = v.iter().map(|(c, x)| (*c, x)).collect();
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(i, row)| {
                let s = row
                    .iter()
                    .filter_map(|(c, x)| dense.get(c).map(|y| x * *y))
                    .fold(BigRational::zero(), |a, b| a + b);
                (!s.is_zero()).then_some((i, s))
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        Echelon::from_rows(self.rows.iter()).rank()
    }
}

/// Primitive integer multiple of a rational row, with positive lead.
fn to_primitive(row: &SparseVec) -> IntRow {
    let lcm = row.iter().fold(BigInt::one(), |acc, (_, x)| acc.lcm(x.denom()));
    let ints: IntRow = row
        .iter()
        .map(|(c, x)| (*c, x.numer() * (&lcm / x.denom())))
        .collect();
    make_primitive(ints)
}

fn make_primitive(mut row: IntRow) -> IntRow {
    let Some((_, lead)) = row.first() else { return row };
    let negative = lead.is_negative();
    let mut g = BigInt::zero();
    for (_, x) in &row {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    if negative {
        g = -g;
    }
    if !g.is_one() {
        for (_, x) in row.iter_mut() {
            *x /= &g;
        }
    }
    row
}

/// `a·r − b·p` on sorted sparse integer rows.
fn combine(a: &BigInt, r: &IntRow, b: &BigInt, p: &IntRow) -> IntRow {
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < p.len() {
        let take_r = j >= p.len() || (i < r.len() && r[i].0 < p[j].0);
        let take_p = i >= r.len() || (j < p.len() && p[j].0 < r[i].0);
        if take_r {
            out.push((r[i].0, a * &r[i].1));
            i += 1;
        } else if take_p {
            out.push((p[j].0, -(b * &p[j].1)));
            j += 1;
        } else {
            let x = a * &r[i].1 - b * &p[j].1;
            if !x.is_zero() {
                out.push((r[i].0, x));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Row echelon form keyed by pivot column.
struct Echelon {
    pivots: BTreeMap<usize, IntRow>,
}

impl Echelon {
    fn from_rows<'a>(rows: impl Iterator<Item = &'a SparseVec>) -> Self {
        let mut e = Echelon { pivots: BTreeMap::new() };
        for row in rows {
            e.insert(to_primitive(row));
        }
        e
    }

    /// Reduces `row` against the pivots; stores it if independent.
    fn insert(&mut self, mut row: IntRow) -> bool {
        loop {
            let Some((lead, x)) = row.first() else { return false };
            let Some(p) = self.pivots.get(lead) else {
                let lead = *lead;
                self.pivots.insert(lead, make_primitive(row));
                return true;
            };
            let g = p[0].1.gcd(x);
            let a = &p[0].1 / &g;
            let b = x / &g;
            row = make_primitive(combine(&a, &row, &b, p));
        }
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduced echelon form with unit leads, as rational rows in pivot order.
    fn reduced(self) -> Vec<SparseVec> {
        let mut rows: Vec<SparseVec> = self
            .pivots
            .into_values()
            .map(|r| {
                let lead = BigRational::from_integer(r[0].1.clone());
                r.into_iter().map(|(c, x)| (c, BigRational::from_integer(x) / &lead)).collect()
            })
            .collect();
        let leads: Vec<usize> = rows.iter().map(|r| r[0].0).collect();
        for i in (0..rows.len()).rev() {
            let (above, rest) = rows.split_at_mut(i);
            let pivot = &rest[0];
            let col = leads[i];
            for r in above.iter_mut() {
                if let Ok(k) = r.binary_search_by_key(&col, |(c, _)| *c) {
                    let factor = r[k].1.clone();
                    *r = sub_scaled(r, &factor, pivot);
                }
            }
        }
        rows
    }
}

/// `r − f·p` on rational sparse rows.
fn sub_scaled(r: &SparseVec, f: &BigRational, p: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < p.len() {
        if j >= p.len() || (i < r.len() && r[i].0 < p[j].0) {
            out.push(r[i].clone());
            i += 1;
        } else if i >= r.len() || p[j].0 < r[i].0 {
            out.push((p[j].0, -(f * &p[j].1)));
            j += 1;
        } else {
            let x = &r[i].1 - f * &p[j].1;
            if !x.is_zero() {
                out.push((r[i].0, x));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// A subspace of `Qⁿ` held as its unique reduced row echelon basis, so two
/// spans of the same subspace compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceBasis {
    ambient: usize,
    rows: Vec<SparseVec>,
}

impl SubspaceBasis {
    pub fn zero(ambient: usize) -> Self {
        SubspaceBasis { ambient, rows: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        SubspaceBasis { ambient, rows: QMatrix::identity(ambient).rows }
    }

    /// Span of arbitrary (possibly dependent) vectors.
    pub fn span<'a>(ambient: usize, vectors: impl IntoIterator<Item = &'a SparseVec>) -> Self {
        let vectors: Vec<SparseVec> = vectors.into_iter().map(|v| normalize(v.clone())).collect();
        for v in &vectors {
            if let Some((c, _)) = v.last() {
                assert!(*c < ambient, "coordinate {c} outside ambient dimension {ambient}");
            }
        }
        let rows = Echelon::from_rows(vectors.iter()).reduced();
        SubspaceBasis { ambient, rows }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn vectors(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r[0].0).collect()
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        let mut e = Echelon::from_rows(self.rows.iter());
        !e.insert(to_primitive(&normalize(v.clone())))
    }

    pub fn is_subspace_of(&self, other: &SubspaceBasis) -> bool {
        self.ambient == other.ambient && self.rows.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &SubspaceBasis) -> Result<SubspaceBasis, AlgebraError> {
        check_ambient(self.ambient, other.ambient)?;
        Ok(SubspaceBasis::span(self.ambient, self.rows.iter().chain(&other.rows)))
    }

    /// Linear functionals vanishing on the subspace.
    pub fn annihilator(&self) -> SubspaceBasis {
        kernel_basis(&QMatrix { cols: self.ambient, rows: self.rows.clone() })
    }
}

fn check_ambient(expected: usize, found: usize) -> Result<(), AlgebraError> {
    if expected == found {
        Ok(())
    } else {
        Err(AlgebraError::AmbientMismatch { expected, found })
    }
}

/// Exact basis of the right kernel `{x : M·x = 0}`.
pub fn kernel_basis(m: &QMatrix) -> SubspaceBasis {
    let rref = Echelon::from_rows(m.rows.iter()).reduced();
    let mut is_pivot = vec![false; m.cols];
    for r in &rref {
        is_pivot[r[0].0] = true;
    }
    // Column-major view of the non-pivot entries of each reduced row.
    let mut by_free: BTreeMap<usize, Vec<(usize, BigRational)>> = BTreeMap::new();
    for r in &rref {
        let lead = r[0].0;
        for (c, x) in &r[1..] {
            by_free.entry(*c).or_default().push((lead, -x.clone()));
        }
    }
    let vectors: Vec<SparseVec> = (0..m.cols)
        .filter(|&c| !is_pivot[c])
        .map(|f| {
            let mut v = by_free.remove(&f).unwrap_or_default();
            v.push((f, BigRational::one()));
            normalize(v)
        })
        .collect();
    SubspaceBasis::span(m.cols, vectors.iter())
}

/// Intersection of subspaces sharing one ambient space, computed as the
/// kernel of the stacked annihilators.
pub fn subspace_intersect(bases: &[SubspaceBasis]) -> Result<SubspaceBasis, AlgebraError> {
    let Some(first) = bases.first() else {
        return Err(AlgebraError::AmbientMismatch { expected: 0, found: 0 });
    };
    let n = first.ambient;
    let mut stacked = Vec::new();
    for b in bases {
        check_ambient(n, b.ambient)?;
        stacked.extend(b.annihilator().rows);
    }
    Ok(kernel_basis(&QMatrix { cols: n, rows: stacked }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn dense(rows: &[&[i64]]) -> QMatrix {
        let cols = rows[0].len();
        QMatrix::from_dense(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect(), cols).unwrap()
    }

    #[test]
    fn identity_has_trivial_kernel() {
        assert_eq!(kernel_basis(&QMatrix::identity(4)).dim(), 0);
        assert_eq!(QMatrix::identity(4).rank(), 4);
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let k = kernel_basis(&QMatrix::zeros(3, 5));
        assert_eq!(k.dim(), 5);
        assert_eq!(k, SubspaceBasis::full(5));
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = dense(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, -1, 2]]);
        let k = kernel_basis(&m);
        assert_eq!(m.rank() + k.dim(), 4);
        for v in k.vectors() {
            assert!(m.mul_vec(v).is_empty());
        }
    }

    #[test]
    fn rejects_ragged_rows() {
        let rows = vec![vec![q(1), q(2)], vec![q(3)]];
        assert_eq!(
            QMatrix::from_dense(rows, 2),
            Err(AlgebraError::NotRectangular { row: 1, expected: 2, found: 1 })
        );
    }

    #[test]
    fn spans_are_canonical() {
        let a: Vec<SparseVec> = vec![vec![(0, q(1)), (1, q(1))], vec![(1, q(1)), (2, q(1))]];
        let b: Vec<SparseVec> = vec![
            vec![(0, q(2)), (1, q(4)), (2, q(2))],
            vec![(0, q(-1)), (2, q(1))],
        ];
        assert_eq!(SubspaceBasis::span(3, &a), SubspaceBasis::span(3, &b));
    }

    #[test]
    fn intersections() {
        let u = SubspaceBasis::span(3, &[vec![(0, q(1))], vec![(1, q(1))]]);
        assert_eq!(subspace_intersect(&[u.clone(), u.clone()]).unwrap(), u);
        let x = SubspaceBasis::span(2, &[vec![(0, q(1))]]);
        let y = SubspaceBasis::span(2, &[vec![(0, q(1)), (1, q(1))]]);
        assert_eq!(subspace_intersect(&[x, y]).unwrap().dim(), 0);
        let v = SubspaceBasis::span(3, &[vec![(1, q(1))], vec![(2, q(1))]]);
        let w = subspace_intersect(&[u.clone(), v]).unwrap();
        assert_eq!(w, SubspaceBasis::span(3, &[vec![(1, q(5))]]));
        assert!(matches!(
            subspace_intersect(&[u, SubspaceBasis::zero(4)]),
            Err(AlgebraError::AmbientMismatch { expected: 3, found: 4 })
        ));
    }

    #[test]
    fn rational_entries_survive_elimination() {
        let half = BigRational::new(1.into(), 2.into());
        let m = QMatrix::from_sparse_rows(2, vec![vec![(0, half.clone()), (1, q(3))]]).unwrap();
        let k = kernel_basis(&m);
        assert_eq!(k.vectors(), &[vec![(0, q(1)), (1, -half / q(3))]]);
    }
}
