//! Rankin–Cohen type brackets of the second-kind theta constants, built from
//! analytic jets, and the numerical identities they satisfy.

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::real::{cabs, to_c64, Real, DOUBLE_BITS};
use crate::theta::{
    all_quadrics, enumerate_even_characteristics, product, SecondKindIndex, SiegelPoint, ThetaError,
    ThetaEvaluator, ThetaJet, TruncationPolicy,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BracketError {
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error("tribracket indices repeat: ({0}, {1}, {2})")]
    DuplicateIndex(usize, usize, usize),
    #[error("|χ₅| = {chi5:e} is below {threshold:e}; the point is too close to the ramification locus")]
    NearRamification { chi5: f64, threshold: f64 },
    #[error("|f₀| = {f0:e} is too small to divide by")]
    SmallDenominator { f0: f64 },
    #[error("relation index {0} is not in 1..=5")]
    UnknownRelation(usize),
}

pub type Result<T> = std::result::Result<T, BracketError>;

fn zero<R: Real>() -> Complex<R> {
    Complex::new(R::zero(), R::zero())
}

/// Symmetric matrix `[[m00, m01], [m01, m11]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketMatrix<R: Real = f64> {
    pub m00: Complex<R>,
    pub m01: Complex<R>,
    pub m11: Complex<R>,
}

impl<R: Real> BracketMatrix<R> {
    pub fn zero() -> Self {
        BracketMatrix { m00: zero(), m01: zero(), m11: zero() }
    }

    pub fn entries(&self) -> [Complex<R>; 3] {
        [self.m00.clone(), self.m01.clone(), self.m11.clone()]
    }

    fn from_entries([m00, m01, m11]: [Complex<R>; 3]) -> Self {
        BracketMatrix { m00, m01, m11 }
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, c: &Complex<R>, other: &Self) -> Self {
        let [a, b, d] = self.entries();
        let [x, y, z] = other.entries();
        Self::from_entries([a + c.clone() * x, b + c.clone() * y, d + c.clone() * z])
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(cabs).fold(0.0, f64::max)
    }

    pub fn to_c64(&self) -> BracketMatrix<f64> {
        BracketMatrix { m00: to_c64(&self.m00), m01: to_c64(&self.m01), m11: to_c64(&self.m11) }
    }
}

/// Symmetric matrix of 3×3 minors, `[[+(1,2), −(0,2)], [−(0,2), +(0,1)]]`.
pub type TriBracketMatrix<R = f64> = BracketMatrix<R>;

/// Coefficients of `g₀·dZ¹∧dZ² + g₁·dZ⁰∧dZ² + g₂·dZ⁰∧dZ¹`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoFormCoeffs {
    pub g0: Complex64,
    pub g1: Complex64,
    pub g2: Complex64,
}

/// `[[g₂, −g₁], [−g₁, g₀]]`.
pub fn twoform_to_matrix(g: &TwoFormCoeffs) -> TriBracketMatrix {
    BracketMatrix { m00: g.g2, m01: -g.g1, m11: g.g0 }
}

pub fn matrix_to_twoform(m: &TriBracketMatrix) -> TwoFormCoeffs {
    TwoFormCoeffs { g0: m.m11, g1: -m.m01, g2: m.m00 }
}

/// `f·Dg − g·Df`, arranged as `[[∂₀, ∂₁], [∂₁, ∂₂]]`.
pub fn bracket_from_jets<R: Real>(f: &ThetaJet<R>, g: &ThetaJet<R>) -> BracketMatrix<R> {
    let entry = |k: usize| f.value.clone() * g.d[k].clone() - g.value.clone() * f.d[k].clone();
    BracketMatrix { m00: entry(0), m01: entry(1), m11: entry(2) }
}

fn det3<R: Real>(m: [[Complex<R>; 3]; 3]) -> Complex<R> {
    let minor = |a: usize, b: usize| {
        m[1][a].clone() * m[2][b].clone() - m[1][b].clone() * m[2][a].clone()
    };
    m[0][0].clone() * minor(1, 2) - m[0][1].clone() * minor(0, 2) + m[0][2].clone() * minor(0, 1)
}

/// `det[[∂_{j1}f, ∂_{j2}f, f], [∂_{j1}g, ∂_{j2}g, g], [∂_{j1}h, ∂_{j2}h, h]]`.
pub fn tri_minor<R: Real>(jets: [&ThetaJet<R>; 3], j1: usize, j2: usize) -> Complex<R> {
    det3(jets.map(|t| [t.d[j1].clone(), t.d[j2].clone(), t.value.clone()]))
}

pub fn tribracket_from_jets<R: Real>(f: &ThetaJet<R>, g: &ThetaJet<R>, h: &ThetaJet<R>) -> TriBracketMatrix<R> {
    let jets = [f, g, h];
    BracketMatrix {
        m00: tri_minor(jets, 1, 2),
        m01: -tri_minor(jets, 0, 2),
        m11: tri_minor(jets, 0, 1),
    }
}

/// `det[∂_j f_i]` over three jets: the minor without the value column.
fn jacobian_minor<R: Real>(jets: [&ThetaJet<R>; 3]) -> Complex<R> {
    det3(jets.map(|t| t.d.clone()))
}

pub fn rc2(i: SecondKindIndex, j: SecondKindIndex, z: &SiegelPoint, policy: &TruncationPolicy) -> Result<BracketMatrix> {
    let e = ThetaEvaluator::double(z, policy);
    Ok(bracket_from_jets(&e.f_jet(i)?, &e.f_jet(j)?))
}

pub fn rc3(
    i: SecondKindIndex,
    j: SecondKindIndex,
    k: SecondKindIndex,
    z: &SiegelPoint,
    policy: &TruncationPolicy,
) -> Result<TriBracketMatrix> {
    if i == j || j == k || i == k {
        return Err(BracketError::DuplicateIndex(i.idx(), j.idx(), k.idx()));
    }
    let e = ThetaEvaluator::double(z, policy);
    Ok(tribracket_from_jets(&e.f_jet(i)?, &e.f_jet(j)?, &e.f_jet(k)?))
}

/// Max-entry residual of relation `n ∈ 1..=5` evaluated on the jets of
/// `f₀ … f₃`.
pub fn relation_residual<R: Real>(n: usize, jets: &[ThetaJet<R>; 4]) -> Result<f64> {
    let v = |a: usize| jets[a].value.clone();
    let neg = |a: usize| -jets[a].value.clone();
    let br = |a: usize, b: usize| bracket_from_jets(&jets[a], &jets[b]);
    let tri = |a: usize, b: usize, c: usize| tribracket_from_jets(&jets[a], &jets[b], &jets[c]);
    let terms: Vec<(Complex<R>, BracketMatrix<R>)> = match n {
        1 => vec![(v(1), br(0, 2)), (neg(2), br(0, 1)), (neg(0), br(1, 2))],
        2 => vec![(v(1), br(0, 3)), (neg(3), br(0, 1)), (neg(0), br(1, 3))],
        3 => vec![(v(2), br(0, 3)), (neg(3), br(0, 2)), (neg(0), br(2, 3))],
        4 => vec![(v(2), br(1, 3)), (neg(3), br(1, 2)), (neg(1), br(2, 3))],
        5 => vec![
            (neg(0), tri(1, 2, 3)),
            (v(1), tri(0, 2, 3)),
            (neg(2), tri(0, 1, 3)),
            (v(3), tri(0, 1, 2)),
        ],
        _ => return Err(BracketError::UnknownRelation(n)),
    };
    let sum = terms
        .iter()
        .fold(BracketMatrix::zero(), |acc, (c, m)| acc.add_scaled(c, m));
    Ok(sum.max_abs())
}

pub fn residual_r(n: usize, z: &SiegelPoint, policy: &TruncationPolicy) -> Result<f64> {
    let jets = ThetaEvaluator::double(z, policy).f_jets()?;
    relation_residual(n, &jets)
}

#[derive(Debug, Clone, PartialEq)]
pub struct JacobianRatios<R: Real = f64> {
    /// `det ∂(f_i/f₀)/∂Z^j`, `i = 1..3`, `j = 0..2`.
    pub det: Complex<R>,
    /// `det · f₀⁴ / χ₅`.
    pub c5_estimate: Complex<R>,
}

/// Relative threshold on `|χ₅|` below which a point counts as ramified.
pub const RAMIFICATION_THRESHOLD: f64 = 1e-8;

/// `∏ max(1, |θ[m]|)`, the scale against which `|χ₅|` is judged.
fn theta_scale<R: Real>(thetas: &[Complex<R>]) -> f64 {
    thetas.iter().map(|t| cabs(t).max(1.0)).product()
}

pub fn jacobian_ratios_in<R: Real>(e: &ThetaEvaluator<R>) -> Result<JacobianRatios<R>> {
    let jets = e.f_jets()?;
    let f0 = jets[0].value.clone();
    if cabs(&f0) <= 100.0 * e.policy().target_eps {
        return Err(BracketError::SmallDenominator { f0: cabs(&f0) });
    }
    let thetas = e.even_thetas()?;
    let chi5 = product(thetas.iter().cloned());
    let threshold = RAMIFICATION_THRESHOLD * theta_scale(&thetas);
    if cabs(&chi5) < threshold {
        return Err(BracketError::NearRamification { chi5: cabs(&chi5), threshold });
    }
    // ∂(f_i/f₀)/∂Z^j = [f₀, f_i]_j / f₀²
    let f0_sq = f0.clone() * f0.clone();
    let rows: [[Complex<R>; 3]; 3] = std::array::from_fn(|i| {
        let b = bracket_from_jets(&jets[0], &jets[i + 1]);
        [b.m00 / f0_sq.clone(), b.m01 / f0_sq.clone(), b.m11 / f0_sq.clone()]
    });
    let det = det3(rows);
    let c5_estimate = det.clone() * f0_sq.clone() * f0_sq / chi5;
    Ok(JacobianRatios { det, c5_estimate })
}

pub fn jacobian_det_ratios(z: &SiegelPoint, policy: &TruncationPolicy) -> Result<JacobianRatios> {
    jacobian_ratios_in(&ThetaEvaluator::double(z, policy))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjugateReport {
    /// `max |A·Adj(A) − det(A)·I₄|`.
    pub residual: f64,
    pub det: Complex64,
    /// `|det(A) − c₅·χ₅|` for the supplied constant.
    pub c5_gap: Option<f64>,
}

/// Rows `(f_a, ∂₀f_a, ∂₁f_a, ∂₂f_a)`.
fn value_jacobian_matrix<R: Real>(jets: &[ThetaJet<R>; 4]) -> [[Complex<R>; 4]; 4] {
    std::array::from_fn(|a| {
        let t = &jets[a];
        [t.value.clone(), t.d[0].clone(), t.d[1].clone(), t.d[2].clone()]
    })
}

/// Adjugate of the value/jacobian matrix, assembled from the bracket
/// minors: deleting row `a` and a column leaves either the pure jacobian
/// minor or one of the `(j₁, j₂)` minors of the other three jets.
fn adjugate<R: Real>(jets: &[ThetaJet<R>; 4]) -> [[Complex<R>; 4]; 4] {
    let mut adj: [[Complex<R>; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| zero()));
    for a in 0..4 {
        let others: Vec<&ThetaJet<R>> = (0..4).filter(|&b| b != a).map(|b| &jets[b]).collect();
        let rest = [others[0], others[1], others[2]];
        let minors = [
            jacobian_minor(rest),
            tri_minor(rest, 1, 2),
            tri_minor(rest, 0, 2),
            tri_minor(rest, 0, 1),
        ];
        for (c, m) in minors.into_iter().enumerate() {
            let cofactor = if (a + c) % 2 == 0 { m } else { -m };
            adj[c][a] = cofactor;
        }
    }
    adj
}

pub fn adjugate_identity_in<R: Real>(e: &ThetaEvaluator<R>, c5: Option<Complex64>) -> Result<AdjugateReport> {
    let jets = e.f_jets()?;
    let a = value_jacobian_matrix(&jets);
    let adj = adjugate(&jets);
    let det = (0..4).fold(zero::<R>(), |acc, c| acc + a[0][c].clone() * adj[c][0].clone());
    let mut residual = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let mut s = (0..4).fold(zero::<R>(), |acc, k| acc + a[i][k].clone() * adj[k][j].clone());
            if i == j {
                s = s - det.clone();
            }
            residual = residual.max(cabs(&s));
        }
    }
    let det = to_c64(&det);
    let c5_gap = match c5 {
        Some(c5) => Some((det - c5 * to_c64(&e.chi5()?)).norm()),
        None => None,
    };
    Ok(AdjugateReport { residual, det, c5_gap })
}

pub fn adjugate_identity_residual(
    z: &SiegelPoint,
    policy: &TruncationPolicy,
    c5: Option<Complex64>,
) -> Result<AdjugateReport> {
    adjugate_identity_in(&ThetaEvaluator::double(z, policy), c5)
}

/// Residuals of every numeric identity at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    #[serde(rename = "R1")]
    pub r1: f64,
    #[serde(rename = "R2")]
    pub r2: f64,
    #[serde(rename = "R3")]
    pub r3: f64,
    #[serde(rename = "R4")]
    pub r4: f64,
    #[serde(rename = "R5")]
    pub r5: f64,
    /// `max_m |θ[m]² − Q_m(f)|`.
    pub thetalink_max: f64,
    /// `|χ₅² − ∏Q_m(f)| / |χ₅²|`; absent where `χ₅` vanishes.
    pub chi5_sq: Option<f64>,
    /// `|χ₅|`.
    pub chi5_abs: f64,
    pub adjugate: f64,
    /// `|det(A)|`.
    pub det_abs: f64,
}

impl Residuals {
    pub fn relations(&self) -> [f64; 5] {
        [self.r1, self.r2, self.r3, self.r4, self.r5]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub point: SiegelPoint,
    pub residuals: Residuals,
    /// `None` near the ramification locus.
    pub c5_estimate: Option<[f64; 2]>,
}

pub fn point_report_in<R: Real>(e: &ThetaEvaluator<R>) -> Result<PointReport> {
    let jets = e.f_jets()?;
    let relations: Vec<f64> = (1..=5).map(|n| relation_residual(n, &jets)).collect::<Result<_>>()?;
    let f: [Complex<R>; 4] = jets.clone().map(|j| j.value);
    let thetas = e.even_thetas()?;
    let mut thetalink_max = 0.0f64;
    let mut quadric_product = Complex::new(R::one(), R::zero());
    for ((_, q), theta) in all_quadrics().iter().zip(&thetas) {
        let qv = q.eval(&f);
        thetalink_max = thetalink_max.max(cabs(&(theta.clone() * theta.clone() - qv.clone())));
        quadric_product = quadric_product * qv;
    }
    let chi5 = product(thetas.iter().cloned());
    let chi5_sq = chi5.clone() * chi5.clone();
    let near_ramification = cabs(&chi5) < RAMIFICATION_THRESHOLD * theta_scale(&thetas);
    let chi5_rel = (!near_ramification).then(|| cabs(&(chi5_sq.clone() - quadric_product)) / cabs(&chi5_sq));
    let adjugate = adjugate_identity_in(e, None)?;
    let c5_estimate = match jacobian_ratios_in(e) {
        Ok(j) => Some([j.c5_estimate.re.to_f64(), j.c5_estimate.im.to_f64()]),
        Err(BracketError::NearRamification { .. } | BracketError::SmallDenominator { .. }) => None,
        Err(err) => return Err(err),
    };
    Ok(PointReport {
        point: *e.point(),
        residuals: Residuals {
            r1: relations[0],
            r2: relations[1],
            r3: relations[2],
            r4: relations[3],
            r5: relations[4],
            thetalink_max,
            chi5_sq: chi5_rel,
            chi5_abs: cabs(&chi5),
            adjugate: adjugate.residual,
            det_abs: adjugate.det.norm(),
        },
        c5_estimate,
    })
}

pub fn point_report(z: &SiegelPoint, policy: &TruncationPolicy) -> Result<PointReport> {
    point_report_in(&ThetaEvaluator::<f64>::new(z, policy, DOUBLE_BITS))
}

/// Number of even characteristics contributing to `χ₅`.
pub fn chi5_factor_count() -> usize {
    enumerate_even_characteristics().len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn generic() -> SiegelPoint {
        SiegelPoint::new(c(0.0, 1.0), c(0.1, 0.05), c(0.0, 1.5)).unwrap()
    }

    fn idx(i: usize) -> SecondKindIndex {
        SecondKindIndex::from_idx(i)
    }

    #[test]
    fn bracket_is_antisymmetric() {
        let p = TruncationPolicy::default();
        let z = generic();
        assert!(rc2(idx(1), idx(1), &z, &p).unwrap().max_abs() == 0.0);
        let a = rc2(idx(0), idx(3), &z, &p).unwrap();
        let b = rc2(idx(3), idx(0), &z, &p).unwrap();
        assert!(a.add_scaled(&c(1.0, 0.0), &b).max_abs() < 1e-15);
    }

    #[test]
    fn bracket_leading_term() {
        use std::f64::consts::PI;
        let z = SiegelPoint::diagonal(10.0, 10.0).unwrap();
        let m = rc2(idx(0), idx(1), &z, &TruncationPolicy::default()).unwrap();
        // Nearest lattice vectors only: f₀ ≈ 1 + 4q⁴, ∂₀f₀ ≈ 4πi·q⁴,
        // f₁ ≈ 2q, ∂₀f₁ ≈ 8πi·q⁵ with q = e^{−5π}.
        let q = (-5.0 * PI).exp();
        let f0 = c(1.0 + 4.0 * q.powi(4), 0.0);
        let d0f0 = c(0.0, 4.0 * PI * q.powi(4));
        let f1 = c(2.0 * q, 0.0);
        let d0f1 = c(0.0, 8.0 * PI * q.powi(5));
        let oracle = f0 * d0f1 - f1 * d0f0;
        let scale = (f0 * d0f1).norm();
        assert!((m.m00 - oracle).norm() < 1e-12 * scale, "{} vs {}", m.m00, oracle);
        let m01_oracle = c(0.0, 0.0);
        assert!((m.m01 - m01_oracle).norm() < 1e-12 * scale);
    }

    #[test]
    fn tribracket_rejects_repeats() {
        let p = TruncationPolicy::default();
        assert_eq!(
            rc3(idx(0), idx(2), idx(0), &generic(), &p),
            Err(BracketError::DuplicateIndex(0, 2, 0))
        );
    }

    #[test]
    fn tribracket_alternates() {
        let p = TruncationPolicy::default();
        let z = generic();
        let a = rc3(idx(0), idx(1), idx(2), &z, &p).unwrap();
        let b = rc3(idx(1), idx(0), idx(2), &z, &p).unwrap();
        assert!(a.add_scaled(&c(1.0, 0.0), &b).max_abs() < 1e-10);
        assert!(a.max_abs() > 1e-6);
    }

    #[test]
    fn twoform_arrangement() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let m = twoform_to_matrix(&TwoFormCoeffs { g0: one, g1: zero, g2: zero });
        assert_eq!((m.m00, m.m01, m.m11), (zero, zero, one));
        let m = twoform_to_matrix(&TwoFormCoeffs { g0: zero, g1: one, g2: zero });
        assert_eq!((m.m00, m.m01, m.m11), (zero, -one, zero));
        let g = TwoFormCoeffs { g0: c(1.5, -2.0), g1: c(0.25, 3.0), g2: c(-7.0, 0.5) };
        assert_eq!(matrix_to_twoform(&twoform_to_matrix(&g)), g);
    }

    #[test]
    fn relations_hold_at_generic_and_diagonal_points() {
        let p = TruncationPolicy::default();
        for z in [generic(), SiegelPoint::diagonal(1.0, 2.0).unwrap()] {
            for n in 1..=5 {
                let r = residual_r(n, &z, &p).unwrap();
                assert!(r < 1e-9, "R{n} = {r:e} at {z}");
            }
        }
        assert_eq!(residual_r(6, &generic(), &p), Err(BracketError::UnknownRelation(6)));
    }

    #[test]
    fn ramified_points_are_flagged() {
        let p = TruncationPolicy::default();
        let z = SiegelPoint::diagonal(1.0, 2.0).unwrap();
        assert!(matches!(jacobian_det_ratios(&z, &p), Err(BracketError::NearRamification { .. })));
        let adj = adjugate_identity_residual(&z, &p, None).unwrap();
        assert!(adj.det.norm() < 1e-9);
    }

    #[test]
    fn adjugate_identity_and_det_link() {
        let p = TruncationPolicy::default();
        let z = generic();
        let ratios = jacobian_det_ratios(&z, &p).unwrap();
        let adj = adjugate_identity_residual(&z, &p, Some(ratios.c5_estimate)).unwrap();
        assert!(adj.residual < 1e-8);
        assert!(adj.c5_gap.unwrap() < 1e-8);
        // det A = f₀⁴ det J by a column reduction.
        let f0 = crate::theta::eval_f(idx(0), &z, &p).unwrap();
        assert!((adj.det - f0.powi(4) * ratios.det).norm() < 1e-10 * adj.det.norm());
    }

    #[test]
    fn report_json_has_named_residuals() {
        let r = point_report(&generic(), &TruncationPolicy::default()).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in ["R1", "R2", "R3", "R4", "R5", "thetalink_max", "chi5_sq", "adjugate"] {
            assert!(v["residuals"].get(key).is_some(), "{key}");
        }
        assert!(v["c5_estimate"].is_array());
        assert_eq!(chi5_factor_count(), 10);
    }
}
