//! Genus-2 theta constants evaluated as truncated lattice sums.
//!
//! Coordinates follow `Z = [[z0, z1], [z1, z2]]` and
//! `Z[v] = z0·v₁² + 2·z1·v₁v₂ + z2·v₂²`. Partial derivatives with respect to
//! `z1` treat the off-diagonal entry as a single variable.
//!
//! Every lattice window is a max-norm box around the shift `-m¹/2`; its
//! radius is chosen from a Gaussian tail bound driven by the smallest
//! eigenvalue of `Im Z`, so the dropped terms sum to less than the policy's
//! `target_eps`.

use std::fmt;

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::real::{cabs, cexp, lift, Real, DOUBLE_BITS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThetaError {
    #[error("invalid Siegel point: {0}")]
    InvalidPoint(String),
    #[error("invalid truncation policy: {0}")]
    InvalidPolicy(String),
    #[error("no lattice radius up to {max_radius} brings the tail below {target_eps:e}")]
    TruncationUnreachable { max_radius: u32, target_eps: f64 },
    #[error("characteristic {0} is odd")]
    NotEven(ThetaCharacteristic),
    #[error("all four second-kind thetas fall below {threshold:e}")]
    DegeneratePoint { threshold: f64 },
}

pub type Result<T> = std::result::Result<T, ThetaError>;

/// Lower limit on `Im z0` accepted at construction.
pub const MIN_IMAG_DIAGONAL: f64 = 1e-6;
/// Lower limit on `det Im Z` accepted at construction.
pub const MIN_IMAG_DET: f64 = 1e-12;

/// A point of the genus-2 Siegel upper half-space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointRepr", into = "PointRepr")]
pub struct SiegelPoint {
    z0: Complex64,
    z1: Complex64,
    z2: Complex64,
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    z0: [f64; 2],
    z1: [f64; 2],
    z2: [f64; 2],
}

impl TryFrom<PointRepr> for SiegelPoint {
    type Error = ThetaError;
    fn try_from(p: PointRepr) -> Result<Self> {
        SiegelPoint::new(
            Complex64::new(p.z0[0], p.z0[1]),
            Complex64::new(p.z1[0], p.z1[1]),
            Complex64::new(p.z2[0], p.z2[1]),
        )
    }
}

impl From<SiegelPoint> for PointRepr {
    fn from(p: SiegelPoint) -> Self {
        PointRepr {
            z0: [p.z0.re, p.z0.im],
            z1: [p.z1.re, p.z1.im],
            z2: [p.z2.re, p.z2.im],
        }
    }
}

impl SiegelPoint {
    pub fn new(z0: Complex64, z1: Complex64, z2: Complex64) -> Result<Self> {
        if ![z0, z1, z2].iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(ThetaError::InvalidPoint("non-finite coordinate".into()));
        }
        if z0.im <= MIN_IMAG_DIAGONAL {
            return Err(ThetaError::InvalidPoint(format!(
                "Im z0 = {} is not above {MIN_IMAG_DIAGONAL:e}",
                z0.im
            )));
        }
        let det = z0.im * z2.im - z1.im * z1.im;
        if det <= MIN_IMAG_DET {
            return Err(ThetaError::InvalidPoint(format!(
                "det Im Z = {det} is not above {MIN_IMAG_DET:e}"
            )));
        }
        Ok(SiegelPoint { z0, z1, z2 })
    }

    /// `diag(i·t, i·s)`.
    pub fn diagonal(t: f64, s: f64) -> Result<Self> {
        Self::new(Complex64::new(0.0, t), Complex64::new(0.0, 0.0), Complex64::new(0.0, s))
    }

    pub fn coords(&self) -> [Complex64; 3] {
        [self.z0, self.z1, self.z2]
    }

    pub fn z0(&self) -> Complex64 {
        self.z0
    }
    pub fn z1(&self) -> Complex64 {
        self.z1
    }
    pub fn z2(&self) -> Complex64 {
        self.z2
    }

    pub fn is_diagonal(&self) -> bool {
        self.z1 == Complex64::new(0.0, 0.0)
    }

    /// Smallest eigenvalue of `Im Z`.
    pub fn imag_min_eigenvalue(&self) -> f64 {
        let (a, b, c) = (self.z0.im, self.z1.im, self.z2.im);
        let mean = 0.5 * (a + c);
        let half_gap = (0.5 * (a - c)).hypot(b);
        // Stable form of mean − half_gap for nearly isotropic matrices.
        let det = a * c - b * b;
        det / (mean + half_gap)
    }

    /// `k·Z`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::new(self.z0 * k, self.z1 * k, self.z2 * k)
    }

    /// `Z + B` for a symmetric integer matrix `B`.
    pub fn translated(&self, b: [[i64; 2]; 2]) -> Result<Self> {
        if b[0][1] != b[1][0] {
            return Err(ThetaError::InvalidPoint("translation matrix is not symmetric".into()));
        }
        Self::new(self.z0 + b[0][0] as f64, self.z1 + b[0][1] as f64, self.z2 + b[1][1] as f64)
    }

    /// `A·Z·Aᵀ` for an integer matrix `A`.
    pub fn conjugated(&self, a: [[i64; 2]; 2]) -> Result<Self> {
        let m = [[self.z0, self.z1], [self.z1, self.z2]];
        let af = a.map(|row| row.map(|x| x as f64));
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                for k in 0..2 {
                    for l in 0..2 {
                        *entry += m[k][l] * (af[i][k] * af[j][l]);
                    }
                }
            }
        }
        Self::new(out[0][0], out[0][1], out[1][1])
    }

    /// `(z2, z1, z0)`: the point with the two lattice coordinates exchanged.
    pub fn swapped(&self) -> Self {
        SiegelPoint { z0: self.z2, z1: self.z1, z2: self.z0 }
    }

    /// The point with coordinate `coord` shifted by the complex step `h`.
    pub fn shifted(&self, coord: usize, h: Complex64) -> Result<Self> {
        let mut c = self.coords();
        c[coord] += h;
        Self::new(c[0], c[1], c[2])
    }
}

impl fmt::Display for SiegelPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.z0, self.z1, self.z1, self.z2)
    }
}

/// Characteristic `m = (m¹, m²) ∈ {0,1}⁴`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ThetaCharacteristic {
    pub m1: [u8; 2],
    pub m2: [u8; 2],
}

impl ThetaCharacteristic {
    pub fn new(m1: [u8; 2], m2: [u8; 2]) -> Self {
        assert!(m1.iter().chain(&m2).all(|&b| b <= 1), "characteristic entries are bits");
        ThetaCharacteristic { m1, m2 }
    }

    pub fn is_even(&self) -> bool {
        (self.m1[0] * self.m2[0] + self.m1[1] * self.m2[1]) % 2 == 0
    }

    /// All sixteen characteristics in lexicographic order of `(m¹, m²)`.
    pub fn all() -> impl Iterator<Item = ThetaCharacteristic> {
        (0u8..16).map(|bits| {
            ThetaCharacteristic::new([bits >> 3 & 1, bits >> 2 & 1], [bits >> 1 & 1, bits & 1])
        })
    }
}

impl fmt::Display for ThetaCharacteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(({},{}),({},{}))", self.m1[0], self.m1[1], self.m2[0], self.m2[1])
    }
}

/// The ten even characteristics, lexicographically ordered.
pub fn enumerate_even_characteristics() -> Vec<ThetaCharacteristic> {
    ThetaCharacteristic::all().filter(ThetaCharacteristic::is_even).collect()
}

/// Index `a ∈ F₂²` of a theta constant of the second kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SecondKindIndex {
    pub a: [u8; 2],
}

impl SecondKindIndex {
    pub fn new(a: [u8; 2]) -> Self {
        assert!(a.iter().all(|&b| b <= 1), "index entries are bits");
        SecondKindIndex { a }
    }

    /// Linear index `2·a₁ + a₂`.
    pub fn idx(&self) -> usize {
        2 * self.a[0] as usize + self.a[1] as usize
    }

    pub fn from_idx(i: usize) -> Self {
        assert!(i < 4, "second-kind index out of range: {i}");
        SecondKindIndex::new([(i >> 1) as u8, (i & 1) as u8])
    }

    pub fn all() -> [SecondKindIndex; 4] {
        [0, 1, 2, 3].map(SecondKindIndex::from_idx)
    }

    /// Addition in `F₂²`.
    pub fn plus(&self, other: [u8; 2]) -> Self {
        SecondKindIndex::new([self.a[0] ^ other[0], self.a[1] ^ other[1]])
    }
}

impl fmt::Display for SecondKindIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.idx())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub target_eps: f64,
    pub max_radius: u32,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { target_eps: 1e-14, max_radius: 64 }
    }
}

impl TruncationPolicy {
    pub fn new(target_eps: f64, max_radius: u32) -> Result<Self> {
        let p = TruncationPolicy { target_eps, max_radius };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_eps > 0.0 && self.target_eps.is_finite()) {
            return Err(ThetaError::InvalidPolicy(format!("target_eps = {}", self.target_eps)));
        }
        if self.max_radius < 1 {
            return Err(ThetaError::InvalidPolicy("max_radius must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_eps(&self, target_eps: f64) -> Self {
        TruncationPolicy { target_eps, ..*self }
    }
}

/// Value and first partials (with respect to `z0`, `z1`, `z2`) of a theta
/// constant at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaJet<R: Real = f64> {
    pub value: Complex<R>,
    pub d: [Complex<R>; 3],
}

impl<R: Real> ThetaJet<R> {
    /// Jet of `α·f` for a constant `α`.
    pub fn scaled(&self, alpha: &Complex<R>) -> Self {
        ThetaJet {
            value: self.value.clone() * alpha.clone(),
            d: self.d.clone().map(|x| x * alpha.clone()),
        }
    }
}

/// Symmetric integer quadratic form `Q(z) = zᵀ C z` in four variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QuadricForm {
    pub coeffs: [[i64; 4]; 4],
}

impl QuadricForm {
    pub fn eval<R: Real>(&self, z: &[Complex<R>; 4]) -> Complex<R> {
        let mut acc = Complex::new(R::zero(), R::zero());
        for i in 0..4 {
            for j in 0..4 {
                let c = self.coeffs[i][j];
                if c != 0 {
                    acc = acc + z[i].clone() * z[j].clone() * R::from_i64(c);
                }
            }
        }
        acc
    }

    /// Coefficient of `z_i·z_j` (`i ≤ j`) in the expanded polynomial.
    pub fn monomial_coeff(&self, i: usize, j: usize) -> i64 {
        if i == j {
            self.coeffs[i][i]
        } else {
            self.coeffs[i][j] + self.coeffs[j][i]
        }
    }
}

/// `Q_m(z) = Σ_a (−1)^⟨a,m²⟩ z_{a+m¹} z_a`.
pub fn quadric_coeffs(m: ThetaCharacteristic) -> Result<QuadricForm> {
    if !m.is_even() {
        return Err(ThetaError::NotEven(m));
    }
    let mut twice = [[0i64; 4]; 4];
    for a in SecondKindIndex::all() {
        let sign = if (a.a[0] * m.m2[0] + a.a[1] * m.m2[1]) % 2 == 0 { 1 } else { -1 };
        let i = a.plus(m.m1).idx();
        let j = a.idx();
        // Symmetrize z_i z_j into the matrix, keeping entries integral.
        twice[i][j] += sign;
        twice[j][i] += sign;
    }
    let mut coeffs = [[0i64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            debug_assert!(twice[i][j] % 2 == 0);
            coeffs[i][j] = twice[i][j] / 2;
        }
    }
    Ok(QuadricForm { coeffs })
}

/// The ten quadrics in the order of [`enumerate_even_characteristics`].
pub fn all_quadrics() -> Vec<(ThetaCharacteristic, QuadricForm)> {
    enumerate_even_characteristics()
        .into_iter()
        .map(|m| (m, quadric_coeffs(m).expect("even by construction")))
        .collect()
}

/// Upper bound on `Σ_{t > R} exp(−c t²)` over the one-sided lattice tail
/// starting at `t0`, by comparison with a geometric series.
fn one_sided_tail(c: f64, t0: f64) -> f64 {
    (-c * t0 * t0).exp() / (1.0 - (-2.0 * c * t0).exp())
}

/// Upper bound on the full one-dimensional sum `Σ_t exp(−c t²)`.
fn full_line_bound(c: f64, half_integral: bool) -> f64 {
    if half_integral {
        2.0 * one_sided_tail(c, 0.5)
    } else {
        1.0 + 2.0 * one_sided_tail(c, 1.0)
    }
}

/// Bound on the two-dimensional tail outside the box of radius `r`, for the
/// Gaussian weight `exp(−c|v|²)`.
fn box_tail_bound(c: f64, r: u32, half_integral: bool) -> f64 {
    let tail = |half: bool| {
        let t0 = if half { r as f64 + 0.5 } else { r as f64 + 1.0 };
        2.0 * one_sided_tail(c, t0)
    };
    let (line_tail, line_sum) = if half_integral {
        // Valid for any mix of integral and half-integral coordinates.
        (
            tail(true).max(tail(false)),
            full_line_bound(c, true).max(full_line_bound(c, false)),
        )
    } else {
        (tail(false), full_line_bound(c, false))
    };
    2.0 * line_tail * line_sum
}

/// Smallest radius whose box tail bound falls below `target_eps` for the
/// series with exponent `π·i·scale·Z[v]`.
pub fn choose_radius_scaled(
    z: &SiegelPoint,
    policy: &TruncationPolicy,
    offset_halfint: bool,
    scale: f64,
) -> Result<u32> {
    policy.validate()?;
    let c = std::f64::consts::PI * scale * z.imag_min_eigenvalue();
    (1..=policy.max_radius)
        .find(|&r| box_tail_bound(c, r, offset_halfint) < policy.target_eps)
        .ok_or(ThetaError::TruncationUnreachable {
            max_radius: policy.max_radius,
            target_eps: policy.target_eps,
        })
}

/// Radius for theta constants of the first kind. With `offset_halfint` the
/// bound also covers half-integral lattice shifts.
pub fn choose_radius(z: &SiegelPoint, policy: &TruncationPolicy, offset_halfint: bool) -> Result<u32> {
    choose_radius_scaled(z, policy, offset_halfint, 1.0)
}

/// Truncated lattice sum `Σ exp(πi(scale·Z[w/2] + w·phase/2))` over
/// `w ≡ shift (mod 2)` with `|w_i| ≤ 2·radius`, optionally with the three
/// first partials.
fn lattice_sum<R: Real>(
    z: &[Complex<R>; 3],
    shift: [u8; 2],
    phase: [u8; 2],
    scale: i64,
    radius: u32,
    with_partials: bool,
) -> ThetaJet<R> {
    let zero = || Complex::new(R::zero(), R::zero());
    let pi = z[0].re.pi_like();
    let quarter = R::from_i64(4);
    let r = 2 * radius as i64;
    let axis = |s: u8| (-r..=r).filter(move |w| (w - s as i64).rem_euclid(2) == 0);

    let mut value = zero();
    let mut d = [zero(), zero(), zero()];
    for w1 in axis(shift[0]) {
        for w2 in axis(shift[1]) {
            let c = [scale * w1 * w1, 2 * scale * w1 * w2, scale * w2 * w2];
            // quad = Z[w]·scale / 4
            let mut quad = zero();
            for k in 0..3 {
                if c[k] != 0 {
                    quad = quad + z[k].clone() * R::from_i64(c[k]);
                }
            }
            let quad = quad / quarter.clone();
            let ph = R::from_i64(w1 * phase[0] as i64 + w2 * phase[1] as i64) / R::from_i64(2);
            // πi(quad + ph) = −π·Im quad + i·π(Re quad + ph)
            let exponent = Complex::new(-(pi.clone() * quad.im), pi.clone() * (quad.re + ph));
            let term = cexp(&exponent);
            if with_partials {
                for k in 0..3 {
                    if c[k] != 0 {
                        // ∂/∂z_k = πi·c_k/4 · term
                        let factor = pi.clone() * R::from_i64(c[k]) / quarter.clone();
                        d[k] = d[k].clone() + Complex::new(-(term.im.clone() * factor.clone()), term.re.clone() * factor);
                    }
                }
            }
            value = value + term;
        }
    }
    ThetaJet { value, d }
}

/// Evaluates theta constants at one point in the scalar field `R`.
#[derive(Debug, Clone)]
pub struct ThetaEvaluator<R: Real = f64> {
    point: SiegelPoint,
    z: [Complex<R>; 3],
    policy: TruncationPolicy,
}

impl ThetaEvaluator<f64> {
    pub fn double(point: &SiegelPoint, policy: &TruncationPolicy) -> Self {
        Self::new(point, policy, DOUBLE_BITS)
    }
}

impl<R: Real> ThetaEvaluator<R> {
    /// `bits` is the working mantissa length; it is ignored by `f64`.
    pub fn new(point: &SiegelPoint, policy: &TruncationPolicy, bits: usize) -> Self {
        ThetaEvaluator {
            point: *point,
            z: point.coords().map(|c| lift(c, bits)),
            policy: *policy,
        }
    }

    pub fn point(&self) -> &SiegelPoint {
        &self.point
    }

    pub fn policy(&self) -> &TruncationPolicy {
        &self.policy
    }

    pub fn theta_first(&self, m: ThetaCharacteristic) -> Result<Complex<R>> {
        let radius = choose_radius(&self.point, &self.policy, m.m1 != [0, 0])?;
        Ok(lattice_sum(&self.z, m.m1, m.m2, 1, radius, false).value)
    }

    pub fn f(&self, a: SecondKindIndex) -> Result<Complex<R>> {
        Ok(self.f_jet_inner(a, false)?.value)
    }

    pub fn f_jet(&self, a: SecondKindIndex) -> Result<ThetaJet<R>> {
        self.f_jet_inner(a, true)
    }

    fn f_jet_inner(&self, a: SecondKindIndex, with_partials: bool) -> Result<ThetaJet<R>> {
        let radius = choose_radius_scaled(&self.point, &self.policy, a.a != [0, 0], 2.0)?;
        Ok(lattice_sum(&self.z, a.a, [0, 0], 2, radius, with_partials))
    }

    /// Jets of `f₀ … f₃` in index order.
    pub fn f_jets(&self) -> Result<[ThetaJet<R>; 4]> {
        let jets = SecondKindIndex::all().map(|a| self.f_jet(a));
        let [a, b, c, d] = jets;
        Ok([a?, b?, c?, d?])
    }

    pub fn f_values(&self) -> Result<[Complex<R>; 4]> {
        let vals = SecondKindIndex::all().map(|a| self.f(a));
        let [a, b, c, d] = vals;
        Ok([a?, b?, c?, d?])
    }

    /// The ten even theta constants in characteristic order.
    pub fn even_thetas(&self) -> Result<Vec<Complex<R>>> {
        enumerate_even_characteristics()
            .into_iter()
            .map(|m| self.theta_first(m))
            .collect()
    }

    pub fn chi5(&self) -> Result<Complex<R>> {
        Ok(product(self.even_thetas()?))
    }

    pub fn thetalink_residual(&self, m: ThetaCharacteristic) -> Result<f64> {
        let q = quadric_coeffs(m)?;
        let theta = self.theta_first(m)?;
        let f = self.f_values()?;
        Ok(cabs(&(theta.clone() * theta - q.eval(&f))))
    }
}

pub(crate) fn product<R: Real>(xs: impl IntoIterator<Item = Complex<R>>) -> Complex<R> {
    xs.into_iter()
        .fold(Complex::new(R::one(), R::zero()), |acc, x| acc * x)
}

pub fn eval_theta_first(m: ThetaCharacteristic, z: &SiegelPoint, policy: &TruncationPolicy) -> Result<Complex64> {
    ThetaEvaluator::double(z, policy).theta_first(m)
}

pub fn eval_f(a: SecondKindIndex, z: &SiegelPoint, policy: &TruncationPolicy) -> Result<Complex64> {
    ThetaEvaluator::double(z, policy).f(a)
}

pub fn eval_f_jet(a: SecondKindIndex, z: &SiegelPoint, policy: &TruncationPolicy) -> Result<ThetaJet> {
    ThetaEvaluator::double(z, policy).f_jet(a)
}

pub fn eval_chi5(z: &SiegelPoint, policy: &TruncationPolicy) -> Result<Complex64> {
    ThetaEvaluator::double(z, policy).chi5()
}

pub fn residual_thetalink(m: ThetaCharacteristic, z: &SiegelPoint, policy: &TruncationPolicy) -> Result<f64> {
    ThetaEvaluator::double(z, policy).thetalink_residual(m)
}

/// Image of a point under `Z ↦ [f₀(Z) : … : f₃(Z)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectivePoint {
    pub coords: [Complex64; 4],
}

impl ProjectivePoint {
    /// Affine ratios `f_a / f_b` with `b` the coordinate of largest modulus.
    pub fn normalized(&self) -> [Complex64; 4] {
        let pivot = self
            .coords
            .iter()
            .copied()
            .max_by(|x, y| x.norm().total_cmp(&y.norm()))
            .expect("four coordinates");
        self.coords.map(|c| c / pivot)
    }

    pub fn max_modulus(&self) -> f64 {
        self.coords.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// `(f₀(Z), …, f₃(Z))`, rejecting tuples too small to distinguish from
/// truncation noise.
pub fn eval_projective_f(z: &SiegelPoint, policy: &TruncationPolicy) -> Result<ProjectivePoint> {
    let coords = ThetaEvaluator::double(z, policy).f_values()?;
    let threshold = 10.0 * policy.target_eps;
    if coords.iter().all(|c| c.norm() < threshold) {
        return Err(ThetaError::DegeneratePoint { threshold });
    }
    Ok(ProjectivePoint { coords })
}
