use igusa_core::bracket::*;
use igusa_core::grid::{diagonal_points, generic_points, DEFAULT_SEED};
use igusa_core::real::MpFloat;
use igusa_core::theta::*;
use num_complex::Complex64;

fn idx(i: usize) -> SecondKindIndex {
    SecondKindIndex::from_idx(i)
}

fn reference_point() -> SiegelPoint {
    let c = Complex64::new;
    SiegelPoint::new(c(0.0, 1.0), c(0.1, 0.05), c(0.0, 1.5)).unwrap()
}

/// Five-point stencil derivative of a scalar function of the point along `k`.
fn stencil(z: &SiegelPoint, k: usize, h: f64, g: impl Fn(&SiegelPoint) -> Complex64) -> Complex64 {
    let at = |t: f64| g(&z.shifted(k, Complex64::new(t * h, 0.0)).unwrap());
    (at(-2.0) - 8.0 * at(-1.0) + 8.0 * at(1.0) - at(2.0)) / (12.0 * h)
}

fn f_at(a: usize) -> impl Fn(&SiegelPoint) -> Complex64 {
    move |z| eval_f(idx(a), z, &TruncationPolicy::default()).unwrap()
}

#[test]
fn relations_on_generic_and_diagonal_grid() {
    let p = TruncationPolicy::default();
    let mut pts = generic_points(DEFAULT_SEED, 5);
    pts.extend(diagonal_points());
    for z in pts {
        for n in 1..=5 {
            let r = residual_r(n, &z, &p).unwrap();
            assert!(r < 1e-9, "R{n} = {r:e} at {z}");
        }
    }
}

#[test]
fn c5_is_constant_across_generic_points() {
    let p = TruncationPolicy::default();
    let estimates: Vec<Complex64> = generic_points(DEFAULT_SEED, 5)
        .iter()
        .map(|z| jacobian_det_ratios(z, &p).unwrap().c5_estimate)
        .collect();
    let mean = estimates.iter().sum::<Complex64>() / estimates.len() as f64;
    let var = estimates.iter().map(|e| (e - mean).norm_sqr()).sum::<f64>() / estimates.len() as f64;
    assert!(var.sqrt() < 1e-7 * mean.norm(), "spread {:e} around {mean}", var.sqrt());
    for z in generic_points(DEFAULT_SEED, 5) {
        let adj = adjugate_identity_residual(&z, &p, Some(mean)).unwrap();
        assert!(adj.residual < 1e-8);
        assert!(adj.c5_gap.unwrap() < 1e-8);
    }
}

#[test]
fn determinant_is_stable_under_tighter_truncation() {
    let p = TruncationPolicy::default();
    let z = reference_point();
    let a = jacobian_det_ratios(&z, &p).unwrap().det;
    let b = jacobian_det_ratios(&z, &p.with_eps(p.target_eps / 10.0)).unwrap().det;
    assert!((a - b).norm() < 1e-10);
}

#[test]
fn determinant_matches_finite_difference_quotients() {
    let p = TruncationPolicy::default();
    let z = reference_point();
    let analytic = jacobian_det_ratios(&z, &p).unwrap().det;
    let mut j = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            let f0 = f_at(0);
            let fi = f_at(i + 1);
            j[i][k] = stencil(&z, k, 1e-3, |w| fi(w) / f0(w));
        }
    }
    let det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
        + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
    assert!((det - analytic).norm() < 1e-5 * analytic.norm(), "{det} vs {analytic}");
}

#[test]
fn bracket_is_f_squared_times_derivative_of_quotient() {
    let p = TruncationPolicy::default();
    let z = reference_point();
    let f0 = eval_f(idx(0), &z, &p).unwrap();
    assert!(f0.norm() > 0.5);
    let m = rc2(idx(0), idx(2), &z, &p).unwrap();
    let (num, den) = (f_at(2), f_at(0));
    for (k, entry) in [m.m00, m.m01, m.m11].into_iter().enumerate() {
        let oracle = f0 * f0 * stencil(&z, k, 1e-3, |w| num(w) / den(w));
        assert!((entry - oracle).norm() < 1e-8 * entry.norm().max(1e-3), "entry {k}: {entry} vs {oracle}");
    }
}

#[test]
fn tribracket_matches_finite_difference_determinants() {
    let p = TruncationPolicy::default();
    let z = generic_points(DEFAULT_SEED, 1)[0];
    let t = rc3(idx(0), idx(1), idx(2), &z, &p).unwrap();
    let rows: Vec<[Complex64; 4]> = (0..3)
        .map(|a| {
            let g = f_at(a);
            [g(&z), stencil(&z, 0, 1e-3, &g), stencil(&z, 1, 1e-3, &g), stencil(&z, 2, 1e-3, &g)]
        })
        .collect();
    let minor = |j1: usize, j2: usize| {
        let m: Vec<[Complex64; 3]> = rows.iter().map(|r| [r[j1 + 1], r[j2 + 1], r[0]]).collect();
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    assert!(t.max_abs() > 1e-6);
    assert!((t.m00 - minor(1, 2)).norm() < 1e-6);
    assert!((t.m01 + minor(0, 2)).norm() < 1e-6);
    assert!((t.m11 - minor(0, 1)).norm() < 1e-6);
}

#[test]
fn tribracket_alternates_under_all_permutations() {
    let p = TruncationPolicy::default();
    let z = reference_point();
    let base = rc3(idx(1), idx(2), idx(3), &z, &p).unwrap();
    let perms = [([1, 2, 3], 1.0), ([2, 1, 3], -1.0), ([1, 3, 2], -1.0), ([3, 2, 1], -1.0), ([2, 3, 1], 1.0), ([3, 1, 2], 1.0)];
    for (perm, sign) in perms {
        let t = rc3(idx(perm[0]), idx(perm[1]), idx(perm[2]), &z, &p).unwrap();
        assert!(t.add_scaled(&Complex64::new(-sign, 0.0), &base).max_abs() < 1e-10, "{perm:?}");
    }
}

#[test]
fn bracket_is_linear_in_scaled_jets() {
    let p = TruncationPolicy::default();
    let z = reference_point();
    let alpha = Complex64::new(-1.7, 0.4);
    let fi = eval_f_jet(idx(1), &z, &p).unwrap();
    let fj = eval_f_jet(idx(3), &z, &p).unwrap();
    let scaled = bracket_from_jets(&fi.scaled(&alpha), &fj);
    let expected = BracketMatrix::zero().add_scaled(&alpha, &bracket_from_jets(&fi, &fj));
    assert!(scaled.add_scaled(&Complex64::new(-1.0, 0.0), &expected).max_abs() < 1e-10);
}

#[test]
fn relation_residuals_shrink_with_precision() {
    let z = reference_point();
    let p = TruncationPolicy::new(1e-40, 64).unwrap();
    let e: ThetaEvaluator<MpFloat> = ThetaEvaluator::new(&z, &p, 200);
    let report = point_report_in(&e).unwrap();
    for r in report.residuals.relations() {
        assert!(r < 1e-30, "{r:e}");
    }
    assert!(report.residuals.adjugate < 1e-30);
}
