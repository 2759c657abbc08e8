//! Deterministic sample points in the Siegel upper half-space.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::theta::SiegelPoint;

pub const DEFAULT_SEED: u64 = 20;
pub const DEFAULT_GENERIC_POINTS: usize = 5;

/// Range of the eigenvalues of `Im Z` for generic points.
pub const IMAG_EIGENVALUE_RANGE: (f64, f64) = (0.8, 2.5);

/// A point with `Im Z = R(φ)·diag(λ₁, λ₂)·R(φ)ᵀ` and real parts in
/// `[−1/2, 1/2]`.
pub fn random_point(rng: &mut impl Rng) -> SiegelPoint {
    let (lo, hi) = IMAG_EIGENVALUE_RANGE;
    let l1 = rng.gen_range(lo..=hi);
    let l2 = rng.gen_range(lo..=hi);
    let phi = rng.gen_range(0.0..std::f64::consts::PI);
    let (s, c) = phi.sin_cos();
    let im0 = l1 * c * c + l2 * s * s;
    let im1 = (l1 - l2) * c * s;
    let im2 = l1 * s * s + l2 * c * c;
    let mut re = || rng.gen_range(-0.5..=0.5);
    SiegelPoint::new(
        Complex64::new(re(), im0),
        Complex64::new(re(), im1),
        Complex64::new(re(), im2),
    )
    .expect("eigenvalues are bounded away from zero")
}

pub fn generic_points(seed: u64, count: usize) -> Vec<SiegelPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_point(&mut rng)).collect()
}

/// `diag(i, 2i)` and `diag(1.3i, 0.7i)`, both on the ramification locus.
pub fn diagonal_points() -> Vec<SiegelPoint> {
    vec![
        SiegelPoint::diagonal(1.0, 2.0).expect("valid"),
        SiegelPoint::diagonal(1.3, 0.7).expect("valid"),
    ]
}

/// Generic points followed by the two diagonal points.
pub fn default_grid(seed: u64) -> Vec<SiegelPoint> {
    let mut pts = generic_points(seed, DEFAULT_GENERIC_POINTS);
    pts.extend(diagonal_points());
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_reproducible() {
        assert_eq!(default_grid(7), default_grid(7));
        assert_ne!(default_grid(7), default_grid(8));
        assert_eq!(default_grid(DEFAULT_SEED).len(), 7);
    }

    #[test]
    fn generic_points_have_bounded_spectrum() {
        for z in generic_points(3, 50) {
            let lam = z.imag_min_eigenvalue();
            assert!(lam >= IMAG_EIGENVALUE_RANGE.0 - 1e-12, "{lam}");
            assert!(!z.is_diagonal());
        }
    }
}
