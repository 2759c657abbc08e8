use igusa_core::covering::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[test]
fn thresholds_coincide_when_k_is_a_multiple() {
    for a in 1..=4u32 {
        for k in 0..=24u64 {
            let t = thresholds_for(&[a], k).unwrap();
            assert!(t.d <= t.big_d);
            if k % (a as u64 + 1) == 0 {
                assert_eq!(t.d, t.big_d, "a = {a}, k = {k}");
            }
        }
    }
    for a in [[1, 2], [2, 3], [1, 4]] {
        for k in 0..=24u64 {
            if a.iter().all(|&m| k % (m as u64 + 1) == 0) {
                let t = thresholds_for(&a, k).unwrap();
                assert_eq!(t.d, t.big_d, "a = {a:?}, k = {k}");
            }
        }
    }
}

/// Random homogeneous polynomial of degree `deg` in `nvars` variables.
fn homog(nvars: usize, deg: u32) -> impl Strategy<Value = HomogPoly> {
    prop::collection::vec((prop::collection::vec(0u32..=deg, nvars - 1), -3i64..=3), 0..4).prop_map(move |terms| {
        let mut p = HomogPoly::zero(nvars);
        for (head, c) in terms {
            // Fill the remaining degree into X0 when possible.
            let used: u32 = head.iter().sum();
            if used <= deg {
                let mut e = vec![deg - used];
                e.extend(head);
                p.add_term(e, q(c));
            }
        }
        p
    })
}

fn x0_power(p: HomogPoly, k: u32) -> HomogPoly {
    let mut e = vec![0; p.nvars()];
    e[0] = k;
    p.mul(&HomogPoly::monomial(e, q(1)))
}

fn quadric(nvars: usize) -> HomogPoly {
    let mut qp = HomogPoly::zero(nvars);
    for j in 1..nvars {
        let mut e = vec![0; nvars];
        e[j] = 2;
        qp.add_term(e, q(1));
    }
    let mut e = vec![0; nvars];
    e[0] = 2;
    qp.add_term(e, q(-1));
    qp
}

fn top_candidate(n: usize) -> impl Strategy<Value = TensorCandidate> {
    (0u64..=2, 0u32..=3).prop_flat_map(move |(k, shift)| {
        // X0-power at or just below the critical exponent k(n+1)+n+1.
        let crit = (k as usize * (n + 1) + n + 1) as u32;
        let power = crit.saturating_sub(shift);
        let pole = ((power + 1) / 2 + 1) as i64;
        let deg = 2 * pole as u32;
        homog(n + 1, deg - power).prop_map(move |a| TensorCandidate {
            n,
            p: n,
            k,
            pole_order: pole,
            coeffs: [((1..=n).collect(), x0_power(a, power))].into_iter().collect(),
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn thresholds_monotone_in_k(a in prop::collection::vec(1u32..=4, 1..4), k in 0u64..40) {
        let t0 = thresholds_for(&a, k).unwrap();
        let t1 = thresholds_for(&a, k + 1).unwrap();
        prop_assert!(t0.d <= t0.big_d);
        prop_assert!(t0.d <= t1.d);
        if a.iter().all(|&m| m == 1) {
            prop_assert_eq!(t0.big_d, t1.d);
        }
    }

    #[test]
    fn top_degree_condition_matches_general_conditions(
        c in (1usize..=3).prop_flat_map(top_candidate),
    ) {
        let divisor = quadric(c.n + 1);
        let top = membership_conditions(&c, &divisor).unwrap();
        let general = general_conditions(&c, &divisor).unwrap();
        prop_assert_eq!(top.member, general.member);
    }

    #[test]
    fn membership_is_scale_invariant(
        c in (1usize..=3).prop_flat_map(top_candidate),
        s in prop_oneof![-5i64..=-1, 1i64..=5],
        t in 1i64..=7,
    ) {
        let divisor = quadric(c.n + 1);
        let factor = BigRational::new(BigInt::from(s), BigInt::from(t));
        let a = membership_conditions(&c, &divisor).unwrap();
        let b = membership_conditions(&c.scaled(&factor), &divisor).unwrap();
        prop_assert_eq!(a.failed(), b.failed());
    }

    #[test]
    fn oracle_sufficient_bound_matches_lower_threshold(k in 0u64..30, pole in 0i64..20) {
        let v = pullback_order_oracle(&[-pole], k, 1, 1).unwrap()[0];
        let t = thresholds_for(&[1], k).unwrap();
        prop_assert_eq!(v.sufficient, pole <= t.d as i64);
        prop_assert_eq!(v.necessary, pole <= t.big_d as i64);
        prop_assert_eq!(band_verdict(pole_band(pole, &t)), v.verdict);
    }
}
