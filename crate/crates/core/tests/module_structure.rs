use igusa_core::exact::binomial;
use igusa_core::module_lab::*;

#[test]
fn even_hilbert_function_through_degree_ten() {
    for h in hilbert_table(ModuleTag::MPlus, 10) {
        assert!(h.matched, "{h:?}");
    }
}

#[test]
fn odd_hilbert_function_through_degree_twelve() {
    for h in hilbert_table(ModuleTag::MMinus, 12) {
        assert!(h.matched, "{h:?}");
    }
}

#[test]
fn even_formula_matches_surjective_kernel_count() {
    for r in 1..=20i64 {
        let kernel = 4 * binomial(r + 2, 3) - binomial(r + 3, 3);
        assert_eq!(mplus_formula(r as u32), kernel, "r = {r}");
    }
}

#[test]
fn brackets_generate_even_module() {
    for r in 2..=8 {
        let g = generation_check_mplus(r);
        assert!(g.equal, "{g:?}");
    }
    assert_eq!(generation_check_mplus(4).generated_dim, 45);
    assert_eq!(generation_check_mplus(6).kernel_dim, 140);
}

#[test]
fn tribrackets_generate_odd_module() {
    for r in 5..=10 {
        let g = generation_check_mminus(r);
        assert!(g.equal, "{g:?}");
    }
    assert_eq!(generation_check_mminus(7).generated_dim, 36);
}

#[test]
fn even_syzygies_follow_the_koszul_pattern() {
    let s4 = syzygy_check_mplus(4);
    assert_eq!((s4.full_dim, s4.formal_count, s4.span_dim, s4.second_syzygy_dim), (15, 16, 15, 1));
    assert!(s4.spanned);
    let s5 = syzygy_check_mplus(5);
    // 6·C(6,3) − dim M⁺₅ relations, all multiples of the four linear ones.
    assert_eq!(s5.full_dim as u64, 6 * binomial(6, 3) - mplus_formula(5));
    assert!(s5.spanned);
}

#[test]
fn odd_syzygies_are_multiples_of_one_relation() {
    for (r, dim) in [(6, 1), (7, 4), (8, 10)] {
        let s = syzygy_check_mminus(r);
        assert_eq!((s.full_dim, s.span_dim), (dim, dim), "r = {r}");
        assert!(s.spanned && s.relations_hold);
    }
}

#[test]
fn intersection_theorem_in_low_degrees() {
    for r in 6..=10 {
        let i = intersection_check(r);
        assert!(i.equal_as_subspaces, "{i:?}");
        assert_eq!(i.rhs_dim as u64, mplus_formula(r - 4));
    }
}

#[test]
fn trivial_multiplier_combined_dimensions() {
    for h in hilbert_table(ModuleTag::TrivialCombined, 5) {
        assert!(h.matched, "{h:?}");
    }
}
