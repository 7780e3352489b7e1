//! Randomized invariants, 100 seeded cases each.

mod common;

use proptest::prelude::*;

macro_rules! property {
    ($name:ident, $check:path) => {
        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]
            #[test]
            fn $name(seed in any::<u64>()) {
                if let Err(e) = $check(seed) {
                    prop_assert!(false, "seed {}: {}", seed, e);
                }
            }
        }
    };
}

property!(souriau_images_are_unitary, common::souriau_unitarity);
property!(souriau_and_rank_count_agree, common::intersection_count);
property!(gap_is_a_metric, common::gap_axioms);
property!(fundamental_solutions_are_symplectic, common::symplectic_residual);
property!(relative_dimension_is_antisymmetric, common::relative_dimension_antisymmetry);
property!(asymptotic_index_vanishes, common::fredholm_index_zero);
property!(maslov_is_additive_and_odd, common::maslov_concatenation_and_reversal);
property!(pair_maslov_is_additive_and_odd, common::pair_concatenation_and_reversal);
property!(flow_is_additive_and_odd, common::flow_concatenation_and_reversal);
property!(flow_ignores_small_shifts, common::flow_shift_invariance);
property!(flow_survives_complexification, common::flow_complexification);
property!(single_crossing_splits_by_sign, common::midpoint_dichotomy);
property!(integers_are_refinement_stable, common::refinement_stability);
property!(winding_equals_flow, common::chern_equals_flow);
