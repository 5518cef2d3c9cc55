//! Module invariants as property tests.

mod support;

const CASES: u32 = 256;

macro_rules! property_tests {
    ($($name:ident),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                support::properties::$name(CASES).unwrap();
            }
        )*
    };
}

property_tests!(
    predictive_cdf_monotone,
    affine_response_consistency,
    linear_predictor_is_singular,
    monotone_exceedance,
    table_query_coherence,
    table_partition,
    excluded_variable_is_flat,
    baseline_exactness,
    zero_coefficient_curve,
    leakage_bounded_and_monotone,
    crps_propriety,
    crps_translation,
    crps_scale,
    skill_exact_and_decreasing,
    report_means_recompute,
    synthesize_nonnegative_reproducible,
);

#[test]
fn every_property_is_listed() {
    assert_eq!(support::properties::all().len(), 16);
}
