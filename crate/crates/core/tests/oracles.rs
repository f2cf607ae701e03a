mod common;

use common::*;

fn check(c: Check) {
    if let Err(msg) = c {
        panic!("{msg}");
    }
}

#[test]
fn zipf_head_matches_compensated_sum() {
    check(zipf_head_by_summation());
}

#[test]
fn zipf_mass_is_one_up_to_a_million_objects() {
    check(zipf_mass_sums_to_one());
}

#[test]
fn zipf_sampler_passes_chi_square() {
    check(zipf_frequencies_chi_square());
}

#[test]
fn interarrival_mean_is_inverse_rate() {
    check(exponential_sample_mean());
}

#[test]
fn bisection_agrees_with_grid_scan() {
    check(tau_equal_weights_grid_scan());
}

#[test]
fn characteristic_time_grows_with_cache() {
    check(tau_increases_with_cache_size());
}

#[test]
fn mixture_two_term() {
    check(mixture_two_term_value());
}

#[test]
fn mixture_never_below_mean_model() {
    check(mixture_dominates_mean_grid());
}

#[test]
fn frozen_reference_values() {
    check(frozen_high_precision_values());
}

#[test]
fn model_grid_spot_value() {
    check(grid_spot_value());
}

#[test]
fn occupancy_ratio_exceeds_limit() {
    check(eta_ratio_limit());
}

#[test]
fn one_pass_stats_match_two_pass() {
    check(running_stats_two_pass());
}

#[test]
fn path_latency_hand_expansion() {
    check(vrtt_hand_expansion());
}

#[test]
fn symmetric_miss_at_cache_size_rank() {
    check(sym_at_cache_size());
}

#[test]
fn model_grid_monotone_in_mean_p() {
    check(grid_monotone_in_mean_p());
}

#[test]
fn oracle_table_is_complete() {
    let names: std::collections::HashSet<&str> = ORACLES.iter().map(|(n, _)| *n).collect();
    assert_eq!(names.len(), ORACLES.len());
}
