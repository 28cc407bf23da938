mod common;

use std::time::Instant;

use common::*;

fn assert_clean(failures: Vec<String>) {
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn every_corpus_expectation_reproduces() {
    assert_clean(expectation_failures());
}

#[test]
fn two_block_market_has_exactly_two_decompositions() {
    assert_clean(ex1_failures());
}

#[test]
fn cyclic_market_envy_witness_and_realizable_set() {
    assert_clean(p4_failures());
}

#[test]
fn uniform_cycle_certificates() {
    assert_clean(p6_failures());
}

#[test]
fn claimwise_but_not_fractional_witness() {
    assert_clean(p10_failures());
}

#[test]
fn tied_market_has_one_decomposition() {
    assert_clean(p16_failures());
}

#[test]
fn sd_stable_matching_claim() {
    assert_clean(p33_failures());
}

#[test]
fn associated_instance_golden() {
    assert_clean(ex3_failures());
}

#[test]
fn associated_claim_on_dummies() {
    assert_clean(ex7_failures());
}

#[test]
fn every_separation_has_a_case() {
    assert_clean(separation_failures());
}

#[test]
fn corpus_is_fast() {
    let start = Instant::now();
    let failures = all_corpus_failures();
    let elapsed = start.elapsed();
    assert_clean(failures);
    assert!(elapsed.as_secs_f64() < 5.0, "corpus took {elapsed:?}");
}
