//! Acceptance suite: one test per criterion, printing a pass/fail line and
//! the per-check details (run with `-- --nocapture` to see them live).
//!
//! The seed is fixed so the sampled checks are reproducible byte for byte.

use endomon_core::accept;

const SEED: u64 = 0xE11D_0017;

fn run(id: u32) {
    let outcome = accept::run_criterion(id, SEED, None);
    println!("{}", outcome.summary_line());
    for line in &outcome.details {
        println!("    {line}");
    }
    assert!(
        outcome.pass,
        "{} -- details:\n{}",
        outcome.summary_line(),
        outcome.details.join("\n")
    );
}

#[test]
fn criterion_01_group_order_and_associativity() {
    run(1);
}

#[test]
fn criterion_02_power_formula_oracle() {
    run(2);
}

#[test]
fn criterion_03_non_central_element_orders() {
    run(3);
}

#[test]
fn criterion_04_end_commutative_censuses() {
    run(4);
}

#[test]
fn criterion_05_noncommuting_witnesses() {
    run(5);
}

#[test]
fn criterion_06_cyclic_census() {
    run(6);
}

#[test]
fn criterion_07_exceptional_tables_and_no_section() {
    run(7);
}

#[test]
fn criterion_08_monoid_isomorphisms() {
    run(8);
}

#[test]
fn criterion_09_orbit_censuses() {
    run(9);
}

#[test]
fn criterion_10_tsdp_axioms() {
    run(10);
}

#[test]
fn criterion_11_nil_per_split() {
    run(11);
}

#[test]
fn criterion_12_omega1_dichotomy() {
    run(12);
}
