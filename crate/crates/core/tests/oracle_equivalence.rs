mod common;

use dpdelta::oracle::{brute_force_negative_part, random_equivalence};
use dpdelta::zariski::parametric_decompose;
use dpdelta::{r, Error};

// the acceptance target runs 100 trials per pair; a short run with another seed here
#[test]
fn engine_matches_subset_oracle_on_whole_catalog() {
    let mut bad = vec![];
    let mut pairs = 0;
    for inst in common::flag_instances() {
        let rep = random_equivalence(&inst.config, &inst.flag, 12, 0xfeed).unwrap();
        pairs += 1;
        if !rep.ok() {
            bad.push(format!("{}: {rep}", inst.label()));
        }
    }
    assert!(pairs >= 80, "only {pairs} pairs");
    assert!(bad.is_empty(), "{}", bad.join("\n"));
}

#[test]
fn oracle_agrees_at_breakpoints() {
    // breakpoints are where supports change, the likeliest place for a disagreement
    for inst in common::flag_instances() {
        let d = parametric_decompose(&inst.config, &inst.flag).unwrap();
        for c in &d.chambers {
            if c.lo.is_zero() {
                continue;
            }
            let class = inst.config.sweep_class(&inst.flag, &c.lo).unwrap();
            let oracle = brute_force_negative_part(&inst.config, &class)
                .unwrap_or_else(|e| panic!("{} at {}: {e}", inst.label(), c.lo));
            assert_eq!(oracle, d.negative_part(&c.lo).unwrap(), "{} at {}", inst.label(), c.lo);
        }
    }
}

#[test]
fn beyond_threshold_has_no_solution() {
    for inst in common::flag_instances().into_iter().take(12) {
        let d = parametric_decompose(&inst.config, &inst.flag).unwrap();
        let v = &d.tau + &r("1/7");
        let class = inst.config.sweep_class(&inst.flag, &v).unwrap();
        assert!(
            matches!(brute_force_negative_part(&inst.config, &class), Err(Error::NoSolution)),
            "{}",
            inst.label()
        );
    }
}
