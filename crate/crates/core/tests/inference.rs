mod common;

use common::{naive_saturate, oracle_antecedents, random_instance};
use onto_dp::fixtures::hospital;
use onto_dp::rules::{antecedents, is_saturated, saturate, saturate_capped, RuleSet};
use onto_dp::Error;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn saturation_laws(seed: u64) {
        let inst = random_instance(seed);
        let rules = &inst.cfg.rules;
        let base = inst.d.iter().filter(|t| !rules.head_unifies(t)).cloned().collect();
        let s = saturate(&base, rules).unwrap();
        prop_assert_eq!(&s, &naive_saturate(&base, rules));
        prop_assert_eq!(&saturate(&s, rules).unwrap(), &s);
        prop_assert!(is_saturated(&s, rules));
        prop_assert!(base.iter().all(|t| s.contains_triple(t)));

        // Monotone: more input, more output.
        let bigger = inst.d.clone();
        let sb = saturate(&bigger, rules).unwrap();
        prop_assert!(s.iter().all(|t| sb.contains_triple(t)));

        // Rule order does not matter.
        let reversed: RuleSet = rules.rules().iter().rev().cloned().collect();
        prop_assert_eq!(saturate(&base, &reversed).unwrap(), s);
    }

    #[test]
    fn antecedents_match_subgraph_oracle(seed: u64) {
        let inst = random_instance(seed);
        let rules = &inst.cfg.rules;
        prop_assert_eq!(
            antecedents(&inst.d, rules, 20).unwrap(),
            oracle_antecedents(&inst.d, rules, "hasType")
        );
    }
}

#[test]
fn hospital_has_eight_antecedents() {
    let h = hospital();
    let found = antecedents(&h.true_db, &h.rules, 20).unwrap();
    assert_eq!(found, oracle_antecedents(&h.true_db, &h.rules, "hasType"));
    assert_eq!(found.len(), 8);
    assert!(found.contains(&h.antecedent));
}

#[test]
fn budgets_are_enforced() {
    let h = hospital();
    assert!(matches!(
        saturate_capped(&h.antecedent, &h.rules, 3),
        Err(Error::FixpointBudgetExceeded { .. })
    ));
    assert!(matches!(
        antecedents(&h.true_db, &h.rules, 2),
        Err(Error::AntecedentBudgetExceeded { .. })
    ));
    assert!(matches!(antecedents(&h.antecedent, &h.rules, 20), Err(Error::NotSaturated)));
}
