//! Brute-force oracles and random instances for the integration tests.
//!
//! The oracles deliberately avoid the library's matcher, saturation,
//! antecedent search and space constructions: they work from the
//! definitions over explicit subset enumeration. They reuse only the data
//! types, `validate` and `edge_universe`.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use onto_dp::kg::{validate, Comparator, Graph, Schema, Triple, Universe};
use onto_dp::rules::{Atom, Rule, RuleSet, Term};
use onto_dp::sensitivity::CountQuery;
use onto_dp::spaces::SpaceConfig;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Binding = BTreeMap<String, String>;

fn unify_term(term: &Term, value: &str, b: &mut Binding) -> bool {
    match term {
        Term::Const(c) => c.as_str() == value,
        Term::Var(v) => match b.get(v.as_str()) {
            Some(x) => x == value,
            None => {
                b.insert(v.as_str().to_owned(), value.to_owned());
                true
            }
        },
    }
}

/// All bindings of `atoms` in `g`, by plain nested loops over all triples.
pub fn naive_matches(atoms: &[Atom], g: &Graph) -> Vec<Binding> {
    let mut partial = vec![Binding::new()];
    for atom in atoms {
        let mut next = Vec::new();
        for b in &partial {
            for t in g.iter() {
                if t.predicate != atom.predicate {
                    continue;
                }
                let mut b2 = b.clone();
                if unify_term(&atom.subject, t.subject.as_str(), &mut b2)
                    && unify_term(&atom.object, t.object.as_str(), &mut b2)
                {
                    next.push(b2);
                }
            }
        }
        partial = next;
    }
    partial
}

fn ground(term: &Term, b: &Binding) -> String {
    match term {
        Term::Const(c) => c.as_str().to_owned(),
        Term::Var(v) => b[v.as_str()].clone(),
    }
}

/// Naive fixpoint: re-apply every rule to the whole graph until nothing
/// changes.
pub fn naive_saturate(g: &Graph, rules: &RuleSet) -> Graph {
    let mut current = g.clone();
    loop {
        let mut next = current.clone();
        for rule in rules.rules() {
            for b in naive_matches(rule.body(), &current) {
                let h = rule.head();
                next.insert(Triple::new(
                    &ground(&h.subject, &b),
                    h.predicate.as_str(),
                    &ground(&h.object, &b),
                ));
            }
        }
        if next == current {
            return current;
        }
        current = next;
    }
}

pub fn naive_count(q: &CountQuery, g: &Graph) -> u64 {
    naive_matches(q.pattern(), g)
        .into_iter()
        .map(|b| b[q.counted().as_str()].clone())
        .collect::<BTreeSet<_>>()
        .len() as u64
}

/// Every sub-graph of `g` (keeping the triples for which `keep` holds).
pub fn subgraphs(g: &Graph, keep: impl Fn(&Triple) -> bool) -> Vec<Graph> {
    let fixed: Graph = g.iter().filter(|t| keep(t)).cloned().collect();
    let free: Vec<&Triple> = g.iter().filter(|t| !keep(t)).collect();
    assert!(free.len() <= 16, "oracle enumeration too large: {}", free.len());
    (0u32..(1 << free.len()))
        .map(|mask| {
            let mut s = fixed.clone();
            for (i, t) in free.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    s.insert((*t).clone());
                }
            }
            s
        })
        .collect()
}

/// Antecedents of `d` by testing every sub-graph (positive rules only
/// derive, so antecedents are sub-graphs).
pub fn oracle_antecedents(d: &Graph, rules: &RuleSet, type_predicate: &str) -> BTreeSet<Graph> {
    subgraphs(d, |t| t.predicate.as_str() == type_predicate)
        .into_iter()
        .filter(|a| &naive_saturate(a, rules) == d)
        .collect()
}

/// Paired-distance oracle: `g1` and `g2` share a sub-graph at unbounded
/// distance one from both.
pub fn share_one_smaller_subgraph(g1: &Graph, g2: &Graph) -> bool {
    g1.iter().any(|e| {
        let d0 = g1.without(e);
        d0.iter().all(|t| g2.contains_triple(t)) && g2.len() == d0.len() + 1
    })
}

pub fn oracle_member(cfg: &SpaceConfig, g: &Graph) -> bool {
    !cfg.restrict_to_valid
        || (naive_saturate(g, &cfg.rules) == *g && validate(g, &cfg.schema).is_empty())
}

/// Attack space of a prior: admitted saturations of `prior ∪ {e}`.
pub fn oracle_attack_space(prior: &Graph, cfg: &SpaceConfig, universe: &Universe) -> BTreeSet<Graph> {
    universe
        .iter()
        .filter(|e| !prior.contains_triple(e))
        .map(|e| naive_saturate(&prior.with(e.clone()), &cfg.rules))
        .filter(|g| oracle_member(cfg, g))
        .collect()
}

/// Every prior (a sub-graph of `d`) from which adding one universe triple
/// saturates to `d`, with its attack space.
pub fn oracle_attackers(d: &Graph, cfg: &SpaceConfig, universe: &Universe) -> Vec<(Graph, BTreeSet<Graph>)> {
    let type_predicate = cfg.schema.type_predicate().as_str();
    let mut out = Vec::new();
    for d0 in subgraphs(d, |t| t.predicate.as_str() == type_predicate) {
        let considers = universe
            .iter()
            .filter(|e| !d0.contains_triple(e))
            .any(|e| naive_saturate(&d0.with(e.clone()), &cfg.rules) == *d);
        if considers {
            let space = oracle_attack_space(&d0, cfg, universe);
            out.push((d0, space));
        }
    }
    out
}

pub fn oracle_attack_union(d: &Graph, cfg: &SpaceConfig, universe: &Universe) -> BTreeSet<Graph> {
    oracle_attackers(d, cfg, universe)
        .into_iter()
        .flat_map(|(_, s)| s)
        .collect()
}

/// `{d}` plus admitted saturations of bounded neighbors of antecedents,
/// with bounded neighbors found by the paired-distance oracle over all
/// graphs reachable inside `antecedent ∪ universe`.
pub fn oracle_onto_defense(d: &Graph, cfg: &SpaceConfig, universe: &Universe) -> BTreeSet<Graph> {
    let type_predicate = cfg.schema.type_predicate().as_str();
    let mut out: BTreeSet<Graph> = [d.clone()].into();
    for a in oracle_antecedents(d, &cfg.rules, type_predicate) {
        for removed in a.iter().filter(|t| universe.contains(*t)) {
            for added in universe.iter().filter(|t| !a.contains_triple(t)) {
                let candidate = a.without(removed).with(added.clone());
                assert!(share_one_smaller_subgraph(&a, &candidate));
                let s = naive_saturate(&candidate, &cfg.rules);
                if oracle_member(cfg, &s) {
                    out.insert(s);
                }
            }
        }
    }
    out
}

/// Largest answer spread within one attack space over every attacker that
/// considers `d`.
pub fn oracle_perceived(q: &CountQuery, d: &Graph, cfg: &SpaceConfig, universe: &Universe) -> u64 {
    oracle_attackers(d, cfg, universe)
        .into_iter()
        .map(|(_, space)| {
            let answers: Vec<u64> = space.iter().map(|g| naive_count(q, g)).collect();
            match (answers.iter().min(), answers.iter().max()) {
                (Some(lo), Some(hi)) => hi - lo,
                _ => 0,
            }
        })
        .max()
        .unwrap_or(0)
}

/// A small typed instance: a saturated database and its space.
#[derive(Debug, Clone)]
pub struct Instance {
    pub seed: u64,
    pub d: Graph,
    pub cfg: SpaceConfig,
    pub universe: Universe,
}

fn rule(text: &str) -> Rule {
    onto_dp::format::parse_rule(text).unwrap()
}

/// Well-typed templates over `p: A→B`, `q: B→B`, `r: A→B`, `s: A→A`.
pub fn rule_templates() -> Vec<Rule> {
    [
        "p(?x,?y) & q(?y,?z) => r(?x,?z)",
        "p(?x,?y) => r(?x,?y)",
        "p(?x,?y) & p(?z,?y) => s(?x,?z)",
        "r(?x,?y) & q(?y,?z) => r(?x,?z)",
        "q(?x,?y) => q(?y,?x)",
        "r(?x,?y) => p(?x,?y)",
    ]
    .into_iter()
    .map(rule)
    .collect()
}

/// Draws one instance: 4 to 6 typed nodes, at most 8 perturbable triples in
/// the database, a universe of at most 12 triples, 1 or 2 rules, and
/// sometimes a restriction to valid saturated graphs.
pub fn random_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let templates = rule_templates();
    loop {
        let n_nodes = rng.gen_range(4..=6);
        let n_a = rng.gen_range(1..n_nodes);
        let mut base = Graph::new();
        for i in 0..n_nodes {
            let (name, ty) = if i < n_a {
                (format!("a{i}"), "A")
            } else {
                (format!("b{i}"), "B")
            };
            base.insert(Triple::new(&name, "hasType", ty));
        }

        let mut schema = Schema::new();
        schema.add_predicate("p", "A", "B", true).unwrap();
        schema.add_predicate("q", "B", "B", true).unwrap();
        schema.add_predicate("r", "A", "B", rng.gen_bool(0.3)).unwrap();
        schema.add_predicate("s", "A", "A", false).unwrap();
        let restrict = rng.gen_bool(0.5);
        if restrict && rng.gen_bool(0.5) {
            schema.add_cardinality("A", "p", Comparator::AtMost, 2).unwrap();
        }
        if restrict && rng.gen_bool(0.3) {
            schema.add_cardinality("B", "p", Comparator::AtLeast, 1).unwrap();
        }

        let n_rules = rng.gen_range(1..=2);
        let rules: RuleSet = templates
            .choose_multiple(&mut rng, n_rules)
            .cloned()
            .collect();

        let full = onto_dp::kg::edge_universe(&base, &schema).unwrap();
        let mut pool: Vec<Triple> = full.into_iter().collect();
        pool.shuffle(&mut rng);
        let n_base = rng.gen_range(1..=4.min(pool.len()));
        for t in &pool[..n_base] {
            base.insert(t.clone());
        }
        let d = naive_saturate(&base, &rules);

        let perturbable: Vec<Triple> = d
            .iter()
            .filter(|t| schema.is_mutable(&t.predicate))
            .cloned()
            .collect();
        if perturbable.is_empty() || perturbable.len() > 8 {
            continue;
        }
        let mut universe: Universe = perturbable.iter().cloned().collect();
        for t in pool.iter() {
            if universe.len() >= 12 {
                break;
            }
            universe.insert(t.clone());
        }
        let derived = d.iter().filter(|t| rules.head_unifies(t)).count();
        if derived > 10 || d.iter().filter(|t| t.predicate.as_str() != "hasType").count() > 10 {
            continue;
        }

        let mut cfg = SpaceConfig::new(schema, rules).with_universe(universe.clone());
        cfg.restrict_to_valid = restrict;
        if !oracle_member(&cfg, &d) {
            continue;
        }
        return Instance {
            seed,
            d,
            cfg,
            universe,
        };
    }
}

pub fn random_instances(count: u64) -> Vec<Instance> {
    (0..count).map(|i| random_instance(0x5eed_0000 + i)).collect()
}

/// The same instance with no rules: the database becomes the base graph
/// itself (still in the space when restricted).
pub fn without_rules(inst: &Instance) -> Instance {
    let mut cfg = inst.cfg.clone();
    cfg.rules = RuleSet::empty();
    Instance {
        seed: inst.seed,
        d: inst.d.clone(),
        cfg,
        universe: inst.universe.clone(),
    }
}
