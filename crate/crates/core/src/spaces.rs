//! Defense spaces, attack spaces and ontology-aware neighborhoods.
//!
//! Everything here is exhaustive enumeration over a closed edge universe: the
//! node population of the anchor graph is fixed and only triples of the
//! universe are ever added or removed. Within one computation the universe is
//! fixed once (from the anchor graph or from an explicit override) and shared
//! by every prior, antecedent and candidate.
//!
//! An up-to-one attacker with prior `D0` considers every saturation of
//! `D0 ∪ {e}` for a candidate triple `e`. The attackers that consider a
//! saturated database `d` plausible are exactly those whose prior is an
//! antecedent of `d` minus one perturbable triple, so their union can be
//! enumerated from [`antecedents`].

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kg::{bounded_neighbors, edge_universe, validate, Graph, Schema, Universe};
use crate::rules::{antecedents, is_saturated, saturate, RuleSet};

/// Which neighborhood the curator defends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    /// Bounded edge distance on the databases themselves.
    Classical,
    /// Bounded edge distance between antecedents.
    Onto,
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Classical => "classical",
            Semantics::Onto => "onto",
        })
    }
}

/// The database space and the inference system.
#[derive(Debug, Clone)]
pub struct SpaceConfig {
    pub schema: Schema,
    pub rules: RuleSet,
    /// Perturbable triples; computed from the anchor graph when `None`.
    pub universe_override: Option<Universe>,
    /// Admit only graphs that satisfy the schema and are saturated.
    pub restrict_to_valid: bool,
}

impl SpaceConfig {
    pub fn new(schema: Schema, rules: RuleSet) -> Self {
        SpaceConfig {
            schema,
            rules,
            universe_override: None,
            restrict_to_valid: true,
        }
    }

    pub fn unrestricted(mut self) -> Self {
        self.restrict_to_valid = false;
        self
    }

    pub fn with_universe(mut self, universe: Universe) -> Self {
        self.universe_override = Some(universe);
        self
    }

    pub fn universe_for(&self, anchor: &Graph) -> Result<Universe> {
        match &self.universe_override {
            Some(u) => Ok(u.clone()),
            None => edge_universe(anchor, &self.schema),
        }
    }

    /// Membership in the database space.
    pub fn admits(&self, g: &Graph) -> bool {
        admits(self, &self.rules, g)
    }

    /// Like [`SpaceConfig::admits`], but reports why `g` is rejected.
    pub fn check_member(&self, g: &Graph) -> Result<()> {
        if !self.restrict_to_valid {
            return Ok(());
        }
        if !is_saturated(g, &self.rules) {
            return Err(Error::NotSaturated);
        }
        let violations = validate(g, &self.schema);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidDatabase(violations))
        }
    }
}

fn admits(cfg: &SpaceConfig, rules: &RuleSet, g: &Graph) -> bool {
    !cfg.restrict_to_valid || (is_saturated(g, rules) && validate(g, &cfg.schema).is_empty())
}

/// A prior `D0` together with the rules the attacker knows.
#[derive(Debug, Clone)]
pub struct AttackerInstance {
    pub prior: Graph,
    pub rules: RuleSet,
}

/// `{d}` plus every admitted bounded neighbor of `d`.
pub fn defense_space(d: &Graph, cfg: &SpaceConfig) -> Result<BTreeSet<Graph>> {
    cfg.check_member(d)?;
    let universe = cfg.universe_for(d)?;
    let mut space: BTreeSet<Graph> = bounded_neighbors(d, &universe)
        .into_iter()
        .filter(|g| cfg.admits(g))
        .collect();
    space.insert(d.clone());
    Ok(space)
}

fn attack_space_in(
    prior: &Graph,
    rules: &RuleSet,
    universe: &Universe,
    cfg: &SpaceConfig,
) -> Result<BTreeSet<Graph>> {
    let mut space = BTreeSet::new();
    for e in universe.iter().filter(|e| !prior.contains_triple(e)) {
        let candidate = saturate(&prior.with(e.clone()), rules)?;
        if admits(cfg, rules, &candidate) {
            space.insert(candidate);
        }
    }
    Ok(space)
}

/// The saturated graphs an up-to-one attacker considers plausible.
///
/// The universe is the override if set, otherwise the one induced by the
/// prior's nodes.
pub fn attack_space(attacker: &AttackerInstance, cfg: &SpaceConfig) -> Result<BTreeSet<Graph>> {
    let universe = cfg.universe_for(&attacker.prior)?;
    attack_space_in(&attacker.prior, &attacker.rules, &universe, cfg)
}

fn require_saturated(d: &Graph, rules: &RuleSet) -> Result<()> {
    if is_saturated(d, rules) {
        Ok(())
    } else {
        Err(Error::NotSaturated)
    }
}

/// Admitted graphs `d' ≠ d` having an antecedent at bounded distance 1 from
/// an antecedent of `d`.
pub fn onto_neighbors(d: &Graph, cfg: &SpaceConfig, cap: usize) -> Result<BTreeSet<Graph>> {
    require_saturated(d, &cfg.rules)?;
    let universe = cfg.universe_for(d)?;
    let mut out = BTreeSet::new();
    for a in antecedents(d, &cfg.rules, cap)? {
        for swapped in bounded_neighbors(&a, &universe) {
            let candidate = saturate(&swapped, &cfg.rules)?;
            if &candidate != d && cfg.admits(&candidate) {
                out.insert(candidate);
            }
        }
    }
    Ok(out)
}

/// Every prior whose attacker considers `d`: an antecedent of `d` with one
/// perturbable triple removed.
pub fn priors_considering(d: &Graph, cfg: &SpaceConfig, cap: usize) -> Result<BTreeSet<Graph>> {
    require_saturated(d, &cfg.rules)?;
    let universe = cfg.universe_for(d)?;
    priors_in(d, cfg, &universe, cap)
}

fn priors_in(d: &Graph, cfg: &SpaceConfig, universe: &Universe, cap: usize) -> Result<BTreeSet<Graph>> {
    let mut priors = BTreeSet::new();
    for a in antecedents(d, &cfg.rules, cap)? {
        for e in a.iter().filter(|e| universe.contains(*e)) {
            priors.insert(a.without(e));
        }
    }
    Ok(priors)
}

/// One prior and its attack space, as seen from an anchor database.
#[derive(Debug, Clone)]
pub struct PriorSpace {
    pub prior: Graph,
    pub space: BTreeSet<Graph>,
}

/// The attack space of every prior that considers `d`, over the universe
/// induced by `d`.
pub fn attack_spaces_considering(d: &Graph, cfg: &SpaceConfig, cap: usize) -> Result<Vec<PriorSpace>> {
    require_saturated(d, &cfg.rules)?;
    let universe = cfg.universe_for(d)?;
    priors_in(d, cfg, &universe, cap)?
        .into_iter()
        .map(|prior| {
            let space = attack_space_in(&prior, &cfg.rules, &universe, cfg)?;
            Ok(PriorSpace { prior, space })
        })
        .collect()
}

/// Union of the attack spaces of all priors that consider `d`.
pub fn attacker_union(d: &Graph, cfg: &SpaceConfig, cap: usize) -> Result<BTreeSet<Graph>> {
    Ok(attack_spaces_considering(d, cfg, cap)?
        .into_iter()
        .flat_map(|ps| ps.space)
        .collect())
}

/// Outcome of comparing a defense space with the attacker union.
#[derive(Debug, Clone, Serialize)]
pub struct WellSuitedReport {
    pub semantics: Semantics,
    pub equal: bool,
    pub defense_size: usize,
    pub attack_union_size: usize,
    /// In the attacker union but not defended.
    pub leakage_witnesses: Vec<Graph>,
    /// Defended although no attacker considers them.
    pub over_protection_witnesses: Vec<Graph>,
}

/// Defense space of `d` under `semantics`, i.e. `{d}` plus its neighbors.
pub fn defense_space_for(
    d: &Graph,
    cfg: &SpaceConfig,
    semantics: Semantics,
    cap: usize,
) -> Result<BTreeSet<Graph>> {
    match semantics {
        Semantics::Classical => defense_space(d, cfg),
        Semantics::Onto => {
            let mut space = onto_neighbors(d, cfg, cap)?;
            space.insert(d.clone());
            Ok(space)
        }
    }
}

pub fn check_well_suited(
    d: &Graph,
    cfg: &SpaceConfig,
    semantics: Semantics,
    cap: usize,
) -> Result<WellSuitedReport> {
    require_saturated(d, &cfg.rules)?;
    let defense = defense_space_for(d, cfg, semantics, cap)?;
    let union = attacker_union(d, cfg, cap)?;
    let leakage_witnesses: Vec<Graph> = union.difference(&defense).cloned().collect();
    let over_protection_witnesses: Vec<Graph> = defense.difference(&union).cloned().collect();
    Ok(WellSuitedReport {
        semantics,
        equal: leakage_witnesses.is_empty() && over_protection_witnesses.is_empty(),
        defense_size: defense.len(),
        attack_union_size: union.len(),
        leakage_witnesses,
        over_protection_witnesses,
    })
}
