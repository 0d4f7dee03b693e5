//! Count queries and sensitivity under classical, ontology-aware and
//! attacker-perceived neighborhoods.
//!
//! Sensitivities are anchored at a given database: the maximum is taken over
//! the neighborhood of that database rather than over every pair of the
//! whole space, which is rarely enumerable.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kg::{Graph, Symbol};
use crate::rules::{match_pattern, Atom};
use crate::spaces::{attack_spaces_considering, defense_space, onto_neighbors, SpaceConfig};

/// `COUNT(DISTINCT ?counted)` over a conjunctive pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountQuery {
    pattern: Vec<Atom>,
    counted: Symbol,
}

impl CountQuery {
    /// `counted` is the variable name without its `?`.
    pub fn new(counted: &str, pattern: Vec<Atom>) -> Result<Self> {
        let counted = Symbol::new(counted)?;
        if pattern.is_empty() {
            return Err(Error::InvalidQuery("empty pattern".into()));
        }
        if !pattern.iter().flat_map(Atom::variables).any(|v| v == &counted) {
            return Err(Error::InvalidQuery(format!(
                "counted variable ?{counted} does not occur in the pattern"
            )));
        }
        Ok(CountQuery { pattern, counted })
    }

    pub fn pattern(&self) -> &[Atom] {
        &self.pattern
    }

    pub fn counted(&self) -> &Symbol {
        &self.counted
    }
}

impl fmt::Display for CountQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "COUNT DISTINCT ?{} WHERE ", self.counted)?;
        for (i, atom) in self.pattern.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{atom}")?;
        }
        Ok(())
    }
}

/// Number of distinct values of the counted variable over all matches.
pub fn evaluate(q: &CountQuery, g: &Graph) -> u64 {
    let values: BTreeSet<Symbol> = match_pattern(&q.pattern, g)
        .into_iter()
        .filter_map(|mut s| s.remove(&q.counted))
        .collect();
    values.len() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SensitivityKind {
    /// Bounded neighbors of the database (the curator's usual view).
    Classical,
    /// Ontology-aware neighbors.
    Onto,
    /// Largest spread inside a single attack space.
    Perceived,
}

impl fmt::Display for SensitivityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SensitivityKind::Classical => "classical",
            SensitivityKind::Onto => "onto",
            SensitivityKind::Perceived => "perceived",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SensitivityReport {
    pub kind: SensitivityKind,
    pub value: u64,
    /// A pair of graphs whose answers differ by `value`, when `value > 0`.
    pub witness: Option<(Graph, Graph)>,
    /// Set when there was nothing to compare against. A zero obtained this
    /// way says nothing about how much the answer can actually vary.
    pub empty_neighborhood: bool,
}

fn widest_gap<'a>(
    kind: SensitivityKind,
    q: &CountQuery,
    anchor: &'a Graph,
    neighbors: impl IntoIterator<Item = &'a Graph>,
) -> SensitivityReport {
    let base = evaluate(q, anchor);
    let mut report = SensitivityReport {
        kind,
        value: 0,
        witness: None,
        empty_neighborhood: true,
    };
    for g in neighbors {
        report.empty_neighborhood = false;
        let gap = base.abs_diff(evaluate(q, g));
        if gap > report.value {
            report.value = gap;
            report.witness = Some((anchor.clone(), g.clone()));
        }
    }
    report
}

/// Largest change of `q` between `d` and one of its bounded neighbors.
pub fn classical_sensitivity(q: &CountQuery, d: &Graph, cfg: &SpaceConfig) -> Result<SensitivityReport> {
    let space = defense_space(d, cfg)?;
    Ok(widest_gap(
        SensitivityKind::Classical,
        q,
        d,
        space.iter().filter(|g| *g != d),
    ))
}

/// Largest change of `q` between `d` and one of its ontology-aware
/// neighbors.
pub fn onto_sensitivity(
    q: &CountQuery,
    d: &Graph,
    cfg: &SpaceConfig,
    cap: usize,
) -> Result<SensitivityReport> {
    let neighbors = onto_neighbors(d, cfg, cap)?;
    Ok(widest_gap(SensitivityKind::Onto, q, d, &neighbors))
}

/// Largest gap an inference-aware up-to-one attacker observes inside a
/// single attack space, over every prior that considers `d`.
pub fn perceived_sensitivity(
    q: &CountQuery,
    d: &Graph,
    cfg: &SpaceConfig,
    cap: usize,
) -> Result<SensitivityReport> {
    let mut report = SensitivityReport {
        kind: SensitivityKind::Perceived,
        value: 0,
        witness: None,
        empty_neighborhood: true,
    };
    for ps in attack_spaces_considering(d, cfg, cap)? {
        let answers: Vec<(u64, &Graph)> = ps.space.iter().map(|g| (evaluate(q, g), g)).collect();
        if answers.len() >= 2 {
            report.empty_neighborhood = false;
        }
        let (Some(low), Some(high)) = (
            answers.iter().min_by_key(|(v, _)| *v),
            answers.iter().max_by_key(|(v, _)| *v),
        ) else {
            continue;
        };
        if high.0 - low.0 > report.value {
            report.value = high.0 - low.0;
            report.witness = Some((low.1.clone(), high.1.clone()));
        }
    }
    Ok(report)
}
