//! Ontology-aware differential privacy for knowledge graphs.
//!
//! A curator answering count queries over a knowledge graph usually calibrates
//! noise against *edge* neighbors: graphs that differ by one swapped triple.
//! An attacker who knows the inference rules behind the graph reasons about
//! something else: one missing base fact, plus everything that fact lets the
//! rules derive. The two views disagree, and the curator can end up adding
//! no noise at all to an answer the attacker reads with certainty.
//!
//! This crate makes both views executable:
//!
//! - [`kg`]: triple-set graphs, schemas, edge universes, paired bounded and
//!   unbounded neighbors.
//! - [`rules`]: positive Horn rules, semi-naive saturation and antecedent
//!   enumeration.
//! - [`spaces`]: defense spaces, attack spaces, ontology-aware neighbors and
//!   the well-suitedness check.
//! - [`sensitivity`]: count queries and their classical, ontology-aware and
//!   attacker-perceived sensitivities.
//! - [`mechanism`]: seeded Laplace release.
//! - [`adversary`]: the identification game against a curator.
//! - [`cli`]: the `onto-dp` command.
//!
//! ```
//! use onto_dp::fixtures::hospital;
//! use onto_dp::rules::DEFAULT_ANTECEDENT_CAP as CAP;
//! use onto_dp::sensitivity::{classical_sensitivity, onto_sensitivity};
//!
//! let h = hospital();
//! let space = h.space();
//! let classical = classical_sensitivity(&h.query, &h.true_db, &space).unwrap();
//! let onto = onto_sensitivity(&h.query, &h.true_db, &space, CAP).unwrap();
//! assert_eq!((classical.value, onto.value), (0, 2));
//! ```

pub mod adversary;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod kg;
pub mod mechanism;
pub mod rules;
pub mod sensitivity;
pub mod spaces;

pub use error::{Error, Result};
pub use kg::{Graph, Schema, Triple};
pub use rules::{Rule, RuleSet};
pub use sensitivity::CountQuery;
pub use spaces::{Semantics, SpaceConfig};

/// Guide chapters, compiled as doctests so the book stays in sync.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/inference.md")]
    mod inference {}
    #[doc = include_str!("../../../book/src/neighborhoods.md")]
    mod neighborhoods {}
    #[doc = include_str!("../../../book/src/sensitivity.md")]
    mod sensitivity {}
    #[doc = include_str!("../../../book/src/release.md")]
    mod release {}
    #[doc = include_str!("../../../book/src/attack-game.md")]
    mod attack_game {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
