//! The hospital example, embedded from `fixtures/hospital/`.
//!
//! Two doctors (DrSmith in Psychiatry, DrAdam in Oncology), three patients,
//! and the rule that a doctor's patients are patients of the doctor's
//! department. The attacker knows everything except DrSmith's department.

use crate::format::{parse_graph, parse_query, parse_rules, parse_schema};
use crate::kg::{Graph, Schema};
use crate::rules::RuleSet;
use crate::sensitivity::CountQuery;
use crate::spaces::SpaceConfig;

pub const ANTECEDENT: &str = include_str!("../fixtures/hospital/antecedent.nt");
pub const TRUE_DB: &str = include_str!("../fixtures/hospital/true_db.nt");
pub const PRIOR: &str = include_str!("../fixtures/hospital/prior.nt");
pub const PLAUSIBLE: &str = include_str!("../fixtures/hospital/plausible.nt");
pub const TOY: &str = include_str!("../fixtures/hospital/toy.nt");
pub const RULES: &str = include_str!("../fixtures/hospital/hospital.rules");
pub const SCHEMA: &str = include_str!("../fixtures/hospital/hospital.schema");
pub const QUERY: &str = include_str!("../fixtures/hospital/oncology.query");

#[derive(Debug, Clone)]
pub struct Hospital {
    /// Base facts of the true database, before reasoning.
    pub antecedent: Graph,
    /// The curated database: `antecedent` saturated.
    pub true_db: Graph,
    /// What the attacker knows: `antecedent` minus DrSmith's department.
    pub prior: Graph,
    /// DrSmith in Oncology instead, saturated.
    pub plausible: Graph,
    pub rules: RuleSet,
    pub schema: Schema,
    /// Number of patients in Oncology.
    pub query: CountQuery,
}

impl Hospital {
    /// The space of valid saturated hospital databases.
    pub fn space(&self) -> SpaceConfig {
        SpaceConfig::new(self.schema.clone(), self.rules.clone())
    }
}

pub fn hospital() -> Hospital {
    let graph = |text| parse_graph(text).expect("fixture graph parses");
    Hospital {
        antecedent: graph(ANTECEDENT),
        true_db: graph(TRUE_DB),
        prior: graph(PRIOR),
        plausible: graph(PLAUSIBLE),
        rules: parse_rules(RULES).expect("fixture rules parse"),
        schema: parse_schema(SCHEMA).expect("fixture schema parses"),
        query: parse_query(QUERY).expect("fixture query parses"),
    }
}

/// The one-doctor toy database.
pub fn toy() -> Graph {
    parse_graph(TOY).expect("fixture graph parses")
}
