//! Triple-set graphs, schemas, and the paired edge distances.
//!
//! A [`Graph`] is a finite set of [`Triple`]s. Its nodes are implicit: every
//! token that occurs as a subject or object. Neighbor generation never creates
//! nodes; it only adds, removes or swaps triples drawn from a finite edge
//! universe (see [`edge_universe`]).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// An identifier token: ASCII letters, digits, `_` and `:`, non-empty.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(token: &str) -> Result<Self> {
        if is_identifier(token) {
            Ok(Symbol(Arc::from(token)))
        } else {
            Err(Error::InvalidIdentifier(token.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub(crate) fn is_identifier(token: &str) -> bool {
    !token.is_empty()
        && token
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b':')
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

/// A `(subject, predicate, object)` fact. Ordering is lexicographic on the
/// three fields, which is the canonical output order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Symbol,
    pub predicate: Symbol,
    pub object: Symbol,
}

impl Triple {
    /// Builds a triple from literal tokens.
    ///
    /// Panics if a token is not a valid identifier; use [`Triple::try_new`]
    /// for untrusted input.
    pub fn new(subject: &str, predicate: &str, object: &str) -> Self {
        match Self::try_new(subject, predicate, object) {
            Ok(t) => t,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn try_new(subject: &str, predicate: &str, object: &str) -> Result<Self> {
        Ok(Triple {
            subject: Symbol::new(subject)?,
            predicate: Symbol::new(predicate)?,
            object: Symbol::new(object)?,
        })
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.object)
    }
}

impl fmt::Debug for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {} {})", self.subject, self.predicate, self.object)
    }
}

/// A finite set of candidate triples that neighbor generation may add or
/// remove.
pub type Universe = BTreeSet<Triple>;

/// An immutable-by-convention set of triples. Equality is set equality.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Graph {
    triples: BTreeSet<Triple>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a triple; returns `false` if it was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    pub fn remove(&mut self, triple: &Triple) -> bool {
        self.triples.remove(triple)
    }

    pub fn contains_triple(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Triples in canonical (sorted) order.
    pub fn iter(&self) -> impl Iterator<Item = &Triple> + '_ {
        self.triples.iter()
    }

    pub fn triples(&self) -> &BTreeSet<Triple> {
        &self.triples
    }

    /// A copy of this graph with `triple` added.
    pub fn with(&self, triple: Triple) -> Graph {
        let mut g = self.clone();
        g.insert(triple);
        g
    }

    /// A copy of this graph with `triple` removed.
    pub fn without(&self, triple: &Triple) -> Graph {
        let mut g = self.clone();
        g.remove(triple);
        g
    }

    /// All subjects and objects occurring in the graph.
    pub fn nodes(&self) -> BTreeSet<Symbol> {
        self.triples
            .iter()
            .flat_map(|t| [t.subject.clone(), t.object.clone()])
            .collect()
    }

    /// The types of every node, read from edges labelled `type_predicate`.
    pub fn node_types(&self, type_predicate: &Symbol) -> BTreeMap<Symbol, BTreeSet<Symbol>> {
        let mut types: BTreeMap<Symbol, BTreeSet<Symbol>> = BTreeMap::new();
        for t in self.triples.iter().filter(|t| &t.predicate == type_predicate) {
            types
                .entry(t.subject.clone())
                .or_default()
                .insert(t.object.clone());
        }
        types
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        Graph {
            triples: iter.into_iter().collect(),
        }
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        self.triples.extend(iter)
    }
}

impl<'a> IntoIterator for &'a Graph {
    type Item = &'a Triple;
    type IntoIter = std::collections::btree_set::Iter<'a, Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.triples.iter()).finish()
    }
}

/// Serialized as the list of canonical `"s p o"` lines.
impl Serialize for Graph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.triples.iter().map(|t| t.to_string()))
    }
}

/// `true` iff every triple of `inner` is in `outer`.
pub fn contains(inner: &Graph, outer: &Graph) -> bool {
    inner.triples.is_subset(&outer.triples)
}

/// Unbounded edge distance: the size of the symmetric difference.
pub fn edge_distance(g1: &Graph, g2: &Graph) -> usize {
    g1.triples.symmetric_difference(&g2.triples).count()
}

/// Bounded (edit) edge distance: the number of triple substitutions turning
/// `g1` into `g2`. Defined only between graphs of equal size; `None`
/// otherwise.
///
/// `bounded_distance(g1, g2) == Some(1)` exactly when the two graphs share a
/// sub-graph at unbounded distance 1 from both.
pub fn bounded_distance(g1: &Graph, g2: &Graph) -> Option<usize> {
    (g1.len() == g2.len()).then(|| g1.triples.difference(&g2.triples).count())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateSignature {
    pub subject_type: Symbol,
    pub object_type: Symbol,
    pub mutable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Comparator {
    Exactly,
    AtMost,
    AtLeast,
}

impl Comparator {
    pub fn holds(self, count: usize, bound: usize) -> bool {
        match self {
            Comparator::Exactly => count == bound,
            Comparator::AtMost => count <= bound,
            Comparator::AtLeast => count >= bound,
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparator::Exactly => "exactly",
            Comparator::AtMost => "atMost",
            Comparator::AtLeast => "atLeast",
        })
    }
}

/// Every node of `node_type` must have a number of `predicate` edges
/// satisfying `comparator bound`.
///
/// Edges are counted on the side of the predicate's signature that carries
/// `node_type`: outgoing when it is the subject type, incoming when it is
/// the object type (outgoing if both).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CardinalityConstraint {
    pub node_type: Symbol,
    pub predicate: Symbol,
    pub comparator: Comparator,
    pub bound: usize,
}

impl fmt::Display for CardinalityConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.node_type, self.predicate, self.comparator, self.bound
        )
    }
}

/// Predicate signatures, mutability flags and cardinality constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    predicates: BTreeMap<Symbol, PredicateSignature>,
    constraints: Vec<CardinalityConstraint>,
    type_predicate: Symbol,
}

impl Default for Schema {
    fn default() -> Self {
        Schema {
            predicates: BTreeMap::new(),
            constraints: Vec::new(),
            type_predicate: Symbol::new("hasType").expect("valid identifier"),
        }
    }
}

impl Schema {
    /// An empty schema whose type predicate is `hasType`.
    pub fn new() -> Self {
        Self::default()
    }

    pub fn type_predicate(&self) -> &Symbol {
        &self.type_predicate
    }

    pub fn set_type_predicate(&mut self, name: &str) -> Result<()> {
        let name = Symbol::new(name)?;
        if self.predicates.contains_key(&name) {
            return Err(Error::SchemaViolation(format!(
                "type predicate {name} is also declared as an ordinary predicate"
            )));
        }
        self.type_predicate = name;
        Ok(())
    }

    pub fn add_predicate(
        &mut self,
        name: &str,
        subject_type: &str,
        object_type: &str,
        mutable: bool,
    ) -> Result<()> {
        let name = Symbol::new(name)?;
        if name == self.type_predicate {
            return Err(Error::SchemaViolation(format!(
                "{name} is the type predicate and cannot be redeclared"
            )));
        }
        let signature = PredicateSignature {
            subject_type: Symbol::new(subject_type)?,
            object_type: Symbol::new(object_type)?,
            mutable,
        };
        self.predicates.insert(name, signature);
        Ok(())
    }

    pub fn add_cardinality(
        &mut self,
        node_type: &str,
        predicate: &str,
        comparator: Comparator,
        bound: usize,
    ) -> Result<()> {
        let node_type = Symbol::new(node_type)?;
        let predicate = Symbol::new(predicate)?;
        let Some(sig) = self.predicates.get(&predicate) else {
            return Err(Error::SchemaViolation(format!(
                "cardinality constraint names undeclared predicate {predicate}"
            )));
        };
        if sig.subject_type != node_type && sig.object_type != node_type {
            return Err(Error::SchemaViolation(format!(
                "type {node_type} is on neither side of the signature of {predicate}"
            )));
        }
        self.constraints.push(CardinalityConstraint {
            node_type,
            predicate,
            comparator,
            bound,
        });
        Ok(())
    }

    pub fn signature(&self, predicate: &Symbol) -> Option<&PredicateSignature> {
        self.predicates.get(predicate)
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&Symbol, &PredicateSignature)> + '_ {
        self.predicates.iter()
    }

    pub fn constraints(&self) -> &[CardinalityConstraint] {
        &self.constraints
    }

    /// Whether neighbor generation may add or remove edges of `predicate`.
    /// The type predicate and undeclared predicates are never mutable.
    pub fn is_mutable(&self, predicate: &Symbol) -> bool {
        predicate != &self.type_predicate
            && self.predicates.get(predicate).is_some_and(|s| s.mutable)
    }
}

/// One reason a graph falls outside the valid space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    UndeclaredPredicate {
        triple: String,
    },
    /// The subject or object lacks the type the signature requires.
    Signature {
        triple: String,
        node: Symbol,
        expected_type: Symbol,
    },
    Cardinality {
        constraint: CardinalityConstraint,
        node: Symbol,
        count: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UndeclaredPredicate { triple } => {
                write!(f, "undeclared predicate in `{triple}`")
            }
            Violation::Signature {
                triple,
                node,
                expected_type,
            } => write!(f, "`{triple}`: {node} is not of type {expected_type}"),
            Violation::Cardinality {
                constraint,
                node,
                count,
            } => write!(f, "{node} has {count} edges, violating {constraint}"),
        }
    }
}

fn has_type(
    types: &BTreeMap<Symbol, BTreeSet<Symbol>>,
    node: &Symbol,
    expected: &Symbol,
) -> bool {
    types.get(node).is_some_and(|ts| ts.contains(expected))
}

/// Checks signatures and cardinality constraints. Empty iff `g` is valid.
pub fn validate(g: &Graph, schema: &Schema) -> Vec<Violation> {
    let types = g.node_types(schema.type_predicate());
    let mut violations = Vec::new();

    for t in g.iter().filter(|t| &t.predicate != schema.type_predicate()) {
        let Some(sig) = schema.signature(&t.predicate) else {
            violations.push(Violation::UndeclaredPredicate {
                triple: t.to_string(),
            });
            continue;
        };
        for (node, expected) in [(&t.subject, &sig.subject_type), (&t.object, &sig.object_type)] {
            if !has_type(&types, node, expected) {
                violations.push(Violation::Signature {
                    triple: t.to_string(),
                    node: node.clone(),
                    expected_type: expected.clone(),
                });
            }
        }
    }

    for c in schema.constraints() {
        let sig = schema
            .signature(&c.predicate)
            .expect("constraint predicates are declared");
        let outgoing = sig.subject_type == c.node_type;
        for (node, node_types) in &types {
            if !node_types.contains(&c.node_type) {
                continue;
            }
            let count = g
                .iter()
                .filter(|t| t.predicate == c.predicate)
                .filter(|t| if outgoing { &t.subject == node } else { &t.object == node })
                .count();
            if !c.comparator.holds(count, c.bound) {
                violations.push(Violation::Cardinality {
                    constraint: c.clone(),
                    node: node.clone(),
                    count,
                });
            }
        }
    }
    violations
}

/// All well-typed triples over the nodes of `g` with a mutable predicate,
/// plus the mutable triples already in `g`.
pub fn edge_universe(g: &Graph, schema: &Schema) -> Result<Universe> {
    if let Some(t) = g
        .iter()
        .find(|t| &t.predicate != schema.type_predicate() && schema.signature(&t.predicate).is_none())
    {
        return Err(Error::SchemaViolation(format!("undeclared predicate in `{t}`")));
    }

    let types = g.node_types(schema.type_predicate());
    let nodes_of = |ty: &Symbol| -> Vec<Symbol> {
        types
            .iter()
            .filter(|(_, ts)| ts.contains(ty))
            .map(|(n, _)| n.clone())
            .collect()
    };

    let mut universe = Universe::new();
    for (predicate, sig) in schema.predicates().filter(|(p, _)| schema.is_mutable(p)) {
        let objects = nodes_of(&sig.object_type);
        for subject in nodes_of(&sig.subject_type) {
            for object in &objects {
                universe.insert(Triple {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object: object.clone(),
                });
            }
        }
    }
    universe.extend(g.iter().filter(|t| schema.is_mutable(&t.predicate)).cloned());
    Ok(universe)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Add,
    Remove,
    Both,
}

/// Graphs at unbounded distance exactly 1 from `g`.
///
/// Additions draw from `universe \ g`; removals drop a triple of `g` that is
/// also in `universe` (the universe lists what may be perturbed).
pub fn unbounded_neighbors(g: &Graph, universe: &Universe, direction: Direction) -> BTreeSet<Graph> {
    let mut out = BTreeSet::new();
    if matches!(direction, Direction::Add | Direction::Both) {
        for e in universe.iter().filter(|e| !g.contains_triple(e)) {
            out.insert(g.with(e.clone()));
        }
    }
    if matches!(direction, Direction::Remove | Direction::Both) {
        for e in g.iter().filter(|e| universe.contains(*e)) {
            out.insert(g.without(e));
        }
    }
    out
}

/// Graphs obtained by swapping one perturbable triple of `g` for a triple of
/// `universe \ g`. `g` itself is never returned.
pub fn bounded_neighbors(g: &Graph, universe: &Universe) -> BTreeSet<Graph> {
    let additions: Vec<&Triple> = universe.iter().filter(|e| !g.contains_triple(e)).collect();
    let mut out = BTreeSet::new();
    for removed in g.iter().filter(|e| universe.contains(*e)) {
        let base = g.without(removed);
        for added in &additions {
            out.insert(base.with((*added).clone()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(triples: &[(&str, &str, &str)]) -> Graph {
        triples.iter().map(|(s, p, o)| Triple::new(s, p, o)).collect()
    }

    fn two_by_two_schema() -> Schema {
        let mut schema = Schema::new();
        schema.add_predicate("worksIn", "doctor", "dept", true).unwrap();
        schema
    }

    #[test]
    fn rejects_bad_identifiers() {
        assert!(Symbol::new("").is_err());
        assert!(Symbol::new("a b").is_err());
        assert!(Symbol::new("?x").is_err());
        assert!(Symbol::new("ex:p_1").is_ok());
    }

    #[test]
    fn set_semantics() {
        let mut g = Graph::new();
        assert!(g.insert(Triple::new("a", "p", "b")));
        assert!(!g.insert(Triple::new("a", "p", "b")));
        assert_eq!(g.len(), 1);
        let h = graph(&[("c", "p", "d"), ("a", "p", "b")]);
        let k = graph(&[("a", "p", "b"), ("c", "p", "d")]);
        assert_eq!(h, k);
    }

    #[test]
    fn containment_and_distance() {
        let g = graph(&[("a", "p", "b"), ("c", "p", "d")]);
        assert!(contains(&g, &g));
        assert!(contains(&Graph::new(), &g));
        assert!(!contains(&g, &Graph::new()));
        assert_eq!(edge_distance(&g, &g), 0);
        let t1 = graph(&[("a", "p", "b")]);
        let t2 = graph(&[("a", "p", "c")]);
        assert_eq!(edge_distance(&t1, &t2), 2);
        assert_eq!(bounded_distance(&t1, &t2), Some(1));
        assert_eq!(bounded_distance(&t1, &g), None);
    }

    #[test]
    fn universe_without_mutable_predicates_is_empty() {
        let mut schema = Schema::new();
        schema.add_predicate("worksIn", "doctor", "dept", false).unwrap();
        let g = graph(&[("d", "hasType", "doctor"), ("q", "hasType", "dept"), ("d", "worksIn", "q")]);
        assert!(edge_universe(&g, &schema).unwrap().is_empty());
    }

    #[test]
    fn universe_single_candidate() {
        let g = graph(&[("d", "hasType", "doctor"), ("q", "hasType", "dept")]);
        let u = edge_universe(&g, &two_by_two_schema()).unwrap();
        assert_eq!(u.into_iter().collect::<Vec<_>>(), vec![Triple::new("d", "worksIn", "q")]);
    }

    #[test]
    fn universe_rejects_undeclared_predicate() {
        let g = graph(&[("d", "likes", "q")]);
        assert!(matches!(
            edge_universe(&g, &two_by_two_schema()),
            Err(Error::SchemaViolation(_))
        ));
    }

    #[test]
    fn add_neighbors_of_empty_graph() {
        let e1 = Triple::new("a", "p", "b");
        let e2 = Triple::new("a", "p", "c");
        let universe: Universe = [e1.clone(), e2.clone()].into();
        let got = unbounded_neighbors(&Graph::new(), &universe, Direction::Add);
        let want: BTreeSet<Graph> = [graph(&[("a", "p", "b")]), graph(&[("a", "p", "c")])].into();
        assert_eq!(got, want);
    }

    #[test]
    fn single_swap() {
        let a = Triple::new("x", "p", "a");
        let b = Triple::new("x", "p", "b");
        let g: Graph = [a.clone()].into_iter().collect();
        let universe: Universe = [a, b.clone()].into();
        let got = bounded_neighbors(&g, &universe);
        assert_eq!(got, [[b].into_iter().collect::<Graph>()].into());
    }

    #[test]
    fn swap_requires_an_addable_triple() {
        let a = Triple::new("x", "p", "a");
        let g: Graph = [a.clone()].into_iter().collect();
        assert!(bounded_neighbors(&g, &[a].into()).is_empty());
    }

    #[test]
    fn empty_graph_without_constraints_is_valid() {
        assert!(validate(&Graph::new(), &Schema::new()).is_empty());
    }

    #[test]
    fn signature_and_cardinality_violations() {
        let mut schema = two_by_two_schema();
        schema
            .add_cardinality("doctor", "worksIn", Comparator::Exactly, 1)
            .unwrap();
        let g = graph(&[
            ("d", "hasType", "doctor"),
            ("e", "hasType", "doctor"),
            ("q", "hasType", "dept"),
            ("d", "worksIn", "q"),
            ("d", "worksIn", "e"),
        ]);
        let v = validate(&g, &schema);
        // d: wrong object type for `d worksIn e`, and 2 worksIn edges; e: 0 edges.
        assert_eq!(v.len(), 3, "{v:?}");
        assert!(v.iter().any(|v| matches!(v, Violation::Signature { node, .. } if node.as_str() == "e")));
        assert!(v.iter().any(
            |v| matches!(v, Violation::Cardinality { node, count: 0, .. } if node.as_str() == "e")
        ));
    }

    #[test]
    fn incoming_cardinality() {
        let mut schema = Schema::new();
        schema.add_predicate("hasPatient", "doctor", "patient", true).unwrap();
        schema
            .add_cardinality("patient", "hasPatient", Comparator::AtMost, 1)
            .unwrap();
        let g = graph(&[
            ("d", "hasType", "doctor"),
            ("e", "hasType", "doctor"),
            ("p", "hasType", "patient"),
            ("d", "hasPatient", "p"),
            ("e", "hasPatient", "p"),
        ]);
        assert_eq!(validate(&g, &schema).len(), 1);
    }

    #[test]
    fn schema_invariants() {
        let mut schema = Schema::new();
        assert!(schema.add_predicate("hasType", "a", "b", true).is_err());
        assert!(schema
            .add_cardinality("doctor", "worksIn", Comparator::Exactly, 1)
            .is_err());
        schema.add_predicate("worksIn", "doctor", "dept", true).unwrap();
        assert!(schema
            .add_cardinality("patient", "worksIn", Comparator::Exactly, 1)
            .is_err());
        assert!(schema.set_type_predicate("worksIn").is_err());
        assert!(!schema.is_mutable(&Symbol::new("hasType").unwrap()));
    }
}
