//! Positive Horn rules, pattern matching, semi-naive saturation and
//! antecedent enumeration.
//!
//! Rules have a conjunctive body and a single head atom, no negation and no
//! existentials. Saturation therefore never introduces new constants and
//! always terminates; it is monotone, so every antecedent of a saturated
//! graph is one of its sub-graphs.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::kg::{Graph, Symbol, Triple};

/// Default limit on the size of a saturated graph.
pub const DEFAULT_TRIPLE_CAP: usize = 1 << 20;

/// Default limit on the number of removable triples in [`antecedents`].
pub const DEFAULT_ANTECEDENT_CAP: usize = 20;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// A variable, stored without its leading `?`.
    Var(Symbol),
    Const(Symbol),
}

impl Term {
    /// Parses `?name` as a variable and anything else as a constant.
    pub fn parse(token: &str) -> Result<Self> {
        match token.strip_prefix('?') {
            Some(name) => Ok(Term::Var(Symbol::new(name)?)),
            None => Ok(Term::Const(Symbol::new(token)?)),
        }
    }

    fn var(&self) -> Option<&Symbol> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `predicate(subject, object)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: Symbol,
    pub subject: Term,
    pub object: Term,
}

impl Atom {
    /// Builds an atom from tokens (`?x` for variables). Panics on invalid
    /// tokens.
    pub fn new(predicate: &str, subject: &str, object: &str) -> Self {
        match Self::try_new(predicate, subject, object) {
            Ok(a) => a,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn try_new(predicate: &str, subject: &str, object: &str) -> Result<Self> {
        Ok(Atom {
            predicate: Symbol::new(predicate)?,
            subject: Term::parse(subject)?,
            object: Term::parse(object)?,
        })
    }

    pub fn variables(&self) -> impl Iterator<Item = &Symbol> + '_ {
        self.subject.var().into_iter().chain(self.object.var())
    }

    /// Whether some substitution turns this atom into `triple`.
    pub fn unifies_with(&self, triple: &Triple) -> bool {
        let mut bindings = Substitution::new();
        self.predicate == triple.predicate && bind(self, triple, &mut bindings)
    }

    fn instantiate(&self, s: &Substitution) -> Triple {
        let resolve = |t: &Term| match t {
            Term::Const(c) => c.clone(),
            Term::Var(v) => s.get(v).cloned().expect("rule safety guarantees a binding"),
        };
        Triple {
            subject: resolve(&self.subject),
            predicate: self.predicate.clone(),
            object: resolve(&self.object),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.predicate, self.subject, self.object)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A safe positive Horn rule: `body₁ ∧ … ∧ bodyₙ ⇒ head`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    body: Vec<Atom>,
    head: Atom,
}

impl Rule {
    /// Fails if the body is empty or a head variable is missing from the
    /// body.
    pub fn new(body: Vec<Atom>, head: Atom) -> Result<Self> {
        if body.is_empty() {
            return Err(Error::InvalidRule(format!("rule for {head} has an empty body")));
        }
        let bound: BTreeSet<&Symbol> = body.iter().flat_map(Atom::variables).collect();
        if let Some(v) = head.variables().find(|v| !bound.contains(v)) {
            return Err(Error::InvalidRule(format!(
                "head variable ?{v} of {head} does not occur in the body"
            )));
        }
        Ok(Rule { body, head })
    }

    pub fn body(&self) -> &[Atom] {
        &self.body
    }

    pub fn head(&self) -> &Atom {
        &self.head
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, atom) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{atom}")?;
        }
        write!(f, " => {}", self.head)
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An inference system. The empty set is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleSet {
    rules: Vec<Rule>,
}

impl RuleSet {
    pub fn new(rules: Vec<Rule>) -> Self {
        RuleSet { rules }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Whether `triple` could be derived by some rule head.
    pub fn head_unifies(&self, triple: &Triple) -> bool {
        self.rules.iter().any(|r| r.head.unifies_with(triple))
    }
}

impl FromIterator<Rule> for RuleSet {
    fn from_iter<I: IntoIterator<Item = Rule>>(iter: I) -> Self {
        RuleSet::new(iter.into_iter().collect())
    }
}

/// A total map from variable names to constants.
pub type Substitution = BTreeMap<Symbol, Symbol>;

fn bind_term(term: &Term, value: &Symbol, s: &mut Substitution) -> bool {
    match term {
        Term::Const(c) => c == value,
        Term::Var(v) => match s.get(v) {
            Some(bound) => bound == value,
            None => {
                s.insert(v.clone(), value.clone());
                true
            }
        },
    }
}

/// Extends `s` so that `atom` matches `triple` (predicate assumed equal).
fn bind(atom: &Atom, triple: &Triple, s: &mut Substitution) -> bool {
    bind_term(&atom.subject, &triple.subject, s) && bind_term(&atom.object, &triple.object, s)
}

/// Triples grouped by predicate.
struct Index<'a> {
    by_predicate: HashMap<&'a Symbol, Vec<&'a Triple>>,
}

impl<'a> Index<'a> {
    fn new(triples: impl IntoIterator<Item = &'a Triple>) -> Self {
        let mut by_predicate: HashMap<&Symbol, Vec<&Triple>> = HashMap::new();
        for t in triples {
            by_predicate.entry(&t.predicate).or_default().push(t);
        }
        Index { by_predicate }
    }

    fn candidates(&self, predicate: &Symbol) -> &[&'a Triple] {
        self.by_predicate.get(predicate).map_or(&[], Vec::as_slice)
    }
}

/// Backtracking join: atom `i` is matched against `sources[i]`.
fn join(atoms: &[Atom], sources: &[&Index<'_>], s: &mut Substitution, out: &mut Vec<Substitution>) {
    let Some((atom, rest)) = atoms.split_first() else {
        out.push(s.clone());
        return;
    };
    for triple in sources[0].candidates(&atom.predicate) {
        let mut extended = s.clone();
        if bind(atom, triple, &mut extended) {
            join(rest, &sources[1..], &mut extended, out);
        }
    }
}

/// Every substitution under which all `atoms` are triples of `g`.
pub fn match_pattern(atoms: &[Atom], g: &Graph) -> BTreeSet<Substitution> {
    let index = Index::new(g.iter());
    let sources = vec![&index; atoms.len()];
    let mut out = Vec::new();
    join(atoms, &sources, &mut Substitution::new(), &mut out);
    out.into_iter().collect()
}

/// Every substitution over the rule's variables that maps the whole body
/// into `g`.
pub fn match_rule(rule: &Rule, g: &Graph) -> BTreeSet<Substitution> {
    match_pattern(&rule.body, g)
}

/// Least fixpoint of `g` under `rules`, with the default triple cap.
pub fn saturate(g: &Graph, rules: &RuleSet) -> Result<Graph> {
    saturate_capped(g, rules, DEFAULT_TRIPLE_CAP)
}

/// Semi-naive saturation: each round only joins against triples derived in
/// the previous round.
pub fn saturate_capped(g: &Graph, rules: &RuleSet, cap: usize) -> Result<Graph> {
    let mut all = g.clone();
    if all.len() > cap {
        return Err(Error::FixpointBudgetExceeded { cap });
    }
    let mut delta = g.clone();
    while !delta.is_empty() {
        let mut derived = Graph::new();
        {
            let full = Index::new(all.iter());
            let fresh = Index::new(delta.iter());
            let mut subs = Vec::new();
            for rule in &rules.rules {
                for pivot in 0..rule.body.len() {
                    let sources: Vec<&Index> = (0..rule.body.len())
                        .map(|i| if i == pivot { &fresh } else { &full })
                        .collect();
                    subs.clear();
                    join(&rule.body, &sources, &mut Substitution::new(), &mut subs);
                    for s in &subs {
                        let t = rule.head.instantiate(s);
                        if !all.contains_triple(&t) {
                            derived.insert(t);
                        }
                    }
                }
            }
        }
        if all.len() + derived.len() > cap {
            return Err(Error::FixpointBudgetExceeded { cap });
        }
        all.extend(derived.iter().cloned());
        delta = derived;
    }
    Ok(all)
}

/// `true` iff no rule derives a triple missing from `g`.
pub fn is_saturated(g: &Graph, rules: &RuleSet) -> bool {
    let index = Index::new(g.iter());
    let mut subs = Vec::new();
    rules.rules.iter().all(|rule| {
        subs.clear();
        let sources = vec![&index; rule.body.len()];
        join(&rule.body, &sources, &mut Substitution::new(), &mut subs);
        subs.iter().all(|s| g.contains_triple(&rule.head.instantiate(s)))
    })
}

/// All sub-graphs of the saturated graph `g` whose saturation is `g`.
///
/// Only triples that unify with some rule head can be dropped; the subsets
/// of those candidates are visited in increasing bitmask order, and a subset
/// is known to fail as soon as one of its one-smaller subsets failed
/// (dropping more triples can only shrink the saturation).
pub fn antecedents(g: &Graph, rules: &RuleSet, cap: usize) -> Result<BTreeSet<Graph>> {
    if !is_saturated(g, rules) {
        return Err(Error::NotSaturated);
    }
    let candidates: Vec<&Triple> = g.iter().filter(|t| rules.head_unifies(t)).collect();
    let n = candidates.len();
    if n > cap || n >= usize::BITS as usize {
        return Err(Error::AntecedentBudgetExceeded { candidates: n, cap });
    }

    let mut out = BTreeSet::new();
    let mut fails = vec![false; 1usize << n];
    for mask in 0..(1usize << n) {
        let inherited = (0..n)
            .filter(|b| mask & (1 << b) != 0)
            .any(|b| fails[mask ^ (1 << b)]);
        if inherited {
            fails[mask] = true;
            continue;
        }
        let mut a = g.clone();
        for (b, t) in candidates.iter().enumerate() {
            if mask & (1 << b) != 0 {
                a.remove(t);
            }
        }
        // sat(a) ⊆ g by monotonicity, so comparing sizes suffices.
        if saturate_capped(&a, rules, g.len())?.len() == g.len() {
            out.insert(a);
        } else {
            fails[mask] = true;
        }
    }
    Ok(out)
}
