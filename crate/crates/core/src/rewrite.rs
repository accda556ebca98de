//! The eight λυ rewriting rules, redex search and normalisation.
//!
//! ```text
//! (λa) b        → a[b/]          Beta
//! (a b)[s]      → a[s] (b[s])    App
//! (λa)[s]       → λ(a[⇑(s)])     Lambda
//! 0[a/]         → a              FVar
//! (n+1)[a/]     → n              RVar
//! 0[⇑(s)]       → 0              FVarLift
//! (n+1)[⇑(s)]   → n[s][↑]        RVarLift
//! n[↑]          → n+1            VarShift
//! ```
//!
//! Left-hand sides are mutually exclusive, so every term root matches at most
//! one rule.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::term::{Node, Position, Subst, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleKind {
    Beta,
    App,
    Lambda,
    FVar,
    RVar,
    FVarLift,
    RVarLift,
    VarShift,
}

impl RuleKind {
    pub const ALL: [RuleKind; 8] = [
        RuleKind::Beta,
        RuleKind::App,
        RuleKind::Lambda,
        RuleKind::FVar,
        RuleKind::RVar,
        RuleKind::FVarLift,
        RuleKind::RVarLift,
        RuleKind::VarShift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::Beta => "Beta",
            RuleKind::App => "App",
            RuleKind::Lambda => "Lambda",
            RuleKind::FVar => "FVar",
            RuleKind::RVar => "RVar",
            RuleKind::FVarLift => "FVarLift",
            RuleKind::RVarLift => "RVarLift",
            RuleKind::VarShift => "VarShift",
        }
    }

    /// Position in [`RuleKind::ALL`].
    pub fn ordinal(self) -> usize {
        self as usize
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown rule {0:?}")]
pub struct UnknownRule(pub String);

impl FromStr for RuleKind {
    type Err = UnknownRule;

    /// Case-insensitive rule name.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownRule(s.to_string()))
    }
}

/// A set of enabled rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct RuleSet(u8);

impl RuleSet {
    pub const fn empty() -> RuleSet {
        RuleSet(0)
    }

    pub const fn all() -> RuleSet {
        RuleSet(0xff)
    }

    /// Every rule except Beta.
    pub const fn upsilon() -> RuleSet {
        RuleSet(0xfe)
    }

    pub fn only(kind: RuleKind) -> RuleSet {
        RuleSet(1 << kind.ordinal())
    }

    pub fn with(self, kind: RuleKind) -> RuleSet {
        RuleSet(self.0 | (1 << kind.ordinal()))
    }

    pub fn contains(self, kind: RuleKind) -> bool {
        self.0 & (1 << kind.ordinal()) != 0
    }
}

impl FromIterator<RuleKind> for RuleSet {
    fn from_iter<I: IntoIterator<Item = RuleKind>>(iter: I) -> Self {
        iter.into_iter().fold(RuleSet::empty(), RuleSet::with)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Redex {
    pub position: Position,
    pub kind: RuleKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("no {kind} redex at position {position}")]
    InvalidRedex { position: Position, kind: RuleKind },
    #[error("step budget exhausted after {} steps", .0.trace.len())]
    BudgetExceeded(Box<Normalized>),
}

/// The rule whose left-hand side matches at the root of `t`.
pub fn match_redex(t: &Term) -> Option<RuleKind> {
    match t {
        Term::App(f, _) if matches!(**f, Term::Abs(_)) => Some(RuleKind::Beta),
        Term::Closure(body, sub) => Some(match (&**body, &**sub) {
            (Term::App(..), _) => RuleKind::App,
            (Term::Abs(_), _) => RuleKind::Lambda,
            (Term::Index(0), Subst::Slash(_)) => RuleKind::FVar,
            (Term::Index(_), Subst::Slash(_)) => RuleKind::RVar,
            (Term::Index(0), Subst::Lift(_)) => RuleKind::FVarLift,
            (Term::Index(_), Subst::Lift(_)) => RuleKind::RVarLift,
            (Term::Index(_), Subst::Shift) => RuleKind::VarShift,
            (Term::Closure(..), _) => return None,
        }),
        _ => None,
    }
}

/// Rewrites the root of `t`, returning the rule used, or `t` unchanged when
/// the root is not a redex.
pub fn contract(t: Term) -> Result<(RuleKind, Term), Term> {
    let Some(kind) = match_redex(&t) else {
        return Err(t);
    };
    let out = match t {
        Term::App(f, b) => match *f {
            Term::Abs(a) => Term::Closure(a, Box::new(Subst::Slash(b))),
            _ => unreachable!(),
        },
        Term::Closure(body, sub) => match (*body, *sub) {
            (Term::App(a, b), s) => Term::app(
                Term::Closure(a, Box::new(s.clone())),
                Term::Closure(b, Box::new(s)),
            ),
            (Term::Abs(a), s) => Term::abs(Term::Closure(a, Box::new(Subst::lift(s)))),
            (Term::Index(0), Subst::Slash(a)) => *a,
            (Term::Index(n), Subst::Slash(_)) => Term::Index(n - 1),
            (Term::Index(0), Subst::Lift(_)) => Term::Index(0),
            (Term::Index(n), Subst::Lift(s)) => {
                Term::closure(Term::Closure(Box::new(Term::Index(n - 1)), s), Subst::Shift)
            }
            (Term::Index(n), Subst::Shift) => Term::Index(n + 1),
            (Term::Closure(..), _) => unreachable!(),
        },
        _ => unreachable!(),
    };
    Ok((kind, out))
}

/// Applies `r` to `t`, failing if `r.kind` does not match at `r.position`.
pub fn apply_at(t: &Term, r: &Redex) -> Result<Term, RewriteError> {
    let invalid = || RewriteError::InvalidRedex {
        position: r.position.clone(),
        kind: r.kind,
    };
    let mut out = t.clone();
    let slot = out.subterm_at_mut(&r.position).ok_or_else(invalid)?;
    if match_redex(slot) != Some(r.kind) {
        return Err(invalid());
    }
    let old = std::mem::replace(slot, Term::Index(0));
    match contract(old) {
        Ok((_, new)) => *slot = new,
        Err(_) => unreachable!(),
    }
    Ok(out)
}

/// All redexes whose kind is in `filter`, in pre-order (node before children,
/// fun before arg, body before sub).
pub fn find_redexes(t: &Term, filter: RuleSet) -> Vec<Redex> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    collect(Node::Term(t), filter, &mut path, &mut out);
    out
}

fn collect(node: Node<'_>, filter: RuleSet, path: &mut Vec<usize>, out: &mut Vec<Redex>) {
    if let Node::Term(t) = node {
        if let Some(kind) = match_redex(t) {
            if filter.contains(kind) {
                out.push(Redex {
                    position: Position::new(path.clone()),
                    kind,
                });
            }
        }
    }
    let mut i = 0;
    while let Some(child) = node.child(i) {
        path.push(i);
        collect(child, filter, path, out);
        path.pop();
        i += 1;
    }
}

/// Number of `kind` redexes anywhere in `t`.
pub fn count_redexes(t: &Term, kind: RuleKind) -> u64 {
    redex_counts(t)[kind.ordinal()]
}

/// Redex counts for every rule, indexed by [`RuleKind::ordinal`].
pub fn redex_counts(t: &Term) -> [u64; 8] {
    let mut counts = [0; 8];
    for u in t.subterms() {
        if let Some(k) = match_redex(u) {
            counts[k.ordinal()] += 1;
        }
    }
    counts
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// All eight rules.
    Full,
    /// Substitution resolution only: every rule but Beta.
    Upsilon,
}

impl Strategy {
    pub fn rules(self) -> RuleSet {
        match self {
            Strategy::Full => RuleSet::all(),
            Strategy::Upsilon => RuleSet::upsilon(),
        }
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(Strategy::Full),
            "upsilon" => Ok(Strategy::Upsilon),
            _ => Err(format!("unknown strategy {s:?} (expected full or upsilon)")),
        }
    }
}

/// A reduction sequence from `start`. The intermediate terms are rebuilt on
/// demand by replaying the recorded redexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    start: Term,
    redexes: Vec<Redex>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub redex: Redex,
    pub term: Term,
}

#[derive(Serialize, Deserialize)]
struct TraceRecord {
    rule: RuleKind,
    position: Position,
    term: String,
}

impl Trace {
    pub fn new(start: Term) -> Trace {
        Trace {
            start,
            redexes: Vec::new(),
        }
    }

    pub fn start(&self) -> &Term {
        &self.start
    }

    pub fn redexes(&self) -> &[Redex] {
        &self.redexes
    }

    pub fn len(&self) -> usize {
        self.redexes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.redexes.is_empty()
    }

    pub fn rules(&self) -> Vec<RuleKind> {
        self.redexes.iter().map(|r| r.kind).collect()
    }

    /// Each redex paired with the term it produced.
    pub fn steps(&self) -> Vec<TraceStep> {
        let mut cur = self.start.clone();
        self.redexes
            .iter()
            .map(|r| {
                cur = apply_at(&cur, r).expect("trace records only valid redexes");
                TraceStep {
                    redex: r.clone(),
                    term: cur.clone(),
                }
            })
            .collect()
    }

    /// `[{"rule": .., "position": [..], "term": ".."}, ..]`
    pub fn to_json(&self) -> serde_json::Value {
        let records: Vec<TraceRecord> = self
            .steps()
            .into_iter()
            .map(|s| TraceRecord {
                rule: s.redex.kind,
                position: s.redex.position,
                term: s.term.to_string(),
            })
            .collect();
        serde_json::to_value(records).expect("trace records serialise")
    }

    /// Parses the JSON produced by [`Trace::to_json`], checking every step.
    pub fn from_json(start: Term, value: &serde_json::Value) -> Result<Trace, String> {
        let records: Vec<TraceRecord> =
            serde_json::from_value(value.clone()).map_err(|e| e.to_string())?;
        let mut cur = start.clone();
        let mut redexes = Vec::with_capacity(records.len());
        for (i, rec) in records.into_iter().enumerate() {
            let r = Redex {
                position: rec.position,
                kind: rec.rule,
            };
            cur = apply_at(&cur, &r).map_err(|e| format!("step {i}: {e}"))?;
            if cur.to_string() != rec.term {
                return Err(format!("step {i}: term mismatch"));
            }
            redexes.push(r);
        }
        Ok(Trace { start, redexes })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub term: Term,
    pub trace: Trace,
}

/// Leftmost-outermost normalisation: each step contracts the pre-order-first
/// enabled redex. Fails with `BudgetExceeded` (carrying the partial result)
/// once `max_steps` steps have been taken without reaching a normal form.
pub fn normalize(t: &Term, strategy: Strategy, max_steps: u64) -> Result<Normalized, RewriteError> {
    let mut engine = Engine {
        rules: strategy.rules(),
        budget: max_steps,
        exhausted: false,
        path: Vec::new(),
        log: Vec::new(),
    };
    let term = engine.run(t.clone(), Stop::Never);
    let out = Normalized {
        term,
        trace: Trace {
            start: t.clone(),
            redexes: engine.log,
        },
    };
    if engine.exhausted {
        Err(RewriteError::BudgetExceeded(Box::new(out)))
    } else {
        Ok(out)
    }
}

#[derive(Clone, Copy)]
enum Stop {
    Never,
    /// The caller is an application waiting for its head to become a λ.
    AtAbs,
    /// The caller is a closure waiting for its body to leave closure form.
    AtNonClosure,
}

impl Stop {
    fn reached(self, t: &Term) -> bool {
        match self {
            Stop::Never => false,
            Stop::AtAbs => matches!(t, Term::Abs(_)),
            Stop::AtNonClosure => !t.is_closure(),
        }
    }
}

/// Normal-order reducer that avoids rescanning from the root after each
/// step. A step below a node never changes that node's constructor, so a
/// parent only needs to regain control when its child's root is rewritten
/// into a shape that makes the parent itself a redex (the `Stop` condition).
/// Normal forms never contain closures, so a closure body always reaches a
/// non-closure shape eventually.
struct Engine {
    rules: RuleSet,
    budget: u64,
    exhausted: bool,
    path: Vec<usize>,
    log: Vec<Redex>,
}

impl Engine {
    fn run(&mut self, mut t: Term, stop: Stop) -> Term {
        loop {
            if self.exhausted || stop.reached(&t) {
                return t;
            }
            if let Some(kind) = match_redex(&t).filter(|k| self.rules.contains(*k)) {
                if self.budget == 0 {
                    self.exhausted = true;
                    return t;
                }
                self.budget -= 1;
                self.log.push(Redex {
                    position: Position::new(self.path.clone()),
                    kind,
                });
                t = match contract(t) {
                    Ok((_, next)) => next,
                    Err(_) => unreachable!(),
                };
                continue;
            }
            match t {
                Term::Index(_) => return t,
                Term::Abs(body) => {
                    let body = self.child(0, *body, Stop::Never);
                    return Term::abs(body);
                }
                Term::App(f, a) => {
                    let beta = self.rules.contains(RuleKind::Beta);
                    let head_stop = if beta { Stop::AtAbs } else { Stop::Never };
                    let f = self.child(0, *f, head_stop);
                    if self.exhausted || (beta && matches!(f, Term::Abs(_))) {
                        t = Term::App(Box::new(f), a);
                        continue;
                    }
                    let a = self.child(1, *a, Stop::Never);
                    return Term::app(f, a);
                }
                Term::Closure(body, sub) => {
                    // Not a redex, so the body is itself a closure.
                    let body = self.child(0, *body, Stop::AtNonClosure);
                    t = Term::Closure(Box::new(body), sub);
                }
            }
        }
    }

    fn child(&mut self, i: usize, t: Term, stop: Stop) -> Term {
        self.path.push(i);
        let out = self.run(t, stop);
        self.path.pop();
        out
    }
}

/// Every υ-normal form reachable from `t` under any redex order. Fails if
/// more than `max_states` distinct terms are visited.
pub fn upsilon_normal_forms(t: &Term, max_states: usize) -> Result<BTreeSet<Term>, usize> {
    let mut seen: HashSet<Term> = HashSet::new();
    let mut queue = VecDeque::new();
    let mut normal = BTreeSet::new();
    seen.insert(t.clone());
    queue.push_back(t.clone());
    while let Some(cur) = queue.pop_front() {
        let redexes = find_redexes(&cur, RuleSet::upsilon());
        if redexes.is_empty() {
            normal.insert(cur);
            continue;
        }
        for r in &redexes {
            let next = apply_at(&cur, r).expect("found redexes are valid");
            if seen.insert(next.clone()) {
                if seen.len() > max_states {
                    return Err(seen.len());
                }
                queue.push_back(next);
            }
        }
    }
    Ok(normal)
}

/// True iff some slash payload in `t` is impure, i.e. `t` contains `a[b/]`
/// (possibly with `b/` under lifts) where `b` contains a closure. Such terms
/// are in lazy substitution form.
pub fn has_nested_substitution(t: &Term) -> bool {
    t.subterms().any(|u| match u {
        Term::Closure(_, s) => slash_payload(s).is_some_and(|b| !b.is_pure()),
        _ => false,
    })
}

fn slash_payload(s: &Subst) -> Option<&Term> {
    match s {
        Subst::Slash(b) => Some(b),
        Subst::Lift(inner) => slash_payload(inner),
        Subst::Shift => None,
    }
}

/// Constructors not suspended inside the substitution of some closure.
pub fn unsuspended_constructors(t: &Term) -> u64 {
    match t {
        Term::Index(n) => n + 1,
        Term::Abs(a) => 1 + unsuspended_constructors(a),
        Term::App(a, b) => 1 + unsuspended_constructors(a) + unsuspended_constructors(b),
        Term::Closure(a, _) => 1 + unsuspended_constructors(a),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StrictForm {
    Yes,
    No,
    Unknown,
}

/// Bounded semi-decision for strict substitution form: is `t` reachable from
/// some `a[b/]` with `a`, `b` pure using non-Beta steps only?
///
/// Answers `Yes` with a witness found by breadth-first search over sources of
/// size at most `max_source_size` and at most `max_steps` steps. Answers `No`
/// only on the nested-substitution certificate: non-Beta steps never rewrite
/// inside a slash payload, so payloads of strict forms stay pure. Everything
/// else is `Unknown`.
pub fn is_strict_form_bounded(t: &Term, max_source_size: u64, max_steps: u64) -> StrictForm {
    if let Term::Closure(a, s) = t {
        if let Subst::Slash(b) = &**s {
            if a.is_pure() && b.is_pure() {
                return StrictForm::Yes;
            }
        }
    }
    if has_nested_substitution(t) {
        return StrictForm::No;
    }
    let pure_by_size: Vec<Vec<Term>> = (0..max_source_size.saturating_sub(2))
        .map(|k| crate::enumerate::pure_terms(k as usize))
        .collect();
    for total in 4..=max_source_size {
        for size_a in 1..total - 2 {
            let size_b = total - 2 - size_a;
            for a in &pure_by_size[size_a as usize] {
                for b in &pure_by_size[size_b as usize] {
                    let source = Term::closure(a.clone(), Subst::slash(b.clone()));
                    if reaches(&source, t, max_steps) {
                        return StrictForm::Yes;
                    }
                }
            }
        }
    }
    StrictForm::Unknown
}

fn reaches(source: &Term, target: &Term, max_steps: u64) -> bool {
    let mut seen: HashSet<Term> = HashSet::new();
    let mut frontier = vec![source.clone()];
    seen.insert(source.clone());
    for _ in 0..=max_steps {
        if frontier.iter().any(|u| u == target) {
            return true;
        }
        let mut next = Vec::new();
        for cur in &frontier {
            for r in find_redexes(cur, RuleSet::upsilon()) {
                let u = apply_at(cur, &r).expect("found redexes are valid");
                if seen.insert(u.clone()) {
                    next.push(u);
                }
            }
        }
        if next.is_empty() {
            return false;
        }
        frontier = next;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn idx(n: u64) -> Term {
        Term::index(n)
    }

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn matches_each_rule() {
        assert_eq!(match_redex(&p("(\\0) 0")), Some(RuleKind::Beta));
        assert_eq!(match_redex(&p("(0 0)[shift]")), Some(RuleKind::App));
        assert_eq!(match_redex(&p("(\\0)[shift]")), Some(RuleKind::Lambda));
        assert_eq!(match_redex(&p("0[0/]")), Some(RuleKind::FVar));
        assert_eq!(match_redex(&p("3[0/]")), Some(RuleKind::RVar));
        assert_eq!(match_redex(&p("0[lift(shift)]")), Some(RuleKind::FVarLift));
        assert_eq!(match_redex(&p("2[lift(shift)]")), Some(RuleKind::RVarLift));
        assert_eq!(match_redex(&p("5[shift]")), Some(RuleKind::VarShift));
        assert_eq!(match_redex(&p("\\0")), None);
        assert_eq!(match_redex(&p("0[shift][shift]")), None);
        assert_eq!(match_redex(&p("0 0")), None);
    }

    #[test]
    fn applies_example_steps() {
        let a = p("2 7");
        let beta = Term::app(Term::abs(Term::abs(idx(1))), a.clone());
        let root = |kind| Redex {
            position: Position::root(),
            kind,
        };
        assert_eq!(
            apply_at(&beta, &root(RuleKind::Beta)).unwrap(),
            Term::closure(Term::abs(idx(1)), Subst::slash(a.clone()))
        );
        let lifted = Term::closure(idx(1), Subst::lift(Subst::slash(a.clone())));
        assert_eq!(
            apply_at(&lifted, &root(RuleKind::RVarLift)).unwrap(),
            Term::closure(Term::closure(idx(0), Subst::slash(a)), Subst::Shift)
        );
        assert_eq!(
            apply_at(&p("0[shift]"), &root(RuleKind::VarShift)).unwrap(),
            idx(1)
        );
        assert_eq!(
            apply_at(&p("4[0/]"), &root(RuleKind::RVar)).unwrap(),
            idx(3)
        );
        assert_eq!(
            apply_at(&p("0[lift(1/)]"), &root(RuleKind::FVarLift)).unwrap(),
            idx(0)
        );
        assert_eq!(
            apply_at(&p("(0 1)[shift]"), &root(RuleKind::App)).unwrap(),
            p("0[shift] 1[shift]")
        );
        assert_eq!(
            apply_at(&p("(\\0)[shift]"), &root(RuleKind::Lambda)).unwrap(),
            p("\\0[lift(shift)]")
        );
    }

    #[test]
    fn apply_rejects_mismatched_redex() {
        let t = p("0[shift]");
        let bad = Redex {
            position: Position::root(),
            kind: RuleKind::FVar,
        };
        assert!(matches!(
            apply_at(&t, &bad),
            Err(RewriteError::InvalidRedex { .. })
        ));
        let off = Redex {
            position: vec![1].into(),
            kind: RuleKind::VarShift,
        };
        assert!(apply_at(&t, &off).is_err());
        let deep = Redex {
            position: vec![0, 0].into(),
            kind: RuleKind::VarShift,
        };
        assert!(apply_at(&t, &deep).is_err());
    }

    #[test]
    fn finds_redexes_in_preorder() {
        let t = p("(\\0) 0[shift]");
        let rs = find_redexes(&t, RuleSet::all());
        assert_eq!(
            rs,
            vec![
                Redex {
                    position: Position::root(),
                    kind: RuleKind::Beta
                },
                Redex {
                    position: vec![1].into(),
                    kind: RuleKind::VarShift
                },
            ]
        );
        assert!(find_redexes(&idx(5), RuleSet::all()).is_empty());
        let t = p("(0 0)[shift]");
        assert_eq!(
            find_redexes(&t, RuleSet::only(RuleKind::App)),
            vec![Redex {
                position: Position::root(),
                kind: RuleKind::App
            }]
        );
    }

    #[test]
    fn finds_redexes_inside_substitutions() {
        let t = p("1[lift(0[shift]/)]");
        let rs = find_redexes(&t, RuleSet::all());
        assert_eq!(rs.len(), 2);
        assert_eq!(rs[1].position, Position::new(vec![1, 0, 0]));
        assert_eq!(rs[1].kind, RuleKind::VarShift);
    }

    #[test]
    fn counts_redexes() {
        assert_eq!(count_redexes(&p("(\\0) 0"), RuleKind::Beta), 1);
        assert_eq!(count_redexes(&p("\\0[0/]"), RuleKind::FVar), 1);
        assert_eq!(count_redexes(&p("0 0"), RuleKind::Beta), 0);
    }

    #[test]
    fn normalizes_k_combinator_application() {
        let t = p("(\\\\1) 0");
        let n = normalize(&t, Strategy::Full, 100).unwrap();
        assert_eq!(n.term, p("\\1"));
        assert_eq!(
            n.trace.rules(),
            vec![
                RuleKind::Beta,
                RuleKind::Lambda,
                RuleKind::RVarLift,
                RuleKind::FVar,
                RuleKind::VarShift
            ]
        );
        let terms: Vec<String> = n.trace.steps().iter().map(|s| s.term.to_string()).collect();
        assert_eq!(
            terms,
            vec![
                "(\\1)[0/]",
                "\\1[lift(0/)]",
                "\\0[0/][shift]",
                "\\0[shift]",
                "\\1"
            ]
        );
    }

    #[test]
    fn normalize_trivial_cases() {
        let n = normalize(&p("0[7/]"), Strategy::Upsilon, 10).unwrap();
        assert_eq!(n.term, idx(7));
        assert_eq!(n.trace.len(), 1);
        for s in [Strategy::Full, Strategy::Upsilon] {
            let n = normalize(&idx(3), s, 0).unwrap();
            assert_eq!(n.term, idx(3));
            assert!(n.trace.is_empty());
        }
    }

    #[test]
    fn upsilon_leaves_beta_redexes() {
        let n = normalize(&p("(\\0) 1[shift]"), Strategy::Upsilon, 10).unwrap();
        assert_eq!(n.term, p("(\\0) 2"));
    }

    #[test]
    fn budget_exhaustion_reports_partial_result() {
        let omega = p("(\\0 0) (\\0 0)");
        match normalize(&omega, Strategy::Full, 25) {
            Err(RewriteError::BudgetExceeded(partial)) => {
                assert_eq!(partial.trace.len(), 25);
                let last = partial.trace.steps().pop().unwrap().term;
                assert_eq!(last, partial.term);
            }
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn trace_json_round_trip() {
        let t = p("(\\\\1) 0");
        let n = normalize(&t, Strategy::Full, 100).unwrap();
        let json = n.trace.to_json();
        assert_eq!(json[0]["rule"], "Beta");
        assert_eq!(json[0]["position"], serde_json::json!([]));
        assert_eq!(json[0]["term"], "(\\1)[0/]");
        assert_eq!(json[2]["position"], serde_json::json!([0]));
        let back = Trace::from_json(t, &json).unwrap();
        assert_eq!(back, n.trace);
    }

    #[test]
    fn nested_substitution_detection() {
        assert!(has_nested_substitution(&p("0[0[shift]/]")));
        assert!(!has_nested_substitution(&p("0[0/]")));
        assert!(!has_nested_substitution(&p("\\0")));
        assert!(has_nested_substitution(&p("1[lift(0[shift]/)]")));
    }

    #[test]
    fn unsuspended_examples() {
        for s in ["0", "\\\\1", "0 (\\2 0)"] {
            let t = p(s);
            assert_eq!(unsuspended_constructors(&t), t.size());
        }
        assert_eq!(unsuspended_constructors(&p("0[shift]")), 2);
        assert_eq!(unsuspended_constructors(&p("0[\\0/]")), 2);
    }

    #[test]
    fn strict_form_examples() {
        assert_eq!(is_strict_form_bounded(&p("0[0/]"), 6, 6), StrictForm::Yes);
        assert_eq!(
            is_strict_form_bounded(&p("\\0[shift]"), 6, 6),
            StrictForm::Yes
        );
        assert_eq!(is_strict_form_bounded(&p("0"), 4, 2), StrictForm::Yes);
        assert_eq!(
            is_strict_form_bounded(&p("0[0[shift]/]"), 8, 8),
            StrictForm::No
        );
        // Unreachable within the bounds, but never a definitive no.
        assert_eq!(is_strict_form_bounded(&p("7"), 4, 3), StrictForm::Unknown);
    }

    #[test]
    fn rule_names_parse() {
        for k in RuleKind::ALL {
            assert_eq!(k.name().parse::<RuleKind>().unwrap(), k);
            assert_eq!(k.name().to_lowercase().parse::<RuleKind>().unwrap(), k);
        }
        assert!("eta".parse::<RuleKind>().is_err());
    }
}
