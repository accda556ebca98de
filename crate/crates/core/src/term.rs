//! The λυ term algebra: terms, substitutions, sizes and positions.
//!
//! Terms are plain immutable trees compared structurally. De Bruijn indices
//! are stored as machine integers but weigh `n + 1` under the natural size
//! notion, as if they were written in unary with a successor constructor.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A λυ-term.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// De Bruijn index `⌜n⌝`, i.e. `n` successors applied to zero.
    Index(u64),
    /// Abstraction `λ a`.
    Abs(Box<Term>),
    /// Application `a b`.
    App(Box<Term>, Box<Term>),
    /// Closure `a[s]`: a term under a pending substitution.
    Closure(Box<Term>, Box<Subst>),
}

/// An explicit substitution.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subst {
    /// `a/`: replace index zero by `a`.
    Slash(Box<Term>),
    /// `⇑(s)`: `s` pushed under a binder.
    Lift(Box<Subst>),
    /// `↑`: increment free indices.
    Shift,
}

impl Term {
    pub fn index(n: u64) -> Term {
        Term::Index(n)
    }

    pub fn abs(body: Term) -> Term {
        Term::Abs(Box::new(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    pub fn closure(body: Term, sub: Subst) -> Term {
        Term::Closure(Box::new(body), Box::new(sub))
    }

    /// Natural size: every constructor weighs one, `⌜n⌝` weighs `n + 1`.
    pub fn size(&self) -> u64 {
        match self {
            Term::Index(n) => n + 1,
            Term::Abs(a) => 1 + a.size(),
            Term::App(a, b) => 1 + a.size() + b.size(),
            Term::Closure(a, s) => 1 + a.size() + s.size(),
        }
    }

    /// A term is pure when it contains no closure.
    pub fn is_pure(&self) -> bool {
        match self {
            Term::Index(_) => true,
            Term::Abs(a) => a.is_pure(),
            Term::App(a, b) => a.is_pure() && b.is_pure(),
            Term::Closure(..) => false,
        }
    }

    pub fn is_closure(&self) -> bool {
        matches!(self, Term::Closure(..))
    }

    /// Number of direct children (terms and substitutions alike).
    pub fn arity(&self) -> usize {
        match self {
            Term::Index(_) => 0,
            Term::Abs(_) => 1,
            Term::App(..) | Term::Closure(..) => 2,
        }
    }

    /// The node reached by following `pos` from this term, if the path is valid.
    pub fn node_at(&self, pos: &Position) -> Option<Node<'_>> {
        let mut node = Node::Term(self);
        for &step in pos.path() {
            node = node.child(step)?;
        }
        Some(node)
    }

    /// The subterm at `pos`; `None` if the path is invalid or ends on a substitution.
    pub fn subterm_at(&self, pos: &Position) -> Option<&Term> {
        match self.node_at(pos)? {
            Node::Term(t) => Some(t),
            Node::Subst(_) => None,
        }
    }

    /// Mutable access to the subterm at `pos`.
    pub fn subterm_at_mut(&mut self, pos: &Position) -> Option<&mut Term> {
        let mut node = NodeMut::Term(self);
        for &step in pos.path() {
            node = node.child(step)?;
        }
        match node {
            NodeMut::Term(t) => Some(t),
            NodeMut::Subst(_) => None,
        }
    }

    /// Pre-order iterator over all subterms, including terms under slashes.
    pub fn subterms(&self) -> Subterms<'_> {
        Subterms {
            stack: vec![Node::Term(self)],
        }
    }
}

impl Subst {
    pub fn slash(t: Term) -> Subst {
        Subst::Slash(Box::new(t))
    }

    pub fn lift(s: Subst) -> Subst {
        Subst::Lift(Box::new(s))
    }

    pub fn size(&self) -> u64 {
        match self {
            Subst::Slash(t) => 1 + t.size(),
            Subst::Lift(s) => 1 + s.size(),
            Subst::Shift => 1,
        }
    }

    pub fn is_pure(&self) -> bool {
        match self {
            Subst::Slash(t) => t.is_pure(),
            Subst::Lift(s) => s.is_pure(),
            Subst::Shift => true,
        }
    }
}

/// Borrowed view of either kind of node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Node<'a> {
    Term(&'a Term),
    Subst(&'a Subst),
}

impl<'a> Node<'a> {
    /// Child by ordinal. Abs→[body]; App→[fun,arg]; Closure→[body,sub];
    /// Slash→[t]; Lift→[s]; Index/Shift→[].
    pub fn child(self, i: usize) -> Option<Node<'a>> {
        match (self, i) {
            (Node::Term(Term::Abs(a)), 0) => Some(Node::Term(a)),
            (Node::Term(Term::App(a, _)), 0) => Some(Node::Term(a)),
            (Node::Term(Term::App(_, b)), 1) => Some(Node::Term(b)),
            (Node::Term(Term::Closure(a, _)), 0) => Some(Node::Term(a)),
            (Node::Term(Term::Closure(_, s)), 1) => Some(Node::Subst(s)),
            (Node::Subst(Subst::Slash(t)), 0) => Some(Node::Term(t)),
            (Node::Subst(Subst::Lift(s)), 0) => Some(Node::Subst(s)),
            _ => None,
        }
    }
}

enum NodeMut<'a> {
    Term(&'a mut Term),
    Subst(&'a mut Subst),
}

impl<'a> NodeMut<'a> {
    fn child(self, i: usize) -> Option<NodeMut<'a>> {
        match (self, i) {
            (NodeMut::Term(Term::Abs(a)), 0) => Some(NodeMut::Term(a)),
            (NodeMut::Term(Term::App(a, _)), 0) => Some(NodeMut::Term(a)),
            (NodeMut::Term(Term::App(_, b)), 1) => Some(NodeMut::Term(b)),
            (NodeMut::Term(Term::Closure(a, _)), 0) => Some(NodeMut::Term(a)),
            (NodeMut::Term(Term::Closure(_, s)), 1) => Some(NodeMut::Subst(s)),
            (NodeMut::Subst(Subst::Slash(t)), 0) => Some(NodeMut::Term(t)),
            (NodeMut::Subst(Subst::Lift(s)), 0) => Some(NodeMut::Subst(s)),
            _ => None,
        }
    }
}

/// Pre-order walk over every term node, including terms under slashes.
pub struct Subterms<'a> {
    stack: Vec<Node<'a>>,
}

impl<'a> Iterator for Subterms<'a> {
    type Item = &'a Term;

    fn next(&mut self) -> Option<&'a Term> {
        while let Some(node) = self.stack.pop() {
            match node {
                Node::Term(t) => {
                    match t {
                        Term::Index(_) => {}
                        Term::Abs(a) => self.stack.push(Node::Term(a)),
                        Term::App(a, b) => {
                            self.stack.push(Node::Term(b));
                            self.stack.push(Node::Term(a));
                        }
                        Term::Closure(a, s) => {
                            self.stack.push(Node::Subst(s));
                            self.stack.push(Node::Term(a));
                        }
                    }
                    return Some(t);
                }
                Node::Subst(Subst::Slash(t)) => self.stack.push(Node::Term(t)),
                Node::Subst(Subst::Lift(s)) => self.stack.push(Node::Subst(s)),
                Node::Subst(Subst::Shift) => {}
            }
        }
        None
    }
}

/// A path of child ordinals from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Position(Vec<usize>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn new(path: Vec<usize>) -> Position {
        Position(path)
    }

    pub fn path(&self) -> &[usize] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Position {
        let mut path = self.0.clone();
        path.push(i);
        Position(path)
    }
}

impl From<Vec<usize>> for Position {
    fn from(path: Vec<usize>) -> Self {
        Position(path)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::render_term(self))
    }
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::render_subst(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(n: u64) -> Term {
        Term::index(n)
    }

    #[test]
    fn sizes() {
        assert_eq!(idx(0).size(), 1);
        assert_eq!(idx(4).size(), 5);
        assert_eq!(Term::abs(Term::abs(idx(1))).size(), 4);
        assert_eq!(Term::closure(idx(0), Subst::Shift).size(), 3);
        assert_eq!(Subst::Shift.size(), 1);
        assert_eq!(Subst::lift(Subst::slash(idx(0))).size(), 3);
    }

    #[test]
    fn purity() {
        assert!(Term::abs(idx(0)).is_pure());
        assert!(!Term::closure(idx(0), Subst::Shift).is_pure());
        assert!(!Term::app(idx(0), Term::closure(idx(0), Subst::Shift)).is_pure());
    }

    #[test]
    fn positions_follow_child_order() {
        let t = Term::closure(Term::app(idx(0), idx(1)), Subst::slash(idx(2)));
        assert_eq!(t.subterm_at(&Position::root()), Some(&t));
        assert_eq!(t.subterm_at(&vec![0, 1].into()), Some(&idx(1)));
        assert_eq!(t.subterm_at(&vec![1, 0].into()), Some(&idx(2)));
        assert!(matches!(t.node_at(&vec![1].into()), Some(Node::Subst(_))));
        assert_eq!(t.subterm_at(&vec![1].into()), None);
        assert_eq!(t.subterm_at(&vec![2].into()), None);
        assert_eq!(t.subterm_at(&vec![0, 0, 0].into()), None);
    }

    #[test]
    fn subterm_walk_is_preorder() {
        let t = Term::app(
            Term::abs(idx(0)),
            Term::closure(idx(1), Subst::slash(idx(2))),
        );
        let got: Vec<String> = t.subterms().map(|u| u.to_string()).collect();
        assert_eq!(got, vec!["(\\0) 1[2/]", "\\0", "0", "1[2/]", "1", "2"]);
    }
}
