//! Plane binary tree skeletons, the size-preserving bijection with λυ-terms,
//! and the exact-size uniform sampler built on Rémy's algorithm.
//!
//! A skeleton node has an optional left and an optional right child; absent
//! children stand for the leaves of the corresponding full binary tree, so an
//! `n`-node skeleton is a full binary tree with `n` internal nodes.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::term::{Subst, Term};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinTree {
    #[serde(rename = "l")]
    pub left: Option<Box<BinTree>>,
    #[serde(rename = "r")]
    pub right: Option<Box<BinTree>>,
}

impl BinTree {
    pub fn leaf() -> BinTree {
        BinTree::default()
    }

    pub fn node(left: Option<BinTree>, right: Option<BinTree>) -> BinTree {
        BinTree {
            left: left.map(Box::new),
            right: right.map(Box::new),
        }
    }

    pub fn with_left(left: BinTree) -> BinTree {
        BinTree::node(Some(left), None)
    }

    pub fn with_right(right: BinTree) -> BinTree {
        BinTree::node(None, Some(right))
    }

    pub fn node_count(&self) -> u64 {
        1 + self.left.as_ref().map_or(0, |l| l.node_count())
            + self.right.as_ref().map_or(0, |r| r.node_count())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("trees serialise")
    }
}

/// All skeletons with exactly `n` nodes.
pub fn enumerate_trees(n: usize) -> Vec<BinTree> {
    let mut by_size: Vec<Vec<Option<BinTree>>> = vec![vec![None]];
    for k in 1..=n {
        let mut out = Vec::new();
        for i in 0..k {
            for l in &by_size[i] {
                for r in &by_size[k - 1 - i] {
                    out.push(Some(BinTree::node(l.clone(), r.clone())));
                }
            }
        }
        by_size.push(out);
    }
    by_size.swap_remove(n).into_iter().flatten().collect()
}

/// Tree to term.
///
/// ```text
/// •              ↦ 0
/// •(L, R)        ↦ φ(L) φ(R)
/// •(_, R)        ↦ λ φ(R)
/// •(•(_, R), _)  ↦ φ(R)[↑]
/// •(•(L, R), _)  ↦ φ(L)[φ(R)/]
/// •(L, _)        ↦ n+1 if φ(L) = n,  a[⇑(s)] if φ(L) = a[s]
/// ```
///
/// The last rule covers `L` being a leaf or having only a left child; in that
/// case `φ(L)` is always an index or a closure.
pub fn phi(tree: &BinTree) -> Term {
    match (&tree.left, &tree.right) {
        (None, None) => Term::Index(0),
        (Some(l), Some(r)) => Term::app(phi(l), phi(r)),
        (None, Some(r)) => Term::abs(phi(r)),
        (Some(l), None) => match (&l.left, &l.right) {
            (None, Some(r)) => Term::closure(phi(r), Subst::Shift),
            (Some(ll), Some(lr)) => Term::closure(phi(ll), Subst::slash(phi(lr))),
            _ => match phi(l) {
                Term::Index(n) => Term::Index(n + 1),
                Term::Closure(a, s) => Term::Closure(a, Box::new(Subst::Lift(s))),
                other => unreachable!("left chain produced {other}, not an index or closure"),
            },
        },
    }
}

/// Term to tree; inverse of [`phi`].
pub fn phi_inv(t: &Term) -> BinTree {
    match t {
        Term::Index(n) => {
            let mut tree = BinTree::leaf();
            for _ in 0..*n {
                tree = BinTree::with_left(tree);
            }
            tree
        }
        Term::Abs(a) => BinTree::with_right(phi_inv(a)),
        Term::App(a, b) => BinTree::node(Some(phi_inv(a)), Some(phi_inv(b))),
        Term::Closure(a, s) => closure_inv(a, s),
    }
}

fn closure_inv(a: &Term, s: &Subst) -> BinTree {
    match s {
        Subst::Shift => BinTree::with_left(BinTree::with_right(phi_inv(a))),
        Subst::Slash(b) => BinTree::with_left(BinTree::node(Some(phi_inv(a)), Some(phi_inv(b)))),
        Subst::Lift(inner) => BinTree::with_left(closure_inv(a, inner)),
    }
}

/// Seeded random stream.
///
/// ChaCha8 keyed by `seed_from_u64(seed)` (PCG32 expansion of the 64-bit
/// seed). [`Rng::stream`] selects one of the 2^64 independent ChaCha streams
/// for that key, so sample `i` of a run depends only on `(seed, i)`. Range
/// draws are unbiased (rejection sampling in `rand`).
#[derive(Clone, Debug)]
pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng::stream(seed, 0)
    }

    pub fn stream(seed: u64, index: u64) -> Rng {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(index);
        Rng(inner)
    }

    /// Uniform integer in `0..bound`.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.0.random_range(0..bound)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error("no structures of size 0")]
    InvalidSize,
}

const NIL: usize = usize::MAX;

/// Uniformly random skeleton with `n` nodes.
///
/// Rémy's grafting on a full binary tree stored in `2n + 1` slots: at step
/// `k` one of the `2k + 1` existing nodes and a side are drawn uniformly; a
/// fresh internal node takes that node's place, keeping it as the child on
/// the drawn side and a fresh leaf on the other. Erasing the leaves gives the
/// skeleton.
pub fn remy_tree(n: usize, rng: &mut Rng) -> Result<BinTree, SampleError> {
    if n == 0 {
        return Err(SampleError::InvalidSize);
    }
    let slots = 2 * n + 1;
    let mut children = vec![[NIL; 2]; slots];
    let mut parent = vec![NIL; slots];
    let mut root = 0;
    for k in 0..n {
        let draw = rng.below(2 * (2 * k as u64 + 1)) as usize;
        let (x, side) = (draw >> 1, draw & 1);
        let (y, leaf) = (2 * k + 1, 2 * k + 2);
        let p = parent[x];
        if p == NIL {
            root = y;
        } else {
            let slot = if children[p][0] == x { 0 } else { 1 };
            children[p][slot] = y;
        }
        parent[y] = p;
        children[y][side] = x;
        children[y][1 - side] = leaf;
        parent[x] = y;
        parent[leaf] = y;
    }
    Ok(skeleton(&children, root))
}

fn skeleton(children: &[[usize; 2]], node: usize) -> BinTree {
    let sub = |c: usize| (children[c][0] != NIL).then(|| skeleton(children, c));
    BinTree::node(sub(children[node][0]), sub(children[node][1]))
}

/// Uniformly random term of size exactly `n`, in time linear in `n`.
pub fn sample_term(n: usize, rng: &mut Rng) -> Result<Term, SampleError> {
    remy_tree(n, rng).map(|tree| phi(&tree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    #[test]
    fn phi_base_rules() {
        assert_eq!(phi(&BinTree::leaf()), Term::Index(0));
        assert_eq!(
            phi(&BinTree::with_right(BinTree::leaf())),
            parse_term("\\0").unwrap()
        );
        assert_eq!(phi(&BinTree::with_left(BinTree::leaf())), Term::Index(1));
    }

    #[test]
    fn phi_closure_rules() {
        let shift = BinTree::with_left(BinTree::with_right(BinTree::leaf()));
        assert_eq!(phi(&shift), parse_term("0[shift]").unwrap());
        let slash = BinTree::with_left(BinTree::node(Some(BinTree::leaf()), Some(BinTree::leaf())));
        assert_eq!(phi(&slash), parse_term("0[0/]").unwrap());
        assert_eq!(
            phi(&BinTree::with_left(slash)),
            parse_term("0[lift(0/)]").unwrap()
        );
    }

    #[test]
    fn phi_inv_examples() {
        assert_eq!(phi_inv(&Term::Index(0)), BinTree::leaf());
        assert_eq!(
            phi_inv(&parse_term("\\0").unwrap()),
            BinTree::with_right(BinTree::leaf())
        );
        assert_eq!(
            phi_inv(&parse_term("0[shift]").unwrap()),
            BinTree::with_left(BinTree::with_right(BinTree::leaf()))
        );
    }

    #[test]
    fn tree_counts_are_catalan() {
        let counts: Vec<usize> = (1..=7).map(|n| enumerate_trees(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 14, 42, 132, 429]);
    }

    #[test]
    fn tree_json_shape() {
        let t = BinTree::with_left(BinTree::leaf());
        assert_eq!(
            t.to_json(),
            serde_json::json!({"l": {"l": null, "r": null}, "r": null})
        );
        let back: BinTree = serde_json::from_value(t.to_json()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn remy_sizes_and_determinism() {
        assert_eq!(
            remy_tree(0, &mut Rng::new(1)),
            Err(SampleError::InvalidSize)
        );
        assert_eq!(
            sample_term(0, &mut Rng::new(1)),
            Err(SampleError::InvalidSize)
        );
        for seed in 0..20 {
            assert_eq!(remy_tree(1, &mut Rng::new(seed)).unwrap(), BinTree::leaf());
            let t = remy_tree(57, &mut Rng::new(seed)).unwrap();
            assert_eq!(t.node_count(), 57);
            assert_eq!(t, remy_tree(57, &mut Rng::new(seed)).unwrap());
            assert_eq!(
                sample_term(40, &mut Rng::stream(seed, 3)).unwrap().size(),
                40
            );
        }
        assert_eq!(sample_term(1, &mut Rng::new(9)).unwrap(), Term::Index(0));
    }

    #[test]
    fn streams_differ() {
        let a = sample_term(30, &mut Rng::stream(5, 0)).unwrap();
        let b = sample_term(30, &mut Rng::stream(5, 1)).unwrap();
        let c = sample_term(30, &mut Rng::stream(6, 0)).unwrap();
        assert!(a != b || a != c);
    }

    #[test]
    fn remy_two_nodes_balanced() {
        let mut left = 0;
        let trials = 4000;
        for i in 0..trials {
            let t = remy_tree(2, &mut Rng::stream(11, i)).unwrap();
            if t.left.is_some() {
                left += 1;
            }
        }
        // Binomial(4000, 1/2): sd ≈ 31.6; 4 sd band.
        assert!((left as i64 - 2000).abs() < 127, "left = {left}");
    }
}
