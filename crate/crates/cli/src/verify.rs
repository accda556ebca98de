//! Built-in verification suites. Each returns the number of checks run and
//! a description of every failed one.

use num_bigint::BigUint;
use upsilon_core::bijection::enumerate_trees;
use upsilon_core::enumerate::total_param_with;
use upsilon_core::rewrite::upsilon_normal_forms;
use upsilon_core::{
    apply_at, count_substs, count_terms, expected_param_exact, find_redexes, normalize, phi,
    phi_inv, Enumerator, ParamKind, RuleSet, Strategy, Term,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Catalan,
    Bijection,
    Rewrite,
    Oracle,
}

/// Largest size the exhaustive suites accept.
pub const EXHAUSTIVE_LIMIT: usize = 10;

pub struct Outcome {
    pub checks: usize,
    pub failures: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

pub fn run(suite: Suite, max_size: usize) -> Outcome {
    match suite {
        Suite::Catalan => catalan(max_size),
        Suite::Bijection => bijection(max_size),
        Suite::Rewrite => rewrite(max_size),
        Suite::Oracle => oracle(max_size),
    }
}

fn binomial_catalan(n: usize) -> BigUint {
    let mut num = BigUint::from(1u8);
    let mut den = BigUint::from(1u8);
    for k in 1..=n {
        num *= BigUint::from(n + k);
        den *= BigUint::from(k);
    }
    num / den / BigUint::from(n + 1)
}

fn catalan(max: usize) -> Outcome {
    let mut out = Outcome::new();
    let mut partial = BigUint::from(0u8);
    for n in 0..=max {
        let c = binomial_catalan(n);
        let expected_terms = if n == 0 {
            BigUint::from(0u8)
        } else {
            c.clone()
        };
        out.check(count_terms(n) == expected_terms, || {
            format!("term count at size {n}")
        });
        out.check(count_substs(n) == partial, || {
            format!("substitution count at size {n}")
        });
        partial += c;
    }
    out
}

fn terms_upto(max: usize) -> Vec<Term> {
    let mut en = Enumerator::with_bound(max);
    (1..=max)
        .flat_map(|n| en.terms(n).expect("within bound").to_vec())
        .collect()
}

fn bijection(max: usize) -> Outcome {
    let mut out = Outcome::new();
    for t in terms_upto(max) {
        let tree = phi_inv(&t);
        out.check(tree.node_count() == t.size() && phi(&tree) == t, || {
            format!("phi(phi_inv({t}))")
        });
    }
    for n in 1..=max {
        for tree in enumerate_trees(n) {
            let t = phi(&tree);
            out.check(t.size() == n as u64 && phi_inv(&t) == tree, || {
                format!("phi_inv(phi(tree)) for {t}")
            });
        }
    }
    out
}

/// Leftmost-outermost by rescanning from the root after every step.
fn naive_normal_form(t: &Term, rules: RuleSet, max_steps: usize) -> Option<(Term, usize)> {
    let mut cur = t.clone();
    for steps in 0..=max_steps {
        match find_redexes(&cur, rules).into_iter().next() {
            None => return Some((cur, steps)),
            Some(r) => cur = apply_at(&cur, &r).expect("found redexes apply"),
        }
    }
    None
}

fn rewrite(max: usize) -> Outcome {
    const BUDGET: u64 = 10_000;
    let mut out = Outcome::new();
    for t in terms_upto(max) {
        let ups = normalize(&t, Strategy::Upsilon, BUDGET);
        let nf = match ups {
            Ok(n) => n.term,
            Err(_) => {
                out.check(false, || {
                    format!("upsilon normalisation of {t} did not finish")
                });
                continue;
            }
        };
        out.check(nf.is_pure(), || {
            format!("upsilon normal form of {t} is impure")
        });
        match upsilon_normal_forms(&t, 1_000_000) {
            Ok(forms) => out.check(forms.len() == 1 && forms.contains(&nf), || {
                format!("{t} has {} upsilon normal forms", forms.len())
            }),
            Err(_) => out.check(false, || format!("state space of {t} too large")),
        }
        let fast = normalize(&t, Strategy::Full, 200)
            .ok()
            .map(|n| (n.term, n.trace.len()));
        let slow = naive_normal_form(&t, RuleSet::all(), 200);
        out.check(fast == slow, || {
            format!("engine disagrees with reference on {t}")
        });
    }
    out
}

fn oracle(max: usize) -> Outcome {
    let mut out = Outcome::new();
    let mut en = Enumerator::with_bound(max);
    for n in 1..=max {
        let count = num_rational::BigRational::from_integer(count_terms(n).into());
        for p in ParamKind::ALL {
            let brute = total_param_with(&mut en, p, n).expect("within bound");
            let exact = expected_param_exact(p, n) * &count;
            out.check(
                exact == num_rational::BigRational::from_integer(brute.into()),
                || format!("{p} at size {n}"),
            );
        }
    }
    out
}
