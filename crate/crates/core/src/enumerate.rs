//! Exact enumeration: generating-function systems solved degree by degree,
//! exact parameter expectations, and brute-force oracles by exhaustive
//! construction.
//!
//! With `N(z) = z/(1-z)` counting indices, terms and substitutions satisfy
//!
//! ```text
//! T = N + zT + zT² + zTS
//! S = zT + zS + z
//! ```
//!
//! Every right-hand term carries a factor `z`, so the degree-`k` coefficients
//! depend only on lower degrees and the system is solved by a single forward
//! pass. `T` turns out to be the Catalan series minus one.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rewrite::{count_redexes, has_nested_substitution, unsuspended_constructors, RuleKind};
use crate::series::{IncrementalProduct, Scalar, Series};
use crate::term::{Subst, Term};

/// Largest size [`enumerate_terms`] accepts by default (16796 terms).
pub const DEFAULT_ENUMERATION_BOUND: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("size {n} exceeds the enumeration bound {bound}")]
    BoundExceeded { n: usize, bound: usize },
}

/// `T`, `S` and `N` for all terms, substitutions and indices.
#[derive(Clone, Debug, PartialEq)]
pub struct CoreSeries<C> {
    pub terms: Series<C>,
    pub substs: Series<C>,
    pub indices: Series<C>,
}

pub fn solve_core_series<C: Scalar>(order: usize) -> CoreSeries<C> {
    let one = C::one();
    let mut n = vec![C::zero()];
    let mut t = vec![C::zero()];
    let mut s = vec![C::zero()];
    let mut tt = IncrementalProduct::new();
    let mut ts = IncrementalProduct::new();
    tt.extend(&t, &t);
    ts.extend(&t, &s);
    for k in 1..=order {
        let unit = if k == 1 { one.clone() } else { C::zero() };
        n.push(unit.clone() + n[k - 1].clone());
        t.push(n[k].clone() + t[k - 1].clone() + tt.get(k - 1) + ts.get(k - 1));
        s.push(t[k - 1].clone() + s[k - 1].clone() + unit);
        tt.extend(&t, &t);
        ts.extend(&t, &s);
    }
    CoreSeries {
        terms: Series::new(order, t),
        substs: Series::new(order, s),
        indices: Series::new(order, n),
    }
}

/// Pure terms `P`, restricted substitutions `S̄` (slash payloads pure) and
/// terms without nested substitutions `T̄`:
///
/// ```text
/// P = N + zP + zP²
/// S̄ = zP + zS̄ + z
/// T̄ = N + zT̄ + zT̄² + zT̄S̄
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedSeries<C> {
    pub pure: Series<C>,
    pub substs: Series<C>,
    pub terms: Series<C>,
}

pub fn solve_restricted_series<C: Scalar>(order: usize) -> RestrictedSeries<C> {
    let one = C::one();
    let mut n = vec![C::zero()];
    let mut p = vec![C::zero()];
    let mut sb = vec![C::zero()];
    let mut tb = vec![C::zero()];
    let mut pp = IncrementalProduct::new();
    let mut tbtb = IncrementalProduct::new();
    let mut tbsb = IncrementalProduct::new();
    pp.extend(&p, &p);
    tbtb.extend(&tb, &tb);
    tbsb.extend(&tb, &sb);
    for k in 1..=order {
        let unit = if k == 1 { one.clone() } else { C::zero() };
        n.push(unit.clone() + n[k - 1].clone());
        p.push(n[k].clone() + p[k - 1].clone() + pp.get(k - 1));
        sb.push(p[k - 1].clone() + sb[k - 1].clone() + unit);
        tb.push(n[k].clone() + tb[k - 1].clone() + tbtb.get(k - 1) + tbsb.get(k - 1));
        pp.extend(&p, &p);
        tbtb.extend(&tb, &tb);
        tbsb.extend(&tb, &sb);
    }
    RestrictedSeries {
        pure: Series::new(order, p),
        substs: Series::new(order, sb),
        terms: Series::new(order, tb),
    }
}

fn to_biguint(x: BigInt) -> BigUint {
    x.to_biguint().expect("enumeration counts are non-negative")
}

/// Number of terms of size `n`.
pub fn count_terms(n: usize) -> BigUint {
    to_biguint(solve_core_series::<BigInt>(n).terms.coeff(n))
}

/// Number of substitutions of size `n`.
pub fn count_substs(n: usize) -> BigUint {
    to_biguint(solve_core_series::<BigInt>(n).substs.coeff(n))
}

/// Catalan numbers by the convolution recurrence `C₀ = 1`, `Cₙ₊₁ = Σ CᵢCₙ₋ᵢ`.
pub fn catalan_numbers(upto: usize) -> Vec<BigUint> {
    let mut c: Vec<BigUint> = vec![BigUint::from(1u32)];
    for n in 0..upto {
        let next = (0..=n).map(|i| &c[i] * &c[n - i]).sum();
        c.push(next);
    }
    c
}

pub fn catalan(n: usize) -> BigUint {
    catalan_numbers(n).pop().expect("non-empty")
}

/// `T̄ₙ / Tₙ`: the fraction of size-`n` terms without nested substitutions.
pub fn nested_free_fraction(n: usize) -> BigRational {
    assert!(n >= 1, "no terms of size 0");
    let restricted = solve_restricted_series::<BigInt>(n).terms.coeff(n);
    let all = solve_core_series::<BigInt>(n).terms.coeff(n);
    BigRational::new(restricted, all)
}

/// A numeric parameter of a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ParamKind {
    /// Number of redexes of one rule.
    Redex(RuleKind),
    /// Constructors not suspended under a closure.
    Unsuspended,
}

impl ParamKind {
    pub const ALL: [ParamKind; 9] = [
        ParamKind::Redex(RuleKind::Beta),
        ParamKind::Redex(RuleKind::App),
        ParamKind::Redex(RuleKind::Lambda),
        ParamKind::Redex(RuleKind::FVar),
        ParamKind::Redex(RuleKind::RVar),
        ParamKind::Redex(RuleKind::FVarLift),
        ParamKind::Redex(RuleKind::RVarLift),
        ParamKind::Redex(RuleKind::VarShift),
        ParamKind::Unsuspended,
    ];

    pub fn value(self, t: &Term) -> u64 {
        match self {
            ParamKind::Redex(k) => count_redexes(t, k),
            ParamKind::Unsuspended => unsuspended_constructors(t),
        }
    }
}

impl fmt::Display for ParamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamKind::Redex(k) => write!(f, "{k}"),
            ParamKind::Unsuspended => f.write_str("Unsuspended"),
        }
    }
}

impl FromStr for ParamKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("unsuspended") {
            return Ok(ParamKind::Unsuspended);
        }
        s.parse::<RuleKind>()
            .map(ParamKind::Redex)
            .map_err(|_| format!("unknown parameter {s:?}"))
    }
}

/// Exact parameter expectations from derivative series `D = ∂ᵤT(z,u)|ᵤ₌₁`.
///
/// Every redex system has the shape `T(z,u) = (univariate T system) + (u-1)·G`
/// with `S(z,u) = zT + zS + z`; differentiating gives `D_S = z·D/(1-z)` and
///
/// ```text
/// D = G / (1 - z - zS - 2zT - z²T/(1-z))
/// ```
///
/// with `G` per rule:
///
/// | rule     | G            |
/// |----------|--------------|
/// | Beta     | z²T²         |
/// | App      | z²T²S        |
/// | Lambda   | z²TS         |
/// | FVar     | z³T          |
/// | RVar     | z⁴T/(1-z)    |
/// | FVarLift | z³S          |
/// | RVarLift | z⁴S/(1-z)    |
/// | VarShift | z³/(1-z)     |
///
/// Unsuspended constructors mark only the top-level term grammar (`S` stays
/// univariate), giving
///
/// ```text
/// D = (z/(1-z)² + T(z + zT + zS)) / (1 - z - 2zT - zS)
/// ```
///
/// Only single coefficients of `D` are ever needed, so the numerators and the
/// inverted denominators are stored and `[zⁿ]D` is one dot product.
#[derive(Clone, Debug)]
pub struct ExpectationTable<C> {
    core: CoreSeries<C>,
    numerators: [Series<C>; 9],
    redex_den_inv: Series<C>,
    unsuspended_den_inv: Series<C>,
}

impl<C: Scalar> ExpectationTable<C> {
    pub fn new(order: usize) -> Self {
        let core = solve_core_series::<C>(order);
        let t = &core.terms;
        let s = &core.substs;
        let one = Series::one(order);
        let tt = t * t;
        let ts = t * s;
        let tts = &tt * s;

        let g = |kind: RuleKind| -> Series<C> {
            match kind {
                RuleKind::Beta => tt.shift(2),
                RuleKind::App => tts.shift(2),
                RuleKind::Lambda => ts.shift(2),
                RuleKind::FVar => t.shift(3),
                RuleKind::RVar => t.prefix_sums().shift(4),
                RuleKind::FVarLift => s.shift(3),
                RuleKind::RVarLift => s.prefix_sums().shift(4),
                RuleKind::VarShift => Series::geometric(order).shift(3),
            }
        };

        let two_zt = t.shift(1).scale(&C::from_u32(2).expect("small constant"));
        let base_den = &(&(&one - &one.shift(1)) - &s.shift(1)) - &two_zt;
        let redex_den = &base_den - &t.prefix_sums().shift(2);
        let redex_den_inv = redex_den
            .inverse()
            .expect("denominator has constant term 1");
        let unsuspended_den_inv = base_den.inverse().expect("denominator has constant term 1");

        let index_mass = Series::geometric(order).prefix_sums().shift(1);
        let unsuspended_num = &index_mass + &(&(t + &tt) + &ts).shift(1);

        let numerators = ParamKind::ALL.map(|p| match p {
            ParamKind::Redex(k) => g(k),
            ParamKind::Unsuspended => unsuspended_num.clone(),
        });
        ExpectationTable {
            core,
            numerators,
            redex_den_inv,
            unsuspended_den_inv,
        }
    }

    pub fn order(&self) -> usize {
        self.core.terms.order()
    }

    pub fn core(&self) -> &CoreSeries<C> {
        &self.core
    }

    /// `[zⁿ]D`: the parameter summed over all terms of size `n`.
    pub fn total(&self, p: ParamKind, n: usize) -> C {
        assert!(
            n <= self.order(),
            "size {n} beyond table order {}",
            self.order()
        );
        let idx = ParamKind::ALL.iter().position(|q| *q == p).expect("listed");
        let inv = match p {
            ParamKind::Redex(_) => &self.redex_den_inv,
            ParamKind::Unsuspended => &self.unsuspended_den_inv,
        };
        self.numerators[idx].product_coeff(inv, n)
    }

    /// The full derivative series `D` for `p`.
    pub fn derivative_series(&self, p: ParamKind) -> Series<C> {
        let n = self.order();
        Series::new(n, (0..=n).map(|k| self.total(p, k)).collect())
    }

    /// `Tₙ`.
    pub fn count(&self, n: usize) -> C {
        self.core.terms.coeff(n)
    }
}

impl ExpectationTable<BigInt> {
    /// `𝔼(Xₙ) = [zⁿ]D / Tₙ` as an exact rational.
    pub fn expected(&self, p: ParamKind, n: usize) -> BigRational {
        assert!(n >= 1, "no terms of size 0");
        BigRational::new(self.total(p, n), self.count(n))
    }
}

/// Exact mean of `p` over all terms of size `n`.
pub fn expected_param_exact(p: ParamKind, n: usize) -> BigRational {
    ExpectationTable::<BigInt>::new(n).expected(p, n)
}

/// Bottom-up exhaustive construction of terms and substitutions by size.
#[derive(Clone, Debug)]
pub struct Enumerator {
    bound: usize,
    terms: Vec<Vec<Term>>,
    substs: Vec<Vec<Subst>>,
}

impl Default for Enumerator {
    fn default() -> Self {
        Enumerator::with_bound(DEFAULT_ENUMERATION_BOUND)
    }
}

impl Enumerator {
    pub fn with_bound(bound: usize) -> Self {
        Enumerator {
            bound,
            terms: vec![Vec::new()],
            substs: vec![Vec::new()],
        }
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    fn fill(&mut self, n: usize) {
        while self.terms.len() <= n {
            let k = self.terms.len();
            let mut terms = vec![Term::Index(k as u64 - 1)];
            terms.extend(self.terms[k - 1].iter().cloned().map(Term::abs));
            for i in 1..k - 1 {
                for a in &self.terms[i] {
                    for b in &self.terms[k - 1 - i] {
                        terms.push(Term::app(a.clone(), b.clone()));
                    }
                }
            }
            for i in 1..k - 1 {
                for a in &self.terms[i] {
                    for s in &self.substs[k - 1 - i] {
                        terms.push(Term::closure(a.clone(), s.clone()));
                    }
                }
            }
            let mut substs: Vec<Subst> = if k == 1 {
                vec![Subst::Shift]
            } else {
                Vec::new()
            };
            substs.extend(self.terms[k - 1].iter().cloned().map(Subst::slash));
            substs.extend(self.substs[k - 1].iter().cloned().map(Subst::lift));
            self.terms.push(terms);
            self.substs.push(substs);
        }
    }

    /// All terms of size exactly `n`.
    pub fn terms(&mut self, n: usize) -> Result<&[Term], EnumError> {
        if n > self.bound {
            return Err(EnumError::BoundExceeded {
                n,
                bound: self.bound,
            });
        }
        self.fill(n);
        Ok(&self.terms[n])
    }

    /// All substitutions of size exactly `n`.
    pub fn substs(&mut self, n: usize) -> Result<&[Subst], EnumError> {
        if n > self.bound {
            return Err(EnumError::BoundExceeded {
                n,
                bound: self.bound,
            });
        }
        self.fill(n);
        Ok(&self.substs[n])
    }
}

/// All terms of size exactly `n`, `n ≤` [`DEFAULT_ENUMERATION_BOUND`].
pub fn enumerate_terms(n: usize) -> Result<Vec<Term>, EnumError> {
    Enumerator::default().terms(n).map(<[Term]>::to_vec)
}

/// All pure terms of size exactly `n` (no bound: they grow far slower).
pub fn pure_terms(n: usize) -> Vec<Term> {
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new()];
    for k in 1..=n {
        let mut terms = vec![Term::Index(k as u64 - 1)];
        terms.extend(by_size[k - 1].iter().cloned().map(Term::abs));
        for i in 1..k - 1 {
            for a in &by_size[i] {
                for b in &by_size[k - 1 - i] {
                    terms.push(Term::app(a.clone(), b.clone()));
                }
            }
        }
        by_size.push(terms);
    }
    by_size.swap_remove(n)
}

/// Sum of `p` over every term of size `n`, by enumeration.
pub fn total_param_bruteforce(p: ParamKind, n: usize) -> Result<BigUint, EnumError> {
    total_param_with(&mut Enumerator::default(), p, n)
}

pub fn total_param_with(en: &mut Enumerator, p: ParamKind, n: usize) -> Result<BigUint, EnumError> {
    let sum: u64 = en.terms(n)?.iter().map(|t| p.value(t)).sum();
    Ok(BigUint::from(sum))
}

/// Number of size-`n` terms containing a nested substitution, by enumeration.
pub fn count_nested_bruteforce(en: &mut Enumerator, n: usize) -> Result<usize, EnumError> {
    Ok(en
        .terms(n)?
        .iter()
        .filter(|t| has_nested_substitution(t))
        .count())
}

/// Exact rational rendered as `p/q` (or `p` when integral).
pub fn format_ratio(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest `f64` to an exact rational, robust to huge numerators/denominators.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().bits() as i64;
        let d = r.denom().bits() as i64;
        let shift = 1100 - (n - d);
        let scaled = if shift >= 0 {
            (r.numer() << shift as usize) / r.denom()
        } else {
            r.numer() / (r.denom() << (-shift) as usize)
        };
        scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(shift as i32))
    })
}
