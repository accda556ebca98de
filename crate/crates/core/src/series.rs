//! Truncated formal power series over a generic coefficient ring.
//!
//! A [`Series`] stores the coefficients of `z^0 ..= z^order`; products are
//! truncated at `order`. Exact arithmetic comes from the coefficient type
//! (`BigInt`, `BigRational`); `f64` works too for quick approximations.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{FromPrimitive, Num};
use thiserror::Error;

/// Coefficient ring requirements.
pub trait Scalar: Num + Clone + FromPrimitive + Neg<Output = Self> + Debug + Send + Sync {}

impl<T> Scalar for T where T: Num + Clone + FromPrimitive + Neg<Output = T> + Debug + Send + Sync {}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("constant coefficient is not a unit of the coefficient ring")]
    NotInvertible,
    #[error("series orders differ ({0} vs {1})")]
    OrderMismatch(usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series<C> {
    coeffs: Vec<C>,
}

impl<C: Scalar> Series<C> {
    /// Builds a series of the given order, padding or truncating `coeffs`.
    pub fn new(order: usize, mut coeffs: Vec<C>) -> Self {
        coeffs.resize(order + 1, C::zero());
        Series { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Series::new(order, Vec::new())
    }

    pub fn one(order: usize) -> Self {
        Series::monomial(order, 0, C::one())
    }

    /// `c · z^k` (zero if `k > order`).
    pub fn monomial(order: usize, k: usize, c: C) -> Self {
        let mut s = Series::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// `1 / (1 - z)`.
    pub fn geometric(order: usize) -> Self {
        Series::new(order, vec![C::one(); order + 1])
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `[z^k]`, zero beyond the stored order.
    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn scale(&self, c: &C) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect(),
        }
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        let order = self.order();
        let mut coeffs = vec![C::zero(); k.min(order + 1)];
        coeffs.extend(self.coeffs.iter().take(order + 1 - coeffs.len()).cloned());
        Series { coeffs }
    }

    /// Division by `1 - z`, i.e. prefix sums.
    pub fn prefix_sums(&self) -> Self {
        let mut acc = C::zero();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                acc = acc.clone() + c.clone();
                acc.clone()
            })
            .collect();
        Series { coeffs }
    }

    /// Truncated product.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|k| convolve_at(&self.coeffs, &other.coeffs, k))
            .collect();
        Series { coeffs }
    }

    /// `[z^k](self · other)` without forming the product.
    pub fn product_coeff(&self, other: &Self, k: usize) -> C {
        convolve_at(&self.coeffs, &other.coeffs, k)
    }

    /// Multiplicative inverse; the constant coefficient must be a unit.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let c0 = self.coeffs[0].clone();
        if c0.is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let inv0 = C::one() / c0.clone();
        if !(inv0.clone() * c0).is_one() {
            return Err(SeriesError::NotInvertible);
        }
        let order = self.order();
        let mut out: Vec<C> = Vec::with_capacity(order + 1);
        out.push(inv0.clone());
        for k in 1..=order {
            let mut acc = C::zero();
            for i in 1..=k {
                acc = acc + self.coeffs[i].clone() * out[k - i].clone();
            }
            out.push(-(acc * inv0.clone()));
        }
        Ok(Series { coeffs: out })
    }

    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        Ok(self.mul(&other.inverse()?))
    }

    /// Converts coefficients, e.g. `BigInt` to `BigRational`.
    pub fn map<D: Scalar>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        Series {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C, C) -> C) -> Self {
        let order = self.order().min(other.order());
        Series {
            coeffs: (0..=order)
                .map(|k| f(self.coeffs[k].clone(), other.coeffs[k].clone()))
                .collect(),
        }
    }
}

fn convolve_at<C: Scalar>(a: &[C], b: &[C], k: usize) -> C {
    let lo = k.saturating_sub(b.len() - 1);
    let hi = k.min(a.len() - 1);
    let mut acc = C::zero();
    for i in lo..=hi {
        if a[i].is_zero() {
            continue;
        }
        acc = acc + a[i].clone() * b[k - i].clone();
    }
    acc
}

/// Running product `a · b` built one degree at a time, for fixpoint solvers
/// where `a` and `b` are themselves being computed degree by degree.
#[derive(Clone, Debug)]
pub(crate) struct IncrementalProduct<C> {
    coeffs: Vec<C>,
}

impl<C: Scalar> IncrementalProduct<C> {
    pub(crate) fn new() -> Self {
        IncrementalProduct { coeffs: Vec::new() }
    }

    /// Appends degree `k = len()`, which requires `a[0..=k]` and `b[0..=k]`.
    pub(crate) fn extend(&mut self, a: &[C], b: &[C]) {
        let k = self.coeffs.len();
        self.coeffs.push(convolve_at(&a[..=k], &b[..=k], k));
    }

    pub(crate) fn get(&self, k: usize) -> C {
        self.coeffs[k].clone()
    }
}

impl<C: Scalar> Add for &Series<C> {
    type Output = Series<C>;
    fn add(self, rhs: Self) -> Series<C> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<C: Scalar> Sub for &Series<C> {
    type Output = Series<C>;
    fn sub(self, rhs: Self) -> Series<C> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<C: Scalar> Mul for &Series<C> {
    type Output = Series<C>;
    fn mul(self, rhs: Self) -> Series<C> {
        Series::mul(self, rhs)
    }
}

impl<C: Scalar> Neg for &Series<C> {
    type Output = Series<C>;
    fn neg(self) -> Series<C> {
        self.scale(&-C::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn geometric_times_one_minus_z_is_one() {
        let g = Series::<BigInt>::geometric(6);
        let one_minus_z = Series::new(6, ints(&[1, -1]));
        assert_eq!(&g * &one_minus_z, Series::one(6));
        assert_eq!(one_minus_z.inverse().unwrap(), g);
    }

    #[test]
    fn shift_and_prefix_sums() {
        let s = Series::new(4, ints(&[1, 2, 3, 4, 5]));
        assert_eq!(s.shift(2).coeffs(), ints(&[0, 0, 1, 2, 3]).as_slice());
        assert_eq!(s.shift(9).coeffs(), ints(&[0, 0, 0, 0, 0]).as_slice());
        assert_eq!(
            s.prefix_sums().coeffs(),
            ints(&[1, 3, 6, 10, 15]).as_slice()
        );
        assert_eq!(s.prefix_sums(), s.mul(&Series::geometric(4)));
    }

    #[test]
    fn integer_inverse_needs_unit_constant() {
        let s = Series::new(3, ints(&[2, 1]));
        assert_eq!(s.inverse(), Err(SeriesError::NotInvertible));
        let r: Series<BigRational> = s.map(|c| BigRational::from_integer(c.clone()));
        let inv = r.inverse().unwrap();
        assert_eq!(&inv * &r, Series::one(3));
    }

    #[test]
    fn float_series_agree_with_integers() {
        let a = Series::new(5, ints(&[1, -3, 2, 0, 1, 7]));
        let b = Series::new(5, ints(&[1, 1, 1, 2, 3, 5]));
        let q = a.div(&b).unwrap();
        let af: Series<f64> = a.map(|c| c.to_string().parse().unwrap());
        let bf: Series<f64> = b.map(|c| c.to_string().parse().unwrap());
        let qf = af.div(&bf).unwrap();
        for k in 0..=5 {
            let exact: f64 = q.coeff(k).to_string().parse().unwrap();
            assert!((exact - qf.coeff(k)).abs() < 1e-9);
        }
    }

    #[test]
    fn product_coeff_matches_full_product() {
        let a = Series::new(7, ints(&[3, 1, 4, 1, 5, 9, 2, 6]));
        let b = Series::new(7, ints(&[2, 7, 1, 8, 2, 8, 1, 8]));
        let full = &a * &b;
        for k in 0..=7 {
            assert_eq!(a.product_coeff(&b, k), full.coeff(k));
        }
    }
}
