//! Seeded sampling experiments over uniform random terms.
//!
//! Sample `i` of a run is drawn from [`Rng::stream`]`(seed, i)`, and all
//! aggregation goes through exact integer power sums, so results are
//! bit-identical for any number of worker threads.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bijection::{sample_term, Rng};
use crate::enumerate::{ratio_to_f64, ParamKind};
use crate::rewrite::{has_nested_substitution, RuleKind};
use crate::term::Term;

/// A per-term observable: one of the nine parameters, or the 0/1 indicator
/// of containing a nested substitution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Param(ParamKind),
    NestedFraction,
}

impl Measure {
    pub const ALL: [Measure; 10] = [
        Measure::Param(ParamKind::ALL[0]),
        Measure::Param(ParamKind::ALL[1]),
        Measure::Param(ParamKind::ALL[2]),
        Measure::Param(ParamKind::ALL[3]),
        Measure::Param(ParamKind::ALL[4]),
        Measure::Param(ParamKind::ALL[5]),
        Measure::Param(ParamKind::ALL[6]),
        Measure::Param(ParamKind::ALL[7]),
        Measure::Param(ParamKind::Unsuspended),
        Measure::NestedFraction,
    ];

    pub fn redexes() -> impl Iterator<Item = Measure> {
        RuleKind::ALL
            .into_iter()
            .map(|k| Measure::Param(ParamKind::Redex(k)))
    }

    pub fn value(self, t: &Term) -> u64 {
        match self {
            Measure::Param(p) => p.value(t),
            Measure::NestedFraction => has_nested_substitution(t) as u64,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Param(p) => write!(f, "{p}"),
            Measure::NestedFraction => f.write_str("NestedFraction"),
        }
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("nestedfraction") || s.eq_ignore_ascii_case("nested") {
            return Ok(Measure::NestedFraction);
        }
        s.parse::<ParamKind>()
            .map(Measure::Param)
            .map_err(|_| format!("unknown parameter {s:?}"))
    }
}

impl Serialize for Measure {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Measure {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("term size must be at least 1")]
    InvalidSize,
    #[error("at least 2 samples are needed, got {0}")]
    InsufficientSamples(u64),
    #[error("nothing to export")]
    EmptyResults,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Exact power sums of a sample of naturals. Merging is associative and
/// commutative.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Accumulator {
    pub count: u64,
    pub sum: u128,
    pub sum_sq: u128,
    pub sum_cube: u128,
    pub min: u64,
    pub max: u64,
}

impl Accumulator {
    pub fn single(x: u64) -> Accumulator {
        let x128 = x as u128;
        Accumulator {
            count: 1,
            sum: x128,
            sum_sq: x128 * x128,
            sum_cube: x128 * x128 * x128,
            min: x,
            max: x,
        }
    }

    pub fn merge(self, other: Accumulator) -> Accumulator {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        Accumulator {
            count: self.count + other.count,
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
            sum_cube: self.sum_cube + other.sum_cube,
            min: self.min.min(other.min),
            max: self.max.max(other.max),
        }
    }

    pub fn exact_mean(&self) -> BigRational {
        BigRational::new(BigInt::from(self.sum), BigInt::from(self.count))
    }

    /// Unbiased sample variance, divisor `m - 1`.
    pub fn exact_variance(&self) -> BigRational {
        let m = BigInt::from(self.count);
        let s1 = BigInt::from(self.sum);
        let s2 = BigInt::from(self.sum_sq);
        let num = &m * &s2 - &s1 * &s1;
        BigRational::new(num, &m * (&m - 1))
    }

    /// Third central moment with divisor `m`.
    pub fn exact_third_central_moment(&self) -> BigRational {
        let m = BigInt::from(self.count);
        let s1 = BigInt::from(self.sum);
        let s2 = BigInt::from(self.sum_sq);
        let s3 = BigInt::from(self.sum_cube);
        let num = &m * &m * &s3 - 3 * &m * &s1 * &s2 + 2 * &s1 * &s1 * &s1;
        BigRational::new(num, &m * &m * &m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub param: Measure,
    pub n: u64,
    pub m: u64,
    pub seed: u64,
    pub mean: f64,
    pub variance: f64,
    pub min: u64,
    pub max: u64,
    pub m3: f64,
}

impl SampleSummary {
    pub fn from_accumulator(param: Measure, n: u64, seed: u64, acc: &Accumulator) -> Self {
        SampleSummary {
            param,
            n,
            m: acc.count,
            seed,
            mean: ratio_to_f64(&acc.exact_mean()),
            variance: ratio_to_f64(&acc.exact_variance()),
            min: acc.min,
            max: acc.max,
            m3: ratio_to_f64(&acc.exact_third_central_moment()),
        }
    }

    pub fn standard_error(&self) -> f64 {
        (self.variance / self.m as f64).sqrt()
    }

    /// `m3 / m2^(3/2)` with the biased second moment; 0 for a constant sample.
    pub fn skewness(&self) -> f64 {
        let m2 = self.variance * (self.m as f64 - 1.0) / self.m as f64;
        if m2 == 0.0 {
            0.0
        } else {
            self.m3 / m2.powf(1.5)
        }
    }
}

/// Draws `m` uniform terms of size `n` and summarises each measure, in the
/// order given.
pub fn run_experiment(
    n: usize,
    m: u64,
    seed: u64,
    measures: &[Measure],
) -> Result<Vec<SampleSummary>, StatsError> {
    if n == 0 {
        return Err(StatsError::InvalidSize);
    }
    if m < 2 {
        return Err(StatsError::InsufficientSamples(m));
    }
    let k = measures.len();
    let accs = (0..m)
        .into_par_iter()
        .map(|i| {
            let t = sample_term(n, &mut Rng::stream(seed, i)).expect("n >= 1");
            measures
                .iter()
                .map(|p| Accumulator::single(p.value(&t)))
                .collect::<Vec<_>>()
        })
        .reduce(
            || vec![Accumulator::default(); k],
            |a, b| a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect(),
        );
    Ok(measures
        .iter()
        .zip(&accs)
        .map(|(p, acc)| SampleSummary::from_accumulator(*p, n as u64, seed, acc))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "snake_case")]
pub enum Tolerance {
    Absolute(f64),
    Relative(f64),
    /// Multiples of the standard error of the observed statistic.
    StandardErrors(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Mean,
    Variance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub statistic: Statistic,
    pub label: String,
    pub observed: f64,
    pub reference: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub standard_error: f64,
    pub tolerance: Tolerance,
    pub verdict: Verdict,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Compares the sample mean against `reference`.
pub fn compare_to_reference(
    s: &SampleSummary,
    reference: f64,
    tolerance: Tolerance,
) -> ComparisonReport {
    compare(
        Statistic::Mean,
        s.mean,
        s.standard_error(),
        reference,
        tolerance,
    )
}

/// Compares the sample variance against `reference`. The standard error used
/// for `StandardErrors` mode is the normal-theory `σ²·√(2/(m-1))`.
pub fn compare_variance_to_reference(
    s: &SampleSummary,
    reference: f64,
    tolerance: Tolerance,
) -> ComparisonReport {
    let se = s.variance * (2.0 / (s.m as f64 - 1.0)).sqrt();
    compare(Statistic::Variance, s.variance, se, reference, tolerance)
}

fn compare(
    statistic: Statistic,
    observed: f64,
    standard_error: f64,
    reference: f64,
    tolerance: Tolerance,
) -> ComparisonReport {
    let abs_err = (observed - reference).abs();
    let rel_err = if reference == 0.0 {
        if abs_err == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        abs_err / reference.abs()
    };
    let ok = match tolerance {
        Tolerance::Absolute(t) => abs_err <= t,
        Tolerance::Relative(t) => rel_err <= t,
        Tolerance::StandardErrors(k) => abs_err <= k * standard_error,
    };
    ComparisonReport {
        statistic,
        label: String::new(),
        observed,
        reference,
        abs_err,
        rel_err,
        standard_error,
        tolerance,
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
    }
}

/// A summary with the comparisons made against it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    #[serde(flatten)]
    pub summary: SampleSummary,
    #[serde(default)]
    pub comparisons: Vec<ComparisonReport>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            _ => Err(format!("unknown format {s:?} (expected csv or json)")),
        }
    }
}

pub const CSV_HEADER: &str = "param,n,m,seed,mean,variance,min,max,m3";

/// Writes reports as CSV (`param,n,m,seed,mean,variance,min,max,m3`, decimals
/// to 12 significant digits) or as a JSON array. Returns the bytes written.
pub fn export_report(
    results: &[Report],
    format: ExportFormat,
    mut destination: impl Write,
) -> Result<usize, StatsError> {
    if results.is_empty() {
        return Err(StatsError::EmptyResults);
    }
    let text = match format {
        ExportFormat::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in results {
                let s = &r.summary;
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    s.param,
                    s.n,
                    s.m,
                    s.seed,
                    format_decimal(s.mean),
                    format_decimal(s.variance),
                    s.min,
                    s.max,
                    format_decimal(s.m3)
                ));
            }
            out
        }
        ExportFormat::Json => {
            let mut out = serde_json::to_string_pretty(results).expect("reports serialise");
            out.push('\n');
            out
        }
    };
    destination.write_all(text.as_bytes())?;
    Ok(text.len())
}

/// Parses the JSON written by [`export_report`].
pub fn parse_json_report(text: &str) -> Result<Vec<Report>, serde_json::Error> {
    serde_json::from_str(text)
}

/// Decimal with 12 significant digits, trailing zeros trimmed (like `%.12g`).
pub fn format_decimal(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Limit slopes `𝔼(Xₙ)/n` of the redex counts.
pub fn reference_mean_slope(kind: RuleKind) -> BigRational {
    let (p, q) = match kind {
        RuleKind::Beta => (3, 64),
        RuleKind::App => (1, 32),
        RuleKind::Lambda => (1, 32),
        RuleKind::FVar => (3, 256),
        RuleKind::RVar => (1, 256),
        RuleKind::FVarLift => (1, 128),
        RuleKind::RVarLift => (1, 384),
        RuleKind::VarShift => (1, 64),
    };
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Limit slopes `𝕍(Xₙ)/n` of the redex counts.
pub fn reference_variance_slope(kind: RuleKind) -> BigRational {
    let (p, q) = match kind {
        RuleKind::Beta => (153, 4096),
        RuleKind::App => (45, 2048),
        RuleKind::Lambda => (53, 2048),
        RuleKind::FVar => (729, 65536),
        RuleKind::RVar => (249, 65536),
        RuleKind::FVarLift => (241, 32768),
        RuleKind::RVarLift => (377, 147456),
        RuleKind::VarShift => (57, 4096),
    };
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Limit of the expected number of unsuspended constructors.
pub fn unsuspended_limit() -> BigRational {
    BigRational::new(BigInt::from(316), BigInt::from(3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulator_moments() {
        let acc = [1u64, 2, 3, 10]
            .into_iter()
            .map(Accumulator::single)
            .fold(Accumulator::default(), Accumulator::merge);
        assert_eq!(acc.exact_mean(), BigRational::new(4.into(), 1.into()));
        // Σ(x-4)² = 9+4+1+36 = 50, /3
        assert_eq!(acc.exact_variance(), BigRational::new(50.into(), 3.into()));
        // Σ(x-4)³ = -27-8-1+216 = 180, /4
        assert_eq!(
            acc.exact_third_central_moment(),
            BigRational::from_integer(45.into())
        );
        assert_eq!((acc.min, acc.max), (1, 10));
    }

    #[test]
    fn experiment_errors() {
        let beta = [Measure::Param(ParamKind::Redex(RuleKind::Beta))];
        assert!(matches!(
            run_experiment(0, 10, 1, &beta),
            Err(StatsError::InvalidSize)
        ));
        assert!(matches!(
            run_experiment(5, 1, 1, &beta),
            Err(StatsError::InsufficientSamples(1))
        ));
    }

    #[test]
    fn size_one_is_degenerate() {
        let out = run_experiment(1, 50, 3, &Measure::ALL).unwrap();
        let beta = &out[0];
        assert_eq!(beta.mean, 0.0);
        assert_eq!(beta.variance, 0.0);
        assert_eq!(beta.skewness(), 0.0);
        let unsusp = &out[8];
        assert_eq!((unsusp.mean, unsusp.min, unsusp.max), (1.0, 1, 1));
    }

    #[test]
    fn tolerance_modes() {
        let s = SampleSummary {
            param: Measure::Param(ParamKind::Unsuspended),
            n: 10,
            m: 100,
            seed: 0,
            mean: 10.5,
            variance: 4.0,
            min: 0,
            max: 20,
            m3: 0.0,
        };
        assert!(compare_to_reference(&s, 10.0, Tolerance::Absolute(0.5)).passed());
        assert!(!compare_to_reference(&s, 10.0, Tolerance::Absolute(0.4)).passed());
        assert!(compare_to_reference(&s, 10.0, Tolerance::Relative(0.05)).passed());
        assert!(!compare_to_reference(&s, 10.0, Tolerance::Relative(0.04)).passed());
        // SE = 0.2
        let r = compare_to_reference(&s, 10.0, Tolerance::StandardErrors(3.0));
        assert!((r.standard_error - 0.2).abs() < 1e-12);
        assert!(r.passed());
        assert!(!compare_to_reference(&s, 10.0, Tolerance::StandardErrors(2.0)).passed());
        assert!(compare_variance_to_reference(&s, 4.2, Tolerance::Relative(0.05)).passed());
    }

    #[test]
    fn decimal_formatting() {
        assert_eq!(format_decimal(0.0), "0");
        assert_eq!(format_decimal(46.875), "46.875");
        assert_eq!(format_decimal(1.0 / 14.0), "0.0714285714286");
        assert_eq!(format_decimal(316.0 / 3.0), "105.333333333");
        assert_eq!(format_decimal(-2.5), "-2.5");
        assert_eq!(format_decimal(1e-9), "1e-9");
        assert_eq!(format_decimal(123456789012345.0), "1.23456789012e14");
        assert_eq!(format_decimal(3.0), "3");
    }

    #[test]
    fn measure_names() {
        for m in Measure::ALL {
            assert_eq!(m.to_string().parse::<Measure>().unwrap(), m);
        }
        assert_eq!(
            "nested".parse::<Measure>().unwrap(),
            Measure::NestedFraction
        );
    }

    #[test]
    fn reference_constants_match_rounded_table() {
        let means = [
            0.046875, 0.031250, 0.031250, 0.011719, 0.003906, 0.007812, 0.002604, 0.015625,
        ];
        let vars = [
            0.037354, 0.021973, 0.025879, 0.011124, 0.003799, 0.007355, 0.002557, 0.013916,
        ];
        for (i, k) in RuleKind::ALL.into_iter().enumerate() {
            assert!((ratio_to_f64(&reference_mean_slope(k)) - means[i]).abs() < 1e-6);
            assert!((ratio_to_f64(&reference_variance_slope(k)) - vars[i]).abs() < 1e-6);
        }
    }
}
