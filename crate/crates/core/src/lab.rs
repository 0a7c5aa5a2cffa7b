//! Uncertainty products `Δ_s · Δ_C(ω₁…ω_s)` and the two-observable
//! probability space behind them.
//!
//! Every quantity is an exact dyadic or rational. Deviations are handled
//! squared so no square root is ever taken.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::RangeInclusive;

use num_bigint::{BigInt, BigUint};

use crate::bits::BitString;
use crate::enumerate::{complexity_indexed, omega_lower_bound, omega_s, prob_string, EnumerationCache, Extended};
use crate::numbers::{rational_div, Dyadic, Rational};

/// Where a string of Ω bits came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Expansion of an exactly known Ω.
    Exact,
    /// Expansion of an Ω lower bound that did not change across the budgets
    /// tried. More budget may still flip these bits.
    BudgetStable,
    /// Bits of a computable sequence, not of any Ω.
    Computable,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::Exact => "exact",
            Provenance::BudgetStable => "budget-stable",
            Provenance::Computable => "computable",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaBits {
    pub bits: BitString,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabError {
    ZeroLength,
    PrefixTooShort {
        needed: usize,
        available: usize,
    },
    /// `Ω_C^s = 0`: the machine outputs no string of this length.
    EmptyLevel {
        s: usize,
    },
    /// `Prob(v)` is 0 or 1.
    DegenerateDistribution {
        p: Rational,
    },
}

impl fmt::Display for LabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabError::ZeroLength => f.write_str("prefix length must be at least 1"),
            LabError::PrefixTooShort { needed, available } => {
                write!(f, "need {needed} bits but only {available} are available")
            }
            LabError::EmptyLevel { s } => write!(f, "no output of length {s} (Ω^s = 0)"),
            LabError::DegenerateDistribution { p } => {
                write!(f, "degenerate distribution: Prob = {p}")
            }
        }
    }
}

impl core::error::Error for LabError {}

/// The first `count` bits of the binary expansion of the cache's Ω lower
/// bound.
pub fn omega_bits(cache: &EnumerationCache, count: usize) -> OmegaBits {
    let omega = omega_lower_bound(cache);
    OmegaBits {
        bits: omega.expansion_bits(count).expect("halting probability lies in [0, 1]"),
        provenance: if cache.exact {
            Provenance::Exact
        } else {
            Provenance::BudgetStable
        },
    }
}

/// The longest prefix (at most `count` bits) on which the Ω expansions of
/// caches at increasing budgets all agree. Exact if the last cache is.
pub fn stable_omega_bits(caches: &[EnumerationCache], count: usize) -> OmegaBits {
    let Some(last) = caches.last() else {
        return OmegaBits {
            bits: BitString::empty(),
            provenance: Provenance::BudgetStable,
        };
    };
    let reference = omega_bits(last, count);
    if last.exact {
        return reference;
    }
    let agreed = caches
        .iter()
        .map(|c| {
            let bits = omega_bits(c, count).bits;
            bits.iter()
                .zip(reference.bits.iter())
                .take_while(|(a, b)| a == b)
                .count()
        })
        .min()
        .unwrap_or(count);
    OmegaBits {
        bits: reference.bits.prefix(agreed),
        provenance: Provenance::BudgetStable,
    }
}

/// `Δ_s = 2^{-s}`.
pub fn delta_s(s: usize) -> Dyadic {
    Dyadic::pow2_neg(s as u64)
}

/// One row of the uncertainty table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UncertaintyReport {
    pub machine: String,
    pub s: usize,
    pub omega_prefix: BitString,
    pub provenance: Provenance,
    pub delta_s: Dyadic,
    pub h: Extended<usize>,
    pub delta_c: Extended<BigUint>,
    /// `Δ_s · Δ_C`, infinite when the prefix is outside the enumerated range.
    pub product: Extended<Dyadic>,
    pub cache_exact: bool,
}

fn check_prefix(bits: &OmegaBits, s: usize) -> Result<(), LabError> {
    if s == 0 {
        return Err(LabError::ZeroLength);
    }
    if bits.bits.len() < s {
        return Err(LabError::PrefixTooShort {
            needed: s,
            available: bits.bits.len(),
        });
    }
    Ok(())
}

pub fn uncertainty_product(
    cache: &EnumerationCache,
    bits: &OmegaBits,
    s: usize,
) -> Result<UncertaintyReport, LabError> {
    Ok(uncertainty_table(cache, bits, s..=s)?.pop().expect("one row"))
}

/// Rows for every `s` in `range`.
pub fn uncertainty_table(
    cache: &EnumerationCache,
    bits: &OmegaBits,
    range: RangeInclusive<usize>,
) -> Result<Vec<UncertaintyReport>, LabError> {
    check_prefix(bits, *range.end())?;
    if *range.start() == 0 {
        return Err(LabError::ZeroLength);
    }
    let index = cache.range_index();
    Ok(range
        .map(|s| {
            let prefix = bits.bits.prefix(s);
            let record = complexity_indexed(&index, &prefix, cache.exact);
            let delta = delta_s(s);
            let product = record.h.clone().map(|h| delta.scale_pow2(h as i64));
            UncertaintyReport {
                machine: cache.machine_name.clone(),
                s,
                omega_prefix: prefix,
                provenance: bits.provenance,
                delta_s: delta,
                h: record.h,
                delta_c: record.delta,
                product,
                cache_exact: cache.exact,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EpsilonEstimate {
    /// Smallest finite product and the first `s` attaining it.
    Min { value: Dyadic, at_s: usize },
    /// Every product in range was infinite.
    NoData,
}

/// Minimum finite product over `s = 1..=s_max`.
pub fn epsilon_estimate(cache: &EnumerationCache, bits: &OmegaBits, s_max: usize) -> Result<EpsilonEstimate, LabError> {
    let rows = uncertainty_table(cache, bits, 1..=s_max)?;
    Ok(epsilon_of(&rows))
}

pub fn epsilon_of(rows: &[UncertaintyReport]) -> EpsilonEstimate {
    rows.iter()
        .filter_map(|r| r.product.finite().map(|p| (p, r.s)))
        .fold(None, |best: Option<(&Dyadic, usize)>, (p, s)| match best {
            Some((b, _)) if b <= p => best,
            _ => Some((p, s)),
        })
        .map_or(EpsilonEstimate::NoData, |(value, at_s)| EpsilonEstimate::Min {
            value: value.clone(),
            at_s,
        })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthRow {
    pub s: usize,
    pub product: Extended<Dyadic>,
    /// `product ≥ N`; an infinite product clears every threshold.
    pub clears: bool,
}

/// Whether products clear a threshold from some point on, within the range
/// explored. Says nothing about larger `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthTable {
    pub threshold: u64,
    pub rows: Vec<GrowthRow>,
    /// Least `M` in range with every row `s ≥ M` clearing the threshold.
    pub clears_from: Option<usize>,
}

impl GrowthTable {
    pub const LABEL: &'static str = "empirical within budget";
}

pub fn growth_check(
    cache: &EnumerationCache,
    bits: &OmegaBits,
    threshold: u64,
    range: RangeInclusive<usize>,
) -> Result<GrowthTable, LabError> {
    let n = Dyadic::from_integer(threshold);
    let rows: Vec<GrowthRow> = uncertainty_table(cache, bits, range)?
        .into_iter()
        .map(|r| GrowthRow {
            s: r.s,
            clears: r.product.finite().is_none_or(|p| *p >= n),
            product: r.product,
        })
        .collect();
    let tail = rows.iter().rev().take_while(|r| r.clears).count();
    let clears_from = (tail > 0).then(|| rows[rows.len() - tail].s);
    Ok(GrowthTable {
        threshold,
        rows,
        clears_from,
    })
}

/// Two indicator observables on length-`s` strings under
/// `Prob(v) = P_C(v) / Ω_C^s`, scaled so their deviations are `Δ_s` and
/// `Δ_C`.
///
/// With `p = Prob(ω₁…ω_s)`, `X = α` and `Y = β` on the prefix and 0
/// elsewhere, where `α² = Δ_s² / (p(1-p))` and `β² = Δ_C² / (p(1-p))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservablePair {
    pub s: usize,
    pub prefix: BitString,
    pub p: Rational,
    pub delta_s: Dyadic,
    pub delta_c: BigUint,
    pub alpha_sq: Rational,
    pub beta_sq: Rational,
    /// `⟨X²⟩ - ⟨X⟩²`.
    pub sigma_x_sq: Rational,
    /// `⟨Y²⟩ - ⟨Y⟩²`.
    pub sigma_y_sq: Rational,
}

/// `Prob(v) = P_C(v) / Ω_C^s` for `s = |v|`.
pub fn string_probability(cache: &EnumerationCache, v: &BitString) -> Result<Rational, LabError> {
    let level = omega_s(cache, v.len());
    rational_div(&prob_string(cache, v), &level).map_err(|_| LabError::EmptyLevel { s: v.len() })
}

fn variance(scale_sq: &Rational, p: &Rational) -> Rational {
    // ⟨Z²⟩ - ⟨Z⟩² for Z = scale on an event of probability p
    &(scale_sq * p) - &(scale_sq * &p.square())
}

pub fn observable_pair(cache: &EnumerationCache, prefix: &BitString) -> Result<ObservablePair, LabError> {
    if prefix.is_empty() {
        return Err(LabError::ZeroLength);
    }
    let p = string_probability(cache, prefix)?;
    if p.is_zero() || p.is_one() {
        return Err(LabError::DegenerateDistribution { p });
    }
    let s = prefix.len();
    let h = prefix_complexity(cache, prefix);
    let delta_s = delta_s(s);
    let delta_c = crate::bits::pow2(h);
    let spread = &p * &(&Rational::one() - &p);
    let ds = delta_s.to_rational();
    let dc = Rational::from_integer(BigInt::from(delta_c.clone()));
    let alpha_sq = ds.square().checked_div(&spread).expect("0 < p < 1");
    let beta_sq = dc.square().checked_div(&spread).expect("0 < p < 1");
    Ok(ObservablePair {
        s,
        prefix: prefix.clone(),
        sigma_x_sq: variance(&alpha_sq, &p),
        sigma_y_sq: variance(&beta_sq, &p),
        p,
        delta_s,
        delta_c,
        alpha_sq,
        beta_sq,
    })
}

fn prefix_complexity(cache: &EnumerationCache, prefix: &BitString) -> usize {
    let record = crate::enumerate::complexity(cache, prefix);
    *record.h.finite().expect("positive probability implies a witness")
}

/// Moments of the projector-valued energy `β |v⟩⟨v|`, in squared energy
/// units (`Δ_C` read as joules).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnergyExpectation {
    pub p: Rational,
    /// `⟨H⟩² = β² p²`.
    pub mean_sq: Rational,
    /// `⟨H²⟩ = β² p`.
    pub second_moment: Rational,
}

impl EnergyExpectation {
    pub const UNIT: &'static str = "J";

    pub fn variance(&self) -> Rational {
        &self.second_moment - &self.mean_sq
    }
}

pub fn energy_expectation(cache: &EnumerationCache, prefix: &BitString) -> Result<EnergyExpectation, LabError> {
    let pair = observable_pair(cache, prefix)?;
    Ok(EnergyExpectation {
        mean_sq: &pair.beta_sq * &pair.p.square(),
        second_moment: &pair.beta_sq * &pair.p,
        p: pair.p,
    })
}
