//! Shared domain types: availability domains, refinement vectors, revenue
//! vectors, refined utilities, and the evaluator interface every choice model
//! implements.
//!
//! A refinement vector `x` assigns each product an availability level in
//! `[0, 1]`. Level 1 offers the product in full, level 0 withholds it, and
//! interior levels shift its mean utility by `ln(x_i)`. All evaluators treat
//! `x_i = 0` as exact exclusion (choice probability exactly zero) rather than
//! as a large negative utility, so no underflow artifacts can leak into the
//! probabilities.

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Admissible availability levels for one product.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainSpec {
    /// Offer in full or not at all: `{0, 1}`.
    Binary,
    /// Any level in `[0, 1]`.
    FullInterval,
    /// A finite sorted menu of levels. Must contain both 0 and 1.
    FiniteSet(Vec<f64>),
}

impl DomainSpec {
    pub fn validate(&self) -> Result<()> {
        if let DomainSpec::FiniteSet(values) = self {
            if values.is_empty() {
                return Err(Error::InvalidInstance("empty finite domain".into()));
            }
            for w in values.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidInstance(
                        "finite domain values must be strictly increasing".into(),
                    ));
                }
            }
            let first = values[0];
            let last = *values.last().unwrap();
            if first != 0.0 || last != 1.0 {
                return Err(Error::InvalidInstance(
                    "finite domain must contain both 0 and 1".into(),
                ));
            }
            if values.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
                return Err(Error::InvalidInstance(
                    "finite domain values must lie in [0, 1]".into(),
                ));
            }
        }
        Ok(())
    }

    /// Membership test for a single level.
    pub fn contains(&self, x: f64) -> bool {
        match self {
            DomainSpec::Binary => x == 0.0 || x == 1.0,
            DomainSpec::FullInterval => (0.0..=1.0).contains(&x),
            DomainSpec::FiniteSet(values) => values.contains(&x),
        }
    }

    /// Nearest admissible level; ties break toward the larger value.
    pub fn project(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match self {
            DomainSpec::Binary => {
                if x < 0.5 {
                    0.0
                } else {
                    1.0
                }
            }
            DomainSpec::FullInterval => x,
            DomainSpec::FiniteSet(values) => {
                let mut best = values[0];
                let mut best_dist = (x - best).abs();
                for &v in &values[1..] {
                    let d = (x - v).abs();
                    if d < best_dist || (d == best_dist && v > best) {
                        best = v;
                        best_dist = d;
                    }
                }
                best
            }
        }
    }
}

impl Serialize for DomainSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DomainSpec::Binary => serializer.serialize_str("binary"),
            DomainSpec::FullInterval => serializer.serialize_str("interval"),
            DomainSpec::FiniteSet(values) => values.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for DomainSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct SpecVisitor;

        impl<'de> Visitor<'de> for SpecVisitor {
            type Value = DomainSpec;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("\"binary\", \"interval\", or a sorted array of levels")
            }

            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<DomainSpec, E> {
                match s {
                    "binary" => Ok(DomainSpec::Binary),
                    "interval" => Ok(DomainSpec::FullInterval),
                    other => Err(E::custom(format!("unknown domain keyword {other:?}"))),
                }
            }

            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<DomainSpec, A::Error> {
                let mut values = Vec::new();
                while let Some(v) = seq.next_element::<f64>()? {
                    values.push(v);
                }
                Ok(DomainSpec::FiniteSet(values))
            }
        }

        deserializer.deserialize_any(SpecVisitor)
    }
}

/// Per-product availability domain `Θ = Θ_1 × … × Θ_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RefinementDomain {
    pub per_product: Vec<DomainSpec>,
}

impl RefinementDomain {
    pub fn new(per_product: Vec<DomainSpec>) -> Result<Self> {
        let domain = RefinementDomain { per_product };
        domain.validate()?;
        Ok(domain)
    }

    /// Fully flexible domain `[0, 1]^n`.
    pub fn full_interval(n: usize) -> Self {
        RefinementDomain {
            per_product: vec![DomainSpec::FullInterval; n],
        }
    }

    /// Traditional binary domain `{0, 1}^n`.
    pub fn binary(n: usize) -> Self {
        RefinementDomain {
            per_product: vec![DomainSpec::Binary; n],
        }
    }

    pub fn len(&self) -> usize {
        self.per_product.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_product.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        self.per_product.iter().try_for_each(DomainSpec::validate)
    }

    /// True when every per-product domain is a finite set of levels.
    pub fn is_finite(&self) -> bool {
        self.per_product
            .iter()
            .all(|d| !matches!(d, DomainSpec::FullInterval))
    }

    pub fn contains(&self, x: &RefinementVector) -> bool {
        x.len() == self.len()
            && x.values()
                .iter()
                .zip(&self.per_product)
                .all(|(xi, d)| d.contains(*xi))
    }

    /// Componentwise projection onto the domain; ties break upward.
    pub fn project(&self, x: &RefinementVector) -> Result<RefinementVector> {
        if x.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: x.len(),
            });
        }
        let projected = x
            .values()
            .iter()
            .zip(&self.per_product)
            .map(|(xi, d)| d.project(*xi))
            .collect();
        RefinementVector::new(projected)
    }
}

/// Availability levels `x ∈ [0, 1]^n`, the decision variable of the refined
/// assortment problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RefinementVector(Vec<f64>);

impl RefinementVector {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
            return Err(Error::InvalidRefinement(
                "availability levels must lie in [0, 1]".into(),
            ));
        }
        Ok(RefinementVector(x))
    }

    pub fn ones(n: usize) -> Self {
        RefinementVector(vec![1.0; n])
    }

    pub fn zeros(n: usize) -> Self {
        RefinementVector(vec![0.0; n])
    }

    /// Binary vector from the low `n` bits of `mask` (bit `i` = product `i`).
    pub fn from_bitmask(mask: u64, n: usize) -> Self {
        RefinementVector(
            (0..n)
                .map(|i| if mask >> i & 1 == 1 { 1.0 } else { 0.0 })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// Sets coordinate `i`; the level must already be valid.
    pub fn set(&mut self, i: usize, level: f64) {
        debug_assert!((0.0..=1.0).contains(&level));
        self.0[i] = level;
    }

    pub fn is_binary(&self) -> bool {
        self.0.iter().all(|v| *v == 0.0 || *v == 1.0)
    }

    /// Indices offered in full (`x_i = 1`).
    pub fn full_support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == 1.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Per-unit profit contributions, `r_i ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RevenueVector(Vec<f64>);

impl RevenueVector {
    pub fn new(r: Vec<f64>) -> Result<Self> {
        if r.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidInstance(
                "revenues must be finite and nonnegative".into(),
            ));
        }
        Ok(RevenueVector(r))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// Product indices sorted by decreasing revenue; ties keep the original
    /// index order so revenue-ordered assortments are deterministic.
    pub fn descending_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.0.len()).collect();
        order.sort_by(|&a, &b| {
            self.0[b]
                .partial_cmp(&self.0[a])
                .unwrap()
                .then(a.cmp(&b))
        });
        order
    }

    /// Ratio `α = r_min / r_max`; `None` when the largest revenue is zero.
    pub fn alpha(&self) -> Option<f64> {
        let max = self.0.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = self.0.iter().cloned().fold(f64::INFINITY, f64::min);
        if self.0.is_empty() || max <= 0.0 {
            None
        } else {
            Some(min / max)
        }
    }

    /// Number of distinct revenue values (exact comparison).
    pub fn distinct_count(&self) -> usize {
        let mut sorted = self.0.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted.dedup();
        sorted.len()
    }
}

/// A refined mean utility: either a finite shifted utility or exact exclusion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RefinedUtility {
    Finite(f64),
    Excluded,
}

impl RefinedUtility {
    pub fn is_excluded(&self) -> bool {
        matches!(self, RefinedUtility::Excluded)
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            RefinedUtility::Finite(v) => Some(*v),
            RefinedUtility::Excluded => None,
        }
    }
}

/// Shifts mean utilities by the availability levels: `ũ_i = u_i + ln(x_i)`,
/// with `x_i = 0` mapped to the exclusion sentinel.
pub fn refine_utilities(u: &[f64], x: &RefinementVector) -> Result<Vec<RefinedUtility>> {
    if u.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: x.len(),
        });
    }
    Ok(u.iter()
        .zip(x.values())
        .map(|(ui, xi)| {
            if *xi == 0.0 {
                RefinedUtility::Excluded
            } else {
                RefinedUtility::Finite(ui + xi.ln())
            }
        })
        .collect())
}

/// Purchase probabilities for one evaluation: one entry per product plus the
/// no-purchase mass. Entries are nonnegative and sum to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChoiceProbabilities {
    pub products: Vec<f64>,
    pub no_purchase: f64,
}

impl ChoiceProbabilities {
    pub fn none_sold(n: usize) -> Self {
        ChoiceProbabilities {
            products: vec![0.0; n],
            no_purchase: 1.0,
        }
    }

    pub fn total(&self) -> f64 {
        self.products.iter().sum::<f64>() + self.no_purchase
    }

    /// Probability that anything sells.
    pub fn sell_probability(&self) -> f64 {
        self.products.iter().sum()
    }

    pub fn expected_revenue(&self, r: &RevenueVector) -> f64 {
        debug_assert_eq!(self.products.len(), r.len());
        self.products
            .iter()
            .zip(r.values())
            .map(|(p, ri)| p * ri)
            .sum()
    }
}

/// Evaluator interface: maps an availability vector to purchase
/// probabilities. Implementations are pure and safe to share across threads.
pub trait ChoiceModel {
    fn num_products(&self) -> usize;

    fn choice_probabilities(&self, x: &RefinementVector) -> ChoiceProbabilities;

    fn revenue(&self, r: &RevenueVector, x: &RefinementVector) -> f64 {
        self.choice_probabilities(x).expected_revenue(r)
    }
}

/// Outcome of one solver run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveResult {
    pub x: RefinementVector,
    pub revenue: f64,
    pub probabilities: ChoiceProbabilities,
    pub solver: String,
    /// Wall time in seconds.
    pub elapsed: f64,
}

impl SolveResult {
    pub(crate) fn evaluated<M: ChoiceModel + ?Sized>(
        model: &M,
        r: &RevenueVector,
        x: RefinementVector,
        solver: &str,
        elapsed: f64,
    ) -> Self {
        let probabilities = model.choice_probabilities(&x);
        let revenue = probabilities.expected_revenue(r);
        SolveResult {
            x,
            revenue,
            probabilities,
            solver: solver.to_string(),
            elapsed,
        }
    }
}
