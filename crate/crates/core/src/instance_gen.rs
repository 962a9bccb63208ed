//! Synthetic instance generation and exact reconstructions of the worked
//! examples and tight constructions.
//!
//! The synthetic generator draws, per segment, a random permutation over the
//! products plus the outside option and assigns exponentiated utilities
//! `ε^position`; prices come from a configurable distribution and are
//! rescaled affinely so the smallest revenue is 1 and the largest `1/α`.
//! Everything is deterministic under a fixed seed.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, SkewNormal};
use serde::{Deserialize, Serialize};

use crate::choice::{
    ChoiceModel, ChoiceProbabilities, DomainSpec, RefinementDomain, RefinementVector,
    RevenueVector,
};
use crate::error::{Error, Result};
use crate::instance::{ChoiceModelSpec, Instance, Metadata};
use crate::lcmnl::{LcmnlModel, LogMnlSegment, MnlSegment};
use crate::raop::{solve_sacp, SacpSchedule, SacpSolution};
use crate::rcs::RcsModel;
use crate::taop::enumerate_model;

/// Price distributions used by the synthetic generator. Location and scale
/// mostly wash out in the affine rescale; the shape is what matters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriceDist {
    /// U(1, 10)
    Uniform,
    /// N(50, 10)
    Normal,
    /// Equal-weight mixture of N(30, 5) and N(70, 5): two well-separated
    /// modes.
    Multimodal,
    /// Exp(1)
    Exponential,
    /// Skew-normal with shape 100 (heavily right-skewed half-normal shape).
    SkewNormal,
}

impl PriceDist {
    pub const ALL: [PriceDist; 5] = [
        PriceDist::Uniform,
        PriceDist::Normal,
        PriceDist::Multimodal,
        PriceDist::Exponential,
        PriceDist::SkewNormal,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PriceDist::Uniform => "uniform",
            PriceDist::Normal => "normal",
            PriceDist::Multimodal => "multimodal",
            PriceDist::Exponential => "exponential",
            PriceDist::SkewNormal => "skewnormal",
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            PriceDist::Uniform => rng.random_range(1.0..10.0),
            PriceDist::Normal => Normal::new(50.0, 10.0).unwrap().sample(rng),
            PriceDist::Multimodal => {
                if rng.random_bool(0.5) {
                    Normal::new(30.0, 5.0).unwrap().sample(rng)
                } else {
                    Normal::new(70.0, 5.0).unwrap().sample(rng)
                }
            }
            PriceDist::Exponential => Exp::new(1.0).unwrap().sample(rng),
            PriceDist::SkewNormal => SkewNormal::new(0.0, 1.0, 100.0).unwrap().sample(rng),
        }
    }
}

impl std::str::FromStr for PriceDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PriceDist::ALL
            .iter()
            .find(|d| d.name() == s)
            .copied()
            .ok_or_else(|| Error::Undefined(format!("unknown price distribution {s:?}")))
    }
}

/// How prices relate to total attraction across segments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Alignment {
    /// Prices assigned independently of attractions.
    Random,
    /// Higher price goes with higher total attraction.
    Aligned,
    /// Higher price goes with lower total attraction.
    Anti,
}

impl Alignment {
    pub const ALL: [Alignment; 3] = [Alignment::Random, Alignment::Aligned, Alignment::Anti];

    pub fn name(&self) -> &'static str {
        match self {
            Alignment::Random => "random",
            Alignment::Aligned => "aligned",
            Alignment::Anti => "anti",
        }
    }
}

impl std::str::FromStr for Alignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Alignment::ALL
            .iter()
            .find(|a| a.name() == s)
            .copied()
            .ok_or_else(|| Error::Undefined(format!("unknown alignment {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n: usize,
    pub m: usize,
    /// Utility similarity parameter in (0, 1]: small values spread the
    /// within-segment attractions over many orders of magnitude.
    pub epsilon: f64,
    pub price_dist: PriceDist,
    /// Target revenue ratio `α = r_min / r_max` after rescaling.
    pub alpha_target: f64,
    pub alignment: Alignment,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::InvalidInstance(
                "need at least one product and one segment".into(),
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::InvalidInstance(format!(
                "epsilon must lie in (0, 1], got {}",
                self.epsilon
            )));
        }
        if !(self.alpha_target > 0.0 && self.alpha_target < 1.0) {
            return Err(Error::InvalidInstance(format!(
                "alpha target must lie in (0, 1), got {}",
                self.alpha_target
            )));
        }
        Ok(())
    }
}

/// Draws a latent-class MNL instance: per segment, exponentiated utilities
/// `v_ij = ε^{σ_j^{-1}(i)}` from a fresh permutation over the products and
/// the outside option; prices from `price_dist`, rescaled so the minimum
/// revenue is exactly 1 and the maximum exactly `1/α`; uniform segment
/// weights.
pub fn gen_lcmnl(config: &GeneratorConfig) -> Result<Instance> {
    config.validate()?;
    let n = config.n;
    let m = config.m;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut segments = Vec::with_capacity(m);
    for _ in 0..m {
        // Permutation over {0 = outside, 1..=n = products}.
        let mut perm: Vec<usize> = (0..=n).collect();
        perm.shuffle(&mut rng);
        let mut position = vec![0usize; n + 1];
        for (pos, &item) in perm.iter().enumerate() {
            position[item] = pos;
        }
        let v0 = config.epsilon.powi(position[0] as i32);
        let v: Vec<f64> = (1..=n)
            .map(|i| config.epsilon.powi(position[i] as i32))
            .collect();
        segments.push(MnlSegment::new(v0, v)?);
    }
    let theta = vec![1.0 / m as f64; m];

    let prices: Vec<f64> = (0..n).map(|_| config.price_dist.sample(&mut rng)).collect();
    let lo = prices.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = prices.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let top = 1.0 / config.alpha_target;
    let rescaled: Vec<f64> = if hi - lo < 1e-12 {
        vec![1.0; n]
    } else {
        prices
            .iter()
            .map(|p| 1.0 + (p - lo) * (top - 1.0) / (hi - lo))
            .collect()
    };

    let revenues = match config.alignment {
        Alignment::Random => rescaled,
        Alignment::Aligned | Alignment::Anti => {
            let totals: Vec<f64> = (0..n)
                .map(|i| {
                    theta
                        .iter()
                        .zip(&segments)
                        .map(|(t, s)| t * s.v[i])
                        .sum::<f64>()
                })
                .collect();
            let mut by_attraction: Vec<usize> = (0..n).collect();
            by_attraction.sort_by(|&a, &b| {
                totals[b].partial_cmp(&totals[a]).unwrap().then(a.cmp(&b))
            });
            let mut sorted_prices = rescaled;
            sorted_prices.sort_by(|a, b| b.partial_cmp(a).unwrap());
            if config.alignment == Alignment::Anti {
                sorted_prices.reverse();
            }
            let mut out = vec![0.0; n];
            for (rank, &product) in by_attraction.iter().enumerate() {
                out[product] = sorted_prices[rank];
            }
            out
        }
    };

    Instance::new(
        RevenueVector::new(revenues)?,
        RefinementDomain::full_interval(n),
        ChoiceModelSpec::Lcmnl(LcmnlModel::from_segments(segments, theta)?),
        Metadata {
            source: "gen-lcmnl".into(),
            seed: Some(config.seed),
            config: Some(serde_json::to_value(config)?),
        },
    )
}

/// Parameters of the tight latent-class construction: `k` active segments on
/// `n` products, geometric revenue growth `r_i = ε^{-(i-1)}`, and utility
/// magnitudes driven by `ln γ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TightConstructionParams {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub gamma: f64,
    pub eps: f64,
    pub eps1: f64,
}

/// The tight construction: instance plus the refinement that unlocks one
/// segment per product.
#[derive(Clone, Debug)]
pub struct Prop1Construction {
    pub instance: Instance,
    /// Linear-scale view of the refinement. At extreme `γ` the small levels
    /// underflow; use `refined_log_x` for evaluation.
    pub refined_x: RefinementVector,
    /// `ln x_i = min(0, (n − i(1+ε₁)) ln γ)`, exact on the log scale.
    pub refined_log_x: Vec<f64>,
}

impl Prop1Construction {
    /// Revenue of the refined construction, evaluated on the log scale.
    pub fn refined_revenue(&self) -> f64 {
        let model = self.instance.lcmnl().expect("construction is a mixture");
        model.revenue_log_refined(&self.instance.r, &self.refined_log_x)
    }
}

/// Builds the log-scale mixture whose refined optimum approaches
/// `min(m, n)` times its binary optimum as `γ, ε, ε₁ → 0`.
///
/// Utilities: `u^j_i = i(1+ε₁) ln γ + β_ij` with `β_ij = (j−i) ln γ` for
/// `j ≥ i` and `β_ij = γ^{-1} ln γ` otherwise; outside option `u_0 = 3n ln γ`.
/// Segment weights `λ_j = ε^{j-1} − ε^j` (the last active segment takes the
/// remaining mass, so the weights add to exactly 1). Parameter combinations
/// whose `γ^{-1} ln γ` magnitude leaves the representable range are
/// rejected.
pub fn prop1_instance(params: &TightConstructionParams) -> Result<Prop1Construction> {
    let TightConstructionParams {
        k,
        n,
        m,
        gamma,
        eps,
        eps1,
    } = *params;
    if k == 0 || k > n.min(m) {
        return Err(Error::InvalidInstance(format!(
            "need 1 ≤ k ≤ min(m, n), got k={k}, n={n}, m={m}"
        )));
    }
    if !(gamma > 0.0 && gamma < 1.0) || !(eps > 0.0 && eps < 1.0) || !(eps1 > 0.0 && eps1 < 1.0) {
        return Err(Error::InvalidInstance(
            "gamma, eps, eps1 must lie in (0, 1)".into(),
        ));
    }
    let ln_g = gamma.ln();
    let buried = (1.0 / gamma) * ln_g; // β for j < i
    if !buried.is_finite() || buried.abs() > 1e305 {
        return Err(Error::InvalidInstance(
            "gamma too small: γ^{-1} ln γ leaves the representable range".into(),
        ));
    }

    let log_v0 = 3.0 * n as f64 * ln_g;
    let mut segments = Vec::with_capacity(m);
    for j in 1..=m {
        let log_v: Vec<f64> = (1..=n)
            .map(|i| {
                let base = i as f64 * (1.0 + eps1) * ln_g;
                if j >= i {
                    base + (j - i) as f64 * ln_g
                } else {
                    base + buried
                }
            })
            .collect();
        segments.push(LogMnlSegment::new(log_v0, log_v)?);
    }

    let mut theta = vec![0.0; m];
    let mut partial = 0.0;
    for j in 1..k {
        let w = eps.powi(j as i32 - 1) - eps.powi(j as i32);
        theta[j - 1] = w;
        partial += w;
    }
    theta[k - 1] = 1.0 - partial;

    let inv = 1.0 / eps;
    let revenues: Vec<f64> = (1..=n).map(|i| inv.powi(i as i32 - 1)).collect();

    let refined_log_x: Vec<f64> = (1..=n)
        .map(|i| (n as f64 - i as f64 * (1.0 + eps1)) * ln_g)
        .map(|lx| lx.min(0.0))
        .collect();
    let refined_x = RefinementVector::new(refined_log_x.iter().map(|lx| lx.exp()).collect())?;

    let instance = Instance::new(
        RevenueVector::new(revenues)?,
        RefinementDomain::full_interval(n),
        ChoiceModelSpec::Lcmnl(LcmnlModel::from_log_segments(segments, theta)?),
        Metadata {
            source: "tight-construction".into(),
            seed: None,
            config: Some(serde_json::to_value(params)?),
        },
    )?;
    Ok(Prop1Construction {
        instance,
        refined_x,
        refined_log_x,
    })
}

/// The two-product consideration-set pair showing the factor-2 gap: original
/// preference (the cheap product favored) against the reversed preference.
#[derive(Clone, Debug)]
pub struct Prop2Pair {
    pub lambda: Vec<f64>,
    pub r: RevenueVector,
    /// Preference `1 ≺ 2`: the unit-revenue product is favored.
    pub original: RcsModel,
    /// Preference reversed.
    pub reversed: RcsModel,
}

/// `λ = (ε, 1)`, `r = (1/ε, 1)`, preference `1 ≺ 2` and its reversal. The
/// original order's binary optimum is 1, the reversed order's full-set
/// revenue is `2 − ε`.
pub fn prop2_instance(eps: f64) -> Result<Prop2Pair> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidInstance(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    let lambda = vec![eps, 1.0];
    let r = RevenueVector::new(vec![1.0 / eps, 1.0])?;
    let original = RcsModel::new(lambda.clone(), vec![0, 1])?;
    let reversed = original.reversed();
    Ok(Prop2Pair {
        lambda,
        r,
        original,
        reversed,
    })
}

/// Deterministic maximum-utility types: each consumer type picks the option
/// with the highest refined utility, with the outside option at utility 0.
/// Ties go to the outside option first, then to the lowest product index.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxUtilityModel {
    pub theta: Vec<f64>,
    /// `utilities[t][i]`: mean utility of product `i` for type `t`.
    pub utilities: Vec<Vec<f64>>,
}

impl MaxUtilityModel {
    fn chosen(&self, t: usize, x: &RefinementVector) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, (u, xi)) in self.utilities[t].iter().zip(x.values()).enumerate() {
            if *xi == 0.0 {
                continue;
            }
            let refined = u + xi.ln();
            if best.is_none_or(|(_, b)| refined > b) {
                best = Some((i, refined));
            }
        }
        match best {
            Some((i, u)) if u > 0.0 => Some(i),
            _ => None,
        }
    }

    /// Expected consumer surplus: the utility of each type's choice (0 when
    /// walking away).
    pub fn surplus(&self, x: &RefinementVector) -> f64 {
        self.theta
            .iter()
            .enumerate()
            .map(|(t, share)| match self.chosen(t, x) {
                Some(i) => share * (self.utilities[t][i] + x.get(i).ln()),
                None => 0.0,
            })
            .sum()
    }
}

impl ChoiceModel for MaxUtilityModel {
    fn num_products(&self) -> usize {
        self.utilities.first().map_or(0, |u| u.len())
    }

    fn choice_probabilities(&self, x: &RefinementVector) -> ChoiceProbabilities {
        let mut probs = ChoiceProbabilities::none_sold(self.num_products());
        probs.no_purchase = 0.0;
        for (t, share) in self.theta.iter().enumerate() {
            match self.chosen(t, x) {
                Some(i) => probs.products[i] += share,
                None => probs.no_purchase += share,
            }
        }
        probs
    }
}

/// The two-type, two-product worked example with the three-level menu on the
/// second product. The quoted utility vector for type 1 reads `(1,5,1.6)`
/// with only two products in play; the reading `(1.5, 1.6)` reproduces all
/// four reference numbers (revenues 1.05 and 1.75, surpluses 0.45 and
/// ≈1.414), so that is what this constructor uses.
#[derive(Clone, Debug)]
pub struct Example1 {
    pub model: MaxUtilityModel,
    pub r: RevenueVector,
    pub domain: RefinementDomain,
}

/// Numbers behind the worked example, computed rather than asserted.
#[derive(Clone, Debug)]
pub struct Example1Report {
    pub binary_optimum: f64,
    pub binary_x: RefinementVector,
    pub binary_surplus: f64,
    pub refined: SacpSolution,
    pub refined_surplus: f64,
}

impl Example1 {
    pub fn verify(&self) -> Result<Example1Report> {
        let binary = enumerate_model(&self.model, &self.r, 25, "enum")?;
        let schedule = SacpSchedule::from_domain(&self.domain)?;
        let refined = solve_sacp(&self.model, &self.r, &schedule)?;
        Ok(Example1Report {
            binary_optimum: binary.revenue,
            binary_surplus: self.model.surplus(&binary.x),
            binary_x: binary.x,
            refined_surplus: self.model.surplus(&refined.result.x),
            refined,
        })
    }
}

/// Both worked examples.
pub struct ExampleInstances {
    pub example1: Example1,
    pub example2: Instance,
}

pub fn example_instances() -> ExampleInstances {
    let example1 = Example1 {
        model: MaxUtilityModel {
            theta: vec![0.3, 0.7],
            utilities: vec![vec![1.5, 1.6], vec![-1.0, 1.6]],
        },
        r: RevenueVector::new(vec![3.5, 1.0]).unwrap(),
        domain: RefinementDomain::new(vec![
            DomainSpec::Binary,
            DomainSpec::FiniteSet(vec![0.0, 0.8, 1.0]),
        ])
        .unwrap(),
    };
    let example2 = Instance::new(
        RevenueVector::new(vec![100.0, 65.0, 58.0]).unwrap(),
        RefinementDomain::new(vec![
            DomainSpec::Binary,
            DomainSpec::FullInterval,
            DomainSpec::Binary,
        ])
        .unwrap(),
        ChoiceModelSpec::Lcmnl(
            LcmnlModel::from_segments(
                vec![
                    MnlSegment::new(1.0, vec![0.01, 100.0, 0.1]).unwrap(),
                    MnlSegment::new(1.0, vec![100.0, 1000.0, 0.1]).unwrap(),
                ],
                vec![0.5, 0.5],
            )
            .unwrap(),
        ),
        Metadata {
            source: "example2".into(),
            seed: None,
            config: None,
        },
    )
    .unwrap();
    ExampleInstances { example1, example2 }
}
