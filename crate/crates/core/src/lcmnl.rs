//! Multinomial-logit and latent-class MNL evaluation.
//!
//! Attractions `v_i = e^{u_i}` are the canonical parameterization. Models can
//! be ingested either on the linear scale (attraction values) or on the log
//! scale (mean utilities); the log scale is what makes the tight-construction
//! instances representable at all, since their attraction ratios span many
//! hundreds of orders of magnitude.
//!
//! Evaluation has two code paths that agree wherever both are computable:
//! a closed-form linear path and a log-sum-exp path. The log path engages
//! automatically once any log attraction exceeds [`LOGSPACE_THRESHOLD`] in
//! magnitude.

use serde::{Deserialize, Serialize};

use crate::choice::{ChoiceModel, ChoiceProbabilities, RefinementVector, RevenueVector};
use crate::error::{Error, Result};

/// Beyond this magnitude of a log attraction, the closed form is at risk of
/// overflow/underflow and evaluation switches to log-sum-exp.
pub const LOGSPACE_THRESHOLD: f64 = 500.0;

/// One MNL segment on the linear attraction scale.
#[derive(Clone, Debug, PartialEq)]
pub struct MnlSegment {
    /// Attraction of the outside option.
    pub v0: f64,
    /// Product attractions `v_i = e^{u_i}`.
    pub v: Vec<f64>,
}

impl MnlSegment {
    pub fn new(v0: f64, v: Vec<f64>) -> Result<Self> {
        if !(v0.is_finite() && v0 > 0.0) {
            return Err(Error::InvalidInstance(
                "outside-option attraction must be positive".into(),
            ));
        }
        if v.iter().any(|vi| !vi.is_finite() || *vi <= 0.0) {
            return Err(Error::InvalidInstance(
                "attractions must be positive and finite".into(),
            ));
        }
        Ok(MnlSegment { v0, v })
    }

    pub fn to_log(&self) -> LogMnlSegment {
        LogMnlSegment {
            log_v0: self.v0.ln(),
            log_v: self.v.iter().map(|v| v.ln()).collect(),
        }
    }
}

/// One MNL segment on the natural-log scale.
#[derive(Clone, Debug, PartialEq)]
pub struct LogMnlSegment {
    pub log_v0: f64,
    pub log_v: Vec<f64>,
}

impl LogMnlSegment {
    pub fn new(log_v0: f64, log_v: Vec<f64>) -> Result<Self> {
        if !log_v0.is_finite() || log_v.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInstance(
                "log attractions must be finite".into(),
            ));
        }
        Ok(LogMnlSegment { log_v0, log_v })
    }

    /// Choice probabilities with the refinement supplied on the log scale:
    /// `log_x[i] = ln(x_i)`, with `-inf` meaning excluded. This is the one
    /// entry point that stays exact when the levels themselves underflow the
    /// linear scale.
    pub fn probabilities_log_refined(&self, log_x: &[f64]) -> ChoiceProbabilities {
        debug_assert_eq!(log_x.len(), self.log_v.len());
        let n = self.log_v.len();
        let mut terms = Vec::with_capacity(n + 1);
        terms.push(self.log_v0);
        let mut max = self.log_v0;
        for (lv, lx) in self.log_v.iter().zip(log_x) {
            let t = if *lx == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                lv + lx
            };
            if t > max {
                max = t;
            }
            terms.push(t);
        }
        let mut total = 0.0;
        let exps: Vec<f64> = terms
            .iter()
            .map(|t| {
                let e = if *t == f64::NEG_INFINITY {
                    0.0
                } else {
                    (t - max).exp()
                };
                total += e;
                e
            })
            .collect();
        ChoiceProbabilities {
            products: exps[1..].iter().map(|e| e / total).collect(),
            no_purchase: exps[0] / total,
        }
    }
}

impl ChoiceModel for MnlSegment {
    fn num_products(&self) -> usize {
        self.v.len()
    }

    fn choice_probabilities(&self, x: &RefinementVector) -> ChoiceProbabilities {
        mnl_probabilities(self, x)
    }
}

impl ChoiceModel for LogMnlSegment {
    fn num_products(&self) -> usize {
        self.log_v.len()
    }

    fn choice_probabilities(&self, x: &RefinementVector) -> ChoiceProbabilities {
        let log_x: Vec<f64> = x.values().iter().map(|xi| xi.ln()).collect();
        self.probabilities_log_refined(&log_x)
    }
}

/// Closed-form MNL probabilities: `p_i = v_i x_i / (v_0 + Σ_k v_k x_k)`.
pub fn mnl_probabilities(seg: &MnlSegment, x: &RefinementVector) -> ChoiceProbabilities {
    debug_assert_eq!(x.len(), seg.v.len());
    let denom = seg.v0
        + seg
            .v
            .iter()
            .zip(x.values())
            .map(|(v, xi)| v * xi)
            .sum::<f64>();
    ChoiceProbabilities {
        products: seg
            .v
            .iter()
            .zip(x.values())
            .map(|(v, xi)| v * xi / denom)
            .collect(),
        no_purchase: seg.v0 / denom,
    }
}

/// Gradient of the segment revenue with respect to the attractions at a
/// binary assortment: `∂R/∂v_i = p_i(v, x) [r_i − R(v, x)] / v_i` for
/// offered products, zero for excluded ones. Multiplying component `i` by
/// `v_i` gives the mean-utility derivative `p_i [r_i − R]`, whose sign is
/// what makes the optimal MNL revenue monotone in the utilities: at an
/// optimal assortment `r_i ≥ R` for every offered product.
pub fn mnl_revenue_gradient_v(seg: &MnlSegment, r: &RevenueVector, x: &RefinementVector) -> Vec<f64> {
    debug_assert!(x.is_binary(), "gradient is defined at binary assortments");
    let probs = mnl_probabilities(seg, x);
    let revenue = probs.expected_revenue(r);
    probs
        .products
        .iter()
        .zip(x.values())
        .zip(r.values().iter().zip(&seg.v))
        .map(|((p, xi), (ri, vi))| {
            if *xi == 1.0 {
                p * (ri - revenue) / vi
            } else {
                0.0
            }
        })
        .collect()
}

/// Attraction scale of a serialized model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

/// Latent-class MNL: a finite mixture of MNL segments with weights `θ_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LcmnlParams", into = "LcmnlParams")]
pub struct LcmnlModel {
    scale: Scale,
    theta: Vec<f64>,
    /// Present whenever every log attraction is within the linear-safe range.
    linear: Option<Vec<MnlSegment>>,
    log: Vec<LogMnlSegment>,
}

/// Wire format: `{v0, v, theta, scale}` with `v` an `m × n` matrix in the
/// given scale.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LcmnlParams {
    pub v0: Vec<f64>,
    pub v: Vec<Vec<f64>>,
    pub theta: Vec<f64>,
    pub scale: Scale,
}

impl TryFrom<LcmnlParams> for LcmnlModel {
    type Error = Error;

    fn try_from(p: LcmnlParams) -> Result<Self> {
        match p.scale {
            Scale::Linear => {
                let segments = p
                    .v0
                    .iter()
                    .zip(p.v)
                    .map(|(v0, v)| MnlSegment::new(*v0, v))
                    .collect::<Result<Vec<_>>>()?;
                LcmnlModel::from_segments(segments, p.theta)
            }
            Scale::Log => {
                let segments = p
                    .v0
                    .iter()
                    .zip(p.v)
                    .map(|(v0, v)| LogMnlSegment::new(*v0, v))
                    .collect::<Result<Vec<_>>>()?;
                LcmnlModel::from_log_segments(segments, p.theta)
            }
        }
    }
}

impl From<LcmnlModel> for LcmnlParams {
    fn from(m: LcmnlModel) -> LcmnlParams {
        match (&m.scale, &m.linear) {
            (Scale::Linear, Some(segments)) => LcmnlParams {
                v0: segments.iter().map(|s| s.v0).collect(),
                v: segments.iter().map(|s| s.v.clone()).collect(),
                theta: m.theta,
                scale: Scale::Linear,
            },
            _ => LcmnlParams {
                v0: m.log.iter().map(|s| s.log_v0).collect(),
                v: m.log.iter().map(|s| s.log_v.clone()).collect(),
                theta: m.theta,
                scale: Scale::Log,
            },
        }
    }
}

fn validate_theta(theta: &[f64]) -> Result<()> {
    if theta.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidInstance(
            "segment weights must be nonnegative".into(),
        ));
    }
    let total: f64 = theta.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInstance(format!(
            "segment weights must sum to 1, got {total}"
        )));
    }
    Ok(())
}

impl LcmnlModel {
    /// Builds a model from linear-scale segments.
    pub fn from_segments(segments: Vec<MnlSegment>, theta: Vec<f64>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidInstance("at least one segment".into()));
        }
        if segments.len() != theta.len() {
            return Err(Error::DimensionMismatch {
                expected: segments.len(),
                got: theta.len(),
            });
        }
        let n = segments[0].v.len();
        if segments.iter().any(|s| s.v.len() != n) {
            return Err(Error::InvalidInstance(
                "all segments must cover the same products".into(),
            ));
        }
        validate_theta(&theta)?;
        let log: Vec<LogMnlSegment> = segments.iter().map(MnlSegment::to_log).collect();
        let safe = log_range_is_safe(&log);
        Ok(LcmnlModel {
            scale: Scale::Linear,
            theta,
            linear: safe.then_some(segments),
            log,
        })
    }

    /// Builds a model from log-scale segments (mean utilities).
    pub fn from_log_segments(log: Vec<LogMnlSegment>, theta: Vec<f64>) -> Result<Self> {
        if log.is_empty() {
            return Err(Error::InvalidInstance("at least one segment".into()));
        }
        if log.len() != theta.len() {
            return Err(Error::DimensionMismatch {
                expected: log.len(),
                got: theta.len(),
            });
        }
        let n = log[0].log_v.len();
        if log.iter().any(|s| s.log_v.len() != n) {
            return Err(Error::InvalidInstance(
                "all segments must cover the same products".into(),
            ));
        }
        validate_theta(&theta)?;
        let linear = log_range_is_safe(&log).then(|| {
            log.iter()
                .map(|s| MnlSegment {
                    v0: s.log_v0.exp(),
                    v: s.log_v.iter().map(|v| v.exp()).collect(),
                })
                .collect()
        });
        Ok(LcmnlModel {
            scale: Scale::Log,
            theta,
            linear,
            log,
        })
    }

    /// Single-segment MNL.
    pub fn single(segment: MnlSegment) -> Result<Self> {
        LcmnlModel::from_segments(vec![segment], vec![1.0])
    }

    pub fn num_segments(&self) -> usize {
        self.log.len()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn log_segments(&self) -> &[LogMnlSegment] {
        &self.log
    }

    /// Linear-scale segments when the whole model fits the linear range.
    pub fn linear_segments(&self) -> Option<&[MnlSegment]> {
        self.linear.as_deref()
    }

    /// True when evaluation must go through log-sum-exp.
    pub fn needs_logspace(&self) -> bool {
        self.linear.is_none()
    }

    /// Mixture revenue with the refinement supplied on the log scale.
    pub fn revenue_log_refined(&self, r: &RevenueVector, log_x: &[f64]) -> f64 {
        self.theta
            .iter()
            .zip(&self.log)
            .filter(|(t, _)| **t > 0.0)
            .map(|(t, seg)| t * seg.probabilities_log_refined(log_x).expected_revenue(r))
            .sum()
    }
}

fn log_range_is_safe(log: &[LogMnlSegment]) -> bool {
    log.iter().all(|s| {
        s.log_v0.abs() <= LOGSPACE_THRESHOLD
            && s.log_v.iter().all(|v| v.abs() <= LOGSPACE_THRESHOLD)
    })
}

impl ChoiceModel for LcmnlModel {
    fn num_products(&self) -> usize {
        self.log[0].log_v.len()
    }

    fn choice_probabilities(&self, x: &RefinementVector) -> ChoiceProbabilities {
        let n = self.num_products();
        let mut products = vec![0.0; n];
        let mut no_purchase = 0.0;
        match &self.linear {
            Some(segments) => {
                for (t, seg) in self.theta.iter().zip(segments) {
                    if *t == 0.0 {
                        continue;
                    }
                    let p = mnl_probabilities(seg, x);
                    for (acc, pi) in products.iter_mut().zip(&p.products) {
                        *acc += t * pi;
                    }
                    no_purchase += t * p.no_purchase;
                }
            }
            None => {
                let log_x: Vec<f64> = x.values().iter().map(|xi| xi.ln()).collect();
                for (t, seg) in self.theta.iter().zip(&self.log) {
                    if *t == 0.0 {
                        continue;
                    }
                    let p = seg.probabilities_log_refined(&log_x);
                    for (acc, pi) in products.iter_mut().zip(&p.products) {
                        *acc += t * pi;
                    }
                    no_purchase += t * p.no_purchase;
                }
            }
        }
        ChoiceProbabilities {
            products,
            no_purchase,
        }
    }
}

/// Mixture revenue `R(x) = Σ_j θ_j R_j(x)`. Selects the evaluation path
/// automatically.
pub fn lcmnl_revenue(model: &LcmnlModel, r: &RevenueVector, x: &RefinementVector) -> f64 {
    model.revenue(r, x)
}

/// Mixture revenue through the log-sum-exp path regardless of scale.
pub fn lcmnl_revenue_logspace(model: &LcmnlModel, r: &RevenueVector, x: &RefinementVector) -> f64 {
    let log_x: Vec<f64> = x.values().iter().map(|xi| xi.ln()).collect();
    model.revenue_log_refined(r, &log_x)
}
