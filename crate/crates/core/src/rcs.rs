//! Random consideration set model: fixed preference order, independent
//! attention probabilities, plus the best/worst-ordering revenue recursions
//! behind the factor-2 comparison of refined versus traditional assortments.
//!
//! Fractional availability scales attention multiplicatively: offering
//! product `i` at level `x_i` gives it effective attention `λ_i x_i` while
//! the preference order stays fixed. At binary levels this reduces exactly to
//! the classic subset formula `q_i(S) = λ_i Π_{j ≻ i, j ∈ S} (1 − λ_j)`.

use serde::{Deserialize, Serialize};

use crate::choice::{ChoiceModel, ChoiceProbabilities, RefinementVector, RevenueVector, SolveResult};
use crate::error::{Error, Result};

/// Attention probabilities plus a preference permutation. In `pref`, later
/// position means more preferred; `pref[n-1]` is the favorite product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RcsParams", into = "RcsParams")]
pub struct RcsModel {
    lambda: Vec<f64>,
    pref: Vec<usize>,
    /// rank[i] = position of product i in `pref`.
    #[serde(skip)]
    rank: Vec<usize>,
}

/// Wire format: `{lambda, pref}`, products 0-based, later index in `pref`
/// means more preferred.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RcsParams {
    pub lambda: Vec<f64>,
    pub pref: Vec<usize>,
}

impl TryFrom<RcsParams> for RcsModel {
    type Error = Error;

    fn try_from(p: RcsParams) -> Result<Self> {
        RcsModel::new(p.lambda, p.pref)
    }
}

impl From<RcsModel> for RcsParams {
    fn from(m: RcsModel) -> RcsParams {
        RcsParams {
            lambda: m.lambda,
            pref: m.pref,
        }
    }
}

impl RcsModel {
    /// Validates `λ_i ∈ (0, 1]` and that `pref` is a permutation. Zero
    /// attention is rejected: such a product never sells and the ratio
    /// bounds assume positive attention.
    pub fn new(lambda: Vec<f64>, pref: Vec<usize>) -> Result<Self> {
        let n = lambda.len();
        if lambda.iter().any(|l| !l.is_finite() || *l <= 0.0 || *l > 1.0) {
            return Err(Error::InvalidInstance(
                "attention probabilities must lie in (0, 1]".into(),
            ));
        }
        if pref.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: pref.len(),
            });
        }
        let mut rank = vec![usize::MAX; n];
        for (pos, &product) in pref.iter().enumerate() {
            if product >= n || rank[product] != usize::MAX {
                return Err(Error::InvalidInstance(
                    "pref must be a permutation of the products".into(),
                ));
            }
            rank[product] = pos;
        }
        Ok(RcsModel { lambda, pref, rank })
    }

    /// Preference aligned with the product index: product `n-1` favorite.
    pub fn increasing_preference(lambda: Vec<f64>) -> Result<Self> {
        let n = lambda.len();
        RcsModel::new(lambda, (0..n).collect())
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn pref(&self) -> &[usize] {
        &self.pref
    }

    /// Same attention probabilities with the preference order reversed.
    pub fn reversed(&self) -> RcsModel {
        let mut pref = self.pref.clone();
        pref.reverse();
        RcsModel::new(self.lambda.clone(), pref).unwrap()
    }
}

impl ChoiceModel for RcsModel {
    fn num_products(&self) -> usize {
        self.lambda.len()
    }

    fn choice_probabilities(&self, x: &RefinementVector) -> ChoiceProbabilities {
        debug_assert_eq!(x.len(), self.lambda.len());
        let n = self.lambda.len();
        let mut products = vec![0.0; n];
        // Walk from most to least preferred, carrying the probability that
        // nothing better was considered.
        let mut carry = 1.0;
        for &product in self.pref.iter().rev() {
            let attention = self.lambda[product] * x.get(product);
            products[product] = attention * carry;
            carry *= 1.0 - attention;
        }
        ChoiceProbabilities {
            products,
            no_purchase: carry,
        }
    }
}

/// Subset choice probabilities `q_i(S) = λ_i Π_{j ≻ i, j ∈ S} (1 − λ_j)`.
pub fn rcs_choice_probabilities(model: &RcsModel, subset: &[usize]) -> ChoiceProbabilities {
    let n = model.lambda.len();
    let mut x = RefinementVector::zeros(n);
    for &i in subset {
        debug_assert!(i < n);
        x.set(i, 1.0);
    }
    model.choice_probabilities(&x)
}

/// Trace of the best-ordering recursion `H_k = H_{k-1} + λ_k (r_k − H_{k-1})`
/// for products sorted by non-decreasing revenue, preference aligned with
/// revenue. `literal` follows that recursion exactly; `clamped` applies a
/// positive-part to the increment. For valid (non-decreasing) input the two
/// coincide, since `H_{k-1} ≤ r_{k-1} ≤ r_k`; both are reported so any
/// divergence would be visible rather than silently reconciled.
#[derive(Clone, Debug, PartialEq)]
pub struct BestOrderTrace {
    pub literal: Vec<f64>,
    pub clamped: Vec<f64>,
}

impl BestOrderTrace {
    /// `H_n` by the literal recursion.
    pub fn value(&self) -> f64 {
        *self.literal.last().unwrap()
    }

    pub fn clamped_value(&self) -> f64 {
        *self.clamped.last().unwrap()
    }
}

fn check_recursion_input(lambda: &[f64], r: &[f64]) -> Result<()> {
    if lambda.len() != r.len() {
        return Err(Error::DimensionMismatch {
            expected: lambda.len(),
            got: r.len(),
        });
    }
    if lambda.is_empty() {
        return Err(Error::InvalidInstance("empty instance".into()));
    }
    if lambda.iter().any(|l| *l <= 0.0 || *l > 1.0) {
        return Err(Error::InvalidInstance(
            "attention probabilities must lie in (0, 1]".into(),
        ));
    }
    if r.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidInstance(
            "revenues must be non-decreasing".into(),
        ));
    }
    Ok(())
}

/// Optimal expected revenue when preference increases with revenue
/// (`1 ≺ 2 ≺ … ≺ n`, revenues non-decreasing): the full assortment is
/// optimal and its value is `H_n`. Returns the whole trace `H_0..H_n`.
pub fn best_order_revenue(lambda: &[f64], r: &[f64]) -> Result<BestOrderTrace> {
    check_recursion_input(lambda, r)?;
    let mut literal = Vec::with_capacity(r.len() + 1);
    let mut clamped = Vec::with_capacity(r.len() + 1);
    literal.push(0.0);
    clamped.push(0.0);
    for (l, rk) in lambda.iter().zip(r) {
        let h = literal.last().unwrap();
        literal.push(h + l * (rk - h));
        let hc = clamped.last().unwrap();
        clamped.push(hc + l * (rk - hc).max(0.0));
    }
    Ok(BestOrderTrace { literal, clamped })
}

/// Optimal expected revenue when preference decreases with revenue: the
/// recursion `G_k = G_{k-1} + λ_{n+1−k} (r_{n+1−k} − G_{k-1})⁺` walks from
/// the most preferred (lowest revenue) down, skipping products that would
/// dilute the revenue already secured. Returns the trace `G_0..G_n`.
pub fn worst_order_revenue(lambda: &[f64], r: &[f64]) -> Result<Vec<f64>> {
    check_recursion_input(lambda, r)?;
    let n = r.len();
    let mut trace = Vec::with_capacity(n + 1);
    trace.push(0.0);
    for k in 1..=n {
        let g = *trace.last().unwrap();
        let idx = n - k;
        trace.push(g + lambda[idx] * (r[idx] - g).max(0.0));
    }
    Ok(trace)
}

/// The auxiliary sequences from the factor-2 argument:
/// `f(1) = 0`, `f(k) = (1 − λ_k)(λ_{k-1} + f(k-1))`, and the shifted
/// `f̂(1) = 0`, `f̂(k) = (1 − λ_{k+1})(λ_k + f̂(k-1))`.
///
/// Returns `(f, f̂)` with `f[k-1] = f(k)` for `k = 1..=n` and
/// `f̂[k-1] = f̂(k)` for `k = 1..n` (the shifted sequence needs `λ_{k+1}`,
/// so it stops one short).
pub fn f_sequences(lambda: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = lambda.len();
    let mut f = Vec::with_capacity(n);
    if n == 0 {
        return (f, Vec::new());
    }
    f.push(0.0);
    for k in 2..=n {
        let prev = f[k - 2];
        f.push((1.0 - lambda[k - 1]) * (lambda[k - 2] + prev));
    }
    let mut fhat = Vec::with_capacity(n.saturating_sub(1));
    if n >= 2 {
        fhat.push(0.0);
        for k in 2..n {
            let prev = fhat[k - 2];
            fhat.push((1.0 - lambda[k]) * (lambda[k - 1] + prev));
        }
    }
    (f, fhat)
}

/// Exact traditional assortment optimum by subset enumeration under the
/// model's fixed preference order.
pub fn rcs_optimal_assortment(model: &RcsModel, r: &RevenueVector) -> Result<SolveResult> {
    crate::taop::enumerate_model(model, r, crate::taop::ENUM_LIMIT, "rcs-enum")
}
