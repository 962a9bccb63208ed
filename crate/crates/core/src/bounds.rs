//! Upper bounds on the refined optimum: the revenue-ordered guarantee
//! `ω_n = n − (n−1)α^{1/(n−1)}`, the sell-through ratio bound
//! `η = 1 + ln(Q_n/Q_1)`, the personalized per-segment bound, and a linear
//! relaxation of the mixture revenue.
//!
//! The LP ships in two variants. `Corrected` uses the McCormick envelope of
//! `z_ij = x_i y_j` over the valid `y_j` range and is a provably valid upper
//! bound. `Printed` keeps an alternative constraint system that collapses to
//! zero already on a one-product instance; it is retained for side-by-side
//! comparison, not as a usable bound.

use serde::Serialize;

use crate::choice::{RefinementVector, RevenueVector};
use crate::error::{Error, Result};
use crate::instance::{ChoiceModelSpec, Instance};
use crate::lcmnl::{lcmnl_revenue, LcmnlModel};
use crate::simplex::{solve_lp, Constraint, LinearProgram, LpStatus, Sense};
use crate::taop::{self, log_segment_optimum};

/// The revenue-ordered performance factor `ω_n = n − (n−1) α^{1/(n−1)}`,
/// with `α = r_n / r_1 ∈ (0, 1]`. Equals 1 at `n = 1` and grows to
/// `1 − ln(α)` as `n → ∞`.
pub fn omega(n: usize, alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidRatio(alpha));
    }
    if n <= 1 {
        return Ok(1.0);
    }
    let k = (n - 1) as f64;
    Ok(n as f64 - k * alpha.powf(1.0 / k))
}

/// ω evaluated for a concrete revenue vector, using the count of *distinct*
/// revenue values (the factor tightens to `ω_k` when only `k` values occur).
/// Zero maximum revenue degenerates to factor 1.
pub fn omega_for_revenues(r: &RevenueVector) -> Result<f64> {
    match r.alpha() {
        None => Ok(1.0),
        Some(alpha) => omega(r.distinct_count(), alpha),
    }
}

/// `η = 1 + ln(q_n / q_1)` where `q_1` is the probability the top-revenue
/// product sells and `q_n` the probability anything sells.
pub fn eta(q1: f64, qn: f64) -> Result<f64> {
    if q1 <= 0.0 {
        return Err(Error::Undefined(
            "top product never sells; η has no value".into(),
        ));
    }
    if !(q1.is_finite() && qn.is_finite()) || q1 > qn || qn > 1.0 {
        return Err(Error::Undefined(format!(
            "need 0 < q1 ≤ qn ≤ 1, got q1={q1}, qn={qn}"
        )));
    }
    Ok(1.0 + (qn / q1).ln())
}

/// The personalized bound `Σ_j θ_j R*_j`: each segment solved to optimality
/// on its own. For the MNL mixture this is exactly the personalized refined
/// optimum, because each segment's refined and binary optima coincide.
pub fn praop_upper(model: &LcmnlModel, r: &RevenueVector) -> f64 {
    model
        .theta()
        .iter()
        .zip(model.log_segments())
        .filter(|(t, _)| **t > 0.0)
        .map(|(t, seg)| t * log_segment_optimum(seg, r).revenue)
        .sum()
}

/// η evaluated at the per-segment optima (the personalized optimum for the
/// MNL mixture). Returns `(η, q1, qn)`; `None` when the top product never
/// sells there.
pub fn eta_for_lcmnl(model: &LcmnlModel, r: &RevenueVector) -> Option<(f64, f64, f64)> {
    let top = *r.descending_order().first()?;
    let mut q1 = 0.0;
    let mut qn = 0.0;
    for (t, seg) in model.theta().iter().zip(model.log_segments()) {
        if *t == 0.0 {
            continue;
        }
        let best = log_segment_optimum(seg, r);
        q1 += t * best.probabilities.products[top];
        qn += t * best.probabilities.sell_probability();
    }
    eta(q1, qn.min(1.0)).ok().map(|e| (e, q1, qn))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpVariant {
    /// Constraint system as printed in the source formulation.
    Printed,
    /// McCormick envelope of `z_ij = x_i y_j` with
    /// `y_j ∈ [1/(v0_j + Σ_i v_ij), 1/v0_j]`.
    Corrected,
}

impl std::str::FromStr for LpVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printed" => Ok(LpVariant::Printed),
            "corrected" => Ok(LpVariant::Corrected),
            other => Err(Error::Undefined(format!("unknown LP variant {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LpUpperResult {
    pub status: String,
    pub bound: Option<f64>,
    /// True when the solution satisfied `z_ij = x_i y_j` within 1e-7, i.e.
    /// the relaxation solved the original problem.
    pub exact_extraction: bool,
    pub x: Option<RefinementVector>,
    /// Revenue of the extracted availability vector, reported when the
    /// extraction is exact.
    pub extracted_revenue: Option<f64>,
}

/// Linear-programming upper bound on the refined mixture optimum. Requires
/// the attractions on the linear scale.
///
/// Internally the program is posed over sale masses rather than the raw
/// `(y_j, z_ij)` pair: with `p0_j := v0_j y_j` (no-purchase mass) and
/// `q_ij := v_ij z_ij` (sale mass of product `i` in segment `j`), every
/// variable lives in `[0, 1]` and the normalization row reads
/// `p0_j + Σ_i q_ij = 1`. That is the same program under an exact change of
/// variables; the raw `y`/`z` ranges span `1/v0`, which can run to 1e8 on
/// wide-attraction instances and lets materially suboptimal vertices pass a
/// fixed reduced-cost tolerance.
pub fn lp_upper(model: &LcmnlModel, r: &RevenueVector, variant: LpVariant) -> Result<LpUpperResult> {
    let program = lp_program(model, r, variant)?;
    let solution = solve_lp(&program)?;
    interpret_lp_solution(model, r, solution)
}

/// Variable layout of the relaxation: `x` first, then the per-segment
/// no-purchase masses, then the sale masses.
fn x_var(i: usize) -> usize {
    i
}
fn p0_var(n: usize, j: usize) -> usize {
    n + j
}
fn q_var(n: usize, m: usize, i: usize, j: usize) -> usize {
    n + m + i * m + j
}

/// Builds the relaxation as a dense program (exposed so the suite can feed
/// the identical program to an independent solver).
pub fn lp_program(model: &LcmnlModel, r: &RevenueVector, variant: LpVariant) -> Result<LinearProgram> {
    let segments = model.linear_segments().ok_or_else(|| {
        Error::InvalidInstance(
            "LP bound needs linear-scale attractions; this model only evaluates in log space"
                .into(),
        )
    })?;
    let n = r.len();
    let m = segments.len();
    let theta = model.theta();
    let num_vars = n + m + n * m;

    let mut objective = vec![0.0; num_vars];
    for j in 0..m {
        for i in 0..n {
            objective[q_var(n, m, i, j)] = theta[j] * r.get(i);
        }
    }

    let mut bounds = vec![(0.0, f64::INFINITY); num_vars];
    for i in 0..n {
        bounds[x_var(i)] = (0.0, 1.0);
    }
    for (j, seg) in segments.iter().enumerate() {
        bounds[p0_var(n, j)] = match variant {
            // y_j ∈ [1/(v0+Σv), 1/v0] scaled by v0.
            LpVariant::Corrected => (seg.v0 / (seg.v0 + seg.v.iter().sum::<f64>()), 1.0),
            // The printed system only asks y ≥ 0.
            LpVariant::Printed => (0.0, f64::INFINITY),
        };
    }

    let mut constraints = Vec::new();
    // Normalizations: p0_j + Σ_i q_ij = 1.
    for j in 0..m {
        let mut coeffs = vec![0.0; num_vars];
        coeffs[p0_var(n, j)] = 1.0;
        for i in 0..n {
            coeffs[q_var(n, m, i, j)] = 1.0;
        }
        constraints.push(Constraint {
            coeffs,
            sense: Sense::Eq,
            rhs: 1.0,
        });
    }

    for (j, seg) in segments.iter().enumerate() {
        let total = seg.v0 + seg.v.iter().sum::<f64>();
        for i in 0..n {
            let v = seg.v[i];
            // v0/v turns a z-row into a q-row; sale_share = v·y_lo.
            let k = seg.v0 / v;
            let sale_share = v / total;
            let p0_floor = seg.v0 / total;
            let mut row = |x_c: f64, p0_c: f64, q_c: f64, sense: Sense, rhs: f64| {
                let mut coeffs = vec![0.0; num_vars];
                coeffs[x_var(i)] = x_c;
                coeffs[p0_var(n, j)] = p0_c;
                coeffs[q_var(n, m, i, j)] = q_c;
                constraints.push(Constraint { coeffs, sense, rhs });
            };
            match variant {
                LpVariant::Printed => {
                    // Verbatim system in (x, y, z), rewritten over the
                    // masses: z ≥ x, z ≤ x/v0, z ≤ x + y − 1,
                    // z ≥ (x − 1)/v0 + y.
                    row(-v, 0.0, 1.0, Sense::Ge, 0.0);
                    row(-1.0, 0.0, k, Sense::Le, 0.0);
                    row(-seg.v0, -1.0, k, Sense::Le, -seg.v0);
                    row(-1.0, -1.0, k, Sense::Ge, -1.0);
                }
                LpVariant::Corrected => {
                    // McCormick envelope of z = x·y over
                    // y ∈ [1/(v0+Σv), 1/v0]:
                    // z ≥ y_lo x, z ≥ y + y_hi x − y_hi,
                    // z ≤ y + y_lo x − y_lo, z ≤ y_hi x.
                    row(-sale_share, 0.0, 1.0, Sense::Ge, 0.0);
                    row(-1.0, -1.0, k, Sense::Ge, -1.0);
                    row(-p0_floor, -1.0, k, Sense::Le, -p0_floor);
                    row(-1.0, 0.0, k, Sense::Le, 0.0);
                }
            }
        }
    }

    Ok(LinearProgram {
        objective,
        constraints,
        bounds,
    })
}

fn interpret_lp_solution(
    model: &LcmnlModel,
    r: &RevenueVector,
    solution: crate::simplex::LpSolution,
) -> Result<LpUpperResult> {
    let segments = model.linear_segments().expect("checked by lp_program");
    let n = r.len();
    let m = segments.len();
    match solution.status {
        LpStatus::Optimal => {
            let xs: Vec<f64> = (0..n)
                .map(|i| solution.primal[x_var(i)].clamp(0.0, 1.0))
                .collect();
            // Recover (y, z) and check whether the bilinear identity held.
            let mut max_gap = 0.0f64;
            for (j, seg) in segments.iter().enumerate() {
                let y = solution.primal[p0_var(n, j)] / seg.v0;
                for (i, xi) in xs.iter().enumerate() {
                    let z = solution.primal[q_var(n, m, i, j)] / seg.v[i];
                    max_gap = max_gap.max((z - xi * y).abs());
                }
            }
            let exact = max_gap <= 1e-7;
            let x = RefinementVector::new(xs)?;
            let extracted_revenue = exact.then(|| lcmnl_revenue(model, r, &x));
            Ok(LpUpperResult {
                status: "optimal".into(),
                bound: Some(solution.objective),
                exact_extraction: exact,
                x: Some(x),
                extracted_revenue,
            })
        }
        LpStatus::Infeasible => Ok(LpUpperResult {
            status: "infeasible".into(),
            bound: None,
            exact_extraction: false,
            x: None,
            extracted_revenue: None,
        }),
        LpStatus::Unbounded => Ok(LpUpperResult {
            status: "unbounded".into(),
            bound: None,
            exact_extraction: false,
            x: None,
            extracted_revenue: None,
        }),
    }
}

/// Every upper bound we can attach to an instance, with the revenue-ordered
/// baseline they multiply.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub revenue_ordered: f64,
    /// Factor `ω_n` with `n` the product count.
    pub omega: f64,
    /// Tightened factor `ω_k` using the number of distinct revenues.
    pub omega_distinct: f64,
    /// Revenue bound `ω_k · R^o`.
    pub omega_bound: f64,
    pub eta: Option<f64>,
    pub eta_bound: Option<f64>,
    /// Personalized per-segment bound (mixture models only).
    pub praop: Option<f64>,
    pub lp_variant: LpVariant,
    pub lp: Option<f64>,
    pub lp_status: Option<String>,
    pub lp_exact_extraction: bool,
    pub lp_extracted_revenue: Option<f64>,
}

/// Computes all applicable bounds for an instance. The per-segment and LP
/// bounds exist only for mixture models; the ω and η factors apply to any
/// regular model.
pub fn compute_bounds(instance: &Instance, variant: LpVariant) -> Result<BoundReport> {
    let ro = taop::revenue_ordered(instance).revenue;
    let omega_n = match instance.r.alpha() {
        None => 1.0,
        Some(alpha) => omega(instance.n.max(1), alpha)?,
    };
    let omega_k = omega_for_revenues(&instance.r)?;

    let mut report = BoundReport {
        revenue_ordered: ro,
        omega: omega_n,
        omega_distinct: omega_k,
        omega_bound: omega_k * ro,
        eta: None,
        eta_bound: None,
        praop: None,
        lp_variant: variant,
        lp: None,
        lp_status: None,
        lp_exact_extraction: false,
        lp_extracted_revenue: None,
    };

    if let ChoiceModelSpec::Lcmnl(model) = &instance.model {
        report.praop = Some(praop_upper(model, &instance.r));
        if let Some((eta_value, _, _)) = eta_for_lcmnl(model, &instance.r) {
            report.eta = Some(eta_value);
            report.eta_bound = Some(eta_value * ro);
        }
        if !model.needs_logspace() {
            let lp = lp_upper(model, &instance.r, variant)?;
            report.lp = lp.bound;
            report.lp_status = Some(lp.status);
            report.lp_exact_extraction = lp.exact_extraction;
            report.lp_extracted_revenue = lp.extracted_revenue;
        }
    }
    Ok(report)
}
