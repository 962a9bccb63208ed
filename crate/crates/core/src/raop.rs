//! Refined-assortment solvers: the shared univariate line maximizer, the
//! revenue-ordered refinement heuristics RO1/RO2/RO3, a small-n grid oracle,
//! and exact enumeration over finite availability menus (the committed
//! assortment-schedule problem).
//!
//! The heuristics optimize over the fully flexible relaxation `[0,1]^n` and
//! project their output onto the instance domain afterwards, re-evaluating
//! the revenue at the projected point. The revenue-ordered assortments
//! themselves are always part of the candidate pool (every domain contains
//! the binary levels), so no heuristic ever returns less than the best
//! revenue-ordered assortment.

use std::time::Instant;

use rayon::prelude::*;

use crate::choice::{ChoiceModel, RefinementDomain, RefinementVector, RevenueVector, SolveResult};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::taop;

/// Greedy steps below this gain are treated as noise and stop RO3.
const GAIN_TOL: f64 = 1e-12;

/// Tuning knobs shared by the refinement solvers.
#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Uniform grid size for the first stage of every line search. The
    /// single-variable mixture revenue need not be unimodal, so the grid
    /// locates the basin before golden-section polishing.
    pub grid_points: usize,
    /// Interval width at which golden-section refinement stops.
    pub line_tol: f64,
    /// Subset-enumeration cap forwarded to the exact solver.
    pub enum_cap: usize,
    /// Points per axis for the grid oracle.
    pub grid_per_axis: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grid_points: 256,
            line_tol: 1e-9,
            enum_cap: taop::ENUM_LIMIT,
            grid_per_axis: 101,
        }
    }
}

/// Maximizes an objective over `[0, 1]`: evaluates a uniform grid, then
/// polishes the best cell with golden-section search down to `tol`. The
/// endpoints 0 and 1 are always candidates, so a constant objective returns
/// an endpoint.
pub fn line_maximize(
    mut objective: impl FnMut(f64) -> f64,
    grid_points: usize,
    tol: f64,
) -> (f64, f64) {
    assert!(grid_points >= 3, "need at least 3 grid points");
    assert!(tol > 0.0, "tolerance must be positive");

    let step = 1.0 / (grid_points - 1) as f64;
    let mut grid_vals = Vec::with_capacity(grid_points);
    let mut best_k = 0;
    for k in 0..grid_points {
        let t = if k + 1 == grid_points { 1.0 } else { k as f64 * step };
        let v = objective(t);
        if v > grid_vals.get(best_k).copied().unwrap_or(f64::NEG_INFINITY) {
            best_k = k;
        }
        grid_vals.push(v);
    }

    let grid_t = |k: usize| {
        if k + 1 == grid_points {
            1.0
        } else {
            k as f64 * step
        }
    };
    let mut a = grid_t(best_k.saturating_sub(1));
    let mut b = grid_t((best_k + 1).min(grid_points - 1));

    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = objective(x2);
        }
    }

    let mut best = (0.0, grid_vals[0]);
    for cand in [
        (1.0, grid_vals[grid_points - 1]),
        (grid_t(best_k), grid_vals[best_k]),
        (x1, f1),
        (x2, f2),
    ] {
        if cand.1 > best.1 {
            best = cand;
        }
    }
    best
}

fn maximize_coordinate<M: ChoiceModel + ?Sized>(
    model: &M,
    r: &RevenueVector,
    x: &RefinementVector,
    coord: usize,
    opts: &SolverOptions,
) -> (f64, f64) {
    let mut work = x.clone();
    line_maximize(
        |t| {
            work.set(coord, t);
            model.revenue(r, &work)
        },
        opts.grid_points,
        opts.line_tol,
    )
}

/// Prefix of the `count` highest-revenue products offered in full.
fn revenue_prefix(order: &[usize], count: usize, n: usize) -> RefinementVector {
    let mut x = RefinementVector::zeros(n);
    for &product in &order[..count] {
        x.set(product, 1.0);
    }
    x
}

/// Projects every candidate onto the domain, re-evaluates, adds the
/// revenue-ordered assortments to the pool, and keeps the best.
fn select_best<M: ChoiceModel + ?Sized>(
    model: &M,
    r: &RevenueVector,
    domain: &RefinementDomain,
    candidates: Vec<RefinementVector>,
    solver: &str,
    start: Instant,
) -> SolveResult {
    let n = model.num_products();
    let order = r.descending_order();
    let mut pool = candidates;
    for count in 0..=n {
        pool.push(revenue_prefix(&order, count, n));
    }
    let mut best: Option<(f64, RefinementVector)> = None;
    for candidate in pool {
        let feasible = domain
            .project(&candidate)
            .expect("candidate dimension matches domain");
        let value = model.revenue(r, &feasible);
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, feasible));
        }
    }
    let (_, x) = best.expect("pool always contains the empty assortment");
    SolveResult::evaluated(model, r, x, solver, start.elapsed().as_secs_f64())
}

/// RO1: for each starting prefix, optimizes the availability of the single
/// next product and keeps the best of the `n` candidates.
pub fn ro1(instance: &Instance, opts: &SolverOptions) -> SolveResult {
    ro1_model(
        &instance.model,
        &instance.r,
        &instance.domain,
        opts,
    )
}

pub fn ro1_model<M: ChoiceModel + Sync + ?Sized>(
    model: &M,
    r: &RevenueVector,
    domain: &RefinementDomain,
    opts: &SolverOptions,
) -> SolveResult {
    let start = Instant::now();
    let n = model.num_products();
    let order = r.descending_order();
    let candidates: Vec<RefinementVector> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut x = revenue_prefix(&order, i, n);
            let coord = order[i];
            let (t, _) = maximize_coordinate(model, r, &x, coord, opts);
            x.set(coord, t);
            x
        })
        .collect();
    select_best(model, r, domain, candidates, "ro1", start)
}

/// RO2: for each starting prefix, sweeps the remaining products once in
/// revenue order, optimizing each availability with the earlier choices
/// frozen.
pub fn ro2(instance: &Instance, opts: &SolverOptions) -> SolveResult {
    ro2_model(&instance.model, &instance.r, &instance.domain, opts)
}

pub fn ro2_model<M: ChoiceModel + Sync + ?Sized>(
    model: &M,
    r: &RevenueVector,
    domain: &RefinementDomain,
    opts: &SolverOptions,
) -> SolveResult {
    let start = Instant::now();
    let n = model.num_products();
    let order = r.descending_order();
    let candidates: Vec<RefinementVector> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut x = revenue_prefix(&order, i, n);
            for &coord in &order[i..] {
                let (t, _) = maximize_coordinate(model, r, &x, coord, opts);
                x.set(coord, t);
            }
            x
        })
        .collect();
    select_best(model, r, domain, candidates, "ro2", start)
}

/// RO3: like RO2 but greedy: each step commits the (product, level) pair
/// with the largest revenue gain and stops once no product helps. The greedy
/// choice can backfire relative to RO2's fixed order; both are kept.
pub fn ro3(instance: &Instance, opts: &SolverOptions) -> SolveResult {
    ro3_model(&instance.model, &instance.r, &instance.domain, opts)
}

pub fn ro3_model<M: ChoiceModel + Sync + ?Sized>(
    model: &M,
    r: &RevenueVector,
    domain: &RefinementDomain,
    opts: &SolverOptions,
) -> SolveResult {
    let start = Instant::now();
    let n = model.num_products();
    let order = r.descending_order();
    let candidates: Vec<RefinementVector> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut x = revenue_prefix(&order, i, n);
            let mut value = model.revenue(r, &x);
            let mut remaining: Vec<usize> = order[i..].to_vec();
            while !remaining.is_empty() {
                let mut best: Option<(f64, f64, usize)> = None;
                for (slot, &coord) in remaining.iter().enumerate() {
                    let (t, v) = maximize_coordinate(model, r, &x, coord, opts);
                    if best.as_ref().is_none_or(|b| v > b.0) {
                        best = Some((v, t, slot));
                    }
                }
                let (v, t, slot) = best.unwrap();
                if v - value <= GAIN_TOL {
                    break;
                }
                x.set(remaining[slot], t);
                value = v;
                remaining.remove(slot);
            }
            x
        })
        .collect();
    select_best(model, r, domain, candidates, "ro3", start)
}

/// Exhaustive oracle for the fully flexible problem on up to three products:
/// a uniform grid over `[0,1]^n` refined by coordinate-descent line searches
/// from the best grid point. Ignores the instance domain, since it stands
/// in for the unrestricted refined optimum.
pub fn grid_oracle_raop(instance: &Instance, per_axis: usize) -> Result<SolveResult> {
    grid_oracle_model(
        &instance.model,
        &instance.r,
        per_axis,
        &SolverOptions::default(),
    )
}

pub fn grid_oracle_model<M: ChoiceModel + ?Sized>(
    model: &M,
    r: &RevenueVector,
    per_axis: usize,
    opts: &SolverOptions,
) -> Result<SolveResult> {
    let n = model.num_products();
    if n > 3 {
        return Err(Error::SizeLimit {
            what: "products for the grid oracle",
            limit: 3,
            actual: n as u64,
        });
    }
    if !(2..=201).contains(&per_axis) {
        return Err(Error::SizeLimit {
            what: "grid points per axis",
            limit: 201,
            actual: per_axis as u64,
        });
    }
    let start = Instant::now();
    let level = |k: usize| {
        if k + 1 == per_axis {
            1.0
        } else {
            k as f64 / (per_axis - 1) as f64
        }
    };

    let mut best_x = RefinementVector::zeros(n);
    let mut best = model.revenue(r, &best_x);
    let mut idx = vec![0usize; n];
    loop {
        let x = RefinementVector::new(idx.iter().map(|&k| level(k)).collect()).unwrap();
        let v = model.revenue(r, &x);
        if v > best {
            best = v;
            best_x = x;
        }
        // Odometer over the n-dimensional grid.
        let mut dim = 0;
        loop {
            if dim == n {
                break;
            }
            idx[dim] += 1;
            if idx[dim] < per_axis {
                break;
            }
            idx[dim] = 0;
            dim += 1;
        }
        if dim == n {
            break;
        }
    }

    // Polish with coordinate descent.
    let mut x = best_x;
    for _ in 0..200 {
        let mut improved = false;
        for coord in 0..n {
            let (t, v) = maximize_coordinate(model, r, &x, coord, opts);
            if v > best + GAIN_TOL {
                best = v;
                x.set(coord, t);
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    Ok(SolveResult::evaluated(
        model,
        r,
        x,
        "grid",
        start.elapsed().as_secs_f64(),
    ))
}

/// Per-product availability menus, one level per period, non-increasing:
/// offering a product from period `s` onward pins its availability at
/// `menus[i][s-1]`; the trailing 0 level means the product is never offered.
#[derive(Clone, Debug, PartialEq)]
pub struct SacpSchedule {
    menus: Vec<Vec<f64>>,
}

impl SacpSchedule {
    /// Menus must start at 1, decrease strictly, and end at 0.
    pub fn new(menus: Vec<Vec<f64>>) -> Result<Self> {
        for menu in &menus {
            if menu.len() < 2 || menu[0] != 1.0 || *menu.last().unwrap() != 0.0 {
                return Err(Error::InvalidInstance(
                    "each menu must run from level 1 down to level 0".into(),
                ));
            }
            if menu.windows(2).any(|w| w[0] <= w[1]) {
                return Err(Error::InvalidInstance(
                    "menu levels must be strictly decreasing".into(),
                ));
            }
            if menu.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::InvalidInstance(
                    "menu levels must lie in [0, 1]".into(),
                ));
            }
        }
        Ok(SacpSchedule { menus })
    }

    /// Builds the menus from a finite availability domain (levels sorted
    /// descending become the periods).
    pub fn from_domain(domain: &RefinementDomain) -> Result<Self> {
        let menus = domain
            .per_product
            .iter()
            .map(|spec| match spec {
                crate::choice::DomainSpec::Binary => Ok(vec![1.0, 0.0]),
                crate::choice::DomainSpec::FiniteSet(values) => {
                    let mut menu = values.clone();
                    menu.reverse();
                    Ok(menu)
                }
                crate::choice::DomainSpec::FullInterval => Err(Error::InvalidInstance(
                    "committed-schedule enumeration needs a finite domain".into(),
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        SacpSchedule::new(menus)
    }

    /// Menus induced by per-period mean utilities `u[i][s]`, strictly
    /// decreasing in `s`: first offering product `i` in period `s` shifts its
    /// utility by `u[i][s] − u[i][0]`, i.e. pins the level at
    /// `exp(u[i][s] − u[i][0])`.
    pub fn from_utilities(per_period: &[Vec<f64>]) -> Result<Self> {
        let menus = per_period
            .iter()
            .map(|u| {
                if u.is_empty() {
                    return Err(Error::InvalidInstance("empty utility schedule".into()));
                }
                if u.windows(2).any(|w| w[0] <= w[1]) {
                    return Err(Error::InvalidInstance(
                        "per-period utilities must be strictly decreasing".into(),
                    ));
                }
                let mut menu: Vec<f64> = u.iter().map(|us| (us - u[0]).exp()).collect();
                menu[0] = 1.0;
                menu.push(0.0);
                Ok(menu)
            })
            .collect::<Result<Vec<_>>>()?;
        SacpSchedule::new(menus)
    }

    pub fn menus(&self) -> &[Vec<f64>] {
        &self.menus
    }

    pub fn combinations(&self) -> u128 {
        self.menus.iter().map(|m| m.len() as u128).product()
    }
}

/// Solution of the committed-schedule problem: the best refinement plus the
/// period each offered product's level corresponds to (1-based; `None` for
/// products never offered).
#[derive(Clone, Debug)]
pub struct SacpSolution {
    pub result: SolveResult,
    pub periods: Vec<Option<usize>>,
}

const SACP_LIMIT: u128 = 10_000_000;

/// Exact enumeration over the finite menu product. Ties keep the first
/// combination in odometer order.
pub fn solve_sacp<M: ChoiceModel + ?Sized>(
    model: &M,
    r: &RevenueVector,
    schedule: &SacpSchedule,
) -> Result<SacpSolution> {
    let n = model.num_products();
    if schedule.menus.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: schedule.menus.len(),
        });
    }
    let combos = schedule.combinations();
    if combos > SACP_LIMIT {
        return Err(Error::SizeLimit {
            what: "menu combinations",
            limit: SACP_LIMIT as u64,
            actual: u64::try_from(combos).unwrap_or(u64::MAX),
        });
    }
    let start = Instant::now();
    let mut idx = vec![0usize; n];
    let mut best_idx = idx.clone();
    let mut best = f64::NEG_INFINITY;
    loop {
        let x = RefinementVector::new(
            idx.iter()
                .enumerate()
                .map(|(i, &k)| schedule.menus[i][k])
                .collect(),
        )
        .unwrap();
        let v = model.revenue(r, &x);
        if v > best {
            best = v;
            best_idx = idx.clone();
        }
        let mut dim = 0;
        loop {
            if dim == n {
                break;
            }
            idx[dim] += 1;
            if idx[dim] < schedule.menus[dim].len() {
                break;
            }
            idx[dim] = 0;
            dim += 1;
        }
        if dim == n {
            break;
        }
    }
    let x = RefinementVector::new(
        best_idx
            .iter()
            .enumerate()
            .map(|(i, &k)| schedule.menus[i][k])
            .collect(),
    )
    .unwrap();
    let periods = best_idx
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            if schedule.menus[i][k] == 0.0 {
                None
            } else {
                Some(k + 1)
            }
        })
        .collect();
    Ok(SacpSolution {
        result: SolveResult::evaluated(model, r, x, "sacp", start.elapsed().as_secs_f64()),
        periods,
    })
}

/// Committed-schedule solve with the menus taken from the instance domain.
pub fn solve_sacp_instance(instance: &Instance) -> Result<SacpSolution> {
    let schedule = SacpSchedule::from_domain(&instance.domain)?;
    solve_sacp(&instance.model, &instance.r, &schedule)
}

/// Runs the solver selected by name: `ro`, `ro1`, `ro2`, `ro3`, `enum`,
/// `grid`, or `sacp`.
pub fn solve_by_name(instance: &Instance, name: &str, opts: &SolverOptions) -> Result<SolveResult> {
    match name {
        "ro" => Ok(taop::revenue_ordered(instance)),
        "ro1" => Ok(ro1(instance, opts)),
        "ro2" => Ok(ro2(instance, opts)),
        "ro3" => Ok(ro3(instance, opts)),
        "enum" => taop::enumerate_taop_capped(instance, opts.enum_cap),
        "grid" => grid_oracle_model(&instance.model, &instance.r, opts.grid_per_axis, opts),
        "sacp" => solve_sacp_instance(instance).map(|s| s.result),
        other => Err(Error::UnknownSolver(other.to_string())),
    }
}

/// All recognized solver names, in reporting order.
pub const SOLVER_NAMES: [&str; 7] = ["ro", "ro1", "ro2", "ro3", "enum", "grid", "sacp"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance_gen::example_instances;
    use crate::lcmnl::{LcmnlModel, MnlSegment};
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn line_maximize_constant_objective_returns_endpoint() {
        let (x, v) = line_maximize(|_| 4.25, 64, 1e-9);
        assert_eq!(v, 4.25);
        assert!(x == 0.0 || x == 1.0);
    }

    #[test]
    fn line_maximize_quadratic_peak() {
        let (x, v) = line_maximize(|t| -(t - 0.37).powi(2), 64, 1e-11);
        assert_abs_diff_eq!(x, 0.37, epsilon = 1e-8);
        assert!(v <= 0.0);
    }

    #[test]
    fn line_maximize_example2_partial_product() {
        // Free coordinate 2 with products (1, ·, 0): the peak sits near the
        // reference refinement level 0.06.
        let instance = example_instances().example2;
        let mut x = RefinementVector::new(vec![1.0, 0.0, 0.0]).unwrap();
        let (t, v) = line_maximize(
            |t| {
                x.set(1, t);
                instance.revenue(&x).unwrap()
            },
            256,
            1e-9,
        );
        assert!((t - 0.0596).abs() < 2e-3, "level {t}");
        assert!(v > 71.05 && v < 71.07, "value {v}");
    }

    #[test]
    fn line_maximize_single_segment_peaks_at_endpoint() {
        let seg = MnlSegment::new(1.0, vec![2.0, 0.5]).unwrap();
        let r = RevenueVector::new(vec![4.0, 1.0]).unwrap();
        let base = RefinementVector::new(vec![1.0, 0.0]).unwrap();
        let mut work = base;
        let (t, _) = line_maximize(
            |t| {
                work.set(1, t);
                crate::lcmnl::mnl_probabilities(&seg, &work).expected_revenue(&r)
            },
            256,
            1e-9,
        );
        assert!(t == 0.0 || t == 1.0, "interior optimum {t} for a single segment");
    }

    #[test]
    fn ro_heuristics_on_example2() {
        let instance = example_instances().example2;
        let o = opts();
        let r1 = ro1(&instance, &o);
        let r2 = ro2(&instance, &o);
        let r3 = ro3(&instance, &o);
        assert!(r1.revenue >= 71.0, "ro1 {}", r1.revenue);
        assert!(r2.revenue >= 71.0, "ro2 {}", r2.revenue);
        assert!(r3.revenue >= 71.0, "ro3 {}", r3.revenue);
        assert!(r2.revenue >= r1.revenue - 1e-9);
        assert!(r3.revenue >= r1.revenue - 1e-9);
        // Outputs are feasible for the instance domain.
        assert!(instance.domain.contains(&r1.x));
        assert!(instance.domain.contains(&r2.x));
        assert!(instance.domain.contains(&r3.x));
    }

    #[test]
    fn single_product_heuristics_coincide() {
        let model = LcmnlModel::single(MnlSegment::new(1.0, vec![1.0]).unwrap()).unwrap();
        let r = RevenueVector::new(vec![1.0]).unwrap();
        let domain = RefinementDomain::full_interval(1);
        let o = opts();
        let r1 = ro1_model(&model, &r, &domain, &o);
        let r2 = ro2_model(&model, &r, &domain, &o);
        let r3 = ro3_model(&model, &r, &domain, &o);
        assert_abs_diff_eq!(r1.revenue, 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(r2.revenue, r1.revenue, epsilon = 1e-12);
        assert_abs_diff_eq!(r3.revenue, r1.revenue, epsilon = 1e-12);
    }

    #[test]
    fn single_segment_ro1_matches_revenue_ordered() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..25 {
            let n = rng.random_range(1..=5);
            let model = LcmnlModel::single(
                MnlSegment::new(
                    rng.random_range(0.2..3.0),
                    (0..n).map(|_| rng.random_range(0.2..3.0)).collect(),
                )
                .unwrap(),
            )
            .unwrap();
            let r =
                RevenueVector::new((0..n).map(|_| rng.random_range(0.0..10.0)).collect()).unwrap();
            let domain = RefinementDomain::full_interval(n);
            let h = ro1_model(&model, &r, &domain, &opts());
            let ro = taop::revenue_ordered_model(&model, &r, "ro");
            assert!(
                (h.revenue - ro.revenue).abs() <= 1e-6,
                "ro1 {} vs ro {}",
                h.revenue,
                ro.revenue
            );

            // Single-segment objectives peak at endpoints, so the sweep
            // commits binary levels and cannot beat exact enumeration.
            let sweep = ro2_model(&model, &r, &domain, &opts());
            assert!(sweep.x.values().iter().all(|v| *v == 0.0 || *v == 1.0));
            let exact = taop::enumerate_model(&model, &r, 25, "enum").unwrap();
            assert!(sweep.revenue <= exact.revenue + 1e-9);
        }
    }

    #[test]
    fn grid_oracle_on_example2() {
        let instance = example_instances().example2;
        let oracle = grid_oracle_raop(&instance, 101).unwrap();
        assert!(oracle.revenue >= 71.0, "grid {}", oracle.revenue);
    }

    #[test]
    fn grid_oracle_zero_revenue() {
        let model = LcmnlModel::single(MnlSegment::new(1.0, vec![1.0, 1.0]).unwrap()).unwrap();
        let r = RevenueVector::new(vec![0.0, 0.0]).unwrap();
        let oracle = grid_oracle_model(&model, &r, 21, &opts()).unwrap();
        assert_eq!(oracle.revenue, 0.0);
    }

    #[test]
    fn grid_oracle_rejects_large_instances() {
        let model =
            LcmnlModel::single(MnlSegment::new(1.0, vec![1.0; 4]).unwrap()).unwrap();
        let r = RevenueVector::new(vec![1.0; 4]).unwrap();
        assert!(grid_oracle_model(&model, &r, 21, &opts()).is_err());
    }

    #[test]
    fn grid_oracle_matches_enumeration_for_mnl() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let n = rng.random_range(1..=3);
            let seg = MnlSegment::new(
                rng.random_range(0.2..3.0),
                (0..n).map(|_| rng.random_range(0.2..3.0)).collect(),
            )
            .unwrap();
            let model = LcmnlModel::single(seg).unwrap();
            let r =
                RevenueVector::new((0..n).map(|_| rng.random_range(0.0..10.0)).collect()).unwrap();
            let oracle = grid_oracle_model(&model, &r, 51, &opts()).unwrap();
            let exact = taop::enumerate_model(&model, &r, taop::ENUM_LIMIT, "enum").unwrap();
            assert!(
                (oracle.revenue - exact.revenue).abs() <= 1e-4,
                "grid {} vs enum {}",
                oracle.revenue,
                exact.revenue
            );
        }
    }

    #[test]
    fn sacp_binary_menus_reduce_to_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let n = rng.random_range(1..=4);
            let m = rng.random_range(1..=3);
            let segments: Vec<MnlSegment> = (0..m)
                .map(|_| {
                    MnlSegment::new(
                        rng.random_range(0.2..3.0),
                        (0..n).map(|_| rng.random_range(0.2..3.0)).collect(),
                    )
                    .unwrap()
                })
                .collect();
            let model = LcmnlModel::from_segments(segments, vec![1.0 / m as f64; m]).unwrap();
            let r =
                RevenueVector::new((0..n).map(|_| rng.random_range(0.0..10.0)).collect()).unwrap();
            let schedule = SacpSchedule::from_domain(&RefinementDomain::binary(n)).unwrap();
            let sacp = solve_sacp(&model, &r, &schedule).unwrap();
            let exact = taop::enumerate_model(&model, &r, taop::ENUM_LIMIT, "enum").unwrap();
            assert_abs_diff_eq!(sacp.result.revenue, exact.revenue, epsilon = 1e-12);
        }
    }

    #[test]
    fn sacp_periods_report_menu_positions() {
        let schedule = SacpSchedule::new(vec![vec![1.0, 0.0], vec![1.0, 0.8, 0.0]]).unwrap();
        assert_eq!(schedule.combinations(), 6);
        let ex1 = example_instances().example1;
        let sol = solve_sacp(&ex1.model, &ex1.r, &schedule).unwrap();
        assert_abs_diff_eq!(sol.result.revenue, 1.75, epsilon = 1e-12);
        assert_eq!(sol.periods, vec![Some(1), Some(2)]);
    }

    #[test]
    fn sacp_from_utilities_normalizes_levels() {
        let schedule =
            SacpSchedule::from_utilities(&[vec![2.0, 2.0 + (0.8f64).ln()], vec![0.5]]).unwrap();
        let menus = schedule.menus();
        assert_eq!(menus[0][0], 1.0);
        assert_abs_diff_eq!(menus[0][1], 0.8, epsilon = 1e-12);
        assert_eq!(menus[0][2], 0.0);
        assert_eq!(menus[1], vec![1.0, 0.0]);
    }

    #[test]
    fn solver_dispatch_by_name() {
        let instance = example_instances().example2;
        let o = opts();
        for name in ["ro", "ro1", "enum", "grid"] {
            assert!(solve_by_name(&instance, name, &o).is_ok(), "{name}");
        }
        assert!(matches!(
            solve_by_name(&instance, "does-not-exist", &o),
            Err(Error::UnknownSolver(_))
        ));
    }

    #[test]
    fn dominance_chain_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let o = opts();
        for _ in 0..15 {
            let n = rng.random_range(1..=6);
            let m = rng.random_range(1..=3);
            let segments: Vec<MnlSegment> = (0..m)
                .map(|_| {
                    MnlSegment::new(
                        (rng.random_range(-2.0..2.0f64)).exp(),
                        (0..n)
                            .map(|_| (rng.random_range(-3.0..3.0f64)).exp())
                            .collect(),
                    )
                    .unwrap()
                })
                .collect();
            let model = LcmnlModel::from_segments(segments, vec![1.0 / m as f64; m]).unwrap();
            let r =
                RevenueVector::new((0..n).map(|_| rng.random_range(0.0..20.0)).collect()).unwrap();
            let domain = RefinementDomain::full_interval(n);
            let ro = taop::revenue_ordered_model(&model, &r, "ro").revenue;
            let r1 = ro1_model(&model, &r, &domain, &o).revenue;
            let r2 = ro2_model(&model, &r, &domain, &o).revenue;
            let r3 = ro3_model(&model, &r, &domain, &o).revenue;
            assert!(ro <= r1 + 1e-9);
            assert!(r1 <= r2 + 1e-9);
            assert!(r1 <= r3 + 1e-9);
        }
    }

    #[test]
    fn empty_instance_is_handled() {
        let schedule = SacpSchedule::new(vec![]).unwrap();
        assert_eq!(schedule.combinations(), 1);

        let model = LcmnlModel::single(MnlSegment::new(1.0, vec![]).unwrap()).unwrap();
        let r = RevenueVector::new(vec![]).unwrap();
        let domain = RefinementDomain::full_interval(0);
        for result in [
            ro1_model(&model, &r, &domain, &opts()),
            ro2_model(&model, &r, &domain, &opts()),
            ro3_model(&model, &r, &domain, &opts()),
        ] {
            assert_eq!(result.revenue, 0.0);
            assert!(result.x.is_empty());
        }
    }
}
