//! Dense two-phase primal simplex.
//!
//! Small and auditable by intent: the linear programs built in this crate
//! have at most a few hundred variables, so a dense tableau beats a sparse
//! revised implementation on every axis that matters here. Pricing is
//! Dantzig's rule, switching to Bland's rule after a run of degenerate
//! pivots so cycling cannot occur.

use crate::error::{Error, Result};

/// Feasibility / optimality tolerance.
const TOL: f64 = 1e-9;
/// Magnitude below which a pivot element is treated as zero.
const PIVOT_TOL: f64 = 1e-9;
/// Objective progress below this counts as a degenerate pivot.
const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A dense linear program: maximize `objective · v` subject to the row
/// constraints and per-variable bounds (lower bounds finite, upper bounds
/// may be infinite).
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<(f64, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value of the returned primal point (0 unless optimal).
    pub objective: f64,
    pub primal: Vec<f64>,
}

impl LinearProgram {
    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if self.bounds.len() != n {
            return Err(Error::MalformedProgram(format!(
                "{n} objective coefficients but {} bounds",
                self.bounds.len()
            )));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::MalformedProgram("non-finite objective".into()));
        }
        for (lo, hi) in &self.bounds {
            if !lo.is_finite() || hi.is_nan() || lo > hi {
                return Err(Error::MalformedProgram(format!(
                    "bad variable bounds [{lo}, {hi}]"
                )));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::MalformedProgram(format!(
                    "constraint {i} has {} coefficients, expected {n}",
                    c.coeffs.len()
                )));
            }
            if c.coeffs.iter().any(|a| !a.is_finite()) || !c.rhs.is_finite() {
                return Err(Error::MalformedProgram(format!(
                    "constraint {i} has non-finite entries"
                )));
            }
        }
        Ok(())
    }
}

struct Tableau {
    /// rows × (cols + 1); last column is the rhs.
    body: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
    /// Pristine standard-form rows, kept for refactorization.
    original: Vec<Vec<f64>>,
}

impl Tableau {
    fn rhs(&self, row: usize) -> f64 {
        self.body[row][self.cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = 1.0 / self.body[row][col];
        for v in self.body[row].iter_mut() {
            *v *= inv;
        }
        let pivot_row = self.body[row].clone();
        for (r, body_row) in self.body.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let factor = body_row[col];
            if factor != 0.0 {
                for (v, p) in body_row.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Reduced costs and current objective for the given cost vector.
    fn priced(&self, cost: &[f64]) -> (Vec<f64>, f64) {
        let rows = self.body.len();
        let mut reduced = cost.to_vec();
        let mut objective = 0.0;
        for r in 0..rows {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                objective += cb * self.rhs(r);
                for (red, a) in reduced.iter_mut().zip(&self.body[r]) {
                    *red -= cb * a;
                }
            }
        }
        (reduced, objective)
    }

    /// Rebuilds the tableau for the current basis from the pristine rows,
    /// eliminating with partial pivoting. Long pivot sequences accumulate
    /// roundoff that can silently corrupt the reduced costs; a fresh
    /// elimination resets the error to one factorization's worth.
    fn refactor(&mut self) {
        let rows = self.original.len();
        let mut fresh = self.original.clone();
        let mut claimed = vec![false; rows];
        let mut new_basis = vec![usize::MAX; rows];
        for &col in &self.basis {
            let mut best: Option<(usize, f64)> = None;
            for (r, row) in fresh.iter().enumerate() {
                if !claimed[r] {
                    let a = row[col].abs();
                    if best.is_none_or(|(_, b)| a > b) {
                        best = Some((r, a));
                    }
                }
            }
            let Some((row, magnitude)) = best else { return };
            if magnitude <= PIVOT_TOL {
                // Numerically singular basis; keep the incremental tableau.
                return;
            }
            claimed[row] = true;
            new_basis[row] = col;
            let inv = 1.0 / fresh[row][col];
            for v in fresh[row].iter_mut() {
                *v *= inv;
            }
            let pivot_row = fresh[row].clone();
            for (r, body_row) in fresh.iter_mut().enumerate() {
                if r == row {
                    continue;
                }
                let factor = body_row[col];
                if factor != 0.0 {
                    for (v, p) in body_row.iter_mut().zip(&pivot_row) {
                        *v -= factor * p;
                    }
                }
            }
        }
        // The refactored point is the same basic solution; tiny negative
        // levels are roundoff.
        for row in fresh.iter_mut() {
            let rhs = &mut row[self.cols];
            if *rhs < 0.0 && *rhs > -1e-9 {
                *rhs = 0.0;
            }
        }
        self.body = fresh;
        self.basis = new_basis;
    }
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

/// Pivots between refactorizations.
const REFACTOR_EVERY: usize = 40;
/// Refactor-and-verify rounds before accepting an optimum at face value.
const MAX_CLEAN_ROUNDS: usize = 25;

/// Runs the simplex loop minimizing `cost`. `allowed` masks columns that may
/// enter (used to bar artificials in phase 2). An optimum is only accepted
/// after a fresh refactorization confirms the reduced costs.
fn run_phase(t: &mut Tableau, cost: &[f64], allowed: &[bool]) -> Result<PhaseOutcome> {
    let rows = t.body.len();
    let bland_trigger = 5 * (rows + t.cols);
    let max_iterations = 50_000 + 100 * (rows + t.cols);
    let mut clean_rounds = 0usize;

    let mut degenerate_run = 0usize;
    let mut last_objective = f64::INFINITY;
    let mut since_refactor = 0usize;

    for _ in 0..max_iterations {
        let (reduced, objective) = t.priced(cost);
        let bland = degenerate_run > bland_trigger;

        let mut entering: Option<usize> = None;
        if bland {
            for c in 0..t.cols {
                if allowed[c] && reduced[c] < -TOL {
                    entering = Some(c);
                    break;
                }
            }
        } else {
            let mut best = -TOL;
            for c in 0..t.cols {
                if allowed[c] && reduced[c] < best {
                    best = reduced[c];
                    entering = Some(c);
                }
            }
        }
        let Some(col) = entering else {
            // Looks optimal; re-derive the tableau from pristine data and
            // make sure that still holds.
            if clean_rounds >= MAX_CLEAN_ROUNDS {
                return Ok(PhaseOutcome::Optimal);
            }
            clean_rounds += 1;
            t.refactor();
            since_refactor = 0;
            let (fresh, _) = t.priced(cost);
            let still_improvable = (0..t.cols).any(|c| allowed[c] && fresh[c] < -TOL);
            if !still_improvable {
                return Ok(PhaseOutcome::Optimal);
            }
            continue;
        };

        // Ratio test; ties prefer the smallest basis index (Bland-safe).
        let mut leaving: Option<(usize, f64)> = None;
        for r in 0..rows {
            let a = t.body[r][col];
            if a > PIVOT_TOL {
                let ratio = t.rhs(r) / a;
                match leaving {
                    None => leaving = Some((r, ratio)),
                    Some((lr, lratio)) => {
                        if ratio < lratio - 1e-12
                            || ((ratio - lratio).abs() <= 1e-12 && t.basis[r] < t.basis[lr])
                        {
                            leaving = Some((r, ratio));
                        }
                    }
                }
            }
        }
        let Some((row, _)) = leaving else {
            return Ok(PhaseOutcome::Unbounded);
        };

        t.pivot(row, col);
        since_refactor += 1;
        if since_refactor >= REFACTOR_EVERY {
            t.refactor();
            since_refactor = 0;
        }

        if (last_objective - objective).abs() <= DEGENERATE_TOL {
            degenerate_run += 1;
        } else {
            degenerate_run = 0;
        }
        last_objective = objective;
    }
    Err(Error::Undefined("simplex iteration limit reached".into()))
}

/// Nearest power of two to `1/x`, for exact (rounding-free) equilibration.
fn pow2_recip(x: f64) -> f64 {
    if x <= 0.0 || !x.is_finite() {
        1.0
    } else {
        (-x.log2().round()).exp2()
    }
}

/// Solves the program with a two-phase dense simplex. Infeasibility and
/// unboundedness come back as statuses, not errors.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.objective.len();

    // Shift every variable by its lower bound so all structurals are ≥ 0;
    // finite upper bounds become extra rows.
    let mut rows: Vec<(Vec<f64>, Sense, f64)> = Vec::new();
    for c in &lp.constraints {
        let shift: f64 = c
            .coeffs
            .iter()
            .zip(&lp.bounds)
            .map(|(a, (lo, _))| a * lo)
            .sum();
        rows.push((c.coeffs.clone(), c.sense, c.rhs - shift));
    }
    for (j, (lo, hi)) in lp.bounds.iter().enumerate() {
        if hi.is_finite() {
            let mut coeffs = vec![0.0; n];
            coeffs[j] = 1.0;
            rows.push((coeffs, Sense::Le, hi - lo));
        }
    }

    // Equilibrate rows (and the objective) with power-of-two scales so the
    // pivot and optimality tolerances act on O(1) numbers. Powers of two
    // keep every scaled entry exact. Columns are deliberately left alone:
    // column scaling would change the variable ranges, and a reduced cost
    // just under the tolerance on a wide-range variable hides a material
    // objective gap.
    for (coeffs, _, rhs) in rows.iter_mut() {
        let max = coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let rs = pow2_recip(max);
        for a in coeffs.iter_mut() {
            *a *= rs;
        }
        *rhs *= rs;
    }
    let obj_scale = pow2_recip(lp.objective.iter().fold(0.0f64, |m, c| m.max(c.abs())));
    let scaled_objective: Vec<f64> = lp.objective.iter().map(|c| c * obj_scale).collect();

    // Normalize to nonnegative rhs, then append slack/surplus and artificial
    // columns.
    let m = rows.len();
    let mut slack_count = 0usize;
    for (coeffs, sense, rhs) in rows.iter_mut() {
        if *rhs < 0.0 {
            *rhs = -*rhs;
            coeffs.iter_mut().for_each(|a| *a = -*a);
            *sense = match *sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }
    for (_, sense, _) in &rows {
        if !matches!(sense, Sense::Eq) {
            slack_count += 1;
        }
    }

    let total_cols = n + slack_count + m; // worst case: one artificial per row
    let mut body = vec![vec![0.0; total_cols + 1]; m];
    let mut basis = vec![usize::MAX; m];
    let mut next_slack = n;
    let mut next_artificial = n + slack_count;
    let artificial_start = n + slack_count;

    for (r, (coeffs, sense, rhs)) in rows.iter().enumerate() {
        body[r][..n].copy_from_slice(coeffs);
        body[r][total_cols] = *rhs;
        match sense {
            Sense::Le => {
                body[r][next_slack] = 1.0;
                basis[r] = next_slack;
                next_slack += 1;
            }
            Sense::Ge => {
                body[r][next_slack] = -1.0;
                next_slack += 1;
                body[r][next_artificial] = 1.0;
                basis[r] = next_artificial;
                next_artificial += 1;
            }
            Sense::Eq => {
                body[r][next_artificial] = 1.0;
                basis[r] = next_artificial;
                next_artificial += 1;
            }
        }
    }

    let used_cols = next_artificial;
    for row in body.iter_mut() {
        let rhs = row[total_cols];
        row.truncate(used_cols);
        row.push(rhs);
    }
    let mut t = Tableau {
        original: body.clone(),
        body,
        basis,
        cols: used_cols,
    };

    // Phase 1: minimize the sum of artificials.
    if used_cols > artificial_start {
        let mut phase1_cost = vec![0.0; used_cols];
        phase1_cost[artificial_start..].fill(1.0);
        let allowed = vec![true; used_cols];
        match run_phase(&mut t, &phase1_cost, &allowed)? {
            PhaseOutcome::Unbounded => {
                return Err(Error::Undefined(
                    "phase 1 reported unbounded; program is malformed".into(),
                ))
            }
            PhaseOutcome::Optimal => {}
        }
        let (_, phase1_objective) = t.priced(&phase1_cost);
        if phase1_objective > 1e-7 {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                objective: 0.0,
                primal: vec![0.0; n],
            });
        }
        // Drive any artificial still in the basis out (or note its row as
        // redundant by leaving it basic at zero; it can never re-enter).
        for r in 0..t.body.len() {
            if t.basis[r] >= artificial_start {
                let col = (0..artificial_start).find(|&c| t.body[r][c].abs() > PIVOT_TOL);
                if let Some(col) = col {
                    t.pivot(r, col);
                }
            }
        }
    }

    // Phase 2: minimize the negated objective over the original columns.
    let mut phase2_cost = vec![0.0; used_cols];
    for (j, c) in scaled_objective.iter().enumerate() {
        phase2_cost[j] = -c;
    }
    let mut allowed = vec![true; used_cols];
    for flag in allowed.iter_mut().skip(artificial_start) {
        *flag = false;
    }
    match run_phase(&mut t, &phase2_cost, &allowed)? {
        PhaseOutcome::Unbounded => Ok(LpSolution {
            status: LpStatus::Unbounded,
            objective: 0.0,
            primal: vec![0.0; n],
        }),
        PhaseOutcome::Optimal => {
            let mut shifted = vec![0.0; n];
            for (r, &b) in t.basis.iter().enumerate() {
                if b < n {
                    shifted[b] = t.rhs(r);
                }
            }
            // Undo the lower-bound shift.
            let primal: Vec<f64> = shifted
                .iter()
                .zip(&lp.bounds)
                .map(|(w, (lo, _))| w + lo)
                .collect();
            let objective = primal
                .iter()
                .zip(&lp.objective)
                .map(|(v, c)| v * c)
                .sum();
            Ok(LpSolution {
                status: LpStatus::Optimal,
                objective,
                primal,
            })
        }
    }
}
