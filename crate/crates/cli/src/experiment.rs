//! Experiment harness: a factorial grid of generator settings, replicated
//! instances per cell, heuristic-versus-baseline uplifts, and plot-ready CSV
//! reports.
//!
//! Reproducibility contract: every replication derives its RNG seed from
//! `(master seed, cell index, replication index)`, results are collected by
//! index, and all floats are printed with fixed formatting, so the same
//! configuration produces byte-identical CSVs regardless of worker count.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use raop_core::instance_gen::{gen_lcmnl, Alignment, GeneratorConfig, PriceDist};
use raop_core::raop::{solve_by_name, SolverOptions};
use raop_core::taop::{enumerate_taop_capped, revenue_ordered};
use raop_core::Error as CoreError;

/// A product offered at level ≥ this counts as offered in full when
/// comparing supports.
const FULL_LEVEL: f64 = 1.0 - 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_values: Vec<usize>,
    pub m_values: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub alphas: Vec<f64>,
    pub dists: Vec<PriceDist>,
    pub alignments: Vec<Alignment>,
    pub replications: usize,
    pub master_seed: u64,
    /// Refinement heuristics to run; the revenue-ordered baseline always
    /// runs, and exact enumeration runs whenever `n ≤ enum_cap`.
    pub solvers: Vec<String>,
    pub enum_cap: usize,
    pub grid_points: usize,
    pub line_tol: f64,
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_values: vec![5, 10, 15, 50, 100],
            m_values: vec![2, 5, 10, 50, 100],
            epsilons: vec![0.01, 0.5],
            alphas: vec![0.01, 0.1, 0.2],
            dists: PriceDist::ALL.to_vec(),
            alignments: Alignment::ALL.to_vec(),
            replications: 50,
            master_seed: 17,
            solvers: vec!["ro1".into(), "ro2".into(), "ro3".into()],
            enum_cap: 25,
            grid_points: 256,
            line_tol: 1e-9,
            workers: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            bail!("need at least one replication per cell");
        }
        if self.n_values.is_empty()
            || self.m_values.is_empty()
            || self.epsilons.is_empty()
            || self.alphas.is_empty()
            || self.dists.is_empty()
            || self.alignments.is_empty()
        {
            bail!("every grid dimension needs at least one value");
        }
        for solver in &self.solvers {
            if !matches!(solver.as_str(), "ro1" | "ro2" | "ro3") {
                bail!("experiment heuristics must be ro1/ro2/ro3, got {solver:?}");
            }
        }
        Ok(())
    }

    fn cells(&self) -> Vec<CellKey> {
        let mut cells = Vec::new();
        for &n in &self.n_values {
            for &m in &self.m_values {
                for &epsilon in &self.epsilons {
                    for &alpha in &self.alphas {
                        for &dist in &self.dists {
                            for &alignment in &self.alignments {
                                cells.push(CellKey {
                                    n,
                                    m,
                                    epsilon,
                                    alpha,
                                    dist,
                                    alignment,
                                });
                            }
                        }
                    }
                }
            }
        }
        cells
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CellKey {
    pub n: usize,
    pub m: usize,
    pub epsilon: f64,
    pub alpha: f64,
    pub dist: PriceDist,
    pub alignment: Alignment,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub cell: usize,
    pub rep: usize,
    pub seed: u64,
    pub ro: f64,
    /// (solver, revenue, offers-exact-optimum-in-full) per heuristic.
    pub heuristics: Vec<(String, f64, Option<bool>)>,
    pub taop: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolverSummary {
    pub solver: String,
    pub mean_uplift_pct: f64,
    pub max_uplift_pct: f64,
    /// Mean uplift strictly above the exact optimum's mean uplift; absent
    /// when enumeration was skipped or for the baseline rows.
    pub outperforms_taop: Option<bool>,
    /// Share of replications whose output offers the exact optimum's
    /// assortment in full; absent when enumeration was skipped.
    pub agreement_rate: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellSummary {
    pub key: CellKey,
    pub replications: usize,
    pub solvers: Vec<SolverSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AggregateRow {
    pub n: usize,
    pub m: usize,
    /// Mean uplift (percent) per heuristic, averaged over all cells with
    /// this (n, m).
    pub heuristics: Vec<(String, f64)>,
    pub taop: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub cells: Vec<CellSummary>,
    pub runs: Vec<RunRecord>,
    pub aggregate: Vec<AggregateRow>,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Replication seed: a pure function of (master, cell, rep) so scheduling
/// cannot influence the instances.
pub fn replication_seed(master: u64, cell: usize, rep: usize) -> u64 {
    splitmix(splitmix(master) ^ ((cell as u64) << 20) ^ rep as u64)
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let cells = config.cells();
    let opts = SolverOptions {
        grid_points: config.grid_points,
        line_tol: config.line_tol,
        enum_cap: config.enum_cap,
        ..SolverOptions::default()
    };

    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..config.replications).map(move |r| (c, r)))
        .collect();

    let execute = || -> Result<Vec<RunRecord>> {
        jobs.par_iter()
            .map(|&(cell, rep)| run_one(config, &cells[cell], cell, rep, &opts))
            .collect()
    };
    let runs = match config.workers {
        None => execute()?,
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .context("building worker pool")?
            .install(execute)?,
    };

    let mut summaries = Vec::with_capacity(cells.len());
    for (c, key) in cells.iter().enumerate() {
        let cell_runs: Vec<&RunRecord> = runs[c * config.replications..(c + 1) * config.replications]
            .iter()
            .collect();
        summaries.push(summarize_cell(config, *key, &cell_runs));
    }
    let aggregate = aggregate_rows(config, &summaries);
    Ok(ExperimentOutput {
        config: config.clone(),
        cells: summaries,
        runs,
        aggregate,
    })
}

fn run_one(
    config: &ExperimentConfig,
    key: &CellKey,
    cell: usize,
    rep: usize,
    opts: &SolverOptions,
) -> Result<RunRecord> {
    let seed = replication_seed(config.master_seed, cell, rep);
    let instance = gen_lcmnl(&GeneratorConfig {
        n: key.n,
        m: key.m,
        epsilon: key.epsilon,
        price_dist: key.dist,
        alpha_target: key.alpha,
        alignment: key.alignment,
        seed,
    })
    .with_context(|| format!("generating cell {cell} rep {rep}"))?;

    let ro = revenue_ordered(&instance).revenue;
    let taop = if key.n <= config.enum_cap {
        match enumerate_taop_capped(&instance, config.enum_cap) {
            Ok(result) => Some(result),
            Err(CoreError::SizeLimit { .. }) => None,
            Err(e) => return Err(e).context("exact enumeration"),
        }
    } else {
        None
    };

    let mut heuristics = Vec::with_capacity(config.solvers.len());
    for name in &config.solvers {
        let result = solve_by_name(&instance, name, opts)
            .with_context(|| format!("solver {name} on cell {cell} rep {rep}"))?;
        let agreement = taop.as_ref().map(|exact| {
            exact
                .x
                .values()
                .iter()
                .zip(result.x.values())
                .all(|(xe, xh)| *xe < 0.5 || *xh >= FULL_LEVEL)
        });
        heuristics.push((name.clone(), result.revenue, agreement));
    }

    Ok(RunRecord {
        cell,
        rep,
        seed,
        ro,
        heuristics,
        taop: taop.map(|t| t.revenue),
    })
}

fn uplift_pct(value: f64, baseline: f64) -> f64 {
    if baseline <= 0.0 {
        0.0
    } else {
        (value - baseline) / baseline * 100.0
    }
}

fn summarize_cell(config: &ExperimentConfig, key: CellKey, runs: &[&RunRecord]) -> CellSummary {
    let reps = runs.len() as f64;
    let taop_available = runs.iter().all(|r| r.taop.is_some());
    let taop_mean = if taop_available {
        runs.iter()
            .map(|r| uplift_pct(r.taop.unwrap(), r.ro))
            .sum::<f64>()
            / reps
    } else {
        0.0
    };

    let mut solvers = vec![SolverSummary {
        solver: "ro".into(),
        mean_uplift_pct: 0.0,
        max_uplift_pct: 0.0,
        outperforms_taop: None,
        agreement_rate: None,
    }];
    for (idx, name) in config.solvers.iter().enumerate() {
        let uplifts: Vec<f64> = runs
            .iter()
            .map(|r| uplift_pct(r.heuristics[idx].1, r.ro))
            .collect();
        let mean = uplifts.iter().sum::<f64>() / reps;
        let max = uplifts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let agreement_rate = taop_available.then(|| {
            runs.iter()
                .filter(|r| r.heuristics[idx].2 == Some(true))
                .count() as f64
                / reps
        });
        solvers.push(SolverSummary {
            solver: name.clone(),
            mean_uplift_pct: mean,
            max_uplift_pct: max,
            outperforms_taop: taop_available.then_some(mean > taop_mean),
            agreement_rate,
        });
    }
    if taop_available {
        let max = runs
            .iter()
            .map(|r| uplift_pct(r.taop.unwrap(), r.ro))
            .fold(f64::NEG_INFINITY, f64::max);
        solvers.push(SolverSummary {
            solver: "taop".into(),
            mean_uplift_pct: taop_mean,
            max_uplift_pct: max,
            outperforms_taop: None,
            agreement_rate: None,
        });
    }
    CellSummary {
        key,
        replications: runs.len(),
        solvers,
    }
}

fn aggregate_rows(config: &ExperimentConfig, cells: &[CellSummary]) -> Vec<AggregateRow> {
    let mut rows = Vec::new();
    for &n in &config.n_values {
        for &m in &config.m_values {
            let group: Vec<&CellSummary> = cells
                .iter()
                .filter(|c| c.key.n == n && c.key.m == m)
                .collect();
            if group.is_empty() {
                continue;
            }
            let mean_of = |solver: &str| -> Option<f64> {
                let values: Vec<f64> = group
                    .iter()
                    .filter_map(|c| {
                        c.solvers
                            .iter()
                            .find(|s| s.solver == solver)
                            .map(|s| s.mean_uplift_pct)
                    })
                    .collect();
                (values.len() == group.len())
                    .then(|| values.iter().sum::<f64>() / values.len() as f64)
            };
            rows.push(AggregateRow {
                n,
                m,
                heuristics: config
                    .solvers
                    .iter()
                    .map(|s| (s.clone(), mean_of(s).unwrap_or(0.0)))
                    .collect(),
                taop: mean_of("taop"),
            });
        }
    }
    rows
}

fn fmt_bool(b: Option<bool>) -> String {
    match b {
        Some(true) => "true".into(),
        Some(false) => "false".into(),
        None => "-".into(),
    }
}

pub fn runs_csv(output: &ExperimentOutput) -> String {
    let cells = output.config.cells();
    let mut s = String::from(
        "n,m,epsilon,alpha,price_dist,alignment,rep,seed,solver,revenue,uplift_pct\n",
    );
    for run in &output.runs {
        let key = &cells[run.cell];
        let prefix = format!(
            "{},{},{},{},{},{},{},{}",
            key.n,
            key.m,
            key.epsilon,
            key.alpha,
            key.dist.name(),
            key.alignment.name(),
            run.rep,
            run.seed
        );
        let _ = writeln!(s, "{prefix},ro,{:.9},0.000000", run.ro);
        for (name, revenue, _) in &run.heuristics {
            let _ = writeln!(
                s,
                "{prefix},{name},{revenue:.9},{:.6}",
                uplift_pct(*revenue, run.ro)
            );
        }
        if let Some(taop) = run.taop {
            let _ = writeln!(
                s,
                "{prefix},taop,{taop:.9},{:.6}",
                uplift_pct(taop, run.ro)
            );
        }
    }
    s
}

pub fn cells_csv(output: &ExperimentOutput) -> String {
    let mut s = String::from(
        "n,m,epsilon,alpha,price_dist,alignment,replications,solver,\
         mean_uplift_pct,max_uplift_pct,outperforms_taop,agreement_rate\n",
    );
    for cell in &output.cells {
        for solver in &cell.solvers {
            let agreement = solver
                .agreement_rate
                .map(|a| format!("{a:.4}"))
                .unwrap_or_else(|| "-".into());
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{:.6},{:.6},{},{}",
                cell.key.n,
                cell.key.m,
                cell.key.epsilon,
                cell.key.alpha,
                cell.key.dist.name(),
                cell.key.alignment.name(),
                cell.replications,
                solver.solver,
                solver.mean_uplift_pct,
                solver.max_uplift_pct,
                fmt_bool(solver.outperforms_taop),
                agreement
            );
        }
    }
    s
}

/// One row per (n, m), heuristic columns plus the exact optimum, all as
/// mean uplift (percent) versus the revenue-ordered baseline; the row
/// maximum carries an asterisk and a dash marks sizes where enumeration was
/// skipped.
pub fn aggregate_csv(output: &ExperimentOutput) -> String {
    let mut header = String::from("n,m");
    for (name, _) in output
        .aggregate
        .first()
        .map(|r| r.heuristics.as_slice())
        .unwrap_or(&[])
    {
        let _ = write!(header, ",{name}");
    }
    header.push_str(",taop\n");
    let mut s = header;
    for row in &output.aggregate {
        let mut values: Vec<(String, Option<f64>)> = row
            .heuristics
            .iter()
            .map(|(name, v)| (name.clone(), Some(*v)))
            .collect();
        values.push(("taop".into(), row.taop));
        let best = values
            .iter()
            .filter_map(|(_, v)| *v)
            .fold(f64::NEG_INFINITY, f64::max);
        let _ = write!(s, "{},{}", row.n, row.m);
        for (_, value) in &values {
            match value {
                Some(v) => {
                    let star = if *v == best { "*" } else { "" };
                    let _ = write!(s, ",{v:.2}%{star}");
                }
                None => {
                    let _ = write!(s, ",-");
                }
            }
        }
        s.push('\n');
    }
    s
}

/// Writes `runs.csv`, `cells.csv`, `aggregate.csv`, and the configuration
/// used, returning the paths.
pub fn write_outputs(output: &ExperimentOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let entries = [
        ("runs.csv", runs_csv(output)),
        ("cells.csv", cells_csv(output)),
        ("aggregate.csv", aggregate_csv(output)),
        (
            "config.json",
            serde_json::to_string_pretty(&output.config)? + "\n",
        ),
    ];
    let mut paths = Vec::new();
    for (name, contents) in entries {
        let path = dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        paths.push(path);
    }
    Ok(paths)
}
