//! Library side of the `raop` command-line tool: instance generation to
//! disk, solver and bound runs over instance files, the experiment grid, and
//! the reference-value verification suite.

pub mod experiment;
pub mod verify;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use raop_core::bounds::{compute_bounds, BoundReport, LpVariant};
use raop_core::instance_gen::{gen_lcmnl, GeneratorConfig};
use raop_core::raop::{solve_by_name, SolverOptions};
use raop_core::{Instance, SolveResult};

pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading instance file {}", path.display()))?;
    Instance::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_instance(instance: &Instance, path: &Path) -> Result<()> {
    fs::write(path, instance.to_json_pretty()? + "\n")
        .with_context(|| format!("writing {}", path.display()))
}

/// Generates `replications` instances for one generator cell, writing one
/// JSON file per replication with a seed derived from the master seed.
pub fn generate_to_dir(
    base: &GeneratorConfig,
    replications: usize,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    if replications == 0 {
        bail!("need at least one replication");
    }
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut paths = Vec::with_capacity(replications);
    for rep in 0..replications {
        let mut config = *base;
        config.seed = experiment::replication_seed(base.seed, 0, rep);
        let instance = gen_lcmnl(&config)?;
        let name = format!(
            "lcmnl_n{}_m{}_eps{}_alpha{}_{}_{}_rep{rep}.json",
            config.n,
            config.m,
            config.epsilon,
            config.alpha_target,
            config.price_dist.name(),
            config.alignment.name(),
        );
        let path = out_dir.join(name);
        write_instance(&instance, &path)?;
        paths.push(path);
    }
    Ok(paths)
}

/// One solver's outcome in a `solve` run; failures (unknown solver, size
/// limits) are recorded without aborting the other solvers.
#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum SolverOutcome {
    Solved(SolveResult),
    Failed { solver: String, error: String },
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub results: Vec<SolverOutcome>,
    /// Whether every pair the dominance chain orders (`ro ≤ ro1 ≤ ro2`,
    /// `ro ≤ ro1 ≤ ro3`) held among the solvers that ran.
    pub dominance_ok: bool,
    pub dominance_violations: Vec<String>,
}

pub fn solve_instance(
    instance: &Instance,
    solvers: &[String],
    opts: &SolverOptions,
) -> Result<SolveReport> {
    if solvers.is_empty() {
        bail!("no solvers requested");
    }
    let mut results = Vec::new();
    let mut revenue = std::collections::HashMap::new();
    for name in solvers {
        match solve_by_name(instance, name, opts) {
            Ok(result) => {
                revenue.insert(name.clone(), result.revenue);
                results.push(SolverOutcome::Solved(result));
            }
            Err(e) => results.push(SolverOutcome::Failed {
                solver: name.clone(),
                error: e.to_string(),
            }),
        }
    }
    let mut violations = Vec::new();
    let chain = [("ro", "ro1"), ("ro1", "ro2"), ("ro1", "ro3")];
    for (lo, hi) in chain {
        if let (Some(a), Some(b)) = (revenue.get(lo), revenue.get(hi)) {
            if *a > *b + 1e-9 {
                violations.push(format!("{lo} = {a} exceeds {hi} = {b}"));
            }
        }
    }
    Ok(SolveReport {
        results,
        dominance_ok: violations.is_empty(),
        dominance_violations: violations,
    })
}

pub fn bounds_for_instance(instance: &Instance, variant: LpVariant) -> Result<BoundReport> {
    Ok(compute_bounds(instance, variant)?)
}

pub fn report_json(report: &SolveReport, instance_path: &Path) -> Result<String> {
    Ok(serde_json::to_string_pretty(&json!({
        "instance": instance_path.display().to_string(),
        "results": report.results,
        "dominance_ok": report.dominance_ok,
        "dominance_violations": report.dominance_violations,
    }))?)
}
