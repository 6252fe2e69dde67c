use std::path::Path;

use qwoa_cvrp::baseline::{self, classical_records, Curve};
use qwoa_cvrp::circuit::{self, VerificationReport};
use qwoa_cvrp::cvrp::{
    build_quality_table_capped, generate_random_instance, CvrpInstance, GenerationConfig,
    QualityTable,
};
use qwoa_cvrp::export;
use qwoa_cvrp::optimize::{convergence_sweep, OptimizationRun, OptimizerConfig};
use qwoa_cvrp::partitions::{SolutionPartition, SolutionSpace};
use qwoa_cvrp::qwoa::{self, VariationalParams};
use qwoa_cvrp::SolutionIndex;
use serde_json::json;

use crate::error::Failure;
use crate::output::{sha256_hex, Artifacts};
use crate::plot;
use crate::{Cli, Command, InstanceArg, OptimizerArgs};

/// Power-law exponents reported for the reference n = 8 experiment.
pub const REFERENCE_ALPHA_QWOA: f64 = 0.45;
pub const REFERENCE_ALPHA_CLASSICAL: f64 = 0.27;

pub const VERIFY_RESIDUAL: f64 = 1e-10;
pub const VERIFY_LEAKAGE: f64 = 1e-12;
pub const VERIFY_ANCILLA: f64 = 1e-12;
const MAX_VERIFY_SOLUTIONS: usize = 1 << 12;

fn parse_index(text: &str) -> Result<SolutionIndex, Failure> {
    text.trim().parse().map_err(|_| {
        Failure::Usage(format!(
            "index must be a non-negative integer, got {text:?}"
        ))
    })
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let out = cli.out.as_path();
    match &cli.command {
        Command::Gen {
            n,
            seed,
            capacity,
            min_packages,
            max_packages,
            min_cost,
            max_cost,
            min_depot_cost,
            max_depot_cost,
            asymmetric,
        } => {
            let config = GenerationConfig {
                capacity: *capacity,
                inter_cost: (*min_cost, *max_cost),
                depot_cost: (*min_depot_cost, *max_depot_cost),
                packages: (*min_packages, *max_packages),
                symmetric: !asymmetric,
            };
            config.check()?;
            if *n == 0 {
                return Err(Failure::Usage("--n must be at least 1".into()));
            }
            let inst = generate_random_instance(*n, *seed, &config)?;
            let name = format!("instance_n{n}_seed{seed}.json");
            let mut art = Artifacts::new(
                out,
                &json!({"command": "gen", "n": n, "seed": seed, "config": config}),
            );
            art.raw(name, inst.to_json().into_bytes());
            report(art.commit()?);
        }
        Command::Validate { instance } => {
            let text = read(instance)?;
            let inst = CvrpInstance::from_json_unchecked(&text)?;
            inst.validate()
                .map_err(|v| Failure::Validation(format!("{}: {v}", instance.display())))?;
            let size = qwoa_cvrp::cardinality(inst.n())?;
            println!(
                "valid: n={} capacity={} solutions={size}",
                inst.n(),
                inst.capacity
            );
        }
        Command::Enumerate { n, max_solutions } => {
            let space = SolutionSpace::new(*n)?;
            check_cap(&space, *max_solutions)?;
            let mut art = Artifacts::new(out, &json!({"command": "enumerate", "n": n}));
            art.csv(format!("solutions_n{n}.csv"), &export::solutions(*n)?);
            report(art.commit()?);
        }
        Command::Index { solution } => {
            let p = parse_solution(solution)?;
            let space = SolutionSpace::new(p.n())?;
            println!("{}", space.index(&p)?);
        }
        Command::Unindex { n, index } => {
            let space = SolutionSpace::new(*n)?;
            println!("{}", space.unindex(&parse_index(index)?)?);
        }
        Command::Cost { instance, solution } => {
            let (inst, _) = load(instance)?;
            let p = parse_solution(solution)?;
            println!("{}", qwoa_cvrp::cost(&inst, &p)?);
        }
        Command::Qualities { instance } => {
            let (inst, digest) = load(&instance.instance)?;
            let q = table(&inst, instance)?;
            let mut art = Artifacts::new(out, &json!({"command": "qualities", "instance": digest}));
            art.csv("qualities.csv", &export::qualities(&q));
            art.csv("quality_levels.csv", &export::quality_levels(&q));
            println!(
                "solutions={} distinct={} min={} mean={} max={}",
                q.len(),
                q.levels().len(),
                q.min(),
                q.mean(),
                q.max()
            );
            report(art.commit()?);
        }
        Command::Optimum { instance } => {
            let (inst, _) = load(&instance.instance)?;
            let q = table(&inst, instance)?;
            let space = SolutionSpace::new(inst.n())?;
            println!("optimum={}", q.min());
            for i in q.argmin() {
                println!("{i} {}", space.unindex_u64(i)?);
            }
        }
        Command::Simulate {
            instance,
            gammas,
            times,
            params,
            r,
        } => {
            let (inst, digest) = load(&instance.instance)?;
            let vp = match (params, r) {
                (Some(path), Some(r)) => params_from_csv(path, *r)?,
                (Some(_), None) => return Err(Failure::Usage("--params needs --r".into())),
                _ => VariationalParams::new(
                    parse_reals(gammas.as_deref().unwrap_or(""))?,
                    parse_reals(times.as_deref().unwrap_or(""))?,
                )?,
            };
            let q = table(&inst, instance)?;
            let state = qwoa::evolve(&q, &vp)?;
            let config = json!({"command": "simulate", "instance": digest, "gammas": vp.gammas(), "times": vp.times()});
            let mut art = Artifacts::new(out, &config);
            art.csv(
                "distribution.csv",
                &export::distribution(&qwoa::quality_distribution(&state, &q)?),
            );
            art.csv(
                "amplification.csv",
                &export::amplification(&qwoa::amplification(&state)),
            );
            art.csv(
                "amplification_by_quality.csv",
                &export::amplification_by_quality(&qwoa::amplification_by_quality(&state, &q)?),
            );
            println!("expectation={}", qwoa::expectation(&state, &q)?);
            report(art.commit()?);
        }
        Command::Optimize {
            instance,
            opt,
            export_states,
        } => {
            let (inst, digest) = load(&instance.instance)?;
            let (r_values, config) = optimizer(opt)?;
            let states = match export_states {
                Some(s) => parse_depths(s)?,
                None => Vec::new(),
            };
            let mut all = r_values.clone();
            all.extend(&states);
            all.sort_unstable();
            all.dedup();
            let q = table(&inst, instance)?;
            let runs = convergence_sweep(&q, &all, &config)?;
            let swept: Vec<OptimizationRun> = runs
                .iter()
                .filter(|r| r_values.contains(&r.depth))
                .cloned()
                .collect();
            let hash_config = json!({
                "command": "optimize",
                "instance": digest,
                "r": r_values,
                "export_states": states,
                "optimizer": config,
            });
            let mut art = Artifacts::new(out, &hash_config);
            art.csv("convergence.csv", &export::convergence(&swept));
            art.csv("parameters.csv", &export::parameters(&swept));
            for run in runs.iter().filter(|r| states.contains(&r.depth)) {
                let state = qwoa::evolve(&q, &run.best)?;
                art.csv(
                    format!("distribution_r{}.csv", run.depth),
                    &export::distribution(&qwoa::quality_distribution(&state, &q)?),
                );
                art.csv(
                    format!("amplification_by_quality_r{}.csv", run.depth),
                    &export::amplification_by_quality(&qwoa::amplification_by_quality(&state, &q)?),
                );
            }
            print_runs(&swept);
            report(art.commit()?);
        }
        Command::Baseline {
            instance,
            r,
            trials,
            seed,
        } => {
            let (inst, digest) = load(&instance.instance)?;
            let r_values = parse_depths(r)?;
            if *trials == 0 {
                return Err(Failure::Usage("--trials must be at least 1".into()));
            }
            let q = table(&inst, instance)?;
            let mut rows = Vec::with_capacity(r_values.len());
            for &r in &r_values {
                let samples = 2 * r as u64;
                let exact = baseline::expected_best_of(&q, samples)?;
                let (est, se) = baseline::monte_carlo_best_of(&q, samples, *trials, *seed)?;
                println!("r={r} samples={samples} exact={exact} monte_carlo={est} stderr={se}");
                rows.push((samples, *trials, est, se, exact));
            }
            let config = json!({"command": "baseline", "instance": digest, "r": r_values, "trials": trials, "seed": seed});
            let mut art = Artifacts::new(out, &config);
            art.csv("baseline.csv", &export::monte_carlo(&rows));
            if r_values.len() >= 3 {
                let records = classical_records(&q, &r_values)?;
                let fit = baseline::fit_power_law(&records, Curve::Classical)?;
                println!(
                    "classical alpha={} (reference {REFERENCE_ALPHA_CLASSICAL})",
                    fit.alpha
                );
                art.csv("baseline_fit.csv", &export::fits(&[fit]));
            }
            report(art.commit()?);
        }
        Command::Compare { instance, opt } => {
            let (inst, digest) = load(&instance.instance)?;
            let (r_values, config) = optimizer(opt)?;
            let q = table(&inst, instance)?;
            let runs = convergence_sweep(&q, &r_values, &config)?;
            let records = baseline::compare(&q, &runs)?;
            let hash_config = json!({"command": "compare", "instance": digest, "r": r_values, "optimizer": config});
            let mut art = Artifacts::new(out, &hash_config);
            art.csv("convergence.csv", &export::convergence(&runs));
            art.csv("parameters.csv", &export::parameters(&runs));
            art.csv("comparison.csv", &export::comparison(&records));
            print_runs(&runs);
            if records.len() >= 3 {
                let fits = [
                    baseline::fit_power_law(&records, Curve::Qwoa)?,
                    baseline::fit_power_law(&records, Curve::Classical)?,
                ];
                for (fit, reference) in fits
                    .iter()
                    .zip([REFERENCE_ALPHA_QWOA, REFERENCE_ALPHA_CLASSICAL])
                {
                    println!(
                        "{} alpha={} residual={} (reference {reference})",
                        fit.curve.name(),
                        fit.alpha,
                        fit.residual
                    );
                }
                art.csv("fit.csv", &export::fits(&fits));
            }
            report(art.commit()?);
        }
        Command::VerifyCircuit { m, t } => {
            let sizes = parse_depths(m)?;
            let times = parse_reals(t)?;
            if times.is_empty() || times.iter().any(|t| *t < 0.0) {
                return Err(Failure::Usage("--t needs non-negative walk times".into()));
            }
            if let Some(&big) = sizes.iter().find(|&&m| m > MAX_VERIFY_SOLUTIONS) {
                return Err(Failure::Resource(format!(
                    "M = {big} exceeds the verification cap of {MAX_VERIFY_SOLUTIONS}"
                )));
            }
            let mut reports: Vec<VerificationReport> = Vec::new();
            for &m in &sizes {
                for &t in &times {
                    reports.push(circuit::verify(m, t)?);
                }
            }
            let mut art = Artifacts::new(
                out,
                &json!({"command": "verify-circuit", "m": sizes, "t": times}),
            );
            art.csv("circuit_verification.csv", &export::verification(&reports));
            let mut failed = 0;
            for r in &reports {
                let ok = r.residual() < VERIFY_RESIDUAL
                    && r.leakage < VERIFY_LEAKAGE
                    && r.ancilla_residual < VERIFY_ANCILLA;
                failed += usize::from(!ok);
                println!(
                    "{} M={} t={} residual={:e} leakage={:e} ancilla={:e}",
                    if ok { "ok  " } else { "FAIL" },
                    r.solutions,
                    r.t,
                    r.residual(),
                    r.leakage,
                    r.ancilla_residual
                );
            }
            if failed > 0 {
                return Err(Failure::Validation(format!(
                    "{failed} circuit checks failed"
                )));
            }
            report(art.commit()?);
        }
        Command::Plot { input, output } => {
            let text = read(input)?;
            let chart = plot::chart_for(&plot::Columns::parse(&text)?)?;
            let name = match output {
                Some(name) => name.clone(),
                None => format!(
                    "{}.svg",
                    input
                        .file_stem()
                        .map(|s| s.to_string_lossy())
                        .unwrap_or_else(|| "plot".into())
                ),
            };
            let mut art = Artifacts::new(
                out,
                &json!({"command": "plot", "input": sha256_hex(text.as_bytes())}),
            );
            art.raw(name, plot::render(&chart).into_bytes());
            report(art.commit()?);
        }
    }
    Ok(())
}

fn report(paths: Vec<std::path::PathBuf>) {
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

/// Validated instance plus the SHA-256 of its file bytes.
fn load(path: &Path) -> Result<(CvrpInstance, String), Failure> {
    let text = read(path)?;
    let inst = CvrpInstance::from_json(&text).map_err(|e| match Failure::from(e) {
        Failure::Validation(m) => Failure::Validation(format!("{}: {m}", path.display())),
        other => other,
    })?;
    Ok((inst, sha256_hex(text.as_bytes())))
}

fn check_cap(space: &SolutionSpace, cap: u64) -> Result<(), Failure> {
    match space.cardinality_u64() {
        Some(m) if m <= cap => Ok(()),
        _ => Err(Failure::Resource(format!(
            "solution space of size {} exceeds the cap of {cap} (raise --max-solutions)",
            space.cardinality()
        ))),
    }
}

fn table(inst: &CvrpInstance, arg: &InstanceArg) -> Result<QualityTable, Failure> {
    Ok(build_quality_table_capped(inst, arg.max_solutions)?)
}

fn parse_solution(text: &str) -> Result<SolutionPartition, Failure> {
    Ok(text.parse::<SolutionPartition>()?)
}

pub fn parse_reals(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Failure::Usage(format!("not a finite number: {s:?}")))
        })
        .collect()
}

/// `1,2,5`, `1..10` (inclusive) or a mix such as `1..3,10`.
pub fn parse_depths(text: &str) -> Result<Vec<usize>, Failure> {
    let bad = || {
        Failure::Usage(format!(
            "cannot read depths {text:?}; use a list like 1,2,5 or a range like 1..10"
        ))
    };
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b
                .trim()
                .trim_start_matches('=')
                .parse()
                .map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    out.sort_unstable();
    out.dedup();
    if out.is_empty() || out[0] == 0 {
        return Err(bad());
    }
    Ok(out)
}

fn optimizer(opt: &OptimizerArgs) -> Result<(Vec<usize>, OptimizerConfig), Failure> {
    let config = OptimizerConfig {
        restarts: opt.restarts,
        budget: opt.budget,
        step: opt.step,
        seed: opt.seed,
        ..Default::default()
    };
    config.check()?;
    Ok((parse_depths(&opt.r)?, config))
}

fn print_runs(runs: &[OptimizationRun]) {
    println!("r best_objective evaluations restart_index");
    for run in runs {
        println!(
            "{} {} {} {}{}",
            run.depth,
            run.best_objective,
            run.evaluations,
            run.restart_index,
            if run.budget_exhausted {
                " (budget exhausted)"
            } else {
                ""
            }
        );
    }
}

/// Reads depth `r` from a `r,j,gamma_j,t_j` export.
fn params_from_csv(path: &Path, r: usize) -> Result<VariationalParams, Failure> {
    let cols = plot::Columns::parse(&read(path)?)?;
    let depth = cols.numeric("r")?;
    let j = cols.numeric("j")?;
    let g = cols.numeric("gamma_j")?;
    let t = cols.numeric("t_j")?;
    let mut layers: Vec<(f64, f64, f64)> = (0..depth.len())
        .filter(|&i| depth[i] == r as f64)
        .map(|i| (j[i], g[i], t[i]))
        .collect();
    if layers.is_empty() {
        return Err(Failure::Validation(format!(
            "{}: no parameters for r = {r}",
            path.display()
        )));
    }
    layers.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(VariationalParams::new(
        layers.iter().map(|l| l.1).collect(),
        layers.iter().map(|l| l.2).collect(),
    )?)
}
