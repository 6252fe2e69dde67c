//! Variational loop: quasi-Newton (BFGS) descent on the expectation
//! objective with central finite-difference gradients and seeded restarts.
//!
//! Internally the search runs in rescaled coordinates `u_j = sigma * gamma_j`
//! and `tau_j = M * t_j`, where `sigma` is the standard deviation of the
//! qualities. In these units both parameter families act on the objective at
//! unit scale, so one finite-difference step and an identity initial Hessian
//! suit every instance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::cvrp::QualityTable;
use crate::qwoa::{self, LevelEngine, QwoaError, VariationalParams};

pub type Result<T> = std::result::Result<T, QwoaError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Random starts per depth, on top of the warm starts.
    pub restarts: usize,
    /// Objective evaluations per depth, shared evenly by all starts.
    pub budget: usize,
    /// Finite-difference step in rescaled coordinates.
    pub step: f64,
    pub seed: u64,
    /// Upper end of the random `gamma` box. `None` uses
    /// `min(2 pi, 2 pi / (4 sigma))`, the first quarter of the phase period
    /// of a quality spread `sigma`.
    pub gamma_max: Option<f64>,
    /// Stop once the gradient infinity-norm (rescaled units) drops below this.
    pub gradient_tolerance: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 10,
            budget: 5000,
            step: 1e-6,
            seed: 0,
            gamma_max: None,
            gradient_tolerance: 1e-9,
        }
    }
}

impl OptimizerConfig {
    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(QwoaError::InvalidParams(m.to_string()));
        if !(self.step > 0.0 && self.step.is_finite()) {
            return bad("finite-difference step must be positive");
        }
        if self.budget == 0 {
            return bad("evaluation budget must be positive");
        }
        if let Some(g) = self.gamma_max {
            if !(g > 0.0 && g.is_finite()) {
                return bad("gamma range must be positive");
            }
        }
        if self.gradient_tolerance.is_nan() || self.gradient_tolerance < 0.0 {
            return bad("gradient tolerance must be non-negative");
        }
        Ok(())
    }
}

/// Where a start point came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StartKind {
    /// Best parameters of the previous depth with identity layers appended.
    Nested,
    /// Linear interpolation of the previous depth's schedule onto `r` layers.
    Interpolated,
    Random,
}

/// Outcome of optimising one depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationRun {
    pub depth: usize,
    /// Start point of the winning descent.
    pub initial: VariationalParams,
    pub best: VariationalParams,
    pub best_objective: f64,
    /// `best` re-evaluated on the full statevector.
    pub statevector_objective: f64,
    /// Objective evaluations spent at this depth over all starts.
    pub evaluations: usize,
    /// Number of starts tried.
    pub restarts: usize,
    /// Position of the winning start (warm starts first, then random ones).
    pub restart_index: usize,
    pub start_kind: StartKind,
    /// Some start ran out of evaluations before converging.
    pub budget_exhausted: bool,
    /// Objective at each accepted iterate of the winning descent.
    pub trace: Vec<f64>,
}

/// `expectation(evolve(q, params), q)` on the full statevector.
pub fn objective(q: &QualityTable, params: &VariationalParams) -> Result<f64> {
    qwoa::expectation(&qwoa::evolve(q, params)?, q)
}

/// Central finite differences in raw parameters, ordered
/// `[d/dgamma_1.., d/dt_1..]`.
pub fn gradient(q: &QualityTable, params: &VariationalParams, h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(QwoaError::InvalidParams(format!(
            "finite-difference step {h}"
        )));
    }
    let engine = LevelEngine::new(q);
    let r = params.depth();
    let mut x: Vec<f64> = params
        .gammas()
        .iter()
        .chain(params.times())
        .copied()
        .collect();
    let mut g = Vec::with_capacity(2 * r);
    for j in 0..2 * r {
        let x0 = x[j];
        x[j] = x0 + h;
        let up = engine.objective_raw(&x[..r], &x[r..]);
        x[j] = x0 - h;
        let down = engine.objective_raw(&x[..r], &x[r..]);
        x[j] = x0;
        g.push((up - down) / (2.0 * h));
    }
    Ok(g)
}

/// Objective in rescaled coordinates with an evaluation counter.
struct Scaled<'a> {
    engine: &'a LevelEngine,
    gamma_scale: f64,
    time_scale: f64,
    r: usize,
    evaluations: usize,
    budget: usize,
    buf_g: Vec<f64>,
    buf_t: Vec<f64>,
}

impl<'a> Scaled<'a> {
    fn value(&mut self, z: &[f64]) -> f64 {
        self.evaluations += 1;
        for j in 0..self.r {
            self.buf_g[j] = z[j] / self.gamma_scale;
            // negative walk times are equivalent to t + 2 pi / M
            self.buf_t[j] = z[self.r + j].rem_euclid(TAU) / self.time_scale;
        }
        self.engine.objective_raw(&self.buf_g, &self.buf_t)
    }

    fn left(&self) -> usize {
        self.budget.saturating_sub(self.evaluations)
    }

    fn gradient(&mut self, z: &mut [f64], h: f64) -> Vec<f64> {
        (0..z.len())
            .map(|j| {
                let z0 = z[j];
                z[j] = z0 + h;
                let up = self.value(z);
                z[j] = z0 - h;
                let down = self.value(z);
                z[j] = z0;
                (up - down) / (2.0 * h)
            })
            .collect()
    }

    fn to_params(&self, z: &[f64]) -> VariationalParams {
        let gammas = z[..self.r].iter().map(|u| u / self.gamma_scale).collect();
        let times = z[self.r..]
            .iter()
            .map(|tau| tau.rem_euclid(TAU) / self.time_scale)
            .collect();
        VariationalParams::new(gammas, times).expect("finite parameters")
    }

    fn to_scaled(&self, p: &VariationalParams) -> Vec<f64> {
        p.gammas()
            .iter()
            .map(|g| g * self.gamma_scale)
            .chain(p.times().iter().map(|t| t * self.time_scale))
            .collect()
    }
}

struct Descent {
    z: Vec<f64>,
    f: f64,
    evaluations: usize,
    exhausted: bool,
    trace: Vec<f64>,
}

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 40;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// BFGS on the inverse Hessian with a backtracking Armijo line search.
fn bfgs(obj: &mut Scaled, mut z: Vec<f64>, h: f64, gtol: f64) -> Descent {
    let n = z.len();
    let mut exhausted = false;
    let mut f = obj.value(&z);
    let mut trace = vec![f];
    let finish = |z: Vec<f64>, f, obj: &Scaled, exhausted, trace| Descent {
        z,
        f,
        evaluations: obj.evaluations,
        exhausted,
        trace,
    };
    if obj.left() < 2 * n {
        return finish(z, f, obj, true, trace);
    }
    let mut g = obj.gradient(&mut z, h);
    let mut hinv = vec![vec![0.0; n]; n];
    for (i, row) in hinv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut first = true;
    loop {
        if g.iter().fold(0.0f64, |m, v| m.max(v.abs())) <= gtol {
            break;
        }
        let mut p: Vec<f64> = hinv.iter().map(|row| -dot(row, &g)).collect();
        let mut slope = dot(&g, &p);
        if slope >= 0.0 {
            for (i, row) in hinv.iter_mut().enumerate() {
                row.iter_mut()
                    .enumerate()
                    .for_each(|(j, v)| *v = (i == j) as u8 as f64);
            }
            p = g.iter().map(|v| -v).collect();
            slope = dot(&g, &p);
        }
        let mut alpha = if first {
            (1.0 / p.iter().map(|v| v * v).sum::<f64>().sqrt()).min(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            if obj.left() == 0 {
                exhausted = true;
                break;
            }
            let trial: Vec<f64> = z.iter().zip(&p).map(|(a, b)| a + alpha * b).collect();
            let ft = obj.value(&trial);
            if ft <= f + ARMIJO * alpha * slope {
                accepted = Some((trial, ft));
                break;
            }
            alpha *= 0.5;
        }
        let Some((mut znew, fnew)) = accepted else {
            break;
        };
        if obj.left() < 2 * n {
            if fnew < f {
                z = znew;
                f = fnew;
                trace.push(f);
            }
            exhausted = true;
            break;
        }
        let gnew = obj.gradient(&mut znew, h);
        let s: Vec<f64> = znew.iter().zip(&z).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            if first {
                let scale = sy / dot(&y, &y);
                for (i, row) in hinv.iter_mut().enumerate() {
                    row.iter_mut()
                        .enumerate()
                        .for_each(|(j, v)| *v = if i == j { scale } else { 0.0 });
                }
            }
            // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            let rho = 1.0 / sy;
            let hy: Vec<f64> = hinv.iter().map(|row| dot(row, &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    hinv[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j])
                        + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
            first = false;
        }
        let progress = f - fnew;
        z = znew;
        f = fnew;
        g = gnew;
        trace.push(f);
        if progress <= 1e-15 * f.abs().max(1.0) {
            break;
        }
    }
    finish(z, f, obj, exhausted, trace)
}

/// Population standard deviation of the qualities.
fn quality_spread(q: &QualityTable) -> f64 {
    let mean = q.mean();
    let var: f64 = q
        .levels()
        .iter()
        .map(|l| l.multiplicity as f64 * (l.value - mean) * (l.value - mean))
        .sum::<f64>()
        / q.len() as f64;
    var.sqrt()
}

/// Interpolated start for depth `prev.depth() + 1`.
pub fn interpolate(prev: &VariationalParams) -> VariationalParams {
    let p = prev.depth();
    let pick = |v: &[f64], i: isize| -> f64 {
        if i < 0 || i as usize >= p {
            0.0
        } else {
            v[i as usize]
        }
    };
    let build = |v: &[f64]| -> Vec<f64> {
        (0..=p)
            .map(|i| {
                let w = i as f64 / p as f64;
                w * pick(v, i as isize - 1) + (1.0 - w) * pick(v, i as isize)
            })
            .collect()
    };
    VariationalParams::new(build(prev.gammas()), build(prev.times())).expect("finite parameters")
}

struct Start {
    kind: StartKind,
    params: VariationalParams,
}

/// Depth-`r` optimisation from the warm start `prev` (depth `r - 1`), or
/// from zeros when `prev` is `None`.
pub fn optimize_from(
    q: &QualityTable,
    r: usize,
    prev: Option<&VariationalParams>,
    config: &OptimizerConfig,
) -> Result<OptimizationRun> {
    config.check()?;
    if r == 0 {
        return Err(QwoaError::InvalidParams("depth must be at least 1".into()));
    }
    let engine = LevelEngine::new(q);
    let m = q.len() as f64;
    let sigma = quality_spread(q);
    let gamma_scale = if sigma > 0.0 { sigma } else { 1.0 };
    let gamma_max = config.gamma_max.unwrap_or_else(|| {
        if sigma > 0.0 {
            (TAU / (4.0 * sigma)).min(TAU)
        } else {
            TAU
        }
    });

    let mut starts = Vec::new();
    let mut nested = prev.cloned().unwrap_or_else(|| VariationalParams::zeros(0));
    if nested.depth() >= r {
        return Err(QwoaError::InvalidParams(format!(
            "warm start has depth {} but target depth is {r}",
            nested.depth()
        )));
    }
    if nested.depth() >= 1 && nested.depth() + 1 == r {
        starts.push(Start {
            kind: StartKind::Interpolated,
            params: interpolate(&nested),
        });
    }
    while nested.depth() < r {
        nested = nested.extended();
    }
    starts.insert(
        0,
        Start {
            kind: StartKind::Nested,
            params: nested,
        },
    );
    for k in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(((r as u64) << 32) | k as u64);
        let gammas = (0..r).map(|_| rng.random_range(0.0..gamma_max)).collect();
        let times = (0..r).map(|_| rng.random_range(0.0..TAU) / m).collect();
        starts.push(Start {
            kind: StartKind::Random,
            params: VariationalParams::new(gammas, times).expect("finite parameters"),
        });
    }

    let per_start = (config.budget / starts.len()).max(1);
    let results: Vec<Descent> = starts
        .par_iter()
        .map(|s| {
            let mut obj = Scaled {
                engine: &engine,
                gamma_scale,
                time_scale: m,
                r,
                evaluations: 0,
                budget: per_start,
                buf_g: vec![0.0; r],
                buf_t: vec![0.0; r],
            };
            let z0 = obj.to_scaled(&s.params);
            bfgs(&mut obj, z0, config.step, config.gradient_tolerance)
        })
        .collect();

    let (winner, best) = results
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.f.total_cmp(&b.1.f).then(a.0.cmp(&b.0)))
        .expect("at least one start");
    let scaler = Scaled {
        engine: &engine,
        gamma_scale,
        time_scale: m,
        r,
        evaluations: 0,
        budget: 0,
        buf_g: Vec::new(),
        buf_t: Vec::new(),
    };
    let best_params = scaler.to_params(&best.z);
    let statevector_objective = objective(q, &best_params)?;
    Ok(OptimizationRun {
        depth: r,
        initial: starts[winner].params.clone(),
        best: best_params,
        best_objective: best.f,
        statevector_objective,
        evaluations: results.iter().map(|d| d.evaluations).sum(),
        restarts: starts.len(),
        restart_index: winner,
        start_kind: starts[winner].kind,
        budget_exhausted: results.iter().any(|d| d.exhausted),
        trace: best.trace.clone(),
    })
}

/// Depth-`r` optimisation with a zero warm start.
pub fn optimize_at_depth(
    q: &QualityTable,
    r: usize,
    config: &OptimizerConfig,
) -> Result<OptimizationRun> {
    optimize_from(q, r, None, config)
}

/// Optimises every depth in ascending `r_values`, warm-starting each depth
/// from the best parameters of the one before.
pub fn convergence_sweep(
    q: &QualityTable,
    r_values: &[usize],
    config: &OptimizerConfig,
) -> Result<Vec<OptimizationRun>> {
    if r_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(QwoaError::InvalidParams(
            "depths must be strictly ascending".into(),
        ));
    }
    let mut runs: Vec<OptimizationRun> = Vec::with_capacity(r_values.len());
    for &r in r_values {
        let prev = runs.last().map(|run| &run.best);
        let run = optimize_from(q, r, prev, config)?;
        runs.push(run);
    }
    Ok(runs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvrp::build_quality_table;
    use crate::instances::example_n3;

    fn n3_table() -> QualityTable {
        build_quality_table(&example_n3()).unwrap()
    }

    #[test]
    fn objective_trivial_values() {
        let q = n3_table();
        assert!((objective(&q, &VariationalParams::zeros(0)).unwrap() - q.mean()).abs() < 1e-12);
        let p = VariationalParams::new(vec![0.0; 3], vec![0.3, 1.2, 0.01]).unwrap();
        assert!((objective(&q, &p).unwrap() - q.mean()).abs() < 1e-12);
    }

    #[test]
    fn objective_periodicities() {
        let q = n3_table();
        let m = q.len() as f64;
        let p = VariationalParams::new(vec![0.21, 0.05], vec![0.11, 0.02]).unwrap();
        let base = objective(&q, &p).unwrap();
        let shifted_t =
            VariationalParams::new(vec![0.21, 0.05], vec![0.11 + TAU / m, 0.02]).unwrap();
        let shifted_g = VariationalParams::new(vec![0.21, 0.05 + TAU], vec![0.11, 0.02]).unwrap();
        assert!((objective(&q, &shifted_t).unwrap() - base).abs() < 1e-10);
        assert!((objective(&q, &shifted_g).unwrap() - base).abs() < 1e-10);
    }

    #[test]
    fn gradient_vanishes_in_t_at_zero_gamma() {
        let q = n3_table();
        let p = VariationalParams::new(vec![0.0, 0.0], vec![0.4, 0.9]).unwrap();
        let g = gradient(&q, &p, 1e-6).unwrap();
        assert_eq!(g.len(), 4);
        assert!(g[2].abs() < 1e-6 && g[3].abs() < 1e-6, "{g:?}");
        assert!(gradient(&q, &p, 0.0).is_err());
    }

    #[test]
    fn gradient_step_halving() {
        let q = n3_table();
        let p = VariationalParams::new(vec![0.13], vec![0.07]).unwrap();
        let g1 = gradient(&q, &p, 1e-3).unwrap();
        let g2 = gradient(&q, &p, 5e-4).unwrap();
        let g4 = gradient(&q, &p, 2.5e-4).unwrap();
        for j in 0..2 {
            let d1 = (g1[j] - g2[j]).abs();
            let d2 = (g2[j] - g4[j]).abs();
            // O(h^2) error: halving h quarters the difference
            assert!(d2 < 0.3 * d1 || d1 < 1e-9, "{d1} {d2}");
        }
    }

    #[test]
    fn interpolation_schedule() {
        let p = VariationalParams::new(vec![1.0, 2.0], vec![3.0, 4.0]).unwrap();
        let next = interpolate(&p);
        assert_eq!(next.gammas(), &[1.0, 1.5, 2.0]);
        assert_eq!(next.times(), &[3.0, 3.5, 4.0]);
    }

    #[test]
    fn depth_one_beats_mean_on_example() {
        let q = n3_table();
        let run = optimize_at_depth(&q, 1, &OptimizerConfig::default()).unwrap();
        assert!(run.best_objective < q.mean() - 1e-6, "{run:?}");
        assert!(run.best_objective >= q.min());
        assert!((run.statevector_objective - run.best_objective).abs() < 1e-9);
        assert!(run.trace.iter().all(|&f| run.best_objective <= f));
        assert!(run.evaluations <= OptimizerConfig::default().budget);
        assert_eq!(run.restarts, 11);
    }

    #[test]
    fn sweep_is_monotone_and_bounded() {
        let q = n3_table();
        let runs = convergence_sweep(
            &q,
            &(1..=6).collect::<Vec<_>>(),
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert_eq!(runs.len(), 6);
        for w in runs.windows(2) {
            assert!(
                w[1].best_objective <= w[0].best_objective,
                "{} {}",
                w[0].best_objective,
                w[1].best_objective
            );
        }
        for run in &runs {
            assert!(run.best_objective <= q.mean() && run.best_objective >= q.min() - 1e-9);
        }
    }

    #[test]
    fn deterministic_runs() {
        let q = n3_table();
        let config = OptimizerConfig {
            seed: 17,
            ..Default::default()
        };
        let a = convergence_sweep(&q, &[1, 2, 3], &config).unwrap();
        let b = convergence_sweep(&q, &[1, 2, 3], &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_input() {
        let q = n3_table();
        let c = OptimizerConfig::default();
        assert!(optimize_at_depth(&q, 0, &c).is_err());
        assert!(convergence_sweep(&q, &[2, 1], &c).is_err());
        let bad = OptimizerConfig { step: -1.0, ..c };
        assert!(optimize_at_depth(&q, 1, &bad).is_err());
    }

    #[test]
    fn tiny_budget_reports_exhaustion() {
        let q = n3_table();
        let config = OptimizerConfig {
            budget: 12,
            restarts: 2,
            ..Default::default()
        };
        let run = optimize_at_depth(&q, 2, &config).unwrap();
        assert!(run.budget_exhausted);
        assert!(run.evaluations <= 12);
        assert!(run.best_objective <= q.mean() + 1e-9);
    }
}
