//! Statevector engine for the QWOA ansatz over the `M` valid solutions.
//!
//! Basis state `i` is the solution with index `i`. The ansatz starts in the
//! equal superposition `|s>` and alternates a quality-dependent phase shift
//! `exp(-i gamma Q)` with a continuous-time walk on the complete graph of
//! valid solutions. The walk uses the closed form
//! `I + (e^{iMt} - 1)|s><s|`, which differs from `exp(-itL)` only by the
//! global phase `e^{iMt}`, so it costs `O(M)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cvrp::QualityTable;

/// Allowed drift of `sum |a_i|^2` from 1 before an operation is reported as
/// broken. States are never renormalised.
pub const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QwoaError {
    #[error("state has {found} amplitudes, quality table has {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("state space must contain at least one solution")]
    Empty,
    #[error("state norm drifted to {norm_sqr} (|1 - norm| > {NORM_TOLERANCE})")]
    NormDrift { norm_sqr: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, QwoaError>;

/// Sum of `f(lo..hi)` by pairwise (cascade) summation, which fixes the
/// reduction order and keeps rounding error at `O(log n)`.
pub(crate) fn pairwise_sum<T, F>(lo: usize, hi: usize, f: &F) -> T
where
    T: Copy + Default + std::ops::Add<Output = T>,
    F: Fn(usize) -> T,
{
    const BLOCK: usize = 128;
    if hi - lo <= BLOCK {
        let mut acc = T::default();
        for i in lo..hi {
            acc = acc + f(i);
        }
        acc
    } else {
        let mid = lo + (hi - lo) / 2;
        pairwise_sum(lo, mid, f) + pairwise_sum(mid, hi, f)
    }
}

/// `e^{i x} - 1` without cancellation for small `x`.
fn cis_minus_one(x: f64) -> Complex64 {
    let half = (0.5 * x).sin();
    Complex64::new(-2.0 * half * half, x.sin())
}

/// Unit-norm complex amplitudes, one per solution index.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector {
    amps: Vec<Complex64>,
}

impl AmplitudeVector {
    /// Wraps amplitudes; fails if they are not normalised.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(QwoaError::Empty);
        }
        let state = Self { amps };
        state.check_norm()?;
        Ok(state)
    }

    /// The equal superposition `|s>` over `m` solutions.
    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(QwoaError::Empty);
        }
        let a = 1.0 / (m as f64).sqrt();
        Ok(Self {
            amps: vec![Complex64::new(a, 0.0); m],
        })
    }

    /// Computational basis state `|index>`.
    pub fn basis(m: usize, index: usize) -> Result<Self> {
        if index >= m {
            return Err(QwoaError::LengthMismatch {
                expected: m,
                found: index,
            });
        }
        let mut amps = vec![Complex64::default(); m];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        pairwise_sum(0, self.amps.len(), &|i| self.amps[i].norm_sqr())
    }

    pub fn check_norm(&self) -> Result<()> {
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(QwoaError::NormDrift { norm_sqr });
        }
        Ok(())
    }

    fn check_table(&self, q: &QualityTable) -> Result<()> {
        if q.len() != self.len() {
            return Err(QwoaError::LengthMismatch {
                expected: q.len(),
                found: self.len(),
            });
        }
        Ok(())
    }

    /// `a_i <- a_i * exp(-i gamma f(i))`.
    pub fn apply_phase(&mut self, q: &QualityTable, gamma: f64) -> Result<()> {
        self.check_table(q)?;
        let phases: Vec<Complex64> = q
            .levels()
            .iter()
            .map(|l| Complex64::cis(-gamma * l.value))
            .collect();
        for (a, &level) in self.amps.iter_mut().zip(q.level_of()) {
            *a *= phases[level as usize];
        }
        Ok(())
    }

    /// Complete-graph walk for time `t`: `a_i <- a_i + (e^{iMt} - 1) mean(a)`.
    pub fn apply_walk(&mut self, t: f64) {
        let m = self.amps.len() as f64;
        let mean = pairwise_sum(0, self.amps.len(), &|i| self.amps[i]) / m;
        let shift = cis_minus_one(m * t) * mean;
        for a in &mut self.amps {
            *a += shift;
        }
    }
}

/// Initial state `|s>` of the ansatz.
pub fn initial_state(m: usize) -> Result<AmplitudeVector> {
    AmplitudeVector::uniform(m)
}

pub fn apply_phase(s: &AmplitudeVector, q: &QualityTable, gamma: f64) -> Result<AmplitudeVector> {
    let mut out = s.clone();
    out.apply_phase(q, gamma)?;
    Ok(out)
}

pub fn apply_walk(s: &AmplitudeVector, t: f64) -> AmplitudeVector {
    let mut out = s.clone();
    out.apply_walk(t);
    out
}

/// Phase angles `gamma_j` and walk times `t_j` for a depth-`r` ansatz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalParams {
    gammas: Vec<f64>,
    times: Vec<f64>,
}

impl VariationalParams {
    pub fn new(gammas: Vec<f64>, times: Vec<f64>) -> Result<Self> {
        if gammas.len() != times.len() {
            return Err(QwoaError::InvalidParams(format!(
                "{} phase angles but {} walk times",
                gammas.len(),
                times.len()
            )));
        }
        if let Some(g) = gammas.iter().find(|g| !g.is_finite()) {
            return Err(QwoaError::InvalidParams(format!("phase angle {g}")));
        }
        if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(QwoaError::InvalidParams(format!(
                "walk time {t} must be >= 0"
            )));
        }
        Ok(Self { gammas, times })
    }

    pub fn zeros(depth: usize) -> Self {
        Self {
            gammas: vec![0.0; depth],
            times: vec![0.0; depth],
        }
    }

    pub fn depth(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn layers(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.gammas.iter().copied().zip(self.times.iter().copied())
    }

    /// Same ansatz with an identity layer (`gamma = t = 0`) appended.
    pub fn extended(&self) -> Self {
        let mut next = self.clone();
        next.gammas.push(0.0);
        next.times.push(0.0);
        next
    }
}

/// Final state `U_W(t_r) U_Q(gamma_r) ... U_W(t_1) U_Q(gamma_1) |s>`.
pub fn evolve(q: &QualityTable, params: &VariationalParams) -> Result<AmplitudeVector> {
    let mut state = AmplitudeVector::uniform(q.len())?;
    for (gamma, t) in params.layers() {
        state.apply_phase(q, gamma)?;
        state.apply_walk(t);
        state.check_norm()?;
    }
    Ok(state)
}

/// `<s|Q|s>` for the given state.
pub fn expectation(s: &AmplitudeVector, q: &QualityTable) -> Result<f64> {
    s.check_table(q)?;
    let amps = s.amplitudes();
    let f = q.qualities();
    Ok(pairwise_sum(0, amps.len(), &|i| amps[i].norm_sqr() * f[i]))
}

/// Measurement probability of each distinct quality, ascending by quality.
pub fn quality_distribution(s: &AmplitudeVector, q: &QualityTable) -> Result<Vec<(f64, f64)>> {
    s.check_table(q)?;
    let mut probs = vec![0.0; q.levels().len()];
    for (a, &level) in s.amplitudes().iter().zip(q.level_of()) {
        probs[level as usize] += a.norm_sqr();
    }
    Ok(q.levels().iter().map(|l| l.value).zip(probs).collect())
}

/// Per-solution probability relative to the uniform `1/M`.
pub fn amplification(s: &AmplitudeVector) -> Vec<f64> {
    let m = s.len() as f64;
    s.amplitudes().iter().map(|a| a.norm_sqr() * m).collect()
}

/// Mean amplification of the solutions at each distinct quality.
pub fn amplification_by_quality(s: &AmplitudeVector, q: &QualityTable) -> Result<Vec<(f64, f64)>> {
    let dist = quality_distribution(s, q)?;
    let m = q.len() as f64;
    Ok(dist
        .into_iter()
        .zip(q.levels())
        .map(|((value, p), level)| (value, p * m / level.multiplicity as f64))
        .collect())
}

/// The ansatz restricted to quality levels.
///
/// Phase shifts depend only on quality and the walk only adds a common
/// shift, so every solution of a given quality carries the same amplitude
/// throughout the evolution. Tracking one amplitude per distinct quality is
/// exact and costs `O(levels)` per layer instead of `O(M)`.
#[derive(Debug, Clone)]
pub struct LevelEngine {
    values: Vec<f64>,
    weights: Vec<f64>,
    m: f64,
}

impl LevelEngine {
    pub fn new(q: &QualityTable) -> Self {
        Self {
            values: q.levels().iter().map(|l| l.value).collect(),
            weights: q.levels().iter().map(|l| l.multiplicity as f64).collect(),
            m: q.len() as f64,
        }
    }

    pub fn solutions(&self) -> f64 {
        self.m
    }

    /// Amplitude carried by each solution of each level.
    pub fn evolve(&self, params: &VariationalParams) -> Vec<Complex64> {
        self.evolve_raw(params.gammas(), params.times())
    }

    pub(crate) fn evolve_raw(&self, gammas: &[f64], times: &[f64]) -> Vec<Complex64> {
        let mut amps = vec![Complex64::new(1.0 / self.m.sqrt(), 0.0); self.values.len()];
        for (&gamma, &t) in gammas.iter().zip(times) {
            let mut mean = Complex64::default();
            for ((a, &v), &w) in amps.iter_mut().zip(&self.values).zip(&self.weights) {
                *a *= Complex64::cis(-gamma * v);
                mean += *a * w;
            }
            let shift = cis_minus_one(self.m * t) * (mean / self.m);
            for a in &mut amps {
                *a += shift;
            }
        }
        amps
    }

    pub fn objective(&self, params: &VariationalParams) -> f64 {
        self.objective_raw(params.gammas(), params.times())
    }

    pub(crate) fn objective_raw(&self, gammas: &[f64], times: &[f64]) -> f64 {
        let amps = self.evolve_raw(gammas, times);
        amps.iter()
            .zip(&self.values)
            .zip(&self.weights)
            .map(|((a, v), w)| a.norm_sqr() * v * w)
            .sum()
    }

    /// Expands level amplitudes back to the full index space.
    pub fn expand(&self, q: &QualityTable, level_amps: &[Complex64]) -> AmplitudeVector {
        AmplitudeVector {
            amps: q
                .level_of()
                .iter()
                .map(|&l| level_amps[l as usize])
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn toy_table() -> QualityTable {
        QualityTable::from_qualities(vec![3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0]).unwrap()
    }

    fn max_diff(a: &AmplitudeVector, b: &AmplitudeVector) -> f64 {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn scrambled(q: &QualityTable) -> AmplitudeVector {
        let params = VariationalParams::new(vec![0.3, 1.1], vec![0.2, 0.05]).unwrap();
        evolve(q, &params).unwrap()
    }

    #[test]
    fn initial_state_values() {
        assert_eq!(
            initial_state(1).unwrap().amplitudes(),
            &[Complex64::new(1.0, 0.0)]
        );
        let s = initial_state(4).unwrap();
        assert!(s
            .amplitudes()
            .iter()
            .all(|a| *a == Complex64::new(0.5, 0.0)));
        assert_eq!(initial_state(0), Err(QwoaError::Empty));
    }

    #[test]
    fn phase_properties() {
        let q = toy_table();
        let s = scrambled(&q);
        assert_eq!(apply_phase(&s, &q, 0.0).unwrap(), s);
        let shifted = apply_phase(&s, &q, 0.77).unwrap();
        for (a, b) in s.amplitudes().iter().zip(shifted.amplitudes()) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
        let wrapped = apply_phase(&s, &q, 0.77 + 2.0 * PI).unwrap();
        assert!(max_diff(&shifted, &wrapped) < 1e-12);
        let short = AmplitudeVector::uniform(3).unwrap();
        assert!(matches!(
            apply_phase(&short, &q, 1.0),
            Err(QwoaError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn walk_properties() {
        let q = toy_table();
        let m = q.len() as f64;
        let s = scrambled(&q);
        assert!(max_diff(&apply_walk(&s, 2.0 * PI / m), &s) < 1e-12);
        assert!(max_diff(&apply_walk(&s, 0.31), &apply_walk(&s, 0.31 + 2.0 * PI / m)) < 1e-12);
        let composed = apply_walk(&apply_walk(&s, 0.13), 0.4);
        assert!(max_diff(&composed, &apply_walk(&s, 0.53)) < 1e-12);
        assert!((apply_walk(&s, 0.9).norm_sqr() - 1.0).abs() < 1e-12);

        let u = initial_state(8).unwrap();
        let walked = apply_walk(&u, 0.37);
        let target = 1.0 / m.sqrt();
        assert!(walked
            .amplitudes()
            .iter()
            .all(|a| (a.norm() - target).abs() < 1e-15));
    }

    #[test]
    fn evolve_trivial_depths() {
        let q = toy_table();
        let s = initial_state(q.len()).unwrap();
        assert_eq!(evolve(&q, &VariationalParams::zeros(0)).unwrap(), s);
        let params = VariationalParams::new(vec![0.0], vec![0.8]).unwrap();
        let phase = Complex64::cis(8.0 * 0.8);
        let expected =
            AmplitudeVector::new(s.amplitudes().iter().map(|a| a * phase).collect()).unwrap();
        assert!(max_diff(&evolve(&q, &params).unwrap(), &expected) < 1e-14);
    }

    #[test]
    fn expectation_examples() {
        let q = toy_table();
        let u = initial_state(q.len()).unwrap();
        assert!((expectation(&u, &q).unwrap() - q.mean()).abs() < 1e-12);
        let argmin = q.argmin()[0] as usize;
        let b = AmplitudeVector::basis(q.len(), argmin).unwrap();
        assert_eq!(expectation(&b, &q).unwrap(), q.min());
        let s = scrambled(&q);
        let e = expectation(&s, &q).unwrap();
        assert!(e >= q.min() && e <= q.max());
        let walked = apply_walk(&s, 2.0 * PI / q.len() as f64);
        assert!((expectation(&walked, &q).unwrap() - e).abs() < 1e-12);
        let zero_gammas = VariationalParams::new(vec![0.0; 3], vec![0.1, 0.2, 0.3]).unwrap();
        let e0 = expectation(&evolve(&q, &zero_gammas).unwrap(), &q).unwrap();
        assert!((e0 - q.mean()).abs() < 1e-12);
    }

    #[test]
    fn distribution_and_amplification() {
        let q = toy_table();
        let u = initial_state(q.len()).unwrap();
        let dist = quality_distribution(&u, &q).unwrap();
        assert_eq!(dist.len(), q.levels().len());
        for ((value, p), level) in dist.iter().zip(q.levels()) {
            assert_eq!(*value, level.value);
            assert!((p - level.multiplicity as f64 / 8.0).abs() < 1e-15);
        }
        assert!(amplification(&u).iter().all(|a| (a - 1.0).abs() < 1e-12));

        let s = scrambled(&q);
        let total: f64 = quality_distribution(&s, &q)
            .unwrap()
            .iter()
            .map(|(_, p)| p)
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
        let amp = amplification(&s);
        let mean = amp.iter().sum::<f64>() / amp.len() as f64;
        assert!((mean - 1.0).abs() < 1e-12);
        let by_quality = amplification_by_quality(&s, &q).unwrap();
        let weighted: f64 = by_quality
            .iter()
            .zip(q.levels())
            .map(|((_, a), l)| a * l.multiplicity as f64)
            .sum();
        assert!((weighted / 8.0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn params_validation() {
        assert!(VariationalParams::new(vec![1.0], vec![]).is_err());
        assert!(VariationalParams::new(vec![1.0], vec![-0.1]).is_err());
        assert!(VariationalParams::new(vec![f64::NAN], vec![0.1]).is_err());
        let p = VariationalParams::new(vec![1.0], vec![0.5])
            .unwrap()
            .extended();
        assert_eq!(p.gammas(), &[1.0, 0.0]);
        assert_eq!(p.times(), &[0.5, 0.0]);
    }

    #[test]
    fn norm_drift_is_reported() {
        let err = AmplitudeVector::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.1, 0.0)]);
        assert!(matches!(err, Err(QwoaError::NormDrift { .. })));
    }

    #[test]
    fn level_engine_matches_statevector() {
        let q = toy_table();
        let engine = LevelEngine::new(&q);
        let params = VariationalParams::new(vec![0.3, 1.1, 2.5], vec![0.2, 0.05, 0.6]).unwrap();
        let full = evolve(&q, &params).unwrap();
        let reduced = engine.expand(&q, &engine.evolve(&params));
        assert!(max_diff(&full, &reduced) < 1e-14);
        let e = expectation(&full, &q).unwrap();
        assert!((engine.objective(&params) - e).abs() < 1e-12);
    }
}
