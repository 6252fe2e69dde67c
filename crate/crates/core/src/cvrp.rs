//! Capacitated vehicle routing instances and the solution cost function.

use std::fmt;
use std::path::Path;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::partitions::{PartitionError, SolutionIndex, SolutionPartition, SolutionSpace};

/// Largest solution space a quality table is built for unless configured
/// otherwise.
pub const DEFAULT_MAX_SOLUTIONS: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum CvrpError {
    #[error("invalid instance: {0}")]
    Invalid(Violation),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("solution space of size {size} exceeds the cap of {cap}")]
    TooLarge { size: BigUint, cap: u64 },
    #[error("invalid generation config: {0}")]
    Config(String),
    #[error("invalid quality table: {0}")]
    Table(String),
    #[error("instance file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CvrpError>;

/// First broken instance invariant found by [`CvrpInstance::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoLocations,
    ZeroCapacity,
    PackageCount {
        expected: usize,
        found: usize,
    },
    CostRows {
        expected: usize,
        found: usize,
    },
    CostColumns {
        row: usize,
        expected: usize,
        found: usize,
    },
    NonzeroDiagonal {
        node: usize,
        value: f64,
    },
    NonPositiveCost {
        from: usize,
        to: usize,
        value: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoLocations => write!(f, "instance has no delivery locations"),
            Violation::ZeroCapacity => write!(f, "vehicle capacity must be at least 1"),
            Violation::PackageCount { expected, found } => {
                write!(f, "expected {expected} package counts, found {found}")
            }
            Violation::CostRows { expected, found } => {
                write!(f, "cost matrix has {found} rows, expected {expected}")
            }
            Violation::CostColumns {
                row,
                expected,
                found,
            } => {
                write!(f, "cost row {row} has {found} entries, expected {expected}")
            }
            Violation::NonzeroDiagonal { node, value } => {
                write!(f, "diagonal cost C[{node}][{node}] = {value}, must be 0")
            }
            Violation::NonPositiveCost { from, to, value } => {
                write!(
                    f,
                    "cost C[{from}][{to}] = {value}, must be positive and finite"
                )
            }
        }
    }
}

/// One CVRP problem: capacity `V`, package demands `P_1..P_n` and an
/// `(n+1) x (n+1)` cost matrix with the depot as node 0. Costs may be
/// asymmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceFile", into = "InstanceFile")]
pub struct CvrpInstance {
    pub capacity: u64,
    pub packages: Vec<u64>,
    pub costs: Vec<Vec<f64>>,
}

/// On-disk layout; `n` is redundant and cross-checked on load.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    n: usize,
    capacity: u64,
    packages: Vec<u64>,
    costs: Vec<Vec<f64>>,
}

impl TryFrom<InstanceFile> for CvrpInstance {
    type Error = String;

    fn try_from(file: InstanceFile) -> std::result::Result<Self, String> {
        if file.packages.len() != file.n {
            return Err(format!(
                "field n = {} but {} package counts given",
                file.n,
                file.packages.len()
            ));
        }
        Ok(Self {
            capacity: file.capacity,
            packages: file.packages,
            costs: file.costs,
        })
    }
}

impl From<CvrpInstance> for InstanceFile {
    fn from(inst: CvrpInstance) -> Self {
        Self {
            n: inst.packages.len(),
            capacity: inst.capacity,
            packages: inst.packages,
            costs: inst.costs,
        }
    }
}

impl CvrpInstance {
    /// Builds and validates an instance.
    pub fn new(capacity: u64, packages: Vec<u64>, costs: Vec<Vec<f64>>) -> Result<Self> {
        let inst = Self {
            capacity,
            packages,
            costs,
        };
        inst.validate().map_err(CvrpError::Invalid)?;
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.packages.len()
    }

    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let n = self.n();
        if n == 0 {
            return Err(Violation::NoLocations);
        }
        if self.capacity == 0 {
            return Err(Violation::ZeroCapacity);
        }
        if self.costs.len() != n + 1 {
            return Err(Violation::CostRows {
                expected: n + 1,
                found: self.costs.len(),
            });
        }
        for (i, row) in self.costs.iter().enumerate() {
            if row.len() != n + 1 {
                return Err(Violation::CostColumns {
                    row: i,
                    expected: n + 1,
                    found: row.len(),
                });
            }
            for (j, &value) in row.iter().enumerate() {
                if i == j {
                    if value != 0.0 {
                        return Err(Violation::NonzeroDiagonal { node: i, value });
                    }
                } else if !(value > 0.0 && value.is_finite()) {
                    return Err(Violation::NonPositiveCost {
                        from: i,
                        to: j,
                        value,
                    });
                }
            }
        }
        Ok(())
    }

    /// Parses the JSON instance format and validates it.
    pub fn from_json(text: &str) -> Result<Self> {
        let inst: Self =
            serde_json::from_str(text).map_err(|e| CvrpError::Format(e.to_string()))?;
        inst.validate().map_err(CvrpError::Invalid)?;
        Ok(inst)
    }

    /// Parses without validating, for callers that want the violation report.
    pub fn from_json_unchecked(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CvrpError::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("instance serialises");
        out.push('\n');
        out
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn load_unchecked(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_unchecked(&std::fs::read_to_string(path)?)
    }

    /// Cost of a single route, following the vehicle through restocks.
    ///
    /// `LO` (leftover stock) starts at `V` and is always at least 1; `RH`
    /// ("return home") is set when the vehicle is at, or must go back to,
    /// the depot before the next location.
    pub fn route_cost(&self, route: &[usize]) -> f64 {
        let c = &self.costs;
        let v = self.capacity as i64;
        let (&last, body) = route.split_last().expect("routes are non-empty");
        let mut total = 0.0;
        let mut leftover = v;
        let mut return_home = true;

        for (pos, &i) in body.iter().enumerate() {
            let mut packages = self.packages[i - 1] as i64;
            if return_home {
                total += c[0][i];
            }
            let restocks;
            if leftover > packages {
                leftover -= packages;
                restocks = 0;
                return_home = false;
            } else {
                packages -= leftover;
                if packages % v == 0 {
                    restocks = packages / v;
                    return_home = true;
                    leftover = v;
                } else {
                    restocks = packages / v + 1;
                    return_home = false;
                    leftover = v - packages % v;
                }
            }
            total += restocks as f64 * (c[0][i] + c[i][0]);
            if return_home {
                total += c[i][0];
            } else {
                total += c[i][route[pos + 1]];
            }
        }

        let i = last;
        let packages = self.packages[i - 1] as i64;
        if return_home {
            total += c[0][i];
        }
        // floor division: an exact depletion gives (-1).div_euclid(V) = -1
        let restocks = if leftover > packages {
            0
        } else {
            (packages - leftover - 1).div_euclid(v) + 1
        };
        total += restocks as f64 * c[0][i];
        total += (restocks + 1) as f64 * c[i][0];
        total
    }

    fn routes_cost(&self, routes: &[Vec<usize>]) -> f64 {
        routes.iter().map(|r| self.route_cost(r)).sum()
    }
}

/// Total cost `f(x)` of a solution. Route order does not affect the result.
pub fn cost(inst: &CvrpInstance, p: &SolutionPartition) -> Result<f64> {
    if p.n() != inst.n() {
        return Err(PartitionError::SizeMismatch {
            expected: inst.n(),
            found: p.n(),
        }
        .into());
    }
    if p.is_canonical() {
        Ok(inst.routes_cost(p.routes()))
    } else {
        Ok(inst.routes_cost(p.canonical().routes()))
    }
}

/// A distinct solution quality and how many solutions attain it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityLevel {
    pub value: f64,
    pub multiplicity: u64,
}

/// Cost of every solution, by index, plus the histogram of distinct values.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityTable {
    qualities: Vec<f64>,
    levels: Vec<QualityLevel>,
    level_of: Vec<u32>,
}

impl QualityTable {
    /// Wraps precomputed qualities; entries must be positive and finite.
    pub fn from_qualities(qualities: Vec<f64>) -> Result<Self> {
        if qualities.is_empty() {
            return Err(CvrpError::Table("no solutions".into()));
        }
        if let Some((i, q)) = qualities
            .iter()
            .enumerate()
            .find(|(_, q)| !(**q > 0.0 && q.is_finite()))
        {
            return Err(CvrpError::Table(format!("quality {q} at index {i}")));
        }
        let mut sorted = qualities.clone();
        sorted.sort_by(f64::total_cmp);
        let mut levels: Vec<QualityLevel> = Vec::new();
        for q in sorted {
            match levels.last_mut() {
                Some(level) if level.value == q => level.multiplicity += 1,
                _ => levels.push(QualityLevel {
                    value: q,
                    multiplicity: 1,
                }),
            }
        }
        let level_of = qualities
            .iter()
            .map(|q| {
                levels
                    .binary_search_by(|l| l.value.total_cmp(q))
                    .expect("every quality has a level") as u32
            })
            .collect();
        Ok(Self {
            qualities,
            levels,
            level_of,
        })
    }

    /// Number of solutions `M`.
    pub fn len(&self) -> usize {
        self.qualities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qualities.is_empty()
    }

    pub fn qualities(&self) -> &[f64] {
        &self.qualities
    }

    /// Distinct qualities, ascending.
    pub fn levels(&self) -> &[QualityLevel] {
        &self.levels
    }

    /// Position in [`QualityTable::levels`] of each solution's quality.
    pub fn level_of(&self) -> &[u32] {
        &self.level_of
    }

    pub fn min(&self) -> f64 {
        self.levels[0].value
    }

    pub fn max(&self) -> f64 {
        self.levels[self.levels.len() - 1].value
    }

    /// Arithmetic mean over all solutions, summed level by level.
    pub fn mean(&self) -> f64 {
        let total: f64 = self
            .levels
            .iter()
            .map(|l| l.value * l.multiplicity as f64)
            .sum();
        total / self.len() as f64
    }

    pub fn argmin(&self) -> Vec<u64> {
        let best = self.min();
        self.qualities
            .iter()
            .enumerate()
            .filter(|(_, q)| **q == best)
            .map(|(i, _)| i as u64)
            .collect()
    }
}

/// Evaluates every solution of `inst` in index order.
pub fn build_quality_table(inst: &CvrpInstance) -> Result<QualityTable> {
    build_quality_table_capped(inst, DEFAULT_MAX_SOLUTIONS)
}

pub fn build_quality_table_capped(inst: &CvrpInstance, max_solutions: u64) -> Result<QualityTable> {
    inst.validate().map_err(CvrpError::Invalid)?;
    let space = SolutionSpace::new(inst.n())?;
    let m = match space.cardinality_u64() {
        Some(m) if m <= max_solutions => m,
        _ => {
            return Err(CvrpError::TooLarge {
                size: space.cardinality().clone(),
                cap: max_solutions,
            })
        }
    };
    let qualities: Vec<f64> = (0..m as usize)
        .into_par_iter()
        .with_min_len(4096)
        .map(|i| {
            let p = space
                .unindex_u64(i as u64)
                .expect("index below cardinality");
            inst.routes_cost(p.routes())
        })
        .collect();
    QualityTable::from_qualities(qualities)
}

/// Global minimum cost and every index attaining it.
pub fn brute_force_optimum(inst: &CvrpInstance) -> Result<(f64, Vec<SolutionIndex>)> {
    let table = build_quality_table(inst)?;
    let indices = table
        .argmin()
        .into_iter()
        .map(SolutionIndex::from)
        .collect();
    Ok((table.min(), indices))
}

/// Ranges for random instances; integer costs and demands are drawn
/// uniformly from the inclusive ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub capacity: u64,
    pub inter_cost: (u64, u64),
    pub depot_cost: (u64, u64),
    pub packages: (u64, u64),
    /// Draw `C[i][j]` once and mirror it to `C[j][i]`.
    pub symmetric: bool,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        Self {
            capacity: 20,
            inter_cost: (1, 15),
            depot_cost: (10, 20),
            packages: (5, 30),
            symmetric: true,
        }
    }
}

impl GenerationConfig {
    pub fn check(&self) -> Result<()> {
        if self.capacity == 0 {
            return Err(CvrpError::Config("capacity must be at least 1".into()));
        }
        for (name, (lo, hi)) in [
            ("inter_cost", self.inter_cost),
            ("depot_cost", self.depot_cost),
            ("packages", self.packages),
        ] {
            if lo > hi {
                return Err(CvrpError::Config(format!("{name}: min {lo} > max {hi}")));
            }
            if name != "packages" && lo == 0 {
                return Err(CvrpError::Config(format!("{name}: costs must be positive")));
            }
        }
        Ok(())
    }
}

/// Deterministic random instance: the same `(n, seed, config)` always gives
/// the same instance.
#[allow(clippy::needless_range_loop)]
pub fn generate_random_instance(
    n: usize,
    seed: u64,
    config: &GenerationConfig,
) -> Result<CvrpInstance> {
    config.check()?;
    if n == 0 {
        return Err(CvrpError::Invalid(Violation::NoLocations));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |(lo, hi): (u64, u64)| rng.random_range(lo..=hi);

    let packages: Vec<u64> = (0..n).map(|_| draw(config.packages)).collect();
    let mut costs = vec![vec![0.0; n + 1]; n + 1];
    for j in 1..=n {
        costs[0][j] = draw(config.depot_cost) as f64;
        costs[j][0] = if config.symmetric {
            costs[0][j]
        } else {
            draw(config.depot_cost) as f64
        };
    }
    for i in 1..=n {
        for j in (i + 1)..=n {
            costs[i][j] = draw(config.inter_cost) as f64;
            costs[j][i] = if config.symmetric {
                costs[i][j]
            } else {
                draw(config.inter_cost) as f64
            };
        }
    }
    CvrpInstance::new(config.capacity, packages, costs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use proptest::prelude::*;

    fn part(s: &str) -> SolutionPartition {
        s.parse().unwrap()
    }

    #[test]
    fn worked_example_costs() {
        let inst = instances::example_n3();
        assert_eq!(cost(&inst, &part("[[1,2],[3]]")).unwrap(), 109.0);
        assert_eq!(cost(&inst, &part("[[3],[1,2]]")).unwrap(), 109.0);
        assert_eq!(cost(&inst, &part("[[1],[2],[3]]")).unwrap(), 132.0);
        assert_eq!(inst.route_cost(&[1, 2]), 85.0);
        assert_eq!(inst.route_cost(&[3]), 24.0);
    }

    #[test]
    fn zero_demand_single_location() {
        for capacity in [1, 7, 100] {
            let inst =
                CvrpInstance::new(capacity, vec![0], vec![vec![0.0, 3.0], vec![5.0, 0.0]]).unwrap();
            assert_eq!(cost(&inst, &part("[[1]]")).unwrap(), 8.0);
        }
    }

    #[test]
    fn exact_depletion_returns_home() {
        // 20 packages exactly empty the vehicle at location 1, so location 2
        // is served by a fresh departure.
        let costs = vec![
            vec![0.0, 10.0, 11.0],
            vec![12.0, 0.0, 1.0],
            vec![13.0, 2.0, 0.0],
        ];
        let inst = CvrpInstance::new(20, vec![20, 5], costs.clone()).unwrap();
        assert_eq!(inst.route_cost(&[1, 2]), 10.0 + 12.0 + 11.0 + 13.0);
        // 40 = 20 + one restock, still an exact depletion
        let inst = CvrpInstance::new(20, vec![40, 5], costs).unwrap();
        assert_eq!(inst.route_cost(&[1, 2]), 10.0 + 22.0 + 12.0 + 11.0 + 13.0);
    }

    #[test]
    fn final_location_restocks() {
        let costs = vec![vec![0.0, 4.0], vec![6.0, 0.0]];
        // demand 45 with V = 20: two restock round trips, then home
        let inst = CvrpInstance::new(20, vec![45], costs.clone()).unwrap();
        assert_eq!(inst.route_cost(&[1]), 4.0 + 2.0 * 4.0 + 3.0 * 6.0);
        // demand 40: exactly one restock
        let inst = CvrpInstance::new(20, vec![40], costs).unwrap();
        assert_eq!(inst.route_cost(&[1]), 4.0 + 4.0 + 2.0 * 6.0);
    }

    #[test]
    fn mismatched_size_rejected() {
        let inst = instances::example_n3();
        assert!(matches!(
            cost(&inst, &part("[[1,2]]")),
            Err(CvrpError::Partition(PartitionError::SizeMismatch { .. }))
        ));
    }

    #[test]
    fn validation_reports_first_violation() {
        assert_eq!(instances::reference_n8().validate(), Ok(()));
        let mut inst = instances::example_n3();
        inst.costs[1][1] = 5.0;
        assert_eq!(
            inst.validate(),
            Err(Violation::NonzeroDiagonal {
                node: 1,
                value: 5.0
            })
        );
        let mut inst = instances::example_n3();
        inst.capacity = 0;
        assert_eq!(inst.validate(), Err(Violation::ZeroCapacity));
        let mut inst = instances::example_n3();
        inst.costs[2][0] = 0.0;
        assert!(matches!(
            inst.validate(),
            Err(Violation::NonPositiveCost { from: 2, to: 0, .. })
        ));
        let mut inst = instances::example_n3();
        inst.costs[2][1] = f64::INFINITY;
        assert!(inst.validate().is_err());
        let mut inst = instances::example_n3();
        inst.costs.pop();
        assert!(matches!(inst.validate(), Err(Violation::CostRows { .. })));
    }

    #[test]
    fn instance_json_roundtrip() {
        let inst = instances::reference_n8();
        let text = inst.to_json();
        assert!(text.contains("\"n\": 8"));
        assert_eq!(CvrpInstance::from_json(&text).unwrap(), inst);
        let bad = r#"{"n": 2, "capacity": 5, "packages": [1], "costs": [[0,1],[1,0]]}"#;
        assert!(matches!(
            CvrpInstance::from_json(bad),
            Err(CvrpError::Format(_))
        ));
        let diag = r#"{"n": 1, "capacity": 5, "packages": [1], "costs": [[0,1],[1,2]]}"#;
        assert!(CvrpInstance::from_json_unchecked(diag).is_ok());
        assert!(matches!(
            CvrpInstance::from_json(diag),
            Err(CvrpError::Invalid(_))
        ));
    }

    #[test]
    fn small_quality_table() {
        let inst = instances::example_n3();
        let table = build_quality_table(&inst).unwrap();
        assert_eq!(table.len(), 13);
        let total: u64 = table.levels().iter().map(|l| l.multiplicity).sum();
        assert_eq!(total, 13);
        assert!(table.levels().windows(2).all(|w| w[0].value < w[1].value));
        let space = SolutionSpace::new(3).unwrap();
        for (i, q) in table.qualities().iter().enumerate() {
            let p = space.unindex_u64(i as u64).unwrap();
            assert_eq!(*q, cost(&inst, &p).unwrap());
            assert_eq!(table.levels()[table.level_of()[i] as usize].value, *q);
        }
    }

    #[test]
    fn quality_table_cap() {
        let inst = instances::reference_n8();
        assert!(matches!(
            build_quality_table_capped(&inst, 1000),
            Err(CvrpError::TooLarge { .. })
        ));
    }

    #[test]
    fn table_rejects_bad_qualities() {
        assert!(QualityTable::from_qualities(vec![]).is_err());
        assert!(QualityTable::from_qualities(vec![1.0, -2.0]).is_err());
        assert!(QualityTable::from_qualities(vec![1.0, f64::NAN]).is_err());
        let t = QualityTable::from_qualities(vec![2.0, 1.0, 2.0, 2.0]).unwrap();
        assert_eq!(t.mean(), 1.75);
        assert_eq!(t.argmin(), vec![1]);
    }

    #[test]
    fn optimum_matches_direct_enumeration() {
        for seed in 0..5 {
            for n in 1..=6 {
                let inst = generate_random_instance(n, seed, &GenerationConfig::default()).unwrap();
                let (best, argmin) = brute_force_optimum(&inst).unwrap();
                let direct = crate::partitions::enumerate(n)
                    .unwrap()
                    .map(|p| cost(&inst, &p).unwrap())
                    .fold(f64::INFINITY, f64::min);
                assert_eq!(best, direct);
                assert!(!argmin.is_empty());
            }
        }
        let single = generate_random_instance(1, 9, &GenerationConfig::default()).unwrap();
        let (_, argmin) = brute_force_optimum(&single).unwrap();
        assert_eq!(argmin, vec![SolutionIndex::from(0)]);
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = GenerationConfig::default();
        let a = generate_random_instance(8, 42, &cfg).unwrap();
        let b = generate_random_instance(8, 42, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json(), b.to_json());
        let c = generate_random_instance(8, 43, &cfg).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generation_config_errors() {
        let cfg = GenerationConfig {
            inter_cost: (5, 2),
            ..Default::default()
        };
        assert!(generate_random_instance(3, 0, &cfg).is_err());
        let cfg = GenerationConfig {
            depot_cost: (0, 2),
            ..Default::default()
        };
        assert!(generate_random_instance(3, 0, &cfg).is_err());
        let cfg = GenerationConfig {
            capacity: 0,
            ..Default::default()
        };
        assert!(generate_random_instance(3, 0, &cfg).is_err());
        assert!(generate_random_instance(0, 0, &GenerationConfig::default()).is_err());
    }

    #[test]
    fn generated_instances_valid_over_many_seeds() {
        let cfg = GenerationConfig::default();
        for seed in 0..1000 {
            let n = 1 + (seed as usize % 8);
            let inst = generate_random_instance(n, seed, &cfg).unwrap();
            assert_eq!(inst.validate(), Ok(()));
            for i in 0..=n {
                for j in 0..=n {
                    let c = inst.costs[i][j];
                    if i == j {
                        assert_eq!(c, 0.0);
                    } else if i == 0 || j == 0 {
                        assert!((10.0..=20.0).contains(&c));
                    } else {
                        assert!((1.0..=15.0).contains(&c));
                    }
                }
            }
            assert!(inst.packages.iter().all(|p| (5..=30).contains(p)));
        }
    }

    proptest! {
        #[test]
        fn cost_ignores_route_order(seed in any::<u64>(), n in 1usize..7, rot in 0usize..7) {
            let cfg = GenerationConfig { symmetric: seed % 2 == 0, ..Default::default() };
            let inst = generate_random_instance(n, seed, &cfg).unwrap();
            let space = SolutionSpace::new(n).unwrap();
            let i = seed % space.cardinality_u64().unwrap();
            let p = space.unindex_u64(i).unwrap();
            let mut routes = p.clone().into_routes();
            let k = routes.len();
            routes.rotate_left(rot % k);
            let shuffled = SolutionPartition::new(routes).unwrap();
            let c = cost(&inst, &p).unwrap();
            prop_assert_eq!(c, cost(&inst, &shuffled).unwrap());
            prop_assert!(c > 0.0);
        }

        #[test]
        fn roomy_routes_cost_the_plain_tour(seed in any::<u64>(), n in 1usize..7) {
            // total demand within capacity: no restocks, no early return
            let cfg = GenerationConfig { capacity: 1000, ..Default::default() };
            let inst = generate_random_instance(n, seed, &cfg).unwrap();
            let space = SolutionSpace::new(n).unwrap();
            let p = space.unindex_u64(seed % space.cardinality_u64().unwrap()).unwrap();
            for route in p.routes() {
                let c = &inst.costs;
                let mut expected = c[0][route[0]] + c[route[route.len() - 1]][0];
                for w in route.windows(2) {
                    expected += c[w[0]][w[1]];
                }
                prop_assert_eq!(inst.route_cost(route), expected);
            }
        }
    }
}
