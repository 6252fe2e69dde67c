//! The CVRP solution space: partitions of `{1..n}` into non-empty, internally
//! ordered routes.
//!
//! Solutions are counted by the unsigned Lah numbers `L(n, k)` and ranked by
//! walking the Lah recursion `L(n,k) = L(n-1,k-1) + (n+k-1) L(n-1,k)`:
//! the largest element is either a singleton route (first term) or sits in
//! one of the `n+k-1` slots of a smaller solution (second term).
//!
//! Routes are kept in canonical order, ascending by their minimum element.
//! Removing or inserting the current largest element never changes the
//! minimum of another route, so slot positions are stable across the
//! recursion.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("problem size must be at least 1, got {0}")]
    InvalidSize(usize),
    #[error("partition has no routes")]
    NoRoutes,
    #[error("route {0} is empty")]
    EmptyRoute(usize),
    #[error("label {label} is outside 1..={n}")]
    LabelOutOfRange { label: usize, n: usize },
    #[error("label {0} appears more than once")]
    DuplicateLabel(usize),
    #[error("partition covers {found} locations, expected {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("index {index} is out of range for n = {n} (cardinality {cardinality})")]
    IndexOutOfRange {
        index: BigUint,
        n: usize,
        cardinality: BigUint,
    },
    #[error("could not parse partition: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, PartitionError>;

/// One CVRP solution: disjoint, non-empty, internally ordered routes covering
/// the locations `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct SolutionPartition {
    n: usize,
    routes: Vec<Vec<usize>>,
}

impl SolutionPartition {
    /// Validates `routes` as a partition of `{1..n}` where `n` is the total
    /// number of labels. Route order is kept as given.
    pub fn new(routes: Vec<Vec<usize>>) -> Result<Self> {
        let n = routes.iter().map(Vec::len).sum();
        Self::with_size(n, routes)
    }

    /// Like [`SolutionPartition::new`] but also checks the problem size.
    pub fn with_size(n: usize, routes: Vec<Vec<usize>>) -> Result<Self> {
        if routes.is_empty() {
            return Err(PartitionError::NoRoutes);
        }
        let mut seen = vec![false; n + 1];
        let mut count = 0;
        for (r, route) in routes.iter().enumerate() {
            if route.is_empty() {
                return Err(PartitionError::EmptyRoute(r));
            }
            for &label in route {
                if label == 0 || label > n {
                    return Err(PartitionError::LabelOutOfRange { label, n });
                }
                if std::mem::replace(&mut seen[label], true) {
                    return Err(PartitionError::DuplicateLabel(label));
                }
                count += 1;
            }
        }
        if count != n {
            return Err(PartitionError::SizeMismatch {
                expected: n,
                found: count,
            });
        }
        Ok(Self { n, routes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn routes(&self) -> &[Vec<usize>] {
        &self.routes
    }

    pub fn num_routes(&self) -> usize {
        self.routes.len()
    }

    pub fn into_routes(self) -> Vec<Vec<usize>> {
        self.routes
    }

    /// Routes sorted ascending by minimum element; order inside each route is
    /// untouched.
    pub fn canonical(&self) -> Self {
        let mut routes = self.routes.clone();
        routes.sort_by_key(|r| r.iter().copied().min());
        Self { n: self.n, routes }
    }

    pub fn is_canonical(&self) -> bool {
        self.routes
            .windows(2)
            .all(|w| w[0].iter().min() < w[1].iter().min())
    }
}

impl TryFrom<Vec<Vec<usize>>> for SolutionPartition {
    type Error = PartitionError;

    fn try_from(routes: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(routes)
    }
}

impl From<SolutionPartition> for Vec<Vec<usize>> {
    fn from(p: SolutionPartition) -> Self {
        p.routes
    }
}

impl fmt::Display for SolutionPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, route) in self.routes.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, label) in route.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{label}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl FromStr for SolutionPartition {
    type Err = PartitionError;

    fn from_str(s: &str) -> Result<Self> {
        let routes: Vec<Vec<usize>> =
            serde_json::from_str(s).map_err(|e| PartitionError::Parse(e.to_string()))?;
        Self::new(routes)
    }
}

/// Canonical form of a partition given as raw routes.
pub fn canonicalize(routes: Vec<Vec<usize>>) -> Result<SolutionPartition> {
    Ok(SolutionPartition::new(routes)?.canonical())
}

/// Position of a solution in the ranked solution space.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SolutionIndex(BigUint);

impl SolutionIndex {
    pub fn new(value: BigUint) -> Self {
        Self(value)
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
}

impl From<u64> for SolutionIndex {
    fn from(v: u64) -> Self {
        Self(BigUint::from(v))
    }
}

impl From<BigUint> for SolutionIndex {
    fn from(v: BigUint) -> Self {
        Self(v)
    }
}

impl fmt::Display for SolutionIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for SolutionIndex {
    type Err = PartitionError;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .parse::<BigUint>()
            .map(Self)
            .map_err(|e| PartitionError::Parse(e.to_string()))
    }
}

/// Integer types the ranking arithmetic can run on.
trait RankInt: Clone + Ord + Sized {
    fn rank_zero() -> Self;
    fn sub_ref(&mut self, other: &Self);
    fn div_rem_small(&self, d: usize) -> (Self, usize);
    /// `add + m * self + p`
    fn horner(&self, m: usize, add: &Self, p: usize) -> Self;
}

impl RankInt for u64 {
    fn rank_zero() -> Self {
        0
    }

    fn sub_ref(&mut self, other: &Self) {
        *self -= *other;
    }

    fn div_rem_small(&self, d: usize) -> (Self, usize) {
        let d = d as u64;
        (self / d, (self % d) as usize)
    }

    fn horner(&self, m: usize, add: &Self, p: usize) -> Self {
        add + (m as u64) * self + p as u64
    }
}

impl RankInt for BigUint {
    fn rank_zero() -> Self {
        Zero::zero()
    }

    fn sub_ref(&mut self, other: &Self) {
        *self -= other;
    }

    fn div_rem_small(&self, d: usize) -> (Self, usize) {
        let d = BigUint::from(d);
        let rem = (self % &d)
            .to_usize()
            .expect("remainder below a usize divisor");
        (self / d, rem)
    }

    fn horner(&self, m: usize, add: &Self, p: usize) -> Self {
        add + self * BigUint::from(m) + BigUint::from(p)
    }
}

/// Table of unsigned Lah numbers `L(n, k)` for `0 <= k <= n <= n_max`, built
/// from the recursion with `L(n, n) = 1`, `L(n, 0) = 0` for `n > 0` and
/// `L(n, k) = 0` for `k > n`.
#[derive(Debug, Clone)]
pub struct LahTable<I = BigUint> {
    rows: Vec<Vec<I>>,
    zero: I,
}

impl LahTable<BigUint> {
    pub fn new(n_max: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let mut row = vec![BigUint::zero(); n + 1];
            for (k, slot) in row.iter_mut().enumerate() {
                *slot = if n == k {
                    BigUint::one()
                } else if k == 0 {
                    BigUint::zero()
                } else {
                    let prev = &rows[n - 1];
                    let a = &prev[k - 1];
                    let b = prev.get(k).cloned().unwrap_or_default();
                    a + b * BigUint::from(n + k - 1)
                };
            }
            rows.push(row);
        }
        Self {
            rows,
            zero: BigUint::zero(),
        }
    }
}

impl LahTable<u64> {
    /// `None` if some entry (or a row sum) overflows `u64`.
    pub fn new_u64(n_max: usize) -> Option<Self> {
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let mut row = vec![0u64; n + 1];
            for k in 0..=n {
                row[k] = if n == k {
                    1
                } else if k == 0 {
                    0
                } else {
                    let prev = &rows[n - 1];
                    let b = prev.get(k).copied().unwrap_or(0);
                    b.checked_mul((n + k - 1) as u64)?
                        .checked_add(prev[k - 1])?
                };
            }
            row.iter().try_fold(0u64, |acc, v| acc.checked_add(*v))?;
            rows.push(row);
        }
        Some(Self { rows, zero: 0 })
    }
}

impl<I> LahTable<I> {
    pub fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// `L(n, k)`, zero for `k > n`.
    pub fn get(&self, n: usize, k: usize) -> &I {
        assert!(
            n <= self.n_max(),
            "n = {n} beyond table size {}",
            self.n_max()
        );
        self.rows[n].get(k).unwrap_or(&self.zero)
    }

    pub fn row(&self, n: usize) -> &[I] {
        &self.rows[n]
    }
}

/// Unsigned Lah number `L(n, k)` via the recursion.
pub fn lah(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    LahTable::new(n).get(n, k).clone()
}

/// Closed form `C(n-1, k-1) * n! / k!`; agrees with [`lah`] everywhere.
pub fn lah_closed_form(n: usize, k: usize) -> BigUint {
    if n == k {
        return BigUint::one();
    }
    if k == 0 || k > n {
        return BigUint::zero();
    }
    let binom = binomial(n - 1, k - 1);
    // n!/k! = (k+1)(k+2)...n
    let falling: BigUint = ((k + 1)..=n).map(BigUint::from).product();
    binom * falling
}

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Size `M = L(n) = sum_k L(n, k)` of the solution space.
pub fn cardinality(n: usize) -> Result<BigUint> {
    if n < 1 {
        return Err(PartitionError::InvalidSize(n));
    }
    Ok(LahTable::new(n).row(n).iter().sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Placement {
    Singleton,
    Slot(usize),
}

/// One recursion step: the largest element `e = n` of a solution with `k`
/// routes, and where it sits.
#[derive(Debug, Clone, Copy)]
struct Step {
    n: usize,
    k: usize,
    placement: Placement,
}

/// Ranking and unranking for a fixed problem size.
#[derive(Debug, Clone)]
pub struct SolutionSpace {
    n: usize,
    big: LahTable<BigUint>,
    small: Option<LahTable<u64>>,
    cardinality: BigUint,
}

impl SolutionSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(PartitionError::InvalidSize(n));
        }
        let big = LahTable::new(n);
        let cardinality = big.row(n).iter().sum();
        Ok(Self {
            n,
            small: LahTable::new_u64(n),
            big,
            cardinality,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lah(&self) -> &LahTable<BigUint> {
        &self.big
    }

    pub fn cardinality(&self) -> &BigUint {
        &self.cardinality
    }

    /// Cardinality when it fits in a `u64` (up to n = 20).
    pub fn cardinality_u64(&self) -> Option<u64> {
        self.small.as_ref().map(|t| t.row(self.n).iter().sum())
    }

    fn check_size(&self, p: &SolutionPartition) -> Result<()> {
        if p.n() != self.n {
            return Err(PartitionError::SizeMismatch {
                expected: self.n,
                found: p.n(),
            });
        }
        Ok(())
    }

    /// Index of `p` in `[0, M)`. Route order of the input does not matter.
    pub fn index(&self, p: &SolutionPartition) -> Result<SolutionIndex> {
        self.check_size(p)?;
        let (k, steps) = decompose(p);
        Ok(SolutionIndex(rank(&self.big, self.n, k, &steps)))
    }

    pub fn index_u64(&self, p: &SolutionPartition) -> Result<u64> {
        self.check_size(p)?;
        let (k, steps) = decompose(p);
        match &self.small {
            Some(table) => Ok(rank(table, self.n, k, &steps)),
            None => rank(&self.big, self.n, k, &steps)
                .to_u64()
                .ok_or_else(|| PartitionError::Parse("index does not fit in u64".into())),
        }
    }

    /// Canonical solution at position `i`.
    pub fn unindex(&self, i: &SolutionIndex) -> Result<SolutionPartition> {
        if i.0 >= self.cardinality {
            return Err(self.out_of_range(i.0.clone()));
        }
        if let (Some(table), Some(v)) = (&self.small, i.to_u64()) {
            return Ok(unrank(table, self.n, v));
        }
        Ok(unrank(&self.big, self.n, i.0.clone()))
    }

    pub fn unindex_u64(&self, i: u64) -> Result<SolutionPartition> {
        match &self.small {
            Some(table) => {
                if BigUint::from(i) >= self.cardinality {
                    return Err(self.out_of_range(BigUint::from(i)));
                }
                Ok(unrank(table, self.n, i))
            }
            None => self.unindex(&SolutionIndex::from(i)),
        }
    }

    fn out_of_range(&self, index: BigUint) -> PartitionError {
        PartitionError::IndexOutOfRange {
            index,
            n: self.n,
            cardinality: self.cardinality.clone(),
        }
    }

    /// All solutions in index order.
    pub fn iter(&self) -> Enumerate {
        Enumerate {
            space: self.clone(),
            next: BigUint::zero(),
        }
    }
}

/// Streams every solution of a given size in index order.
#[derive(Debug, Clone)]
pub struct Enumerate {
    space: SolutionSpace,
    next: BigUint,
}

impl Iterator for Enumerate {
    type Item = SolutionPartition;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.space.cardinality {
            return None;
        }
        let p = self
            .space
            .unindex(&SolutionIndex(self.next.clone()))
            .expect("index below cardinality");
        self.next += 1u32;
        Some(p)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (&self.space.cardinality - &self.next).to_usize();
        (left.unwrap_or(usize::MAX), left)
    }
}

/// All solutions of size `n` in index order.
pub fn enumerate(n: usize) -> Result<Enumerate> {
    Ok(SolutionSpace::new(n)?.iter())
}

pub fn index(p: &SolutionPartition) -> Result<SolutionIndex> {
    SolutionSpace::new(p.n())?.index(p)
}

pub fn unindex(n: usize, i: &SolutionIndex) -> Result<SolutionPartition> {
    SolutionSpace::new(n)?.unindex(i)
}

/// Strips elements `n, n-1, ..., 2` off the canonical form of `p`, recording
/// where each one sat. Returns the route count and the steps (largest first).
fn decompose(p: &SolutionPartition) -> (usize, Vec<Step>) {
    let mut routes = p.canonical().into_routes();
    let total_routes = routes.len();
    let mut k = total_routes;
    let mut steps = Vec::with_capacity(p.n().saturating_sub(1));
    for e in (2..=p.n()).rev() {
        let (r, pos) = routes
            .iter()
            .enumerate()
            .find_map(|(r, route)| route.iter().position(|&x| x == e).map(|pos| (r, pos)))
            .expect("every label present");
        if routes[r].len() == 1 {
            debug_assert_eq!(r, routes.len() - 1, "largest singleton sorts last");
            routes.remove(r);
            steps.push(Step {
                n: e,
                k,
                placement: Placement::Singleton,
            });
            k -= 1;
        } else {
            let offset: usize = routes[..r].iter().map(|route| route.len() + 1).sum();
            routes[r].remove(pos);
            steps.push(Step {
                n: e,
                k,
                placement: Placement::Slot(offset + pos),
            });
        }
    }
    debug_assert_eq!(k, 1);
    (total_routes, steps)
}

fn rank<I: RankInt>(table: &LahTable<I>, n: usize, k: usize, steps: &[Step]) -> I {
    let mut sub = I::rank_zero();
    for step in steps.iter().rev() {
        if let Placement::Slot(p) = step.placement {
            let skipped = table.get(step.n - 1, step.k - 1);
            sub = sub.horner(step.n + step.k - 1, skipped, p);
        }
    }
    // sum_{j<k} L(n, j) + sub
    let mut offset = I::rank_zero();
    for j in 1..k {
        offset = offset.horner(1, table.get(n, j), 0);
    }
    sub.horner(1, &offset, 0)
}

fn unrank<I: RankInt>(table: &LahTable<I>, n: usize, index: I) -> SolutionPartition {
    let mut sub = index;
    let mut k = 1;
    while k <= n {
        let size = table.get(n, k);
        if sub < *size {
            break;
        }
        sub.sub_ref(size);
        k += 1;
    }
    debug_assert!(k <= n);

    let mut placements = Vec::with_capacity(n.saturating_sub(1));
    let (mut nn, mut kk) = (n, k);
    for _e in (2..=n).rev() {
        let singletons = table.get(nn - 1, kk - 1);
        if sub < *singletons {
            placements.push(Placement::Singleton);
            nn -= 1;
            kk -= 1;
        } else {
            sub.sub_ref(singletons);
            let (quot, p) = sub.div_rem_small(nn + kk - 1);
            placements.push(Placement::Slot(p));
            sub = quot;
            nn -= 1;
        }
    }
    debug_assert!(sub == I::rank_zero() && kk == 1);

    let mut routes: Vec<Vec<usize>> = Vec::with_capacity(k);
    routes.push(vec![1]);
    for (e, placement) in (2..=n).zip(placements.into_iter().rev()) {
        match placement {
            Placement::Singleton => routes.push(vec![e]),
            Placement::Slot(p) => {
                let mut offset = 0;
                for route in routes.iter_mut() {
                    if p <= offset + route.len() {
                        route.insert(p - offset, e);
                        break;
                    }
                    offset += route.len() + 1;
                }
            }
        }
    }
    SolutionPartition { n, routes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn part(routes: &[&[usize]]) -> SolutionPartition {
        SolutionPartition::new(routes.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    /// Every ordered partition of {1..n}, built from permutations cut into
    /// consecutive blocks and deduplicated on canonical form.
    fn brute_force_partitions(n: usize) -> HashSet<SolutionPartition> {
        fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
            if items.len() <= 1 {
                return vec![items.to_vec()];
            }
            let mut out = Vec::new();
            for i in 0..items.len() {
                let mut rest = items.to_vec();
                let head = rest.remove(i);
                for mut tail in permutations(&rest) {
                    tail.insert(0, head);
                    out.push(tail);
                }
            }
            out
        }
        let labels: Vec<usize> = (1..=n).collect();
        let mut out = HashSet::new();
        for perm in permutations(&labels) {
            for cuts in 0u32..(1 << (n - 1)) {
                let mut routes = vec![vec![perm[0]]];
                for (i, &x) in perm.iter().enumerate().skip(1) {
                    if cuts & (1 << (i - 1)) != 0 {
                        routes.push(vec![x]);
                    } else {
                        routes.last_mut().unwrap().push(x);
                    }
                }
                out.insert(SolutionPartition::new(routes).unwrap().canonical());
            }
        }
        out
    }

    #[test]
    fn lah_small_values() {
        assert_eq!(lah(3, 3), BigUint::from(1u32));
        assert_eq!(lah(3, 4), BigUint::zero());
        assert_eq!(lah(0, 0), BigUint::one());
        assert_eq!(lah(4, 0), BigUint::zero());
        let by_k = brute_force_partitions(3)
            .into_iter()
            .filter(|p| p.num_routes() == 2)
            .count();
        assert_eq!(by_k, 6);
        assert_eq!(lah(3, 2), BigUint::from(6u32));
        let row4: BigUint = (1..=4).map(|k| lah(4, k)).sum();
        assert_eq!(row4, BigUint::from(73u32));
    }

    #[test]
    fn closed_form_matches_recursion() {
        let table = LahTable::new(20);
        for n in 0..=20 {
            for k in 0..=n {
                assert_eq!(*table.get(n, k), lah_closed_form(n, k), "L({n},{k})");
            }
        }
    }

    #[test]
    fn cardinality_values() {
        assert_eq!(cardinality(1).unwrap(), BigUint::from(1u32));
        assert_eq!(brute_force_partitions(3).len(), 13);
        assert_eq!(cardinality(3).unwrap(), BigUint::from(13u32));
        assert_eq!(brute_force_partitions(5).len(), 501);
        assert_eq!(cardinality(5).unwrap(), BigUint::from(501u32));
        assert_eq!(cardinality(8).unwrap(), BigUint::from(394_353u32));
        assert_eq!(cardinality(0), Err(PartitionError::InvalidSize(0)));
    }

    #[test]
    fn u64_table_limits() {
        // sum of row 19 is 13564373693588558173, row 20 overflows
        assert!(LahTable::new_u64(19).is_some());
        assert!(LahTable::new_u64(20).is_none());
        let big = LahTable::new(19);
        let small = LahTable::new_u64(19).unwrap();
        for k in 0..=19 {
            assert_eq!(BigUint::from(*small.get(19, k)), *big.get(19, k));
        }
    }

    #[test]
    fn canonical_order() {
        assert_eq!(part(&[&[3], &[1, 2]]).canonical(), part(&[&[1, 2], &[3]]));
        assert_eq!(part(&[&[1, 2], &[3]]).canonical(), part(&[&[1, 2], &[3]]));
        assert_eq!(
            part(&[&[2, 5], &[4, 1, 3]]).canonical(),
            part(&[&[4, 1, 3], &[2, 5]])
        );
        assert!(part(&[&[4, 1, 3], &[2, 5]]).is_canonical());
    }

    #[test]
    fn rejects_invalid_partitions() {
        assert_eq!(
            SolutionPartition::new(vec![vec![1, 2], vec![]]),
            Err(PartitionError::EmptyRoute(1))
        );
        assert_eq!(
            SolutionPartition::new(vec![vec![1, 1]]),
            Err(PartitionError::DuplicateLabel(1))
        );
        assert_eq!(
            SolutionPartition::new(vec![vec![1, 3]]),
            Err(PartitionError::LabelOutOfRange { label: 3, n: 2 })
        );
        assert_eq!(
            SolutionPartition::new(vec![]),
            Err(PartitionError::NoRoutes)
        );
        assert!(SolutionPartition::with_size(4, vec![vec![1, 2, 3]]).is_err());
        assert!(canonicalize(vec![vec![2], vec![2]]).is_err());
        assert!("[[1,2],[4]]".parse::<SolutionPartition>().is_err());
        assert!("not json".parse::<SolutionPartition>().is_err());
    }

    #[test]
    fn display_and_parse() {
        let p: SolutionPartition = "[[1, 2], [3]]".parse().unwrap();
        assert_eq!(p.to_string(), "[[1,2],[3]]");
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, "[[1,2],[3]]");
        let back: SolutionPartition = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<SolutionPartition>("[[1,1]]").is_err());
    }

    #[test]
    fn index_examples() {
        assert_eq!(index(&part(&[&[1]])).unwrap(), SolutionIndex::from(0));
        assert_eq!(
            index(&part(&[&[1], &[2], &[3]])).unwrap(),
            SolutionIndex::from(12)
        );
        assert_eq!(unindex(1, &0.into()).unwrap(), part(&[&[1]]));
        assert_eq!(unindex(3, &12.into()).unwrap(), part(&[&[1], &[2], &[3]]));
    }

    #[test]
    fn unindex_rejects_out_of_range() {
        let space = SolutionSpace::new(3).unwrap();
        assert!(matches!(
            space.unindex(&13.into()),
            Err(PartitionError::IndexOutOfRange { .. })
        ));
        assert!(space.unindex_u64(13).is_err());
        assert!(space.index(&part(&[&[1, 2]])).is_err());
    }

    #[test]
    fn roundtrip_up_to_five() {
        for n in 1..=5 {
            let space = SolutionSpace::new(n).unwrap();
            let m = space.cardinality_u64().unwrap();
            for i in 0..m {
                let p = space.unindex_u64(i).unwrap();
                assert!(p.is_canonical());
                assert_eq!(space.index_u64(&p).unwrap(), i);
                assert_eq!(space.index(&p).unwrap(), SolutionIndex::from(i));
            }
        }
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for n in 1..=5 {
            let listed: Vec<_> = enumerate(n).unwrap().collect();
            let distinct: HashSet<_> = listed.iter().cloned().collect();
            assert_eq!(listed.len(), distinct.len());
            assert_eq!(distinct, brute_force_partitions(n));
        }
        let two: HashSet<_> = enumerate(2).unwrap().collect();
        let expected: HashSet<_> = [part(&[&[1, 2]]), part(&[&[2, 1]]), part(&[&[1], &[2]])]
            .into_iter()
            .collect();
        assert_eq!(two, expected);
        assert_eq!(enumerate(4).unwrap().count(), 73);
    }

    #[test]
    fn subspaces_ordered_by_route_count() {
        let space = SolutionSpace::new(5).unwrap();
        let counts: Vec<_> = space.iter().map(|p| p.num_routes()).collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn exact_arithmetic_at_n_64() {
        let space = SolutionSpace::new(64).unwrap();
        assert!(space.cardinality_u64().is_none());
        let last = space.cardinality() - 1u32;
        let p = space.unindex(&SolutionIndex::new(last.clone())).unwrap();
        assert_eq!(p.num_routes(), 64);
        assert_eq!(space.index(&p).unwrap().value(), &last);

        let reversed = SolutionPartition::new(vec![(1..=64).rev().collect()]).unwrap();
        let i = space.index(&reversed).unwrap();
        assert_eq!(space.unindex(&i).unwrap(), reversed);
    }

    proptest! {
        #[test]
        fn index_ignores_route_order(seed in any::<u64>(), n in 1usize..9) {
            let space = SolutionSpace::new(n).unwrap();
            let m = space.cardinality_u64().unwrap();
            let i = seed % m;
            let mut routes = space.unindex_u64(i).unwrap().into_routes();
            let len = routes.len();
            routes.rotate_left((seed as usize / 7) % len);
            let shuffled = SolutionPartition::new(routes).unwrap();
            prop_assert_eq!(space.index_u64(&shuffled).unwrap(), i);
        }

        #[test]
        fn big_roundtrip(bytes in proptest::collection::vec(any::<u8>(), 1..40), n in 20usize..48) {
            let space = SolutionSpace::new(n).unwrap();
            let i = BigUint::from_bytes_le(&bytes) % space.cardinality();
            let p = space.unindex(&SolutionIndex::new(i.clone())).unwrap();
            prop_assert!(p.is_canonical());
            prop_assert_eq!(space.index(&p).unwrap().value().clone(), i);
        }
    }
}
