//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qwoa_cvrp::CvrpInstance;

/// Drives a vehicle one package at a time. It leaves the depot full, goes
/// back to reload whenever it runs dry, and returns home once the route is
/// served.
pub fn simulate_route(inst: &CvrpInstance, route: &[usize]) -> f64 {
    let v = inst.capacity;
    let c = &inst.costs;
    let mut at = 0usize;
    let mut load = v;
    let mut total = 0.0;
    let drive = |from: &mut usize, to: usize, total: &mut f64| {
        *total += c[*from][to];
        *from = to;
    };
    for &loc in route {
        drive(&mut at, loc, &mut total);
        let mut demand = inst.packages[loc - 1];
        while demand > 0 {
            if load == 0 {
                drive(&mut at, 0, &mut total);
                load = v;
                drive(&mut at, loc, &mut total);
            }
            load -= 1;
            demand -= 1;
        }
        if load == 0 {
            drive(&mut at, 0, &mut total);
            load = v;
        }
    }
    if at != 0 {
        drive(&mut at, 0, &mut total);
    }
    total
}

pub fn simulate_solution(inst: &CvrpInstance, routes: &[Vec<usize>]) -> f64 {
    routes.iter().map(|r| simulate_route(inst, r)).sum()
}

/// Dense `exp(-i t L)` for the complete graph on the first `m` basis states
/// of a `dim`-dimensional space; rows and columns of non-solutions are zero
/// in `L`.
pub fn dense_walk(m: usize, dim: usize, t: f64) -> DMatrix<Complex64> {
    let lap = DMatrix::from_fn(dim, dim, |i, j| {
        let v = if i >= m || j >= m {
            0.0
        } else if i == j {
            (m - 1) as f64
        } else {
            -1.0
        };
        Complex64::new(0.0, -t * v)
    });
    lap.exp()
}

/// Largest elementwise gap after aligning global phase on the largest
/// entry of `target`.
pub fn aligned_residual(target: &[Complex64], actual: &[Complex64]) -> f64 {
    let k = (0..target.len())
        .max_by(|&a, &b| target[a].norm().total_cmp(&target[b].norm()))
        .unwrap();
    let ratio = target[k] / actual[k];
    let phase = ratio / ratio.norm();
    target
        .iter()
        .zip(actual)
        .map(|(t, a)| (a * phase - t).norm())
        .fold(0.0, f64::max)
}

/// Mean of `min` over every ordered `samples`-tuple of solutions.
pub fn brute_force_best_of(qualities: &[f64], samples: u32) -> f64 {
    let m = qualities.len();
    let total = m.pow(samples);
    let mut sum = 0.0;
    for code in 0..total {
        let mut c = code;
        let mut best = f64::INFINITY;
        for _ in 0..samples {
            best = best.min(qualities[c % m]);
            c /= m;
        }
        sum += best;
    }
    sum / total as f64
}
