//! Multi-start bounded Nelder-Mead over a coefficient box.
//!
//! The objective is piecewise-smooth in the rule vector (regime indicators
//! depend on the data, not the rule), so a projected direct search is
//! enough. A coarse grid scan seeds the best starts; additional uniform
//! restarts guard against bad basins. Every evaluated point feeds a global
//! tracker, so the final answer can never lose to the grid.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::seed::rng_from;

/// Optimizer configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptConfig {
    /// Uniform random restarts.
    pub starts: usize,
    /// Coarse-grid resolution per coordinate.
    pub grid_points: usize,
    /// How many of the best grid nodes become Nelder-Mead starts.
    pub grid_seeds: usize,
    /// Iteration budget per Nelder-Mead run.
    pub max_iters: usize,
    /// Convergence: simplex diameter below `tol * (1 + ||x||)`.
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            starts: 20,
            grid_points: 5,
            grid_seeds: 5,
            max_iters: 400,
            tol: 1e-8,
            seed: 0,
        }
    }
}

/// Result of one multi-start minimization.
#[derive(Debug, Clone)]
pub struct OptOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    /// The polishing run from the overall best point converged by the
    /// simplex-diameter criterion.
    pub converged: bool,
    pub iterations: usize,
    pub grid_evaluations: usize,
    /// Best value reached by each start, in start order.
    pub start_values: Vec<f64>,
    /// Best point reached by each start.
    pub start_points: Vec<Vec<f64>>,
}

struct Tracker {
    best_x: Vec<f64>,
    best_f: f64,
    evals: usize,
}

impl Tracker {
    fn eval<F: FnMut(&[f64]) -> f64>(&mut self, f: &mut F, x: &[f64]) -> f64 {
        let v = f(x);
        self.evals += 1;
        if v < self.best_f {
            self.best_f = v;
            self.best_x = x.to_vec();
        }
        v
    }
}

#[inline]
fn clamp_into(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for i in 0..x.len() {
        x[i] = x[i].clamp(lo[i], hi[i]);
    }
}

/// Enumerates an axis-aligned grid with `per_coord` nodes per coordinate.
/// When the full product exceeds `cap`, falls back to `cap` seeded uniform
/// draws so high-dimensional boxes stay tractable.
pub(crate) fn grid_points(lo: &[f64], hi: &[f64], per_coord: usize, cap: usize, seed: u64) -> Vec<Vec<f64>> {
    let p = lo.len();
    let per = per_coord.max(2);
    let total = (per as f64).powi(p as i32);
    if total <= cap as f64 {
        let total = per.pow(p as u32);
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; p];
        loop {
            let point: Vec<f64> = (0..p)
                .map(|i| lo[i] + (hi[i] - lo[i]) * idx[i] as f64 / (per - 1) as f64)
                .collect();
            out.push(point);
            // Mixed-radix increment.
            let mut carry = true;
            for digit in idx.iter_mut() {
                if carry {
                    *digit += 1;
                    if *digit == per {
                        *digit = 0;
                    } else {
                        carry = false;
                    }
                }
            }
            if carry {
                break;
            }
        }
        out
    } else {
        let mut rng = rng_from(seed);
        (0..cap)
            .map(|_| {
                (0..p)
                    .map(|i| rng.random_range(lo[i]..=hi[i]))
                    .collect::<Vec<f64>>()
            })
            .collect()
    }
}

/// One bounded Nelder-Mead run. Candidates are clamped into the box, which
/// realizes the projection step of the projected direct search.
fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    tracker: &mut Tracker,
    lo: &[f64],
    hi: &[f64],
    x0: &[f64],
    max_iters: usize,
    tol: f64,
) -> (Vec<f64>, f64, bool, usize) {
    let p = x0.len();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

    // Initial simplex: x0 plus one inward-directed step per coordinate.
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(p + 1);
    simplex.push(x0.to_vec());
    for i in 0..p {
        let mut v = x0.to_vec();
        let step = 0.1 * (hi[i] - lo[i]);
        v[i] = if v[i] + step <= hi[i] { v[i] + step } else { v[i] - step };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| tracker.eval(f, v)).collect();

    let mut iters = 0;
    let mut converged = false;
    while iters < max_iters {
        iters += 1;
        // Order the simplex.
        let mut order: Vec<usize> = (0..=p).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        let best = order[0];
        let worst = order[p];
        let second_worst = order[p - 1];

        // Convergence by simplex diameter around the best vertex.
        let diameter = order
            .iter()
            .map(|&i| {
                simplex[i]
                    .iter()
                    .zip(&simplex[best])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0f64, f64::max);
        let scale = 1.0 + simplex[best].iter().map(|v| v * v).sum::<f64>().sqrt();
        if diameter < tol * scale {
            converged = true;
            break;
        }

        // Centroid of all but the worst.
        let mut centroid = vec![0.0; p];
        for &i in &order[..p] {
            for j in 0..p {
                centroid[j] += simplex[i][j];
            }
        }
        for c in centroid.iter_mut() {
            *c /= p as f64;
        }

        let mut reflected: Vec<f64> = (0..p)
            .map(|j| centroid[j] + alpha * (centroid[j] - simplex[worst][j]))
            .collect();
        clamp_into(&mut reflected, lo, hi);
        let fr = tracker.eval(f, &reflected);

        if fr < values[best] {
            let mut expanded: Vec<f64> = (0..p)
                .map(|j| centroid[j] + gamma * (reflected[j] - centroid[j]))
                .collect();
            clamp_into(&mut expanded, lo, hi);
            let fe = tracker.eval(f, &expanded);
            if fe < fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if fr < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            // Contract toward the better of (worst, reflected).
            let (toward, f_toward) = if fr < values[worst] {
                (reflected.clone(), fr)
            } else {
                (simplex[worst].clone(), values[worst])
            };
            let mut contracted: Vec<f64> = (0..p)
                .map(|j| centroid[j] + rho * (toward[j] - centroid[j]))
                .collect();
            clamp_into(&mut contracted, lo, hi);
            let fc = tracker.eval(f, &contracted);
            if fc < f_toward {
                simplex[worst] = contracted;
                values[worst] = fc;
            } else {
                // Shrink toward the best vertex.
                let best_point = simplex[best].clone();
                for &i in &order[1..] {
                    for j in 0..p {
                        simplex[i][j] = best_point[j] + sigma * (simplex[i][j] - best_point[j]);
                    }
                    clamp_into(&mut simplex[i], lo, hi);
                    values[i] = tracker.eval(f, &simplex[i]);
                }
            }
        }
    }

    let mut best_idx = 0;
    for i in 1..=p {
        if values[i] < values[best_idx] {
            best_idx = i;
        }
    }
    (simplex[best_idx].clone(), values[best_idx], converged, iters)
}

/// Multi-start bounded minimization over the box `[lo, hi]`.
pub fn minimize_box<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    lo: &[f64],
    hi: &[f64],
    cfg: &OptConfig,
) -> OptOutcome {
    assert_eq!(lo.len(), hi.len());
    let p = lo.len();
    let mut tracker = Tracker {
        best_x: lo.to_vec(),
        best_f: f64::INFINITY,
        evals: 0,
    };

    // Coarse grid scan.
    let grid = grid_points(lo, hi, cfg.grid_points, 20_000, cfg.seed ^ 0x9E37);
    let mut graded: Vec<(f64, usize)> = grid
        .iter()
        .enumerate()
        .map(|(i, x)| (tracker.eval(f, x), i))
        .collect();
    let grid_evaluations = graded.len();
    graded.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));

    // Starts: best grid nodes plus uniform restarts.
    let mut starts: Vec<Vec<f64>> = graded
        .iter()
        .take(cfg.grid_seeds.min(graded.len()))
        .map(|&(_, i)| grid[i].clone())
        .collect();
    let mut rng = rng_from(cfg.seed);
    for _ in 0..cfg.starts {
        starts.push((0..p).map(|i| rng.random_range(lo[i]..=hi[i])).collect());
    }

    let mut iterations = 0;
    let mut start_values = Vec::with_capacity(starts.len());
    let mut start_points = Vec::with_capacity(starts.len());
    for x0 in &starts {
        let (x, v, _conv, it) = nelder_mead(f, &mut tracker, lo, hi, x0, cfg.max_iters, cfg.tol);
        iterations += it;
        start_values.push(v);
        start_points.push(x);
    }

    // Polish from the overall best point; its convergence flag is the one
    // reported.
    let best_x = tracker.best_x.clone();
    let (_, _, converged, it) =
        nelder_mead(f, &mut tracker, lo, hi, &best_x, cfg.max_iters, cfg.tol);
    iterations += it;

    OptOutcome {
        x: tracker.best_x.clone(),
        value: tracker.best_f,
        converged,
        iterations,
        grid_evaluations,
        start_values,
        start_points,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn finds_an_interior_quadratic_minimum() {
        let mut f = |x: &[f64]| (x[0] - 0.3).powi(2) + 2.0 * (x[1] + 0.4).powi(2) + 1.5;
        let out = minimize_box(&mut f, &[-1.0, -1.0], &[1.0, 1.0], &OptConfig::default());
        assert!(out.converged);
        assert_relative_eq!(out.x[0], 0.3, epsilon = 1e-6);
        assert_relative_eq!(out.x[1], -0.4, epsilon = 1e-6);
        assert_relative_eq!(out.value, 1.5, epsilon = 1e-10);
    }

    #[test]
    fn respects_the_box_when_the_minimum_is_outside() {
        let mut f = |x: &[f64]| (x[0] - 5.0).powi(2);
        let out = minimize_box(&mut f, &[-1.0], &[1.0], &OptConfig::default());
        assert_relative_eq!(out.x[0], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn never_loses_to_its_own_grid() {
        let mut f = |x: &[f64]| (x[0].sin() * 3.0).cos() + 0.1 * x[0] * x[0];
        let cfg = OptConfig::default();
        let lo = [-6.0];
        let hi = [6.0];
        let out = minimize_box(&mut f, &lo, &hi, &cfg);
        let grid = grid_points(&lo, &hi, cfg.grid_points, 20_000, cfg.seed ^ 0x9E37);
        let grid_min = grid
            .iter()
            .map(|x| f(x))
            .fold(f64::INFINITY, f64::min);
        assert!(out.value <= grid_min + 1e-15);
    }

    #[test]
    fn deterministic_for_a_fixed_seed() {
        let run = || {
            let mut f = |x: &[f64]| (x[0] - 0.123).powi(2) + (x[1] * x[1] - 0.5).powi(2);
            minimize_box(&mut f, &[-2.0, -2.0], &[2.0, 2.0], &OptConfig::default())
        };
        let a = run();
        let b = run();
        assert_eq!(a.x, b.x);
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn grid_enumeration_is_the_full_product_below_the_cap() {
        let g = grid_points(&[0.0, 0.0], &[1.0, 1.0], 3, 20_000, 1);
        assert_eq!(g.len(), 9);
        let g = grid_points(&[0.0; 9], &[1.0; 9], 5, 20_000, 1);
        assert_eq!(g.len(), 20_000);
    }
}
