//! Brute-force certification of the minimizers: the discretized constrained
//! problems are solved with plain first-order methods on a coarse grid and
//! compared with the closed-form constructions resampled onto that grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::funcmodel::{self, GridFunction};
use crate::l1min;
use crate::l2min;
use crate::problem::ShiftSequence;

pub const DEFAULT_ORACLE_N: usize = 257;
pub const L2_MAX_ITER: usize = 100_000;
pub const L1_MAX_ITER: usize = 200_000;
pub const L2_TOLERANCE: f64 = 1e-6;
pub const L1_TOLERANCE: f64 = 1e-4;

const WINDOW: usize = 100;
const STALL: f64 = 1e-12;
/// Stalls of the subgradient method before this many iterations are ignored.
const L1_MIN_ITER: usize = 1000;

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub p: u32,
    pub n: usize,
    pub oracle_value: f64,
    pub analytic_value: f64,
    pub rel_gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub v_oracle: GridFunction,
    /// Closed-form minimizer on the oracle grid.
    pub v_analytic: GridFunction,
    /// `|Σ wₓ vₓ - A|` for the returned iterate.
    pub constraint_residual: f64,
}

impl OracleReport {
    /// `converged` and `rel_gap` within the tolerance for `p`.
    pub fn passed(&self) -> bool {
        let tol = if self.p == 1 {
            L1_TOLERANCE
        } else {
            L2_TOLERANCE
        };
        self.converged && self.rel_gap < tol
    }

    pub fn max_node_gap(&self) -> f64 {
        self.v_oracle
            .values()
            .iter()
            .zip(self.v_analytic.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn rel_gap(oracle: f64, analytic: f64) -> f64 {
    (oracle - analytic).abs() / analytic.max(1e-12)
}

/// Discrete problem data on the oracle grid: node-major shift values.
struct Discrete {
    k: usize,
    n: usize,
    /// `t[x * k + i]`
    t: Vec<f64>,
    w: Vec<f64>,
    w_sq: f64,
    a: f64,
}

impl Discrete {
    fn new(ts: &ShiftSequence, a: f64) -> Self {
        let k = ts.k();
        let n = ts.n();
        let mut t = Vec::with_capacity(k * n);
        for x in 0..n {
            for f in ts.functions() {
                t.push(f.values()[x]);
            }
        }
        let w = funcmodel::simpson_weights(n, ts.grid().spacing());
        let w_sq = w.iter().map(|v| v * v).sum();
        Self {
            k,
            n,
            t,
            w,
            w_sq,
            a,
        }
    }

    fn row(&self, x: usize) -> &[f64] {
        &self.t[x * self.k..(x + 1) * self.k]
    }

    fn project(&self, v: &mut [f64]) {
        let s: f64 = v.iter().zip(&self.w).map(|(a, b)| a * b).sum();
        let c = (s - self.a) / self.w_sq;
        for (vx, wx) in v.iter_mut().zip(&self.w) {
            *vx -= c * wx;
        }
    }

    fn residual(&self, v: &[f64]) -> f64 {
        (v.iter().zip(&self.w).map(|(a, b)| a * b).sum::<f64>() - self.a).abs()
    }

    fn objective(&self, v: &[f64], p: u32) -> f64 {
        (0..self.n)
            .map(|x| {
                let s: f64 = self
                    .row(x)
                    .iter()
                    .map(|t| {
                        let d = t - v[x];
                        if p == 1 {
                            d.abs()
                        } else {
                            d * d
                        }
                    })
                    .sum();
                self.w[x] * s
            })
            .sum()
    }

    fn range(&self) -> (f64, f64) {
        self.t
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Uniform random start inside the range of the shift values.
    fn initial(&self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = self.range();
        let mut v: Vec<f64> = (0..self.n)
            .map(|_| lo + (hi - lo) * rng.gen::<f64>())
            .collect();
        self.project(&mut v);
        v
    }
}

fn finish(
    ts: &ShiftSequence,
    disc: &Discrete,
    p: u32,
    v: Vec<f64>,
    value: f64,
    analytic: (f64, GridFunction),
    iterations: usize,
    converged: bool,
) -> OracleReport {
    OracleReport {
        p,
        n: disc.n,
        constraint_residual: disc.residual(&v),
        oracle_value: value,
        analytic_value: analytic.0,
        rel_gap: rel_gap(value, analytic.0),
        iterations,
        converged,
        v_oracle: ts.grid().with_values(v),
        v_analytic: analytic.1,
    }
}

pub fn l2_oracle(ts: &ShiftSequence, a: f64, n: usize, seed: u64) -> Result<OracleReport> {
    l2_oracle_with(ts, a, n, seed, L2_MAX_ITER)
}

/// Projected gradient descent on `Σₓ wₓ Σᵢ (tᵢ(xₓ) - vₓ)²` subject to
/// `Σₓ wₓ vₓ = A`, fixed step `1/(2K max w)`.
pub fn l2_oracle_with(
    ts: &ShiftSequence,
    a: f64,
    n: usize,
    seed: u64,
    max_iter: usize,
) -> Result<OracleReport> {
    let ts = ts.resample(n)?;
    let disc = Discrete::new(&ts, a);
    let k = disc.k as f64;
    let w_max = disc.w.iter().copied().fold(0.0, f64::max);
    let step = 1.0 / (2.0 * k * w_max);
    let mut v = disc.initial(seed);
    let mut history = vec![disc.objective(&v, 2)];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        for x in 0..disc.n {
            let sum: f64 = disc.row(x).iter().sum();
            let grad = 2.0 * disc.w[x] * (k * v[x] - sum);
            v[x] -= step * grad;
        }
        disc.project(&mut v);
        iterations += 1;
        let f = disc.objective(&v, 2);
        history.push(f);
        if iterations >= WINDOW && history[iterations - WINDOW] - f < STALL {
            converged = true;
            break;
        }
    }
    let value = *history.last().expect("history starts non-empty");
    let analytic = l2min::l2_minimizer(&ts, a)?;
    Ok(finish(
        &ts,
        &disc,
        2,
        v,
        value,
        (analytic.objective, analytic.v),
        iterations,
        converged,
    ))
}

pub fn l1_oracle(ts: &ShiftSequence, a: f64, n: usize, seed: u64) -> Result<OracleReport> {
    l1_oracle_with(ts, a, n, seed, L1_MAX_ITER)
}

/// Projected subgradient descent on `Σₓ wₓ Σᵢ |tᵢ(xₓ) - vₓ|` subject to
/// `Σₓ wₓ vₓ = A`, steps `η₀/√k` with `η₀` the range of the shift values.
/// The best point seen is kept, where the candidates are the iterates and
/// their running means over `[2^j, k]`.
pub fn l1_oracle_with(
    ts: &ShiftSequence,
    a: f64,
    n: usize,
    seed: u64,
    max_iter: usize,
) -> Result<OracleReport> {
    let ts = ts.resample(n)?;
    let disc = Discrete::new(&ts, a);
    let (lo, hi) = disc.range();
    let eta0 = if hi > lo { hi - lo } else { 1.0 };
    let mut v = disc.initial(seed);
    let mut best_v = v.clone();
    let mut best = disc.objective(&v, 1);
    let mut history = vec![best];
    let mut converged = false;
    let mut iterations = 0;
    let mut grad = vec![0.0; disc.n];
    let mut avg = v.clone();
    let mut avg_count = 1.0;
    while iterations < max_iter {
        let eta = eta0 / ((iterations + 1) as f64).sqrt();
        for x in 0..disc.n {
            let s: f64 = disc
                .row(x)
                .iter()
                .map(|&t| {
                    if v[x] > t {
                        1.0
                    } else if v[x] < t {
                        -1.0
                    } else {
                        0.0
                    }
                })
                .sum();
            grad[x] = disc.w[x] * s;
        }
        for (vx, g) in v.iter_mut().zip(&grad) {
            *vx -= eta * g;
        }
        disc.project(&mut v);
        iterations += 1;
        let f = disc.objective(&v, 1);
        if f < best {
            best = f;
            best_v.copy_from_slice(&v);
        }
        // running mean of the iterates since the last power of two
        if iterations.is_power_of_two() {
            avg.copy_from_slice(&v);
            avg_count = 1.0;
        } else {
            avg_count += 1.0;
            for (m, x) in avg.iter_mut().zip(&v) {
                *m += (x - *m) / avg_count;
            }
        }
        let fa = disc.objective(&avg, 1);
        if fa < best {
            best = fa;
            best_v.copy_from_slice(&avg);
        }
        history.push(best);
        // a stall must also span the second half of the run: the best value
        // of a subgradient method can sit still for a while and then improve
        if iterations >= L1_MIN_ITER.max(WINDOW)
            && history[iterations - WINDOW] - best < STALL
            && history[iterations / 2] - best < STALL
        {
            converged = true;
            break;
        }
    }
    let (_, sol) = l1min::solve(&ts, a)?;
    Ok(finish(
        &ts,
        &disc,
        1,
        best_v,
        best,
        (sol.objective, sol.h),
        iterations,
        converged,
    ))
}
