//! C¹ approximation of a continuous grid function that preserves its
//! integral and imposes prescribed endpoint offsets on the value and the
//! derivative.
//!
//! The pipeline is `f → g1` (linear tail), `→ g2` (integral shift),
//! `→ g3` (Bernstein polynomial), `→ g4` (integral shift),
//! `→ g5` (cubic Hermite patch on the right end), `→ g` (integral shift).
//! Every stage error is measured on the sample grid.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::funcmodel::{self, GridFunction};
use crate::problem::{full_norm, shift_sequence, ProblemSpec, ShiftSequence};

/// Samples together with derivative samples at the same nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct C1GridFunction {
    g: GridFunction,
    d1: Vec<f64>,
}

impl C1GridFunction {
    pub fn new(g: GridFunction, d1: Vec<f64>) -> Result<Self> {
        if d1.len() != g.n() {
            return Err(Error::Grid(format!(
                "{} derivative samples for {} nodes",
                d1.len(),
                g.n()
            )));
        }
        if d1.iter().any(|d| !d.is_finite()) {
            return Err(Error::Grid("non-finite derivative sample".into()));
        }
        Ok(Self { g, d1 })
    }

    pub fn grid(&self) -> &GridFunction {
        &self.g
    }

    pub fn values(&self) -> &[f64] {
        self.g.values()
    }

    pub fn d1(&self) -> &[f64] {
        &self.d1
    }

    pub fn into_parts(self) -> (GridFunction, Vec<f64>) {
        (self.g, self.d1)
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let n = self.g.n();
        let s = ((x - self.g.a()) / self.g.spacing()).clamp(0.0, (n - 1) as f64);
        let i = (s.floor() as usize).min(n - 2);
        (i, s - i as f64)
    }

    /// Value and derivative of the cubic Hermite interpolant at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let (i, tau) = self.locate(x);
        let h = self.g.spacing();
        let v = self.g.values();
        hermite(tau, h, v[i], self.d1[i], v[i + 1], self.d1[i + 1])
    }

    fn shifted(&self, r: f64) -> C1GridFunction {
        C1GridFunction {
            g: self.g.map(|v| v - r),
            d1: self.d1.clone(),
        }
    }
}

/// Cubic Hermite value and derivative at `s ∈ [0, 1]` of a cell of width `w`.
fn hermite(s: f64, w: f64, y0: f64, m0: f64, y1: f64, m1: f64) -> (f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let d00 = 6.0 * s2 - 6.0 * s;
    let d10 = 3.0 * s2 - 4.0 * s + 1.0;
    let d01 = -6.0 * s2 + 6.0 * s;
    let d11 = 3.0 * s2 - 2.0 * s;
    (
        h00 * y0 + h10 * w * m0 + h01 * y1 + h11 * w * m1,
        (d00 * y0 + d10 * w * m0 + d01 * y1 + d11 * w * m1) / w,
    )
}

fn check_delta(g: &GridFunction, delta: f64) -> Result<()> {
    let limit = 0.5 * (g.b() - g.a());
    if !(delta > 0.0 && delta <= limit) {
        return Err(Error::BadDelta { delta, limit });
    }
    Ok(())
}

/// `f` on `[a, b-δ]`, then the segment from `f(b-δ)` to `f(a) + c1`.
pub fn linear_tail(f: &GridFunction, c1: f64, delta: f64) -> Result<GridFunction> {
    check_delta(f, delta)?;
    let start = f.b() - delta;
    let anchor = f.interpolate(start);
    let end = f.first() + c1;
    let slope = (end - anchor) / delta;
    let n = f.n();
    let values = f
        .nodes()
        .zip(f.values())
        .enumerate()
        .map(|(i, (x, &v))| {
            if i == n - 1 {
                end
            } else if x > start {
                anchor + slope * (x - start)
            } else {
                v
            }
        })
        .collect();
    Ok(f.with_values(values))
}

/// `g - (∫g - target)/(b - a)`.
pub fn integral_shift(g: &GridFunction, target: f64) -> GridFunction {
    let r = shift_amount(g, target);
    g.map(|v| v - r)
}

fn shift_amount(g: &GridFunction, target: f64) -> f64 {
    (g.integrate() - target) / (g.b() - g.a())
}

/// Bernstein polynomial of degree `m` built from a grid function, with the
/// coefficients `c_k = g(a + k(b-a)/m)` read off the piecewise-linear
/// interpolant of the samples.
#[derive(Debug, Clone)]
pub struct Bernstein {
    a: f64,
    b: f64,
    coeffs: Vec<f64>,
    diffs: Vec<f64>,
    up: Vec<f64>,
    down: Vec<f64>,
    up_d: Vec<f64>,
    down_d: Vec<f64>,
}

/// Above this degree the binomial weights are summed over a window around
/// their mode instead of running de Casteljau.
pub const DE_CASTELJAU_MAX_DEGREE: usize = 128;

const WEIGHT_FLOOR: f64 = 1e-16;

impl Bernstein {
    pub fn new(g: &GridFunction, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidProblem(
                "Bernstein degree must be at least 1".into(),
            ));
        }
        let (a, b) = (g.a(), g.b());
        let mut coeffs: Vec<f64> = (0..=m)
            .map(|k| g.interpolate(a + (b - a) * k as f64 / m as f64))
            .collect();
        coeffs[0] = g.first();
        coeffs[m] = g.last();
        let diffs: Vec<f64> = coeffs.windows(2).map(|w| w[1] - w[0]).collect();
        let (up, down) = ratio_tables(m);
        let (up_d, down_d) = ratio_tables(m - 1);
        Ok(Self {
            a,
            b,
            coeffs,
            diffs,
            up,
            down,
            up_d,
            down_d,
        })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    fn param(&self, x: f64) -> f64 {
        ((x - self.a) / (self.b - self.a)).clamp(0.0, 1.0)
    }

    pub fn value(&self, x: f64) -> f64 {
        let s = self.param(x);
        if self.degree() <= DE_CASTELJAU_MAX_DEGREE {
            de_casteljau(&self.coeffs, s)
        } else {
            windowed(&self.coeffs, &self.up, &self.down, s)
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let s = self.param(x);
        let m = self.degree();
        let scale = m as f64 / (self.b - self.a);
        let inner = if m == 1 {
            self.diffs[0]
        } else if m <= DE_CASTELJAU_MAX_DEGREE {
            de_casteljau(&self.diffs, s)
        } else {
            windowed(&self.diffs, &self.up_d, &self.down_d, s)
        };
        scale * inner
    }

    /// Values at the nodes of `grid`, node-parallel.
    pub fn sample_values(&self, grid: &GridFunction) -> Vec<f64> {
        (0..grid.n())
            .into_par_iter()
            .map(|i| self.value(grid.node(i)))
            .collect()
    }

    pub fn sample_derivatives(&self, grid: &GridFunction) -> Vec<f64> {
        (0..grid.n())
            .into_par_iter()
            .map(|i| self.derivative(grid.node(i)))
            .collect()
    }
}

/// `up[k] = (m-k)/(k+1)` and `down[k] = k/(m-k+1)`: ratios of consecutive
/// binomial coefficients, shared by every evaluation point.
fn ratio_tables(m: usize) -> (Vec<f64>, Vec<f64>) {
    let up = (0..=m).map(|k| (m - k) as f64 / (k + 1) as f64).collect();
    let down = (0..=m)
        .map(|k| {
            if k == 0 {
                0.0
            } else {
                k as f64 / (m - k + 1) as f64
            }
        })
        .collect();
    (up, down)
}

fn de_casteljau(coeffs: &[f64], s: f64) -> f64 {
    let mut beta = coeffs.to_vec();
    let n = beta.len();
    for r in 1..n {
        for k in 0..n - r {
            beta[k] = (1.0 - s) * beta[k] + s * beta[k + 1];
        }
    }
    beta[0]
}

/// `Σ c_k C(m,k) s^k (1-s)^{m-k}` using normalized weights grown outward
/// from the mode of the binomial distribution. The upward and downward
/// recurrences are advanced in the same loop so the two multiply chains
/// overlap.
fn windowed(coeffs: &[f64], up: &[f64], down: &[f64], s: f64) -> f64 {
    let m = coeffs.len() - 1;
    if s <= 0.0 {
        return coeffs[0];
    }
    if s >= 1.0 {
        return coeffs[m];
    }
    let mode = (((m + 1) as f64 * s).floor() as usize).min(m);
    let r = s / (1.0 - s);
    let inv_r = (1.0 - s) / s;
    let (mut wu, mut wd) = (1.0, 1.0);
    let (mut su, mut sd) = (0.0, 0.0);
    let (mut cu, mut cd) = (0.0, 0.0);
    let (mut ku, mut kd) = (mode, mode);
    let mut going_up = ku < m;
    let mut going_down = kd > 0;
    while going_up || going_down {
        if going_up {
            wu *= up[ku] * r;
            ku += 1;
            su += wu;
            cu += wu * coeffs[ku];
            going_up = ku < m && wu >= WEIGHT_FLOOR;
        }
        if going_down {
            wd *= down[kd] * inv_r;
            kd -= 1;
            sd += wd;
            cd += wd * coeffs[kd];
            going_down = kd > 0 && wd >= WEIGHT_FLOOR;
        }
    }
    (coeffs[mode] + cu + cd) / (1.0 + su + sd)
}

/// Degree-`m` Bernstein polynomial of `g` sampled on `g`'s grid, with its
/// analytic derivative.
pub fn bernstein(g: &GridFunction, m: usize) -> Result<C1GridFunction> {
    let b = Bernstein::new(g, m)?;
    let mut values = b.sample_values(g);
    let n = values.len();
    values[0] = g.first();
    values[n - 1] = g.last();
    C1GridFunction::new(g.with_values(values), b.sample_derivatives(g))
}

/// How the degree search measures the error `B_m(g) - g` on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorNorm {
    Max,
    Lp(u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeChoice {
    pub m: usize,
    pub error: f64,
    /// `error < tol` was reached within the degree cap.
    pub reached: bool,
}

pub const DEFAULT_MAX_DEGREE: usize = 4096;
const FIRST_DEGREE: usize = 8;
const SCREEN_NODES: usize = 512;

/// Smallest degree in `8, 16, 32, …, 4096` whose maximum node error is below
/// `tol`; the cap with its error otherwise.
pub fn choose_bernstein_degree(g: &GridFunction, tol: f64) -> DegreeChoice {
    choose_bernstein_degree_with(g, tol, DEFAULT_MAX_DEGREE, ErrorNorm::Max)
}

/// Doubling search from degree 8 up to `m_max` (rounded down to a power of
/// two times 8). Candidates are first screened on the nodes that carried the
/// largest error for the previous candidate; a partial error already at or
/// above `tol` rejects the candidate without a full evaluation.
pub fn choose_bernstein_degree_with(
    g: &GridFunction,
    tol: f64,
    m_max: usize,
    norm: ErrorNorm,
) -> DegreeChoice {
    search_degree(g, tol, m_max, norm).0
}

/// The degree search, also returning the samples of the chosen polynomial.
fn search_degree(
    g: &GridFunction,
    tol: f64,
    m_max: usize,
    norm: ErrorNorm,
) -> (DegreeChoice, Vec<f64>) {
    let weights = match norm {
        ErrorNorm::Max => Vec::new(),
        ErrorNorm::Lp(_) => funcmodel::simpson_weights(g.n(), g.spacing()),
    };
    let p = match norm {
        ErrorNorm::Max => 1,
        ErrorNorm::Lp(p) => p,
    };
    let contribution = |i: usize, e: f64| match norm {
        ErrorNorm::Max => e.abs(),
        ErrorNorm::Lp(_) => weights[i] * e.abs().powi(p as i32),
    };
    let finish = |acc: f64| match norm {
        ErrorNorm::Max => acc,
        ErrorNorm::Lp(_) => acc.powf(1.0 / p as f64),
    };

    let m_max = m_max.max(FIRST_DEGREE);
    let mut screen: Vec<usize> = Vec::new();
    let mut m = FIRST_DEGREE;
    loop {
        let last = m * 2 > m_max;
        let b = Bernstein::new(g, m).expect("degree is positive");
        let vals = g.values();
        let screened = !last && !screen.is_empty() && {
            let partial = screen
                .iter()
                .map(|&i| contribution(i, b.value(g.node(i)) - vals[i]));
            let acc = match norm {
                ErrorNorm::Max => partial.fold(0.0, f64::max),
                ErrorNorm::Lp(_) => partial.sum(),
            };
            finish(acc) >= tol
        };
        if !screened {
            let approx = b.sample_values(g);
            let contrib: Vec<f64> = approx
                .iter()
                .zip(vals)
                .enumerate()
                .map(|(i, (x, y))| contribution(i, x - y))
                .collect();
            let acc = match norm {
                ErrorNorm::Max => contrib.iter().copied().fold(0.0, f64::max),
                ErrorNorm::Lp(_) => contrib.iter().sum(),
            };
            let error = finish(acc);
            if error < tol || last {
                let choice = DegreeChoice {
                    m,
                    error,
                    reached: error < tol,
                };
                return (choice, approx);
            }
            screen = top_indices(&contrib, SCREEN_NODES);
        }
        m *= 2;
    }
}

fn top_indices(values: &[f64], count: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    let count = count.min(idx.len());
    idx.select_nth_unstable_by(count - 1, |&a, &b| values[b].total_cmp(&values[a]));
    idx.truncate(count);
    idx.sort_unstable();
    idx
}

/// Replaces `g4` on `[b-δ, b]` with the cubic matching value and derivative
/// of `g4` at `b-δ`, the value `g4(b)` and the derivative `g4'(a) + c2`.
pub fn hermite_patch(g4: &C1GridFunction, c2: f64, delta: f64) -> Result<C1GridFunction> {
    let grid = g4.grid();
    check_delta(grid, delta)?;
    let b = grid.b();
    let start = b - delta;
    let (y0, m0) = g4.eval(start);
    let y1 = grid.last();
    let m1 = g4.d1[0] + c2;
    let n = grid.n();
    let mut values = grid.values().to_vec();
    let mut d1 = g4.d1.clone();
    for (i, x) in grid.nodes().enumerate() {
        if i == n - 1 {
            values[i] = y1;
            d1[i] = m1;
        } else if x > start {
            let (v, d) = hermite((x - start) / delta, delta, y0, m0, y1, m1);
            values[i] = v;
            d1[i] = d;
        }
    }
    C1GridFunction::new(grid.with_values(values), d1)
}

#[derive(Debug, Clone)]
pub struct ApproxRequest {
    pub f: GridFunction,
    pub c1: f64,
    pub c2: f64,
    pub target_integral: f64,
    pub epsilon: f64,
    pub p: u32,
}

/// Parameters the pipeline settled on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stages {
    /// Width of the linear tail.
    pub delta: f64,
    /// Bernstein degree.
    pub m: usize,
    /// Width of the Hermite patch.
    pub delta_h: f64,
    /// Degree cap in force for the final round.
    pub m_max: usize,
    /// Number of rounds run (1 when the first round succeeded).
    pub rounds: usize,
    /// `‖g1 - f‖`, `‖g3 - g2‖`, `‖g5 - g4‖`.
    pub stage_errors: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct ApproxResult {
    pub g: C1GridFunction,
    pub achieved_lp_error: f64,
    pub integral_residual: f64,
    pub endpoint_value_residual: f64,
    pub endpoint_deriv_residual: f64,
    pub epsilon: f64,
    pub p: u32,
    pub stages: Stages,
}

impl ApproxResult {
    pub fn within_budget(&self) -> bool {
        self.achieved_lp_error < self.epsilon
    }
}

pub const INITIAL_DELTA_FRACTION: f64 = 1.0 / 64.0;
pub const MAX_ROUNDS: usize = 6;
pub const DEGREE_CAP: usize = 1 << 21;

fn validate(req: &ApproxRequest) -> Result<()> {
    funcmodel::check_norm(req.p)?;
    if !(req.epsilon > 0.0) || !req.epsilon.is_finite() {
        return Err(Error::InvalidProblem(format!(
            "epsilon must be positive, got {}",
            req.epsilon
        )));
    }
    if req.f.n() < 5 {
        return Err(Error::Grid("approximation needs at least 5 nodes".into()));
    }
    for (name, v) in [
        ("c1", req.c1),
        ("c2", req.c2),
        ("target_integral", req.target_integral),
    ] {
        if !v.is_finite() {
            return Err(Error::InvalidProblem(format!("{name} must be finite")));
        }
    }
    Ok(())
}

fn distance(a: &GridFunction, b: &GridFunction, p: u32) -> f64 {
    let diff = a.zip_map(b, |x, y| x - y).expect("pipeline keeps one grid");
    funcmodel::lp_norm(&diff, p).expect("norm checked")
}

/// Largest width from the halving sequence `start, start/2, …` (snapped to
/// whole cells, at least one cell) for which `err(width) ≤ tol`, else the
/// one-cell width.
fn choose_width(
    h: f64,
    start: f64,
    tol: f64,
    mut err: impl FnMut(f64) -> Result<f64>,
) -> Result<(f64, f64)> {
    let mut cells = (start / h).round().max(1.0);
    loop {
        let width = cells * h;
        let e = err(width)?;
        if e <= tol || cells <= 1.0 {
            return Ok((width, e));
        }
        cells = (cells / 2.0).floor().max(1.0);
    }
}

/// Everything a round settles on. The Bernstein derivative is only sampled
/// where the Hermite patch reads it; [`finish`] fills in the rest for the
/// round that is returned.
struct Round {
    delta: f64,
    delta_h: f64,
    choice: DegreeChoice,
    bernstein: Bernstein,
    g3: GridFunction,
    g: GridFunction,
    stage_errors: [f64; 3],
    error: f64,
    m_max: usize,
    round: usize,
}

fn run_round(
    req: &ApproxRequest,
    delta0: f64,
    delta_h0: f64,
    m_max: usize,
    tol: f64,
) -> Result<Round> {
    let f = &req.f;
    let h = f.spacing();
    let p = req.p;
    let n = f.n();

    let (delta, e1) = choose_width(h, delta0, tol, |d| {
        Ok(distance(&linear_tail(f, req.c1, d)?, f, p))
    })?;
    let g1 = linear_tail(f, req.c1, delta)?;
    let g2 = integral_shift(&g1, req.target_integral);

    let (choice, mut values) = search_degree(&g2, tol, m_max, ErrorNorm::Lp(p));
    let bern = Bernstein::new(&g2, choice.m)?;
    values[0] = g2.first();
    values[n - 1] = g2.last();
    let g3 = g2.with_values(values);

    // derivative samples at node 0 and wherever a patch of width ≤ delta_h0 reads them
    let first_patch = (((f.b() - delta_h0 - f.a()) / h).floor() as usize).saturating_sub(1);
    let mut d1 = vec![0.0; n];
    d1[0] = bern.derivative(f.a());
    for (i, d) in d1.iter_mut().enumerate().skip(first_patch.max(1)) {
        *d = bern.derivative(f.node(i));
    }
    let g4 = C1GridFunction { g: g3.clone(), d1 }.shifted(shift_amount(&g3, req.target_integral));

    let (delta_h, e3) = choose_width(h, delta_h0, tol, |d| {
        let g5 = hermite_patch(&g4, req.c2, d)?;
        Ok(distance(g5.grid(), g4.grid(), p))
    })?;
    let g5 = hermite_patch(&g4, req.c2, delta_h)?;
    let g = integral_shift(g5.grid(), req.target_integral);
    Ok(Round {
        delta,
        delta_h,
        error: distance(&g, f, p),
        choice,
        bernstein: bern,
        g3,
        g,
        stage_errors: [e1, choice.error, e3],
        m_max,
        round: 0,
    })
}

fn finish(req: &ApproxRequest, round: Round) -> Result<ApproxResult> {
    let n = req.f.n();
    let d1 = round.bernstein.sample_derivatives(&round.g3);
    let g4 = C1GridFunction::new(round.g3.clone(), d1)?
        .shifted(shift_amount(&round.g3, req.target_integral));
    let g5 = hermite_patch(&g4, req.c2, round.delta_h)?;
    let g = g5.shifted(shift_amount(g5.grid(), req.target_integral));
    debug_assert_eq!(g.grid(), &round.g);
    let vals = g.values();
    Ok(ApproxResult {
        achieved_lp_error: round.error,
        integral_residual: g.grid().integrate() - req.target_integral,
        endpoint_value_residual: vals[n - 1] - vals[0] - req.c1,
        endpoint_deriv_residual: g.d1[n - 1] - g.d1[0] - req.c2,
        epsilon: req.epsilon,
        p: req.p,
        stages: Stages {
            delta: round.delta,
            m: round.choice.m,
            delta_h: round.delta_h,
            m_max: round.m_max,
            rounds: round.round,
            stage_errors: round.stage_errors,
        },
        g,
    })
}

/// Runs the pipeline with stage targets `ε/4`, retrying with halved widths,
/// halved stage targets and a 16× larger degree cap while the measured
/// error is not below `ε`.
pub fn approximate_c1(req: &ApproxRequest) -> Result<ApproxResult> {
    validate(req)?;
    let width = req.f.b() - req.f.a();
    let h = req.f.spacing();
    let mut delta = width * INITIAL_DELTA_FRACTION;
    let mut delta_h = width * INITIAL_DELTA_FRACTION;
    let mut m_max = DEFAULT_MAX_DEGREE;
    let mut tol = req.epsilon / 4.0;
    let mut best: Option<Round> = None;
    for round in 1..=MAX_ROUNDS {
        let mut current = run_round(req, delta, delta_h, m_max, tol)?;
        current.round = round;
        let done = current.error < req.epsilon;
        if best.as_ref().is_none_or(|b| current.error < b.error) {
            best = Some(current);
        }
        if done {
            break;
        }
        let b = best.as_ref().expect("set above");
        if b.delta <= h && b.delta_h <= h && m_max >= DEGREE_CAP {
            break;
        }
        delta = (b.delta / 2.0).max(h);
        delta_h = (b.delta_h / 2.0).max(h);
        m_max = (m_max * 16).min(DEGREE_CAP);
        tol /= 2.0;
    }
    let result = finish(req, best.expect("at least one round"))?;
    if result.within_budget() {
        Ok(result)
    } else {
        Err(Error::ApproxBudgetExceeded(Box::new(result)))
    }
}

/// One term of a PMS sequence.
#[derive(Debug, Clone)]
pub struct PmsEntry {
    pub epsilon: f64,
    /// Best-effort approximation; check `within_budget`.
    pub result: ApproxResult,
    /// `|full_norm(vₙ) - full_norm(v)|` (without roots).
    pub norm_gap: f64,
    /// `2KTεₙ` for p = 1, `Mₙεₙ` for p = 2.
    pub bound: f64,
    /// `Mₙ = ‖Σᵢ (2tᵢ - vₙ - v)‖₂`, p = 2 only.
    pub factor: Option<f64>,
    pub bound_satisfied: bool,
}

impl PmsEntry {
    pub fn within_budget(&self) -> bool {
        self.result.within_budget()
    }
}

/// C¹ feasible inputs approaching `v` along `eps_schedule`.
///
/// For p = 1 each term is approximated to `εₙ · min(1, 2T)` in L¹, so that
/// the gap bound `2KTεₙ` follows from `K‖vₙ - v‖₁`.
pub fn pms_sequence(
    v: &GridFunction,
    spec: &ProblemSpec,
    eps_schedule: &[f64],
    p: u32,
) -> Result<Vec<PmsEntry>> {
    funcmodel::check_norm(p)?;
    let ts = shift_sequence(spec, v.n())?;
    pms_sequence_with(v, spec, &ts, eps_schedule, p)
}

pub fn pms_sequence_with(
    v: &GridFunction,
    spec: &ProblemSpec,
    ts: &ShiftSequence,
    eps_schedule: &[f64],
    p: u32,
) -> Result<Vec<PmsEntry>> {
    funcmodel::check_norm(p)?;
    let base = full_norm(v, ts, p)?;
    let t = spec.t();
    let k = spec.k() as f64;
    let mut out = Vec::with_capacity(eps_schedule.len());
    for &eps in eps_schedule {
        let target = if p == 1 {
            eps * (2.0 * t).min(1.0)
        } else {
            eps
        };
        let req = ApproxRequest {
            f: v.clone(),
            c1: spec.c1(),
            c2: spec.c2(),
            target_integral: spec.a(),
            epsilon: target,
            p,
        };
        let result = match approximate_c1(&req) {
            Ok(r) => r,
            Err(Error::ApproxBudgetExceeded(r)) => *r,
            Err(e) => return Err(e),
        };
        let vn = result.g.grid();
        let gap = (full_norm(vn, ts, p)? - base).abs();
        let (bound, factor) = if p == 1 {
            (2.0 * k * t * eps, None)
        } else {
            let sums: Vec<f64> = (0..v.n())
                .map(|i| {
                    ts.functions()
                        .iter()
                        .map(|ti| 2.0 * ti.values()[i] - vn.values()[i] - v.values()[i])
                        .sum()
                })
                .collect();
            let acc = v.with_values(sums);
            let m = funcmodel::lp_norm(&acc, 2)?;
            (m * eps, Some(m))
        };
        out.push(PmsEntry {
            epsilon: eps,
            bound_satisfied: gap <= bound,
            result,
            norm_gap: gap,
            bound,
            factor,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::from_fn(a, b, n, f).unwrap()
    }

    #[test]
    fn linear_tail_examples() {
        let z = grid(0.0, 1.0, 11, |_| 0.0);
        assert_eq!(linear_tail(&z, 0.0, 0.5).unwrap().max_abs(), 0.0);

        let g1 = linear_tail(&z, 1.0, 0.5).unwrap();
        for (x, v) in g1.nodes().zip(g1.values()) {
            let expected = if x <= 0.5 { 0.0 } else { 2.0 * (x - 0.5) };
            assert!((v - expected).abs() < 1e-15, "x={x}");
        }
        assert_eq!(g1.last(), 1.0);

        assert!(matches!(
            linear_tail(&z, 1.0, 0.5 + 1e-9),
            Err(Error::BadDelta { .. })
        ));
        assert!(matches!(
            linear_tail(&z, 1.0, 0.0),
            Err(Error::BadDelta { .. })
        ));
    }

    #[test]
    fn linear_tail_error_bound() {
        let f = grid(0.0, 1.0, 201, |x| (3.0 * x).sin());
        let c1 = 0.7;
        let delta = 0.1;
        let g1 = linear_tail(&f, c1, delta).unwrap();
        let m1 = f.max_abs().max((f.first() + c1).abs());
        let err = distance(&g1, &f, 1);
        assert!(err <= 2.0 * m1 * delta);
    }

    #[test]
    fn integral_shift_examples() {
        let one = grid(0.0, 1.0, 9, |_| 1.0);
        assert!(integral_shift(&one, 0.0).max_abs() < 1e-15);
        let z = grid(0.0, 2.0, 9, |_| 0.0);
        assert!(integral_shift(&z, 4.0)
            .values()
            .iter()
            .all(|&v| (v - 2.0).abs() < 1e-15));
        let x = grid(0.0, 1.0, 9, |x| x);
        assert_eq!(integral_shift(&x, 0.5), x);
    }

    #[test]
    fn bernstein_examples() {
        let c = grid(0.0, 1.0, 17, |_| 2.5);
        let x = grid(0.0, 1.0, 17, |x| x);
        for m in [1, 3, 8, 100, 200, 1000] {
            let b = bernstein(&c, m).unwrap();
            assert!(b.values().iter().all(|&v| (v - 2.5).abs() < 1e-13), "m={m}");
            assert!(b.d1().iter().all(|&d| d.abs() < 1e-10), "m={m}");
            let b = bernstein(&x, m).unwrap();
            for (node, v) in x.nodes().zip(b.values()) {
                assert!((v - node).abs() < 1e-13, "m={m}");
            }
            assert!(b.d1().iter().all(|&d| (d - 1.0).abs() < 1e-10), "m={m}");
        }
        let sq = grid(0.0, 1.0, 5, |x| x * x);
        let b = bernstein(&sq, 2).unwrap();
        assert!((b.values()[2] - 0.375).abs() < 1e-15);
    }

    #[test]
    fn windowed_matches_de_casteljau() {
        let g = grid(-1.0, 2.0, 41, |x| (2.0 * x).sin() + x.abs());
        let m = 120;
        let b = Bernstein::new(&g, m).unwrap();
        let (up, down) = ratio_tables(m);
        let (up_d, down_d) = ratio_tables(m - 1);
        for i in 0..=50 {
            let s = i as f64 / 50.0;
            let dc = de_casteljau(&b.coeffs, s);
            let w = windowed(&b.coeffs, &up, &down, s);
            assert!((dc - w).abs() < 1e-13, "s={s}: {dc} vs {w}");
            let dc = de_casteljau(&b.diffs, s);
            let w = windowed(&b.diffs, &up_d, &down_d, s);
            assert!((dc - w).abs() < 1e-13);
        }
    }

    #[test]
    fn bernstein_derivative_is_consistent() {
        let g = grid(0.0, 1.0, 101, |x| (4.0 * x).cos());
        for m in [50, 500] {
            let b = Bernstein::new(&g, m).unwrap();
            for &x in &[0.1, 0.37, 0.8] {
                let fd = (b.value(x + 1e-5) - b.value(x - 1e-5)) / 2e-5;
                assert!((fd - b.derivative(x)).abs() < 1e-6, "m={m} x={x}");
            }
        }
    }

    #[test]
    fn choose_degree_examples() {
        let c = grid(0.0, 1.0, 33, |_| 1.0);
        let d = choose_bernstein_degree(&c, 1e-6);
        assert_eq!((d.m, d.reached), (8, true));
        assert!(d.error < 1e-14);

        let x = grid(0.0, 1.0, 33, |x| x);
        let d = choose_bernstein_degree(&x, 1e-6);
        assert_eq!(d.m, 8);

        let kink = grid(0.0, 1.0, 257, |x| (x - 0.5).abs());
        let d = choose_bernstein_degree(&kink, 0.01);
        assert!(d.reached && d.error < 0.01);
        let full = bernstein(&kink, d.m).unwrap();
        let max_err = full
            .values()
            .iter()
            .zip(kink.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!((max_err - d.error).abs() < 1e-15);
        let smaller = bernstein(&kink, d.m / 2).unwrap();
        let smaller_err = smaller
            .values()
            .iter()
            .zip(kink.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(smaller_err >= 0.01);
    }

    #[test]
    fn choose_degree_reports_cap() {
        let kink = grid(0.0, 1.0, 257, |x| (x - 0.5).abs());
        let d = choose_bernstein_degree_with(&kink, 1e-9, 64, ErrorNorm::Max);
        assert_eq!(d.m, 64);
        assert!(!d.reached);
    }

    #[test]
    fn hermite_patch_examples() {
        let line = grid(0.0, 2.0, 9, |x| 3.0 * x - 1.0);
        let g4 = C1GridFunction::new(line.clone(), vec![3.0; 9]).unwrap();
        let g5 = hermite_patch(&g4, 0.0, 0.5).unwrap();
        for (a, b) in g5.values().iter().zip(line.values()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(g5.d1().iter().all(|&d| (d - 3.0).abs() < 1e-13));

        let z = grid(0.0, 2.0, 5, |_| 0.0);
        let g4 = C1GridFunction::new(z, vec![0.0; 5]).unwrap();
        let g5 = hermite_patch(&g4, 1.0, 1.0 - 1e-12).unwrap();
        assert!((g5.values()[3] + 0.125).abs() < 1e-11);
        assert_eq!(g5.d1()[4], 1.0);
        assert!(matches!(
            hermite_patch(&g4, 1.0, 1.0 + 1e-9),
            Err(Error::BadDelta { .. })
        ));
        let g5 = hermite_patch(&g4, 1.0, 1.0).unwrap();
        assert!((g5.values()[3] + 0.125).abs() < 1e-15);
    }

    #[test]
    fn hermite_patch_is_c1_at_seam() {
        let f = grid(0.0, 2.0, 201, |x| (x * 1.3).sin());
        let d: Vec<f64> = f.nodes().map(|x| 1.3 * (x * 1.3).cos()).collect();
        let g4 = C1GridFunction::new(f, d).unwrap();
        let delta = 0.3;
        let g5 = hermite_patch(&g4, -0.4, delta).unwrap();
        let seam = 2.0 - delta;
        let (_, left) = g4.eval(seam);
        let (_, right) = g5.eval(seam + 1e-9);
        assert!((left - right).abs() < 1e-6);
        let n = g5.values().len();
        assert!((g5.d1()[n - 1] - (g5.d1()[0] - 0.4)).abs() < 1e-15);
    }

    #[test]
    fn approximate_zero() {
        let z = grid(-1.0, 1.0, 65, |_| 0.0);
        let r = approximate_c1(&ApproxRequest {
            f: z,
            c1: 0.0,
            c2: 0.0,
            target_integral: 0.0,
            epsilon: 1e-3,
            p: 1,
        })
        .unwrap();
        assert_eq!(r.g.grid().max_abs(), 0.0);
        assert!(r.g.d1().iter().all(|&d| d == 0.0));
        assert_eq!(r.achieved_lp_error, 0.0);
        assert_eq!(r.integral_residual, 0.0);
    }

    #[test]
    fn approximate_kink_in_l1() {
        let f = grid(-1.0, 1.0, 1025, |x| x.abs());
        let r = approximate_c1(&ApproxRequest {
            f: f.clone(),
            c1: 0.3,
            c2: -0.7,
            target_integral: 1.0,
            epsilon: 1e-2,
            p: 1,
        })
        .unwrap();
        assert!(r.achieved_lp_error < 1e-2);
        assert!(r.integral_residual.abs() <= 1e-10);
        assert!(r.endpoint_value_residual.abs() <= 1e-10);
        assert!(r.endpoint_deriv_residual.abs() <= 1e-10);
        // the derivative no longer jumps by 2 at the kink
        let mid = f.n() / 2;
        let d = r.g.d1();
        let jump = (mid - 4..mid + 4)
            .map(|i| (d[i + 1] - d[i]).abs())
            .fold(0.0, f64::max);
        assert!(jump < 0.5, "jump {jump}");
    }

    #[test]
    fn unreachable_budget_is_reported() {
        let f = grid(-1.0, 1.0, 65, |x| x.abs());
        let err = approximate_c1(&ApproxRequest {
            f,
            c1: 0.3,
            c2: -0.7,
            target_integral: 1.0,
            epsilon: 1e-15,
            p: 2,
        })
        .unwrap_err();
        match err {
            Error::ApproxBudgetExceeded(best) => {
                assert!(best.achieved_lp_error >= 1e-15);
                assert!(best.integral_residual.abs() <= 1e-10);
                assert!(best.endpoint_value_residual.abs() <= 1e-10);
                assert!(best.endpoint_deriv_residual.abs() <= 1e-10);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
