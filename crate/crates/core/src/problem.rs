//! The two-point boundary value problem for `u_tt = u_xx`, its feasibility
//! constants, the period-by-period extension of a decision-interval input,
//! the shift sequence and the D'Alembert solution field.
//!
//! The decision interval is `[-T, T]`. The window `[-(2K1+1)T, (2K2+1)T]` is
//! split into `K = K1 + K2 + 1` periods `[(2k-1)T, (2k+1)T]`, `k = -K1..=K2`,
//! each of which is a closed copy of the decision grid.

use crate::error::{Error, Result};
use crate::funcmodel::{self, GridFunction, SmoothFunction};

/// The three constants every feasible input must respect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraints {
    /// Required value of `∫_{-T}^{T} v`.
    pub a: f64,
    /// Required value of `v(T) - v(-T)`.
    pub c1: f64,
    /// Required value of `v'(T) - v'(-T)`.
    pub c2: f64,
}

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    f0: SmoothFunction,
    ft: SmoothFunction,
    t: f64,
    k1: usize,
    k2: usize,
    constraints: Constraints,
}

impl ProblemSpec {
    pub fn new(
        f0: SmoothFunction,
        ft: SmoothFunction,
        t: f64,
        k1: usize,
        k2: usize,
    ) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidProblem(format!(
                "T must be positive, got {t}"
            )));
        }
        if k1 == 0 || k2 == 0 {
            return Err(Error::InvalidProblem(format!(
                "K1 and K2 must be at least 1, got K1={k1}, K2={k2}"
            )));
        }
        let (lo, hi) = (-((2 * k1 + 1) as f64) * t, ((2 * k2 + 1) as f64) * t);
        for (name, f) in [("f0", &f0), ("fT", &ft)] {
            if !f.covers(lo, hi) {
                let (a, b) = f.domain();
                return Err(Error::Domain(format!(
                    "{name} is defined on [{a}, {b}] but the window is [{lo}, {hi}]"
                )));
            }
        }
        let mut spec = Self {
            f0,
            ft,
            t,
            k1,
            k2,
            constraints: Constraints {
                a: 0.0,
                c1: 0.0,
                c2: 0.0,
            },
        };
        spec.constraints = compute_constraints(&spec);
        Ok(spec)
    }

    pub fn f0(&self) -> &SmoothFunction {
        &self.f0
    }

    pub fn ft(&self) -> &SmoothFunction {
        &self.ft
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn k1(&self) -> usize {
        self.k1
    }

    pub fn k2(&self) -> usize {
        self.k2
    }

    pub fn k(&self) -> usize {
        self.k1 + self.k2 + 1
    }

    pub fn a(&self) -> f64 {
        self.constraints.a
    }

    pub fn c1(&self) -> f64 {
        self.constraints.c1
    }

    pub fn c2(&self) -> f64 {
        self.constraints.c2
    }

    pub fn constraints(&self) -> Constraints {
        self.constraints
    }

    /// `[-(2K1+1)T, (2K2+1)T]`
    pub fn window(&self) -> (f64, f64) {
        (
            -((2 * self.k1 + 1) as f64) * self.t,
            ((2 * self.k2 + 1) as f64) * self.t,
        )
    }

    /// Samples a function on the decision interval `[-T, T]`.
    pub fn sample_decision(&self, f: impl Fn(f64) -> f64, n: usize) -> Result<GridFunction> {
        GridFunction::from_fn(-self.t, self.t, n, f)
    }

    /// Right-hand side of `v(y+T) = v(y-T) + inc(y)`.
    pub fn increment(&self, y: f64) -> f64 {
        let t = self.t;
        2.0 * self.ft.d1(y) - self.f0.d1(y + t) - self.f0.d1(y - t)
    }

    pub fn increment_d1(&self, y: f64) -> f64 {
        let t = self.t;
        2.0 * self.ft.d2(y) - self.f0.d2(y + t) - self.f0.d2(y - t)
    }

    /// Right-hand side of the equilibrium identity for period `k`.
    pub fn equilibrium_rhs(&self, k: isize) -> f64 {
        let t = self.t;
        let kf = k as f64;
        2.0 * self.ft.value(2.0 * kf * t)
            - self.f0.value((2.0 * kf + 1.0) * t)
            - self.f0.value((2.0 * kf - 1.0) * t)
    }

    /// Offsets `D_k(x)` and `D_k'(x)` with `v_ext(x + 2kT) = v(x) + D_k(x)`
    /// for every node `x` of `grid`, indexed `[k + K1][node]`.
    ///
    /// Accumulated one period at a time from the recurrence.
    fn offsets(&self, xs: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let kk = self.k();
        let n = xs.len();
        let mut val = vec![vec![0.0; n]; kk];
        let mut der = vec![vec![0.0; n]; kk];
        let centre = self.k1;
        let t = self.t;
        for k in 1..=self.k2 {
            let shift = (2 * k - 1) as f64 * t;
            for (i, &x) in xs.iter().enumerate() {
                val[centre + k][i] = val[centre + k - 1][i] + self.increment(x + shift);
                der[centre + k][i] = der[centre + k - 1][i] + self.increment_d1(x + shift);
            }
        }
        for k in 1..=self.k1 {
            let shift = (2 * k - 1) as f64 * t;
            for (i, &x) in xs.iter().enumerate() {
                val[centre - k][i] = val[centre - k + 1][i] - self.increment(x - shift);
                der[centre - k][i] = der[centre - k + 1][i] - self.increment_d1(x - shift);
            }
        }
        (val, der)
    }

    fn check_decision_grid(&self, v: &GridFunction) -> Result<()> {
        let tol = 1e-12 * (1.0 + self.t);
        if (v.a() + self.t).abs() > tol || (v.b() - self.t).abs() > tol {
            return Err(Error::Grid(format!(
                "input must live on [-T, T] = [{}, {}], got [{}, {}]",
                -self.t,
                self.t,
                v.a(),
                v.b()
            )));
        }
        Ok(())
    }
}

fn compute_constraints(spec: &ProblemSpec) -> Constraints {
    let t = spec.t;
    let (f0m, f0p) = (spec.f0.eval3(-t), spec.f0.eval3(t));
    let ft0 = spec.ft.eval3(0.0);
    Constraints {
        a: 2.0 * ft0.0 - f0p.0 - f0m.0,
        c1: 2.0 * ft0.1 - f0p.1 - f0m.1,
        c2: 2.0 * ft0.2 - f0p.2 - f0m.2,
    }
}

/// `(A, c1, c2)` for the problem.
pub fn derive_constraints(spec: &ProblemSpec) -> Constraints {
    spec.constraints()
}

/// The functions `t_1 ≡ 0, t_2, …, t_K` on `[-T, T]`.
///
/// Index layout (0-based): `0` is `t_1`; `1..=K2` are the rightward shifts
/// `t_{k+1} = -D_k`; `K2+1..K` are the leftward shifts `t_{K2+1+k} = -D_{-k}`.
#[derive(Debug, Clone)]
pub struct ShiftSequence {
    functions: Vec<GridFunction>,
    spec: Option<ProblemSpec>,
}

impl ShiftSequence {
    /// Wraps a family directly. The first entry must vanish identically and
    /// every entry must share one grid.
    pub fn from_functions(functions: Vec<GridFunction>) -> Result<Self> {
        let first = functions.first().ok_or_else(|| {
            Error::InvalidProblem("shift sequence needs at least one function".into())
        })?;
        if first.values().iter().any(|&v| v != 0.0) {
            return Err(Error::InvalidProblem("t_1 must vanish identically".into()));
        }
        for f in &functions[1..] {
            first.check_same_grid(f)?;
        }
        Ok(Self {
            functions,
            spec: None,
        })
    }

    pub fn functions(&self) -> &[GridFunction] {
        &self.functions
    }

    pub fn k(&self) -> usize {
        self.functions.len()
    }

    pub fn grid(&self) -> &GridFunction {
        &self.functions[0]
    }

    pub fn n(&self) -> usize {
        self.grid().n()
    }

    /// Half-width of the decision interval.
    pub fn half_width(&self) -> f64 {
        0.5 * (self.grid().b() - self.grid().a())
    }

    pub fn spec(&self) -> Option<&ProblemSpec> {
        self.spec.as_ref()
    }

    /// `(1/K) Σ tᵢ` at each node.
    pub fn mean(&self) -> GridFunction {
        let k = self.k() as f64;
        let n = self.n();
        let values = (0..n)
            .map(|i| self.functions.iter().map(|f| f.values()[i]).sum::<f64>() / k)
            .collect();
        self.grid().with_values(values)
    }

    /// The same family on an `n`-node grid. Rebuilt from the recurrence when
    /// the problem is known, linearly interpolated otherwise.
    pub fn resample(&self, n: usize) -> Result<ShiftSequence> {
        if let Some(spec) = &self.spec {
            return shift_sequence(spec, n);
        }
        let grid = self.grid();
        let functions = self
            .functions
            .iter()
            .map(|f| GridFunction::from_fn(grid.a(), grid.b(), n, |x| f.interpolate(x)))
            .collect::<Result<Vec<_>>>()?;
        ShiftSequence::from_functions(functions)
    }
}

pub fn shift_sequence(spec: &ProblemSpec, n: usize) -> Result<ShiftSequence> {
    let grid = GridFunction::constant(-spec.t, spec.t, n, 0.0)?;
    let xs: Vec<f64> = grid.nodes().collect();
    let (offsets, _) = spec.offsets(&xs);
    let centre = spec.k1;
    let mut functions = Vec::with_capacity(spec.k());
    functions.push(grid.clone());
    for k in 1..=spec.k2 {
        functions.push(grid.with_values(offsets[centre + k].iter().map(|d| -d).collect()));
    }
    for k in 1..=spec.k1 {
        functions.push(grid.with_values(offsets[centre - k].iter().map(|d| -d).collect()));
    }
    Ok(ShiftSequence {
        functions,
        spec: Some(spec.clone()),
    })
}

/// A decision-interval input propagated over the whole window.
///
/// Each period is stored as its own closed grid, so the value a period
/// assigns to its right end and the value its neighbour assigns to the same
/// point may differ; that difference is the seam jump.
#[derive(Debug, Clone)]
pub struct ExtendedInput {
    t: f64,
    k1: usize,
    periods: Vec<GridFunction>,
    derivs: Vec<Vec<f64>>,
}

impl ExtendedInput {
    pub fn k(&self) -> usize {
        self.periods.len()
    }

    pub fn k1(&self) -> usize {
        self.k1
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn window(&self) -> (f64, f64) {
        let last = self.periods.last().expect("at least one period");
        (self.periods[0].a(), last.b())
    }

    /// Periods ordered left to right (`k = -K1..=K2`).
    pub fn periods(&self) -> &[GridFunction] {
        &self.periods
    }

    /// Derivative samples per period, same layout as [`Self::periods`].
    pub fn derivatives(&self) -> &[Vec<f64>] {
        &self.derivs
    }

    pub fn period(&self, k: isize) -> &GridFunction {
        &self.periods[(k + self.k1 as isize) as usize]
    }

    /// Full-window samples. Interior seam nodes take the value of the period
    /// starting there; the last node is the right end of the last period.
    pub fn stitched(&self) -> GridFunction {
        let n = self.periods[0].n();
        let mut values = Vec::with_capacity(self.k() * (n - 1) + 1);
        for p in &self.periods {
            values.extend_from_slice(&p.values()[..n - 1]);
        }
        values.push(self.periods.last().expect("at least one period").last());
        let (a, b) = self.window();
        GridFunction::new(a, b, values).expect("stitched grid is valid")
    }

    /// Value at `x`, half-open per period.
    pub fn value_at(&self, x: f64) -> f64 {
        let (lo, _) = self.window();
        let p = (((x - lo) / (2.0 * self.t)).floor().max(0.0) as usize).min(self.k() - 1);
        self.periods[p].interpolate(x)
    }

    pub fn integral(&self) -> f64 {
        self.periods.iter().map(|p| p.integrate()).sum()
    }

    /// `∫ |v_ext|ᵖ` over the window, summed period by period.
    pub fn lp_integral(&self, p: u32) -> Result<f64> {
        self.periods
            .iter()
            .map(|g| funcmodel::lp_integral(g, p))
            .sum()
    }

    pub fn period_integrals(&self) -> Vec<f64> {
        self.periods.iter().map(|p| p.integrate()).collect()
    }

    /// `(location, |jump|)` of the value at each interior seam.
    pub fn seam_value_jumps(&self) -> Vec<(f64, f64)> {
        self.periods
            .windows(2)
            .map(|w| (w[1].a(), (w[1].first() - w[0].last()).abs()))
            .collect()
    }

    /// `(location, |jump|)` of the derivative at each interior seam.
    pub fn seam_deriv_jumps(&self) -> Vec<(f64, f64)> {
        self.periods
            .windows(2)
            .zip(self.derivs.windows(2))
            .map(|(p, d)| (p[1].a(), (d[1][0] - d[0][d[0].len() - 1]).abs()))
            .collect()
    }
}

/// Propagates `v` from `[-T, T]` over the window, differentiating `v`
/// numerically for the derivative samples.
pub fn extend_input(v: &GridFunction, spec: &ProblemSpec) -> Result<ExtendedInput> {
    spec.check_decision_grid(v)?;
    extend_with(v, v.derivative(), spec)
}

/// As [`extend_input`] with known derivative samples of `v`.
pub fn extend_input_c1(v: &GridFunction, d1: &[f64], spec: &ProblemSpec) -> Result<ExtendedInput> {
    spec.check_decision_grid(v)?;
    if d1.len() != v.n() {
        return Err(Error::Grid(format!(
            "derivative has {} samples, input has {}",
            d1.len(),
            v.n()
        )));
    }
    extend_with(v, d1.to_vec(), spec)
}

fn extend_with(v: &GridFunction, d1: Vec<f64>, spec: &ProblemSpec) -> Result<ExtendedInput> {
    let xs: Vec<f64> = v.nodes().collect();
    let (val, der) = spec.offsets(&xs);
    let t = spec.t;
    let mut periods = Vec::with_capacity(spec.k());
    let mut derivs = Vec::with_capacity(spec.k());
    for (idx, (dv, dd)) in val.iter().zip(&der).enumerate() {
        let k = idx as isize - spec.k1 as isize;
        let centre = 2.0 * k as f64 * t;
        let values = v.values().iter().zip(dv).map(|(a, b)| a + b).collect();
        periods.push(GridFunction::new(centre - t, centre + t, values)?);
        derivs.push(d1.iter().zip(dd).map(|(a, b)| a + b).collect());
    }
    Ok(ExtendedInput {
        t,
        k1: spec.k1,
        periods,
        derivs,
    })
}

/// `u(t, x)` on the trapezoid `Ω`, built from an extended input.
#[derive(Debug, Clone)]
pub struct SolutionField {
    spec: ProblemSpec,
    ext: ExtendedInput,
    /// Per period, integral of the Hermite interpolant from the period's left
    /// end to each node.
    prefix: Vec<Vec<f64>>,
    /// Integral from the window's left end to each period's left end.
    base: Vec<f64>,
}

/// Integrated cubic Hermite basis on `[0, τ]` (unit cell).
fn hermite_basis_integrals(tau: f64) -> [f64; 4] {
    let t2 = tau * tau;
    let t3 = t2 * tau;
    let t4 = t3 * tau;
    [
        0.5 * t4 - t3 + tau,
        0.25 * t4 - 2.0 * t3 / 3.0 + 0.5 * t2,
        -0.5 * t4 + t3,
        0.25 * t4 - t3 / 3.0,
    ]
}

impl SolutionField {
    fn build(spec: &ProblemSpec, ext: ExtendedInput) -> Self {
        let mut prefix = Vec::with_capacity(ext.k());
        let mut base = Vec::with_capacity(ext.k());
        let mut running = 0.0;
        for (p, d) in ext.periods.iter().zip(&ext.derivs) {
            let h = p.spacing();
            let v = p.values();
            let mut acc = vec![0.0; v.len()];
            for i in 1..v.len() {
                acc[i] =
                    acc[i - 1] + 0.5 * h * (v[i - 1] + v[i]) + h * h * (d[i - 1] - d[i]) / 12.0;
            }
            base.push(running);
            running += acc[v.len() - 1];
            prefix.push(acc);
        }
        Self {
            spec: spec.clone(),
            ext,
            prefix,
            base,
        }
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn extended(&self) -> &ExtendedInput {
        &self.ext
    }

    pub fn v_full(&self) -> GridFunction {
        self.ext.stitched()
    }

    /// Whether `(t, x)` lies in `Ω`.
    pub fn contains(&self, t: f64, x: f64) -> bool {
        let (lo, hi) = self.spec.window();
        let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        let top = (x - lo).min(self.spec.t).min(hi - x);
        x >= lo - slack && x <= hi + slack && t >= -slack && t <= top + slack
    }

    /// Antiderivative of `v_ext` measured from the window's left end.
    fn primitive(&self, x: f64) -> f64 {
        let (lo, _) = self.ext.window();
        let kk = self.ext.k();
        let p = (((x - lo) / (2.0 * self.spec.t)).floor().max(0.0) as usize).min(kk - 1);
        let period = &self.ext.periods[p];
        let n = period.n();
        let h = period.spacing();
        let s = ((x - period.a()) / h).clamp(0.0, (n - 1) as f64);
        let i = (s.floor() as usize).min(n - 2);
        let tau = s - i as f64;
        let v = period.values();
        let d = &self.ext.derivs[p];
        let w = hermite_basis_integrals(tau);
        self.base[p]
            + self.prefix[p][i]
            + h * (w[0] * v[i] + w[1] * h * d[i] + w[2] * v[i + 1] + w[3] * h * d[i + 1])
    }

    pub fn u(&self, t: f64, x: f64) -> Result<f64> {
        if !self.contains(t, x) {
            return Err(Error::OutOfRegion { t, x });
        }
        let f0 = self.spec.f0();
        Ok(0.5 * (f0.value(x + t) + f0.value(x - t))
            + 0.5 * (self.primitive(x + t) - self.primitive(x - t)))
    }
}

/// Solution field of the input `v` given on `[-T, T]`.
pub fn dalembert(v: &GridFunction, spec: &ProblemSpec) -> Result<SolutionField> {
    Ok(SolutionField::build(spec, extend_input(v, spec)?))
}

/// As [`dalembert`] with known derivative samples of `v`.
pub fn dalembert_c1(v: &GridFunction, d1: &[f64], spec: &ProblemSpec) -> Result<SolutionField> {
    Ok(SolutionField::build(spec, extend_input_c1(v, d1, spec)?))
}

/// `∫_{-T}^{T} Σᵢ |tᵢ - v|ᵖ`.
pub fn full_norm(v: &GridFunction, ts: &ShiftSequence, p: u32) -> Result<f64> {
    funcmodel::check_norm(p)?;
    let mut total = 0.0;
    for t in ts.functions() {
        let diff = t.zip_map(v, |a, b| a - b)?;
        total += funcmodel::lp_integral(&diff, p)?;
    }
    Ok(total)
}

/// `F'(x) = (f0'(x) - v(x)) / 2` on the grid of `v`.
pub fn f_profile(v: &GridFunction, spec: &ProblemSpec) -> GridFunction {
    let f0 = spec.f0();
    v.with_values(
        v.nodes()
            .zip(v.values())
            .map(|(x, &vx)| 0.5 * (f0.d1(x) - vx))
            .collect(),
    )
}
