//! Smooth functions with derivatives, uniform grids, Simpson quadrature and
//! L¹/L² norms.
//!
//! Every other module works on [`GridFunction`]s: odd-sized uniform samples
//! of a real function on a closed interval, integrated with composite
//! Simpson weights.

use crate::error::{Error, Result};

/// Default number of samples on the decision interval.
pub const DEFAULT_GRID: usize = 2049;

/// Analytic function families that can be referenced by name.
#[derive(Debug, Clone, PartialEq)]
pub enum Catalog {
    Zero,
    Const(f64),
    /// Coefficients in ascending powers: `[c0, c1, c2]` is `c0 + c1 x + c2 x²`.
    Poly(Vec<f64>),
    /// `sin(freq * x + phase)`
    Sin {
        freq: f64,
        phase: f64,
    },
    /// `cos(freq * x + phase)`
    Cos {
        freq: f64,
        phase: f64,
    },
    /// `amp * exp(-(x - center)² / (2 width²))`
    Gaussian {
        amp: f64,
        center: f64,
        width: f64,
    },
    /// `amp/2 * (tanh(k (x - c + w)) - tanh(k (x - c - w)))`
    TanhBump {
        amp: f64,
        center: f64,
        half_width: f64,
        steepness: f64,
    },
}

impl Catalog {
    pub fn from_name(name: &str, params: &[f64]) -> Result<Self> {
        let arity = |expected: usize| -> Result<()> {
            if params.len() == expected {
                Ok(())
            } else {
                Err(Error::BadParams {
                    name: name.to_string(),
                    expected: format!("{expected} parameter(s)"),
                    got: params.len(),
                })
            }
        };
        let entry = match name {
            "zero" => {
                arity(0)?;
                Catalog::Zero
            }
            "const" => {
                arity(1)?;
                Catalog::Const(params[0])
            }
            "poly" => {
                if params.is_empty() {
                    return Err(Error::BadParams {
                        name: name.to_string(),
                        expected: "at least 1 coefficient".into(),
                        got: 0,
                    });
                }
                Catalog::Poly(params.to_vec())
            }
            "sin" => {
                arity(2)?;
                Catalog::Sin {
                    freq: params[0],
                    phase: params[1],
                }
            }
            "cos" => {
                arity(2)?;
                Catalog::Cos {
                    freq: params[0],
                    phase: params[1],
                }
            }
            "gaussian" => {
                arity(3)?;
                if params[2] <= 0.0 {
                    return Err(Error::BadParams {
                        name: name.to_string(),
                        expected: "positive width".into(),
                        got: params.len(),
                    });
                }
                Catalog::Gaussian {
                    amp: params[0],
                    center: params[1],
                    width: params[2],
                }
            }
            "tanh-bump" => {
                arity(4)?;
                Catalog::TanhBump {
                    amp: params[0],
                    center: params[1],
                    half_width: params[2],
                    steepness: params[3],
                }
            }
            other => return Err(Error::UnknownCatalogEntry(other.to_string())),
        };
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::BadParams {
                name: name.to_string(),
                expected: "finite values".into(),
                got: params.len(),
            });
        }
        Ok(entry)
    }

    fn eval3(&self, x: f64) -> (f64, f64, f64) {
        match self {
            Catalog::Zero => (0.0, 0.0, 0.0),
            Catalog::Const(c) => (*c, 0.0, 0.0),
            Catalog::Poly(coeffs) => {
                // Horner on value and the two derivatives together.
                let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
                for &c in coeffs.iter().rev() {
                    ddp = ddp * x + 2.0 * dp;
                    dp = dp * x + p;
                    p = p * x + c;
                }
                (p, dp, ddp)
            }
            Catalog::Sin { freq, phase } => {
                let (s, c) = (freq * x + phase).sin_cos();
                (s, freq * c, -freq * freq * s)
            }
            Catalog::Cos { freq, phase } => {
                let (s, c) = (freq * x + phase).sin_cos();
                (c, -freq * s, -freq * freq * c)
            }
            Catalog::Gaussian { amp, center, width } => {
                let z = (x - center) / width;
                let e = amp * (-0.5 * z * z).exp();
                (e, -z / width * e, (z * z - 1.0) / (width * width) * e)
            }
            Catalog::TanhBump {
                amp,
                center,
                half_width,
                steepness: k,
            } => {
                let tl = (k * (x - center + half_width)).tanh();
                let tr = (k * (x - center - half_width)).tanh();
                let sl = 1.0 - tl * tl;
                let sr = 1.0 - tr * tr;
                let half = 0.5 * amp;
                (
                    half * (tl - tr),
                    half * k * (sl - sr),
                    half * (-2.0 * k * k) * (tl * sl - tr * sr),
                )
            }
        }
    }
}

/// Natural cubic spline through tabulated samples.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the knots; zero at both ends.
    m: Vec<f64>,
}

impl NaturalSpline {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Grid(format!(
                "spline needs matching columns, got {} x and {} y",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 3 {
            return Err(Error::Grid("spline needs at least 3 samples".into()));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Grid(
                "spline knots must be strictly increasing".into(),
            ));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::Grid("spline samples must be finite".into()));
        }
        let n = xs.len();
        // Tridiagonal system for interior second derivatives (Thomas algorithm).
        let mut m = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            let lower = h0 / 6.0;
            diag[i] = (h0 + h1) / 3.0;
            upper[i] = h1 / 6.0;
            rhs[i] = (ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0;
            if i > 1 {
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
        }
        for i in (1..n - 1).rev() {
            let next = if i + 1 < n - 1 { m[i + 1] } else { 0.0 };
            m[i] = (rhs[i] - upper[i] * next) / diag[i];
        }
        Ok(Self { xs, ys, m })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    fn eval3(&self, x: f64) -> (f64, f64, f64) {
        let n = self.xs.len();
        let i = match self.xs.partition_point(|&k| k <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        let value = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (y1 - y0) / h + ((1.0 - 3.0 * a * a) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        let d2 = a * m0 + b * m1;
        (value, d1, d2)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Source {
    Catalog(Catalog),
    Spline(NaturalSpline),
    Combination(Vec<(f64, SmoothFunction)>),
}

/// A real function with analytic first and second derivatives on a closed
/// interval.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothFunction {
    domain: (f64, f64),
    source: Source,
}

impl SmoothFunction {
    /// Catalog functions are defined on the whole real line.
    pub fn catalog(entry: Catalog) -> Self {
        Self {
            domain: (f64::NEG_INFINITY, f64::INFINITY),
            source: Source::Catalog(entry),
        }
    }

    pub fn spline(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let spline = NaturalSpline::new(xs, ys)?;
        Ok(Self {
            domain: spline.domain(),
            source: Source::Spline(spline),
        })
    }

    /// `Σ wᵢ fᵢ`, defined on the intersection of the parts' domains.
    pub fn linear_combination(terms: Vec<(f64, SmoothFunction)>) -> Self {
        let domain = terms
            .iter()
            .fold((f64::NEG_INFINITY, f64::INFINITY), |(lo, hi), (_, f)| {
                (lo.max(f.domain.0), hi.min(f.domain.1))
            });
        Self {
            domain,
            source: Source::Combination(terms),
        }
    }

    pub fn zero() -> Self {
        Self::catalog(Catalog::Zero)
    }

    /// Restricts (or widens, for catalog functions) the declared domain.
    pub fn with_domain(mut self, a: f64, b: f64) -> Self {
        self.domain = (a, b);
        self
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn is_spline(&self) -> bool {
        matches!(self.source, Source::Spline(_))
    }

    pub fn covers(&self, a: f64, b: f64) -> bool {
        let slack = 1e-12 * (1.0 + a.abs().max(b.abs()));
        self.domain.0 <= a + slack && b - slack <= self.domain.1
    }

    /// Value, first and second derivative at `x`.
    pub fn eval3(&self, x: f64) -> (f64, f64, f64) {
        match &self.source {
            Source::Catalog(c) => c.eval3(x),
            Source::Spline(s) => s.eval3(x),
            Source::Combination(terms) => terms.iter().fold((0.0, 0.0, 0.0), |acc, (w, f)| {
                let (v, d1, d2) = f.eval3(x);
                (acc.0 + w * v, acc.1 + w * d1, acc.2 + w * d2)
            }),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval3(x).0
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.eval3(x).1
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.eval3(x).2
    }
}

/// Builds a catalog function by name.
pub fn catalog(name: &str, params: &[f64]) -> Result<SmoothFunction> {
    Ok(SmoothFunction::catalog(Catalog::from_name(name, params)?))
}

/// Uniformly spaced samples on `[a, b]` with an odd number of nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    a: f64,
    b: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(a: f64, b: f64, values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 3 || n.is_multiple_of(2) {
            return Err(Error::Grid(format!(
                "grid size must be odd and >= 3, got {n}"
            )));
        }
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Grid(format!("invalid interval [{a}, {b}]")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Grid(format!("non-finite sample at node {i}")));
        }
        Ok(Self { a, b, values })
    }

    pub fn from_fn(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 3 || n.is_multiple_of(2) {
            return Err(Error::Grid(format!(
                "grid size must be odd and >= 3, got {n}"
            )));
        }
        let values = (0..n).map(|i| f(node(a, b, n, i))).collect();
        Self::new(a, b, values)
    }

    pub fn constant(a: f64, b: f64, n: usize, c: f64) -> Result<Self> {
        Self::from_fn(a, b, n, |_| c)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn spacing(&self) -> f64 {
        (self.b - self.a) / (self.n() - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        node(self.a, self.b, self.n(), i)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n()).map(move |i| self.node(i))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.n() - 1]
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        let tol = 1e-12 * (1.0 + self.a.abs().max(self.b.abs()));
        self.n() == other.n() && (self.a - other.a).abs() <= tol && (self.b - other.b).abs() <= tol
    }

    pub fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::Grid(format!(
                "grid mismatch: [{}, {}] n={} vs [{}, {}] n={}",
                self.a,
                self.b,
                self.n(),
                other.a,
                other.b,
                other.n()
            )))
        }
    }

    /// Same grid, values replaced. Panics only on a length mismatch, which
    /// is a programming error inside the crate.
    pub fn with_values(&self, values: Vec<f64>) -> GridFunction {
        assert_eq!(values.len(), self.n(), "value count must match grid");
        GridFunction {
            a: self.a,
            b: self.b,
            values,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(
        &self,
        other: &GridFunction,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<GridFunction> {
        self.check_same_grid(other)?;
        Ok(self.with_values(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&x, &y)| f(x, y))
                .collect(),
        ))
    }

    pub fn integrate(&self) -> f64 {
        let h = self.spacing();
        simpson_sum(&self.values) * h / 3.0
    }

    pub fn lp_norm(&self, p: u32) -> Result<f64> {
        lp_norm(self, p)
    }

    /// Piecewise-linear interpolation; clamps outside `[a, b]`.
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.n();
        let s = ((x - self.a) / self.spacing()).clamp(0.0, (n - 1) as f64);
        let i = (s.floor() as usize).min(n - 2);
        let frac = s - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }

    /// Fourth-order finite-difference derivative at every node (central in
    /// the interior, one-sided five-point stencils at the two ends of each
    /// side). Falls back to second order for grids with fewer than 5 nodes.
    pub fn derivative(&self) -> Vec<f64> {
        fd_derivative(&self.values, self.spacing())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Samples `f` at the `n` uniform nodes of `[a, b]`.
pub fn sample(f: &SmoothFunction, a: f64, b: f64, n: usize) -> Result<GridFunction> {
    if !f.covers(a, b) {
        let (lo, hi) = f.domain();
        return Err(Error::Domain(format!(
            "[{a}, {b}] is not inside the function domain [{lo}, {hi}]"
        )));
    }
    GridFunction::from_fn(a, b, n, |x| f.value(x))
}

/// Composite Simpson estimate of `∫ₐᵇ g`.
pub fn integrate(g: &GridFunction) -> f64 {
    g.integrate()
}

/// `(∫ |g|ᵖ)^{1/p}` for `p ∈ {1, 2}`.
pub fn lp_norm(g: &GridFunction, p: u32) -> Result<f64> {
    Ok(lp_integral(g, p)?.powf(1.0 / p as f64))
}

/// `∫ |g|ᵖ` without the root.
pub fn lp_integral(g: &GridFunction, p: u32) -> Result<f64> {
    let powered: Vec<f64> = match p {
        1 => g.values.iter().map(|v| v.abs()).collect(),
        2 => g.values.iter().map(|v| v * v).collect(),
        other => return Err(Error::UnsupportedNorm(other)),
    };
    Ok(simpson_sum(&powered) * g.spacing() / 3.0)
}

pub fn check_norm(p: u32) -> Result<()> {
    match p {
        1 | 2 => Ok(()),
        other => Err(Error::UnsupportedNorm(other)),
    }
}

/// Composite Simpson weights `h/3 · (1, 4, 2, …, 4, 1)`.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let w = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}

fn simpson_sum(values: &[f64]) -> f64 {
    let n = values.len();
    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, &v) in values.iter().enumerate().take(n - 1).skip(1) {
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    values[0] + values[n - 1] + 4.0 * odd + 2.0 * even
}

fn node(a: f64, b: f64, n: usize, i: usize) -> f64 {
    if i == n - 1 {
        b
    } else {
        a + (b - a) * (i as f64) / ((n - 1) as f64)
    }
}

pub(crate) fn fd_derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    if n < 5 {
        d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        for i in 1..n - 1 {
            d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
        }
        d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
        return d;
    }
    let c = 12.0 * h;
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / c;
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / c;
    for i in 2..n - 2 {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / c;
    }
    let l = n - 1;
    d[l] = (25.0 * f[l] - 48.0 * f[l - 1] + 36.0 * f[l - 2] - 16.0 * f[l - 3] + 3.0 * f[l - 4]) / c;
    d[l - 1] = (3.0 * f[l] + 10.0 * f[l - 1] - 18.0 * f[l - 2] + 6.0 * f[l - 3] - f[l - 4]) / c;
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn catalog_examples() {
        let z = catalog("zero", &[]).unwrap();
        assert_eq!(z.eval3(3.7), (0.0, 0.0, 0.0));

        let s = catalog("sin", &[1.0, 0.0]).unwrap();
        assert_eq!(s.d1(0.0), 1.0);
        let x = 0.3;
        assert!((s.value(x) - x.sin()).abs() < 1e-15);
        assert!((s.d2(x) + x.sin()).abs() < 1e-15);

        let p = catalog("poly", &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(p.eval3(2.0), (4.0, 4.0, 2.0));
    }

    #[test]
    fn catalog_errors() {
        assert!(matches!(
            catalog("sinh", &[1.0]),
            Err(Error::UnknownCatalogEntry(_))
        ));
        assert!(matches!(
            catalog("sin", &[1.0]),
            Err(Error::BadParams { .. })
        ));
        assert!(matches!(
            catalog("zero", &[1.0]),
            Err(Error::BadParams { .. })
        ));
        assert!(matches!(catalog("poly", &[]), Err(Error::BadParams { .. })));
    }

    #[test]
    fn catalog_derivatives_are_second_order_consistent() {
        let entries = [
            ("poly", vec![0.5, -1.0, 2.0, 0.3]),
            ("sin", vec![1.7, 0.2]),
            ("cos", vec![0.9, -0.4]),
            ("gaussian", vec![1.3, 0.2, 0.7]),
            ("tanh-bump", vec![0.8, -0.1, 0.6, 2.5]),
        ];
        for (name, params) in entries {
            let f = catalog(name, &params).unwrap();
            for &x in &[-0.83, 0.11, 0.64] {
                let e1 = (central(|y| f.value(y), x, 1e-3) - f.d1(x)).abs();
                let e2 = (central(|y| f.value(y), x, 5e-4) - f.d1(x)).abs();
                if e1 > 1e-10 {
                    let r = e1 / e2;
                    assert!((3.5..=4.5).contains(&r), "{name} d1 ratio {r}");
                }
                let e1 = (central(|y| f.d1(y), x, 1e-3) - f.d2(x)).abs();
                let e2 = (central(|y| f.d1(y), x, 5e-4) - f.d2(x)).abs();
                if e1 > 1e-10 {
                    let r = e1 / e2;
                    assert!((3.5..=4.5).contains(&r), "{name} d2 ratio {r}");
                }
            }
        }
    }

    #[test]
    fn sample_examples() {
        let z = catalog("zero", &[]).unwrap();
        assert_eq!(sample(&z, -1.0, 1.0, 5).unwrap().values(), &[0.0; 5]);

        let s = catalog("sin", &[1.0, 0.0]).unwrap();
        let g = sample(&s, 0.0, PI, 3).unwrap();
        assert_eq!(g.values()[0], 0.0);
        assert_eq!(g.values()[1], 1.0);
        assert!(g.values()[2].abs() < 2e-16);

        let q = catalog("poly", &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(sample(&q, -1.0, 1.0, 3).unwrap().values(), &[1.0, 0.0, 1.0]);
    }

    #[test]
    fn sample_rejects_outside_domain_and_even_grids() {
        let f = catalog("sin", &[1.0, 0.0]).unwrap().with_domain(0.0, 1.0);
        assert!(matches!(sample(&f, -0.5, 1.0, 5), Err(Error::Domain(_))));
        assert!(matches!(sample(&f, 0.0, 1.0, 4), Err(Error::Grid(_))));
    }

    #[test]
    fn integrate_examples() {
        let q = catalog("poly", &[0.0, 0.0, 1.0]).unwrap();
        let g = sample(&q, -1.0, 1.0, 5).unwrap();
        assert!((integrate(&g) - 2.0 / 3.0).abs() < 1e-15);

        let s = catalog("sin", &[1.0, 0.0]).unwrap();
        let g = sample(&s, 0.0, PI, 129).unwrap();
        // ∫₀^π sin = [-cos]₀^π = 2
        assert!((integrate(&g) - 2.0).abs() < 1e-8);

        let z = GridFunction::constant(0.0, 3.0, 7, 0.0).unwrap();
        assert_eq!(integrate(&z), 0.0);
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let c = catalog("poly", &[1.0, -2.0, 0.5, 3.0]).unwrap();
        let g = sample(&c, -0.5, 2.0, 9).unwrap();
        // antiderivative x - x² + x³/6 + 3x⁴/4
        let prim = |x: f64| x - x * x + x.powi(3) / 6.0 + 0.75 * x.powi(4);
        assert!((integrate(&g) - (prim(2.0) - prim(-0.5))).abs() < 1e-12);
    }

    #[test]
    fn simpson_converges_at_fourth_order() {
        let f = catalog("gaussian", &[1.0, 0.3, 0.4]).unwrap();
        let exact = {
            // reference from a very fine grid
            integrate(&sample(&f, -1.0, 2.0, 200_001).unwrap())
        };
        let e1 = (integrate(&sample(&f, -1.0, 2.0, 33).unwrap()) - exact).abs();
        let e2 = (integrate(&sample(&f, -1.0, 2.0, 65).unwrap()) - exact).abs();
        let r = e1 / e2;
        assert!((12.0..=20.0).contains(&r), "ratio {r}");
    }

    #[test]
    fn lp_norm_examples() {
        let one = GridFunction::constant(0.0, 1.0, 11, 1.0).unwrap();
        assert!((lp_norm(&one, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!((lp_norm(&one, 2).unwrap() - 1.0).abs() < 1e-15);

        let s = catalog("sin", &[1.0, 0.0]).unwrap();
        let g = sample(&s, 0.0, 2.0 * PI, 257).unwrap();
        assert!((lp_norm(&g, 2).unwrap() - PI.sqrt()).abs() < 1e-6);

        let z = GridFunction::constant(0.0, 1.0, 11, 0.0).unwrap();
        assert_eq!(lp_norm(&z, 1).unwrap(), 0.0);
        assert!(matches!(lp_norm(&z, 3), Err(Error::UnsupportedNorm(3))));
    }

    #[test]
    fn spline_reproduces_samples_and_is_smooth() {
        let xs: Vec<f64> = (0..21).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (2.0 * x).sin()).collect();
        let f = SmoothFunction::spline(xs.clone(), ys.clone()).unwrap();
        assert_eq!(f.domain(), (0.0, 2.0));
        for (x, y) in xs.iter().zip(&ys) {
            assert!((f.value(*x) - y).abs() < 1e-14);
        }
        // natural end conditions
        assert!(f.d2(0.0).abs() < 1e-12);
        assert!(f.d2(2.0).abs() < 1e-12);
        // interior accuracy
        assert!((f.d1(1.05) - 2.0 * (2.1f64).cos()).abs() < 2e-3);
        // C¹ across a knot
        assert!((f.d1(1.0 - 1e-9) - f.d1(1.0 + 1e-9)).abs() < 1e-6);
    }

    #[test]
    fn fd_derivative_is_fourth_order() {
        let err = |n: usize| {
            let g = GridFunction::from_fn(0.0, 2.0, n, |x| (1.3 * x).sin()).unwrap();
            g.derivative()
                .iter()
                .zip(g.nodes())
                .map(|(d, x)| (d - 1.3 * (1.3 * x).cos()).abs())
                .fold(0.0, f64::max)
        };
        let r = err(65) / err(129);
        assert!(r > 12.0, "ratio {r}");
    }
}
