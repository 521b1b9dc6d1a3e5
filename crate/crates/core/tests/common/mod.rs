#![allow(dead_code)]

use proptest::prelude::*;
use tbvp_core::funcmodel::{catalog, GridFunction, SmoothFunction};
use tbvp_core::problem::ProblemSpec;

/// Six coefficients in `[-1, 1]` describing a smooth test function.
pub type Coeffs = [f64; 6];

pub fn coeffs() -> impl Strategy<Value = Coeffs> {
    prop::array::uniform6(-1.0f64..1.0)
}

/// `p0 sin(ωx + φ) + gaussian + quadratic`, all derivatives moderate.
pub fn smooth(p: &Coeffs) -> SmoothFunction {
    SmoothFunction::linear_combination(vec![
        (
            p[0],
            catalog("sin", &[1.0 + 1.5 * (p[1] + 1.0), 2.0 * p[2]]).unwrap(),
        ),
        (
            0.5 * p[3],
            catalog("gaussian", &[1.0, p[4], 0.6 + 0.4 * p[5]]).unwrap(),
        ),
        (
            0.3 * p[5],
            catalog("poly", &[0.0, 1.0, 0.5 * p[1]]).unwrap(),
        ),
    ])
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub f0: Coeffs,
    pub ft: Coeffs,
    pub t: f64,
    pub k1: usize,
    pub k2: usize,
}

impl Instance {
    pub fn spec(&self) -> ProblemSpec {
        ProblemSpec::new(smooth(&self.f0), smooth(&self.ft), self.t, self.k1, self.k2).unwrap()
    }
}

/// Random smooth data with `K = K1 + K2 + 1 ≤ 5`.
pub fn instance() -> impl Strategy<Value = Instance> {
    (coeffs(), coeffs(), 0.5f64..1.5, 1usize..=2, 1usize..=2)
        .prop_map(|(f0, ft, t, k1, k2)| Instance { f0, ft, t, k1, k2 })
}

/// Shifts `g` by a constant so that its (Simpson) integral is `a`.
pub fn make_feasible(g: &GridFunction, a: f64) -> GridFunction {
    let lift = (a - g.integrate()) / (g.b() - g.a());
    g.map(|y| y + lift)
}

/// Smooth feasible input on the decision interval.
pub fn feasible_smooth(spec: &ProblemSpec, p: &Coeffs, n: usize) -> GridFunction {
    let f = smooth(p);
    let g = spec.sample_decision(|x| f.value(x), n).unwrap();
    make_feasible(&g, spec.a())
}

pub fn tent(x: f64, centre: f64, width: f64) -> f64 {
    (1.0 - (x - centre).abs() / width).max(0.0)
}

/// Continuous, non-smooth feasible input: smooth part plus tents.
pub fn feasible_kinked(spec: &ProblemSpec, p: &Coeffs, n: usize) -> GridFunction {
    let f = smooth(p);
    let t = spec.t();
    let g = spec
        .sample_decision(
            |x| f.value(x) + p[1] * tent(x, 0.7 * p[2] * t, 0.3 * t) + (x - 0.5 * p[4] * t).abs(),
            n,
        )
        .unwrap();
    make_feasible(&g, spec.a())
}

/// Zero-integral perturbation built from tents, scaled by `scale`.
pub fn zero_mean_tents(grid: &GridFunction, p: &Coeffs, scale: f64) -> GridFunction {
    let (a, b) = (grid.a(), grid.b());
    let w = 0.05 + 0.2 * p[5].abs();
    let c1 = a + (b - a) * 0.5 * (p[0] + 1.0);
    let c2 = a + (b - a) * 0.5 * (p[2] + 1.0);
    let raw = grid.with_values(
        grid.nodes()
            .map(|x| p[1] * tent(x, c1, w * (b - a)) + p[3] * tent(x, c2, 0.5 * w * (b - a)))
            .collect(),
    );
    let mean = raw.integrate() / (b - a);
    raw.map(|y| scale * (y - mean))
}
