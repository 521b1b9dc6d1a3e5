//! Post-hoc checks of a candidate input: PDE residual of the reconstructed
//! field, boundary matching, seam smoothness, the per-period equilibrium
//! identity, and the MS / pseudo-MS classification.

use crate::error::Result;
use crate::funcmodel::GridFunction;
use crate::problem::{dalembert, dalembert_c1, ProblemSpec, SolutionField};

pub const INTEGRAL_TOL: f64 = 1e-8;
pub const SEAM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// Feasible, no seam jumps, no kinks.
    MsCandidate,
    /// Feasible; smoothness fails only at isolated points.
    PseudoMs,
    /// Feasible, but some non-smooth region is wider than two grid cells.
    Irregular,
    /// `∫v ≠ A`.
    Infeasible,
}

impl Classification {
    pub fn label(self) -> &'static str {
        match self {
            Classification::MsCandidate => "MS_candidate",
            Classification::PseudoMs => "pseudo_MS",
            Classification::Irregular => "irregular",
            Classification::Infeasible => "infeasible",
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub pde_residual_max: f64,
    /// `(t, x)` where the largest residual was found.
    pub pde_residual_at: (f64, f64),
    pub boundary0_max: f64,
    pub boundary_t_max: f64,
    /// `(location, |jump|)` of `v_ext` at interior seams.
    pub seam_value_jumps: Vec<(f64, f64)>,
    /// `(location, |jump|)` of `v_ext'` at interior seams.
    pub seam_deriv_jumps: Vec<(f64, f64)>,
    /// `∫ v_ext` over period `k` minus `2fT(2kT) - f0((2k+1)T) - f0((2k-1)T)`,
    /// for `k = -K1..=K2`.
    pub equilibrium_residuals: Vec<f64>,
    /// Kink locations inside the decision interval.
    pub kinks: Vec<f64>,
    /// Widths, in nodes, of the kink clusters.
    pub kink_widths: Vec<usize>,
    pub integral_residual: f64,
    pub classification: Classification,
}

/// Verifies `v`, differentiating it numerically; kinks inside `[-T, T]` are
/// looked for in the second differences.
pub fn verify_solution(
    v: &GridFunction,
    spec: &ProblemSpec,
    n_t: usize,
) -> Result<VerificationReport> {
    let field = dalembert(v, spec)?;
    let (kinks, kink_widths) = detect_kinks(v);
    Ok(report(v, spec, &field, n_t, kinks, kink_widths))
}

/// Verifies a C¹ input given with its derivative samples. Such an input has
/// no kinks by construction; only seams can break smoothness.
pub fn verify_solution_c1(
    v: &GridFunction,
    d1: &[f64],
    spec: &ProblemSpec,
    n_t: usize,
) -> Result<VerificationReport> {
    let field = dalembert_c1(v, d1, spec)?;
    Ok(report(v, spec, &field, n_t, Vec::new(), Vec::new()))
}

fn report(
    v: &GridFunction,
    spec: &ProblemSpec,
    field: &SolutionField,
    n_t: usize,
    kinks: Vec<f64>,
    kink_widths: Vec<usize>,
) -> VerificationReport {
    let lattice = Lattice::new(field, n_t.max(3));
    let (pde_residual_max, pde_residual_at) = lattice.pde_residual();
    let (boundary0_max, boundary_t_max) = lattice.boundary_residuals(spec);
    let ext = field.extended();
    let seam_value_jumps = ext.seam_value_jumps();
    let seam_deriv_jumps = ext.seam_deriv_jumps();
    let equilibrium_residuals = ext
        .period_integrals()
        .iter()
        .enumerate()
        .map(|(idx, integral)| integral - spec.equilibrium_rhs(idx as isize - spec.k1() as isize))
        .collect();
    let integral_residual = v.integrate() - spec.a();

    let smooth_seams = seam_value_jumps
        .iter()
        .chain(&seam_deriv_jumps)
        .all(|&(_, j)| j <= SEAM_TOL);
    let classification = if integral_residual.abs() > INTEGRAL_TOL {
        Classification::Infeasible
    } else if smooth_seams && kinks.is_empty() {
        Classification::MsCandidate
    } else if kink_widths.iter().all(|&w| w <= 2) {
        Classification::PseudoMs
    } else {
        Classification::Irregular
    };
    VerificationReport {
        pde_residual_max,
        pde_residual_at,
        boundary0_max,
        boundary_t_max,
        seam_value_jumps,
        seam_deriv_jumps,
        equilibrium_residuals,
        kinks,
        kink_widths,
        integral_residual,
        classification,
    }
}

/// Kink clusters from `rᵢ = |v_{i+1} - 2vᵢ + v_{i-1}| / h`, which stays
/// `O(h)` on smooth stretches and jumps to the slope change at a kink.
/// Flagged nodes exceed `max(1e-7, 16 · q90(r))`; adjacent flags merge.
fn detect_kinks(v: &GridFunction) -> (Vec<f64>, Vec<usize>) {
    let n = v.n();
    if n < 5 {
        return (Vec::new(), Vec::new());
    }
    let h = v.spacing();
    let y = v.values();
    let r: Vec<f64> = (1..n - 1)
        .map(|i| (y[i + 1] - 2.0 * y[i] + y[i - 1]).abs() / h)
        .collect();
    let mut sorted = r.clone();
    sorted.sort_by(f64::total_cmp);
    let q90 = sorted[(sorted.len() * 9) / 10];
    let threshold = (16.0 * q90).max(1e-7);
    let mut locations = Vec::new();
    let mut widths = Vec::new();
    let mut i = 0;
    while i < r.len() {
        if r[i] > threshold {
            let start = i;
            while i < r.len() && r[i] > threshold {
                i += 1;
            }
            // r index j is node j + 1
            let (lo, hi) = (start + 1, i);
            let weight: f64 = r[start..i].iter().sum();
            let centre = (lo..=hi)
                .map(|node| r[node - 1] * v.node(node))
                .sum::<f64>()
                / weight;
            locations.push(centre);
            widths.push(hi - lo + 1);
        } else {
            i += 1;
        }
    }
    (locations, widths)
}

/// Evaluation lattice inside `Ω`: `dt = T/(n_t - 1)`, `dx = 2 dt`.
///
/// With `dx = dt` the discrete operator `δ²_t - δ²_x` annihilates every
/// `P(x+t) + Q(x-t)` exactly, so the residual would measure only roundoff.
struct Lattice {
    dt: f64,
    dx: f64,
    x0: f64,
    nx: usize,
    nt: usize,
    /// `u[j * nx + i]`, NaN outside `Ω`.
    u: Vec<f64>,
}

impl Lattice {
    fn new(field: &SolutionField, n_t: usize) -> Self {
        let spec = field.spec();
        let dt = spec.t() / (n_t - 1) as f64;
        let dx = 2.0 * dt;
        let (lo, hi) = spec.window();
        let nx = ((hi - lo) / dx + 1e-9).floor() as usize + 1;
        let mut u = vec![f64::NAN; nx * n_t];
        for j in 0..n_t {
            let t = if j == n_t - 1 {
                spec.t()
            } else {
                j as f64 * dt
            };
            for i in 0..nx {
                let x = lo + i as f64 * dx;
                if let Ok(val) = field.u(t, x) {
                    u[j * nx + i] = val;
                }
            }
        }
        Self {
            dt,
            dx,
            x0: lo,
            nx,
            nt: n_t,
            u,
        }
    }

    fn at(&self, j: usize, i: usize) -> f64 {
        self.u[j * self.nx + i]
    }

    fn pde_residual(&self) -> (f64, (f64, f64)) {
        let mut worst = 0.0;
        let mut at = (0.0, 0.0);
        for j in 1..self.nt - 1 {
            for i in 1..self.nx - 1 {
                let c = self.at(j, i);
                let stencil = [
                    self.at(j - 1, i),
                    self.at(j + 1, i),
                    self.at(j, i - 1),
                    self.at(j, i + 1),
                ];
                if c.is_nan() || stencil.iter().any(|s| s.is_nan()) {
                    continue;
                }
                let utt = (stencil[0] - 2.0 * c + stencil[1]) / (self.dt * self.dt);
                let uxx = (stencil[2] - 2.0 * c + stencil[3]) / (self.dx * self.dx);
                let r = (utt - uxx).abs();
                if r > worst {
                    worst = r;
                    at = (j as f64 * self.dt, self.x0 + i as f64 * self.dx);
                }
            }
        }
        (worst, at)
    }

    fn boundary_residuals(&self, spec: &ProblemSpec) -> (f64, f64) {
        let mut b0: f64 = 0.0;
        let mut bt: f64 = 0.0;
        let top = self.nt - 1;
        for i in 0..self.nx {
            let x = self.x0 + i as f64 * self.dx;
            let u0 = self.at(0, i);
            if !u0.is_nan() {
                b0 = b0.max((u0 - spec.f0().value(x)).abs());
            }
            let ut = self.at(top, i);
            if !ut.is_nan() {
                bt = bt.max((ut - spec.ft().value(x)).abs());
            }
        }
        (b0, bt)
    }
}

/// PDE residual of the field built from `v` sampled on each grid size `n`,
/// with `n_t = (n - 1)/2 + 1` so that the time step equals the input
/// spacing.
pub fn convergence_study(
    v: impl Fn(f64) -> f64,
    spec: &ProblemSpec,
    grids: &[usize],
) -> Result<Vec<(usize, f64)>> {
    grids
        .iter()
        .map(|&n| {
            let vn = spec.sample_decision(&v, n)?;
            let field = dalembert(&vn, spec)?;
            let lattice = Lattice::new(&field, (n - 1) / 2 + 1);
            Ok((n, lattice.pde_residual().0))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcmodel::{catalog, SmoothFunction};

    fn wave_spec() -> ProblemSpec {
        ProblemSpec::new(
            catalog("sin", &[1.0, 0.0]).unwrap(),
            catalog("sin", &[1.0, -1.0]).unwrap(),
            1.0,
            1,
            1,
        )
        .unwrap()
    }

    #[test]
    fn zero_data_is_ms_candidate() {
        let spec =
            ProblemSpec::new(SmoothFunction::zero(), SmoothFunction::zero(), 1.0, 1, 1).unwrap();
        let v = GridFunction::constant(-1.0, 1.0, 129, 0.0).unwrap();
        let r = verify_solution(&v, &spec, 33).unwrap();
        assert_eq!(r.pde_residual_max, 0.0);
        assert_eq!(r.boundary0_max, 0.0);
        assert_eq!(r.boundary_t_max, 0.0);
        assert!(r.equilibrium_residuals.iter().all(|&e| e == 0.0));
        assert_eq!(r.classification, Classification::MsCandidate);
    }

    #[test]
    fn traveling_wave_is_ms_candidate() {
        let spec = wave_spec();
        let v = spec.sample_decision(|x| -x.cos(), 1025).unwrap();
        let r = verify_solution(&v, &spec, 65).unwrap();
        assert!(r.boundary0_max < 1e-8 && r.boundary_t_max < 1e-8);
        assert!(r.pde_residual_max < 1e-2);
        assert!(r.kinks.is_empty());
        assert_eq!(r.seam_value_jumps.len(), 2);
        assert_eq!(r.classification, Classification::MsCandidate);
        assert!(r.equilibrium_residuals.iter().all(|e| e.abs() < 1e-10));
    }

    #[test]
    fn infeasible_input() {
        let spec = wave_spec();
        let v = spec.sample_decision(|x| -x.cos() + 0.01, 129).unwrap();
        let r = verify_solution(&v, &spec, 33).unwrap();
        assert_eq!(r.classification, Classification::Infeasible);
    }

    #[test]
    fn kinks_are_located() {
        let v = GridFunction::from_fn(-1.0, 1.0, 257, |x| (x - 0.3).abs() + 0.2 * x * x).unwrap();
        let (locs, widths) = detect_kinks(&v);
        assert_eq!(locs.len(), 1);
        assert!((locs[0] - 0.3).abs() <= v.spacing());
        assert!(widths[0] <= 2);

        let smooth = GridFunction::from_fn(-1.0, 1.0, 257, |x| (3.0 * x).sin()).unwrap();
        assert!(detect_kinks(&smooth).0.is_empty());
    }

    #[test]
    fn seam_violation_is_pseudo_ms() {
        let spec = wave_spec();
        // feasible, smooth inside, but v(T) - v(-T) ≠ c1
        let v = spec.sample_decision(|x| -x.cos() + 0.05 * x, 257).unwrap();
        let r = verify_solution(&v, &spec, 33).unwrap();
        assert_eq!(r.classification, Classification::PseudoMs);
        for &(_, j) in &r.seam_value_jumps {
            assert!((j - 0.1).abs() < 1e-10);
        }
    }

    #[test]
    fn convergence_study_traveling_wave() {
        let spec = wave_spec();
        let res = convergence_study(|x| -x.cos(), &spec, &[129, 257, 513]).unwrap();
        for w in res.windows(2) {
            let ratio = w[0].1 / w[1].1;
            assert!((3.0..=5.0).contains(&ratio), "{res:?}");
        }
    }
}
