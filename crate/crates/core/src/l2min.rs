//! L² minimum input in closed form: the mean of the shift sequence lifted by
//! a constant so that the integral constraint holds.

use crate::error::Result;
use crate::funcmodel::{fd_derivative, GridFunction};
use crate::problem::{full_norm, Constraints, ShiftSequence};

pub const DEFAULT_TOL_VALUE: f64 = 1e-8;
pub const DEFAULT_TOL_DERIV: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct L2Solution {
    pub v: GridFunction,
    pub a1: f64,
    pub mean_shift: GridFunction,
    /// `∫ Σᵢ (tᵢ - v)²`
    pub objective: f64,
}

/// `A1 = A - ∫ (1/K) Σᵢ tᵢ`.
pub fn a1_constant(ts: &ShiftSequence, a: f64) -> f64 {
    a - ts.mean().integrate()
}

pub fn l2_minimizer(ts: &ShiftSequence, a: f64) -> Result<L2Solution> {
    let mean_shift = ts.mean();
    let a1 = a - mean_shift.integrate();
    let width = mean_shift.b() - mean_shift.a();
    let lift = a1 / width;
    let v = mean_shift.map(|m| m + lift);
    let objective = full_norm(&v, ts, 2)?;
    Ok(L2Solution {
        v,
        a1,
        mean_shift,
        objective,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L2Verdict {
    MsExists,
    PmsOnly,
}

#[derive(Debug, Clone, Copy)]
pub struct L2MsCheck {
    pub verdict: L2Verdict,
    /// `v(T) - v(-T) - c1`
    pub value_mismatch: f64,
    /// `v'(T) - v'(-T) - c2`
    pub deriv_mismatch: f64,
}

/// Whether the closed-form minimizer already satisfies both endpoint
/// relations, with the default tolerances.
pub fn l2_ms_check(sol: &L2Solution, constraints: &Constraints) -> L2MsCheck {
    l2_ms_check_with(sol, constraints, DEFAULT_TOL_VALUE, DEFAULT_TOL_DERIV)
}

pub fn l2_ms_check_with(
    sol: &L2Solution,
    constraints: &Constraints,
    tol_value: f64,
    tol_deriv: f64,
) -> L2MsCheck {
    let v = &sol.v;
    let d = fd_derivative(v.values(), v.spacing());
    let value_mismatch = v.last() - v.first() - constraints.c1;
    let deriv_mismatch = d[d.len() - 1] - d[0] - constraints.c2;
    let verdict = if value_mismatch.abs() <= tol_value && deriv_mismatch.abs() <= tol_deriv {
        L2Verdict::MsExists
    } else {
        L2Verdict::PmsOnly
    };
    L2MsCheck {
        verdict,
        value_mismatch,
        deriv_mismatch,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcmodel::{catalog, SmoothFunction};
    use crate::problem::{shift_sequence, ProblemSpec};

    fn zeros(k: usize, n: usize) -> ShiftSequence {
        let z = GridFunction::constant(-1.0, 1.0, n, 0.0).unwrap();
        ShiftSequence::from_functions(vec![z; k]).unwrap()
    }

    #[test]
    fn a1_examples() {
        assert_eq!(a1_constant(&zeros(3, 17), 0.0), 0.0);
        assert_eq!(a1_constant(&zeros(3, 17), 3.0), 3.0);
        let z = GridFunction::constant(-1.0, 1.0, 17, 0.0).unwrap();
        let ts = ShiftSequence::from_functions(vec![
            z.clone(),
            z.map(|_| 0.0)
                .with_values(z.nodes().map(|x| 2.0 * x).collect()),
            z.with_values(z.nodes().collect()),
        ])
        .unwrap();
        // mean is x, which integrates to zero
        assert!((a1_constant(&ts, 2.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn minimizer_examples() {
        let sol = l2_minimizer(&zeros(3, 17), 0.0).unwrap();
        assert_eq!(sol.v.max_abs(), 0.0);
        assert_eq!(sol.objective, 0.0);

        let sol = l2_minimizer(&zeros(3, 17), 2.0).unwrap();
        assert!(sol.v.values().iter().all(|&v| (v - 1.0).abs() < 1e-15));
        assert!((sol.objective - 6.0).abs() < 1e-13);

        let z = GridFunction::constant(-1.0, 1.0, 17, 0.0).unwrap();
        let s = z.with_values(z.nodes().map(|x| x.sin()).collect());
        let ts = ShiftSequence::from_functions(vec![z, s.clone(), s.map(|v| -v)]).unwrap();
        let sol = l2_minimizer(&ts, 0.8).unwrap();
        assert!(sol.v.values().iter().all(|&v| (v - 0.4).abs() < 1e-15));
    }

    #[test]
    fn ms_check_examples() {
        let spec =
            ProblemSpec::new(SmoothFunction::zero(), SmoothFunction::zero(), 1.0, 1, 1).unwrap();
        let sol = l2_minimizer(&shift_sequence(&spec, 65).unwrap(), spec.a()).unwrap();
        assert_eq!(
            l2_ms_check(&sol, &spec.constraints()).verdict,
            L2Verdict::MsExists
        );

        let c = Constraints {
            a: 2.0,
            c1: 0.5,
            c2: 0.0,
        };
        let sol = l2_minimizer(&zeros(3, 65), 2.0).unwrap();
        assert_eq!(l2_ms_check(&sol, &c).verdict, L2Verdict::PmsOnly);
    }

    #[test]
    fn traveling_wave_is_pms_only() {
        let t = 1.0;
        let spec = ProblemSpec::new(
            catalog("sin", &[1.0, 0.0]).unwrap(),
            catalog("sin", &[1.0, -t]).unwrap(),
            t,
            1,
            1,
        )
        .unwrap();
        let ts = shift_sequence(&spec, 2049).unwrap();
        let sol = l2_minimizer(&ts, spec.a()).unwrap();
        let check = l2_ms_check(&sol, &spec.constraints());
        // v is even, so v(T) - v(-T) = 0 = c1
        assert!(spec.c1().abs() < 1e-15);
        assert!(check.value_mismatch.abs() < 1e-12);
        // v'(T) - v'(-T) = -4 sin 1 (cos 2 - 1)/3 while c2 = 2 sin 1
        let s1 = 1f64.sin();
        let expected = -4.0 * s1 * (2f64.cos() - 1.0) / 3.0 - 2.0 * s1;
        assert!((check.deriv_mismatch - expected).abs() < 1e-9);
        assert_eq!(check.verdict, L2Verdict::PmsOnly);
    }
}
