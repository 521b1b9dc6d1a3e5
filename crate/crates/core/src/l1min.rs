//! L¹ minimum inputs: pointwise order envelopes of the shift sequence, strip
//! selection from the integral constraint and the explicit minimizer.

use crate::error::{Error, Result};
use crate::funcmodel::GridFunction;
use crate::problem::ShiftSequence;

/// Pointwise descending order statistics `a_1 ≥ a_2 ≥ … ≥ a_K`.
#[derive(Debug, Clone)]
pub struct OrderEnvelopes {
    a: Vec<GridFunction>,
    integrals: Vec<f64>,
    sources: Vec<GridFunction>,
}

impl OrderEnvelopes {
    /// Sorts an arbitrary family sharing one grid.
    pub fn from_functions(functions: &[GridFunction]) -> Result<Self> {
        let first = functions
            .first()
            .ok_or_else(|| Error::InvalidProblem("envelopes need at least one function".into()))?;
        for f in &functions[1..] {
            first.check_same_grid(f)?;
        }
        let k = functions.len();
        let n = first.n();
        let mut columns = vec![Vec::with_capacity(n); k];
        let mut idx: Vec<usize> = (0..k).collect();
        for node in 0..n {
            idx.clear();
            idx.extend(0..k);
            // stable: ties keep ascending original index
            idx.sort_by(|&p, &q| {
                functions[q].values()[node]
                    .partial_cmp(&functions[p].values()[node])
                    .expect("grid values are finite")
            });
            for (j, &i) in idx.iter().enumerate() {
                columns[j].push(functions[i].values()[node]);
            }
        }
        let a: Vec<GridFunction> = columns.into_iter().map(|c| first.with_values(c)).collect();
        let integrals = a.iter().map(|g| g.integrate()).collect();
        Ok(Self {
            a,
            integrals,
            sources: functions.to_vec(),
        })
    }

    /// 1-based access: `envelope(1)` is the pointwise maximum.
    pub fn envelope(&self, j: usize) -> &GridFunction {
        &self.a[j - 1]
    }

    pub fn envelopes(&self) -> &[GridFunction] {
        &self.a
    }

    /// `integral(j) = ∫ a_j`, 1-based, with `+∞` at 0 and `-∞` at `K+1`.
    pub fn integral(&self, j: usize) -> f64 {
        if j == 0 {
            f64::INFINITY
        } else if j > self.k() {
            f64::NEG_INFINITY
        } else {
            self.integrals[j - 1]
        }
    }

    pub fn integrals(&self) -> &[f64] {
        &self.integrals
    }

    pub fn k(&self) -> usize {
        self.a.len()
    }

    pub fn grid(&self) -> &GridFunction {
        &self.a[0]
    }

    /// Points where two members of the family change strict order: the
    /// midpoint between the last node with one strict sign and the first node
    /// with the opposite sign. Sorted, without duplicates.
    pub fn crossing_points(&self) -> Vec<f64> {
        let grid = self.grid();
        let mut points = Vec::new();
        for p in 0..self.sources.len() {
            for q in p + 1..self.sources.len() {
                let (fp, fq) = (self.sources[p].values(), self.sources[q].values());
                let mut last: Option<(usize, bool)> = None;
                for i in 0..grid.n() {
                    let d = fp[i] - fq[i];
                    if d == 0.0 {
                        continue;
                    }
                    let positive = d > 0.0;
                    if let Some((j, sign)) = last {
                        if sign != positive {
                            points.push(0.5 * (grid.node(j) + grid.node(i)));
                        }
                    }
                    last = Some((i, positive));
                }
            }
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        points
    }

    /// `U(w, x) = Σ_j |a_j(x) - w(x)|` at every node.
    pub fn u_of(&self, w: &GridFunction) -> Result<GridFunction> {
        self.grid().check_same_grid(w)?;
        let values = (0..w.n())
            .map(|i| {
                let wi = w.values()[i];
                self.a.iter().map(|a| (a.values()[i] - wi).abs()).sum()
            })
            .collect();
        Ok(w.with_values(values))
    }
}

pub fn order_envelopes(ts: &ShiftSequence) -> OrderEnvelopes {
    OrderEnvelopes::from_functions(ts.functions()).expect("shift sequence shares one grid")
}

/// Smallest `j ∈ 0..=K` with `∫a_j ≥ A ≥ ∫a_{j+1}`.
pub fn select_strip(env: &OrderEnvelopes, a: f64) -> usize {
    let k = env.k();
    if a > env.integral(1) {
        return 0;
    }
    (1..k)
        .find(|&j| env.integral(j) >= a && a >= env.integral(j + 1))
        .unwrap_or(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCase {
    Interior,
    OnUpper,
    OnLower,
    ScaledTop,
    ScaledBottom,
}

#[derive(Debug, Clone)]
pub struct StripSolution {
    pub j: usize,
    /// `a_{j+1}`, absent for `j = K`.
    pub lower: Option<GridFunction>,
    /// `a_j`, absent for `j = 0`.
    pub upper: Option<GridFunction>,
    pub h: GridFunction,
    /// `∫ Σ_j |a_j - h|`
    pub objective: f64,
    pub boundary_case: BoundaryCase,
    /// The two bounding envelopes coincide on more than two grid cells.
    pub degenerate: bool,
}

impl StripSolution {
    /// Whether `lower ≤ h ≤ upper` at every node, up to `tol`.
    pub fn bounds_hold(&self, tol: f64) -> bool {
        let h = self.h.values();
        let below = |b: &Option<GridFunction>, sign: f64| {
            b.as_ref().is_none_or(|g| {
                g.values()
                    .iter()
                    .zip(h)
                    .all(|(&bound, &hv)| sign * (hv - bound) <= tol * (1.0 + bound.abs()))
            })
        };
        below(&self.upper, 1.0) && below(&self.lower, -1.0)
    }
}

/// The canonical minimizer for strip `j`.
pub fn construct_h(env: &OrderEnvelopes, j: usize, a: f64) -> Result<StripSolution> {
    let k = env.k();
    if j > k {
        return Err(Error::InvalidProblem(format!(
            "strip index {j} exceeds K = {k}"
        )));
    }
    let p1 = env.integral(j);
    let p2 = env.integral(j + 1);
    let upper = (j >= 1).then(|| env.envelope(j).clone());
    let lower = (j < k).then(|| env.envelope(j + 1).clone());
    let (h, case) = if j == 0 {
        let top = env.envelope(1);
        (scaled(top, a, p2, j)?, BoundaryCase::ScaledTop)
    } else if j == k {
        let bottom = env.envelope(k);
        (scaled(bottom, a, p1, j)?, BoundaryCase::ScaledBottom)
    } else if p1 == a {
        (env.envelope(j).clone(), BoundaryCase::OnUpper)
    } else if p2 == a {
        (env.envelope(j + 1).clone(), BoundaryCase::OnLower)
    } else {
        let wu = (a - p2) / (p1 - p2);
        let wl = (p1 - a) / (p1 - p2);
        let h = env
            .envelope(j)
            .zip_map(env.envelope(j + 1), |u, l| wu * u + wl * l)?;
        (h, BoundaryCase::Interior)
    };
    let objective = env.u_of(&h)?.integrate();
    let degenerate = match (&upper, &lower) {
        (Some(u), Some(l)) => coincidence_measure(u, l) > 2.0 * u.spacing(),
        _ => false,
    };
    Ok(StripSolution {
        j,
        lower,
        upper,
        h,
        objective,
        boundary_case: case,
        degenerate,
    })
}

fn scaled(g: &GridFunction, a: f64, divisor: f64, j: usize) -> Result<GridFunction> {
    if a == 0.0 {
        return Ok(g.map(|_| 0.0));
    }
    if divisor == 0.0 {
        return Err(Error::DegenerateScaling { j, a });
    }
    let s = a / divisor;
    Ok(g.map(|v| s * v))
}

/// Trapezoid node weights; they sum to `b - a` exactly.
fn cell_weights(g: &GridFunction) -> impl Iterator<Item = f64> + '_ {
    let n = g.n();
    let h = g.spacing();
    (0..n).map(move |i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
}

fn coincidence_measure(u: &GridFunction, l: &GridFunction) -> f64 {
    u.values()
        .iter()
        .zip(l.values())
        .zip(cell_weights(u))
        .filter(|((x, y), _)| (*x - *y).abs() <= 1e-14 * (1.0 + x.abs()))
        .map(|(_, w)| w)
        .sum()
}

/// `∫_{-T}^{T} Σᵢ |tᵢ - v|`.
pub fn l1_objective(v: &GridFunction, ts: &ShiftSequence) -> Result<f64> {
    crate::problem::full_norm(v, ts, 1)
}

/// `∫ U(a_{j+1}) + (K - 2j)(A - ∫a_{j+1})`; for `j = K` the bottom envelope
/// takes the role of `a_{j+1}`.
pub fn lower_bound(env: &OrderEnvelopes, j: usize, a: f64) -> Result<f64> {
    let k = env.k();
    let anchor = if j < k { j + 1 } else { k };
    let base = env.u_of(env.envelope(anchor))?.integrate();
    let slope = k as f64 - 2.0 * j as f64;
    Ok(base + slope * (a - env.integral(anchor)))
}

/// Measure of the nodes where `a_{j+1} ≤ v ≤ a_j` and of the rest, using
/// trapezoid cell weights.
pub fn strip_membership(v: &GridFunction, env: &OrderEnvelopes, j: usize) -> Result<(f64, f64)> {
    env.grid().check_same_grid(v)?;
    let k = env.k();
    let tol = |b: f64| 1e-10 * (1.0 + b.abs());
    let mut inside = 0.0;
    let mut outside = 0.0;
    for (i, w) in cell_weights(v).enumerate() {
        let x = v.values()[i];
        let under_top = j == 0 || {
            let u = env.envelope(j).values()[i];
            x <= u + tol(u)
        };
        let over_bottom = j >= k || {
            let l = env.envelope(j + 1).values()[i];
            x >= l - tol(l)
        };
        if under_top && over_bottom {
            inside += w;
        } else {
            outside += w;
        }
    }
    Ok((inside, outside))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsEndpoint {
    Possible,
    Obstructed,
}

/// Necessary endpoint condition for a C¹ member of strip `j`:
/// `c1 ∈ [a_{j+1}(T) - a_j(-T), a_j(T) - a_{j+1}(-T)]`.
pub fn ms_endpoint_check(env: &OrderEnvelopes, j: usize, c1: f64) -> MsEndpoint {
    if j == 0 || j >= env.k() {
        return MsEndpoint::Possible;
    }
    let (u, l) = (env.envelope(j), env.envelope(j + 1));
    let lo = l.last() - u.first();
    let hi = u.last() - l.first();
    let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    if c1 >= lo - slack && c1 <= hi + slack {
        MsEndpoint::Possible
    } else {
        MsEndpoint::Obstructed
    }
}

/// Envelopes, strip and canonical minimizer in one call.
pub fn solve(ts: &ShiftSequence, a: f64) -> Result<(OrderEnvelopes, StripSolution)> {
    let env = order_envelopes(ts);
    let j = select_strip(&env, a);
    let sol = construct_h(&env, j, a)?;
    Ok((env, sol))
}
