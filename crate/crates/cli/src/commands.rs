use std::fmt;
use std::path::{Path, PathBuf};

use tbvp_core::approx::pms_sequence_with;
use tbvp_core::funcmodel::GridFunction;
use tbvp_core::l1min::{self, ms_endpoint_check, MsEndpoint};
use tbvp_core::l2min::{l2_minimizer, l2_ms_check, L2Verdict};
use tbvp_core::oracle::{l1_oracle_with, l2_oracle_with, L1_MAX_ITER, L2_MAX_ITER};
use tbvp_core::problem::{extend_input, shift_sequence, ProblemSpec, ShiftSequence};
use tbvp_core::verify::{verify_solution, Classification};

use crate::config::{ConfigError, Norm, RunConfig};
use crate::io;

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_DEGENERATE: u8 = 3;
pub const EXIT_INFEASIBLE: u8 = 4;
pub const EXIT_ORACLE: u8 = 5;
pub const EXIT_BUDGET: u8 = 6;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn io(message: String) -> Self {
        Self::new(EXIT_IO, message)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Self::new(EXIT_CONFIG, e.to_string())
    }
}

impl From<tbvp_core::Error> for Failure {
    fn from(e: tbvp_core::Error) -> Self {
        use tbvp_core::Error;
        let code = match e {
            Error::DegenerateScaling { .. } => EXIT_DEGENERATE,
            Error::ApproxBudgetExceeded(_) => EXIT_BUDGET,
            _ => EXIT_CONFIG,
        };
        Self::new(code, e.to_string())
    }
}

pub struct Context {
    pub config: RunConfig,
    pub out: PathBuf,
    pub quiet: bool,
}

impl Context {
    fn say(&self, line: impl fmt::Display) {
        if !self.quiet {
            println!("{line}");
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn ensure_out(&self) -> Result<(), Failure> {
        std::fs::create_dir_all(&self.out)
            .map_err(|e| Failure::io(format!("{}: {e}", self.out.display())))
    }
}

/// Minimizer for the configured norm; prints its summary.
fn solve_norm(
    ctx: &Context,
    spec: &ProblemSpec,
    ts: &ShiftSequence,
) -> Result<GridFunction, Failure> {
    match ctx.config.norm {
        Norm::L1 => {
            let (env, sol) = l1min::solve(ts, spec.a())?;
            let bound = l1min::lower_bound(&env, sol.j, spec.a())?;
            ctx.say(format_args!("strip j = {}", sol.j));
            ctx.say(format_args!("boundary case = {:?}", sol.boundary_case));
            if sol.degenerate {
                ctx.say("strip is degenerate (envelopes coincide)");
            }
            ctx.say(format_args!("objective = {}", sol.objective));
            ctx.say(format_args!("lower bound = {bound}"));
            let verdict = match ms_endpoint_check(&env, sol.j, spec.c1()) {
                MsEndpoint::Possible => "possible",
                MsEndpoint::Obstructed => "obstructed, PMS only",
            };
            ctx.say(format_args!("MS endpoint condition: {verdict}"));
            Ok(sol.h)
        }
        Norm::L2 => {
            let sol = l2_minimizer(ts, spec.a())?;
            let check = l2_ms_check(&sol, &spec.constraints());
            ctx.say(format_args!("A1 = {}", sol.a1));
            ctx.say(format_args!("objective = {}", sol.objective));
            let verdict = match check.verdict {
                L2Verdict::MsExists => "MS exists",
                L2Verdict::PmsOnly => "PMS only",
            };
            ctx.say(format_args!(
                "verdict: {verdict} (value mismatch {:.3e}, derivative mismatch {:.3e})",
                check.value_mismatch, check.deriv_mismatch
            ));
            Ok(sol.v)
        }
    }
}

fn header(ctx: &Context, spec: &ProblemSpec) {
    ctx.say(format_args!("A = {}", spec.a()));
    ctx.say(format_args!("c1 = {}", spec.c1()));
    ctx.say(format_args!("c2 = {}", spec.c2()));
    ctx.say(format_args!("K = {}", spec.k()));
}

fn indexed(prefix: &str, k: usize) -> Vec<String> {
    std::iter::once("x".to_string())
        .chain((1..=k).map(|i| format!("{prefix}_{i}")))
        .collect()
}

fn write_family(path: &Path, prefix: &str, family: &[GridFunction]) -> Result<(), Failure> {
    let xs: Vec<f64> = family[0].nodes().collect();
    let mut columns: Vec<&[f64]> = vec![&xs];
    columns.extend(family.iter().map(|g| g.values()));
    io::write_columns(path, &indexed(prefix, family.len()), &columns).map_err(Failure::io)
}

fn write_xy(path: &Path, name: &str, g: &GridFunction) -> Result<(), Failure> {
    let xs: Vec<f64> = g.nodes().collect();
    io::write_columns(
        path,
        &["x".to_string(), name.to_string()],
        &[&xs, g.values()],
    )
    .map_err(Failure::io)
}

pub fn solve(ctx: &Context) -> Result<u8, Failure> {
    let spec = ctx.config.problem()?;
    header(ctx, &spec);
    let ts = shift_sequence(&spec, ctx.config.n)?;
    let v = solve_norm(ctx, &spec, &ts)?;
    let env = l1min::order_envelopes(&ts);
    let ext = extend_input(&v, &spec)?;
    ctx.ensure_out()?;
    write_family(&ctx.path("envelopes.csv"), "a", env.envelopes())?;
    write_xy(&ctx.path("minimizer.csv"), "v", &v)?;
    write_family(&ctx.path("shifts.csv"), "t", ts.functions())?;
    write_xy(&ctx.path("extended.csv"), "v_ext", &ext.stitched())?;
    ctx.say(format_args!("wrote CSV files to {}", ctx.out.display()));
    Ok(EXIT_OK)
}

fn read_input(path: &Path, spec: &ProblemSpec) -> Result<GridFunction, Failure> {
    let (xs, ys) = io::read_two_columns(path).map_err(|e| Failure::new(EXIT_CONFIG, e))?;
    let t = spec.t();
    let n = xs.len();
    let bad = |msg: String| Failure::new(EXIT_CONFIG, format!("{}: {msg}", path.display()));
    if n < 5 {
        return Err(bad(format!("needs at least 5 rows, got {n}")));
    }
    let h = 2.0 * t / (n - 1) as f64;
    let tol = 1e-9 * (1.0 + t);
    for (i, &x) in xs.iter().enumerate() {
        let expected = -t + i as f64 * h;
        if (x - expected).abs() > tol {
            return Err(bad(format!(
                "x must be a uniform grid on [-T, T]; row {} has x = {x}, expected {expected}",
                i + 1
            )));
        }
    }
    GridFunction::new(-t, t, ys).map_err(|e| bad(e.to_string()))
}

pub fn verify(ctx: &Context, input: &Path) -> Result<u8, Failure> {
    let spec = ctx.config.problem()?;
    let v = read_input(input, &spec)?;
    let r = verify_solution(&v, &spec, ctx.config.n_t)?;
    ctx.say(format_args!(
        "pde_residual_max = {:.3e}",
        r.pde_residual_max
    ));
    ctx.say(format_args!("boundary0_max = {:.3e}", r.boundary0_max));
    ctx.say(format_args!("boundaryT_max = {:.3e}", r.boundary_t_max));
    ctx.say(format_args!(
        "integral_residual = {:.3e}",
        r.integral_residual
    ));
    for &(x, j) in &r.seam_value_jumps {
        ctx.say(format_args!("seam value jump at {x}: {j:.3e}"));
    }
    for &(x, j) in &r.seam_deriv_jumps {
        ctx.say(format_args!("seam derivative jump at {x}: {j:.3e}"));
    }
    for (x, w) in r.kinks.iter().zip(&r.kink_widths) {
        ctx.say(format_args!("kink at {x} ({w} nodes)"));
    }
    let worst_eq = r
        .equilibrium_residuals
        .iter()
        .fold(0.0f64, |m, e| m.max(e.abs()));
    ctx.say(format_args!("equilibrium residual max = {worst_eq:.3e}"));
    ctx.say(format_args!(
        "classification = {}",
        r.classification.label()
    ));

    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut row =
        |kind: &str, loc: String, value: String| rows.push(vec![kind.to_string(), loc, value]);
    row(
        "pde_residual_max",
        io::num(r.pde_residual_at.1),
        io::num(r.pde_residual_max),
    );
    row("boundary0_max", String::new(), io::num(r.boundary0_max));
    row("boundaryT_max", String::new(), io::num(r.boundary_t_max));
    row(
        "integral_residual",
        String::new(),
        io::num(r.integral_residual),
    );
    for &(x, j) in &r.seam_value_jumps {
        row("seam_value_jump", io::num(x), io::num(j));
    }
    for &(x, j) in &r.seam_deriv_jumps {
        row("seam_deriv_jump", io::num(x), io::num(j));
    }
    for (i, e) in r.equilibrium_residuals.iter().enumerate() {
        let k = i as isize - spec.k1() as isize;
        let centre = 2.0 * k as f64 * spec.t();
        row("equilibrium_residual", io::num(centre), io::num(*e));
    }
    for (x, w) in r.kinks.iter().zip(&r.kink_widths) {
        row("kink", io::num(*x), w.to_string());
    }
    row(
        "classification",
        String::new(),
        r.classification.label().to_string(),
    );
    ctx.ensure_out()?;
    io::write_rows(
        &ctx.path("report.csv"),
        &["kind", "location", "value"],
        &rows,
    )
    .map_err(Failure::io)?;

    Ok(match r.classification {
        Classification::Infeasible => EXIT_INFEASIBLE,
        _ => EXIT_OK,
    })
}

pub fn oracle(ctx: &Context) -> Result<u8, Failure> {
    let cfg = &ctx.config;
    let spec = cfg.problem()?;
    let ts = shift_sequence(&spec, cfg.n)?;
    let report = match cfg.norm {
        Norm::L1 => l1_oracle_with(
            &ts,
            spec.a(),
            cfg.oracle_n,
            cfg.seed,
            cfg.oracle_max_iter.unwrap_or(L1_MAX_ITER),
        )?,
        Norm::L2 => l2_oracle_with(
            &ts,
            spec.a(),
            cfg.oracle_n,
            cfg.seed,
            cfg.oracle_max_iter.unwrap_or(L2_MAX_ITER),
        )?,
    };
    ctx.say(format_args!("p = {}", report.p));
    ctx.say(format_args!("n = {}", report.n));
    ctx.say(format_args!("oracle value = {}", report.oracle_value));
    ctx.say(format_args!("analytic value = {}", report.analytic_value));
    ctx.say(format_args!("rel_gap = {:.3e}", report.rel_gap));
    ctx.say(format_args!("iterations = {}", report.iterations));
    ctx.say(format_args!("converged = {}", report.converged));
    ctx.say(format_args!("max node gap = {:.3e}", report.max_node_gap()));
    ctx.say(format_args!(
        "constraint residual = {:.3e}",
        report.constraint_residual
    ));
    if report.passed() {
        Ok(EXIT_OK)
    } else {
        eprintln!("error: oracle did not confirm the analytic minimizer");
        Ok(EXIT_ORACLE)
    }
}

pub fn pms(ctx: &Context) -> Result<u8, Failure> {
    let cfg = &ctx.config;
    let spec = cfg.problem()?;
    header(ctx, &spec);
    let ts = shift_sequence(&spec, cfg.n)?;
    let v = solve_norm(ctx, &spec, &ts)?;
    let entries = pms_sequence_with(&v, &spec, &ts, &cfg.eps_schedule, cfg.norm.p())?;
    ctx.ensure_out()?;
    let mut rows = Vec::with_capacity(entries.len());
    let mut over_budget = 0;
    for (i, e) in entries.iter().enumerate() {
        let g = e.result.g.grid();
        let xs: Vec<f64> = g.nodes().collect();
        let headers = ["x", "v", "dv"].map(String::from);
        io::write_columns(
            &ctx.path(&format!("pms_{:03}.csv", i + 1)),
            &headers,
            &[&xs, g.values(), e.result.g.d1()],
        )
        .map_err(Failure::io)?;
        if !e.within_budget() {
            over_budget += 1;
        }
        ctx.say(format_args!(
            "eps = {:e}: achieved {:.3e}, gap {:.3e}, bound {:.3e}, {}{}",
            e.epsilon,
            e.result.achieved_lp_error,
            e.norm_gap,
            e.bound,
            if e.bound_satisfied {
                "bound holds"
            } else {
                "bound violated"
            },
            if e.within_budget() {
                ""
            } else {
                " (over budget)"
            }
        ));
        rows.push(vec![
            io::num(e.epsilon),
            io::num(e.result.achieved_lp_error),
            io::num(e.norm_gap),
            io::num(e.bound),
            if e.bound_satisfied { "yes" } else { "no" }.to_string(),
        ]);
    }
    io::write_rows(
        &ctx.path("pms_summary.csv"),
        &[
            "eps",
            "achieved_error",
            "norm_gap",
            "bound",
            "bound_satisfied",
        ],
        &rows,
    )
    .map_err(Failure::io)?;
    if over_budget > 0 {
        eprintln!("error: {over_budget} schedule entries missed their approximation budget");
        return Ok(EXIT_BUDGET);
    }
    Ok(EXIT_OK)
}
