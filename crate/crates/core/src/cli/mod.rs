//! Command-line front end. `run` parses arguments, executes one command and
//! returns the rendered output and exit code, so it can be driven in-process.

mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub use report::{ErrorRecord, Output, Provenance, RunReport, Status, Table, Value};

use crate::bounds::{self, choose_alpha, HOLDER_MARGIN};
use crate::coeff::{load_field, MatrixField};
use crate::degiorgi::{self, perturbation, residual_on_annulus, solve_c_for_delta};
use crate::discrete::dirichlet::{cube_stencil, DIRICHLET_TOL};
use crate::discrete::heat::INNER_TOL;
use crate::discrete::riesz::{component_means, DIRECT_MAX_UNKNOWNS};
use crate::discrete::stencil::norm2;
use crate::discrete::{
    assemble, direct_solve, gaussian_fit, gradient_probe, holder_probe, lp_ratio_probe, neumann_solve,
    ExperimentRecord, FitConfig,
};
use crate::ellipticity::{ellipticity_report, T_TOL_REL};
use crate::error::Error;

/// Relative rounding level attached to closed-form outputs.
pub const CLOSED_FORM_TOL: f64 = 1e-15;
/// `dist_of_witness − δ(d)` tolerance for the De Giorgi solve.
pub const DEGIORGI_TOL: f64 = 1e-4;
/// A probe sweep shows "no growth" if the log-log slope of the ratio in `t`
/// is at most this.
pub const TREND_SLOPE_TOL: f64 = 0.05;

#[derive(Debug, Parser)]
#[command(name = "ellipcert", version, about = "Ellipticity-distance certificates and heat-semigroup experiments")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Also write the CSV artifact (table or raw samples) to this path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Structured,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lower bounds for p₊ and q₊ from the ellipticity distance.
    Bounds(BoundsArgs),
    /// δ(d), −1/ln δ(d) and the matching ellipticity ratio for d = 3..6.
    Table,
    /// Critical De Giorgi parameter and a perturbed counterexample.
    Degiorgi(DegiorgiArgs),
    /// Finite-difference experiments on a torus field.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, conflicts_with = "field", required_unless_present = "field")]
    pub dist: Option<f64>,
    #[arg(long)]
    pub field: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DegiorgiArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub eps: f64,
    /// Residual refinement study from n to 2n cells per axis.
    #[arg(long)]
    pub verify_grid: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Kernel,
    Lp,
    Gradient,
    Holder,
    Neumann,
}

impl Experiment {
    fn name(self) -> &'static str {
        match self {
            Experiment::Kernel => "kernel",
            Experiment::Lp => "lp",
            Experiment::Gradient => "gradient",
            Experiment::Holder => "holder",
            Experiment::Neumann => "neumann",
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub field: PathBuf,
    #[arg(long, value_enum)]
    pub experiment: Experiment,
    #[arg(long)]
    pub seed: u64,
    /// Comma-separated times (kernel: fit times; lp/gradient: sweep).
    #[arg(long, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    /// Exponent for lp (default 50) and gradient (default 2).
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 8)]
    pub trials: usize,
    /// Fitted kernel columns.
    #[arg(long, default_value_t = 4)]
    pub columns: usize,
    #[arg(long)]
    pub floor: Option<f64>,
    #[arg(long)]
    pub window: Option<f64>,
    #[arg(long)]
    pub substeps: Option<usize>,
    /// Hölder exponent (default: from the Koshelev window).
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long, default_value_t = 0.25)]
    pub inner_fraction: f64,
    #[arg(long, default_value_t = 2000)]
    pub pairs: usize,
    /// Boundary datasets for the Hölder probe (seeds seed..seed+datasets).
    #[arg(long, default_value_t = 20)]
    pub datasets: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
}

/// A failure tagged with the stage that produced it.
#[derive(Debug)]
pub struct CliError {
    pub stage: &'static str,
    pub message: String,
}

fn at(stage: &'static str) -> impl Fn(Error) -> CliError {
    move |e| CliError {
        stage,
        message: e.to_string(),
    }
}

fn fail(stage: &'static str, message: impl Into<String>) -> CliError {
    CliError {
        stage,
        message: message.into(),
    }
}

type CliResult = std::result::Result<RunReport, CliError>;

pub fn cmd_bounds(args: &BoundsArgs) -> CliResult {
    let mut rep = RunReport::new("bounds");
    let (d, dist) = match (&args.field, args.dist) {
        (Some(path), _) => {
            rep.input("field", path.display());
            let field = load_field(path).map_err(at("load_field"))?;
            if let Some(d) = args.d {
                if d != field.d() {
                    return Err(fail("validate", format!("--d {d} does not match the field dimension {}", field.d())));
                }
            }
            let e = ellipticity_report(&field).map_err(at("ellipticity"))?;
            rep.num("lambda", e.lambda, CLOSED_FORM_TOL);
            rep.num("Lambda", e.big_lambda, CLOSED_FORM_TOL);
            rep.num("rho", e.rho, CLOSED_FORM_TOL);
            rep.num("t_star", e.t_star, T_TOL_REL);
            (field.d(), e.dist)
        }
        (None, Some(dist)) => {
            let d = args.d.ok_or_else(|| fail("validate", "--d is required with --dist"))?;
            (d, dist)
        }
        (None, None) => return Err(fail("validate", "one of --dist or --field is required")),
    };
    rep.input("d", d);
    if args.field.is_none() {
        rep.input("dist", dist);
    }
    let cert = bounds::certificate(d, dist).map_err(at("certificate"))?;
    rep.num("d", d as f64, 0.0);
    rep.num("dist", cert.dist, if args.field.is_some() { T_TOL_REL } else { 0.0 });
    rep.num("delta_d", cert.delta_d, CLOSED_FORM_TOL);
    rep.num("sobolev_conjugate", cert.sobolev_conjugate, CLOSED_FORM_TOL);
    rep.text("regime", serde_json::to_value(cert.regime).expect("regime").as_str().expect("string"));
    rep.num("p_plus_lower", cert.p_plus_lower.to_f64(), CLOSED_FORM_TOL);
    rep.num("q_plus_lower", cert.q_plus_lower.to_f64(), 1e-12);
    rep.num("sigma", cert.sigma, 1e-12);
    if let Ok(h) = choose_alpha(d, dist, HOLDER_MARGIN) {
        rep.num("holder_alpha", h.alpha, 1e-14);
        rep.num("holder_mu", h.mu, 1e-14);
        rep.num("koshelev_constant", h.c_alpha, CLOSED_FORM_TOL);
    }
    rep.tolerance("distance_t_rel", T_TOL_REL);
    rep.tolerance("sigma_residual", 1e-12);
    Ok(rep)
}

/// Rows `(d, δ(d), −1/ln δ(d), (1−δ)/(1+δ))` for `d = 3..=6`.
pub fn dimension_table_rows() -> Vec<(usize, f64, f64, f64)> {
    (3..=6)
        .map(|d| {
            let delta = bounds::delta(d).expect("d >= 3");
            (d, delta, -1.0 / delta.ln(), bounds::rho_for_delta(d).expect("d >= 3"))
        })
        .collect()
}

pub fn cmd_table() -> CliResult {
    let mut rep = RunReport::new("table");
    let mut rows = Vec::new();
    for (d, delta, inv, rho) in dimension_table_rows() {
        rep.num(&format!("delta_{d}"), delta, CLOSED_FORM_TOL);
        rep.num(&format!("neg_inv_ln_delta_{d}"), inv, CLOSED_FORM_TOL);
        rep.num(&format!("rho_{d}"), rho, CLOSED_FORM_TOL);
        rows.push(vec![d.to_string(), format!("{delta:.4}"), format!("{inv:.4}"), format!("{rho:.4}")]);
    }
    rep.table = Some(Table {
        header: ["d", "delta", "neg_inv_ln_delta", "rho"].map(String::from).to_vec(),
        rows,
    });
    Ok(rep)
}

pub fn cmd_degiorgi(args: &DegiorgiArgs) -> CliResult {
    let mut rep = RunReport::new("degiorgi");
    rep.input("d", args.d);
    rep.input("eps", args.eps);
    if let Some(n) = args.verify_grid {
        rep.input("verify_grid", n);
    }
    if !(args.eps > 0.0) {
        return Err(fail("validate", format!("--eps must be > 0, got {}", args.eps)));
    }
    let crit = solve_c_for_delta(args.d, DEGIORGI_TOL).map_err(at("solve_c_for_delta"))?;
    rep.num("c", crit.c, 1e-10);
    rep.num("critical_D", crit.big_d, 1e-10);
    rep.num("critical_dist", crit.dist, T_TOL_REL);
    rep.num("delta_d", crit.delta, CLOSED_FORM_TOL);
    rep.num("critical_gap", (crit.dist - crit.delta).abs(), DEGIORGI_TOL);
    let p = perturbation(args.d, crit.c, args.eps).map_err(at("perturbation"))?;
    rep.num("eta", p.eta, 0.0);
    rep.num("D", p.spec.big_d, CLOSED_FORM_TOL);
    rep.num("b", p.spec.b, CLOSED_FORM_TOL);
    rep.num("dist", p.dist, T_TOL_REL);
    rep.num("integrability_threshold", p.integrability_threshold, CLOSED_FORM_TOL);
    rep.flag("b_above_one", p.spec.b > 1.0);
    rep.flag("dist_below_delta_plus_eps", p.dist < p.delta + p.eps);
    rep.tolerance("solve", DEGIORGI_TOL);
    rep.tolerance("distance_t_rel", T_TOL_REL);
    rep.tolerance("sphere_samples", degiorgi::SOLVE_SAMPLES as f64);
    let mut rows: Vec<Vec<String>> = crit
        .scan
        .iter()
        .map(|(c, dist)| vec!["scan".into(), format!("{c:.11e}"), format!("{dist:.11e}")])
        .collect();
    if let Some(n) = args.verify_grid {
        let coarse = residual_on_annulus(&p.spec, n, 0.25, 0.75).map_err(at("residual_on_annulus"))?;
        let fine = residual_on_annulus(&p.spec, 2 * n, 0.25, 0.75).map_err(at("residual_on_annulus"))?;
        rep.num("residual_coarse", coarse.residual, 0.0);
        rep.num("residual_fine", fine.residual, 0.0);
        rep.num("refinement_ratio", coarse.residual / fine.residual, 0.0);
        rows.push(vec!["residual".into(), n.to_string(), format!("{:.11e}", coarse.residual)]);
        rows.push(vec!["residual".into(), (2 * n).to_string(), format!("{:.11e}", fine.residual)]);
    }
    rep.table = Some(Table {
        header: ["kind", "x", "value"].map(String::from).to_vec(),
        rows,
    });
    Ok(rep)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(pts: &[(f64, f64)]) -> f64 {
    let k = pts.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = pts.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn random_mean_zero(len: usize, nc: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f: Vec<Complex64> = (0..len)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let means = component_means(&f, nc);
    f.iter_mut().enumerate().for_each(|(i, z)| *z -= means[i % nc]);
    f
}

fn record_from(rep: &RunReport, exp: Experiment, field: &MatrixField, grid: &crate::discrete::BoxGrid, seed: u64) -> ExperimentRecord {
    let mut rec = ExperimentRecord::new(exp.name(), grid, field, seed);
    for (k, v) in &rep.inputs {
        if let Ok(x) = v.parse::<f64>() {
            rec = rec.param(k, x);
        }
    }
    for o in &rep.outputs {
        if let Value::Num(x) = o.value {
            rec = rec.metric(&o.name, x);
        }
    }
    rec
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult {
    let mut rep = RunReport::new("simulate");
    rep.input("field", args.field.display());
    rep.input("experiment", args.experiment.name());
    rep.input("seed", args.seed);
    rep.provenance.seed = Some(args.seed);
    let field = load_field(&args.field).map_err(at("load_field"))?;
    let sweep = |default: &[f64]| args.times.clone().unwrap_or_else(|| default.to_vec());
    let grid;
    match args.experiment {
        Experiment::Kernel => {
            let op = assemble(&field).map_err(at("assemble"))?;
            grid = op.grid().clone();
            let times = sweep(&[0.05, 0.1, 0.2, 0.4]);
            let mut cfg = FitConfig {
                seed: args.seed,
                ..FitConfig::default()
            };
            cfg.floor = args.floor.unwrap_or(cfg.floor);
            cfg.window = args.window.unwrap_or(cfg.window);
            cfg.substeps = args.substeps.unwrap_or(cfg.substeps);
            rep.input("times", join(&times));
            rep.input("columns", args.columns);
            rep.input("floor", cfg.floor);
            rep.input("window", cfg.window);
            rep.input("substeps", cfg.substeps);
            let fit = gaussian_fit(&op, &times, args.columns, &cfg).map_err(at("gaussian_fit"))?;
            rep.num("c_fit", fit.c_fit, INNER_TOL);
            rep.num("a_fit", fit.a_fit, (cfg.a_max / cfg.a_min).ln() / (cfg.a_points - 1) as f64);
            rep.num("max_violation", fit.max_violation, INNER_TOL);
            rep.num("holdout_violation", fit.holdout_violation, INNER_TOL);
            rep.num("mu_fit", fit.mu_fit, INNER_TOL);
            rep.num("a_ref", fit.a_ref, T_TOL_REL);
            rep.num("fit_samples", fit.fit_samples as f64, 0.0);
            rep.flag("gaussian_envelope_ok", fit.a_fit > 0.0 && fit.max_violation <= 1e-2);
            rep.table = Some(Table {
                header: ["t", "peak_ratio"].map(String::from).to_vec(),
                rows: fit.times.iter().zip(&fit.peak_ratio).map(|(t, r)| vec![t.to_string(), format!("{r:.11e}")]).collect(),
            });
            rep.tolerance("inner_solve", INNER_TOL);
        }
        Experiment::Lp | Experiment::Gradient => {
            let op = assemble(&field).map_err(at("assemble"))?;
            grid = op.grid().clone();
            let grad = args.experiment == Experiment::Gradient;
            let p = args.p.unwrap_or(if grad { 2.0 } else { 50.0 });
            let times = sweep(&[0.1, 0.3, 1.0]);
            rep.input("p", p);
            rep.input("times", join(&times));
            rep.input("trials", args.trials);
            let mut pts = Vec::new();
            for &t in &times {
                let r = if grad {
                    gradient_probe(&op, t, p, args.trials, args.seed)
                } else {
                    lp_ratio_probe(&op, t, p, args.trials, args.seed)
                }
                .map_err(at("probe"))?;
                pts.push((t, r));
            }
            let max = pts.iter().map(|q| q.1).fold(0.0, f64::max);
            rep.num("max_ratio", max, INNER_TOL);
            if pts.len() >= 2 {
                let slope = log_log_slope(&pts);
                rep.num("trend_slope", slope, INNER_TOL);
                rep.flag("no_growth_trend", slope <= TREND_SLOPE_TOL);
            }
            if !grad && field.d() == 3 {
                if let Ok(q) = bounds::q_plus_lower(op.report().dist) {
                    rep.num("q_plus_lower", q, 1e-12);
                }
            }
            rep.table = Some(Table {
                header: ["t", "ratio"].map(String::from).to_vec(),
                rows: pts.iter().map(|(t, r)| vec![t.to_string(), format!("{r:.11e}")]).collect(),
            });
            rep.tolerance("inner_solve", INNER_TOL);
            rep.tolerance("trend_slope", TREND_SLOPE_TOL);
        }
        Experiment::Holder => {
            let dist = ellipticity_report(&field).map_err(at("ellipticity"))?.dist;
            let mu = match args.mu {
                Some(m) => m,
                None => choose_alpha(field.d(), dist, HOLDER_MARGIN).map_err(at("choose_alpha"))?.mu,
            };
            grid = cube_stencil(&field).map_err(at("assemble"))?.grid().clone();
            rep.input("mu", mu);
            rep.input("inner_fraction", args.inner_fraction);
            rep.input("pairs", args.pairs);
            rep.input("datasets", args.datasets);
            if args.datasets == 0 {
                return Err(fail("validate", "--datasets must be >= 1"));
            }
            let mut rows = Vec::new();
            let mut ratios = Vec::new();
            for k in 0..args.datasets as u64 {
                let s = args.seed.wrapping_add(k);
                let pr = holder_probe(&field, mu, args.inner_fraction, args.pairs, s).map_err(at("holder_probe"))?;
                rows.push(vec![s.to_string(), format!("{:.11e}", pr.ratio)]);
                ratios.push(pr.ratio);
            }
            rep.num("empirical_constant", ratios.iter().copied().fold(0.0, f64::max), DIRICHLET_TOL);
            rep.num("min_ratio", ratios.iter().copied().fold(f64::INFINITY, f64::min), DIRICHLET_TOL);
            rep.num("mu", mu, 1e-14);
            rep.flag("finite", ratios.iter().all(|r| r.is_finite()));
            rep.table = Some(Table {
                header: ["seed", "ratio"].map(String::from).to_vec(),
                rows,
            });
            rep.tolerance("dirichlet_solve", DIRICHLET_TOL);
        }
        Experiment::Neumann => {
            let op = assemble(&field).map_err(at("assemble"))?;
            grid = op.grid().clone();
            rep.input("tol", args.tol);
            rep.input("max_iter", args.max_iter);
            let f = random_mean_zero(op.len(), op.n_comp(), args.seed);
            let sol = neumann_solve(&op, &f, args.tol, args.max_iter).map_err(at("neumann_solve"))?;
            let dist = op.report().dist;
            rep.num("dist", dist, T_TOL_REL);
            rep.num("iterations", sol.iterations as f64, 0.0);
            rep.num("residual", sol.residual, args.tol);
            if dist > 0.0 {
                rep.num("iteration_bound", (args.tol.ln() / dist.ln()).ceil() + 5.0, 0.0);
            }
            if op.len() <= DIRECT_MAX_UNKNOWNS {
                let u = direct_solve(&op, &f).map_err(at("direct_solve"))?;
                let diff: Vec<Complex64> = sol.u.iter().zip(&u).map(|(a, b)| a - b).collect();
                rep.num("direct_difference", norm2(&diff) / norm2(&u).max(f64::MIN_POSITIVE), 1e-12);
            }
            rep.table = Some(Table {
                header: ["n", "increment"].map(String::from).to_vec(),
                rows: sol.increments.iter().enumerate().map(|(k, v)| vec![k.to_string(), format!("{v:.11e}")]).collect(),
            });
            rep.tolerance("neumann", args.tol);
        }
    }
    rep.record = Some(record_from(&rep, args.experiment, &field, &grid, args.seed));
    Ok(rep)
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Rendered result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Bounds(_) => "bounds",
        Command::Table => "table",
        Command::Degiorgi(_) => "degiorgi",
        Command::Simulate(_) => "simulate",
    }
}

fn error_outcome(command: &str, stage: &str, message: String, code: i32) -> Outcome {
    let line = ErrorRecord {
        status: "error",
        command,
        stage,
        message,
    }
    .to_line();
    Outcome {
        stdout: String::new(),
        stderr: line + "\n",
        code,
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome {
                    stdout: e.to_string(),
                    stderr: String::new(),
                    code: 0,
                };
            }
            let msg = e.to_string();
            // keep everything above the usage block on one line
            let text: Vec<&str> = msg
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect();
            let text = text.join(" ");
            let text = text.trim_start_matches("error: ");
            let text = if text.is_empty() { "invalid arguments" } else { text };
            return error_outcome("", "parse", text.to_string(), 2);
        }
    };
    let name = command_name(&cli.command);
    let result = match &cli.command {
        Command::Bounds(a) => cmd_bounds(a),
        Command::Table => cmd_table(),
        Command::Degiorgi(a) => cmd_degiorgi(a),
        Command::Simulate(a) => cmd_simulate(a),
    };
    let rep = match result {
        Ok(r) => r,
        Err(e) => return error_outcome(name, e.stage, e.message, 1),
    };
    if let Some(path) = &cli.out {
        let mut csv = rep.to_csv();
        if let Some(rec) = &rep.record {
            csv += "\n";
            csv += &rec.to_csv();
        }
        if let Err(e) = std::fs::write(path, csv) {
            return error_outcome(name, "write_out", format!("cannot write `{}`: {e}", path.display()), 1);
        }
    }
    let stdout = match cli.format {
        Format::Text => rep.to_text(),
        Format::Csv => rep.to_csv(),
        Format::Structured => rep.to_structured(),
    };
    Outcome {
        stdout,
        stderr: String::new(),
        code: 0,
    }
}
