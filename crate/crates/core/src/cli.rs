//! Command-line front end. `main` only forwards to [`dispatch`].

use std::collections::HashSet;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::density::DensityProvider;
use crate::error::{Error, Result};
use crate::functional::residual_sweep;
use crate::io::{
    gab_table, load_density, parse_config, q2_table, read_gab, read_q2, to_json, write_output,
    CsvTable, RunManifest, VERSION,
};
use crate::model::{step_in_place, FitnessConfig, PatternLiteral, ReplacementPattern};
use crate::one_site::{cdf_one, marginal_one, q_one, FixedPointOne, OneSiteDensity};
use crate::reverse::{backward_trajectory, reversal_test, ReversalConfig};
use crate::rng::RngStream;
use crate::sim::{run_chain, stats_to_density, RunSpec, SimStats};
use crate::two_site::{
    assemble_ansatz, hypergeometric_residual, solve_g, AbSolver, FixedPointTwo, TwoSiteDensity,
};
use crate::Provenance;

#[derive(Parser, Debug)]
#[command(name = "bslab", version, about = "Generalized Bak-Sneppen chains: simulation, stationary densities, reversal checks")]
pub struct Cli {
    /// Worker threads (overridden by BSLAB_THREADS).
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    /// File of `key=value` defaults; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum Command {
    /// Forward simulation with histogram output.
    Simulate(SimulateArgs),
    /// Closed-form densities.
    #[command(subcommand)]
    Density(DensityCommand),
    /// One-site integral-equation fixed point.
    SolveFp1(SolveFp1Args),
    /// Two-site integral-equation fixed point.
    SolveFp2(SolveFp2Args),
    /// Two-site kernel via the separable ansatz.
    SolveAnsatz(SolveAnsatzArgs),
    /// Consistency checks on solver output.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Sample the reversed chain.
    Reverse(ReverseArgs),
    /// Statistical verification of a density.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Plot-ready CSV from earlier outputs.
    Plotdata(PlotArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct PatternArgs {
    /// `isotropic`, `anisotropic`, `complement:[k]`, `complement:[k,k+1]` or `base:[..]`.
    #[arg(long)]
    pub pattern: String,
    /// Number of species.
    #[arg(long)]
    pub n: usize,
}

impl PatternArgs {
    fn build(&self) -> Result<ReplacementPattern> {
        self.pattern.parse::<PatternLiteral>()?.build(self.n)
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub pattern: PatternArgs,
    #[arg(long)]
    pub steps: u64,
    #[arg(long)]
    pub burn_in: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub thinning: u64,
    #[arg(long, default_value_t = 100)]
    pub bins: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "-")]
    pub out: String,
    /// Also write the pooled marginal as `bin_left,bin_right,density`.
    #[arg(long)]
    pub csv: Option<String>,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum DensityCommand {
    /// `x, q, Q, marginal` for one non-replaced species.
    One {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long, default_value = "-")]
        out: String,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct SolveFp1Args {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Args, Debug, Serialize)]
pub struct SolveFp2Args {
    #[arg(long)]
    pub n: usize,
    /// First of the two non-replaced offsets.
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 5_000)]
    pub max_iter: usize,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Args, Debug, Serialize)]
pub struct SolveAnsatzArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Allowed relative disagreement with the half-step ODE solution.
    #[arg(long, default_value_t = 1e-7)]
    pub ode_tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0.5)]
    pub damping: f64,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum CheckCommand {
    /// Hypergeometric form of the G equation (five species).
    Hyp {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long, default_value = "-")]
        out: String,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct ReverseArgs {
    #[command(flatten)]
    pub pattern: PatternArgs,
    /// `closed-form:one`, `uniform`, or a density file.
    #[arg(long)]
    pub density: String,
    #[arg(long)]
    pub steps: usize,
    /// Forward steps used to reach a typical starting state.
    #[arg(long, default_value_t = 10_000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum VerifyCommand {
    /// Monte Carlo residuals of the stationarity identity.
    Functional {
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long)]
        density: String,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 100_000)]
        mc: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Pass when at least this fraction of points has |z| < 3.
        #[arg(long, default_value_t = 0.95)]
        min_fraction: f64,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Forward against backward transition statistics.
    Reversal {
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long)]
        density: String,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 10_000)]
        burn_in: usize,
        #[arg(long, default_value_t = 5)]
        thinning: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "-")]
        out: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    MarginalOverlay,
    Q2Heatmap,
    ResidualScatter,
    GabCurves,
}

#[derive(Args, Debug, Serialize)]
pub struct PlotArgs {
    #[arg(long, value_enum)]
    pub kind: PlotKind,
    /// stats.json, q2.csv, gab.csv or residuals.json depending on the kind.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Analytic density for `marginal-overlay`.
    #[arg(long)]
    pub density: Option<String>,
    /// Second grid for `q2-heatmap`; adds `q_other` and `diff` columns.
    #[arg(long)]
    pub compare: Option<PathBuf>,
    /// Species count for `gab-curves` and `q2-heatmap` inputs.
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value = "-")]
    pub out: String,
}

/// Outcome of a subcommand before it becomes an exit code.
struct Outcome {
    outputs: Vec<PathBuf>,
    seed: Option<u64>,
    passed: bool,
}

impl Outcome {
    fn ok(outputs: Vec<PathBuf>, seed: Option<u64>) -> Self {
        Self {
            outputs,
            seed,
            passed: true,
        }
    }
}

/// Appends `--key value` for every config entry not already on the command
/// line.
fn merge_config(args: Vec<String>) -> std::result::Result<Vec<String>, String> {
    let mut path = None;
    for (k, a) in args.iter().enumerate() {
        if a == "--config" {
            path = args.get(k + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let cfg = parse_config(&text).map_err(|e| e.to_string())?;
    let present: HashSet<String> = args
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    let mut out = args;
    for (key, value) in cfg {
        if present.contains(&key) {
            continue;
        }
        match value.as_str() {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            _ => {
                out.push(format!("--{key}"));
                out.push(value);
            }
        }
    }
    Ok(out)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parameter(_)
        | Error::Pattern(_)
        | Error::Config(_)
        | Error::Domain { .. }
        | Error::Dimension { .. } => 2,
        _ => 1,
    }
}

/// Runs the command line `args` (including the program name) and returns the
/// process exit status: 0 success, 1 failure or failed verification,
/// 2 usage error.
pub fn dispatch<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let args = match merge_config(args) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let workers = std::env::var("BSLAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(cli.workers)
        .max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start {workers} worker threads: {e}");
            return 1;
        }
    };
    let start = Instant::now();
    let result = pool.install(|| run(&cli.command, workers));
    match result {
        Ok(outcome) => {
            if let Err(e) = write_manifest(&cli, &outcome, workers, start.elapsed().as_secs_f64()) {
                eprintln!("error: {e}");
                return 1;
            }
            if outcome.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Simulate(_) => "simulate",
        Command::Density(_) => "density one",
        Command::SolveFp1(_) => "solve-fp1",
        Command::SolveFp2(_) => "solve-fp2",
        Command::SolveAnsatz(_) => "solve-ansatz",
        Command::Check(_) => "check hyp",
        Command::Reverse(_) => "reverse",
        Command::Verify(VerifyCommand::Functional { .. }) => "verify functional",
        Command::Verify(VerifyCommand::Reversal { .. }) => "verify reversal",
        Command::Plotdata(_) => "plotdata",
    }
}

fn write_manifest(cli: &Cli, outcome: &Outcome, workers: usize, secs: f64) -> Result<()> {
    let Some(primary) = outcome.outputs.first() else {
        return Ok(());
    };
    let mut params = serde_json::to_value(&cli.command)?;
    if let Some(obj) = params.as_object_mut() {
        obj.insert("workers".into(), json!(workers));
    }
    let manifest = RunManifest {
        command: command_name(&cli.command).into(),
        params,
        seed: outcome.seed,
        version: VERSION.into(),
        duration_secs: secs,
        outputs: RunManifest::digest_files(&outcome.outputs)?,
    };
    fs::write(RunManifest::path_for(primary), to_json(&manifest)?)?;
    Ok(())
}

fn emit(target: &str, bytes: &[u8], outputs: &mut Vec<PathBuf>) -> Result<()> {
    if let Some(p) = write_output(target, bytes)? {
        outputs.push(p);
    }
    Ok(())
}

fn run(cmd: &Command, workers: usize) -> Result<Outcome> {
    let mut outputs = Vec::new();
    match cmd {
        Command::Simulate(a) => {
            let pattern = a.pattern.build()?;
            let mut spec = RunSpec::new(pattern, a.steps)
                .thinning(a.thinning)
                .bins(a.bins)
                .seed(a.seed)
                .workers(workers);
            if let Some(b) = a.burn_in {
                spec = spec.burn_in(b);
            }
            let stats = run_chain(&spec)?;
            emit(&a.out, to_json(&stats)?.as_bytes(), &mut outputs)?;
            if let Some(csv) = &a.csv {
                let d = stats_to_density(&stats)?;
                let mut t = CsvTable::new(&["bin_left", "bin_right", "density"]);
                for (l, r, v) in d.marginal_rows() {
                    t.push(vec![l, r, v]);
                }
                emit(csv, t.render().as_bytes(), &mut outputs)?;
            }
            Ok(Outcome::ok(outputs, Some(a.seed)))
        }
        Command::Density(DensityCommand::One { n, points, out }) => {
            if *points < 2 {
                return Err(Error::Parameter("need at least 2 points".into()));
            }
            let mut t = CsvTable::new(&["x", "q", "Q", "marginal"]);
            for k in 0..*points {
                let x = if k + 1 == *points { 1.0 } else { k as f64 / (*points - 1) as f64 };
                t.push(vec![x, q_one(*n, x)?, cdf_one(*n, x)?, marginal_one(*n, x)?]);
            }
            emit(out, t.render().as_bytes(), &mut outputs)?;
            Ok(Outcome::ok(outputs, None))
        }
        Command::SolveFp1(a) => {
            let res = FixedPointOne::new(a.n, a.grid).tol(a.tol).max_iter(a.max_iter).solve()?;
            let exact = OneSiteDensity::new(a.n)?;
            let mut t = CsvTable::new(&["x", "q", "closed_form"]);
            let mut sup: f64 = 0.0;
            for (i, x) in res.grid.nodes().enumerate() {
                let q = res.grid.values()[i];
                sup = sup.max((q - exact.q(x)).abs());
                t.push(vec![x, q, exact.q(x)]);
            }
            eprintln!(
                "converged in {} sweeps (last change {:e}); sup distance to closed form {:e}",
                res.iterations, res.last_change, sup
            );
            emit(&a.out, t.render().as_bytes(), &mut outputs)?;
            Ok(Outcome::ok(outputs, None))
        }
        Command::SolveFp2(a) => {
            let res = FixedPointTwo::new(a.n, a.k, a.grid)
                .tol(a.tol)
                .max_iter(a.max_iter)
                .solve()?;
            eprintln!(
                "converged in {} sweeps (last change {:e}); mass {}",
                res.iterations,
                res.last_change,
                res.density.integral()
            );
            emit(&a.out, q2_table(res.density.grid()).render().as_bytes(), &mut outputs)?;
            Ok(Outcome::ok(outputs, None))
        }
        Command::SolveAnsatz(a) => {
            let g = solve_g(a.n, a.grid, a.ode_tol)?;
            let sol = AbSolver::default()
                .tol(a.tol)
                .max_iter(a.max_iter)
                .damping(a.damping)
                .solve(&g)?;
            // fails on negativity
            assemble_ansatz(&sol)?;
            eprintln!(
                "A/B converged in {} iterations (last change {:e})",
                sol.iterations, sol.last_change
            );
            emit(&a.out, gab_table(&sol).render().as_bytes(), &mut outputs)?;
            Ok(Outcome::ok(outputs, None))
        }
        Command::Check(CheckCommand::Hyp { input, tol, out }) => {
            let table = CsvTable::parse(&fs::read_to_string(input)?)?;
            let sol = read_gab(&table, 5)?;
            let residual = hypergeometric_residual(&sol.g);
            let passed = residual < *tol;
            let report = json!({
                "residual": residual,
                "tol": tol,
                "grid": sol.intervals(),
                "pass": passed,
            });
            emit(out, to_json(&report)?.as_bytes(), &mut outputs)?;
            Ok(Outcome {
                outputs,
                seed: None,
                passed,
            })
        }
        Command::Reverse(a) => {
            let pattern = a.pattern.build()?;
            let d = load_density(&a.density, a.pattern.n)?;
            let mut fwd = RngStream::new(a.seed, 0);
            let mut x: Vec<f64> = (0..a.pattern.n).map(|_| fwd.uniform()).collect();
            for _ in 0..a.burn_in {
                step_in_place(&pattern, &mut x, &mut |_| fwd.uniform());
            }
            let start = FitnessConfig::new(x)?;
            let (end, records) =
                backward_trajectory(&d, &pattern, &start, a.steps, &mut RngStream::new(a.seed, 1))?;
            let proposals: u64 = records.iter().map(|r| r.proposals).sum();
            let report = json!({
                "provenance": d.provenance().to_string(),
                "start": start.values(),
                "end": end.values(),
                "mean_proposals": proposals as f64 / records.len().max(1) as f64,
                "steps": records,
            });
            emit(&a.out, to_json(&report)?.as_bytes(), &mut outputs)?;
            Ok(Outcome::ok(outputs, Some(a.seed)))
        }
        Command::Verify(VerifyCommand::Functional {
            pattern,
            density,
            points,
            mc,
            seed,
            min_fraction,
            out,
        }) => {
            let p = pattern.build()?;
            let d = load_density(density, pattern.n)?;
            let summary = residual_sweep(&d, &p, *points, *mc, *seed)?;
            let passed = summary.fraction_within_3 >= *min_fraction;
            let report = json!({
                "provenance": d.provenance().to_string(),
                "max_abs_z": summary.max_abs_z,
                "fraction_within_3": summary.fraction_within_3,
                "min_fraction": min_fraction,
                "pass": passed,
                "points": summary.reports,
            });
            emit(out, to_json(&report)?.as_bytes(), &mut outputs)?;
            Ok(Outcome {
                outputs,
                seed: Some(*seed),
                passed,
            })
        }
        Command::Verify(VerifyCommand::Reversal {
            pattern,
            density,
            steps,
            burn_in,
            thinning,
            seed,
            out,
        }) => {
            let p = pattern.build()?;
            let d = load_density(density, pattern.n)?;
            let mut cfg = ReversalConfig::new(*steps, *seed);
            cfg.burn_in = *burn_in;
            cfg.thinning = *thinning;
            let r = reversal_test(&d, &p, &cfg)?;
            let report = json!({
                "provenance": d.provenance().to_string(),
                "steps": r.steps,
                "chi2": r.chi2.statistic,
                "ks": r.ks.statistic,
                "p_values": { "chi2": r.chi2.p_value, "ks": r.ks.p_value },
                "forward_offsets": r.forward_offsets,
                "backward_offsets": r.backward_offsets,
                "pre_normalization_sums": r.pre_normalization_sums,
                "pass": r.passed,
            });
            emit(out, to_json(&report)?.as_bytes(), &mut outputs)?;
            Ok(Outcome {
                outputs,
                seed: Some(*seed),
                passed: r.passed,
            })
        }
        Command::Plotdata(a) => {
            let table = plotdata(a)?;
            emit(&a.out, table.render().as_bytes(), &mut outputs)?;
            Ok(Outcome::ok(outputs, None))
        }
    }
}

fn analytic_marginal(spec: &str, n: usize) -> Result<Box<dyn Fn(f64) -> f64>> {
    match spec {
        "closed-form:one" => {
            let d = OneSiteDensity::new(n)?;
            Ok(Box::new(move |x| d.marginal(x)))
        }
        "uniform" => Ok(Box::new(|_| 1.0)),
        path => {
            let table = CsvTable::parse(&fs::read_to_string(path)?)?;
            let header: Vec<&str> = table.header.iter().map(String::as_str).collect();
            let q = match header.as_slice() {
                ["u", "v", "q"] => TwoSiteDensity::new(n, read_q2(&table)?, Provenance::FixedPointGrid),
                ["x", "G", "A", "B"] => assemble_ansatz(&read_gab(&table, n)?)?,
                _ => {
                    return Err(Error::Parse(format!(
                        "no marginal available from columns `{}`",
                        table.header.join(",")
                    )))
                }
            };
            Ok(Box::new(move |x| q.marginal(x)))
        }
    }
}

fn plotdata(a: &PlotArgs) -> Result<CsvTable> {
    let text = fs::read_to_string(&a.input)?;
    match a.kind {
        PlotKind::MarginalOverlay => {
            let stats: SimStats = serde_json::from_str(&text)?;
            let d = stats_to_density(&stats)?;
            let spec = a.density.as_deref().unwrap_or("closed-form:one");
            let f = analytic_marginal(spec, stats.n_species())?;
            let mut t = CsvTable::new(&["x", "empirical", "analytic"]);
            for (l, r, v) in d.marginal_rows() {
                let x = 0.5 * (l + r);
                t.push(vec![x, v, f(x)]);
            }
            Ok(t)
        }
        PlotKind::Q2Heatmap => {
            let g = read_q2(&CsvTable::parse(&text)?)?;
            let Some(other) = &a.compare else {
                return Ok(q2_table(&g));
            };
            let h = read_q2(&CsvTable::parse(&fs::read_to_string(other)?)?)?;
            if h.intervals() != g.intervals() {
                return Err(Error::GridMismatch {
                    left: format!("{}: {} intervals", a.input.display(), g.intervals()),
                    right: format!("{}: {} intervals", other.display(), h.intervals()),
                });
            }
            let m = g.intervals();
            let mut t = CsvTable::new(&["u", "v", "q", "q_other", "diff"]);
            for i in 0..=m {
                for j in 0..=i {
                    let (p, q) = (g.get(i, j), h.get(i, j));
                    t.push(vec![i as f64 / m as f64, j as f64 / m as f64, p, q, p - q]);
                }
            }
            Ok(t)
        }
        PlotKind::ResidualScatter => {
            let v: serde_json::Value = serde_json::from_str(&text)?;
            let points = v["points"]
                .as_array()
                .ok_or_else(|| Error::Parse("residual file has no `points` array".into()))?;
            let n = points
                .first()
                .and_then(|p| p["x"].as_array())
                .map(|x| x.len())
                .ok_or_else(|| Error::Parse("residual file has no points".into()))?;
            let names: Vec<String> = (0..n).map(|i| format!("x{i}")).chain(["z".into()]).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let mut t = CsvTable::new(&refs);
            for p in points {
                let mut row: Vec<f64> = p["x"]
                    .as_array()
                    .map(|x| x.iter().filter_map(|v| v.as_f64()).collect())
                    .unwrap_or_default();
                row.push(p["z"].as_f64().unwrap_or(f64::NAN));
                if row.len() != n + 1 {
                    return Err(Error::Parse("residual points have inconsistent dimension".into()));
                }
                t.push(row);
            }
            Ok(t)
        }
        PlotKind::GabCurves => {
            let table = CsvTable::parse(&text)?;
            read_gab(&table, a.n)?;
            Ok(table)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_does_not_override_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "steps = 50\nseed = 7\nverbose = true\nquiet = false\n").unwrap();
        let args = vec![
            "bslab".to_string(),
            "simulate".into(),
            "--steps".into(),
            "10".into(),
            "--config".into(),
            path.display().to_string(),
        ];
        let merged = merge_config(args).unwrap();
        assert_eq!(merged.iter().filter(|a| *a == "--steps").count(), 1);
        assert!(merged.windows(2).any(|w| w[0] == "--seed" && w[1] == "7"));
        assert!(merged.contains(&"--verbose".to_string()));
        assert!(!merged.contains(&"--quiet".to_string()));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(dispatch(["bslab", "no-such-command"]), 2);
        assert_eq!(dispatch(["bslab", "density", "one", "--bogus"]), 2);
        assert_eq!(dispatch(["bslab", "--help"]), 0);
    }
}
