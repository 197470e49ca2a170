//! Command-line front end. `run` parses arguments, executes one subcommand
//! and returns the process exit code: 0 on success, 2 for configuration,
//! argument or file errors, 3 when the solver hits a limit and 4 when no
//! mutually beneficial design exists. Every global flag can also be set
//! through an environment variable with the `SPACELOG_` prefix, e.g.
//! `SPACELOG_WORKERS=4`.

mod manifest;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use spacelog_milp::SolveStats;

pub use manifest::{assumed_defaults, sha256_hex, RunManifest, SolverSummary};

use crate::error::Error;
use crate::formulation::{baseline_run, flow_records, verify_solution, write_flows_file, CostComponent, CostSettings};
use crate::game::{
    cost_curve_from_milp, solve_scenario1, solve_scenario1_joint, solve_scenario2, solve_scenario3, CostCurve, CostSource,
    CurveSet, CurveSource, IncentiveDesign, MilpCostEvaluator, SearchOptions,
};
use crate::model::{from_toml_str, validate_scenario, ScenarioConfig};
use crate::sweep::{run_sweep, write_sweep_csv, write_sweep_json, SweepBase, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "spacelog", version, about = "Incentive design for commercial participation in space logistics")]
pub struct Cli {
    /// Scenario file (TOML).
    #[arg(long, global = true, env = "SPACELOG_CONFIG")]
    pub config: Option<PathBuf>,
    /// Output directory for structured results and the run manifest.
    #[arg(long, global = true, env = "SPACELOG_OUT")]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long, global = true, env = "SPACELOG_WORKERS")]
    pub workers: Option<usize>,
    /// Relative optimality gap of the MILP solver.
    #[arg(long, global = true, env = "SPACELOG_SOLVER_GAP")]
    pub solver_gap: Option<f64>,
    /// Stop each branch-and-bound search after this many nodes (exit 3).
    #[arg(long, global = true, env = "SPACELOG_NODE_LIMIT")]
    pub node_limit: Option<u64>,
    /// Override the scenario's time step, days.
    #[arg(long, global = true, env = "SPACELOG_TIME_STEP")]
    pub time_step: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cost of the coordinator doing the whole deployment alone.
    Baseline {
        /// Also write the optimal flows as CSV.
        #[arg(long)]
        flows: Option<PathBuf>,
    },
    /// Solve one of the three incentive-design scenarios.
    Scenario(ScenarioArgs),
    /// Evaluate a grid of designs or parameters.
    Sweep {
        /// Sweep specification (TOML).
        #[arg(long)]
        spec: PathBuf,
        /// Price designs with a curve set instead of the network model.
        #[arg(long)]
        curves: Option<PathBuf>,
    },
    /// Export model cost curves or import user curves.
    Curves {
        #[command(subcommand)]
        action: CurvesAction,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    /// Participation as a variable of one joint model (network model only).
    Joint,
    /// Grid search over the participation lattice.
    Lattice,
}

#[derive(Debug, clap::Args)]
pub struct ScenarioArgs {
    /// 1: bargain over participation and incentives; 2: fixed participation;
    /// 3: fixed incentives.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub scenario: u8,
    /// Participation coefficients, one per commercial player.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha: Vec<f64>,
    /// Incentive coefficients, one per commercial player.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Vec<f64>,
    /// Lattice step of the participation search.
    #[arg(long, default_value_t = 0.01)]
    pub grid: f64,
    /// Curve set (TOML) to use instead of the network model.
    #[arg(long)]
    pub curves: Option<PathBuf>,
    /// Search route for scenario 1 on the network model.
    #[arg(long, value_enum, default_value_t = Route::Joint)]
    pub route: Route,
}

#[derive(Debug, Subcommand)]
pub enum CurvesAction {
    /// Sample the model's incremental cost curves and write them as CSV
    /// plus a curve set.
    Export {
        /// Only this seat (0 = coordinator).
        #[arg(long)]
        seat: Option<usize>,
        /// Sampling step in [0, 1].
        #[arg(long, default_value_t = 0.05)]
        grid: f64,
    },
    /// Assemble a curve set from per-player CSV files.
    Import {
        /// Baseline cost Q, currency units.
        #[arg(long)]
        baseline: f64,
        /// Coordinator curve, sampled against its own share.
        #[arg(long)]
        coordinator: PathBuf,
        /// Commercial player curves, in seat order. The file stem is the player id.
        #[arg(long = "player", required = true)]
        players: Vec<PathBuf>,
    },
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Invalid(_) | Error::Io(_) | Error::Argument(_) => 2,
        Error::SolverLimit(_) => 3,
        Error::NoBeneficialDesign(_) => 4,
        Error::Solver(_) => 1,
    }
}

/// Runs the command line given by `args` (program name first) and returns
/// the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let command: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli, command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Money in millions: whole millions from $100M up, three significant
/// figures below.
pub fn money(x: f64) -> String {
    if !x.is_finite() {
        return "infeasible".into();
    }
    let m = x / 1e6;
    let sign = if m < 0.0 { "-" } else { "" };
    let a = m.abs();
    let body = if a >= 99.95 {
        let digits = format!("{:.0}", a);
        let mut s = String::new();
        for (i, ch) in digits.chars().enumerate() {
            if i > 0 && (digits.len() - i) % 3 == 0 {
                s.push(',');
            }
            s.push(ch);
        }
        s
    } else if a >= 9.995 {
        format!("{a:.1}")
    } else if a >= 0.9995 {
        format!("{a:.2}")
    } else {
        format!("{a:.3}")
    };
    format!("{sign}${body}M")
}

struct Context<'a> {
    cli: &'a Cli,
    manifest: RunManifest,
    start: Instant,
    workers: usize,
    settings: CostSettings,
}

impl Context<'_> {
    fn load_config(&mut self) -> Result<ScenarioConfig, Error> {
        let path = self.cli.config.as_ref().ok_or_else(|| Error::Argument("--config is required".into()))?;
        let raw = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = from_toml_str(&raw).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })?;
        if let Some(step) = self.cli.time_step {
            cfg.time_grid.step = step;
            let diags = validate_scenario(&cfg);
            if !diags.is_empty() {
                return Err(Error::Invalid(diags));
            }
        }
        self.manifest.describe_config(&raw, &cfg);
        Ok(cfg)
    }

    fn read_input(&mut self, path: &Path) -> Result<String, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.manifest.add_input(path, text.as_bytes());
        Ok(text)
    }

    fn out_dir(&self) -> Result<Option<&Path>, Error> {
        let Some(dir) = self.cli.out.as_deref() else { return Ok(None) };
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        Ok(Some(dir))
    }

    fn write_output(&mut self, path: &Path, bytes: &[u8]) -> Result<(), Error> {
        std::fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.manifest.outputs.push(path.display().to_string());
        Ok(())
    }

    fn finish(&mut self, dir: Option<&Path>, stats: &SolveStats, solves: usize) -> Result<(), Error> {
        self.manifest.solver = SolverSummary::from_stats(stats, solves);
        self.manifest.wall_time_seconds = self.start.elapsed().as_secs_f64();
        if let Some(dir) = dir {
            let path = self.manifest.write(dir)?;
            eprintln!("wrote {}", path.display());
        }
        Ok(())
    }
}

fn execute(cli: &Cli, command: Vec<String>) -> Result<(), Error> {
    let workers = match cli.workers {
        Some(0) => return Err(Error::Argument("--workers must be >= 1".into())),
        Some(w) => w,
        None => crate::default_workers(),
    };
    let mut settings = CostSettings::default();
    if let Some(gap) = cli.solver_gap {
        if !(0.0..1.0).contains(&gap) {
            return Err(Error::Argument(format!("--solver-gap must be in [0, 1) (got {gap})")));
        }
        settings.solver.relative_gap = gap;
    }
    settings.solver.node_limit = cli.node_limit;
    let mut manifest = RunManifest::new(command);
    manifest.flags.insert("workers".into(), json!(workers));
    manifest.flags.insert("solver_gap".into(), json!(settings.solver.relative_gap));
    manifest.flags.insert("time_step".into(), json!(cli.time_step));
    manifest.flags.insert("node_limit".into(), json!(cli.node_limit));
    let mut ctx = Context { cli, manifest, start: Instant::now(), workers, settings };
    match &cli.command {
        Command::Baseline { flows } => cmd_baseline(&mut ctx, flows.as_deref()),
        Command::Scenario(args) => cmd_scenario(&mut ctx, args),
        Command::Sweep { spec, curves } => cmd_sweep(&mut ctx, spec, curves.as_deref()),
        Command::Curves { action: CurvesAction::Export { seat, grid } } => cmd_curves_export(&mut ctx, *seat, *grid),
        Command::Curves { action: CurvesAction::Import { baseline, coordinator, players } } => {
            cmd_curves_import(&mut ctx, *baseline, coordinator, players)
        }
    }
}

fn cmd_baseline(ctx: &mut Context, flows: Option<&Path>) -> Result<(), Error> {
    let cfg = ctx.load_config()?;
    let run = baseline_run(&cfg, &ctx.settings)?;
    if !run.is_optimal() {
        return Err(Error::Argument(format!(
            "scenario `{}`: the coordinator cannot complete the deployment alone ({:?})",
            cfg.name, run.solution.status
        )));
    }
    let attr = run.attribution();
    let violations = verify_solution(&cfg, &run.formulation, &run.solution.values);
    let p = &run.formulation.problem;
    println!("scenario    {}", cfg.name);
    println!("baseline Q  {}", money(attr.total));
    for c in CostComponent::ALL {
        println!("  {:<12}{}", c.label(), money(attr.component(c)));
    }
    println!("model       {} variables ({} integer), {} rows", p.num_vars(), p.num_integers(), p.num_constraints());
    println!("search      {} nodes, {} LP iterations", run.solution.stats.nodes, run.solution.stats.lp_iterations);
    println!("checks      {} violations", violations.len());
    for v in &violations {
        println!("  {}: {}", v.what, v.detail);
    }

    let dir = ctx.out_dir()?.map(Path::to_path_buf);
    if let Some(path) = flows {
        write_flows_file(path, &flow_records(&cfg, &run.formulation, &run.solution.values))?;
        ctx.manifest.outputs.push(path.display().to_string());
    }
    if let Some(dir) = &dir {
        let components: serde_json::Map<String, Value> =
            CostComponent::ALL.iter().map(|&c| (c.label().to_string(), json!(attr.component(c)))).collect();
        let report = json!({
            "scenario": cfg.name,
            "baseline": attr.total,
            "components": components,
            "model": { "variables": p.num_vars(), "integers": p.num_integers(), "rows": p.num_constraints() },
            "violations": violations.iter().map(|v| json!({ "what": v.what, "detail": v.detail })).collect::<Vec<_>>(),
        });
        ctx.write_output(&dir.join("baseline.json"), pretty(&report).as_bytes())?;
    }
    ctx.finish(dir.as_deref(), &run.solution.stats, 1)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialise") + "\n"
}

fn seat_names(src: &Source) -> Vec<String> {
    match src {
        Source::Model(e) => (0..=e.num_commercial()).map(|z| e.config().players[e.player_of(z)].id.clone()).collect(),
        Source::Curves(c) => std::iter::once(&c.coordinator).chain(&c.players).map(|c| c.player.clone()).collect(),
    }
}

enum Source {
    Model(MilpCostEvaluator),
    Curves(CurveSet),
}

impl Source {
    fn as_cost_source(&self) -> &dyn CostSource {
        match self {
            Source::Model(e) => e,
            Source::Curves(c) => c,
        }
    }

    fn stats(&self) -> (SolveStats, usize) {
        match self {
            Source::Model(e) => (e.stats(), e.solves()),
            Source::Curves(_) => (SolveStats::default(), 0),
        }
    }
}

fn load_source(ctx: &mut Context, curves: Option<&Path>) -> Result<Source, Error> {
    match curves {
        Some(path) => {
            let text = ctx.read_input(path)?;
            Ok(Source::Curves(CurveSet::from_toml_str(&text).map_err(|e| match e {
                Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
                other => other,
            })?))
        }
        None => {
            let cfg = ctx.load_config()?;
            Ok(Source::Model(MilpCostEvaluator::new(cfg, ctx.settings.clone())?))
        }
    }
}

fn cmd_scenario(ctx: &mut Context, args: &ScenarioArgs) -> Result<(), Error> {
    let src = load_source(ctx, args.curves.as_deref())?;
    let cs = src.as_cost_source();
    let k = cs.num_commercial();
    let opts = SearchOptions::default().with_resolution(args.grid).with_workers(ctx.workers);
    opts.steps()?;
    ctx.manifest.flags.insert("grid".into(), json!(args.grid));
    let need = |v: &[f64], name: &str| -> Result<(), Error> {
        if v.len() != k {
            return Err(Error::Argument(format!("scenario {} needs --{name} with {k} value(s)", args.scenario)));
        }
        Ok(())
    };
    let (design, route) = match args.scenario {
        1 => match (&src, args.route) {
            (Source::Model(e), Route::Joint) => (solve_scenario1_joint(e, &opts)?.0, "joint participation model"),
            _ => (solve_scenario1(cs, &opts)?, "participation lattice"),
        },
        2 => {
            need(&args.alpha, "alpha")?;
            (solve_scenario2(cs, &args.alpha)?, "fixed participation")
        }
        _ => {
            need(&args.theta, "theta")?;
            (solve_scenario3(cs, &args.theta, &opts)?, "participation lattice")
        }
    };
    let names = seat_names(&src);
    print_design(&design, &names, route, matches!(src, Source::Model(_)));

    let dir = ctx.out_dir()?.map(Path::to_path_buf);
    if let Some(dir) = &dir {
        let report = json!({ "players": names, "route": route, "design": design });
        ctx.write_output(&dir.join("scenario.json"), pretty(&report).as_bytes())?;
    }
    let (stats, solves) = src.stats();
    ctx.finish(dir.as_deref(), &stats, solves)
}

/// Curve sets carry their own units, so values print unscaled.
fn print_design(d: &IncentiveDesign, names: &[String], route: &str, currency: bool) {
    let p = &d.point;
    let money = |x: f64| if currency { money(x) } else { format!("{x:.6}") };
    let scale = if currency { 1e6f64 } else { 1.0 };
    let list = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ");
    println!("scenario    {} ({route})", d.scenario);
    println!("baseline Q  {}", money(p.baseline));
    println!("alpha       {}", list(&p.alpha));
    println!("theta       {}", list(&p.theta));
    println!("utilities");
    for (name, u) in names.iter().zip(p.utilities()) {
        println!("  {name:<20}{}", money(u));
    }
    println!("welfare     {}", money(p.welfare));
    match p.nash_product {
        Some(np) if currency => println!("nash prod.  {:.4e} ($M^{})", np / scale.powi(names.len() as i32), names.len()),
        Some(np) => println!("nash prod.  {np:.6e}"),
        None => println!("nash prod.  n/a"),
    }
    println!("ties        {}", d.ties.len());
    if d.ties.len() > 1 {
        for t in &d.ties {
            println!("  alpha {}  theta {}", list(&t.alpha), list(&t.theta));
        }
    }
}

fn cmd_sweep(ctx: &mut Context, spec_path: &Path, curves: Option<&Path>) -> Result<(), Error> {
    let dir = ctx.out_dir()?.map(Path::to_path_buf).ok_or_else(|| Error::Argument("sweep needs --out DIR".into()))?;
    let text = ctx.read_input(spec_path)?;
    let spec = SweepSpec::from_toml_str(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", spec_path.display())),
        other => other,
    })?;
    let curve_set;
    let cfg;
    let base = match curves {
        Some(path) => {
            let t = ctx.read_input(path)?;
            curve_set = CurveSet::from_toml_str(&t)?;
            SweepBase::Curves(&curve_set)
        }
        None => {
            cfg = ctx.load_config()?;
            SweepBase::Model { cfg: &cfg, settings: &ctx.settings }
        }
    };
    let result = run_sweep(base, &spec, ctx.workers)?;

    let mut csv_bytes = Vec::new();
    write_sweep_csv(&mut csv_bytes, &result)?;
    ctx.write_output(&dir.join("sweep.csv"), &csv_bytes)?;
    let mut json_bytes = Vec::new();
    write_sweep_json(&mut json_bytes, &result, &spec.quantities)?;
    ctx.write_output(&dir.join("sweep.json"), &json_bytes)?;

    let feasible = result.records.iter().filter(|r| r.feasible).count();
    let failed = result.records.iter().filter(|r| r.error.is_some()).count();
    println!("sweep       {} ({} points, {} feasible, {} failed)", result.name, result.records.len(), feasible, failed);
    let best = result
        .records
        .iter()
        .filter(|r| r.feasible && r.nash_product.is_some())
        .max_by(|a, b| a.nash_product.unwrap().total_cmp(&b.nash_product.unwrap()));
    if let Some(b) = best {
        let axes: Vec<String> = result.axis_names.iter().zip(&b.axes).map(|(n, v)| format!("{n}={v}")).collect();
        println!("best        {}  welfare {}", axes.join(" "), money(b.welfare));
    }
    for r in result.records.iter().filter(|r| r.error.is_some()) {
        eprintln!("point {:?}: {}", r.axes, r.error.as_deref().unwrap_or(""));
    }
    ctx.finish(Some(&dir), &result.stats, result.solves)
}

fn unit_grid(step: f64) -> Result<Vec<f64>, Error> {
    let steps = SearchOptions::default().with_resolution(step).steps()?;
    Ok((0..=steps).map(|i| i as f64 / steps as f64).collect())
}

fn cmd_curves_export(ctx: &mut Context, seat: Option<usize>, step: f64) -> Result<(), Error> {
    let cfg = ctx.load_config()?;
    let eval = MilpCostEvaluator::new(cfg, ctx.settings.clone())?;
    let k = eval.num_commercial();
    let seats: Vec<usize> = match seat {
        Some(z) if z > k => return Err(Error::Argument(format!("seat {z} does not exist (0..={k})"))),
        Some(z) => vec![z],
        None => (0..=k).collect(),
    };
    let grid = unit_grid(step)?;
    ctx.manifest.flags.insert("grid".into(), json!(step));
    let curves: Vec<CostCurve> =
        seats.iter().map(|&z| cost_curve_from_milp(&eval, z, &grid, ctx.workers)).collect::<Result<_, _>>()?;

    let set = (seat.is_none()).then(|| CurveSet::new(eval.baseline(), curves[0].clone(), curves[1..].to_vec()));
    let dir = ctx.out_dir()?.map(Path::to_path_buf);
    match &dir {
        Some(dir) => {
            for c in &curves {
                let mut bytes = Vec::new();
                c.write_csv(&mut bytes)?;
                ctx.write_output(&dir.join(format!("{}.csv", c.player)), &bytes)?;
            }
            if let Some(set) = &set {
                ctx.write_output(&dir.join("curves.toml"), set.to_toml_string().as_bytes())?;
            }
        }
        None => match &set {
            Some(set) => print!("{}", set.to_toml_string()),
            None => curves[0].write_csv(std::io::stdout().lock())?,
        },
    }
    eprintln!("baseline Q  {}", money(eval.baseline()));
    ctx.finish(dir.as_deref(), &eval.stats(), eval.solves())
}

fn cmd_curves_import(ctx: &mut Context, baseline: f64, coordinator: &Path, players: &[PathBuf]) -> Result<(), Error> {
    if !(baseline > 0.0 && baseline.is_finite()) {
        return Err(Error::Argument(format!("--baseline must be > 0 (got {baseline})")));
    }
    let read = |ctx: &mut Context, path: &Path| -> Result<CostCurve, Error> {
        let text = ctx.read_input(path)?;
        let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "player".into());
        CostCurve::read_csv(id, text.as_bytes(), CurveSource::UserSupplied).map_err(|e| match e {
            Error::Parse(m) | Error::Argument(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    };
    let coord = read(ctx, coordinator)?;
    let mut curves = Vec::new();
    for p in players {
        curves.push(read(ctx, p)?);
    }
    let set = CurveSet::new(baseline, coord, curves);
    let text = set.to_toml_string();
    CurveSet::from_toml_str(&text)?;
    let dir = ctx.out_dir()?.map(Path::to_path_buf);
    match &dir {
        Some(dir) => ctx.write_output(&dir.join("curves.toml"), text.as_bytes())?,
        None => print!("{text}"),
    }
    ctx.finish(dir.as_deref(), &SolveStats::default(), 0)
}
