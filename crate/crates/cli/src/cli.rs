//! Command-line definitions and their implementations.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use enersched::budget::{Clock, Limits};
use enersched::lbbd::{compute_lb_rcpsp, compute_lb_tec, Normalizer};
use enersched::master::build_master;
use enersched::oracle::{brute_force, monolithic_lp};
use enersched::precedence::compute_md;
use enersched::solution::{evaluate_makespan, evaluate_tec, validate_solution};
use enersched::{run_lbbd, Instance, LbbdConfig, ObjectiveWeights, RunStatus, SpacesTable};

use crate::clock::WallClock;
use crate::error::{exit, CliError};
use crate::format::{InstanceFile, Metadata, SolutionFile};
use crate::generate::{generate_instance, random_bases, Density, GenerateConfig};
use crate::psplib::parse_psplib;
use crate::report::{bench_csv, BenchRow, SolveReport};
use crate::tariff::parse_costs_csv;

const DEFAULT_TARIFF: &str = include_str!("../data/day_prices.csv");

#[derive(Debug, Parser)]
#[command(name = "enersched", version, about = "Energy-aware project scheduling under time-of-use tariffs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance and print a JSON result.
    Solve(SolveArgs),
    /// Write the master or the monolithic model in LP format.
    ExportModel(ExportArgs),
    /// Build an instance from PSPLIB files.
    Generate(GenerateArgs),
    /// Check a solution file against an instance.
    Validate(ValidateArgs),
    /// Solve every instance of a directory for several alphas; CSV output.
    Bench(BenchArgs),
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let a: f64 = s.parse().map_err(|_| format!("\"{s}\" is not a number"))?;
    if a > 0.0 && a <= 1.0 {
        Ok(a)
    } else {
        Err(format!("alpha must lie in (0, 1], got {a}"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Weight of the energy cost; the makespan gets 1 - alpha.
    #[arg(long, default_value = "0.5", value_parser = parse_alpha)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Node limit of the master search.
    #[arg(long)]
    pub master_budget: Option<u64>,
    /// Node limit per subproblem call.
    #[arg(long)]
    pub sub_budget: Option<u64>,
    /// Wall-clock limit of the master search, in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Skip the heuristic first solution.
    #[arg(long)]
    pub no_warmstart: bool,
}

impl SolverArgs {
    pub fn config(&self) -> LbbdConfig {
        let mut c = LbbdConfig {
            alpha: self.alpha,
            seed: self.seed,
            warmstart: !self.no_warmstart,
            ..LbbdConfig::default()
        };
        c.master.nodes = self.master_budget;
        c.master.seconds = self.time_limit;
        if let Some(n) = self.sub_budget {
            c.subproblem = Limits::nodes(n);
        }
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Lbbd,
    Oracle,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "lbbd")]
    pub method: Method,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the cut pool as CSV.
    #[arg(long)]
    pub cuts: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Master,
    Monolithic,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "master")]
    pub model: Model,
    #[arg(long, default_value = "0.5", value_parser = parse_alpha)]
    pub alpha: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Single-mode PSPLIB files to merge.
    #[arg(long = "psplib", num_args = 1.., required_unless_present = "random_bases")]
    pub bases: Vec<PathBuf>,
    /// Merge this many random PSPLIB-style bases instead of files.
    #[arg(long, conflicts_with = "bases")]
    pub random_bases: Option<usize>,
    /// Tasks per random base.
    #[arg(long, default_value_t = 6)]
    pub base_tasks: usize,
    /// Longest task of a random base.
    #[arg(long, default_value_t = 5)]
    pub max_duration: usize,
    /// sparse, standard, dense, or a fraction.
    #[arg(long, default_value = "standard")]
    pub density: Density,
    /// Draw bases at random until the instance has this many tasks.
    #[arg(long)]
    pub tasks: Option<usize>,
    /// Price CSV (`idx,cost`); tiled to the horizon.
    #[arg(long)]
    pub tariff: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub instance: PathBuf,
    /// JSON with `starts` and `trace`, or a `solve` result.
    pub solution: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory of instance JSON files.
    pub dir: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75,1", value_parser = parse_alpha)]
    pub alphas: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub master_budget: Option<u64>,
    #[arg(long)]
    pub sub_budget: Option<u64>,
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs a parsed command and returns the exit code.
pub fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Solve(a) => solve(a),
        Command::ExportModel(a) => export(a),
        Command::Generate(a) => generate(a),
        Command::Validate(a) => validate(a),
        Command::Bench(a) => bench(a),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| if text.ends_with('\n') { Ok(()) } else { stdout.write_all(b"\n") })
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

pub fn load_instance(path: &Path) -> Result<(String, Instance), CliError> {
    let file = InstanceFile::parse(&read(path)?).map_err(|e| CliError::parse(path, e))?;
    let inst = file.to_instance().map_err(|e| CliError::parse(path, e))?;
    Ok((file.name, inst))
}

/// Both normalizers, as the decomposition computes them.
pub fn normalizers(
    instance: &Instance,
    limits: Limits,
    clock: Option<&dyn Clock>,
) -> Option<(Normalizer, Normalizer)> {
    let spaces = SpacesTable::build(instance.transitions(), instance.tariff());
    let rc = compute_lb_rcpsp(instance, limits, clock)?;
    let tec = compute_lb_tec(instance, &spaces, limits, clock)?;
    Some((tec, rc))
}

fn status_code(status: RunStatus) -> u8 {
    match status {
        RunStatus::Optimal | RunStatus::FeasibleUnproven => exit::OK,
        RunStatus::Infeasible => exit::INFEASIBLE,
        RunStatus::Budget => exit::BUDGET,
    }
}

fn solve(a: SolveArgs) -> Result<u8, CliError> {
    let (name, inst) = load_instance(&a.instance)?;
    let clock = WallClock::start();
    let config = a.solver.config();
    let (report, code, cuts) = match a.method {
        Method::Lbbd => {
            let r = run_lbbd(&inst, &config, Some(&clock)).map_err(|e| CliError::Solver(e.to_string()))?;
            let report = SolveReport::from_run(&name, config.alpha, &r, clock.seconds());
            (report, status_code(r.status), Some(r.cuts.to_csv()))
        }
        Method::Oracle => {
            let norms = normalizers(&inst, config.normalizer, Some(&clock));
            let result = match norms {
                Some((tec, rc)) => {
                    let w = ObjectiveWeights::new(config.alpha, tec.value, rc.value)
                        .expect("normalizers are positive");
                    brute_force(&inst, &w).map_err(|e| CliError::Usage(e.to_string()))?
                }
                None => enersched::oracle::OracleResult { best: None, feasible: 0, ties: Vec::new() },
            };
            let code = if result.best.is_some() { exit::OK } else { exit::INFEASIBLE };
            (SolveReport::from_oracle(&name, config.alpha, norms, &result, clock.seconds()), code, None)
        }
    };
    if let (Some(path), Some(csv)) = (&a.cuts, &cuts) {
        emit(Some(path), csv)?;
    }
    emit(a.out.as_deref(), &report.to_json())?;
    Ok(code)
}

fn export(a: ExportArgs) -> Result<u8, CliError> {
    let (_, inst) = load_instance(&a.instance)?;
    let clock = WallClock::start();
    let (tec, rc) = normalizers(&inst, LbbdConfig::default().normalizer, Some(&clock))
        .ok_or_else(|| CliError::Infeasible("instance has no feasible schedule".into()))?;
    let w = ObjectiveWeights::new(a.alpha, tec.value, rc.value).expect("normalizers are positive");
    let text = match a.model {
        Model::Master => {
            let spaces = SpacesTable::build(inst.transitions(), inst.tariff());
            let md = compute_md(&inst);
            let model = build_master(&inst, &spaces, &md, w).map_err(|e| CliError::Infeasible(e.to_string()))?;
            model.to_lp()
        }
        Model::Monolithic => monolithic_lp(&inst, &w),
    };
    emit(a.out.as_deref(), &text)?;
    Ok(exit::OK)
}

fn generate(a: GenerateArgs) -> Result<u8, CliError> {
    let mut bases = Vec::with_capacity(a.bases.len());
    for path in &a.bases {
        bases.push(parse_psplib(&read(path)?).map_err(|e| CliError::parse(path, e))?);
    }
    if let Some(count) = a.random_bases {
        if count == 0 || a.base_tasks == 0 {
            return Err(CliError::Usage("random bases need at least one base and one task".into()));
        }
        bases = random_bases(a.seed, count, a.base_tasks, a.max_duration);
    }
    let tariff = match &a.tariff {
        Some(path) => parse_costs_csv(&read(path)?).map_err(|e| CliError::parse(path, e))?,
        None => parse_costs_csv(DEFAULT_TARIFF).expect("bundled tariff parses"),
    };
    let config = GenerateConfig {
        density: a.density,
        gamma: a.gamma,
        seed: a.seed,
        target_tasks: a.tasks,
        ..GenerateConfig::default()
    };
    let g = generate_instance(&bases, &tariff, &config).map_err(|e| CliError::Infeasible(e.to_string()))?;
    let sources = g
        .used
        .iter()
        .map(|&b| match a.bases.get(b) {
            Some(p) => p.file_name().map_or_else(|| p.display().to_string(), |f| f.to_string_lossy().into_owned()),
            None => format!("random:{b}"),
        })
        .collect();
    let name = a.name.clone().unwrap_or_else(|| format!("{}-{}-s{}", g.instance.len(), a.density, a.seed));
    let meta = Metadata {
        density: Some(a.density.name()),
        rho: Some(a.density.rho()),
        seed: Some(a.seed),
        sources,
    };
    emit(a.out.as_deref(), &InstanceFile::from_instance(&g.instance, &name, meta).to_json())?;
    Ok(exit::OK)
}

#[derive(serde::Serialize)]
struct ValidationReport {
    valid: bool,
    tec: Option<f64>,
    makespan: usize,
    violations: Vec<String>,
}

fn validate(a: ValidateArgs) -> Result<u8, CliError> {
    let (_, inst) = load_instance(&a.instance)?;
    let text = read(&a.solution)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::parse(&a.solution, e))?;
    // accept a `solve` result as well as a bare solution
    let body = value.get("solution").cloned().unwrap_or(value);
    let file: SolutionFile = serde_json::from_value(body).map_err(|e| CliError::parse(&a.solution, e))?;
    let sol = file.to_solution().map_err(|e| CliError::parse(&a.solution, e))?;
    if sol.starts.len() != inst.len() {
        return Err(CliError::parse(
            &a.solution,
            format!("{} starts given, instance has {} tasks", sol.starts.len(), inst.len()),
        ));
    }
    let violations: Vec<String> = match validate_solution(&inst, &sol) {
        Ok(()) => Vec::new(),
        Err(v) => v.iter().map(ToString::to_string).collect(),
    };
    let report = ValidationReport {
        valid: violations.is_empty(),
        tec: evaluate_tec(&inst, &sol).ok(),
        makespan: evaluate_makespan(&inst, &sol),
        violations,
    };
    emit(a.out.as_deref(), &serde_json::to_string_pretty(&report).expect("report serializes"))?;
    for v in &report.violations {
        eprintln!("violation: {v}");
    }
    Ok(if report.valid { exit::OK } else { exit::INFEASIBLE })
}

fn bench(a: BenchArgs) -> Result<u8, CliError> {
    let entries = fs::read_dir(&a.dir).map_err(|source| CliError::Io { path: a.dir.clone(), source })?;
    let mut paths = Vec::new();
    for e in entries {
        let path = e.map_err(|source| CliError::Io { path: a.dir.clone(), source })?.path();
        if path.extension().is_some_and(|x| x == "json") {
            paths.push(path);
        }
    }
    paths.sort();
    let instances = paths.iter().map(|p| load_instance(p)).collect::<Result<Vec<_>, _>>()?;
    let solver = SolverArgs {
        alpha: 1.0,
        seed: a.seed,
        master_budget: a.master_budget,
        sub_budget: a.sub_budget,
        time_limit: a.time_limit,
        no_warmstart: false,
    };
    let jobs: Vec<(usize, f64)> =
        (0..instances.len()).flat_map(|i| a.alphas.iter().map(move |&alpha| (i, alpha))).collect();
    let next = AtomicUsize::new(0);
    let rows = Mutex::new(Vec::with_capacity(jobs.len()));
    let failure = Mutex::new(None);
    std::thread::scope(|scope| {
        for _ in 0..a.jobs.clamp(1, jobs.len().max(1)) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, alpha)) = jobs.get(k) else { break };
                let (name, inst) = &instances[i];
                let clock = WallClock::start();
                let config = SolverArgs { alpha, ..solver.clone() }.config();
                match run_lbbd(inst, &config, Some(&clock)) {
                    Ok(r) => {
                        let row = BenchRow::new(name, inst, alpha, &r, clock.seconds());
                        rows.lock().expect("no worker panics").push(row);
                    }
                    Err(e) => {
                        *failure.lock().expect("no worker panics") = Some(format!("{name}: {e}"));
                    }
                }
            });
        }
    });
    if let Some(msg) = failure.into_inner().expect("no worker panics") {
        return Err(CliError::Solver(msg));
    }
    let mut rows = rows.into_inner().expect("no worker panics");
    emit(a.out.as_deref(), &bench_csv(&mut rows))?;
    Ok(exit::OK)
}
