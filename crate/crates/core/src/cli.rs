//! `pas-opt` command line.

use crate::error::{Error, Result};
use crate::instance::{validate_instance, Instance};
use crate::io::load_instance;
use crate::model::build_model;
use crate::objective::Alpha;
use crate::report::{compare_baseline, floor_heatmap, room_usage};
use crate::solution::{load_baseline, SolutionFile};
use crate::solver::{
    anneal_improve, brute_force, solve_exact, AnnealSchedule, SolveLimits, SolveStats, DEFAULT_CELL_LIMIT,
    DEFAULT_MAX_SECONDS,
};
use crate::sweep::{grid_from_step, normalize_grid, sweep, DEFAULT_GRID};
use clap::{Args, Parser, Subcommand};
use log::warn;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_OK: u8 = 0;
pub const EXIT_MODEL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_LIMIT: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "pas-opt", version, about = "Classroom allocation with accessibility penalties")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an instance and list every violation
    Validate(InstanceArgs),
    /// Solve one alpha and write solution.json
    Solve {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value = "0.5", value_parser = parse_alpha)]
        alpha: Alpha,
        #[command(flatten)]
        limits: LimitArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Improve a limit-hit incumbent by annealing for this many moves
        #[arg(long)]
        anneal_iterations: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Solve a grid of alphas and write calibration.csv
    Sweep {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Comma-separated alphas
        #[arg(long, value_delimiter = ',', value_parser = parse_alpha, conflicts_with = "step")]
        grid: Vec<Alpha>,
        /// Grid spacing; 0 to 1 inclusive
        #[arg(long, value_parser = parse_alpha)]
        step: Option<Alpha>,
        #[command(flatten)]
        limits: LimitArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Rows solved concurrently
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Room usage, floor heatmap and optional baseline comparison
    Report {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Solution files; one heatmap column each
        #[arg(long = "solution", required = true)]
        solutions: Vec<PathBuf>,
        #[arg(long)]
        baseline: Option<PathBuf>,
        /// Weights for the comparison; defaults to the first solution's alpha
        #[arg(long, value_parser = parse_alpha)]
        alpha: Option<Alpha>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Exhaustive search, for small instances
    Oracle {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value = "0.5", value_parser = parse_alpha)]
        alpha: Alpha,
        #[arg(long, default_value_t = DEFAULT_CELL_LIMIT)]
        cell_limit: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compare a baseline allocation against a solution
    Compare {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        baseline: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long, value_parser = parse_alpha)]
        alpha: Option<Alpha>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// Directory with rooms.csv, disciplines.csv, timeslots.csv, or a JSON file
    pub instance: PathBuf,
    #[arg(long)]
    pub enforce_capacity: bool,
    #[arg(long)]
    pub same_room: bool,
    #[arg(long)]
    pub distinct_days: bool,
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    #[arg(long, default_value_t = DEFAULT_MAX_SECONDS)]
    pub max_seconds: f64,
    #[arg(long)]
    pub max_nodes: Option<u64>,
    #[arg(long, default_value_t = 0.0)]
    pub target_gap: f64,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

fn parse_alpha(s: &str) -> std::result::Result<Alpha, String> {
    s.parse::<Alpha>().map_err(|e| e.to_string())
}

impl LimitArgs {
    fn limits(&self) -> Result<SolveLimits> {
        if !(self.max_seconds > 0.0) {
            return Err(Error::Format("--max-seconds must be positive".into()));
        }
        if self.max_nodes == Some(0) {
            return Err(Error::Format("--max-nodes must be positive".into()));
        }
        if !(self.target_gap >= 0.0) {
            return Err(Error::Format("--target-gap must be non-negative".into()));
        }
        Ok(SolveLimits {
            max_nodes: self.max_nodes,
            max_seconds: Some(self.max_seconds),
            target_gap: self.target_gap,
        })
    }

    fn manifest(&self) -> serde_json::Value {
        json!({
            "max_seconds": self.max_seconds,
            "max_nodes": self.max_nodes,
            "target_gap": self.target_gap,
        })
    }
}

impl InstanceArgs {
    fn load(&self) -> Result<Instance> {
        let parsed = load_instance(&self.instance)?;
        for w in &parsed.warnings {
            warn!("{w}");
        }
        let mut inst = parsed.instance;
        inst.options.enforce_capacity |= self.enforce_capacity;
        inst.options.same_room_per_discipline |= self.same_room;
        inst.options.distinct_days |= self.distinct_days;
        Ok(inst)
    }

    /// Loads and validates; violations are printed and turned into an error.
    fn load_valid(&self) -> Result<Instance> {
        let inst = self.load()?;
        let violations = validate_instance(&inst);
        if !violations.is_empty() {
            return Err(Error::InvalidInstance(violations));
        }
        Ok(inst)
    }

    fn manifest(&self, inst: &Instance) -> serde_json::Value {
        json!({
            "path": self.instance.display().to_string(),
            "disciplines": inst.disciplines.len(),
            "timeslots": inst.timeslots.len(),
            "rooms": inst.rooms.len(),
            "options": inst.options,
        })
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } | Error::Parse(_) | Error::Format(_) | Error::AlphaOutOfRange(_) | Error::AlphaPrecision(_) => {
            EXIT_USAGE
        }
        Error::NoSolution { .. } => EXIT_LIMIT,
        Error::InvalidInstance(_)
        | Error::InfeasibleAssignment(_)
        | Error::Infeasible(_)
        | Error::GreedyDeadEnd(_)
        | Error::OracleTooLarge { .. }
        | Error::UnknownIds(_) => EXIT_MODEL,
    }
}

fn print_error(e: &Error) {
    match e {
        Error::InvalidInstance(vs) => {
            eprintln!("error: instance is invalid");
            for v in vs {
                eprintln!("  {v}");
            }
        }
        Error::InfeasibleAssignment(vs) => {
            eprintln!("error: assignment is infeasible");
            for v in vs {
                eprintln!("  {}: {}", v.row, v.message);
            }
        }
        other => eprintln!("error: {other}"),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.display().to_string(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    println!("wrote {}", path.display());
    Ok(())
}

fn write_manifest(out: &Path, manifest: serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    write_file(&out.join("run_manifest.json"), &text)
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            print_error(&e);
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command) -> Result<u8> {
    match command {
        Command::Validate(args) => cmd_validate(&args),
        Command::Solve {
            instance,
            alpha,
            limits,
            out,
            anneal_iterations,
            seed,
        } => cmd_solve(&instance, alpha, &limits, &out.out, anneal_iterations, seed),
        Command::Sweep {
            instance,
            grid,
            step,
            limits,
            out,
            jobs,
            seed,
        } => cmd_sweep(&instance, grid, step, &limits, &out.out, jobs, seed),
        Command::Report {
            instance,
            solutions,
            baseline,
            alpha,
            out,
        } => cmd_report(&instance, &solutions, baseline.as_deref(), alpha, &out.out),
        Command::Oracle {
            instance,
            alpha,
            cell_limit,
            out,
        } => cmd_oracle(&instance, alpha, cell_limit, &out.out),
        Command::Compare {
            instance,
            baseline,
            solution,
            alpha,
            out,
        } => cmd_compare(&instance, &baseline, &solution, alpha, &out.out),
    }
}

fn cmd_validate(args: &InstanceArgs) -> Result<u8> {
    let inst = args.load()?;
    let violations = validate_instance(&inst);
    if violations.is_empty() {
        println!("OK");
        return Ok(EXIT_OK);
    }
    for v in &violations {
        println!("{v}");
    }
    Ok(EXIT_MODEL)
}

fn cmd_solve(
    args: &InstanceArgs,
    alpha: Alpha,
    limit_args: &LimitArgs,
    out: &Path,
    anneal_iterations: Option<u64>,
    seed: u64,
) -> Result<u8> {
    let limits = limit_args.limits()?;
    let inst = args.load_valid()?;
    println!("alpha {alpha}, seed {seed}");
    let model = build_model(&inst, alpha)?;
    let mut outcome = solve_exact(&model, &limits)?;
    if let (false, Some(iterations)) = (outcome.stats.proven_optimal, anneal_iterations) {
        let schedule = AnnealSchedule {
            iterations,
            ..AnnealSchedule::default()
        };
        let improved = anneal_improve(&inst, &outcome.assignment, alpha, &schedule, seed)?;
        let b = crate::assignment::objective_value(&improved, &inst, alpha)?;
        if b.fo < outcome.breakdown.fo {
            outcome.stats.incumbent_fo = b.fo;
            outcome.stats.gap = b.fo - outcome.stats.best_bound;
            outcome.stats.rooms_open = b.obj1 as usize;
            outcome.breakdown = b;
            outcome.assignment = improved;
        }
    }
    let file = SolutionFile::new(&outcome.assignment, &outcome.breakdown, &outcome.stats);
    write_file(&out.join("solution.json"), &file.to_json())?;
    print_stats(&outcome.breakdown, &outcome.stats);
    write_manifest(
        out,
        json!({
            "command": "solve",
            "version": env!("CARGO_PKG_VERSION"),
            "instance": args.manifest(&inst),
            "alpha": alpha.value(),
            "limits": limit_args.manifest(),
            "anneal_iterations": anneal_iterations,
            "seed": seed,
            "rooms_open": outcome.stats.rooms_open,
            "outputs": ["solution.json"],
        }),
    )?;
    Ok(if outcome.stats.proven_optimal { EXIT_OK } else { EXIT_LIMIT })
}

fn print_stats(b: &crate::objective::ObjectiveBreakdown, s: &SolveStats) {
    println!("{:<16} {}", "FO", b.fo);
    println!("{:<16} {}", "OBJ1 (rooms)", b.obj1);
    println!("{:<16} {}", "OBJ2 (penalty)", b.obj2);
    println!("{:<16} {}", "OBJ_W1", b.w1);
    println!("{:<16} {}", "OBJ_W2", b.w2);
    println!("{:<16} {}", "rooms open (y)", s.rooms_open);
    println!("{:<16} {}", "bound", s.best_bound);
    println!("{:<16} {}", "nodes", s.nodes_explored);
    println!(
        "{:<16} {}",
        "status",
        if s.proven_optimal { "optimal" } else { "limit reached" }
    );
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    args: &InstanceArgs,
    grid: Vec<Alpha>,
    step: Option<Alpha>,
    limit_args: &LimitArgs,
    out: &Path,
    jobs: Option<usize>,
    seed: u64,
) -> Result<u8> {
    let limits = limit_args.limits()?;
    if jobs == Some(0) {
        return Err(Error::Format("--jobs must be positive".into()));
    }
    let alphas = match (grid.is_empty(), step) {
        (_, Some(step)) => grid_from_step(step.value())?,
        (false, None) => normalize_grid(&grid.iter().map(|a| a.value()).collect::<Vec<_>>())?,
        (true, None) => normalize_grid(&DEFAULT_GRID)?,
    };
    let inst = args.load_valid()?;
    println!("seed {seed}");
    let table = sweep(&inst, &alphas, &limits, jobs)?;
    write_file(&out.join("calibration.csv"), &table.to_csv())?;
    let mut outputs = vec!["calibration.csv".to_string()];
    for row in &table.rows {
        let name = format!("solutions/alpha-{:.4}.json", row.alpha.value());
        let file = SolutionFile::new(&row.assignment, &row.breakdown, &row.stats);
        write_file(&out.join(&name), &file.to_json())?;
        outputs.push(name);
    }
    print!("{}", table.render());
    if table.all_proven() {
        for v in table.monotonicity_violations() {
            warn!("monotonicity: {v}");
        }
    }
    write_manifest(
        out,
        json!({
            "command": "sweep",
            "version": env!("CARGO_PKG_VERSION"),
            "instance": args.manifest(&inst),
            "grid": alphas.iter().map(|a| a.value()).collect::<Vec<_>>(),
            "limits": limit_args.manifest(),
            "jobs": jobs,
            "seed": seed,
            "rooms_open": table.rows.iter().map(|r| r.stats.rooms_open).collect::<Vec<_>>(),
            "outputs": outputs,
        }),
    )?;
    Ok(if table.all_proven() { EXIT_OK } else { EXIT_LIMIT })
}

fn cmd_report(
    args: &InstanceArgs,
    paths: &[PathBuf],
    baseline: Option<&Path>,
    alpha: Option<Alpha>,
    out: &Path,
) -> Result<u8> {
    let inst = args.load()?;
    let files = paths.iter().map(|p| SolutionFile::load(p)).collect::<Result<Vec<_>>>()?;
    let mut labeled = Vec::new();
    for (k, f) in files.iter().enumerate() {
        let mut label = format!("alpha={}", f.alpha);
        if labeled.iter().any(|(l, _)| *l == label) {
            label = format!("{label}#{}", k + 1);
        }
        labeled.push((label, f.assignment()));
    }
    let mut outputs = vec!["usage.csv", "heatmap.csv"];
    let usage = room_usage(&labeled[0].1, &inst)?;
    for (label, a) in &labeled {
        let u = room_usage(a, &inst)?;
        println!(
            "{label}: {} of {} rooms used ({:.1}%)",
            u.rooms_used, u.rooms_available, u.utilization_pct
        );
    }
    write_file(&out.join("usage.csv"), &usage.to_csv())?;
    let heatmap = floor_heatmap(&labeled, &inst)?;
    write_file(&out.join("heatmap.csv"), &heatmap.to_csv())?;
    print!("{}", heatmap.render());
    if let Some(path) = baseline {
        let base = load_baseline(path)?;
        let alpha = match alpha {
            Some(a) => a,
            None => Alpha::new(files[0].alpha)?,
        };
        let cmp = compare_baseline(&base, &labeled[0].1, &inst, alpha)?;
        let text = cmp.render(inst.rooms.len());
        print!("{text}");
        write_file(&out.join("comparison.txt"), &text)?;
        write_file(&out.join("comparison.csv"), &cmp.to_csv())?;
        outputs.extend(["comparison.txt", "comparison.csv"]);
    }
    write_manifest(
        out,
        json!({
            "command": "report",
            "version": env!("CARGO_PKG_VERSION"),
            "instance": args.manifest(&inst),
            "solutions": paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "baseline": baseline.map(|p| p.display().to_string()),
            "alpha": alpha.map(|a| a.value()),
            "outputs": outputs,
        }),
    )?;
    Ok(EXIT_OK)
}

fn cmd_oracle(args: &InstanceArgs, alpha: Alpha, cell_limit: u64, out: &Path) -> Result<u8> {
    let inst = args.load_valid()?;
    let start = Instant::now();
    let (a, b) = brute_force(&inst, alpha, cell_limit)?;
    let stats = SolveStats {
        nodes_explored: 0,
        elapsed: start.elapsed().as_secs_f64(),
        best_bound: b.fo,
        incumbent_fo: b.fo,
        proven_optimal: true,
        gap: 0.0,
        rooms_open: b.obj1 as usize,
    };
    write_file(&out.join("oracle.json"), &SolutionFile::new(&a, &b, &stats).to_json())?;
    println!("{b}");
    write_manifest(
        out,
        json!({
            "command": "oracle",
            "version": env!("CARGO_PKG_VERSION"),
            "instance": args.manifest(&inst),
            "alpha": alpha.value(),
            "cell_limit": cell_limit,
            "outputs": ["oracle.json"],
        }),
    )?;
    Ok(EXIT_OK)
}

fn cmd_compare(
    args: &InstanceArgs,
    baseline: &Path,
    solution: &Path,
    alpha: Option<Alpha>,
    out: &Path,
) -> Result<u8> {
    let inst = args.load()?;
    let base = load_baseline(baseline)?;
    let file = SolutionFile::load(solution)?;
    let alpha = match alpha {
        Some(a) => a,
        None => Alpha::new(file.alpha)?,
    };
    let cmp = compare_baseline(&base, &file.assignment(), &inst, alpha)?;
    print!("{}", cmp.render(inst.rooms.len()));
    write_file(&out.join("comparison.csv"), &cmp.to_csv())?;
    write_manifest(
        out,
        json!({
            "command": "compare",
            "version": env!("CARGO_PKG_VERSION"),
            "instance": args.manifest(&inst),
            "baseline": baseline.display().to_string(),
            "solution": solution.display().to_string(),
            "alpha": alpha.value(),
            "outputs": ["comparison.csv"],
        }),
    )?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn default_alpha_is_half() {
        let cli = Cli::try_parse_from(["pas-opt", "solve", "x"]).unwrap();
        match cli.command {
            Command::Solve { alpha, limits, .. } => {
                assert_eq!(alpha, Alpha::HALF);
                assert_eq!(limits.max_seconds, 60.0);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn alpha_out_of_range_is_usage_error() {
        let err = Cli::try_parse_from(["pas-opt", "solve", "x", "--alpha", "1.5"]).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_USAGE as i32);
    }

    #[test]
    fn grid_and_step_conflict() {
        assert!(Cli::try_parse_from(["pas-opt", "sweep", "x", "--grid", "0,1", "--step", "0.5"]).is_err());
        let cli = Cli::try_parse_from(["pas-opt", "sweep", "x", "--grid", "0,0.5,1"]).unwrap();
        match cli.command {
            Command::Sweep { grid, .. } => assert_eq!(grid.len(), 3),
            _ => unreachable!(),
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::NoSolution { best_bound: 1.0 }), EXIT_LIMIT);
        assert_eq!(exit_code(&Error::Infeasible(String::new())), EXIT_MODEL);
        assert_eq!(exit_code(&Error::AlphaOutOfRange(2.0)), EXIT_USAGE);
    }
}
