//! `fracsob`: command-line access to the fractional-calculus toolkit.

mod config;
mod expr;

use clap::{Parser, Subcommand, ValueEnum};
use config::RunConfig;
use fracsob_core::diffusion::{
    attach_modal, regularity_report, residual, source_truncation, EigenDecomposition, RegularityReport,
};
use fracsob_core::frac_ops::{
    balakrishnan_j, caputo_with_diagnostics, rl_derivative, rl_integral, BalakrishnanQuad, CaputoMethod,
};
use fracsob_core::io::{fmt_f64, read_text, write_text};
use fracsob_core::mittag_leffler::{ml, MlQuery};
use fracsob_core::norm_lab::{verify_forward, verify_inverse, EquivalenceReport, Family, DEFAULT_N, DEFAULT_SEED};
use fracsob_core::{FractionalOrder, GridFunction, SpaceTimeField};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] fracsob_core::Error),
}

impl CliError {
    fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "invalid-input",
            CliError::Core(e) => e.code(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "fracsob", version, about = "Fractional integrals, derivatives and time-fractional diffusion")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for random test families.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Spectral,
    L1,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Eigen,
    Trig,
    Image,
}

#[derive(clap::Args, Debug)]
struct UnaryIo {
    #[arg(long)]
    alpha: f64,
    /// Grid-function CSV.
    #[arg(long)]
    input: PathBuf,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate E_{α,β}(z); prints `value,est_abs_error,regime`.
    MlEval {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
    },
    /// Riemann-Liouville integral J^α u.
    FracIntegrate(UnaryIo),
    /// Caputo derivative.
    Caputo {
        #[command(flatten)]
        io: UnaryIo,
        #[arg(long, value_enum, default_value = "spectral")]
        method: Method,
        #[arg(long, default_value_t = 64)]
        modes: usize,
    },
    /// Riemann-Liouville derivative D^α u.
    RlDerivative(UnaryIo),
    /// J^α u through the resolvent integral over λ.
    Balakrishnan {
        #[command(flatten)]
        io: UnaryIo,
        #[arg(long, default_value_t = 400)]
        nodes: usize,
        #[arg(long, default_value_t = -30.0, allow_hyphen_values = true)]
        s_min: f64,
        #[arg(long, default_value_t = 30.0)]
        s_max: f64,
    },
    /// Norm-equivalence ratios over a test family.
    VerifyNorms {
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, value_enum, default_value = "forward")]
        direction: Direction,
        #[arg(long, default_value_t = DEFAULT_N)]
        n: usize,
        #[arg(long, default_value_t = 64)]
        modes: usize,
        /// Output CSV (stdout when omitted).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Solve the time-fractional diffusion problem described by a config file.
    SolveDiffusion {
        #[arg(long)]
        config: PathBuf,
    },
    /// Regularity report for a stored solution of the configured problem.
    RegularityReport {
        #[arg(long)]
        config: PathBuf,
        /// Space-time field CSV.
        #[arg(long)]
        solution: PathBuf,
        /// Output CSV (stdout when omitted).
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => Ok(write_text(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(io: &UnaryIo) -> Result<(GridFunction, FractionalOrder), CliError> {
    let u = GridFunction::from_csv(&read_text(&io.input)?)?;
    Ok((u, FractionalOrder::new(io.alpha)?))
}

fn norms_csv(r: &EquivalenceReport) -> String {
    let mut s = format!("# family={} alpha={}\nindex,ratio\n", r.family_name, r.alpha.value());
    for (i, v) in r.ratios.iter().enumerate() {
        let _ = writeln!(s, "{i},{}", fmt_f64(*v));
    }
    for (i, why) in &r.excluded {
        let _ = writeln!(s, "# excluded {i}: {why}");
    }
    for note in &r.notes {
        let _ = writeln!(s, "# {note}");
    }
    let _ = writeln!(s, "min,{}", fmt_f64(r.ratio_min));
    let _ = writeln!(s, "max,{}", fmt_f64(r.ratio_max));
    let _ = writeln!(s, "spread,{}", fmt_f64(r.spread));
    s
}

struct Diagnostics {
    report: RegularityReport,
    residual: f64,
    source_truncation: f64,
}

fn report_csv(d: &Diagnostics, solver: &str, iterations: usize) -> String {
    let r = &d.report;
    let slope = r.log_slope.map_or("nan".to_string(), fmt_f64);
    format!(
        "norm_halpha_time,norm_l2h2,norm_l2h2_fd,norm_f,c_observed,log_slope,residual,source_truncation,solver,iterations\n\
         {},{},{},{},{},{},{},{},{},{}\n",
        fmt_f64(r.norm_halpha_time),
        fmt_f64(r.norm_l2h2),
        fmt_f64(r.norm_l2h2_fd),
        fmt_f64(r.norm_f),
        fmt_f64(r.c_observed),
        slope,
        fmt_f64(d.residual),
        fmt_f64(d.source_truncation),
        solver,
        iterations
    )
}

/// Columns `x,u(t_1),u(t_2),…` at the time nodes nearest the requested times.
fn snapshots_csv(u: &SpaceTimeField, times: &[f64]) -> String {
    let nodes = u.time.nodes();
    let idx: Vec<usize> = times
        .iter()
        .map(|t| {
            (0..nodes.len())
                .min_by(|&a, &b| (nodes[a] - t).abs().total_cmp(&(nodes[b] - t).abs()))
                .unwrap_or(0)
        })
        .collect();
    let mut s = String::from("x");
    for &n in &idx {
        let _ = write!(s, ",t={}", fmt_f64(nodes[n]));
    }
    s.push('\n');
    for i in 0..=u.m {
        s.push_str(&fmt_f64(u.x(i)));
        for &n in &idx {
            let _ = write!(s, ",{}", fmt_f64(u.get(i, n)));
        }
        s.push('\n');
    }
    s
}

fn increments_csv(inc: &[f64]) -> String {
    let mut s = String::from("iteration,increment,ratio\n");
    for (i, v) in inc.iter().enumerate() {
        let ratio = if i == 0 { "nan".to_string() } else { fmt_f64(v / inc[i - 1]) };
        let _ = writeln!(s, "{},{},{}", i + 1, fmt_f64(*v), ratio);
    }
    s
}

fn diagnostics(cfg: &RunConfig, u: &mut SpaceTimeField, f: &SpaceTimeField) -> Result<Diagnostics, CliError> {
    let spec = cfg.spec()?;
    let eig = EigenDecomposition::for_spec(&spec.principal_part(), u.m, cfg.modes)?;
    if u.modal.is_none() {
        attach_modal(u, &eig)?;
    }
    Ok(Diagnostics {
        report: regularity_report(u, f, cfg.alpha, cfg.time_modes)?,
        residual: residual(u, f, &spec, cfg.alpha, cfg.t_min)?,
        source_truncation: source_truncation(f, &eig, cfg.t_min)?,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::MlEval { alpha, beta, z } => {
            let r = ml(MlQuery { alpha, beta, z })?;
            println!("{},{:e},{}", r.value, r.est_abs_error, r.regime.name());
        }
        Command::FracIntegrate(io) => {
            let (u, a) = load(&io)?;
            emit(io.output.as_deref(), &rl_integral(&u, a)?.to_csv())?;
        }
        Command::Caputo { io, method, modes } => {
            let (u, a) = load(&io)?;
            let method = match method {
                Method::Spectral => CaputoMethod::Spectral,
                Method::L1 => CaputoMethod::L1,
            };
            let out = caputo_with_diagnostics(&u, a, method, modes)?;
            if let Some(c) = out.cauchy_increment {
                eprintln!("cauchy_increment={}", fmt_f64(c));
            }
            if let Some(r) = &out.range {
                eprintln!("range: {}", r.evidence);
            }
            if out.tail_flag {
                eprintln!("warning: input may lie outside the range of J^alpha");
            }
            emit(io.output.as_deref(), &out.result.to_csv())?;
        }
        Command::RlDerivative(io) => {
            let (u, a) = load(&io)?;
            emit(io.output.as_deref(), &rl_derivative(&u, a)?.to_csv())?;
        }
        Command::Balakrishnan { io, nodes, s_min, s_max } => {
            let (u, a) = load(&io)?;
            let out = balakrishnan_j(&u, a, BalakrishnanQuad { n_nodes: nodes, s_min, s_max })?;
            eprintln!(
                "tail_correction={} tail_bound={}",
                fmt_f64(out.tail_correction),
                fmt_f64(out.tail_bound)
            );
            emit(io.output.as_deref(), &out.result.to_csv())?;
        }
        Command::VerifyNorms { alpha, family, direction, n, modes, report } => {
            let a = FractionalOrder::new(alpha)?;
            let fam = match family {
                FamilyArg::Eigen => Family::Eigen,
                FamilyArg::Trig => Family::Trig,
                FamilyArg::Image => Family::Image,
            };
            let members = fam.build(n, cli.seed, a)?;
            let r = match direction {
                Direction::Forward => verify_forward(fam.name(), &members, a, modes)?,
                Direction::Inverse => verify_inverse(fam.name(), &members, a, modes)?,
            };
            emit(report.as_deref(), &norms_csv(&r))?;
        }
        Command::SolveDiffusion { config } => {
            let cfg = RunConfig::from_file(&config)?;
            let f = cfg.source_field()?;
            let (mut u, increments) = cfg.solve(&f)?;
            if let Some(p) = &cfg.solution_output {
                write_text(p, &u.to_csv())?;
            }
            if let Some(p) = &cfg.snapshots_output {
                write_text(p, &snapshots_csv(&u, &cfg.snapshot_times))?;
            }
            if let Some(p) = &cfg.increments_output {
                write_text(p, &increments_csv(&increments))?;
            }
            let d = diagnostics(&cfg, &mut u, &f)?;
            let text = report_csv(&d, cfg.solver.name(), increments.len());
            emit(cfg.report_output.as_deref(), &text)?;
        }
        Command::RegularityReport { config, solution, output } => {
            let cfg = RunConfig::from_file(&config)?;
            let f = cfg.source_field()?;
            let mut u = SpaceTimeField::from_csv(&read_text(&solution)?)?;
            if !u.same_grid(&f) {
                return Err(CliError::Usage("solution grid differs from the configured grid".into()));
            }
            let d = diagnostics(&cfg, &mut u, &f)?;
            emit(output.as_deref(), &report_csv(&d, cfg.solver.name(), 0))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            eprintln!("error: invalid-input: {}", msg.lines().next().unwrap_or("").trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: invalid-input: --threads must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: invalid-input: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {}", e.code(), e);
            ExitCode::from(e.exit_code())
        }
    }
}
