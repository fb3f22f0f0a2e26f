//! Command-line front end for experiments, games and the invariant suite.

pub mod trace;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::boost_online::Mode;
use crate::error::{Error, Result};
use crate::games::{
    certify_solution, game_value_grid, parse_matrix, random_game, solve_improper_game, MatrixGame,
    OracleSpec,
};
use crate::harness::{
    run_experiment, run_stat_experiment, seed_range, AdversaryKind, ExperimentReport, LearnerKind,
    OnlineExperiment, StatExperiment,
};
use crate::oco::{BoxDomain, OgdFactory};
use crate::rng::RngStream;
use crate::verify;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "boost",
    version,
    about = "Boosting reductions to online convex optimization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Online agnostic booster with diluted Hedge weak learners.
    OnlineAgnostic(OnlineArgs),
    /// Online realizable booster.
    OnlineRealizable(OnlineArgs),
    /// Statistical agnostic booster with diluted stump ERM.
    StatAgnostic(StatArgs),
    /// Statistical realizable booster with stump ERM.
    StatRealizable(StatArgs),
    /// Solve a matrix game with an improper oracle and certify the average strategy.
    Game(GameArgs),
    /// Run the invariant suite.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LearnerArg {
    Hedge,
    Prescient,
}

#[derive(Debug, Args)]
pub struct OnlineArgs {
    /// Horizon T.
    #[arg(long = "t", default_value_t = 1000)]
    pub horizon: usize,
    /// Number of weak learners N.
    #[arg(long, default_value_t = 100)]
    pub n_weak: usize,
    /// Advantage gamma in (0, 1].
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    /// Label sequence, `name[:param]`: constant[:+1|-1], alternating,
    /// threshold-realizable, noisy-threshold:RATE, drifting-threshold:PERIOD,
    /// uniform-random.
    #[arg(long, default_value = "noisy-threshold:0.2")]
    pub adversary: AdversaryKind,
    /// Weak learner (prescient only in realizable mode).
    #[arg(long, value_enum, default_value_t = LearnerArg::Hedge)]
    pub learner: LearnerArg,
    /// Thresholds j/GRID; the expert pool has 2*GRID members.
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct StatArgs {
    /// Boosting rounds T.
    #[arg(long = "t", default_value_t = 400)]
    pub rounds: usize,
    /// Training sample size m.
    #[arg(long, default_value_t = 200)]
    pub m: usize,
    /// Weak-learner sample size m0.
    #[arg(long, default_value_t = 30)]
    pub m0: usize,
    /// Weak-learner advantage (stump dilution).
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Label noise rate of the threshold sample.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Stump thresholds j/GRID.
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Number of seeds (at least 10).
    #[arg(long, default_value_t = 10)]
    pub seeds: usize,
    /// First seed; runs use SEED, SEED+1, ...
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV trace destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GameArgs {
    /// Whitespace-separated row-major matrix; a random 3x3 game if omitted.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Rounds T.
    #[arg(long = "t", default_value_t = 10_000)]
    pub rounds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Oracle noise eps0; 0 selects the exact best response.
    #[arg(long, default_value_t = 0.0)]
    pub eps0: f64,
    /// Improper scale s of {q >= 0, sum(q) <= s}.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Simplex grid resolution of the value oracle.
    #[arg(long, default_value_t = 100)]
    pub resolution: usize,
    /// Player A's box, `LO:HI` in every coordinate.
    #[arg(long = "box", default_value = "-1:1", value_parser = parse_box)]
    pub bounds: (f64, f64),
}

fn parse_box(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|_| format!("bad lower bound `{lo}`"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|_| format!("bad upper bound `{hi}`"))?;
    if lo >= hi || lo.is_nan() || hi.is_nan() {
        return Err("lower bound must be below upper bound".into());
    }
    Ok((lo, hi))
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run_from<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return code;
        }
    };
    match execute(&cli.command, stdout) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e @ Error::InvalidInput(_)) | Err(e @ Error::Parse(_)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_FAIL
        }
    }
}

pub fn main() -> i32 {
    run_from(
        std::env::args_os(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    )
}

/// Runs a parsed command; `Ok(false)` means the experiment failed its check.
pub fn execute(command: &Command, out: &mut dyn Write) -> Result<bool> {
    match command {
        Command::OnlineAgnostic(a) => online(a, Mode::Agnostic, out),
        Command::OnlineRealizable(a) => online(a, Mode::Realizable, out),
        Command::StatAgnostic(a) => stat(a, Mode::Agnostic, out),
        Command::StatRealizable(a) => stat(a, Mode::Realizable, out),
        Command::Game(a) => game(a, out),
        Command::Verify => {
            let mut ok = true;
            for c in verify::run_all() {
                writeln!(
                    out,
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                )?;
                ok &= c.passed;
            }
            Ok(ok)
        }
    }
}

fn print_report(out: &mut dyn Write, what: &str, report: &ExperimentReport) -> Result<()> {
    writeln!(out, "{what}")?;
    for (seed, v) in &report.values {
        writeln!(out, "  seed {seed}: {v:.6}")?;
    }
    writeln!(out, "{}", report.summary())?;
    writeln!(out, "clip events: {}", report.clip_events)?;
    Ok(())
}

fn online(a: &OnlineArgs, mode: Mode, out: &mut dyn Write) -> Result<bool> {
    let exp = OnlineExperiment {
        mode,
        gamma: a.gamma,
        horizon: a.horizon,
        n_learners: a.n_weak,
        adversary: a.adversary,
        learner: match a.learner {
            LearnerArg::Hedge => LearnerKind::Hedge,
            LearnerArg::Prescient => LearnerKind::Prescient,
        },
        grid: a.grid,
    };
    let outcome = run_experiment(&exp, &seed_range(a.common.seed, a.common.seeds))?;
    if let Some(path) = &a.common.out {
        trace::write_trace_file(path, |w| trace::write_online_trace(&outcome.runs, w))?;
    }
    print_report(
        out,
        &format!(
            "final regret, T={} N={} gamma={} adversary={}",
            a.horizon, a.n_weak, a.gamma, a.adversary
        ),
        &outcome.report,
    )?;
    Ok(outcome.report.passed)
}

fn stat(a: &StatArgs, mode: Mode, out: &mut dyn Write) -> Result<bool> {
    let exp = StatExperiment {
        mode,
        gamma: a.gamma,
        rounds: a.rounds,
        sample_size: a.m,
        weak_sample_size: a.m0,
        noise: a.noise,
        grid: a.grid,
    };
    let outcome = run_stat_experiment(&exp, &seed_range(a.common.seed, a.common.seeds))?;
    if let Some(path) = &a.common.out {
        trace::write_trace_file(path, |w| trace::write_stat_trace(&outcome.runs, w))?;
    }
    print_report(
        out,
        &format!(
            "expected cor_S of the ensemble, m={} m0={} T={} gamma={}",
            a.m, a.m0, a.rounds, a.gamma
        ),
        &outcome.report,
    )?;
    Ok(outcome.report.passed)
}

fn game(a: &GameArgs, out: &mut dyn Write) -> Result<bool> {
    let (lo, hi) = a.bounds;
    let game = match &a.matrix {
        Some(path) => {
            let rows = parse_matrix(&std::fs::read_to_string(path)?)?;
            let m = rows.len();
            MatrixGame::new(rows, BoxDomain::cube(lo, hi, m)?)?
        }
        None => {
            let g = random_game(3, 3, &mut RngStream::new(a.seed, 0))?;
            MatrixGame::new(g.matrix().to_vec(), BoxDomain::cube(lo, hi, 3)?)?
        }
    }
    .with_improper_scale(a.scale)?;
    let mut oracle = if a.eps0 > 0.0 {
        OracleSpec::noisy(a.eps0, RngStream::new(a.seed, 1))?
    } else {
        OracleSpec::exact()
    };
    let value = game_value_grid(&game, a.resolution)?;
    let sol = solve_improper_game(&game, &mut oracle, &OgdFactory, a.rounds)?;
    let cert = certify_solution(&game, &sol.q_bar, a.rounds, a.eps0, &value);
    let fmt_vec = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:.6}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    writeln!(out, "average strategy q_bar: {}", fmt_vec(&sol.q_bar))?;
    writeln!(out, "min_p g(p, q_bar):      {:.6}", cert.min_payoff)?;
    writeln!(
        out,
        "grid value estimate:    {:.6} (+{:.6})",
        cert.value_estimate, cert.grid_error
    )?;
    writeln!(out, "R_A(T)/T:               {:.6}", cert.oco_term)?;
    writeln!(out, "eps0:                   {:.6}", cert.epsilon0)?;
    writeln!(out, "threshold:              {:.6}", cert.threshold)?;
    writeln!(out, "margin:                 {:.6}", cert.margin)?;
    writeln!(out, "{}", if cert.passed { "PASS" } else { "FAIL" })?;
    Ok(cert.passed)
}
