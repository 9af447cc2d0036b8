//! Command-line front end of the `bestchoice` binary.
//!
//! Every command writes CSV to `out` and human-readable notes to `err`.
//! [`run`] returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | input error (bad flags, spec, file or argument) |
//! | 3 | capability error (route not available for this input) |
//! | 4 | construction failure |

pub mod format;
pub mod prior_file;
pub mod spec;

use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::dominance::{self, Relation};
use crate::error::{invalid, Error};
use crate::exact;
use crate::games::{self, geometric::improve_on_inv_e, saddle::saddle, Example};
use crate::minimax;
use crate::prior::{PriorKind, SampleSizeDistribution};
use crate::report::{EvaluationReport, Method};
use crate::simulate;
use crate::strategy::Strategy;

use format::{num, three};
pub use prior_file::{load_prior, parse_prior};
pub use spec::{ParseError, StrategySpec};

/// Environment variable that caps the number of worker threads.
pub const THREADS_ENV: &str = "BESTCHOICE_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAPABILITY: i32 = 3;
pub const EXIT_CONSTRUCTION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "bestchoice", version, about = "Best-choice stopping with random arrival times")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Winning probability of one strategy, per n or mixed over a prior.
    Eval {
        #[arg(long)]
        strategy: StrategySpec,
        /// Numbers of items, e.g. `1,2,5..10`.
        #[arg(long, conflicts_with = "dist", required_unless_present = "dist")]
        n: Option<String>,
        /// Prior file.
        #[arg(long)]
        dist: Option<PathBuf>,
        /// Estimate by simulation instead of the exact formulas.
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Per-n differences and the dominance relation between two strategies.
    Compare {
        #[arg(long)]
        a: StrategySpec,
        #[arg(long)]
        b: StrategySpec,
        /// Inclusive range `A..B`.
        #[arg(long)]
        n_range: String,
        /// Set on which strong dominance is tested, e.g. `3..50`.
        #[arg(long)]
        z: Option<String>,
    },
    /// Right-shifted minimax cutoffs and the reference table.
    Minimax {
        #[arg(long, default_value_t = 3)]
        steps: usize,
    },
    /// Ladder strategy that beats 1/e on every n up to `u`.
    Dominate {
        #[arg(long)]
        u: u64,
        /// Fraction of the previous advantage each stage must keep.
        #[arg(long, default_value_t = 0.5)]
        factor: f64,
    },
    /// Saddle points of the worked games and the geometric prior.
    Game {
        game: GameKind,
        /// Prior parameter for example1/example2.
        #[arg(long)]
        p: Option<f64>,
        /// Geometric parameter.
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Optimal stopping regions against a prior, by dynamic programming.
    Bestresponse {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, default_value_t = games::best_response::DEFAULT_GRID)]
        grid: usize,
    },
    /// Plot data.
    Figure {
        figure: FigureKind,
        #[arg(long, default_value = "1,2,3,4,5")]
        n_list: String,
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GameKind {
    Example1,
    Example2,
    Geometric,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FigureKind {
    Pnx,
}

/// Failure of a command, mapped onto an exit code.
#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) => EXIT_INPUT,
        Error::UnsupportedStrategy(_) | Error::UnsupportedComparison(_) | Error::DegenerateState(_) => {
            EXIT_CAPABILITY
        }
        Error::ConstructionFailed { .. } => EXIT_CONSTRUCTION,
    }
}

/// Apply [`THREADS_ENV`] to the global worker pool, once per process.
pub fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            // A second call in the same process keeps the first pool.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    configure_threads();
    let result = match cli.command {
        Command::Eval { strategy, n, dist, mc, trials, seed } => {
            cmd_eval(&strategy, n.as_deref(), dist, mc, trials, seed, out, err)
        }
        Command::Compare { a, b, n_range, z } => cmd_compare(&a, &b, &n_range, z.as_deref(), out, err),
        Command::Minimax { steps } => cmd_minimax(steps, out, err),
        Command::Dominate { u, factor } => cmd_dominate(u, factor, out, err),
        Command::Game { game, p, theta } => cmd_game(game, p, theta, out, err),
        Command::Bestresponse { dist, grid } => cmd_bestresponse(dist, grid, out, err),
        Command::Figure { figure: FigureKind::Pnx, n_list, grid } => cmd_figure_pnx(&n_list, grid, out),
    };
    match result.and_then(|()| out.flush().map_err(Failure::from)) {
        Ok(()) => EXIT_OK,
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

/// `1,2,5..10` → `[1, 2, 5, 6, …, 10]`.
pub fn parse_n_list(text: &str) -> crate::Result<Vec<u64>> {
    let mut ns = Vec::new();
    for part in text.split(',').map(str::trim) {
        if let Some((a, b)) = part.split_once("..") {
            let (a, b) = (parse_n(a)?, parse_n(b)?);
            if a > b {
                return Err(invalid(format!("empty range `{part}`")));
            }
            ns.extend(a..=b);
        } else {
            ns.push(parse_n(part)?);
        }
    }
    Ok(ns)
}

fn parse_n(text: &str) -> crate::Result<u64> {
    match text.trim().parse::<u64>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(invalid(format!("`{text}` is not a positive integer"))),
    }
}

fn parse_range(text: &str) -> crate::Result<(u64, u64)> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| invalid(format!("range `{text}` must look like A..B")))?;
    let (a, b) = (parse_n(a)?, parse_n(b)?);
    if a > b {
        return Err(invalid(format!("empty range `{text}`")));
    }
    Ok((a, b))
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    spec: &StrategySpec,
    n: Option<&str>,
    dist: Option<PathBuf>,
    mc: bool,
    trials: u64,
    seed: u64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let strategy = spec.to_strategy()?;
    let prior = dist.as_deref().map(load_prior).transpose()?;
    let method = if mc { Method::MonteCarlo } else { Method::Exact };
    let mut report = EvaluationReport::new(spec.to_string(), method);

    let ns = match (&prior, n) {
        (Some(nu), _) => match nu.kind() {
            PriorKind::Geometric(_) if mc => {
                return Err(Error::UnsupportedStrategy(
                    "Monte Carlo over a geometric prior is not supported; use the exact route".into(),
                )
                .into())
            }
            PriorKind::Geometric(_) => Vec::new(),
            _ => nu.support(0.0).0.into_iter().map(|(n, _)| n).collect(),
        },
        (None, Some(list)) => parse_n_list(list)?,
        (None, None) => return Err(invalid("either --n or --dist is required").into()),
    };

    for &n in &ns {
        if mc {
            let e = simulate::estimate(&strategy, n as usize, trials, seed)?;
            report.insert(n, e.p, Some(e.stderr))?;
        } else {
            report.insert(n, exact::win_prob(&strategy, n)?, None)?;
        }
    }
    if let Some(nu) = &prior {
        if nu.is_geometric() {
            let m = exact::mixture_value(|n| exact::win_prob(&strategy, n), nu)?;
            report.mixture_value = Some(m.value);
            report.mixture_error = Some(m.error_bound);
        } else {
            report.mix_finite(nu)?;
        }
    }

    writeln!(err, "strategy {} ({})", report.strategy, if mc { "monte carlo" } else { "exact" })?;
    writeln!(out, "{}", if mc { "n,win_prob,stderr" } else { "n,win_prob" })?;
    for (n, p) in &report.per_n {
        match report.stderr.as_ref().and_then(|s| s.get(n)) {
            Some(se) => writeln!(out, "{n},{},{}", num(*p), num(*se))?,
            None => writeln!(out, "{n},{}", num(*p))?,
        }
    }
    if let Some(v) = report.mixture_value {
        match (mc, report.mixture_error) {
            (true, Some(se)) => writeln!(out, "mixture,{},{}", num(v), num(se))?,
            _ => {
                writeln!(out, "mixture,{}", num(v))?;
                if let Some(bound) = report.mixture_error {
                    writeln!(err, "mixture truncation error <= {}", num(bound))?;
                }
            }
        }
    }
    Ok(())
}

fn verdict_line(relation: Relation) -> String {
    match relation {
        Relation::Equal => "a and b are equal".into(),
        Relation::StronglyDominatesOnZ => "a strongly dominates b on Z".into(),
        r => format!("a {r} b"),
    }
}

fn cmd_compare(
    a: &StrategySpec,
    b: &StrategySpec,
    n_range: &str,
    z: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let (lo, hi) = parse_range(n_range)?;
    let z = z.map(parse_n_list).transpose()?;
    let (sa, sb): (Strategy, Strategy) = (a.to_strategy()?, b.to_strategy()?);
    let verdict = dominance::compare_range(&sa, &sb, lo, hi, z.as_deref())?;
    writeln!(out, "n,win_a,win_b,diff")?;
    for (&n, &d) in &verdict.diffs {
        let (wa, wb) = (exact::win_prob(&sa, n)?, exact::win_prob(&sb, n)?);
        writeln!(out, "{n},{},{},{}", num(wa), num(wb), num(d))?;
    }
    writeln!(err, "a = {a}")?;
    writeln!(err, "b = {b}")?;
    writeln!(err, "{}", verdict_line(verdict.relation))?;
    writeln!(err, "a better at: {}", compact(&verdict.witness_set))?;
    writeln!(err, "a worse at: {}", compact(&verdict.loss_set))?;
    let ties: Vec<u64> = verdict
        .diffs
        .keys()
        .copied()
        .filter(|n| !verdict.witness_set.contains(n) && !verdict.loss_set.contains(n))
        .collect();
    writeln!(err, "tied at: {}", compact(&ties))?;
    if let Some(asy) = verdict.asymptotic {
        writeln!(err, "limits as n grows: a -> {}, b -> {}", num(asy.limit_a), num(asy.limit_b))?;
    }
    Ok(())
}

/// `[1,2,3,7]` → `1..3,7`; `-` when empty.
fn compact(ns: &[u64]) -> String {
    if ns.is_empty() {
        return "-".into();
    }
    let mut parts = Vec::new();
    let mut i = 0;
    while i < ns.len() {
        let mut j = i;
        while j + 1 < ns.len() && ns[j + 1] == ns[j] + 1 {
            j += 1;
        }
        parts.push(if j > i { format!("{}..{}", ns[i], ns[j]) } else { ns[i].to_string() });
        i = j + 1;
    }
    parts.join(",")
}

fn cmd_minimax(steps: usize, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    if steps == 0 {
        return Err(invalid("--steps must be positive").into());
    }
    let strategy = if steps <= 3 {
        minimax::equalizer_cutoffs(steps as u32)?.strategy
    } else {
        let shift = minimax::general_right_shift(steps)?;
        let last = shift.last().expect("at least one step");
        writeln!(err, "pinned at 1/e: {}", compact(&last.active))?;
        last.strategy.clone()
    };
    let values = minimax::values(&strategy, minimax::N_MAX)?;
    let (min_i, min_w) = values
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("N_MAX > 0");

    writeln!(out, "k,a_k")?;
    for (k, a) in strategy.cutoffs().iter().enumerate() {
        writeln!(out, "{},{}", k + 1, num(*a))?;
    }
    writeln!(out, "tail,{}", num(strategy.tail()))?;
    writeln!(out)?;
    writeln!(out, "n,w_n,p_n_inv_e,w_n_3dp,p_n_inv_e_3dp")?;
    for n in minimax::TABLE_N {
        let (w, p) = (values[n as usize - 1], exact::win_prob_x(n, crate::INV_E)?);
        writeln!(out, "{n},{},{},{},{}", num(w), num(p), three(w), three(p))?;
    }
    let crossover = (1..=minimax::N_MAX)
        .find(|&n| values[n as usize - 1] > exact::win_prob_x(n, crate::INV_E).unwrap_or(1.0));
    writeln!(err, "strategy {}", StrategySpec::Cutoffs { cutoffs: strategy.cutoffs().to_vec(), tail: strategy.tail() })?;
    writeln!(err, "min w_n over n <= {}: {} at n = {}", minimax::N_MAX, num(min_w), min_i + 1)?;
    match crossover {
        Some(n) => writeln!(err, "beats the 1/e strategy starting from n = {n}")?,
        None => writeln!(err, "never beats the 1/e strategy for n <= {}", minimax::N_MAX)?,
    }
    Ok(())
}

fn cmd_dominate(u: u64, factor: f64, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let plan = dominance::build_finite_z_dominator_with(u, factor)?;
    writeln!(out, "j,n_j,cutoff,advantage_floor")?;
    for (j, c) in plan.block_cutoffs.iter().enumerate() {
        let floor = plan.advantage_floors.get(j).copied().unwrap_or(f64::NAN);
        writeln!(out, "{},{},{},{}", j + 1, plan.ladder[j], num(*c), num(floor))?;
    }
    writeln!(out)?;
    writeln!(out, "n,advantage")?;
    let n_max = 10 * u;
    for n in 1..=n_max {
        writeln!(out, "{n},{}", num(plan.advantage(n)?))?;
    }
    writeln!(err, "ladder: {}", plan.ladder.iter().map(u64::to_string).collect::<Vec<_>>().join(" > "))?;
    match plan.loss_witness(n_max)? {
        Some(n) => writeln!(err, "loses to the 1/e strategy at n = {n}")?,
        None => writeln!(err, "no loss to the 1/e strategy for n <= {n_max}")?,
    }
    Ok(())
}

fn kv(out: &mut dyn Write, key: &str, value: f64) -> io::Result<()> {
    writeln!(out, "{key},{}", num(value))
}

fn cmd_game(
    game: GameKind,
    p: Option<f64>,
    theta: Option<f64>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let example = match game {
        GameKind::Example1 => Example::Example1,
        GameKind::Example2 => Example::Example2,
        GameKind::Geometric => {
            let theta = theta.ok_or_else(|| invalid("geometric game requires --theta"))?;
            let g = games::geometric_optimal_x(theta)?;
            writeln!(out, "key,value")?;
            kv(out, "theta", g.theta)?;
            kv(out, "x", g.x)?;
            kv(out, "numeric_x", g.numeric_x)?;
            kv(out, "value", g.value)?;
            kv(out, "error_bound", g.error_bound)?;
            kv(out, "reference_value", g.reference_value)?;
            writeln!(out, "reference_applies,{}", g.reference_applies)?;
            let nu = SampleSizeDistribution::geometric(theta)?;
            let imp = improve_on_inv_e(&nu)?;
            kv(out, "inv_e_value", imp.inv_e_value)?;
            kv(out, "gain_over_inv_e", imp.gain())?;
            if !g.reference_applies {
                writeln!(err, "value (theta+1)/e is only expected for theta <= 1/(e-1)")?;
            }
            return Ok(());
        }
    };
    if theta.is_some() {
        return Err(invalid("--theta only applies to the geometric game").into());
    }
    writeln!(out, "key,value")?;
    if let Some(p) = p {
        example.prior(p)?;
        let b = example.best_b(p);
        kv(out, "p", p)?;
        kv(out, "best_b", b)?;
        kv(out, "value", example.optimal_value(p))?;
        return Ok(());
    }
    let r = saddle(example);
    kv(out, "b_star", r.b_star)?;
    kv(out, "p_star", r.p_star)?;
    kv(out, "p_star_closed_form", r.p_star_closed_form)?;
    kv(out, "value", r.value)?;
    kv(out, "threshold", r.threshold)?;
    kv(out, "equalizer_check", r.equalizer_check)?;
    kv(out, "min_increment", r.min_increment())?;
    writeln!(out, "strictly_increasing,{}", r.is_strictly_increasing())?;
    let c = games::monotonicity_counterexample(example)?;
    writeln!(err, "{c}")?;
    Ok(())
}

fn cmd_bestresponse(dist: PathBuf, grid: usize, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let nu = load_prior(&dist)?;
    let policy = games::best_response(&nu, grid)?;
    writeln!(out, "k,start,end")?;
    for k in 1..=policy.max_index() {
        for iv in policy.region(k) {
            writeln!(out, "{k},{},{}", num(iv.start), num(iv.end))?;
        }
    }
    writeln!(out)?;
    writeln!(out, "key,value")?;
    kv(out, "value", policy.value)?;
    kv(out, "coarse_value", policy.coarse_value)?;
    writeln!(out, "grid,{}", policy.grid_size)?;
    let never: Vec<u64> = (1..=policy.max_index()).filter(|&k| policy.never_accepts(k)).map(|k| k as u64).collect();
    let always: Vec<u64> = (1..=policy.max_index()).filter(|&k| policy.always_accepts(k)).map(|k| k as u64).collect();
    writeln!(err, "never accepted: {}", compact(&never))?;
    writeln!(err, "always accepted: {}", compact(&always))?;
    if policy.accuracy_warning {
        writeln!(err, "warning: value changes by more than 1e-3 between grid {} and {}", grid / 2, grid)?;
    }
    Ok(())
}

fn cmd_figure_pnx(n_list: &str, grid: usize, out: &mut dyn Write) -> CmdResult {
    if grid < 2 {
        return Err(invalid("--grid must be at least 2").into());
    }
    let ns = parse_n_list(n_list)?;
    let header: Vec<String> = ns.iter().map(|n| format!("pn_{n}")).collect();
    writeln!(out, "x,{},limit", header.join(","))?;
    for i in 0..grid {
        let x = i as f64 / (grid - 1) as f64;
        let cols = ns
            .iter()
            .map(|&n| exact::win_prob_x(n, x).map(num))
            .collect::<crate::Result<Vec<_>>>()?;
        writeln!(out, "{},{},{}", num(x), cols.join(","), num(dominance::x_log_limit(x)))?;
    }
    Ok(())
}
