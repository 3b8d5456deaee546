use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use randhs_cli::config::{parse_grid, ExperimentConfig};
use randhs_cli::{
    conjecture_probe, emit_plot_data, gap_report, run_sweep, write_records, CliError, Result,
};
use randhs_core::greedy::DEFAULT_EPSILON;
use randhs_core::ip::DEFAULT_NODE_LIMIT;
use randhs_core::lp::DEFAULT_C_TILDE;
use randhs_core::theory::{self, DmaxFormula, PmfBoundVariant};
use randhs_core::{
    assumption_check, block_greedy, block_greedy_best_of, build_schedule, classify_regime,
    expected_zk_log, first_moment_thresholds, generate, greedy, lp_lower_bound,
    solve_ip_bruteforce, solve_ip_exact_with, solve_lp_with, trivial_cover, uniform_upper_bound,
    CoverSolution, HsError, HsInstance, IpOptions, LpOptions, LpStatus, RegimeThresholds,
};

#[derive(Parser)]
#[command(name = "randhs", version, about = "Random hitting set experiments")]
struct Cli {
    /// Base seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Key-value config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    parallelism: Option<usize>,
    /// Lift the LP size guard and the exact-IP size cutoff.
    #[arg(long, global = true)]
    force_large: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw a random instance and write it in the text format.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: f64,
    },
    /// Solve one instance file.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "greedy")]
        solver: SolverKind,
        /// Copies for best_of.
        #[arg(long, default_value_t = 32)]
        j: usize,
        #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
        node_limit: usize,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        /// Print the picked columns with their gains.
        #[arg(long)]
        trace: bool,
    },
    /// Run a parameter sweep and write the records as CSV.
    Sweep(SweepArgs),
    /// Per-point gap medians and IQRs of a sweep CSV.
    Report {
        records: PathBuf,
        /// Print CSV instead of an aligned table.
        #[arg(long)]
        csv: bool,
    },
    /// Write `b d gap` plot data and the `mp = log n` separatrix.
    Plotdata { records: PathBuf },
    /// Ratio trend along an increasing n ladder.
    Conjecture(ConjectureArgs),
    /// Evaluate an analytic formula.
    Theory(TheoryArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverKind {
    Greedy,
    BlockGreedy,
    BestOf,
    Trivial,
    Lp,
    LpBounds,
    IpExact,
    IpBruteforce,
}

#[derive(Args)]
struct SweepArgs {
    /// Grid points `n:m_spec:p_spec`, `;`-separated; repeatable.
    #[arg(long)]
    grid: Vec<String>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated solver list.
    #[arg(long)]
    solvers: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Fill the runtime columns.
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct ConjectureArgs {
    #[arg(long)]
    regime: Option<String>,
    /// Comma-separated increasing list of n.
    #[arg(long)]
    ladder: Option<String>,
    #[arg(long)]
    ladder_m: Option<String>,
    #[arg(long)]
    ladder_p: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    solvers: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Formula {
    LambertW0,
    LambertBracket,
    #[value(name = "g-n")]
    GN,
    DmaxEstimate,
    Chernoff,
    BinomPmf,
    BinomTail,
    PmfLowerBound,
    SparseTarget,
    Monotonicity,
    ExpectedZk,
    FirstMoment,
    Regime,
    Assumptions,
    Schedule,
}

#[derive(Args)]
struct TheoryArgs {
    #[arg(value_enum)]
    formula: Formula,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    r: Option<u64>,
    #[arg(long)]
    mu: Option<f64>,
    /// Deviation for chernoff, exponent for first-moment and assumptions.
    #[arg(long)]
    delta: Option<f64>,
    /// Constant D of the first-moment threshold.
    #[arg(long, default_value_t = 1.0)]
    d: f64,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// Constant c > 1 of the small-b pmf bound; the large-b form is used when absent.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Force the sparse (`g_n`) or dense (`mp`) dmax formula.
    #[arg(long)]
    dmax_formula: Option<String>,
}

fn need<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| CliError::config(format!("--{name} is required")))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn base_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.base_seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.output_path = Some(o.clone());
    }
    if let Some(k) = cli.parallelism {
        cfg.parallelism = k;
    }
    if cli.force_large {
        cfg.force_large = true;
    }
    Ok(cfg)
}

fn print_cover(out: &mut dyn Write, sol: &CoverSolution, trace: bool) -> Result<()> {
    writeln!(out, "value {}", sol.value)?;
    if sol.used_trivial_fallback {
        writeln!(out, "trivial_fallback true")?;
    }
    if trace {
        writeln!(out, "step column gain covered")?;
        for (t, ((j, g), c)) in sol.chosen.iter().zip(&sol.gains).zip(&sol.covered_after).enumerate() {
            writeln!(out, "{} {j} {g} {c}", t + 1)?;
        }
    }
    Ok(())
}

fn solve(cli: &Cli, cmd: &Cmd) -> Result<()> {
    let Cmd::Solve {
        instance,
        solver,
        j,
        node_limit,
        epsilon,
        trace,
    } = cmd
    else {
        unreachable!()
    };
    let inst = HsInstance::load(instance)?;
    let mut out = output(cli.out.as_deref())?;
    let p = inst.gen_meta().map_or(inst.density(), |g| g.p);
    let seed = cli.seed.unwrap_or(0);
    match solver {
        SolverKind::Greedy => print_cover(&mut out, &greedy(&inst)?, *trace)?,
        SolverKind::Trivial => print_cover(&mut out, &trivial_cover(&inst)?, *trace)?,
        SolverKind::BlockGreedy | SolverKind::BestOf => {
            let sched = build_schedule(inst.n(), inst.m(), p, *epsilon, None)?;
            let sol = match solver {
                SolverKind::BestOf => block_greedy_best_of(&inst, &sched, *j, seed)?,
                _ => block_greedy(&inst, &sched, seed)?,
            };
            writeln!(out, "k_blocks {}", sched.k_blocks)?;
            print_cover(&mut out, &sol, *trace)?;
        }
        SolverKind::Lp => {
            let opts = LpOptions {
                allow_large: cli.force_large,
                ..LpOptions::default()
            };
            let sol = solve_lp_with(&inst, &opts)?;
            match sol.status {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => {
                    return Err(HsError::Infeasible {
                        row: inst.empty_row().unwrap_or(0),
                    }
                    .into())
                }
                LpStatus::IterationLimit => {
                    return Err(CliError::Core(HsError::Degenerate("LP iteration limit reached")))
                }
            }
            writeln!(out, "value {}", sol.value)?;
            writeln!(out, "iterations {}", sol.iterations)?;
            if *trace {
                writeln!(out, "column x")?;
                for (j, x) in sol.x.iter().enumerate().filter(|(_, &x)| x > 0.0) {
                    writeln!(out, "{j} {x}")?;
                }
            }
        }
        SolverKind::LpBounds => {
            writeln!(out, "lp_lb {}", lp_lower_bound(&inst)?)?;
            match uniform_upper_bound(&inst, Some(p), DEFAULT_C_TILDE)? {
                Some(ub) => writeln!(out, "lp_ub_uniform {ub}")?,
                None => writeln!(out, "lp_ub_uniform infeasible")?,
            }
        }
        SolverKind::IpExact | SolverKind::IpBruteforce => {
            let ip = match solver {
                SolverKind::IpExact => solve_ip_exact_with(
                    &inst,
                    &IpOptions {
                        node_limit: *node_limit,
                        node_lp: false,
                    },
                )?,
                _ => solve_ip_bruteforce(&inst)?,
            };
            writeln!(out, "optimal {}", ip.optimal)?;
            writeln!(out, "nodes {}", ip.nodes_explored)?;
            print_cover(&mut out, &ip.solution, *trace)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn sweep(cli: &Cli, args: &SweepArgs) -> Result<()> {
    let mut cfg = base_config(cli)?;
    if !args.grid.is_empty() {
        cfg.grid = args.grid.iter().map(|g| parse_grid(g)).collect::<Result<Vec<_>>>()?.concat();
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = &args.solvers {
        cfg.solvers = s.parse()?;
    }
    if let Some(e) = args.epsilon {
        cfg.schedule_epsilon = e;
    }
    if args.timings {
        cfg.timings = true;
    }
    let records = run_sweep(&cfg)?;
    write_records(output(cfg.output_path.as_deref())?, &records)
}

fn conjecture(cli: &Cli, args: &ConjectureArgs) -> Result<()> {
    let mut cfg = base_config(cli)?;
    let overrides = [
        ("conjecture", &args.regime),
        ("ladder", &args.ladder),
        ("ladder_m", &args.ladder_m),
        ("ladder_p", &args.ladder_p),
        ("solvers", &args.solvers),
    ];
    for (key, v) in overrides {
        if let Some(v) = v {
            cfg.set(key, v)?;
        }
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    let table = conjecture_probe(&cfg)?;
    let mut out = output(cfg.output_path.as_deref())?;
    out.write_all(table.to_text().as_bytes())?;
    out.flush()?;
    Ok(())
}

fn theory_cmd(cli: &Cli, a: &TheoryArgs) -> Result<()> {
    let th = RegimeThresholds::default();
    let mut out = output(cli.out.as_deref())?;
    let n = || need(a.n, "n");
    let m = || need(a.m, "m");
    let p = || need(a.p, "p");
    match a.formula {
        Formula::LambertW0 => writeln!(out, "{}", theory::lambert_w0(need(a.x, "x")?)?)?,
        Formula::LambertBracket => match theory::lambert_w0_bracket(need(a.x, "x")?) {
            Some((lo, hi)) => writeln!(out, "{lo} {hi}")?,
            None => return Err(HsError::Domain("bracket needs x >= e".into()).into()),
        },
        Formula::GN => writeln!(out, "{}", theory::g_n(n()?, m()?, p()?)?)?,
        Formula::DmaxEstimate => {
            let est = match a.dmax_formula.as_deref() {
                None => theory::expected_dmax_estimate(n()?, m()?, p()?, &th)?,
                Some("sparse") => theory::expected_dmax_with(n()?, m()?, p()?, &th, DmaxFormula::GnSparse)?,
                Some("dense") => theory::expected_dmax_with(n()?, m()?, p()?, &th, DmaxFormula::MpDense)?,
                Some(f) => return Err(CliError::config(format!("unknown dmax formula {f:?}"))),
            };
            writeln!(out, "value {}", est.value)?;
            writeln!(out, "formula {:?}", est.formula_used)?;
            writeln!(out, "regime {}", est.regime.regime)?;
        }
        Formula::Chernoff => writeln!(
            out,
            "{}",
            theory::chernoff_upper_tail(need(a.mu, "mu")?, need(a.delta, "delta")?)?
        )?,
        Formula::BinomPmf => writeln!(out, "{}", theory::binom_pmf_log(m()? as u64, p()?, need(a.r, "r")?)?)?,
        Formula::BinomTail => writeln!(out, "{}", theory::binom_upper_tail(m()? as u64, p()?, need(a.r, "r")?)?)?,
        Formula::PmfLowerBound => {
            let variant = match a.c {
                Some(c) => PmfBoundVariant::SmallB { c },
                None => PmfBoundVariant::LargeB,
            };
            writeln!(
                out,
                "{}",
                theory::binom_pmf_lower_bound_log(need(a.a, "a")?, need(a.b, "b")?, p()?, variant)?
            )?
        }
        Formula::SparseTarget => {
            let t = theory::sparse_target_degree(n()?, m()?, p()?, a.epsilon)?;
            writeln!(out, "degree {}", t.degree)?;
            writeln!(out, "log_pmf {}", t.log_pmf)?;
        }
        Formula::Monotonicity => {
            let (step, shrink) = theory::binomial_monotonicity_check(m()? as u64, p()?, need(a.r, "r")?)?;
            writeln!(out, "{step} {shrink}")?;
        }
        Formula::ExpectedZk => writeln!(out, "{}", expected_zk_log(n()?, m()?, p()?, need(a.k, "k")?)?)?,
        Formula::FirstMoment => {
            let r = first_moment_thresholds(n()?, m()?, p()?, a.d, a.delta.unwrap_or(0.5))?;
            writeln!(out, "k_star_lower {}", r.k_star_lower)?;
            writeln!(out, "k_star_upper {}", r.k_star_upper)?;
            writeln!(out, "k {}", r.k)?;
            writeln!(out, "log_expected_zk {}", r.log_expected_zk)?;
            writeln!(out, "w0_bracket_applies {}", r.w0_bracket_applies)?;
        }
        Formula::Regime => {
            let l = classify_regime(n()?, m()?, p()?, &th)?;
            writeln!(out, "{} ratio {} polydense {}", l.regime, l.ratio, l.polydense)?;
        }
        Formula::Assumptions => {
            let rep = assumption_check(n()?, m()?, p()?, a.delta.unwrap_or(0.5), None);
            for c in rep.clauses {
                let s = c.satisfied.map_or("unknown".to_owned(), |s| s.to_string());
                writeln!(out, "{} {s} ({})", c.clause, c.detail)?;
            }
        }
        Formula::Schedule => {
            let s = build_schedule(n()?, m()?, p()?, a.epsilon, None)?;
            writeln!(out, "case {:?}", s.case)?;
            writeln!(out, "k_blocks {}", s.k_blocks)?;
            writeln!(out, "overflowed {}", s.overflowed)?;
            let f: Vec<String> = s.f.iter().map(ToString::to_string).collect();
            writeln!(out, "f {}", f.join(" "))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.cmd {
        Cmd::Gen { n, m, p } => {
            let inst = generate(*n, *m, *p, cli.seed.unwrap_or(0))?;
            let mut out = output(cli.out.as_deref())?;
            out.write_all(inst.to_text().as_bytes())?;
            out.flush()?;
            Ok(())
        }
        cmd @ Cmd::Solve { .. } => solve(cli, cmd),
        Cmd::Sweep(args) => sweep(cli, args),
        Cmd::Report { records, csv } => {
            let summary = gap_report(records)?;
            let mut out = output(cli.out.as_deref())?;
            if *csv {
                summary.write_csv(&mut out)?;
            } else {
                out.write_all(summary.to_text().as_bytes())?;
            }
            out.flush()?;
            Ok(())
        }
        Cmd::Plotdata { records } => {
            let out = need(cli.out.clone(), "out")?;
            for path in emit_plot_data(records, &out)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        Cmd::Conjecture(args) => conjecture(cli, args),
        Cmd::Theory(args) => theory_cmd(cli, args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("randhs: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
