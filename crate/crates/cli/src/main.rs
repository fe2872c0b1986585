//! `stablab`: validate codes, export syndrome tables, check and search
//! syndrome-extraction schedules, run Monte Carlo sweeps and fit the results.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use stabilizer_lab::code::{min_distance, DistanceVerdict};
use stabilizer_lab::codefile::{format_schedule, CodeDefinition};
use stabilizer_lab::export::{compare_golden_dir, read_csv, tables_json, write_csv, CsvRow};
use stabilizer_lab::fit::{analyze, leading_order_series, FitPoint};
use stabilizer_lab::ft::{build_lookup_table_permissive, check_fault_tolerance, identify_logical, search_schedules_with_prefix};
use stabilizer_lab::noise::{NoiseKind, NoiseModel};
use stabilizer_lab::rates::{default_shots, estimate_rates_both};
use stabilizer_lab::standard_form::standard_form;
use stabilizer_lab::trial::{Method, TrialConfig};
use stabilizer_lab::{validate, Error, ExtendedCheckMatrix, StabilizerCode};

const EXIT_CHECK: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_FIT: u8 = 4;

#[derive(Parser)]
#[command(name = "stablab", version, about = "Stabilizer code analysis and fault-tolerant syndrome extraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the code's algebraic invariants and report r, l and distance.
    Validate {
        codefile: PathBuf,
        /// Largest logical weight searched for the distance report.
        #[arg(long, default_value_t = 3)]
        max_weight: usize,
    },
    /// Write single-qubit, propagated and lookup tables as JSON.
    Tables {
        codefile: PathBuf,
        #[command(flatten)]
        schedule: ScheduleArg,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory with golden `table3.txt` and `table4.txt` to compare against.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
    /// Check a schedule for hook-error collisions.
    FtCheck {
        codefile: PathBuf,
        #[command(flatten)]
        schedule: ScheduleArg,
    },
    /// Search generator orderings for fault-tolerant schedules.
    ReorderSearch {
        codefile: PathBuf,
        /// Maximum number of schedules to print.
        #[arg(long, default_value_t = 10)]
        budget: usize,
        /// Pin the first rows to those of a named schedule.
        #[arg(long)]
        prefix_from: Option<String>,
        /// Number of rows taken from `--prefix-from`.
        #[arg(long, default_value_t = 0)]
        prefix_rows: usize,
    },
    /// Monte Carlo error rates, one CSV row per (p, method).
    Run(RunArgs),
    /// Polynomial fit and pseudo-threshold of a results CSV.
    Fit {
        csv: PathBuf,
        #[arg(long, value_enum, default_value_t = Metric::Logical)]
        metric: Metric,
        /// Highest power of p in the model.
        #[arg(long, default_value_t = 3)]
        degree: u32,
        /// Print the rate/p² series after each fit.
        #[arg(long)]
        series: bool,
    },
}

#[derive(Args)]
struct ScheduleArg {
    /// Schedule name from the code file; `natural` is always available.
    #[arg(long, default_value = "natural")]
    schedule: String,
}

#[derive(Args)]
struct RunArgs {
    codefile: PathBuf,
    #[command(flatten)]
    schedule: ScheduleArg,
    #[arg(long, default_value = "std-dep")]
    noise: String,
    /// One or more of `practical`, `modified`, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "modified")]
    method: Vec<String>,
    /// Physical error rates, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<f64>,
    /// Trials per batch; defaults to max(10^4, ceil(100/p)).
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value_t = 10)]
    batches: usize,
    #[arg(long, default_value_t = 3)]
    max_rounds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    threads: Option<usize>,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Logical,
    Total,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Definition { .. } | Error::PauliParse { .. } | Error::Io(_) => EXIT_PARSE,
            Error::Fit(_) => EXIT_FIT,
            _ => EXIT_CHECK,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: EXIT_PARSE, message: e.to_string() }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

type CmdResult = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.command {
        Command::Validate { codefile, max_weight } => cmd_validate(&codefile, max_weight),
        Command::Tables { codefile, schedule, out, golden } => {
            cmd_tables(&codefile, &schedule.schedule, out.as_deref(), golden.as_deref())
        }
        Command::FtCheck { codefile, schedule } => cmd_ft_check(&codefile, &schedule.schedule),
        Command::ReorderSearch { codefile, budget, prefix_from, prefix_rows } => {
            cmd_search(&codefile, budget, prefix_from.as_deref(), prefix_rows)
        }
        Command::Run(args) => cmd_run(&args),
        Command::Fit { csv, metric, degree, series } => cmd_fit(&csv, metric, degree, series),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(path: &Path) -> std::result::Result<(CodeDefinition, StabilizerCode), Failure> {
    let def = CodeDefinition::read(path)?;
    let report = validate(&StabilizerCode::new(def.n, def.stabilizers.clone(), vec![], vec![])?);
    if !report.is_valid() && report.failures().any(|c| !c.name.starts_with("logical")) {
        return Err(fail(EXIT_CHECK, format!("invalid code\n{report}")));
    }
    let code = def.code()?;
    Ok((def, code))
}

fn writer(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_validate(path: &Path, max_weight: usize) -> CmdResult {
    let def = CodeDefinition::read(path)?;
    // logicals are derived only once the generators themselves are sound
    let bare = StabilizerCode::new(def.n, def.stabilizers.clone(), vec![], vec![])?.with_name(def.name.clone());
    let code = match def.code() {
        Ok(code) => code,
        Err(_) => bare,
    };
    let report = validate(&code);
    print!("{report}");
    if !report.is_valid() {
        return Err(fail(EXIT_CHECK, "validation failed"));
    }
    let sf = standard_form(&ExtendedCheckMatrix::from_code(&code))?;
    println!("n = {}, k = {}, r = {}, l = {}", code.n(), code.k(), sf.r(), sf.l());
    match min_distance(&code, max_weight) {
        DistanceVerdict::Exactly(d, w) => println!("distance {d} (witness {})", w.to_sparse_string()),
        DistanceVerdict::GreaterThan(w) => println!("distance > {w}"),
    }
    Ok(())
}

fn print_report(code: &StabilizerCode, report: &stabilizer_lab::ft::FtReport) {
    if report.is_fault_tolerant() {
        println!("fault tolerant");
        return;
    }
    println!("not fault tolerant: {} violation(s)", report.violations.len());
    for v in &report.violations {
        let logical = identify_logical(code, &v.product)
            .map(|ls| ls.iter().map(|l| l.to_string()).collect::<String>())
            .map_or(String::new(), |l| format!(" (logical {l})"));
        println!("  {v}{logical}");
    }
}

fn cmd_tables(path: &Path, schedule: &str, out: Option<&Path>, golden: Option<&Path>) -> CmdResult {
    let (def, code) = load(path)?;
    let sched = def.schedule(schedule, &code)?;
    if let Some(dir) = golden {
        let bad = compare_golden_dir(&code, dir)?;
        if !bad.is_empty() {
            for m in &bad {
                eprintln!("{m}");
            }
            return Err(fail(EXIT_CHECK, format!("{} golden mismatch(es)", bad.len())));
        }
        eprintln!("golden tables match");
    }
    let report = check_fault_tolerance(&code, &sched)?;
    // without generators every error is undetectable; only the identity row remains
    if !report.is_fault_tolerant() && code.num_checks() > 0 {
        print_report(&code, &report);
        return Err(fail(EXIT_CHECK, format!("schedule {schedule:?} is not fault tolerant")));
    }
    let table = build_lookup_table_permissive(&code, &sched)?;
    let json = tables_json(&code, &sched, &table)?;
    let mut w = writer(out)?;
    serde_json::to_writer_pretty(&mut w, &json).map_err(|e| fail(EXIT_PARSE, e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn cmd_ft_check(path: &Path, schedule: &str) -> CmdResult {
    let (def, code) = load(path)?;
    let sched = def.schedule(schedule, &code)?;
    let report = check_fault_tolerance(&code, &sched)?;
    print_report(&code, &report);
    if report.is_fault_tolerant() {
        Ok(())
    } else {
        Err(fail(EXIT_CHECK, format!("schedule {schedule:?} is not fault tolerant")))
    }
}

fn cmd_search(path: &Path, budget: usize, prefix_from: Option<&str>, prefix_rows: usize) -> CmdResult {
    let (def, code) = load(path)?;
    let prefix = match prefix_from {
        Some(name) => {
            let s = def.schedule(name, &code)?;
            if prefix_rows > s.len() {
                return Err(fail(EXIT_CHECK, format!("schedule {name:?} has only {} rows", s.len())));
            }
            s.rows()[..prefix_rows].to_vec()
        }
        None => vec![],
    };
    let found = search_schedules_with_prefix(&code, &prefix, budget);
    if found.is_empty() {
        return Err(fail(EXIT_CHECK, "no fault-tolerant schedule found"));
    }
    for (i, s) in found.iter().enumerate() {
        print!("{}", format_schedule(&format!("found{}", i + 1), s));
    }
    Ok(())
}

fn cmd_run(args: &RunArgs) -> CmdResult {
    let (def, code) = load(&args.codefile)?;
    let sched = def.schedule(&args.schedule.schedule, &code)?;
    let kind: NoiseKind = args.noise.parse()?;
    let methods = args.method.iter().map(|m| m.parse::<Method>()).collect::<Result<Vec<_>, _>>()?;
    if args.p.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(fail(EXIT_CHECK, "every p must lie in [0, 1]"));
    }
    if !check_fault_tolerance(&code, &sched)?.is_fault_tolerant() {
        eprintln!("warning: schedule {:?} is not fault tolerant", args.schedule.schedule);
    }
    if let Some(t) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| fail(EXIT_CHECK, e.to_string()))?;
    }
    let mut cfg = TrialConfig::new(code, sched, methods[0], NoiseModel::noiseless(kind));
    cfg.max_detector_rounds = args.max_rounds;
    let mut rows = Vec::new();
    for &p in &args.p {
        let shots = args.shots.unwrap_or_else(|| default_shots(p));
        let (practical, modified) = estimate_rates_both(&cfg, p, shots, args.batches, args.seed)?;
        for &m in &methods {
            let pt = match m {
                Method::Practical => &practical,
                Method::Modified => &modified,
            };
            rows.push(CsvRow::from_point(pt, kind.as_str(), m.as_str()));
        }
    }
    let mut w = writer(args.out.as_deref())?;
    write_csv(&rows, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Binomial variance of a pooled rate, floored at one event.
fn pooled_variance(rate: f64, trials: f64) -> f64 {
    rate.max(1.0 / trials) * (1.0 - rate).max(1.0 / trials) / trials
}

fn cmd_fit(path: &Path, metric: Metric, degree: u32, series: bool) -> CmdResult {
    let rows = read_csv(File::open(path)?)?;
    let mut groups: Vec<((String, String), Vec<&CsvRow>)> = Vec::new();
    for r in &rows {
        let key = (r.noise.clone(), r.method.clone());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, g)) => g.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    if groups.is_empty() {
        return Err(fail(EXIT_FIT, "no rows to fit"));
    }
    let metric_name = match metric {
        Metric::Logical => "logical",
        Metric::Total => "total",
    };
    for ((noise, method), g) in &groups {
        let pick = |r: &CsvRow| match metric {
            Metric::Logical => (r.logical_mean, r.logical_min, r.logical_max),
            Metric::Total => (r.total_mean, r.total_min, r.total_max),
        };
        let pts: Vec<FitPoint> = g
            .iter()
            .filter(|r| r.p > 0.0)
            .map(|r| FitPoint::with_variance(r.p, pick(r).0, pooled_variance(pick(r).0, (r.shots * r.batches as u64) as f64)))
            .collect();
        let a = analyze(&pts, degree)?;
        println!("{noise} {method} {metric_name}");
        let coeffs: Vec<String> = a
            .fit
            .coefficients
            .iter()
            .zip(&a.fit.std_errors)
            .enumerate()
            .map(|(i, (c, se))| format!("a{i} = {c:.6e} ± {se:.2e}"))
            .collect();
        println!("  fit: {}", coeffs.join(", "));
        if let Some(lf) = &a.linear_fit {
            if let Some((a1, se)) = lf.linear() {
                let tag = if a.linear_floor { " (significant)" } else { "" };
                println!("  linear term: {a1:.6e} ± {se:.2e}{tag}");
            }
        }
        match a.fit.leading_order() {
            Some(a0) => println!("  leading order: {a0:.6e}"),
            None => println!("  leading order: none"),
        }
        match a.pseudo_threshold {
            Some(t) => println!("  pseudo-threshold: {t:.6e}"),
            None => println!("  pseudo-threshold: none"),
        }
        if series {
            let raw: Vec<(f64, f64, f64, f64)> = g
                .iter()
                .map(|r| {
                    let (m, lo, hi) = pick(r);
                    (r.p, m, lo, hi)
                })
                .collect();
            println!("  p,rate_over_p2,low,high");
            for s in leading_order_series(&raw) {
                println!("  {},{},{},{}", s.p, s.value, s.low, s.high);
            }
        }
    }
    Ok(())
}
