use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use num_bigint::BigInt;
use serde_json::{json, Value};

use gcdseq_core::dynamics::{self, ClassAccumulator, TransienceOutcome};
use gcdseq_core::factor::set_rho_seed;
use gcdseq_core::recurrence::{evolve, State};
use gcdseq_core::shortcut::Shortcut;
use gcdseq_core::{Error as CoreError, Int};

use crate::args::{parse_big, Analysis, AnalyzeArgs, Cli, Command, Global, Integers, Mode, PlotKind};
use crate::render::{format_ratio, Format, RowWriter};

/// Invalid flags or values; exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// A proven bound failed to hold; exit status 4.
#[derive(Debug)]
pub struct TheoremViolation(pub String);

impl fmt::Display for TheoremViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "theorem violation: {}", self.0)
    }
}

impl std::error::Error for TheoremViolation {}

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_OVERFLOW: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return EXIT_CONFIG;
    }
    if err.downcast_ref::<TheoremViolation>().is_some() {
        return EXIT_VIOLATION;
    }
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::Overflow(_)) => EXIT_OVERFLOW,
        Some(CoreError::Precondition(_)) | Some(CoreError::NoNontrivialGcd { .. }) => EXIT_CONFIG,
        _ => 1,
    }
}

fn config(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// Everything a run needs, validated.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: State<BigInt>,
    pub n_max: Option<BigInt>,
    pub events: Option<u64>,
    pub mode: Mode,
    pub format: Format,
    pub integers: Integers,
    pub exact: bool,
    pub workers: usize,
}

impl RunConfig {
    pub fn from_global(g: &Global) -> Result<Self> {
        let a = parse_big(&g.seed_a).map_err(config)?;
        let seed = State::new(BigInt::from(g.seed_n), a).map_err(|e| config(e.to_string()))?;
        let n_max = g.n_max.as_deref().map(parse_big).transpose().map_err(config)?;
        if let Some(n_max) = &n_max {
            if n_max < &seed.n {
                return Err(config(format!("--n-max {n_max} lies before the seed index {}", seed.n)));
            }
        }
        let workers = match g.workers {
            Some(0) => return Err(config("--workers must be at least 1")),
            Some(w) => w,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        Ok(RunConfig {
            seed,
            n_max,
            events: g.events,
            mode: g.mode,
            format: g.format,
            integers: g.integers,
            exact: g.exact,
            workers,
        })
    }

    fn seed_as<T: Int>(&self) -> Result<State<T>> {
        let n = T::from_bigint(&self.seed.n).ok_or_else(CoreError::overflow)?;
        let a = T::from_bigint(&self.seed.a).ok_or_else(CoreError::overflow)?;
        Ok(State { n, a })
    }

    fn n_max_as<T: Int>(&self) -> Result<Option<T>> {
        self.n_max
            .as_ref()
            .map(|v| T::from_bigint(v).ok_or_else(|| CoreError::overflow().into()))
            .transpose()
    }

    fn require_n_max<T: Int>(&self, command: &str) -> Result<T> {
        self.n_max_as()?
            .ok_or_else(|| config(format!("{command} needs --n-max")))
    }

    fn ratio<T: Int>(&self, a: &T, n: &T) -> String {
        let (a, n) = (a.to_bigint(), n.to_bigint());
        if self.exact {
            let r = num_rational::BigRational::new(a, n);
            if r.is_integer() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        } else {
            format_ratio(&a, &n, 6)
        }
    }
}

/// Runs the parsed command line, writing results to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let cfg = RunConfig::from_global(&cli.global)?;
    if let Some(seed) = cli.global.rho_seed {
        set_rho_seed(seed);
    }
    if cfg.format == Format::Json && !matches!(cli.command, Command::Analyze(_)) {
        return Err(config("--format json is only available for analyze"));
    }
    // the global pool can be sized once per process; later runs reuse it
    let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build_global();
    match cfg.integers {
        Integers::Fixed => dispatch::<i128>(&cfg, &cli.command, out),
        Integers::Unbounded => dispatch::<BigInt>(&cfg, &cli.command, out),
    }
}

fn dispatch<T: Int>(cfg: &RunConfig, command: &Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Evolve => cmd_evolve::<T>(cfg, out),
        Command::Primes => cmd_primes::<T>(cfg, out),
        Command::Diffs { count } => cmd_diffs::<T>(cfg, *count, out),
        Command::Plotdata { kind } => cmd_plotdata::<T>(cfg, *kind, out),
        Command::Analyze(args) => cmd_analyze::<T>(cfg, args, out),
    }
}

fn cmd_evolve<T: Int>(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let s0 = cfg.seed_as::<T>()?;
    let n_max = cfg.require_n_max::<T>("evolve")?;
    let mut w = RowWriter::new(out, cfg.format, vec!["n", "delta", "g", "a", "ratio"], (0, 3));
    match cfg.mode {
        Mode::Naive => {
            // the seed row has no Δ or g; an empty horizon prints the header only
            if n_max > s0.n {
                let ratio = cfg.ratio(&s0.a, &s0.n);
                w.row(&[s0.n.to_string(), "-".into(), "-".into(), s0.a.to_string(), ratio])?;
            }
            for rec in evolve(&s0, n_max.clone())? {
                let r = rec?;
                let ratio = cfg.ratio(&r.a, &r.n);
                w.row(&[r.n.to_string(), r.delta.to_string(), r.g.to_string(), r.a.to_string(), ratio])?;
            }
        }
        Mode::Shortcut => {
            for e in Shortcut::new(s0).until(n_max) {
                let e = e?;
                let ratio = cfg.ratio(&e.a, &e.n);
                w.row(&[e.n.to_string(), e.delta.to_string(), e.g.to_string(), e.a.to_string(), ratio])?;
            }
        }
    }
    w.finish()?;
    Ok(())
}

/// Events `(n, g)` in order, by either method, until `events` have been
/// produced or the next one would pass `n_max`.
fn for_each_event<T: Int>(
    cfg: &RunConfig,
    events: Option<u64>,
    mut visit: impl FnMut(u64, &T, &T) -> Result<()>,
) -> Result<()> {
    let s0 = cfg.seed_as::<T>()?;
    let n_max = cfg.n_max_as::<T>()?;
    let limit = events.unwrap_or(u64::MAX);
    if limit == 0 {
        return Ok(());
    }
    let mut count = 0u64;
    match cfg.mode {
        Mode::Shortcut => {
            let mut stream = Shortcut::new(s0);
            if let Some(n_max) = n_max {
                stream = stream.until(n_max);
            }
            for e in stream {
                let e = e?;
                count += 1;
                visit(count, &e.n, &e.g)?;
                if count == limit {
                    break;
                }
            }
        }
        Mode::Naive => {
            let mut s = s0;
            loop {
                if n_max.as_ref().is_some_and(|m| &s.n >= m) {
                    break;
                }
                // |a - n - 1| = 1 means consecutive coprime values forever
                let d = s.next_delta()?;
                if d.abs().is_one() && n_max.is_none() {
                    break;
                }
                let r = gcdseq_core::step(&s).map_err(|e| e.at_index(&s.n))?;
                if !r.g.is_one() {
                    count += 1;
                    visit(count, &r.n, &r.g)?;
                    if count == limit {
                        break;
                    }
                }
                s = r.state();
            }
        }
    }
    Ok(())
}

fn cmd_primes<T: Int>(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let events = match (cfg.events, &cfg.n_max) {
        (Some(k), _) => Some(k),
        (None, Some(_)) => None,
        (None, None) => Some(20),
    };
    let mut w = RowWriter::new(out, cfg.format, vec!["i", "n", "g"], (0, 2));
    for_each_event::<T>(cfg, events, |i, n, g| {
        w.row(&[i.to_string(), n.to_string(), g.to_string()])?;
        Ok(())
    })?;
    w.finish()?;
    Ok(())
}

fn cmd_diffs<T: Int>(cfg: &RunConfig, count: u64, out: &mut dyn Write) -> Result<()> {
    let s0 = cfg.seed_as::<T>()?;
    let mut w = RowWriter::new(out, cfg.format, vec!["n", "g"], (0, 1));
    let mut s = s0;
    for _ in 0..count {
        let r = gcdseq_core::step(&s).map_err(|e| e.at_index(&s.n))?;
        w.row(&[r.n.to_string(), r.g.to_string()])?;
        s = r.state();
    }
    w.finish()?;
    Ok(())
}

fn cmd_plotdata<T: Int>(cfg: &RunConfig, kind: PlotKind, out: &mut dyn Write) -> Result<()> {
    let format = if cfg.format == Format::Bfile { Format::Bfile } else { Format::Csv };
    match kind {
        PlotKind::Clusters => {
            if cfg.n_max.is_none() && cfg.events.is_none() {
                return Err(config("plotdata clusters needs --n-max or --events"));
            }
            let mut w = RowWriter::new(out, format, vec!["j", "n"], (0, 1));
            for_each_event::<T>(cfg, cfg.events, |j, n, _| {
                w.row(&[j.to_string(), n.to_string()])?;
                Ok(())
            })?;
            w.finish()?;
        }
        PlotKind::Ratio => {
            let s0 = cfg.seed_as::<T>()?;
            let n_max = cfg.require_n_max::<T>("plotdata ratio")?;
            let mut w = RowWriter::new(out, format, vec!["n", "ratio"], (0, 1));
            w.row(&[s0.n.to_string(), cfg.ratio(&s0.a, &s0.n)])?;
            for rec in evolve(&s0, n_max)? {
                let r = rec?;
                w.row(&[r.n.to_string(), cfg.ratio(&r.a, &r.n)])?;
            }
            w.finish()?;
        }
    }
    Ok(())
}

fn analysis_format(cfg: &RunConfig) -> Result<bool> {
    match cfg.format {
        Format::Table => Ok(false),
        Format::Json => Ok(true),
        Format::Csv | Format::Bfile => Err(config("analyze writes --format table or json")),
    }
}

fn state_json<T: Int>(s: &State<T>) -> Value {
    json!({ "n": s.n.to_string(), "a": s.a.to_string() })
}

fn cmd_analyze<T: Int>(cfg: &RunConfig, args: &AnalyzeArgs, out: &mut dyn Write) -> Result<()> {
    let as_json = analysis_format(cfg)?;
    match args.analysis {
        Analysis::Transience => analyze_transience::<T>(cfg, args, as_json, out),
        Analysis::Coverage => analyze_coverage::<T>(cfg, args, as_json, out),
        Analysis::Classes => analyze_classes(args, as_json, out),
        Analysis::Persistence => analyze_persistence(args, as_json, out),
        Analysis::Bounds => analyze_bounds::<T>(cfg, args, as_json, out),
    }
}

fn analyze_transience<T: Int>(cfg: &RunConfig, args: &AnalyzeArgs, as_json: bool, out: &mut dyn Write) -> Result<()> {
    let seed = cfg.seed_as::<T>()?;
    let report = dynamics::transience_check(&seed, args.budget)?;
    let outcome = match report.outcome {
        TransienceOutcome::EnteredLemmaRegime { ratio } => format!("entered-lemma-regime (ratio {ratio})"),
        TransienceOutcome::FixedOnes => "fixed-ones".into(),
        TransienceOutcome::BudgetExhausted => "budget-exhausted".into(),
    };
    if as_json {
        let v = json!({
            "analysis": "transience",
            "seed": state_json(&report.seed),
            "outcome": outcome,
            "threshold": report.threshold.to_string(),
            "events_examined": report.events_examined,
            "regime_entry": report.regime_entry.as_ref().map(state_json),
            "non_prime_events": report.non_prime_events.iter()
                .map(|(n, g)| json!({ "n": n.to_string(), "g": g.to_string() }))
                .collect::<Vec<_>>(),
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        return Ok(());
    }
    writeln!(out, "seed              {}", report.seed)?;
    writeln!(out, "outcome           {outcome}")?;
    if let Some(entry) = &report.regime_entry {
        writeln!(out, "regime entry      {entry}")?;
    }
    writeln!(out, "events examined   {}", report.events_examined)?;
    writeln!(out, "threshold N       {}", report.threshold)?;
    writeln!(out, "composite events  {}", report.non_prime_events.len())?;
    for (n, g) in &report.non_prime_events {
        writeln!(out, "  g({n}) = {g}")?;
    }
    Ok(())
}

fn analyze_coverage<T: Int>(cfg: &RunConfig, args: &AnalyzeArgs, as_json: bool, out: &mut dyn Write) -> Result<()> {
    let seed = cfg.seed_as::<T>()?;
    let events = cfg.events.unwrap_or(10_000);
    let started = std::time::Instant::now();
    let report = dynamics::prime_coverage_with(&seed, events, |i, e| {
        if args.progress && (i % 100 == 0 || i == events) {
            eprintln!(
                "event {i}: n has {} digits, g = {} ({:.1}s)",
                e.n.to_string().len(),
                e.g,
                started.elapsed().as_secs_f64()
            );
        }
    })?;
    let distinct = report.counts.len();
    if as_json {
        let v = json!({
            "analysis": "coverage",
            "seed": state_json(&report.seed),
            "events": report.events,
            "smallest_absent_odd_prime": report.smallest_absent_odd_prime.to_string(),
            "distinct_primes": distinct,
            "composite_events": report.composite_events,
            "counts": report.counts.iter()
                .map(|(p, c)| json!([p.to_string(), c]))
                .collect::<Vec<_>>(),
            "last": state_json(&report.last),
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        return Ok(());
    }
    writeln!(out, "seed                       {}", report.seed)?;
    writeln!(out, "events                     {}", report.events)?;
    writeln!(out, "distinct primes            {distinct}")?;
    writeln!(out, "composite events           {}", report.composite_events)?;
    writeln!(out, "smallest absent odd prime  {}", report.smallest_absent_odd_prime)?;
    writeln!(out, "final index digits         {}", report.last.n.to_string().len())?;
    Ok(())
}

fn load_checkpoint(path: &Path, range: (u64, u64), n_limit: i128) -> Result<Option<ClassAccumulator>> {
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let acc: ClassAccumulator =
        serde_json::from_str(&text).with_context(|| format!("parsing checkpoint {}", path.display()))?;
    if acc.seed_range != range || acc.n_limit != n_limit {
        return Err(config(format!(
            "checkpoint {} is for seeds {:?} and n_limit {}, not {:?} and {}",
            path.display(),
            acc.seed_range,
            acc.n_limit,
            range,
            n_limit
        )));
    }
    Ok(Some(acc))
}

fn save_checkpoint(path: &Path, acc: &ClassAccumulator) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, serde_json::to_vec(acc)?).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("replacing {}", path.display()))?;
    Ok(())
}

fn analyze_classes(args: &AnalyzeArgs, as_json: bool, out: &mut dyn Write) -> Result<()> {
    let range = args.seed_range.clone().unwrap_or(4..=8192);
    let n_limit = match &args.n_limit {
        Some(s) => parse_big(s).map_err(config)?,
        None => BigInt::from(1u64 << 23),
    };
    let n_limit = i128::try_from(&n_limit).map_err(|_| CoreError::overflow())?;
    let mut acc = match &args.checkpoint {
        Some(path) => load_checkpoint(path, (*range.start(), *range.end()), n_limit)?,
        None => None,
    }
    .map_or_else(|| ClassAccumulator::new(range.clone(), n_limit), Ok)?;
    const SAVE_EVERY: u64 = 512;
    while !acc.is_done() {
        acc.advance(SAVE_EVERY)?;
        if let Some(path) = &args.checkpoint {
            save_checkpoint(path, &acc)?;
        }
        if args.progress {
            eprintln!("seeds absorbed through {}", acc.next - 1);
        }
    }
    let report = acc.report();
    if as_json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
        return Ok(());
    }
    writeln!(out, "seed range  {}..{}", report.seed_range.0, report.seed_range.1)?;
    writeln!(out, "n limit     {}", report.n_limit)?;
    writeln!(out, "classes     {}", report.classes.len())?;
    writeln!(out, "{:>14}  {:>8}  {:>14}", "representative", "members", "latest merge")?;
    for c in &report.classes {
        let merge = c.merges.last().map_or("-".to_string(), |m| m.state.to_string());
        writeln!(out, "{:>14}  {:>8}  {:>14}", c.representative, c.members.len(), merge)?;
    }
    Ok(())
}

fn analyze_persistence(args: &AnalyzeArgs, as_json: bool, out: &mut dyn Write) -> Result<()> {
    let r_lo = u32::try_from(*args.r_range.start()).map_err(|e| config(e.to_string()))?;
    let r_hi = u32::try_from(*args.r_range.end()).map_err(|e| config(e.to_string()))?;
    let mut records = dynamics::scan_persistence(args.n1_range.clone(), r_lo..=r_hi)?;
    let unsettled = records.iter().filter(|r| !r.settled).count();
    records.sort_by(|x, y| {
        y.occurrences
            .cmp(&x.occurrences)
            .then(x.r.cmp(&y.r))
            .then(x.n1.cmp(&y.n1))
    });
    let top: Vec<_> = records.iter().take(20).collect();
    if as_json {
        let v = json!({
            "analysis": "persistence",
            "seeds": records.len(),
            "unsettled": unsettled,
            "top": top,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        return Ok(());
    }
    writeln!(out, "seeds scanned  {}", records.len())?;
    writeln!(out, "unsettled      {unsettled}")?;
    writeln!(out, "{:>8}  {:>4}  {:>11}  {:>10}", "n1", "r", "recurrences", "last n")?;
    for r in top {
        writeln!(out, "{:>8}  {:>4}  {:>11}  {:>10}", r.n1, r.r, r.recurrences(), r.last_index)?;
    }
    Ok(())
}

fn analyze_bounds<T: Int>(cfg: &RunConfig, args: &AnalyzeArgs, as_json: bool, out: &mut dyn Write) -> Result<()> {
    let n_max: T = cfg.n_max_as()?.unwrap_or_else(|| T::small(10_000));
    let seeds: Vec<State<T>> = match &args.seed_range {
        Some(range) => range
            .clone()
            .map(|a| State::seed(T::small(a)))
            .collect::<Result<_, _>>()?,
        None => vec![cfg.seed_as()?],
    };
    let mut violations = Vec::new();
    let mut rows = Vec::new();
    for seed in &seeds {
        let horizon = if n_max > seed.n { n_max.clone() } else { seed.n.clone() };
        let ceiling = dynamics::check_ceiling_bound(seed, horizon.clone())?;
        if let Some(v) = &ceiling.violation {
            violations.push(format!("ceiling bound {} fails at {v} from {seed}", ceiling.bound));
        }
        let two_n = seed.n.clone() * T::small(2);
        let lower = if seed.a > two_n.clone() + T::one() {
            let r = dynamics::check_lower_bound(seed, horizon)?;
            if let Some(v) = &r.violation {
                violations.push(format!("ratio fell to 2 or below at {v} from {seed}"));
            }
            Some(r.holds())
        } else {
            None
        };
        let crossing = if seed.a == two_n + T::one() {
            let c = dynamics::check_crossing(seed.n.clone())?;
            if !c.holds {
                violations.push(format!("crossing from {} reached {} instead of ratio 2", c.from, c.to));
            }
            Some(c.holds)
        } else {
            None
        };
        rows.push((seed.clone(), ceiling.bound.clone(), ceiling.holds(), lower, crossing));
    }
    let show = |b: Option<bool>| b.map_or("n/a", |ok| if ok { "ok" } else { "VIOLATED" });
    if as_json {
        let v = json!({
            "analysis": "bounds",
            "n_max": n_max.to_string(),
            "seeds": rows.iter().map(|(s, c, ok, lo, cr)| json!({
                "seed": state_json(s),
                "ceiling": c.to_string(),
                "ceiling_holds": ok,
                "lower_bound_holds": lo,
                "crossing_holds": cr,
            })).collect::<Vec<_>>(),
            "violations": violations,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
    } else {
        writeln!(out, "checked to n = {n_max}")?;
        for (s, c, ok, lo, cr) in &rows {
            writeln!(
                out,
                "{s}: ceiling {c} {}, lower bound {}, crossing {}",
                show(Some(*ok)),
                show(*lo),
                show(*cr)
            )?;
        }
    }
    if !violations.is_empty() {
        return Err(TheoremViolation(violations.join("; ")).into());
    }
    Ok(())
}
