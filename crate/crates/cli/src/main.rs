//! `hetpipe`: schedule task chains on big/little multicores, check schedules
//! against the exhaustive oracle, simulate them and run the sweeps.

/// `println!` that reports write errors, so a closed pipe ends the run cleanly.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        writeln!(std::io::stdout(), $($arg)*)?
    }};
}

mod load;

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use hetpipe::harness::{
    run_slowdown_study, run_time_profile, write_records, ExperimentConfig, ProfilePoint, TimingRow,
};
use hetpipe::oracle::{brute_force_with, OracleConfig, Order};
use hetpipe::pinning::{pin, Policy};
use hetpipe::sim::{buffer_plan, simulate, SimConfig};
use hetpipe::synth::{generate, CorpusManifest, GenSpec};
use hetpipe::twocatac::DEFAULT_MAX_EXPANSIONS;
use hetpipe::weight::rational_to_f64;
use hetpipe::{fixtures, Error, Result, SolutionDoc, Strategy};

#[derive(Parser)]
#[command(
    name = "hetpipe",
    version,
    about = "Pipelined, replicated schedules for task chains on big/little cores"
)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random chain (or a corpus manifest).
    Gen(GenArgs),
    /// Compute a schedule with one strategy.
    Schedule(ScheduleArgs),
    /// Exhaustive minimum period for a small instance.
    Oracle(OracleArgs),
    /// Replay a schedule stream by stream.
    Simulate(SimulateArgs),
    /// Map the threads of a schedule to cores.
    Pin(PinArgs),
    /// Buffer slots per link for a schedule.
    Buffers(BuffersArgs),
    /// Slowdown study over a random corpus; writes one CSV row per run.
    Sweep(SweepArgs),
    /// Strategy wall-clock times over chain sizes.
    Bench(BenchArgs),
    /// List the bundled receiver profiles.
    Fixtures,
}

#[derive(Args)]
struct ChainPlatform {
    /// Chain JSON file, or a profile name (bundled or under $HETPIPE_FIXTURES).
    #[arg(long)]
    chain: String,
    /// Platform JSON file, or `BIG,LITTLE`.
    #[arg(long)]
    platform: String,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    /// Fraction of replicable tasks.
    #[arg(long)]
    sr: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Big-core weight range `LO,HI`.
    #[arg(long, default_value = "1,100")]
    weights: String,
    /// Little-core slowdown range `LO,HI`.
    #[arg(long, default_value = "1,5")]
    slowdown: String,
    /// Emit a manifest of this many seeds (`seed..seed+count`) instead of a chain.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long)]
    strategy: Strategy,
    #[command(flatten)]
    input: ChainPlatform,
    /// Bits carried by one chain execution; defaults to the profile's value.
    #[arg(long)]
    bits_per_stream: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_MAX_EXPANSIONS)]
    max_expansions: u64,
    /// Also write the solution JSON here.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: ChainPlatform,
    /// Enumerate from the last task backwards.
    #[arg(long)]
    reverse: bool,
    #[arg(long, default_value_t = OracleConfig::default().max_tasks)]
    max_tasks: usize,
    #[arg(long, default_value_t = OracleConfig::default().max_cores)]
    max_cores: usize,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    input: ChainPlatform,
    /// Solution JSON as written by `schedule`.
    #[arg(long)]
    solution: String,
    #[arg(long, default_value_t = 500)]
    streams: usize,
    #[arg(long, default_value_t = 100)]
    warmup: usize,
    /// Slots per link `B1,B2,...`; defaults to the lcm plan.
    #[arg(long)]
    buffers: Option<String>,
}

#[derive(Args)]
struct PinArgs {
    #[command(flatten)]
    input: ChainPlatform,
    #[arg(long)]
    solution: String,
    #[arg(long, default_value = "packed")]
    policy: Policy,
}

#[derive(Args)]
struct BuffersArgs {
    #[arg(long)]
    solution: String,
}

#[derive(Args)]
struct SweepArgs {
    /// Chains per ratio.
    #[arg(long, default_value_t = 1000)]
    chains: usize,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value = "0.2,0.5,0.8")]
    sr: String,
    /// `B,L:B,L:...`
    #[arg(long, default_value = "16,4:10,10:4,16")]
    platforms: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Strategies to compare; herad is always included.
    #[arg(long, default_value = "otac-l,otac-b,fertac,twocatac,herad")]
    strategies: String,
    #[arg(long, default_value_t = DEFAULT_MAX_EXPANSIONS)]
    max_expansions: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Per-run CSV.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Per-cell statistics as CSV.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Chain sizes.
    #[arg(long, default_value = "20,40,60")]
    n: String,
    #[arg(long, default_value = "0.2,0.5,0.8")]
    sr: String,
    #[arg(long, default_value = "20,20:100,100")]
    platforms: String,
    #[arg(long, default_value = "fertac,twocatac,herad")]
    strategies: String,
    #[arg(long, default_value_t = 50)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_EXPANSIONS)]
    max_expansions: u64,
    /// Points timed concurrently; above 1 the timings interfere.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Timing rows as CSV.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let json = cli.json;
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            let code = if e.is_infeasibility() { 2 } else { 1 };
            if json {
                eprintln!("{}", json!({ "error": e.to_string(), "exit_code": code }));
            } else {
                eprintln!("hetpipe: {e}");
            }
            ExitCode::from(code)
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    out!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let json = cli.json;
    match cli.command {
        Command::Gen(a) => gen(a, json),
        Command::Schedule(a) => schedule(a, json),
        Command::Oracle(a) => oracle(a, json),
        Command::Simulate(a) => simulate_cmd(a, json),
        Command::Pin(a) => pin_cmd(a, json),
        Command::Buffers(a) => buffers(a, json),
        Command::Sweep(a) => sweep(a, json),
        Command::Bench(a) => bench(a, json),
        Command::Fixtures => list_fixtures(json),
    }
}

fn range<T: std::str::FromStr + Copy>(s: &str, what: &str) -> Result<(T, T)> {
    match load::list::<T>(s, what)?.as_slice() {
        [lo, hi] => Ok((*lo, *hi)),
        _ => Err(Error::Input(format!("{what} range must be `LO,HI`, got {s:?}"))),
    }
}

fn gen(a: GenArgs, json: bool) -> Result<()> {
    let spec = GenSpec {
        n_tasks: a.n,
        stateless_ratio: a.sr,
        weight_range: range(&a.weights, "weight")?,
        slowdown_range: range(&a.slowdown, "slowdown")?,
        seed: a.seed,
    };
    spec.validate()?;
    let text = match a.count {
        Some(count) => {
            let mut manifest = CorpusManifest::uniform(count, a.n, a.sr, a.seed);
            for s in &mut manifest.specs {
                s.weight_range = spec.weight_range;
                s.slowdown_range = spec.slowdown_range;
            }
            serde_json::to_string_pretty(&manifest)?
        }
        None => serde_json::to_string_pretty(&generate(&spec)?)?,
    };
    load::write_out(a.out.as_deref(), &text)?;
    if let Some(path) = &a.out {
        if json {
            print_json(&json!({ "written": path }))?;
        } else {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn schedule(a: ScheduleArgs, json: bool) -> Result<()> {
    let loaded = load::chain(&a.input.chain)?;
    let platform = load::platform(&a.input.platform)?;
    let solution = a.strategy.run(&loaded.chain, &platform, a.max_expansions)?;
    let bits = a.bits_per_stream.or(loaded.fixture.map(|f| f.bits_per_stream()));
    let period = solution.period_f64();
    // Periods are in µs, so bits per µs is Mb/s.
    let mbps = bits.map(|b| b as f64 / period);
    let usage = solution.usage();
    if let Some(path) = &a.out {
        load::write_out(Some(path), &serde_json::to_string_pretty(&solution)?)?;
    }
    if json {
        print_json(&json!({
            "strategy": a.strategy,
            "chain": loaded.chain.name(),
            "platform": platform,
            "solution": solution,
            "period": period,
            "period_exact": solution.period().to_string(),
            "big_used": usage.big,
            "little_used": usage.little,
            "throughput_mbps": mbps,
        }))
    } else {
        out!("{} on {} {}: {}", a.strategy, loaded.chain.name(), platform, solution);
        out!("period {period:.1}");
        out!("cores used {}B {}L", usage.big, usage.little);
        if let Some(m) = mbps {
            out!("throughput {m:.1} Mb/s");
        }
        Ok(())
    }
}

fn oracle(a: OracleArgs, json: bool) -> Result<()> {
    let chain = load::chain(&a.input.chain)?.chain;
    let platform = load::platform(&a.input.platform)?;
    let config = OracleConfig {
        max_tasks: a.max_tasks,
        max_cores: a.max_cores,
        order: if a.reverse { Order::Reverse } else { Order::Forward },
        ..OracleConfig::default()
    };
    let result = brute_force_with(&chain, &platform, &config)?;
    if json {
        print_json(&result)
    } else {
        out!(
            "min period {} ({})",
            rational_to_f64(&result.min_period),
            result.min_period
        );
        out!(
            "{} optimal mappings; fewest big cores {}, fewest cores {}",
            result.witness_count,
            result.min_big_used,
            result.min_total_used
        );
        for w in &result.witnesses {
            out!("  {w}");
        }
        Ok(())
    }
}

fn simulate_cmd(a: SimulateArgs, json: bool) -> Result<()> {
    let chain = load::chain(&a.input.chain)?.chain;
    let platform = load::platform(&a.input.platform)?;
    let solution = load::solution(&chain, &a.solution)?;
    let config = SimConfig {
        streams: a.streams,
        warmup_streams: a.warmup,
        buffers_per_link: a
            .buffers
            .as_deref()
            .map(|b| load::list(b, "buffer count"))
            .transpose()?,
    };
    let report = simulate(&chain, &solution, &platform, &config)?;
    if json {
        print_json(&report)
    } else {
        let measured = rational_to_f64(&report.measured_period);
        let analytic = solution.period_f64();
        out!(
            "measured period {measured:.3} (analytic {analytic:.3}, {:+.3}%)",
            100.0 * (measured / analytic - 1.0)
        );
        out!("completion order preserved: {}", report.order_preserved());
        let busy: Vec<String> = report.per_stage_busy.iter().map(|b| format!("{b:.2}")).collect();
        out!("stage utilisation {}", busy.join(" "));
        for (i, l) in report.links.iter().enumerate() {
            out!(
                "link {}: {} slots, {}->{} replicas{}",
                i + 1,
                l.buffers,
                l.producers,
                l.consumers,
                if l.contended() { ", contended" } else { "" }
            );
        }
        Ok(())
    }
}

fn pin_cmd(a: PinArgs, json: bool) -> Result<()> {
    let chain = load::chain(&a.input.chain)?.chain;
    let platform = load::platform(&a.input.platform)?;
    let solution = load::solution(&chain, &a.solution)?;
    let map = pin(&solution, &platform, a.policy)?;
    if json {
        print_json(&map)
    } else {
        for t in &map.threads {
            out!("t{} stage {} {}: {:?}", t.thread, t.stage, t.core_type, t.placement);
        }
        Ok(())
    }
}

fn buffers(a: BuffersArgs, json: bool) -> Result<()> {
    let doc: SolutionDoc = load::solution_doc(&a.solution)?;
    let links = buffer_plan(&doc.stages);
    if json {
        print_json(&json!({ "links": links }))
    } else {
        let text: Vec<String> = links.iter().map(usize::to_string).collect();
        out!("{}", text.join(" "));
        Ok(())
    }
}

fn strategies(s: &str) -> Result<Vec<Strategy>> {
    s.split(',').map(|x| x.trim().parse()).collect()
}

fn set_threads(threads: usize) {
    if threads > 0 {
        // Read by the worker pool when it starts.
        std::env::set_var("RAYON_NUM_THREADS", threads.to_string());
    }
}

fn sweep(a: SweepArgs, json: bool) -> Result<()> {
    set_threads(a.threads);
    let ratios: Vec<f64> = load::list(&a.sr, "ratio")?;
    let platforms = load::platform_list(&a.platforms)?;
    let mut config = ExperimentConfig::table(a.chains, a.n, &ratios, &platforms, a.seed);
    config.strategies = strategies(&a.strategies)?;
    if !config.strategies.contains(&Strategy::Herad) {
        config.strategies.push(Strategy::Herad);
    }
    config.max_expansions = a.max_expansions;
    let report = run_slowdown_study(&config)?;
    if let Some(path) = &a.out {
        report.write_csv(BufWriter::new(File::create(path)?))?;
    }
    if let Some(path) = &a.stats {
        write_records(&report.cells, BufWriter::new(File::create(path)?))?;
    }
    if json {
        return print_json(&report.cells);
    }
    out!(
        "{:<9} {:>4} {:<9} {:>7} {:>7} {:>7} {:>7} {:>6} {:>6} {:>5}",
        "platform",
        "sr",
        "strategy",
        "%opt",
        "avg",
        "med",
        "max",
        "big",
        "little",
        "flag"
    );
    for c in &report.cells {
        out!(
            "{:<9} {:>4} {:<9} {:>7.1} {:>7.3} {:>7.3} {:>7.3} {:>6.1} {:>6.1} {:>5}",
            format!("({},{})", c.b, c.l),
            c.sr,
            c.strategy.name(),
            c.pct_optimal,
            c.avg_slowdown,
            c.median_slowdown,
            c.max_slowdown,
            c.avg_big_used,
            c.avg_little_used,
            c.flagged
        );
    }
    Ok(())
}

fn bench(a: BenchArgs, json: bool) -> Result<()> {
    let sizes: Vec<usize> = load::list(&a.n, "chain size")?;
    let ratios: Vec<f64> = load::list(&a.sr, "ratio")?;
    let platforms = load::platform_list(&a.platforms)?;
    let strategies = strategies(&a.strategies)?;
    let mut points = Vec::new();
    for &(b, l) in &platforms {
        for &sr in &ratios {
            for &n in &sizes {
                points.push(ProfilePoint { n, b, l, sr });
            }
        }
    }
    let threads = a.threads.max(1).min(points.len().max(1));
    let chunk = points.len().div_ceil(threads).max(1);
    let rows: Vec<TimingRow> = std::thread::scope(|scope| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|part| scope.spawn(|| run_time_profile(part, &strategies, a.reps, a.seed, a.max_expansions)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("timing thread panicked"))
            .collect::<Result<Vec<_>>>()
    })?
    .into_iter()
    .flatten()
    .collect();
    if let Some(path) = &a.out {
        write_records(&rows, BufWriter::new(File::create(path)?))?;
    }
    if json {
        return print_json(&rows);
    }
    out!(
        "{:>4} {:<9} {:>4} {:<9} {:>12} {:>12} {:>5}",
        "n",
        "platform",
        "sr",
        "strategy",
        "median_us",
        "mean_us",
        "trunc"
    );
    for r in &rows {
        out!(
            "{:>4} {:<9} {:>4} {:<9} {:>12.1} {:>12.1} {:>5}",
            r.n,
            format!("({},{})", r.b, r.l),
            r.sr,
            r.strategy.name(),
            r.median_us,
            r.mean_us,
            r.truncated
        );
    }
    Ok(())
}

fn list_fixtures(json: bool) -> Result<()> {
    if json {
        let list: Vec<_> = fixtures::FIXTURES
            .iter()
            .map(|f| {
                json!({
                    "name": f.name,
                    "description": f.description,
                    "tasks": f.chain().len(),
                    "big": f.cores.0,
                    "little": f.cores.1,
                    "frames_per_stream": f.frames_per_stream,
                    "bits_per_stream": f.bits_per_stream(),
                })
            })
            .collect();
        return print_json(&list);
    }
    for f in &fixtures::FIXTURES {
        out!(
            "{:<14} {:>2}B {:>2}L  {:>2} frames/stream  {}",
            f.name,
            f.cores.0,
            f.cores.1,
            f.frames_per_stream,
            f.description
        );
    }
    Ok(())
}
