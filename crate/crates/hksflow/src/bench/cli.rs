//! Command-line front end. Exit codes: 0 success, 1 verification or runtime
//! failure, 2 usage error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use crate::graph::{build, export_graph, Dataflow, EvkMode};
use crate::sim::SimConfig;

use super::svg::{line_chart, Series};
use super::verify::{VerifyError, VerifyOptions};
use super::*;

#[derive(Parser, Debug)]
#[command(name = "hksflow", version, about = "Hybrid key switching dataflows: traffic, simulation and verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Benchmark name or `all`.
    #[arg(long, global = true, default_value = "all")]
    pub benchmark: String,
    /// mp, dc, oc or all.
    #[arg(long, global = true, default_value = "all")]
    pub dataflow: String,
    /// Comma-separated bandwidths in GB/s.
    #[arg(long, global = true, value_delimiter = ',')]
    pub bw: Option<Vec<f64>>,
    /// Comma-separated MODOPS multipliers from {1,2,4,8,16}.
    #[arg(long, global = true, value_delimiter = ',')]
    pub modops: Option<Vec<f64>>,
    /// preloaded or streamed.
    #[arg(long, global = true)]
    pub evk: Option<String>,
    /// On-chip data memory in MB; 0 means unbounded.
    #[arg(long = "onchip-mb", global = true)]
    pub onchip_mb: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write one SVG per benchmark next to the output.
    #[arg(long, global = true)]
    pub plot: bool,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// JSON benchmark definition(s) replacing the built-in registry.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Functional checks at a reduced ring degree.
    Verify {
        /// Ring degree exponent for the checks (at most 13).
        #[arg(long = "log-n")]
        log_n: Option<u32>,
        /// Random inputs per key-switch check.
        #[arg(long, default_value_t = 4)]
        trials: usize,
        /// Flip one key residue, as `<digit>:<tower>`.
        #[arg(long = "corrupt-evk")]
        corrupt_evk: Option<String>,
    },
    /// DRAM traffic and arithmetic intensity, CSV.
    Traffic,
    /// Runtime sweep over bandwidth and MODOPS, CSV.
    Sweep,
    /// OC bandwidth matching the MP 64 GB/s baseline.
    Ocbase,
    /// Task graph in text form.
    ExportGraph,
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Usage(String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                2
            } else {
                1
            }
        }
    }
}

pub fn execute(cli: &Cli) -> anyhow::Result<i32> {
    let o = &cli.opts;
    match o.jobs {
        Some(0) => Err(usage("--jobs must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            pool.install(|| dispatch(cli))
        }
        None => dispatch(cli),
    }
}

fn benchmarks(o: &Options) -> anyhow::Result<Vec<BenchmarkSpec>> {
    let all = match &o.config {
        Some(path) => load_config(path).map_err(|e| usage(format!("--config: {e:#}")))?,
        None => registry(),
    };
    if o.benchmark.eq_ignore_ascii_case("all") {
        return Ok(all);
    }
    let names: Vec<&str> = o.benchmark.split(',').collect();
    names
        .iter()
        .map(|n| {
            all.iter()
                .find(|b| b.name.eq_ignore_ascii_case(n))
                .cloned()
                .ok_or_else(|| usage(format!("unknown benchmark `{n}`")))
        })
        .collect()
}

fn dataflows(o: &Options) -> anyhow::Result<Vec<Dataflow>> {
    if o.dataflow.eq_ignore_ascii_case("all") {
        return Ok(Dataflow::ALL.to_vec());
    }
    let mut v = o.dataflow.split(',').map(|s| s.parse::<Dataflow>().map_err(usage)).collect::<anyhow::Result<Vec<_>>>()?;
    v.sort();
    v.dedup();
    Ok(v)
}

fn evk_mode(o: &Options, default: EvkMode) -> anyhow::Result<EvkMode> {
    o.evk.as_deref().map_or(Ok(default), |s| s.parse().map_err(usage))
}

fn onchip(o: &Options) -> Option<u64> {
    match o.onchip_mb {
        Some(0) => None,
        Some(m) => Some(m),
        None => Some(DATA_SRAM_MB),
    }
}

fn bandwidths(o: &Options) -> anyhow::Result<Vec<f64>> {
    let v = o.bw.clone().unwrap_or_else(|| DEFAULT_BW_GRID.to_vec());
    if v.is_empty() || v.iter().any(|&b| !(b > 0.0 && b.is_finite())) {
        return Err(usage("--bw needs positive bandwidths"));
    }
    Ok(v)
}

fn modops(o: &Options) -> anyhow::Result<Vec<f64>> {
    let v = o.modops.clone().unwrap_or_else(|| vec![1.0]);
    if v.is_empty() || v.iter().any(|m| !MODOPS_CHOICES.contains(m)) {
        return Err(usage("--modops values must be among 1,2,4,8,16"));
    }
    Ok(v)
}

/// Writes to `--out` or stdout.
fn emit(o: &Options, text: &str) -> anyhow::Result<()> {
    match &o.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Side reports go to stdout when the main output went to a file.
fn note(o: &Options, text: &str) {
    if o.out.is_some() {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
}

fn dispatch(cli: &Cli) -> anyhow::Result<i32> {
    let o = &cli.opts;
    match &cli.command {
        Command::Verify { log_n, trials, corrupt_evk } => cmd_verify(o, *log_n, *trials, corrupt_evk.as_deref()),
        Command::Traffic => cmd_traffic(o),
        Command::Sweep => cmd_sweep(o),
        Command::Ocbase => cmd_ocbase(o),
        Command::ExportGraph => cmd_export(o),
    }
}

fn cmd_verify(o: &Options, log_n: Option<u32>, trials: usize, corrupt: Option<&str>) -> anyhow::Result<i32> {
    let corrupt = match corrupt {
        None => None,
        Some(s) => {
            let (d, t) = s.split_once(':').ok_or_else(|| usage("--corrupt-evk expects <digit>:<tower>"))?;
            Some((d.parse().map_err(|_| usage("bad digit"))?, t.parse().map_err(|_| usage("bad tower"))?))
        }
    };
    let benches = if o.config.is_none() && o.benchmark.eq_ignore_ascii_case("all") {
        vec![VerifyOptions::toy().bench]
    } else {
        benchmarks(o)?
    };
    let mut all_ok = true;
    let mut text = String::new();
    for b in benches {
        // Registry entries run at a reduced ring degree; configs as given.
        let logn = log_n.unwrap_or(if o.config.is_some() { b.degree_log2 } else { 12 });
        let opts = VerifyOptions { bench: b.clone(), degree_log2: logn, seed: o.seed, trials, corrupt };
        let rep = match run_verify(&opts) {
            Ok(r) => r,
            Err(e @ (VerifyError::TooLarge(_) | VerifyError::BadFault { .. })) => return Err(usage(e.to_string())),
            Err(VerifyError::Other(e)) => return Err(e),
        };
        text.push_str(&format!(
            "# {} at N=2^{logn}, k_l={}, k_p={}, dnum={}, seed {}\n{rep}\n",
            b.name, b.k_l, b.k_p, b.dnum, o.seed
        ));
        all_ok &= rep.passed();
    }
    emit(o, &text)?;
    Ok(if all_ok { 0 } else { 1 })
}

fn pct(x: f64, r: f64) -> String {
    format!("{:+.1}%", (x / r - 1.0) * 100.0)
}

fn cmd_traffic(o: &Options) -> anyhow::Result<i32> {
    let benches = benchmarks(o)?;
    let dfs = dataflows(o)?;
    let evk = evk_mode(o, EvkMode::Streamed)?;
    let cap = onchip(o);
    let recs = traffic_records(&benches, &dfs, cap, evk)?;
    emit(o, &csv_string(&recs))?;
    if cap == Some(DATA_SRAM_MB) && evk == EvkMode::Streamed {
        let mut s = String::from("# comparison with published traffic (32 MB, streamed keys)\n");
        for r in &recs {
            let Some(p) = benches.iter().find(|b| b.name == r.benchmark).and_then(|b| b.published) else {
                continue;
            };
            let (pm, pa) = (p.dram_mb(r.dataflow), p.ai(r.dataflow));
            s.push_str(&format!(
                "# {:<7}{:<3} dram {:>8.1} MB (published {:>6.0}, {:>7})  ai {:.3} (published {:.2}, {})\n",
                r.benchmark,
                r.dataflow,
                r.dram_mb,
                pm,
                pct(r.dram_mb, pm),
                r.ai,
                pa,
                pct(r.ai, pa)
            ));
        }
        note(o, &s);
    }
    Ok(0)
}

fn plot_dir(o: &Options) -> PathBuf {
    o.out.as_deref().and_then(Path::parent).map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."))
}

fn cmd_sweep(o: &Options) -> anyhow::Result<i32> {
    let benches = benchmarks(o)?;
    let dfs = dataflows(o)?;
    let bw = bandwidths(o)?;
    let mo = modops(o)?;
    let evk = evk_mode(o, EvkMode::Preloaded)?;
    let cap = onchip(o);
    let recs = sweep_records(&benches, &dfs, &bw, &mo, cap, evk, &SimConfig::default())?;
    emit(o, &csv_string(&recs))?;
    if o.plot {
        let dir = plot_dir(o);
        for b in &benches {
            let mut series = Vec::new();
            for &df in &dfs {
                for &m in &mo {
                    let mut pts: Vec<(f64, f64)> = recs
                        .iter()
                        .filter(|r| r.benchmark == b.name && r.dataflow == df && r.modops_mult == m)
                        .map(|r| (r.bandwidth_gbps.unwrap_or(0.0), r.runtime_ms.unwrap_or(0.0)))
                        .collect();
                    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                    let label = if mo.len() > 1 { format!("{df} {m}x") } else { df.to_string() };
                    series.push(Series { label, points: pts });
                }
            }
            let svg = line_chart(
                &format!("{} key switch runtime ({evk} keys)", b.name),
                "bandwidth (GB/s)",
                "runtime (ms)",
                &series,
                true,
            );
            let path = dir.join(format!("sweep_{}.svg", b.name));
            fs::write(&path, svg).with_context(|| format!("writing {}", path.display()))?;
            note(o, &format!("# wrote {}\n", path.display()));
        }
    }
    Ok(0)
}

fn cmd_ocbase(o: &Options) -> anyhow::Result<i32> {
    let benches = benchmarks(o)?;
    let rows = ocbase_rows(&benches, onchip(o), &SimConfig::default())?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(OCBASE_HEADER)?;
    for (r, b) in rows.iter().zip(&benches) {
        w.write_record(r.cells(b.published.as_ref()))?;
    }
    let mut text = String::from_utf8(w.into_inner()?)?;
    text.push_str(&format!(
        "# baseline: MP at {BASELINE_GBPS} GB/s, preloaded keys\n# SRAM saved by streaming keys: {SRAM_TOTAL_MB}/{DATA_SRAM_MB} = {:.2}x\n",
        sram_saving()
    ));
    emit(o, &text)?;
    Ok(0)
}

fn cmd_export(o: &Options) -> anyhow::Result<i32> {
    let benches = benchmarks(o)?;
    let dfs = dataflows(o)?;
    let ([b], [df]) = (benches.as_slice(), dfs.as_slice()) else {
        return Err(usage("export-graph needs exactly one --benchmark and one --dataflow"));
    };
    let evk = evk_mode(o, EvkMode::Streamed)?;
    let g = build(*df, &b.params()?, onchip(o).map(|m| m * crate::graph::MB), evk)?;
    emit(o, &export_graph(&g))?;
    Ok(0)
}
