//! Benchmark registry, experiment drivers and reporting.

pub mod cli;
mod registry;
mod report;
pub mod svg;
pub mod verify;

pub use registry::{
    load_config, lookup, parse_config, registry, sram_saving, BenchmarkSpec, PublishedValues, DATA_SRAM_MB, SRAM_TOTAL_MB,
};
pub use report::{csv_string, write_csv, ExperimentRecord, CSV_HEADER};
pub use verify::{run_verify, VerifyOptions, VerifyReport};

use rayon::prelude::*;

use crate::graph::{build, summarize_traffic, Dataflow, EvkMode, TaskGraph, MB};
use crate::sim::{evk_streaming_equivalent_bw, find_oc_base, simulate, SimConfig, BASELINE_BW_GBPS};

/// Bandwidths of the standard sweep, GB/s.
pub const DEFAULT_BW_GRID: [f64; 5] = [8.0, 12.8, 25.6, 32.0, 64.0];
pub const MODOPS_CHOICES: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];

fn capacity(onchip_mb: Option<u64>) -> Option<u64> {
    onchip_mb.map(|m| m * MB)
}

fn graphs(
    benches: &[BenchmarkSpec],
    dataflows: &[Dataflow],
    onchip_mb: Option<u64>,
    evk: EvkMode,
) -> anyhow::Result<Vec<(usize, TaskGraph)>> {
    let jobs: Vec<(usize, Dataflow)> =
        (0..benches.len()).flat_map(|b| dataflows.iter().map(move |&d| (b, d))).collect();
    jobs.par_iter()
        .map(|&(b, df)| {
            let p = benches[b].params()?;
            Ok((b, build(df, &p, capacity(onchip_mb), evk)?))
        })
        .collect()
}

/// DRAM traffic and AI for every benchmark and dataflow; no simulation.
pub fn traffic_records(
    benches: &[BenchmarkSpec],
    dataflows: &[Dataflow],
    onchip_mb: Option<u64>,
    evk: EvkMode,
) -> anyhow::Result<Vec<ExperimentRecord>> {
    Ok(graphs(benches, dataflows, onchip_mb, evk)?
        .into_iter()
        .map(|(b, g)| {
            let t = summarize_traffic(&g);
            ExperimentRecord {
                benchmark: benches[b].name.clone(),
                dataflow: g.dataflow,
                bandwidth_gbps: None,
                modops_mult: 1.0,
                evk_mode: evk,
                onchip_mb,
                runtime_ms: None,
                idle_frac: None,
                dram_mb: t.dram_mb(),
                ai: t.arithmetic_intensity,
            }
        })
        .collect())
}

/// Full cross product of benchmarks, dataflows, bandwidths and MODOPS.
/// Rows come out in benchmark order, then dataflow, bandwidth, MODOPS,
/// whatever order the parallel runs finish in.
pub fn sweep_records(
    benches: &[BenchmarkSpec],
    dataflows: &[Dataflow],
    bw: &[f64],
    modops: &[f64],
    onchip_mb: Option<u64>,
    evk: EvkMode,
    base: &SimConfig,
) -> anyhow::Result<Vec<ExperimentRecord>> {
    let gs = graphs(benches, dataflows, onchip_mb, evk)?;
    let points: Vec<(usize, f64, f64)> = (0..gs.len())
        .flat_map(|g| bw.iter().flat_map(move |&b| modops.iter().map(move |&m| (g, b, m))))
        .collect();
    let mut rows = points
        .par_iter()
        .map(|&(gi, b, m)| {
            let (bi, g) = &gs[gi];
            let r = simulate(g, &base.bandwidth(b).modops(m))?;
            Ok((
                *bi,
                ExperimentRecord {
                    benchmark: benches[*bi].name.clone(),
                    dataflow: g.dataflow,
                    bandwidth_gbps: Some(b),
                    modops_mult: m,
                    evk_mode: evk,
                    onchip_mb,
                    runtime_ms: Some(r.runtime_ms),
                    idle_frac: Some(r.idle_fraction),
                    dram_mb: r.dram_mb,
                    ai: r.arithmetic_intensity,
                },
            ))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        (a.0, a.1.dataflow)
            .cmp(&(b.0, b.1.dataflow))
            .then(a.1.bandwidth_gbps.unwrap_or(0.0).total_cmp(&b.1.bandwidth_gbps.unwrap_or(0.0)))
            .then(a.1.modops_mult.total_cmp(&b.1.modops_mult))
    });
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

/// One line of the OC_base report.
#[derive(Clone, Debug, PartialEq)]
pub struct OcBaseRow {
    pub benchmark: String,
    pub baseline_ms: f64,
    pub oc_base_gbps: Option<f64>,
    pub saved_bw: Option<f64>,
    pub oc_ms: Option<f64>,
    pub mp_ms: Option<f64>,
    /// MP over OC runtime, both at `oc_base_gbps`.
    pub speedup: Option<f64>,
    /// Streamed-key OC bandwidth that matches the baseline.
    pub streamed_equiv_gbps: Option<f64>,
}

pub fn ocbase_rows(benches: &[BenchmarkSpec], onchip_mb: Option<u64>, cfg: &SimConfig) -> anyhow::Result<Vec<OcBaseRow>> {
    benches
        .par_iter()
        .map(|b| {
            let p = b.params()?;
            let cap = capacity(onchip_mb);
            let base = find_oc_base(&p, Dataflow::Mp, Dataflow::Oc, cfg, cap)?;
            let (oc_ms, mp_ms) = match base.bandwidth_gbps {
                Some(bw) => {
                    let mp = build(Dataflow::Mp, &p, cap, EvkMode::Preloaded)?;
                    (base.runtime_ms, Some(simulate(&mp, &cfg.bandwidth(bw))?.runtime_ms))
                }
                None => (None, None),
            };
            let streamed = evk_streaming_equivalent_bw(&p, Dataflow::Oc, base.baseline_ms, cfg, cap)?;
            Ok(OcBaseRow {
                benchmark: b.name.clone(),
                baseline_ms: base.baseline_ms,
                oc_base_gbps: base.bandwidth_gbps,
                saved_bw: base.saved_factor(),
                oc_ms,
                mp_ms,
                speedup: oc_ms.zip(mp_ms).map(|(o, m)| m / o),
                streamed_equiv_gbps: streamed,
            })
        })
        .collect()
}

pub const OCBASE_HEADER: [&str; 10] = [
    "benchmark",
    "baseline_ms",
    "oc_base_gbps",
    "saved_bw",
    "oc_ms",
    "mp_ms",
    "speedup",
    "streamed_equiv_gbps",
    "published_oc_base_gbps",
    "published_speedup",
];

impl OcBaseRow {
    pub fn cells(&self, published: Option<&PublishedValues>) -> [String; 10] {
        let f = |x: Option<f64>, p: usize| x.map_or(String::new(), |v| format!("{v:.p$}"));
        [
            self.benchmark.clone(),
            format!("{:.6}", self.baseline_ms),
            f(self.oc_base_gbps, 1),
            f(self.saved_bw, 2),
            f(self.oc_ms, 6),
            f(self.mp_ms, 6),
            f(self.speedup, 3),
            f(self.streamed_equiv_gbps, 2),
            f(published.map(|p| p.oc_base_gbps), 1),
            f(published.map(|p| p.speedup), 2),
        ]
    }
}

/// Baseline bandwidth used by the OC_base search, re-exported for reports.
pub const BASELINE_GBPS: f64 = BASELINE_BW_GBPS;
