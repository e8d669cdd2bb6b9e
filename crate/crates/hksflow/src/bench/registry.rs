//! The five published parameter sets and user-supplied ones.

use std::path::Path;

use serde::Deserialize;

use crate::graph::Dataflow;
use crate::hks::{HksError, HksParams};

/// Published reference numbers for a benchmark. Traffic and AI are at 32 MB
/// on-chip with streamed keys, indexed MP, DC, OC.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PublishedValues {
    pub alpha: usize,
    pub evk_mb: u64,
    pub dram_mb: [f64; 3],
    pub ai: [f64; 3],
    pub oc_base_gbps: f64,
    pub saved_bw: f64,
    pub oc_ms: f64,
    pub mp_ms: f64,
    pub speedup: f64,
    /// Streamed-key bandwidth at which OC matches the baseline, where quoted.
    pub streamed_equiv_gbps: Option<f64>,
}

impl PublishedValues {
    pub fn dram_mb(&self, df: Dataflow) -> f64 {
        self.dram_mb[df as usize]
    }

    pub fn ai(&self, df: Dataflow) -> f64 {
        self.ai[df as usize]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkSpec {
    pub name: String,
    pub degree_log2: u32,
    pub k_l: usize,
    pub k_p: usize,
    pub dnum: usize,
    pub published: Option<PublishedValues>,
}

/// Total SRAM of the reference accelerator and the data region left when
/// keys move off-chip.
pub const SRAM_TOTAL_MB: u64 = 392;
pub const DATA_SRAM_MB: u64 = 32;

pub fn sram_saving() -> f64 {
    SRAM_TOTAL_MB as f64 / DATA_SRAM_MB as f64
}

impl BenchmarkSpec {
    pub fn new(name: &str, degree_log2: u32, k_l: usize, k_p: usize, dnum: usize) -> Self {
        BenchmarkSpec { name: name.to_string(), degree_log2, k_l, k_p, dnum, published: None }
    }

    pub fn alpha(&self) -> usize {
        self.k_l.div_ceil(self.dnum)
    }

    pub fn params(&self) -> Result<HksParams, HksError> {
        HksParams::new(self.degree_log2, self.k_l, self.k_p, self.dnum)
    }

    /// Same tower counts at a smaller ring degree, for functional checks.
    pub fn params_at(&self, degree_log2: u32) -> Result<HksParams, HksError> {
        HksParams::new(degree_log2, self.k_l, self.k_p, self.dnum)
    }

    /// `dnum · 2 · N · (k_l + k_p) · 8` bytes in MB (2^20).
    pub fn evk_mb(&self) -> f64 {
        (self.dnum * 2 * (self.k_l + self.k_p) * 8) as f64 * (1u64 << self.degree_log2) as f64 / (1u64 << 20) as f64
    }
}

#[allow(clippy::too_many_arguments)]
fn entry(
    name: &str,
    (logn, kl, kp, dnum): (u32, usize, usize, usize),
    alpha: usize,
    evk_mb: u64,
    dram_mb: [f64; 3],
    ai: [f64; 3],
    (oc_base_gbps, saved_bw, oc_ms, mp_ms, speedup): (f64, f64, f64, f64, f64),
    streamed_equiv_gbps: Option<f64>,
) -> BenchmarkSpec {
    BenchmarkSpec {
        published: Some(PublishedValues {
            alpha,
            evk_mb,
            dram_mb,
            ai,
            oc_base_gbps,
            saved_bw,
            oc_ms,
            mp_ms,
            speedup,
            streamed_equiv_gbps,
        }),
        ..BenchmarkSpec::new(name, logn, kl, kp, dnum)
    }
}

pub fn registry() -> Vec<BenchmarkSpec> {
    vec![
        entry("BTS1", (17, 28, 28, 1), 28, 112, [600., 600., 420.], [1.81, 1.81, 2.59], (25.6, 2.5, 30.08, 39.13, 1.30), None),
        entry("BTS2", (17, 40, 20, 2), 20, 240, [1352., 1278., 716.], [1.14, 1.2, 2.15], (12.8, 5.0, 43.24, 104.85, 2.42), None),
        entry(
            "BTS3",
            (17, 45, 15, 3),
            15,
            360,
            [1850., 1766., 1119.],
            [1.00, 1.04, 1.65],
            (32.0, 2.0, 51.87, 71.50, 1.37),
            Some(45.62),
        ),
        entry("ARK", (16, 24, 6, 4), 6, 120, [432., 356., 180.], [1.05, 1.27, 2.52], (8.0, 8.0, 9.01, 37.54, 4.16), Some(23.4)),
        entry("DPRIVE", (16, 26, 7, 3), 9, 99, [365., 336., 170.], [1.26, 1.37, 2.71], (12.8, 5.0, 7.81, 23.15, 2.96), None),
    ]
}

/// Case-insensitive registry lookup.
pub fn lookup(name: &str) -> Option<BenchmarkSpec> {
    registry().into_iter().find(|b| b.name.eq_ignore_ascii_case(name))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigEntry {
    name: String,
    #[serde(rename = "logN")]
    log_n: u32,
    k_l: usize,
    k_p: usize,
    dnum: usize,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ConfigFile {
    One(ConfigEntry),
    Many(Vec<ConfigEntry>),
}

/// Parses one benchmark object or an array of them.
pub fn parse_config(json: &str) -> anyhow::Result<Vec<BenchmarkSpec>> {
    let entries = match serde_json::from_str::<ConfigFile>(json)? {
        ConfigFile::One(e) => vec![e],
        ConfigFile::Many(v) => v,
    };
    if entries.is_empty() {
        anyhow::bail!("config lists no benchmarks");
    }
    entries
        .into_iter()
        .map(|e| {
            let b = BenchmarkSpec::new(&e.name, e.log_n, e.k_l, e.k_p, e.dnum);
            b.params().map_err(|err| anyhow::anyhow!("benchmark `{}`: {err}", e.name))?;
            Ok(b)
        })
        .collect()
}

pub fn load_config(path: &Path) -> anyhow::Result<Vec<BenchmarkSpec>> {
    let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    parse_config(&text)
}
