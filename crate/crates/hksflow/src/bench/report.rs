//! Experiment records and their CSV form.

use std::io;

use crate::graph::{Dataflow, EvkMode};

pub const CSV_HEADER: [&str; 10] = [
    "benchmark",
    "dataflow",
    "bandwidth_gbps",
    "modops_mult",
    "evk_mode",
    "onchip_mb",
    "runtime_ms",
    "idle_frac",
    "dram_mb",
    "ai",
];

/// One simulated (or, for traffic-only rows, analysed) point. Fields that a
/// command does not compute are `None` and written as empty cells.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord {
    pub benchmark: String,
    pub dataflow: Dataflow,
    pub bandwidth_gbps: Option<f64>,
    pub modops_mult: f64,
    pub evk_mode: EvkMode,
    /// `None` is unbounded.
    pub onchip_mb: Option<u64>,
    pub runtime_ms: Option<f64>,
    pub idle_frac: Option<f64>,
    pub dram_mb: f64,
    pub ai: f64,
}

fn opt(x: Option<f64>, prec: usize) -> String {
    x.map_or(String::new(), |v| format!("{v:.prec$}"))
}

impl ExperimentRecord {
    /// Fixed-precision cells, so output is byte-stable across runs.
    pub fn cells(&self) -> [String; 10] {
        [
            self.benchmark.clone(),
            self.dataflow.name().to_string(),
            self.bandwidth_gbps.map_or(String::new(), |b| format!("{b}")),
            format!("{}", self.modops_mult),
            self.evk_mode.name().to_string(),
            self.onchip_mb.map_or("unbounded".to_string(), |m| m.to_string()),
            opt(self.runtime_ms, 6),
            opt(self.idle_frac, 6),
            format!("{:.3}", self.dram_mb),
            format!("{:.4}", self.ai),
        ]
    }

    /// Ordering key used before writing: benchmark order as given by the
    /// caller's index, then dataflow, bandwidth, MODOPS.
    pub fn sort_key(&self) -> (Dataflow, u64, u64) {
        (self.dataflow, self.bandwidth_gbps.unwrap_or(0.0).to_bits(), self.modops_mult.to_bits())
    }
}

pub fn write_csv<W: io::Write>(records: &[ExperimentRecord], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in records {
        out.write_record(r.cells())?;
    }
    out.flush()?;
    Ok(())
}

pub fn csv_string(records: &[ExperimentRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_cells() {
        let r = ExperimentRecord {
            benchmark: "ARK".into(),
            dataflow: Dataflow::Oc,
            bandwidth_gbps: Some(12.8),
            modops_mult: 2.0,
            evk_mode: EvkMode::Preloaded,
            onchip_mb: Some(32),
            runtime_ms: Some(1.5),
            idle_frac: Some(0.25),
            dram_mb: 176.0,
            ai: 2.5,
        };
        let s = csv_string(std::slice::from_ref(&r));
        let mut lines = s.lines();
        assert_eq!(
            lines.next().unwrap(),
            "benchmark,dataflow,bandwidth_gbps,modops_mult,evk_mode,onchip_mb,runtime_ms,idle_frac,dram_mb,ai"
        );
        assert_eq!(lines.next().unwrap(), "ARK,oc,12.8,2,preloaded,32,1.500000,0.250000,176.000,2.5000");
        let t = ExperimentRecord { bandwidth_gbps: None, runtime_ms: None, idle_frac: None, onchip_mb: None, ..r };
        assert_eq!(csv_string(&[t]).lines().nth(1).unwrap(), "ARK,oc,,2,preloaded,unbounded,,,176.000,2.5000");
    }
}
