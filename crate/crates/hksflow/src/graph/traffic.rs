use super::{Task, TaskGraph, TaskKind};

/// Off-chip traffic and arithmetic intensity of a planned graph.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TrafficSummary {
    pub dram_bytes_total: u64,
    pub dram_bytes_evk: u64,
    pub dram_bytes_data: u64,
    pub compute_ops: u64,
    /// Modular operations per DRAM byte; 0 when there is no traffic.
    pub arithmetic_intensity: f64,
    pub peak_working_set_bytes: u64,
}

impl TrafficSummary {
    pub fn dram_mb(&self) -> f64 {
        self.dram_bytes_total as f64 / super::MB as f64
    }
}

/// Summary of a bare task list, e.g. an imported graph. Evaluation-key loads
/// are only recognised when buffer ids are present.
pub fn summarize_tasks(tasks: &[Task]) -> TrafficSummary {
    let mut s = TrafficSummary::default();
    for t in tasks {
        match t.kind {
            TaskKind::Compute => s.compute_ops += t.ops,
            TaskKind::Load | TaskKind::Store => {
                s.dram_bytes_total += t.bytes;
                if t.is_evk_load() {
                    s.dram_bytes_evk += t.bytes;
                } else {
                    s.dram_bytes_data += t.bytes;
                }
            }
        }
    }
    if s.dram_bytes_total > 0 {
        s.arithmetic_intensity = s.compute_ops as f64 / s.dram_bytes_total as f64;
    }
    s
}

pub fn summarize_traffic(g: &TaskGraph) -> TrafficSummary {
    TrafficSummary {
        peak_working_set_bytes: g.peak_resident_towers as u64 * g.tower_bytes(),
        ..summarize_tasks(&g.tasks)
    }
}
