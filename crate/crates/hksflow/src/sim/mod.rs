//! Two-queue discrete-event model of a decoupled accelerator.
//!
//! Memory tasks issue in order on one channel, compute tasks in order on one
//! engine. A task starts once its queue is free and its dependencies have
//! finished. Memory tasks take `bytes / bandwidth`; compute tasks take
//! `ops / (lanes · modops · freq · efficiency)`.

mod sweep;

use std::fmt;

pub use sweep::{
    equivalent_bandwidth, evk_streaming_equivalent_bw, find_oc_base, first_matching_bandwidth, sweep_bandwidth,
    sweep_modops, OcBase, SweepPoint, BASELINE_BW_GBPS, EXTENDED_GRID, OC_BASE_GRID,
};

use crate::graph::{summarize_tasks, Kernel, Task, TaskGraph, TaskKind, MB};

pub const GB: f64 = (1u64 << 30) as f64;

/// Fraction of peak lane throughput each kernel sustains.
///
/// NTT and INTT run at full rate. BConv is bound by its accumulation pattern,
/// and the element-wise kernels by register traffic rather than arithmetic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelEfficiency {
    pub intt: f64,
    pub ntt: f64,
    pub bconv: f64,
    pub point_mul: f64,
    pub add: f64,
    pub scale_sub: f64,
}

impl Default for KernelEfficiency {
    fn default() -> Self {
        KernelEfficiency { intt: 1.0, ntt: 1.0, bconv: 0.15, point_mul: 0.125, add: 0.125, scale_sub: 0.125 }
    }
}

impl KernelEfficiency {
    pub fn uniform(x: f64) -> Self {
        KernelEfficiency { intt: x, ntt: x, bconv: x, point_mul: x, add: x, scale_sub: x }
    }

    pub fn get(&self, k: Kernel) -> f64 {
        match k {
            Kernel::Intt => self.intt,
            Kernel::Ntt => self.ntt,
            Kernel::BConvPartial => self.bconv,
            Kernel::PointMul => self.point_mul,
            Kernel::Add => self.add,
            Kernel::ScaleSub => self.scale_sub,
        }
    }
}

impl fmt::Display for KernelEfficiency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "INTT={} NTT={} BConvPartial={} PointMul={} Add={} ScaleSub={}",
            self.intt, self.ntt, self.bconv, self.point_mul, self.add, self.scale_sub
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    /// GB/s with GB = 2^30.
    pub bandwidth_gbps: f64,
    pub num_lanes: u32,
    pub freq_ghz: f64,
    pub modops_mult: f64,
    pub kernel_efficiency: KernelEfficiency,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            bandwidth_gbps: BASELINE_BW_GBPS,
            num_lanes: 128,
            freq_ghz: 1.7,
            modops_mult: 1.0,
            kernel_efficiency: KernelEfficiency::default(),
        }
    }
}

impl SimConfig {
    pub fn with_bandwidth(bandwidth_gbps: f64) -> Self {
        SimConfig { bandwidth_gbps, ..Default::default() }
    }

    pub fn bandwidth(mut self, gbps: f64) -> Self {
        self.bandwidth_gbps = gbps;
        self
    }

    pub fn modops(mut self, mult: f64) -> Self {
        self.modops_mult = mult;
        self
    }

    pub fn check(&self) -> Result<(), SimError> {
        let e = &self.kernel_efficiency;
        let effs = [e.intt, e.ntt, e.bconv, e.point_mul, e.add, e.scale_sub];
        if !(self.bandwidth_gbps > 0.0 && self.bandwidth_gbps.is_finite()) {
            return Err(SimError::Config(format!("bandwidth must be positive, got {}", self.bandwidth_gbps)));
        }
        if self.num_lanes == 0 || self.freq_ghz.is_nan() || self.freq_ghz <= 0.0 {
            return Err(SimError::Config("lanes and frequency must be positive".into()));
        }
        if self.modops_mult.is_nan() || self.modops_mult < 1.0 {
            return Err(SimError::Config(format!("modops multiplier must be at least 1, got {}", self.modops_mult)));
        }
        if effs.iter().any(|&x| !(x > 0.0 && x <= 1.0)) {
            return Err(SimError::Config(format!("kernel efficiencies must lie in (0, 1]: {e}")));
        }
        Ok(())
    }

    /// Seconds to move `bytes` over the channel.
    pub fn memory_time(&self, bytes: u64) -> f64 {
        bytes as f64 / (self.bandwidth_gbps * GB)
    }

    /// Seconds to execute `ops` modular operations of kernel `k`.
    pub fn compute_time(&self, k: Kernel, ops: u64) -> f64 {
        let rate = self.num_lanes as f64 * self.modops_mult * self.freq_ghz * 1e9 * self.kernel_efficiency.get(k);
        ops as f64 / rate
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SimError {
    #[error("dependency cycle or out-of-order dependency involving task {0}")]
    Cycle(usize),
    #[error("dependency {dep} of task {task} does not exist")]
    MissingDep { task: usize, dep: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelTime {
    pub kernel: Kernel,
    pub tasks: usize,
    pub ops: u64,
    pub busy_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimResult {
    pub runtime_ms: f64,
    /// Compute-engine idle time over runtime.
    pub idle_fraction: f64,
    pub dram_mb: f64,
    pub arithmetic_intensity: f64,
    pub memory_busy_ms: f64,
    pub compute_busy_ms: f64,
    /// Busy time per kernel, in [`Kernel::ALL`] order.
    pub per_kernel: Vec<KernelTime>,
}

/// Simulates a planned graph using its declared issue orders.
pub fn simulate(g: &TaskGraph, cfg: &SimConfig) -> Result<SimResult, SimError> {
    run(&g.tasks, &g.memory_order, &g.compute_order, cfg)
}

/// Simulates a bare task list; each queue issues in id order.
pub fn simulate_tasks(tasks: &[Task], cfg: &SimConfig) -> Result<SimResult, SimError> {
    let mem: Vec<usize> = tasks.iter().filter(|t| t.kind.is_memory()).map(|t| t.id).collect();
    let cmp: Vec<usize> = tasks.iter().filter(|t| !t.kind.is_memory()).map(|t| t.id).collect();
    run(tasks, &mem, &cmp, cfg)
}

fn run(tasks: &[Task], mem: &[usize], cmp: &[usize], cfg: &SimConfig) -> Result<SimResult, SimError> {
    cfg.check()?;
    for (i, t) in tasks.iter().enumerate() {
        if t.id != i {
            return Err(SimError::Config(format!("task at position {i} has id {}", t.id)));
        }
        if let Some(&d) = t.deps.iter().find(|&&d| d >= tasks.len()) {
            return Err(SimError::MissingDep { task: i, dep: d });
        }
    }
    let mut finish: Vec<Option<f64>> = vec![None; tasks.len()];
    let queues = [mem, cmp];
    let mut head = [0usize; 2];
    let mut free = [0.0f64; 2];
    let mut per_kernel: Vec<KernelTime> =
        Kernel::ALL.iter().map(|&kernel| KernelTime { kernel, tasks: 0, ops: 0, busy_ms: 0.0 }).collect();
    let mut busy = [0.0f64; 2];
    // Either queue head may be blocked on the other queue; advance whichever
    // is ready. Start times depend only on queue and dependency finishes, so
    // the interleaving does not affect the result.
    while head[0] < queues[0].len() || head[1] < queues[1].len() {
        let mut progressed = false;
        for q in 0..2 {
            while head[q] < queues[q].len() {
                let t = &tasks[queues[q][head[q]]];
                let mut start = free[q];
                let mut ready = true;
                for &d in &t.deps {
                    match finish[d] {
                        Some(f) => start = start.max(f),
                        None => {
                            ready = false;
                            break;
                        }
                    }
                }
                if !ready {
                    break;
                }
                let dur = match (t.kind, t.kernel) {
                    (TaskKind::Compute, Some(k)) => {
                        let d = cfg.compute_time(k, t.ops);
                        let e = &mut per_kernel[Kernel::ALL.iter().position(|&x| x == k).unwrap()];
                        e.tasks += 1;
                        e.ops += t.ops;
                        e.busy_ms += d * 1e3;
                        d
                    }
                    (TaskKind::Compute, None) => {
                        return Err(SimError::Config(format!("compute task {} has no kernel", t.id)))
                    }
                    _ => cfg.memory_time(t.bytes),
                };
                busy[q] += dur;
                finish[t.id] = Some(start + dur);
                free[q] = start + dur;
                head[q] += 1;
                progressed = true;
            }
        }
        if !progressed {
            let stuck = queues.iter().zip(head).filter_map(|(q, h)| q.get(h)).min().copied().unwrap_or(0);
            return Err(SimError::Cycle(stuck));
        }
    }
    let runtime = finish.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    let traffic = summarize_tasks(tasks);
    Ok(SimResult {
        runtime_ms: runtime * 1e3,
        idle_fraction: if runtime > 0.0 { (1.0 - busy[1] / runtime).clamp(0.0, 1.0) } else { 0.0 },
        dram_mb: traffic.dram_bytes_total as f64 / MB as f64,
        arithmetic_intensity: traffic.arithmetic_intensity,
        memory_busy_ms: busy[0] * 1e3,
        compute_busy_ms: busy[1] * 1e3,
        per_kernel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(id: usize, bytes: u64, deps: Vec<usize>) -> Task {
        Task {
            id,
            kind: TaskKind::Load,
            kernel: None,
            bytes,
            ops: 0,
            deps,
            buffers_in: vec![],
            buffers_out: vec![],
            slots: vec![],
        }
    }

    fn compute(id: usize, ops: u64, deps: Vec<usize>) -> Task {
        Task { kind: TaskKind::Compute, kernel: Some(Kernel::Ntt), ops, bytes: 0, ..load(id, 0, deps) }
    }

    #[test]
    fn single_load_is_pure_transfer() {
        let r = simulate_tasks(&[load(0, 8 << 30, vec![])], &SimConfig::with_bandwidth(8.0)).unwrap();
        assert_eq!(r.runtime_ms, 1000.0);
        assert_eq!(r.idle_fraction, 1.0);
        assert_eq!(r.dram_mb, 8192.0);
    }

    #[test]
    fn independent_queues_overlap() {
        let cfg = SimConfig::with_bandwidth(1.0);
        let ops = (128.0 * 1.7e9) as u64;
        let r = simulate_tasks(&[load(0, 1 << 30, vec![]), compute(1, ops, vec![])], &cfg).unwrap();
        assert!((r.runtime_ms - 1000.0).abs() < 1e-6);
        let r = simulate_tasks(&[load(0, 1 << 30, vec![]), compute(1, ops, vec![0])], &cfg).unwrap();
        assert!((r.runtime_ms - 2000.0).abs() < 1e-6);
        assert!((r.idle_fraction - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cross_queue_wait_is_resolved() {
        // compute 0 waits for load 1 which is the memory head; load 2 waits on compute 0.
        let tasks = vec![compute(0, 1000, vec![1]), load(1, 1 << 20, vec![]), load(2, 1 << 20, vec![0])];
        assert!(simulate_tasks(&tasks, &SimConfig::default()).is_ok());
    }

    #[test]
    fn cycles_are_rejected() {
        let tasks = vec![load(0, 8, vec![1]), compute(1, 8, vec![0])];
        assert_eq!(simulate_tasks(&tasks, &SimConfig::default()), Err(SimError::Cycle(0)));
        let tasks = vec![load(0, 8, vec![5])];
        assert!(matches!(simulate_tasks(&tasks, &SimConfig::default()), Err(SimError::MissingDep { .. })));
    }

    #[test]
    fn bad_config_is_rejected() {
        let t = [load(0, 8, vec![])];
        assert!(simulate_tasks(&t, &SimConfig::with_bandwidth(0.0)).is_err());
        assert!(simulate_tasks(&t, &SimConfig::default().modops(0.5)).is_err());
        let mut c = SimConfig::default();
        c.kernel_efficiency.bconv = 1.5;
        assert!(simulate_tasks(&t, &c).is_err());
    }

    #[test]
    fn empty_graph() {
        let r = simulate_tasks(&[], &SimConfig::default()).unwrap();
        assert_eq!((r.runtime_ms, r.idle_fraction, r.dram_mb), (0.0, 0.0, 0.0));
    }
}
