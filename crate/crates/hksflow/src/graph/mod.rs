//! Task graphs of one key switch under the max-parallel (MP), digit-centric
//! (DC) and output-centric (OC) dataflows, with on-chip memory planning and
//! analytic traffic accounting.

mod export;
mod planner;
mod replay;
mod schedule;
mod task;
mod traffic;
mod validate;

use std::fmt;
use std::str::FromStr;

pub use export::{export_graph, parse_graph, write_graph};
pub use planner::EVICTION_WINDOW;
pub use replay::replay;
pub use task::{BufId, Kernel, Task, TaskKind};
pub use traffic::{summarize_tasks, summarize_traffic, TrafficSummary};
pub use validate::validate;

use crate::hks::HksParams;
use planner::{plan, PlanConfig};
use schedule::DcReduce;

pub const MB: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dataflow {
    Mp,
    Dc,
    Oc,
}

impl Dataflow {
    pub const ALL: [Dataflow; 3] = [Dataflow::Mp, Dataflow::Dc, Dataflow::Oc];

    pub fn name(&self) -> &'static str {
        match self {
            Dataflow::Mp => "mp",
            Dataflow::Dc => "dc",
            Dataflow::Oc => "oc",
        }
    }
}

impl fmt::Display for Dataflow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dataflow {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "mp" => Ok(Dataflow::Mp),
            "dc" => Ok(Dataflow::Dc),
            "oc" => Ok(Dataflow::Oc),
            _ => Err(format!("unknown dataflow `{s}` (expected mp, dc or oc)")),
        }
    }
}

/// Where evaluation keys live during the key switch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EvkMode {
    /// Resident in a separate on-chip region: no traffic, no data capacity.
    Preloaded,
    /// Fetched over the memory channel as ordinary tower loads.
    Streamed,
}

impl EvkMode {
    pub fn name(&self) -> &'static str {
        match self {
            EvkMode::Preloaded => "preloaded",
            EvkMode::Streamed => "streamed",
        }
    }
}

impl fmt::Display for EvkMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EvkMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "preloaded" => Ok(EvkMode::Preloaded),
            "streamed" => Ok(EvkMode::Streamed),
            _ => Err(format!("unknown evk mode `{s}` (expected preloaded or streamed)")),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("on-chip capacity of {capacity_towers} towers cannot hold a task needing {required_towers}")]
    Infeasible { capacity_towers: usize, required_towers: usize },
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Planned task DAG of one key switch.
#[derive(Clone, Debug)]
pub struct TaskGraph {
    pub tasks: Vec<Task>,
    pub memory_order: Vec<usize>,
    pub compute_order: Vec<usize>,
    pub params: HksParams,
    pub dataflow: Dataflow,
    /// `None` means unbounded.
    pub onchip_capacity_bytes: Option<u64>,
    pub evk_mode: EvkMode,
    /// Largest number of simultaneously resident towers.
    pub peak_resident_towers: usize,
}

impl TaskGraph {
    pub fn tower_bytes(&self) -> u64 {
        self.params.tower_bytes()
    }

    pub fn total_compute_ops(&self) -> u64 {
        self.tasks.iter().map(|t| t.ops).sum()
    }

    pub fn capacity_towers(&self) -> Option<usize> {
        self.onchip_capacity_bytes.map(|b| (b / self.tower_bytes()) as usize)
    }
}

fn assemble(
    params: &HksParams,
    dataflow: Dataflow,
    steps: &[schedule::Step],
    onchip_capacity: Option<u64>,
    evk_mode: EvkMode,
    stage_release: bool,
) -> Result<TaskGraph, GraphError> {
    let cfg = PlanConfig {
        capacity_towers: onchip_capacity.map(|b| (b / params.tower_bytes()) as usize),
        streamed: evk_mode == EvkMode::Streamed,
        degree_log2: params.degree_log2(),
        tower_bytes: params.tower_bytes(),
        window: EVICTION_WINDOW,
        stage_release: stage_release && onchip_capacity.is_none(),
    };
    let p = plan(steps, cfg)?;
    let memory_order = p.tasks.iter().filter(|t| t.kind.is_memory()).map(|t| t.id).collect();
    let compute_order = p.tasks.iter().filter(|t| !t.kind.is_memory()).map(|t| t.id).collect();
    Ok(TaskGraph {
        tasks: p.tasks,
        memory_order,
        compute_order,
        params: params.clone(),
        dataflow,
        onchip_capacity_bytes: onchip_capacity,
        evk_mode,
        peak_resident_towers: p.peak_resident,
    })
}

/// Max-parallel schedule. With unbounded memory each stage keeps its towers
/// resident until the stage completes.
pub fn build_mp(params: &HksParams, onchip_capacity: Option<u64>, evk_mode: EvkMode) -> Result<TaskGraph, GraphError> {
    assemble(params, Dataflow::Mp, &schedule::max_parallel(params), onchip_capacity, evk_mode, true)
}

/// Digit-centric schedule. Partial sums stay on-chip when the whole running-sum
/// schedule fits; otherwise partial products spill and are reduced after the
/// last digit. A single digit collapses to the max-parallel graph.
pub fn build_dc(params: &HksParams, onchip_capacity: Option<u64>, evk_mode: EvkMode) -> Result<TaskGraph, GraphError> {
    if params.dnum() == 1 {
        let mut g = build_mp(params, onchip_capacity, evk_mode)?;
        g.dataflow = Dataflow::Dc;
        return Ok(g);
    }
    let running = schedule::digit_centric(params, DcReduce::Running);
    let fits = match onchip_capacity {
        None => true,
        Some(cap) => {
            let unbounded = assemble(params, Dataflow::Dc, &running, None, evk_mode, false)?;
            unbounded.peak_resident_towers as u64 * params.tower_bytes() <= cap
        }
    };
    if fits {
        assemble(params, Dataflow::Dc, &running, onchip_capacity, evk_mode, false)
    } else {
        let deferred = schedule::digit_centric(params, DcReduce::Deferred);
        assemble(params, Dataflow::Dc, &deferred, onchip_capacity, evk_mode, false)
    }
}

/// Output-centric schedule.
pub fn build_oc(params: &HksParams, onchip_capacity: Option<u64>, evk_mode: EvkMode) -> Result<TaskGraph, GraphError> {
    assemble(params, Dataflow::Oc, &schedule::output_centric(params), onchip_capacity, evk_mode, false)
}

pub fn build(
    dataflow: Dataflow,
    params: &HksParams,
    onchip_capacity: Option<u64>,
    evk_mode: EvkMode,
) -> Result<TaskGraph, GraphError> {
    match dataflow {
        Dataflow::Mp => build_mp(params, onchip_capacity, evk_mode),
        Dataflow::Dc => build_dc(params, onchip_capacity, evk_mode),
        Dataflow::Oc => build_oc(params, onchip_capacity, evk_mode),
    }
}
