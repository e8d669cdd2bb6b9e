//! Tower-granular on-chip memory planning of a compute schedule.
//!
//! The schedule is static, so replacement is Belady: evict the resident buffer
//! whose next use is farthest away, preferring clean buffers on ties. Dirty
//! buffers produced by the last few compute tasks are passed over while any
//! other candidate exists, which keeps freshly produced data on-chip long
//! enough for the memory queue to run ahead of compute. Dead buffers are
//! dropped without traffic; a compute output may take over the slot of an
//! input that dies at that task.

use std::collections::HashMap;

use indexmap::IndexMap;

use super::schedule::Step;
use super::{BufId, GraphError, Task, TaskKind};

/// Compute tasks whose dirty outputs are protected from eviction.
pub const EVICTION_WINDOW: usize = 10;

#[derive(Clone, Copy, Debug)]
pub(crate) struct PlanConfig {
    pub capacity_towers: Option<usize>,
    pub streamed: bool,
    pub degree_log2: u32,
    pub tower_bytes: u64,
    pub window: usize,
    /// Release dead buffers only at stage boundaries (unbounded memory only).
    pub stage_release: bool,
}

pub(crate) struct Plan {
    pub tasks: Vec<Task>,
    pub peak_resident: usize,
}

struct Resident {
    dirty: bool,
    slot: u32,
    readers: Vec<usize>,
    producer: usize,
    compute_ordinal: Option<usize>,
    last_stage: u32,
}

struct Planner<'a> {
    cfg: PlanConfig,
    steps: &'a [Step],
    uses: HashMap<BufId, Vec<usize>>,
    tasks: Vec<Task>,
    res: IndexMap<BufId, Resident>,
    free_slots: Vec<u32>,
    next_slot: u32,
    slot_free_deps: HashMap<u32, Vec<usize>>,
    last_store: HashMap<BufId, usize>,
    computes: usize,
    peak: usize,
}

const NEVER: usize = usize::MAX;

impl<'a> Planner<'a> {
    fn next_use(&self, b: &BufId, from: usize) -> usize {
        match self.uses.get(b) {
            Some(u) => {
                let k = u.partition_point(|&x| x < from);
                u.get(k).copied().unwrap_or(NEVER)
            }
            None => NEVER,
        }
    }

    fn counts(&self, b: &BufId) -> bool {
        self.cfg.streamed || !b.is_evk()
    }

    fn emit(&mut self, kind: TaskKind, buf: BufId, slot: u32, mut deps: Vec<usize>) -> usize {
        let id = self.tasks.len();
        deps.sort_unstable();
        deps.dedup();
        let (buffers_in, buffers_out) = match kind {
            TaskKind::Store => (vec![buf], vec![]),
            _ => (vec![], vec![buf]),
        };
        self.tasks.push(Task {
            id,
            kind,
            kernel: None,
            bytes: self.cfg.tower_bytes,
            ops: 0,
            deps,
            buffers_in,
            buffers_out,
            slots: vec![slot],
        });
        id
    }

    fn get_slot(&mut self) -> u32 {
        if self.cfg.capacity_towers.is_some() {
            self.free_slots.pop().expect("eviction keeps a slot free")
        } else {
            self.next_slot += 1;
            self.next_slot
        }
    }

    fn release(&mut self, b: BufId, now: usize) {
        let r = self.res.shift_remove(&b).expect("released buffer is resident");
        let mut deps = r.readers;
        if r.dirty && self.next_use(&b, now) != NEVER {
            let st = self.emit(TaskKind::Store, b, r.slot, deps);
            self.last_store.insert(b, st);
            deps = vec![st];
        }
        self.slot_free_deps.insert(r.slot, deps);
        if self.cfg.capacity_towers.is_some() {
            self.free_slots.push(r.slot);
        }
    }

    fn victim(&self, protected: &[BufId], i: usize) -> Option<BufId> {
        let mut best: Option<((u8, usize, u8), BufId)> = None;
        for (b, r) in &self.res {
            if protected.contains(b) {
                continue;
            }
            let recent = r.dirty && r.compute_ordinal.is_some_and(|c| self.computes - c < self.cfg.window);
            let key = (u8::from(!recent), self.next_use(b, i), u8::from(!r.dirty));
            if best.as_ref().is_none_or(|(k, _)| key > *k) {
                best = Some((key, *b));
            }
        }
        best.map(|(_, b)| b)
    }

    fn step(&mut self, i: usize) -> Result<(), GraphError> {
        let step = &self.steps[i];
        let need: Vec<BufId> = step.ins.iter().copied().filter(|b| self.counts(b)).collect();
        let missing: Vec<BufId> = need.iter().copied().filter(|b| !self.res.contains_key(b)).collect();
        let new_outs: Vec<BufId> =
            step.outs.iter().copied().filter(|b| !self.res.contains_key(b) && !missing.contains(b)).collect();

        let dead: Vec<BufId> = self
            .res
            .iter()
            .filter(|(b, r)| {
                self.next_use(b, i) == NEVER
                    && !step.outs.contains(b)
                    && (!self.cfg.stage_release || r.last_stage < step.stage)
            })
            .map(|(b, _)| *b)
            .collect();
        for b in dead {
            self.release(b, i);
        }

        let protected: Vec<BufId> = need.iter().chain(&step.outs).copied().collect();
        let dying: Vec<BufId> =
            need.iter().copied().filter(|b| self.next_use(b, i + 1) == NEVER && !step.outs.contains(b)).collect();
        // Under stage liveness an input stays allocated until its stage ends.
        let in_place = if self.cfg.stage_release { 0 } else { dying.len().min(new_outs.len()) };
        if let Some(cap) = self.cfg.capacity_towers {
            while self.res.len() + missing.len() + new_outs.len() - in_place > cap {
                let v = self.victim(&protected, i).ok_or(GraphError::Infeasible {
                    capacity_towers: cap,
                    required_towers: need.len() + new_outs.len() - in_place,
                })?;
                self.release(v, i);
            }
        }

        let stage = step.stage;
        let mut deps = Vec::new();
        for &b in &missing {
            debug_assert!(b.is_external() || self.last_store.contains_key(&b), "{b:?} loaded before any store");
            let s = self.get_slot();
            let mut d = self.slot_free_deps.remove(&s).unwrap_or_default();
            if let Some(&st) = self.last_store.get(&b) {
                d.push(st);
            }
            let ld = self.emit(TaskKind::Load, b, s, d);
            self.res.insert(b, Resident {
                dirty: false,
                slot: s,
                readers: vec![ld],
                producer: ld,
                compute_ordinal: None,
                last_stage: stage,
            });
            deps.push(ld);
        }
        for b in &need {
            if !missing.contains(b) {
                deps.push(self.res[b].producer);
            }
        }
        let mut takeover = Vec::new();
        for (n, &b) in new_outs.iter().enumerate() {
            let slot = if n < in_place {
                takeover.push((b, dying[n]));
                u32::MAX
            } else {
                let s = self.get_slot();
                deps.extend(self.slot_free_deps.remove(&s).unwrap_or_default());
                s
            };
            self.res.insert(b, Resident {
                dirty: true,
                slot,
                readers: vec![],
                producer: 0,
                compute_ordinal: None,
                last_stage: stage,
            });
        }

        let ci = self.tasks.len();
        deps.sort_unstable();
        deps.dedup();
        let kernel = step.kernel;
        self.tasks.push(Task {
            id: ci,
            kind: TaskKind::Compute,
            kernel: Some(kernel),
            bytes: 0,
            ops: kernel.ops(self.cfg.degree_log2, step.ins.len()),
            deps,
            buffers_in: step.ins.clone(),
            buffers_out: step.outs.clone(),
            slots: vec![],
        });
        let ordinal = self.computes;
        self.computes += 1;
        for b in &need {
            if let Some(r) = self.res.get_mut(b) {
                r.readers = vec![ci];
                r.last_stage = stage;
            }
        }
        for (b, dv) in takeover {
            let slot = self.res.shift_remove(&dv).expect("dying input is resident").slot;
            self.res[&b].slot = slot;
        }
        let outs = step.outs.clone();
        for b in &outs {
            let r = &mut self.res[b];
            r.dirty = true;
            r.readers = vec![ci];
            r.producer = ci;
            r.compute_ordinal = Some(ordinal);
            r.last_stage = stage;
        }
        self.tasks[ci].slots = outs.iter().map(|b| self.res[b].slot).collect();
        self.peak = self.peak.max(self.res.len());
        for b in outs.into_iter().filter(|b| b.is_output()) {
            let r = self.res.shift_remove(&b).expect("output is resident");
            let st = self.emit(TaskKind::Store, b, r.slot, vec![ci]);
            self.slot_free_deps.insert(r.slot, vec![st]);
            if self.cfg.capacity_towers.is_some() {
                self.free_slots.push(r.slot);
            }
        }
        Ok(())
    }
}

pub(crate) fn plan(steps: &[Step], cfg: PlanConfig) -> Result<Plan, GraphError> {
    let mut uses: HashMap<BufId, Vec<usize>> = HashMap::new();
    for (i, s) in steps.iter().enumerate() {
        for b in &s.ins {
            uses.entry(*b).or_default().push(i);
        }
    }
    let free_slots = match cfg.capacity_towers {
        Some(c) => (0..c as u32).rev().collect(),
        None => Vec::new(),
    };
    let mut p = Planner {
        cfg,
        steps,
        uses,
        tasks: Vec::with_capacity(steps.len() * 2),
        res: IndexMap::new(),
        free_slots,
        next_slot: 0,
        slot_free_deps: HashMap::new(),
        last_store: HashMap::new(),
        computes: 0,
        peak: 0,
    };
    for i in 0..steps.len() {
        p.step(i)?;
    }
    Ok(Plan { tasks: p.tasks, peak_resident: p.peak })
}
