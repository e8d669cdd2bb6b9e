//! Independent replay of a planned graph's memory behaviour.

use std::collections::{HashMap, HashSet};

use super::{BufId, EvkMode, GraphError, TaskGraph, TaskKind};

/// For each task, the latest memory-queue and compute-queue task that must
/// finish before it starts (queues execute in id order).
fn happens_before(g: &TaskGraph) -> Vec<[Option<usize>; 2]> {
    let mut hb: Vec<[Option<usize>; 2]> = Vec::with_capacity(g.tasks.len());
    let mut last = [None, None];
    for t in &g.tasks {
        let q = usize::from(t.kind == TaskKind::Compute);
        let mut h = [None, None];
        let mut merge = |x: [Option<usize>; 2]| {
            for k in 0..2 {
                h[k] = h[k].max(x[k]);
            }
        };
        if let Some(p) = last[q] {
            merge(hb[p]);
        }
        for &d in &t.deps {
            merge(hb[d]);
        }
        h[q] = Some(t.id);
        last[q] = Some(t.id);
        hb.push(h);
    }
    hb
}

#[derive(Clone, Copy)]
struct Occupant {
    buf: BufId,
    /// Task that placed the value.
    writer: usize,
    /// Last task that touched the value.
    last: usize,
}

/// Checks that every compute finds its inputs on-chip, that no slot is
/// reused before its previous readers (and the store of dirty data) are
/// done, that spilled data is stored before it is reloaded, that slots stay
/// within capacity, and that every output tower reaches DRAM.
pub fn validate(g: &TaskGraph) -> Result<(), GraphError> {
    let bad = |id: usize, msg: String| Err(GraphError::Invalid(format!("task {id}: {msg}")));
    for (i, t) in g.tasks.iter().enumerate() {
        if t.id != i {
            return bad(i, format!("id {} out of place", t.id));
        }
        if let Some(&d) = t.deps.iter().find(|&&d| d >= i) {
            return bad(i, format!("dependency {d} does not precede it"));
        }
    }
    let hb = happens_before(g);
    let before = |a: usize, t: usize| {
        let q = usize::from(g.tasks[a].kind == TaskKind::Compute);
        hb[t][q].is_some_and(|x| x >= a)
    };
    let counts = |b: &BufId| g.evk_mode == EvkMode::Streamed || !b.is_evk();
    let mut uses: HashMap<BufId, Vec<usize>> = HashMap::new();
    for t in &g.tasks {
        if t.kind == TaskKind::Compute {
            for b in &t.buffers_in {
                uses.entry(*b).or_default().push(t.id);
            }
        }
    }
    let used_after = |b: &BufId, t: usize| uses.get(b).is_some_and(|u| u.iter().any(|&x| x > t));

    let cap = g.capacity_towers();
    let mut slots: HashMap<u32, Occupant> = HashMap::new();
    let mut where_: HashMap<BufId, u32> = HashMap::new();
    let mut dirty: HashSet<BufId> = HashSet::new();
    // Buffers with a current DRAM copy, and the store that wrote it.
    let mut dram: HashMap<BufId, Option<usize>> = HashMap::new();
    let mut stored_outputs = 0usize;

    let place = |slots: &mut HashMap<u32, Occupant>,
                     where_: &mut HashMap<BufId, u32>,
                     dirty: &HashSet<BufId>,
                     s: u32,
                     buf: BufId,
                     t: usize|
     -> Result<(), GraphError> {
        if cap.is_some_and(|c| s as usize >= c) {
            return bad(t, format!("slot {s} exceeds capacity of {} towers", cap.unwrap_or(0)));
        }
        if let Some(old) = slots.get(&s).copied() {
            if old.buf != buf && where_.get(&old.buf) == Some(&s) {
                if old.last != t && !before(old.last, t) {
                    return bad(t, format!("overwrites slot {s} before task {} is done with it", old.last));
                }
                if dirty.contains(&old.buf) && used_after(&old.buf, t) {
                    return bad(t, format!("overwrites unsaved {:?} that is still needed", old.buf));
                }
                where_.remove(&old.buf);
            }
        }
        if let Some(prev) = where_.insert(buf, s) {
            if prev != s {
                slots.remove(&prev);
            }
        }
        slots.insert(s, Occupant { buf, writer: t, last: t });
        Ok(())
    };

    for t in &g.tasks {
        match t.kind {
            TaskKind::Load => {
                let (&b, &s) = match (t.buffers_out.first(), t.slots.first()) {
                    (Some(b), Some(s)) => (b, s),
                    _ => return bad(t.id, "load without buffer or slot".into()),
                };
                if !b.is_external() {
                    match dram.get(&b) {
                        Some(Some(st)) if before(*st, t.id) => {}
                        Some(Some(st)) => return bad(t.id, format!("reloads {b:?} before store {st} finishes")),
                        _ => return bad(t.id, format!("loads {b:?} which was never stored")),
                    }
                }
                if where_.contains_key(&b) {
                    return bad(t.id, format!("loads {b:?} which is already resident"));
                }
                place(&mut slots, &mut where_, &dirty, s, b, t.id)?;
                dirty.remove(&b);
            }
            TaskKind::Store => {
                let (&b, &s) = match (t.buffers_in.first(), t.slots.first()) {
                    (Some(b), Some(s)) => (b, s),
                    _ => return bad(t.id, "store without buffer or slot".into()),
                };
                let occ = match slots.get_mut(&s) {
                    Some(o) if o.buf == b && where_.get(&b) == Some(&s) => o,
                    _ => return bad(t.id, format!("stores {b:?} which is not in slot {s}")),
                };
                if !before(occ.writer, t.id) {
                    return bad(t.id, format!("stores {b:?} before task {} produced it", occ.writer));
                }
                occ.last = t.id;
                dirty.remove(&b);
                dram.insert(b, Some(t.id));
                if b.is_output() {
                    stored_outputs += 1;
                }
            }
            TaskKind::Compute => {
                for b in t.buffers_in.iter().filter(|b| counts(b)) {
                    let Some(&s) = where_.get(b) else {
                        return bad(t.id, format!("input {b:?} is not resident"));
                    };
                    let occ = slots.get_mut(&s).expect("slot map is consistent");
                    if !before(occ.writer, t.id) {
                        return bad(t.id, format!("reads {b:?} before task {} produced it", occ.writer));
                    }
                    occ.last = t.id;
                }
                if t.slots.len() != t.buffers_out.len() {
                    return bad(t.id, "one slot per output expected".into());
                }
                for (&b, &s) in t.buffers_out.iter().zip(&t.slots) {
                    place(&mut slots, &mut where_, &dirty, s, b, t.id)?;
                    dirty.insert(b);
                    dram.remove(&b);
                }
            }
        }
    }
    let expected = 2 * g.params.num_q_towers();
    if stored_outputs != expected {
        return Err(GraphError::Invalid(format!("{stored_outputs} output towers stored, expected {expected}")));
    }
    Ok(())
}
