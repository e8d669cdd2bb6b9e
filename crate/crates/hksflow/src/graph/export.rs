//! Line-oriented text form of a task graph:
//!
//! ```text
//! task <id> <kind> <kernel|-> <bytes> <ops> deps=<id,...>
//! ```
//!
//! Lines starting with `#` are comments. Buffer and slot annotations are not
//! part of the format, so an imported graph cannot tell key loads from data
//! loads.

use std::fmt::Write as _;
use std::io;

use super::{GraphError, Kernel, Task, TaskGraph, TaskKind};

fn line(t: &Task) -> String {
    let deps = t.deps.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",");
    let kernel = t.kernel.map_or("-", |k| k.name());
    format!("task {} {} {} {} {} deps={}", t.id, t.kind.name(), kernel, t.bytes, t.ops, deps)
}

pub fn export_graph(g: &TaskGraph) -> String {
    let mut s = String::new();
    let p = &g.params;
    let cap = g.onchip_capacity_bytes.map_or("unbounded".to_string(), |b| b.to_string());
    let _ = writeln!(
        s,
        "# dataflow={} logN={} k_l={} k_p={} dnum={} evk={} onchip_bytes={}",
        g.dataflow,
        p.degree_log2(),
        p.num_q_towers(),
        p.num_p_towers(),
        p.dnum(),
        g.evk_mode,
        cap
    );
    for t in &g.tasks {
        s.push_str(&line(t));
        s.push('\n');
    }
    s
}

pub fn write_graph<W: io::Write>(g: &TaskGraph, mut w: W) -> io::Result<()> {
    w.write_all(export_graph(g).as_bytes())
}

/// Parses the text form back into tasks. Ids must be dense and in order and
/// every dependency must point to an earlier task.
pub fn parse_graph(text: &str) -> Result<Vec<Task>, GraphError> {
    let mut tasks = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let err = |msg: String| GraphError::Parse { line: n + 1, msg };
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 7 || f[0] != "task" {
            return Err(err(format!("expected 7 fields starting with `task`, got `{l}`")));
        }
        let num = |s: &str, what: &str| s.parse::<u64>().map_err(|_| err(format!("bad {what} `{s}`")));
        let id = num(f[1], "id")? as usize;
        if id != tasks.len() {
            return Err(err(format!("task id {id} out of order, expected {}", tasks.len())));
        }
        let kind: TaskKind = f[2].parse().map_err(err)?;
        let kernel = match f[3] {
            "-" => None,
            k => Some(k.parse::<Kernel>().map_err(err)?),
        };
        if kernel.is_some() != (kind == TaskKind::Compute) {
            return Err(err("only compute tasks carry a kernel".into()));
        }
        let bytes = num(f[4], "bytes")?;
        let ops = num(f[5], "ops")?;
        let list = f[6].strip_prefix("deps=").ok_or_else(|| err(format!("expected deps=, got `{}`", f[6])))?;
        let mut deps = Vec::new();
        for d in list.split(',').filter(|d| !d.is_empty()) {
            let d = num(d, "dependency")? as usize;
            if d >= id {
                return Err(err(format!("dependency {d} does not precede task {id}")));
            }
            deps.push(d);
        }
        tasks.push(Task {
            id,
            kind,
            kernel,
            bytes,
            ops,
            deps,
            buffers_in: vec![],
            buffers_out: vec![],
            slots: vec![],
        });
    }
    Ok(tasks)
}
