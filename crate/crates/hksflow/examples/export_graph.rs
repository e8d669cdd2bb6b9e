//! Writes a graph in text form, reads it back and simulates the imported
//! copy; the runtime matches the original.

use hksflow::bench::lookup;
use hksflow::graph::{build, export_graph, parse_graph, Dataflow, EvkMode, MB};
use hksflow::sim::{simulate, simulate_tasks, SimConfig};

fn main() -> anyhow::Result<()> {
    let p = lookup("DPRIVE").unwrap().params()?;
    let g = build(Dataflow::Oc, &p, Some(32 * MB), EvkMode::Streamed)?;
    let text = export_graph(&g);
    for line in text.lines().take(6) {
        println!("{line}");
    }
    println!("... {} lines", text.lines().count());
    let tasks = parse_graph(&text)?;
    let cfg = SimConfig::with_bandwidth(12.8);
    let a = simulate(&g, &cfg)?.runtime_ms;
    let b = simulate_tasks(&tasks, &cfg)?.runtime_ms;
    println!("runtime original {a:.6} ms, imported {b:.6} ms");
    Ok(())
}
