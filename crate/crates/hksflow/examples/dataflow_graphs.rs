//! Builds the three dataflow graphs for one benchmark and shows how their
//! task mix, traffic and working set differ.

use hksflow::bench::lookup;
use hksflow::graph::{build, summarize_traffic, validate, Dataflow, EvkMode, Kernel, TaskKind, MB};

fn main() -> anyhow::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "ARK".into());
    let b = lookup(&name).ok_or_else(|| anyhow::anyhow!("unknown benchmark {name}"))?;
    let p = b.params()?;
    println!("{}: N=2^{} k_l={} k_p={} dnum={} alpha={}", b.name, b.degree_log2, b.k_l, b.k_p, b.dnum, b.alpha());
    for df in Dataflow::ALL {
        let g = build(df, &p, Some(32 * MB), EvkMode::Streamed)?;
        validate(&g)?;
        let t = summarize_traffic(&g);
        let count = |k: TaskKind| g.tasks.iter().filter(|t| t.kind == k).count();
        let kernels: Vec<String> = Kernel::ALL
            .iter()
            .map(|k| format!("{k}={}", g.tasks.iter().filter(|t| t.kernel == Some(*k)).count()))
            .collect();
        println!(
            "{df}: {} loads, {} stores, {} computes ({})",
            count(TaskKind::Load),
            count(TaskKind::Store),
            count(TaskKind::Compute),
            kernels.join(" ")
        );
        println!(
            "    dram {:.0} MB (keys {:.0}, data {:.0}), AI {:.3}, peak {} of 32 MB",
            t.dram_mb(),
            t.dram_bytes_evk as f64 / MB as f64,
            t.dram_bytes_data as f64 / MB as f64,
            t.arithmetic_intensity,
            t.peak_working_set_bytes / MB
        );
        let unbounded = summarize_traffic(&build(df, &p, None, EvkMode::Streamed)?);
        println!("    unbounded working set {} MB", unbounded.peak_working_set_bytes / MB);
    }
    Ok(())
}
