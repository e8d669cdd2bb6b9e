//! DRAM traffic at 32 MB with streamed keys for all benchmarks, next to the
//! published numbers.

use hksflow::bench::{registry, traffic_records};
use hksflow::graph::{Dataflow, EvkMode};

fn main() -> anyhow::Result<()> {
    let benches = registry();
    let recs = traffic_records(&benches, &Dataflow::ALL, Some(32), EvkMode::Streamed)?;
    println!("{:<8}{:>22}{:>22}{:>22}", "", "MP", "DC", "OC");
    for b in &benches {
        let published = b.published.expect("registry entries carry reference values");
        let cells: Vec<String> = Dataflow::ALL
            .iter()
            .map(|&df| {
                let r = recs.iter().find(|r| r.benchmark == b.name && r.dataflow == df).unwrap();
                format!("{:.0} ({:.0}) ai {:.2}", r.dram_mb, published.dram_mb(df), r.ai)
            })
            .collect();
        println!("{:<8}{:>22}{:>22}{:>22}", b.name, cells[0], cells[1], cells[2]);
    }
    println!("(published values in parentheses)");
    Ok(())
}
