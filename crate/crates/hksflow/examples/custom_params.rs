//! Explores a parameter set that is not in the registry, as `--config` would.

use hksflow::bench::{parse_config, traffic_records};
use hksflow::graph::{Dataflow, EvkMode};
use hksflow::hks::count_ops;

fn main() -> anyhow::Result<()> {
    let json = r#"[
        {"name": "small", "logN": 15, "k_l": 12, "k_p": 4, "dnum": 3},
        {"name": "wide",  "logN": 16, "k_l": 30, "k_p": 10, "dnum": 3}
    ]"#;
    let benches = parse_config(json)?;
    for b in &benches {
        let ops = count_ops(&b.params()?);
        println!("{}: evk {:.1} MB, {} modular ops per key switch", b.name, b.evk_mb(), ops.total());
        for (stage, s) in ops.stages() {
            println!("    {stage:<14} {:>12}", s.total());
        }
    }
    for r in traffic_records(&benches, &Dataflow::ALL, Some(16), EvkMode::Streamed)? {
        println!("{} {} at 16 MB: {:.0} MB, AI {:.2}", r.benchmark, r.dataflow, r.dram_mb, r.ai);
    }
    Ok(())
}
