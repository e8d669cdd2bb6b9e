//! Cost of moving the evaluation keys off-chip: the bandwidth OC needs with
//! streamed keys to match the preloaded MP baseline.

use hksflow::bench::{registry, sram_saving, DATA_SRAM_MB, SRAM_TOTAL_MB};
use hksflow::graph::{build, Dataflow, EvkMode, MB};
use hksflow::sim::{evk_streaming_equivalent_bw, simulate, SimConfig, BASELINE_BW_GBPS};

fn main() -> anyhow::Result<()> {
    let cfg = SimConfig::default();
    println!("SRAM: {SRAM_TOTAL_MB} MB with keys, {DATA_SRAM_MB} MB without ({:.2}x)", sram_saving());
    for b in registry() {
        let p = b.params()?;
        let mp = build(Dataflow::Mp, &p, Some(32 * MB), EvkMode::Preloaded)?;
        let target = simulate(&mp, &cfg.bandwidth(BASELINE_BW_GBPS))?.runtime_ms;
        let bw = evk_streaming_equivalent_bw(&p, Dataflow::Oc, target, &cfg, Some(32 * MB))?;
        let quoted = b.published.and_then(|x| x.streamed_equiv_gbps).map_or(String::new(), |x| format!(" (published {x})"));
        match bw {
            Some(bw) => println!("{:<7} {:.3} ms baseline, streamed OC matches at {bw:.1} GB/s{quoted}", b.name, target),
            None => println!("{:<7} streamed OC never matches", b.name),
        }
    }
    Ok(())
}
