//! Runtime against off-chip bandwidth for each dataflow, ARK by default,
//! out to 1 TB/s where OC flattens.

use hksflow::bench::lookup;
use hksflow::graph::{Dataflow, EvkMode, MB};
use hksflow::sim::{sweep_bandwidth, SimConfig};

fn main() -> anyhow::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "ARK".into());
    let p = lookup(&name).ok_or_else(|| anyhow::anyhow!("unknown benchmark {name}"))?.params()?;
    let bws = [8.0, 12.8, 25.6, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0];
    let pts = sweep_bandwidth(&p, &Dataflow::ALL, &bws, &SimConfig::default(), Some(32 * MB), EvkMode::Preloaded)?;
    println!("{name}, preloaded keys, 32 MB: runtime ms (compute idle)");
    println!("{:>8} {:>18} {:>18} {:>18}", "GB/s", "mp", "dc", "oc");
    for &bw in &bws {
        let cell = |df| {
            let r = &pts.iter().find(|x| x.dataflow == df && x.bandwidth_gbps == bw).unwrap().result;
            format!("{:.3} ({:.2})", r.runtime_ms, r.idle_fraction)
        };
        println!("{bw:>8} {:>18} {:>18} {:>18}", cell(Dataflow::Mp), cell(Dataflow::Dc), cell(Dataflow::Oc));
    }
    Ok(())
}
