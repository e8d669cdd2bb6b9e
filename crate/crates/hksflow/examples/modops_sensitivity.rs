//! ARK with more modular-arithmetic throughput: where each dataflow stops
//! being bandwidth bound.

use hksflow::bench::lookup;
use hksflow::graph::{build, Dataflow, EvkMode, MB};
use hksflow::sim::{equivalent_bandwidth, simulate, sweep_modops, SimConfig};

fn main() -> anyhow::Result<()> {
    let p = lookup("ARK").unwrap().params()?;
    let cfg = SimConfig::default();
    let cap = Some(32 * MB);
    let bws = [8.0, 12.8, 25.6, 64.0, 128.0, 256.0];
    let mods = [1.0, 2.0, 4.0, 8.0, 16.0];
    let pts = sweep_modops(&p, Dataflow::Oc, &bws, &mods, &cfg, cap, EvkMode::Preloaded)?;
    print!("{:>8}", "GB/s");
    for m in mods {
        print!("{:>10}", format!("{m}x"));
    }
    println!();
    for bw in bws {
        print!("{bw:>8}");
        for m in mods {
            let r = pts.iter().find(|x| x.bandwidth_gbps == bw && x.modops_mult == m).unwrap();
            print!("{:>10.3}", r.result.runtime_ms);
        }
        println!();
    }

    let oc = build(Dataflow::Oc, &p, cap, EvkMode::Preloaded)?;
    let sat = simulate(&oc, &cfg.bandwidth(128.0))?.runtime_ms;
    println!("saturation (OC, 128 GB/s, 1x): {sat:.3} ms");
    for df in Dataflow::ALL {
        let g = build(df, &p, cap, EvkMode::Preloaded)?;
        let bw = equivalent_bandwidth(&g, sat, &cfg.modops(2.0))?;
        println!("  {df} at 2x needs {}", bw.map_or("more than 4 TB/s".into(), |b| format!("{b:.1} GB/s")));
    }
    Ok(())
}
