//! Lowest bandwidth at which OC keeps up with MP at 64 GB/s.

use hksflow::bench::{ocbase_rows, registry};
use hksflow::sim::SimConfig;

fn main() -> anyhow::Result<()> {
    let benches = registry();
    let rows = ocbase_rows(&benches, Some(32), &SimConfig::default())?;
    println!("{:<8}{:>10}{:>8}{:>10}{:>10}{:>9}   published", "", "OC_base", "saved", "OC ms", "MP ms", "speedup");
    for (r, b) in rows.iter().zip(&benches) {
        let p = b.published.unwrap();
        println!(
            "{:<8}{:>10.1}{:>7.2}x{:>10.3}{:>10.3}{:>8.2}x   {:.1} GB/s, {:.2}x",
            r.benchmark,
            r.oc_base_gbps.unwrap_or(f64::NAN),
            r.saved_bw.unwrap_or(f64::NAN),
            r.oc_ms.unwrap_or(f64::NAN),
            r.mp_ms.unwrap_or(f64::NAN),
            r.speedup.unwrap_or(f64::NAN),
            p.oc_base_gbps,
            p.speedup
        );
    }
    Ok(())
}
