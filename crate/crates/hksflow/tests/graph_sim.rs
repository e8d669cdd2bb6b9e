//! Task graphs and the simulator on the registry benchmarks.

use hksflow::bench::{lookup, registry};
use hksflow::graph::{build, summarize_traffic, validate, Dataflow, EvkMode, GraphError, TaskKind, MB};
use hksflow::hks::{count_ops, HksParams};
use hksflow::sim::{simulate, simulate_tasks, SimConfig, SimError};

const CAP: Option<u64> = Some(32 * MB);

#[test]
fn registry_graphs_validate_and_conserve_ops() {
    for b in registry() {
        let p = b.params().unwrap();
        for df in Dataflow::ALL {
            for evk in [EvkMode::Preloaded, EvkMode::Streamed] {
                let g = build(df, &p, CAP, evk).unwrap();
                validate(&g).unwrap_or_else(|e| panic!("{} {df} {evk}: {e}", b.name));
                assert_eq!(g.total_compute_ops(), count_ops(&p).total(), "{} {df}", b.name);
                assert!(g.peak_resident_towers <= g.capacity_towers().unwrap());
            }
        }
    }
}

#[test]
fn traffic_orders_oc_below_dc_below_mp() {
    for b in registry() {
        let p = b.params().unwrap();
        let t: Vec<f64> =
            Dataflow::ALL.iter().map(|&df| summarize_traffic(&build(df, &p, CAP, EvkMode::Streamed).unwrap()).dram_mb()).collect();
        assert!(t[2] <= t[1] && t[1] <= t[0], "{}: {t:?}", b.name);
    }
}

#[test]
fn single_digit_dc_is_mp() {
    let p = lookup("BTS1").unwrap().params().unwrap();
    let mp = build(Dataflow::Mp, &p, CAP, EvkMode::Streamed).unwrap();
    let dc = build(Dataflow::Dc, &p, CAP, EvkMode::Streamed).unwrap();
    assert_eq!(mp.tasks, dc.tasks);
    assert_eq!(dc.dataflow, Dataflow::Dc);
}

#[test]
fn preloaded_keys_cost_no_traffic() {
    let p = lookup("ARK").unwrap().params().unwrap();
    for df in Dataflow::ALL {
        let pre = summarize_traffic(&build(df, &p, CAP, EvkMode::Preloaded).unwrap());
        let st = summarize_traffic(&build(df, &p, CAP, EvkMode::Streamed).unwrap());
        assert_eq!(pre.dram_bytes_evk, 0);
        assert!(st.dram_bytes_evk >= p.evk_bytes(), "{df}: every key tower loaded at least once");
        assert_eq!(st.dram_bytes_total, st.dram_bytes_evk + st.dram_bytes_data);
    }
}

#[test]
fn unbounded_memory_moves_only_compulsory_data() {
    let p = lookup("DPRIVE").unwrap().params().unwrap();
    for df in Dataflow::ALL {
        let t = summarize_traffic(&build(df, &p, None, EvkMode::Preloaded).unwrap());
        assert_eq!(t.dram_bytes_total, p.input_bytes() + p.output_bytes(), "{df}");
    }
}

#[test]
fn too_small_memory_is_infeasible() {
    let p = HksParams::new(12, 12, 4, 2).unwrap();
    let err = build(Dataflow::Mp, &p, Some(3 * p.tower_bytes()), EvkMode::Streamed).unwrap_err();
    assert!(matches!(err, GraphError::Infeasible { capacity_towers: 3, .. }), "{err}");
}

#[test]
fn simulated_bytes_match_the_graph() {
    let p = lookup("BTS2").unwrap().params().unwrap();
    for df in Dataflow::ALL {
        let g = build(df, &p, CAP, EvkMode::Streamed).unwrap();
        let r = simulate(&g, &SimConfig::with_bandwidth(32.0)).unwrap();
        let t = summarize_traffic(&g);
        assert!((r.dram_mb - t.dram_mb()).abs() < 1e-9);
        assert!((r.arithmetic_intensity - t.arithmetic_intensity).abs() < 1e-12);
        let ops: u64 = r.per_kernel.iter().map(|k| k.ops).sum();
        assert_eq!(ops, g.total_compute_ops());
    }
}

#[test]
fn runtime_is_at_least_the_memory_time() {
    let p = lookup("BTS3").unwrap().params().unwrap();
    let g = build(Dataflow::Oc, &p, CAP, EvkMode::Streamed).unwrap();
    for bw in [8.0, 64.0, 1024.0] {
        let r = simulate(&g, &SimConfig::with_bandwidth(bw)).unwrap();
        let bytes: u64 = g.tasks.iter().filter(|t| t.kind.is_memory()).map(|t| t.bytes).sum();
        assert!(r.runtime_ms * 1e-3 * bw * (1u64 << 30) as f64 >= bytes as f64 * (1.0 - 1e-12));
    }
}

#[test]
fn more_modops_never_slows_down() {
    let p = lookup("ARK").unwrap().params().unwrap();
    for df in Dataflow::ALL {
        let g = build(df, &p, CAP, EvkMode::Preloaded).unwrap();
        let mut prev = f64::INFINITY;
        for m in [1.0, 2.0, 4.0, 8.0, 16.0] {
            let t = simulate(&g, &SimConfig::with_bandwidth(25.6).modops(m)).unwrap().runtime_ms;
            assert!(t <= prev * (1.0 + 1e-12), "{df} at {m}x");
            prev = t;
        }
    }
}

#[test]
fn cyclic_tasks_are_rejected() {
    let p = HksParams::new(4, 2, 1, 1).unwrap();
    let mut tasks = build(Dataflow::Oc, &p, None, EvkMode::Preloaded).unwrap().tasks;
    let last = tasks.len() - 1;
    tasks[0].deps.push(last);
    assert!(matches!(simulate_tasks(&tasks, &SimConfig::default()), Err(SimError::Cycle(_) | SimError::MissingDep { .. })));
}

#[test]
fn stores_follow_their_producers() {
    let p = lookup("ARK").unwrap().params().unwrap();
    let g = build(Dataflow::Dc, &p, CAP, EvkMode::Streamed).unwrap();
    for t in g.tasks.iter().filter(|t| t.kind == TaskKind::Store) {
        assert!(!t.deps.is_empty() && t.deps.iter().all(|&d| d < t.id));
    }
}
