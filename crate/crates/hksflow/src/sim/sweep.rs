//! Bandwidth and throughput sweeps, and the searches built on them.

use rayon::prelude::*;

use crate::graph::{build, Dataflow, EvkMode, TaskGraph};
use crate::hks::HksParams;

use super::{simulate, SimConfig, SimError, SimResult};

/// Baseline configuration: MP at this bandwidth with preloaded keys.
pub const BASELINE_BW_GBPS: f64 = 64.0;
pub const OC_BASE_GRID: [f64; 5] = [8.0, 12.8, 25.6, 32.0, 64.0];
/// Points tried after [`OC_BASE_GRID`] is exhausted.
pub const EXTENDED_GRID: [f64; 4] = [128.0, 256.0, 512.0, 1024.0];

const SEARCH_LO: f64 = 1.0;
const SEARCH_HI: f64 = 4096.0;
/// A runtime within this fraction of the target counts as a match.
const MATCH_TOL: f64 = 0.02;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub dataflow: Dataflow,
    pub bandwidth_gbps: f64,
    pub modops_mult: f64,
    pub result: SimResult,
}

/// One simulation per (dataflow, bandwidth), graphs built once per dataflow.
/// Output is ordered by dataflow, then by bandwidth as given.
pub fn sweep_bandwidth(
    params: &HksParams,
    dataflows: &[Dataflow],
    bw_list: &[f64],
    cfg: &SimConfig,
    onchip: Option<u64>,
    evk: EvkMode,
) -> Result<Vec<SweepPoint>, SimError> {
    sweep_modops_multi(params, dataflows, bw_list, &[cfg.modops_mult], cfg, onchip, evk)
}

/// Cross product of bandwidths and MODOPS multipliers for one dataflow.
pub fn sweep_modops(
    params: &HksParams,
    dataflow: Dataflow,
    bw_list: &[f64],
    modops_list: &[f64],
    cfg: &SimConfig,
    onchip: Option<u64>,
    evk: EvkMode,
) -> Result<Vec<SweepPoint>, SimError> {
    sweep_modops_multi(params, &[dataflow], bw_list, modops_list, cfg, onchip, evk)
}

fn sweep_modops_multi(
    params: &HksParams,
    dataflows: &[Dataflow],
    bw_list: &[f64],
    modops_list: &[f64],
    cfg: &SimConfig,
    onchip: Option<u64>,
    evk: EvkMode,
) -> Result<Vec<SweepPoint>, SimError> {
    let mut out = Vec::new();
    for &df in dataflows {
        let g = build(df, params, onchip, evk)?;
        let pts: Vec<(f64, f64)> =
            bw_list.iter().flat_map(|&bw| modops_list.iter().map(move |&m| (bw, m))).collect();
        let res = pts
            .par_iter()
            .map(|&(bw, m)| {
                let r = simulate(&g, &cfg.bandwidth(bw).modops(m))?;
                Ok(SweepPoint { dataflow: df, bandwidth_gbps: bw, modops_mult: m, result: r })
            })
            .collect::<Result<Vec<_>, SimError>>()?;
        out.extend(res);
    }
    Ok(out)
}

/// First bandwidth of `grid` at which `g` runs no slower than `target_ms`.
pub fn first_matching_bandwidth(
    g: &TaskGraph,
    target_ms: f64,
    grid: &[f64],
    cfg: &SimConfig,
) -> Result<Option<f64>, SimError> {
    for &bw in grid {
        if simulate(g, &cfg.bandwidth(bw))?.runtime_ms <= target_ms {
            return Ok(Some(bw));
        }
    }
    Ok(None)
}

/// Smallest bandwidth (to within bisection precision) at which `g` comes
/// within 2% of `target_ms`. `None` if even 4 TB/s is not enough.
pub fn equivalent_bandwidth(g: &TaskGraph, target_ms: f64, cfg: &SimConfig) -> Result<Option<f64>, SimError> {
    let limit = target_ms * (1.0 + MATCH_TOL);
    let ok = |bw: f64| -> Result<bool, SimError> { Ok(simulate(g, &cfg.bandwidth(bw))?.runtime_ms <= limit) };
    if !ok(SEARCH_HI)? {
        return Ok(None);
    }
    if ok(SEARCH_LO)? {
        return Ok(Some(SEARCH_LO));
    }
    let (mut lo, mut hi) = (SEARCH_LO, SEARCH_HI);
    // Geometric bisection; 30 halvings of a 12-octave range leave < 0.01% error.
    for _ in 0..30 {
        let mid = (lo * hi).sqrt();
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Bandwidth at which `dataflow` with streamed keys matches `target_ms`.
pub fn evk_streaming_equivalent_bw(
    params: &HksParams,
    dataflow: Dataflow,
    target_ms: f64,
    cfg: &SimConfig,
    onchip: Option<u64>,
) -> Result<Option<f64>, SimError> {
    let g = build(dataflow, params, onchip, EvkMode::Streamed)?;
    equivalent_bandwidth(&g, target_ms, cfg)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OcBase {
    /// Smallest grid bandwidth where the candidate matches the baseline.
    pub bandwidth_gbps: Option<f64>,
    pub baseline_ms: f64,
    /// Candidate runtime at `bandwidth_gbps`.
    pub runtime_ms: Option<f64>,
}

impl OcBase {
    /// Baseline bandwidth over the matching bandwidth.
    pub fn saved_factor(&self) -> Option<f64> {
        self.bandwidth_gbps.map(|b| BASELINE_BW_GBPS / b)
    }
}

/// Searches the OC_base grid, then its extensions, for the first bandwidth at
/// which `candidate` is no slower than `baseline` at 64 GB/s. Both use
/// preloaded keys.
pub fn find_oc_base(
    params: &HksParams,
    baseline: Dataflow,
    candidate: Dataflow,
    cfg: &SimConfig,
    onchip: Option<u64>,
) -> Result<OcBase, SimError> {
    let base_g = build(baseline, params, onchip, EvkMode::Preloaded)?;
    let baseline_ms = simulate(&base_g, &cfg.bandwidth(BASELINE_BW_GBPS))?.runtime_ms;
    let g = if baseline == candidate { base_g } else { build(candidate, params, onchip, EvkMode::Preloaded)? };
    let grid: Vec<f64> = OC_BASE_GRID.iter().chain(&EXTENDED_GRID).copied().collect();
    let bw = first_matching_bandwidth(&g, baseline_ms, &grid, cfg)?;
    let runtime_ms = match bw {
        Some(b) => Some(simulate(&g, &cfg.bandwidth(b))?.runtime_ms),
        None => None,
    };
    Ok(OcBase { bandwidth_gbps: bw, baseline_ms, runtime_ms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> HksParams {
        HksParams::new(10, 8, 2, 2).unwrap()
    }

    #[test]
    fn sweep_orders_points_and_covers_the_grid() {
        let pts = sweep_bandwidth(&small(), &Dataflow::ALL, &[8.0, 64.0], &SimConfig::default(), None, EvkMode::Streamed)
            .unwrap();
        let keys: Vec<_> = pts.iter().map(|p| (p.dataflow, p.bandwidth_gbps)).collect();
        assert_eq!(keys[..2], [(Dataflow::Mp, 8.0), (Dataflow::Mp, 64.0)]);
        assert_eq!(keys.len(), 6);
    }

    #[test]
    fn equivalent_bandwidth_brackets_the_target() {
        let g = build(Dataflow::Oc, &small(), None, EvkMode::Streamed).unwrap();
        let cfg = SimConfig::default();
        let target = simulate(&g, &cfg.bandwidth(20.0)).unwrap().runtime_ms;
        let bw = equivalent_bandwidth(&g, target, &cfg).unwrap().unwrap();
        assert!(bw <= 20.0 * 1.0001 && bw > 10.0, "{bw}");
        assert!(simulate(&g, &cfg.bandwidth(bw)).unwrap().runtime_ms <= target * (1.0 + MATCH_TOL));
        // unreachable targets report None
        assert_eq!(equivalent_bandwidth(&g, 1e-9, &cfg).unwrap(), None);
    }

    #[test]
    fn oc_base_of_the_baseline_is_the_baseline_bandwidth() {
        let b = find_oc_base(&small(), Dataflow::Mp, Dataflow::Mp, &SimConfig::default(), None).unwrap();
        let bw = b.bandwidth_gbps.unwrap();
        assert!(bw <= BASELINE_BW_GBPS);
        assert!(b.runtime_ms.unwrap() <= b.baseline_ms);
        assert_eq!(b.saved_factor(), Some(BASELINE_BW_GBPS / bw));
    }

    #[test]
    fn grid_search_returns_the_first_match() {
        let g = build(Dataflow::Mp, &small(), None, EvkMode::Preloaded).unwrap();
        let cfg = SimConfig::default();
        let at32 = simulate(&g, &cfg.bandwidth(32.0)).unwrap().runtime_ms;
        let hit = first_matching_bandwidth(&g, at32, &OC_BASE_GRID, &cfg).unwrap().unwrap();
        assert!(hit <= 32.0);
        assert_eq!(first_matching_bandwidth(&g, 0.0, &OC_BASE_GRID, &cfg).unwrap(), None);
    }
}
