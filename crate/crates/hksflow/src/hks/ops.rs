use crate::rns::butterflies;

use super::HksParams;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StageOps {
    pub muls: u64,
    pub adds: u64,
}

impl StageOps {
    pub fn total(&self) -> u64 {
        self.muls + self.adds
    }

    fn both(n: u64) -> Self {
        StageOps { muls: n, adds: n }
    }
}

/// Closed-form modular-operation counts of one key switch, per stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub modup_intt: StageOps,
    pub modup_bconv: StageOps,
    pub modup_ntt: StageOps,
    pub apply_evk: StageOps,
    pub modup_reduce: StageOps,
    pub moddown_intt: StageOps,
    pub moddown_bconv: StageOps,
    pub moddown_ntt: StageOps,
    pub scale_sub: StageOps,
}

impl OpCounts {
    pub fn stages(&self) -> [(&'static str, StageOps); 9] {
        [
            ("modup_intt", self.modup_intt),
            ("modup_bconv", self.modup_bconv),
            ("modup_ntt", self.modup_ntt),
            ("apply_evk", self.apply_evk),
            ("modup_reduce", self.modup_reduce),
            ("moddown_intt", self.moddown_intt),
            ("moddown_bconv", self.moddown_bconv),
            ("moddown_ntt", self.moddown_ntt),
            ("scale_sub", self.scale_sub),
        ]
    }

    pub fn muls(&self) -> u64 {
        self.stages().iter().map(|(_, s)| s.muls).sum()
    }

    pub fn adds(&self) -> u64 {
        self.stages().iter().map(|(_, s)| s.adds).sum()
    }

    pub fn total(&self) -> u64 {
        self.muls() + self.adds()
    }
}

/// Operation counts depend only on the parameters, never on the dataflow.
pub fn count_ops(params: &HksParams) -> OpCounts {
    let n = params.degree() as u64;
    let bf = butterflies(params.degree_log2());
    let kl = params.num_q_towers() as u64;
    let k = params.num_p_towers() as u64;
    let d = params.num_d_towers() as u64;
    let dnum = params.dnum() as u64;
    let bconv: u64 = (0..params.dnum()).map(|j| n * (params.digit_size(j) * params.beta(j)) as u64).sum();
    let betas: u64 = (0..params.dnum()).map(|j| params.beta(j) as u64).sum();
    OpCounts {
        modup_intt: StageOps::both(bf * kl),
        modup_bconv: StageOps::both(bconv),
        modup_ntt: StageOps::both(bf * betas),
        apply_evk: StageOps { muls: dnum * 2 * d * n, adds: 0 },
        modup_reduce: StageOps { muls: 0, adds: (dnum - 1) * 2 * d * n },
        moddown_intt: StageOps::both(bf * 2 * k),
        moddown_bconv: StageOps::both(2 * n * k * kl),
        moddown_ntt: StageOps::both(bf * 2 * kl),
        scale_sub: StageOps::both(2 * kl * n),
    }
}
