use std::ops::Range;
use std::sync::Arc;

use crate::rns::{ntt_primes, BasisTable, Modulus, DEFAULT_MODULUS_BITS};

use super::HksError;

/// Parameter bundle for one hybrid key switch.
///
/// Tower indices follow the canonical D-basis order: `0..k_l` are the Q
/// towers, `k_l..k_l+k_p` the P towers.
#[derive(Clone, Debug)]
pub struct HksParams {
    degree_log2: u32,
    num_q_towers: usize,
    num_p_towers: usize,
    dnum: usize,
    alpha: usize,
    digit_bounds: Vec<(usize, usize)>,
    q_chain: Vec<Arc<Modulus>>,
    p_chain: Vec<Arc<Modulus>>,
    modup_tables: Vec<BasisTable>,
    moddown_table: BasisTable,
    p_mod_q: Vec<u64>,
    p_inv_mod_q: Vec<u64>,
}

/// Ceiling partition of `k_l` towers into digits of `ceil(k_l/dnum)` towers.
pub fn digit_partition(num_q_towers: usize, dnum: usize) -> Vec<(usize, usize)> {
    let alpha = num_q_towers.div_ceil(dnum.max(1));
    (0..dnum)
        .map(|j| (j * alpha, ((j + 1) * alpha).min(num_q_towers)))
        .filter(|(a, b)| a < b)
        .collect()
}

impl HksParams {
    /// Builds parameters with the default 36-bit prime chains.
    pub fn new(degree_log2: u32, num_q_towers: usize, num_p_towers: usize, dnum: usize) -> Result<Self, HksError> {
        Self::with_modulus_bits(degree_log2, num_q_towers, num_p_towers, dnum, DEFAULT_MODULUS_BITS)
    }

    pub fn with_modulus_bits(
        degree_log2: u32,
        num_q_towers: usize,
        num_p_towers: usize,
        dnum: usize,
        bits: u32,
    ) -> Result<Self, HksError> {
        if !(1..=24).contains(&degree_log2) {
            return Err(HksError::Params(format!("logN={degree_log2} outside 1..=24")));
        }
        if num_q_towers == 0 || num_p_towers == 0 || dnum == 0 {
            return Err(HksError::Params("k_l, k_p and dnum must be positive".into()));
        }
        let digit_bounds = digit_partition(num_q_towers, dnum);
        if digit_bounds.len() != dnum {
            return Err(HksError::Params(format!(
                "k_l={num_q_towers} cannot be split into {dnum} nonempty digits of ceil(k_l/dnum) towers"
            )));
        }
        let alpha = num_q_towers.div_ceil(dnum);
        let primes = ntt_primes(bits, degree_log2, num_q_towers + num_p_towers)?;
        let moduli: Vec<Arc<Modulus>> = primes
            .into_iter()
            .map(|q| Modulus::new(q, degree_log2).map(Arc::new))
            .collect::<Result<_, _>>()?;
        let q_chain = moduli[..num_q_towers].to_vec();
        let p_chain = moduli[num_q_towers..].to_vec();
        let modup_tables = digit_bounds
            .iter()
            .map(|&(a, b)| {
                let target = moduli
                    .iter()
                    .enumerate()
                    .filter(|(e, _)| !(a..b).contains(e))
                    .map(|(_, m)| m.clone())
                    .collect();
                BasisTable::new(moduli[a..b].to_vec(), target)
            })
            .collect::<Result<_, _>>()?;
        let moddown_table = BasisTable::new(p_chain.clone(), q_chain.clone())?;
        let p_mod_q: Vec<u64> = q_chain
            .iter()
            .map(|q| p_chain.iter().fold(1u64, |acc, p| q.mul(acc, q.reduce(p.value()))))
            .collect();
        let p_inv_mod_q = q_chain.iter().zip(&p_mod_q).map(|(q, &v)| q.inv(v)).collect();
        Ok(HksParams {
            degree_log2,
            num_q_towers,
            num_p_towers,
            dnum,
            alpha,
            digit_bounds,
            q_chain,
            p_chain,
            modup_tables,
            moddown_table,
            p_mod_q,
            p_inv_mod_q,
        })
    }

    pub fn degree_log2(&self) -> u32 {
        self.degree_log2
    }

    pub fn degree(&self) -> usize {
        1 << self.degree_log2
    }

    /// `k_l`: number of Q towers.
    pub fn num_q_towers(&self) -> usize {
        self.num_q_towers
    }

    /// `k_p` (K): number of P towers.
    pub fn num_p_towers(&self) -> usize {
        self.num_p_towers
    }

    /// Size of the extended basis D = B ∪ C.
    pub fn num_d_towers(&self) -> usize {
        self.num_q_towers + self.num_p_towers
    }

    pub fn dnum(&self) -> usize {
        self.dnum
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn digit_bounds(&self) -> &[(usize, usize)] {
        &self.digit_bounds
    }

    pub fn digit_range(&self, j: usize) -> Range<usize> {
        let (a, b) = self.digit_bounds[j];
        a..b
    }

    pub fn digit_size(&self, j: usize) -> usize {
        let (a, b) = self.digit_bounds[j];
        b - a
    }

    /// `β_j = k_l + K − α_j`.
    pub fn beta(&self, j: usize) -> usize {
        self.num_d_towers() - self.digit_size(j)
    }

    /// Digit owning Q tower `t`.
    pub fn owner(&self, t: usize) -> usize {
        self.digit_bounds.iter().position(|&(a, b)| (a..b).contains(&t)).expect("tower outside Q basis")
    }

    pub fn q_chain(&self) -> &[Arc<Modulus>] {
        &self.q_chain
    }

    pub fn p_chain(&self) -> &[Arc<Modulus>] {
        &self.p_chain
    }

    /// Moduli of the extended basis in canonical order.
    pub fn d_chain(&self) -> Vec<Arc<Modulus>> {
        self.q_chain.iter().chain(&self.p_chain).cloned().collect()
    }

    pub fn modulus(&self, tower: usize) -> &Arc<Modulus> {
        if tower < self.num_q_towers {
            &self.q_chain[tower]
        } else {
            &self.p_chain[tower - self.num_q_towers]
        }
    }

    /// Conversion table from digit `j` to its complement in D.
    pub fn modup_table(&self, j: usize) -> &BasisTable {
        &self.modup_tables[j]
    }

    /// Position of D tower `e` among the targets of digit `j`'s conversion.
    pub fn modup_target_index(&self, j: usize, e: usize) -> usize {
        let (a, b) = self.digit_bounds[j];
        assert!(!(a..b).contains(&e), "tower {e} belongs to digit {j}");
        if e < a {
            e
        } else {
            e - (b - a)
        }
    }

    pub fn moddown_table(&self) -> &BasisTable {
        &self.moddown_table
    }

    pub fn p_mod_q(&self) -> &[u64] {
        &self.p_mod_q
    }

    pub fn p_inv_mod_q(&self) -> &[u64] {
        &self.p_inv_mod_q
    }

    /// One tower of 8-byte words.
    pub fn tower_bytes(&self) -> u64 {
        8 << self.degree_log2
    }

    /// Input polynomial size (k_l towers).
    pub fn input_bytes(&self) -> u64 {
        self.num_q_towers as u64 * self.tower_bytes()
    }

    /// Output pair size (2·k_l towers).
    pub fn output_bytes(&self) -> u64 {
        2 * self.input_bytes()
    }

    /// `dnum · 2 · N · (k_l + K) · 8` bytes.
    pub fn evk_bytes(&self) -> u64 {
        (self.dnum * 2 * self.num_d_towers()) as u64 * self.tower_bytes()
    }
}
