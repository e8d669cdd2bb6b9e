//! Fast (approximate) RNS basis conversion.
//!
//! For each coefficient, `y_i = [x_i · qhat_inv_i]_{q_i}` and the target
//! residue is `Σ_i y_i · (Q/q_i mod p_j) mod p_j`. The integer represented by
//! the output is `x + e·Q` with `0 ≤ e < α`.

use std::sync::Arc;

use rayon::prelude::*;

use super::{Domain, Modulus, OpCounter, RnsError, RnsPolynomial, Tower};

#[derive(Clone, Debug)]
pub struct BasisTable {
    source: Vec<Arc<Modulus>>,
    target: Vec<Arc<Modulus>>,
    qhat_inv: Vec<u64>,
    /// `qhat_mod_target[i][j] = Π_{k≠i} source[k] mod target[j]`.
    qhat_mod_target: Vec<Vec<u64>>,
}

impl BasisTable {
    pub fn new(source: Vec<Arc<Modulus>>, target: Vec<Arc<Modulus>>) -> Result<Self, RnsError> {
        if source.is_empty() || target.is_empty() {
            return Err(RnsError::BasisMismatch);
        }
        for s in &source {
            if target.iter().any(|t| t.value() == s.value()) {
                return Err(RnsError::BasisMismatch);
            }
        }
        let alpha = source.len();
        let mut qhat_inv = Vec::with_capacity(alpha);
        for (i, qi) in source.iter().enumerate() {
            let mut prod = 1u64;
            for (k, qk) in source.iter().enumerate() {
                if k != i {
                    prod = qi.mul(prod, qi.reduce(qk.value()));
                }
            }
            qhat_inv.push(qi.inv(prod));
        }
        let qhat_mod_target = (0..alpha)
            .map(|i| {
                target
                    .iter()
                    .map(|pj| {
                        source
                            .iter()
                            .enumerate()
                            .filter(|&(k, _)| k != i)
                            .fold(1u64, |acc, (_, qk)| pj.mul(acc, pj.reduce(qk.value())))
                    })
                    .collect()
            })
            .collect();
        Ok(BasisTable { source, target, qhat_inv, qhat_mod_target })
    }

    pub fn source(&self) -> &[Arc<Modulus>] {
        &self.source
    }

    pub fn target(&self) -> &[Arc<Modulus>] {
        &self.target
    }

    pub fn qhat_inv(&self) -> &[u64] {
        &self.qhat_inv
    }

    pub fn qhat_mod_target(&self) -> &[Vec<u64>] {
        &self.qhat_mod_target
    }

    pub fn alpha(&self) -> usize {
        self.source.len()
    }

    pub fn beta(&self) -> usize {
        self.target.len()
    }

    /// The prescaled values `y_i = [x_i · qhat_inv_i]_{q_i}` for all source towers.
    pub fn prescale(&self, inputs: &[&[u64]]) -> Vec<Vec<u64>> {
        assert_eq!(inputs.len(), self.alpha());
        inputs
            .iter()
            .zip(&self.source)
            .zip(&self.qhat_inv)
            .map(|((x, q), &s)| x.iter().map(|&v| q.mul(v, s)).collect())
            .collect()
    }

    /// Produces the single target tower `j` from prescaled source towers.
    pub fn convert_one(&self, prescaled: &[Vec<u64>], j: usize) -> Vec<u64> {
        let p = &self.target[j];
        let n = prescaled[0].len();
        let mut out = vec![0u64; n];
        for (y, row) in prescaled.iter().zip(&self.qhat_mod_target) {
            let c = row[j];
            for (o, &v) in out.iter_mut().zip(y) {
                *o = p.add(*o, p.mul(p.reduce(v), c));
            }
        }
        out
    }
}

/// Converts a coefficient-domain polynomial over `t.source()` to `t.target()`.
pub fn bconv(p: &RnsPolynomial, t: &BasisTable, ctr: Option<&OpCounter>) -> Result<RnsPolynomial, RnsError> {
    if p.domain() != Domain::Coefficient {
        return Err(RnsError::Domain { expected: Domain::Coefficient, found: p.domain() });
    }
    let same = p.num_towers() == t.alpha() && p.towers().iter().zip(&t.source).all(|(a, b)| a.modulus == *b);
    if !same {
        return Err(RnsError::BasisMismatch);
    }
    let inputs: Vec<&[u64]> = p.towers().iter().map(|x| x.residues.as_slice()).collect();
    let y = t.prescale(&inputs);
    let towers = (0..t.beta())
        .into_par_iter()
        .map(|j| Tower { modulus: t.target[j].clone(), residues: t.convert_one(&y, j) })
        .collect();
    if let Some(c) = ctr {
        let work = (p.degree() * t.alpha() * t.beta()) as u64;
        c.add_muls(work);
        c.add_adds(work);
    }
    RnsPolynomial::from_towers(p.degree_log2(), towers, Domain::Coefficient)
}
