use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use super::{intt, ntt, ntt::butterflies, Modulus, OpCounter, RnsError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Coefficient,
    Evaluation,
}

/// One residue vector under a single modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    pub modulus: Arc<Modulus>,
    pub residues: Vec<u64>,
}

impl Tower {
    pub fn zero(modulus: Arc<Modulus>) -> Self {
        let n = modulus.degree();
        Tower { modulus, residues: vec![0; n] }
    }
}

/// Polynomial in `Z[X]/(X^N+1)` held as one tower per RNS modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RnsPolynomial {
    degree_log2: u32,
    towers: Vec<Tower>,
    domain: Domain,
}

impl RnsPolynomial {
    pub fn from_towers(degree_log2: u32, towers: Vec<Tower>, domain: Domain) -> Result<Self, RnsError> {
        let n = 1usize << degree_log2;
        for t in &towers {
            if t.residues.len() != n || t.modulus.degree_log2() != degree_log2 {
                return Err(RnsError::Length { expected: n, found: t.residues.len() });
            }
            if let Some(&bad) = t.residues.iter().find(|&&r| r >= t.modulus.value()) {
                return Err(RnsError::Unreduced { residue: bad, modulus: t.modulus.value() });
            }
        }
        Ok(RnsPolynomial { degree_log2, towers, domain })
    }

    pub fn zero(moduli: &[Arc<Modulus>], domain: Domain) -> Self {
        let degree_log2 = moduli.first().map_or(0, |m| m.degree_log2());
        let towers = moduli.iter().cloned().map(Tower::zero).collect();
        RnsPolynomial { degree_log2, towers, domain }
    }

    /// Lifts signed integer coefficients into every tower (coefficient domain).
    pub fn from_signed(coeffs: &[i64], moduli: &[Arc<Modulus>]) -> Self {
        let degree_log2 = moduli[0].degree_log2();
        assert_eq!(coeffs.len(), 1 << degree_log2);
        let towers = moduli
            .iter()
            .map(|m| Tower {
                modulus: m.clone(),
                residues: coeffs.iter().map(|&c| m.reduce_i64(c)).collect(),
            })
            .collect();
        RnsPolynomial { degree_log2, towers, domain: Domain::Coefficient }
    }

    /// Independent uniform residues in every tower.
    pub fn random<R: Rng + ?Sized>(moduli: &[Arc<Modulus>], domain: Domain, rng: &mut R) -> Self {
        let degree_log2 = moduli[0].degree_log2();
        let towers = moduli
            .iter()
            .map(|m| Tower {
                modulus: m.clone(),
                residues: (0..m.degree()).map(|_| rng.gen_range(0..m.value())).collect(),
            })
            .collect();
        RnsPolynomial { degree_log2, towers, domain }
    }

    pub fn degree_log2(&self) -> u32 {
        self.degree_log2
    }

    pub fn degree(&self) -> usize {
        1 << self.degree_log2
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn towers(&self) -> &[Tower] {
        &self.towers
    }

    pub fn tower(&self, i: usize) -> &Tower {
        &self.towers[i]
    }

    pub fn num_towers(&self) -> usize {
        self.towers.len()
    }

    pub fn moduli(&self) -> Vec<Arc<Modulus>> {
        self.towers.iter().map(|t| t.modulus.clone()).collect()
    }

    pub fn into_towers(self) -> Vec<Tower> {
        self.towers
    }

    /// Mutable residue access for fault injection and in-place kernels.
    pub fn residues_mut(&mut self, tower: usize) -> &mut [u64] {
        &mut self.towers[tower].residues
    }

    /// Towers `range` as a new polynomial in the same domain.
    pub fn select(&self, range: std::ops::Range<usize>) -> Self {
        RnsPolynomial {
            degree_log2: self.degree_log2,
            towers: self.towers[range].to_vec(),
            domain: self.domain,
        }
    }

    fn expect_domain(&self, d: Domain) -> Result<(), RnsError> {
        if self.domain != d {
            return Err(RnsError::Domain { expected: d, found: self.domain });
        }
        Ok(())
    }

    fn expect_same_basis(&self, other: &Self) -> Result<(), RnsError> {
        let same = self.towers.len() == other.towers.len()
            && self.towers.iter().zip(&other.towers).all(|(a, b)| a.modulus == b.modulus);
        if !same {
            return Err(RnsError::BasisMismatch);
        }
        if self.domain != other.domain {
            return Err(RnsError::Domain { expected: self.domain, found: other.domain });
        }
        Ok(())
    }

    /// Forward transform of every tower.
    pub fn to_evaluation(mut self, ctr: Option<&OpCounter>) -> Result<Self, RnsError> {
        self.expect_domain(Domain::Coefficient)?;
        self.towers.par_iter_mut().for_each(|t| ntt(&mut t.residues, &t.modulus));
        if let Some(c) = ctr {
            let b = butterflies(self.degree_log2) * self.towers.len() as u64;
            c.add_muls(b);
            c.add_adds(b);
        }
        self.domain = Domain::Evaluation;
        Ok(self)
    }

    /// Inverse transform of every tower.
    pub fn to_coefficient(mut self, ctr: Option<&OpCounter>) -> Result<Self, RnsError> {
        self.expect_domain(Domain::Evaluation)?;
        self.towers.par_iter_mut().for_each(|t| intt(&mut t.residues, &t.modulus));
        if let Some(c) = ctr {
            let b = butterflies(self.degree_log2) * self.towers.len() as u64;
            c.add_muls(b);
            c.add_adds(b);
        }
        self.domain = Domain::Coefficient;
        Ok(self)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Modulus, u64, u64) -> u64 + Sync) -> Result<Self, RnsError> {
        self.expect_same_basis(other)?;
        let towers = self
            .towers
            .par_iter()
            .zip(&other.towers)
            .map(|(a, b)| {
                let m = &a.modulus;
                Tower {
                    modulus: m.clone(),
                    residues: a.residues.iter().zip(&b.residues).map(|(&x, &y)| f(m, x, y)).collect(),
                }
            })
            .collect();
        Ok(RnsPolynomial { degree_log2: self.degree_log2, towers, domain: self.domain })
    }

    pub fn add(&self, other: &Self) -> Result<Self, RnsError> {
        self.zip_with(other, |m, x, y| m.add(x, y))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, RnsError> {
        self.zip_with(other, |m, x, y| m.sub(x, y))
    }

    /// Pointwise product; both operands must be in the evaluation domain.
    pub fn mul(&self, other: &Self) -> Result<Self, RnsError> {
        self.expect_domain(Domain::Evaluation)?;
        self.zip_with(other, |m, x, y| m.mul(x, y))
    }

    pub fn neg(&self) -> Self {
        let towers = self
            .towers
            .iter()
            .map(|t| Tower {
                modulus: t.modulus.clone(),
                residues: t.residues.iter().map(|&x| t.modulus.neg(x)).collect(),
            })
            .collect();
        RnsPolynomial { degree_log2: self.degree_log2, towers, domain: self.domain }
    }

    /// Multiplies tower `i` by the scalar `scalars[i]`.
    pub fn scale_towers(&self, scalars: &[u64]) -> Self {
        assert_eq!(scalars.len(), self.towers.len());
        let towers = self
            .towers
            .iter()
            .zip(scalars)
            .map(|(t, &s)| Tower {
                modulus: t.modulus.clone(),
                residues: t.residues.iter().map(|&x| t.modulus.mul(x, s)).collect(),
            })
            .collect();
        RnsPolynomial { degree_log2: self.degree_log2, towers, domain: self.domain }
    }
}
