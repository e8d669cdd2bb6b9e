//! Big-integer checks of the key-switch identity.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::Zero;

use crate::rns::{Domain, Modulus, RnsPolynomial};

use super::{EvaluationKey, HksError, HksParams, NoiseModel, SecretKey};

/// Product of a set of moduli with the CRT lifting coefficients
/// `Q̂_i · [Q̂_i^-1]_{q_i}`.
#[derive(Clone, Debug)]
pub struct Crt {
    modulus: BigUint,
    lift: Vec<BigUint>,
}

impl Crt {
    pub fn new(moduli: &[impl AsRef<Modulus>]) -> Self {
        let modulus: BigUint = moduli.iter().map(|m| BigUint::from(m.as_ref().value())).product();
        let lift = moduli
            .iter()
            .map(|m| {
                let m = m.as_ref();
                let qhat = &modulus / m.value();
                let r = (&qhat % m.value()).to_u64_digits().first().copied().unwrap_or(0);
                qhat * m.inv(r)
            })
            .collect();
        Crt { modulus, lift }
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// Integer in `[0, Q)` with the given residues.
    pub fn reconstruct(&self, residues: &[u64]) -> BigUint {
        let s: BigUint = residues.iter().zip(&self.lift).map(|(&r, l)| l * r).sum();
        s % &self.modulus
    }

    /// Representative in `(-Q/2, Q/2]`.
    pub fn reconstruct_centered(&self, residues: &[u64]) -> BigInt {
        let v = self.reconstruct(residues);
        if &v + &v > self.modulus {
            BigInt::from_biguint(Sign::Plus, v) - BigInt::from_biguint(Sign::Plus, self.modulus.clone())
        } else {
            BigInt::from_biguint(Sign::Plus, v)
        }
    }
}

/// Largest centered coefficient of a polynomial, reconstructed over its basis.
pub fn max_abs_coeff(p: &RnsPolynomial) -> Result<BigUint, HksError> {
    let coef = match p.domain() {
        Domain::Coefficient => p.clone(),
        Domain::Evaluation => p.clone().to_coefficient(None)?,
    };
    let crt = Crt::new(&coef.moduli());
    let mut best = BigUint::zero();
    let mut buf = vec![0u64; coef.num_towers()];
    let towers = coef.towers();
    for i in 0..coef.degree() {
        // When every tower holds the same centered value c, the integer is c:
        // it agrees with c modulo each q_i and |c| < Q/2.
        let c = towers[0].modulus.center(towers[0].residues[i]);
        if towers[1..].iter().all(|t| t.modulus.center(t.residues[i]) == c) {
            let v = BigUint::from(c.unsigned_abs());
            if v > best {
                best = v;
            }
            continue;
        }
        for (b, t) in buf.iter_mut().zip(coef.towers()) {
            *b = t.residues[i];
        }
        let v = crt.reconstruct_centered(&buf).magnitude().clone();
        if v > best {
            best = v;
        }
    }
    Ok(best)
}

/// Bound on `‖d0 + d1·s_dst − c1·s_src‖∞` over Q.
///
/// ModDown subtracts a conversion of value `ã < K·P`, which leaves
/// `(ã0 + ã1·s)/P` with magnitude below `K·(N+1)`. Key noise contributes
/// `Σ_j N · α_j·Q_j · B_e / P`, where `α_j·Q_j` bounds the extended digit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoiseBound {
    pub max_abs_coeff: BigUint,
}

impl NoiseBound {
    pub fn derive(params: &HksParams, noise: NoiseModel) -> Self {
        let n = BigUint::from(params.degree());
        let k = BigUint::from(params.num_p_towers());
        let rounding = &k * (&n + 1u32);
        let p: BigUint = params.p_chain().iter().map(|m| BigUint::from(m.value())).product();
        let b_e = BigUint::from(noise.max_abs());
        let digit_mass: BigUint = (0..params.dnum())
            .map(|j| {
                let qj: BigUint = params.digit_range(j).map(|t| BigUint::from(params.q_chain()[t].value())).product();
                qj * params.digit_size(j)
            })
            .sum();
        let noise_term = (n * digit_mass * b_e).div_ceil(&p);
        NoiseBound { max_abs_coeff: rounding + noise_term }
    }
}

/// Outcome of checking one key switch.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub residue: BigUint,
    pub bound: BigUint,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.residue <= self.bound
    }
}

/// Evaluates `‖d0 + d1·s_dst − c1·s_src‖∞` mod Q against `bound`.
pub fn check_key_switch(
    params: &HksParams,
    c1: &RnsPolynomial,
    d: (&RnsPolynomial, &RnsPolynomial),
    s_src: &SecretKey,
    s_dst: &SecretKey,
    bound: &NoiseBound,
) -> Result<IdentityCheck, HksError> {
    let lhs = d.0.add(&d.1.mul(&s_dst.poly_q(params))?)?;
    let r = lhs.sub(&c1.mul(&s_src.poly_q(params))?)?;
    Ok(IdentityCheck { residue: max_abs_coeff(&r)?, bound: bound.max_abs_coeff.clone() })
}

/// Location of the first evaluation-key tower whose noise exceeds the model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvkFault {
    pub digit: usize,
    pub tower: usize,
}

/// Checks `k0_j + k1_j·s_dst − P·g_j·s_src` tower by tower.
pub fn check_evaluation_key(
    params: &HksParams,
    evk: &EvaluationKey,
    s_src: &SecretKey,
    s_dst: &SecretKey,
) -> Result<Option<EvkFault>, HksError> {
    let kl = params.num_q_towers();
    let cap = evk.noise().max_abs() as i64;
    for j in 0..params.dnum() {
        let [k0, k1] = evk.digit(j);
        let gadget: Vec<u64> = (0..params.num_d_towers())
            .map(|t| if t < kl && params.digit_range(j).contains(&t) { params.p_mod_q()[t] } else { 0 })
            .collect();
        let e = k0
            .add(&k1.mul(s_dst.poly())?)?
            .sub(&s_src.poly().scale_towers(&gadget))?
            .to_coefficient(None)?;
        for (t, tower) in e.towers().iter().enumerate() {
            if tower.residues.iter().any(|&x| tower.modulus.center(x).abs() > cap) {
                return Ok(Some(EvkFault { digit: j, tower: t }));
            }
        }
        // all towers must agree on the same small integer
        let first = e.tower(0);
        for tower in &e.towers()[1..] {
            for (a, b) in first.residues.iter().zip(&tower.residues) {
                if first.modulus.center(*a) != tower.modulus.center(*b) {
                    return Ok(Some(EvkFault { digit: j, tower: 0 }));
                }
            }
        }
    }
    Ok(None)
}

/// Big-integer magnitude of `x` as f64 bits, for reporting.
pub fn log2_magnitude(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 52 {
        (x.to_u64_digits()[0] as f64).log2()
    } else {
        let shifted: BigUint = x >> (bits - 52);
        (shifted.to_u64_digits()[0] as f64).log2() + (bits - 52) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rns::ntt_primes;
    use num_traits::One;
    use std::sync::Arc;

    #[test]
    fn crt_roundtrip() {
        let ms: Vec<Arc<Modulus>> =
            ntt_primes(36, 3, 3).unwrap().into_iter().map(|q| Arc::new(Modulus::new(q, 3).unwrap())).collect();
        let crt = Crt::new(&ms);
        let x = BigUint::from(123456789012345678901234567u128);
        let r: Vec<u64> = ms.iter().map(|m| (&x % m.value()).to_u64_digits()[0]).collect();
        assert_eq!(crt.reconstruct(&r), x);
        let neg: Vec<u64> = ms.iter().map(|m| m.value() - 5).collect();
        assert_eq!(crt.reconstruct_centered(&neg), BigInt::from(-5));
        assert!(crt.modulus() > &BigUint::one());
    }

    #[test]
    fn bound_grows_with_noise() {
        let p = HksParams::new(5, 4, 2, 2).unwrap();
        let quiet = NoiseBound::derive(&p, NoiseModel::Noiseless);
        let loud = NoiseBound::derive(&p, NoiseModel::STANDARD);
        assert_eq!(quiet.max_abs_coeff, BigUint::from(2u32 * 33));
        assert!(loud.max_abs_coeff > quiet.max_abs_coeff);
    }
}
