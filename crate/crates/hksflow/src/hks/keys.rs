use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use crate::rns::{Domain, RnsPolynomial};

use super::{HksError, HksParams};

/// Ternary secret over the extended basis, kept in the evaluation domain.
#[derive(Clone, Debug)]
pub struct SecretKey {
    coeffs: Vec<i64>,
    poly: RnsPolynomial,
}

impl SecretKey {
    /// Uniform ternary coefficients in {-1, 0, 1}.
    pub fn sample<R: Rng + ?Sized>(params: &HksParams, rng: &mut R) -> Self {
        let coeffs: Vec<i64> = (0..params.degree()).map(|_| rng.gen_range(-1i64..=1)).collect();
        Self::from_coeffs(params, coeffs)
    }

    pub fn from_coeffs(params: &HksParams, coeffs: Vec<i64>) -> Self {
        assert!(coeffs.iter().all(|c| (-1..=1).contains(c)), "secret must be ternary");
        let poly = RnsPolynomial::from_signed(&coeffs, &params.d_chain())
            .to_evaluation(None)
            .expect("fresh lift is in coefficient domain");
        SecretKey { coeffs, poly }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Evaluation-domain secret over D.
    pub fn poly(&self) -> &RnsPolynomial {
        &self.poly
    }

    /// Restriction to the Q towers.
    pub fn poly_q(&self, params: &HksParams) -> RnsPolynomial {
        self.poly.select(0..params.num_q_towers())
    }

    pub fn hamming_weight(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }
}

/// Error distribution used by key generation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseModel {
    Noiseless,
    /// Rounded Gaussian truncated at `ceil(6σ)`.
    Gaussian { sigma: f64 },
}

impl NoiseModel {
    pub const STANDARD: NoiseModel = NoiseModel::Gaussian { sigma: 3.2 };

    /// Largest possible |e| coefficient.
    pub fn max_abs(&self) -> u64 {
        match *self {
            NoiseModel::Noiseless => 0,
            NoiseModel::Gaussian { sigma } => (6.0 * sigma).ceil() as u64,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<i64> {
        match *self {
            NoiseModel::Noiseless => vec![0; n],
            NoiseModel::Gaussian { sigma } => {
                let d = Normal::new(0.0, sigma).expect("finite sigma");
                let cap = self.max_abs() as i64;
                (0..n).map(|_| (d.sample(rng).round() as i64).clamp(-cap, cap)).collect()
            }
        }
    }
}

/// `dnum` pairs `(k0_j, k1_j)` over D with
/// `k0_j + k1_j·s_dst = P·g_j·s_src + e_j`.
#[derive(Clone, Debug)]
pub struct EvaluationKey {
    digits: Vec<[RnsPolynomial; 2]>,
    noise: NoiseModel,
}

impl EvaluationKey {
    pub fn digits(&self) -> &[[RnsPolynomial; 2]] {
        &self.digits
    }

    pub fn digit(&self, j: usize) -> &[RnsPolynomial; 2] {
        &self.digits[j]
    }

    pub fn noise(&self) -> NoiseModel {
        self.noise
    }

    pub fn element_count(&self) -> usize {
        self.digits.iter().flatten().map(|p| p.num_towers() * p.degree()).sum()
    }

    pub fn byte_size(&self) -> u64 {
        8 * self.element_count() as u64
    }

    /// Mutable access for fault-injection tests.
    pub fn digit_mut(&mut self, j: usize, half: usize) -> &mut RnsPolynomial {
        &mut self.digits[j][half]
    }
}

/// Generates the switching key from `s_src` to `s_dst`.
pub fn keygen(
    params: &HksParams,
    s_src: &SecretKey,
    s_dst: &SecretKey,
    seed: u64,
    noise: NoiseModel,
) -> Result<EvaluationKey, HksError> {
    let d = params.d_chain();
    if s_src.poly().num_towers() != d.len() || s_dst.poly().num_towers() != d.len() {
        return Err(HksError::Shape("secret keys must span the extended basis".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let kl = params.num_q_towers();
    let mut digits = Vec::with_capacity(params.dnum());
    for j in 0..params.dnum() {
        let k1 = RnsPolynomial::random(&d, Domain::Evaluation, &mut rng);
        let e = RnsPolynomial::from_signed(&noise.sample(params.degree(), &mut rng), &d).to_evaluation(None)?;
        // P·g_j is P mod q_i on digit j's towers and zero elsewhere.
        let gadget: Vec<u64> = (0..d.len())
            .map(|t| if t < kl && params.digit_range(j).contains(&t) { params.p_mod_q()[t] } else { 0 })
            .collect();
        let target = s_src.poly().scale_towers(&gadget);
        let k0 = target.add(&e)?.sub(&k1.mul(s_dst.poly())?)?;
        digits.push([k0, k1]);
    }
    Ok(EvaluationKey { digits, noise })
}
