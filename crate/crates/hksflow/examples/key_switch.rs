//! Generates a switching key at toy size, runs one hybrid key switch for
//! each digit count and checks d0 + d1·s_dst ≈ c1·s_src.

use hksflow::hks::{
    check_evaluation_key, check_key_switch, hybrid_key_switch, keygen, verify::log2_magnitude, HksParams,
    NoiseBound, NoiseModel, SecretKey,
};
use hksflow::rns::{Domain, OpCounter, RnsPolynomial};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> anyhow::Result<()> {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    for dnum in 1..=3 {
        let params = HksParams::new(12, 6, 2, dnum)?;
        let s_src = SecretKey::sample(&params, &mut rng);
        let s_dst = SecretKey::sample(&params, &mut rng);
        for noise in [NoiseModel::Noiseless, NoiseModel::STANDARD] {
            let evk = keygen(&params, &s_src, &s_dst, 11, noise)?;
            assert!(check_evaluation_key(&params, &evk, &s_src, &s_dst)?.is_none());
            let c1 = RnsPolynomial::random(params.q_chain(), Domain::Evaluation, &mut rng);
            let ctr = OpCounter::new();
            let (d0, d1) = hybrid_key_switch(&c1, &evk, &params, Some(&ctr))?;
            let check = check_key_switch(&params, &c1, (&d0, &d1), &s_src, &s_dst, &NoiseBound::derive(&params, noise))?;
            println!(
                "dnum={dnum} {:<9} residue 2^{:>6.2}  bound 2^{:>6.2}  ops {:>9}  {}",
                if noise == NoiseModel::Noiseless { "noiseless" } else { "sigma=3.2" },
                log2_magnitude(&check.residue),
                log2_magnitude(&check.bound),
                ctr.total(),
                if check.passed() { "ok" } else { "FAIL" }
            );
        }
    }
    Ok(())
}
