//! Functional self-checks behind `hksflow verify`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::graph::{build, replay, validate, Dataflow, EvkMode};
use crate::hks::verify::{log2_magnitude, max_abs_coeff, Crt};
use crate::hks::{
    check_evaluation_key, check_key_switch, hybrid_key_switch, keygen, EvaluationKey, HksParams, NoiseBound,
    NoiseModel, SecretKey,
};
use crate::rns::{bconv, intt, ntt, ntt_primes, BasisTable, Domain, Modulus, RnsPolynomial, DEFAULT_MODULUS_BITS};

use super::BenchmarkSpec;

/// Big-integer checks get slow beyond this ring degree.
pub const MAX_VERIFY_LOG_N: u32 = 13;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub bench: BenchmarkSpec,
    /// Ring degree actually used; the tower counts come from `bench`.
    pub degree_log2: u32,
    pub seed: u64,
    pub trials: usize,
    /// Flip one residue of this (digit, D tower) before switching.
    pub corrupt: Option<(usize, usize)>,
}

impl VerifyOptions {
    pub fn toy() -> Self {
        VerifyOptions { bench: BenchmarkSpec::new("toy", 12, 6, 2, 2), degree_log2: 12, seed: 1, trials: 4, corrupt: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(CheckResult { name: name.to_string(), passed, detail });
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {:<22} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        write!(f, "{}", if self.passed() { "verify: PASS" } else { "verify: FAIL" })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("ring degree 2^{0} is too large for the big-integer checks; use --config with logN <= {MAX_VERIFY_LOG_N}")]
    TooLarge(u32),
    #[error("corrupt location digit {digit} tower {tower} is outside the key")]
    BadFault { digit: usize, tower: usize },
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

fn test_modulus(logn: u32) -> anyhow::Result<Modulus> {
    Ok(Modulus::new(ntt_primes(DEFAULT_MODULUS_BITS, logn, 1)?[0], logn)?)
}

/// `intt(ntt(a)) == a` and `ntt(intt(a)) == a` on random vectors.
pub fn ntt_roundtrip(logn: u32, rng: &mut impl Rng) -> anyhow::Result<bool> {
    let m = test_modulus(logn)?;
    let a: Vec<u64> = (0..1usize << logn).map(|_| rng.gen_range(0..m.value())).collect();
    let mut x = a.clone();
    ntt(&mut x, &m);
    intt(&mut x, &m);
    let mut y = a.clone();
    intt(&mut y, &m);
    ntt(&mut y, &m);
    Ok(x == a && y == a)
}

/// Quadratic negacyclic product `a·b mod (X^N + 1, q)`.
pub fn schoolbook_negacyclic(a: &[u64], b: &[u64], m: &Modulus) -> Vec<u64> {
    let n = a.len();
    let mut c = vec![0u64; n];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            let p = m.mul(x, y);
            let k = i + j;
            if k < n {
                c[k] = m.add(c[k], p);
            } else {
                c[k - n] = m.sub(c[k - n], p);
            }
        }
    }
    c
}

pub fn negacyclic_matches_schoolbook(logn: u32, rng: &mut impl Rng) -> anyhow::Result<bool> {
    let m = test_modulus(logn)?;
    let n = 1usize << logn;
    let a: Vec<u64> = (0..n).map(|_| rng.gen_range(0..m.value())).collect();
    let b: Vec<u64> = (0..n).map(|_| rng.gen_range(0..m.value())).collect();
    let (mut x, mut y) = (a.clone(), b.clone());
    ntt(&mut x, &m);
    ntt(&mut y, &m);
    let mut z: Vec<u64> = x.iter().zip(&y).map(|(&u, &v)| m.mul(u, v)).collect();
    intt(&mut z, &m);
    Ok(z == schoolbook_negacyclic(&a, &b, &m))
}

/// Largest overflow multiple `u` over all coefficients and targets, where
/// `y ≡ X + u·Q_src (mod p)`. Fast base conversion guarantees `u < α`.
pub fn bconv_overflow(table: &BasisTable, rng: &mut impl Rng, logn: u32) -> anyhow::Result<u64> {
    let x = RnsPolynomial::random(table.source(), Domain::Coefficient, rng);
    let y = bconv(&x, table, None)?;
    let crt = Crt::new(table.source());
    let q = crt.modulus().clone();
    let mut worst = 0u64;
    for c in 0..1usize << logn {
        let residues: Vec<u64> = x.towers().iter().map(|t| t.residues[c]).collect();
        let big = crt.reconstruct(&residues);
        for (t, p) in table.target().iter().enumerate() {
            let pv = BigUint::from(p.value());
            let xm = (&big % &pv).to_u64().unwrap();
            let qm = (&q % &pv).to_u64().unwrap();
            let diff = p.sub(y.tower(t).residues[c], xm);
            worst = worst.max(p.mul(diff, p.inv(qm)));
        }
    }
    Ok(worst)
}

fn flip(evk: &mut EvaluationKey, digit: usize, tower: usize) {
    let p = evk.digit_mut(digit, 0);
    let m = p.tower(tower).modulus.clone();
    let r = p.residues_mut(tower);
    r[0] = m.add(r[0], 1);
}

pub fn run_verify(opts: &VerifyOptions) -> Result<VerifyReport, VerifyError> {
    if opts.degree_log2 > MAX_VERIFY_LOG_N {
        return Err(VerifyError::TooLarge(opts.degree_log2));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);
    let mut rep = VerifyReport::default();
    let params = opts.bench.params_at(opts.degree_log2).map_err(anyhow::Error::from)?;
    let logn = opts.degree_log2;

    let sizes = [4, 10, logn];
    let ok = sizes.iter().map(|&l| ntt_roundtrip(l, &mut rng)).collect::<anyhow::Result<Vec<_>>>()?;
    rep.push("ntt-roundtrip", ok.iter().all(|&x| x), format!("N in 2^{sizes:?}"));
    rep.push("ntt-negacyclic", negacyclic_matches_schoolbook(4, &mut rng)?, "N=16 against schoolbook".into());

    let mut worst = 0.0f64;
    let mut bconv_ok = true;
    let tables: Vec<&BasisTable> = (0..params.dnum()).map(|j| params.modup_table(j)).chain([params.moddown_table()]).collect();
    for t in tables {
        let u = bconv_overflow(t, &mut rng, logn)?;
        bconv_ok &= u < t.alpha() as u64;
        worst = worst.max(u as f64 / t.alpha() as f64);
    }
    rep.push("bconv-crt", bconv_ok, format!("max overflow {:.2} of alpha", worst));

    let s_src = SecretKey::sample(&params, &mut rng);
    let s_dst = SecretKey::sample(&params, &mut rng);
    let noisy = NoiseModel::STANDARD;
    let mut evk = keygen(&params, &s_src, &s_dst, rng.gen(), noisy).map_err(anyhow::Error::from)?;
    let clean = keygen(&params, &s_src, &s_dst, rng.gen(), NoiseModel::Noiseless).map_err(anyhow::Error::from)?;

    // fault injection on a copy: the checker must point at the flipped tower
    let loc = (rng.gen_range(0..params.dnum()), rng.gen_range(0..params.num_d_towers()));
    let mut bad = evk.clone();
    flip(&mut bad, loc.0, loc.1);
    let found = check_evaluation_key(&params, &bad, &s_src, &s_dst).map_err(anyhow::Error::from)?;
    rep.push(
        "fault-localization",
        found.is_some_and(|f| (f.digit, f.tower) == loc),
        format!("flipped digit {} tower {}, detected {:?}", loc.0, loc.1, found.map(|f| (f.digit, f.tower))),
    );

    if let Some((digit, tower)) = opts.corrupt {
        if digit >= params.dnum() || tower >= params.num_d_towers() {
            return Err(VerifyError::BadFault { digit, tower });
        }
        flip(&mut evk, digit, tower);
    }
    let fault = check_evaluation_key(&params, &evk, &s_src, &s_dst).map_err(anyhow::Error::from)?;
    rep.push(
        "evk-integrity",
        fault.is_none(),
        match fault {
            None => format!("{} digits x 2 x {} towers", params.dnum(), params.num_d_towers()),
            Some(f) => format!("bad key material at apply_evk: digit {} tower {}", f.digit, f.tower),
        },
    );

    for (label, key, noise) in [("key-switch-noiseless", &clean, NoiseModel::Noiseless), ("key-switch-sigma3.2", &evk, noisy)] {
        let bound = NoiseBound::derive(&params, noise);
        let mut worst = BigUint::default();
        let mut pass = true;
        for _ in 0..opts.trials {
            let c1 = RnsPolynomial::random(params.q_chain(), Domain::Evaluation, &mut rng);
            let (d0, d1) = hybrid_key_switch(&c1, key, &params, None).map_err(anyhow::Error::from)?;
            let chk = check_key_switch(&params, &c1, (&d0, &d1), &s_src, &s_dst, &bound).map_err(anyhow::Error::from)?;
            pass &= chk.passed();
            worst = worst.max(chk.residue);
        }
        rep.push(
            label,
            pass,
            format!(
                "{} inputs, max residue 2^{:.2} vs bound 2^{:.2}",
                opts.trials,
                log2_magnitude(&worst),
                log2_magnitude(&bound.max_abs_coeff)
            ),
        );
    }

    // Every dataflow, with and without spills, must compute the same bits.
    let c1 = RnsPolynomial::random(params.q_chain(), Domain::Evaluation, &mut rng);
    let reference = hybrid_key_switch(&c1, &evk, &params, None).map_err(anyhow::Error::from)?;
    let tight = (params.alpha() + 4) as u64 * params.tower_bytes();
    let mut detail = Vec::new();
    let mut same = true;
    for df in Dataflow::ALL {
        for (cap, mode) in [(None, EvkMode::Preloaded), (Some(tight), EvkMode::Streamed)] {
            let g = build(df, &params, cap, mode).map_err(anyhow::Error::from)?;
            validate(&g).map_err(anyhow::Error::from)?;
            let out = replay(&g, &c1, &evk).map_err(anyhow::Error::from)?;
            same &= out == reference;
            if cap.is_some() {
                detail.push(format!("{df}:{}", g.tasks.len()));
            }
        }
    }
    rep.push("dataflow-equivalence", same, format!("tasks at {} towers {}", params.alpha() + 4, detail.join(" ")));

    // Different digit counts decrypt to the same value within their bounds.
    let mut decrypted = Vec::new();
    for dnum in 1..=3.min(params.num_q_towers()) {
        let Ok(p) = HksParams::new(logn, params.num_q_towers(), params.num_p_towers(), dnum) else {
            continue;
        };
        let s1 = SecretKey::from_coeffs(&p, s_src.coeffs().to_vec());
        let s2 = SecretKey::from_coeffs(&p, s_dst.coeffs().to_vec());
        let k = keygen(&p, &s1, &s2, opts.seed, noisy).map_err(anyhow::Error::from)?;
        let (d0, d1) = hybrid_key_switch(&c1, &k, &p, None).map_err(anyhow::Error::from)?;
        let v = d0.add(&d1.mul(&s2.poly_q(&p)).map_err(anyhow::Error::from)?).map_err(anyhow::Error::from)?;
        decrypted.push((dnum, v, NoiseBound::derive(&p, noisy).max_abs_coeff));
    }
    let (d_ref, v_ref, b_ref) = decrypted[0].clone();
    let mut agree = true;
    let mut worst = BigUint::default();
    for (_, v, b) in &decrypted[1..] {
        let diff = v.sub(&v_ref).map_err(anyhow::Error::from)?;
        let mag = max_abs_coeff(&diff).map_err(anyhow::Error::from)?;
        agree &= mag <= &b_ref + b;
        worst = worst.max(mag);
    }
    let dnums: Vec<usize> = decrypted.iter().map(|d| d.0).collect();
    rep.push(
        "cross-dnum",
        agree,
        format!("dnum {dnums:?} vs {d_ref}: max difference 2^{:.2}", log2_magnitude(&worst)),
    );
    Ok(rep)
}
