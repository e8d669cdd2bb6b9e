//! ModUp (INTT, BConv, NTT, apply evk, reduce) followed by ModDown.

use crate::rns::{bconv, Domain, OpCounter, RnsPolynomial, Tower};

use super::{EvaluationKey, HksError, HksParams};

fn expect(p: &RnsPolynomial, towers: usize, domain: Domain, what: &str) -> Result<(), HksError> {
    if p.num_towers() != towers || p.domain() != domain {
        return Err(HksError::Shape(format!(
            "{what}: expected {towers} towers in {domain:?} domain, got {} in {:?}",
            p.num_towers(),
            p.domain()
        )));
    }
    Ok(())
}

/// Splits `c` (k_l towers, evaluation domain) into its digits. No arithmetic.
pub fn digit_decompose(c: &RnsPolynomial, params: &HksParams) -> Result<Vec<RnsPolynomial>, HksError> {
    expect(c, params.num_q_towers(), Domain::Evaluation, "digit_decompose")?;
    Ok((0..params.dnum()).map(|j| c.select(params.digit_range(j))).collect())
}

/// Extends digit `j` to the full D basis; its own towers pass through untouched.
pub fn modup(digit: &RnsPolynomial, j: usize, params: &HksParams, ctr: Option<&OpCounter>) -> Result<RnsPolynomial, HksError> {
    expect(digit, params.digit_size(j), Domain::Evaluation, "modup")?;
    let coef = digit.clone().to_coefficient(ctr)?;
    let converted = bconv(&coef, params.modup_table(j), ctr)?.to_evaluation(ctr)?;
    let range = params.digit_range(j);
    let mut conv = converted.into_towers().into_iter();
    let mut own = digit.towers().iter();
    let towers: Vec<Tower> = (0..params.num_d_towers())
        .map(|e| {
            if range.contains(&e) {
                own.next().unwrap().clone()
            } else {
                conv.next().unwrap()
            }
        })
        .collect();
    Ok(RnsPolynomial::from_towers(params.degree_log2(), towers, Domain::Evaluation)?)
}

/// `out[j][h] = extended[j] ⊙ evk_j.k_h`.
pub fn apply_evk(
    extended: &[RnsPolynomial],
    evk: &EvaluationKey,
    ctr: Option<&OpCounter>,
) -> Result<Vec<[RnsPolynomial; 2]>, HksError> {
    if extended.len() != evk.digits().len() {
        return Err(HksError::Shape("digit count differs from evaluation key".into()));
    }
    let out = extended
        .iter()
        .zip(evk.digits())
        .map(|(x, [k0, k1])| Ok([x.mul(k0)?, x.mul(k1)?]))
        .collect::<Result<Vec<_>, HksError>>()?;
    if let Some(c) = ctr {
        let elems: u64 = extended.iter().map(|x| (x.num_towers() * x.degree()) as u64).sum();
        c.add_muls(2 * elems);
    }
    Ok(out)
}

/// Sums the per-digit partial products.
pub fn modup_reduce(partials: &[[RnsPolynomial; 2]], ctr: Option<&OpCounter>) -> Result<[RnsPolynomial; 2], HksError> {
    let (first, rest) = partials.split_first().ok_or_else(|| HksError::Shape("no partial products".into()))?;
    let mut acc = first.clone();
    for p in rest {
        for h in 0..2 {
            acc[h] = acc[h].add(&p[h])?;
        }
        if let Some(c) = ctr {
            c.add_adds(2 * (p[0].num_towers() * p[0].degree()) as u64);
        }
    }
    Ok(acc)
}

/// `P^-1 · ([c]_B − Conv_{C→B}([c]_C))`, evaluation domain in and out.
pub fn moddown(c: &RnsPolynomial, params: &HksParams, ctr: Option<&OpCounter>) -> Result<RnsPolynomial, HksError> {
    let kl = params.num_q_towers();
    expect(c, params.num_d_towers(), Domain::Evaluation, "moddown")?;
    let c_part = c.select(kl..params.num_d_towers()).to_coefficient(ctr)?;
    let converted = bconv(&c_part, params.moddown_table(), ctr)?.to_evaluation(ctr)?;
    let diff = c.select(0..kl).sub(&converted)?;
    if let Some(ctr) = ctr {
        let n = (kl * params.degree()) as u64;
        ctr.add_adds(n);
        ctr.add_muls(n);
    }
    Ok(diff.scale_towers(params.p_inv_mod_q()))
}

/// Full key switch of `c1` (k_l towers, evaluation domain) into `(d0, d1)`.
pub fn hybrid_key_switch(
    c1: &RnsPolynomial,
    evk: &EvaluationKey,
    params: &HksParams,
    ctr: Option<&OpCounter>,
) -> Result<(RnsPolynomial, RnsPolynomial), HksError> {
    let digits = digit_decompose(c1, params)?;
    let extended = digits
        .iter()
        .enumerate()
        .map(|(j, d)| modup(d, j, params, ctr))
        .collect::<Result<Vec<_>, _>>()?;
    let partials = apply_evk(&extended, evk, ctr)?;
    let [a0, a1] = modup_reduce(&partials, ctr)?;
    Ok((moddown(&a0, params, ctr)?, moddown(&a1, params, ctr)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hks::{count_ops, keygen, NoiseModel, SecretKey};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn stages_produce_the_expected_bases() {
        let p = HksParams::new(5, 6, 2, 3).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let c1 = RnsPolynomial::random(p.q_chain(), Domain::Evaluation, &mut rng);
        let digits = digit_decompose(&c1, &p).unwrap();
        assert_eq!(digits.len(), 3);
        assert!(digits.iter().all(|d| d.num_towers() == 2));
        let up = modup(&digits[1], 1, &p, None).unwrap();
        assert_eq!(up.moduli(), p.d_chain());
        // the digit's own towers pass through unchanged
        assert_eq!(up.tower(2).residues, digits[1].tower(0).residues);
        let down = moddown(&up, &p, None).unwrap();
        assert_eq!(down.moduli(), p.q_chain().to_vec());
    }

    #[test]
    fn counted_ops_match_the_closed_form() {
        for dnum in 1..=3 {
            let p = HksParams::new(5, 6, 3, dnum).unwrap();
            let mut rng = ChaCha20Rng::seed_from_u64(dnum as u64);
            let s = SecretKey::sample(&p, &mut rng);
            let evk = keygen(&p, &s, &s, 1, NoiseModel::Noiseless).unwrap();
            let c1 = RnsPolynomial::random(p.q_chain(), Domain::Evaluation, &mut rng);
            let ctr = OpCounter::new();
            hybrid_key_switch(&c1, &evk, &p, Some(&ctr)).unwrap();
            assert_eq!(ctr.total(), count_ops(&p).total(), "dnum={dnum}");
        }
    }

    #[test]
    fn mismatched_input_is_rejected() {
        let p = HksParams::new(4, 4, 2, 2).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let s = SecretKey::sample(&p, &mut rng);
        let evk = keygen(&p, &s, &s, 1, NoiseModel::Noiseless).unwrap();
        let short = RnsPolynomial::random(&p.q_chain()[..3], Domain::Evaluation, &mut rng);
        assert!(hybrid_key_switch(&short, &evk, &p, None).is_err());
    }
}
