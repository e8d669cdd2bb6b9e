//! Negacyclic multiplication through the NTT, checked against the
//! quadratic definition.

use hksflow::bench::verify::schoolbook_negacyclic;
use hksflow::rns::{intt, ntt, ntt_primes, Modulus};
use rand::{Rng, SeedableRng};

fn main() -> anyhow::Result<()> {
    let logn = 4;
    let q = ntt_primes(36, logn, 1)?[0];
    let m = Modulus::new(q, logn)?;
    println!("q = {q} ({} bits), 2N-th root of unity {}", m.bits(), m.root());

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let a: Vec<u64> = (0..16).map(|_| rng.gen_range(0..q)).collect();
    let b: Vec<u64> = (0..16).map(|_| rng.gen_range(0..8)).collect();

    let (mut x, mut y) = (a.clone(), b.clone());
    ntt(&mut x, &m);
    ntt(&mut y, &m);
    let mut c: Vec<u64> = x.iter().zip(&y).map(|(&u, &v)| m.mul(u, v)).collect();
    intt(&mut c, &m);

    let reference = schoolbook_negacyclic(&a, &b, &m);
    println!("a*b mod (X^16+1) = {:?}", &c[..4]);
    println!("matches schoolbook: {}", c == reference);
    Ok(())
}
