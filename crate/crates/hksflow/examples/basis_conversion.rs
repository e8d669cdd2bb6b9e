//! Fast base conversion from a digit's primes to the rest of the basis. The
//! result is exact up to a small multiple of the source modulus.

use hksflow::hks::verify::Crt;
use hksflow::hks::HksParams;
use hksflow::rns::{bconv, Domain, RnsPolynomial};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::SeedableRng;

fn main() -> anyhow::Result<()> {
    let params = HksParams::new(10, 6, 2, 2)?;
    let table = params.modup_table(0);
    println!("digit 0: {} source towers -> {} target towers", table.alpha(), table.beta());

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let x = RnsPolynomial::random(table.source(), Domain::Coefficient, &mut rng);
    let y = bconv(&x, table, None)?;

    let crt = Crt::new(table.source());
    let q = crt.modulus();
    let mut hist = vec![0usize; table.alpha()];
    for c in 0..params.degree() {
        let r: Vec<u64> = x.towers().iter().map(|t| t.residues[c]).collect();
        let big = crt.reconstruct(&r);
        let p = &table.target()[0];
        let pv = BigUint::from(p.value());
        let diff = p.sub(y.tower(0).residues[c], (&big % &pv).to_u64().unwrap());
        let u = p.mul(diff, p.inv((q % &pv).to_u64().unwrap()));
        hist[u as usize] += 1;
    }
    println!("overflow multiple u (y = x + u*Q) over {} coefficients:", params.degree());
    for (u, n) in hist.iter().enumerate() {
        println!("  u={u}: {n}");
    }
    Ok(())
}
