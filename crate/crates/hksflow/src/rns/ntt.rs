//! Negacyclic NTT over a single tower.
//!
//! Forward transform is Cooley-Tukey with powers of the 2N-th root stored in
//! bit-reversed order; the inverse is Gentleman-Sande followed by the N^-1
//! scaling. Evaluation-domain slots come out in bit-reversed order, which is
//! irrelevant for pointwise products.

use super::Modulus;

#[derive(Clone, Debug)]
pub(crate) struct NttTables {
    psi_rev: Vec<u64>,
    psi_inv_rev: Vec<u64>,
    // Shoup companions floor(w·2^64/q) of the twiddles above.
    psi_rev_shoup: Vec<u64>,
    psi_inv_rev_shoup: Vec<u64>,
    n_inv: u64,
    n_inv_shoup: u64,
}

fn shoup(w: u64, q: u64) -> u64 {
    (((w as u128) << 64) / q as u128) as u64
}

/// `a·w mod q` given `ws = shoup(w, q)`; needs q < 2^63.
#[inline(always)]
fn add(a: u64, b: u64, q: u64) -> u64 {
    // min() picks the reduced value without a data-dependent branch.
    let s = a + b;
    s.min(s.wrapping_sub(q))
}

#[inline(always)]
fn sub(a: u64, b: u64, q: u64) -> u64 {
    let d = a.wrapping_sub(b);
    d.min(d.wrapping_add(q))
}

#[inline(always)]
fn mul_shoup(a: u64, w: u64, ws: u64, q: u64) -> u64 {
    let hi = ((a as u128 * ws as u128) >> 64) as u64;
    let r = a.wrapping_mul(w).wrapping_sub(hi.wrapping_mul(q));
    r.min(r.wrapping_sub(q))
}

pub fn bit_reverse(x: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        x.reverse_bits() >> (usize::BITS - bits)
    }
}

impl NttTables {
    pub(crate) fn new(m: &Modulus) -> Self {
        let logn = m.degree_log2();
        let n = 1usize << logn;
        let psi = m.root();
        let psi_inv = m.inv(psi);
        let mut pw = vec![0u64; n];
        let mut pw_inv = vec![0u64; n];
        let (mut a, mut b) = (1u64, 1u64);
        for i in 0..n {
            pw[i] = a;
            pw_inv[i] = b;
            a = m.mul(a, psi);
            b = m.mul(b, psi_inv);
        }
        let mut psi_rev = vec![0u64; n];
        let mut psi_inv_rev = vec![0u64; n];
        for i in 0..n {
            psi_rev[i] = pw[bit_reverse(i, logn)];
            psi_inv_rev[i] = pw_inv[bit_reverse(i, logn)];
        }
        let q = m.value();
        let n_inv = m.inv(n as u64);
        NttTables {
            psi_rev_shoup: psi_rev.iter().map(|&w| shoup(w, q)).collect(),
            psi_inv_rev_shoup: psi_inv_rev.iter().map(|&w| shoup(w, q)).collect(),
            psi_rev,
            psi_inv_rev,
            n_inv,
            n_inv_shoup: shoup(n_inv, q),
        }
    }
}

/// In-place forward negacyclic NTT of one tower.
pub fn ntt(a: &mut [u64], m: &Modulus) {
    let n = a.len();
    assert_eq!(n, m.degree(), "tower length does not match modulus degree");
    let tables = m.tables();
    let q = m.value();
    let mut t = n;
    let mut groups = 1;
    while groups < n {
        t >>= 1;
        for (i, block) in a.chunks_exact_mut(2 * t).enumerate() {
            let (w, ws) = (tables.psi_rev[groups + i], tables.psi_rev_shoup[groups + i]);
            let (lo, hi) = block.split_at_mut(t);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let u = *x;
                let v = mul_shoup(*y, w, ws, q);
                *x = add(u, v, q);
                *y = sub(u, v, q);
            }
        }
        groups <<= 1;
    }
}

/// In-place inverse negacyclic NTT of one tower, including the N^-1 factor.
pub fn intt(a: &mut [u64], m: &Modulus) {
    let n = a.len();
    assert_eq!(n, m.degree(), "tower length does not match modulus degree");
    let tables = m.tables();
    let q = m.value();
    let mut t = 1;
    let mut groups = n;
    while groups > 1 {
        let h = groups >> 1;
        for (i, block) in a.chunks_exact_mut(2 * t).enumerate() {
            let (w, ws) = (tables.psi_inv_rev[h + i], tables.psi_inv_rev_shoup[h + i]);
            let (lo, hi) = block.split_at_mut(t);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = add(u, v, q);
                *y = mul_shoup(sub(u, v, q), w, ws, q);
            }
        }
        t <<= 1;
        groups = h;
    }
    for x in a.iter_mut() {
        *x = mul_shoup(*x, tables.n_inv, tables.n_inv_shoup, q);
    }
}

/// Butterfly count of one transform: (N/2)·log2 N.
pub fn butterflies(degree_log2: u32) -> u64 {
    (1u64 << degree_log2) / 2 * degree_log2 as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rns::ntt_primes;

    fn schoolbook(a: &[u64], b: &[u64], m: &Modulus) -> Vec<u64> {
        let n = a.len();
        let mut c = vec![0u64; n];
        for i in 0..n {
            for j in 0..n {
                let p = m.mul(a[i], b[j]);
                if i + j < n {
                    c[i + j] = m.add(c[i + j], p);
                } else {
                    c[i + j - n] = m.sub(c[i + j - n], p);
                }
            }
        }
        c
    }

    #[test]
    fn constant_maps_to_constant() {
        let m = Modulus::new(12289, 4).unwrap();
        let mut a = vec![0u64; 16];
        a[0] = 77;
        ntt(&mut a, &m);
        assert!(a.iter().all(|&x| x == 77));
        intt(&mut a, &m);
        assert_eq!(a[0], 77);
        assert!(a[1..].iter().all(|&x| x == 0));
    }

    #[test]
    fn x_times_x_pow_n_minus_1_is_minus_one() {
        let m = Modulus::new(ntt_primes(36, 3, 1).unwrap()[0], 3).unwrap();
        let mut a = vec![0u64; 8];
        let mut b = vec![0u64; 8];
        a[1] = 1;
        b[7] = 1;
        ntt(&mut a, &m);
        ntt(&mut b, &m);
        let mut c: Vec<u64> = a.iter().zip(&b).map(|(x, y)| m.mul(*x, *y)).collect();
        intt(&mut c, &m);
        assert_eq!(c[0], m.value() - 1);
        assert!(c[1..].iter().all(|&x| x == 0));
    }

    #[test]
    fn product_matches_schoolbook() {
        let m = Modulus::new(ntt_primes(36, 4, 1).unwrap()[0], 4).unwrap();
        let a: Vec<u64> = (0..16).map(|i| (i * i * 977 + 3) % m.value()).collect();
        let b: Vec<u64> = (0..16).map(|i| m.value() - 1 - i * 31).collect();
        let expect = schoolbook(&a, &b, &m);
        let (mut fa, mut fb) = (a.clone(), b.clone());
        ntt(&mut fa, &m);
        ntt(&mut fb, &m);
        let mut c: Vec<u64> = fa.iter().zip(&fb).map(|(x, y)| m.mul(*x, *y)).collect();
        intt(&mut c, &m);
        assert_eq!(c, expect);
    }

    #[test]
    fn bit_reverse_small() {
        assert_eq!(bit_reverse(1, 3), 4);
        assert_eq!(bit_reverse(6, 3), 3);
        assert_eq!(bit_reverse(0, 0), 0);
    }
}
