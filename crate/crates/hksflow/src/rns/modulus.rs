//! Word-size prime moduli with Barrett reduction and lazily built NTT tables.

use std::fmt;
use std::sync::OnceLock;

use super::ntt::NttTables;
use super::RnsError;

/// Largest supported modulus width in bits.
pub const MAX_MODULUS_BITS: u32 = 62;

/// An NTT-friendly prime `q < 2^62` with `q ≡ 1 (mod 2N)`.
///
/// Barrett constants are computed eagerly; twiddle tables are built on first
/// use so that large parameter sets can carry moduli without paying for tables
/// they never touch.
pub struct Modulus {
    value: u64,
    bits: u32,
    barrett_mu: u128,
    degree_log2: u32,
    root: u64,
    tables: OnceLock<NttTables>,
}

impl Clone for Modulus {
    fn clone(&self) -> Self {
        let tables = OnceLock::new();
        if let Some(t) = self.tables.get() {
            let _ = tables.set(t.clone());
        }
        Modulus { tables, ..*self }
    }
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Modulus")
            .field("value", &self.value)
            .field("degree_log2", &self.degree_log2)
            .field("root", &self.root)
            .finish()
    }
}

impl PartialEq for Modulus {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.degree_log2 == other.degree_log2
    }
}
impl Eq for Modulus {}

impl Modulus {
    /// Validates `value` for ring degree `2^degree_log2` and finds a primitive
    /// 2N-th root of unity.
    pub fn new(value: u64, degree_log2: u32) -> Result<Self, RnsError> {
        if degree_log2 == 0 || degree_log2 > 30 {
            return Err(RnsError::Degree(degree_log2));
        }
        if value < 3 || value >> MAX_MODULUS_BITS != 0 || !is_prime(value) {
            return Err(RnsError::NotPrime(value));
        }
        let two_n = 2u64 << degree_log2;
        if !(value - 1).is_multiple_of(two_n) {
            return Err(RnsError::NotNttFriendly { value, degree_log2 });
        }
        let bits = 64 - value.leading_zeros();
        let barrett_mu = (1u128 << (2 * bits)) / value as u128;
        let mut m = Modulus {
            value,
            bits,
            barrett_mu,
            degree_log2,
            root: 0,
            tables: OnceLock::new(),
        };
        m.root = m.find_root(two_n);
        Ok(m)
    }

    fn find_root(&self, two_n: u64) -> u64 {
        let exp = (self.value - 1) / two_n;
        let half = two_n / 2;
        for g in 2..self.value {
            let r = self.pow(g, exp);
            if self.pow(r, half) == self.value - 1 {
                return r;
            }
        }
        unreachable!("a prime congruent to 1 mod 2N always has a primitive 2N-th root")
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn degree_log2(&self) -> u32 {
        self.degree_log2
    }

    pub fn degree(&self) -> usize {
        1 << self.degree_log2
    }

    /// Primitive 2N-th root of unity used for the negacyclic transform.
    pub fn root(&self) -> u64 {
        self.root
    }

    pub fn barrett_mu(&self) -> u128 {
        self.barrett_mu
    }

    pub(crate) fn tables(&self) -> &NttTables {
        self.tables.get_or_init(|| NttTables::new(self))
    }

    /// Barrett reduction of `x < 2^(2·bits)`.
    #[inline]
    pub fn reduce_u128(&self, x: u128) -> u64 {
        debug_assert!(x >> (2 * self.bits) == 0);
        let q1 = x >> (self.bits - 1);
        let q3 = (q1 * self.barrett_mu) >> (self.bits + 1);
        // Barrett leaves r < 3q; two branch-free conditional subtractions.
        let r = (x - q3 * self.value as u128) as u64;
        let r = r.min(r.wrapping_sub(self.value));
        r.min(r.wrapping_sub(self.value))
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.value
    }

    /// Reduces a signed integer into `[0, q)`.
    pub fn reduce_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.value as i64) as u64
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.value && b < self.value);
        self.reduce_u128(a as u128 * b as u128)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        s.min(s.wrapping_sub(self.value))
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let d = a.wrapping_sub(b);
        d.min(d.wrapping_add(self.value))
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.value - a
        }
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.value;
        base %= self.value;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse by Fermat; `a` must be nonzero mod q.
    pub fn inv(&self, a: u64) -> u64 {
        let a = a % self.value;
        assert!(a != 0, "zero has no inverse");
        self.pow(a, self.value - 2)
    }

    /// Signed representative in `(-q/2, q/2]`.
    pub fn center(&self, a: u64) -> i64 {
        if a > self.value / 2 {
            a as i64 - self.value as i64
        } else {
            a as i64
        }
    }
}

/// `(a·b) mod m` for residues already reduced mod `m`.
pub fn mod_mul(a: u64, b: u64, m: &Modulus) -> u64 {
    m.mul(a, b)
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, b, m);
        }
        b = mul_mod_u64(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in SMALL {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The `count` smallest primes `q > 2^(bits-1)` with `q ≡ 1 (mod 2N)`, ascending.
pub fn ntt_primes(bits: u32, degree_log2: u32, count: usize) -> Result<Vec<u64>, RnsError> {
    if !(4..=MAX_MODULUS_BITS).contains(&bits) {
        return Err(RnsError::Width(bits));
    }
    let two_n = 2u64 << degree_log2;
    let lower = 1u64 << (bits - 1);
    let upper = 1u64 << bits;
    let mut q = (lower / two_n + 1) * two_n + 1;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if q >= upper {
            return Err(RnsError::PrimesExhausted { bits, degree_log2, count });
        }
        if is_prime(q) {
            out.push(q);
        }
        q += two_n;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime(12289));
        assert!(!is_prime(3215031751)); // strong pseudoprime to bases 2,3,5,7
        assert!(is_prime((1u64 << 61) - 1));
    }

    #[test]
    fn root_orders() {
        let m = Modulus::new(12289, 10).unwrap();
        assert_eq!(m.pow(m.root(), 2048), 1);
        assert_eq!(m.pow(m.root(), 1024), 12288);
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(matches!(Modulus::new(12289, 13), Err(RnsError::NotNttFriendly { .. })));
        assert!(matches!(Modulus::new(12287, 4), Err(RnsError::NotPrime(_))));
    }

    #[test]
    fn barrett_edges() {
        let m = Modulus::new(ntt_primes(62, 4, 1).unwrap()[0], 4).unwrap();
        let q = m.value();
        assert_eq!(m.mul(q - 1, q - 1), 1);
        assert_eq!(m.mul(0, q - 1), 0);
        assert_eq!(m.mul(1, q - 1), q - 1);
    }

    #[test]
    fn primes_are_ascending_and_friendly() {
        let ps = ntt_primes(36, 12, 8).unwrap();
        assert!(ps.windows(2).all(|w| w[0] < w[1]));
        for p in ps {
            assert!(p > 1 << 35 && p < 1 << 36);
            assert_eq!(p % (1 << 13), 1);
        }
    }
}
