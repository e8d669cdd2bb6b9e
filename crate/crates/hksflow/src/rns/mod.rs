//! Word-size modular arithmetic, negacyclic NTT and fast basis conversion.

mod bconv;
mod counter;
mod modulus;
mod ntt;
mod poly;

pub use bconv::{bconv, BasisTable};
pub use counter::OpCounter;
pub use modulus::{is_prime, mod_mul, ntt_primes, Modulus, MAX_MODULUS_BITS};
pub use ntt::{bit_reverse, butterflies, intt, ntt};
pub use poly::{Domain, RnsPolynomial, Tower};

/// Default modulus width for generated chains.
pub const DEFAULT_MODULUS_BITS: u32 = 36;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RnsError {
    #[error("{0} is not a prime below 2^62")]
    NotPrime(u64),
    #[error("{value} is not congruent to 1 mod 2^{}", degree_log2 + 1)]
    NotNttFriendly { value: u64, degree_log2: u32 },
    #[error("unsupported ring degree 2^{0}")]
    Degree(u32),
    #[error("unsupported modulus width {0}")]
    Width(u32),
    #[error("fewer than {count} NTT primes of {bits} bits exist for N=2^{degree_log2}")]
    PrimesExhausted { bits: u32, degree_log2: u32, count: usize },
    #[error("expected {expected:?} domain, found {found:?}")]
    Domain { expected: Domain, found: Domain },
    #[error("operands are over different RNS bases")]
    BasisMismatch,
    #[error("tower length {found}, expected {expected}")]
    Length { expected: usize, found: usize },
    #[error("residue {residue} not reduced modulo {modulus}")]
    Unreduced { residue: u64, modulus: u64 },
}
