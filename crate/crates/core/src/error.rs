use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("expected a positive integer, got 0")]
    Zero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a power of an odd prime")]
    NotOddPrimePower(String),
    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("field of order {p}^{k} exceeds the enumeration budget")]
    FieldTooLarge { p: u64, k: u32 },
    #[error("{m} is not coprime to {modulus}")]
    NotCoprime { m: u64, modulus: u64 },
    #[error("R_{{{m}}} does not permute P^1: gcd({m}, {modulus}) != 1")]
    NotAPermutation { m: u64, modulus: u64 },
    #[error("table is not a bijection (m = {m})")]
    NotBijective { m: u64 },
    #[error("zero has no inverse or quadratic character")]
    ZeroElement,
    #[error("prime {p} divides {m}")]
    PrimeDivides { p: u64, m: u64 },
    #[error("{d} is not a proper divisor of {modulus}")]
    InvalidDivisor { d: u64, modulus: u64 },
    #[error("character must be 1 or -1, got {0}")]
    InvalidCharacter(i64),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no Rédei involution with {fixed} fixed points")]
    NoSuchInvolution { fixed: u64 },
}
