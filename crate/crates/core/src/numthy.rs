//! Exact integer kernel: factorization, totient, multiplicative order,
//! p-adic valuations and gcds of the form `gcd(m^r - 1, n)`.
//!
//! Everything here works on `u64` with `u128` intermediates. Quantities that
//! can outgrow 64 bits (valuations of `m^θ - 1` with large `θ`) escalate to
//! [`BigUint`] internally; no function ever materializes `m^r` for a caller
//! supplied `r`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::{Error, Result};

const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

/// `value = Π p_i^{α_i}` with primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimeFactorization {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl PrimeFactorization {
    pub fn value(&self) -> u64 {
        self.value
    }

    /// `(prime, exponent)` pairs, primes ascending.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Exponent of `p` in the value (0 when `p` does not divide it).
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    pub fn euler_phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    /// All positive divisors, ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.divisor_count());
        let mut exps = vec![0u32; self.factors.len()];
        loop {
            out.push(
                self.factors
                    .iter()
                    .zip(&exps)
                    .map(|(&(p, _), &e)| p.pow(e))
                    .product(),
            );
            // odometer over the exponent vector
            let mut i = 0;
            loop {
                if i == exps.len() {
                    out.sort_unstable();
                    return out;
                }
                if exps[i] < self.factors[i].1 {
                    exps[i] += 1;
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
    }

    pub fn divisor_count(&self) -> usize {
        self.factors.iter().map(|&(_, e)| e as usize + 1).product()
    }

    fn from_unsorted(value: u64, mut primes: Vec<u64>) -> Self {
        primes.sort_unstable();
        let mut factors: Vec<(u64, u32)> = Vec::new();
        for p in primes {
            match factors.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => factors.push((p, 1)),
            }
        }
        PrimeFactorization { value, factors }
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

#[inline]
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn pow_mod(base: u64, mut exp: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut base = base % n;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for the full 64-bit range.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Brent's variant of Pollard rho. `n` must be odd and composite.
fn rho_split(n: u64) -> u64 {
    for c in 1.. {
        let f = |x: u64| ((mul_mod(x, x, n) as u128 + c as u128) % n as u128) as u64;
        let (mut x, mut y, mut ys) = (2u64, 2u64, 2u64);
        let mut g = 1u64;
        let mut r = 1u64;
        let mut q = 1u64;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            // batch overshot: replay one step at a time
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

fn collect_prime_factors(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = rho_split(n);
    collect_prime_factors(d, out);
    collect_prime_factors(n / d, out);
}

pub fn factorize(n: u64) -> Result<PrimeFactorization> {
    if n == 0 {
        return Err(Error::Zero);
    }
    let mut primes = Vec::new();
    let mut rest = n;
    while rest.is_multiple_of(2) {
        primes.push(2);
        rest /= 2;
    }
    let mut p = 3u64;
    while p <= TRIAL_DIVISION_LIMIT && p * p <= rest {
        while rest.is_multiple_of(p) {
            primes.push(p);
            rest /= p;
        }
        p += 2;
    }
    if rest > 1 {
        if p * p > rest {
            primes.push(rest);
        } else {
            collect_prime_factors(rest, &mut primes);
        }
    }
    Ok(PrimeFactorization::from_unsorted(n, primes))
}

pub fn euler_phi(n: u64) -> Result<u64> {
    Ok(factorize(n)?.euler_phi())
}

/// Factorization of `φ(n)` assembled from the factorization of `n`.
pub fn phi_factorization(n: &PrimeFactorization) -> PrimeFactorization {
    let mut primes = Vec::new();
    for &(p, e) in n.factors() {
        primes.extend(std::iter::repeat_n(p, e as usize - 1));
        let pm1 = factorize(p - 1).expect("p >= 2");
        for &(r, f) in pm1.factors() {
            primes.extend(std::iter::repeat_n(r, f as usize));
        }
    }
    PrimeFactorization::from_unsorted(n.euler_phi(), primes)
}

/// Order of `m` modulo `d`, refining down from `φ(d)` one prime at a time.
/// `phi` must be the factorization of `φ(d)`.
pub fn mult_order_with(m: u64, d: u64, phi: &PrimeFactorization) -> u64 {
    if d == 1 {
        return 1;
    }
    let mut t = phi.value();
    for &(r, _) in phi.factors() {
        while t.is_multiple_of(r) && pow_mod(m, t / r, d) == 1 {
            t /= r;
        }
    }
    t
}

/// Least `θ >= 1` with `m^θ ≡ 1 (mod d)`.
pub fn mult_order(m: u64, d: u64) -> Result<u64> {
    if d == 0 {
        return Err(Error::Zero);
    }
    if gcd(m, d) != 1 {
        return Err(Error::NotCoprime { m, modulus: d });
    }
    let phi = phi_factorization(&factorize(d)?);
    Ok(mult_order_with(m, d, &phi))
}

/// `ν_p(z)`: the exponent of the prime `p` in `z`.
pub fn nu(p: u64, z: u64) -> Result<u32> {
    if z == 0 {
        return Err(Error::Zero);
    }
    if p < 2 {
        return Err(Error::NotPrime(p));
    }
    let mut z = z;
    let mut v = 0;
    while z.is_multiple_of(p) {
        z /= p;
        v += 1;
    }
    Ok(v)
}

fn nu_big(p: u64, z: &BigUint) -> u32 {
    let p = BigUint::from(p);
    let mut z = z.clone();
    let mut v = 0;
    while (&z % &p).is_zero() {
        z /= &p;
        v += 1;
    }
    v
}

// ν_p(m^e - 1) for odd prime p with m^e ≡ 1 (mod p). The residue is taken
// modulo a growing power of p until it stops vanishing.
fn nu_pow_minus_one_exact(p: u64, m: u64, e: u64) -> u32 {
    let mut k = 1u32;
    let mut pk = p;
    while let Some(next) = pk.checked_mul(p) {
        pk = next;
        k += 1;
    }
    let r = pow_mod(m, e, pk);
    if r != 1 {
        return nu(p, (r + pk - 1) % pk).expect("nonzero residue");
    }
    let base = BigUint::from(m);
    let exp = BigUint::from(e);
    let pb = BigUint::from(p);
    loop {
        k *= 2;
        let modulus = pb.pow(k);
        let r = base.modpow(&exp, &modulus);
        if !r.is_one() {
            let diff = (r + &modulus - 1u32) % &modulus;
            return nu_big(p, &diff);
        }
    }
}

/// `ν_p(m^r - 1)` via lifting the exponent. Never forms `m^r`.
pub fn val_power_minus_one(p: u64, m: u64, r: u64) -> Result<u32> {
    if r == 0 {
        return Err(Error::Zero);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m.is_multiple_of(p) {
        return Err(Error::PrimeDivides { p, m });
    }
    if m == 1 {
        // 1^r - 1 = 0 has no finite valuation
        return Err(Error::Zero);
    }
    if p == 2 {
        // m odd: ν_2(m²-1) = ν_2(m-1) + ν_2(m+1)
        let below = nu(2, m - 1)?;
        return Ok(if r % 2 == 1 {
            below
        } else {
            below + nu(2, m + 1)? + nu(2, r)? - 1
        });
    }
    let theta = mult_order(m, p)?;
    if !r.is_multiple_of(theta) {
        return Ok(0);
    }
    Ok(nu_pow_minus_one_exact(p, m, theta) + nu(p, r / theta)?)
}

/// `gcd(m^r - 1, n)` through `m^r mod n`.
pub fn gcd_mpow_minus_one(m: u64, r: u64, n: u64) -> u64 {
    if n == 1 {
        return 1;
    }
    let x = (pow_mod(m, r, n) + n - 1) % n;
    gcd(x, n)
}

/// Splits `q = p^e` for a prime `p`. Inputs beyond 64 bits are only
/// recognized when `p` is below the trial-division bound.
pub fn prime_power_of(q: &BigUint) -> Option<(u64, u32)> {
    if let Some(small) = q.to_u64() {
        if small < 2 {
            return None;
        }
        let f = factorize(small).ok()?;
        return match f.factors() {
            [(p, e)] => Some((*p, *e)),
            _ => None,
        };
    }
    let p = (2..=TRIAL_DIVISION_LIMIT).find(|&d| (q % d).is_zero())?;
    let pb = BigUint::from(p);
    let mut rest = q.clone();
    let mut e = 0;
    while (&rest % &pb).is_zero() {
        rest /= &pb;
        e += 1;
    }
    rest.is_one().then_some((p, e))
}

/// Odd prime powers `q = p^k <= max` as `(q, p, k)`, ascending in `q`.
pub fn odd_prime_powers(max: u64) -> Vec<(u64, u64, u32)> {
    let mut out = Vec::new();
    for p in (3..=max).step_by(2).filter(|&p| is_prime(p)) {
        let (mut q, mut k) = (p, 1);
        loop {
            out.push((q, p, k));
            match q.checked_mul(p) {
                Some(next) if next <= max => (q, k) = (next, k + 1),
                _ => break,
            }
        }
    }
    out.sort_unstable();
    out
}
