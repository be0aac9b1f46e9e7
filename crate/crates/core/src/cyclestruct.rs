//! Cycle structures computed from `q - χ` alone.
//!
//! A Rédei permutation `R_{m,a}` on `P^1(F_q)` depends, up to cycle
//! structure, only on `m` and the quadratic character `χ = χ(a)`. Every
//! question in this module is therefore a question about the integer
//! `N = q - χ`, wrapped up in [`Modulus`].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde_json::{Map, Value};

use crate::numthy::{
    self, gcd, gcd_mpow_minus_one, lcm, mult_order_with, nu, phi_factorization,
    val_power_minus_one, PrimeFactorization,
};
use crate::{Error, Result};

/// Quadratic character of the Rédei parameter `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Chi {
    /// `χ = 1`
    Square,
    /// `χ = -1`
    NonSquare,
}

impl Chi {
    pub const BOTH: [Chi; 2] = [Chi::NonSquare, Chi::Square];

    pub fn sign(self) -> i64 {
        match self {
            Chi::Square => 1,
            Chi::NonSquare => -1,
        }
    }

    pub fn from_sign(sign: i64) -> Result<Chi> {
        match sign {
            1 => Ok(Chi::Square),
            -1 => Ok(Chi::NonSquare),
            other => Err(Error::InvalidCharacter(other)),
        }
    }

    /// Extra fixed points beyond the divisor sum: `1 + χ`.
    pub fn extra_fixed(self) -> u64 {
        match self {
            Chi::Square => 2,
            Chi::NonSquare => 0,
        }
    }

    /// `q - χ`, or `None` on overflow.
    pub fn modulus_of(self, q: u64) -> Option<u64> {
        match self {
            Chi::Square => q.checked_sub(1),
            Chi::NonSquare => q.checked_add(1),
        }
    }
}

impl fmt::Display for Chi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.sign())
    }
}

/// Multiset of cycle lengths: `length -> multiplicity`, zero multiplicities
/// never stored. Multiplicities are arbitrary precision (`q = 3^60` has
/// cycle counts near `10^26`).
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CycleStructure {
    counts: BTreeMap<u64, BigUint>,
}

impl CycleStructure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts<I, C>(counts: I) -> Self
    where
        I: IntoIterator<Item = (u64, C)>,
        C: Into<BigUint>,
    {
        let mut s = Self::new();
        for (len, c) in counts {
            s.add(len, c);
        }
        s
    }

    /// Adds `count` cycles of length `len`.
    pub fn add(&mut self, len: u64, count: impl Into<BigUint>) {
        let count = count.into();
        if count.is_zero() {
            return;
        }
        *self.counts.entry(len).or_default() += count;
    }

    /// Removes `count` fixed points. Fails if fewer are present.
    pub fn remove_fixed(&mut self, count: u64) -> Result<()> {
        let have = self.counts.get(&1).cloned().unwrap_or_default();
        let count = BigUint::from(count);
        if have < count {
            return Err(Error::Precondition(format!(
                "cannot remove {count} fixed points from {have}"
            )));
        }
        let left = have - count;
        if left.is_zero() {
            self.counts.remove(&1);
        } else {
            self.counts.insert(1, left);
        }
        Ok(())
    }

    pub fn multiplicity(&self, len: u64) -> BigUint {
        self.counts.get(&len).cloned().unwrap_or_default()
    }

    pub fn fixed_points(&self) -> BigUint {
        self.multiplicity(1)
    }

    /// `Σ length · multiplicity`: the size of the underlying domain.
    pub fn total_mass(&self) -> BigUint {
        self.counts.iter().map(|(&l, c)| c * l).sum()
    }

    /// Fixed points of the `r`-th iterate: `Σ_{ℓ | r} ℓ · multiplicity(ℓ)`.
    pub fn fixed_points_of_iterate(&self, r: u64) -> BigUint {
        self.counts
            .iter()
            .filter(|(&l, _)| r.is_multiple_of(l))
            .map(|(&l, c)| c * l)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &BigUint)> {
        self.counts.iter().map(|(&l, c)| (l, c))
    }

    pub fn lengths(&self) -> impl Iterator<Item = u64> + '_ {
        self.counts.keys().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// True when every cycle has length 1 or 2.
    pub fn is_involutive(&self) -> bool {
        self.counts.keys().all(|&l| l <= 2)
    }

    /// `{"1":2,"4":2,"20":2}` with keys ascending numerically. Counts that
    /// exceed 64 bits are emitted as decimal strings.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (l, c) in &self.counts {
            let v = match c.to_u64() {
                Some(small) => Value::from(small),
                None => Value::from(c.to_string()),
            };
            map.insert(l.to_string(), v);
        }
        Value::Object(map)
    }

    /// Human-readable form, e.g. `2×{•} ⊕ 2×Cyc(4) ⊕ 2×Cyc(20)`.
    pub fn pretty(&self) -> String {
        self.counts
            .iter()
            .map(|(&l, c)| match l {
                1 => format!("{c}×{{•}}"),
                _ => format!("{c}×Cyc({l})"),
            })
            .collect::<Vec<_>>()
            .join(" ⊕ ")
    }
}

impl fmt::Display for CycleStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

#[derive(Debug, Clone)]
struct DivisorInfo {
    d: u64,
    phi: PrimeFactorization,
}

/// `N = q - χ` with its factorization and per-divisor totient data.
#[derive(Debug, Clone)]
pub struct Modulus {
    q: u64,
    chi: Chi,
    n: u64,
    factorization: PrimeFactorization,
    divisors: Vec<DivisorInfo>,
}

impl Modulus {
    /// `q` must be odd and at least 3. Whether `q` is a prime power is not
    /// checked here; nothing in this module depends on it.
    pub fn new(q: u64, chi: Chi) -> Result<Modulus> {
        if q < 3 || q.is_multiple_of(2) {
            return Err(Error::NotOddPrimePower(q.to_string()));
        }
        let n = chi
            .modulus_of(q)
            .ok_or_else(|| Error::Precondition(format!("q - χ overflows for q = {q}")))?;
        let factorization = numthy::factorize(n)?;
        let divisors = factorization
            .divisors()
            .into_iter()
            .map(|d| DivisorInfo {
                d,
                phi: phi_factorization(&numthy::factorize(d).expect("d >= 1")),
            })
            .collect();
        Ok(Modulus {
            q,
            chi,
            n,
            factorization,
            divisors,
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn chi(&self) -> Chi {
        self.chi
    }

    /// `q - χ`.
    pub fn value(&self) -> u64 {
        self.n
    }

    pub fn factorization(&self) -> &PrimeFactorization {
        &self.factorization
    }

    /// Divisors of `q - χ`, ascending.
    pub fn divisors(&self) -> impl Iterator<Item = u64> + '_ {
        self.divisors.iter().map(|info| info.d)
    }

    /// `m mod (q - χ)`.
    pub fn reduce(&self, m: u64) -> u64 {
        m % self.n
    }

    /// Whether `R_{m,a}` permutes `P^1(F_q)`.
    pub fn is_permutation(&self, m: u64) -> bool {
        gcd(m % self.n, self.n) == 1
    }

    fn require_permutation(&self, m: u64) -> Result<()> {
        if self.is_permutation(m) {
            Ok(())
        } else {
            Err(Error::NotAPermutation { m, modulus: self.n })
        }
    }

    /// Every `1 <= m < q - χ` giving a permutation, ascending.
    pub fn valid_exponents(&self) -> Vec<u64> {
        (1..self.n).filter(|&m| gcd(m, self.n) == 1).collect()
    }

    fn order_mod_divisor(&self, m: u64, info: &DivisorInfo) -> u64 {
        mult_order_with(m % info.d, info.d, &info.phi)
    }

    /// `o_{q-χ}(m)`.
    pub fn order(&self, m: u64) -> Result<u64> {
        self.require_permutation(m)?;
        let last = self.divisors.last().expect("N has itself as a divisor");
        Ok(self.order_mod_divisor(m, last))
    }

    /// `(1+χ)×{•} ⊕ ⨁_{d | q-χ} (φ(d)/o_d(m)) × Cyc(o_d(m))`.
    pub fn structure(&self, m: u64) -> Result<CycleStructure> {
        self.require_permutation(m)?;
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for info in &self.divisors {
            let len = self.order_mod_divisor(m, info);
            *counts.entry(len).or_default() += info.phi.value() / len;
        }
        *counts.entry(1).or_default() += self.chi.extra_fixed();
        Ok(CycleStructure::from_counts(counts))
    }

    /// `gcd(m - 1, q - χ) + χ + 1`.
    pub fn fixed_count(&self, m: u64) -> Result<u64> {
        self.fixed_count_iter(m, 1)
    }

    /// Fixed points of the `r`-th iterate: `gcd(m^r - 1, q - χ) + χ + 1`.
    pub fn fixed_count_iter(&self, m: u64, r: u64) -> Result<u64> {
        self.require_permutation(m)?;
        if r == 0 {
            return Err(Error::Zero);
        }
        Ok(gcd_mpow_minus_one(m, r, self.n) + self.chi.extra_fixed())
    }

    /// Compares `gcd(m^r - 1, q - χ)` with `gcd(n^r - 1, q - χ)` for every
    /// `r` dividing `lcm(o_{q-χ}(m), o_{q-χ}(n))`.
    ///
    /// Cycle lengths all divide the order, and the fixed-point count of the
    /// `r`-th iterate only depends on which lengths divide `r`, so this
    /// finite set of `r` decides equality for all `r`.
    pub fn same_structure_criterion(&self, m: u64, n: u64) -> Result<bool> {
        let l = lcm(self.order(m)?, self.order(n)?);
        let rs = numthy::factorize(l)?.divisors();
        Ok(rs
            .into_iter()
            .all(|r| gcd_mpow_minus_one(m, r, self.n) == gcd_mpow_minus_one(n, r, self.n)))
    }

    /// Membership of `(m, n)` in `S_χ^q` by the prime-by-prime
    /// characterization. Pairs where either side is not a permutation are
    /// not members.
    pub fn in_s(&self, m: u64, n: u64) -> bool {
        let (m, n) = (self.reduce(m), self.reduce(n));
        if !self.is_permutation(m) || !self.is_permutation(n) {
            return false;
        }
        if m == n {
            return true;
        }
        let d = self.n / gcd(m.abs_diff(n), self.n);
        self.factorization
            .factors()
            .iter()
            .filter(|&&(p, _)| d.is_multiple_of(p))
            .all(|&(p, alpha)| {
                // orders mod p agree automatically when p^α does not divide d
                let full = nu(p, d).expect("d >= 1") == alpha;
                prime_conditions(p, alpha, m, n, full)
            })
    }

    /// `(m, m + (q-χ)/2) ∈ S_χ^q` iff `ν_2(q-χ) > 1` and
    /// `m ≢ 1 (mod 2^{ν_2(q-χ)-1})`.
    pub fn half_shift_in_s(&self, m: u64) -> Result<bool> {
        self.require_permutation(m)?;
        let alpha = self.factorization.exponent_of(2);
        if alpha <= 1 {
            return Ok(false);
        }
        Ok(m % (1 << (alpha - 1)) != 1)
    }
}

// ν_p(x^r - 1) capped at `cap`; x ≡ 1 (mod q-χ) means the difference is 0.
fn capped_val(p: u64, x: u64, r: u64, cap: u32) -> u32 {
    if x == 1 {
        return cap;
    }
    val_power_minus_one(p, x, r)
        .expect("p does not divide x")
        .min(cap)
}

// Conditions (i)-(iii) for one prime p | d, with α = ν_p(q - χ).
pub(crate) fn prime_conditions(p: u64, alpha: u32, m: u64, n: u64, check_orders: bool) -> bool {
    if n.is_multiple_of(p) || m.is_multiple_of(p) {
        return false;
    }
    let theta = if p == 2 {
        1
    } else {
        let tm = numthy::mult_order(m % p, p).expect("p prime, p ∤ m");
        if check_orders && tm != numthy::mult_order(n % p, p).expect("p prime, p ∤ n") {
            return false;
        }
        tm
    };
    if alpha == 1 {
        return true;
    }
    if capped_val(p, m, theta, alpha) != capped_val(p, n, theta, alpha) {
        return false;
    }
    if p == 2 && m != 1 && nu(2, m - 1).expect("m > 1") == 1 {
        return capped_val(2, m, 2, alpha) == capped_val(2, n, 2, alpha);
    }
    true
}

pub fn structure_formula(m: u64, q: u64, chi: Chi) -> Result<CycleStructure> {
    Modulus::new(q, chi)?.structure(m)
}

pub fn fixed_count(m: u64, q: u64, chi: Chi) -> Result<u64> {
    Modulus::new(q, chi)?.fixed_count(m)
}

pub fn fixed_count_iter(m: u64, r: u64, q: u64, chi: Chi) -> Result<u64> {
    Modulus::new(q, chi)?.fixed_count_iter(m, r)
}

pub fn same_structure_criterion(m: u64, n: u64, q: u64, chi: Chi) -> Result<bool> {
    Modulus::new(q, chi)?.same_structure_criterion(m, n)
}

pub fn in_s_theorem(m: u64, n: u64, q: u64, chi: Chi) -> Result<bool> {
    Ok(Modulus::new(q, chi)?.in_s(m, n))
}

pub fn half_shift_in_s(m: u64, q: u64, chi: Chi) -> Result<bool> {
    Modulus::new(q, chi)?.half_shift_in_s(m)
}

/// Whether `gcd(m^r - 1, p^α) = gcd(n^r - 1, p^α)` for every `r >= 1`,
/// decided from `o_p` and at most two explicit gcds.
pub fn prime_power_gcd_equal(p: u64, alpha: u32, m: u64, n: u64) -> Result<bool> {
    if alpha == 0 {
        return Err(Error::Zero);
    }
    if !numthy::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    for x in [m, n] {
        if x % p == 0 {
            return Err(Error::PrimeDivides { p, m: x });
        }
    }
    let theta = numthy::mult_order(m % p, p)?;
    if theta != numthy::mult_order(n % p, p)? {
        return Ok(false);
    }
    if alpha == 1 {
        return Ok(true);
    }
    let pa = p
        .checked_pow(alpha)
        .ok_or_else(|| Error::Precondition(format!("{p}^{alpha} overflows")))?;
    let same = |r: u64| gcd_mpow_minus_one(m, r, pa) == gcd_mpow_minus_one(n, r, pa);
    if p != 2 {
        return Ok(same(theta));
    }
    if m % 4 == 1 {
        Ok(same(1))
    } else {
        Ok(same(1) && same(2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cs(counts: &[(u64, u64)]) -> CycleStructure {
        CycleStructure::from_counts(counts.iter().copied())
    }

    #[test]
    fn structure_examples() {
        let s = structure_formula(3, 49, Chi::NonSquare).unwrap();
        assert_eq!(s, cs(&[(1, 2), (4, 2), (20, 2)]));
        assert_eq!(s.to_json().to_string(), r#"{"1":2,"4":2,"20":2}"#);
        assert_eq!(
            structure_formula(11, 49, Chi::NonSquare).unwrap(),
            cs(&[(1, 10), (5, 8)])
        );
        for chi in Chi::BOTH {
            for q in [3, 5, 49, 81] {
                assert_eq!(structure_formula(1, q, chi).unwrap(), cs(&[(1, q + 1)]));
            }
        }
        assert_eq!(
            structure_formula(2, 7, Chi::NonSquare),
            Err(Error::NotAPermutation { m: 2, modulus: 8 })
        );
        // q - χ = 2: only the identity
        let degenerate = Modulus::new(3, Chi::Square).unwrap();
        assert_eq!(degenerate.valid_exponents(), vec![1]);
    }

    #[test]
    fn fixed_count_examples() {
        assert_eq!(fixed_count(17, 49, Chi::Square).unwrap(), 18);
        assert_eq!(fixed_count(11, 49, Chi::NonSquare).unwrap(), 10);
        assert_eq!(fixed_count(1, 49, Chi::Square).unwrap(), 50);
        assert_eq!(fixed_count(1, 27, Chi::NonSquare).unwrap(), 28);
    }

    #[test]
    fn fixed_count_iter_examples() {
        assert_eq!(fixed_count_iter(3, 4, 49, Chi::NonSquare).unwrap(), 10);
        assert_eq!(fixed_count_iter(9, 2, 49, Chi::NonSquare).unwrap(), 10);
        assert_eq!(
            fixed_count_iter(13, 1, 49, Chi::Square).unwrap(),
            fixed_count(13, 49, Chi::Square).unwrap()
        );
        let s = structure_formula(3, 49, Chi::NonSquare).unwrap();
        assert_eq!(s.fixed_points_of_iterate(4), BigUint::from(10u32));
        let s = structure_formula(9, 49, Chi::NonSquare).unwrap();
        assert_eq!(s.fixed_points_of_iterate(2), BigUint::from(10u32));
    }

    #[test]
    fn criterion_examples() {
        assert!(same_structure_criterion(3, 13, 49, Chi::NonSquare).unwrap());
        assert!(same_structure_criterion(7, 7, 49, Chi::NonSquare).unwrap());
        assert!(!same_structure_criterion(3, 43, 49, Chi::NonSquare).unwrap());
    }

    #[test]
    fn prime_power_lemma_examples() {
        assert!(prime_power_gcd_equal(5, 2, 3, 13).unwrap());
        assert!(prime_power_gcd_equal(5, 1, 3, 7).unwrap());
        assert!(prime_power_gcd_equal(5, 1, 3, 43).unwrap());
        assert!(!prime_power_gcd_equal(5, 2, 3, 43).unwrap());
        assert!(prime_power_gcd_equal(5, 2, 10, 3).is_err());
    }

    #[test]
    fn theorem_examples() {
        assert!(in_s_theorem(3, 17, 49, Chi::NonSquare).unwrap());
        assert!(in_s_theorem(5, 29, 49, Chi::Square).unwrap());
        assert!(in_s_theorem(13, 13, 49, Chi::Square).unwrap());
        assert!(!in_s_theorem(3, 43, 49, Chi::NonSquare).unwrap());
        assert!(!in_s_theorem(17, 41, 49, Chi::Square).unwrap());
        // not a permutation
        assert!(!in_s_theorem(3, 5, 49, Chi::NonSquare).unwrap());
    }

    #[test]
    fn half_shift_examples() {
        assert!(half_shift_in_s(5, 49, Chi::Square).unwrap());
        assert!(!half_shift_in_s(17, 49, Chi::Square).unwrap());
        assert!(!half_shift_in_s(3, 49, Chi::NonSquare).unwrap());
    }

    #[test]
    fn chi_round_trip() {
        assert_eq!(Chi::from_sign(-1).unwrap(), Chi::NonSquare);
        assert_eq!(Chi::from_sign(1).unwrap(), Chi::Square);
        assert_eq!(Chi::from_sign(0), Err(Error::InvalidCharacter(0)));
        assert_eq!(Chi::NonSquare.to_string(), "-1");
    }

    #[test]
    fn big_counts_serialize_as_strings() {
        let mut s = CycleStructure::new();
        s.add(1, 2u32);
        s.add(120, BigUint::from(10u32).pow(26));
        assert_eq!(
            s.to_json().to_string(),
            r#"{"1":2,"120":"100000000000000000000000000"}"#
        );
        assert_eq!(s.pretty(), "2×{•} ⊕ 100000000000000000000000000×Cyc(120)");
    }

    // Oracle for the prime-power lemma: compare gcds directly for every r
    // up to a full period of both residues mod p^α.
    fn brute_prime_power_equal(p: u64, alpha: u32, m: u64, n: u64) -> bool {
        let pa = p.pow(alpha);
        let period = numthy::lcm(
            numthy::mult_order(m % pa, pa).unwrap(),
            numthy::mult_order(n % pa, pa).unwrap(),
        );
        (1..=period).all(|r| gcd_mpow_minus_one(m, r, pa) == gcd_mpow_minus_one(n, r, pa))
    }

    proptest! {
        #[test]
        fn prime_power_lemma_matches_brute(pi in 0usize..5, alpha in 1u32..5, m in 1u64..2000, n in 1u64..2000) {
            let p = [2u64, 3, 5, 7, 13][pi];
            prop_assume!(m % p != 0 && n % p != 0);
            prop_assert_eq!(
                prime_power_gcd_equal(p, alpha, m, n).unwrap(),
                brute_prime_power_equal(p, alpha, m, n)
            );
        }

        #[test]
        fn in_s_is_symmetric(qi in 0usize..12, chi in proptest::bool::ANY, m in 1u64..400, n in 1u64..400) {
            let q = [49u64, 81, 97, 121, 125, 169, 241, 243, 289, 337, 343, 361][qi];
            let chi = if chi { Chi::Square } else { Chi::NonSquare };
            let md = Modulus::new(q, chi).unwrap();
            prop_assert_eq!(md.in_s(m, n), md.in_s(n, m));
        }

        #[test]
        fn fixed_counts_consistent(q in (1u64..300).prop_map(|x| 2 * x + 1), chi in proptest::bool::ANY, m in 1u64..600, r in 1u64..30) {
            let chi = if chi { Chi::Square } else { Chi::NonSquare };
            let md = Modulus::new(q, chi).unwrap();
            prop_assume!(md.is_permutation(m));
            let s = md.structure(m).unwrap();
            prop_assert_eq!(s.total_mass(), BigUint::from(q + 1));
            prop_assert_eq!(s.fixed_points(), BigUint::from(md.fixed_count(m).unwrap()));
            prop_assert_eq!(
                s.fixed_points_of_iterate(r),
                BigUint::from(md.fixed_count_iter(m, r).unwrap())
            );
        }
    }
}
