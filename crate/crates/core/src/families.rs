//! Closed-form families of pairs in `S_χ^q`, valid for arbitrarily large
//! `q`. Every prediction carries the pair reduced into `[1, q-χ)` and, where
//! a closed form exists, the common cycle structure.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::cyclestruct::{Chi, CycleStructure};
use crate::numthy::{self, nu};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmSign {
    Minus,
    Plus,
}

/// `gcd(c^k ± 1, c^l ± 1)` from the closed forms, without expanding
/// `c^k` or `c^l`.
pub fn gcd_power_pm(c: u64, k: u64, l: u64, sign_k: PmSign, sign_l: PmSign) -> Result<BigUint> {
    if c < 2 {
        return Err(Error::Precondition(format!("c = {c} must be at least 2")));
    }
    if k == 0 || l == 0 {
        return Err(Error::Zero);
    }
    let g = numthy::gcd(k, l) as u32;
    let cg = BigUint::from(c).pow(g);
    let (vk, vl) = (nu(2, k)?, nu(2, l)?);
    let small = || BigUint::from(if c % 2 == 1 { 2u32 } else { 1 });
    Ok(match (sign_k, sign_l) {
        (PmSign::Minus, PmSign::Minus) => cg - 1u32,
        (PmSign::Plus, PmSign::Plus) if vk == vl => cg + 1u32,
        (PmSign::Plus, PmSign::Minus) if vk < vl => cg + 1u32,
        (PmSign::Minus, PmSign::Plus) if vl < vk => cg + 1u32,
        _ => small(),
    })
}

/// A family member `(m, n)` over `F_q` with character `χ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyPrediction {
    pub family: &'static str,
    pub q: BigUint,
    pub chi: Chi,
    pub pair: (BigUint, BigUint),
    pub predicted_structure: Option<CycleStructure>,
    pub applicable: bool,
    pub reason: String,
}

impl FamilyPrediction {
    /// The pair as machine integers, when both fit.
    pub fn pair_u64(&self) -> Option<(u64, u64)> {
        Some((self.pair.0.to_u64()?, self.pair.1.to_u64()?))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "family": self.family,
            "q": self.q.to_string(),
            "chi": self.chi.sign(),
            "pair": [self.pair.0.to_string(), self.pair.1.to_string()],
            "structure": self.predicted_structure.as_ref().map(CycleStructure::to_json),
            "applicable": self.applicable,
            "reason": self.reason,
        })
    }
}

fn modulus_of(q: &BigUint, chi: Chi) -> BigUint {
    match chi {
        Chi::Square => q - 1u32,
        Chi::NonSquare => q + 1u32,
    }
}

fn require_odd_prime(p: u64) -> Result<()> {
    if !numthy::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Err(Error::EvenCharacteristic);
    }
    Ok(())
}

/// `(p^{ℓ1}, p^{ℓ2})` over `F_{p^k}`. Structures are predicted only for
/// prime `k`.
pub fn frobenius_family(p: u64, k: u32, l1: u32, l2: u32, chi: Chi) -> Result<FamilyPrediction> {
    require_odd_prime(p)?;
    for l in [l1, l2] {
        if l == 0 || l >= k {
            return Err(Error::Precondition(format!("ℓ = {l} outside [1, {k})")));
        }
    }
    let pb = BigUint::from(p);
    let q = pb.pow(k);
    let gcd_ok = numthy::gcd(l1 as u64, k as u64) == numthy::gcd(l2 as u64, k as u64);
    let nu_k = nu(2, k as u64)?;
    let (n1, n2) = (nu(2, l1 as u64)?, nu(2, l2 as u64)?);
    let parity_ok = chi == Chi::Square || (n1 > nu_k) == (n2 > nu_k);
    let applicable = gcd_ok && parity_ok;
    let reason = match (gcd_ok, parity_ok) {
        (true, true) => "gcd(ℓ1, k) = gcd(ℓ2, k) and the 2-adic condition holds".to_string(),
        (false, _) => format!("gcd({l1}, {k}) ≠ gcd({l2}, {k})"),
        (true, false) => format!("ν_2({l1}) and ν_2({l2}) lie on opposite sides of ν_2({k})"),
    };
    let predicted_structure =
        (applicable && numthy::is_prime(k as u64)).then(|| frobenius_structure(&pb, k, l1, chi));
    Ok(FamilyPrediction {
        family: "frobenius",
        pair: (pb.pow(l1), pb.pow(l2)),
        q,
        chi,
        predicted_structure,
        applicable,
        reason,
    })
}

/// Structure of `R_{p^ℓ}` over `F_{p^k}` for prime `k`.
pub fn frobenius_structure(p: &BigUint, k: u32, l: u32, chi: Chi) -> CycleStructure {
    let pk = p.pow(k);
    let mut s = CycleStructure::new();
    if chi == Chi::NonSquare && k == 2 {
        s.add(1, 2u32);
        s.add(4, (&pk - 1u32) / 4u32);
    } else if chi == Chi::NonSquare && k % 2 == 1 && l % 2 == 1 {
        s.add(1, 2u32);
        s.add(2, (p - 1u32) / 2u32);
        s.add(2 * k as u64, (&pk - p) / (2 * k));
    } else {
        s.add(1, p + 1u32);
        s.add(k as u64, (&pk - p) / k);
    }
    s
}

/// Splits `q = p^e`, or fails when `q` is not a power of `p`.
fn exponent_of(p: u64, q: &BigUint) -> Result<u32> {
    let pb = BigUint::from(p);
    let mut rest = q.clone();
    let mut e = 0;
    while !rest.is_one() {
        let (quot, rem) = rest.div_rem(&pb);
        if !rem.is_zero() || quot.is_zero() {
            return Err(Error::Precondition(format!("{q} is not a power of {p}")));
        }
        rest = quot;
        e += 1;
    }
    if e == 0 {
        return Err(Error::Precondition(format!("{q} is not a power of {p}")));
    }
    Ok(e)
}

/// `(p, q - p + 1)`, with the cycle counts `N_{2d}` computed exactly when
/// `χ = -1` and `q` is an even power of `p`.
pub fn p_qmp1_family(p: u64, q: &BigUint, chi: Chi) -> Result<FamilyPrediction> {
    require_odd_prime(p)?;
    let e = exponent_of(p, q)?;
    let pb = BigUint::from(p);
    let modulus = modulus_of(q, chi);
    let pair = (&pb % &modulus, (q - &pb + 1u32) % &modulus);
    let (applicable, reason, predicted_structure) = match chi {
        Chi::NonSquare if e % 2 == 0 => (
            true,
            format!("q = {p}^{e} is an even power"),
            Some(even_power_structure(&pb, e)),
        ),
        Chi::NonSquare => (false, format!("q = {p}^{e} is an odd power"), None),
        Chi::Square if e == 1 => {
            let mut s = CycleStructure::new();
            s.add(1, &pb + 1u32);
            (true, "q = p".to_string(), Some(s))
        }
        Chi::Square if p == 3 && e == 2 => (
            true,
            "q = 9".to_string(),
            Some(CycleStructure::from_counts([(1u64, 4u64), (2, 3)])),
        ),
        Chi::Square => (false, format!("q = {p}^{e} is neither p nor 9"), None),
    };
    Ok(FamilyPrediction {
        family: "p-qmp1",
        q: q.clone(),
        chi,
        pair,
        predicted_structure,
        applicable,
        reason,
    })
}

// 2×{•} plus N_c cycles of each length c = 2d, d | e, ν_2(d) = ν_2(e). Each
// N_c comes from the fixed points p^d + 1 of the c-th iterate after removing
// the two fixed points and every shorter admissible length dividing c.
fn even_power_structure(p: &BigUint, e: u32) -> CycleStructure {
    let e = e as u64;
    let target = nu(2, e).expect("e >= 1");
    let ds: Vec<u64> = (1..=e)
        .filter(|d| e.is_multiple_of(*d) && nu(2, *d).expect("d >= 1") == target)
        .collect();
    let mut s = CycleStructure::new();
    s.add(1, 2u32);
    let mut found: Vec<(u64, BigUint)> = Vec::new();
    for d in ds {
        let c = 2 * d;
        let mut rest = p.pow(d as u32) + 1u32 - 2u32;
        for (shorter, count) in &found {
            if c % shorter == 0 {
                rest -= count * shorter;
            }
        }
        let count = rest / c;
        if !count.is_zero() {
            s.add(c, count.clone());
        }
        found.push((c, count));
    }
    s
}

/// `((q-χ)/4 + 1, 3(q-χ)/4 + 1)` for `q ≡ χ (mod 8)`.
pub fn quarter_family(q: &BigUint, chi: Chi) -> Result<FamilyPrediction> {
    let n = modulus_of(q, chi);
    if !(&n % 8u32).is_zero() {
        return Err(Error::Precondition(format!("{q} ≢ {chi} (mod 8)")));
    }
    let quarter = &n / 4u32;
    let eighth = &n / 8u32;
    let mut s = CycleStructure::new();
    s.add(1, &quarter + chi.extra_fixed());
    if eighth.is_odd() {
        s.add(2, &eighth * 3u32);
    } else {
        s.add(2, eighth.clone());
        s.add(4, eighth.clone());
    }
    Ok(FamilyPrediction {
        family: "quarter",
        pair: (&quarter + 1u32, &quarter * 3u32 + 1u32),
        q: q.clone(),
        chi,
        predicted_structure: Some(s),
        applicable: true,
        reason: format!(
            "q ≡ χ (mod 8), (q-χ)/8 is {}",
            if eighth.is_odd() { "odd" } else { "even" }
        ),
    })
}

/// `((q-χ±2)/4, (q-χ±4)/2)` for `q ≡ χ±2 (mod 8)`. No structure is
/// predicted.
pub fn pm2_family(q: &BigUint, chi: Chi) -> Result<FamilyPrediction> {
    let n = modulus_of(q, chi);
    let r = (&n % 8u32).to_u32().expect("below 8");
    let pair = match r {
        // q - χ ≡ 2 means q ≡ χ + 2
        2 => ((&n + 2u32) / 4u32, ((&n + 4u32) / 2u32) % &n),
        6 => ((&n - 2u32) / 4u32, ((&n - 4u32) / 2u32) % &n),
        _ => return Err(Error::Precondition(format!("{q} ≢ {chi} ± 2 (mod 8)"))),
    };
    let pair = (&pair.0 % &n, pair.1);
    let sign = if r == 2 { '+' } else { '-' };
    let reason = if pair.0 == pair.1 {
        format!("q ≡ χ {sign} 2 (mod 8); degenerate pair, both coordinates equal")
    } else {
        format!("q ≡ χ {sign} 2 (mod 8)")
    };
    Ok(FamilyPrediction {
        family: "pm2",
        q: q.clone(),
        chi,
        pair,
        predicted_structure: None,
        applicable: true,
        reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclestruct::structure_formula;
    use proptest::prelude::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn expanded(c: u64, k: u64, s: PmSign) -> BigUint {
        let v = big(c).pow(k as u32);
        match s {
            PmSign::Minus => v - 1u32,
            PmSign::Plus => v + 1u32,
        }
    }

    #[test]
    fn gcd_power_examples() {
        use PmSign::*;
        assert_eq!(gcd_power_pm(2, 3, 5, Plus, Plus).unwrap(), big(3));
        assert_eq!(
            gcd_power_pm(7, 4, 4, Minus, Minus).unwrap(),
            big(7u64.pow(4) - 1)
        );
        assert_eq!(gcd_power_pm(3, 2, 4, Plus, Minus).unwrap(), big(10));
        assert!(gcd_power_pm(1, 2, 4, Plus, Minus).is_err());
    }

    proptest! {
        #[test]
        fn gcd_power_matches_expansion(c in 2u64..=10, k in 1u64..=20, l in 1u64..=20,
                                       sk in any::<bool>(), sl in any::<bool>()) {
            let sign = |b: bool| if b { PmSign::Plus } else { PmSign::Minus };
            let (sk, sl) = (sign(sk), sign(sl));
            let want = expanded(c, k, sk).gcd(&expanded(c, l, sl));
            prop_assert_eq!(gcd_power_pm(c, k, l, sk, sl).unwrap(), want);
        }
    }

    #[test]
    fn frobenius_examples() {
        let f = frobenius_family(3, 2, 1, 1, Chi::NonSquare).unwrap();
        assert_eq!(
            f.predicted_structure.unwrap(),
            CycleStructure::from_counts([(1u64, 2u64), (4, 2)])
        );
        let f = frobenius_family(3, 3, 1, 2, Chi::NonSquare).unwrap();
        assert!(!f.applicable);
        assert_ne!(
            structure_formula(3, 27, Chi::NonSquare).unwrap(),
            structure_formula(9, 27, Chi::NonSquare).unwrap()
        );
        let f = frobenius_family(3, 3, 1, 2, Chi::Square).unwrap();
        assert!(f.applicable);
        assert_eq!(
            structure_formula(3, 27, Chi::Square).unwrap(),
            structure_formula(9, 27, Chi::Square).unwrap()
        );
        assert!(frobenius_family(3, 3, 3, 1, Chi::Square).is_err());
    }

    #[test]
    fn p_qmp1_examples() {
        let q = big(3).pow(60);
        let f = p_qmp1_family(3, &q, Chi::NonSquare).unwrap();
        assert!(f.applicable);
        let s = f.predicted_structure.unwrap();
        assert_eq!(s.multiplicity(8), big(10));
        assert_eq!(s.multiplicity(24), big(22140));
        assert_eq!(s.multiplicity(40), big(87169608));
        assert_eq!(
            s.multiplicity(120),
            "353259652293468362590059312".parse::<BigUint>().unwrap()
        );
        assert_eq!(s.lengths().collect::<Vec<_>>(), vec![1, 8, 24, 40, 120]);
        assert_eq!(s.total_mass(), &q + 1u32);

        let f = p_qmp1_family(3, &big(9), Chi::Square).unwrap();
        assert_eq!(f.pair, (big(3), big(7)));
        assert_eq!(
            f.predicted_structure.unwrap(),
            CycleStructure::from_counts([(1u64, 4u64), (2, 3)])
        );
        let f = p_qmp1_family(7, &big(7), Chi::Square).unwrap();
        assert_eq!(f.pair, (big(1), big(1)));
        assert_eq!(
            f.predicted_structure.unwrap(),
            CycleStructure::from_counts([(1u64, 8u64)])
        );
        assert!(!p_qmp1_family(3, &big(27), Chi::Square).unwrap().applicable);
        assert!(
            !p_qmp1_family(3, &big(27), Chi::NonSquare)
                .unwrap()
                .applicable
        );
        assert!(p_qmp1_family(3, &big(25), Chi::Square).is_err());
    }

    #[test]
    fn quarter_examples() {
        let f = quarter_family(&big(49), Chi::Square).unwrap();
        assert_eq!(f.pair, (big(13), big(37)));
        assert_eq!(
            f.predicted_structure.unwrap(),
            CycleStructure::from_counts([(1u64, 14u64), (2, 6), (4, 6)])
        );
        let f = quarter_family(&big(41), Chi::Square).unwrap();
        assert_eq!(f.pair, (big(11), big(31)));
        let s = CycleStructure::from_counts([(1u64, 12u64), (2, 15)]);
        assert_eq!(f.predicted_structure.unwrap(), s);
        assert_eq!(structure_formula(11, 41, Chi::Square).unwrap(), s);
        assert_eq!(structure_formula(31, 41, Chi::Square).unwrap(), s);
        let f = quarter_family(&big(17), Chi::Square).unwrap();
        assert_eq!(f.pair, (big(5), big(13)));
        let s = CycleStructure::from_counts([(1u64, 6u64), (2, 2), (4, 2)]);
        assert_eq!(f.predicted_structure.unwrap(), s);
        assert_eq!(structure_formula(5, 17, Chi::Square).unwrap(), s);
        assert!(quarter_family(&big(11), Chi::Square).is_err());
    }

    #[test]
    fn pm2_examples() {
        let f = pm2_family(&big(11), Chi::Square).unwrap();
        assert_eq!(f.pair, (big(3), big(7)));
        let s = CycleStructure::from_counts([(1u64, 4u64), (4, 2)]);
        assert_eq!(structure_formula(3, 11, Chi::Square).unwrap(), s);
        assert_eq!(structure_formula(7, 11, Chi::Square).unwrap(), s);
        assert_eq!(
            pm2_family(&big(9), Chi::NonSquare).unwrap().pair,
            (big(3), big(7))
        );
        let f = pm2_family(&big(7), Chi::Square).unwrap();
        assert_eq!(f.pair, (big(1), big(1)));
        assert!(f.reason.contains("degenerate"));
        assert!(pm2_family(&big(9), Chi::Square).is_err());
    }

    #[test]
    fn json_uses_decimal_strings() {
        let f = p_qmp1_family(3, &big(3).pow(60), Chi::NonSquare).unwrap();
        let v = f.to_json();
        assert_eq!(v["q"], "42391158275216203514294433201");
        assert_eq!(v["chi"], -1);
        assert_eq!(v["pair"][0], "3");
        assert_eq!(v["structure"]["120"], "353259652293468362590059312");
    }
}
