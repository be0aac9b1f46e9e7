//! Whole-field views of `S_χ^q`: structure classes, pair catalogs, isolated
//! permutations, involutions with a prescribed number of fixed points, and
//! the shift/reflection symmetries that move pairs around inside `S_χ^q`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::cyclestruct::{Chi, CycleStructure, Modulus};
use crate::exec::{self, Execution};
use crate::numthy::{self, gcd, nu, pow_mod};
use crate::{Error, Result};

/// Exponents in `[1, q-χ)` sharing one cycle structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureClass {
    pub structure: CycleStructure,
    pub members: Vec<u64>,
}

impl StructureClass {
    pub fn is_singleton(&self) -> bool {
        self.members.len() == 1
    }

    pub fn to_json(&self) -> Value {
        json!({ "members": self.members, "structure": self.structure.to_json() })
    }
}

/// Every `(m, n) ∈ S_χ^q` with `1 < m < n < q-χ`, lexicographic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCatalog {
    pub q: u64,
    pub chi: Chi,
    pub modulus: u64,
    pub pairs: Vec<(u64, u64)>,
}

impl PairCatalog {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, m: u64, n: u64) -> bool {
        let key = (m.min(n), m.max(n));
        self.pairs.binary_search(&key).is_ok()
    }

    /// `(n - m) mod (q - χ)`.
    pub fn line_offset(&self, (m, n): (u64, u64)) -> u64 {
        (n + self.modulus - m % self.modulus) % self.modulus
    }

    /// Pairs bucketed by the slope-one line `y = x + offset` they lie on.
    pub fn line_groups(&self) -> BTreeMap<u64, Vec<(u64, u64)>> {
        let mut groups: BTreeMap<u64, Vec<(u64, u64)>> = BTreeMap::new();
        for &pair in &self.pairs {
            groups.entry(self.line_offset(pair)).or_default().push(pair);
        }
        groups
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,n,line_offset\n");
        for &(m, n) in &self.pairs {
            out.push_str(&format!("{m},{n},{}\n", self.line_offset((m, n))));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "q": self.q,
            "chi": self.chi.sign(),
            "pairs": self
                .pairs
                .iter()
                .map(|&(m, n)| json!([m, n, self.line_offset((m, n))]))
                .collect::<Vec<_>>(),
        })
    }
}

fn require_prime_power(q: u64) -> Result<()> {
    match numthy::prime_power_of(&BigUint::from(q)) {
        Some((p, _)) if p != 2 => Ok(()),
        _ => Err(Error::NotOddPrimePower(q.to_string())),
    }
}

fn field_modulus(q: u64, chi: Chi) -> Result<Modulus> {
    require_prime_power(q)?;
    Modulus::new(q, chi)
}

pub fn enumerate_classes(q: u64, chi: Chi) -> Result<Vec<StructureClass>> {
    enumerate_classes_with(q, chi, Execution::default())
}

/// Groups every valid exponent by its cycle structure. Classes come out
/// ordered by smallest member, members ascending.
pub fn enumerate_classes_with(q: u64, chi: Chi, exec: Execution) -> Result<Vec<StructureClass>> {
    let modulus = field_modulus(q, chi)?;
    Ok(classes_of(&modulus, exec))
}

pub(crate) fn classes_of(modulus: &Modulus, exec: Execution) -> Vec<StructureClass> {
    let ms = modulus.valid_exponents();
    let structures = exec::map(exec, &ms, |&m| {
        modulus.structure(m).expect("valid exponent")
    });
    let mut index: HashMap<CycleStructure, usize> = HashMap::new();
    let mut classes: Vec<StructureClass> = Vec::new();
    for (m, structure) in ms.into_iter().zip(structures) {
        match index.get(&structure) {
            Some(&i) => classes[i].members.push(m),
            None => {
                index.insert(structure.clone(), classes.len());
                classes.push(StructureClass {
                    structure,
                    members: vec![m],
                });
            }
        }
    }
    classes
}

pub fn enumerate_pairs(q: u64, chi: Chi) -> Result<PairCatalog> {
    enumerate_pairs_with(q, chi, Execution::default())
}

pub fn enumerate_pairs_with(q: u64, chi: Chi, exec: Execution) -> Result<PairCatalog> {
    let modulus = field_modulus(q, chi)?;
    Ok(pairs_of(&modulus, &classes_of(&modulus, exec)))
}

pub(crate) fn pairs_of(modulus: &Modulus, classes: &[StructureClass]) -> PairCatalog {
    let mut pairs = Vec::new();
    for class in classes {
        let members: Vec<u64> = class.members.iter().copied().filter(|&m| m > 1).collect();
        for (i, &m) in members.iter().enumerate() {
            pairs.extend(members[i + 1..].iter().map(|&n| (m, n)));
        }
    }
    pairs.sort_unstable();
    PairCatalog {
        q: modulus.q(),
        chi: modulus.chi(),
        modulus: modulus.value(),
        pairs,
    }
}

/// Members of singleton classes, ascending.
pub fn isolated_list(q: u64, chi: Chi) -> Result<Vec<u64>> {
    let modulus = field_modulus(q, chi)?;
    Ok(isolated_of(&classes_of(&modulus, Execution::default())))
}

pub(crate) fn isolated_of(classes: &[StructureClass]) -> Vec<u64> {
    let mut out: Vec<u64> = classes
        .iter()
        .filter(|c| c.is_singleton())
        .map(|c| c.members[0])
        .collect();
    out.sort_unstable();
    out
}

/// `2^r` when `ν_2(q-χ) = 1`, else `2^{r+1}`, where `r` counts the odd
/// primes dividing `q - χ`.
pub fn isolated_count_formula(q: u64, chi: Chi) -> Result<u64> {
    let modulus = field_modulus(q, chi)?;
    Ok(isolated_count_of(&modulus))
}

pub(crate) fn isolated_count_of(modulus: &Modulus) -> u64 {
    let f = modulus.factorization();
    let r = f.primes().filter(|&p| p != 2).count() as u32;
    if f.exponent_of(2) == 1 {
        1 << r
    } else {
        1 << (r + 1)
    }
}

/// `m^{ρ-1} mod (q-χ)` when `ρ = o_{q-χ}(m) > 2`.
pub fn power_companion(m: u64, q: u64, chi: Chi) -> Result<Option<u64>> {
    let modulus = Modulus::new(q, chi)?;
    power_companion_of(&modulus, m)
}

pub(crate) fn power_companion_of(modulus: &Modulus, m: u64) -> Result<Option<u64>> {
    let rho = modulus.order(m)?;
    Ok((rho > 2).then(|| pow_mod(m, rho - 1, modulus.value())))
}

fn proper_divisor(modulus: &Modulus, d: u64) -> Result<()> {
    let n = modulus.value();
    if d == 0 || d >= n || !n.is_multiple_of(d) {
        return Err(Error::InvalidDivisor { d, modulus: n });
    }
    Ok(())
}

fn require_pair(modulus: &Modulus, m: u64, n: u64) -> Result<()> {
    if modulus.in_s(m, n) {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "({m}, {n}) is not in S for q - χ = {}",
            modulus.value()
        )))
    }
}

/// Decides whether `(m + k(q-χ)/d, n + k(q-χ)/d) ∈ S_χ^q` from the per-prime
/// conditions at the primes dividing `d`, given `(m, n) ∈ S_χ^q`.
pub fn shift_pair_valid(m: u64, n: u64, k: u64, d: u64, q: u64, chi: Chi) -> Result<bool> {
    let modulus = Modulus::new(q, chi)?;
    shift_pair_valid_of(&modulus, m, n, k, d)
}

pub(crate) fn shift_pair_valid_of(
    modulus: &Modulus,
    m: u64,
    n: u64,
    k: u64,
    d: u64,
) -> Result<bool> {
    proper_divisor(modulus, d)?;
    require_pair(modulus, m, n)?;
    let (ms, ns) = shift_pair(modulus, m, n, k, d);
    Ok(modulus
        .factorization()
        .factors()
        .iter()
        .filter(|&&(p, _)| d.is_multiple_of(p))
        .all(|&(p, alpha)| crate::cyclestruct::prime_conditions(p, alpha, ms, ns, true)))
}

/// `(m + k(q-χ)/d, n + k(q-χ)/d)` reduced mod `q - χ`.
pub fn shift_pair(modulus: &Modulus, m: u64, n: u64, k: u64, d: u64) -> (u64, u64) {
    let big = modulus.value();
    let step = ((k % d) * (big / d)) % big;
    ((m % big + step) % big, (n % big + step) % big)
}

/// Membership of `(m + (q-χ)/2, n + (q-χ)/2)`; requires `ν_2(q-χ) > 1`.
pub fn half_shift_pair(m: u64, n: u64, q: u64, chi: Chi) -> Result<bool> {
    let modulus = Modulus::new(q, chi)?;
    half_shift_pair_of(&modulus, m, n)
}

pub(crate) fn half_shift_pair_of(modulus: &Modulus, m: u64, n: u64) -> Result<bool> {
    let big = modulus.value();
    require_two_adic(modulus)?;
    Ok(modulus.in_s(m + big / 2, n + big / 2))
}

fn require_two_adic(modulus: &Modulus) -> Result<u32> {
    let alpha = modulus.factorization().exponent_of(2);
    if alpha <= 1 {
        return Err(Error::Precondition(format!(
            "ν_2({}) = {alpha} is not greater than 1",
            modulus.value()
        )));
    }
    Ok(alpha)
}

fn plus_one_gcds_agree(m: u64, n: u64, alpha: u32) -> bool {
    let two_alpha = 1u64 << alpha;
    gcd(m + 1, two_alpha) == gcd(n + 1, two_alpha)
}

/// Whether `(q-χ-m, q-χ-n)` stays in `S_χ^q`, given `(m, n) ∈ S_χ^q`.
pub fn negate_pair_valid(m: u64, n: u64, q: u64, chi: Chi) -> Result<bool> {
    let modulus = Modulus::new(q, chi)?;
    Ok(negate_pair_valid_of(&modulus, m, n))
}

pub(crate) fn negate_pair_valid_of(modulus: &Modulus, m: u64, n: u64) -> bool {
    let alpha = modulus.factorization().exponent_of(2);
    alpha <= 2 || plus_one_gcds_agree(m, n, alpha)
}

/// Whether `((q-χ)/2 - m, (q-χ)/2 - n)` stays in `S_χ^q`, given
/// `(m, n) ∈ S_χ^q`; requires `ν_2(q-χ) > 1`.
pub fn half_minus_pair_valid(m: u64, n: u64, q: u64, chi: Chi) -> Result<bool> {
    let modulus = Modulus::new(q, chi)?;
    half_minus_pair_valid_of(&modulus, m, n)
}

pub(crate) fn half_minus_pair_valid_of(modulus: &Modulus, m: u64, n: u64) -> Result<bool> {
    let alpha = require_two_adic(modulus)?;
    Ok(alpha == 2 || plus_one_gcds_agree(m, n, alpha))
}

/// `(m, m + (q-χ)/p) ∈ S_χ^q` compared against
/// `(m, m - (q̄-χ)/p) ∈ S_χ^{q̄}`. Returns the left-hand membership, or
/// an error if the hypotheses fail or the two sides disagree.
///
/// `p` is a prime dividing both `q - χ` and `q̄ - χ` to the same power `α`,
/// with `(q-χ)/p^α + (q̄-χ)/p^α ≡ 0 (mod p)`. `m` must be coprime to both
/// moduli.
pub fn cross_field_shift(m: u64, q: u64, qbar: u64, p: u64, chi: Chi) -> Result<bool> {
    let left = Modulus::new(q, chi)?;
    let right = Modulus::new(qbar, chi)?;
    let (l, r) = cross_field_memberships(&left, &right, m, p)?;
    if l != r {
        return Err(Error::Precondition(format!(
            "memberships disagree for m = {m}, q = {q}, q̄ = {qbar}, p = {p}"
        )));
    }
    Ok(l)
}

/// Both memberships of [`cross_field_shift`] without asserting equality.
pub fn cross_field_memberships(
    left: &Modulus,
    right: &Modulus,
    m: u64,
    p: u64,
) -> Result<(bool, bool)> {
    cross_field_admissible(left, right, p)?;
    let (n, nbar) = (left.value(), right.value());
    if gcd(m, n) != 1 || gcd(m, nbar) != 1 {
        return Err(Error::NotCoprime {
            m,
            modulus: if gcd(m, n) != 1 { n } else { nbar },
        });
    }
    let up = m % n + n / p;
    let down = (m % nbar + nbar - (nbar / p) % nbar) % nbar;
    Ok((left.in_s(m, up), right.in_s(m, down)))
}

/// Checks the valuation and congruence hypotheses linking two moduli.
pub fn cross_field_admissible(left: &Modulus, right: &Modulus, p: u64) -> Result<()> {
    if !numthy::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let (n, nbar) = (left.value(), right.value());
    let alpha = nu(p, n)?;
    if alpha == 0 || nu(p, nbar)? != alpha {
        return Err(Error::Precondition(format!(
            "ν_{p}({n}) and ν_{p}({nbar}) are not equal and positive"
        )));
    }
    let pa = p.pow(alpha);
    if (n / pa + nbar / pa) % p != 0 {
        return Err(Error::Precondition(format!(
            "{n}/{p}^{alpha} + {nbar}/{p}^{alpha} is not divisible by {p}"
        )));
    }
    Ok(())
}

/// The exponents `m` of Rédei involutions with exactly `d + χ + 1` fixed
/// points: one (isolated) or two (sharing a structure).
pub fn involution_m_for_divisor(d: u64, q: u64, chi: Chi) -> Result<Vec<u64>> {
    let modulus = Modulus::new(q, chi)?;
    involution_of(&modulus, d)
}

pub(crate) fn involution_of(modulus: &Modulus, d: u64) -> Result<Vec<u64>> {
    proper_divisor(modulus, d)?;
    let big = modulus.value();
    let f = modulus.factorization();
    let none = Error::NoSuchInvolution {
        fixed: d + modulus.chi().extra_fixed(),
    };
    let odd_ok = f
        .factors()
        .iter()
        .filter(|&&(p, _)| p != 2)
        .all(|&(p, alpha)| {
            let beta = nu(p, d).expect("d >= 1");
            beta == 0 || beta == alpha
        });
    if !odd_ok {
        return Err(none);
    }
    let alpha0 = f.exponent_of(2);
    let beta0 = nu(2, d).expect("d >= 1");
    let phi_d = numthy::euler_phi(d)?;
    let m_for = |k: u64| ((k % d) * (big / d) % big + big - 1) % big;
    if beta0 >= 1 && (beta0 == alpha0 || beta0 + 1 == alpha0) {
        let k = if beta0 + 1 == alpha0 {
            pow_mod(big / (2 * d), phi_d - 1, d) + d / 2
        } else {
            2 * pow_mod(big / d, phi_d - 1, d)
        };
        Ok(vec![m_for(k)])
    } else if alpha0 >= 3 && beta0 == 1 {
        let m = m_for(pow_mod(big / (2 * d), phi_d - 1, d));
        let other = (m + big / 2) % big;
        Ok(vec![m.min(other), m.max(other)])
    } else {
        Err(none)
    }
}

/// `{"q", "chi", "classes": [{"members", "structure"}]}`.
pub fn classes_json(q: u64, chi: Chi, classes: &[StructureClass]) -> Value {
    json!({
        "q": q,
        "chi": chi.sign(),
        "classes": classes.iter().map(StructureClass::to_json).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn members(q: u64, chi: Chi) -> Vec<Vec<u64>> {
        enumerate_classes(q, chi)
            .unwrap()
            .into_iter()
            .map(|c| c.members)
            .collect()
    }

    #[test]
    fn classes_q49_nonsquare() {
        assert_eq!(
            members(49, Chi::NonSquare),
            vec![
                vec![1],
                vec![3, 13, 17, 23, 27, 33, 37, 47],
                vec![7, 43],
                vec![9, 19, 29, 39],
                vec![11, 21, 31, 41],
                vec![49],
            ]
        );
    }

    #[test]
    fn classes_q49_square() {
        let got = members(49, Chi::Square);
        assert_eq!(got.len(), 10);
        for class in [vec![5, 29], vec![7, 31], vec![17], vec![25], vec![41]] {
            assert!(got.contains(&class), "{class:?}");
        }
    }

    #[test]
    fn classes_trivial_and_invalid() {
        assert_eq!(members(3, Chi::Square), vec![vec![1]]);
        assert!(enumerate_classes(45, Chi::Square).is_err());
        assert!(enumerate_classes(16, Chi::Square).is_err());
    }

    #[test]
    fn pair_catalogs() {
        let sq = enumerate_pairs(49, Chi::Square).unwrap();
        assert_eq!(
            sq.pairs,
            vec![(5, 29), (7, 31), (11, 35), (13, 37), (19, 43), (23, 47)]
        );
        assert!(sq.line_groups().keys().eq([24].iter()));
        assert_eq!(enumerate_pairs(49, Chi::NonSquare).unwrap().len(), 41);
        assert!(enumerate_pairs(3, Chi::Square).unwrap().is_empty());
        let csv = sq.to_csv();
        assert!(csv.starts_with("m,n,line_offset\n5,29,24\n"));
    }

    #[test]
    fn isolated_examples() {
        assert_eq!(isolated_list(49, Chi::NonSquare).unwrap(), vec![1, 49]);
        assert_eq!(isolated_list(49, Chi::Square).unwrap(), vec![1, 17, 25, 41]);
        assert_eq!(isolated_count_formula(49, Chi::NonSquare).unwrap(), 2);
        assert_eq!(isolated_count_formula(49, Chi::Square).unwrap(), 4);
        assert_eq!(isolated_count_formula(3, Chi::Square).unwrap(), 1);
    }

    #[test]
    fn power_companions() {
        assert_eq!(power_companion(5, 49, Chi::Square).unwrap(), Some(29));
        assert_eq!(power_companion(3, 49, Chi::NonSquare).unwrap(), Some(17));
        assert_eq!(power_companion(49, 49, Chi::NonSquare).unwrap(), None);
        assert!(power_companion(2, 49, Chi::NonSquare).is_err());
    }

    #[test]
    fn shifts() {
        let n = Chi::NonSquare;
        assert!(shift_pair_valid(13, 17, 1, 5, 49, n).unwrap());
        let m50 = Modulus::new(49, n).unwrap();
        assert_eq!(shift_pair(&m50, 13, 17, 1, 5), (23, 27));
        assert!(shift_pair_valid(13, 17, 5, 5, 49, n).unwrap());
        assert_eq!(shift_pair(&m50, 3, 47, 2, 5), (23, 17));
        assert!(shift_pair_valid(3, 47, 2, 5, 49, n).unwrap());
        assert_eq!(shift_pair(&m50, 3, 47, 1, 5), (13, 7));
        assert!(!shift_pair_valid(3, 47, 1, 5, 49, n).unwrap());
        assert!(shift_pair_valid(3, 47, 1, 50, 49, n).is_err());
        assert!(shift_pair_valid(3, 47, 1, 3, 49, n).is_err());
        assert!(shift_pair_valid(3, 7, 1, 5, 49, n).is_err());
    }

    #[test]
    fn half_shift_and_reflections() {
        let s = Chi::Square;
        assert!(half_shift_pair(5, 29, 49, s).unwrap());
        assert!(half_shift_pair(7, 31, 49, s).unwrap());
        assert!(half_shift_pair(3, 13, 49, Chi::NonSquare).is_err());

        for &(m, n) in &enumerate_pairs(49, Chi::NonSquare).unwrap().pairs {
            assert!(negate_pair_valid(m, n, 49, Chi::NonSquare).unwrap());
        }
        assert!(!negate_pair_valid(7, 31, 49, s).unwrap());
        assert!(negate_pair_valid(5, 5, 49, s).unwrap());
        assert!(half_minus_pair_valid(5, 5, 49, s).unwrap());
        assert!(half_minus_pair_valid(5, 11, 13, s).unwrap());
        assert!(half_minus_pair_valid(3, 13, 49, Chi::NonSquare).is_err());
    }

    #[test]
    fn involutions() {
        let s = Chi::Square;
        assert_eq!(involution_m_for_divisor(16, 49, s).unwrap(), vec![17]);
        assert_eq!(involution_m_for_divisor(24, 49, s).unwrap(), vec![25]);
        assert_eq!(involution_m_for_divisor(2, 49, s).unwrap(), vec![23, 47]);
        assert_eq!(
            involution_m_for_divisor(2, 49, Chi::NonSquare).unwrap(),
            vec![49]
        );
        assert_eq!(
            involution_m_for_divisor(3, 49, s),
            Err(Error::NoSuchInvolution { fixed: 5 })
        );
        assert!(involution_m_for_divisor(48, 49, s).is_err());
        assert!(involution_m_for_divisor(5, 49, s).is_err());
        assert_eq!(fixed_after(17, 49, s), 18);
        assert_eq!(fixed_after(25, 49, s), 26);
        assert_eq!(fixed_after(23, 49, s), 4);
    }

    fn fixed_after(m: u64, q: u64, chi: Chi) -> u64 {
        crate::cyclestruct::fixed_count(m, q, chi).unwrap()
    }

    #[test]
    fn cross_field() {
        // 49 - 1 = 48 and 97 - 1 = 96 carry 3 once; 16 + 32 ≡ 0 (mod 3)
        let s = Chi::Square;
        for m in [5u64, 7, 11, 13] {
            assert!(cross_field_shift(m, 49, 97, 3, s).is_ok());
        }
        assert!(cross_field_shift(5, 49, 19, 3, s).is_err());
        assert!(cross_field_shift(3, 49, 97, 3, s).is_err());
    }
}
