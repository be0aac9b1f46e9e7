//! Point-by-point evaluation of Rédei functions and the brute-force cycle
//! decomposition that every formula in the crate is checked against.
//!
//! `R_{m,a}(x)` is computed by expanding `(x + s)^m` in `F_q[s]/(s² - a)`,
//! which sidesteps square roots of `a` entirely and treats squares and
//! non-squares the same way.

use serde_json::Value;

use crate::cyclestruct::{Chi, CycleStructure};
use crate::gf::{Field, FieldElement, ProjectivePoint};
use crate::numthy::gcd;
use crate::{Error, Result};

/// `n_part + d_part · s` with `s² = a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadElement {
    pub n_part: FieldElement,
    pub d_part: FieldElement,
}

impl QuadElement {
    fn mul(self, other: QuadElement, a: FieldElement, f: &Field) -> QuadElement {
        let nn = f.mul(self.n_part, other.n_part);
        let dd = f.mul(self.d_part, other.d_part);
        let nd = f.mul(self.n_part, other.d_part);
        let dn = f.mul(self.d_part, other.n_part);
        QuadElement {
            n_part: f.add(nn, f.mul(a, dd)),
            d_part: f.add(nd, dn),
        }
    }

    /// `self^m` in `F_q[s]/(s² - a)`.
    pub fn pow(self, mut m: u64, a: FieldElement, f: &Field) -> QuadElement {
        let mut acc = QuadElement {
            n_part: f.one(),
            d_part: f.zero(),
        };
        let mut base = self;
        while m > 0 {
            if m & 1 == 1 {
                acc = acc.mul(base, a, f);
            }
            m >>= 1;
            if m > 0 {
                base = base.mul(base, a, f);
            }
        }
        acc
    }
}

/// A Rédei permutation up to cycle structure: `(q, χ, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RedeiSpec {
    pub q: u64,
    pub chi: Chi,
    pub m: u64,
}

impl RedeiSpec {
    /// Requires `1 <= m < q - χ`.
    pub fn new(q: u64, chi: Chi, m: u64) -> Result<RedeiSpec> {
        let n = chi
            .modulus_of(q)
            .ok_or_else(|| Error::Precondition(format!("q - χ overflows for q = {q}")))?;
        if m == 0 || m >= n {
            return Err(Error::Precondition(format!("m = {m} outside [1, {n})")));
        }
        Ok(RedeiSpec { q, chi, m })
    }

    pub fn modulus(&self) -> u64 {
        self.chi.modulus_of(self.q).expect("checked in new")
    }

    pub fn is_permutation(&self) -> bool {
        gcd(self.m, self.modulus()) == 1
    }
}

/// `R_{m,a}(x)`.
pub fn redei_eval(
    field: &Field,
    m: u64,
    a: FieldElement,
    x: ProjectivePoint,
) -> Result<ProjectivePoint> {
    if a.is_zero() {
        return Err(Error::ZeroElement);
    }
    if m == 0 {
        return Err(Error::Zero);
    }
    Ok(eval_unchecked(field, m, a, x))
}

fn eval_unchecked(field: &Field, m: u64, a: FieldElement, x: ProjectivePoint) -> ProjectivePoint {
    let ProjectivePoint::Finite(x) = x else {
        return ProjectivePoint::Infinity;
    };
    let base = QuadElement {
        n_part: x,
        d_part: field.one(),
    };
    let QuadElement { n_part, d_part } = base.pow(m, a, field);
    match field.inv(d_part) {
        Ok(d_inv) => ProjectivePoint::Finite(field.mul(n_part, d_inv)),
        Err(_) => ProjectivePoint::Infinity,
    }
}

/// A permutation of `P^1(F_q)` as an index table. `domain` lists the finite
/// points in field enumeration order followed by `∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationTable {
    pub domain: Vec<ProjectivePoint>,
    pub image: Vec<usize>,
}

impl PermutationTable {
    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    /// `point,image` rows using the field's element serialization.
    pub fn to_csv(&self, field: &Field) -> String {
        let mut out = String::from("point,image\n");
        for (i, &j) in self.image.iter().enumerate() {
            out.push_str(&field.format_point(self.domain[i]));
            out.push(',');
            out.push_str(&field.format_point(self.domain[j]));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, field: &Field) -> Value {
        Value::Array(
            self.image
                .iter()
                .enumerate()
                .map(|(i, &j)| {
                    Value::Array(vec![
                        field.format_point(self.domain[i]).into(),
                        field.format_point(self.domain[j]).into(),
                    ])
                })
                .collect(),
        )
    }
}

fn point_index(field: &Field, x: ProjectivePoint) -> usize {
    match x {
        ProjectivePoint::Finite(e) => e.index() as usize,
        ProjectivePoint::Infinity => field.order() as usize,
    }
}

/// Evaluates `R_{m,a}` on every point of `P^1(F_q)`.
pub fn build_permutation(field: &Field, m: u64, a: FieldElement) -> Result<PermutationTable> {
    let chi = field.quadratic_character(a)?;
    if m == 0 {
        return Err(Error::Zero);
    }
    let n = chi.modulus_of(field.order()).expect("field order fits");
    if gcd(m, n) != 1 {
        return Err(Error::NotAPermutation { m, modulus: n });
    }
    let domain: Vec<ProjectivePoint> = field
        .elements()
        .map(ProjectivePoint::Finite)
        .chain(std::iter::once(ProjectivePoint::Infinity))
        .collect();
    let image: Vec<usize> = domain
        .iter()
        .map(|&x| point_index(field, eval_unchecked(field, m, a, x)))
        .collect();
    let mut hit = vec![false; image.len()];
    for &j in &image {
        if std::mem::replace(&mut hit[j], true) {
            return Err(Error::NotBijective { m });
        }
    }
    Ok(PermutationTable { domain, image })
}

// Orbit walk of `next` on `0..n` with visited marking.
fn orbit_structure(n: usize, next: impl Fn(usize) -> usize) -> CycleStructure {
    let mut seen = vec![false; n];
    let mut counts = std::collections::BTreeMap::<u64, u64>::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            len += 1;
            x = next(x);
        }
        *counts.entry(len).or_default() += 1;
    }
    CycleStructure::from_counts(counts)
}

pub fn cycle_decomposition(table: &PermutationTable) -> CycleStructure {
    orbit_structure(table.len(), |i| table.image[i])
}

/// Cycle structure of `x ↦ m·x` on `Z_n`, by direct orbit walk.
pub fn mult_map_structure(m: u64, n: u64) -> Result<CycleStructure> {
    if n == 0 {
        return Err(Error::Zero);
    }
    if gcd(m, n) != 1 {
        return Err(Error::NotCoprime { m, modulus: n });
    }
    let m = m % n;
    Ok(orbit_structure(n as usize, |x| {
        ((x as u128 * m as u128) % n as u128) as usize
    }))
}

/// Cyclic groups on which the power maps act.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subgroup {
    /// `F_q^*`, order `q - 1`.
    Units,
    /// `U_{q+1} ⊂ F_{q²}^*`, the elements of norm one.
    NormOne,
}

/// A cyclic subgroup materialized once so that many power maps can be
/// walked on it.
#[derive(Debug, Clone)]
pub struct CyclicSubgroup {
    ambient: Field,
    members: Vec<FieldElement>,
    position: Vec<u32>,
}

impl CyclicSubgroup {
    /// For [`Subgroup::NormOne`] the field `F_{q²}` is built internally.
    pub fn new(field: &Field, subgroup: Subgroup) -> Result<CyclicSubgroup> {
        let q = field.order();
        let (ambient, members): (Field, Vec<FieldElement>) = match subgroup {
            Subgroup::Units => (field.clone(), field.elements().skip(1).collect()),
            Subgroup::NormOne => {
                let big = Field::build(field.characteristic(), 2 * field.degree())?;
                let members = big
                    .elements()
                    .skip(1)
                    .filter(|&x| big.pow(x, q + 1) == big.one())
                    .collect();
                (big, members)
            }
        };
        let mut position = vec![u32::MAX; ambient.order() as usize];
        for (i, x) in members.iter().enumerate() {
            position[x.index() as usize] = i as u32;
        }
        Ok(CyclicSubgroup {
            ambient,
            members,
            position,
        })
    }

    pub fn order(&self) -> u64 {
        self.members.len() as u64
    }

    /// Cycle structure of `x ↦ x^m`, by direct orbit walk.
    pub fn power_map_structure(&self, m: u64) -> Result<CycleStructure> {
        let order = self.order();
        if gcd(m, order) != 1 {
            return Err(Error::NotCoprime { m, modulus: order });
        }
        Ok(orbit_structure(self.members.len(), |i| {
            let y = self.ambient.pow(self.members[i], m);
            self.position[y.index() as usize] as usize
        }))
    }
}

/// Cycle structure of `x ↦ x^m` on the chosen subgroup, by direct orbit
/// walk.
pub fn power_map_structure(field: &Field, m: u64, subgroup: Subgroup) -> Result<CycleStructure> {
    CyclicSubgroup::new(field, subgroup)?.power_map_structure(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs(counts: &[(u64, u64)]) -> CycleStructure {
        CycleStructure::from_counts(counts.iter().copied())
    }

    // Binomial expansion of (x + √a)^m over Z_p: N collects even powers of
    // √a, D the odd ones.
    fn binomial_redei(p: u64, m: u64, a: u64, x: Option<u64>) -> Option<u64> {
        let x = x?;
        let mut binom = 1u64;
        let (mut n, mut d) = (0u64, 0u64);
        for j in 0..=m {
            let term = binom % p * crate::numthy::pow_mod(x, m - j, p) % p
                * crate::numthy::pow_mod(a, j / 2, p)
                % p;
            if j % 2 == 0 {
                n = (n + term) % p;
            } else {
                d = (d + term) % p;
            }
            binom = binom * (m - j) / (j + 1);
        }
        (d != 0).then(|| n * crate::numthy::pow_mod(d, p - 2, p) % p)
    }

    #[test]
    fn eval_matches_binomial_expansion() {
        for (p, a) in [(7u64, 3u64), (7, 2), (11, 2), (13, 5)] {
            let f = Field::build(p, 1).unwrap();
            let ae = f.element(a).unwrap();
            for m in 1..=9 {
                for x in 0..p {
                    let got = redei_eval(&f, m, ae, ProjectivePoint::Finite(f.element(x).unwrap()))
                        .unwrap();
                    let want = match binomial_redei(p, m, a, Some(x)) {
                        Some(y) => ProjectivePoint::Finite(f.element(y).unwrap()),
                        None => ProjectivePoint::Infinity,
                    };
                    assert_eq!(got, want, "p={p} a={a} m={m} x={x}");
                }
            }
        }
    }

    #[test]
    fn eval_examples() {
        let f = Field::build(7, 2).unwrap();
        let a = f.canonical_a(Chi::NonSquare);
        for x in f.elements() {
            let x = ProjectivePoint::Finite(x);
            assert_eq!(redei_eval(&f, 1, a, x).unwrap(), x);
        }
        let zero = ProjectivePoint::Finite(f.zero());
        for m in [3, 5, 7, 21] {
            assert_eq!(redei_eval(&f, m, a, zero).unwrap(), zero);
        }
        assert_eq!(
            redei_eval(&f, 5, a, ProjectivePoint::Infinity).unwrap(),
            ProjectivePoint::Infinity
        );
        assert_eq!(redei_eval(&f, 3, f.zero(), zero), Err(Error::ZeroElement));
        assert_eq!(redei_eval(&f, 0, a, zero), Err(Error::Zero));
    }

    #[test]
    fn permutation_examples() {
        let z7 = Field::build(7, 1).unwrap();
        let a = z7.element(3).unwrap();
        let t = build_permutation(&z7, 3, a).unwrap();
        assert_eq!(t.len(), 8);
        assert_eq!(cycle_decomposition(&t), cs(&[(1, 2), (2, 3)]));
        assert_eq!(
            build_permutation(&z7, 2, a),
            Err(Error::NotAPermutation { m: 2, modulus: 8 })
        );

        let f49 = Field::build(7, 2).unwrap();
        let sq = f49.canonical_a(Chi::Square);
        let t = build_permutation(&f49, 5, sq).unwrap();
        assert_eq!(t.len(), 50);
        let id = build_permutation(&f49, 1, sq).unwrap();
        assert_eq!(cycle_decomposition(&id), cs(&[(1, 50)]));
        let ns = f49.canonical_a(Chi::NonSquare);
        let t = build_permutation(&f49, 7, ns).unwrap();
        assert_eq!(cycle_decomposition(&t), cs(&[(1, 2), (4, 12)]));
    }

    #[test]
    fn table_csv() {
        let z7 = Field::build(7, 1).unwrap();
        let t = build_permutation(&z7, 3, z7.element(3).unwrap()).unwrap();
        let csv = t.to_csv(&z7);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "point,image");
        assert_eq!(lines[1], "0,0");
        assert_eq!(lines.len(), 9);
        assert!(lines[8].starts_with("inf,"));
    }

    #[test]
    fn mult_map_examples() {
        assert_eq!(mult_map_structure(3, 8).unwrap(), cs(&[(1, 2), (2, 3)]));
        assert_eq!(mult_map_structure(1, 17).unwrap(), cs(&[(1, 17)]));
        assert_eq!(mult_map_structure(49, 50).unwrap(), cs(&[(1, 2), (2, 24)]));
        assert!(mult_map_structure(2, 8).is_err());
    }

    #[test]
    fn power_map_examples() {
        let z7 = Field::build(7, 1).unwrap();
        assert_eq!(
            power_map_structure(&z7, 1, Subgroup::Units).unwrap(),
            cs(&[(1, 6)])
        );
        assert_eq!(
            power_map_structure(&z7, 3, Subgroup::NormOne).unwrap(),
            mult_map_structure(3, 8).unwrap()
        );
        let f49 = Field::build(7, 2).unwrap();
        assert_eq!(
            power_map_structure(&f49, 5, Subgroup::Units).unwrap(),
            mult_map_structure(5, 48).unwrap()
        );
        assert!(power_map_structure(&z7, 2, Subgroup::Units).is_err());
    }

    #[test]
    fn redei_spec_bounds() {
        assert!(RedeiSpec::new(49, Chi::NonSquare, 49)
            .unwrap()
            .is_permutation());
        assert!(RedeiSpec::new(49, Chi::NonSquare, 50).is_err());
        assert!(!RedeiSpec::new(49, Chi::Square, 3).unwrap().is_permutation());
    }
}
