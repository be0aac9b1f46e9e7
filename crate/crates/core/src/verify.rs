//! Exhaustive sweeps comparing each closed form against an independent
//! computation. A sweep reports how many cases it checked and the first
//! counterexample in input order, identically under either [`Execution`].

use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::catalog::{self, StructureClass};
use crate::cyclestruct::{Chi, CycleStructure, Modulus};
use crate::exec::{self, Execution};
use crate::families::{self, FamilyPrediction};
use crate::gf::Field;
use crate::numthy::{self, gcd, odd_prime_powers};
use crate::redei::{self, CyclicSubgroup, Subgroup};

/// Outcome of one sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyReport {
    pub name: &'static str,
    pub checked: u64,
    pub counterexample: Option<String>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    fn collect(name: &'static str, results: Vec<Result<u64, String>>) -> PropertyReport {
        let mut checked = 0;
        let mut counterexample = None;
        for r in results {
            match r {
                Ok(n) => checked += n,
                Err(e) => {
                    checked += 1;
                    counterexample.get_or_insert(e);
                }
            }
        }
        PropertyReport {
            name,
            checked,
            counterexample,
        }
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            None => write!(f, "{}: pass ({} checked)", self.name, self.checked),
            Some(c) => write!(f, "{}: FAIL ({} checked): {c}", self.name, self.checked),
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// Every (q, χ) with q an odd prime power up to `qmax`.
fn field_moduli(qmax: u64) -> Vec<(u64, Chi)> {
    odd_prime_powers(qmax)
        .into_iter()
        .flat_map(|(q, _, _)| Chi::BOTH.map(|chi| (q, chi)))
        .collect()
}

/// Structures of every exponent mod `q - χ`, indexed by residue.
struct StructureTable {
    modulus: Modulus,
    structures: Vec<Option<CycleStructure>>,
}

impl StructureTable {
    fn new(q: u64, chi: Chi) -> StructureTable {
        let modulus = Modulus::new(q, chi).expect("odd q");
        let structures = (0..modulus.value())
            .map(|m| modulus.structure(m).ok())
            .collect();
        StructureTable {
            modulus,
            structures,
        }
    }

    fn n(&self) -> u64 {
        self.modulus.value()
    }

    fn get(&self, m: u64) -> Option<&CycleStructure> {
        self.structures[(m % self.n()) as usize].as_ref()
    }

    /// Membership in `S_χ^q` by comparing structures.
    fn same(&self, m: u64, n: u64) -> bool {
        matches!((self.get(m), self.get(n)), (Some(a), Some(b)) if a == b)
    }

    fn valid(&self) -> Vec<u64> {
        self.modulus.valid_exponents()
    }
}

/// Formula against brute-force orbit walks over `P^1(F_q)` with
/// `a = canonical_a(χ)`, for every odd prime power `q <= qmax`.
pub fn oracle_equivalence(qmax: u64, exec: Execution) -> PropertyReport {
    let fields: Vec<Field> = odd_prime_powers(qmax)
        .into_iter()
        .map(|(_, p, k)| Field::build(p, k).expect("enumerable"))
        .collect();
    let mut items = Vec::new();
    for (i, f) in fields.iter().enumerate() {
        for chi in Chi::BOTH {
            let modulus = Modulus::new(f.order(), chi).expect("odd q");
            items.extend(modulus.valid_exponents().into_iter().map(|m| (i, chi, m)));
        }
    }
    let results = exec::map(exec, &items, |&(i, chi, m)| {
        let f = &fields[i];
        let q = f.order();
        let table = redei::build_permutation(f, m, f.canonical_a(chi))
            .map_err(|e| format!("q={q} χ={chi} m={m}: {e}"))?;
        let brute = redei::cycle_decomposition(&table);
        let formula = crate::cyclestruct::structure_formula(m, q, chi).expect("valid m");
        ensure(brute == formula, || {
            format!("q={q} χ={chi} m={m}: oracle {brute} vs formula {formula}")
        })?;
        Ok(1)
    });
    PropertyReport::collect("formula = oracle", results)
}

/// For every `N = q - χ <= nmax`: membership by the prime-wise theorem,
/// equality of structures, and the divisor-bounded gcd criterion agree on
/// all pairs of valid exponents.
pub fn theorem_equivalence(nmax: u64, exec: Execution) -> PropertyReport {
    let mut seen = std::collections::BTreeMap::new();
    for (q, chi) in field_moduli(nmax + 1) {
        let n = chi.modulus_of(q).expect("small");
        if n <= nmax {
            seen.entry(n).or_insert((q, chi));
        }
    }
    let tables: Vec<StructureTable> = seen
        .values()
        .map(|&(q, chi)| StructureTable::new(q, chi))
        .collect();
    let mut items = Vec::new();
    for (i, t) in tables.iter().enumerate() {
        items.extend(t.valid().into_iter().map(|m| (i, m)));
    }
    let results = exec::map(exec, &items, |&(i, m)| {
        let t = &tables[i];
        let mut count = 0;
        for n in t.valid().into_iter().filter(|&n| n >= m) {
            let by_structure = t.same(m, n);
            let by_theorem = t.modulus.in_s(m, n);
            let by_criterion = t.modulus.same_structure_criterion(m, n).expect("valid");
            ensure(
                by_structure == by_theorem && by_theorem == by_criterion,
                || {
                    format!(
                    "N={} (m,n)=({m},{n}): structures {by_structure}, theorem {by_theorem}, criterion {by_criterion}",
                    t.n()
                )
                },
            )?;
            count += 1;
        }
        Ok(count)
    });
    PropertyReport::collect("theorem = structure equality = criterion", results)
}

/// Rédei structures against `x ↦ mx` on `Z_{q-χ}` and `x ↦ x^m` on the
/// matching cyclic group (`U_{q+1}` for `χ = -1`, `F_q^*` for `χ = 1`, where
/// the two extra fixed points are removed first).
pub fn transfer(qmax: u64, exec: Execution) -> PropertyReport {
    struct Ctx {
        field: Field,
        units: CyclicSubgroup,
        norm_one: CyclicSubgroup,
    }
    let ctxs: Vec<Ctx> = odd_prime_powers(qmax)
        .into_iter()
        .map(|(_, p, k)| {
            let field = Field::build(p, k).expect("enumerable");
            Ctx {
                units: CyclicSubgroup::new(&field, Subgroup::Units).expect("enumerable"),
                norm_one: CyclicSubgroup::new(&field, Subgroup::NormOne).expect("enumerable"),
                field,
            }
        })
        .collect();
    let mut items = Vec::new();
    for (i, c) in ctxs.iter().enumerate() {
        for chi in Chi::BOTH {
            let n = chi.modulus_of(c.field.order()).expect("small");
            items.extend((1..n).filter(|&m| gcd(m, n) == 1).map(|m| (i, chi, m)));
        }
    }
    let results = exec::map(exec, &items, |&(i, chi, m)| {
        let c = &ctxs[i];
        let q = c.field.order();
        let n = chi.modulus_of(q).expect("small");
        let table = redei::build_permutation(&c.field, m, c.field.canonical_a(chi))
            .map_err(|e| format!("q={q} χ={chi} m={m}: {e}"))?;
        let mut rs = redei::cycle_decomposition(&table);
        let group = match chi {
            Chi::NonSquare => &c.norm_one,
            Chi::Square => {
                rs.remove_fixed(2)
                    .map_err(|e| format!("q={q} m={m}: {e}"))?;
                &c.units
            }
        };
        let mult = redei::mult_map_structure(m, n).expect("coprime");
        let power = group.power_map_structure(m).expect("coprime");
        ensure(group.order() == n && rs == mult && mult == power, || {
            format!("q={q} χ={chi} m={m}: rédei {rs}, f_m {mult}, x^m {power}")
        })?;
        Ok(1)
    });
    PropertyReport::collect("transfer to cyclic groups", results)
}

/// Isolated permutations: count formula, involution property, order at
/// most two, involution classes of size at most two, and power companions
/// staying in their class.
pub fn isolated(qmax: u64, exec: Execution) -> PropertyReport {
    let items = field_moduli(qmax);
    let results = exec::map(exec, &items, |&(q, chi)| {
        let modulus = Modulus::new(q, chi).expect("odd q");
        let n = modulus.value();
        let classes = catalog::classes_of(&modulus, Execution::Sequential);
        let list = catalog::isolated_of(&classes);
        let formula = catalog::isolated_count_of(&modulus);
        ensure(list.len() as u64 == formula, || {
            format!("q={q} χ={chi}: {} isolated, formula {formula}", list.len())
        })?;
        for &m in &list {
            ensure(numthy::mul_mod(m, m, n) == 1 % n, || {
                format!("q={q} χ={chi}: isolated m={m} is not an involution")
            })?;
            ensure(modulus.order(m).expect("valid") <= 2, || {
                format!("q={q} χ={chi}: isolated m={m} has order above 2")
            })?;
        }
        for class in &classes {
            ensure(
                !class.structure.is_involutive() || class.members.len() <= 2,
                || format!("q={q} χ={chi}: involution class {:?}", class.members),
            )?;
            for &m in &class.members {
                if let Some(c) = catalog::power_companion_of(&modulus, m).expect("valid") {
                    ensure(c != m && class.members.contains(&c), || {
                        format!("q={q} χ={chi}: companion {c} of {m} outside its class")
                    })?;
                }
            }
        }
        Ok(1 + classes.len() as u64)
    });
    PropertyReport::collect("isolated permutations", results)
}

/// Involutions with a prescribed fixed-point count against a direct search
/// over all `m` with `m² ≡ 1 (mod q-χ)`.
pub fn involutions(qmax: u64, exec: Execution) -> PropertyReport {
    let items = field_moduli(qmax);
    let results = exec::map(exec, &items, |&(q, chi)| {
        let modulus = Modulus::new(q, chi).expect("odd q");
        let n = modulus.value();
        let classes = catalog::classes_of(&modulus, Execution::Sequential);
        let class_of = |m: u64| -> &StructureClass {
            classes
                .iter()
                .find(|c| c.members.contains(&m))
                .expect("every valid m is classified")
        };
        let mut count = 0;
        for d in modulus.divisors().filter(|&d| d < n) {
            let expected: Vec<u64> = modulus
                .valid_exponents()
                .into_iter()
                .filter(|&m| numthy::mul_mod(m, m, n) == 1 && gcd(m - 1, n) == d)
                .collect();
            let got = catalog::involution_of(&modulus, d);
            count += 1;
            match got {
                Err(_) => ensure(expected.is_empty(), || {
                    format!("q={q} χ={chi} d={d}: none reported, search finds {expected:?}")
                })?,
                Ok(ms) => {
                    ensure(ms == expected, || {
                        format!("q={q} χ={chi} d={d}: formula {ms:?}, search {expected:?}")
                    })?;
                    for &m in &ms {
                        let fixed = modulus.fixed_count(m).expect("valid");
                        ensure(fixed == d + chi.extra_fixed(), || {
                            format!("q={q} χ={chi} d={d}: m={m} has {fixed} fixed points")
                        })?;
                    }
                    ensure(class_of(ms[0]).members == ms, || {
                        format!(
                            "q={q} χ={chi} d={d}: class of {ms:?} is {:?}",
                            class_of(ms[0]).members
                        )
                    })?;
                }
            }
        }
        Ok(count)
    });
    PropertyReport::collect("involutions by fixed points", results)
}

/// Shift and reflection symmetries of `S_χ^q`, each checked against
/// structure equality, plus the cross-field shift over all admissible
/// companion fields up to `qmax`.
pub fn symmetries(qmax: u64, exec: Execution) -> PropertyReport {
    let moduli = field_moduli(qmax);
    let tables: Vec<StructureTable> = moduli
        .iter()
        .map(|&(q, chi)| StructureTable::new(q, chi))
        .collect();
    let indices: Vec<usize> = (0..tables.len()).collect();
    let mut results = exec::map(exec, &indices, |&i| within_field(&tables[i]));

    let mut cross_items = Vec::new();
    for (i, l) in tables.iter().enumerate() {
        for (j, r) in tables.iter().enumerate() {
            if l.modulus.chi() != r.modulus.chi() {
                continue;
            }
            for p in l.modulus.factorization().primes() {
                if catalog::cross_field_admissible(&l.modulus, &r.modulus, p).is_ok() {
                    cross_items.push((i, j, p));
                }
            }
        }
    }
    results.extend(exec::map(exec, &cross_items, |&(i, j, p)| {
        let (l, r) = (&tables[i], &tables[j]);
        let (n, nbar) = (l.n(), r.n());
        let mut count = 0;
        for m in (1..n.max(nbar)).filter(|&m| gcd(m, n) == 1 && gcd(m, nbar) == 1) {
            let (left, right) =
                catalog::cross_field_memberships(&l.modulus, &r.modulus, m, p).expect("admissible");
            let up = m + n / p;
            let down = (m % nbar + nbar - nbar / p) % nbar;
            ensure(
                left == right && left == l.same(m, up) && right == r.same(m, down),
                || {
                    format!(
                        "q={} q̄={} χ={} p={p} m={m}: left {left}, right {right}",
                        l.modulus.q(),
                        r.modulus.q(),
                        l.modulus.chi()
                    )
                },
            )?;
            count += 1;
        }
        Ok(count)
    }));
    PropertyReport::collect("symmetries of S", results)
}

fn within_field(t: &StructureTable) -> Result<u64, String> {
    let modulus = &t.modulus;
    let (q, chi, n) = (modulus.q(), modulus.chi(), t.n());
    let alpha = modulus.factorization().exponent_of(2);
    let valid = t.valid();
    let tag = |what: &str, m: u64, k: u64| format!("q={q} χ={chi} {what} ({m},{k})");
    let mut count = 0;
    for &m in &valid {
        for &k in valid.iter().filter(|&&k| k >= m) {
            let member = t.same(m, k);
            if alpha > 1 {
                let shifted = t.same(m + n / 2, k + n / 2);
                let reported = catalog::half_shift_pair_of(modulus, m, k).expect("α > 1");
                ensure(member == shifted && reported == shifted, || {
                    tag("half shift", m, k)
                })?;
            }
            if !member {
                continue;
            }
            let negated = t.same(n - m, n - k);
            ensure(
                catalog::negate_pair_valid_of(modulus, m, k) == negated,
                || tag("negation", m, k),
            )?;
            if alpha > 1 {
                let half = n / 2;
                let reflected = t.same((half + n - m) % n, (half + n - k) % n);
                ensure(
                    catalog::half_minus_pair_valid_of(modulus, m, k).expect("α > 1") == reflected,
                    || tag("half minus", m, k),
                )?;
            }
            if m != k {
                for d in modulus.divisors().filter(|&d| d < n) {
                    for s in (1..d).filter(|&s| gcd(s, d) == 1) {
                        let (ms, ks) = catalog::shift_pair(modulus, m, k, s, d);
                        let valid_shift = catalog::shift_pair_valid_of(modulus, m, k, s, d)
                            .expect("proper divisor, member pair");
                        ensure(valid_shift == t.same(ms, ks), || {
                            format!("q={q} χ={chi} shift ({m},{k}) by {s}·N/{d}")
                        })?;
                        count += 1;
                    }
                }
            }
            count += 1;
        }
    }
    Ok(count)
}

/// Bounds for [`families`].
#[derive(Debug, Clone, Copy)]
pub struct FamilyBounds {
    /// Largest `p^k` for the Frobenius family.
    pub frobenius_max: u64,
    /// Largest `q` for the quarter, ±2 and `(p, q-p+1)` families.
    pub field_max: u64,
    /// Largest even power `q = p^{2k}` whose `(p, q-p+1)` structure is also
    /// checked point by point.
    pub oracle_max: u64,
}

fn structures_of(f: &FamilyPrediction) -> Result<(Modulus, u64, u64), String> {
    let q =
        f.q.to_u64()
            .ok_or_else(|| format!("q = {} too large", f.q))?;
    let (m, n) = f.pair_u64().expect("pair below q");
    Ok((Modulus::new(q, f.chi).expect("odd q"), m, n))
}

// Pair in S by the theorem and by structures; predicted structure, if any,
// equal to both coordinates' structures.
fn check_member(f: &FamilyPrediction) -> Result<(), String> {
    let (modulus, m, n) = structures_of(f)?;
    let label = || format!("{} q={} χ={} pair ({m},{n})", f.family, f.q, f.chi);
    let (sm, sn) = match (modulus.structure(m), modulus.structure(n)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return Err(format!("{}: not permutations", label())),
    };
    ensure(modulus.in_s(m, n) && sm == sn, || {
        format!("{}: not in S", label())
    })?;
    if let Some(p) = &f.predicted_structure {
        ensure(*p == sm, || {
            format!("{}: predicted {p}, formula {sm}", label())
        })?;
    }
    Ok(())
}

/// Families against the theorem, the structure formula, and for the
/// smallest even powers the brute-force oracle.
pub fn families(bounds: FamilyBounds, exec: Execution) -> PropertyReport {
    let mut results = Vec::new();

    let mut frob = Vec::new();
    for (_, p, k) in odd_prime_powers(bounds.frobenius_max) {
        for l1 in 1..k {
            for l2 in 1..k {
                frob.extend(Chi::BOTH.map(|chi| (p, k, l1, l2, chi)));
            }
        }
    }
    results.extend(exec::map(exec, &frob, |&(p, k, l1, l2, chi)| {
        let f = families::frobenius_family(p, k, l1, l2, chi).map_err(|e| e.to_string())?;
        let (modulus, m, n) = structures_of(&f)?;
        let same = modulus.structure(m).ok() == modulus.structure(n).ok();
        ensure(f.applicable == same && same == modulus.in_s(m, n), || {
            format!(
                "frobenius p={p} k={k} ℓ=({l1},{l2}) χ={chi}: reported {}",
                f.applicable
            )
        })?;
        if f.applicable {
            check_member(&f)?;
        }
        if numthy::is_prime(k as u64) {
            let s1 = families::frobenius_structure(&BigUint::from(p), k, l1, chi);
            ensure(modulus.structure(m).ok() == Some(s1), || {
                format!("frobenius p={p} k={k} ℓ={l1} χ={chi}: structure mismatch")
            })?;
        }
        Ok(1)
    }));

    let fields = field_moduli(bounds.field_max);
    results.extend(exec::map(exec, &fields, |&(q, chi)| {
        let qb = BigUint::from(q);
        let mut count = 0;
        let quarter = families::quarter_family(&qb, chi);
        ensure(
            quarter.is_ok() == (chi.modulus_of(q).expect("small") % 8 == 0),
            || format!("quarter q={q} χ={chi}: applicability"),
        )?;
        for f in [quarter, families::pm2_family(&qb, chi)]
            .into_iter()
            .flatten()
        {
            check_member(&f)?;
            count += 1;
        }
        let (_, p, _) = numthy::prime_power_of(&qb)
            .map(|(p, e)| (q, p, e))
            .expect("prime power");
        let f = families::p_qmp1_family(p, &qb, chi).map_err(|e| e.to_string())?;
        let (modulus, m, n) = structures_of(&f)?;
        let same = modulus.structure(m).ok() == modulus.structure(n).ok();
        ensure(f.applicable == same, || {
            format!(
                "p-qmp1 q={q} χ={chi}: reported {}, structures equal {same}",
                f.applicable
            )
        })?;
        if f.applicable {
            check_member(&f)?;
        }
        Ok(count + 1)
    }));

    let even: Vec<(u64, u64)> = odd_prime_powers(bounds.oracle_max)
        .into_iter()
        .filter(|&(_, _, k)| k % 2 == 0)
        .map(|(q, p, _)| (q, p))
        .collect();
    results.extend(exec::map(exec, &even, |&(q, p)| {
        let f = families::p_qmp1_family(p, &BigUint::from(q), Chi::NonSquare)
            .map_err(|e| e.to_string())?;
        ensure(f.applicable, || format!("p-qmp1 q={q}: not applicable"))?;
        check_member(&f)?;
        let (_, m, n) = structures_of(&f)?;
        let (_, k) = numthy::prime_power_of(&BigUint::from(q)).expect("prime power");
        let field = Field::build(p, k).map_err(|e| e.to_string())?;
        let a = field.canonical_a(Chi::NonSquare);
        let predicted = f.predicted_structure.clone().expect("even power");
        for e in [m, n] {
            let table = redei::build_permutation(&field, e, a).map_err(|e| e.to_string())?;
            let brute = redei::cycle_decomposition(&table);
            ensure(brute == predicted, || {
                format!("p-qmp1 q={q} m={e}: oracle {brute}, predicted {predicted}")
            })?;
        }
        Ok(1)
    }));

    PropertyReport::collect("families", results)
}

/// Reference classes for `q = 49`, both characters.
pub fn q49_expected_classes(chi: Chi) -> Vec<(Vec<u64>, CycleStructure)> {
    let cs = |c: &[(u64, u64)]| CycleStructure::from_counts(c.iter().copied());
    match chi {
        Chi::NonSquare => vec![
            (vec![1], cs(&[(1, 50)])),
            (
                vec![3, 13, 17, 23, 27, 33, 37, 47],
                cs(&[(1, 2), (4, 2), (20, 2)]),
            ),
            (vec![7, 43], cs(&[(1, 2), (4, 12)])),
            (vec![9, 19, 29, 39], cs(&[(1, 2), (2, 4), (10, 4)])),
            (vec![11, 21, 31, 41], cs(&[(1, 10), (5, 8)])),
            (vec![49], cs(&[(1, 2), (2, 24)])),
        ],
        Chi::Square => vec![
            (vec![1], cs(&[(1, 50)])),
            (vec![5, 29], cs(&[(1, 6), (2, 10), (4, 6)])),
            (vec![7, 31], cs(&[(1, 8), (2, 21)])),
            (vec![11, 35], cs(&[(1, 4), (2, 11), (4, 6)])),
            (vec![13, 37], cs(&[(1, 14), (2, 6), (4, 6)])),
            (vec![17], cs(&[(1, 18), (2, 16)])),
            (vec![19, 43], cs(&[(1, 8), (2, 9), (4, 6)])),
            (vec![23, 47], cs(&[(1, 4), (2, 23)])),
            (vec![25], cs(&[(1, 26), (2, 12)])),
            (vec![41], cs(&[(1, 10), (2, 20)])),
        ],
    }
}

/// The `q = 49` classes against [`q49_expected_classes`].
pub fn q49_classes_golden() -> PropertyReport {
    let results = Chi::BOTH
        .iter()
        .map(|&chi| {
            let got: Vec<(Vec<u64>, CycleStructure)> = catalog::enumerate_classes(49, chi)
                .map_err(|e| e.to_string())?
                .into_iter()
                .map(|c| (c.members, c.structure))
                .collect();
            let want = q49_expected_classes(chi);
            ensure(got == want, || format!("χ={chi}: classes differ"))?;
            Ok(want.len() as u64)
        })
        .collect();
    PropertyReport::collect("q = 49 classes", results)
}

/// Every sweep, bounded by `qmax`.
pub fn run_all(qmax: u64, exec: Execution) -> Vec<PropertyReport> {
    let mut reports = vec![
        oracle_equivalence(qmax, exec),
        theorem_equivalence(qmax + 1, exec),
        transfer(qmax, exec),
        isolated(qmax, exec),
        involutions(qmax, exec),
        symmetries(qmax, exec),
        families(
            FamilyBounds {
                frobenius_max: qmax,
                field_max: qmax,
                oracle_max: qmax,
            },
            exec,
        ),
    ];
    if qmax >= 49 {
        reports.push(q49_classes_golden());
    }
    reports
}
