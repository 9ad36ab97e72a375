//! Supercharacter tables of `U_n(F_q)`.
//!
//! Values are computed by the closed nesting formula and cross-checked
//! against the orbit average `ξ^O(g) = |O|⁻¹ Σ_{ϑ∈O} ϑ(g - 1)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::cyclo::Cyclotomic;
use crate::dualspace::{enumerate_dual_orbits, tau_exponent, DualLabel, DualOrbit};
use crate::error::{Error, Result};
use crate::exactfield::{FieldSpec, FiniteField};
use crate::nilalg::{algebra_order, GroupElement, NilMatrix};
use crate::setpartitions::{count_labels, nest, ArcColour, LabelJson};
use crate::superclasses::{canonical_form_with_caps, enumerate_superclasses, par_map, Superclass, SuperclassLabel};

/// Convention for the fixed nontrivial character of `F_q`, recorded in outputs.
pub const BASE_CHARACTER: &str = "tau(x) = zeta_p^Tr(x)";

/// Largest algebra order for which tables are fully cross-validated by default.
pub const FULL_VALIDATION_LIMIT: u128 = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validation {
    /// Every (row, column) pair.
    Full,
    /// This many pseudo-random pairs.
    Spot(usize),
    Off,
}

impl Validation {
    pub fn default_for(algebra_order: u128) -> Self {
        if algebra_order <= FULL_VALIDATION_LIMIT {
            Validation::Full
        } else {
            Validation::Spot(64)
        }
    }
}

/// `ξ^O(g) = |O|⁻¹ Σ_{ϑ_b ∈ O} τ(⟨b, g - 1⟩)`.
pub fn sch_bruteforce(orbit: &[NilMatrix], g: &GroupElement) -> Result<Cyclotomic> {
    let a = g.body();
    let field = a.field();
    let p = field.characteristic();
    let mut counts = vec![0i64; p as usize];
    for b in orbit {
        let t = b.pairing(a)?;
        counts[tau_exponent(field, t) as usize] += 1;
    }
    let size = BigRational::from_integer(BigInt::from(orbit.len()));
    Ok(Cyclotomic::from_root_counts(p, &counts).scale(&size.recip()))
}

/// Closed form: `0` unless `D(π) ⊆ R(π′)`, else `q^{-nest_π(π′)} ϑ_{π,τ}(e_{π′,α})`.
pub fn sch_closed(dual: &DualLabel, class: &SuperclassLabel, field: &FiniteField) -> Result<Cyclotomic> {
    let pi = dual.partition();
    let pi2 = class.partition();
    if pi.n() != pi2.n() {
        return Err(Error::Mismatch(format!("labels on [{}] and [{}]", pi.n(), pi2.n())));
    }
    for (label_arcs, colours) in [
        (pi.arcs(), dual.colours().keys().copied().collect()),
        (pi2.arcs(), class.colours().keys().copied().collect()),
    ] {
        if label_arcs != colours {
            return Err(Error::ColourDomain(format!("{label_arcs:?}")));
        }
    }
    let p = field.characteristic();
    let (_, r) = pi2.s_and_r();
    if !pi.arcs().is_subset(&r) {
        return Ok(Cyclotomic::zero(p));
    }
    let (nesting, _) = nest(pi, pi2)?;
    let mut exponent = 0u64;
    for (arc, beta) in dual.colours() {
        if let Some(alpha) = class.colours().get(arc) {
            exponent += tau_exponent(field, field.mul(beta.field_value(), *alpha)) as u64;
        }
    }
    let q = BigInt::from(field.order());
    let scale = BigRational::new(BigInt::one(), num_traits::pow(q, nesting));
    Ok(Cyclotomic::root(p, (exponent % p as u64) as i64).scale(&scale))
}

#[derive(Debug, Clone)]
pub struct TableRow {
    pub label: DualLabel,
    pub size: u64,
    /// `|O| / |A|`.
    pub weight: BigRational,
}

#[derive(Debug, Clone)]
pub struct TableCol {
    pub label: SuperclassLabel,
    pub size: u64,
}

/// Normalized supercharacter table: rows are dual orbits, columns superclasses.
#[derive(Debug, Clone)]
pub struct SupercharacterTable {
    pub n: usize,
    pub field: FiniteField,
    pub rows: Vec<TableRow>,
    pub cols: Vec<TableCol>,
    pub values: Vec<Vec<Cyclotomic>>,
    pub classes: Vec<Superclass>,
    pub orbits: Vec<DualOrbit>,
    /// Number of (row, column) pairs checked against the orbit average.
    pub validated_pairs: usize,
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Builds the table by the closed formula and validates it against orbit sums.
pub fn build_table(
    n: usize,
    field: &FiniteField,
    caps: &Caps,
    validation: Option<Validation>,
) -> Result<SupercharacterTable> {
    let total = algebra_order(n, field);
    let classes = enumerate_superclasses(n, field, caps)?;
    let orbits = enumerate_dual_orbits(n, field, caps)?;
    let expected = count_labels(n, field.order() as u64)?;
    if classes.len() as u128 != expected || orbits.len() as u128 != expected {
        return Err(Error::Internal(format!(
            "{} superclasses and {} dual orbits, expected {expected}",
            classes.len(),
            orbits.len()
        )));
    }
    let values = par_map(&orbits, |o| {
        classes
            .iter()
            .map(|c| sch_closed(&o.canonical, &c.canonical, field))
            .collect()
    })?;
    let total_q = BigRational::from_integer(BigInt::from(total));
    let rows = orbits
        .iter()
        .map(|o| TableRow {
            label: o.canonical.clone(),
            size: o.size,
            weight: BigRational::from_integer(BigInt::from(o.size)) / &total_q,
        })
        .collect();
    let cols = classes
        .iter()
        .map(|c| TableCol {
            label: c.canonical.clone(),
            size: c.size,
        })
        .collect();
    let mut table = SupercharacterTable {
        n,
        field: field.clone(),
        rows,
        cols,
        values,
        classes,
        orbits,
        validated_pairs: 0,
    };

    let pairs: Vec<(usize, usize)> = match validation.unwrap_or_else(|| Validation::default_for(total)) {
        Validation::Off => Vec::new(),
        Validation::Full => (0..table.rows.len())
            .flat_map(|r| (0..table.cols.len()).map(move |c| (r, c)))
            .collect(),
        Validation::Spot(k) => {
            let mut state = 0x5EED_u64 ^ (n as u64) << 32 ^ field.order() as u64;
            (0..k)
                .map(|_| {
                    let r = (splitmix(&mut state) % table.rows.len() as u64) as usize;
                    let c = (splitmix(&mut state) % table.cols.len() as u64) as usize;
                    (r, c)
                })
                .collect()
        }
    };
    let mismatches = par_map(&pairs, |&(r, c)| {
        let brute = table.bruteforce_value(r, c, caps)?;
        Ok((brute != table.values[r][c]).then_some((r, c, brute)))
    })?;
    if let Some((r, c, brute)) = mismatches.into_iter().flatten().next() {
        return Err(Error::Internal(format!(
            "route disagreement at row {} / column {}: closed {} vs orbit sum {}",
            table.rows[r].label.render(field),
            table.cols[c].label.render(field),
            table.values[r][c],
            brute
        )));
    }
    table.validated_pairs = pairs.len();
    Ok(table)
}

impl SupercharacterTable {
    /// `|G| = |A|`.
    pub fn group_order(&self) -> u128 {
        algebra_order(self.n, &self.field)
    }

    pub fn conductor(&self) -> u32 {
        self.field.characteristic()
    }

    fn orbit_members(&self, row: usize, caps: &Caps) -> Result<std::borrow::Cow<'_, [NilMatrix]>> {
        match &self.orbits[row].members {
            Some(m) => Ok(std::borrow::Cow::Borrowed(m.as_slice())),
            None => Ok(std::borrow::Cow::Owned(crate::dualspace::dual_orbit(
                &self.orbits[row].rep,
                caps,
            )?)),
        }
    }

    /// Orbit-sum value at the column's representative `1 + e_{π′,α}`.
    pub fn bruteforce_value(&self, row: usize, col: usize, caps: &Caps) -> Result<Cyclotomic> {
        let members = self.orbit_members(row, caps)?;
        sch_bruteforce(&members, &GroupElement::new(self.classes[col].rep.clone()))
    }

    /// Column index of the superclass with this label.
    pub fn column_of(&self, label: &SuperclassLabel) -> Option<usize> {
        self.cols.iter().position(|c| &c.label == label)
    }

    pub fn row_of(&self, label: &DualLabel) -> Option<usize> {
        self.rows.iter().position(|r| &r.label == label)
    }

    /// `ξ_row(g)`, located through the canonical form of `g - 1`.
    pub fn value_at(&self, row: usize, g: &GroupElement, caps: &Caps) -> Result<Cyclotomic> {
        let label = canonical_form_with_caps(g.body(), caps)?;
        let col = self
            .column_of(&label)
            .ok_or_else(|| Error::Internal(format!("no column for {}", label.render(&self.field))))?;
        Ok(self.values[row][col].clone())
    }

    /// `⟨ξ_i, ξ_j⟩ = |G|⁻¹ Σ_K |K| ξ_i(K) conj(ξ_j(K))`.
    pub fn inner_product(&self, i: usize, j: usize) -> Cyclotomic {
        let p = self.conductor();
        let mut acc = Cyclotomic::zero(p);
        for (c, col) in self.cols.iter().enumerate() {
            let term = &self.values[i][c] * &self.values[j][c].conj();
            acc = &acc + &term.scale(&BigRational::from_integer(BigInt::from(col.size)));
        }
        acc.scale(&BigRational::new(BigInt::one(), BigInt::from(self.group_order())))
    }

    /// Index of the identity column (the all-singletons label).
    pub fn identity_column(&self) -> usize {
        self.cols
            .iter()
            .position(|c| c.label.colours().is_empty())
            .expect("identity superclass present")
    }

    pub fn verify(&self, caps: &Caps) -> TheoryReport {
        verify_theory(self, caps)
    }

    pub fn to_json(&self) -> TableJson {
        let f = &self.field;
        TableJson {
            group: GroupJson::new(self.n, f),
            rows: self
                .rows
                .iter()
                .map(|r| RowJson {
                    label: r.label.to_json(f),
                    size: r.size,
                    weight: rational_string(&r.weight),
                })
                .collect(),
            cols: self
                .cols
                .iter()
                .map(|c| ColJson {
                    label: c.label.to_json(f),
                    size: c.size,
                })
                .collect(),
            values: self.values.clone(),
        }
    }
}

pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let d: BigInt = b.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(a.trim().parse().map_err(|_| bad())?, d))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupJson {
    pub n: usize,
    pub p: u32,
    pub m: u32,
    pub q: u64,
    pub field: FieldSpec,
    pub base_character: String,
}

impl GroupJson {
    pub fn new(n: usize, field: &FiniteField) -> Self {
        GroupJson {
            n,
            p: field.characteristic(),
            m: field.degree(),
            q: field.order() as u64,
            field: field.spec(),
            base_character: BASE_CHARACTER.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowJson {
    pub label: LabelJson,
    pub size: u64,
    pub weight: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColJson {
    pub label: LabelJson,
    pub size: u64,
}

/// `{group, rows:[{label,size,weight}], cols:[{label,size}], values:[[…]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableJson {
    pub group: GroupJson,
    pub rows: Vec<RowJson>,
    pub cols: Vec<ColJson>,
    pub values: Vec<Vec<Cyclotomic>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoryReport {
    pub superclasses: usize,
    pub supercharacters: usize,
    pub checks: Vec<CheckResult>,
}

impl TheoryReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

fn check(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed,
        detail,
    }
}

/// Checks `|K| = |E|`, constancy of every supercharacter on every superclass,
/// and that superclass and dual orbit sizes both sum to `|A|`.
pub fn verify_theory(t: &SupercharacterTable, caps: &Caps) -> TheoryReport {
    let total = t.group_order();
    let mut checks = Vec::new();
    checks.push(check(
        "equal-counts",
        t.cols.len() == t.rows.len(),
        format!("{} superclasses, {} supercharacters", t.cols.len(), t.rows.len()),
    ));

    let full = total <= FULL_VALIDATION_LIMIT;
    let constancy = par_map(&(0..t.rows.len()).collect::<Vec<_>>(), |&r| {
        let members = t.orbit_members(r, caps)?;
        for (c, class) in t.classes.iter().enumerate() {
            let sample: Vec<NilMatrix> = match &class.members {
                Some(m) if full => m.clone(),
                Some(m) => m.iter().take(16).cloned().collect(),
                None => vec![class.rep.clone()],
            };
            for a in sample {
                let v = sch_bruteforce(&members, &GroupElement::new(a.clone()))?;
                if v != t.values[r][c] {
                    return Ok(Some(format!(
                        "row {} is {} at {} but {} at the representative",
                        t.rows[r].label.render(&t.field),
                        v,
                        a,
                        t.values[r][c]
                    )));
                }
            }
        }
        Ok(None)
    });
    let (passed, detail) = match constancy {
        Ok(v) => match v.into_iter().flatten().next() {
            None => (
                true,
                if full {
                    "full scan".to_string()
                } else {
                    "sampled members".to_string()
                },
            ),
            Some(msg) => (false, msg),
        },
        Err(e) => (false, e.to_string()),
    };
    checks.push(check("constancy", passed, detail));

    let class_sum: u128 = t.cols.iter().map(|c| c.size as u128).sum();
    checks.push(check(
        "superclass-sizes",
        class_sum == total,
        format!("sum {class_sum}, |G| = {total}"),
    ));
    let orbit_sum: u128 = t.rows.iter().map(|r| r.size as u128).sum();
    checks.push(check(
        "dual-orbit-sizes",
        orbit_sum == total,
        format!("sum {orbit_sum}, |A| = {total}"),
    ));

    let id = t.identity_column();
    let normalized = t.values.iter().all(|row| row[id].is_one());
    checks.push(check("normalized", normalized, "xi(1) = 1 on every row".into()));

    TheoryReport {
        superclasses: t.cols.len(),
        supercharacters: t.rows.len(),
        checks,
    }
}

/// Checks `⟨ξ^O, ξ^{O′}⟩ = δ_{O,O′}/|O|` for every pair; returns the first failure.
pub fn verify_orthogonality(t: &SupercharacterTable) -> std::result::Result<(), String> {
    let p = t.conductor();
    let idx: Vec<usize> = (0..t.rows.len()).collect();
    let bad = par_map(&idx, |&i| {
        for j in 0..t.rows.len() {
            let ip = t.inner_product(i, j);
            let want = if i == j {
                Cyclotomic::from_rational(p, BigRational::new(BigInt::one(), BigInt::from(t.rows[i].size)))
            } else {
                Cyclotomic::zero(p)
            };
            if ip != want {
                return Ok(Some(format!("<{i},{j}> = {ip}, expected {want}")));
            }
        }
        Ok(None)
    })
    .expect("infallible");
    match bad.into_iter().flatten().next() {
        None => Ok(()),
        Some(e) => Err(e),
    }
}

#[derive(Debug, Clone)]
pub struct PlancherelReport {
    pub weights: Vec<(DualLabel, BigRational)>,
    /// `Σ_O (|O|/|A|) ξ^O(K)` for each superclass `K`.
    pub sums: Vec<(SuperclassLabel, Cyclotomic)>,
    pub holds: bool,
}

/// Checks `Σ_O (|O|/|A|) ξ^O(g) = δ_{g,1}` on every superclass.
pub fn plancherel(t: &SupercharacterTable) -> Result<PlancherelReport> {
    let p = t.conductor();
    let id = t.identity_column();
    let mut sums = Vec::with_capacity(t.cols.len());
    let mut holds = true;
    for (c, col) in t.cols.iter().enumerate() {
        let mut acc = Cyclotomic::zero(p);
        for (r, row) in t.rows.iter().enumerate() {
            acc = &acc + &t.values[r][c].scale(&row.weight);
        }
        let expected = if c == id {
            Cyclotomic::one(p)
        } else {
            Cyclotomic::zero(p)
        };
        holds &= acc == expected;
        sums.push((col.label.clone(), acc));
    }
    let weights = t.rows.iter().map(|r| (r.label.clone(), r.weight.clone())).collect();
    if !holds {
        let bad: Vec<String> = sums
            .iter()
            .map(|(l, v)| format!("{}: {}", l.render(&t.field), v))
            .collect();
        return Err(Error::Internal(format!(
            "super-Plancherel identity fails: {}",
            bad.join(", ")
        )));
    }
    Ok(PlancherelReport { weights, sums, holds })
}

/// Weight list keyed by rendered label.
pub fn weight_map(report: &PlancherelReport, field: &FiniteField) -> BTreeMap<String, String> {
    report
        .weights
        .iter()
        .map(|(l, w)| (l.render(field), rational_string(w)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dualspace::DualColour;
    use crate::setpartitions::{ColouredSetPartition, SetPartition};

    fn gf(p: u32) -> FiniteField {
        FiniteField::new(p, 1).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn dual(s: &str, n: usize, colours: &[((usize, usize), u32)], f: &FiniteField) -> DualLabel {
        let c = colours
            .iter()
            .map(|&(a, v)| (a, DualColour(f.element(v).unwrap())))
            .collect();
        ColouredSetPartition::new(SetPartition::parse(s, n).unwrap(), c).unwrap()
    }

    fn class(s: &str, n: usize, colours: &[((usize, usize), u32)], f: &FiniteField) -> SuperclassLabel {
        let c = colours.iter().map(|&(a, v)| (a, f.element(v).unwrap())).collect();
        ColouredSetPartition::new(SetPartition::parse(s, n).unwrap(), c).unwrap()
    }

    #[test]
    fn closed_examples() {
        let f = gf(2);
        let triv = DualLabel::trivial(3);
        let k = class("1,2/3", 3, &[((1, 2), 1)], &f);
        assert!(sch_closed(&triv, &k, &f).unwrap().is_one());
        let x = dual("1,3/2", 3, &[((1, 3), 1)], &f);
        assert!(sch_closed(&x, &k, &f).unwrap().is_zero());
        let x = dual("1,4/2/3", 4, &[((1, 4), 1)], &f);
        let k = class("1/2,3/4", 4, &[((2, 3), 1)], &f);
        assert_eq!(sch_closed(&x, &k, &f).unwrap(), Cyclotomic::from_rational(2, q(1, 2)));
        assert!(sch_closed(&x, &SuperclassLabel::trivial(3), &f).is_err());
    }

    #[test]
    fn bruteforce_examples() {
        let f = gf(2);
        let caps = Caps::default();
        let b = NilMatrix::parse("a13=1", 3, &f).unwrap();
        let orbit = crate::dualspace::dual_orbit(&b, &caps).unwrap();
        assert_eq!(orbit.len(), 4);
        let at = |s: &str| sch_bruteforce(&orbit, &GroupElement::new(NilMatrix::parse(s, 3, &f).unwrap())).unwrap();
        assert_eq!(at("a13=1"), Cyclotomic::from_int(2, -1));
        assert!(at("a12=1").is_zero());
        assert!(at("0").is_one());
        let single = vec![NilMatrix::parse("a12=1,a23=1", 3, &f).unwrap()];
        let v = sch_bruteforce(&single, &GroupElement::new(NilMatrix::parse("a12=1", 3, &f).unwrap())).unwrap();
        assert_eq!(v, Cyclotomic::from_int(2, -1));
    }

    #[test]
    fn u3_f2_table_and_checks() {
        let f = gf(2);
        let caps = Caps::default();
        let t = build_table(3, &f, &caps, None).unwrap();
        assert_eq!(t.validated_pairs, 25);
        let ints: Vec<Vec<BigRational>> = t
            .values
            .iter()
            .map(|r| r.iter().map(|v| v.as_rational().unwrap().clone()).collect())
            .collect();
        let want = [
            [1, 1, 1, 1, 1],
            [1, -1, 1, -1, 1],
            [1, 1, -1, -1, 1],
            [1, -1, -1, 1, 1],
            [1, 0, 0, 0, -1],
        ];
        for (r, row) in want.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                assert_eq!(ints[r][c], q(v, 1), "({r},{c})");
            }
        }
        assert!(verify_theory(&t, &caps).passed());
        assert_eq!(t.inner_product(4, 4), Cyclotomic::from_rational(2, q(1, 4)));
        assert!(t.inner_product(0, 0).is_one());
        verify_orthogonality(&t).unwrap();
        let pl = plancherel(&t).unwrap();
        assert!(pl.holds);
        let total: BigRational = pl.weights.iter().map(|(_, w)| w.clone()).sum();
        assert!(total.is_one());
    }

    #[test]
    fn tiny_tables() {
        let caps = Caps::default();
        let t = build_table(1, &gf(2), &caps, None).unwrap();
        assert_eq!(t.values.len(), 1);
        assert!(t.values[0][0].is_one());
        assert!(verify_theory(&t, &caps).passed());
        let t = build_table(2, &gf(3), &caps, None).unwrap();
        // Z/3 character table: row b, column a is ζ^{ab}
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(t.values[r][c], Cyclotomic::root(3, (r * c) as i64));
            }
        }
        let t = build_table(3, &gf(3), &caps, None).unwrap();
        let rep = verify_theory(&t, &caps);
        assert!(rep.passed());
        assert_eq!(rep.superclasses, 11);
    }

    #[test]
    fn json_shape() {
        let t = build_table(3, &gf(2), &Caps::default(), None).unwrap();
        let j = serde_json::to_value(t.to_json()).unwrap();
        assert_eq!(j["rows"][4]["weight"], "1/2");
        assert_eq!(j["rows"][4]["label"]["dual"], true);
        assert_eq!(j["cols"][1]["label"]["colours"]["1,2"], serde_json::json!([1]));
        assert_eq!(j["group"]["base_character"], BASE_CHARACTER);
        let back: TableJson = serde_json::from_value(j).unwrap();
        assert_eq!(back, t.to_json());
    }

    #[test]
    fn rationals_round_trip() {
        for s in ["0", "1", "-3/4", "5/64"] {
            assert_eq!(rational_string(&parse_rational(s).unwrap()), s);
        }
        assert!(parse_rational("1/0").is_err());
    }
}
