//! Towers of finite fields `GF(p^{c_1}) ⊂ GF(p^{c_2}) ⊂ …`, compatible
//! character sequences along them, and level-by-level supercharacter data.
//!
//! A character of the additive group of level `m` is written `x ↦ τ_m(β_m x)`;
//! restriction to level `m - 1` corresponds to `β_{m-1} = Tr(β_m)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::caps::Caps;
use crate::cyclo::Cyclotomic;
use crate::dualspace::{dual_orbit, tau_exponent, DualColour, DualLabel};
use crate::error::{Error, Result};
use crate::exactfield::{FieldElement, FieldEmbedding, FiniteField};
use crate::sctheory::{build_table, sch_closed, Validation};
use crate::setpartitions::{all_labels, nest, Arc as ArcPos, ArcColour, ColouredSetPartition, SetPartition};
use crate::superclasses::{par_map, superclass_orbit, SuperclassLabel};

struct TowerInner {
    p: u32,
    degrees: Vec<u32>,
    fields: Vec<FiniteField>,
    /// `steps[k]` embeds level `k + 1` into level `k + 2`.
    steps: Vec<FieldEmbedding>,
}

/// Levels are numbered from 1. Each level is embedded in the next by the
/// smallest-root embedding; longer embeddings are composites of these.
#[derive(Clone)]
pub struct FieldTower(Arc<TowerInner>);

impl fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldTower(p={}, degrees={:?})", self.0.p, self.0.degrees)
    }
}

impl PartialEq for FieldTower {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.degrees == other.0.degrees
    }
}

impl Eq for FieldTower {}

impl FieldTower {
    pub fn new(p: u32, degrees: &[u32], caps: &Caps) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::Parse("a tower needs at least one level".into()));
        }
        for w in degrees.windows(2) {
            if w[1] <= w[0] || w[1] % w[0] != 0 {
                return Err(Error::NotDivisor { sub: w[0], sup: w[1] });
            }
        }
        let fields = degrees
            .iter()
            .map(|&c| FiniteField::with_caps(p, c, caps))
            .collect::<Result<Vec<_>>>()?;
        let steps = fields
            .windows(2)
            .map(|w| FieldEmbedding::new(&w[0], &w[1]))
            .collect::<Result<Vec<_>>>()?;
        Ok(FieldTower(Arc::new(TowerInner {
            p,
            degrees: degrees.to_vec(),
            fields,
            steps,
        })))
    }

    /// Degrees `1!, 2!, …, levels!`.
    pub fn factorial(p: u32, levels: usize, caps: &Caps) -> Result<Self> {
        let degrees: Vec<u32> = (1..=levels as u32)
            .scan(1u32, |acc, k| {
                *acc *= k;
                Some(*acc)
            })
            .collect();
        Self::new(p, &degrees, caps)
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degrees(&self) -> &[u32] {
        &self.0.degrees
    }

    pub fn levels(&self) -> usize {
        self.0.fields.len()
    }

    fn check(&self, level: usize) -> Result<()> {
        if level == 0 || level > self.levels() {
            return Err(Error::LevelOutOfRange {
                level,
                levels: self.levels(),
            });
        }
        Ok(())
    }

    pub fn field(&self, level: usize) -> Result<&FiniteField> {
        self.check(level)?;
        Ok(&self.0.fields[level - 1])
    }

    /// Image of `x` (at level `from`) in level `to ≥ from`.
    pub fn embed(&self, x: FieldElement, from: usize, to: usize) -> Result<FieldElement> {
        self.check(from)?;
        self.check(to)?;
        if to < from {
            return Err(Error::Mismatch(format!("cannot embed level {from} into level {to}")));
        }
        Ok((from..to).fold(x, |y, k| self.0.steps[k - 1].apply(y)))
    }

    /// `Tr_{level from / level to}(x)` for `to ≤ from`.
    pub fn trace(&self, x: FieldElement, from: usize, to: usize) -> Result<FieldElement> {
        self.check(from)?;
        self.check(to)?;
        if to > from {
            return Err(Error::Mismatch(format!("cannot trace level {from} down to level {to}")));
        }
        Ok((to..from).rev().fold(x, |y, k| self.0.steps[k - 1].trace(y)))
    }
}

/// Enumeration-smallest `β′` at `level + 1` with `Tr(β′) = β`.
pub fn char_extend(tower: &FieldTower, beta: FieldElement, level: usize) -> Result<FieldElement> {
    let up = tower.field(level + 1)?;
    tower.field(level)?.element(beta.index())?;
    let step = &tower.0.steps[level - 1];
    up.elements()
        .find(|&y| step.trace(y) == beta)
        .ok_or_else(|| Error::Internal(format!("trace onto level {level} is not surjective")))
}

/// A compatible sequence `(β_1, β_2, …)` with `Tr(β_{m+1}) = β_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerCharacter {
    tower: FieldTower,
    betas: Vec<FieldElement>,
}

impl TowerCharacter {
    pub fn new(tower: &FieldTower, betas: Vec<FieldElement>) -> Result<Self> {
        if betas.len() != tower.levels() {
            return Err(Error::Mismatch(format!(
                "{} betas for {} levels",
                betas.len(),
                tower.levels()
            )));
        }
        for (k, &b) in betas.iter().enumerate() {
            tower.field(k + 1)?.element(b.index())?;
        }
        for m in 1..tower.levels() {
            if tower.trace(betas[m], m + 1, m)? != betas[m - 1] {
                return Err(Error::Mismatch(format!(
                    "beta at level {} does not trace to beta at level {m}",
                    m + 1
                )));
            }
        }
        Ok(TowerCharacter {
            tower: tower.clone(),
            betas,
        })
    }

    /// The sequence through `beta` at `level`: traces below, `char_extend` above.
    pub fn from_level(tower: &FieldTower, level: usize, beta: FieldElement) -> Result<Self> {
        tower.field(level)?.element(beta.index())?;
        let mut betas = vec![FieldElement::ZERO; tower.levels()];
        betas[level - 1] = beta;
        for m in (1..level).rev() {
            betas[m - 1] = tower.trace(betas[m], m + 1, m)?;
        }
        for m in level..tower.levels() {
            betas[m] = char_extend(tower, betas[m - 1], m)?;
        }
        Self::new(tower, betas)
    }

    pub fn zero(tower: &FieldTower) -> Self {
        TowerCharacter {
            tower: tower.clone(),
            betas: vec![FieldElement::ZERO; tower.levels()],
        }
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn betas(&self) -> &[FieldElement] {
        &self.betas
    }

    pub fn beta(&self, level: usize) -> Result<FieldElement> {
        self.tower.check(level)?;
        Ok(self.betas[level - 1])
    }

    /// First level with `β_m ≠ 0`; nonzero persists upward since `Tr(0) = 0`.
    pub fn first_nonzero_level(&self) -> Option<usize> {
        self.betas.iter().position(|b| !b.is_zero()).map(|k| k + 1)
    }
}

/// `β_m`, after checking `τ_{m+1}(β_{m+1} ι(x)) = τ_m(β_m x)` for every `x` at level `m`.
pub fn char_restrict(t: &TowerCharacter, level: usize) -> Result<FieldElement> {
    let beta = t.beta(level)?;
    if level < t.tower.levels() {
        let low = t.tower.field(level)?;
        let high = t.tower.field(level + 1)?;
        let beta_up = t.betas[level];
        for x in low.elements() {
            let up = tau_exponent(high, high.mul(beta_up, t.tower.embed(x, level, level + 1)?));
            let down = tau_exponent(low, low.mul(beta, x));
            if up != down {
                return Err(Error::Internal(format!(
                    "restriction of level {} character disagrees at {}",
                    level + 1,
                    low.render(x)
                )));
            }
        }
    }
    Ok(beta)
}

/// A set partition whose arcs carry tower characters, nonzero from level `m0` on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerLabel {
    partition: SetPartition,
    colours: BTreeMap<ArcPos, TowerCharacter>,
    m0: usize,
}

impl TowerLabel {
    pub fn new(partition: SetPartition, colours: BTreeMap<ArcPos, TowerCharacter>) -> Result<Self> {
        let arcs = partition.arcs();
        if colours.keys().copied().collect::<std::collections::BTreeSet<_>>() != arcs {
            return Err(Error::ColourDomain(format!(
                "colours on {:?}, arcs {arcs:?}",
                colours.keys().collect::<Vec<_>>()
            )));
        }
        let mut m0 = 1;
        for (&(i, j), t) in &colours {
            m0 = m0.max(t.first_nonzero_level().ok_or(Error::ZeroColour(i, j))?);
        }
        Ok(TowerLabel { partition, colours, m0 })
    }

    /// Extends colours given at `level` along the tower with `char_extend`.
    pub fn from_level(
        tower: &FieldTower,
        partition: SetPartition,
        level: usize,
        colours: &BTreeMap<ArcPos, FieldElement>,
    ) -> Result<Self> {
        let colours = colours
            .iter()
            .map(|(&a, &b)| Ok((a, TowerCharacter::from_level(tower, level, b)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Self::new(partition, colours)
    }

    pub fn trivial(n: usize) -> Self {
        TowerLabel {
            partition: SetPartition::discrete(n),
            colours: BTreeMap::new(),
            m0: 1,
        }
    }

    pub fn partition(&self) -> &SetPartition {
        &self.partition
    }

    pub fn colours(&self) -> &BTreeMap<ArcPos, TowerCharacter> {
        &self.colours
    }

    pub fn m0(&self) -> usize {
        self.m0
    }

    /// The level-`m` dual label `(π, β_m)`, with every colour's restriction checked.
    pub fn at_level(&self, level: usize) -> Result<DualLabel> {
        if level < self.m0 {
            return Err(Error::BelowFirstLevel { level, m0: self.m0 });
        }
        let colours = self
            .colours
            .iter()
            .map(|(&a, t)| Ok((a, DualColour(char_restrict(t, level)?))))
            .collect::<Result<BTreeMap<_, _>>>()?;
        ColouredSetPartition::new(self.partition.clone(), colours)
    }
}

fn lift_class(tower: &FieldTower, class: &SuperclassLabel, from: usize, to: usize) -> Result<SuperclassLabel> {
    let colours = class
        .colours()
        .iter()
        .map(|(&a, &v)| Ok((a, tower.embed(v, from, to)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    ColouredSetPartition::new(class.partition().clone(), colours)
}

/// Level-`m` supercharacter value at the superclass `(π′, α)` with `α` given at `class_level`.
pub fn tower_supercharacter(
    tower: &FieldTower,
    label: &TowerLabel,
    level: usize,
    class: &SuperclassLabel,
    class_level: usize,
) -> Result<Cyclotomic> {
    tower.check(level)?;
    tower.check(class_level)?;
    if level < class_level {
        return Err(Error::BelowFirstLevel { level, m0: class_level });
    }
    let dual = label.at_level(level)?;
    let field = tower.field(level)?;
    sch_closed(&dual, &lift_class(tower, class, class_level, level)?, field)
}

/// The limit of the level values: `0` unless `D(π) ⊆ R(π′)` and `nest_π(π′) = 0`,
/// else the pairing of the tower colours with `α` at their common level.
pub fn limit_value(
    tower: &FieldTower,
    label: &TowerLabel,
    class: &SuperclassLabel,
    class_level: usize,
) -> Result<Cyclotomic> {
    let p = tower.characteristic();
    let field = tower.field(class_level)?;
    let pi = &label.partition;
    let (_, r) = class.partition().s_and_r();
    let (nesting, _) = nest(pi, class.partition())?;
    if !pi.arcs().is_subset(&r) || nesting > 0 {
        return Ok(Cyclotomic::zero(p));
    }
    let mut exponent = 0u64;
    for (arc, t) in &label.colours {
        if let Some(&alpha) = class.colours().get(arc) {
            exponent += tau_exponent(field, field.mul(t.beta(class_level)?, alpha)) as u64;
        }
    }
    Ok(Cyclotomic::root(p, (exponent % p as u64) as i64))
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer().sqrt(), r.denom().sqrt());
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelValue {
    pub level: usize,
    pub degree: u32,
    pub q: u64,
    /// `None` below the first level where label and class are both defined.
    pub value: Option<Cyclotomic>,
    pub norm_squared: Option<String>,
    pub magnitude: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Stabilized { level: usize },
    NormDecays { nest: usize },
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Stabilized { level } => write!(f, "stabilized at level {level}"),
            Verdict::NormDecays { nest } => write!(f, "norm decays as q_m^-{nest}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvergenceReport {
    pub levels: Vec<LevelValue>,
    pub limit: Cyclotomic,
    pub nest: usize,
    pub first_defined_level: usize,
    pub verdict: Verdict,
}

/// Level values up to `max_level`, the limit, and a verdict checked exactly.
pub fn convergence_report(
    tower: &FieldTower,
    label: &TowerLabel,
    class: &SuperclassLabel,
    class_level: usize,
    max_level: usize,
) -> Result<ConvergenceReport> {
    tower.check(max_level)?;
    tower.check(class_level)?;
    let first = label.m0.max(class_level);
    let (nesting, _) = nest(&label.partition, class.partition())?;
    let limit = limit_value(tower, label, class, class_level)?;
    let idx: Vec<usize> = (1..=max_level).collect();
    let levels = par_map(&idx, |&m| {
        let field = tower.field(m)?;
        let value = if m >= first {
            Some(tower_supercharacter(tower, label, m, class, class_level)?)
        } else {
            None
        };
        let norm = value.as_ref().and_then(Cyclotomic::norm_squared);
        Ok(LevelValue {
            level: m,
            degree: field.degree(),
            q: field.order() as u64,
            magnitude: norm
                .as_ref()
                .and_then(rational_sqrt)
                .map(|r| crate::sctheory::rational_string(&r)),
            norm_squared: norm.as_ref().map(crate::sctheory::rational_string),
            value,
        })
    })?;
    let defined: Vec<&LevelValue> = levels.iter().filter(|l| l.value.is_some()).collect();
    if defined.is_empty() {
        return Err(Error::BelowFirstLevel {
            level: max_level,
            m0: first,
        });
    }
    let verdict = if !limit.is_zero()
        || defined
            .iter()
            .all(|l| l.value.as_ref().is_some_and(Cyclotomic::is_zero))
    {
        let mut stable_from = None;
        for l in defined.iter().rev() {
            if l.value.as_ref() == Some(&limit) {
                stable_from = Some(l.level);
            } else {
                break;
            }
        }
        match stable_from {
            Some(level) if level == first => Verdict::Stabilized { level },
            _ => {
                return Err(Error::Internal(format!(
                    "level values do not equal the limit {limit} from level {first} on"
                )))
            }
        }
    } else {
        for l in &defined {
            let q = BigInt::from(l.q);
            let want = BigRational::new(BigInt::one(), num_traits::pow(q, 2 * nesting));
            let got = l.value.as_ref().and_then(Cyclotomic::norm_squared);
            if got.as_ref() != Some(&want) {
                return Err(Error::Internal(format!(
                    "|value|^2 at level {} is not q^-{}",
                    l.level,
                    2 * nesting
                )));
            }
        }
        Verdict::NormDecays { nest: nesting }
    };
    Ok(ConvergenceReport {
        levels,
        limit,
        nest: nesting,
        first_defined_level: first,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FscEntry {
    /// Label rendered over the level-1 field.
    pub label: String,
    pub arcs: Vec<ArcPos>,
    pub sizes: Vec<u64>,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FscReport {
    pub n: usize,
    pub degrees: Vec<u32>,
    pub superclasses: Vec<FscEntry>,
    pub dual_orbits: Vec<FscEntry>,
    /// Stable superclasses are exactly those with arcs in `{(1,n)}`.
    pub centre_match: bool,
    /// Stable dual orbits are exactly those with all arcs superdiagonal.
    pub superdiagonal_match: bool,
}

impl FscReport {
    pub fn passed(&self) -> bool {
        self.centre_match && self.superdiagonal_match
    }
}

/// Orbit sizes of every level-1 label at each tower level.
pub fn fsc_diagnostic(n: usize, tower: &FieldTower, caps: &Caps) -> Result<FscReport> {
    let f1 = tower.field(1)?;
    let levels: Vec<usize> = (1..=tower.levels()).collect();
    let supers = all_labels::<FieldElement>(n, f1)?;
    let superclasses = par_map(&supers, |label| {
        let sizes = levels
            .iter()
            .map(|&m| {
                let rep = lift_class(tower, label, 1, m)?.build_e(tower.field(m)?)?;
                Ok(superclass_orbit(&rep, caps)?.len() as u64)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(entry(label.render(f1), label.arcs().into_iter().collect(), sizes))
    })?;
    let duals = all_labels::<DualColour>(n, f1)?;
    let dual_orbits = par_map(&duals, |label| {
        let colours: BTreeMap<ArcPos, FieldElement> =
            label.colours().iter().map(|(&a, c)| (a, c.field_value())).collect();
        let tl = TowerLabel::from_level(tower, label.partition().clone(), 1, &colours)?;
        let sizes = levels
            .iter()
            .map(|&m| {
                let rep = tl.at_level(m)?.build_e(tower.field(m)?)?;
                Ok(dual_orbit(&rep, caps)?.len() as u64)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(entry(label.render(f1), label.arcs().into_iter().collect(), sizes))
    })?;
    let centre_match = superclasses
        .iter()
        .all(|e| e.stable == e.arcs.iter().all(|&a| a == (1, n)));
    let superdiagonal_match = dual_orbits
        .iter()
        .all(|e| e.stable == e.arcs.iter().all(|&(i, j)| j == i + 1));
    Ok(FscReport {
        n,
        degrees: tower.degrees().to_vec(),
        superclasses,
        dual_orbits,
        centre_match,
        superdiagonal_match,
    })
}

fn entry(label: String, arcs: Vec<ArcPos>, sizes: Vec<u64>) -> FscEntry {
    let stable = sizes.windows(2).all(|w| w[0] == w[1]);
    FscEntry {
        label,
        arcs,
        sizes,
        stable,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfileLevel {
    pub level: usize,
    pub q: u64,
    pub weight: String,
    /// Rows counted: the trivial row and rows vanishing off the fsc columns.
    pub qualifying: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfileReport {
    pub n: usize,
    pub levels: Vec<ProfileLevel>,
    pub weights: Vec<String>,
    pub nondecreasing: bool,
    pub strictly_increasing: bool,
    pub bounded_by_one: bool,
}

/// Super-Plancherel weight carried by the trivial supercharacter and by the
/// supercharacters that vanish off the fsc superclasses (arcs in `{(1,n)}`),
/// found by scanning each level's table.
pub fn plancherel_profile(n: usize, tower: &FieldTower, caps: &Caps) -> Result<ProfileReport> {
    let mut levels = Vec::new();
    let mut exact = Vec::new();
    for m in 1..=tower.levels() {
        let field = tower.field(m)?;
        let table = build_table(
            n,
            field,
            caps,
            Some(Validation::default_for(crate::nilalg::algebra_order(n, field))),
        )?;
        let fsc: Vec<bool> = table
            .cols
            .iter()
            .map(|c| c.label.arcs().iter().all(|&a| a == (1, n)))
            .collect();
        let mut weight = BigRational::from_integer(0.into());
        let mut qualifying = Vec::new();
        for (r, row) in table.rows.iter().enumerate() {
            let trivial = row.label.colours().is_empty();
            let vanishes = table.values[r].iter().zip(&fsc).all(|(v, &keep)| keep || v.is_zero());
            if trivial || vanishes {
                weight += &row.weight;
                qualifying.push(row.label.render(field));
            }
        }
        levels.push(ProfileLevel {
            level: m,
            q: field.order() as u64,
            weight: crate::sctheory::rational_string(&weight),
            qualifying,
        });
        exact.push(weight);
    }
    let one = BigRational::one();
    Ok(ProfileReport {
        n,
        weights: levels.iter().map(|l| l.weight.clone()).collect(),
        levels,
        nondecreasing: exact.windows(2).all(|w| w[0] <= w[1]),
        strictly_increasing: exact.windows(2).all(|w| w[0] < w[1]),
        bounded_by_one: exact.iter().all(|w| *w <= one),
    })
}
