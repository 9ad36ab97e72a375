//! Set partitions of `[n]`, their arcs, and the statistics used by the
//! closed supercharacter formula.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactfield::{FieldElement, FiniteField};
use crate::nilalg::NilMatrix;

/// Largest `n` for which partitions are enumerated (Bell(12) = 4213597).
pub const MAX_PARTITION_N: usize = 12;

pub type Arc = (usize, usize);

/// A set partition of `{1, .., n}`; blocks sorted by minimum, elements ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n + 1];
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::Parse("empty block".into()));
            }
            for &x in b {
                if x == 0 || x > n || seen[x] {
                    return Err(Error::Parse(format!("element {x} is out of range or repeated")));
                }
                seen[x] = true;
            }
        }
        if seen[1..].iter().any(|s| !s) {
            return Err(Error::Parse(format!("blocks do not cover [{n}]")));
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(SetPartition { n, blocks })
    }

    /// All singletons.
    pub fn discrete(n: usize) -> Self {
        SetPartition {
            n,
            blocks: (1..=n).map(|i| vec![i]).collect(),
        }
    }

    /// From a restricted-growth string (0-based block labels).
    pub fn from_rgs(rgs: &[usize]) -> Self {
        let k = rgs.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); k];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i + 1);
        }
        SetPartition { n: rgs.len(), blocks }
    }

    /// The partition whose arc set is `arcs`, if one exists.
    pub fn from_arcs(n: usize, arcs: &BTreeSet<Arc>) -> Result<Self> {
        let mut next = vec![0usize; n + 1];
        let mut has_prev = vec![false; n + 1];
        for &(i, j) in arcs {
            if i == 0 || i >= j || j > n {
                return Err(Error::Parse(format!("({i},{j}) is not an arc on [{n}]")));
            }
            if next[i] != 0 || has_prev[j] {
                return Err(Error::Parse(format!("arcs {arcs:?} do not come from a set partition")));
            }
            next[i] = j;
            has_prev[j] = true;
        }
        let blocks = (1..=n)
            .filter(|&i| !has_prev[i])
            .map(|start| {
                let mut b = vec![start];
                let mut cur = start;
                while next[cur] != 0 {
                    cur = next[cur];
                    b.push(cur);
                }
                b
            })
            .collect();
        Ok(SetPartition { n, blocks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Restricted-growth string, 0-based.
    pub fn rgs(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for (k, b) in self.blocks.iter().enumerate() {
            for &x in b {
                out[x - 1] = k;
            }
        }
        out
    }

    /// `D(π)`: pairs of consecutive elements of a block.
    pub fn arcs(&self) -> BTreeSet<Arc> {
        self.blocks
            .iter()
            .flat_map(|b| b.windows(2).map(|w| (w[0], w[1])))
            .collect()
    }

    /// `(S(π), R(π))`.
    pub fn s_and_r(&self) -> (BTreeSet<Arc>, BTreeSet<Arc>) {
        let n = self.n;
        let mut s = BTreeSet::new();
        for (i, j) in self.arcs() {
            for l in j + 1..=n {
                s.insert((i, l));
            }
            for k in 1..i {
                s.insert((k, j));
            }
        }
        let r = (1..=n)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .filter(|p| !s.contains(p))
            .collect();
        (s, r)
    }

    /// `r(π)`: the number of positions `(i,k)`, `(k,j)` strictly inside some arc `(i,j)`.
    pub fn r_of(&self) -> usize {
        let mut set = BTreeSet::new();
        for (i, j) in self.arcs() {
            for k in i + 1..j {
                set.insert((i, k));
                set.insert((k, j));
            }
        }
        set.len()
    }

    /// Parses `1,3/2`.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let blocks = text
            .split('/')
            .map(|b| {
                b.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<usize>()
                            .map_err(|e| Error::Parse(format!("{x:?}: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, blocks)
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{}", parts.join("/"))
    }
}

/// `nest_{(i,j)}(π′)`: arcs of `π′` strictly inside `(i,j)`.
pub fn nest_arc(arc: Arc, other: &SetPartition) -> usize {
    let (i, j) = arc;
    other.arcs().iter().filter(|&&(k, l)| i < k && l < j).count()
}

/// `nest_π(π′)` together with the per-arc breakdown over `D(π)`.
pub fn nest(pi: &SetPartition, other: &SetPartition) -> Result<(usize, BTreeMap<Arc, usize>)> {
    if pi.n != other.n {
        return Err(Error::Mismatch(format!("partitions of [{}] and [{}]", pi.n, other.n)));
    }
    let other_arcs = other.arcs();
    let per: BTreeMap<Arc, usize> = pi
        .arcs()
        .into_iter()
        .map(|(i, j)| ((i, j), other_arcs.iter().filter(|&&(k, l)| i < k && l < j).count()))
        .collect();
    Ok((per.values().sum(), per))
}

/// All set partitions of `[n]` in lexicographic restricted-growth order.
pub fn enumerate_partitions(n: usize) -> Result<Vec<SetPartition>> {
    if n > MAX_PARTITION_N {
        return Err(Error::CapExceeded {
            what: "set partitions of [n]",
            size: n as u128,
            cap: MAX_PARTITION_N as u64,
        });
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(SetPartition { n: 0, blocks: vec![] });
        return Ok(out);
    }
    let mut rgs = vec![0usize; n];
    let mut maxes = vec![0usize; n];
    loop {
        out.push(SetPartition::from_rgs(&rgs));
        let mut k = n - 1;
        loop {
            if k == 0 {
                return Ok(out);
            }
            if rgs[k] <= maxes[k - 1] {
                rgs[k] += 1;
                let m = maxes[k - 1].max(rgs[k]);
                maxes[k] = m;
                for t in k + 1..n {
                    rgs[t] = 0;
                    maxes[t] = m;
                }
                break;
            }
            k -= 1;
        }
    }
}

/// `|Φ_n(F_q)| = Σ_{π} (q-1)^{|D(π)|}`.
pub fn count_labels(n: usize, q: u64) -> Result<u128> {
    let parts = enumerate_partitions(n)?;
    parts.iter().try_fold(0u128, |acc, pi| {
        let d = (n - pi.blocks.len()) as u32;
        ((q - 1) as u128)
            .checked_pow(d)
            .and_then(|t| acc.checked_add(t))
            .ok_or(Error::CapExceeded {
                what: "label count",
                size: u128::MAX,
                cap: u64::MAX,
            })
    })
}

/// A value that can colour an arc.
pub trait ArcColour: Copy + Ord + fmt::Debug {
    fn field_value(self) -> FieldElement;
    fn from_field_value(v: FieldElement) -> Self;
    const DUAL: bool;
}

impl ArcColour for FieldElement {
    fn field_value(self) -> FieldElement {
        self
    }
    fn from_field_value(v: FieldElement) -> Self {
        v
    }
    const DUAL: bool = false;
}

/// A set partition with a nonzero colour on each arc.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColouredSetPartition<C> {
    partition: SetPartition,
    colours: BTreeMap<Arc, C>,
}

impl<C: ArcColour> ColouredSetPartition<C> {
    pub fn new(partition: SetPartition, colours: BTreeMap<Arc, C>) -> Result<Self> {
        let arcs = partition.arcs();
        if colours.keys().copied().collect::<BTreeSet<_>>() != arcs {
            return Err(Error::ColourDomain(format!(
                "colours on {:?}, arcs {:?}",
                colours.keys().collect::<Vec<_>>(),
                arcs
            )));
        }
        if let Some((&(i, j), _)) = colours.iter().find(|(_, c)| c.field_value().is_zero()) {
            return Err(Error::ZeroColour(i, j));
        }
        Ok(ColouredSetPartition { partition, colours })
    }

    /// The uncoloured all-singletons partition.
    pub fn trivial(n: usize) -> Self {
        ColouredSetPartition {
            partition: SetPartition::discrete(n),
            colours: BTreeMap::new(),
        }
    }

    /// Reads the label off a verge matrix.
    pub fn from_verge(a: &NilMatrix) -> Result<Self> {
        if !a.is_verge() {
            return Err(Error::Internal(format!("{a} is not a verge matrix")));
        }
        let colours: BTreeMap<Arc, C> = a.nonzero().map(|(pos, v)| (pos, C::from_field_value(v))).collect();
        let partition = SetPartition::from_arcs(a.n(), &colours.keys().copied().collect())?;
        Ok(ColouredSetPartition { partition, colours })
    }

    pub fn partition(&self) -> &SetPartition {
        &self.partition
    }

    pub fn colours(&self) -> &BTreeMap<Arc, C> {
        &self.colours
    }

    pub fn arcs(&self) -> BTreeSet<Arc> {
        self.partition.arcs()
    }

    /// `e_{π,α} = Σ_{(i,j)∈D(π)} α(i,j) e_{i,j}`.
    pub fn build_e(&self, field: &FiniteField) -> Result<NilMatrix> {
        let mut m = NilMatrix::zero(self.partition.n(), field);
        for (&(i, j), &c) in &self.colours {
            let v = c.field_value();
            if v.is_zero() {
                return Err(Error::ZeroColour(i, j));
            }
            m.set(i, j, v)?;
        }
        Ok(m)
    }

    /// Table sort key: arc mask in diagonal order, then colours by arc.
    pub fn order_key(&self) -> (u128, Vec<u32>) {
        (
            arc_mask(&self.partition),
            self.colours.values().map(|c| c.field_value().index()).collect(),
        )
    }

    /// `1,3/2 {(1,3)=[1]}` style rendering.
    pub fn render(&self, field: &FiniteField) -> String {
        if self.colours.is_empty() {
            return self.partition.to_string();
        }
        let cols: Vec<String> = self
            .colours
            .iter()
            .map(|(&(i, j), c)| format!("{i},{j}={}", field.render(c.field_value())))
            .collect();
        format!("{} {{{}}}", self.partition, cols.join(";"))
    }

    pub fn to_json(&self, field: &FiniteField) -> LabelJson {
        LabelJson {
            blocks: self.partition.blocks.clone(),
            colours: self
                .colours
                .iter()
                .map(|(&(i, j), c)| (format!("{i},{j}"), field.coeffs(c.field_value())))
                .collect(),
            dual: C::DUAL,
        }
    }

    pub fn from_json(j: &LabelJson, n: usize, field: &FiniteField) -> Result<Self> {
        if j.dual != C::DUAL {
            return Err(Error::Parse(format!("expected dual = {}", C::DUAL)));
        }
        let partition = SetPartition::new(n, j.blocks.clone())?;
        let colours = parse_colour_map(j.colours.iter().map(|(k, v)| (k.as_str(), v.as_slice())), field)?;
        Self::new(
            partition,
            colours.into_iter().map(|(a, v)| (a, C::from_field_value(v))).collect(),
        )
    }
}

fn parse_colour_map<'a>(
    items: impl Iterator<Item = (&'a str, &'a [u32])>,
    field: &FiniteField,
) -> Result<BTreeMap<Arc, FieldElement>> {
    items
        .map(|(k, v)| {
            let arc = parse_arc(k)?;
            Ok((arc, field.from_coeffs(v)?))
        })
        .collect()
}

pub fn parse_arc(s: &str) -> Result<Arc> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("arc {s:?} should read i,j")))?;
    let i = a
        .trim()
        .parse::<usize>()
        .map_err(|e| Error::Parse(format!("{a:?}: {e}")))?;
    let j = b
        .trim()
        .parse::<usize>()
        .map_err(|e| Error::Parse(format!("{b:?}: {e}")))?;
    Ok((i, j))
}

/// Parses colour assignments `1,3=[1];2,4=1` (also accepts `|` or whitespace as separators).
pub fn parse_colours(text: &str, field: &FiniteField) -> Result<BTreeMap<Arc, FieldElement>> {
    let mut out = BTreeMap::new();
    for item in text.split([';', '|', ' ']).map(str::trim).filter(|s| !s.is_empty()) {
        let (arc, val) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("colour {item:?} should read i,j=value")))?;
        out.insert(parse_arc(arc)?, field.parse(val)?);
    }
    Ok(out)
}

/// Bit `k` is set when the `k`-th position in diagonal order `(j - i, i)` is an arc.
pub fn arc_mask(pi: &SetPartition) -> u128 {
    let n = pi.n();
    let arcs = pi.arcs();
    let mut bit = 0u32;
    let mut mask = 0u128;
    for d in 1..n {
        for i in 1..=n - d {
            if arcs.contains(&(i, i + d)) {
                mask |= 1u128 << bit;
            }
            bit += 1;
        }
    }
    mask
}

/// Every coloured partition of `[n]` over `field` in table order.
pub fn all_labels<C: ArcColour>(n: usize, field: &FiniteField) -> Result<Vec<ColouredSetPartition<C>>> {
    let mut parts = enumerate_partitions(n)?;
    parts.sort_by_key(arc_mask);
    let q = field.order();
    let mut out = Vec::new();
    for pi in parts {
        let arcs: Vec<Arc> = pi.arcs().into_iter().collect();
        let mut digits = vec![1u32; arcs.len()];
        loop {
            let colours = arcs
                .iter()
                .zip(&digits)
                .map(|(&a, &d)| (a, C::from_field_value(field.element(d).expect("in range"))))
                .collect();
            out.push(ColouredSetPartition {
                partition: pi.clone(),
                colours,
            });
            // last arc varies fastest so that colour vectors come out lexicographically
            let mut done = true;
            for k in (0..arcs.len()).rev() {
                digits[k] += 1;
                if digits[k] < q {
                    done = false;
                    break;
                }
                digits[k] = 1;
            }
            if done {
                break;
            }
        }
    }
    Ok(out)
}

/// JSON form `{"blocks":[[1,3],[2]], "colours":{"1,3":[1]}}`, with `"dual": true` on dual labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelJson {
    pub blocks: Vec<Vec<usize>>,
    pub colours: BTreeMap<String, Vec<u32>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub dual: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> SetPartition {
        SetPartition::parse(s, n).unwrap()
    }

    fn arcs(v: &[Arc]) -> BTreeSet<Arc> {
        v.iter().copied().collect()
    }

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (0..=7).map(|n| enumerate_partitions(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52, 203, 877]);
        assert!(enumerate_partitions(13).is_err());
    }

    #[test]
    fn rgs_order() {
        let rgs: Vec<Vec<usize>> = enumerate_partitions(3).unwrap().iter().map(|p| p.rgs()).collect();
        assert_eq!(
            rgs,
            vec![
                vec![0, 0, 0],
                vec![0, 0, 1],
                vec![0, 1, 0],
                vec![0, 1, 1],
                vec![0, 1, 2]
            ]
        );
    }

    #[test]
    fn arc_examples() {
        assert!(p("1/2/3", 3).arcs().is_empty());
        assert_eq!(p("1,3/2", 3).arcs(), arcs(&[(1, 3)]));
        assert_eq!(p("1,2,3", 3).arcs(), arcs(&[(1, 2), (2, 3)]));
    }

    #[test]
    fn s_and_r_examples() {
        let (s, r) = p("1/2/3", 3).s_and_r();
        assert!(s.is_empty());
        assert_eq!(r.len(), 3);
        let (s, r) = p("1,2/3", 3).s_and_r();
        assert_eq!(s, arcs(&[(1, 3)]));
        assert_eq!(r, arcs(&[(1, 2), (2, 3)]));
        let (s, r) = p("1/2,3/4", 4).s_and_r();
        assert_eq!(s, arcs(&[(2, 4), (1, 3)]));
        assert_eq!(r, arcs(&[(1, 2), (1, 4), (2, 3), (3, 4)]));
    }

    #[test]
    fn nest_examples() {
        let single = SetPartition::discrete(4);
        assert_eq!(nest(&p("1,4/2,3", 4), &single).unwrap().0, 0);
        let (total, per) = nest(&p("1,4/2/3", 4), &p("1/2,3/4", 4)).unwrap();
        assert_eq!(total, 1);
        assert_eq!(per[&(1, 4)], 1);
        assert_eq!(nest(&p("1,3/2", 3), &p("1,2/3", 3)).unwrap().0, 0);
        assert!(nest(&single, &p("1/2", 2)).is_err());
        assert_eq!(nest_arc((1, 4), &p("1/2,3/4", 4)), 1);
    }

    #[test]
    fn r_examples() {
        assert_eq!(p("1/2/3", 3).r_of(), 0);
        assert_eq!(p("1,3/2", 3).r_of(), 2);
        assert_eq!(p("1,2,3", 3).r_of(), 0);
    }

    #[test]
    fn label_counts() {
        assert_eq!(count_labels(3, 2).unwrap(), 5);
        assert_eq!(count_labels(3, 3).unwrap(), 11);
        assert_eq!(count_labels(1, 7).unwrap(), 1);
        assert_eq!(count_labels(4, 2).unwrap(), 15);
    }

    #[test]
    fn build_e_examples() {
        let f = FiniteField::new(2, 1).unwrap();
        let t = ColouredSetPartition::<FieldElement>::trivial(3);
        assert!(t.build_e(&f).unwrap().is_zero());
        let l = ColouredSetPartition::new(p("1,3/2", 3), [((1, 3), f.one())].into()).unwrap();
        assert_eq!(l.build_e(&f).unwrap().to_string(), "a13=1");
        let l = ColouredSetPartition::new(p("1,2,3", 3), [((1, 2), f.one()), ((2, 3), f.one())].into()).unwrap();
        assert_eq!(l.build_e(&f).unwrap().to_string(), "a12=1,a23=1");
    }

    #[test]
    fn colour_validation() {
        let f = FiniteField::new(3, 1).unwrap();
        let err = ColouredSetPartition::new(p("1,3/2", 3), [((1, 3), f.zero())].into()).unwrap_err();
        assert_eq!(err, Error::ZeroColour(1, 3));
        assert!(ColouredSetPartition::new(p("1,3/2", 3), [((1, 2), f.one())].into()).is_err());
        assert!(ColouredSetPartition::<FieldElement>::new(p("1,3/2", 3), BTreeMap::new()).is_err());
    }

    #[test]
    fn from_arcs_round_trip() {
        for pi in enumerate_partitions(5).unwrap() {
            assert_eq!(SetPartition::from_arcs(5, &pi.arcs()).unwrap(), pi);
            let (s, r) = pi.s_and_r();
            assert!(pi.arcs().is_disjoint(&s));
            assert!(pi.arcs().is_subset(&r));
        }
        assert!(SetPartition::from_arcs(3, &arcs(&[(1, 2), (1, 3)])).is_err());
    }

    #[test]
    fn table_order_u3() {
        let f = FiniteField::new(2, 1).unwrap();
        let labels = all_labels::<FieldElement>(3, &f).unwrap();
        let names: Vec<String> = labels.iter().map(|l| l.partition().to_string()).collect();
        assert_eq!(names, vec!["1/2/3", "1,2/3", "1/2,3", "1,2,3", "1,3/2"]);
        let f3 = FiniteField::new(3, 1).unwrap();
        let labels = all_labels::<FieldElement>(3, &f3).unwrap();
        assert_eq!(labels.len(), 11);
        let both: Vec<Vec<u32>> = labels[5..9].iter().map(|l| l.order_key().1).collect();
        assert_eq!(both, vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
    }

    #[test]
    fn json_and_text() {
        let f = FiniteField::new(2, 2).unwrap();
        let w = f.modulus_root();
        let l = ColouredSetPartition::new(p("1,3/2", 3), [((1, 3), w)].into()).unwrap();
        let j = l.to_json(&f);
        assert_eq!(
            serde_json::to_string(&j).unwrap(),
            r#"{"blocks":[[1,3],[2]],"colours":{"1,3":[0,1]}}"#
        );
        assert_eq!(ColouredSetPartition::<FieldElement>::from_json(&j, 3, &f).unwrap(), l);
        assert_eq!(l.render(&f), "1,3/2 {1,3=[0,1]}");
        let c = parse_colours("1,3=[0,1];2,4=1", &f).unwrap();
        assert_eq!(c[&(1, 3)], w);
        assert_eq!(c[&(2, 4)], f.one());
    }
}
