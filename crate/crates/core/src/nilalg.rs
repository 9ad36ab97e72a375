//! The nil algebra `u_n(F)` of strictly upper-triangular matrices and the
//! algebra group `1 + u_n(F)`.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::exactfield::{FieldElement, FiniteField};

/// Number of strictly-upper positions of an `n × n` matrix.
pub fn dim(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Strictly upper-triangular positions `(1,2),(1,3),..,(n-1,n)` in storage order.
pub fn positions(n: usize) -> Vec<(usize, usize)> {
    (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect()
}

/// A strictly upper-triangular matrix over a finite field.
///
/// Entries are stored densely in the order of [`positions`]; indices are
/// 1-based to match the usual `e_{i,j}` notation.
#[derive(Clone)]
pub struct NilMatrix {
    n: usize,
    field: FiniteField,
    entries: Vec<FieldElement>,
}

impl PartialEq for NilMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.entries == other.entries && self.field == other.field
    }
}

impl Eq for NilMatrix {}

impl Hash for NilMatrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.entries.hash(state);
    }
}

impl fmt::Debug for NilMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NilMatrix({}; {})", self.n, self)
    }
}

impl fmt::Display for NilMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prime = self.field.degree() == 1;
        let terms: Vec<String> = self
            .nonzero()
            .map(|((i, j), v)| {
                let val = if prime {
                    v.index().to_string()
                } else {
                    self.field.render(v)
                };
                if self.n > 9 {
                    format!("a{i}_{j}={val}")
                } else {
                    format!("a{i}{j}={val}")
                }
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(","))
        }
    }
}

#[inline]
fn offset(n: usize, i: usize) -> usize {
    // rows 1..i-1 hold n-1, n-2, .. entries
    (i - 1) * n - (i - 1) * i / 2
}

impl NilMatrix {
    pub fn zero(n: usize, field: &FiniteField) -> Self {
        NilMatrix {
            n,
            field: field.clone(),
            entries: vec![FieldElement::ZERO; dim(n)],
        }
    }

    /// `α e_{i,j}`.
    pub fn elementary(n: usize, field: &FiniteField, i: usize, j: usize, alpha: FieldElement) -> Result<Self> {
        let mut m = Self::zero(n, field);
        m.set(i, j, alpha)?;
        Ok(m)
    }

    pub fn from_entries(n: usize, field: &FiniteField, entries: Vec<FieldElement>) -> Result<Self> {
        if entries.len() != dim(n) {
            return Err(Error::Mismatch(format!("{} entries for n = {n}", entries.len())));
        }
        if entries.iter().any(|e| e.index() >= field.order()) {
            return Err(Error::Mismatch(format!("entry outside {field}")));
        }
        Ok(NilMatrix {
            n,
            field: field.clone(),
            entries,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    /// Entries in storage order; also the canonical hash encoding.
    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    /// Canonical encoding: entry enumeration indices in storage order.
    pub fn encode(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.index()).collect()
    }

    #[inline]
    pub(crate) fn idx(&self, i: usize, j: usize) -> usize {
        offset(self.n, i) + (j - i - 1)
    }

    fn check_pos(&self, i: usize, j: usize) -> Result<()> {
        if i == 0 || i >= j || j > self.n {
            return Err(Error::Mismatch(format!(
                "({i},{j}) is not a strictly upper position for n = {}",
                self.n
            )));
        }
        Ok(())
    }

    /// Entry `(i,j)`; zero on and below the diagonal.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        if i >= j {
            FieldElement::ZERO
        } else {
            self.entries[self.idx(i, j)]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) -> Result<()> {
        self.check_pos(i, j)?;
        if v.index() >= self.field.order() {
            return Err(Error::Mismatch(format!("entry outside {}", self.field)));
        }
        let k = self.idx(i, j);
        self.entries[k] = v;
        Ok(())
    }

    #[inline]
    pub(crate) fn put(&mut self, i: usize, j: usize, v: FieldElement) {
        let k = self.idx(i, j);
        self.entries[k] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Nonzero entries in storage order.
    pub fn nonzero(&self) -> impl Iterator<Item = ((usize, usize), FieldElement)> + '_ {
        positions(self.n)
            .into_iter()
            .zip(self.entries.iter().copied())
            .filter(|(_, v)| !v.is_zero())
    }

    /// At most one nonzero entry per row and per column.
    pub fn is_verge(&self) -> bool {
        let mut rows = BTreeSet::new();
        let mut cols = BTreeSet::new();
        self.nonzero().all(|((i, j), _)| rows.insert(i) && cols.insert(j))
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.field != other.field {
            return Err(Error::Mismatch(format!(
                "matrices of size {} over {} and size {} over {}",
                self.n, self.field, other.n, other.field
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        Ok(self.add_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &Self) -> Self {
        let f = &self.field;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        NilMatrix {
            n: self.n,
            field: self.field.clone(),
            entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        Ok(self.add_unchecked(&other.neg()))
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        NilMatrix {
            n: self.n,
            field: f.clone(),
            entries: self.entries.iter().map(|&a| f.neg(a)).collect(),
        }
    }

    pub fn scale(&self, c: FieldElement) -> Self {
        let f = &self.field;
        NilMatrix {
            n: self.n,
            field: f.clone(),
            entries: self.entries.iter().map(|&a| f.mul(c, a)).collect(),
        }
    }

    /// Matrix product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.n;
        let f = &self.field;
        let mut out = Self::zero(n, f);
        for i in 1..=n {
            for k in i + 1..=n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in k + 1..=n {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let t = out.idx(i, j);
                    out.entries[t] = f.add(out.entries[t], f.mul(a, b));
                }
            }
        }
        out
    }

    /// `row_target += c · row_source`, i.e. left multiplication by `1 + c e_{target,source}`.
    pub(crate) fn add_row_multiple(&mut self, target: usize, source: usize, c: FieldElement) {
        let f = self.field.clone();
        for j in source + 1..=self.n {
            let v = self.get(source, j);
            if v.is_zero() || j <= target {
                continue;
            }
            let t = self.idx(target, j);
            self.entries[t] = f.add(self.entries[t], f.mul(c, v));
        }
    }

    /// `col_target += c · col_source`, i.e. right multiplication by `1 + c e_{source,target}`.
    pub(crate) fn add_col_multiple(&mut self, target: usize, source: usize, c: FieldElement) {
        let f = self.field.clone();
        for i in 1..source {
            let v = self.get(i, source);
            if v.is_zero() || i >= target {
                continue;
            }
            let t = self.idx(i, target);
            self.entries[t] = f.add(self.entries[t], f.mul(c, v));
        }
    }

    /// `Σ_{i<j} self_{ij} other_{ij}`, the trace form `Tr(selfᵀ other)`.
    pub fn pairing(&self, other: &Self) -> Result<FieldElement> {
        self.compatible(other)?;
        Ok(self.pairing_unchecked(other))
    }

    #[inline]
    pub(crate) fn pairing_unchecked(&self, other: &Self) -> FieldElement {
        let f = &self.field;
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(FieldElement::ZERO, |acc, (&a, &b)| {
                if a.is_zero() || b.is_zero() {
                    acc
                } else {
                    f.add(acc, f.mul(a, b))
                }
            })
    }

    /// Dense `n × n` form (0-based), optionally with the identity added.
    pub fn to_square(&self, unipotent: bool) -> Vec<Vec<FieldElement>> {
        let n = self.n;
        let mut m = vec![vec![FieldElement::ZERO; n]; n];
        for i in 1..=n {
            if unipotent {
                m[i - 1][i - 1] = FieldElement::ONE;
            }
            for j in i + 1..=n {
                m[i - 1][j - 1] = self.get(i, j);
            }
        }
        m
    }

    /// Strictly upper part of a dense `n × n` matrix (0-based).
    pub fn from_square_upper(field: &FiniteField, sq: &[Vec<FieldElement>]) -> Self {
        let n = sq.len();
        let mut m = Self::zero(n, field);
        for i in 1..=n {
            for j in i + 1..=n {
                let k = m.idx(i, j);
                m.entries[k] = sq[i - 1][j - 1];
            }
        }
        m
    }

    /// Parses `a12=1,a13=[0,1]` (or `a1_12=..` for two-digit indices).
    pub fn parse(text: &str, n: usize, field: &FiniteField) -> Result<Self> {
        let mut m = Self::zero(n, field);
        let text = text.trim();
        if text.is_empty() || text == "0" {
            return Ok(m);
        }
        // split on commas that are not inside brackets
        let mut parts = Vec::new();
        let (mut depth, mut start) = (0i32, 0usize);
        for (k, ch) in text.char_indices() {
            match ch {
                '[' => depth += 1,
                ']' => depth -= 1,
                ',' if depth == 0 => {
                    parts.push(&text[start..k]);
                    start = k + 1;
                }
                _ => {}
            }
        }
        parts.push(&text[start..]);
        for part in parts {
            let (lhs, rhs) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected a{{i}}{{j}}=value, got {part:?}")))?;
            let lhs = lhs.trim();
            let idx = lhs
                .strip_prefix('a')
                .ok_or_else(|| Error::Parse(format!("entry {lhs:?} must start with 'a'")))?;
            let (i, j) = if let Some((a, b)) = idx.split_once('_') {
                (a.parse::<usize>().ok(), b.parse::<usize>().ok())
            } else if idx.len() == 2 {
                (idx[..1].parse::<usize>().ok(), idx[1..].parse::<usize>().ok())
            } else {
                (None, None)
            };
            let (i, j) = match (i, j) {
                (Some(i), Some(j)) => (i, j),
                _ => return Err(Error::Parse(format!("bad entry name {lhs:?}"))),
            };
            let v = field.parse(rhs)?;
            m.set(i, j, v).map_err(|e| Error::Parse(e.to_string()))?;
        }
        Ok(m)
    }
}

/// An element `1 + body` of the algebra group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    body: NilMatrix,
}

impl GroupElement {
    pub fn identity(n: usize, field: &FiniteField) -> Self {
        GroupElement {
            body: NilMatrix::zero(n, field),
        }
    }

    /// The unit `1 + body`.
    pub fn new(body: NilMatrix) -> Self {
        GroupElement { body }
    }

    /// `1 + α e_{i,j}`.
    pub fn elementary(n: usize, field: &FiniteField, i: usize, j: usize, alpha: FieldElement) -> Result<Self> {
        Ok(GroupElement {
            body: NilMatrix::elementary(n, field, i, j, alpha)?,
        })
    }

    pub fn body(&self) -> &NilMatrix {
        &self.body
    }

    pub fn into_body(self) -> NilMatrix {
        self.body
    }

    pub fn is_identity(&self) -> bool {
        self.body.is_zero()
    }

    /// `(1+a)(1+b) = 1 + a + b + ab`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.body.compatible(&other.body)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let ab = self.body.mul_unchecked(&other.body);
        GroupElement {
            body: self.body.add_unchecked(&other.body).add_unchecked(&ab),
        }
    }

    /// `(1+a)^{-1} = 1 - a + a² - a³ + …`, finite by nilpotency.
    pub fn inv(&self) -> Self {
        let a = &self.body;
        let mut acc = NilMatrix::zero(a.n, &a.field);
        let mut power = a.neg();
        while !power.is_zero() {
            acc = acc.add_unchecked(&power);
            power = power.mul_unchecked(&a.neg());
        }
        GroupElement { body: acc }
    }

    /// `g · a · h`, for `a` in the algebra.
    pub fn sandwich(g: &Self, a: &NilMatrix, h: &Self) -> Result<NilMatrix> {
        g.body.compatible(a)?;
        h.body.compatible(a)?;
        // (1+x) a (1+y) = a + xa + ay + xay
        let xa = g.body.mul_unchecked(a);
        let ay = a.mul_unchecked(&h.body);
        let xay = xa.mul_unchecked(&h.body);
        Ok(a.add_unchecked(&xa).add_unchecked(&ay).add_unchecked(&xay))
    }
}

/// All `1 + α e_{i,j}`, `i < j`, `α ≠ 0`, ordered by `(i, j, α)`.
pub fn elementary_generators(n: usize, field: &FiniteField, caps: &Caps) -> Result<Vec<GroupElement>> {
    caps.check_elements("field enumeration", field.order() as u128)?;
    let mut out = Vec::new();
    for (i, j) in positions(n) {
        for a in field.nonzero_elements() {
            out.push(GroupElement::elementary(n, field, i, j, a)?);
        }
    }
    Ok(out)
}

/// `|F|^{n(n-1)/2}`, saturating.
pub fn algebra_order(n: usize, field: &FiniteField) -> u128 {
    (field.order() as u128).checked_pow(dim(n) as u32).unwrap_or(u128::MAX)
}

/// Every matrix of `u_n(F)` in mixed-radix order of the storage encoding.
pub fn all_matrices(n: usize, field: &FiniteField, caps: &Caps) -> Result<Vec<NilMatrix>> {
    let total = algebra_order(n, field);
    caps.check_orbit("algebra", total)?;
    let q = field.order();
    let d = dim(n);
    let mut out = Vec::with_capacity(total as usize);
    let mut cur = vec![0u32; d];
    for _ in 0..total {
        let entries = cur.iter().map(|&c| field.element(c).expect("in range")).collect();
        out.push(NilMatrix {
            n,
            field: field.clone(),
            entries,
        });
        for c in cur.iter_mut() {
            *c += 1;
            if *c < q {
                break;
            }
            *c = 0;
        }
    }
    Ok(out)
}

/// A pattern subalgebra of `u_n(F)`: all matrices supported on a set of
/// positions closed under `(i,j),(j,k) ↦ (i,k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSubalgebra {
    n: usize,
    support: BTreeSet<(usize, usize)>,
}

impl PatternSubalgebra {
    pub fn new(n: usize, support: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let support: BTreeSet<_> = support.into_iter().collect();
        for &(i, j) in &support {
            if i == 0 || i >= j || j > n {
                return Err(Error::Mismatch(format!(
                    "({i},{j}) is not a strictly upper position for n = {n}"
                )));
            }
        }
        for &(i, j) in &support {
            for &(k, l) in &support {
                if j == k && !support.contains(&(i, l)) {
                    return Err(Error::NotClosed(format!(
                        "e{i}{j}·e{k}{l} = e{i}{l} is outside the pattern"
                    )));
                }
            }
        }
        Ok(PatternSubalgebra { n, support })
    }

    /// The full algebra `u_n`.
    pub fn full(n: usize) -> Self {
        PatternSubalgebra {
            n,
            support: positions(n).into_iter().collect(),
        }
    }

    /// `F e_{1,n}`, the centre of `u_n`.
    pub fn corner(n: usize) -> Self {
        PatternSubalgebra {
            n,
            support: if n >= 2 { [(1, n)].into() } else { BTreeSet::new() },
        }
    }

    pub fn support(&self) -> &BTreeSet<(usize, usize)> {
        &self.support
    }

    pub fn contains(&self, a: &NilMatrix) -> bool {
        a.n() == self.n && a.nonzero().all(|(pos, _)| self.support.contains(&pos))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32) -> FiniteField {
        FiniteField::new(p, 1).unwrap()
    }

    fn e(n: usize, f: &FiniteField, i: usize, j: usize) -> NilMatrix {
        NilMatrix::elementary(n, f, i, j, f.one()).unwrap()
    }

    #[test]
    fn storage_order() {
        assert_eq!(positions(4), vec![(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
        let f = gf(2);
        let m = NilMatrix::zero(4, &f);
        for (k, (i, j)) in positions(4).into_iter().enumerate() {
            assert_eq!(m.idx(i, j), k);
        }
    }

    #[test]
    fn group_mul_examples() {
        let f = gf(3);
        let x = GroupElement::new(e(3, &f, 1, 2));
        let y = GroupElement::new(e(3, &f, 2, 3));
        let xy = x.mul(&y).unwrap();
        let want = e(3, &f, 1, 2)
            .add(&e(3, &f, 2, 3))
            .unwrap()
            .add(&e(3, &f, 1, 3))
            .unwrap();
        assert_eq!(xy.body(), &want);
        assert_eq!(x.mul(&GroupElement::identity(3, &f)).unwrap(), x);

        let f2 = gf(2);
        let z = GroupElement::new(e(3, &f2, 1, 2));
        assert!(z.mul(&z).unwrap().is_identity());
    }

    #[test]
    fn group_inv_examples() {
        let f = gf(3);
        assert!(GroupElement::identity(3, &f).inv().is_identity());
        let x = GroupElement::new(e(3, &f, 1, 2));
        assert_eq!(x.inv().body(), &e(3, &f, 1, 2).neg());
        let a = e(3, &f, 1, 2).add(&e(3, &f, 2, 3)).unwrap();
        let want = a.neg().add(&e(3, &f, 1, 3)).unwrap();
        assert_eq!(GroupElement::new(a).inv().body(), &want);
    }

    #[test]
    fn mismatch_is_rejected() {
        let f = gf(2);
        let a = GroupElement::identity(3, &f);
        let b = GroupElement::identity(4, &f);
        assert!(a.mul(&b).is_err());
        let c = GroupElement::identity(3, &gf(3));
        assert!(a.mul(&c).is_err());
    }

    #[test]
    fn generator_counts() {
        let caps = Caps::default();
        assert_eq!(elementary_generators(2, &gf(2), &caps).unwrap().len(), 1);
        assert_eq!(elementary_generators(3, &gf(2), &caps).unwrap().len(), 3);
        let g = elementary_generators(3, &gf(3), &caps).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g[1].body().get(1, 2).index(), 2);
        assert_eq!(g[2].body().get(1, 3).index(), 1);
    }

    #[test]
    fn row_and_column_moves_match_products() {
        let f = gf(3);
        let a = NilMatrix::parse("a12=1,a13=2,a23=1,a24=2,a34=1", 4, &f).unwrap();
        let c = f.from_int(2);
        let mut left = a.clone();
        left.add_row_multiple(1, 3, c);
        let g = GroupElement::elementary(4, &f, 1, 3, c).unwrap();
        let id = GroupElement::identity(4, &f);
        assert_eq!(left, GroupElement::sandwich(&g, &a, &id).unwrap());
        let mut right = a.clone();
        right.add_col_multiple(4, 2, c);
        let h = GroupElement::elementary(4, &f, 2, 4, c).unwrap();
        assert_eq!(right, GroupElement::sandwich(&id, &a, &h).unwrap());
    }

    #[test]
    fn parse_and_display() {
        let f = gf(2);
        let m = NilMatrix::parse("a12=1,a13=1", 3, &f).unwrap();
        assert_eq!(m.to_string(), "a12=1,a13=1");
        assert_eq!(NilMatrix::parse(&m.to_string(), 3, &f).unwrap(), m);
        let f4 = FiniteField::new(2, 2).unwrap();
        let w = NilMatrix::parse("a23=[0,1]", 3, &f4).unwrap();
        assert_eq!(w.get(2, 3), f4.modulus_root());
        assert_eq!(w.to_string(), "a23=[0,1]");
        assert!(NilMatrix::parse("a21=1", 3, &f).is_err());
        assert!(NilMatrix::parse("b12=1", 3, &f).is_err());
        assert!(NilMatrix::parse("a14=1", 3, &f).is_err());
        assert!(NilMatrix::parse("0", 3, &f).unwrap().is_zero());
    }

    #[test]
    fn nilpotent_of_order_n() {
        let f = gf(2);
        let n = 5;
        let mut a = NilMatrix::zero(n, &f);
        for i in 1..n {
            a.set(i, i + 1, f.one()).unwrap();
        }
        let mut p = a.clone();
        for _ in 1..n - 1 {
            p = p.mul(&a).unwrap();
            assert!(!p.is_zero());
        }
        assert!(p.mul(&a).unwrap().is_zero());
    }

    #[test]
    fn pattern_subalgebras() {
        assert!(PatternSubalgebra::new(4, [(1, 2), (2, 3)]).is_err());
        let p = PatternSubalgebra::new(4, [(1, 2), (2, 3), (1, 3), (1, 4)]).unwrap();
        let f = gf(2);
        assert!(p.contains(&e(4, &f, 1, 4)));
        assert!(!p.contains(&e(4, &f, 3, 4)));
        assert!(PatternSubalgebra::corner(4).contains(&e(4, &f, 1, 4)));
        assert_eq!(PatternSubalgebra::full(4).support().len(), 6);
    }
}
