//! Finite fields `GF(p^m)` in a polynomial basis, their subfield traces and
//! the embeddings between members of a divisor tower.
//!
//! Elements are identified with their enumeration index: the coefficient
//! vector `[c0, c1, .., c_{m-1}]` (least significant first) is read as the
//! base-`p` number `c0 + c1 p + .. + c_{m-1} p^{m-1}`. Index 0 is zero and
//! index 1 is one. Multiplication goes through discrete log tables built at
//! construction time, so every field is small enough to tabulate.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};

/// An element of some [`FiniteField`], stored as its enumeration index.
///
/// The value carries no reference to its field; all arithmetic goes through
/// the owning `FiniteField`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Wire form of a field: `{"p":…, "m":…, "modulus":[…]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub m: u32,
    pub modulus: Vec<u32>,
}

struct FieldInner {
    p: u32,
    m: u32,
    order: u32,
    /// Monic modulus, `m + 1` coefficients, constant term first.
    modulus: Vec<u32>,
    /// `exp[k] = g^k` for a fixed primitive element `g`, `k < order - 1`.
    exp: Vec<u32>,
    /// Inverse of `exp`; `log[0]` is unused.
    log: Vec<u32>,
    add: Option<Vec<u32>>,
}

/// The finite field `GF(p^m)`. Cheap to clone.
#[derive(Clone)]
pub struct FiniteField(Arc<FieldInner>);

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FiniteField {}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.0.p, self.0.m, self.0.modulus)
    }
}

impl fmt::Display for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.m == 1 {
            write!(f, "GF({})", self.0.p)
        } else {
            write!(f, "GF({}^{})", self.0.p, self.0.m)
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn checked_order(p: u32, m: u32) -> Option<u128> {
    (p as u128).checked_pow(m)
}

impl FiniteField {
    /// `GF(p^m)` with the default caps.
    pub fn new(p: u32, m: u32) -> Result<Self> {
        Self::with_caps(p, m, &Caps::default())
    }

    /// `GF(p^m)` whose modulus is the lexicographically smallest monic
    /// irreducible of degree `m`, coefficients compared constant term first.
    pub fn with_caps(p: u32, m: u32, caps: &Caps) -> Result<Self> {
        Self::validate_shape(p, m, caps)?;
        let order = p.pow(m);
        let mut modulus = vec![0u32; m as usize + 1];
        modulus[m as usize] = 1;
        // Counting t upwards with c0 as the most significant digit walks the
        // candidates in the required lexicographic order.
        for t in 0..order {
            let mut rest = t;
            for i in (0..m as usize).rev() {
                modulus[i] = rest % p;
                rest /= p;
            }
            if poly_is_irreducible(&modulus, p) {
                return Ok(Self::build(p, m, modulus));
            }
        }
        Err(Error::Internal(format!(
            "no irreducible polynomial of degree {m} over GF({p})"
        )))
    }

    /// A field with an explicitly supplied modulus, checked to be monic and irreducible.
    pub fn with_modulus(p: u32, modulus: Vec<u32>, caps: &Caps) -> Result<Self> {
        if modulus.len() < 2 {
            return Err(Error::Parse("modulus must have degree at least 1".into()));
        }
        let m = (modulus.len() - 1) as u32;
        Self::validate_shape(p, m, caps)?;
        if modulus[m as usize] != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::Parse(format!(
                "modulus {modulus:?} is not a monic polynomial over GF({p})"
            )));
        }
        if !poly_is_irreducible(&modulus, p) {
            return Err(Error::Parse(format!("modulus {modulus:?} is reducible over GF({p})")));
        }
        Ok(Self::build(p, m, modulus))
    }

    pub fn from_spec(spec: &FieldSpec, caps: &Caps) -> Result<Self> {
        let f = Self::with_modulus(spec.p, spec.modulus.clone(), caps)?;
        if f.degree() != spec.m {
            return Err(Error::Parse(format!(
                "degree {} disagrees with modulus {:?}",
                spec.m, spec.modulus
            )));
        }
        Ok(f)
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.0.p,
            m: self.0.m,
            modulus: self.0.modulus.clone(),
        }
    }

    fn validate_shape(p: u32, m: u32, caps: &Caps) -> Result<()> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if m == 0 {
            return Err(Error::ZeroDegree);
        }
        let order = checked_order(p, m).unwrap_or(u128::MAX);
        caps.check_elements("field", order)?;
        if order > u32::MAX as u128 {
            return Err(Error::CapExceeded {
                what: "field",
                size: order,
                cap: u32::MAX as u64,
            });
        }
        Ok(())
    }

    fn build(p: u32, m: u32, modulus: Vec<u32>) -> Self {
        let order = p.pow(m);
        let to_poly = |idx: u32| -> Vec<u32> {
            let mut v = Vec::with_capacity(m as usize);
            let mut r = idx;
            for _ in 0..m {
                v.push(r % p);
                r /= p;
            }
            v
        };
        let to_index = |poly: &[u32]| -> u32 { poly.iter().rev().fold(0u32, |acc, &c| acc * p + c) };

        let group = order - 1;
        let mut exp = Vec::new();
        let mut log = vec![0u32; order as usize];
        for cand in 1..order {
            let g = to_poly(cand);
            exp.clear();
            let mut cur = to_poly(1);
            loop {
                exp.push(to_index(&cur));
                cur = poly_mulmod(&cur, &g, &modulus, p);
                let idx = to_index(&cur);
                if idx == 1 {
                    break;
                }
            }
            if exp.len() as u32 == group {
                break;
            }
        }
        for (k, &e) in exp.iter().enumerate() {
            log[e as usize] = k as u32;
        }

        let mut inner = FieldInner {
            p,
            m,
            order,
            modulus,
            exp,
            log,
            add: None,
        };
        if order <= 256 {
            let mut table = vec![0u32; (order * order) as usize];
            for a in 0..order {
                for b in 0..order {
                    table[(a * order + b) as usize] = digit_add(&inner, a, b);
                }
            }
            inner.add = Some(table);
        }
        FiniteField(Arc::new(inner))
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.m
    }

    pub fn order(&self) -> u32 {
        self.0.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// The element with enumeration index `index`.
    pub fn element(&self, index: u32) -> Result<FieldElement> {
        if index >= self.0.order {
            return Err(Error::Parse(format!("index {index} out of range for {self}")));
        }
        Ok(FieldElement(index))
    }

    /// The image of the integer `k` in the prime subfield.
    pub fn from_int(&self, k: i64) -> FieldElement {
        FieldElement(k.rem_euclid(self.0.p as i64) as u32)
    }

    /// Class of `x` modulo the field modulus (the generator the modulus defines).
    pub fn modulus_root(&self) -> FieldElement {
        if self.0.m == 1 {
            self.neg(FieldElement(self.0.modulus[0]))
        } else {
            FieldElement(self.0.p)
        }
    }

    pub fn coeffs(&self, x: FieldElement) -> Vec<u32> {
        let p = self.0.p;
        let mut r = x.0;
        (0..self.0.m)
            .map(|_| {
                let c = r % p;
                r /= p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() > self.0.m as usize || coeffs.iter().any(|&c| c >= self.0.p) {
            return Err(Error::Parse(format!(
                "{coeffs:?} is not a coefficient vector of {self}"
            )));
        }
        Ok(FieldElement(
            coeffs.iter().rev().fold(0u32, |acc, &c| acc * self.0.p + c),
        ))
    }

    /// All elements in enumeration order; index 0 is zero.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.0.order).map(FieldElement)
    }

    /// All elements, refusing fields larger than `caps.elements`.
    pub fn enumerate(&self, caps: &Caps) -> Result<Vec<FieldElement>> {
        caps.check_elements("field enumeration", self.0.order as u128)?;
        Ok(self.elements().collect())
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (1..self.0.order).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.0.add {
            Some(t) => FieldElement(t[(a.0 * self.0.order + b.0) as usize]),
            None => FieldElement(digit_add(&self.0, a.0, b.0)),
        }
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let p = self.0.p;
        if p == 2 {
            return a;
        }
        let (mut r, mut out, mut place) = (a.0, 0u32, 1u32);
        while r > 0 {
            let c = r % p;
            out += ((p - c) % p) * place;
            r /= p;
            place = place.wrapping_mul(p);
        }
        FieldElement(out)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let inner = &*self.0;
        let k = (inner.log[a.0 as usize] as u64 + inner.log[b.0 as usize] as u64) % (inner.order as u64 - 1);
        FieldElement(inner.exp[k as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        if a.is_zero() {
            return None;
        }
        let inner = &*self.0;
        let group = inner.order - 1;
        let k = (group - inner.log[a.0 as usize]) % group;
        Some(FieldElement(inner.exp[k as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Option<FieldElement> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: FieldElement, e: u128) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let inner = &*self.0;
        let group = (inner.order - 1) as u128;
        let k = (inner.log[a.0 as usize] as u128 * (e % group)) % group;
        FieldElement(inner.exp[k as usize])
    }

    /// `x ↦ x^p`.
    pub fn frobenius(&self, x: FieldElement) -> FieldElement {
        self.pow(x, self.0.p as u128)
    }

    pub fn in_prime_field(&self, x: FieldElement) -> bool {
        x.0 < self.0.p
    }

    /// `Tr_{GF(p^m)/GF(p)}(x)` lifted to `{0, .., p-1}`.
    pub fn trace_to_prime(&self, x: FieldElement) -> u32 {
        let mut acc = FieldElement::ZERO;
        let mut cur = x;
        for _ in 0..self.0.m {
            acc = self.add(acc, cur);
            cur = self.frobenius(cur);
        }
        debug_assert!(self.in_prime_field(acc));
        acc.0
    }

    /// Coefficient-vector rendering, e.g. `[1,0]`.
    pub fn render(&self, x: FieldElement) -> String {
        let c = self.coeffs(x);
        let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
        format!("[{}]", parts.join(","))
    }

    /// Parses either a coefficient vector `[c0,c1,..]` or, for any field, a
    /// bare integer taken in the prime subfield.
    pub fn parse(&self, s: &str) -> Result<FieldElement> {
        let s = s.trim();
        if let Some(body) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let coeffs = body
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse::<u32>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            self.from_coeffs(&coeffs)
        } else {
            let v: i64 = s.parse().map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
            Ok(self.from_int(v))
        }
    }
}

fn digit_add(inner: &FieldInner, a: u32, b: u32) -> u32 {
    let p = inner.p;
    if p == 2 {
        return a ^ b;
    }
    let (mut x, mut y, mut out, mut place) = (a, b, 0u32, 1u32);
    while x > 0 || y > 0 {
        out += ((x % p + y % p) % p) * place;
        x /= p;
        y /= p;
        place = place.wrapping_mul(p);
    }
    out
}

fn poly_trim(v: &mut Vec<u32>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
}

/// Remainder of `a` modulo the monic polynomial `d` over GF(p).
fn poly_rem(a: &[u32], d: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dd = d.len() - 1;
    while r.len() > dd && r.len() >= d.len() {
        let lead = *r.last().unwrap();
        let shift = r.len() - d.len();
        if lead != 0 {
            for (i, &c) in d.iter().enumerate() {
                let t = (lead as u64 * c as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - t) % p;
            }
        }
        r.pop();
    }
    poly_trim(&mut r);
    r
}

fn poly_mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    let mut r = poly_rem(&prod, modulus, p);
    r.resize(modulus.len() - 1, 0);
    r
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn poly_is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        let mut div = vec![0u32; d + 1];
        div[d] = 1;
        for t in 0..count {
            let mut r = t;
            for c in div.iter_mut().take(d) {
                *c = (r % p as u64) as u32;
                r /= p as u64;
            }
            let rem = poly_rem(f, &div, p);
            if rem.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// A fixed ring embedding `GF(p^m) → GF(p^M)`.
#[derive(Clone)]
pub struct FieldEmbedding {
    sub: FiniteField,
    sup: FiniteField,
    image: Vec<FieldElement>,
    preimage: Vec<u32>,
}

impl fmt::Debug for FieldEmbedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} -> {:?}", self.sub, self.sup)
    }
}

impl FieldEmbedding {
    /// Sends the modulus root of `sub` to the enumeration-smallest root of
    /// `sub`'s modulus inside `sup`.
    pub fn new(sub: &FiniteField, sup: &FiniteField) -> Result<Self> {
        if sub.characteristic() != sup.characteristic() {
            return Err(Error::Mismatch(format!(
                "{sub} and {sup} have different characteristic"
            )));
        }
        if !sup.degree().is_multiple_of(sub.degree()) {
            return Err(Error::NotDivisor {
                sub: sub.degree(),
                sup: sup.degree(),
            });
        }
        let modulus = sub.modulus();
        let root = sup
            .elements()
            .find(|&x| {
                let v = modulus.iter().rev().fold(FieldElement::ZERO, |acc, &c| {
                    sup.add(sup.mul(acc, x), sup.from_int(c as i64))
                });
                v.is_zero()
            })
            .ok_or_else(|| Error::Internal(format!("modulus of {sub} has no root in {sup}")))?;
        Self::from_root(sub, sup, root)
    }

    fn from_root(sub: &FiniteField, sup: &FiniteField, root: FieldElement) -> Result<Self> {
        let mut powers = Vec::with_capacity(sub.degree() as usize);
        let mut cur = FieldElement::ONE;
        for _ in 0..sub.degree() {
            powers.push(cur);
            cur = sup.mul(cur, root);
        }
        let mut image = Vec::with_capacity(sub.order() as usize);
        let mut preimage = vec![u32::MAX; sup.order() as usize];
        for x in sub.elements() {
            let y = sub
                .coeffs(x)
                .iter()
                .zip(&powers)
                .fold(FieldElement::ZERO, |acc, (&c, &pw)| {
                    sup.add(acc, sup.mul(sup.from_int(c as i64), pw))
                });
            if preimage[y.0 as usize] != u32::MAX {
                return Err(Error::Internal(format!("embedding {sub} -> {sup} is not injective")));
            }
            preimage[y.0 as usize] = x.0;
            image.push(y);
        }
        Ok(FieldEmbedding {
            sub: sub.clone(),
            sup: sup.clone(),
            image,
            preimage,
        })
    }

    pub fn sub(&self) -> &FiniteField {
        &self.sub
    }

    pub fn sup(&self) -> &FiniteField {
        &self.sup
    }

    pub fn apply(&self, x: FieldElement) -> FieldElement {
        self.image[x.0 as usize]
    }

    pub fn preimage(&self, y: FieldElement) -> Option<FieldElement> {
        match self.preimage[y.0 as usize] {
            u32::MAX => None,
            v => Some(FieldElement(v)),
        }
    }

    pub fn generator_image(&self) -> FieldElement {
        self.apply(self.sub.modulus_root())
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &FieldEmbedding) -> Result<FieldEmbedding> {
        if next.sub != self.sup {
            return Err(Error::Mismatch("embeddings do not compose".into()));
        }
        let root = next.apply(self.generator_image());
        Self::from_root(&self.sub, &next.sup, root)
    }

    /// Relative trace `Tr_{sup/sub}(x) = Σ x^{|sub|^i}`, returned in `sub`.
    pub fn trace(&self, x: FieldElement) -> FieldElement {
        let steps = self.sup.degree() / self.sub.degree();
        let q = self.sub.order() as u128;
        let mut acc = FieldElement::ZERO;
        let mut cur = x;
        for _ in 0..steps {
            acc = self.sup.add(acc, cur);
            cur = self.sup.pow(cur, q);
        }
        self.preimage(acc)
            .expect("relative trace lies in the embedded subfield")
    }
}

/// `Tr_{GF(p^M)/GF(p^m)}(x)` with respect to the default embedding of the
/// smallest-modulus `GF(p^m)` into `field`.
pub fn field_trace(field: &FiniteField, x: FieldElement, target_degree: u32) -> Result<(FiniteField, FieldElement)> {
    if target_degree == 0 || !field.degree().is_multiple_of(target_degree) {
        return Err(Error::NotDivisor {
            sub: target_degree,
            sup: field.degree(),
        });
    }
    let sub = FiniteField::new(field.characteristic(), target_degree)?;
    let emb = FieldEmbedding::new(&sub, field)?;
    let t = emb.trace(x);
    Ok((sub, t))
}
