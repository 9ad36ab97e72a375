//! The dual group of `u_n(F)` realised through the trace pairing, the
//! contragredient two-sided action, and dual orbits with canonical labels.
//!
//! A matrix `b` stands for the character `ϑ_b(a) = τ(Σ_{i<j} b_ij a_ij)`
//! where `τ(x) = ζ_p^{Tr(x)}` is the standard character of `F`.

use std::collections::HashSet;

use crate::caps::Caps;
use crate::cyclo::Cyclotomic;
use crate::error::{Error, Result};
use crate::exactfield::{FieldElement, FiniteField};
use crate::nilalg::{algebra_order, positions, GroupElement, NilMatrix};
use crate::setpartitions::{all_labels, ArcColour, ColouredSetPartition};
use crate::superclasses::{bfs_orbit, par_map, MEMBERS_LIMIT};

/// The character `x ↦ τ(β x)` of `F⁺`, recorded by its nonzero `β`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualColour(pub FieldElement);

impl ArcColour for DualColour {
    fn field_value(self) -> FieldElement {
        self.0
    }
    fn from_field_value(v: FieldElement) -> Self {
        DualColour(v)
    }
    const DUAL: bool = true;
}

pub type DualLabel = ColouredSetPartition<DualColour>;

/// Exponent `k` with `τ(x) = ζ_p^k`.
pub fn tau_exponent(field: &FiniteField, x: FieldElement) -> u32 {
    field.trace_to_prime(x)
}

/// `τ(x) = ζ_p^{Tr(x)}`.
pub fn base_character(field: &FiniteField, x: FieldElement) -> Cyclotomic {
    Cyclotomic::root(field.characteristic(), tau_exponent(field, x) as i64)
}

/// `ϑ_b(a) = τ(Tr(bᵀ a))`.
pub fn dual_eval(b: &NilMatrix, a: &NilMatrix) -> Result<Cyclotomic> {
    let t = b.pairing(a)?;
    Ok(base_character(b.field(), t))
}

/// A character of `u_n(F)⁺` in pairing coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DualCharacter {
    pub b: NilMatrix,
}

impl DualCharacter {
    pub fn eval(&self, a: &NilMatrix) -> Result<Cyclotomic> {
        dual_eval(&self.b, a)
    }

    /// `ζ`-exponent of `ϑ_b(a)`.
    pub fn exponent(&self, a: &NilMatrix) -> Result<u32> {
        Ok(tau_exponent(self.b.field(), self.b.pairing(a)?))
    }
}

fn square_mul(f: &FiniteField, x: &[Vec<FieldElement>], y: &[Vec<FieldElement>]) -> Vec<Vec<FieldElement>> {
    let n = x.len();
    let mut out = vec![vec![FieldElement::ZERO; n]; n];
    for i in 0..n {
        for k in 0..n {
            let a = x[i][k];
            if a.is_zero() {
                continue;
            }
            for j in 0..n {
                let b = y[k][j];
                if !b.is_zero() {
                    out[i][j] = f.add(out[i][j], f.mul(a, b));
                }
            }
        }
    }
    out
}

fn transpose(x: &[Vec<FieldElement>]) -> Vec<Vec<FieldElement>> {
    let n = x.len();
    (0..n).map(|i| (0..n).map(|j| x[j][i]).collect()).collect()
}

/// `((g,h)·ϑ_b)(a) = ϑ_b(g⁻¹ a h)`; returns the strictly upper part of `(g⁻¹)ᵀ b hᵀ`.
pub fn dual_act(g: &GroupElement, h: &GroupElement, b: &NilMatrix) -> Result<NilMatrix> {
    if g.body().n() != b.n() || h.body().n() != b.n() || g.body().field() != b.field() || h.body().field() != b.field()
    {
        return Err(Error::Mismatch("dual action operands differ in size or field".into()));
    }
    let f = b.field();
    let ginv_t = transpose(&g.inv().body().to_square(true));
    let h_t = transpose(&h.body().to_square(true));
    let prod = square_mul(f, &square_mul(f, &ginv_t, &b.to_square(false)), &h_t);
    Ok(NilMatrix::from_square_upper(f, &prod))
}

/// Left generator `1 + α e_{i,j}` on a dual matrix: row `j` gains `-α · row i`.
fn dual_left_move(b: &mut NilMatrix, i: usize, j: usize, alpha: FieldElement) {
    let f = b.field().clone();
    let c = f.neg(alpha);
    for l in j + 1..=b.n() {
        let v = b.get(i, l);
        if !v.is_zero() {
            let cur = b.get(j, l);
            b.put(j, l, f.add(cur, f.mul(c, v)));
        }
    }
}

/// Right generator `1 + α e_{i,j}` on a dual matrix: column `i` gains `α · column j`.
fn dual_right_move(b: &mut NilMatrix, i: usize, j: usize, alpha: FieldElement) {
    let f = b.field().clone();
    for k in 1..i {
        let v = b.get(k, j);
        if !v.is_zero() {
            let cur = b.get(k, i);
            b.put(k, i, f.add(cur, f.mul(alpha, v)));
        }
    }
}

fn dual_moves(b: &NilMatrix, out: &mut Vec<NilMatrix>) {
    let field = b.field().clone();
    for (i, j) in positions(b.n()) {
        for alpha in field.nonzero_elements() {
            let mut left = b.clone();
            dual_left_move(&mut left, i, j, alpha);
            out.push(left);
            let mut right = b.clone();
            dual_right_move(&mut right, i, j, alpha);
            out.push(right);
        }
    }
}

/// The `Γ`-orbit of `ϑ_b`, in BFS order.
pub fn dual_orbit(b: &NilMatrix, caps: &Caps) -> Result<Vec<NilMatrix>> {
    bfs_orbit(b, caps, "dual orbit", dual_moves)
}

/// Canonical label: the unique verge member of the dual orbit.
pub fn dual_canonical(b: &NilMatrix, caps: &Caps) -> Result<DualLabel> {
    let mut verge: Vec<NilMatrix> = dual_orbit(b, caps)?.into_iter().filter(NilMatrix::is_verge).collect();
    if verge.len() != 1 {
        verge.sort_by_key(NilMatrix::encode);
        return Err(Error::Internal(format!(
            "dual orbit of {b} has {} verge members (smallest {:?})",
            verge.len(),
            verge.first().map(|v| v.to_string())
        )));
    }
    DualLabel::from_verge(&verge[0])
}

/// Reduces `b` to verge form by dual moves: rows top-down, pivot at the
/// rightmost nonzero entry, clearing below the pivot then to its left.
pub fn dual_reduce_to_verge(b: &NilMatrix) -> NilMatrix {
    let f = b.field().clone();
    let n = b.n();
    let mut m = b.clone();
    for i in 1..n {
        let Some(j) = (i + 1..=n).rev().find(|&j| !m.get(i, j).is_zero()) else {
            continue;
        };
        let vinv = f.inv(m.get(i, j)).expect("pivot is nonzero");
        for r in i + 1..j {
            let c = m.get(r, j);
            if !c.is_zero() {
                dual_left_move(&mut m, i, r, f.mul(c, vinv));
            }
        }
        for l in i + 1..j {
            let c = m.get(i, l);
            if !c.is_zero() {
                dual_right_move(&mut m, l, j, f.neg(f.mul(c, vinv)));
            }
        }
    }
    m
}

/// Canonical dual label by elimination, falling back to orbit search.
pub fn dual_canonical_fast(b: &NilMatrix, caps: &Caps) -> Result<DualLabel> {
    let reduced = dual_reduce_to_verge(b);
    if reduced.is_verge() {
        return DualLabel::from_verge(&reduced);
    }
    dual_canonical(b, caps)
}

#[derive(Debug, Clone)]
pub struct DualOrbit {
    pub canonical: DualLabel,
    /// `ϑ_{π,τ}` as a matrix.
    pub rep: NilMatrix,
    pub size: u64,
    pub members: Option<Vec<NilMatrix>>,
}

/// One dual orbit per coloured partition, in table order.
pub fn enumerate_dual_orbits(n: usize, field: &FiniteField, caps: &Caps) -> Result<Vec<DualOrbit>> {
    caps.check_elements("field enumeration", field.order() as u128)?;
    let total = algebra_order(n, field);
    caps.check_orbit("algebra", total)?;
    let labels = all_labels::<DualColour>(n, field)?;
    let keep = total <= MEMBERS_LIMIT;
    let orbits = par_map(&labels, |label| {
        let rep = label.build_e(field)?;
        let orbit = dual_orbit(&rep, caps)?;
        Ok(DualOrbit {
            canonical: label.clone(),
            rep,
            size: orbit.len() as u64,
            members: keep.then_some(orbit),
        })
    })?;
    let sum: u128 = orbits.iter().map(|o| o.size as u128).sum();
    if sum != total {
        return Err(Error::Internal(format!(
            "dual orbit sizes sum to {sum}, expected {total}"
        )));
    }
    if keep {
        let mut seen = HashSet::with_capacity(total as usize);
        for o in &orbits {
            for m in o.members.as_ref().expect("kept") {
                if !seen.insert(m.entries().to_vec()) {
                    return Err(Error::Internal(format!("{m} lies in two dual orbits")));
                }
            }
        }
    }
    Ok(orbits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32) -> FiniteField {
        FiniteField::new(p, 1).unwrap()
    }

    fn mat(s: &str, n: usize, f: &FiniteField) -> NilMatrix {
        NilMatrix::parse(s, n, f).unwrap()
    }

    /// `b'_{kl} = ⟨b, g⁻¹ e_{kl} h⟩`, read off the defining property on the basis.
    fn act_by_basis(g: &GroupElement, h: &GroupElement, b: &NilMatrix) -> NilMatrix {
        let f = b.field();
        let mut out = NilMatrix::zero(b.n(), f);
        for (k, l) in positions(b.n()) {
            let e = NilMatrix::elementary(b.n(), f, k, l, f.one()).unwrap();
            let moved = GroupElement::sandwich(&g.inv(), &e, h).unwrap();
            out.set(k, l, b.pairing(&moved).unwrap()).unwrap();
        }
        out
    }

    #[test]
    fn base_character_values() {
        let f2 = gf(2);
        assert!(base_character(&f2, f2.zero()).is_one());
        assert_eq!(base_character(&f2, f2.one()), Cyclotomic::from_int(2, -1));
        let f4 = FiniteField::new(2, 2).unwrap();
        assert_eq!(base_character(&f4, f4.modulus_root()), Cyclotomic::from_int(2, -1));
    }

    #[test]
    fn eval_examples() {
        let f = gf(2);
        let a = mat("a12=1,a13=1", 3, &f);
        assert!(dual_eval(&NilMatrix::zero(3, &f), &a).unwrap().is_one());
        assert_eq!(
            dual_eval(&mat("a13=1", 3, &f), &mat("a13=1", 3, &f)).unwrap(),
            Cyclotomic::from_int(2, -1)
        );
        assert!(dual_eval(&mat("a13=1", 3, &f), &mat("a12=1", 3, &f)).unwrap().is_one());
        assert!(dual_eval(&NilMatrix::zero(3, &f), &NilMatrix::zero(4, &f)).is_err());
    }

    #[test]
    fn act_examples() {
        let f = gf(2);
        let id = GroupElement::identity(3, &f);
        let b = mat("a13=1", 3, &f);
        assert_eq!(dual_act(&id, &id, &b).unwrap(), b);
        let h = GroupElement::new(mat("a23=1", 3, &f));
        assert_eq!(dual_act(&id, &h, &b).unwrap(), mat("a12=1,a13=1", 3, &f));
        let b12 = mat("a12=1", 3, &f);
        for g in crate::nilalg::all_matrices(3, &f, &Caps::default()).unwrap() {
            for h in crate::nilalg::all_matrices(3, &f, &Caps::default()).unwrap() {
                let (g, h) = (GroupElement::new(g.clone()), GroupElement::new(h));
                assert_eq!(dual_act(&g, &h, &b12).unwrap(), b12);
            }
        }
    }

    #[test]
    fn act_matches_defining_property() {
        let f = gf(3);
        let g = GroupElement::new(mat("a12=1,a13=2,a23=1,a34=2,a24=1", 4, &f));
        let h = GroupElement::new(mat("a12=2,a14=1,a23=2,a34=1", 4, &f));
        let b = mat("a12=1,a13=1,a14=2,a23=1,a24=2,a34=1", 4, &f);
        assert_eq!(dual_act(&g, &h, &b).unwrap(), act_by_basis(&g, &h, &b));
    }

    #[test]
    fn generator_moves_match_action() {
        let f = gf(3);
        let b = mat("a12=1,a13=2,a14=1,a24=2,a34=1", 4, &f);
        let id = GroupElement::identity(4, &f);
        for (i, j) in positions(4) {
            for a in f.nonzero_elements() {
                let g = GroupElement::elementary(4, &f, i, j, a).unwrap();
                let mut left = b.clone();
                dual_left_move(&mut left, i, j, a);
                assert_eq!(left, dual_act(&g, &id, &b).unwrap());
                let mut right = b.clone();
                dual_right_move(&mut right, i, j, a);
                assert_eq!(right, dual_act(&id, &g, &b).unwrap());
            }
        }
    }

    #[test]
    fn orbit_examples() {
        let f = gf(2);
        let caps = Caps::default();
        let z = NilMatrix::zero(3, &f);
        assert_eq!(dual_orbit(&z, &caps).unwrap().len(), 1);
        assert!(dual_canonical(&z, &caps).unwrap().colours().is_empty());

        let b = mat("a13=1", 3, &f);
        let o: HashSet<NilMatrix> = dual_orbit(&b, &caps).unwrap().into_iter().collect();
        let want: HashSet<NilMatrix> = ["a13=1", "a12=1,a13=1", "a13=1,a23=1", "a12=1,a13=1,a23=1"]
            .iter()
            .map(|s| mat(s, 3, &f))
            .collect();
        assert_eq!(o, want);
        let l = dual_canonical(&b, &caps).unwrap();
        assert_eq!(l.partition().to_string(), "1,3/2");
        assert_eq!(l.colours()[&(1, 3)], DualColour(f.one()));

        let b = mat("a12=1,a23=1", 3, &f);
        assert_eq!(dual_orbit(&b, &caps).unwrap().len(), 1);
        assert_eq!(dual_canonical(&b, &caps).unwrap().partition().to_string(), "1,2,3");
    }

    #[test]
    fn elimination_matches_search() {
        let caps = Caps::default();
        let f = gf(3);
        for a in crate::nilalg::all_matrices(4, &f, &caps).unwrap().iter().step_by(7) {
            assert_eq!(
                dual_canonical_fast(a, &caps).unwrap(),
                dual_canonical(a, &caps).unwrap(),
                "{a}"
            );
        }
    }

    #[test]
    fn u3_dual_orbits() {
        let f = gf(2);
        let orbits = enumerate_dual_orbits(3, &f, &Caps::default()).unwrap();
        let sizes: Vec<u64> = orbits.iter().map(|o| o.size).collect();
        assert_eq!(sizes, vec![1, 1, 1, 1, 4]);
        let j = orbits[4].canonical.to_json(&f);
        assert!(j.dual);
    }
}
