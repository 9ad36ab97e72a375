//! Two-sided orbits `G a G` on `u_n(F)` (superclasses) and their canonical
//! coloured-set-partition labels.

use std::collections::{HashSet, VecDeque};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::exactfield::{FieldElement, FiniteField};
use crate::nilalg::{algebra_order, positions, NilMatrix};
use crate::setpartitions::{all_labels, ColouredSetPartition};

pub type SuperclassLabel = ColouredSetPartition<FieldElement>;

/// Above this algebra order superclasses keep only their size and representative.
pub const MEMBERS_LIMIT: u128 = 1 << 20;

#[derive(Debug, Clone)]
pub struct Superclass {
    pub canonical: SuperclassLabel,
    /// `e_{π,α}`.
    pub rep: NilMatrix,
    pub size: u64,
    pub members: Option<Vec<NilMatrix>>,
}

/// Breadth-first closure of `start` under `moves`, in discovery order.
pub(crate) fn bfs_orbit<F>(start: &NilMatrix, caps: &Caps, what: &'static str, mut moves: F) -> Result<Vec<NilMatrix>>
where
    F: FnMut(&NilMatrix, &mut Vec<NilMatrix>),
{
    let mut seen: HashSet<Vec<FieldElement>> = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(start.entries().to_vec());
    queue.push_back(start.clone());
    let mut buf = Vec::new();
    while let Some(cur) = queue.pop_front() {
        buf.clear();
        moves(&cur, &mut buf);
        for next in buf.drain(..) {
            if seen.insert(next.entries().to_vec()) {
                if seen.len() as u128 > caps.orbit as u128 {
                    return Err(Error::CapExceeded {
                        what,
                        size: seen.len() as u128,
                        cap: caps.orbit,
                    });
                }
                queue.push_back(next);
            }
        }
        order.push(cur);
    }
    Ok(order)
}

/// Images of `a` under `1 + α e_{i,j}` on either side, for all `i < j`, `α ≠ 0`.
fn superclass_moves(a: &NilMatrix, out: &mut Vec<NilMatrix>) {
    let field = a.field().clone();
    for (i, j) in positions(a.n()) {
        for alpha in field.nonzero_elements() {
            let mut left = a.clone();
            left.add_row_multiple(i, j, alpha);
            out.push(left);
            let mut right = a.clone();
            right.add_col_multiple(j, i, alpha);
            out.push(right);
        }
    }
}

/// The orbit `G a G`, in BFS order starting from `a`.
pub fn superclass_orbit(a: &NilMatrix, caps: &Caps) -> Result<Vec<NilMatrix>> {
    bfs_orbit(a, caps, "superclass orbit", superclass_moves)
}

/// Reduces `a` to verge form by two-sided elementary moves.
///
/// Rows are processed bottom-up; the pivot of a row is its leftmost nonzero
/// entry. Entries above the pivot are cleared by row moves, entries to its
/// right by column moves.
pub fn reduce_to_verge(a: &NilMatrix) -> NilMatrix {
    let field = a.field().clone();
    let n = a.n();
    let mut m = a.clone();
    for i in (1..n).rev() {
        let Some(j) = (i + 1..=n).find(|&j| !m.get(i, j).is_zero()) else {
            continue;
        };
        let v = m.get(i, j);
        let vinv = field.inv(v).expect("pivot is nonzero");
        for k in 1..i {
            let c = m.get(k, j);
            if !c.is_zero() {
                m.add_row_multiple(k, i, field.neg(field.mul(c, vinv)));
            }
        }
        for l in j + 1..=n {
            let c = m.get(i, l);
            if !c.is_zero() {
                m.add_col_multiple(l, j, field.neg(field.mul(c, vinv)));
            }
        }
    }
    m
}

/// The unique `(π, α)` with `e_{π,α}` in the orbit of `a`.
pub fn canonical_form(a: &NilMatrix) -> Result<SuperclassLabel> {
    canonical_form_with_caps(a, &Caps::default())
}

pub fn canonical_form_with_caps(a: &NilMatrix, caps: &Caps) -> Result<SuperclassLabel> {
    let reduced = reduce_to_verge(a);
    if reduced.is_verge() {
        return SuperclassLabel::from_verge(&reduced);
    }
    // elimination should always land in verge form; search the orbit otherwise
    canonical_form_by_search(a, caps)
}

/// Canonical label by exhaustive search of the orbit for its verge member.
pub fn canonical_form_by_search(a: &NilMatrix, caps: &Caps) -> Result<SuperclassLabel> {
    let verge: Vec<NilMatrix> = superclass_orbit(a, caps)?
        .into_iter()
        .filter(NilMatrix::is_verge)
        .collect();
    match verge.as_slice() {
        [v] => SuperclassLabel::from_verge(v),
        _ => Err(Error::Internal(format!(
            "orbit of {a} has {} verge members",
            verge.len()
        ))),
    }
}

pub(crate) fn par_map<T: Send, L: Sync, F>(items: &[L], f: F) -> Result<Vec<T>>
where
    F: Fn(&L) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// One superclass per coloured partition, in table order, with orbits
/// computed by BFS and checked to partition `u_n(F)`.
pub fn enumerate_superclasses(n: usize, field: &FiniteField, caps: &Caps) -> Result<Vec<Superclass>> {
    caps.check_elements("field enumeration", field.order() as u128)?;
    let total = algebra_order(n, field);
    caps.check_orbit("algebra", total)?;
    let labels = all_labels::<FieldElement>(n, field)?;
    let keep = total <= MEMBERS_LIMIT;
    let classes = par_map(&labels, |label| {
        let rep = label.build_e(field)?;
        let orbit = superclass_orbit(&rep, caps)?;
        Ok(Superclass {
            canonical: label.clone(),
            rep,
            size: orbit.len() as u64,
            members: keep.then_some(orbit),
        })
    })?;
    let sum: u128 = classes.iter().map(|c| c.size as u128).sum();
    if sum != total {
        return Err(Error::Internal(format!(
            "superclass sizes sum to {sum}, expected {total}"
        )));
    }
    if keep {
        let mut seen = HashSet::with_capacity(total as usize);
        for c in &classes {
            for m in c.members.as_ref().expect("kept") {
                if !seen.insert(m.entries().to_vec()) {
                    return Err(Error::Internal(format!("{m} lies in two superclasses")));
                }
            }
        }
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nilalg::GroupElement;
    use crate::setpartitions::SetPartition;

    fn gf(p: u32) -> FiniteField {
        FiniteField::new(p, 1).unwrap()
    }

    fn mat(s: &str, n: usize, f: &FiniteField) -> NilMatrix {
        NilMatrix::parse(s, n, f).unwrap()
    }

    #[test]
    fn orbit_examples() {
        let f = gf(2);
        let caps = Caps::default();
        assert_eq!(superclass_orbit(&NilMatrix::zero(3, &f), &caps).unwrap().len(), 1);
        let o: HashSet<String> = superclass_orbit(&mat("a12=1", 3, &f), &caps)
            .unwrap()
            .iter()
            .map(|m| m.to_string())
            .collect();
        assert_eq!(o, ["a12=1", "a12=1,a13=1"].iter().map(|s| s.to_string()).collect());
        assert_eq!(superclass_orbit(&mat("a13=1", 3, &f), &caps).unwrap().len(), 1);
    }

    #[test]
    fn canonical_examples() {
        let f = gf(2);
        let l = canonical_form(&NilMatrix::zero(3, &f)).unwrap();
        assert_eq!(l.partition(), &SetPartition::discrete(3));
        let l = canonical_form(&mat("a12=1,a13=1", 3, &f)).unwrap();
        assert_eq!(l.partition().to_string(), "1,2/3");
        assert_eq!(l.colours()[&(1, 2)], f.one());
        let f3 = gf(3);
        let l = canonical_form(&mat("a12=2,a13=1", 3, &f3)).unwrap();
        assert_eq!(l.partition().to_string(), "1,2/3");
        assert_eq!(l.colours()[&(1, 2)].index(), 2);
    }

    #[test]
    fn u3_f2_superclasses() {
        let f = gf(2);
        let cls = enumerate_superclasses(3, &f, &Caps::default()).unwrap();
        let sizes: Vec<u64> = cls.iter().map(|c| c.size).collect();
        assert_eq!(sizes, vec![1, 2, 2, 2, 1]);
        let names: Vec<String> = cls.iter().map(|c| c.canonical.partition().to_string()).collect();
        assert_eq!(names, vec!["1/2/3", "1,2/3", "1/2,3", "1,2,3", "1,3/2"]);
    }

    #[test]
    fn abelian_and_trivial_cases() {
        for p in [2, 3, 5] {
            let cls = enumerate_superclasses(2, &gf(p), &Caps::default()).unwrap();
            assert_eq!(cls.len(), p as usize);
            assert!(cls.iter().all(|c| c.size == 1));
        }
        assert_eq!(enumerate_superclasses(1, &gf(2), &Caps::default()).unwrap().len(), 1);
    }

    #[test]
    fn elimination_agrees_with_search() {
        let f = gf(3);
        let caps = Caps::default();
        for s in [
            "a12=1,a13=2,a14=1,a23=2,a24=1,a34=2",
            "a13=1,a14=1,a24=2",
            "a12=2,a34=1,a14=1",
            "a23=1,a14=2",
        ] {
            let a = mat(s, 4, &f);
            assert_eq!(
                canonical_form(&a).unwrap(),
                canonical_form_by_search(&a, &caps).unwrap(),
                "{s}"
            );
        }
    }

    #[test]
    fn superclasses_are_unions_of_conjugacy_classes() {
        let f = gf(3);
        let caps = Caps::default();
        let a = mat("a12=1,a24=2,a13=1", 4, &f);
        let orbit: HashSet<NilMatrix> = superclass_orbit(&a, &caps).unwrap().into_iter().collect();
        let g = GroupElement::new(mat("a12=2,a23=1,a34=1,a14=2", 4, &f));
        let conj = GroupElement::sandwich(&g, &a, &g.inv()).unwrap();
        assert!(orbit.contains(&conj));
    }

    #[test]
    fn cap_is_enforced() {
        let caps = Caps {
            elements: 1 << 16,
            orbit: 3,
        };
        let f = gf(2);
        assert!(superclass_orbit(&mat("a12=1,a23=1", 3, &f), &caps).is_ok());
        let a = mat("a12=1", 4, &f);
        assert!(matches!(superclass_orbit(&a, &caps), Err(Error::CapExceeded { .. })));
    }
}
