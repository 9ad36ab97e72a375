#![allow(dead_code)]

use rand::Rng;
use superchar_core::exactfield::{FieldElement, FiniteField};
use superchar_core::nilalg::{dim, GroupElement, NilMatrix};

pub fn gf(q: u32) -> FiniteField {
    match q {
        4 => FiniteField::new(2, 2).unwrap(),
        8 => FiniteField::new(2, 3).unwrap(),
        9 => FiniteField::new(3, 2).unwrap(),
        p => FiniteField::new(p, 1).unwrap(),
    }
}

pub fn random_element<R: Rng>(rng: &mut R, f: &FiniteField) -> FieldElement {
    f.element(rng.gen_range(0..f.order())).unwrap()
}

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize, f: &FiniteField) -> NilMatrix {
    let entries = (0..dim(n)).map(|_| random_element(rng, f)).collect();
    NilMatrix::from_entries(n, f, entries).unwrap()
}

pub fn random_group<R: Rng>(rng: &mut R, n: usize, f: &FiniteField) -> GroupElement {
    GroupElement::new(random_matrix(rng, n, f))
}
