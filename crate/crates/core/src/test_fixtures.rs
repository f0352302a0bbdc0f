//! Small coalgebras and Hopf algebras shared by unit tests.

use crate::graded_core::{q, GradedMap, GradedSpace, Lin};
use crate::homotopy_structures::{FiniteFamily, Pairing, StructureKind};
use crate::hopf::HopfAlgebra;
use crate::twisting::{TargetKind, TwistingCochain};

/// Homology of a space with cohomology `ℚ[x]/x^{top+1}`, `|x| = step`.
pub fn truncated_poly(step: i64, top: usize) -> (GradedSpace, FiniteFamily, Pairing) {
    let names: Vec<(String, i64)> = (0..=top)
        .map(|j| (format!("e{}", j as i64 * step), j as i64 * step))
        .collect();
    let c = GradedSpace::from_owned("C", names).unwrap();
    let mut c2 = GradedMap::zero(c.clone(), c.clone(), 1, 2, 0);
    for j in 0..=top {
        for i in 0..=j {
            c2.add_entry(vec![j], vec![j - i, i], q(1)).unwrap();
        }
    }
    let c1 = GradedMap::zero(c.clone(), c.clone(), 1, 1, -1);
    let f = FiniteFamily::coalgebra_from_unshifted(StructureKind::CinfCoalgebra, &c, &[c1, c2])
        .unwrap();
    let entries: Vec<_> = (0..=top).map(|i| (i, top - i, q(1))).collect();
    let p = Pairing::new(c.clone(), &entries).unwrap();
    (c, f, p)
}

pub fn s2() -> (GradedSpace, FiniteFamily, Pairing) {
    truncated_poly(2, 1)
}

pub fn s3() -> (GradedSpace, FiniteFamily, Pairing) {
    truncated_poly(3, 1)
}

pub fn cp2() -> (GradedSpace, FiniteFamily, Pairing) {
    truncated_poly(2, 2)
}

pub fn tensor(gens: &[(&str, i64)]) -> HopfAlgebra {
    HopfAlgebra::tensor(GradedSpace::new("L", gens).unwrap())
}

/// `T(a, b)` with `|a| = 1`, `|b| = 3`, `∂b = aa`.
pub fn cp2_hopf() -> HopfAlgebra {
    tensor(&[("a", 1), ("b", 3)])
        .with_differential(vec![Lin::zero(), Lin::single(vec![0, 0], q(1))])
        .unwrap()
}

pub fn lambda_u() -> HopfAlgebra {
    HopfAlgebra::exterior(GradedSpace::new("Lambda", &[("u", 1)]).unwrap()).unwrap()
}

/// Sends the `j`-th positive basis element to the `j`-th generator.
pub fn inclusion(c: &GradedSpace, h: &HopfAlgebra) -> TwistingCochain {
    let mut values = vec![Lin::zero()];
    for j in 1..c.dim() {
        values.push(Lin::basis(vec![j - 1]));
    }
    TwistingCochain::new(c, h, values, TargetKind::Hopf).unwrap()
}

/// `H_*(S² × S³)`: basis e0, e2, e3, e5 with the product coproduct.
pub fn s2xs3() -> (GradedSpace, FiniteFamily, Pairing) {
    let c = GradedSpace::new("C", &[("e0", 0), ("e2", 2), ("e3", 3), ("e5", 5)]).unwrap();
    let mut c2 = GradedMap::zero(c.clone(), c.clone(), 1, 2, 0);
    for (x, l, r) in [
        (0, 0, 0),
        (1, 1, 0),
        (1, 0, 1),
        (2, 2, 0),
        (2, 0, 2),
        (3, 3, 0),
        (3, 0, 3),
        (3, 1, 2),
        (3, 2, 1),
    ] {
        c2.add_entry(vec![x], vec![l, r], q(1)).unwrap();
    }
    let c1 = GradedMap::zero(c.clone(), c.clone(), 1, 1, -1);
    let f = FiniteFamily::coalgebra_from_unshifted(StructureKind::CinfCoalgebra, &c, &[c1, c2])
        .unwrap();
    let p = Pairing::new(c.clone(), &[(0, 3, q(1)), (1, 2, q(1))]).unwrap();
    (c, f, p)
}

/// `T(a, b, c)` with degrees 1, 2, 4 and `∂c = sign·(ab − ba)`.
pub fn s2xs3_hopf(sign: i64) -> HopfAlgebra {
    let mut dc = Lin::single(vec![0, 1], q(sign));
    dc.add_term(vec![1, 0], q(-sign));
    tensor(&[("a", 1), ("b", 2), ("c", 4)])
        .with_differential(vec![Lin::zero(), Lin::zero(), dc])
        .unwrap()
}

use crate::connection_builder::CdgaModel;

fn lin(terms: &[(usize, i64)]) -> Lin<usize> {
    terms.iter().map(|&(i, c)| (i, q(c))).collect()
}

/// `ℚ[x]/x^{top+1}` with `d = 0`; representatives named `e{deg}`.
pub fn truncated_poly_model(step: i64, top: usize) -> CdgaModel {
    let names: Vec<(String, i64)> = (0..=top)
        .map(|j| (format!("x{j}"), j as i64 * step))
        .collect();
    let a = GradedSpace::from_owned("A", names).unwrap();
    let mut products = Vec::new();
    for i in 1..=top {
        for j in i..=top {
            if i + j <= top {
                products.push((i, j, lin(&[(i + j, 1)])));
            }
        }
    }
    let reps = (1..=top)
        .map(|j| (format!("e{}", j as i64 * step), lin(&[(j, 1)])))
        .collect();
    CdgaModel::new(a, 0, &products, vec![Lin::zero(); top + 1], reps).unwrap()
}

/// `H^*(S² × S³)`: basis 1, x, z, xz.
pub fn s2xs3_model() -> CdgaModel {
    let a = GradedSpace::new("A", &[("1", 0), ("x", 2), ("z", 3), ("xz", 5)]).unwrap();
    let reps = vec![
        ("e2".to_string(), lin(&[(1, 1)])),
        ("e3".to_string(), lin(&[(2, 1)])),
        ("e5".to_string(), lin(&[(3, 1)])),
    ];
    CdgaModel::new(a, 0, &[(1, 2, lin(&[(3, 1)]))], vec![Lin::zero(); 4], reps).unwrap()
}

/// A model of S² where `x² = v` is exact, `v = du`.
pub fn redundant_s2_model() -> CdgaModel {
    let a = GradedSpace::new("A", &[("1", 0), ("x", 2), ("u", 3), ("v", 4)]).unwrap();
    let d = vec![Lin::zero(), Lin::zero(), lin(&[(3, 1)]), Lin::zero()];
    CdgaModel::new(
        a,
        0,
        &[(1, 1, lin(&[(3, 1)]))],
        d,
        vec![("e2".to_string(), lin(&[(1, 1)]))],
    )
    .unwrap()
}

/// Non-formal coalgebra: e0, ea, eb (degree 2), ec (degree 5), trivial coproducts on
/// the reduced part and `d₃(ẽc) = ẽaẽaẽb − ẽbẽaẽa`, dual to `∂c = [a,[a,b]]`.
pub fn massey() -> (GradedSpace, FiniteFamily) {
    let c = GradedSpace::new("C", &[("e0", 0), ("ea", 2), ("eb", 2), ("ec", 5)]).unwrap();
    let s = c.shift(-1);
    let d1 = GradedMap::zero(s.clone(), s.clone(), 1, 1, -1);
    let mut d2 = GradedMap::zero(s.clone(), s.clone(), 1, 2, -1);
    d2.add_entry(vec![0], vec![0, 0], q(1)).unwrap();
    for x in 1..4 {
        let sign = if c.degree(x) % 2 == 0 { 1 } else { -1 };
        d2.add_entry(vec![x], vec![x, 0], q(sign)).unwrap();
        d2.add_entry(vec![x], vec![0, x], q(1)).unwrap();
    }
    let mut d3 = GradedMap::zero(s.clone(), s.clone(), 1, 3, -1);
    d3.add_entry(vec![3], vec![1, 1, 2], q(1)).unwrap();
    d3.add_entry(vec![3], vec![2, 1, 1], q(-1)).unwrap();
    let f = FiniteFamily::new(
        StructureKind::CinfCoalgebra,
        s,
        vec![d1, d2, d3],
        c.degrees().to_vec(),
    )
    .unwrap();
    (c, f)
}

pub fn massey_hopf() -> HopfAlgebra {
    let mut dc = Lin::single(vec![0, 0, 1], q(1));
    dc.add_term(vec![1, 0, 0], q(-1));
    tensor(&[("a", 1), ("b", 1), ("c", 4)])
        .with_differential(vec![Lin::zero(), Lin::zero(), dc])
        .unwrap()
}

/// e0, ea, eb (degree 2), ed (degree 6) with `d₄(ẽd)` the words of `[a,[a,[a,b]]]`.
pub fn massey4() -> (GradedSpace, FiniteFamily) {
    let c = GradedSpace::new("C", &[("e0", 0), ("ea", 2), ("eb", 2), ("ed", 6)]).unwrap();
    let s = c.shift(-1);
    let mut maps = vec![GradedMap::zero(s.clone(), s.clone(), 1, 1, -1)];
    let mut d2 = GradedMap::zero(s.clone(), s.clone(), 1, 2, -1);
    d2.add_entry(vec![0], vec![0, 0], q(1)).unwrap();
    for x in 1..4 {
        d2.add_entry(vec![x], vec![x, 0], q(1)).unwrap();
        d2.add_entry(vec![x], vec![0, x], q(1)).unwrap();
    }
    maps.push(d2);
    maps.push(GradedMap::zero(s.clone(), s.clone(), 1, 3, -1));
    let mut d4 = GradedMap::zero(s.clone(), s.clone(), 1, 4, -1);
    for (w, c4) in massey4_word().iter() {
        d4.add_entry(vec![3], w.iter().map(|l| l + 1).collect(), c4.clone())
            .unwrap();
    }
    maps.push(d4);
    let f = FiniteFamily::new(StructureKind::CinfCoalgebra, s, maps, c.degrees().to_vec()).unwrap();
    (c, f)
}

fn massey4_word() -> Lin<Vec<usize>> {
    use crate::free_objects::tensor_bracket;
    let (a, b) = (Lin::basis(vec![0]), Lin::basis(vec![1]));
    let ab = tensor_bracket(&a, 1, &b, 1);
    let aab = tensor_bracket(&a, 1, &ab, 2);
    tensor_bracket(&a, 1, &aab, 3)
}

pub fn massey4_hopf() -> HopfAlgebra {
    tensor(&[("a", 1), ("b", 1), ("d", 5)])
        .with_differential(vec![Lin::zero(), Lin::zero(), massey4_word()])
        .unwrap()
}
