//! Inductive construction of a power series connection `(ω, ∂)` from a finite CDGA
//! model, and extraction of the C∞ coalgebra on homology together with the inclusion
//! twisting cochain into the free Lie algebra.
//!
//! Lie elements are stored in tensor-algebra coordinates. Elements of `A ⊗ ℒ` are
//! `Lin<(a, word)>` with `a` a basis index of the model.

use std::collections::BTreeMap;

use crate::free_objects::Word;
use crate::graded_core::{q, q_frac, GradedMap, GradedSpace, Lin, Sign, Q};
use crate::homotopy_structures::{FiniteFamily, StructureError, StructureKind};
use crate::hopf::{HopfAlgebra, HopfError};
use crate::linalg;
use crate::twisting::{TargetKind, TwistingCochain, TwistingError};

use num_traits::Zero;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ConnectionError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("cohomology in degree 1 is not supported")]
    DegreeOneCohomology,
    #[error("contraction does not produce a primitive for an exact element of degree {0}")]
    Contraction(i64),
    #[error("stage {stage}: defect coefficient of degree {degree} is not closed")]
    NotClosed { stage: usize, degree: i64 },
    #[error("stage {0}: differential does not square to zero")]
    NotSquareZero(usize),
    #[error("connection is not flat through bracket length {0}")]
    NotFlat(usize),
    #[error(transparent)]
    Graded(#[from] crate::graded_core::GradedError),
    #[error(transparent)]
    Hopf(#[from] HopfError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Twisting(#[from] TwistingError),
}

/// Finite commutative differential graded algebra with chosen cohomology representatives.
#[derive(Clone, Debug, PartialEq)]
pub struct CdgaModel {
    pub space: GradedSpace,
    pub unit: usize,
    product: BTreeMap<(usize, usize), Lin<usize>>,
    differential: Vec<Lin<usize>>,
    /// Homology basis names and closed representatives of the dual cohomology basis,
    /// positive degrees only.
    pub representatives: Vec<(String, Lin<usize>)>,
    /// Exact elements with chosen primitives; a default is computed when absent.
    contraction: Option<Vec<(Lin<usize>, Lin<usize>)>>,
}

impl CdgaModel {
    /// `products` lists `e_i · e_j` for `i <= j`; the rest follows from graded
    /// commutativity and the unit. Unlisted products vanish.
    pub fn new(
        space: GradedSpace,
        unit: usize,
        products: &[(usize, usize, Lin<usize>)],
        differential: Vec<Lin<usize>>,
        representatives: Vec<(String, Lin<usize>)>,
    ) -> Result<Self, ConnectionError> {
        let bad = |m: String| Err(ConnectionError::InvalidModel(m));
        let n = space.dim();
        if unit >= n || space.degree(unit) != 0 {
            return bad("unit must be a degree 0 basis element".into());
        }
        if differential.len() != n {
            return bad(format!(
                "differential has {} entries, expected {n}",
                differential.len()
            ));
        }
        let mut product = BTreeMap::new();
        for i in 0..n {
            product.insert((unit, i), Lin::basis(i));
            product.insert((i, unit), Lin::basis(i));
        }
        for (i, j, v) in products {
            if *i >= n || *j >= n {
                return bad(format!("product index out of range: ({i}, {j})"));
            }
            if *i == unit || *j == unit {
                if product[&(*i, *j)] != *v {
                    return bad("products with the unit are fixed".into());
                }
                continue;
            }
            let deg = space.degree(*i) + space.degree(*j);
            if v.keys().any(|&k| space.degree(k) != deg) {
                return bad(format!(
                    "product {}·{} has the wrong degree",
                    space.element_name(*i),
                    space.element_name(*j)
                ));
            }
            let s = Sign::koszul(space.degree(*i), space.degree(*j));
            product.insert((*i, *j), v.clone());
            product.insert((*j, *i), v.scaled(&s.to_q()));
        }
        for (i, v) in differential.iter().enumerate() {
            if v.keys().any(|&k| space.degree(k) != space.degree(i) + 1) {
                return bad(format!("d{} has the wrong degree", space.element_name(i)));
            }
        }
        let model = CdgaModel {
            space,
            unit,
            product,
            differential,
            representatives,
            contraction: None,
        };
        model.validate()?;
        Ok(model)
    }

    /// Supplies primitives `h(y)` with `d h(y) = y` for a spanning set of exact elements.
    pub fn with_contraction(
        mut self,
        pairs: Vec<(Lin<usize>, Lin<usize>)>,
    ) -> Result<Self, ConnectionError> {
        for (y, hy) in &pairs {
            if self.d(hy) != *y {
                let deg = y.keys().next().map(|&k| self.space.degree(k)).unwrap_or(0);
                return Err(ConnectionError::Contraction(deg));
            }
        }
        self.contraction = Some(pairs);
        Ok(self)
    }

    fn validate(&self) -> Result<(), ConnectionError> {
        let bad = |m: String| Err(ConnectionError::InvalidModel(m));
        let n = self.space.dim();
        let name = |i: usize| self.space.element_name(i).to_string();
        for i in 0..n {
            if !self.d(&self.d(&Lin::basis(i))).is_zero() {
                return bad(format!("d² ≠ 0 on {}", name(i)));
            }
            for j in 0..n {
                let (ei, ej) = (Lin::basis(i), Lin::basis(j));
                let lhs = self.d(&self.mul(&ei, &ej));
                let mut rhs = self.mul(&self.d(&ei), &ej);
                let s = Sign::from_parity(self.space.degree(i)).to_q();
                rhs.add_scaled(&self.mul(&ei, &self.d(&ej)), &s);
                if lhs != rhs {
                    return bad(format!("d is not a derivation on {}·{}", name(i), name(j)));
                }
                for k in 0..n {
                    let ek = Lin::basis(k);
                    let l = self.mul(&self.mul(&ei, &ej), &ek);
                    let r = self.mul(&ei, &self.mul(&ej, &ek));
                    if l != r {
                        return bad(format!(
                            "product not associative on {}, {}, {}",
                            name(i),
                            name(j),
                            name(k)
                        ));
                    }
                }
            }
        }
        for (x, w) in &self.representatives {
            if w.is_zero() || !self.d(w).is_zero() {
                return bad(format!("representative for {x} must be nonzero and closed"));
            }
            let degs: Vec<i64> = w.keys().map(|&k| self.space.degree(k)).collect();
            if degs.iter().any(|&d| d != degs[0]) || degs[0] <= 0 {
                return bad(format!(
                    "representative for {x} must be homogeneous of positive degree"
                ));
            }
        }
        let top = (0..n).map(|i| self.space.degree(i)).max().unwrap_or(0);
        for deg in 1..=top {
            let reps: Vec<&Lin<usize>> = self
                .representatives
                .iter()
                .map(|(_, w)| w)
                .filter(|w| self.degree_of(w) == deg)
                .collect();
            let closed = self.cocycles(deg).len();
            let exact = self.coboundaries(deg);
            let mut cols = exact.clone();
            cols.extend(reps.iter().map(|w| self.coords(w)));
            let rank_exact = linalg::rank(&linalg::from_columns(&exact, n), exact.len());
            let rank_all = linalg::rank(&linalg::from_columns(&cols, n), cols.len());
            if rank_all - rank_exact != reps.len() || reps.len() != closed - rank_exact {
                return bad(format!(
                    "representatives do not form a cohomology basis in degree {deg}"
                ));
            }
        }
        Ok(())
    }

    /// Products `e_i · e_j` with `i <= j`, neither the unit, that are nonzero.
    pub fn product_table(&self) -> Vec<(usize, usize, Lin<usize>)> {
        self.product
            .iter()
            .filter(|((i, j), v)| i <= j && *i != self.unit && *j != self.unit && !v.is_zero())
            .map(|((i, j), v)| (*i, *j, v.clone()))
            .collect()
    }

    pub fn differential(&self) -> &[Lin<usize>] {
        &self.differential
    }

    pub fn contraction(&self) -> Option<&[(Lin<usize>, Lin<usize>)]> {
        self.contraction.as_deref()
    }

    pub fn d(&self, x: &Lin<usize>) -> Lin<usize> {
        x.apply(|&i| self.differential[i].clone())
    }

    pub fn mul(&self, x: &Lin<usize>, y: &Lin<usize>) -> Lin<usize> {
        crate::graded_core::bilinear(x, y, |&i, &j| {
            self.product.get(&(i, j)).cloned().unwrap_or_default()
        })
    }

    /// Coordinates of the class of a closed element in the representative basis.
    pub fn cohomology_coordinates(&self, f: &Lin<usize>) -> Result<Vec<Q>, ConnectionError> {
        if !self.d(f).is_zero() {
            return Err(ConnectionError::NotClosed {
                stage: 0,
                degree: self.degree_of(f),
            });
        }
        Ok(self.split(f)?.0)
    }

    fn degree_of(&self, x: &Lin<usize>) -> i64 {
        x.keys().next().map(|&k| self.space.degree(k)).unwrap_or(0)
    }

    fn coords(&self, x: &Lin<usize>) -> Vec<Q> {
        (0..self.space.dim()).map(|i| x.coeff(&i)).collect()
    }

    fn basis_of_degree(&self, deg: i64) -> Vec<usize> {
        (0..self.space.dim())
            .filter(|&i| self.space.degree(i) == deg)
            .collect()
    }

    fn cocycles(&self, deg: i64) -> Vec<Vec<Q>> {
        let idx = self.basis_of_degree(deg);
        let cols: Vec<Vec<Q>> = idx
            .iter()
            .map(|&i| self.coords(&self.differential[i]))
            .collect();
        let m = linalg::from_columns(&cols, self.space.dim());
        linalg::nullspace(&m, idx.len())
    }

    fn coboundaries(&self, deg: i64) -> Vec<Vec<Q>> {
        self.basis_of_degree(deg - 1)
            .iter()
            .map(|&i| self.coords(&self.differential[i]))
            .collect()
    }

    /// Writes a closed element `f` as `Σ a_i W_i + d g`; returns the coefficients `a_i`
    /// and the primitive `g`.
    fn split(&self, f: &Lin<usize>) -> Result<(Vec<Q>, Lin<usize>), ConnectionError> {
        let n = self.space.dim();
        let deg = self.degree_of(f);
        let reps: Vec<usize> = (0..self.representatives.len())
            .filter(|&i| self.degree_of(&self.representatives[i].1) == deg)
            .collect();
        let mut cols: Vec<Vec<Q>> = reps
            .iter()
            .map(|&i| self.coords(&self.representatives[i].1))
            .collect();
        let (exact_cols, preimages): (Vec<Vec<Q>>, Vec<Lin<usize>>) = match &self.contraction {
            Some(pairs) => pairs
                .iter()
                .filter(|(y, _)| !y.is_zero() && self.degree_of(y) == deg)
                .map(|(y, hy)| (self.coords(y), hy.clone()))
                .unzip(),
            None => self
                .basis_of_degree(deg - 1)
                .into_iter()
                .map(|i| (self.coords(&self.differential[i]), Lin::basis(i)))
                .unzip(),
        };
        cols.extend(exact_cols);
        let m = linalg::from_columns(&cols, n);
        let sol = linalg::solve(&m, cols.len(), &self.coords(f))
            .ok_or(ConnectionError::Contraction(deg))?;
        let mut a = vec![Q::zero(); self.representatives.len()];
        for (k, &i) in reps.iter().enumerate() {
            a[i] = sol[k].clone();
        }
        let mut g = Lin::zero();
        for (k, pre) in preimages.iter().enumerate() {
            g.add_scaled(pre, &sol[reps.len() + k]);
        }
        Ok((a, g))
    }
}

pub type FormWord = (usize, Word);

/// `(ω, ∂)` truncated to bracket length `max_length`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeriesConnection {
    /// Generators of the free Lie algebra, `X_i` in degree `|W_i| − 1`.
    pub generators: GradedSpace,
    pub omega: Lin<FormWord>,
    pub differential: Vec<Lin<Word>>,
    pub max_length: usize,
}

/// `J(w) = (−1)^{|w|} w`.
pub fn j_sign(degree: i64) -> Sign {
    Sign::from_parity(degree)
}

impl PowerSeriesConnection {
    fn word_degree(&self, w: &[usize]) -> i64 {
        crate::free_objects::word_degree(w, self.generators.degrees())
    }

    /// `∂` extended to words as a derivation, truncated to length `max_len`.
    pub fn diff_word(&self, w: &[usize], max_len: usize) -> Lin<Word> {
        let mut out = Lin::zero();
        let mut passed = 0i64;
        for (i, &l) in w.iter().enumerate() {
            for (v, c) in self.differential[l].iter() {
                if w.len() - 1 + v.len() > max_len {
                    continue;
                }
                let mut nw = w[..i].to_vec();
                nw.extend_from_slice(v);
                nw.extend_from_slice(&w[i + 1..]);
                out.add_signed(nw, c, Sign::from_parity(passed));
            }
            passed += self.generators.degree(l);
        }
        out
    }

    /// `∂ω + dω − ½[Jω, ω]` on `A ⊗ ℒ`, truncated to bracket length `max_len`, with the
    /// bracket `[w⊗L, w'⊗L'] = (−1)^{|w||w'|} ww'⊗[L, L']` and `∂` acting on the Lie leg.
    pub fn defect(&self, model: &CdgaModel, max_len: usize) -> Lin<FormWord> {
        let mut out = Lin::zero();
        for ((a, w), c) in self.omega.iter() {
            for (v, e) in self.diff_word(w, max_len).iter() {
                out.add_term((*a, v.clone()), c * e);
            }
            for (b, e) in model.differential[*a].iter() {
                out.add_term((*b, w.clone()), c * e);
            }
        }
        let half = q_frac(-1, 2);
        for ((a1, w1), c1) in self.omega.iter() {
            let d1 = model.space.degree(*a1);
            for ((a2, w2), c2) in self.omega.iter() {
                if w1.len() + w2.len() > max_len {
                    continue;
                }
                let d2 = model.space.degree(*a2);
                let prod = model.mul(&Lin::basis(*a1), &Lin::basis(*a2));
                if prod.is_zero() {
                    continue;
                }
                let s = j_sign(d1) * Sign::koszul(d1, d2);
                let br = crate::free_objects::tensor_bracket(
                    &Lin::basis(w1.clone()),
                    self.word_degree(w1),
                    &Lin::basis(w2.clone()),
                    self.word_degree(w2),
                );
                let coeff = c1 * c2 * &half * s.to_q();
                for (b, pc) in prod.iter() {
                    for (v, bc) in br.iter() {
                        out.add_term((*b, v.clone()), &coeff * pc * bc);
                    }
                }
            }
        }
        out
    }

    /// `∂²` on each generator, truncated to length `max_len`.
    pub fn square_defect(&self, max_len: usize) -> Vec<Lin<Word>> {
        self.differential
            .iter()
            .map(|v| {
                let mut out = Lin::zero();
                for (w, c) in v.iter() {
                    out.add_scaled(&self.diff_word(w, max_len), c);
                }
                out
            })
            .collect()
    }
}

/// The flatness defect reduced modulo bracket length `stage + 1`.
pub fn flatness_defect(
    psc: &PowerSeriesConnection,
    model: &CdgaModel,
    stage: usize,
) -> Lin<FormWord> {
    psc.defect(model, stage)
}

fn initial_connection(
    model: &CdgaModel,
    max_length: usize,
) -> Result<PowerSeriesConnection, ConnectionError> {
    let mut gens = Vec::new();
    let mut omega = Lin::zero();
    for (i, (name, w)) in model.representatives.iter().enumerate() {
        let deg = model.degree_of(w);
        if deg == 1 {
            return Err(ConnectionError::DegreeOneCohomology);
        }
        gens.push((name.clone(), deg - 1));
        for (a, c) in w.iter() {
            omega.add_term((*a, vec![i]), c.clone());
        }
    }
    Ok(PowerSeriesConnection {
        generators: GradedSpace::from_owned("L", gens)?,
        omega,
        differential: vec![Lin::zero(); model.representatives.len()],
        max_length,
    })
}

/// Runs one induction stage: the length-`stage` part of the defect is split into
/// cohomology coefficients (absorbed into `∂`) and an exact part (absorbed into `ω`).
pub fn advance_stage(
    psc: &mut PowerSeriesConnection,
    model: &CdgaModel,
    stage: usize,
) -> Result<(), ConnectionError> {
    let defect = psc.defect(model, stage);
    let mut by_word: BTreeMap<Word, Lin<usize>> = BTreeMap::new();
    for ((a, w), c) in defect.iter() {
        if w.len() < stage {
            return Err(ConnectionError::NotFlat(stage - 1));
        }
        by_word
            .entry(w.clone())
            .or_default()
            .add_term(*a, c.clone());
    }
    for (w, f) in by_word {
        if !model.d(&f).is_zero() {
            return Err(ConnectionError::NotClosed {
                stage,
                degree: model.degree_of(&f),
            });
        }
        let (coeffs, g) = model.split(&f)?;
        for (i, a) in coeffs.iter().enumerate() {
            if !a.is_zero() {
                psc.differential[i].add_term(w.clone(), -a.clone());
            }
        }
        for (b, c) in g.iter() {
            psc.omega.add_term((*b, w.clone()), -c.clone());
        }
    }
    if !psc.defect(model, stage).is_zero() {
        return Err(ConnectionError::NotFlat(stage));
    }
    if psc.square_defect(stage + 1).iter().any(|v| !v.is_zero()) {
        return Err(ConnectionError::NotSquareZero(stage));
    }
    Ok(())
}

/// Builds `(ω, ∂)` through bracket length `max_length`, checking flatness and `∂² ≡ 0`
/// after every stage.
pub fn build_power_series_connection(
    model: &CdgaModel,
    max_length: usize,
) -> Result<PowerSeriesConnection, ConnectionError> {
    let mut psc = initial_connection(model, max_length)?;
    if !psc.defect(model, 1).is_zero() {
        return Err(ConnectionError::NotFlat(1));
    }
    for stage in 2..=max_length {
        advance_stage(&mut psc, model, stage)?;
    }
    Ok(psc)
}

/// Output of [`extract_structures`].
#[derive(Clone, Debug)]
pub struct ExtractedStructures {
    /// Homology with basis `e0` followed by the `X_i`.
    pub homology: GradedSpace,
    pub coalgebra: FiniteFamily,
    pub lie_model: HopfAlgebra,
    pub tau: TwistingCochain,
}

/// Dualizes the length-`n` part of `∂` into the reduced `c_n` on homology (desuspended),
/// adds the counit terms, and returns the inclusion twisting cochain.
pub fn extract_structures(
    psc: &PowerSeriesConnection,
    model: &CdgaModel,
) -> Result<ExtractedStructures, ConnectionError> {
    if !psc.defect(model, psc.max_length).is_zero() {
        return Err(ConnectionError::NotFlat(psc.max_length));
    }
    let lie_model =
        HopfAlgebra::tensor(psc.generators.clone()).with_differential(psc.differential.clone())?;
    let mut names = vec![("e0".to_string(), 0)];
    for i in 0..psc.generators.dim() {
        names.push((
            psc.generators.element_name(i).to_string(),
            psc.generators.degree(i) + 1,
        ));
    }
    let homology = GradedSpace::from_owned("H", names)?;
    let shifted = homology.shift(-1);
    let top = psc
        .differential
        .iter()
        .flat_map(|v| v.keys().map(|w| w.len()))
        .max()
        .unwrap_or(2)
        .max(2);
    let mut maps = Vec::new();
    for n in 1..=top {
        let mut m = GradedMap::zero(shifted.clone(), shifted.clone(), 1, n, -1);
        if n == 2 {
            m.add_entry(vec![0], vec![0, 0], q(1))?;
            for x in 1..homology.dim() {
                let s = Sign::from_parity(homology.degree(x)).to_q();
                m.add_entry(vec![x], vec![x, 0], s)?;
                m.add_entry(vec![x], vec![0, x], q(1))?;
            }
        }
        for (i, v) in psc.differential.iter().enumerate() {
            for (w, c) in v.iter() {
                if w.len() == n {
                    let out: Vec<usize> = w.iter().map(|&l| l + 1).collect();
                    m.add_entry(vec![i + 1], out, c.clone())?;
                }
            }
        }
        maps.push(m);
    }
    let coalgebra = FiniteFamily::new(
        StructureKind::CinfCoalgebra,
        shifted,
        maps,
        homology.degrees().to_vec(),
    )?;
    let mut values = vec![Lin::zero()];
    values.extend((0..psc.generators.dim()).map(|i| Lin::basis(vec![i])));
    let tau = TwistingCochain::new(&homology, &lie_model, values, TargetKind::Lie)?;
    Ok(ExtractedStructures {
        homology,
        coalgebra,
        lie_model,
        tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_objects::TruncationPolicy;
    use crate::homotopy_structures::{check_ainf, check_cinfty, StructureFamily};
    use crate::test_fixtures::*;
    use crate::twisting::check_maurer_cartan;

    fn same_maps(a: &FiniteFamily, b: &FiniteFamily) -> bool {
        a.maps().len() == b.maps().len()
            && a.maps()
                .iter()
                .zip(b.maps())
                .all(|(x, y)| x.entries().collect::<Vec<_>>() == y.entries().collect::<Vec<_>>())
    }

    #[test]
    fn s2_has_no_corrections() {
        let m = truncated_poly_model(2, 1);
        let psc = build_power_series_connection(&m, 4).unwrap();
        assert_eq!(psc.omega, Lin::single((1, vec![0]), q(1)));
        assert!(psc.differential.iter().all(|v| v.is_zero()));
        for s in 1..=4 {
            assert!(flatness_defect(&psc, &m, s).is_zero());
        }
    }

    #[test]
    fn cp2_differential_is_half_bracket() {
        let m = truncated_poly_model(2, 2);
        let psc = build_power_series_connection(&m, 4).unwrap();
        // oracle: −½[Jω, ω] at length two is −½·x²⊗[a,a] = −y⊗aa, cancelled by y⊗∂b
        assert_eq!(psc.differential[1], Lin::single(vec![0, 0], q(1)));
        assert!(psc.differential[0].is_zero());
        let mut zeroed = psc.clone();
        zeroed.differential = vec![Lin::zero(); 2];
        let half_bracket: Lin<FormWord> = Lin::single((2, vec![0, 0]), q(-1));
        assert_eq!(flatness_defect(&zeroed, &m, 2), half_bracket);
    }

    #[test]
    fn j_sign_parity() {
        assert_eq!(j_sign(4), Sign::Plus);
        assert_eq!(j_sign(3), Sign::Minus);
    }

    #[test]
    fn extraction_recovers_cup_coproducts() {
        let pol = TruncationPolicy::new(8, 4).unwrap();
        for (m, (_, fixture, _)) in [
            (truncated_poly_model(2, 1), s2()),
            (truncated_poly_model(3, 1), s3()),
            (truncated_poly_model(2, 2), cp2()),
            (s2xs3_model(), s2xs3()),
        ] {
            let psc = build_power_series_connection(&m, 4).unwrap();
            let ex = extract_structures(&psc, &m).unwrap();
            assert!(same_maps(&ex.coalgebra, &fixture), "{:?}", ex.homology);
            assert!(check_ainf(&ex.coalgebra, &pol).unwrap().passes());
            assert!(check_cinfty(&ex.coalgebra, &pol).passes());
            assert!(ex.tau.primitive_image);
            let mc = check_maurer_cartan(&ex.tau, &ex.coalgebra, &ex.lie_model, &pol).unwrap();
            assert!(mc.passes());
            assert!(ex.coalgebra.basis(&pol).len() == ex.homology.dim());
        }
    }

    #[test]
    fn exact_square_absorbed_into_omega() {
        let m = redundant_s2_model();
        let psc = build_power_series_connection(&m, 4).unwrap();
        assert!(psc.differential.iter().all(|v| v.is_zero()));
        // −½·v·[a,a] = −v⊗aa = d(−u)⊗aa, so ω gains u⊗aa
        let mut want = Lin::single((1, vec![0]), q(1));
        want.add_term((2, vec![0, 0]), q(1));
        assert_eq!(psc.omega, want);
        let explicit = m
            .clone()
            .with_contraction(vec![(Lin::basis(3), Lin::basis(2))])
            .unwrap();
        assert_eq!(build_power_series_connection(&explicit, 4).unwrap(), psc);
        assert_eq!(
            m.with_contraction(vec![(Lin::basis(3), Lin::basis(1))])
                .unwrap_err(),
            ConnectionError::Contraction(4)
        );
    }

    #[test]
    fn rerunning_stages_is_idempotent() {
        for m in [
            truncated_poly_model(2, 2),
            s2xs3_model(),
            redundant_s2_model(),
        ] {
            let psc = build_power_series_connection(&m, 5).unwrap();
            let mut again = psc.clone();
            for s in 2..=5 {
                advance_stage(&mut again, &m, s).unwrap();
            }
            assert_eq!(again, psc);
        }
    }

    #[test]
    fn formal_models_keep_initial_omega() {
        for m in [truncated_poly_model(2, 3), s2xs3_model()] {
            let psc = build_power_series_connection(&m, 5).unwrap();
            let init = initial_connection(&m, 5).unwrap();
            assert_eq!(psc.omega, init.omega);
        }
    }

    #[test]
    fn invalid_models_rejected() {
        let a = GradedSpace::new("A", &[("1", 0), ("t", 1)]).unwrap();
        let m = CdgaModel::new(
            a,
            0,
            &[],
            vec![Lin::zero(); 2],
            vec![("e1".into(), Lin::basis(1))],
        )
        .unwrap();
        assert_eq!(
            build_power_series_connection(&m, 3).unwrap_err(),
            ConnectionError::DegreeOneCohomology
        );
        let a = GradedSpace::new("A", &[("1", 0), ("x", 2)]).unwrap();
        let err = CdgaModel::new(a.clone(), 0, &[], vec![Lin::zero(); 2], vec![]).unwrap_err();
        assert!(matches!(err, ConnectionError::InvalidModel(_)));
        let bad_d = vec![Lin::basis(1), Lin::zero()];
        assert!(CdgaModel::new(a, 0, &[], bad_d, vec![]).is_err());
    }
}
