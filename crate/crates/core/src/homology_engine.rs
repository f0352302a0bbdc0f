//! Finite chain complexes cut out of twisted families, their rational homology, and the
//! product induced on homology by `m_2`.
//!
//! A complex with window `D` stores chain groups in degrees `0..=D+1`, so that the
//! homology in degree `D` sees every boundary coming from above.

use std::collections::BTreeMap;
use std::fmt::Debug;

use crate::free_objects::TruncationPolicy;
use crate::graded_core::{Lin, Sign, Q};
use crate::homotopy_structures::StructureFamily;
use crate::linalg::{self, Matrix};
use crate::twisted_builders::{derivation_defects, TensorKey, TwistedAlgebra, TwistedCoalgebra};
use num_traits::Zero;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum HomologyError {
    #[error("generator `{0}` of the Hopf algebra has degree {1}; the degree window is only exact for degrees >= 1")]
    InexactTruncation(String, i64),
    #[error("differential of `{key}` leaves the degree window or lowers degree by other than one")]
    Inconsistent { key: String },
    #[error("boundary does not square to zero in degree {0}")]
    NotSquareZero(usize),
    #[error("element of degree {0} is not a cycle")]
    NotACycle(usize),
    #[error("the differential is not a derivation of m_2 on `{0}`")]
    NotDerivation(String),
    #[error("the two families have different bases")]
    MismatchedBases,
}

/// Chain groups with ordered bases in degrees `0..=window+1` and boundary matrices
/// `boundaries[k]: C_k → C_{k−1}`.
#[derive(Clone, Debug)]
pub struct ChainComplex<K: Ord> {
    pub window: usize,
    pub basis: Vec<Vec<K>>,
    pub names: Vec<Vec<String>>,
    pub boundaries: Vec<Matrix>,
    index: Vec<BTreeMap<K, usize>>,
}

impl<K: Ord + Clone + Debug> ChainComplex<K> {
    /// Builds the complex from per-degree bases and a differential on basis elements.
    pub fn from_differential(
        window: usize,
        basis: Vec<Vec<K>>,
        names: Vec<Vec<String>>,
        d: impl Fn(&K) -> Lin<K>,
    ) -> Result<Self, HomologyError> {
        let index: Vec<BTreeMap<K, usize>> = basis
            .iter()
            .map(|b| b.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect())
            .collect();
        let mut boundaries = vec![linalg::zeros(0, basis[0].len())];
        for k in 1..basis.len() {
            let mut m = linalg::zeros(basis[k - 1].len(), basis[k].len());
            for (j, key) in basis[k].iter().enumerate() {
                for (t, c) in d(key).iter() {
                    let Some(&i) = index[k - 1].get(t) else {
                        return Err(HomologyError::Inconsistent {
                            key: names[k][j].clone(),
                        });
                    };
                    m[i][j] = c.clone();
                }
            }
            boundaries.push(m);
        }
        if basis[0].iter().any(|key| !d(key).is_zero()) {
            return Err(HomologyError::Inconsistent {
                key: names[0][0].clone(),
            });
        }
        let cx = ChainComplex {
            window,
            basis,
            names,
            boundaries,
            index,
        };
        for k in 2..cx.basis.len() {
            let sq = linalg::mat_mul(
                &cx.boundaries[k - 1],
                &cx.boundaries[k],
                cx.basis[k - 1].len(),
                cx.basis[k].len(),
            );
            if sq.iter().flatten().any(|x| !x.is_zero()) {
                return Err(HomologyError::NotSquareZero(k));
            }
        }
        Ok(cx)
    }

    /// Collects the basis of a family by weight and uses its arity-one map as boundary.
    pub fn from_family<S>(family: &S, window: usize) -> Result<Self, HomologyError>
    where
        S: StructureFamily<Key = K>,
    {
        let top = window as i64 + 1;
        let policy = TruncationPolicy::new(top, (top as usize).max(1)).expect("valid policy");
        let mut basis = vec![Vec::new(); window + 2];
        let mut names = vec![Vec::new(); window + 2];
        for key in family.basis(&policy) {
            let w = family.weight(&key);
            if (0..=top).contains(&w) {
                names[w as usize].push(family.key_name(&key));
                basis[w as usize].push(key);
            }
        }
        Self::from_differential(window, basis, names, |key| {
            family
                .op(1, std::slice::from_ref(key))
                .map_keys(|v| v[0].clone())
        })
    }

    /// Chain group dimensions in degrees `0..=window`.
    pub fn dimensions(&self) -> Vec<usize> {
        self.basis[..=self.window].iter().map(Vec::len).collect()
    }

    pub fn to_vector(&self, degree: usize, x: &Lin<K>) -> Option<Vec<Q>> {
        let mut v = vec![Q::zero(); self.basis[degree].len()];
        for (k, c) in x.iter() {
            v[*self.index[degree].get(k)?] = c.clone();
        }
        Some(v)
    }

    pub fn from_vector(&self, degree: usize, v: &[Q]) -> Lin<K> {
        v.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.basis[degree][i].clone(), c.clone()))
            .collect()
    }

    pub fn boundary(&self, degree: usize, x: &Lin<K>) -> Option<Lin<K>> {
        if degree == 0 {
            return Some(Lin::zero());
        }
        let v = self.to_vector(degree, x)?;
        Some(self.from_vector(degree - 1, &linalg::mat_vec(&self.boundaries[degree], &v)))
    }

    /// Alternating sum of all stored chain group dimensions, including degree `window+1`.
    pub fn euler_characteristic(&self) -> i64 {
        self.basis
            .iter()
            .enumerate()
            .map(|(k, b)| Sign::from_parity(k as i64).value() * b.len() as i64)
            .sum()
    }
}

/// Betti numbers in degrees `0..=window`, cycle representatives of a homology basis, and
/// the data needed to project cycles onto it.
#[derive(Clone, Debug)]
pub struct HomologyResult<K: Ord> {
    pub betti: Vec<usize>,
    pub representatives: Vec<Vec<Lin<K>>>,
    /// Basis of the boundaries in each degree, as chains.
    pub boundary_basis: Vec<Vec<Lin<K>>>,
    /// Dimension of the cycles in degree `window+1`.
    pub top_cycles: usize,
    frames: Vec<(Matrix, usize)>,
}

impl<K: Ord + Clone + Debug> HomologyResult<K> {
    /// Coordinates of the class of a cycle in the homology basis of its degree.
    pub fn project(
        &self,
        cx: &ChainComplex<K>,
        degree: usize,
        z: &Lin<K>,
    ) -> Result<Vec<Q>, HomologyError> {
        let v = cx
            .to_vector(degree, z)
            .ok_or(HomologyError::NotACycle(degree))?;
        let (frame, nb) = &self.frames[degree];
        let sol = linalg::solve(frame, nb + self.betti[degree], &v)
            .ok_or(HomologyError::NotACycle(degree))?;
        Ok(sol[*nb..].to_vec())
    }

    /// `Σ_{k ≤ window} (−1)^k b_k + (−1)^{window+1}·dim Z_{window+1}`.
    pub fn truncated_euler(&self) -> i64 {
        let mut e: i64 = self
            .betti
            .iter()
            .enumerate()
            .map(|(k, b)| Sign::from_parity(k as i64).value() * *b as i64)
            .sum();
        e += Sign::from_parity(self.betti.len() as i64).value() * self.top_cycles as i64;
        e
    }
}

/// Exact homology by leftmost-pivot elimination.
pub fn homology<K: Ord + Clone + Debug>(cx: &ChainComplex<K>) -> HomologyResult<K> {
    let mut out = HomologyResult {
        betti: Vec::new(),
        representatives: Vec::new(),
        boundary_basis: Vec::new(),
        top_cycles: 0,
        frames: Vec::new(),
    };
    for k in 0..=cx.window {
        let n = cx.basis[k].len();
        let cycles = linalg::nullspace(&cx.boundaries[k], n);
        let next = &cx.boundaries[k + 1];
        let (_, image_cols) = linalg::rref(next, cx.basis[k + 1].len());
        let image: Vec<Vec<Q>> = image_cols
            .iter()
            .map(|&c| next.iter().map(|row| row[c].clone()).collect())
            .collect();
        let mut columns = image.clone();
        columns.extend(cycles.iter().cloned());
        let (_, pivots) = linalg::rref(&linalg::from_columns(&columns, n), columns.len());
        let reps: Vec<Vec<Q>> = pivots
            .iter()
            .filter(|&&c| c >= image.len())
            .map(|&c| columns[c].clone())
            .collect();
        let mut frame_cols = image.clone();
        frame_cols.extend(reps.iter().cloned());
        out.betti.push(reps.len());
        out.representatives
            .push(reps.iter().map(|v| cx.from_vector(k, v)).collect());
        out.boundary_basis
            .push(image.iter().map(|v| cx.from_vector(k, v)).collect());
        out.frames
            .push((linalg::from_columns(&frame_cols, n), image.len()));
    }
    let top = cx.window + 1;
    out.top_cycles = linalg::nullspace(&cx.boundaries[top], cx.basis[top].len()).len();
    out
}

/// Materializes `(C ⊗ H, ∂_τ)` in degrees `0..=max_degree+1`.
pub fn assemble_complex(
    tc: &TwistedCoalgebra,
    max_degree: usize,
) -> Result<ChainComplex<TensorKey>, HomologyError> {
    let gens = tc.hopf.degrees();
    if let Some(i) = gens.iter().position(|&d| d < 1) {
        return Err(HomologyError::InexactTruncation(
            tc.hopf.word_name(&[i]),
            gens[i],
        ));
    }
    ChainComplex::from_family(tc, max_degree)
}

/// Products of homology classes: `table[(p, i, q, j)]` is the class of `x_i · y_j` in
/// degree `p + q − dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductTable {
    pub dimension: i64,
    pub entries: BTreeMap<(usize, usize, usize, usize), Vec<Q>>,
}

impl ProductTable {
    pub fn product(&self, p: usize, i: usize, q: usize, j: usize) -> Option<&Vec<Q>> {
        self.entries.get(&(p, i, q, j))
    }
}

/// Unshifted product `(−1)^{dim+1}·(−1)^{(|x̃|+1)|ỹ|} m̃_2(x̃, ỹ)`; the global sign makes
/// the fundamental class a two-sided unit.
pub fn unshifted_product(
    alg: &TwistedAlgebra,
    x: &Lin<TensorKey>,
    y: &Lin<TensorKey>,
) -> Lin<TensorKey> {
    let global = Sign::from_parity(alg.pairing.dimension() + 1);
    crate::graded_core::bilinear(x, y, |a, b| {
        let s = global * Sign::from_parity((alg.degree(a) + 1) * alg.degree(b));
        alg.op(2, &[a.clone(), b.clone()])
            .map_keys(|v| v[0].clone())
            .scaled(&s.to_q())
    })
}

/// Transports `m_2` to homology through the representatives of `hr`.
pub fn induced_product(
    cx: &ChainComplex<TensorKey>,
    hr: &HomologyResult<TensorKey>,
    alg: &TwistedAlgebra,
) -> Result<ProductTable, HomologyError> {
    let window = cx.window as i64;
    let policy = TruncationPolicy::new(window, (window as usize).max(1)).expect("valid policy");
    if let Some(d) = derivation_defects(alg, &policy).defects.first() {
        return Err(HomologyError::NotDerivation(alg.word_name(&d.input)));
    }
    let dim = alg.pairing.dimension();
    let mut entries = BTreeMap::new();
    for (p, xs) in hr.representatives.iter().enumerate() {
        for (q, ys) in hr.representatives.iter().enumerate() {
            let r = p as i64 + q as i64 - dim;
            if r < 0 || r > window {
                continue;
            }
            for (i, x) in xs.iter().enumerate() {
                for (j, y) in ys.iter().enumerate() {
                    let z = unshifted_product(alg, x, y);
                    let coords = hr.project(cx, r as usize, &z)?;
                    entries.insert((p, i, q, j), coords);
                }
            }
        }
    }
    Ok(ProductTable {
        dimension: dim,
        entries,
    })
}

/// True iff the arity-one maps agree entrywise on every key of weight at most `max_degree`.
pub fn verify_shared_differential<A, B>(
    a: &A,
    b: &B,
    max_degree: usize,
) -> Result<bool, HomologyError>
where
    A: StructureFamily<Key = TensorKey>,
    B: StructureFamily<Key = TensorKey>,
{
    let d = max_degree as i64;
    let policy = TruncationPolicy::new(d, max_degree.max(1)).expect("valid policy");
    let keys = a.basis(&policy);
    if keys != b.basis(&policy) {
        return Err(HomologyError::MismatchedBases);
    }
    Ok(keys
        .iter()
        .all(|k| a.op(1, std::slice::from_ref(k)) == b.op(1, std::slice::from_ref(k))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_core::{q, GradedMap};
    use crate::test_fixtures::*;
    use crate::twisted_builders::{
        build_twisted_algebra, build_twisted_coalgebra, classical_twisted_differential,
        untwisted_tensor_coalgebra, ActionKind,
    };
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn pol(d: i64) -> TruncationPolicy {
        TruncationPolicy::new(d, 10).unwrap()
    }

    fn s2_family(action: ActionKind, d: i64) -> TwistedCoalgebra {
        let (c, f, _) = s2();
        let h = tensor(&[("a", 1)]);
        build_twisted_coalgebra(&f, &h, &inclusion(&c, &h), action, &pol(d)).unwrap()
    }

    fn hopf_family() -> TwistedCoalgebra {
        let (c, f, _) = s2();
        let h = lambda_u();
        build_twisted_coalgebra(&f, &h, &inclusion(&c, &h), ActionKind::LeftMult, &pol(4)).unwrap()
    }

    /// Rank of an integer matrix by fraction-free elimination, kept apart from `linalg`.
    fn oracle_rank(mut m: Vec<Vec<i64>>) -> usize {
        let mut rank = 0;
        let cols = m.first().map_or(0, Vec::len);
        for c in 0..cols {
            let Some(p) = (rank..m.len()).find(|&i| m[i][c] != 0) else {
                continue;
            };
            m.swap(rank, p);
            for i in 0..m.len() {
                if i != rank && m[i][c] != 0 {
                    let (a, b) = (m[rank][c], m[i][c]);
                    for j in 0..cols {
                        m[i][j] = a * m[i][j] - b * m[rank][j];
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn hopf_complex_basis_and_betti() {
        let tc = hopf_family();
        let cx = assemble_complex(&tc, 3).unwrap();
        let flat: Vec<TensorKey> = cx.basis[..=3].concat();
        assert_eq!(
            flat,
            vec![(0, vec![]), (0, vec![0]), (1, vec![]), (1, vec![0])]
        );
        // Independent oracle: the classical formula on the 4 basis elements.
        let (c, _, _) = s2();
        let mut cop = GradedMap::zero(c.clone(), c.clone(), 1, 2, 0);
        for (x, l, r) in [(0, 0, 0), (1, 1, 0), (1, 0, 1)] {
            cop.add_entry(vec![x], vec![l, r], q(1)).unwrap();
        }
        let d = GradedMap::zero(c.clone(), c.clone(), 1, 1, -1);
        let mut m = vec![vec![0i64; 4]; 4];
        for (j, k) in flat.iter().enumerate() {
            let v = classical_twisted_differential(&d, &cop, &tc.hopf, &tc.tau, Sign::Minus, k);
            for (t, c) in v.iter() {
                let i = flat.iter().position(|f| f == t).unwrap();
                m[i][j] = c.to_integer().try_into().unwrap();
            }
        }
        let degs = [0usize, 1, 2, 3];
        let rank_from = |j: usize| {
            oracle_rank(
                (0..4)
                    .filter(|&i| degs[i] + 1 == degs[j])
                    .map(|i| vec![m[i][j]])
                    .collect(),
            )
        };
        let ranks: Vec<usize> = (0..4).map(rank_from).collect();
        let oracle: Vec<usize> = (0..4)
            .map(|k| 1 - ranks[k] - ranks.get(k + 1).copied().unwrap_or(0))
            .collect();
        assert_eq!(oracle, vec![1, 0, 0, 1]);
        assert_eq!(homology(&cx).betti, oracle);
    }

    #[test]
    fn s2_path_space_dimensions_and_acyclicity() {
        let cx = assemble_complex(&s2_family(ActionKind::LeftMult, 7), 5).unwrap();
        assert_eq!(cx.dimensions(), vec![1, 1, 2, 2, 2, 2]);
        let cx = assemble_complex(&s2_family(ActionKind::LeftMult, 8), 6).unwrap();
        assert_eq!(homology(&cx).betti, vec![1, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn zero_differential_gives_dimensions() {
        let (_, f, _) = s2();
        let tc = untwisted_tensor_coalgebra(&f, &tensor(&[("a", 1)]), &pol(6));
        let cx = assemble_complex(&tc, 4).unwrap();
        let hr = homology(&cx);
        assert_eq!(hr.betti, cx.dimensions());
        for (k, reps) in hr.representatives.iter().enumerate() {
            for (i, r) in reps.iter().enumerate() {
                let mut e = vec![q(0); reps.len()];
                e[i] = q(1);
                assert_eq!(hr.project(&cx, k, r).unwrap(), e);
            }
        }
    }

    #[test]
    fn degree_zero_generators_rejected() {
        let (c, f, _) = s2();
        let h = tensor(&[("a", 0)]);
        let tc = untwisted_tensor_coalgebra(&f, &h, &pol(4));
        let _ = c;
        assert!(matches!(
            assemble_complex(&tc, 3),
            Err(HomologyError::InexactTruncation(..))
        ));
    }

    #[test]
    fn representatives_are_cycles_and_boundaries_project_to_zero() {
        let cx = assemble_complex(&s2_family(ActionKind::Conjugation, 8), 7).unwrap();
        let hr = homology(&cx);
        for k in 0..=7 {
            for r in &hr.representatives[k] {
                assert!(cx.boundary(k, r).unwrap().is_zero());
            }
            for b in &hr.boundary_basis[k] {
                assert!(hr.project(&cx, k, b).unwrap().iter().all(Zero::is_zero));
            }
        }
        assert_eq!(hr.truncated_euler(), cx.euler_characteristic());
        let not_cycle = Lin::basis((1, vec![0]));
        assert_eq!(
            hr.project(&cx, 3, &not_cycle),
            Err(HomologyError::NotACycle(3))
        );
    }

    fn s3_loop_algebra(d: i64) -> TwistedAlgebra {
        let (c, f, p) = s3();
        let h = tensor(&[("a", 2)]);
        build_twisted_algebra(
            &f,
            &p,
            &h,
            &inclusion(&c, &h),
            ActionKind::Conjugation,
            &pol(d),
        )
        .unwrap()
    }

    #[test]
    fn s3_loop_product_is_exterior_times_polynomial() {
        let alg = s3_loop_algebra(9);
        let cx = assemble_complex(&alg.coalgebra, 8).unwrap();
        let hr = homology(&cx);
        let table = induced_product(&cx, &hr, &alg).unwrap();
        // Classes: e0⊗a^k in degree 2k, e3⊗a^k in degree 2k+3, each alone in its degree.
        let class_of = |deg: usize| -> Option<TensorKey> {
            let reps = &hr.representatives[deg];
            (reps.len() == 1).then(|| reps[0].keys().next().unwrap().clone())
        };
        let mut seen = 0;
        for ((p, i, r, j), v) in &table.entries {
            let (x, y) = (class_of(*p).unwrap(), class_of(*r).unwrap());
            assert_eq!((*i, *j), (0, 0));
            let out = p + r - 3;
            let expected_key = match (x.0, y.0) {
                (1, 1) => Some((1, vec![0; x.1.len() + y.1.len()])),
                (1, 0) | (0, 1) => Some((0, vec![0; x.1.len() + y.1.len()])),
                _ => None,
            };
            match expected_key {
                Some(k) => {
                    assert_eq!(class_of(out), Some(k));
                    assert_eq!(v.len(), 1);
                    assert_eq!(num_traits::Signed::abs(&v[0]), q(1));
                }
                None => assert!(v.iter().all(Zero::is_zero)),
            }
            seen += 1;
        }
        assert!(seen > 10);
        let unit = |k: usize| (3usize, 0usize, k, 0usize);
        for k in 0..=5 {
            if let Some(v) = table.entries.get(&unit(k)) {
                assert_eq!(v, &vec![q(1)], "left unit in degree {k}");
            }
            if let Some(v) = table.entries.get(&(k, 0, 3, 0)) {
                assert_eq!(v, &vec![q(1)], "right unit in degree {k}");
            }
        }
    }

    #[test]
    fn product_is_independent_of_representatives() {
        for (alg, d) in [(s3_loop_algebra(8), 7usize), {
            let (c, f, p) = s2();
            let h = tensor(&[("a", 1)]);
            let alg = build_twisted_algebra(
                &f,
                &p,
                &h,
                &inclusion(&c, &h),
                ActionKind::Conjugation,
                &pol(8),
            )
            .unwrap();
            (alg, 7)
        }] {
            let cx = assemble_complex(&alg.coalgebra, d).unwrap();
            let hr = homology(&cx);
            let base = induced_product(&cx, &hr, &alg).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
            for _ in 0..20 {
                let mut moved = hr.clone();
                for (k, reps) in moved.representatives.iter_mut().enumerate() {
                    for r in reps.iter_mut() {
                        for b in &hr.boundary_basis[k] {
                            r.add_scaled(b, &q(rng.gen_range(-3..=3)));
                        }
                    }
                }
                assert_eq!(induced_product(&cx, &moved, &alg).unwrap(), base);
            }
        }
    }

    #[test]
    fn s2_point_class_squares_to_zero() {
        let (c, f, p) = s2();
        let h = tensor(&[("a", 1)]);
        let alg = build_twisted_algebra(
            &f,
            &p,
            &h,
            &inclusion(&c, &h),
            ActionKind::Conjugation,
            &pol(6),
        )
        .unwrap();
        let cx = assemble_complex(&alg.coalgebra, 5).unwrap();
        let hr = homology(&cx);
        let table = induced_product(&cx, &hr, &alg).unwrap();
        assert!(table.entries.get(&(0, 0, 0, 0)).is_none());
        let e0 = Lin::basis((0usize, vec![]));
        assert!(unshifted_product(&alg, &e0, &e0).is_zero());
        assert_eq!(table.product(2, 0, 2, 0).map(|v| v.len()), Some(1));
    }

    #[test]
    fn shared_differential_examples() {
        let (c, f, p) = s2();
        let h = tensor(&[("a", 1)]);
        let tau = inclusion(&c, &h);
        let alg =
            build_twisted_algebra(&f, &p, &h, &tau, ActionKind::Conjugation, &pol(6)).unwrap();
        let co = s2_family(ActionKind::Conjugation, 6);
        assert_eq!(verify_shared_differential(&alg, &co, 6), Ok(true));
        let left = s2_family(ActionKind::LeftMult, 6);
        let br = s2_family(ActionKind::Bracket, 6);
        assert_eq!(verify_shared_differential(&left, &br, 6), Ok(false));
        let u1 = untwisted_tensor_coalgebra(&f, &h, &pol(6));
        let u2 = untwisted_tensor_coalgebra(&f, &h, &pol(6));
        assert_eq!(verify_shared_differential(&u1, &u2, 6), Ok(true));
        assert_eq!(
            verify_shared_differential(&u1, &hopf_family(), 3),
            Err(HomologyError::MismatchedBases)
        );
    }

    #[test]
    fn chain_product_is_associative_and_unital() {
        for (c, f, p, h) in [
            {
                let (c, f, p) = s2();
                (c, f, p, tensor(&[("a", 1)]))
            },
            {
                let (c, f, p) = cp2();
                (c, f, p, cp2_hopf())
            },
            {
                let (c, f, p) = s2xs3();
                (c, f, p, s2xs3_hopf(1))
            },
        ] {
            let pl = pol(5);
            let alg =
                build_twisted_algebra(&f, &p, &h, &inclusion(&c, &h), ActionKind::Conjugation, &pl)
                    .unwrap();
            let keys: Vec<Lin<TensorKey>> = alg.basis(&pl).into_iter().map(Lin::basis).collect();
            let unit = Lin::basis((c.dim() - 1, vec![]));
            let m = |x: &Lin<TensorKey>, y: &Lin<TensorKey>| unshifted_product(&alg, x, y);
            for x in &keys {
                assert_eq!(&m(&unit, x), x);
                assert_eq!(&m(x, &unit), x);
                for y in &keys {
                    let xy = m(x, y);
                    for z in &keys {
                        assert_eq!(m(&xy, z), m(x, &m(y, z)));
                    }
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn homology_is_invariant_under_basis_reordering(seed in any::<u64>()) {
            let tc = s2_family(ActionKind::Conjugation, 7);
            let cx = assemble_complex(&tc, 6).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut basis = cx.basis.clone();
            for b in basis.iter_mut() {
                for i in (1..b.len()).rev() {
                    b.swap(i, rng.gen_range(0..=i));
                }
            }
            let names = basis.iter().map(|b| b.iter().map(|k| tc.key_name(k)).collect()).collect();
            let shuffled = ChainComplex::from_differential(6, basis, names, |k| tc.differential(k)).unwrap();
            let (h1, h2) = (homology(&cx), homology(&shuffled));
            prop_assert_eq!(&h1.betti, &h2.betti);
            prop_assert_eq!(h1.truncated_euler(), shuffled.euler_characteristic());
            for k in 0..=6 {
                for r in &h1.representatives[k] {
                    let v = h2.project(&shuffled, k, r).unwrap();
                    prop_assert!(v.iter().any(|x| !x.is_zero()));
                }
            }
        }
    }
}
