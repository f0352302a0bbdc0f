//! A∞, C∞ and L∞ families in shifted form, their defect checkers, cyclic pairings,
//! dualization to algebras, and convolution structures on Hom spaces.
//!
//! Every family stores its operations on the shifted space, where each structure map
//! has degree −1. A coalgebra family is a derivation `D = Σ d_n` of the tensor algebra
//! and the checker evaluates `D²` on generators. An algebra family is checked against
//! `Σ m(1^j ⊗ m ⊗ 1^l) = 0`, where passing `m` over the first `j` letters costs the
//! sign of their total degree.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_traits::{One, Zero};

use crate::free_objects::{self, TruncationPolicy, Word};
use crate::graded_core::{
    permutations, reorder_sign, shift_map, GradedError, GradedMap, GradedSpace, Lin, Sign, Q,
};
use crate::hopf::HopfAlgebra;
use crate::linalg;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum StructureKind {
    AinfCoalgebra,
    CinfCoalgebra,
    AinfAlgebra,
    CinfAlgebra,
    LinfAlgebra,
    StrictCoalgebra,
    StrictAlgebra,
}

impl StructureKind {
    pub fn is_coalgebra(self) -> bool {
        matches!(
            self,
            StructureKind::AinfCoalgebra
                | StructureKind::CinfCoalgebra
                | StructureKind::StrictCoalgebra
        )
    }

    pub fn is_lie(self) -> bool {
        self == StructureKind::LinfAlgebra
    }

    pub fn is_strict(self) -> bool {
        matches!(
            self,
            StructureKind::StrictCoalgebra | StructureKind::StrictAlgebra
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            StructureKind::AinfCoalgebra => "A∞-coalgebra",
            StructureKind::CinfCoalgebra => "C∞-coalgebra",
            StructureKind::AinfAlgebra => "A∞-algebra",
            StructureKind::CinfAlgebra => "C∞-algebra",
            StructureKind::LinfAlgebra => "L∞-algebra",
            StructureKind::StrictCoalgebra => "strict dg coalgebra",
            StructureKind::StrictAlgebra => "strict dg algebra",
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("structure map of arity {found} found where arity {expected} was expected")]
    ArityGap { expected: usize, found: usize },
    #[error("arity {arity} map has degree {degree}, shifted maps must have degree -1")]
    WrongDegree { arity: usize, degree: i64 },
    #[error("strict structure has a nonzero map in arity {0}")]
    StrictHigherArity(usize),
    #[error("operation expects {expected}, got {found}")]
    WrongKind { expected: String, found: String },
    #[error("pairing must be non-degenerate")]
    DegeneratePairing,
    #[error("pairing is not graded-symmetric at ({0}, {1})")]
    NotGradedSymmetric(String, String),
    #[error("pairing entries have inconsistent total degree")]
    PairingDegree,
    #[error("coalgebra is not cyclic for the pairing (arity {0})")]
    NotCyclic(usize),
    #[error(transparent)]
    Graded(#[from] GradedError),
}

/// Arity-indexed operations on a graded basis indexed by `Key`, in shifted form.
///
/// Coalgebra operations take a one-letter input and return words of length `n`;
/// algebra and L∞ operations take `n` letters and return one-letter words.
pub trait StructureFamily {
    type Key: Clone + Ord + Debug;

    fn kind(&self) -> StructureKind;
    fn max_arity(&self) -> usize;
    /// Shifted degree.
    fn degree(&self, key: &Self::Key) -> i64;
    /// Nonnegative grading used for truncation.
    fn weight(&self, key: &Self::Key) -> i64;
    fn op(&self, n: usize, input: &[Self::Key]) -> Lin<Vec<Self::Key>>;
    /// Basis elements of weight at most the policy degree.
    fn basis(&self, policy: &TruncationPolicy) -> Vec<Self::Key>;
    fn key_name(&self, key: &Self::Key) -> String;

    fn word_degree(&self, w: &[Self::Key]) -> i64 {
        w.iter().map(|k| self.degree(k)).sum()
    }

    fn word_name(&self, w: &[Self::Key]) -> String {
        w.iter()
            .map(|k| self.key_name(k))
            .collect::<Vec<_>>()
            .join("|")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Defect<K, V> {
    pub arity: usize,
    pub input: Vec<K>,
    pub value: V,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DefectReport<K, V = Lin<Vec<K>>> {
    pub checked: usize,
    pub defects: Vec<Defect<K, V>>,
}

impl<K, V> DefectReport<K, V> {
    fn new() -> Self {
        DefectReport {
            checked: 0,
            defects: Vec::new(),
        }
    }

    pub fn passes(&self) -> bool {
        self.defects.is_empty()
    }
}

/// Family with finitely many basis elements, stored as graded maps on the shifted space.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteFamily {
    pub kind: StructureKind,
    pub space: GradedSpace,
    maps: Vec<GradedMap>,
    weights: Vec<i64>,
}

impl FiniteFamily {
    /// `maps[n-1]` is the arity-`n` map.
    pub fn new(
        kind: StructureKind,
        space: GradedSpace,
        maps: Vec<GradedMap>,
        weights: Vec<i64>,
    ) -> Result<Self, StructureError> {
        for (i, m) in maps.iter().enumerate() {
            let n = i + 1;
            let found = if kind.is_coalgebra() {
                m.arity_out
            } else {
                m.arity_in
            };
            let other = if kind.is_coalgebra() {
                m.arity_in
            } else {
                m.arity_out
            };
            if found != n || other != 1 {
                return Err(StructureError::ArityGap { expected: n, found });
            }
            if m.degree != -1 {
                return Err(StructureError::WrongDegree {
                    arity: n,
                    degree: m.degree,
                });
            }
            if kind.is_strict() && n > 2 && !m.is_zero() {
                return Err(StructureError::StrictHigherArity(n));
            }
        }
        Ok(FiniteFamily {
            kind,
            space,
            maps,
            weights,
        })
    }

    /// Coalgebra from unshifted maps `c_n: C → C^{⊗n}` of degree `n − 2`.
    pub fn coalgebra_from_unshifted(
        kind: StructureKind,
        space: &GradedSpace,
        maps: &[GradedMap],
    ) -> Result<Self, StructureError> {
        let shifted = maps.iter().map(|m| shift_map(m, -1)).collect();
        FiniteFamily::new(kind, space.shift(-1), shifted, space.degrees().to_vec())
    }

    pub fn map(&self, n: usize) -> Option<&GradedMap> {
        self.maps.get(n.wrapping_sub(1))
    }

    pub fn maps(&self) -> &[GradedMap] {
        &self.maps
    }

    /// Maps conjugated back to the unshifted grading.
    pub fn unshifted_maps(&self) -> Vec<GradedMap> {
        self.maps
            .iter()
            .map(|m| shift_map(m, -self.space.offset))
            .collect()
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }
}

impl StructureFamily for FiniteFamily {
    type Key = usize;

    fn kind(&self) -> StructureKind {
        self.kind
    }

    fn max_arity(&self) -> usize {
        self.maps.len()
    }

    fn degree(&self, key: &usize) -> i64 {
        self.space.degree(*key)
    }

    fn weight(&self, key: &usize) -> i64 {
        self.weights[*key]
    }

    fn op(&self, n: usize, input: &[usize]) -> Lin<Vec<usize>> {
        match self.map(n) {
            Some(m) => m.eval(input),
            None => Lin::zero(),
        }
    }

    fn basis(&self, policy: &TruncationPolicy) -> Vec<usize> {
        (0..self.space.dim())
            .filter(|&i| self.weights[i] <= policy.max_total_degree)
            .collect()
    }

    fn key_name(&self, key: &usize) -> String {
        self.space.element_name(*key).to_string()
    }
}

/// The derivation `Σ_n d_n` of the tensor algebra applied to a word.
pub fn coderivation_on_word<S: StructureFamily>(s: &S, w: &[S::Key]) -> Lin<Vec<S::Key>> {
    let mut out = Lin::zero();
    let mut passed = 0i64;
    for i in 0..w.len() {
        for n in 1..=s.max_arity() {
            for (v, c) in s.op(n, &w[i..i + 1]).iter() {
                let mut word = w[..i].to_vec();
                word.extend_from_slice(v);
                word.extend_from_slice(&w[i + 1..]);
                out.add_signed(word, c, Sign::from_parity(passed));
            }
        }
        passed += s.degree(&w[i]);
    }
    out
}

/// Applies the algebra operations to every consecutive block of a word.
pub fn algebra_differential_on_word<S: StructureFamily>(s: &S, w: &[S::Key]) -> Lin<Vec<S::Key>> {
    let mut out = Lin::zero();
    let mut passed = 0i64;
    for j in 0..w.len() {
        for k in 1..=s.max_arity().min(w.len() - j) {
            for (y, c) in s.op(k, &w[j..j + k]).iter() {
                let mut word = w[..j].to_vec();
                word.extend_from_slice(y);
                word.extend_from_slice(&w[j + k..]);
                out.add_signed(word, c, Sign::from_parity(passed));
            }
        }
        passed += s.degree(&w[j]);
    }
    out
}

/// Words of length `len` in the given letters with total weight at most `max_weight`.
pub fn words_of_weight<S: StructureFamily>(
    s: &S,
    letters: &[S::Key],
    len: usize,
    max_weight: i64,
) -> Vec<Vec<S::Key>> {
    let weighted: Vec<(S::Key, i64)> = letters.iter().map(|k| (k.clone(), s.weight(k))).collect();
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<S::Key>, i64)> = vec![(Vec::new(), 0)];
    while let Some((w, wt)) = stack.pop() {
        if w.len() == len {
            out.push(w);
            continue;
        }
        for (k, kw) in weighted.iter().rev() {
            if wt + kw <= max_weight {
                let mut v = w.clone();
                v.push(k.clone());
                stack.push((v, wt + kw));
            }
        }
    }
    out.sort();
    out
}

/// Evaluates every A∞ relation within the policy and lists the nonzero values.
///
/// Coalgebras: `D²` on each generator of weight ≤ D, split by output length.
/// Algebras: the Stasheff sum on each word of length ≤ max arity + 1 and weight ≤ D.
pub fn check_ainf<S: StructureFamily>(
    s: &S,
    policy: &TruncationPolicy,
) -> Result<DefectReport<S::Key>, StructureError> {
    let kind = s.kind();
    if kind.is_lie() {
        return Err(StructureError::WrongKind {
            expected: "an A∞ (co)algebra".into(),
            found: kind.label().into(),
        });
    }
    let mut report = DefectReport::new();
    let basis = s.basis(policy);
    if kind.is_coalgebra() {
        for x in &basis {
            let once = coderivation_on_word(s, std::slice::from_ref(x));
            let twice = once.apply(|w| coderivation_on_word(s, w));
            report.checked += 1;
            let mut by_len: BTreeMap<usize, Lin<Vec<S::Key>>> = BTreeMap::new();
            for (w, c) in twice.iter() {
                by_len
                    .entry(w.len())
                    .or_default()
                    .add_term(w.clone(), c.clone());
            }
            for (arity, value) in by_len {
                report.defects.push(Defect {
                    arity,
                    input: vec![x.clone()],
                    value,
                });
            }
        }
    } else {
        for len in 1..=s.max_arity() + 1 {
            for w in words_of_weight(s, &basis, len, policy.max_total_degree) {
                report.checked += 1;
                let once = algebra_differential_on_word(s, &w);
                let mut total = Lin::zero();
                for (v, c) in once.iter() {
                    let n = v.len();
                    if n >= 1 && n <= s.max_arity() {
                        total.add_scaled(&s.op(n, v), c);
                    }
                }
                if !total.is_zero() {
                    report.defects.push(Defect {
                        arity: len,
                        input: w,
                        value: total,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Signed unshuffles `w ↦ Σ ± (u, v)` of a word of keys, both sides nonempty.
fn reduced_unshuffle_keys<K: Clone + Ord>(w: &[K], degs: &[i64]) -> Vec<(Sign, Vec<K>, Vec<K>)> {
    let positions: Vec<usize> = (0..w.len()).collect();
    free_objects::unshuffle(&positions, degs)
        .iter()
        .filter(|((l, r), _)| !l.is_empty() && !r.is_empty())
        .map(|((l, r), c)| {
            let s = if c.is_one() { Sign::Plus } else { Sign::Minus };
            (
                s,
                l.iter().map(|&i| w[i].clone()).collect(),
                r.iter().map(|&i| w[i].clone()).collect(),
            )
        })
        .collect()
}

fn shuffle_keys<K: Clone + Ord>(u: &[K], v: &[K], degs: &[i64]) -> Lin<Vec<K>> {
    let all: Vec<K> = u.iter().chain(v).cloned().collect();
    let left: Vec<usize> = (0..u.len()).collect();
    let right: Vec<usize> = (u.len()..all.len()).collect();
    free_objects::shuffle(&left, &right, degs)
        .map_keys(|w| w.iter().map(|&i| all[i].clone()).collect())
}

/// Coalgebras: the reduced unshuffle of every `d_n(x)`, `n ≥ 2`, must vanish.
/// Algebras: every `m_n` must vanish on shuffles of two nonempty words.
pub fn check_cinfty<S: StructureFamily>(
    s: &S,
    policy: &TruncationPolicy,
) -> DefectReport<S::Key, Lin<(Vec<S::Key>, Vec<S::Key>)>> {
    let mut report = DefectReport::new();
    let basis = s.basis(policy);
    if s.kind().is_coalgebra() {
        for x in &basis {
            for n in 2..=s.max_arity() {
                report.checked += 1;
                let mut value = Lin::zero();
                for (w, c) in s.op(n, std::slice::from_ref(x)).iter() {
                    let degs: Vec<i64> = w.iter().map(|k| s.degree(k)).collect();
                    for (sign, l, r) in reduced_unshuffle_keys(w, &degs) {
                        value.add_signed((l, r), c, sign);
                    }
                }
                if !value.is_zero() {
                    report.defects.push(Defect {
                        arity: n,
                        input: vec![x.clone()],
                        value,
                    });
                }
            }
        }
    } else {
        for n in 2..=s.max_arity() {
            for w in words_of_weight(s, &basis, n, policy.max_total_degree) {
                let degs: Vec<i64> = w.iter().map(|k| s.degree(k)).collect();
                for p in 1..n {
                    report.checked += 1;
                    let sh = shuffle_keys(&w[..p], &w[p..], &degs);
                    let value = sh.apply(|v| s.op(n, v));
                    if !value.is_zero() {
                        report.defects.push(Defect {
                            arity: n,
                            input: w.clone(),
                            value: value.map_keys(|v| (v.clone(), Vec::new())),
                        });
                    }
                }
            }
        }
    }
    report
}

/// L∞ family obtained by summing an algebra family over all input orders.
///
/// In shifted degrees the Koszul sign alone is used; it equals the sign-twisted Koszul
/// sign of the unshifted inputs.
#[derive(Clone, Debug)]
pub struct Symmetrized<S>(pub S);

pub fn symmetrize_to_linf<S: StructureFamily>(s: S) -> Result<Symmetrized<S>, StructureError> {
    if s.kind().is_coalgebra() || s.kind().is_lie() {
        return Err(StructureError::WrongKind {
            expected: "an A∞ algebra".into(),
            found: s.kind().label().into(),
        });
    }
    Ok(Symmetrized(s))
}

impl<S: StructureFamily> StructureFamily for Symmetrized<S> {
    type Key = S::Key;

    fn kind(&self) -> StructureKind {
        StructureKind::LinfAlgebra
    }

    fn max_arity(&self) -> usize {
        self.0.max_arity()
    }

    fn degree(&self, key: &S::Key) -> i64 {
        self.0.degree(key)
    }

    fn weight(&self, key: &S::Key) -> i64 {
        self.0.weight(key)
    }

    fn op(&self, n: usize, input: &[S::Key]) -> Lin<Vec<S::Key>> {
        let degs: Vec<i64> = input.iter().map(|k| self.0.degree(k)).collect();
        let mut out = Lin::zero();
        for order in permutations(n) {
            let permuted: Vec<S::Key> = order.iter().map(|&i| input[i].clone()).collect();
            let v = self.0.op(n, &permuted);
            out.add_scaled(&v, &reorder_sign(&order, &degs).to_q());
        }
        out
    }

    fn basis(&self, policy: &TruncationPolicy) -> Vec<S::Key> {
        self.0.basis(policy)
    }

    fn key_name(&self, key: &S::Key) -> String {
        self.0.key_name(key)
    }
}

/// Generalized Jacobi identities `Σ ε l(l(x_S), x_rest) = 0` over ordered splittings,
/// on words of length ≤ `max_len` within the policy.
pub fn check_linf<S: StructureFamily>(
    s: &S,
    policy: &TruncationPolicy,
    max_len: usize,
) -> DefectReport<S::Key> {
    let mut report = DefectReport::new();
    let basis = s.basis(policy);
    for len in 1..=max_len {
        for w in words_of_weight(s, &basis, len, policy.max_total_degree) {
            report.checked += 1;
            let degs: Vec<i64> = w.iter().map(|k| s.degree(k)).collect();
            let mut total = Lin::zero();
            for bits in 1u64..(1u64 << len) {
                let inner: Vec<usize> = (0..len).filter(|i| bits >> i & 1 == 1).collect();
                let outer: Vec<usize> = (0..len).filter(|i| bits >> i & 1 == 0).collect();
                let i = inner.len();
                let j = outer.len() + 1;
                if i > s.max_arity() || j > s.max_arity() {
                    continue;
                }
                let order: Vec<usize> = inner.iter().chain(&outer).copied().collect();
                let sign = reorder_sign(&order, &degs);
                let xs: Vec<S::Key> = inner.iter().map(|&p| w[p].clone()).collect();
                let rest: Vec<S::Key> = outer.iter().map(|&p| w[p].clone()).collect();
                for (y, c) in s.op(i, &xs).iter() {
                    let mut arg = y.clone();
                    arg.extend(rest.iter().cloned());
                    total.add_scaled(&s.op(j, &arg), &(c * sign.to_q()));
                }
            }
            if !total.is_zero() {
                report.defects.push(Defect {
                    arity: len,
                    input: w,
                    value: total,
                });
            }
        }
    }
    report
}

/// Graded-symmetric non-degenerate bilinear form on an unshifted space.
#[derive(Clone, Debug, PartialEq)]
pub struct Pairing {
    pub space: GradedSpace,
    dimension: i64,
    matrix: linalg::Matrix,
}

impl Pairing {
    /// Entries `⟨b_i, b_j⟩ = c`; the graded-symmetric partner is filled in.
    pub fn new(space: GradedSpace, entries: &[(usize, usize, Q)]) -> Result<Self, StructureError> {
        let n = space.dim();
        let mut m: Vec<Vec<Option<Q>>> = vec![vec![None; n]; n];
        let mut dimension = None;
        for (i, j, c) in entries {
            let (i, j) = (*i, *j);
            let partner = Sign::koszul(space.degree(i), space.degree(j)).to_q() * c;
            for (a, b, v) in [(i, j, c.clone()), (j, i, partner)] {
                match &m[a][b] {
                    Some(old) if *old != v => {
                        return Err(StructureError::NotGradedSymmetric(
                            space.element_name(a).into(),
                            space.element_name(b).into(),
                        ))
                    }
                    _ => m[a][b] = Some(v),
                }
            }
            if !c.is_zero() {
                let d = space.degree(i) + space.degree(j);
                if dimension.is_some_and(|e| e != d) {
                    return Err(StructureError::PairingDegree);
                }
                dimension = Some(d);
            }
        }
        let matrix: linalg::Matrix = m
            .into_iter()
            .map(|row| row.into_iter().map(|x| x.unwrap_or_else(Q::zero)).collect())
            .collect();
        if linalg::rank(&matrix, n) < n {
            return Err(StructureError::DegeneratePairing);
        }
        Ok(Pairing {
            space,
            dimension: dimension.unwrap_or(0),
            matrix,
        })
    }

    /// Total degree of the form, the dimension of the underlying manifold.
    pub fn dimension(&self) -> i64 {
        self.dimension
    }

    pub fn value(&self, i: usize, j: usize) -> Q {
        self.matrix[i][j].clone()
    }

    /// The form on the desuspended space: `⟨x̃, ỹ⟩ = (−1)^{|x|} ⟨x, y⟩`.
    pub fn shifted_matrix(&self) -> linalg::Matrix {
        (0..self.space.dim())
            .map(|i| {
                let s = Sign::from_parity(self.space.degree(i)).to_q();
                self.matrix[i].iter().map(|x| x * &s).collect()
            })
            .collect()
    }

    /// Dual basis on the shifted space: `⟨b̃_j, b̃_i^∨⟩ = δ_ij`.
    pub fn dual_basis(&self) -> Vec<Lin<usize>> {
        let inv = linalg::inverse(&self.shifted_matrix()).expect("non-degenerate");
        (0..self.space.dim())
            .map(|i| {
                (0..self.space.dim())
                    .map(|k| (k, inv[k][i].clone()))
                    .collect()
            })
            .collect()
    }
}

fn rotate_last_to_front(w: &[usize], degs: &[i64]) -> (Sign, Vec<usize>) {
    let n = w.len();
    let order: Vec<usize> = std::iter::once(n - 1).chain(0..n - 1).collect();
    let wd: Vec<i64> = w.iter().map(|&i| degs[i]).collect();
    (
        reorder_sign(&order, &wd),
        order.iter().map(|&i| w[i]).collect(),
    )
}

/// Writes each `d_n` as the tensor `Σ_i d_n(b̃_i) ⊗ b̃_i^∨` and tests invariance under
/// the Koszul-signed cyclic rotation.
pub fn check_cyclic(s: &FiniteFamily, p: &Pairing) -> Result<DefectReport<usize>, StructureError> {
    if !s.kind.is_coalgebra() {
        return Err(StructureError::WrongKind {
            expected: "a coalgebra".into(),
            found: s.kind.label().into(),
        });
    }
    let duals = p.dual_basis();
    let degs = s.space.degrees();
    let mut report = DefectReport::new();
    for n in 1..=s.max_arity() {
        report.checked += 1;
        let mut tensor = Lin::zero();
        for (i, dual) in duals.iter().enumerate() {
            for (w, c) in s.op(n, &[i]).iter() {
                for (k, e) in dual.iter() {
                    let mut v = w.clone();
                    v.push(*k);
                    tensor.add_term(v, c * e);
                }
            }
        }
        let mut rotated = Lin::zero();
        for (w, c) in tensor.iter() {
            let (sign, v) = rotate_last_to_front(w, degs);
            rotated.add_signed(v, c, sign);
        }
        let mut diff = rotated;
        diff.sub_assign(&tensor);
        if !diff.is_zero() {
            report.defects.push(Defect {
                arity: n,
                input: Vec::new(),
                value: diff,
            });
        }
    }
    Ok(report)
}

/// Koszul sign of evaluating `α_1 ⊗ … ⊗ α_n` on `y_1 ⊗ … ⊗ y_n` when each `α_j` is dual
/// to `y_j`: every `α_j` passes the earlier `y`.
fn pairing_sign(word: &[usize], degs: &[i64]) -> Sign {
    let mut e = 0i64;
    let mut passed = 0i64;
    for &y in word {
        e += degs[y] * passed;
        passed += degs[y];
    }
    Sign::from_parity(e)
}

/// Sign of transposing a degree `−1` map against `y_1 ⊗ … ⊗ y_n`: the evaluation sign
/// together with `(−1)^{Σ|y_j|}` from moving the map past the functionals.
fn transpose_sign(word: &[usize], degs: &[i64]) -> Sign {
    pairing_sign(word, degs) * Sign::from_parity(word.iter().map(|&y| degs[y]).sum())
}

/// The A∞ algebra on the linear dual of a shifted coalgebra, by transposing each `d_n`.
/// Basis element `i` is the functional dual to `b̃_i`, of degree `−|b̃_i|`.
pub fn dual_algebra(s: &FiniteFamily) -> Result<FiniteFamily, StructureError> {
    if !s.kind.is_coalgebra() {
        return Err(StructureError::WrongKind {
            expected: "a coalgebra".into(),
            found: s.kind.label().into(),
        });
    }
    let degs = s.space.degrees();
    let dual_basis: Vec<(String, i64)> = (0..s.space.dim())
        .map(|i| (format!("{}*", s.space.element_name(i)), -degs[i]))
        .collect();
    let space = GradedSpace::from_owned(&format!("{}*", s.space.name), dual_basis)?;
    let mut maps = Vec::new();
    for (idx, m) in s.maps().iter().enumerate() {
        let n = idx + 1;
        let mut out = GradedMap::zero(space.clone(), space.clone(), n, 1, -1);
        for (x, val) in m.entries() {
            for (w, c) in val.iter() {
                let sign = transpose_sign(w, degs);
                out.add_entry(w.clone(), x.clone(), c * sign.to_q())?;
            }
        }
        maps.push(out);
    }
    let kind = match s.kind {
        StructureKind::StrictCoalgebra => StructureKind::StrictAlgebra,
        StructureKind::CinfCoalgebra => StructureKind::CinfAlgebra,
        _ => StructureKind::AinfAlgebra,
    };
    FiniteFamily::new(kind, space, maps, s.weights().to_vec())
}

/// Dualizes a cyclic coalgebra to an algebra on `W`, the same basis with degrees
/// `|b| + 1 − dim`, identified with the dual through `w_i ↦ ⟨b̃_i, −⟩`.
pub fn pair_to_algebra(s: &FiniteFamily, p: &Pairing) -> Result<FiniteFamily, StructureError> {
    let report = check_cyclic(s, p)?;
    if let Some(d) = report.defects.first() {
        return Err(StructureError::NotCyclic(d.arity));
    }
    let dual = dual_algebra(s)?;
    let sm = p.shifted_matrix();
    let inv = linalg::inverse(&sm).ok_or(StructureError::DegeneratePairing)?;
    let dim = s.space.dim();
    let base = &p.space;
    let wbasis: Vec<(String, i64)> = (0..dim)
        .map(|i| {
            (
                base.element_name(i).to_string(),
                base.degree(i) + 1 - p.dimension(),
            )
        })
        .collect();
    let wspace = GradedSpace::from_owned("W", wbasis)?;
    // functional of w_i on the dual basis: Σ_y S[i][y] α_y
    let phi: Vec<Lin<usize>> = (0..dim)
        .map(|i| (0..dim).map(|y| (y, sm[i][y].clone())).collect())
        .collect();
    let mut maps = Vec::new();
    for (idx, m) in dual.maps().iter().enumerate() {
        let n = idx + 1;
        let mut out = GradedMap::zero(wspace.clone(), wspace.clone(), n, 1, -1);
        for input in all_words(dim, n) {
            let mut alphas: Lin<Vec<usize>> = Lin::basis(Vec::new());
            for &i in &input {
                alphas = crate::graded_core::bilinear(&alphas, &phi[i], |a, b| {
                    let mut v = a.clone();
                    v.push(*b);
                    Lin::basis(v)
                });
            }
            let f = alphas.apply(|a| m.eval(a));
            // functional Σ f_x α_x  =  Σ_k c_k Φ(w_k)  with  c = f S^{-1}
            for k in 0..dim {
                let c = f
                    .iter()
                    .fold(Q::zero(), |acc, (x, fx)| acc + fx * &inv[x[0]][k]);
                if !c.is_zero() {
                    out.add_entry(input.clone(), vec![k], c)?;
                }
            }
        }
        maps.push(out);
    }
    let kind = match s.kind {
        StructureKind::StrictCoalgebra => StructureKind::StrictAlgebra,
        StructureKind::CinfCoalgebra => StructureKind::CinfAlgebra,
        _ => StructureKind::AinfAlgebra,
    };
    FiniteFamily::new(kind, wspace, maps, s.weights().to_vec())
}

/// Inverse of [`pair_to_algebra`]: recovers the shifted coalgebra maps.
pub fn algebra_to_coalgebra(
    a: &FiniteFamily,
    p: &Pairing,
    kind: StructureKind,
) -> Result<FiniteFamily, StructureError> {
    let sm = p.shifted_matrix();
    let inv = linalg::inverse(&sm).ok_or(StructureError::DegeneratePairing)?;
    let cspace = p.space.shift(-1);
    let degs = cspace.degrees().to_vec();
    let dim = cspace.dim();
    let mut maps = Vec::new();
    for (idx, m) in a.maps().iter().enumerate() {
        let n = idx + 1;
        let mut out = GradedMap::zero(cspace.clone(), cspace.clone(), 1, n, -1);
        // f_i(x) for every input word i: the functional Σ_k c_k Φ(w_k) evaluated at b̃_x
        let mut f: BTreeMap<(Vec<usize>, usize), Q> = BTreeMap::new();
        for (input, val) in m.entries() {
            for x in 0..dim {
                let v = val
                    .iter()
                    .fold(Q::zero(), |acc, (k, c)| acc + c * &sm[k[0]][x]);
                if !v.is_zero() {
                    f.insert((input.clone(), x), v);
                }
            }
        }
        for x in 0..dim {
            for y in all_words(dim, n) {
                let mut coeff = Q::zero();
                for ((input, fx), v) in f.iter() {
                    if *fx != x {
                        continue;
                    }
                    let mut t = v.clone();
                    for (j, &ij) in input.iter().enumerate() {
                        t *= &inv[y[j]][ij];
                    }
                    coeff += t;
                }
                if !coeff.is_zero() {
                    let c = coeff * transpose_sign(&y, &degs).to_q();
                    out.add_entry(vec![x], y, c)?;
                }
            }
        }
        maps.push(out);
    }
    FiniteFamily::new(kind, cspace, maps, p.space.degrees().to_vec())
}

fn all_words(dim: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..dim).map(move |i| {
                    let mut v = w.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvolutionMode {
    Assoc,
    Lie,
}

/// `Hom(C̃, H)` realized as `C̃^* ⊗ H`; key `(i, h)` is the dual of `b̃_i` tensored with
/// the word `h`. As a map it sends `b̃_i` to `(−1)^{|h||b̃_i|} h`.
#[derive(Clone, Debug)]
pub struct HomConvolution {
    pub source: FiniteFamily,
    pub dual: FiniteFamily,
    pub target: HopfAlgebra,
}

/// The convolution A∞ algebra on `Hom(C̃, H)`; in Lie mode, its symmetrization.
pub fn hom_convolution(
    source: &FiniteFamily,
    target: &HopfAlgebra,
) -> Result<HomConvolution, StructureError> {
    Ok(HomConvolution {
        source: source.clone(),
        dual: dual_algebra(source)?,
        target: target.clone(),
    })
}

pub fn hom_convolution_lie(
    source: &FiniteFamily,
    target: &HopfAlgebra,
) -> Result<Symmetrized<HomConvolution>, StructureError> {
    symmetrize_to_linf(hom_convolution(source, target)?)
}

pub type HomKey = (usize, Word);

impl HomConvolution {
    /// Hom element representing a degree-0 map `b̃_x ↦ values[x]`.
    pub fn element_from_map(&self, values: &[Lin<Word>]) -> Lin<HomKey> {
        let mut out = Lin::zero();
        for (x, v) in values.iter().enumerate() {
            let dx = self.source.space.degree(x);
            for (h, c) in v.iter() {
                let s = Sign::koszul(self.target.degree(h), dx);
                out.add_signed((x, h.clone()), c, s);
            }
        }
        out
    }

    /// Value of a Hom element on the basis vector `b̃_x`.
    pub fn evaluate(&self, f: &Lin<HomKey>, x: usize) -> Lin<Word> {
        let dx = self.source.space.degree(x);
        let mut out = Lin::zero();
        for ((i, h), c) in f.iter() {
            if *i == x {
                out.add_signed(h.clone(), c, Sign::koszul(self.target.degree(h), dx));
            }
        }
        out
    }

    /// `Σ_k m_k(f, …, f)` over the given arities, for one homogeneous-or-not element.
    pub fn power_sum(
        &self,
        f: &Lin<HomKey>,
        arities: std::ops::RangeInclusive<usize>,
    ) -> Lin<HomKey> {
        let mut out = Lin::zero();
        for n in arities {
            let mut words: Lin<Vec<HomKey>> = Lin::basis(Vec::new());
            for _ in 0..n {
                words = crate::graded_core::bilinear(&words, f, |w, k| {
                    let mut v = w.clone();
                    v.push(k.clone());
                    Lin::basis(v)
                });
            }
            for (w, c) in words.iter() {
                out.add_scaled(&self.op(n, w).map_keys(|v| v[0].clone()), c);
            }
        }
        out
    }
}

impl StructureFamily for HomConvolution {
    type Key = HomKey;

    fn kind(&self) -> StructureKind {
        StructureKind::AinfAlgebra
    }

    fn max_arity(&self) -> usize {
        self.source.max_arity()
    }

    fn degree(&self, key: &HomKey) -> i64 {
        self.dual.space.degree(key.0) + self.target.degree(&key.1)
    }

    fn weight(&self, key: &HomKey) -> i64 {
        self.source.weights()[key.0] + self.target.degree(&key.1)
    }

    fn op(&self, n: usize, input: &[HomKey]) -> Lin<Vec<HomKey>> {
        if input.len() != n || n > self.max_arity() {
            return Lin::zero();
        }
        let mut out = Lin::zero();
        let alphas: Vec<usize> = input.iter().map(|k| k.0).collect();
        let alpha_degs: Vec<i64> = alphas.iter().map(|&a| self.dual.space.degree(a)).collect();
        // move every h to the right of the later α's
        let mut e = 0i64;
        for j in 0..n {
            let dh = self.target.degree(&input[j].1);
            e += dh * alpha_degs[j + 1..].iter().sum::<i64>();
        }
        let rearr = Sign::from_parity(e);
        let mut hs = Lin::basis(Vec::new());
        for k in input {
            hs = self.target.mul(&hs, &Lin::basis(k.1.clone()));
        }
        for (y, c) in self.dual.op(n, &alphas).iter() {
            for (h, d) in hs.iter() {
                out.add_signed(vec![(y[0], h.clone())], &(c * d), rearr);
            }
        }
        if n == 1 && self.target.has_differential() {
            // the H differential passes the dual factor in its unshifted degree
            let (a, h) = &input[0];
            let s = Sign::from_parity(alpha_degs[0] + 1);
            for (dh, c) in self.target.diff_word(h).iter() {
                out.add_signed(vec![(*a, dh.clone())], c, s);
            }
        }
        out
    }

    fn basis(&self, policy: &TruncationPolicy) -> Vec<HomKey> {
        let mut out = Vec::new();
        for i in 0..self.source.space.dim() {
            for h in self.target.basis_within(policy) {
                let k = (i, h);
                if self.weight(&k) <= policy.max_total_degree {
                    out.push(k);
                }
            }
        }
        out
    }

    fn key_name(&self, key: &HomKey) -> String {
        format!(
            "{}⊗{}",
            self.dual.space.element_name(key.0),
            self.target.word_name(&key.1)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_core::q;

    enum Perturb {
        None,
        DropRightLeg,
        DoubleRightLeg,
    }

    fn s2_coalgebra(perturb: Perturb) -> (GradedSpace, FiniteFamily) {
        let c = GradedSpace::new("C", &[("e0", 0), ("e2", 2)]).unwrap();
        let mut c2 = GradedMap::zero(c.clone(), c.clone(), 1, 2, 0);
        c2.add_entry(vec![0], vec![0, 0], q(1)).unwrap();
        c2.add_entry(vec![1], vec![1, 0], q(1)).unwrap();
        match perturb {
            Perturb::None => c2.add_entry(vec![1], vec![0, 1], q(1)).unwrap(),
            Perturb::DropRightLeg => {}
            Perturb::DoubleRightLeg => c2.add_entry(vec![1], vec![0, 1], q(2)).unwrap(),
        }
        let c1 = GradedMap::zero(c.clone(), c.clone(), 1, 1, -1);
        let f = FiniteFamily::coalgebra_from_unshifted(StructureKind::CinfCoalgebra, &c, &[c1, c2])
            .unwrap();
        (c, f)
    }

    fn policy() -> TruncationPolicy {
        TruncationPolicy::new(8, 8).unwrap()
    }

    #[test]
    fn strict_s2_passes() {
        let (_, f) = s2_coalgebra(Perturb::None);
        assert!(check_ainf(&f, &policy()).unwrap().passes());
        assert!(check_cinfty(&f, &policy()).passes());
    }

    #[test]
    fn perturbed_s2_fails_in_arity_three() {
        let (_, f) = s2_coalgebra(Perturb::DoubleRightLeg);
        let r = check_ainf(&f, &policy()).unwrap();
        assert_eq!(r.defects.len(), 1);
        assert_eq!(r.defects[0].arity, 3);
        assert_eq!(r.defects[0].input, vec![1]);
    }

    #[test]
    fn one_sided_coproduct_is_coassociative_but_not_cocommutative() {
        let (_, f) = s2_coalgebra(Perturb::DropRightLeg);
        assert!(check_ainf(&f, &policy()).unwrap().passes());
        let r = check_cinfty(&f, &policy());
        assert_eq!(r.defects.len(), 1);
        assert_eq!(r.defects[0].arity, 2);
    }

    #[test]
    fn cyclic_and_dual_on_s2() {
        let (c, f) = s2_coalgebra(Perturb::None);
        let p = Pairing::new(c.clone(), &[(0, 1, q(1))]).unwrap();
        assert!(check_cyclic(&f, &p).unwrap().passes());
        let a = pair_to_algebra(&f, &p).unwrap();
        assert!(check_ainf(&a, &policy()).unwrap().passes());
        assert!(check_cinfty(&a, &policy()).passes());
        let back = algebra_to_coalgebra(&a, &p, f.kind).unwrap();
        assert_eq!(back.maps(), f.maps());
    }

    #[test]
    fn degenerate_pairing_rejected() {
        let c = GradedSpace::new("C", &[("e0", 0), ("e2", 2)]).unwrap();
        assert_eq!(
            Pairing::new(c, &[(0, 1, q(1)), (1, 1, q(1))]).unwrap_err(),
            StructureError::PairingDegree
        );
        let c = GradedSpace::new("C", &[("e0", 0), ("e2", 2)]).unwrap();
        assert_eq!(
            Pairing::new(c, &[(0, 1, q(0))]).unwrap_err(),
            StructureError::DegeneratePairing
        );
    }

    #[test]
    fn dual_algebra_is_ainf() {
        for (c, f, p) in [
            crate::test_fixtures::s2(),
            crate::test_fixtures::s3(),
            crate::test_fixtures::cp2(),
        ] {
            let d = dual_algebra(&f).unwrap();
            assert!(check_ainf(&d, &policy()).unwrap().passes(), "{:?}", c);
            let a = pair_to_algebra(&f, &p).unwrap();
            assert!(check_ainf(&a, &policy()).unwrap().passes(), "{:?}", c);
            assert_eq!(
                algebra_to_coalgebra(&a, &p, f.kind).unwrap().maps(),
                f.maps()
            );
        }
    }
}
