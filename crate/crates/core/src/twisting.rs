//! Twisting cochains `C → H`, their Maurer–Cartan equation in the convolution algebra,
//! the equivalent multiplicative-extension chain map, and pushforward along A∞ morphisms.
//!
//! A cochain is stored desuspended: `τ̃(b̃_x) ∈ H` with `|τ̃(b̃_x)| = |b_x| − 1`, so `τ̃`
//! has degree 0 and never contributes Koszul signs.

use std::collections::BTreeMap;

use crate::free_objects::{self, TruncationPolicy, Word};
use crate::graded_core::{GradedError, GradedMap, GradedSpace, Lin};
use crate::homotopy_structures::{
    check_ainf, coderivation_on_word, hom_convolution, words_of_weight, Defect, DefectReport,
    FiniteFamily, StructureError, StructureFamily,
};
use crate::hopf::HopfAlgebra;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetKind {
    TensorAlgebra,
    Hopf,
    Lie,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TwistingError {
    #[error("twisting cochain must have degree -1; value on `{0}` has the wrong degree")]
    WrongDegree(String),
    #[error("twisting cochain must vanish in degrees <= 1, but is nonzero on `{0}`")]
    LowDegree(String),
    #[error("expected {expected} values, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("Lie-mode extension requires a cochain with primitive image")]
    NotPrimitive,
    #[error("input is not verified: {0}")]
    Unverified(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Graded(#[from] GradedError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwistingCochain {
    pub source: GradedSpace,
    values: Vec<Lin<Word>>,
    pub primitive_image: bool,
    pub target_kind: TargetKind,
}

impl TwistingCochain {
    /// `values[x]` is the image of the basis element `x` of the unshifted source.
    pub fn new(
        source: &GradedSpace,
        target: &HopfAlgebra,
        values: Vec<Lin<Word>>,
        target_kind: TargetKind,
    ) -> Result<Self, TwistingError> {
        if values.len() != source.dim() {
            return Err(TwistingError::LengthMismatch {
                expected: source.dim(),
                found: values.len(),
            });
        }
        for (x, v) in values.iter().enumerate() {
            let name = source.element_name(x).to_string();
            if v.keys().any(|h| target.degree(h) != source.degree(x) - 1) {
                return Err(TwistingError::WrongDegree(name));
            }
            if source.degree(x) <= 1 && !v.is_zero() {
                return Err(TwistingError::LowDegree(name));
            }
        }
        let primitive_image = values.iter().all(|v| target.is_primitive(v));
        Ok(TwistingCochain {
            source: source.clone(),
            values,
            primitive_image,
            target_kind,
        })
    }

    pub fn zero(source: &GradedSpace, target: &HopfAlgebra, target_kind: TargetKind) -> Self {
        TwistingCochain::new(source, target, vec![Lin::zero(); source.dim()], target_kind)
            .expect("zero cochain is valid")
    }

    pub fn value(&self, x: usize) -> &Lin<Word> {
        &self.values[x]
    }

    pub fn values(&self) -> &[Lin<Word>] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct McEntry {
    pub element: usize,
    /// Value of `m_n(τ, …, τ)` on the element, for each arity `n` that contributes.
    pub terms: BTreeMap<usize, Lin<Word>>,
    pub total: Lin<Word>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaurerCartanReport {
    pub entries: Vec<McEntry>,
}

impl MaurerCartanReport {
    pub fn passes(&self) -> bool {
        self.entries.iter().all(|e| e.total.is_zero())
    }

    pub fn defect(&self, x: usize) -> Lin<Word> {
        self.entries
            .iter()
            .find(|e| e.element == x)
            .map(|e| e.total.clone())
            .unwrap_or_default()
    }
}

/// Evaluates `Σ_n m_n^Hom(τ, …, τ)` on every basis element of weight ≤ D, with arities
/// up to the policy word length.
pub fn check_maurer_cartan(
    tau: &TwistingCochain,
    c: &FiniteFamily,
    h: &HopfAlgebra,
    policy: &TruncationPolicy,
) -> Result<MaurerCartanReport, TwistingError> {
    let hom = hom_convolution(c, h)?;
    let t = hom.element_from_map(tau.values());
    let top = c.max_arity().min(policy.max_word_length);
    let mut entries = Vec::new();
    let per_arity: Vec<_> = (1..=top).map(|n| (n, hom.power_sum(&t, n..=n))).collect();
    for x in c.basis(policy) {
        let mut terms = BTreeMap::new();
        let mut total = Lin::zero();
        for (n, value) in &per_arity {
            let v = hom.evaluate(value, x);
            if !v.is_zero() {
                total.add_assign(&v);
                terms.insert(*n, v);
            }
        }
        entries.push(McEntry {
            element: x,
            terms,
            total,
        });
    }
    Ok(MaurerCartanReport { entries })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtensionMode {
    Assoc,
    Lie,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MorphismReport {
    pub mode: ExtensionMode,
    /// Number of inputs (words or Lie basis elements) evaluated.
    pub checked: usize,
    /// Inputs where `∂_H ∘ F − F ∘ D` is nonzero, with the value.
    pub defects: Vec<(Word, Lin<Word>)>,
    /// Lie mode: inputs whose image is not primitive.
    pub non_primitive: Vec<Word>,
}

impl MorphismReport {
    pub fn passes(&self) -> bool {
        self.defects.is_empty() && self.non_primitive.is_empty()
    }
}

/// Multiplicative extension `τ_T(x_1 ⋯ x_n) = τ̃(x_1) ⋯ τ̃(x_n)`; the empty word maps to 1.
pub fn extend_multiplicatively(tau: &TwistingCochain, h: &HopfAlgebra, w: &[usize]) -> Lin<Word> {
    let mut acc = Lin::basis(Vec::new());
    for &x in w {
        acc = h.mul(&acc, tau.value(x));
        if acc.is_zero() {
            break;
        }
    }
    acc
}

/// Extends `τ` to the tensor algebra (or the free Lie algebra) on `C̃` and measures the
/// failure to commute with the differentials on every input within the policy.
pub fn cochain_to_morphism(
    tau: &TwistingCochain,
    c: &FiniteFamily,
    h: &HopfAlgebra,
    mode: ExtensionMode,
    policy: &TruncationPolicy,
) -> Result<MorphismReport, TwistingError> {
    if mode == ExtensionMode::Lie && !tau.primitive_image {
        return Err(TwistingError::NotPrimitive);
    }
    let ext = |x: &Lin<Word>| x.apply(|w| extend_multiplicatively(tau, h, w));
    let inputs: Vec<Lin<Word>> = match mode {
        ExtensionMode::Assoc => {
            let letters = c.basis(policy);
            let mut out = vec![Lin::basis(Vec::new())];
            for len in 1..=policy.max_word_length {
                for w in words_of_weight(c, &letters, len, policy.max_total_degree) {
                    out.push(Lin::basis(w));
                }
            }
            out
        }
        ExtensionMode::Lie => {
            // Lie words in C̃, bounded by the unshifted weight of their letters
            let degs = c.space.degrees();
            let bound = TruncationPolicy {
                max_total_degree: i64::MAX / 4,
                max_word_length: policy.max_word_length,
            };
            free_objects::lyndon_basis(degs, &bound)
                .into_iter()
                .filter(|b| {
                    let letters = b.word.letters();
                    let wt: i64 = letters.iter().map(|&l| c.weight(&l)).sum();
                    wt <= policy.max_total_degree
                })
                .map(|b| free_objects::lie_to_tensor(&b.word, degs))
                .collect()
        }
    };
    let mut report = MorphismReport {
        mode,
        checked: 0,
        defects: Vec::new(),
        non_primitive: Vec::new(),
    };
    for x in inputs {
        report.checked += 1;
        let image = ext(&x);
        let mut defect = h.diff(&image);
        let dx = x.apply(|w| coderivation_on_word(c, w));
        defect.sub_assign(&ext(&dx));
        let label = x.keys().next().cloned().unwrap_or_default();
        if !defect.is_zero() {
            report.defects.push((label.clone(), defect));
        }
        if mode == ExtensionMode::Lie && !h.is_primitive(&image) {
            report.non_primitive.push(label);
        }
    }
    Ok(report)
}

/// A∞ morphism `{f_n}` between finite algebra families; `f_n` has shifted degree 0.
#[derive(Clone, Debug, PartialEq)]
pub struct AinfMorphism {
    pub source: FiniteFamily,
    pub target: FiniteFamily,
    maps: Vec<GradedMap>,
}

impl AinfMorphism {
    /// `maps[n-1]` is `f_n`.
    pub fn new(
        source: FiniteFamily,
        target: FiniteFamily,
        maps: Vec<GradedMap>,
    ) -> Result<Self, TwistingError> {
        for (i, m) in maps.iter().enumerate() {
            if m.arity_in != i + 1 || m.arity_out != 1 || m.degree != 0 {
                return Err(TwistingError::Unverified(format!(
                    "morphism component {} must be an arity-{} map of degree 0",
                    i + 1,
                    i + 1
                )));
            }
        }
        Ok(AinfMorphism {
            source,
            target,
            maps,
        })
    }

    pub fn identity(a: &FiniteFamily) -> Self {
        AinfMorphism {
            source: a.clone(),
            target: a.clone(),
            maps: vec![GradedMap::identity(&a.space)],
        }
    }

    fn f(&self, n: usize, w: &[usize]) -> Lin<Vec<usize>> {
        self.maps.get(n - 1).map(|m| m.eval(w)).unwrap_or_default()
    }

    /// `Σ_{i_1+…+i_r = N} f_{i_1}(…) ⊗ … ⊗ f_{i_r}(…)` over compositions of the word.
    fn apply_tensor_powers(&self, w: &[usize]) -> Lin<Vec<usize>> {
        let n = w.len();
        let mut out = Lin::zero();
        if n == 0 {
            return Lin::basis(Vec::new());
        }
        for first in 1..=n.min(self.maps.len()) {
            let head = self.f(first, &w[..first]);
            if head.is_zero() {
                continue;
            }
            let tail = self.apply_tensor_powers(&w[first..]);
            out.add_assign(&crate::graded_core::bilinear(&head, &tail, |a, b| {
                let mut v = a.clone();
                v.extend_from_slice(b);
                Lin::basis(v)
            }));
        }
        out
    }

    /// `Σ_n f_n(x, …, x)` for an element `x` of the source.
    pub fn push(&self, x: &Lin<usize>) -> Lin<usize> {
        let mut out = Lin::zero();
        let mut power: Lin<Vec<usize>> = Lin::basis(Vec::new());
        for n in 1..=self.maps.len() {
            power = crate::graded_core::bilinear(&power, x, |w, k| {
                let mut v = w.clone();
                v.push(*k);
                Lin::basis(v)
            });
            for (w, c) in power.iter() {
                out.add_scaled(&self.f(n, w).map_keys(|v| v[0]), c);
            }
        }
        out
    }
}

/// Morphism identities `Σ f(1^j ⊗ m ⊗ 1^l) = Σ m(f ⊗ … ⊗ f)` on words within the policy.
pub fn check_morphism(f: &AinfMorphism, policy: &TruncationPolicy) -> DefectReport<usize> {
    let a = &f.source;
    let b = &f.target;
    let mut report = DefectReport {
        checked: 0,
        defects: Vec::new(),
    };
    let letters = a.basis(policy);
    for len in 1..=policy.max_word_length {
        for w in words_of_weight(a, &letters, len, policy.max_total_degree) {
            report.checked += 1;
            let mut value = Lin::zero();
            let inner = crate::homotopy_structures::algebra_differential_on_word(a, &w);
            for (v, c) in inner.iter() {
                value.add_scaled(&f.f(v.len(), v), c);
            }
            for (v, c) in f.apply_tensor_powers(&w).iter() {
                value.add_scaled(&b.op(v.len(), v), &-c.clone());
            }
            if !value.is_zero() {
                report.defects.push(Defect {
                    arity: len,
                    input: w,
                    value,
                });
            }
        }
    }
    report
}

/// `Σ_n m_n(x, …, x)` in a finite algebra family.
pub fn mc_defect(a: &FiniteFamily, x: &Lin<usize>) -> Lin<usize> {
    let mut out = Lin::zero();
    let mut power: Lin<Vec<usize>> = Lin::basis(Vec::new());
    for n in 1..=a.max_arity() {
        power = crate::graded_core::bilinear(&power, x, |w, k| {
            let mut v = w.clone();
            v.push(*k);
            Lin::basis(v)
        });
        for (w, c) in power.iter() {
            out.add_scaled(&a.op(n, w).map_keys(|v| v[0]), c);
        }
    }
    out
}

/// Pushes a Maurer–Cartan element of degree 0 along a verified A∞ morphism.
pub fn pushforward_mc(
    tau: &Lin<usize>,
    f: &AinfMorphism,
    policy: &TruncationPolicy,
) -> Result<Lin<usize>, TwistingError> {
    if tau.keys().any(|&k| f.source.space.degree(k) != 0) {
        return Err(TwistingError::Unverified(
            "element is not of degree 0".into(),
        ));
    }
    if !mc_defect(&f.source, tau).is_zero() {
        return Err(TwistingError::Unverified(
            "element is not Maurer-Cartan".into(),
        ));
    }
    for fam in [&f.source, &f.target] {
        if !check_ainf(fam, policy)?.passes() {
            return Err(TwistingError::Unverified(
                "algebra fails the A∞ identities".into(),
            ));
        }
    }
    if !check_morphism(f, policy).passes() {
        return Err(TwistingError::Unverified("morphism identities fail".into()));
    }
    Ok(f.push(tau))
}
