//! Twisted A∞ coalgebras and algebras on `C ⊗ H`.
//!
//! Elements are keys `(x, h)`: a basis index of `C` and a normal-form word of `H`. The
//! coalgebra lives on `C̃ ⊗ H` and the algebra on `W ⊗ H`, where `W` carries the dual
//! algebra from [`pair_to_algebra`]. Both use the same index set, and the algebra's
//! differential is the coalgebra's arity-one map read on the same keys.

use crate::free_objects::{self, nested_bracket_with, TruncationPolicy, Word};
use crate::graded_core::{GradedMap, Lin, Sign};
use crate::homotopy_structures::{
    check_ainf, pair_to_algebra, symmetrize_to_linf, words_of_weight, Defect, DefectReport,
    FiniteFamily, Pairing, StructureError, StructureFamily, StructureKind,
};
use crate::hopf::HopfAlgebra;
use crate::twisting::{check_maurer_cartan, TargetKind, TwistingCochain, TwistingError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ActionKind {
    LeftMult,
    Bracket,
    Conjugation,
}

impl ActionKind {
    pub fn label(self) -> &'static str {
        match self {
            ActionKind::LeftMult => "left",
            ActionKind::Bracket => "bracket",
            ActionKind::Conjugation => "conjugation",
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("twisting cochain fails the Maurer-Cartan equation on `{0}`")]
    MaurerCartan(String),
    #[error("the {0} action requires a twisting cochain with primitive image")]
    NotPrimitive(&'static str),
    #[error("left multiplication is not a derivation of the product; use bracket or conjugation")]
    LeftMultAlgebra,
    #[error("arity-{arity} relation fails on {input}")]
    Relation { arity: usize, input: String },
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Twisting(#[from] TwistingError),
}

pub type TensorKey = (usize, Word);

fn word_action(h: &HopfAlgebra, kind: ActionKind, a: &[usize], x: &[usize]) -> Lin<Word> {
    let (la, lx) = (Lin::basis(a.to_vec()), Lin::basis(x.to_vec()));
    match kind {
        ActionKind::LeftMult => h.mul(&la, &lx),
        ActionKind::Bracket => h.bracket(&la, h.degree(a), &lx, h.degree(x)),
        ActionKind::Conjugation => {
            let mut out = Lin::zero();
            for ((a1, a2), c) in h.coproduct_word(a).iter() {
                let s = Sign::koszul(h.degree(a2), h.degree(x));
                let left = h.mul(&Lin::basis(a1.clone()), &lx);
                let t = h.mul(&left, &h.antipode_word(a2));
                out.add_scaled(&t, &(c * s.to_q()));
            }
            out
        }
    }
}

/// Left multiplication `ax`, bracket `ax − (−1)^{|a||x|} xa`, or conjugation
/// `Σ ± a₁ x s(a₂)`, extended bilinearly over words.
pub fn hopf_action(h: &HopfAlgebra, kind: ActionKind, a: &Lin<Word>, x: &Lin<Word>) -> Lin<Word> {
    crate::graded_core::bilinear(a, x, |u, v| word_action(h, kind, u, v))
}

/// How the trailing `τ`-legs of `c_n` act on the H-factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LegRule {
    /// `τ(y_{k+1}) · (τ(y_{k+2}) · ( … · h))`, the action of the product of the legs.
    IteratedAction,
    /// A single right-nested bracket of the legs, then one action.
    NestedBracket,
    /// Unsigned sum of right-nested brackets over all orderings of the legs, then one action.
    PermutedBracket,
}

/// Which output legs of `c_n` are kept as C-legs of `c_k^τ`; the rest become `τ`-legs,
/// each acting on the H-factor of some kept leg to its left.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LegPlacement {
    /// Kept legs at any positions `1 = p_1 < … < p_k`.
    Interleaved,
    /// Kept legs are the first `k`.
    Trailing,
}

/// For each non-kept leg, the index of a kept leg to its left whose H-factor it acts on;
/// all such assignments.
fn leg_owners(n: usize, kept: &[usize]) -> Vec<Vec<Option<usize>>> {
    let mut out: Vec<Vec<Option<usize>>> = vec![Vec::new()];
    for j in 0..n {
        let choices: Vec<Option<usize>> = match kept.iter().position(|&p| p == j) {
            Some(_) => vec![None],
            None => (0..kept.len()).filter(|&i| kept[i] < j).map(Some).collect(),
        };
        out = out
            .into_iter()
            .flat_map(|v| {
                choices.iter().map(move |c| {
                    let mut v = v.clone();
                    v.push(*c);
                    v
                })
            })
            .collect();
    }
    out
}

/// 0-based kept positions, the first always 0.
fn kept_positions(n: usize, k: usize, placement: LegPlacement) -> Vec<Vec<usize>> {
    match placement {
        LegPlacement::Trailing => vec![(0..k).collect()],
        LegPlacement::Interleaved => {
            let mut out = Vec::new();
            let mut cur = vec![0];
            fn rec(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
                if cur.len() == k {
                    out.push(cur.clone());
                    return;
                }
                let start = cur.last().unwrap() + 1;
                for p in start..n {
                    cur.push(p);
                    rec(n, k, cur, out);
                    cur.pop();
                }
            }
            rec(n, k, &mut cur, &mut out);
            out
        }
    }
}

/// The twisted A∞ coalgebra `{∂_τ, c_2^τ, …}` on `C̃ ⊗ H`.
#[derive(Clone, Debug)]
pub struct TwistedCoalgebra {
    pub base: FiniteFamily,
    pub hopf: HopfAlgebra,
    pub tau: TwistingCochain,
    pub action: ActionKind,
    pub leg_rule: LegRule,
    pub placement: LegPlacement,
    pub policy: TruncationPolicy,
}

/// `C ⊗ H` with `c_n ⊗ Δ^{(n)}` and the tensor differential.
pub fn untwisted_tensor_coalgebra(
    base: &FiniteFamily,
    hopf: &HopfAlgebra,
    policy: &TruncationPolicy,
) -> TwistedCoalgebra {
    TwistedCoalgebra {
        base: base.clone(),
        hopf: hopf.clone(),
        tau: TwistingCochain::zero(
            &base.space.shift(-base.space.offset),
            hopf,
            TargetKind::Hopf,
        ),
        action: ActionKind::LeftMult,
        leg_rule: LegRule::IteratedAction,
        placement: LegPlacement::Interleaved,
        policy: *policy,
    }
}

fn require_mc(
    tau: &TwistingCochain,
    base: &FiniteFamily,
    hopf: &HopfAlgebra,
    policy: &TruncationPolicy,
) -> Result<(), BuildError> {
    let report = check_maurer_cartan(tau, base, hopf, policy)?;
    if let Some(e) = report.entries.iter().find(|e| !e.total.is_zero()) {
        return Err(BuildError::MaurerCartan(
            base.space.element_name(e.element).to_string(),
        ));
    }
    Ok(())
}

/// Builds `{∂_τ, c_n^τ}` after checking the Maurer–Cartan equation, and primitivity of
/// `τ` for the bracket and conjugation actions.
pub fn build_twisted_coalgebra(
    base: &FiniteFamily,
    hopf: &HopfAlgebra,
    tau: &TwistingCochain,
    action: ActionKind,
    policy: &TruncationPolicy,
) -> Result<TwistedCoalgebra, BuildError> {
    require_mc(tau, base, hopf, policy)?;
    if action != ActionKind::LeftMult && !tau.primitive_image {
        return Err(BuildError::NotPrimitive(action.label()));
    }
    Ok(TwistedCoalgebra {
        base: base.clone(),
        hopf: hopf.clone(),
        tau: tau.clone(),
        action,
        leg_rule: LegRule::IteratedAction,
        placement: LegPlacement::Interleaved,
        policy: *policy,
    })
}

impl TwistedCoalgebra {
    /// Applies the `τ`-legs to `h` according to the leg rule.
    fn act_legs(&self, legs: &[usize], h: &Word) -> Lin<Word> {
        let hop = &self.hopf;
        let mut vals = Vec::with_capacity(legs.len());
        for &y in legs {
            let v = self.tau.value(y);
            if v.is_zero() {
                return Lin::zero();
            }
            vals.push((v.clone(), self.base.space.degree(y)));
        }
        let x = Lin::basis(h.clone());
        if vals.is_empty() {
            return x;
        }
        let bracket = |p: &Lin<Word>, dp: i64, q: &Lin<Word>, dq: i64| hop.bracket(p, dp, q, dq);
        match self.leg_rule {
            LegRule::IteratedAction => vals
                .iter()
                .rev()
                .fold(x, |acc, (v, _)| hopf_action(hop, self.action, v, &acc)),
            LegRule::NestedBracket => {
                hopf_action(hop, self.action, &nested_bracket_with(&vals, &bracket), &x)
            }
            LegRule::PermutedBracket => {
                let mut sum = Lin::zero();
                for perm in crate::graded_core::permutations(vals.len()) {
                    let permuted: Vec<_> = perm.iter().map(|&i| vals[i].clone()).collect();
                    sum.add_assign(&nested_bracket_with(&permuted, &bracket));
                }
                hopf_action(hop, self.action, &sum, &x)
            }
        }
    }

    /// The arity-one map; shared verbatim by the twisted algebra.
    pub fn differential(&self, key: &TensorKey) -> Lin<TensorKey> {
        self.op(1, std::slice::from_ref(key))
            .map_keys(|v| v[0].clone())
    }

    pub fn complex_degree(&self, key: &TensorKey) -> i64 {
        self.weight(key)
    }
}

impl StructureFamily for TwistedCoalgebra {
    type Key = TensorKey;

    fn kind(&self) -> StructureKind {
        StructureKind::AinfCoalgebra
    }

    fn max_arity(&self) -> usize {
        self.base.max_arity()
    }

    fn degree(&self, key: &TensorKey) -> i64 {
        self.base.space.degree(key.0) + self.hopf.degree(&key.1)
    }

    fn weight(&self, key: &TensorKey) -> i64 {
        self.base.weights()[key.0] + self.hopf.degree(&key.1)
    }

    fn op(&self, k: usize, input: &[TensorKey]) -> Lin<Vec<TensorKey>> {
        let mut out = Lin::zero();
        if input.len() != 1 || k == 0 {
            return out;
        }
        let (x, h) = &input[0];
        let hop = &self.hopf;
        let parts_of_h = hop.iterated_coproduct_word(h, k);
        for n in k..=self.base.max_arity() {
            for (ys, c) in self.base.op(n, &[*x]).iter() {
                let mut degs: Vec<i64> = ys.iter().map(|&y| self.base.space.degree(y)).collect();
                for kept in kept_positions(n, k, self.placement) {
                    for owner in leg_owners(n, &kept) {
                        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); k];
                        for (j, o) in owner.iter().enumerate() {
                            if let Some(i) = o {
                                groups[*i].push(j);
                            }
                        }
                        for (parts, c2) in parts_of_h.iter() {
                            degs.truncate(n);
                            degs.extend(parts.iter().map(|w| hop.degree(w)));
                            let mut order = Vec::with_capacity(n + k);
                            for i in 0..k {
                                order.push(kept[i]);
                                order.extend(&groups[i]);
                                order.push(n + i);
                            }
                            let sign = crate::graded_core::reorder_sign(&order, &degs);
                            let mut acted: Lin<Vec<Word>> = Lin::basis(Vec::new());
                            for i in 0..k {
                                let legs: Vec<usize> = groups[i].iter().map(|&j| ys[j]).collect();
                                let hi = self.act_legs(&legs, &parts[i]);
                                acted = crate::graded_core::bilinear(&acted, &hi, |v, w| {
                                    let mut v = v.clone();
                                    v.push(w.clone());
                                    Lin::basis(v)
                                });
                                if acted.is_zero() {
                                    break;
                                }
                            }
                            let coeff = sign.to_q() * c * c2;
                            for (hs, c3) in acted.iter() {
                                let word: Vec<TensorKey> =
                                    (0..k).map(|i| (ys[kept[i]], hs[i].clone())).collect();
                                out.add_term(word, &coeff * c3);
                            }
                        }
                    }
                }
            }
        }
        if k == 1 {
            let s = Sign::from_parity(self.base.space.degree(*x));
            for (dh, c) in hop.diff_word(h).iter() {
                out.add_signed(vec![(*x, dh.clone())], c, s);
            }
        }
        out
    }

    fn basis(&self, policy: &TruncationPolicy) -> Vec<TensorKey> {
        let words = self.hopf.basis_within(policy);
        let mut out = Vec::new();
        for x in 0..self.base.space.dim() {
            for h in &words {
                let k = (x, h.clone());
                if self.weight(&k) <= policy.max_total_degree {
                    out.push(k);
                }
            }
        }
        out
    }

    fn key_name(&self, key: &TensorKey) -> String {
        format!(
            "{}⊗{}",
            self.base.space.element_name(key.0),
            self.hopf.word_name(&key.1)
        )
    }
}

/// Classical twisted differential on unshifted data,
/// `∂(x⊗h) = ∂x⊗h + (−1)^{|x|} x⊗∂h + Σ (−1)^{|x'|} x'⊗τ(x'')h`, for a strict coalgebra
/// given by its unshifted differential and coproduct. `h_sign` scales the H differential.
pub fn classical_twisted_differential(
    differential: &GradedMap,
    coproduct: &GradedMap,
    hopf: &HopfAlgebra,
    tau: &TwistingCochain,
    h_sign: Sign,
    key: &TensorKey,
) -> Lin<TensorKey> {
    let (x, h) = key;
    let space = &differential.source;
    let mut out = Lin::zero();
    for (y, c) in differential.eval(&[*x]).iter() {
        out.add_term((y[0], h.clone()), c.clone());
    }
    let s = Sign::from_parity(space.degree(*x)) * h_sign;
    for (dh, c) in hopf.diff_word(h).iter() {
        out.add_signed((*x, dh.clone()), c, s);
    }
    for (pair, c) in coproduct.eval(&[*x]).iter() {
        let (x1, x2) = (pair[0], pair[1]);
        let prod = hopf.mul(tau.value(x2), &Lin::basis(h.clone()));
        let s = Sign::from_parity(space.degree(x1));
        for (hp, d) in prod.iter() {
            out.add_signed((x1, hp.clone()), &(c * d), s);
        }
    }
    out
}

/// Compares the arity-one map of a family built from a strict coalgebra with the classical
/// formula taken with the negated H differential. Returns the keys where they differ.
pub fn brown_comparison(tc: &TwistedCoalgebra, policy: &TruncationPolicy) -> Vec<TensorKey> {
    let unshifted = tc.base.unshifted_maps();
    let space = tc.base.space.shift(-tc.base.space.offset);
    let zero1 = GradedMap::zero(space.clone(), space.clone(), 1, 1, -1);
    let zero2 = GradedMap::zero(space.clone(), space.clone(), 1, 2, 0);
    let d = unshifted.first().unwrap_or(&zero1);
    let c2 = unshifted.get(1).unwrap_or(&zero2);
    tc.basis(policy)
        .into_iter()
        .filter(|k| {
            let ours = tc.differential(k);
            let theirs = classical_twisted_differential(d, c2, &tc.hopf, &tc.tau, Sign::Minus, k);
            ours != theirs
        })
        .collect()
}

/// The arity-two part of the A∞ relations: `∂_τ` against the twisted coproduct.
pub fn coderivation_defects(
    tc: &TwistedCoalgebra,
    policy: &TruncationPolicy,
) -> Result<Vec<Defect<TensorKey, Lin<Vec<TensorKey>>>>, BuildError> {
    let report = check_ainf(tc, policy)?;
    Ok(report
        .defects
        .into_iter()
        .filter(|d| d.arity == 2)
        .collect())
}

/// The twisted A∞ algebra `{∂_τ, m_2, m_3, …}` on `W ⊗ H`; higher maps are untwisted.
#[derive(Clone, Debug)]
pub struct TwistedAlgebra {
    pub coalgebra: TwistedCoalgebra,
    pub algebra: FiniteFamily,
    pub pairing: Pairing,
}

pub fn build_twisted_algebra(
    base: &FiniteFamily,
    pairing: &Pairing,
    hopf: &HopfAlgebra,
    tau: &TwistingCochain,
    action: ActionKind,
    policy: &TruncationPolicy,
) -> Result<TwistedAlgebra, BuildError> {
    if action == ActionKind::LeftMult {
        return Err(BuildError::LeftMultAlgebra);
    }
    let algebra = pair_to_algebra(base, pairing)?;
    let coalgebra = build_twisted_coalgebra(base, hopf, tau, action, policy)?;
    Ok(TwistedAlgebra {
        coalgebra,
        algebra,
        pairing: pairing.clone(),
    })
}

impl TwistedAlgebra {
    pub fn hopf(&self) -> &HopfAlgebra {
        &self.coalgebra.hopf
    }

    /// Intersection-type degree of a key: `|x| − dim + |h|`.
    pub fn product_degree(&self, key: &TensorKey) -> i64 {
        self.coalgebra.weight(key) - self.pairing.dimension()
    }
}

impl StructureFamily for TwistedAlgebra {
    type Key = TensorKey;

    fn kind(&self) -> StructureKind {
        StructureKind::AinfAlgebra
    }

    fn max_arity(&self) -> usize {
        self.algebra.max_arity().max(1)
    }

    fn degree(&self, key: &TensorKey) -> i64 {
        self.algebra.space.degree(key.0) + self.hopf().degree(&key.1)
    }

    fn weight(&self, key: &TensorKey) -> i64 {
        self.coalgebra.weight(key)
    }

    fn op(&self, n: usize, input: &[TensorKey]) -> Lin<Vec<TensorKey>> {
        if input.len() != n || n == 0 {
            return Lin::zero();
        }
        if n == 1 {
            return self.coalgebra.op(1, input);
        }
        let h = self.hopf();
        let mut out = Lin::zero();
        let ws: Vec<usize> = input.iter().map(|k| k.0).collect();
        let mw = self.algebra.op(n, &ws);
        if mw.is_zero() {
            return out;
        }
        let wdeg: Vec<i64> = ws.iter().map(|&w| self.algebra.space.degree(w)).collect();
        let mut e = 0i64;
        for j in 0..n {
            let dh = h.degree(&input[j].1);
            e += dh * wdeg[j + 1..].iter().sum::<i64>();
        }
        let rearr = Sign::from_parity(e);
        let mut prod = Lin::basis(Vec::new());
        for k in input {
            prod = h.mul(&prod, &Lin::basis(k.1.clone()));
            if prod.is_zero() {
                return out;
            }
        }
        for (y, c) in mw.iter() {
            for (hw, d) in prod.iter() {
                out.add_signed(vec![(y[0], hw.clone())], &(c * d), rearr);
            }
        }
        out
    }

    fn basis(&self, policy: &TruncationPolicy) -> Vec<TensorKey> {
        self.coalgebra.basis(policy)
    }

    fn key_name(&self, key: &TensorKey) -> String {
        self.coalgebra.key_name(key)
    }
}

/// Arity-two Stasheff relation: `∂_τ` is a derivation of `m_2`.
pub fn derivation_defects(
    alg: &TwistedAlgebra,
    policy: &TruncationPolicy,
) -> DefectReport<TensorKey> {
    let mut report = DefectReport {
        checked: 0,
        defects: Vec::new(),
    };
    let basis = alg.basis(policy);
    for w in words_of_weight(alg, &basis, 2, policy.max_total_degree) {
        report.checked += 1;
        let mut value = Lin::zero();
        let once = crate::homotopy_structures::algebra_differential_on_word(alg, &w);
        for (v, c) in once.iter() {
            if v.len() <= 2 {
                value.add_scaled(&alg.op(v.len(), v), c);
            }
        }
        if !value.is_zero() {
            report.defects.push(Defect {
                arity: 2,
                input: w,
                value,
            });
        }
    }
    report
}

/// Result of restricting the symmetrized algebra to `C ⊗ Prim(H)`.
#[derive(Clone, Debug)]
pub struct LinfRestriction {
    pub checked: usize,
    /// Inputs (as indices into the primitive generators) whose bracket has a
    /// non-primitive H-leg.
    pub failures: Vec<Vec<usize>>,
    pub generators: Vec<Lin<TensorKey>>,
}

impl LinfRestriction {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Multilinear evaluation of an operation on linear combinations.
pub fn eval_multilinear<S: StructureFamily>(s: &S, args: &[Lin<S::Key>]) -> Lin<S::Key> {
    let mut words: Lin<Vec<S::Key>> = Lin::basis(Vec::new());
    for a in args {
        words = crate::graded_core::bilinear(&words, a, |w, k| {
            let mut v = w.clone();
            v.push(k.clone());
            Lin::basis(v)
        });
    }
    let mut out = Lin::zero();
    for (w, c) in words.iter() {
        out.add_scaled(&s.op(args.len(), w).map_keys(|v| v[0].clone()), c);
    }
    out
}

fn h_legs_primitive(h: &HopfAlgebra, x: &Lin<TensorKey>) -> bool {
    let mut by_c: std::collections::BTreeMap<usize, Lin<Word>> = Default::default();
    for ((c, w), q) in x.iter() {
        by_c.entry(*c).or_default().add_term(w.clone(), q.clone());
    }
    by_c.values().all(|v| h.is_primitive(v))
}

/// Symmetrizes the twisted algebra and checks that brackets of elements `w ⊗ p`, with `p`
/// running over a free-Lie basis of primitives, keep every H-leg primitive. All input
/// tuples of each arity are evaluated (including `l_1 = ∂_τ`).
pub fn restrict_linf_to_primitives(
    alg: &TwistedAlgebra,
    policy: &TruncationPolicy,
) -> Result<LinfRestriction, BuildError> {
    let h = alg.hopf().clone();
    let lin = symmetrize_to_linf(alg.clone())?;
    let prims: Vec<(Lin<Word>, i64)> = free_objects::lyndon_basis(h.degrees(), policy)
        .iter()
        .map(|b| (free_objects::lie_to_tensor(&b.word, h.degrees()), b.degree))
        .collect();
    let mut generators = Vec::new();
    let mut weights = Vec::new();
    for x in 0..alg.algebra.space.dim() {
        for (p, d) in &prims {
            let wt = alg.coalgebra.base.weights()[x] + d;
            if wt <= policy.max_total_degree {
                generators.push(p.map_keys(|w| (x, w.clone())));
                weights.push(wt);
            }
        }
    }
    let mut out = LinfRestriction {
        checked: 0,
        failures: Vec::new(),
        generators: generators.clone(),
    };
    let max_n = alg.max_arity();
    let mut tuples: Vec<(Vec<usize>, i64)> = vec![(Vec::new(), 0)];
    for _ in 1..=max_n {
        tuples = tuples
            .into_iter()
            .flat_map(|(t, wt)| {
                let weights = &weights;
                (0..weights.len()).filter_map(move |i| {
                    let nw = wt + weights[i];
                    (nw <= policy.max_total_degree).then(|| {
                        let mut v = t.clone();
                        v.push(i);
                        (v, nw)
                    })
                })
            })
            .collect();
        for (t, _) in &tuples {
            out.checked += 1;
            let args: Vec<Lin<TensorKey>> = t.iter().map(|&i| generators[i].clone()).collect();
            let value = eval_multilinear(&lin, &args);
            if !h_legs_primitive(&h, &value) {
                out.failures.push(t.clone());
            }
        }
    }
    Ok(out)
}

/// True iff the two families have identical arity-one maps on every key within the policy.
pub fn same_differential<A, B>(a: &A, b: &B, policy: &TruncationPolicy) -> bool
where
    A: StructureFamily<Key = TensorKey>,
    B: StructureFamily<Key = TensorKey>,
{
    let ka = a.basis(policy);
    if ka != b.basis(policy) {
        return false;
    }
    ka.iter()
        .all(|k| a.op(1, std::slice::from_ref(k)) == b.op(1, std::slice::from_ref(k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_core::q;
    use crate::test_fixtures::*;
    use num_traits::Signed;

    fn policy(d: i64) -> TruncationPolicy {
        TruncationPolicy::new(d, 8).unwrap()
    }

    const ALL: [ActionKind; 3] = [
        ActionKind::LeftMult,
        ActionKind::Bracket,
        ActionKind::Conjugation,
    ];

    fn key(x: usize, h: &[usize]) -> TensorKey {
        (x, h.to_vec())
    }

    fn fixtures() -> Vec<(
        &'static str,
        FiniteFamily,
        Pairing,
        HopfAlgebra,
        TwistingCochain,
    )> {
        let mut out = Vec::new();
        for (name, (c, f, p), h) in [
            ("s2", s2(), tensor(&[("a", 1)])),
            ("s3", s3(), tensor(&[("a", 2)])),
            ("cp2", cp2(), cp2_hopf()),
            ("hopf", s2(), lambda_u()),
            ("s2xs3", s2xs3(), s2xs3_hopf(1)),
        ] {
            let tau = inclusion(&c, &h);
            out.push((name, f, p, h, tau));
        }
        out
    }

    fn non_formal() -> Vec<(&'static str, FiniteFamily, HopfAlgebra, TwistingCochain)> {
        let (c3, f3) = massey();
        let h3 = massey_hopf();
        let (c4, f4) = massey4();
        let h4 = massey4_hopf();
        vec![
            ("massey", f3, h3.clone(), inclusion(&c3, &h3)),
            ("massey4", f4, h4.clone(), inclusion(&c4, &h4)),
        ]
    }

    #[test]
    fn non_formal_twisted_coalgebras_are_ainf() {
        for ((name, f, h, tau), d) in non_formal().into_iter().zip([7, 6]) {
            let pol = policy(d);
            assert!(
                check_maurer_cartan(&tau, &f, &h, &pol).unwrap().passes(),
                "{name}"
            );
            for action in ALL {
                let tc = build_twisted_coalgebra(&f, &h, &tau, action, &pol).unwrap();
                let r = check_ainf(&tc, &pol).unwrap();
                assert!(r.passes(), "{name} {action:?}: {:?}", r.defects.first());
            }
        }
    }

    #[test]
    fn bracketed_or_trailing_legs_break_the_relations() {
        let pol = policy(6);
        let (_, f, h, tau) = non_formal().remove(0);
        let base = build_twisted_coalgebra(&f, &h, &tau, ActionKind::Bracket, &pol).unwrap();
        for (rule, placement, arity) in [
            (LegRule::NestedBracket, LegPlacement::Interleaved, 1),
            (LegRule::PermutedBracket, LegPlacement::Trailing, 1),
            (LegRule::IteratedAction, LegPlacement::Trailing, 2),
        ] {
            let tc = TwistedCoalgebra {
                leg_rule: rule,
                placement,
                ..base.clone()
            };
            let r = check_ainf(&tc, &pol).unwrap();
            assert_eq!(
                r.defects.first().map(|d| d.arity),
                Some(arity),
                "{rule:?} {placement:?}"
            );
        }
    }

    #[test]
    fn twisted_coalgebras_are_ainf() {
        for (name, f, _, h, tau) in fixtures() {
            for action in ALL {
                let tc = build_twisted_coalgebra(&f, &h, &tau, action, &policy(8)).unwrap();
                let r = check_ainf(&tc, &policy(8)).unwrap();
                assert!(r.passes(), "{name} {action:?}: {:?}", r.defects.first());
            }
        }
    }

    #[test]
    fn twisted_algebras_are_ainf() {
        for (name, f, p, h, tau) in fixtures() {
            for action in [ActionKind::Bracket, ActionKind::Conjugation] {
                let d = if name == "s2xs3" { 7 } else { 8 };
                let alg = build_twisted_algebra(&f, &p, &h, &tau, action, &policy(d)).unwrap();
                let r = check_ainf(&alg, &policy(d)).unwrap();
                assert!(r.passes(), "{name} {action:?}: {:?}", r.defects.first());
            }
        }
    }

    #[test]
    fn left_mult_algebra_rejected() {
        let (c, f, p) = s2();
        let h = tensor(&[("a", 1)]);
        let tau = inclusion(&c, &h);
        assert_eq!(
            build_twisted_algebra(&f, &p, &h, &tau, ActionKind::LeftMult, &policy(4)).unwrap_err(),
            BuildError::LeftMultAlgebra
        );
    }

    #[test]
    fn left_mult_is_not_a_derivation() {
        let (c, f, p) = s2();
        let h = tensor(&[("a", 1)]);
        let tau = inclusion(&c, &h);
        let pol = policy(6);
        let alg = TwistedAlgebra {
            coalgebra: build_twisted_coalgebra(&f, &h, &tau, ActionKind::LeftMult, &pol).unwrap(),
            algebra: pair_to_algebra(&f, &p).unwrap(),
            pairing: p,
        };
        assert!(!derivation_defects(&alg, &pol).passes());
    }

    #[test]
    fn non_mc_cochain_rejected() {
        let (c, f, _) = cp2();
        let h = tensor(&[("a", 1), ("b", 3)]);
        let tau = inclusion(&c, &h);
        assert_eq!(
            build_twisted_coalgebra(&f, &h, &tau, ActionKind::LeftMult, &policy(8)).unwrap_err(),
            BuildError::MaurerCartan("e4".into())
        );
    }

    #[test]
    fn hopf_left_mult_differential() {
        let (c, f, _) = s2();
        let h = lambda_u();
        let tau = inclusion(&c, &h);
        let tc = build_twisted_coalgebra(&f, &h, &tau, ActionKind::LeftMult, &policy(3)).unwrap();
        let d = tc.differential(&key(1, &[]));
        assert_eq!(d.len(), 1);
        assert_eq!(d.coeff(&key(0, &[0])).abs(), q(1));
        assert!(tc.differential(&key(1, &[0])).is_zero());
    }

    #[test]
    fn bracket_differential_doubles_the_square() {
        let (c, f, _) = s2();
        let h = tensor(&[("a", 1)]);
        let tau = inclusion(&c, &h);
        let tc = build_twisted_coalgebra(&f, &h, &tau, ActionKind::Bracket, &policy(4)).unwrap();
        let d = tc.differential(&key(1, &[0]));
        assert_eq!(d.len(), 1);
        assert_eq!(d.coeff(&key(0, &[0, 0])).abs(), q(2));
    }

    #[test]
    fn tensor_coproduct_on_e2_u_has_four_terms() {
        let (_, f, _) = s2();
        let tc = untwisted_tensor_coalgebra(&f, &lambda_u(), &policy(4));
        let c2 = tc.op(2, &[key(1, &[0])]);
        assert_eq!(c2.len(), 4);
        assert!(c2.iter().all(|(_, c)| c.abs() == q(1)));
    }

    #[test]
    fn strict_inputs_match_classical_formula() {
        for (name, f, _, h, tau) in fixtures() {
            let tc =
                build_twisted_coalgebra(&f, &h, &tau, ActionKind::LeftMult, &policy(8)).unwrap();
            assert!(brown_comparison(&tc, &policy(8)).is_empty(), "{name}");
        }
    }

    #[test]
    fn primitive_twist_gives_coderivation() {
        let (c, f, _) = s2();
        let h = lambda_u();
        let tau = inclusion(&c, &h);
        let tc = build_twisted_coalgebra(&f, &h, &tau, ActionKind::LeftMult, &policy(3)).unwrap();
        assert!(coderivation_defects(&tc, &policy(3)).unwrap().is_empty());
    }

    #[test]
    fn fundamental_class_is_unit() {
        let (c, f, p) = s2();
        let h = tensor(&[("a", 1)]);
        let tau = inclusion(&c, &h);
        let alg =
            build_twisted_algebra(&f, &p, &h, &tau, ActionKind::Conjugation, &policy(8)).unwrap();
        let e2 = key(1, &[]);
        let m = alg.op(2, &[e2.clone(), e2.clone()]);
        assert_eq!(m.len(), 1);
        assert_eq!(m.coeff(&vec![e2]).abs(), q(1));
        assert!(derivation_defects(&alg, &policy(8)).passes());
        assert!(alg.op(2, &[key(0, &[]), key(0, &[])]).is_zero());
    }

    #[test]
    fn shared_differential_between_builders() {
        let (c, f, p) = s2();
        let h = tensor(&[("a", 1)]);
        let tau = inclusion(&c, &h);
        let pol = policy(6);
        let alg = build_twisted_algebra(&f, &p, &h, &tau, ActionKind::Conjugation, &pol).unwrap();
        let co = build_twisted_coalgebra(&f, &h, &tau, ActionKind::Conjugation, &pol).unwrap();
        assert!(same_differential(&alg, &co, &pol));
        let left = build_twisted_coalgebra(&f, &h, &tau, ActionKind::LeftMult, &pol).unwrap();
        let br = build_twisted_coalgebra(&f, &h, &tau, ActionKind::Bracket, &pol).unwrap();
        assert!(!same_differential(&left, &br, &pol));
    }

    #[test]
    fn primitives_closed_under_symmetrized_brackets() {
        let (c, f, p) = s2();
        let h = tensor(&[("a", 1)]);
        let tau = inclusion(&c, &h);
        let pol = TruncationPolicy::new(8, 4).unwrap();
        let alg = build_twisted_algebra(&f, &p, &h, &tau, ActionKind::Bracket, &pol).unwrap();
        let r = restrict_linf_to_primitives(&alg, &pol).unwrap();
        assert!(r.checked > 0);
        assert!(r.passes(), "{:?}", r.failures);
    }

    #[test]
    fn conjugation_by_primitive_is_bracket() {
        let h = tensor(&[("a", 1), ("b", 2)]);
        let a = Lin::basis(vec![0]);
        for w in h.basis_within(&TruncationPolicy::new(4, 3).unwrap()) {
            let x = Lin::basis(w);
            assert_eq!(
                hopf_action(&h, ActionKind::Conjugation, &a, &x),
                hopf_action(&h, ActionKind::Bracket, &a, &x)
            );
        }
    }
}
