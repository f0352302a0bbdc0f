//! Connected Hopf algebras generated by primitive letters: free tensor algebras with a
//! derivation differential, and exterior algebras on odd generators.

use crate::free_objects::{self, word_degree, TruncationPolicy, Word};
use crate::graded_core::{bilinear, q, reorder_sign, GradedSpace, Lin, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HopfKind {
    Tensor,
    Exterior,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HopfAlgebra {
    pub generators: GradedSpace,
    pub kind: HopfKind,
    /// Value of the derivation differential on each generator.
    differential: Vec<Lin<Word>>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum HopfError {
    #[error("exterior generator `{0}` must have odd degree")]
    EvenExteriorGenerator(String),
    #[error("differential of `{0}` has the wrong degree")]
    DifferentialDegree(String),
    #[error("differential of `{0}` is not primitive")]
    NonPrimitiveDifferential(String),
    #[error("differential does not square to zero on `{0}`")]
    NotSquareZero(String),
    #[error("exterior algebras here carry no differential")]
    ExteriorDifferential,
}

impl HopfAlgebra {
    pub fn tensor(generators: GradedSpace) -> Self {
        let n = generators.dim();
        HopfAlgebra {
            generators,
            kind: HopfKind::Tensor,
            differential: vec![Lin::zero(); n],
        }
    }

    pub fn exterior(generators: GradedSpace) -> Result<Self, HopfError> {
        for i in 0..generators.dim() {
            if generators.degree(i).rem_euclid(2) == 0 {
                return Err(HopfError::EvenExteriorGenerator(
                    generators.element_name(i).to_string(),
                ));
            }
        }
        let n = generators.dim();
        Ok(HopfAlgebra {
            generators,
            kind: HopfKind::Exterior,
            differential: vec![Lin::zero(); n],
        })
    }

    /// Installs a derivation differential given on generators, checking degree,
    /// primitivity of the values and `d² = 0` on generators.
    pub fn with_differential(mut self, values: Vec<Lin<Word>>) -> Result<Self, HopfError> {
        if self.kind == HopfKind::Exterior && values.iter().any(|v| !v.is_zero()) {
            return Err(HopfError::ExteriorDifferential);
        }
        let degs = self.generators.degrees().to_vec();
        for (i, v) in values.iter().enumerate() {
            let name = self.generators.element_name(i).to_string();
            if v.keys().any(|w| word_degree(w, &degs) != degs[i] - 1) {
                return Err(HopfError::DifferentialDegree(name));
            }
            if !free_objects::reduced_unshuffle(v, &degs).is_zero() {
                return Err(HopfError::NonPrimitiveDifferential(name));
            }
        }
        self.differential = values;
        for i in 0..self.generators.dim() {
            if !self
                .diff(&Lin::basis(vec![i]))
                .apply(|w| self.diff_word(w))
                .is_zero()
            {
                return Err(HopfError::NotSquareZero(
                    self.generators.element_name(i).to_string(),
                ));
            }
        }
        Ok(self)
    }

    pub fn degrees(&self) -> &[i64] {
        self.generators.degrees()
    }

    pub fn degree(&self, w: &[usize]) -> i64 {
        word_degree(w, self.degrees())
    }

    pub fn generator_differential(&self, i: usize) -> &Lin<Word> {
        &self.differential[i]
    }

    pub fn has_differential(&self) -> bool {
        self.differential.iter().any(|v| !v.is_zero())
    }

    /// Brings a word to normal form: exterior words are sorted, repeated letters vanish.
    pub fn normalize(&self, w: Word) -> Option<(Sign, Word)> {
        match self.kind {
            HopfKind::Tensor => Some((Sign::Plus, w)),
            HopfKind::Exterior => {
                let mut order: Vec<usize> = (0..w.len()).collect();
                order.sort_by_key(|&i| w[i]);
                let sorted: Word = order.iter().map(|&i| w[i]).collect();
                if sorted.windows(2).any(|p| p[0] == p[1]) {
                    return None;
                }
                let degs: Vec<i64> = w.iter().map(|&l| self.degrees()[l]).collect();
                Some((reorder_sign(&order, &degs), sorted))
            }
        }
    }

    pub fn normalize_lin(&self, x: &Lin<Word>) -> Lin<Word> {
        let mut out = Lin::zero();
        for (w, c) in x.iter() {
            if let Some((s, v)) = self.normalize(w.clone()) {
                out.add_signed(v, c, s);
            }
        }
        out
    }

    pub fn mul_words(&self, a: &[usize], b: &[usize]) -> Lin<Word> {
        let mut w = a.to_vec();
        w.extend_from_slice(b);
        match self.normalize(w) {
            Some((s, v)) => Lin::single(v, s.to_q()),
            None => Lin::zero(),
        }
    }

    pub fn mul(&self, x: &Lin<Word>, y: &Lin<Word>) -> Lin<Word> {
        bilinear(x, y, |a, b| self.mul_words(a, b))
    }

    /// `[x, y] = xy - (-1)^{|x||y|} yx` for homogeneous inputs.
    pub fn bracket(&self, x: &Lin<Word>, dx: i64, y: &Lin<Word>, dy: i64) -> Lin<Word> {
        let mut out = self.mul(x, y);
        out.add_scaled(&self.mul(y, x), &-Sign::koszul(dx, dy).to_q());
        out
    }

    pub fn coproduct_word(&self, w: &[usize]) -> Lin<(Word, Word)> {
        free_objects::unshuffle(w, self.degrees())
    }

    pub fn coproduct(&self, x: &Lin<Word>) -> Lin<(Word, Word)> {
        let mut out = Lin::zero();
        for (w, c) in x.iter() {
            out.add_scaled(&self.coproduct_word(w), c);
        }
        out
    }

    /// Iterated coproduct into `k` tensor factors, `k >= 1`.
    pub fn iterated_coproduct_word(&self, w: &[usize], k: usize) -> Lin<Vec<Word>> {
        assert!(k >= 1);
        let n = w.len();
        let degs: Vec<i64> = w.iter().map(|&l| self.degrees()[l]).collect();
        let mut out = Lin::zero();
        let total = k.pow(n as u32);
        for code in 0..total {
            // letter i goes to factor (code / k^i) % k
            let mut slots = vec![Vec::new(); k];
            let mut c = code;
            for i in 0..n {
                slots[c % k].push(i);
                c /= k;
            }
            let order: Vec<usize> = slots.iter().flatten().copied().collect();
            let s = reorder_sign(&order, &degs);
            let parts: Vec<Word> = slots
                .iter()
                .map(|idx| idx.iter().map(|&i| w[i]).collect())
                .collect();
            out.add_signed(parts, &q(1), s);
        }
        out
    }

    pub fn antipode_word(&self, w: &[usize]) -> Lin<Word> {
        let (s, r) = free_objects::antipode(w, self.degrees());
        self.normalize_lin(&Lin::single(r, s.to_q()))
    }

    pub fn antipode(&self, x: &Lin<Word>) -> Lin<Word> {
        x.apply(|w| self.antipode_word(w))
    }

    pub fn diff_word(&self, w: &[usize]) -> Lin<Word> {
        let mut out = Lin::zero();
        let mut passed = 0i64;
        for (i, &l) in w.iter().enumerate() {
            let dl = &self.differential[l];
            if !dl.is_zero() {
                let left = Lin::basis(w[..i].to_vec());
                let right = Lin::basis(w[i + 1..].to_vec());
                let t = self.mul(&self.mul(&left, dl), &right);
                out.add_scaled(&t, &Sign::from_parity(passed).to_q());
            }
            passed += self.degrees()[l];
        }
        out
    }

    pub fn diff(&self, x: &Lin<Word>) -> Lin<Word> {
        x.apply(|w| self.diff_word(w))
    }

    pub fn is_primitive(&self, x: &Lin<Word>) -> bool {
        free_objects::reduced_unshuffle(x, self.degrees()).is_zero()
    }

    /// Normal-form basis words within the policy, the empty word included.
    pub fn basis_within(&self, policy: &TruncationPolicy) -> Vec<Word> {
        let words = free_objects::words_within(self.degrees(), policy, true);
        match self.kind {
            HopfKind::Tensor => words,
            HopfKind::Exterior => words
                .into_iter()
                .filter(|w| w.windows(2).all(|p| p[0] < p[1]))
                .collect(),
        }
    }

    pub fn word_name(&self, w: &[usize]) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.iter()
            .map(|&i| self.generators.element_name(i))
            .collect::<Vec<_>>()
            .join("")
    }
}
