//! Tensor words and Lie words over a graded alphabet.
//!
//! Words are sequences of letter indices; letter degrees come from the alphabet slice
//! passed alongside. All signs follow the Koszul rule on letter degrees.

use std::fmt;

use crate::graded_core::{permutation_parity, permutations, q, reorder_sign, Lin, Sign};

pub type Word = Vec<usize>;

pub fn word_degree(w: &[usize], degrees: &[i64]) -> i64 {
    w.iter().map(|&i| degrees[i]).sum()
}

/// Degree and length caps applied when enumerating or emitting words.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncationPolicy {
    pub max_total_degree: i64,
    pub max_word_length: usize,
}

impl TruncationPolicy {
    pub fn new(max_total_degree: i64, max_word_length: usize) -> Result<Self, String> {
        if max_total_degree < 0 {
            return Err(format!("max degree must be >= 0, got {max_total_degree}"));
        }
        if max_word_length < 1 {
            return Err("max word length must be >= 1".to_string());
        }
        Ok(TruncationPolicy {
            max_total_degree,
            max_word_length,
        })
    }

    pub fn admits(&self, degree: i64, length: usize) -> bool {
        degree <= self.max_total_degree && length <= self.max_word_length
    }
}

/// All splits `(prefix, suffix)` of `w`, empty ends included.
pub fn deconcatenate(w: &[usize]) -> Vec<(Word, Word)> {
    (0..=w.len())
        .map(|i| (w[..i].to_vec(), w[i..].to_vec()))
        .collect()
}

/// Signed sum over all interleavings of `u` and `v`.
pub fn shuffle(u: &[usize], v: &[usize], degrees: &[i64]) -> Lin<Word> {
    let n = u.len() + v.len();
    let letters: Vec<usize> = u.iter().chain(v.iter()).copied().collect();
    let degs: Vec<i64> = letters.iter().map(|&l| degrees[l]).collect();
    let mut out = Lin::zero();
    for mask in subsets_of_size(n, u.len()) {
        // positions in `mask` receive the letters of u in order, the rest those of v
        let mut order = vec![0usize; n];
        let (mut iu, mut iv) = (0, u.len());
        for (slot, item) in order.iter_mut().enumerate() {
            if mask[slot] {
                *item = iu;
                iu += 1;
            } else {
                *item = iv;
                iv += 1;
            }
        }
        let w: Word = order.iter().map(|&i| letters[i]).collect();
        out.add_signed(w, &q(1), reorder_sign(&order, &degs));
    }
    out
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<bool>> {
    let mut out = Vec::new();
    for bits in 0u64..(1u64 << n) {
        if bits.count_ones() as usize == k {
            out.push((0..n).map(|i| bits >> i & 1 == 1).collect());
        }
    }
    out
}

/// Coproduct of `T(V)` with primitive letters: sum over ordered splittings of the letters
/// into a left and right subword.
pub fn unshuffle(w: &[usize], degrees: &[i64]) -> Lin<(Word, Word)> {
    let n = w.len();
    let degs: Vec<i64> = w.iter().map(|&l| degrees[l]).collect();
    let mut out = Lin::zero();
    for bits in 0u64..(1u64 << n) {
        let left: Vec<usize> = (0..n).filter(|i| bits >> i & 1 == 1).collect();
        let right: Vec<usize> = (0..n).filter(|i| bits >> i & 1 == 0).collect();
        let order: Vec<usize> = left.iter().chain(right.iter()).copied().collect();
        let s = reorder_sign(&order, &degs);
        let lw = left.iter().map(|&i| w[i]).collect();
        let rw = right.iter().map(|&i| w[i]).collect();
        out.add_signed((lw, rw), &q(1), s);
    }
    out
}

/// Unshuffle with the two terms involving the empty word removed.
pub fn reduced_unshuffle(x: &Lin<Word>, degrees: &[i64]) -> Lin<(Word, Word)> {
    let mut out = Lin::zero();
    for (w, c) in x.iter() {
        for ((l, r), d) in unshuffle(w, degrees).iter() {
            if !l.is_empty() && !r.is_empty() {
                out.add_term((l.clone(), r.clone()), c * d);
            }
        }
    }
    out
}

pub fn concat_product(x: &Lin<Word>, y: &Lin<Word>) -> Lin<Word> {
    crate::graded_core::bilinear(x, y, |a, b| {
        let mut w = a.clone();
        w.extend_from_slice(b);
        Lin::basis(w)
    })
}

/// `[x, y] = xy - (-1)^{|x||y|} yx` for homogeneous `x`, `y` in the tensor algebra.
pub fn tensor_bracket(x: &Lin<Word>, dx: i64, y: &Lin<Word>, dy: i64) -> Lin<Word> {
    let mut out = concat_product(x, y);
    let yx = concat_product(y, x);
    out.add_scaled(&yx, &-Sign::koszul(dx, dy).to_q());
    out
}

/// `s(x_1...x_n) = (-1)^n x_n...x_1` with the Koszul sign of the reversal.
pub fn antipode(w: &[usize], degrees: &[i64]) -> (Sign, Word) {
    let n = w.len();
    let order: Vec<usize> = (0..n).rev().collect();
    let degs: Vec<i64> = w.iter().map(|&l| degrees[l]).collect();
    let s = reorder_sign(&order, &degs) * Sign::from_parity(n as i64);
    (s, w.iter().rev().copied().collect())
}

pub fn antipode_lin(x: &Lin<Word>, degrees: &[i64]) -> Lin<Word> {
    let mut out = Lin::zero();
    for (w, c) in x.iter() {
        let (s, r) = antipode(w, degrees);
        out.add_signed(r, c, s);
    }
    out
}

/// Fully bracketed expression over letters.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LieWord {
    Letter(usize),
    Bracket(Box<LieWord>, Box<LieWord>),
}

impl LieWord {
    pub fn bracket(a: LieWord, b: LieWord) -> LieWord {
        LieWord::Bracket(Box::new(a), Box::new(b))
    }

    pub fn letters(&self) -> Word {
        match self {
            LieWord::Letter(i) => vec![*i],
            LieWord::Bracket(a, b) => {
                let mut w = a.letters();
                w.extend(b.letters());
                w
            }
        }
    }

    pub fn degree(&self, degrees: &[i64]) -> i64 {
        word_degree(&self.letters(), degrees)
    }

    pub fn len(&self) -> usize {
        match self {
            LieWord::Letter(_) => 1,
            LieWord::Bracket(a, b) => a.len() + b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn display(&self, names: &dyn Fn(usize) -> String) -> String {
        match self {
            LieWord::Letter(i) => names(*i),
            LieWord::Bracket(a, b) => format!("[{},{}]", a.display(names), b.display(names)),
        }
    }
}

impl fmt::Display for LieWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display(&|i| format!("x{i}")))
    }
}

/// A basis element of the free graded Lie algebra together with its tensor expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieBasisElement {
    pub word: LieWord,
    /// True for the square `[w, w]` of an odd Lyndon element.
    pub is_square: bool,
    pub degree: i64,
}

pub fn lie_to_tensor(w: &LieWord, degrees: &[i64]) -> Lin<Word> {
    match w {
        LieWord::Letter(i) => Lin::basis(vec![*i]),
        LieWord::Bracket(a, b) => tensor_bracket(
            &lie_to_tensor(a, degrees),
            a.degree(degrees),
            &lie_to_tensor(b, degrees),
            b.degree(degrees),
        ),
    }
}

fn is_lyndon(w: &[usize]) -> bool {
    let n = w.len();
    (1..n).all(|i| w[i..].iter().chain(w[..i].iter()).cmp(w.iter()) == std::cmp::Ordering::Greater)
}

/// Standard bracketing: split off the longest proper Lyndon suffix.
fn standard_bracketing(w: &[usize]) -> LieWord {
    if w.len() == 1 {
        return LieWord::Letter(w[0]);
    }
    let split = (1..w.len()).find(|&i| is_lyndon(&w[i..])).unwrap();
    LieWord::bracket(
        standard_bracketing(&w[..split]),
        standard_bracketing(&w[split..]),
    )
}

/// Lyndon bracketings plus `[x, x]` for every odd Lyndon element `x`, within `policy`.
/// Generators of degree <= 0 are allowed only because the length cap keeps the list finite.
pub fn lyndon_basis(degrees: &[i64], policy: &TruncationPolicy) -> Vec<LieBasisElement> {
    let k = degrees.len();
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let mut words: Vec<Word> = vec![vec![]];
    for _len in 1..=policy.max_word_length {
        let mut next = Vec::new();
        for w in &words {
            for l in 0..k {
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        for w in &next {
            let d = word_degree(w, degrees);
            if is_lyndon(w) && d <= policy.max_total_degree {
                out.push(LieBasisElement {
                    word: standard_bracketing(w),
                    is_square: false,
                    degree: d,
                });
            }
        }
        words = next;
    }
    let squares: Vec<LieBasisElement> = out
        .iter()
        .filter(|e| e.degree.rem_euclid(2) == 1)
        .filter(|e| 2 * e.word.len() <= policy.max_word_length)
        .filter(|e| 2 * e.degree <= policy.max_total_degree)
        .map(|e| LieBasisElement {
            word: LieWord::bracket(e.word.clone(), e.word.clone()),
            is_square: true,
            degree: 2 * e.degree,
        })
        .collect();
    out.extend(squares);
    out.sort_by(|a, b| {
        (a.degree, a.word.len(), a.word.letters(), a.is_square).cmp(&(
            b.degree,
            b.word.len(),
            b.word.letters(),
            b.is_square,
        ))
    });
    out
}

/// `Σ_σ ξ(σ) [x_σ(1), [x_σ(2), ... [x_σ(n-1), x_σ(n)]]]` with a caller-supplied bracket
/// on homogeneous elements. No normalizing factor is applied.
pub fn nested_bracket_with<K: Ord + Clone>(
    xs: &[(Lin<K>, i64)],
    bracket: &dyn Fn(&Lin<K>, i64, &Lin<K>, i64) -> Lin<K>,
) -> Lin<K> {
    let n = xs.len();
    assert!(n >= 1, "nested bracket needs at least one argument");
    if n == 1 {
        return xs[0].0.clone();
    }
    let degs: Vec<i64> = xs.iter().map(|x| x.1).collect();
    let mut out = Lin::zero();
    for order in permutations(n) {
        let xi = reorder_sign(&order, &degs) * permutation_parity(&order);
        let (mut acc, mut dacc) = xs[order[n - 1]].clone();
        for &i in order[..n - 1].iter().rev() {
            acc = bracket(&xs[i].0, xs[i].1, &acc, dacc);
            dacc += xs[i].1;
        }
        out.add_scaled(&acc, &xi.to_q());
    }
    out
}

/// Nested bracket in the tensor algebra.
pub fn nested_bracket(xs: &[(Lin<Word>, i64)]) -> Lin<Word> {
    nested_bracket_with(xs, &|a, da, b, db| tensor_bracket(a, da, b, db))
}

/// All words of length `1..=max_word_length` and degree `<= max_total_degree`.
pub fn words_within(degrees: &[i64], policy: &TruncationPolicy, include_empty: bool) -> Vec<Word> {
    let mut out = Vec::new();
    if include_empty {
        out.push(vec![]);
    }
    let min_deg = degrees.iter().copied().min().unwrap_or(0);
    let mut frontier: Vec<Word> = vec![vec![]];
    for len in 1..=policy.max_word_length {
        let mut next = Vec::new();
        for w in &frontier {
            for l in 0..degrees.len() {
                let mut v = w.clone();
                v.push(l);
                let d = word_degree(&v, degrees);
                // remaining letters can only lower the degree by min_deg each
                let slack = (policy.max_word_length - len) as i64 * min_deg.min(0);
                if d + slack <= policy.max_total_degree {
                    next.push(v);
                }
            }
        }
        for w in &next {
            if word_degree(w, degrees) <= policy.max_total_degree {
                out.push(w.clone());
            }
        }
        frontier = next;
    }
    out
}
