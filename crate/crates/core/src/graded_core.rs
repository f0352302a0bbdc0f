//! Exact graded linear algebra over the rationals: sparse linear combinations,
//! Koszul signs, finite graded spaces, multilinear maps and (de)suspension.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"` or `"p/q"` with optional sign. Decimal points are rejected.
pub fn parse_q(s: &str) -> Result<Q, GradedError> {
    let t = s.trim();
    let bad = || GradedError::BadRational(s.to_string());
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

pub fn format_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradedError {
    #[error("permutation has length {perm} but {degrees} degrees were given")]
    LengthMismatch { perm: usize, degrees: usize },
    #[error("not a permutation of 1..={0}")]
    NotBijective(usize),
    #[error("duplicate basis element `{0}`")]
    DuplicateName(String),
    #[error("unknown basis element `{0}`")]
    UnknownName(String),
    #[error("map expects {expected} inputs, word has {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("entry for {input} has degree {found}, map declares {declared}")]
    DegreeMismatch {
        input: String,
        found: i64,
        declared: i64,
    },
    #[error("cannot parse rational `{0}`")]
    BadRational(String),
}

/// A sign in {+1, -1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(e: i64) -> Sign {
        if e.rem_euclid(2) == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// `(-1)^(a*b)`, the cost of commuting objects of degrees `a` and `b`.
    pub fn koszul(a: i64, b: i64) -> Sign {
        Sign::from_parity(a.rem_euclid(2) * b.rem_euclid(2))
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn to_q(self) -> Q {
        q(self.value())
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_minus() { "-1" } else { "+1" })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KoszulSigns {
    /// Sign picked up by the graded letters alone.
    pub epsilon: Sign,
    /// `sgn(perm) * epsilon`.
    pub xi: Sign,
}

/// Signs for rearranging `x_1 ... x_n` into `x_{perm[0]} ... x_{perm[n-1]}`.
/// `perm` is one-based, as in `(2,3,1)`.
pub fn koszul_sign(perm: &[usize], degrees: &[i64]) -> Result<KoszulSigns, GradedError> {
    let n = perm.len();
    if degrees.len() != n {
        return Err(GradedError::LengthMismatch {
            perm: n,
            degrees: degrees.len(),
        });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p == 0 || p > n || seen[p - 1] {
            return Err(GradedError::NotBijective(n));
        }
        seen[p - 1] = true;
    }
    let mut eps = Sign::Plus;
    let mut sgn = Sign::Plus;
    for i in 0..n {
        for j in i + 1..n {
            if perm[i] > perm[j] {
                sgn = sgn * Sign::Minus;
                eps = eps * Sign::koszul(degrees[perm[i] - 1], degrees[perm[j] - 1]);
            }
        }
    }
    Ok(KoszulSigns {
        epsilon: eps,
        xi: sgn * eps,
    })
}

/// Zero-based variant used internally: `order[k]` is the index of the letter placed at slot `k`.
pub(crate) fn reorder_sign(order: &[usize], degrees: &[i64]) -> Sign {
    let mut eps = Sign::Plus;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if order[i] > order[j] {
                eps = eps * Sign::koszul(degrees[order[i]], degrees[order[j]]);
            }
        }
    }
    eps
}

pub(crate) fn permutation_parity(order: &[usize]) -> Sign {
    let mut s = Sign::Plus;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if order[i] > order[j] {
                s = s * Sign::Minus;
            }
        }
    }
    s
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..n.saturating_sub(1))
            .rev()
            .find(|&i| cur[i] < cur[i + 1])
        else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// Sparse linear combination with exact coefficients; zero terms are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lin<K: Ord> {
    terms: BTreeMap<K, Q>,
}

impl<K: Ord> Default for Lin<K> {
    fn default() -> Self {
        Lin {
            terms: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> Lin<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(k: K, c: Q) -> Self {
        let mut l = Self::zero();
        l.add_term(k, c);
        l
    }

    pub fn basis(k: K) -> Self {
        Self::single(k, Q::one())
    }

    pub fn add_term(&mut self, k: K, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    pub fn add_signed(&mut self, k: K, c: &Q, s: Sign) {
        if s.is_minus() {
            self.add_term(k, -c.clone());
        } else {
            self.add_term(k, c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Lin<K>, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v * c);
        }
    }

    pub fn add_assign(&mut self, other: &Lin<K>) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v.clone());
        }
    }

    pub fn sub_assign(&mut self, other: &Lin<K>) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), -v.clone());
        }
    }

    pub fn scaled(&self, c: &Q) -> Lin<K> {
        let mut out = Lin::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn negated(&self) -> Lin<K> {
        self.scaled(&q(-1))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: &K) -> Q {
        self.terms.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Q)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn into_terms(self) -> BTreeMap<K, Q> {
        self.terms
    }

    pub fn retain(&mut self, mut f: impl FnMut(&K) -> bool) {
        self.terms.retain(|k, _| f(k));
    }

    /// Applies a linear map given on basis elements.
    pub fn apply<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> Lin<K2>) -> Lin<K2> {
        let mut out = Lin::zero();
        for (k, c) in &self.terms {
            out.add_scaled(&f(k), c);
        }
        out
    }

    pub fn map_keys<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> K2) -> Lin<K2> {
        let mut out = Lin::zero();
        for (k, c) in &self.terms {
            out.add_term(f(k), c.clone());
        }
        out
    }
}

impl<K: Ord + Clone> FromIterator<(K, Q)> for Lin<K> {
    fn from_iter<I: IntoIterator<Item = (K, Q)>>(iter: I) -> Self {
        let mut l = Lin::zero();
        for (k, c) in iter {
            l.add_term(k, c);
        }
        l
    }
}

/// Bilinear extension of a product on basis elements.
pub fn bilinear<A: Ord + Clone, B: Ord + Clone, C: Ord + Clone>(
    x: &Lin<A>,
    y: &Lin<B>,
    mut f: impl FnMut(&A, &B) -> Lin<C>,
) -> Lin<C> {
    let mut out = Lin::zero();
    for (a, ca) in x.iter() {
        for (b, cb) in y.iter() {
            out.add_scaled(&f(a, b), &(ca * cb));
        }
    }
    out
}

/// Finite named basis with integer degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    pub name: String,
    /// Net shift applied to the original degrees.
    pub offset: i64,
    names: Vec<String>,
    degrees: Vec<i64>,
}

impl GradedSpace {
    pub fn new(name: &str, basis: &[(&str, i64)]) -> Result<Self, GradedError> {
        Self::from_owned(
            name,
            basis.iter().map(|(n, d)| (n.to_string(), *d)).collect(),
        )
    }

    pub fn from_owned(name: &str, basis: Vec<(String, i64)>) -> Result<Self, GradedError> {
        let mut seen = BTreeSet::new();
        for (n, _) in &basis {
            if !seen.insert(n.clone()) {
                return Err(GradedError::DuplicateName(n.clone()));
            }
        }
        let (names, degrees) = basis.into_iter().unzip();
        Ok(GradedSpace {
            name: name.to_string(),
            offset: 0,
            names,
            degrees,
        })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn element_name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize, GradedError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| GradedError::UnknownName(name.to_string()))
    }

    pub fn word_degree(&self, w: &[usize]) -> i64 {
        w.iter().map(|&i| self.degrees[i]).sum()
    }

    /// Same basis with every degree raised by `k`.
    pub fn shift(&self, k: i64) -> GradedSpace {
        GradedSpace {
            name: self.name.clone(),
            offset: self.offset + k,
            names: self.names.clone(),
            degrees: self.degrees.iter().map(|d| d + k).collect(),
        }
    }

    pub fn word_name(&self, w: &[usize]) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.iter()
            .map(|&i| self.names[i].as_str())
            .collect::<Vec<_>>()
            .join("⊗")
    }
}

/// Multilinear map `source^{⊗arity_in} → target^{⊗arity_out}` given on basis words.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedMap {
    pub source: GradedSpace,
    pub target: GradedSpace,
    pub arity_in: usize,
    pub arity_out: usize,
    pub degree: i64,
    entries: BTreeMap<Vec<usize>, Lin<Vec<usize>>>,
}

impl GradedMap {
    pub fn zero(
        source: GradedSpace,
        target: GradedSpace,
        arity_in: usize,
        arity_out: usize,
        degree: i64,
    ) -> Self {
        GradedMap {
            source,
            target,
            arity_in,
            arity_out,
            degree,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(space: &GradedSpace) -> Self {
        let mut m = GradedMap::zero(space.clone(), space.clone(), 1, 1, 0);
        for i in 0..space.dim() {
            m.entries.insert(vec![i], Lin::basis(vec![i]));
        }
        m
    }

    /// Adds `coeff · output` to the value on `input`, checking arities and degree.
    pub fn add_entry(
        &mut self,
        input: Vec<usize>,
        output: Vec<usize>,
        coeff: Q,
    ) -> Result<(), GradedError> {
        if input.len() != self.arity_in {
            return Err(GradedError::ArityMismatch {
                expected: self.arity_in,
                found: input.len(),
            });
        }
        if output.len() != self.arity_out {
            return Err(GradedError::ArityMismatch {
                expected: self.arity_out,
                found: output.len(),
            });
        }
        let found = self.target.word_degree(&output) - self.source.word_degree(&input);
        if found != self.degree {
            return Err(GradedError::DegreeMismatch {
                input: self.source.word_name(&input),
                found,
                declared: self.degree,
            });
        }
        let e = self.entries.entry(input.clone()).or_default();
        e.add_term(output, coeff);
        if e.is_zero() {
            self.entries.remove(&input);
        }
        Ok(())
    }

    pub fn eval(&self, input: &[usize]) -> Lin<Vec<usize>> {
        self.entries.get(input).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Lin<Vec<usize>>)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Composition `self ∘ other` for `other` of output arity equal to our input arity.
    pub fn compose(&self, other: &GradedMap) -> Result<GradedMap, GradedError> {
        if other.arity_out != self.arity_in {
            return Err(GradedError::ArityMismatch {
                expected: self.arity_in,
                found: other.arity_out,
            });
        }
        let mut out = GradedMap::zero(
            other.source.clone(),
            self.target.clone(),
            other.arity_in,
            self.arity_out,
            self.degree + other.degree,
        );
        for (inp, val) in &other.entries {
            let v = val.apply(|w| self.eval(w));
            if !v.is_zero() {
                out.entries.insert(inp.clone(), v);
            }
        }
        Ok(out)
    }
}

/// Evaluates `f_1 ⊗ ... ⊗ f_k` on a word with the Koszul rule: each `f_i` passes the
/// inputs consumed by the earlier factors.
pub fn apply_tensor_map(
    factors: &[&GradedMap],
    word: &[usize],
) -> Result<Lin<Vec<usize>>, GradedError> {
    let total: usize = factors.iter().map(|f| f.arity_in).sum();
    if total != word.len() {
        return Err(GradedError::ArityMismatch {
            expected: total,
            found: word.len(),
        });
    }
    let mut acc: Lin<Vec<usize>> = Lin::basis(Vec::new());
    let mut pos = 0;
    let mut passed = 0i64;
    for f in factors {
        let chunk = &word[pos..pos + f.arity_in];
        let val = f.eval(chunk);
        let sign = Sign::koszul(f.degree, passed);
        let mut next = Lin::zero();
        for (prefix, c) in acc.iter() {
            for (out, d) in val.iter() {
                let mut w = prefix.clone();
                w.extend_from_slice(out);
                next.add_signed(w, &(c * d), sign);
            }
        }
        acc = next;
        passed += f.source.word_degree(chunk);
        pos += f.arity_in;
    }
    Ok(acc)
}

/// Sign of the tensor power of the `|k|`-fold desuspension applied to a word, computed
/// with the degrees on the higher of the two sides (`degrees` are the unshifted ones).
pub fn suspension_sign(k: i64, degrees: &[i64]) -> Sign {
    if k == 0 {
        return Sign::Plus;
    }
    let n = degrees.len();
    let mut e = 0i64;
    for (j, d) in degrees.iter().enumerate() {
        let high = if k < 0 { *d } else { d + k };
        e += (n - 1 - j) as i64 * high.rem_euclid(2);
    }
    Sign::from_parity(k.abs() * e)
}

/// Conjugates a map by the tensor powers of the `k`-fold shift. Shifting by `k` and then
/// by `-k` returns the original map exactly.
pub fn shift_map(f: &GradedMap, k: i64) -> GradedMap {
    let mut out = GradedMap::zero(
        f.source.shift(k),
        f.target.shift(k),
        f.arity_in,
        f.arity_out,
        f.degree + k * (f.arity_out as i64 - f.arity_in as i64),
    );
    for (inp, val) in &f.entries {
        let s_in = suspension_sign(k, &degrees_of(&f.source, inp));
        let mut v = Lin::zero();
        for (w, c) in val.iter() {
            let s_out = suspension_sign(k, &degrees_of(&f.target, w));
            v.add_signed(w.clone(), c, s_in * s_out);
        }
        if !v.is_zero() {
            out.entries.insert(inp.clone(), v);
        }
    }
    out
}

pub fn shift_space(space: &GradedSpace, k: i64) -> GradedSpace {
    space.shift(k)
}

fn degrees_of(space: &GradedSpace, w: &[usize]) -> Vec<i64> {
    w.iter().map(|&i| space.degree(i)).collect()
}

pub fn sum_abs(l: &Lin<impl Ord + Clone>) -> Q {
    l.iter().map(|(_, c)| c.abs()).fold(Q::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_permutation_is_positive() {
        let s = koszul_sign(&[1, 2, 3], &[1, 3, 5]).unwrap();
        assert_eq!(s.epsilon, Sign::Plus);
        assert_eq!(s.xi, Sign::Plus);
    }

    #[test]
    fn odd_swap_is_negative() {
        let s = koszul_sign(&[2, 1], &[1, 1]).unwrap();
        assert_eq!(s.epsilon, Sign::Minus);
        assert_eq!(s.xi, Sign::Plus);
    }

    fn adjacent_oracle(perm: &[usize], degrees: &[i64]) -> Sign {
        // bubble sort the target order back to the identity, one adjacent swap at a time
        let mut cur: Vec<usize> = (1..=perm.len()).collect();
        let mut sign = Sign::Plus;
        for (slot, &want) in perm.iter().enumerate() {
            let mut at = cur.iter().position(|&x| x == want).unwrap();
            while at > slot {
                sign = sign * Sign::koszul(degrees[cur[at] - 1], degrees[cur[at - 1] - 1]);
                cur.swap(at, at - 1);
                at -= 1;
            }
        }
        sign
    }

    #[test]
    fn cyclic_example_matches_adjacent_transpositions() {
        assert_eq!(adjacent_oracle(&[2, 3, 1], &[1, 2, 1]), Sign::Minus);
        let s = koszul_sign(&[2, 3, 1], &[1, 2, 1]).unwrap();
        assert_eq!(s.epsilon, Sign::Minus);
    }

    #[test]
    fn rejects_bad_permutations() {
        assert!(matches!(
            koszul_sign(&[1, 2], &[1]),
            Err(GradedError::LengthMismatch { .. })
        ));
        assert!(matches!(
            koszul_sign(&[1, 1], &[1, 1]),
            Err(GradedError::NotBijective(2))
        ));
    }

    fn fixture_maps() -> (GradedSpace, GradedSpace, GradedMap) {
        let c = GradedSpace::new("C", &[("e2", 2), ("e3", 3)]).unwrap();
        let h = GradedSpace::new("H", &[("t2", 1), ("t3", 2)]).unwrap();
        let mut tau = GradedMap::zero(c.clone(), h.clone(), 1, 1, -1);
        tau.add_entry(vec![0], vec![0], q(1)).unwrap();
        tau.add_entry(vec![1], vec![1], q(1)).unwrap();
        (c, h, tau)
    }

    #[test]
    fn tensor_map_signs() {
        let (c, _h, tau) = fixture_maps();
        let id = GradedMap::identity(&c);
        let r = apply_tensor_map(&[&tau, &id], &[0, 0]).unwrap();
        assert_eq!(r, Lin::single(vec![0, 0], q(1)));
        let r = apply_tensor_map(&[&id, &tau], &[0, 0]).unwrap();
        assert_eq!(r, Lin::single(vec![0, 0], q(1)));
        let r = apply_tensor_map(&[&id, &tau], &[1, 0]).unwrap();
        assert_eq!(r, Lin::single(vec![1, 0], q(-1)));
    }

    #[test]
    fn arity_errors() {
        let (_c, _h, tau) = fixture_maps();
        assert!(apply_tensor_map(&[&tau], &[0, 0]).is_err());
        let mut m = tau.clone();
        assert!(matches!(
            m.add_entry(vec![0], vec![1], q(1)),
            Err(GradedError::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn shift_degrees_and_identity() {
        let c = GradedSpace::new("C", &[("e0", 0), ("e2", 2)]).unwrap();
        let s = c.shift(-1);
        assert_eq!(s.degree(1), 1);
        let id = GradedMap::identity(&c);
        assert_eq!(shift_map(&id, -1), GradedMap::identity(&s));
    }

    #[test]
    fn shift_round_trip_on_binary_map() {
        let c = GradedSpace::new("C", &[("e0", 0), ("e1", 1), ("e3", 3)]).unwrap();
        let mut f = GradedMap::zero(c.clone(), c.clone(), 2, 1, -1);
        f.add_entry(vec![1, 1], vec![1], q(3)).unwrap();
        f.add_entry(vec![2, 1], vec![2], q(-2)).unwrap();
        f.add_entry(vec![1, 2], vec![2], q(5)).unwrap();
        let down = shift_map(&f, -1);
        assert_eq!(down.degree, 0);
        // first-argument degree decides the sign of the shifted value
        assert_eq!(down.eval(&[1, 1]), Lin::single(vec![1], q(-3)));
        assert_eq!(down.eval(&[2, 1]), Lin::single(vec![2], q(2)));
        assert_eq!(shift_map(&down, 1), f);
        assert_eq!(shift_map(&shift_map(&f, 2), -2), f);
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_q("3/6").unwrap(), q_frac(1, 2));
        assert_eq!(parse_q("-4").unwrap(), q(-4));
        assert!(parse_q("2.5").is_err());
        assert!(parse_q("1/0").is_err());
        assert_eq!(format_q(&q_frac(-3, 4)), "-3/4");
    }
}
