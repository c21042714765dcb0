//! The graded operator calculus on Koszul cochains: admissible monomials
//! in the operators `R^a` and `v_i`, Adem rewriting, v-commutation, and
//! the instability constraints.
//!
//! Conventions (all at p = 2, coefficients in F_2):
//!
//! * `v_i` has total degree `2^(i+1) - 2` and raises filtration by 1.
//! * `R^a` has total degree `-a` and raises both filtration and weight by 1.
//! * A word `R^{a_1} ... R^{a_m}` is admissible when `a_i >= 2 a_{i+1}`.
//! * On a generator `y`, the last operator must satisfy `a_m >= -deg(y) + 2`;
//!   `R^a` may be applied to `z` only when `-deg(z) < a + 1`. Terms violating
//!   either constraint are zero.
//! * `R^a R^b = sum binom(b-1-c, a-2c) R^{a+b-c} R^c` when `a < 2b`.
//! * `R^a (v_i x) = sum_{i < k <= n} v_k R^{a - 2^(i+1) + 2^(k+1)} (x)`.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

use crate::error::{Error, Result};
use crate::presentation::ModulePresentation;

/// Adams-graded position of a monomial: total degree `x`, filtration `s`,
/// and weight `w` (the number of `R`-operators). Always `w <= s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bidegree {
    pub x: i32,
    pub s: u32,
    pub w: u32,
}

/// Total degree of `v_i`.
pub fn v_degree(i: u32) -> i32 {
    (1i32 << (i + 1)) - 2
}

/// A Koszul cochain basis element `v_0^{k_0} ... v_n^{k_n} R^{a_1} ... R^{a_m} y`.
///
/// `v` holds the exponents `k_i` with trailing zeros trimmed, `word` the
/// admissible `R`-indices in application order (outermost first), and
/// `gen` the generator index in the active module presentation. The
/// derived ordering (v-exponents lexicographic, then word, then generator)
/// is the canonical basis order used everywhere.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    v: Vec<u32>,
    word: Vec<u32>,
    gen: usize,
    gen_degree: i32,
}

impl Monomial {
    pub fn generator(gen: usize, gen_degree: i32) -> Self {
        Monomial {
            v: Vec::new(),
            word: Vec::new(),
            gen,
            gen_degree,
        }
    }

    pub fn new(v: &[u32], word: &[u32], gen: usize, gen_degree: i32) -> Self {
        let mut v = v.to_vec();
        while v.last() == Some(&0) {
            v.pop();
        }
        Monomial {
            v,
            word: word.to_vec(),
            gen,
            gen_degree,
        }
    }

    pub fn v_exponents(&self) -> &[u32] {
        &self.v
    }

    pub fn v_exponent(&self, i: u32) -> u32 {
        self.v.get(i as usize).copied().unwrap_or(0)
    }

    pub fn r_word(&self) -> &[u32] {
        &self.word
    }

    pub fn generator_index(&self) -> usize {
        self.gen
    }

    pub fn generator_degree(&self) -> i32 {
        self.gen_degree
    }

    pub fn has_v(&self) -> bool {
        !self.v.is_empty()
    }

    fn v_total_degree(&self) -> i32 {
        self.v
            .iter()
            .enumerate()
            .map(|(i, &k)| k as i32 * v_degree(i as u32))
            .sum()
    }

    pub fn bidegree(&self) -> Bidegree {
        let word_sum: i64 = self.word.iter().map(|&a| a as i64).sum();
        let v_count: u32 = self.v.iter().sum();
        Bidegree {
            x: self.gen_degree + self.v_total_degree() - word_sum as i32,
            s: self.word.len() as u32 + v_count,
            w: self.word.len() as u32,
        }
    }

    /// Admissibility of the stored word plus the generator-level
    /// instability bound `a_m >= -deg(y) + 2`.
    pub fn is_admissible(&self) -> bool {
        for pair in self.word.windows(2) {
            if pair[0] < 2 * pair[1] {
                return false;
            }
        }
        match self.word.last() {
            Some(&a_m) => a_m as i32 >= -self.gen_degree + 2,
            None => true,
        }
    }

    /// Multiplies by `v_i` (no truncation check; see [`apply_v`]).
    pub fn times_v(&self, i: u32) -> Monomial {
        let mut v = self.v.clone();
        if v.len() <= i as usize {
            v.resize(i as usize + 1, 0);
        }
        v[i as usize] += 1;
        Monomial {
            v,
            word: self.word.clone(),
            gen: self.gen,
            gen_degree: self.gen_degree,
        }
    }

    /// Adds a full exponent vector (componentwise) to the v-part.
    pub fn with_v_added(&self, extra: &[u32]) -> Monomial {
        let mut v = self.v.clone();
        if v.len() < extra.len() {
            v.resize(extra.len(), 0);
        }
        for (i, &k) in extra.iter().enumerate() {
            v[i] += k;
        }
        while v.last() == Some(&0) {
            v.pop();
        }
        Monomial {
            v,
            word: self.word.clone(),
            gen: self.gen,
            gen_degree: self.gen_degree,
        }
    }

    fn smallest_v(&self) -> Option<u32> {
        self.v.iter().position(|&k| k > 0).map(|i| i as u32)
    }

    fn without_one_v(&self, i: u32) -> Monomial {
        let mut v = self.v.clone();
        v[i as usize] -= 1;
        while v.last() == Some(&0) {
            v.pop();
        }
        Monomial {
            v,
            word: self.word.clone(),
            gen: self.gen,
            gen_degree: self.gen_degree,
        }
    }

    fn prepended(&self, a: u32) -> Monomial {
        let mut word = Vec::with_capacity(self.word.len() + 1);
        word.push(a);
        word.extend_from_slice(&self.word);
        Monomial {
            v: self.v.clone(),
            word,
            gen: self.gen,
            gen_degree: self.gen_degree,
        }
    }

    fn tail(&self) -> Monomial {
        Monomial {
            v: Vec::new(),
            word: self.word[1..].to_vec(),
            gen: self.gen,
            gen_degree: self.gen_degree,
        }
    }
}

/// A finite F_2-linear combination of monomials, kept sorted and
/// duplicate-free. Addition is symmetric difference; the empty set is zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Element {
    terms: Vec<Monomial>,
}

impl Element {
    pub fn zero() -> Self {
        Element { terms: Vec::new() }
    }

    pub fn single(m: Monomial) -> Self {
        Element { terms: vec![m] }
    }

    pub fn from_terms(terms: Vec<Monomial>) -> Self {
        let mut e = Element::zero();
        for t in terms {
            e.add_monomial(t);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn leading_term(&self) -> Option<&Monomial> {
        self.terms.first()
    }

    pub fn add_monomial(&mut self, m: Monomial) {
        match self.terms.binary_search(&m) {
            Ok(i) => {
                self.terms.remove(i);
            }
            Err(i) => self.terms.insert(i, m),
        }
    }

    pub fn add_assign(&mut self, other: &Element) {
        for t in &other.terms {
            self.add_monomial(t.clone());
        }
    }

    pub fn times_v(&self, i: u32) -> Element {
        // v-multiplication is injective on the basis and preserves the
        // canonical order, so no cancellation and no re-sort.
        Element {
            terms: self.terms.iter().map(|m| m.times_v(i)).collect(),
        }
    }

    /// Multiplies by the v-monomial with the given exponent vector.
    pub fn times_v_monomial(&self, extra: &[u32]) -> Element {
        if extra.iter().all(|&k| k == 0) {
            return self.clone();
        }
        Element {
            terms: self.terms.iter().map(|m| m.with_v_added(extra)).collect(),
        }
    }

    /// Builds an element from an arbitrary monomial list, cancelling
    /// duplicate pairs over F_2.
    pub fn xor_merge(mut terms: Vec<Monomial>) -> Element {
        terms.sort();
        let mut out = Vec::with_capacity(terms.len());
        let mut it = terms.into_iter().peekable();
        while let Some(m) = it.next() {
            if it.peek() == Some(&m) {
                it.next();
            } else {
                out.push(m);
            }
        }
        Element { terms: out }
    }
}

/// `binom(top, bottom) mod 2` by digit domination; 0 when `bottom < 0`
/// or `bottom > top`.
pub fn mod2_binomial(top: i64, bottom: i64) -> bool {
    if bottom < 0 || bottom > top {
        return false;
    }
    (top & bottom) == bottom
}

static ADEM_R_CACHE: LazyLock<Mutex<HashMap<(u32, u32), Arc<Vec<(u32, u32)>>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Adem expansion of the inadmissible pair `R^a R^b` (`a < 2b`):
/// pairs `(a+b-c, c)` with `binom(b-1-c, a-2c)` odd. Every returned pair
/// is admissible. No instability filtering happens here.
pub fn adem_reduce_r(a: u32, b: u32) -> Result<Arc<Vec<(u32, u32)>>> {
    if a >= 2 * b {
        return Err(Error::AdemPrecondition { a, b });
    }
    if let Some(hit) = ADEM_R_CACHE.lock().unwrap().get(&(a, b)) {
        return Ok(Arc::clone(hit));
    }
    let (a, b) = (a as i64, b as i64);
    let lo = 0.max(a - b + 1);
    let hi = a / 2;
    let mut pairs = Vec::new();
    for c in lo..=hi {
        if mod2_binomial(b - 1 - c, a - 2 * c) {
            debug_assert!(a + b - c >= 2 * c);
            pairs.push(((a + b - c) as u32, c as u32));
        }
    }
    let pairs = Arc::new(pairs);
    ADEM_R_CACHE
        .lock()
        .unwrap()
        .entry((a as u32, b as u32))
        .or_insert_with(|| Arc::clone(&pairs));
    Ok(pairs)
}

/// Normal form of `R^a . m`. Instability violations are dropped eagerly:
/// the element-level constraint on every application, and the generator
/// bound when the word reaches `y`.
pub fn apply_r_monomial(a: u32, m: &Monomial, n: i32) -> Element {
    // R^a applies to z only when -deg(z) < a + 1.
    if -(m.bidegree().x as i64) >= a as i64 + 1 {
        return Element::zero();
    }
    if let Some(i) = m.smallest_v() {
        let inner = m.without_one_v(i);
        let mut out = Element::zero();
        let mut k = i + 1;
        while (k as i32) <= n {
            let shifted = a as i64 - (1i64 << (i + 1)) + (1i64 << (k + 1));
            debug_assert!(shifted > a as i64);
            out.add_assign(&apply_r_monomial(shifted as u32, &inner, n).times_v(k));
            k += 1;
        }
        return out;
    }
    match m.word.first() {
        None => {
            if a as i32 >= -m.gen_degree + 2 {
                Element::single(m.prepended(a))
            } else {
                Element::zero()
            }
        }
        Some(&b) => {
            if a >= 2 * b {
                Element::single(m.prepended(a))
            } else {
                let mut out = Element::zero();
                let pairs = adem_reduce_r(a, b).expect("a < 2b checked");
                let tail = m.tail();
                for &(a2, c) in pairs.iter() {
                    for t in apply_r_monomial(c, &tail, n).terms() {
                        out.add_assign(&apply_r_monomial(a2, t, n));
                    }
                }
                out
            }
        }
    }
}

/// Normal form of `R^a . e` at truncation level `n`.
pub fn apply_r(a: u32, e: &Element, n: i32) -> Element {
    let mut out = Element::zero();
    for m in e.terms() {
        out.add_assign(&apply_r_monomial(a, m, n));
    }
    out
}

/// Multiplies by `v_i`, rejecting indices beyond the truncation level.
pub fn apply_v(i: u32, n: i32, m: &Monomial) -> Result<Monomial> {
    if i as i32 > n {
        return Err(Error::Truncation { i, n });
    }
    Ok(m.times_v(i))
}

/// Which inadmissible pair a word-rewriting pass picks first. Production
/// code always normalizes through [`apply_r`]; both strategies exist so
/// confluence is checkable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewriteStrategy {
    LeftmostFirst,
    RightmostFirst,
}

/// Normalizes a formal `R`-word in the free operator algebra (no
/// generator, no instability): returns the set of admissible words in the
/// expansion, as an F_2 sum.
pub fn normalize_r_word(word: &[u32], strategy: RewriteStrategy) -> Vec<Vec<u32>> {
    let mut result: Vec<Vec<u32>> = Vec::new();
    let mut pending: Vec<Vec<u32>> = vec![word.to_vec()];
    while let Some(w) = pending.pop() {
        let positions: Vec<usize> = (0..w.len().saturating_sub(1))
            .filter(|&i| w[i] < 2 * w[i + 1])
            .collect();
        let pick = match strategy {
            RewriteStrategy::LeftmostFirst => positions.first(),
            RewriteStrategy::RightmostFirst => positions.last(),
        };
        match pick {
            None => xor_word(&mut result, w),
            Some(&i) => {
                for &(a2, c) in adem_reduce_r(w[i], w[i + 1]).expect("inadmissible").iter() {
                    let mut next = w.clone();
                    next[i] = a2;
                    next[i + 1] = c;
                    pending.push(next);
                }
            }
        }
    }
    result.sort();
    result
}

fn xor_word(set: &mut Vec<Vec<u32>>, w: Vec<u32>) {
    if let Some(pos) = set.iter().position(|x| *x == w) {
        set.remove(pos);
    } else {
        set.push(w);
    }
}

/// Applies the admissible words of a normalized formal word to a
/// generator, keeping those satisfying the generator bound.
pub fn filter_unstable_words(words: &[Vec<u32>], gen: usize, gen_degree: i32) -> Element {
    let mut e = Element::zero();
    for w in words {
        let m = Monomial::new(&[], w, gen, gen_degree);
        if m.is_admissible() {
            if let Some(&a_m) = w.last() {
                if (a_m as i32) < -gen_degree + 2 {
                    continue;
                }
            }
            e.add_monomial(m);
        }
    }
    e
}

/// Renders `v0^2 R9 R4 y1` style text for a monomial.
pub fn render_monomial(m: &Monomial, module: &ModulePresentation) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (i, &k) in m.v.iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(format!("v{i}")),
            _ => parts.push(format!("v{i}^{k}")),
        }
    }
    for &a in &m.word {
        parts.push(format!("R{a}"));
    }
    parts.push(module.generators()[m.gen].id.clone());
    parts.join(" ")
}

/// Renders an element as a sum of monomials, `0` when empty.
pub fn render_element(e: &Element, module: &ModulePresentation) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    e.terms()
        .iter()
        .map(|m| render_monomial(m, module))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Parses monomial text of the form `v0^2 R9 R4 y1` back into a
/// [`Monomial`]. Inverse of [`render_monomial`].
pub fn parse_monomial(text: &str, module: &ModulePresentation) -> Result<Monomial> {
    let mut v: Vec<u32> = Vec::new();
    let mut word: Vec<u32> = Vec::new();
    let mut gen: Option<usize> = None;
    for token in text.split_whitespace() {
        if gen.is_some() {
            return Err(Error::Parse(format!(
                "unexpected token `{token}` after generator in `{text}`"
            )));
        }
        if let Some(rest) = token.strip_prefix('v') {
            if let Some((idx, exp)) = parse_v_token(rest) {
                if v.len() <= idx as usize {
                    v.resize(idx as usize + 1, 0);
                }
                v[idx as usize] += exp;
                continue;
            }
        }
        if let Some(rest) = token.strip_prefix('R') {
            if let Ok(a) = rest.parse::<u32>() {
                word.push(a);
                continue;
            }
        }
        match module.generator_index(token) {
            Some(g) => gen = Some(g),
            None => {
                return Err(Error::Parse(format!(
                    "unknown token `{token}` in monomial `{text}`"
                )))
            }
        }
    }
    let gen = gen.ok_or_else(|| Error::Parse(format!("no generator in monomial `{text}`")))?;
    let degree = module.generators()[gen].degree;
    Ok(Monomial::new(&v, &word, gen, degree))
}

fn parse_v_token(rest: &str) -> Option<(u32, u32)> {
    match rest.split_once('^') {
        Some((idx, exp)) => Some((idx.parse().ok()?, exp.parse().ok()?)),
        None => Some((rest.parse().ok()?, 1)),
    }
}

/// Parses `a + b + c` element text.
pub fn parse_element(text: &str, module: &ModulePresentation) -> Result<Element> {
    let trimmed = text.trim();
    if trimmed == "0" {
        return Ok(Element::zero());
    }
    let mut e = Element::zero();
    for part in trimmed.split('+') {
        e.add_monomial(parse_monomial(part.trim(), module)?);
    }
    Ok(e)
}
