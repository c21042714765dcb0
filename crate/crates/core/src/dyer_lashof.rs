//! The free allowable R-algebra on graded generators at p = 2:
//! Dyer-Lashof operations `Q^s` with the Cartan formula, Adem relations,
//! and instability (`Q^s x = 0` below degree, `Q^{|x|} x = x^2`).
//!
//! Elements are F_2 sums of commutative products of admissible
//! Q-monomials. Squares live as exponents in the product basis, never as
//! equality-excess words, so Cartan cross-terms cancel automatically.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{LazyLock, Mutex};

use crate::error::{Error, Result};
use crate::ops::mod2_binomial;

/// An admissible Q-word `Q^{s_1} ... Q^{s_m}` (with `s_j <= 2 s_{j+1}`
/// and strict excess at every prefix) applied to a graded generator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QMonomial {
    word: Vec<u32>,
    gen: String,
    gen_degree: i32,
}

impl QMonomial {
    pub fn generator(name: impl Into<String>, degree: i32) -> Self {
        QMonomial {
            word: Vec::new(),
            gen: name.into(),
            gen_degree: degree,
        }
    }

    pub fn word(&self) -> &[u32] {
        &self.word
    }

    pub fn degree(&self) -> i32 {
        self.gen_degree + self.word.iter().map(|&s| s as i64).sum::<i64>() as i32
    }

    fn prepended(&self, s: u32) -> QMonomial {
        let mut word = Vec::with_capacity(self.word.len() + 1);
        word.push(s);
        word.extend_from_slice(&self.word);
        QMonomial {
            word,
            gen: self.gen.clone(),
            gen_degree: self.gen_degree,
        }
    }

    fn tail(&self) -> QMonomial {
        QMonomial {
            word: self.word[1..].to_vec(),
            gen: self.gen.clone(),
            gen_degree: self.gen_degree,
        }
    }
}

/// A commutative product of Q-monomials with positive exponents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct ProductTerm {
    factors: BTreeMap<QMonomial, u32>,
}

impl ProductTerm {
    pub fn one() -> Self {
        ProductTerm::default()
    }

    pub fn from_monomial(m: QMonomial) -> Self {
        let mut factors = BTreeMap::new();
        factors.insert(m, 1);
        ProductTerm { factors }
    }

    pub fn degree(&self) -> i32 {
        self.factors
            .iter()
            .map(|(m, &e)| m.degree() as i64 * e as i64)
            .sum::<i64>() as i32
    }

    pub fn factors(&self) -> &BTreeMap<QMonomial, u32> {
        &self.factors
    }

    fn times(&self, other: &ProductTerm) -> ProductTerm {
        let mut factors = self.factors.clone();
        for (m, &e) in &other.factors {
            *factors.entry(m.clone()).or_insert(0) += e;
        }
        ProductTerm { factors }
    }

    /// Splits off a single power of the first factor.
    fn split(&self) -> Option<(QMonomial, ProductTerm)> {
        let (m, &e) = self.factors.iter().next()?;
        let m = m.clone();
        let mut rest = self.clone();
        if e == 1 {
            rest.factors.remove(&m);
        } else {
            *rest.factors.get_mut(&m).unwrap() -= 1;
        }
        Some((m, rest))
    }
}

/// An element of the free allowable R-algebra: an F_2 sum of product
/// terms. The empty sum is zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QPolynomial {
    terms: BTreeSet<ProductTerm>,
}

impl QPolynomial {
    pub fn zero() -> Self {
        QPolynomial::default()
    }

    pub fn one() -> Self {
        QPolynomial::single(ProductTerm::one())
    }

    pub fn generator(name: impl Into<String>, degree: i32) -> Self {
        QPolynomial::single(ProductTerm::from_monomial(QMonomial::generator(
            name, degree,
        )))
    }

    pub fn single(t: ProductTerm) -> Self {
        let mut terms = BTreeSet::new();
        terms.insert(t);
        QPolynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &ProductTerm> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, t: ProductTerm) {
        if !self.terms.remove(&t) {
            self.terms.insert(t);
        }
    }

    pub fn add_assign(&mut self, other: &QPolynomial) {
        for t in &other.terms {
            self.add_term(t.clone());
        }
    }

    /// Total degree when homogeneous (and nonzero).
    pub fn homogeneous_degree(&self) -> Option<i32> {
        let mut it = self.terms.iter();
        let d = it.next()?.degree();
        it.all(|t| t.degree() == d).then_some(d)
    }
}

/// Adem expansion of the inadmissible composite `Q^r Q^s` (`r > 2s`):
/// the pairs `(r+s-i, i)` with `binom(i-s-1, 2i-r)` odd, for
/// `ceil(r/2) <= i <= r-s-1`. Every returned pair is admissible.
pub fn adem_reduce_q(r: u32, s: u32) -> Result<Vec<(u32, u32)>> {
    if r <= 2 * s {
        return Err(Error::AdemPrecondition { a: r, b: s });
    }
    let (r, s) = (r as i64, s as i64);
    let lo = r.div_euclid(2) + (r % 2);
    let hi = r - s - 1;
    let mut pairs = Vec::new();
    for i in lo..=hi {
        if mod2_binomial(i - s - 1, 2 * i - r) {
            debug_assert!(r + s - i <= 2 * i);
            pairs.push(((r + s - i) as u32, i as u32));
        }
    }
    Ok(pairs)
}

static Q_APPLY_CACHE: LazyLock<Mutex<HashMap<(u32, QMonomial), QPolynomial>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

fn q_apply_monomial(s: u32, u: &QMonomial) -> QPolynomial {
    if let Some(hit) = Q_APPLY_CACHE.lock().unwrap().get(&(s, u.clone())) {
        return hit.clone();
    }
    let d = u.degree();
    let result = if (s as i64) < d as i64 {
        QPolynomial::zero()
    } else if s as i64 == d as i64 {
        let mut t = ProductTerm::one();
        t.factors.insert(u.clone(), 2);
        QPolynomial::single(t)
    } else {
        match u.word.first() {
            None => QPolynomial::single(ProductTerm::from_monomial(u.prepended(s))),
            Some(&s1) if s <= 2 * s1 => {
                QPolynomial::single(ProductTerm::from_monomial(u.prepended(s)))
            }
            Some(&s1) => {
                let mut out = QPolynomial::zero();
                let tail = u.tail();
                for (r2, i2) in adem_reduce_q(s, s1).expect("inadmissible") {
                    let inner = q_apply_monomial(i2, &tail);
                    out.add_assign(&q_apply(r2, &inner));
                }
                out
            }
        }
    };
    Q_APPLY_CACHE
        .lock()
        .unwrap()
        .insert((s, u.clone()), result.clone());
    result
}

fn q_apply_product(s: u32, t: &ProductTerm) -> QPolynomial {
    match t.split() {
        None => {
            if s == 0 {
                QPolynomial::one()
            } else {
                QPolynomial::zero()
            }
        }
        Some((u, rest)) => {
            // Cartan: cross terms on equal factors cancel over F_2,
            // leaving Q^s(u^2) = (Q^(s/2) u)^2 automatically.
            let mut out = QPolynomial::zero();
            for i in 0..=s {
                let qi = q_apply_monomial(i, &u);
                if qi.is_zero() {
                    continue;
                }
                let qj = q_apply_product(s - i, &rest);
                out.add_assign(&multiply(&qi, &qj));
            }
            out
        }
    }
}

/// Applies `Q^s` with Cartan expansion, instability, squaring, and Adem
/// normalization; the result is in normal form.
pub fn q_apply(s: u32, p: &QPolynomial) -> QPolynomial {
    let mut out = QPolynomial::zero();
    for t in &p.terms {
        out.add_assign(&q_apply_product(s, t));
    }
    out
}

/// Graded-commutative product in canonical form.
pub fn multiply(p: &QPolynomial, q: &QPolynomial) -> QPolynomial {
    let mut out = QPolynomial::zero();
    for a in &p.terms {
        for b in &q.terms {
            out.add_term(a.times(b));
        }
    }
    out
}

pub fn power(p: &QPolynomial, e: u32) -> QPolynomial {
    let mut out = QPolynomial::one();
    for _ in 0..e {
        out = multiply(&out, p);
    }
    out
}

/// The classes of the ten-term relation, on a degree-2 generator `x`:
/// `y5 = Q^3 x`, `y7 = Q^5 x`, `y9 = Q^7 x`, `y13 = Q^11 x`,
/// `y8 = Q^6 x + x^4`, `y10 = Q^8 x + x^2 Q^4 x`, `y12 = Q^10 x + (Q^4 x)^2`.
pub fn expand_named_class(name: &str) -> Result<QPolynomial> {
    let x = QPolynomial::generator("x", 2);
    let cls = match name {
        "y5" => q_apply(3, &x),
        "y7" => q_apply(5, &x),
        "y9" => q_apply(7, &x),
        "y13" => q_apply(11, &x),
        "y8" => {
            let mut p = q_apply(6, &x);
            p.add_assign(&power(&x, 4));
            p
        }
        "y10" => {
            let mut p = q_apply(8, &x);
            p.add_assign(&multiply(&power(&x, 2), &q_apply(4, &x)));
            p
        }
        "y12" => {
            let mut p = q_apply(10, &x);
            p.add_assign(&power(&q_apply(4, &x), 2));
            p
        }
        _ => return Err(Error::UnknownClass(name.into())),
    };
    Ok(cls)
}

/// The ten summands of the degree-30 relation, with printable names.
pub fn big_relation_terms() -> Vec<(&'static str, QPolynomial)> {
    let x = QPolynomial::generator("x", 2);
    let q4x = q_apply(4, &x);
    let q4x_sq = power(&q4x, 2);
    let y5 = expand_named_class("y5").unwrap();
    let y7 = expand_named_class("y7").unwrap();
    let y8 = expand_named_class("y8").unwrap();
    let y9 = expand_named_class("y9").unwrap();
    let y10 = expand_named_class("y10").unwrap();
    let y12 = expand_named_class("y12").unwrap();
    let y13 = expand_named_class("y13").unwrap();

    let mut bracket = q_apply(11, &q_apply(7, &x));
    bracket.add_assign(&q_apply(10, &q_apply(8, &x)));
    bracket.add_assign(&multiply(&power(&x, 4), &q_apply(6, &q_apply(4, &x))));

    vec![
        ("Q20 y10", q_apply(20, &y10)),
        ("Q18 y12", q_apply(18, &y12)),
        ("Q17 y13", q_apply(17, &y13)),
        ("x^4 Q12 y10", multiply(&power(&x, 4), &q_apply(12, &y10))),
        ("y9^2 (Q4 x)^2", multiply(&power(&y9, 2), &q4x_sq)),
        ("y7^2 Q9 Q5 x", multiply(&power(&y7, 2), &q_apply(9, &q_apply(5, &x)))),
        ("y8^2 Q8 Q4 x", multiply(&power(&y8, 2), &q_apply(8, &q4x))),
        ("(Q9 y9) (Q4 x)^2", multiply(&q_apply(9, &y9), &q4x_sq)),
        ("(Q10 y8) (Q4 x)^2", multiply(&q_apply(10, &y8), &q4x_sq)),
        (
            "y5^2 (Q11 Q7 x + Q10 Q8 x + x^4 Q6 Q4 x)",
            multiply(&power(&y5, 2), &bracket),
        ),
    ]
}

/// Evaluates the full ten-term sum and returns the normalized residual
/// (zero when the relation holds). Every summand is checked to be
/// homogeneous of degree 30 first.
pub fn verify_big_relation() -> Result<QPolynomial> {
    let terms = big_relation_terms();
    let mut residual = QPolynomial::zero();
    for (name, t) in &terms {
        match t.homogeneous_degree() {
            Some(30) => {}
            other => {
                return Err(Error::Presentation(format!(
                    "summand {name} has degree {other:?}, expected 30"
                )))
            }
        }
        residual.add_assign(t);
    }
    Ok(residual)
}

/// The nine-term sum with summand `skip` deleted.
pub fn big_relation_residual_without(skip: usize) -> QPolynomial {
    let mut residual = QPolynomial::zero();
    for (i, (_, t)) in big_relation_terms().iter().enumerate() {
        if i != skip {
            residual.add_assign(t);
        }
    }
    residual
}

/// Left-vs-right rewriting in the free operator algebra (no generator,
/// no instability), for confluence checks.
pub fn normalize_q_word(word: &[u32], strategy: crate::ops::RewriteStrategy) -> Vec<Vec<u32>> {
    use crate::ops::RewriteStrategy;
    let mut result: Vec<Vec<u32>> = Vec::new();
    let mut pending: Vec<Vec<u32>> = vec![word.to_vec()];
    while let Some(w) = pending.pop() {
        let positions: Vec<usize> = (0..w.len().saturating_sub(1))
            .filter(|&i| w[i] > 2 * w[i + 1])
            .collect();
        let pick = match strategy {
            RewriteStrategy::LeftmostFirst => positions.first(),
            RewriteStrategy::RightmostFirst => positions.last(),
        };
        match pick {
            None => {
                if let Some(pos) = result.iter().position(|x| *x == w) {
                    result.remove(pos);
                } else {
                    result.push(w);
                }
            }
            Some(&i) => {
                for (r2, i2) in adem_reduce_q(w[i], w[i + 1]).expect("inadmissible") {
                    let mut next = w.clone();
                    next[i] = r2;
                    next[i + 1] = i2;
                    pending.push(next);
                }
            }
        }
    }
    result.sort();
    result
}

// --- rendering and parsing -------------------------------------------------

fn render_qmonomial(m: &QMonomial) -> String {
    let mut out = m.gen.clone();
    for &s in m.word.iter().rev() {
        out = format!("Q{s}({out})");
    }
    out
}

fn render_factor(m: &QMonomial, e: u32) -> String {
    let body = render_qmonomial(m);
    match (e, m.word.is_empty()) {
        (1, _) => body,
        (_, true) => format!("{body}^{e}"),
        (_, false) => format!("({body})^{e}"),
    }
}

/// Renders in the expression grammar accepted by [`parse_expression`].
pub fn render_qpolynomial(p: &QPolynomial) -> String {
    if p.is_zero() {
        return "0".into();
    }
    p.terms
        .iter()
        .map(|t| {
            if t.factors.is_empty() {
                "1".to_string()
            } else {
                t.factors
                    .iter()
                    .map(|(m, &e)| render_factor(m, e))
                    .collect::<Vec<_>>()
                    .join("*")
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Expression grammar:
///
/// ```text
/// expr   := term ('+' term)*
/// term   := factor ('*' factor)*
/// factor := atom ('^' uint)?
/// atom   := 'Q' uint '(' expr ')' | ident | '(' expr ')' | '0' | '1'
/// ```
///
/// Every identifier is a generator of degree `gen_degree`.
pub fn parse_expression(text: &str, gen_degree: i32) -> Result<QPolynomial> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        gen_degree,
    };
    let p = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::Parse(format!(
            "trailing input at token {:?}",
            parser.tokens[parser.pos]
        )));
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Q(u32),
    Ident(String),
    Number(u32),
    Plus,
    Star,
    Caret,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            '*' => {
                tokens.push(Token::Star);
                i += 1;
            }
            '^' => {
                tokens.push(Token::Caret);
                i += 1;
            }
            '(' => {
                tokens.push(Token::Open);
                i += 1;
            }
            ')' => {
                tokens.push(Token::Close);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let n: u32 = chars[start..i]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| Error::Parse("number too large".into()))?;
                tokens.push(Token::Number(n));
            }
            'Q' if i + 1 < chars.len() && chars[i + 1].is_ascii_digit() => {
                i += 1;
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let n: u32 = chars[start..i]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| Error::Parse("Q-index too large".into()))?;
                tokens.push(Token::Q(n));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                tokens.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(Error::Parse(format!("unexpected character `{other}`"))),
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    gen_degree: i32,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn expect(&mut self, t: Token) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "expected {t:?}, found {:?}",
                self.peek()
            )))
        }
    }

    fn expr(&mut self) -> Result<QPolynomial> {
        let mut p = self.term()?;
        while self.peek() == Some(&Token::Plus) {
            self.pos += 1;
            let q = self.term()?;
            p.add_assign(&q);
        }
        Ok(p)
    }

    fn term(&mut self) -> Result<QPolynomial> {
        let mut p = self.factor()?;
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            let q = self.factor()?;
            p = multiply(&p, &q);
        }
        Ok(p)
    }

    fn factor(&mut self) -> Result<QPolynomial> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Token::Number(e)) => {
                    self.pos += 1;
                    Ok(power(&base, e))
                }
                other => Err(Error::Parse(format!("expected exponent, found {other:?}"))),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<QPolynomial> {
        match self.peek().cloned() {
            Some(Token::Q(s)) => {
                self.pos += 1;
                self.expect(Token::Open)?;
                let inner = self.expr()?;
                self.expect(Token::Close)?;
                Ok(q_apply(s, &inner))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                Ok(QPolynomial::generator(name, self.gen_degree))
            }
            Some(Token::Number(0)) => {
                self.pos += 1;
                Ok(QPolynomial::zero())
            }
            Some(Token::Number(1)) => {
                self.pos += 1;
                Ok(QPolynomial::one())
            }
            Some(Token::Open) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(Token::Close)?;
                Ok(inner)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> QPolynomial {
        QPolynomial::generator("x", 2)
    }

    #[test]
    fn adem_q_pairs() {
        assert!(adem_reduce_q(9, 4).unwrap().is_empty());
        assert_eq!(
            adem_reduce_q(22, 6).unwrap(),
            vec![(17, 11), (15, 13), (14, 14), (13, 15)]
        );
        // (2s, s) is admissible and must be rejected as input
        assert!(matches!(
            adem_reduce_q(8, 4),
            Err(Error::AdemPrecondition { .. })
        ));
    }

    #[test]
    fn instability_and_squares() {
        assert_eq!(q_apply(2, &x()), power(&x(), 2));
        assert!(q_apply(1, &x()).is_zero());
        let x_sq = power(&x(), 2);
        let q3x = q_apply(3, &x());
        assert_eq!(q_apply(6, &x_sq), power(&q3x, 2));
        assert!(q_apply(5, &x_sq).is_zero());
    }

    #[test]
    fn adem_on_degree_two_class() {
        // Q22 Q6 (x) = Q17 Q11 (x) + Q15 Q13 (x): the last two Adem pairs
        // die by instability on a degree-2 class
        let lhs = q_apply(22, &q_apply(6, &x()));
        let mut rhs = q_apply(17, &q_apply(11, &x()));
        rhs.add_assign(&q_apply(15, &q_apply(13, &x())));
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.len(), 2);
    }

    #[test]
    fn named_classes() {
        assert_eq!(render_qpolynomial(&expand_named_class("y5").unwrap()), "Q3(x)");
        assert_eq!(
            render_qpolynomial(&expand_named_class("y8").unwrap()),
            "x^4 + Q6(x)"
        );
        assert_eq!(
            render_qpolynomial(&expand_named_class("y12").unwrap()),
            "(Q4(x))^2 + Q10(x)"
        );
        assert!(expand_named_class("y11").is_err());
    }

    #[test]
    fn multiply_basics() {
        assert!(multiply(&x(), &QPolynomial::zero()).is_zero());
        let sq = multiply(&x(), &x());
        assert_eq!(sq, power(&x(), 2));
        // (Q3 x)*(Q3 x) = (Q3 x)^2 = Q5(Q3 x) = Q6(x^2)
        let q3x = q_apply(3, &x());
        let direct = multiply(&q3x, &q3x);
        assert_eq!(direct, q_apply(5, &q3x));
        assert_eq!(direct, q_apply(6, &power(&x(), 2)));
    }

    #[test]
    fn summands_are_degree_30() {
        for (name, t) in big_relation_terms() {
            assert_eq!(t.homogeneous_degree(), Some(30), "summand {name}");
        }
    }

    #[test]
    fn big_relation_holds() {
        let residual = verify_big_relation().unwrap();
        assert!(
            residual.is_zero(),
            "residual has {} terms: {}",
            residual.len(),
            render_qpolynomial(&residual)
        );
        for skip in 0..10 {
            assert!(
                !big_relation_residual_without(skip).is_zero(),
                "deleting summand {skip} still cancels"
            );
        }
    }

    #[test]
    fn degree_law() {
        let y10 = expand_named_class("y10").unwrap();
        let q = q_apply(20, &y10);
        assert_eq!(q.homogeneous_degree(), Some(30));
    }

    #[test]
    fn parse_round_trip() {
        let p = parse_expression("Q20(Q8(x) + x^2*Q4(x))", 2).unwrap();
        let y10 = expand_named_class("y10").unwrap();
        assert_eq!(p, q_apply(20, &y10));
        let text = render_qpolynomial(&p);
        assert_eq!(parse_expression(&text, 2).unwrap(), p);
    }

    #[test]
    fn q_word_confluence_small() {
        use crate::ops::RewriteStrategy;
        let l = normalize_q_word(&[22, 6], RewriteStrategy::LeftmostFirst);
        let r = normalize_q_word(&[22, 6], RewriteStrategy::RightmostFirst);
        assert_eq!(l, r);
        assert_eq!(
            l,
            vec![vec![13, 15], vec![14, 14], vec![15, 13], vec![17, 11]]
        );
    }
}
