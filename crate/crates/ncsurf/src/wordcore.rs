//! Free groups, their integral group rings, and subgroup membership.
//!
//! Words are kept freely reduced at all times. Algebra elements are finite
//! integer combinations of words stored in shortlex order, so two elements
//! are equal exactly when their term maps are equal.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("element is not a unit: {0}")]
    NotAUnit(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn at(column: usize, message: impl Into<String>) -> Self {
        ParseError { line: 1, column, message: message.into() }
    }
}

/// Interned name of an abstract generator.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Name(u32);

struct Interner {
    names: Vec<&'static str>,
    ids: HashMap<&'static str, u32>,
}

fn interner() -> &'static RwLock<Interner> {
    static CELL: OnceLock<RwLock<Interner>> = OnceLock::new();
    CELL.get_or_init(|| RwLock::new(Interner { names: Vec::new(), ids: HashMap::new() }))
}

impl Name {
    fn intern(s: &str) -> Name {
        if let Some(&id) = interner().read().unwrap().ids.get(s) {
            return Name(id);
        }
        let mut g = interner().write().unwrap();
        if let Some(&id) = g.ids.get(s) {
            return Name(id);
        }
        let leaked: &'static str = Box::leak(s.to_owned().into_boxed_str());
        let id = g.names.len() as u32;
        g.names.push(leaked);
        g.ids.insert(leaked, id);
        Name(id)
    }

    pub fn as_str(&self) -> &'static str {
        interner().read().unwrap().names[self.0 as usize]
    }
}

impl Ord for Name {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.0 == other.0 {
            Ordering::Equal
        } else {
            self.as_str().cmp(other.as_str())
        }
    }
}

impl PartialOrd for Name {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum CylKind {
    X,
    Xbar,
    C,
    Cbar,
    D,
    Dbar,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum StripKind {
    U,
    V,
    A,
    Abar,
    B,
    Bbar,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum PunctKind {
    Plus,
    Minus,
    Loop,
}

/// A generator of a free group.
///
/// The derived order (family first, then payload) is the total order used
/// for canonical term ordering.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Symbol {
    /// Oriented polygon edge `t(i,j)`.
    Edge(u32, u32),
    /// Annulus generator; the index is ignored for `D` and `Dbar`.
    Cyl(CylKind, i32),
    /// Strip generator. `U`/`V` use both indices, the boundary families only the first.
    Strip(StripKind, i32, i32),
    /// Curve on the once-punctured polygon; `Loop` uses only the first index.
    Punct(PunctKind, u32, u32),
    Abstract(Name),
}

impl Symbol {
    /// Abstract generator. Names that would parse as another family are rejected.
    pub fn named(name: &str) -> Result<Symbol, ParseError> {
        let mut chars = name.chars();
        let ok_start = chars.next().map_or(false, |c| c.is_ascii_alphabetic());
        let ok_rest = chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok_start || !ok_rest {
            return Err(ParseError::at(1, format!("invalid generator name {name:?}")));
        }
        if let Some(s) = parse_family(name) {
            return Err(ParseError::at(
                1,
                format!("name {name:?} collides with the structured symbol {s}"),
            ));
        }
        Ok(Symbol::Abstract(Name::intern(name)))
    }

    pub fn edge(i: u32, j: u32) -> Symbol {
        Symbol::Edge(i, j)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Symbol::Edge(i, j) => write!(f, "t({i},{j})"),
            Symbol::Cyl(k, i) => match k {
                CylKind::X => write!(f, "x{i}"),
                CylKind::Xbar => write!(f, "xbar{i}"),
                CylKind::C => write!(f, "c{i}"),
                CylKind::Cbar => write!(f, "cbar{i}"),
                CylKind::D => write!(f, "d"),
                CylKind::Dbar => write!(f, "dbar"),
            },
            Symbol::Strip(k, i, j) => match k {
                StripKind::U => write!(f, "U({i},{j})"),
                StripKind::V => write!(f, "V({i},{j})"),
                StripKind::A => write!(f, "A{i}"),
                StripKind::Abar => write!(f, "Abar{i}"),
                StripKind::B => write!(f, "B{i}"),
                StripKind::Bbar => write!(f, "Bbar{i}"),
            },
            Symbol::Punct(k, i, j) => match k {
                PunctKind::Plus => write!(f, "x+({i},{j})"),
                PunctKind::Minus => write!(f, "x-({i},{j})"),
                PunctKind::Loop => write!(f, "loop{i}"),
            },
            Symbol::Abstract(n) => write!(f, "{}", n.as_str()),
        }
    }
}

fn parse_pair<T: std::str::FromStr>(s: &str) -> Option<(T, T)> {
    let inner = s.strip_prefix('(')?.strip_suffix(')')?;
    let (a, b) = inner.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

fn parse_family(s: &str) -> Option<Symbol> {
    use CylKind as C;
    use StripKind as S;
    if let Some(rest) = s.strip_prefix("t(") {
        let (i, j) = parse_pair::<u32>(&format!("({rest}"))?;
        return Some(Symbol::Edge(i, j));
    }
    if let Some(rest) = s.strip_prefix("x+") {
        let (i, j) = parse_pair::<u32>(rest)?;
        return Some(Symbol::Punct(PunctKind::Plus, i, j));
    }
    if let Some(rest) = s.strip_prefix("x-") {
        let (i, j) = parse_pair::<u32>(rest)?;
        return Some(Symbol::Punct(PunctKind::Minus, i, j));
    }
    if let Some(rest) = s.strip_prefix("loop") {
        return Some(Symbol::Punct(PunctKind::Loop, rest.parse().ok()?, 0));
    }
    if let Some(rest) = s.strip_prefix('U') {
        let (i, j) = parse_pair::<i32>(rest)?;
        return Some(Symbol::Strip(S::U, i, j));
    }
    if let Some(rest) = s.strip_prefix('V') {
        let (i, j) = parse_pair::<i32>(rest)?;
        return Some(Symbol::Strip(S::V, i, j));
    }
    if s == "d" {
        return Some(Symbol::Cyl(C::D, 0));
    }
    if s == "dbar" {
        return Some(Symbol::Cyl(C::Dbar, 0));
    }
    let prefixed: [(&str, Symbol); 8] = [
        ("xbar", Symbol::Cyl(C::Xbar, 0)),
        ("cbar", Symbol::Cyl(C::Cbar, 0)),
        ("x", Symbol::Cyl(C::X, 0)),
        ("c", Symbol::Cyl(C::C, 0)),
        ("Abar", Symbol::Strip(S::Abar, 0, 0)),
        ("Bbar", Symbol::Strip(S::Bbar, 0, 0)),
        ("A", Symbol::Strip(S::A, 0, 0)),
        ("B", Symbol::Strip(S::B, 0, 0)),
    ];
    for (p, template) in prefixed {
        if let Some(rest) = s.strip_prefix(p) {
            if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit() || c == '-') {
                continue;
            }
            let idx: i32 = rest.parse().ok()?;
            return Some(match template {
                Symbol::Cyl(k, _) => Symbol::Cyl(k, idx),
                Symbol::Strip(k, _, _) => Symbol::Strip(k, idx, 0),
                _ => unreachable!(),
            });
        }
    }
    None
}

impl std::str::FromStr for Symbol {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match parse_family(s) {
            Some(sym) => Ok(sym),
            None => Symbol::named(s),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Letter {
    pub sym: Symbol,
    pub exp: i8,
}

impl Letter {
    pub fn new(sym: Symbol, exp: i8) -> Letter {
        debug_assert!(exp == 1 || exp == -1);
        Letter { sym, exp }
    }

    pub fn inv(self) -> Letter {
        Letter { sym: self.sym, exp: -self.exp }
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Word(Vec<Letter>);

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Free reduction of an arbitrary signed-symbol sequence.
pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
    let mut w = Word::empty();
    for l in letters {
        w.push(l);
    }
    w
}

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn letter(sym: Symbol, exp: i8) -> Word {
        Word(vec![Letter::new(sym, exp)])
    }

    pub fn gen(sym: Symbol) -> Word {
        Word::letter(sym, 1)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Appends a letter, cancelling against the last one if possible.
    pub fn push(&mut self, l: Letter) {
        match self.0.last() {
            Some(&last) if last.sym == l.sym && last.exp == -l.exp => {
                self.0.pop();
            }
            _ => self.0.push(l),
        }
    }

    pub fn append(&mut self, other: &Word) {
        for &l in &other.0 {
            self.push(l);
        }
    }

    pub fn append_inv(&mut self, other: &Word) {
        for &l in other.0.iter().rev() {
            self.push(l.inv());
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = Word(Vec::with_capacity(self.len() + other.len()));
        out.0.extend_from_slice(&self.0);
        out.append(other);
        out
    }

    pub fn inv(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    /// Image under the group homomorphism sending each generator to `f(sym)`.
    pub fn substitute<F: FnMut(Symbol) -> Word>(&self, mut f: F) -> Word {
        let mut out = Word::empty();
        for l in &self.0 {
            let img = f(l.sym);
            if l.exp == 1 {
                out.append(&img);
            } else {
                out.append_inv(&img);
            }
        }
        out
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.0.iter().map(|l| l.sym)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ".")?;
            }
            if l.exp == 1 {
                write!(f, "{}", l.sym)?;
            } else {
                write!(f, "{}^-1", l.sym)?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for Word {
    type Err = ParseError;

    /// Parses the `Display` form: letters joined by `.`, inverses as `^-1`, `1` for the identity.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        let mut column = 1;
        for part in s.split('.') {
            let (body, exp) = match part.strip_suffix("^-1") {
                Some(b) => (b, -1),
                None => (part, 1),
            };
            let sym: Symbol = body.parse().map_err(|e: ParseError| ParseError::at(column, e.message))?;
            letters.push(Letter::new(sym, exp));
            column += part.len() + 1;
        }
        Ok(reduce(letters))
    }
}

pub fn word_mul(u: &Word, v: &Word) -> Word {
    u.mul(v)
}

pub fn word_inv(u: &Word) -> Word {
    u.inv()
}

/// Element of the integral group ring of a free group.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct AlgebraElement {
    terms: BTreeMap<Word, BigInt>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement::default()
    }

    pub fn one() -> Self {
        AlgebraElement::from_word(Word::empty())
    }

    pub fn from_word(w: Word) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(w, BigInt::one());
        AlgebraElement { terms }
    }

    pub fn gen(sym: Symbol) -> Self {
        AlgebraElement::from_word(Word::gen(sym))
    }

    pub fn monomial(coeff: impl Into<BigInt>, w: Word) -> Self {
        let mut a = AlgebraElement::zero();
        a.add_term(w, coeff.into());
        a
    }

    pub fn from_words<I: IntoIterator<Item = Word>>(words: I) -> Self {
        let mut a = AlgebraElement::zero();
        for w in words {
            a.add_term(w, BigInt::one());
        }
        a
    }

    pub fn add_term(&mut self, w: Word, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in shortlex order of their words.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigInt)> {
        self.terms.iter()
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.terms.keys()
    }

    pub fn coeff(&self, w: &Word) -> BigInt {
        self.terms.get(w).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn all_coefficients_one(&self) -> bool {
        self.terms.values().all(|c| c.is_one())
    }

    pub fn neg(&self) -> Self {
        AlgebraElement { terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut acc: HashMap<Word, BigInt> = HashMap::new();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                *acc.entry(u.mul(v)).or_insert_with(BigInt::zero) += a * b;
            }
        }
        AlgebraElement { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    /// Left multiplication by a single word.
    pub fn left_mul_word(&self, w: &Word) -> Self {
        let mut out = AlgebraElement::zero();
        for (u, c) in &self.terms {
            out.add_term(w.mul(u), c.clone());
        }
        out
    }

    pub fn right_mul_word(&self, w: &Word) -> Self {
        let mut out = AlgebraElement::zero();
        for (u, c) in &self.terms {
            out.add_term(u.mul(w), c.clone());
        }
        out
    }

    /// The single word of a `+1` monomial, if this element is one.
    pub fn as_word(&self) -> Option<&Word> {
        match self.terms.iter().next() {
            Some((w, c)) if self.terms.len() == 1 && c.is_one() => Some(w),
            _ => None,
        }
    }

    /// Inverse of `±w`; any other element is rejected.
    pub fn inv_unit(&self) -> Result<Self, WordError> {
        if self.terms.len() == 1 {
            let (w, c) = self.terms.iter().next().unwrap();
            if c.abs().is_one() {
                return Ok(AlgebraElement::monomial(c.clone(), w.inv()));
            }
        }
        Err(WordError::NotAUnit(self.to_string()))
    }

    /// Image under the ring homomorphism induced by a group homomorphism.
    pub fn map_words<F: FnMut(&Word) -> Word>(&self, mut f: F) -> Self {
        let mut out = AlgebraElement::zero();
        for (w, c) in &self.terms {
            out.add_term(f(w), c.clone());
        }
        out
    }

    /// Image under the ring homomorphism sending each generator to `f(sym)`.
    /// Inverse letters require the image of their generator to be a unit.
    pub fn substitute<F>(&self, mut f: F) -> Result<Self, WordError>
    where
        F: FnMut(Symbol) -> AlgebraElement,
    {
        let mut cache: HashMap<Letter, AlgebraElement> = HashMap::new();
        let mut out = AlgebraElement::zero();
        for (w, c) in &self.terms {
            let mut m = AlgebraElement::monomial(c.clone(), Word::empty());
            for &l in w.letters() {
                if !cache.contains_key(&l) {
                    let img = f(l.sym);
                    let img = if l.exp == 1 { img } else { img.inv_unit()? };
                    cache.insert(l, img);
                }
                m = AlgebraElement::mul(&m, &cache[&l]);
            }
            out = &out + &m;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&RawElement::from(self)).expect("serializable")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(RawElement::from(self)).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        let raw: RawElement = serde_json::from_str(text).map_err(|e| ParseError {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Ok(raw.into_element())
    }
}

impl std::str::FromStr for AlgebraElement {
    type Err = ParseError;

    /// Parses the `Display` form, e.g. `a.b^-1 - 2*c + 3`. Terms are separated
    /// by whitespace-delimited `+` or `-`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = AlgebraElement::zero();
        let mut sign = 1;
        let mut expect_term = true;
        let mut first = true;
        let mut column = 1;
        for tok in s.split_whitespace() {
            let col = s[column - 1..].find(tok).map_or(column, |p| column + p);
            column = col + tok.len();
            if !expect_term {
                sign = match tok {
                    "+" => 1,
                    "-" => -1,
                    _ => return Err(ParseError::at(col, format!("expected + or -, found {tok:?}"))),
                };
                expect_term = true;
                continue;
            }
            let (neg, body) = match tok.strip_prefix('-') {
                Some(b) if first => (true, b),
                _ => (false, tok),
            };
            let (coeff, w) = match body.split_once('*') {
                Some((c, w)) => (c, w),
                None if body.parse::<BigInt>().is_ok() => (body, "1"),
                None => ("1", body),
            };
            let mut c: BigInt =
                coeff.parse().map_err(|_| ParseError::at(col, format!("invalid coefficient {coeff:?}")))?;
            if neg != (sign < 0) {
                c = -c;
            }
            let w: Word = w.parse().map_err(|e: ParseError| ParseError::at(col + e.column - 1, e.message))?;
            out.add_term(w, c);
            expect_term = false;
            first = false;
        }
        if expect_term {
            return Err(ParseError::at(column, "expected a term"));
        }
        Ok(out)
    }
}

pub fn alg_add(p: &AlgebraElement, q: &AlgebraElement) -> AlgebraElement {
    p + q
}

pub fn alg_mul(p: &AlgebraElement, q: &AlgebraElement) -> AlgebraElement {
    p.mul(q)
}

pub fn alg_neg(p: &AlgebraElement) -> AlgebraElement {
    p.neg()
}

pub fn alg_equal(p: &AlgebraElement, q: &AlgebraElement) -> bool {
    p == q
}

pub fn alg_inv_unit(p: &AlgebraElement) -> Result<AlgebraElement, WordError> {
    p.inv_unit()
}

impl AddAssign<&AlgebraElement> for AlgebraElement {
    fn add_assign(&mut self, rhs: &AlgebraElement) {
        for (w, c) in &rhs.terms {
            self.add_term(w.clone(), c.clone());
        }
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for AlgebraElement {
    type Output = AlgebraElement;
    fn add(mut self, rhs: AlgebraElement) -> AlgebraElement {
        self += &rhs;
        self
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }
}

impl Sub for AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: AlgebraElement) -> AlgebraElement {
        &self - &rhs
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement::neg(self)
    }
}

impl Neg for AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement::neg(&self)
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::mul(self, rhs)
    }
}

impl Mul for AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: AlgebraElement) -> AlgebraElement {
        AlgebraElement::mul(&self, &rhs)
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if mag.is_one() {
                write!(f, "{w}")?;
            } else if w.is_empty() {
                write!(f, "{mag}")?;
            } else {
                write!(f, "{mag}*{w}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct RawElement {
    terms: Vec<RawTerm>,
}

#[derive(Serialize, Deserialize)]
struct RawTerm {
    #[serde(deserialize_with = "de_coeff")]
    coeff: String,
    word: Vec<RawLetter>,
}

#[derive(Serialize, Deserialize)]
struct RawLetter {
    #[serde(deserialize_with = "de_gen")]
    gen: String,
    #[serde(deserialize_with = "de_exp")]
    exp: i8,
}

fn de_coeff<'de, D: Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    let s = String::deserialize(d)?;
    s.parse::<BigInt>()
        .map_err(|_| de::Error::custom(format!("invalid integer coefficient {s:?}")))?;
    Ok(s)
}

fn de_gen<'de, D: Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    let s = String::deserialize(d)?;
    s.parse::<Symbol>().map_err(|e| de::Error::custom(e.message))?;
    Ok(s)
}

fn de_exp<'de, D: Deserializer<'de>>(d: D) -> Result<i8, D::Error> {
    let e = i8::deserialize(d)?;
    if e == 1 || e == -1 {
        Ok(e)
    } else {
        Err(de::Error::custom(format!("exponent must be 1 or -1, got {e}")))
    }
}

impl From<&AlgebraElement> for RawElement {
    fn from(a: &AlgebraElement) -> Self {
        RawElement {
            terms: a
                .terms
                .iter()
                .map(|(w, c)| RawTerm {
                    coeff: c.to_string(),
                    word: w
                        .letters()
                        .iter()
                        .map(|l| RawLetter { gen: l.sym.to_string(), exp: l.exp })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl RawElement {
    fn into_element(self) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for t in self.terms {
            let c: BigInt = t.coeff.parse().expect("validated");
            let w = reduce(
                t.word
                    .iter()
                    .map(|l| Letter::new(l.gen.parse().expect("validated"), l.exp)),
            );
            out.add_term(w, c);
        }
        out
    }
}

/// One factor `h_generator^exp` of a subgroup factorization.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Factor {
    pub generator: usize,
    pub exp: i8,
}

type Label = Vec<Factor>;

fn label_push(l: &mut Label, f: Factor) {
    match l.last() {
        Some(last) if last.generator == f.generator && last.exp == -f.exp => {
            l.pop();
        }
        _ => l.push(f),
    }
}

fn label_mul(a: &Label, b: &Label) -> Label {
    let mut out = a.clone();
    for &f in b {
        label_push(&mut out, f);
    }
    out
}

fn label_inv(a: &Label) -> Label {
    a.iter().rev().map(|f| Factor { generator: f.generator, exp: -f.exp }).collect()
}

#[derive(Clone, Debug)]
struct GEdge {
    from: usize,
    to: usize,
    sym: Symbol,
    label: Label,
}

/// Folded core graph of a finitely generated subgroup of a free group.
///
/// Every edge carries a word in the subgroup generators; reading a closed
/// path at the base vertex and multiplying the edge labels yields a
/// factorization of the path word.
#[derive(Clone, Debug)]
pub struct SubgroupGraph {
    generators: Vec<Word>,
    edges: Vec<GEdge>,
}

impl SubgroupGraph {
    pub fn new(generators: &[Word]) -> SubgroupGraph {
        let mut edges = Vec::new();
        let mut next_vertex = 1usize;
        for (gi, g) in generators.iter().enumerate() {
            let n = g.len();
            let mut cur = 0usize;
            for (k, l) in g.letters().iter().enumerate() {
                let nxt = if k + 1 == n {
                    0
                } else {
                    next_vertex += 1;
                    next_vertex - 1
                };
                let label = if k + 1 == n { vec![Factor { generator: gi, exp: 1 }] } else { vec![] };
                let (from, to, label) =
                    if l.exp == 1 { (cur, nxt, label) } else { (nxt, cur, label_inv(&label)) };
                edges.push(GEdge { from, to, sym: l.sym, label });
                cur = nxt;
            }
        }
        let mut g = SubgroupGraph { generators: generators.to_vec(), edges };
        g.fold();
        g
    }

    fn find_fold(&self) -> Option<(usize, usize, bool)> {
        let mut seen: HashMap<(usize, Symbol, bool), usize> = HashMap::new();
        for (id, e) in self.edges.iter().enumerate() {
            for (v, outgoing) in [(e.from, true), (e.to, false)] {
                if let Some(&other) = seen.get(&(v, e.sym, outgoing)) {
                    if other != id {
                        return Some((other, id, outgoing));
                    }
                } else {
                    seen.insert((v, e.sym, outgoing), id);
                }
            }
        }
        None
    }

    fn fold(&mut self) {
        while let Some((e1, e2, outgoing)) = self.find_fold() {
            let a = if outgoing { self.edges[e1].to } else { self.edges[e1].from };
            let b = if outgoing { self.edges[e2].to } else { self.edges[e2].from };
            let (h1, h2) = (self.edges[e1].label.clone(), self.edges[e2].label.clone());
            // correction whose image is p(keep) p(drop)^-1
            let c_ab = if outgoing { label_mul(&label_inv(&h1), &h2) } else { label_mul(&h1, &label_inv(&h2)) };
            self.edges.remove(e2);
            if a == b {
                continue;
            }
            let (keep, drop, c) = if b == 0 { (b, a, label_inv(&c_ab)) } else { (a, b, c_ab) };
            let c_inv = label_inv(&c);
            for e in &mut self.edges {
                if e.from == drop {
                    e.from = keep;
                    e.label = label_mul(&c, &e.label);
                }
                if e.to == drop {
                    e.to = keep;
                    e.label = label_mul(&e.label, &c_inv);
                }
            }
        }
    }

    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    /// Factorization of `w` in the generators, or `None` if `w` is not in the subgroup.
    pub fn factor(&self, w: &Word) -> Option<Vec<Factor>> {
        let mut v = 0usize;
        let mut acc: Label = Vec::new();
        for l in w.letters() {
            let step = if l.exp == 1 {
                self.edges.iter().find(|e| e.from == v && e.sym == l.sym).map(|e| (e.to, e.label.clone()))
            } else {
                self.edges.iter().find(|e| e.to == v && e.sym == l.sym).map(|e| (e.from, label_inv(&e.label)))
            };
            let (nv, lab) = step?;
            for f in lab {
                label_push(&mut acc, f);
            }
            v = nv;
        }
        (v == 0).then_some(acc)
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.factor(w).is_some()
    }

    /// Multiplies a factorization back out.
    pub fn evaluate(&self, factors: &[Factor]) -> Word {
        let mut out = Word::empty();
        for f in factors {
            let g = &self.generators[f.generator];
            if f.exp == 1 {
                out.append(g);
            } else {
                out.append_inv(g);
            }
        }
        out
    }
}

pub fn stallings_membership(subgroup_generators: &[Word], w: &Word) -> Option<Vec<Factor>> {
    SubgroupGraph::new(subgroup_generators).factor(w)
}
