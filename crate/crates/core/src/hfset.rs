//! Hereditarily finite sets with atoms and tuples.
//!
//! [`Value`] is the semantic domain every other module evaluates into. Sets are
//! kept in canonical form (sorted, duplicate-free) so that the derived `Eq`,
//! `Ord` and `Hash` coincide with extensional equality.

use std::env;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Name of the distinguished "true" atom.
pub const TOP: &str = "⊤";
/// Name of the distinguished "false" atom.
pub const BOTTOM: &str = "⊥";

/// Environment variable overriding [`Limits::max_set_size`].
pub const MAX_SET_SIZE_ENV: &str = "SETKR_MAX_SET_SIZE";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("{op}: operand {found} is not a set")]
    NonSetOperand { op: &'static str, found: String },
    #[error("{what} exceeds limit ({actual} > {limit})")]
    SizeLimitExceeded {
        what: &'static str,
        limit: usize,
        actual: usize,
    },
    #[error("tuple needs at least two items, got {0}")]
    ShortTuple(usize),
}

/// Bounds that keep the finite domain finite in practice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_depth: usize,
    pub max_set_size: usize,
    pub max_power_base: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_depth: 64,
            max_set_size: 1 << 16,
            max_power_base: 16,
        }
    }
}

impl Limits {
    /// Defaults, with `SETKR_MAX_SET_SIZE` applied when set to a positive integer.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Some(n) = env::var(MAX_SET_SIZE_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
        {
            limits.max_set_size = n;
        }
        limits
    }

    pub fn check_size(&self, what: &'static str, actual: usize) -> Result<(), SetError> {
        if actual > self.max_set_size {
            return Err(SetError::SizeLimitExceeded {
                what,
                limit: self.max_set_size,
                actual,
            });
        }
        Ok(())
    }

    pub fn check_depth(&self, value: &Value) -> Result<(), SetError> {
        let depth = value.depth();
        if depth > self.max_depth {
            return Err(SetError::SizeLimitExceeded {
                what: "nesting depth",
                limit: self.max_depth,
                actual: depth,
            });
        }
        Ok(())
    }
}

/// Canonically ordered, duplicate-free elements of a set.
///
/// Only constructible through [`Value::set`] and friends, which establish the
/// ordering invariant.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elements(Arc<[Value]>);

impl Deref for Elements {
    type Target = [Value];
    fn deref(&self) -> &[Value] {
        &self.0
    }
}

/// Items of a tuple, length ≥ 2.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Items(Arc<[Value]>);

impl Deref for Items {
    type Target = [Value];
    fn deref(&self) -> &[Value] {
        &self.0
    }
}

/// An element of the semantic domain.
///
/// Variant order fixes the canonical total order: atoms < tuples < sets.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Atom(Arc<str>),
    Tuple(Items),
    Set(Elements),
}

impl Value {
    pub fn atom(name: impl AsRef<str>) -> Value {
        Value::Atom(Arc::from(name.as_ref()))
    }

    pub fn top() -> Value {
        Value::atom(TOP)
    }

    pub fn bottom() -> Value {
        Value::atom(BOTTOM)
    }

    pub fn boolean(b: bool) -> Value {
        if b {
            Value::top()
        } else {
            Value::bottom()
        }
    }

    pub fn empty() -> Value {
        Value::Set(Elements(Arc::from(Vec::new())))
    }

    /// Builds a set, sorting and removing duplicates.
    pub fn set(elements: impl IntoIterator<Item = Value>) -> Value {
        let mut v: Vec<Value> = elements.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Value::Set(Elements(Arc::from(v)))
    }

    /// Builds a set from elements already sorted and deduplicated.
    fn set_from_sorted(v: Vec<Value>) -> Value {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Value::Set(Elements(Arc::from(v)))
    }

    pub fn singleton(x: Value) -> Value {
        Value::set_from_sorted(vec![x])
    }

    pub fn tuple(items: impl IntoIterator<Item = Value>) -> Result<Value, SetError> {
        let v: Vec<Value> = items.into_iter().collect();
        if v.len() < 2 {
            return Err(SetError::ShortTuple(v.len()));
        }
        Ok(Value::Tuple(Items(Arc::from(v))))
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Tuple(Items(Arc::from(vec![a, b])))
    }

    /// Von Neumann ordinal for `n`: `0 = ∅`, `n+1 = n ∪ {n}`.
    pub fn ordinal(n: usize) -> Value {
        let mut acc: Vec<Value> = Vec::with_capacity(n);
        for _ in 0..n {
            let next = Value::set_from_sorted_unchecked(acc.clone());
            acc.push(next);
            acc.sort_unstable();
        }
        Value::set_from_sorted_unchecked(acc)
    }

    fn set_from_sorted_unchecked(mut v: Vec<Value>) -> Value {
        v.sort_unstable();
        v.dedup();
        Value::Set(Elements(Arc::from(v)))
    }

    /// Inverse of [`Value::ordinal`].
    pub fn as_ordinal(&self) -> Option<usize> {
        let elems = self.as_set()?;
        let n = elems.len();
        if *self == Value::ordinal(n) {
            Some(n)
        } else {
            None
        }
    }

    pub fn is_set(&self) -> bool {
        matches!(self, Value::Set(_))
    }

    pub fn as_set(&self) -> Option<&[Value]> {
        match self {
            Value::Set(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Value::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self.as_atom()? {
            TOP => Some(true),
            BOTTOM => Some(false),
            _ => None,
        }
    }

    fn expect_set(&self, op: &'static str) -> Result<&[Value], SetError> {
        self.as_set().ok_or_else(|| SetError::NonSetOperand {
            op,
            found: self.to_string(),
        })
    }

    /// Nesting depth: atoms are 0, a set or tuple is one more than its deepest
    /// element (so `∅` has depth 1).
    pub fn depth(&self) -> usize {
        match self {
            Value::Atom(_) => 0,
            Value::Tuple(items) => 1 + items.iter().map(Value::depth).max().unwrap_or(0),
            Value::Set(elems) => 1 + elems.iter().map(Value::depth).max().unwrap_or(0),
        }
    }

    /// Renames every atom through `f`, re-canonicalising sets.
    pub fn map_atoms(&self, f: &impl Fn(&str) -> Value) -> Value {
        match self {
            Value::Atom(a) => f(a),
            Value::Tuple(items) => Value::Tuple(Items(items.iter().map(|v| v.map_atoms(f)).collect())),
            Value::Set(elems) => Value::set(elems.iter().map(|v| v.map_atoms(f))),
        }
    }
}

pub fn set_union(a: &Value, b: &Value) -> Result<Value, SetError> {
    let (xs, ys) = (a.expect_set("∪")?, b.expect_set("∪")?);
    let mut out = Vec::with_capacity(xs.len() + ys.len());
    let (mut i, mut j) = (0, 0);
    while i < xs.len() && j < ys.len() {
        match xs[i].cmp(&ys[j]) {
            std::cmp::Ordering::Less => {
                out.push(xs[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(ys[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(xs[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&xs[i..]);
    out.extend_from_slice(&ys[j..]);
    Ok(Value::set_from_sorted(out))
}

pub fn set_intersect(a: &Value, b: &Value) -> Result<Value, SetError> {
    let (xs, ys) = (a.expect_set("∩")?, b.expect_set("∩")?);
    let out = xs
        .iter()
        .filter(|x| ys.binary_search(x).is_ok())
        .cloned()
        .collect();
    Ok(Value::set_from_sorted(out))
}

pub fn set_difference(a: &Value, b: &Value) -> Result<Value, SetError> {
    let (xs, ys) = (a.expect_set("∖")?, b.expect_set("∖")?);
    let out = xs
        .iter()
        .filter(|x| ys.binary_search(x).is_err())
        .cloned()
        .collect();
    Ok(Value::set_from_sorted(out))
}

pub fn cartesian_product(a: &Value, b: &Value, limits: &Limits) -> Result<Value, SetError> {
    let (xs, ys) = (a.expect_set("×")?, b.expect_set("×")?);
    limits.check_size("cartesian product", xs.len().saturating_mul(ys.len()))?;
    // Lexicographic pair order matches the canonical tuple order.
    let out = xs
        .iter()
        .flat_map(|x| ys.iter().map(move |y| Value::pair(x.clone(), y.clone())))
        .collect();
    Ok(Value::set_from_sorted(out))
}

pub fn power_set(a: &Value, limits: &Limits) -> Result<Value, SetError> {
    let xs = a.expect_set("2^")?;
    if xs.len() > limits.max_power_base {
        return Err(SetError::SizeLimitExceeded {
            what: "power set base",
            limit: limits.max_power_base,
            actual: xs.len(),
        });
    }
    limits.check_size("power set", 1usize << xs.len())?;
    let subsets = (0u64..1 << xs.len()).map(|mask| {
        Value::set_from_sorted(
            xs.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, x)| x.clone())
                .collect(),
        )
    });
    Ok(Value::set(subsets))
}

pub fn member(x: &Value, s: &Value) -> Result<bool, SetError> {
    Ok(s.expect_set("∈")?.binary_search(x).is_ok())
}

pub fn subset(a: &Value, b: &Value) -> Result<bool, SetError> {
    let (xs, ys) = (a.expect_set("⊆")?, b.expect_set("⊆")?);
    Ok(xs.len() <= ys.len() && xs.iter().all(|x| ys.binary_search(x).is_ok()))
}

pub fn cardinality(s: &Value) -> Result<usize, SetError> {
    Ok(s.expect_set("card")?.len())
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, xs: &[Value]) -> fmt::Result {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            Ok(())
        }
        match self {
            Value::Atom(a) => f.write_str(a),
            Value::Set(e) if e.is_empty() => f.write_str("∅"),
            Value::Set(e) => {
                f.write_str("{")?;
                list(f, e)?;
                f.write_str("}")
            }
            Value::Tuple(items) => {
                f.write_str("(")?;
                list(f, items)?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid value text at byte {offset}: {message}")]
pub struct ValueParseError {
    pub offset: usize,
    pub message: String,
}

/// Parses the canonical text rendering (`∅`, `{…}`, `(…)`, atom names).
impl FromStr for Value {
    type Err = ValueParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = TextParser { src: s, pos: 0 };
        let v = p.value()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.error("trailing input"));
        }
        Ok(v)
    }
}

struct TextParser<'a> {
    src: &'a str,
    pos: usize,
}

impl TextParser<'_> {
    fn error(&self, message: &str) -> ValueParseError {
        ValueParseError {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek().filter(|c| c.is_whitespace()) {
            self.pos += c.len_utf8();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn value(&mut self) -> Result<Value, ValueParseError> {
        self.skip_ws();
        if self.eat('∅') {
            return Ok(Value::empty());
        }
        if self.eat('{') {
            let items = self.items('}')?;
            return Ok(Value::set(items));
        }
        if self.eat('(') {
            let items = self.items(')')?;
            return Value::tuple(items).map_err(|e| self.error(&e.to_string()));
        }
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || "{}(),".contains(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        if start == self.pos {
            return Err(self.error("expected a value"));
        }
        Ok(Value::atom(&self.src[start..self.pos]))
    }

    fn items(&mut self, close: char) -> Result<Vec<Value>, ValueParseError> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(self.value()?);
            if self.eat(close) {
                return Ok(out);
            }
            if !self.eat(',') {
                return Err(self.error("expected ',' or closing bracket"));
            }
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
