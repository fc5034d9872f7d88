//! Leaf labels and the whitespace-separated tree text format.
//!
//! A tree is written as its in-order leaf sequence, one token per leaf:
//! `x<i>` for a positive literal and `!x<i>` for its complement, e.g.
//! `x1 !x1 x2`. Variable indices are 1-based, written without leading zeros.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A signed reference to one of the `n` variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: u32,
    positive: bool,
}

impl Literal {
    /// # Panics
    /// If `var` is zero.
    pub fn new(var: u32, positive: bool) -> Self {
        assert!(var >= 1, "variable indices start at 1");
        Literal { var, positive }
    }

    pub fn pos(var: u32) -> Self {
        Literal::new(var, true)
    }

    pub fn neg(var: u32) -> Self {
        Literal::new(var, false)
    }

    /// 1-based variable index.
    #[inline]
    pub fn var(self) -> u32 {
        self.var
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.positive
    }

    pub fn complement(self) -> Self {
        Literal {
            var: self.var,
            positive: !self.positive,
        }
    }

    /// Maps `0..2n` onto the literal alphabet: even codes are positive.
    #[inline]
    pub fn from_code(code: u64) -> Self {
        Literal {
            var: (code / 2) as u32 + 1,
            positive: code.is_multiple_of(2),
        }
    }

    #[inline]
    pub fn code(self) -> u64 {
        u64::from(self.var - 1) * 2 + u64::from(!self.positive)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "x{}", self.var)
        } else {
            write!(f, "!x{}", self.var)
        }
    }
}

fn parse_token(index: usize, token: &str) -> Result<Literal> {
    let err = |reason| Error::TreeParse {
        index,
        token: token.to_string(),
        reason,
    };
    let (positive, rest) = match token.strip_prefix('!') {
        Some(rest) => (false, rest),
        None => (true, token),
    };
    let digits = rest
        .strip_prefix('x')
        .ok_or_else(|| err("expected `x<i>` or `!x<i>`"))?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err("variable index must be a decimal number"));
    }
    if digits.starts_with('0') {
        return Err(err("variable index must be positive without leading zeros"));
    }
    let var: u32 = digits
        .parse()
        .map_err(|_| err("variable index does not fit in 32 bits"))?;
    Ok(Literal { var, positive })
}

impl FromStr for Literal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_token(0, s)
    }
}

impl Serialize for Literal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Literal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses the tree text format into a leaf sequence. The result may be empty.
pub fn parse_leaves(text: &str) -> Result<Vec<Literal>> {
    text.split_whitespace()
        .enumerate()
        .map(|(i, tok)| parse_token(i, tok))
        .collect()
}

/// Emits the canonical text form: tokens separated by single spaces.
pub fn format_leaves<'a, I>(leaves: I) -> String
where
    I: IntoIterator<Item = &'a Literal>,
{
    let mut out = String::new();
    for (i, lit) in leaves.into_iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&lit.to_string());
    }
    out
}
