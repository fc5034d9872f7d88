//! From-scratch fitness evaluation for ORDER and MAJORITY.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::literal::Literal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Order,
    Majority,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Order => "order",
            Problem::Majority => "majority",
        }
    }

    /// Full O(s + n) evaluation of the number of expressed variables.
    pub fn evaluate(self, leaves: &[Literal], n: u32) -> u32 {
        match self {
            Problem::Order => order_fitness(leaves, n),
            Problem::Majority => majority_fitness(leaves, n),
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "order" => Ok(Problem::Order),
            "majority" => Ok(Problem::Majority),
            other => Err(Error::config(
                "problem",
                format!("expected `order` or `majority`, got `{other}`"),
            )),
        }
    }
}

/// Number of variables whose first literal in the sequence is positive.
pub fn order_fitness(leaves: &[Literal], n: u32) -> u32 {
    let mut seen = vec![false; n as usize];
    let mut expressed = 0;
    for lit in leaves {
        let slot = &mut seen[lit.var() as usize - 1];
        if !*slot {
            *slot = true;
            if lit.is_positive() {
                expressed += 1;
            }
        }
    }
    expressed
}

/// Number of variables with at least one positive literal and no more
/// negative than positive literals.
pub fn majority_fitness(leaves: &[Literal], n: u32) -> u32 {
    let mut pos = vec![0u32; n as usize];
    let mut neg = vec![0u32; n as usize];
    for lit in leaves {
        let i = lit.var() as usize - 1;
        if lit.is_positive() {
            pos[i] += 1;
        } else {
            neg[i] += 1;
        }
    }
    pos.iter()
        .zip(&neg)
        .filter(|&(&p, &q)| p >= 1 && p >= q)
        .count() as u32
}
