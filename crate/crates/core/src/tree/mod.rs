//! The evolving individual.
//!
//! A GP-tree's join nodes carry no semantics, so both fitness functions and
//! all three HVL-Prime operations depend only on the in-order leaf sequence.
//! [`GpTree`] therefore stores that sequence (plus cached per-variable counts
//! and the expressed count) instead of an explicit binary tree. The
//! [`binary`] module keeps an explicit-tree model around to test that claim.

pub mod binary;
mod seq;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitness::Problem;
use crate::literal::{format_leaves, parse_leaves, Literal};
use crate::mutation::{MutationOp, Side};
use seq::LeafSeq;

/// How ORDER locates each variable's first occurrence after an edit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderTracking {
    /// Per-variable ordered index, O(log s) expected per query.
    #[default]
    Indexed,
    /// Linear scan of the sequence, O(s) per query.
    Rescan,
    /// Runs both and panics if they disagree.
    CrossCheck,
}

/// Size and expressed count of a tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeStats {
    pub size: usize,
    pub expressed: u32,
    pub problem: Problem,
}

#[derive(Clone)]
pub struct GpTree {
    problem: Problem,
    n: u32,
    seq: LeafSeq,
    pos_count: Vec<u32>,
    neg_count: Vec<u32>,
    expressed: Vec<bool>,
    expressed_count: u32,
    tracking: OrderTracking,
}

impl GpTree {
    pub fn new(problem: Problem, n: u32, leaves: &[Literal]) -> Result<Self> {
        Self::with_tracking(problem, n, leaves, OrderTracking::default())
    }

    pub fn with_tracking(
        problem: Problem,
        n: u32,
        leaves: &[Literal],
        tracking: OrderTracking,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("n", "must be at least 1"));
        }
        if leaves.is_empty() {
            return Err(Error::EmptyTree);
        }
        if let Some(bad) = leaves.iter().find(|l| l.var() > n) {
            return Err(Error::LiteralOutOfRange { var: bad.var(), n });
        }
        let indexed = problem == Problem::Order && tracking != OrderTracking::Rescan;
        let mut seq = LeafSeq::new(n, indexed);
        let mut pos_count = vec![0; n as usize];
        let mut neg_count = vec![0; n as usize];
        for &lit in leaves {
            seq.push(lit);
            if lit.is_positive() {
                pos_count[lit.var() as usize - 1] += 1;
            } else {
                neg_count[lit.var() as usize - 1] += 1;
            }
        }
        let mut tree = GpTree {
            problem,
            n,
            seq,
            pos_count,
            neg_count,
            expressed: vec![false; n as usize],
            expressed_count: 0,
            tracking,
        };
        for var in 1..=n {
            let e = tree.compute_expressed(var);
            tree.expressed[var as usize - 1] = e;
            tree.expressed_count += u32::from(e);
        }
        Ok(tree)
    }

    /// Parses the `x1 !x1 x2` text format.
    pub fn parse(problem: Problem, n: u32, text: &str) -> Result<Self> {
        Self::new(problem, n, &parse_leaves(text)?)
    }

    pub fn problem(&self) -> Problem {
        self.problem
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of leaves, s(t).
    #[inline]
    pub fn size(&self) -> usize {
        self.seq.len()
    }

    /// Number of expressed variables, v(t), maintained incrementally.
    #[inline]
    pub fn expressed(&self) -> u32 {
        self.expressed_count
    }

    pub fn stats(&self) -> TreeStats {
        TreeStats {
            size: self.size(),
            expressed: self.expressed(),
            problem: self.problem,
        }
    }

    pub fn leaf(&self, idx: usize) -> Literal {
        self.seq.get(idx)
    }

    pub fn leaves(&self) -> Vec<Literal> {
        self.seq.to_vec()
    }

    pub fn iter(&self) -> impl Iterator<Item = Literal> + '_ {
        self.seq.iter()
    }

    pub fn pos_count(&self, var: u32) -> u32 {
        self.pos_count[var as usize - 1]
    }

    pub fn neg_count(&self, var: u32) -> u32 {
        self.neg_count[var as usize - 1]
    }

    pub fn is_expressed(&self, var: u32) -> bool {
        self.expressed[var as usize - 1]
    }

    /// Fitness recomputed from scratch; equals [`GpTree::expressed`].
    pub fn full_fitness(&self) -> u32 {
        self.problem.evaluate(&self.leaves(), self.n)
    }

    /// Applies one HVL-Prime edit in place and returns the edit that undoes it,
    /// or `None` when the edit was a no-op (deleting the only leaf).
    pub fn apply(&mut self, op: &MutationOp) -> Result<Option<MutationOp>> {
        let size = self.size();
        let check_pos = |pos: usize| {
            if pos < size {
                Ok(())
            } else {
                Err(Error::PositionOutOfRange { pos, size })
            }
        };
        let check_lit = |lit: Literal| {
            if lit.var() <= self.n {
                Ok(())
            } else {
                Err(Error::LiteralOutOfRange {
                    var: lit.var(),
                    n: self.n,
                })
            }
        };
        match *op {
            MutationOp::Substitute { pos, literal } => {
                check_pos(pos)?;
                check_lit(literal)?;
                let old = self.seq.set(pos, literal);
                self.count(old, -1);
                self.count(literal, 1);
                self.refresh(old.var());
                if literal.var() != old.var() {
                    self.refresh(literal.var());
                }
                Ok(Some(MutationOp::Substitute { pos, literal: old }))
            }
            MutationOp::Insert {
                anchor,
                literal,
                side,
            } => {
                check_pos(anchor)?;
                check_lit(literal)?;
                let at = match side {
                    Side::Before => anchor,
                    Side::After => anchor + 1,
                };
                self.seq.insert(at, literal);
                self.count(literal, 1);
                self.refresh(literal.var());
                Ok(Some(MutationOp::Delete { pos: at }))
            }
            MutationOp::Delete { pos } => {
                check_pos(pos)?;
                if size == 1 {
                    return Ok(None);
                }
                let old = self.seq.remove(pos);
                self.count(old, -1);
                self.refresh(old.var());
                let undo = if pos < size - 1 {
                    MutationOp::Insert {
                        anchor: pos,
                        literal: old,
                        side: Side::Before,
                    }
                } else {
                    MutationOp::Insert {
                        anchor: pos - 1,
                        literal: old,
                        side: Side::After,
                    }
                };
                Ok(Some(undo))
            }
        }
    }

    /// Value-returning form of [`GpTree::apply`].
    pub fn apply_edit(&self, op: &MutationOp) -> Result<GpTree> {
        let mut next = self.clone();
        next.apply(op)?;
        Ok(next)
    }

    #[inline]
    fn count(&mut self, lit: Literal, delta: i32) {
        let slot = lit.var() as usize - 1;
        let counter = if lit.is_positive() {
            &mut self.pos_count[slot]
        } else {
            &mut self.neg_count[slot]
        };
        *counter = counter.wrapping_add_signed(delta);
    }

    fn refresh(&mut self, var: u32) {
        let now = self.compute_expressed(var);
        let slot = &mut self.expressed[var as usize - 1];
        if *slot != now {
            *slot = now;
            if now {
                self.expressed_count += 1;
            } else {
                self.expressed_count -= 1;
            }
        }
    }

    fn compute_expressed(&self, var: u32) -> bool {
        match self.problem {
            Problem::Majority => {
                let p = self.pos_count(var);
                p >= 1 && p >= self.neg_count(var)
            }
            Problem::Order => {
                let first = match self.tracking {
                    OrderTracking::Indexed => self.seq.first_of_indexed(var),
                    OrderTracking::Rescan => self.seq.first_of_scan(var),
                    OrderTracking::CrossCheck => {
                        let fast = self.seq.first_of_indexed(var);
                        let slow = self.seq.first_of_scan(var);
                        assert_eq!(fast, slow, "ORDER index disagrees with rescan for x{var}");
                        fast
                    }
                };
                debug_assert!(self.seq.is_indexed() || self.tracking == OrderTracking::Rescan);
                first.is_some_and(|l| l.is_positive())
            }
        }
    }

    /// Checks cached counts and fitness against a full scan.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let leaves = self.leaves();
        let mut pos = vec![0u32; self.n as usize];
        let mut neg = vec![0u32; self.n as usize];
        for l in &leaves {
            if l.is_positive() {
                pos[l.var() as usize - 1] += 1;
            } else {
                neg[l.var() as usize - 1] += 1;
            }
        }
        if pos != self.pos_count || neg != self.neg_count {
            return Err("per-variable counts out of sync".into());
        }
        let full = self.problem.evaluate(&leaves, self.n);
        if full != self.expressed_count {
            return Err(format!(
                "incremental fitness {} != full fitness {full}",
                self.expressed_count
            ));
        }
        if leaves.is_empty() {
            return Err("tree is empty".into());
        }
        Ok(())
    }
}

impl PartialEq for GpTree {
    fn eq(&self, other: &Self) -> bool {
        self.problem == other.problem && self.n == other.n && self.iter().eq(other.iter())
    }
}

impl Eq for GpTree {}

impl fmt::Display for GpTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_leaves(&self.leaves()))
    }
}

impl fmt::Debug for GpTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GpTree")
            .field("problem", &self.problem)
            .field("n", &self.n)
            .field("leaves", &self.to_string())
            .field("expressed", &self.expressed_count)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mutation::{sample_operation, RngStream};

    #[test]
    fn apply_edit_examples() {
        let t = GpTree::parse(Problem::Majority, 1, "x1 !x1").unwrap();
        let t = t.apply_edit(&MutationOp::Delete { pos: 1 }).unwrap();
        assert_eq!(t.to_string(), "x1");
        assert_eq!(t.expressed(), 1);

        let t = GpTree::parse(Problem::Majority, 1, "x1").unwrap();
        let t = t
            .apply_edit(&MutationOp::Substitute {
                pos: 0,
                literal: Literal::neg(1),
            })
            .unwrap();
        assert_eq!(t.to_string(), "!x1");
        assert_eq!(t.expressed(), 0);

        let t = GpTree::parse(Problem::Order, 2, "!x2").unwrap();
        let t = t
            .apply_edit(&MutationOp::Insert {
                anchor: 0,
                literal: Literal::pos(2),
                side: Side::Before,
            })
            .unwrap();
        assert_eq!(t.to_string(), "x2 !x2");
        assert_eq!(t.expressed(), 1);
    }

    #[test]
    fn out_of_range_edits_are_rejected() {
        let mut t = GpTree::parse(Problem::Order, 2, "x1 x2").unwrap();
        assert!(matches!(
            t.apply(&MutationOp::Delete { pos: 2 }),
            Err(Error::PositionOutOfRange { pos: 2, size: 2 })
        ));
        assert!(matches!(
            t.apply(&MutationOp::Substitute {
                pos: 0,
                literal: Literal::pos(3)
            }),
            Err(Error::LiteralOutOfRange { var: 3, n: 2 })
        ));
        assert_eq!(t.to_string(), "x1 x2");
    }

    #[test]
    fn construction_validates_input() {
        assert!(matches!(
            GpTree::new(Problem::Order, 1, &[]),
            Err(Error::EmptyTree)
        ));
        assert!(matches!(
            GpTree::parse(Problem::Order, 1, "x2"),
            Err(Error::LiteralOutOfRange { var: 2, n: 1 })
        ));
    }

    #[test]
    fn deleting_the_last_leaf_is_a_noop() {
        let mut t = GpTree::parse(Problem::Majority, 1, "!x1").unwrap();
        assert_eq!(t.apply(&MutationOp::Delete { pos: 0 }).unwrap(), None);
        assert_eq!(t.to_string(), "!x1");
    }

    #[test]
    fn undo_restores_the_tree() {
        for problem in [Problem::Order, Problem::Majority] {
            let mut rng = RngStream::new(3);
            let mut t = GpTree::parse(problem, 3, "x1 !x2 x3 !x1 x2").unwrap();
            for _ in 0..500 {
                let before = t.clone();
                let mut undo = Vec::new();
                for _ in 0..3 {
                    let op = sample_operation(t.size(), 3, &mut rng);
                    if let Some(inv) = t.apply(&op).unwrap() {
                        undo.push(inv);
                    }
                }
                let after = t.clone();
                for inv in undo.iter().rev() {
                    t.apply(inv).unwrap();
                }
                assert_eq!(t, before);
                assert_eq!(t.expressed(), before.expressed());
                t = after;
            }
        }
    }

    #[test]
    fn all_tracking_modes_agree() {
        let mut rng = RngStream::new(11);
        let start = "!x1 x2 x1 !x3 x3 !x2";
        let mut trees: Vec<GpTree> = [
            OrderTracking::Indexed,
            OrderTracking::Rescan,
            OrderTracking::CrossCheck,
        ]
        .into_iter()
        .map(|m| {
            GpTree::with_tracking(Problem::Order, 3, &parse_leaves(start).unwrap(), m).unwrap()
        })
        .collect();
        for _ in 0..3000 {
            let op = sample_operation(trees[0].size(), 3, &mut rng);
            for t in &mut trees {
                t.apply(&op).unwrap();
            }
            let v = trees[0].expressed();
            assert!(trees.iter().all(|t| t.expressed() == v));
            assert_eq!(v, trees[0].full_fitness());
        }
        trees[0].seq.check_index();
    }
}
