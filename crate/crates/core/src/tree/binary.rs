//! Explicit binary GP-tree with join inner nodes.
//!
//! Used as a debug model: applying HVL-Prime edits here (by in-order leaf
//! index) must produce the same in-order leaf sequence as [`super::GpTree`].

use crate::literal::Literal;
use crate::mutation::{MutationOp, Side};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BinaryTree {
    Leaf(Literal),
    Join(Box<BinaryTree>, Box<BinaryTree>),
}

impl BinaryTree {
    /// Builds a left-leaning chain of joins over `leaves`.
    ///
    /// # Panics
    /// If `leaves` is empty.
    pub fn from_leaves(leaves: &[Literal]) -> Self {
        let mut it = leaves.iter();
        let mut tree = BinaryTree::Leaf(*it.next().expect("at least one leaf"));
        for &lit in it {
            tree = BinaryTree::Join(Box::new(tree), Box::new(BinaryTree::Leaf(lit)));
        }
        tree
    }

    pub fn leaves(&self) -> Vec<Literal> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<Literal>) {
        match self {
            BinaryTree::Leaf(l) => out.push(*l),
            BinaryTree::Join(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            BinaryTree::Leaf(_) => 1,
            BinaryTree::Join(a, b) => a.leaf_count() + b.leaf_count(),
        }
    }

    /// Number of nodes (leaves and joins).
    pub fn complexity(&self) -> usize {
        2 * self.leaf_count() - 1
    }

    /// Applies an edit with the tree semantics: substitute relabels the
    /// chosen leaf, insert replaces it by a join of itself and the new leaf,
    /// delete replaces its parent by its sibling. Deleting the root leaf is a
    /// no-op. Positions are assumed valid.
    pub fn apply(&mut self, op: &MutationOp) {
        match *op {
            MutationOp::Substitute { pos, literal } => {
                *self.leaf_mut(pos) = BinaryTree::Leaf(literal);
            }
            MutationOp::Insert {
                anchor,
                literal,
                side,
            } => {
                let slot = self.leaf_mut(anchor);
                let old = std::mem::replace(slot, BinaryTree::Leaf(literal));
                let new = BinaryTree::Leaf(literal);
                *slot = match side {
                    Side::Before => BinaryTree::Join(Box::new(new), Box::new(old)),
                    Side::After => BinaryTree::Join(Box::new(old), Box::new(new)),
                };
            }
            MutationOp::Delete { pos } => {
                if let BinaryTree::Leaf(_) = self {
                    return;
                }
                self.delete_leaf(pos);
            }
        }
    }

    fn leaf_mut(&mut self, idx: usize) -> &mut BinaryTree {
        match self {
            BinaryTree::Leaf(_) => {
                debug_assert_eq!(idx, 0);
                self
            }
            BinaryTree::Join(a, b) => {
                let la = a.leaf_count();
                if idx < la {
                    a.leaf_mut(idx)
                } else {
                    b.leaf_mut(idx - la)
                }
            }
        }
    }

    /// `self` is a join containing leaf `idx`; splices out that leaf.
    fn delete_leaf(&mut self, idx: usize) {
        let BinaryTree::Join(a, b) = self else {
            unreachable!("delete_leaf on a leaf")
        };
        let la = a.leaf_count();
        if idx < la {
            if matches!(**a, BinaryTree::Leaf(_)) {
                let sibling = std::mem::replace(&mut **b, BinaryTree::Leaf(Literal::pos(1)));
                *self = sibling;
            } else {
                a.delete_leaf(idx);
            }
        } else if matches!(**b, BinaryTree::Leaf(_)) {
            let sibling = std::mem::replace(&mut **a, BinaryTree::Leaf(Literal::pos(1)));
            *self = sibling;
        } else {
            b.delete_leaf(idx - la);
        }
    }
}
