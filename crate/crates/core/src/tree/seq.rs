//! Arena-backed implicit treap holding the in-order leaf sequence.
//!
//! Every node also participates in a second treap, one per variable, that
//! orders that variable's leaves by their position in the main sequence.
//! The leftmost node of a variable treap is the variable's first occurrence,
//! which is what ORDER needs after each edit. Variable treaps are only
//! maintained when `indexed` is set.

use crate::literal::Literal;

const NIL: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Node {
    lit: Literal,
    prio: u32,
    size: u32,
    left: u32,
    right: u32,
    parent: u32,
    // Links in the per-variable treap.
    vleft: u32,
    vright: u32,
    vparent: u32,
}

#[derive(Clone, Debug)]
pub(crate) struct LeafSeq {
    nodes: Vec<Node>,
    free: Vec<u32>,
    root: u32,
    var_roots: Vec<u32>,
    indexed: bool,
    prio_state: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl LeafSeq {
    pub(crate) fn new(n: u32, indexed: bool) -> Self {
        LeafSeq {
            nodes: Vec::new(),
            free: Vec::new(),
            root: NIL,
            var_roots: if indexed {
                vec![NIL; n as usize]
            } else {
                Vec::new()
            },
            indexed,
            prio_state: 0x5EED,
        }
    }

    #[inline]
    pub(crate) fn len(&self) -> usize {
        self.size_of(self.root) as usize
    }

    #[inline]
    fn size_of(&self, t: u32) -> u32 {
        if t == NIL {
            0
        } else {
            self.nodes[t as usize].size
        }
    }

    fn alloc(&mut self, lit: Literal) -> u32 {
        let prio = splitmix64(&mut self.prio_state) as u32;
        let node = Node {
            lit,
            prio,
            size: 1,
            left: NIL,
            right: NIL,
            parent: NIL,
            vleft: NIL,
            vright: NIL,
            vparent: NIL,
        };
        match self.free.pop() {
            Some(id) => {
                self.nodes[id as usize] = node;
                id
            }
            None => {
                self.nodes.push(node);
                (self.nodes.len() - 1) as u32
            }
        }
    }

    #[inline]
    fn pull(&mut self, t: u32) {
        let (l, r) = {
            let node = &self.nodes[t as usize];
            (node.left, node.right)
        };
        self.nodes[t as usize].size = 1 + self.size_of(l) + self.size_of(r);
        if l != NIL {
            self.nodes[l as usize].parent = t;
        }
        if r != NIL {
            self.nodes[r as usize].parent = t;
        }
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.nodes[a as usize].prio > self.nodes[b as usize].prio {
            let r = self.merge(self.nodes[a as usize].right, b);
            self.nodes[a as usize].right = r;
            self.pull(a);
            a
        } else {
            let l = self.merge(a, self.nodes[b as usize].left);
            self.nodes[b as usize].left = l;
            self.pull(b);
            b
        }
    }

    /// Splits off the first `k` nodes.
    fn split(&mut self, t: u32, k: u32) -> (u32, u32) {
        if t == NIL {
            return (NIL, NIL);
        }
        let left = self.nodes[t as usize].left;
        let left_size = self.size_of(left);
        if left_size >= k {
            let (a, b) = self.split(left, k);
            self.nodes[t as usize].left = b;
            self.pull(t);
            (a, t)
        } else {
            let (a, b) = self.split(self.nodes[t as usize].right, k - left_size - 1);
            self.nodes[t as usize].right = a;
            self.pull(t);
            (t, b)
        }
    }

    fn set_root(&mut self, t: u32) {
        self.root = t;
        if t != NIL {
            self.nodes[t as usize].parent = NIL;
        }
    }

    fn node_at(&self, mut idx: u32) -> u32 {
        let mut t = self.root;
        loop {
            let node = &self.nodes[t as usize];
            let ls = self.size_of(node.left);
            if idx < ls {
                t = node.left;
            } else if idx == ls {
                return t;
            } else {
                idx -= ls + 1;
                t = node.right;
            }
        }
    }

    /// 0-based position of node `t` in the sequence.
    fn rank(&self, mut t: u32) -> u32 {
        let mut r = self.size_of(self.nodes[t as usize].left);
        loop {
            let p = self.nodes[t as usize].parent;
            if p == NIL {
                return r;
            }
            if self.nodes[p as usize].right == t {
                r += self.size_of(self.nodes[p as usize].left) + 1;
            }
            t = p;
        }
    }

    pub(crate) fn get(&self, idx: usize) -> Literal {
        assert!(idx < self.len());
        self.nodes[self.node_at(idx as u32) as usize].lit
    }

    pub(crate) fn insert(&mut self, idx: usize, lit: Literal) {
        assert!(idx <= self.len());
        let x = self.alloc(lit);
        let (a, b) = self.split(self.root, idx as u32);
        let ax = self.merge(a, x);
        let root = self.merge(ax, b);
        self.set_root(root);
        if self.indexed {
            self.var_insert(x);
        }
    }

    pub(crate) fn push(&mut self, lit: Literal) {
        self.insert(self.len(), lit);
    }

    pub(crate) fn remove(&mut self, idx: usize) -> Literal {
        assert!(idx < self.len());
        let x = self.node_at(idx as u32);
        if self.indexed {
            self.var_remove(x);
        }
        let (a, rest) = self.split(self.root, idx as u32);
        let (mid, b) = self.split(rest, 1);
        debug_assert_eq!(mid, x);
        let root = self.merge(a, b);
        self.set_root(root);
        self.free.push(x);
        self.nodes[x as usize].lit
    }

    /// Relabels the leaf at `idx`, returning the previous label.
    pub(crate) fn set(&mut self, idx: usize, lit: Literal) -> Literal {
        assert!(idx < self.len());
        let x = self.node_at(idx as u32);
        let old = self.nodes[x as usize].lit;
        if self.indexed && old.var() != lit.var() {
            self.var_remove(x);
            self.nodes[x as usize].lit = lit;
            self.var_insert(x);
        } else {
            self.nodes[x as usize].lit = lit;
        }
        old
    }

    pub(crate) fn is_indexed(&self) -> bool {
        self.indexed
    }

    /// First literal of `var` via the per-variable index. O(log s) expected.
    pub(crate) fn first_of_indexed(&self, var: u32) -> Option<Literal> {
        debug_assert!(self.indexed);
        let mut t = self.var_roots[var as usize - 1];
        if t == NIL {
            return None;
        }
        while self.nodes[t as usize].vleft != NIL {
            t = self.nodes[t as usize].vleft;
        }
        Some(self.nodes[t as usize].lit)
    }

    /// First literal of `var` by scanning the sequence from the left. O(s).
    pub(crate) fn first_of_scan(&self, var: u32) -> Option<Literal> {
        self.iter().find(|lit| lit.var() == var)
    }

    pub(crate) fn iter(&self) -> Iter<'_> {
        let mut it = Iter {
            seq: self,
            stack: Vec::new(),
        };
        it.descend(self.root);
        it
    }

    pub(crate) fn to_vec(&self) -> Vec<Literal> {
        let mut out = Vec::with_capacity(self.len());
        out.extend(self.iter());
        out
    }

    // ---- per-variable treap ----

    #[inline]
    fn vpull(&mut self, t: u32) {
        let (l, r) = {
            let node = &self.nodes[t as usize];
            (node.vleft, node.vright)
        };
        if l != NIL {
            self.nodes[l as usize].vparent = t;
        }
        if r != NIL {
            self.nodes[r as usize].vparent = t;
        }
    }

    fn vmerge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.nodes[a as usize].prio > self.nodes[b as usize].prio {
            let r = self.vmerge(self.nodes[a as usize].vright, b);
            self.nodes[a as usize].vright = r;
            self.vpull(a);
            a
        } else {
            let l = self.vmerge(a, self.nodes[b as usize].vleft);
            self.nodes[b as usize].vleft = l;
            self.vpull(b);
            b
        }
    }

    /// Splits a variable treap into nodes positioned before `pos` and the rest.
    fn vsplit(&mut self, t: u32, pos: u32) -> (u32, u32) {
        if t == NIL {
            return (NIL, NIL);
        }
        if self.rank(t) < pos {
            let (a, b) = self.vsplit(self.nodes[t as usize].vright, pos);
            self.nodes[t as usize].vright = a;
            self.vpull(t);
            (t, b)
        } else {
            let (a, b) = self.vsplit(self.nodes[t as usize].vleft, pos);
            self.nodes[t as usize].vleft = b;
            self.vpull(t);
            (a, t)
        }
    }

    fn set_var_root(&mut self, slot: usize, t: u32) {
        self.var_roots[slot] = t;
        if t != NIL {
            self.nodes[t as usize].vparent = NIL;
        }
    }

    /// Adds node `x`, already linked into the main sequence, to its variable treap.
    fn var_insert(&mut self, x: u32) {
        let slot = self.nodes[x as usize].lit.var() as usize - 1;
        let pos = self.rank(x);
        {
            let node = &mut self.nodes[x as usize];
            node.vleft = NIL;
            node.vright = NIL;
            node.vparent = NIL;
        }
        let (a, b) = self.vsplit(self.var_roots[slot], pos);
        let ax = self.vmerge(a, x);
        let root = self.vmerge(ax, b);
        self.set_var_root(slot, root);
    }

    fn var_remove(&mut self, x: u32) {
        let slot = self.nodes[x as usize].lit.var() as usize - 1;
        let (l, r, p) = {
            let node = &self.nodes[x as usize];
            (node.vleft, node.vright, node.vparent)
        };
        let m = self.vmerge(l, r);
        if p == NIL {
            self.set_var_root(slot, m);
        } else {
            let parent = &mut self.nodes[p as usize];
            if parent.vleft == x {
                parent.vleft = m;
            } else {
                parent.vright = m;
            }
            if m != NIL {
                self.nodes[m as usize].vparent = p;
            }
        }
        let node = &mut self.nodes[x as usize];
        node.vleft = NIL;
        node.vright = NIL;
        node.vparent = NIL;
    }

    /// Walks every variable treap in order and checks it against a scan.
    #[cfg(test)]
    pub(crate) fn check_index(&self) {
        if !self.indexed {
            return;
        }
        for (slot, &root) in self.var_roots.iter().enumerate() {
            let mut ranks = Vec::new();
            self.collect_var(root, &mut ranks);
            let expected: Vec<u32> = self
                .iter()
                .enumerate()
                .filter(|(_, l)| l.var() as usize == slot + 1)
                .map(|(i, _)| i as u32)
                .collect();
            assert_eq!(ranks, expected, "variable {} index out of sync", slot + 1);
        }
    }

    #[cfg(test)]
    fn collect_var(&self, t: u32, out: &mut Vec<u32>) {
        if t == NIL {
            return;
        }
        self.collect_var(self.nodes[t as usize].vleft, out);
        out.push(self.rank(t));
        self.collect_var(self.nodes[t as usize].vright, out);
    }
}

pub(crate) struct Iter<'a> {
    seq: &'a LeafSeq,
    stack: Vec<u32>,
}

impl Iter<'_> {
    fn descend(&mut self, mut t: u32) {
        while t != NIL {
            self.stack.push(t);
            t = self.seq.nodes[t as usize].left;
        }
    }
}

impl Iterator for Iter<'_> {
    type Item = Literal;

    fn next(&mut self) -> Option<Literal> {
        let t = self.stack.pop()?;
        let node = &self.seq.nodes[t as usize];
        self.descend(node.right);
        Some(node.lit)
    }
}
