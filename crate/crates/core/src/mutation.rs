//! HVL-Prime mutation and the per-iteration mutation-count distribution.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::literal::Literal;
use crate::tree::GpTree;

/// Which side of the anchor leaf an inserted leaf lands on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Before,
    After,
}

/// One HVL-Prime edit. Positions are 0-based in-order leaf indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MutationOp {
    Substitute {
        pos: usize,
        literal: Literal,
    },
    Insert {
        anchor: usize,
        literal: Literal,
        side: Side,
    },
    Delete {
        pos: usize,
    },
}

/// Distribution of the number k of HVL-Prime applications per iteration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KDistribution {
    #[default]
    ConstantOne,
    OnePlusPoisson,
}

impl KDistribution {
    pub fn name(self) -> &'static str {
        match self {
            KDistribution::ConstantOne => "constant_one",
            KDistribution::OnePlusPoisson => "one_plus_poisson",
        }
    }
}

impl fmt::Display for KDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant_one" | "1" => Ok(KDistribution::ConstantOne),
            "one_plus_poisson" | "1+pois" => Ok(KDistribution::OnePlusPoisson),
            other => Err(Error::config(
                "k_dist",
                format!("expected `constant_one` or `one_plus_poisson`, got `{other}`"),
            )),
        }
    }
}

/// Seeded, platform-independent random stream (ChaCha8).
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform integer in `0..bound`. Always samples through `u64` so the
    /// sequence does not depend on the platform's pointer width.
    #[inline]
    pub fn below(&mut self, bound: u64) -> u64 {
        self.inner.gen_range(0..bound)
    }

    /// Uniform in [0, 1).
    #[inline]
    pub fn unit(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    #[inline]
    pub fn coin(&mut self) -> bool {
        self.inner.next_u32() & 1 == 1
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

/// Mixes a seed with a sequence of indices into a derived seed.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    parts.iter().fold(mix(master), |acc, &p| mix(acc ^ mix(p)))
}

/// Exact Poisson(1) sample by sequential inversion of the CDF. No truncation:
/// the loop runs until the cumulative mass passes the uniform draw.
pub fn poisson_one(rng: &mut RngStream) -> u64 {
    let u = rng.unit();
    let mut k = 0u64;
    let mut p = (-1.0f64).exp();
    let mut cdf = p;
    while u >= cdf {
        k += 1;
        p /= k as f64;
        let next = cdf + p;
        if next == cdf {
            // Remaining mass is below f64 resolution.
            break;
        }
        cdf = next;
    }
    k
}

pub fn sample_k(dist: KDistribution, rng: &mut RngStream) -> u64 {
    match dist {
        KDistribution::ConstantOne => 1,
        KDistribution::OnePlusPoisson => 1 + poisson_one(rng),
    }
}

/// Draws one HVL-Prime edit for a tree with `tree_size` leaves over `n` variables.
pub fn sample_operation(tree_size: usize, n: u32, rng: &mut RngStream) -> MutationOp {
    debug_assert!(tree_size >= 1 && n >= 1);
    let literals = 2 * u64::from(n);
    let leaves = tree_size as u64;
    match rng.below(3) {
        0 => {
            let pos = rng.below(leaves) as usize;
            let literal = Literal::from_code(rng.below(literals));
            MutationOp::Substitute { pos, literal }
        }
        1 => {
            let literal = Literal::from_code(rng.below(literals));
            let anchor = rng.below(leaves) as usize;
            let side = if rng.coin() {
                Side::After
            } else {
                Side::Before
            };
            MutationOp::Insert {
                anchor,
                literal,
                side,
            }
        }
        _ => MutationOp::Delete {
            pos: rng.below(leaves) as usize,
        },
    }
}

/// Samples one edit and applies it in place. Returns the edit and its inverse
/// (`None` for the no-op delete on a single-leaf tree).
pub fn hvl_prime_in_place(
    tree: &mut GpTree,
    rng: &mut RngStream,
) -> (MutationOp, Option<MutationOp>) {
    let op = sample_operation(tree.size(), tree.n(), rng);
    let undo = tree
        .apply(&op)
        .expect("sampled edits are always within range");
    (op, undo)
}

/// Value-returning HVL-Prime: the mutated copy and the edit that produced it.
pub fn hvl_prime(tree: &GpTree, rng: &mut RngStream) -> (GpTree, MutationOp) {
    let mut next = tree.clone();
    let (op, _) = hvl_prime_in_place(&mut next, rng);
    (next, op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitness::Problem;

    #[test]
    fn constant_one_is_one() {
        let mut rng = RngStream::new(1);
        assert!((0..100).all(|_| sample_k(KDistribution::ConstantOne, &mut rng) == 1));
    }

    #[test]
    fn poisson_pmf_matches() {
        let mut rng = RngStream::new(5);
        let trials = 200_000;
        let mut hist = [0u64; 8];
        for _ in 0..trials {
            let k = poisson_one(&mut rng) as usize;
            hist[k.min(7)] += 1;
        }
        let mut fact = 1.0;
        for (k, &count) in hist.iter().enumerate().take(5) {
            if k > 0 {
                fact *= k as f64;
            }
            let p = (-1.0f64).exp() / fact;
            let sd = (p * (1.0 - p) / trials as f64).sqrt();
            let phat = count as f64 / trials as f64;
            assert!((phat - p).abs() < 4.0 * sd, "k={k}: {phat} vs {p}");
        }
    }

    #[test]
    fn insert_literal_uniform_for_single_variable() {
        let mut rng = RngStream::new(8);
        let (mut pos, mut total) = (0u64, 0u64);
        for _ in 0..60_000 {
            if let MutationOp::Insert { literal, .. } = sample_operation(4, 1, &mut rng) {
                total += 1;
                pos += u64::from(literal.is_positive());
            }
        }
        let p = pos as f64 / total as f64;
        let sd = (0.25 / total as f64).sqrt();
        assert!((p - 0.5).abs() < 3.0 * sd, "{p}");
    }

    #[test]
    fn delete_positions_uniform() {
        let mut rng = RngStream::new(13);
        let mut hist = [0u64; 5];
        let mut total = 0u64;
        for _ in 0..150_000 {
            if let MutationOp::Delete { pos } = sample_operation(5, 3, &mut rng) {
                hist[pos] += 1;
                total += 1;
            }
        }
        let sd = (0.2 * 0.8 / total as f64).sqrt();
        for c in hist {
            let p = c as f64 / total as f64;
            assert!((p - 0.2).abs() < 3.0 * sd, "{p}");
        }
    }

    #[test]
    fn forced_operations() {
        let t = GpTree::parse(Problem::Majority, 1, "x1").unwrap();
        assert_eq!(t.apply_edit(&MutationOp::Delete { pos: 0 }).unwrap(), t);

        let t = GpTree::parse(Problem::Order, 2, "x1").unwrap();
        let t = t
            .apply_edit(&MutationOp::Substitute {
                pos: 0,
                literal: Literal::neg(2),
            })
            .unwrap();
        assert_eq!(t.to_string(), "!x2");

        let t = GpTree::parse(Problem::Order, 2, "x1 x2").unwrap();
        let t = t
            .apply_edit(&MutationOp::Insert {
                anchor: 0,
                literal: Literal::neg(1),
                side: Side::After,
            })
            .unwrap();
        assert_eq!(t.to_string(), "x1 !x1 x2");
    }

    #[test]
    fn same_seed_replays_edits() {
        let t = GpTree::parse(Problem::Majority, 4, "x1 x2 !x3").unwrap();
        let run = |seed| {
            let mut rng = RngStream::new(seed);
            let mut tree = t.clone();
            let mut ops = Vec::new();
            for _ in 0..200 {
                let (next, op) = hvl_prime(&tree, &mut rng);
                ops.push(op);
                tree = next;
            }
            ops
        };
        assert_eq!(run(42), run(42));
        assert_ne!(run(42), run(43));
    }

    #[test]
    fn size_changes_by_kind() {
        let mut rng = RngStream::new(21);
        let mut tree = GpTree::parse(Problem::Order, 3, "x1").unwrap();
        for _ in 0..5000 {
            let s = tree.size();
            let (op, _) = hvl_prime_in_place(&mut tree, &mut rng);
            let expected = match op {
                MutationOp::Substitute { .. } => s,
                MutationOp::Insert { .. } => s + 1,
                MutationOp::Delete { .. } => s.saturating_sub(1).max(1),
            };
            assert_eq!(tree.size(), expected);
        }
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(1, &[0, 0]);
        assert_ne!(a, derive_seed(1, &[0, 1]));
        assert_ne!(a, derive_seed(1, &[1, 0]));
        assert_ne!(a, derive_seed(2, &[0, 0]));
        assert_eq!(a, derive_seed(1, &[0, 0]));
    }
}
