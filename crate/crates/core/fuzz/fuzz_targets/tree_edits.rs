#![no_main]

use gp_lab::mutation::sample_operation;
use gp_lab::{GpTree, Literal, OrderTracking, Problem, RngStream};
use libfuzzer_sys::fuzz_target;

// First byte picks n, the next bytes are leaf codes, the last eight seed the edits.
fuzz_target!(|data: &[u8]| {
    if data.len() < 10 {
        return;
    }
    let n = u32::from(data[0] % 16) + 1;
    let (leaf_bytes, seed_bytes) = data[1..].split_at(data.len() - 9);
    if leaf_bytes.is_empty() {
        return;
    }
    let leaves: Vec<Literal> = leaf_bytes
        .iter()
        .map(|&b| Literal::from_code(u64::from(b) % (2 * u64::from(n))))
        .collect();
    let seed = u64::from_le_bytes(seed_bytes.try_into().unwrap());
    let mut rng = RngStream::new(seed);
    for problem in [Problem::Majority, Problem::Order] {
        let mut tree =
            GpTree::with_tracking(problem, n, &leaves, OrderTracking::CrossCheck).unwrap();
        for _ in 0..64 {
            let op = sample_operation(tree.size(), n, &mut rng);
            let before = tree.leaves();
            let undo = tree.apply(&op).unwrap();
            assert_eq!(tree.expressed(), problem.evaluate(&tree.leaves(), n));
            if let Some(undo) = undo {
                let mut back = tree.clone();
                back.apply(&undo).unwrap();
                assert_eq!(back.leaves(), before);
            }
        }
        tree.check_invariants().unwrap();
    }
});
