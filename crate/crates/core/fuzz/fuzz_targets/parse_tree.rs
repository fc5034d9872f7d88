#![no_main]

use gp_lab::literal::{format_leaves, parse_leaves};
use gp_lab::{GpTree, Problem};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let Ok(leaves) = parse_leaves(text) else {
        return;
    };
    // Formatting and re-parsing is the identity on accepted input.
    assert_eq!(parse_leaves(&format_leaves(&leaves)).unwrap(), leaves);
    let n = leaves
        .iter()
        .map(|l| l.var())
        .max()
        .unwrap_or(1)
        .min(1 << 16);
    for problem in [Problem::Majority, Problem::Order] {
        if let Ok(tree) = GpTree::parse(problem, n, text) {
            assert_eq!(tree.expressed(), problem.evaluate(&leaves, n));
        }
    }
});
