//! Zero certification with witness channels and the numerical channel search.
//!
//!     cargo run --release --example intrinsic_search -- [restarts] [seed]

use lopc::dist::EVE_SYMBOLS;
use lopc::intrinsic::{apply_channel, certify_zero_cmi, intrinsic_information_upper_bound, Channel, OptimizerConfig};
use lopc::{paper_distribution, Stage};

fn main() -> lopc::Result<()> {
    let mut args = std::env::args().skip(1);
    let restarts = args.next().and_then(|s| s.parse().ok()).unwrap_or(64);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let config = OptimizerConfig::default().with_restarts(restarts).with_seed(seed);

    let mid = paper_distribution(Stage::AfterAliceCnot);
    let witness = Channel::merging(&EVE_SYMBOLS, &[("f0", "e0"), ("f1", "e0")])?;
    let processed = apply_channel(&mid, "E", &witness)?;
    println!("mid table after f0,f1 -> e0:\n{processed}");
    println!(
        "AB and C independent given Eve's output: {}",
        certify_zero_cmi(&processed, &["A", "B"], &["C"], &["E"])?
    );

    let cases = [
        ("initial, AC vs B", Stage::Initial, vec!["A", "C"], vec!["B"]),
        ("mid, AB vs C", Stage::AfterAliceCnot, vec!["A", "B"], vec!["C"]),
        ("final, A vs BC", Stage::Final, vec!["A"], vec!["B", "C"]),
    ];
    for (label, stage, x, y) in cases {
        let result = intrinsic_information_upper_bound(&paper_distribution(stage), &x, &y, "E", &config)?;
        println!(
            "\n{label}: {:.9} bits (certified zero: {}, I(x:y|E) = {:.6}, I(x:y) = {:.6})",
            result.value, result.certified_zero, result.identity_value, result.constant_value
        );
        if let Some(w) = &result.witness {
            for (input, row) in w.input.iter().zip(&w.rows) {
                let out = row.iter().position(|p| *p == num_traits::One::one()).unwrap_or(0);
                println!("  {input} -> {}", w.output[out]);
            }
        }
    }
    Ok(())
}
