//! Entropies and (conditional) mutual information on the example tables.
//!
//!     cargo run --example information_measures

use lopc::info::{conditional_mutual_information, entropy, mutual_information};
use lopc::{paper_distribution, Stage};

fn main() -> lopc::Result<()> {
    let initial = paper_distribution(Stage::Initial);
    let mid = paper_distribution(Stage::AfterAliceCnot);
    let fin = paper_distribution(Stage::Final);

    println!("H(E) on the final table      = {:.6}", entropy(&fin, &["E"])?);
    println!(
        "I(A:BC) on the final table   = {:.12}",
        mutual_information(&fin, &["A"], &["B", "C"])?
    );
    println!(
        "I(A:BC|E) on the final table = {:.12}",
        conditional_mutual_information(&fin, &["A"], &["B", "C"], &["E"])?
    );
    println!(
        "I(AC:B|E) on the initial     = {:.12}",
        conditional_mutual_information(&initial, &["A", "C"], &["B"], &["E"])?
    );
    println!(
        "I(AB:C|E) on the mid table   = {:.12}",
        conditional_mutual_information(&mid, &["A", "B"], &["C"], &["E"])?
    );

    // only Eve's e0 symbol carries correlation: weight 1/3, one bit
    for symbol in ["e0", "e01", "e10", "f0", "f1"] {
        let (given, p) = initial.condition("E", symbol)?;
        let i = mutual_information(&given, &["A", "C"], &["B"])?;
        println!(
            "  E = {symbol:>3}: P = {:>3}, I(AC:B) = {i:.3}",
            lopc::dist::format_rational(&p)
        );
    }
    Ok(())
}
