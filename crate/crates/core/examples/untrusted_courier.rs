//! Key agreement through a courier who must not learn the key.
//!
//!     cargo run --example untrusted_courier

use lopc::protocol::untrusted_courier_demo;

fn main() -> lopc::Result<()> {
    let report = untrusted_courier_demo()?;
    println!("{}", report.distribution);
    println!("key uniform:            {}", report.key_uniform);
    println!("Alice and Bob agree:    {}", report.keys_agree);
    println!(
        "I(key : S)  [Eve]       = {} (exact zero: {})",
        report.eve_cmi, report.eve_certified_zero
    );
    println!(
        "I(key : R)  [Charlie]   = {} (exact zero: {})",
        report.charlie_cmi, report.charlie_certified_zero
    );
    println!("I(key : S,R) colluding  = {}", report.collusion_mi);
    Ok(())
}
