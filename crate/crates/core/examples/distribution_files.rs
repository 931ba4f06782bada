//! Writes the three example tables and the witness channel as JSON files.
//!
//!     cargo run --example distribution_files -- [output-dir]
//!
//! The default output directory is the crate's `data/` folder.

use std::path::PathBuf;

use lopc::dist::EVE_SYMBOLS;
use lopc::intrinsic::Channel;
use lopc::{paper_distribution, Stage};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data"));
    std::fs::create_dir_all(&dir)?;

    for (name, stage) in [
        ("initial.json", Stage::Initial),
        ("mid.json", Stage::AfterAliceCnot),
        ("final.json", Stage::Final),
    ] {
        let path = dir.join(name);
        std::fs::write(&path, paper_distribution(stage).to_json() + "\n")?;
        println!("wrote {}", path.display());
    }

    let witness = Channel::merging(&EVE_SYMBOLS, &[("f0", "e0"), ("f1", "e0")])?;
    let path = dir.join("witness_f_to_e0.json");
    std::fs::write(&path, witness.to_json() + "\n")?;
    println!("wrote {}", path.display());
    Ok(())
}
