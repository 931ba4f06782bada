//! The three-qubit analog: CNOT chain, partial transposes and distillation.
//!
//!     cargo run --example quantum_chain

use lopc::quantum::{
    apply_cnot, build_paper_state, computational_distribution, fidelity_with_phi_plus, measure_computational,
    partial_transpose_min_eigenvalue, PaperState, ABC,
};

fn main() -> lopc::Result<()> {
    let rho = build_paper_state(PaperState::RhoInitial);
    let sigma = apply_cnot(&rho, "A", "C")?;
    let tau = apply_cnot(&sigma, "B", "C")?;

    println!(
        "rho -> sigma residual {:.2e}",
        sigma
            .matrix()
            .max_abs_diff(build_paper_state(PaperState::SigmaMid).matrix())
    );
    println!(
        "sigma -> tau residual {:.2e}",
        tau.matrix()
            .max_abs_diff(build_paper_state(PaperState::TauFinal).matrix())
    );

    for (name, state) in [("rho", &rho), ("sigma", &sigma), ("tau", &tau)] {
        let cuts: Vec<String> = ABC
            .iter()
            .map(|c| Ok(format!("{c}: {:+.3}", partial_transpose_min_eigenvalue(state, &[*c])?)))
            .collect::<lopc::Result<_>>()?;
        println!("{name:>5} min PT eigenvalue per cut  {}", cuts.join("  "));
    }

    for outcome in measure_computational(&tau, "C")? {
        println!(
            "measure C = {}: probability {:.6}, fidelity with Phi+ {:.6}",
            outcome.outcome,
            outcome.probability,
            fidelity_with_phi_plus(&outcome.post_state)?
        );
    }

    let stats = computational_distribution(&rho);
    if let Some(d) = stats.distribution {
        println!("\ncomputational statistics of rho:\n{d}");
    }
    Ok(())
}
