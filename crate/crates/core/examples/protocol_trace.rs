//! Runs the four-variable protocol and prints every intermediate table.
//!
//!     cargo run --example protocol_trace

use lopc::protocol::run_paper_protocol;

fn main() -> lopc::Result<()> {
    let trace = run_paper_protocol()?;
    println!("initial table\n{}", trace.initial);
    for check in &trace.initial_checks {
        println!(
            "  check [{}] {}",
            if check.passed { "pass" } else { "FAIL" },
            check.name
        );
    }
    for entry in &trace.entries {
        println!("\n{:?}", entry.step);
        println!("{}", entry.distribution);
        for check in &entry.checks {
            println!(
                "  check [{}] {}",
                if check.passed { "pass" } else { "FAIL" },
                check.name
            );
        }
    }
    // each accepted run leaves one perfect sbit
    println!(
        "\nsuccess probability {}, i.e. that many sbits per run",
        lopc::dist::format_rational(&trace.success_probability)
    );
    for warning in &trace.warnings {
        println!("warning: {warning}");
    }
    Ok(())
}
