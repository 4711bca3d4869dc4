//! Cross-validation suites: every closed-form identity and every solver is
//! checked against an independent oracle (adaptive quadrature, the exact
//! solution family, or one another). This is the same machinery behind the
//! `verify` CLI subcommand.
//!
//! Run with `cargo run --release --example oracle_checks`.

use peakon_lab::verify::{run_suite, SuiteName};

fn main() -> peakon_lab::Result<()> {
    let mut all_ok = true;
    for name in SuiteName::ALL {
        let report = run_suite(name)?;
        println!("suite {}:", report.suite);
        for c in &report.checks {
            println!(
                "  {} {}: {:.3e} vs threshold {:.1e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.threshold
            );
            all_ok &= c.pass;
        }
    }
    println!("\noverall: {}", if all_ok { "all suites pass" } else { "FAILURES present" });
    std::process::exit(if all_ok { 0 } else { 1 });
}
