//! Tour of the six-coefficient family: the built-in presets, which of them
//! admit N-peakon dynamics, H^1 conservation, and single-peakon traveling
//! waves, plus the non-traveling single peakon whose amplitude decays and
//! whose crest drifts logarithmically.
//!
//! Run with `cargo run --example coefficient_families`.

use peakon_lab::closed_forms::{fit_nontraveling, nontraveling_amplitude_crest};
use peakon_lab::model::{
    check_global_existence, check_h1_conservative, check_peakon_admissible,
    check_single_peakon_traveling, preset, MomentumSign, PresetName,
};

fn main() -> peakon_lab::Result<()> {
    let presets = [
        ("Camassa-Holm", preset(PresetName::CamassaHolm)),
        ("Degasperis-Procesi", preset(PresetName::DegasperisProcesi)),
        ("Xia-Qiao", preset(PresetName::XiaQiao)),
        ("b-family (b=0)", preset(PresetName::BFamily(0.0))),
        ("b-family (b=2.5)", preset(PresetName::BFamily(2.5))),
    ];

    println!(
        "{:<20} {:>28} {:>9} {:>8} {:>10}",
        "preset", "(l1..l6)", "peakons", "H1-cons", "trav. wave"
    );
    for (name, p) in &presets {
        let a = p.as_array();
        println!(
            "{name:<20} ({:>4},{:>4},{:>4},{:>4},{:>4},{:>4}) {:>9} {:>8} {:>10}",
            a[0], a[1], a[2], a[3], a[4], a[5],
            yn(check_peakon_admissible(p)),
            yn(check_h1_conservative(p)),
            yn(check_single_peakon_traveling(p)),
        );
    }

    println!("\nglobal existence under sign-definite momentum (Xia-Qiao):");
    let xq = preset(PresetName::XiaQiao);
    for sign in [MomentumSign::Nonnegative, MomentumSign::Nonpositive, MomentumSign::Mixed] {
        println!("  m0 {:?}: {:?}", sign, check_global_existence(&xq, sign));
    }

    // The Xia-Qiao single peakon does not travel at constant speed: its
    // amplitude obeys a Riccati decay and the crest drifts like log t.
    println!("\nnon-traveling single peakon (Xia-Qiao), p(0) = 1 at q(0) = 0:");
    let consts = fit_nontraveling(1.0, 0.0, 0.0, &xq)?;
    println!("{:>6} {:>12} {:>12}", "t", "amplitude", "crest");
    for t in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let (p, q) = nontraveling_amplitude_crest(&consts, &xq, t)?;
        println!("{t:>6.1} {p:>12.6} {q:>12.6}");
    }
    Ok(())
}

fn yn(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
