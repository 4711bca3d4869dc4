//! Finite-time blow-up of a mixed-sign peakon pair: the closed form predicts
//! the singular time exactly, and the adaptive ODE integrator halts with a
//! blow-up event at the same moment.
//!
//! Run with `cargo run --example peakon_collision_blowup`.

use peakon_lab::closed_forms::{fit_two_peakon, singular_time, two_peakon_state};
use peakon_lab::model::{preset, PresetName};
use peakon_lab::peakon_dynamics::{self, TerminationStatus};

fn main() -> peakon_lab::Result<()> {
    // A peakon chasing an antipeakon of larger strength: total momentum is
    // negative and the amplitudes diverge at a finite s* > s0.
    let consts = fit_two_peakon(1.0, -2.0, -3.0, 0.0, 1.0)?;
    let s0 = 1.0f64;

    let t_star = match singular_time(&consts, s0) {
        Some(t) => t,
        None => {
            println!("no forward singularity for this data");
            return Ok(());
        }
    };
    println!("predicted blow-up time t* = {t_star:.10}");

    // Amplitudes on approach: p1, p2 ~ 1/(s - s*).
    println!("\n{:>10} {:>14} {:>14}", "t* - t", "p1", "p2");
    for dt in [1e-1, 1e-2, 1e-3, 1e-4] {
        let s = consts.s_of_t(t_star - dt);
        let st = two_peakon_state(&consts, s)?;
        println!("{dt:>10.0e} {:>14.4} {:>14.4}", st.p[0], st.p[1]);
    }

    // The ODE integrator sees the same singularity: depending on which
    // threshold trips first it reports either amplitude blow-up or the
    // peakon-antipeakon collision -- two faces of the same event.
    let params = preset(PresetName::XiaQiao);
    let state0 = two_peakon_state(&consts, s0)?;
    let traj = peakon_dynamics::integrate(&params, &state0, t_star + 0.5, 1e-10, 1e-12)?;
    println!("\nintegrator status: {:?}", traj.status);
    if matches!(
        traj.status,
        TerminationStatus::BlowUpDetected | TerminationStatus::CollisionDetected
    ) {
        let halt = traj.last().t;
        for ev in &traj.events {
            println!("event {:?} at t = {:.10} (peakons {:?})", ev.kind, ev.t, ev.indices);
        }
        println!(
            "halt at t = {halt:.10}, predicted t* = {t_star:.10}, gap {:.2e}",
            (halt - t_star).abs()
        );
    }
    Ok(())
}
