//! Shared sequence builders for the acceptance suite.

use coldatom::device::{Basis, Device, REFERENCE_RABI_AT_8UM};
use coldatom::params::PulseTemplate;
use coldatom::register::{Register, MIS_EXAMPLE_POSITIONS};
use coldatom::sequence::Sequence;
use coldatom::signal::{Pulse, Waveform};
use std::f64::consts::{PI, TAU};

pub fn check(name: &str, ok: bool) {
    println!("criterion {name}: {}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {name} failed");
}

/// The Bell-state walkthrough: two local channels, Blackman pulses, the
/// three-pulse CZ block bracketed by aligns, measured in the digital basis.
pub fn bell_sequence() -> Sequence {
    let reg = Register::from_named([("c", [-2.0, 0.0]), ("t", [2.0, 0.0])]).unwrap();
    let mut seq = Sequence::new(reg, Device::reference()).unwrap();
    seq.declare_channel("digital", "raman_local", None).unwrap();
    seq.declare_channel("rydberg", "rydberg_local", Some(&["c"])).unwrap();
    seq.target(&["c"], "digital").unwrap();

    let half_pi_wf = Waveform::blackman(200, PI / 2.0).unwrap();
    let ry = Pulse::constant_detuning(half_pi_wf.clone(), 0.0, -PI / 2.0).unwrap();
    let ry_dag = Pulse::constant_detuning(half_pi_wf, 0.0, PI / 2.0).unwrap();
    seq.add(ry.clone(), "digital").unwrap();
    seq.target(&["t"], "digital").unwrap();
    seq.add(ry_dag, "digital").unwrap();

    let pi_pulse =
        Pulse::constant_detuning(Waveform::blackman(200, PI).unwrap(), 0.0, 0.0).unwrap();
    let two_pi_wf = Waveform::blackman_from_max_val(REFERENCE_RABI_AT_8UM, 2.0 * PI).unwrap();
    let two_pi_pulse = Pulse::constant_detuning(two_pi_wf, 0.0, 0.0).unwrap();

    seq.align(&["digital", "rydberg"]).unwrap();
    seq.add(pi_pulse.clone(), "rydberg").unwrap();
    seq.target(&["t"], "rydberg").unwrap();
    seq.add(two_pi_pulse, "rydberg").unwrap();
    seq.target(&["c"], "rydberg").unwrap();
    seq.add(pi_pulse, "rydberg").unwrap();

    seq.align(&["digital", "rydberg"]).unwrap();
    seq.add(ry, "digital").unwrap();
    seq.measure(Basis::Digital).unwrap();
    seq
}

/// Adiabatic antiferromagnet preparation on a 3×3 lattice: rise at δ₀,
/// detuning sweep to δ_f at a fixed 2π·10 rad/µs per µs rate, fall at δ_f.
/// Returns the sequence and the lattice spacing.
pub fn afm_sequence(delta_f: f64) -> (Sequence, f64) {
    let dev = Device::reference();
    let omega_max = 2.3 * TAU;
    let u = omega_max / 2.3;
    let delta_0 = -6.0 * u;
    let t_rise = 250;
    let t_fall = 500;
    let t_sweep = ((delta_f - delta_0) / (TAU * 10.0) * 1000.0).round() as u64;
    let spacing = dev.rydberg_blockade_radius(u).unwrap();
    let reg = Register::square(3, spacing, "q").unwrap();
    let mut seq = Sequence::new(reg, dev).unwrap();
    seq.declare_channel("ising", "rydberg_global", None).unwrap();
    seq.add(
        Pulse::constant_detuning(Waveform::ramp(t_rise, 0.0, omega_max).unwrap(), delta_0, 0.0)
            .unwrap(),
        "ising",
    )
    .unwrap();
    if t_sweep > 0 {
        seq.add(
            Pulse::constant_amplitude(
                omega_max,
                Waveform::ramp(t_sweep, delta_0, delta_f).unwrap(),
                0.0,
            )
            .unwrap(),
            "ising",
        )
        .unwrap();
    }
    seq.add(
        Pulse::constant_detuning(Waveform::ramp(t_fall, omega_max, 0.0).unwrap(), delta_f, 0.0)
            .unwrap(),
        "ising",
    )
    .unwrap();
    (seq, spacing)
}

/// The three-pulse CZ protocol on a 4 µm pair, well inside blockade:
/// π on the control, 2π on the target, π on the control. The raman channel
/// is declared (never pulsed) so hyperfine-encoded inputs exist.
pub fn cz_sequence() -> Sequence {
    let reg = Register::from_named([("c", [-2.0, 0.0]), ("t", [2.0, 0.0])]).unwrap();
    let mut seq = Sequence::new(reg, Device::reference()).unwrap();
    seq.declare_channel("rydberg", "rydberg_local", Some(&["c"])).unwrap();
    seq.declare_channel("raman", "raman_local", Some(&["c"])).unwrap();
    let pi_pulse =
        Pulse::constant_detuning(Waveform::blackman(200, PI).unwrap(), 0.0, 0.0).unwrap();
    let two_pi_pulse =
        Pulse::constant_detuning(Waveform::blackman(2000, 2.0 * PI).unwrap(), 0.0, 0.0).unwrap();
    seq.add(pi_pulse.clone(), "rydberg").unwrap();
    seq.target(&["t"], "rydberg").unwrap();
    seq.add(two_pi_pulse, "rydberg").unwrap();
    seq.target(&["c"], "rydberg").unwrap();
    seq.add(pi_pulse, "rydberg").unwrap();
    seq
}

/// Two-layer QAOA blueprint for the 5-atom unit-disk instance, with the
/// blockade graph at Ω = 1 rad/µs.
pub fn mis_blueprint(layers: usize) -> (Sequence, Vec<(usize, usize)>) {
    let dev = Device::reference();
    let reg = Register::from_coordinates(&MIS_EXAMPLE_POSITIONS, "").unwrap();
    let edges = reg.blockade_graph(dev.rydberg_blockade_radius(1.0).unwrap()).unwrap();
    let mut seq = Sequence::new(reg, dev).unwrap();
    seq.declare_channel("ch0", "rydberg_global", None).unwrap();
    let t_list = seq.declare_variable("t_list", layers).unwrap();
    let s_list = seq.declare_variable("s_list", layers).unwrap();
    for (t, s) in t_list.iter().zip(s_list.iter()) {
        seq.add(PulseTemplate::constant(1000.0 * t, 1.0, 0.0, 0.0), "ch0").unwrap();
        seq.add(PulseTemplate::constant(1000.0 * s, 1.0, 1.0, 0.0), "ch0").unwrap();
    }
    (seq, edges)
}
