//! Timeline renderers: a deterministic text listing of every slot, and a
//! data-faithful SVG with per-channel amplitude and detuning tracks.

use coldatom::sequence::{ChannelDraw, DrawData, SlotKind, TimeSlot};
use coldatom::signal::Waveform;
use std::fmt::Write;

fn waveform_brief(wf: &Waveform) -> String {
    match wf {
        Waveform::Constant { duration_ns, value } => format!("constant({duration_ns} ns, {value})"),
        Waveform::Ramp { duration_ns, start, stop } => {
            format!("ramp({duration_ns} ns, {start} -> {stop})")
        }
        Waveform::Blackman { duration_ns, area } => format!("blackman({duration_ns} ns, area {area})"),
        Waveform::Arbitrary { samples } => format!("arbitrary({} samples)", samples.len()),
    }
}

fn slot_line(slot: &TimeSlot) -> String {
    let targets = slot.targets.iter().cloned().collect::<Vec<_>>().join(", ");
    match &slot.kind {
        SlotKind::Pulse(pulse) => format!(
            "t: {}->{} | Pulse(amp: {}, det: {}, phase: {}) | Targets: {}",
            slot.start,
            slot.end,
            waveform_brief(pulse.amplitude()),
            waveform_brief(pulse.detuning()),
            pulse.phase(),
            targets,
        ),
        SlotKind::Target => format!("t: {}->{} | Target: {}", slot.start, slot.end, targets),
        SlotKind::Delay => format!("t: {}->{} | Delay | Targets: {}", slot.start, slot.end, targets),
    }
}

/// Plain-text timeline: every slot of every channel with start and finish
/// times, then the total duration and measurement basis.
pub fn render_text(data: &DrawData) -> String {
    let mut out = String::new();
    for ch in &data.channels {
        writeln!(out, "Channel: {} ({}, basis {})", ch.name, ch.channel_id, ch.basis).unwrap();
        for slot in &ch.slots {
            writeln!(out, "  {}", slot_line(slot)).unwrap();
        }
        writeln!(out).unwrap();
    }
    writeln!(out, "Total duration: {} ns", data.duration_ns).unwrap();
    match data.measurement {
        Some(basis) => writeln!(out, "Measurement basis: {basis}").unwrap(),
        None => writeln!(out, "Measurement basis: (not measured)").unwrap(),
    }
    out
}

const TRACK_WIDTH: f64 = 1000.0;
const TRACK_HEIGHT: f64 = 60.0;
const CHANNEL_GAP: f64 = 30.0;
const LEFT_MARGIN: f64 = 60.0;

fn polyline(samples: &[f64], scale: f64, x0: f64, y0: f64, px_per_ns: f64) -> String {
    let mut points = String::new();
    write!(points, "{:.2},{:.2} ", x0, y0).unwrap();
    for (k, v) in samples.iter().enumerate() {
        let x = x0 + (k as f64 + 0.5) * px_per_ns;
        let y = y0 - v * scale;
        write!(points, "{x:.2},{y:.2} ").unwrap();
    }
    write!(points, "{:.2},{:.2}", x0 + samples.len() as f64 * px_per_ns, y0).unwrap();
    points
}

fn channel_svg(out: &mut String, ch: &ChannelDraw, top: f64, px_per_ns: f64) {
    let amp_base = top + TRACK_HEIGHT;
    let det_mid = top + TRACK_HEIGHT * 1.5;
    let amp_max = ch.amplitude.iter().cloned().fold(1e-12, f64::max);
    let det_max = ch.detuning.iter().map(|d| d.abs()).fold(1e-12, f64::max);
    writeln!(
        out,
        r#"<text x="4" y="{:.2}" font-size="13" font-family="monospace">{} ({})</text>"#,
        top + 14.0,
        ch.name,
        ch.channel_id,
    )
    .unwrap();
    writeln!(
        out,
        r##"<line x1="{LEFT_MARGIN}" y1="{amp_base:.2}" x2="{:.2}" y2="{amp_base:.2}" stroke="#888" stroke-width="0.5"/>"##,
        LEFT_MARGIN + TRACK_WIDTH
    )
    .unwrap();
    writeln!(
        out,
        r##"<polyline fill="none" stroke="#2a6fdb" stroke-width="1" points="{}"/>"##,
        polyline(&ch.amplitude, TRACK_HEIGHT * 0.85 / amp_max, LEFT_MARGIN, amp_base, px_per_ns)
    )
    .unwrap();
    writeln!(
        out,
        r##"<line x1="{LEFT_MARGIN}" y1="{det_mid:.2}" x2="{:.2}" y2="{det_mid:.2}" stroke="#888" stroke-width="0.5"/>"##,
        LEFT_MARGIN + TRACK_WIDTH
    )
    .unwrap();
    writeln!(
        out,
        r##"<polyline fill="none" stroke="#d64541" stroke-width="1" points="{}"/>"##,
        polyline(&ch.detuning, TRACK_HEIGHT * 0.42 / det_max, LEFT_MARGIN, det_mid, px_per_ns)
    )
    .unwrap();
    for slot in &ch.slots {
        if !matches!(slot.kind, SlotKind::Target) {
            continue;
        }
        let x = LEFT_MARGIN + slot.start as f64 * px_per_ns;
        let w = ((slot.end - slot.start) as f64 * px_per_ns).max(2.0);
        let label = slot.targets.iter().cloned().collect::<Vec<_>>().join(",");
        writeln!(
            out,
            r##"<rect x="{x:.2}" y="{:.2}" width="{w:.2}" height="12" fill="#f4a83d" opacity="0.8"/>"##,
            top + 2.0,
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" font-family="monospace">{label}</text>"#,
            x + w + 2.0,
            top + 12.0,
        )
        .unwrap();
    }
}

/// SVG rendering of the amplitude/detuning tracks with target annotations
/// and the measurement basis label.
pub fn render_svg(data: &DrawData) -> String {
    let n = data.channels.len().max(1);
    let height = n as f64 * (2.0 * TRACK_HEIGHT + CHANNEL_GAP) + 40.0;
    let px_per_ns = TRACK_WIDTH / (data.duration_ns.max(1) as f64);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{height:.0}" viewBox="0 0 {:.0} {height:.0}">"#,
        LEFT_MARGIN + TRACK_WIDTH + 40.0,
        LEFT_MARGIN + TRACK_WIDTH + 40.0,
    )
    .unwrap();
    for (i, ch) in data.channels.iter().enumerate() {
        channel_svg(&mut out, ch, 20.0 + i as f64 * (2.0 * TRACK_HEIGHT + CHANNEL_GAP), px_per_ns);
    }
    let label = match data.measurement {
        Some(basis) => format!("measured: {basis}"),
        None => "not measured".to_string(),
    };
    writeln!(
        out,
        r#"<text x="{:.2}" y="{height:.2}" font-size="12" font-family="monospace" text-anchor="end">{label} | {} ns</text>"#,
        LEFT_MARGIN + TRACK_WIDTH,
        data.duration_ns,
    )
    .unwrap();
    writeln!(out, "</svg>").unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use coldatom::device::{Basis, Device};
    use coldatom::register::Register;
    use coldatom::sequence::Sequence;
    use coldatom::signal::Pulse;

    fn demo_data() -> DrawData {
        let reg = Register::from_named([("c", [-2.0, 0.0]), ("t", [2.0, 0.0])]).unwrap();
        let mut seq = Sequence::new(reg, Device::reference()).unwrap();
        seq.declare_channel("ryd", "rydberg_local", Some(&["c"])).unwrap();
        seq.add(Pulse::constant(100, 2.0, -1.0, 0.5).unwrap(), "ryd").unwrap();
        seq.target(&["t"], "ryd").unwrap();
        seq.measure(Basis::GroundRydberg).unwrap();
        seq.draw_data().unwrap()
    }

    #[test]
    fn text_lists_every_slot_with_times() {
        let text = render_text(&demo_data());
        assert!(text.contains("Channel: ryd (rydberg_local, basis ground-rydberg)"));
        assert!(text.contains("t: 0->0 | Target: c"));
        assert!(text.contains("t: 0->100 | Pulse(amp: constant(100 ns, 2)"));
        assert!(text.contains("t: 100->320 | Target: t"));
        assert!(text.contains("Total duration: 320 ns"));
        assert!(text.contains("Measurement basis: ground-rydberg"));
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let svg = render_svg(&demo_data());
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("measured: ground-rydberg"));
    }

    #[test]
    fn empty_sequence_renders_empty_tracks() {
        let reg = Register::from_named([("c", [-2.0, 0.0]), ("t", [2.0, 0.0])]).unwrap();
        let seq = Sequence::new(reg, Device::reference()).unwrap();
        let data = seq.draw_data().unwrap();
        let text = render_text(&data);
        assert!(text.contains("Total duration: 0 ns"));
        let svg = render_svg(&data);
        assert!(svg.contains("</svg>"));
    }
}
