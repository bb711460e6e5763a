//! Waveform primitives and pulse construction.
//!
//! A [`Waveform`] is a real-valued control signal discretized on a 1 ns clock,
//! with values in rad/µs. A [`Pulse`] pairs an amplitude waveform (the Rabi
//! frequency Ω(t), non-negative) with a detuning waveform (δ(t), any sign) and
//! a constant phase, all targeting a single transition.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

/// Conversion factor from one clock tick (1 ns) to µs, the unit in which
/// integrals of rad/µs-valued samples are taken.
pub const TICK_US: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SignalError {
    #[error("waveform duration must be at least 1 ns")]
    ZeroDuration,
    #[error("waveform sample at tick {tick} is not finite")]
    NonFiniteSample { tick: usize },
    #[error("waveform parameter `{name}` is not finite")]
    NonFiniteParam { name: &'static str },
    #[error("amplitude waveform has a negative sample at tick {tick}")]
    NegativeAmplitude { tick: usize },
    #[error("amplitude and detuning durations differ ({amplitude} ns vs {detuning} ns)")]
    DurationMismatch { amplitude: u64, detuning: u64 },
    #[error("max_val and area must be nonzero and share the same sign")]
    SignMismatch,
}

/// Time-discretized control signal: a shape plus a duration in integer ns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Waveform {
    /// Constant value over the whole duration.
    Constant { duration_ns: u64, value: f64 },
    /// Linear interpolation from `start` at the first tick to `stop` at the
    /// last tick.
    Ramp { duration_ns: u64, start: f64, stop: f64 },
    /// Blackman window rescaled so its discrete integral equals `area` (rad).
    Blackman { duration_ns: u64, area: f64 },
    /// Explicit per-ns samples.
    Arbitrary { samples: Vec<f64> },
}

impl Waveform {
    pub fn constant(duration_ns: u64, value: f64) -> Result<Self, SignalError> {
        check_duration(duration_ns)?;
        check_finite(value, "value")?;
        Ok(Waveform::Constant { duration_ns, value })
    }

    pub fn ramp(duration_ns: u64, start: f64, stop: f64) -> Result<Self, SignalError> {
        check_duration(duration_ns)?;
        check_finite(start, "start")?;
        check_finite(stop, "stop")?;
        Ok(Waveform::Ramp { duration_ns, start, stop })
    }

    pub fn blackman(duration_ns: u64, area: f64) -> Result<Self, SignalError> {
        check_duration(duration_ns)?;
        check_finite(area, "area")?;
        Ok(Waveform::Blackman { duration_ns, area })
    }

    pub fn arbitrary(samples: Vec<f64>) -> Result<Self, SignalError> {
        if samples.is_empty() {
            return Err(SignalError::ZeroDuration);
        }
        if let Some(tick) = samples.iter().position(|s| !s.is_finite()) {
            return Err(SignalError::NonFiniteSample { tick });
        }
        Ok(Waveform::Arbitrary { samples })
    }

    /// Shortest Blackman waveform whose rendered peak stays at or below
    /// `max_val` while integrating to `area`. Signs of both arguments must
    /// match; the result inherits them.
    pub fn blackman_from_max_val(max_val: f64, area: f64) -> Result<Self, SignalError> {
        if !max_val.is_finite() || !area.is_finite() {
            return Err(SignalError::NonFiniteParam { name: "max_val/area" });
        }
        if max_val == 0.0 || area == 0.0 || max_val.signum() != area.signum() {
            return Err(SignalError::SignMismatch);
        }
        let (m, a) = (max_val.abs(), area.abs());
        // duration estimate in ns: area = 0.42 * max_val * duration_us,
        // with a tolerance-ceil so exact integer ratios stay exact
        let exact = a / (0.42 * m * TICK_US);
        let mut duration_ns = (exact - 1e-9 * exact.max(1.0)).ceil().max(1.0) as u64;
        loop {
            let wf = Waveform::Blackman { duration_ns, area };
            let peak = wf.samples().iter().fold(0.0f64, |p, s| p.max(s.abs()));
            if peak <= m * (1.0 + 1e-12) {
                return Ok(wf);
            }
            duration_ns += 1;
        }
    }

    /// Duration in integer ns.
    pub fn duration_ns(&self) -> u64 {
        match self {
            Waveform::Constant { duration_ns, .. }
            | Waveform::Ramp { duration_ns, .. }
            | Waveform::Blackman { duration_ns, .. } => *duration_ns,
            Waveform::Arbitrary { samples } => samples.len() as u64,
        }
    }

    /// Per-ns samples in rad/µs; the returned vector has exactly
    /// `duration_ns` entries.
    ///
    /// Constant and ramp shapes sample at tick positions (linspace
    /// convention); the Blackman window is sampled at tick midpoints
    /// (k + ½)/T, which makes its discrete sum exactly 0.42·T before area
    /// rescaling and keeps the rendered peak at area/(0.42·T·1 ns).
    pub fn samples(&self) -> Vec<f64> {
        match self {
            Waveform::Constant { duration_ns, value } => vec![*value; *duration_ns as usize],
            Waveform::Ramp { duration_ns, start, stop } => {
                let n = *duration_ns as usize;
                if n == 1 {
                    return vec![*start];
                }
                let step = (stop - start) / (n as f64 - 1.0);
                (0..n).map(|k| start + step * k as f64).collect()
            }
            Waveform::Blackman { duration_ns, area } => {
                let n = *duration_ns as usize;
                // computing one half and mirroring keeps the window
                // symmetric to the last bit
                let mut raw = vec![0.0; n];
                for k in 0..n.div_ceil(2) {
                    let x = (k as f64 + 0.5) / n as f64;
                    let w = 0.42 - 0.5 * (TAU * x).cos() + 0.08 * (2.0 * TAU * x).cos();
                    raw[k] = w;
                    raw[n - 1 - k] = w;
                }
                let sum: f64 = raw.iter().sum();
                if *area == 0.0 || sum == 0.0 {
                    return vec![0.0; n];
                }
                let scale = area / (sum * TICK_US);
                raw.into_iter().map(|w| w * scale).collect()
            }
            Waveform::Arbitrary { samples } => samples.clone(),
        }
    }

    /// Discrete integral Σ samples × 1 ns, in rad.
    pub fn integral(&self) -> f64 {
        self.samples().iter().sum::<f64>() * TICK_US
    }

    fn min_sample(&self) -> (usize, f64) {
        let samples = self.samples();
        samples
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (k, s)| if s < acc.1 { (k, s) } else { acc })
    }
}

fn check_duration(duration_ns: u64) -> Result<(), SignalError> {
    if duration_ns == 0 {
        Err(SignalError::ZeroDuration)
    } else {
        Ok(())
    }
}

fn check_finite(value: f64, name: &'static str) -> Result<(), SignalError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(SignalError::NonFiniteParam { name })
    }
}

/// Normalize an angle to [0, 2π).
pub fn normalize_phase(phase: f64) -> f64 {
    let p = phase.rem_euclid(TAU);
    if p == TAU {
        0.0
    } else {
        p
    }
}

/// Drive acting on one transition: amplitude waveform Ω(t) ≥ 0, detuning
/// waveform δ(t), constant phase stored in [0, 2π).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    amplitude: Waveform,
    detuning: Waveform,
    phase_rad: f64,
}

impl Pulse {
    pub fn new(amplitude: Waveform, detuning: Waveform, phase: f64) -> Result<Self, SignalError> {
        if amplitude.duration_ns() != detuning.duration_ns() {
            return Err(SignalError::DurationMismatch {
                amplitude: amplitude.duration_ns(),
                detuning: detuning.duration_ns(),
            });
        }
        let (tick, min) = amplitude.min_sample();
        if min < 0.0 {
            return Err(SignalError::NegativeAmplitude { tick });
        }
        check_finite(phase, "phase")?;
        Ok(Pulse { amplitude, detuning, phase_rad: normalize_phase(phase) })
    }

    /// Pulse with a constant detuning value.
    pub fn constant_detuning(
        amplitude: Waveform,
        detuning: f64,
        phase: f64,
    ) -> Result<Self, SignalError> {
        let det = Waveform::constant(amplitude.duration_ns(), detuning)?;
        Pulse::new(amplitude, det, phase)
    }

    /// Pulse with a constant amplitude value.
    pub fn constant_amplitude(
        amplitude: f64,
        detuning: Waveform,
        phase: f64,
    ) -> Result<Self, SignalError> {
        let amp = Waveform::constant(detuning.duration_ns(), amplitude)?;
        Pulse::new(amp, detuning, phase)
    }

    /// Pulse with constant amplitude and detuning.
    pub fn constant(
        duration_ns: u64,
        amplitude: f64,
        detuning: f64,
        phase: f64,
    ) -> Result<Self, SignalError> {
        Pulse::new(
            Waveform::constant(duration_ns, amplitude)?,
            Waveform::constant(duration_ns, detuning)?,
            phase,
        )
    }

    pub fn amplitude(&self) -> &Waveform {
        &self.amplitude
    }

    pub fn detuning(&self) -> &Waveform {
        &self.detuning
    }

    /// Stored phase, normalized to [0, 2π).
    pub fn phase(&self) -> f64 {
        self.phase_rad
    }

    pub fn duration_ns(&self) -> u64 {
        self.amplitude.duration_ns()
    }

    /// Copy of this pulse with `shift` added to its phase (mod 2π).
    pub fn with_phase_shift(&self, shift: f64) -> Pulse {
        Pulse {
            amplitude: self.amplitude.clone(),
            detuning: self.detuning.clone(),
            phase_rad: normalize_phase(self.phase_rad + shift),
        }
    }
}
