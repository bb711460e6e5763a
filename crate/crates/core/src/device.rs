//! Hardware constraint model and blockade-radius conversions.
//!
//! A [`Device`] bundles the interaction coefficient C₆/ħ, geometric limits on
//! the atom register, and the set of drive channels it offers. Channels carry
//! the per-pulse limits enforced while a sequence is built.

use crate::signal::Pulse;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeviceError {
    #[error("unknown channel id `{0}`")]
    UnknownChannel(String),
    #[error("device `{name}` is invalid: {reason}")]
    InvalidDevice { name: String, reason: String },
    #[error("argument must be positive, got {0}")]
    NonPositive(f64),
}

/// Whether a channel drives the whole register or a retargetable subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Addressing {
    Global,
    Local,
}

/// Two-level transition addressed by a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    #[serde(rename = "ground-rydberg")]
    GroundRydberg,
    #[serde(rename = "digital")]
    Digital,
}

impl std::fmt::Display for Basis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Basis::GroundRydberg => write!(f, "ground-rydberg"),
            Basis::Digital => write!(f, "digital"),
        }
    }
}

impl std::str::FromStr for Basis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ground-rydberg" => Ok(Basis::GroundRydberg),
            "digital" => Ok(Basis::Digital),
            other => Err(format!("unknown basis `{other}`")),
        }
    }
}

/// Limits of one drive channel. `retarget_time` and
/// `max_simultaneous_targets` only apply to `Local` channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub addressing: Addressing,
    pub basis: Basis,
    /// Largest allowed amplitude sample, rad/µs.
    pub max_amplitude: f64,
    /// [min, max] allowed detuning samples, rad/µs.
    pub detuning_range: [f64; 2],
    /// Shortest allowed pulse, ns.
    pub min_duration: u64,
    /// Time consumed by a retarget, ns (Local only).
    #[serde(default)]
    pub retarget_time: u64,
    /// Largest simultaneous target set (Local only).
    #[serde(default = "default_max_targets")]
    pub max_simultaneous_targets: usize,
}

fn default_max_targets() -> usize {
    1
}

/// A constraint breach, returned as data so callers can report all of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    AmplitudeAboveMax { channel: String, peak: f64, max: f64 },
    DetuningOutOfRange { channel: String, value: f64, min: f64, max: f64 },
    DurationBelowMin { channel: String, duration_ns: u64, min_ns: u64 },
    AtomsTooClose { a: String, b: String, distance_um: f64, min_um: f64 },
    AtomTooFarFromCenter { name: String, distance_um: f64, max_um: f64 },
    TooManyAtoms { count: usize, max: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::AmplitudeAboveMax { channel, peak, max } => {
                write!(f, "amplitude peak {peak} rad/us exceeds {max} on channel `{channel}`")
            }
            Violation::DetuningOutOfRange { channel, value, min, max } => {
                write!(f, "detuning {value} rad/us outside [{min}, {max}] on channel `{channel}`")
            }
            Violation::DurationBelowMin { channel, duration_ns, min_ns } => {
                write!(f, "duration {duration_ns} ns below minimum {min_ns} ns on channel `{channel}`")
            }
            Violation::AtomsTooClose { a, b, distance_um, min_um } => {
                write!(f, "atoms `{a}` and `{b}` are {distance_um} um apart, minimum is {min_um}")
            }
            Violation::AtomTooFarFromCenter { name, distance_um, max_um } => {
                write!(f, "atom `{name}` is {distance_um} um from the register center, maximum is {max_um}")
            }
            Violation::TooManyAtoms { count, max } => {
                write!(f, "register holds {count} atoms, device supports {max}")
            }
        }
    }
}

/// Hardware description a sequence is validated against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Device {
    pub name: String,
    /// Interaction coefficient C₆/ħ in rad·µm⁶/µs.
    pub c6: f64,
    /// Smallest allowed pairwise atom distance, µm.
    pub min_atom_distance: f64,
    /// Largest allowed atom distance from the register centroid, µm.
    pub max_radius_from_center: f64,
    pub max_atom_count: usize,
    pub channels: IndexMap<String, ChannelSpec>,
    pub supported_bases: BTreeSet<Basis>,
}

/// Rabi frequency whose blockade radius on the reference device is exactly
/// 8 µm; fixes the reference C₆ as `19.10672378540039 × 8⁶`.
pub const REFERENCE_RABI_AT_8UM: f64 = 19.10672378540039;

impl Device {
    /// The built-in reference device.
    pub fn reference() -> Device {
        let mut channels = IndexMap::new();
        channels.insert(
            "rydberg_global".to_string(),
            ChannelSpec {
                addressing: Addressing::Global,
                basis: Basis::GroundRydberg,
                max_amplitude: 2.5 * TAU,
                detuning_range: [-20.0 * TAU, 20.0 * TAU],
                min_duration: 16,
                retarget_time: 0,
                max_simultaneous_targets: 1,
            },
        );
        channels.insert(
            "rydberg_local".to_string(),
            ChannelSpec {
                addressing: Addressing::Local,
                basis: Basis::GroundRydberg,
                max_amplitude: 10.0 * TAU,
                detuning_range: [-20.0 * TAU, 20.0 * TAU],
                min_duration: 16,
                retarget_time: 220,
                max_simultaneous_targets: 2,
            },
        );
        channels.insert(
            "raman_local".to_string(),
            ChannelSpec {
                addressing: Addressing::Local,
                basis: Basis::Digital,
                max_amplitude: 4.0 * TAU,
                detuning_range: [-20.0 * TAU, 20.0 * TAU],
                min_duration: 16,
                retarget_time: 220,
                max_simultaneous_targets: 2,
            },
        );
        Device {
            name: "reference".to_string(),
            c6: REFERENCE_RABI_AT_8UM * 8f64.powi(6),
            min_atom_distance: 4.0,
            max_radius_from_center: 50.0,
            max_atom_count: 100,
            channels,
            supported_bases: BTreeSet::from([Basis::GroundRydberg, Basis::Digital]),
        }
    }

    /// Check the structural invariants of a (possibly user-supplied) device.
    pub fn validate(&self) -> Result<(), DeviceError> {
        let fail = |reason: String| DeviceError::InvalidDevice { name: self.name.clone(), reason };
        if !(self.c6 > 0.0) {
            return Err(fail("c6 must be positive".into()));
        }
        if !(self.min_atom_distance > 0.0) {
            return Err(fail("min_atom_distance must be positive".into()));
        }
        if !(self.max_radius_from_center > 0.0) {
            return Err(fail("max_radius_from_center must be positive".into()));
        }
        for (id, ch) in &self.channels {
            if !(ch.max_amplitude > 0.0) {
                return Err(fail(format!("channel `{id}`: max_amplitude must be positive")));
            }
            let [lo, hi] = ch.detuning_range;
            if !(lo <= 0.0 && 0.0 <= hi) {
                return Err(fail(format!("channel `{id}`: detuning_range must bracket 0")));
            }
            if ch.min_duration < 1 {
                return Err(fail(format!("channel `{id}`: min_duration must be at least 1 ns")));
            }
            if ch.addressing == Addressing::Local && ch.max_simultaneous_targets < 1 {
                return Err(fail(format!("channel `{id}`: local channels need at least one target")));
            }
        }
        Ok(())
    }

    pub fn channel(&self, id: &str) -> Result<&ChannelSpec, DeviceError> {
        self.channels.get(id).ok_or_else(|| DeviceError::UnknownChannel(id.to_string()))
    }

    /// Blockade radius (C₆/ħΩ)^(1/6) in µm for a drive of `omega` rad/µs.
    pub fn rydberg_blockade_radius(&self, omega: f64) -> Result<f64, DeviceError> {
        if !(omega > 0.0) {
            return Err(DeviceError::NonPositive(omega));
        }
        Ok((self.c6 / omega).powf(1.0 / 6.0))
    }

    /// Rabi frequency (rad/µs) whose blockade radius is `radius` µm; exact
    /// inverse of [`Device::rydberg_blockade_radius`].
    pub fn rabi_from_blockade(&self, radius: f64) -> Result<f64, DeviceError> {
        if !(radius > 0.0) {
            return Err(DeviceError::NonPositive(radius));
        }
        Ok(self.c6 / radius.powi(6))
    }

    /// Check a pulse against the limits of the channel `channel_id`.
    pub fn validate_pulse(&self, channel_id: &str, pulse: &Pulse) -> Result<Vec<Violation>, DeviceError> {
        let spec = self.channel(channel_id)?;
        let mut violations = Vec::new();
        let peak = pulse.amplitude().samples().iter().cloned().fold(0.0f64, f64::max);
        if peak > spec.max_amplitude {
            violations.push(Violation::AmplitudeAboveMax {
                channel: channel_id.to_string(),
                peak,
                max: spec.max_amplitude,
            });
        }
        let [lo, hi] = spec.detuning_range;
        let det = pulse.detuning().samples();
        let worst = det
            .iter()
            .copied()
            .filter(|d| *d < lo || *d > hi)
            .max_by(|a, b| a.abs().total_cmp(&b.abs()));
        if let Some(value) = worst {
            violations.push(Violation::DetuningOutOfRange {
                channel: channel_id.to_string(),
                value,
                min: lo,
                max: hi,
            });
        }
        if pulse.duration_ns() < spec.min_duration {
            violations.push(Violation::DurationBelowMin {
                channel: channel_id.to_string(),
                duration_ns: pulse.duration_ns(),
                min_ns: spec.min_duration,
            });
        }
        Ok(violations)
    }
}
