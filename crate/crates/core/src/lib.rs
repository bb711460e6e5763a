//! Pulse-level programming and emulation for neutral-atom arrays.
//!
//! The crate builds up in layers:
//!
//! - [`signal`]: waveforms and pulses on a 1 ns clock.
//! - [`device`]: hardware constraint model and blockade conversions.
//! - [`register`]: named atom positions, geometry checks, blockade graph.
//! - [`sequence`]: multi-channel timeline builder with scheduling
//!   protocols, phase-reference bookkeeping, and parametrization.
//! - [`sampler`]: flattens a schedule into per-qubit drive samples.
//! - [`emulator`]: state-vector time evolution of the driven, interacting
//!   array, with measurement sampling.
//! - [`analysis`]: correlation functions and cost observables.
//! - [`optim`]: derivative-free optimization and the closed-loop QAOA
//!   harness.
//! - [`document`]: the JSON interchange format consumed by the CLI.
//!
//! With the default `parallel` feature, batch runs and the emulator's inner
//! kernels fan out over a rayon thread pool; without it everything runs
//! sequentially with identical results.

pub mod analysis;
pub mod device;
pub mod document;
pub mod emulator;
pub mod optim;
mod par;
pub mod params;
pub mod register;
pub mod sampler;
pub mod sequence;
pub mod signal;

pub use device::{Addressing, Basis, ChannelSpec, Device, DeviceError, Violation};
pub use params::{Expr, Param, PulseTemplate, Variable, WaveformTemplate};
pub use register::{Register, RegisterError};
pub use sampler::{sample_sequence, DriveSamples, SamplerError};
pub use sequence::{Protocol, SeqOp, Sequence, SequenceError, SlotKind, TimeSlot};
pub use signal::{Pulse, SignalError, Waveform};
