//! The timeline builder: channel declaration, targeting, pulse scheduling
//! protocols, alignment, phase-reference bookkeeping, measurement, and
//! parametrization.
//!
//! A [`Sequence`] is built against a [`Device`] and a [`Register`]. Every
//! builder call is also recorded as a blueprint op, so a sequence that uses
//! declared variables can be replayed with concrete values via
//! [`Sequence::build`].

use crate::device::{Basis, ChannelSpec, Device, DeviceError, Violation};
use crate::device::Addressing;
use crate::params::{Param, ParamError, PulseTemplate, TemplateError, Variable};
use crate::register::{Register, RegisterError};
use crate::signal::{normalize_phase, Pulse, SignalError};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SequenceError {
    #[error(transparent)]
    Device(#[from] DeviceError),
    #[error(transparent)]
    Register(#[from] RegisterError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("register violates device constraints: {0:?}")]
    RegisterInvalid(Vec<Violation>),
    #[error("pulse violates channel constraints: {0:?}")]
    PulseViolations(Vec<Violation>),
    #[error("no declared channel named `{0}`")]
    UnknownChannel(String),
    #[error("device channel `{0}` is already declared")]
    ChannelIdTaken(String),
    #[error("channel name `{0}` is already in use")]
    NameTaken(String),
    #[error("no atom named `{0}` in the register")]
    UnknownQubit(String),
    #[error("global channels target the entire register; no initial target allowed")]
    GlobalInitialTarget,
    #[error("channel `{0}` is global and cannot be retargeted")]
    TargetOnGlobal(String),
    #[error("a target set cannot be empty")]
    EmptyTargets,
    #[error("{requested} simultaneous targets requested, channel allows {max}")]
    TooManyTargets { requested: usize, max: usize },
    #[error("local channel `{0}` has no target yet")]
    NoTargetSet(String),
    #[error("targeted qubits carry different phase references")]
    PhaseRefMismatch,
    #[error("basis {0} is not supported by the device")]
    UnsupportedBasis(Basis),
    #[error("the sequence is measured and can no longer change")]
    Sealed,
    #[error("align needs at least two channels")]
    AlignNeedsTwo,
    #[error("operation requires a concrete sequence; call build() first")]
    Parametrized,
    #[error("variable `{0}` is already declared")]
    DuplicateVariable(String),
    #[error("variable `{0}` is not declared")]
    UnknownVariable(String),
    #[error("index {index} out of range for variable `{name}` of size {size}")]
    VariableIndexOutOfRange { name: String, index: usize, size: usize },
    #[error("no value provided for variable `{0}`")]
    MissingVariable(String),
    #[error("value provided for undeclared variable `{0}`")]
    UnexpectedVariable(String),
    #[error("variable `{name}` has size {expected}, got {got} values")]
    VariableSizeMismatch { name: String, expected: usize, got: usize },
}

impl From<TemplateError> for SequenceError {
    fn from(e: TemplateError) -> Self {
        match e {
            TemplateError::Param(p) => SequenceError::Param(p),
            TemplateError::Signal(s) => SequenceError::Signal(s),
        }
    }
}

/// Cross-channel timing rule applied when a pulse is added.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Protocol {
    /// Start as soon as the channel and every qubit it targets are free.
    #[serde(rename = "min-delay")]
    MinDelay,
    /// Start after every declared channel has finished.
    #[serde(rename = "wait-for-all")]
    WaitForAll,
    /// Start at the channel's own end, even if targets overlap.
    #[serde(rename = "no-delay")]
    NoDelay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SlotKind {
    Pulse(Pulse),
    Target,
    Delay,
}

/// One scheduled entry on a channel timeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSlot {
    pub start: u64,
    pub end: u64,
    pub kind: SlotKind,
    pub targets: BTreeSet<String>,
}

impl TimeSlot {
    pub fn is_pulse(&self) -> bool {
        matches!(self.kind, SlotKind::Pulse(_))
    }
}

/// A device channel bound into a sequence, with its timeline.
#[derive(Debug, Clone, PartialEq)]
pub struct DeclaredChannel {
    name: String,
    channel_id: String,
    spec: ChannelSpec,
    targets: BTreeSet<String>,
    slots: Vec<TimeSlot>,
}

impl DeclaredChannel {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn channel_id(&self) -> &str {
        &self.channel_id
    }

    pub fn spec(&self) -> &ChannelSpec {
        &self.spec
    }

    pub fn basis(&self) -> Basis {
        self.spec.basis
    }

    /// Current target set (empty for an untargeted local channel).
    pub fn current_targets(&self) -> &BTreeSet<String> {
        &self.targets
    }

    pub fn slots(&self) -> &[TimeSlot] {
        &self.slots
    }

    pub fn end(&self) -> u64 {
        self.slots.last().map_or(0, |s| s.end)
    }
}

/// Recorded builder call; the ordered list of these is the blueprint a
/// parametrized sequence is rebuilt from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum SeqOp {
    DeclareChannel {
        name: String,
        channel_id: String,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        initial_target: Option<Vec<String>>,
    },
    Target {
        channel: String,
        qubits: Vec<String>,
    },
    Add {
        channel: String,
        protocol: Protocol,
        pulse: PulseTemplate,
    },
    Delay {
        channel: String,
        duration_ns: Param,
    },
    Align {
        channels: Vec<String>,
    },
    PhaseShift {
        qubits: Vec<String>,
        basis: Basis,
        phase_rad: Param,
    },
    Measure {
        basis: Basis,
    },
}

impl SeqOp {
    fn visit_vars(&self, f: &mut impl FnMut(&str, Option<usize>)) {
        match self {
            SeqOp::Add { pulse, .. } => pulse.visit_vars(f),
            SeqOp::Delay { duration_ns, .. } => duration_ns.visit_vars(f),
            SeqOp::PhaseShift { phase_rad, .. } => phase_rad.visit_vars(f),
            _ => {}
        }
    }

    fn substitute(&self, bindings: &HashMap<String, Vec<f64>>) -> Result<SeqOp, ParamError> {
        Ok(match self {
            SeqOp::Add { channel, protocol, pulse } => SeqOp::Add {
                channel: channel.clone(),
                protocol: *protocol,
                pulse: pulse.substitute(bindings)?,
            },
            SeqOp::Delay { channel, duration_ns } => SeqOp::Delay {
                channel: channel.clone(),
                duration_ns: Param::Value(duration_ns.eval(bindings)?),
            },
            SeqOp::PhaseShift { qubits, basis, phase_rad } => SeqOp::PhaseShift {
                qubits: qubits.clone(),
                basis: *basis,
                phase_rad: Param::Value(phase_rad.eval(bindings)?),
            },
            other => other.clone(),
        })
    }
}

/// Per-channel rendering of a concrete sequence, for drawing.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    pub name: String,
    pub channel_id: String,
    pub basis: Basis,
    pub slots: Vec<TimeSlot>,
    /// Channel output amplitude per ns, padded to the sequence duration.
    pub amplitude: Vec<f64>,
    /// Channel output detuning per ns, padded to the sequence duration.
    pub detuning: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrawData {
    pub duration_ns: u64,
    pub channels: Vec<ChannelDraw>,
    pub measurement: Option<Basis>,
}

/// Pulse-level program under construction.
#[derive(Debug, Clone)]
pub struct Sequence {
    register: Arc<Register>,
    device: Arc<Device>,
    channels: IndexMap<String, DeclaredChannel>,
    phase_refs: HashMap<(String, Basis), f64>,
    measurement: Option<Basis>,
    variables: IndexMap<String, usize>,
    parametrized: bool,
    recorded: Vec<SeqOp>,
}

impl Sequence {
    /// Bind a register to a device; fails if the register violates the
    /// device's geometric constraints or the device itself is malformed.
    pub fn new(register: Register, device: Device) -> Result<Sequence, SequenceError> {
        device.validate()?;
        let violations = register.validate_against(&device);
        if !violations.is_empty() {
            return Err(SequenceError::RegisterInvalid(violations));
        }
        Ok(Sequence {
            register: Arc::new(register),
            device: Arc::new(device),
            channels: IndexMap::new(),
            phase_refs: HashMap::new(),
            measurement: None,
            variables: IndexMap::new(),
            parametrized: false,
            recorded: Vec::new(),
        })
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn device(&self) -> &Device {
        &self.device
    }

    /// Device channel ids not yet declared.
    pub fn available_channels(&self) -> Vec<&str> {
        let taken: BTreeSet<&str> =
            self.channels.values().map(|c| c.channel_id.as_str()).collect();
        self.device
            .channels
            .keys()
            .map(|id| id.as_str())
            .filter(|id| !taken.contains(id))
            .collect()
    }

    pub fn declared_channels(&self) -> impl Iterator<Item = &DeclaredChannel> {
        self.channels.values()
    }

    pub fn channel(&self, name: &str) -> Result<&DeclaredChannel, SequenceError> {
        self.channels
            .get(name)
            .ok_or_else(|| SequenceError::UnknownChannel(name.to_string()))
    }

    pub fn is_parametrized(&self) -> bool {
        self.parametrized
    }

    pub fn is_measured(&self) -> bool {
        self.measurement.is_some()
    }

    pub fn measurement_basis(&self) -> Option<Basis> {
        self.measurement
    }

    pub fn variables(&self) -> &IndexMap<String, usize> {
        &self.variables
    }

    /// The recorded blueprint (every builder call, in order).
    pub fn recorded_ops(&self) -> &[SeqOp] {
        &self.recorded
    }

    // ------------------------------------------------------------------
    // builder calls
    // ------------------------------------------------------------------

    pub fn declare_channel(
        &mut self,
        name: &str,
        channel_id: &str,
        initial_target: Option<&[&str]>,
    ) -> Result<(), SequenceError> {
        let op = SeqOp::DeclareChannel {
            name: name.to_string(),
            channel_id: channel_id.to_string(),
            initial_target: initial_target.map(|t| t.iter().map(|s| s.to_string()).collect()),
        };
        self.dispatch(op)
    }

    pub fn target(&mut self, qubits: &[&str], channel: &str) -> Result<(), SequenceError> {
        let op = SeqOp::Target {
            channel: channel.to_string(),
            qubits: qubits.iter().map(|s| s.to_string()).collect(),
        };
        self.dispatch(op)
    }

    /// Add a pulse with the default `min-delay` protocol.
    pub fn add(&mut self, pulse: impl Into<PulseTemplate>, channel: &str) -> Result<(), SequenceError> {
        self.add_with_protocol(pulse, channel, Protocol::MinDelay)
    }

    pub fn add_with_protocol(
        &mut self,
        pulse: impl Into<PulseTemplate>,
        channel: &str,
        protocol: Protocol,
    ) -> Result<(), SequenceError> {
        let op = SeqOp::Add { channel: channel.to_string(), protocol, pulse: pulse.into() };
        self.dispatch(op)
    }

    pub fn delay(&mut self, duration_ns: impl Into<Param>, channel: &str) -> Result<(), SequenceError> {
        let op = SeqOp::Delay { channel: channel.to_string(), duration_ns: duration_ns.into() };
        self.dispatch(op)
    }

    pub fn align(&mut self, channels: &[&str]) -> Result<(), SequenceError> {
        let op = SeqOp::Align { channels: channels.iter().map(|s| s.to_string()).collect() };
        self.dispatch(op)
    }

    pub fn phase_shift(
        &mut self,
        phase: impl Into<Param>,
        qubits: &[&str],
        basis: Basis,
    ) -> Result<(), SequenceError> {
        let op = SeqOp::PhaseShift {
            qubits: qubits.iter().map(|s| s.to_string()).collect(),
            basis,
            phase_rad: phase.into(),
        };
        self.dispatch(op)
    }

    /// Seal the sequence; no builder call is accepted afterwards.
    pub fn measure(&mut self, basis: Basis) -> Result<(), SequenceError> {
        self.dispatch(SeqOp::Measure { basis })
    }

    /// Declare a variable of the given size (≥ 1). Using the returned handle
    /// in a builder call turns the sequence into a parametrized blueprint.
    pub fn declare_variable(&mut self, name: &str, size: usize) -> Result<Variable, SequenceError> {
        if self.measurement.is_some() {
            return Err(SequenceError::Sealed);
        }
        if size == 0 {
            return Err(SequenceError::VariableSizeMismatch {
                name: name.to_string(),
                expected: 1,
                got: 0,
            });
        }
        if self.variables.contains_key(name) {
            return Err(SequenceError::DuplicateVariable(name.to_string()));
        }
        self.variables.insert(name.to_string(), size);
        Ok(Variable::new(name.to_string(), size))
    }

    /// Apply a recorded builder op, exactly as the corresponding method
    /// call would; this is how documents replay their operation list.
    pub fn apply_op(&mut self, op: SeqOp) -> Result<(), SequenceError> {
        self.dispatch(op)
    }

    /// Replay the blueprint with concrete values for every declared
    /// variable, yielding a validated concrete sequence.
    pub fn build(&self, values: &[(&str, Vec<f64>)]) -> Result<Sequence, SequenceError> {
        let mut bindings: HashMap<String, Vec<f64>> = HashMap::new();
        for (name, vals) in values {
            if !self.variables.contains_key(*name) {
                return Err(SequenceError::UnexpectedVariable(name.to_string()));
            }
            bindings.insert(name.to_string(), vals.clone());
        }
        for (name, size) in &self.variables {
            match bindings.get(name) {
                None => return Err(SequenceError::MissingVariable(name.clone())),
                Some(vals) if vals.len() != *size => {
                    return Err(SequenceError::VariableSizeMismatch {
                        name: name.clone(),
                        expected: *size,
                        got: vals.len(),
                    })
                }
                Some(_) => {}
            }
        }
        let mut built = Sequence::new((*self.register).clone(), (*self.device).clone())?;
        for op in &self.recorded {
            built.dispatch(op.substitute(&bindings)?)?;
        }
        Ok(built)
    }

    // ------------------------------------------------------------------
    // accessors on concrete sequences
    // ------------------------------------------------------------------

    /// Largest channel end, in ns.
    pub fn total_duration(&self) -> Result<u64, SequenceError> {
        self.require_concrete()?;
        Ok(self.channels.values().map(|c| c.end()).max().unwrap_or(0))
    }

    /// Per-channel timeline with rendered amplitude/detuning tracks.
    pub fn draw_data(&self) -> Result<DrawData, SequenceError> {
        let duration = self.total_duration()?;
        let channels = self
            .channels
            .values()
            .map(|ch| {
                let mut amplitude = vec![0.0; duration as usize];
                let mut detuning = vec![0.0; duration as usize];
                for slot in &ch.slots {
                    if let SlotKind::Pulse(pulse) = &slot.kind {
                        let amp = pulse.amplitude().samples();
                        let det = pulse.detuning().samples();
                        let start = slot.start as usize;
                        amplitude[start..start + amp.len()].copy_from_slice(&amp);
                        detuning[start..start + det.len()].copy_from_slice(&det);
                    }
                }
                ChannelDraw {
                    name: ch.name.clone(),
                    channel_id: ch.channel_id.clone(),
                    basis: ch.spec.basis,
                    slots: ch.slots.clone(),
                    amplitude,
                    detuning,
                }
            })
            .collect();
        Ok(DrawData { duration_ns: duration, channels, measurement: self.measurement })
    }

    fn require_concrete(&self) -> Result<(), SequenceError> {
        if self.parametrized {
            Err(SequenceError::Parametrized)
        } else {
            Ok(())
        }
    }

    // ------------------------------------------------------------------
    // execution
    // ------------------------------------------------------------------

    fn dispatch(&mut self, op: SeqOp) -> Result<(), SequenceError> {
        if self.measurement.is_some() {
            return Err(SequenceError::Sealed);
        }
        self.check_op(&op)?;
        let uses_vars = {
            let mut used = false;
            op.visit_vars(&mut |_, _| used = true);
            used
        };
        if uses_vars {
            self.parametrized = true;
        }
        if self.parametrized {
            self.recorded.push(op);
            return Ok(());
        }
        self.exec(&op)?;
        self.recorded.push(op);
        Ok(())
    }

    /// Checks that need no variable values: names, ids, targets, variable
    /// references. Runs for recorded and executed calls alike.
    fn check_op(&self, op: &SeqOp) -> Result<(), SequenceError> {
        let mut var_err = None;
        op.visit_vars(&mut |name, index| {
            if var_err.is_some() {
                return;
            }
            match self.variables.get(name) {
                None => var_err = Some(SequenceError::UnknownVariable(name.to_string())),
                Some(&size) => {
                    if let Some(i) = index {
                        if i >= size {
                            var_err = Some(SequenceError::VariableIndexOutOfRange {
                                name: name.to_string(),
                                index: i,
                                size,
                            });
                        }
                    } else if size != 1 {
                        var_err = Some(SequenceError::Param(ParamError::ScalarUseOfVector(
                            name.to_string(),
                        )));
                    }
                }
            }
        });
        if let Some(e) = var_err {
            return Err(e);
        }
        match op {
            SeqOp::DeclareChannel { name, channel_id, initial_target } => {
                let spec = self.device.channel(channel_id)?;
                if self.channels.values().any(|c| &c.channel_id == channel_id) {
                    return Err(SequenceError::ChannelIdTaken(channel_id.clone()));
                }
                if self.channels.contains_key(name) {
                    return Err(SequenceError::NameTaken(name.clone()));
                }
                if let Some(targets) = initial_target {
                    if spec.addressing == Addressing::Global {
                        return Err(SequenceError::GlobalInitialTarget);
                    }
                    self.check_target_set(targets, spec)?;
                }
            }
            SeqOp::Target { channel, qubits } => {
                let ch = self.channel(channel)?;
                if ch.spec.addressing == Addressing::Global {
                    return Err(SequenceError::TargetOnGlobal(channel.clone()));
                }
                self.check_target_set(qubits, &ch.spec)?;
            }
            SeqOp::Add { channel, .. } => {
                self.channel(channel)?;
            }
            SeqOp::Delay { channel, .. } => {
                self.channel(channel)?;
            }
            SeqOp::Align { channels } => {
                let unique: BTreeSet<&String> = channels.iter().collect();
                if unique.len() < 2 {
                    return Err(SequenceError::AlignNeedsTwo);
                }
                for name in channels {
                    self.channel(name)?;
                }
            }
            SeqOp::PhaseShift { qubits, basis, .. } => {
                self.check_basis(*basis)?;
                if qubits.is_empty() {
                    return Err(SequenceError::EmptyTargets);
                }
                for q in qubits {
                    self.check_qubit(q)?;
                }
            }
            SeqOp::Measure { basis } => {
                self.check_basis(*basis)?;
            }
        }
        Ok(())
    }

    fn check_target_set(&self, qubits: &[String], spec: &ChannelSpec) -> Result<(), SequenceError> {
        if qubits.is_empty() {
            return Err(SequenceError::EmptyTargets);
        }
        let unique: BTreeSet<&String> = qubits.iter().collect();
        if unique.len() > spec.max_simultaneous_targets {
            return Err(SequenceError::TooManyTargets {
                requested: unique.len(),
                max: spec.max_simultaneous_targets,
            });
        }
        for q in qubits {
            self.check_qubit(q)?;
        }
        Ok(())
    }

    fn check_qubit(&self, name: &str) -> Result<(), SequenceError> {
        if self.register.contains(name) {
            Ok(())
        } else {
            Err(SequenceError::UnknownQubit(name.to_string()))
        }
    }

    fn check_basis(&self, basis: Basis) -> Result<(), SequenceError> {
        if self.device.supported_bases.contains(&basis) {
            Ok(())
        } else {
            Err(SequenceError::UnsupportedBasis(basis))
        }
    }

    fn exec(&mut self, op: &SeqOp) -> Result<(), SequenceError> {
        let empty = HashMap::new();
        match op {
            SeqOp::DeclareChannel { name, channel_id, initial_target } => {
                let spec = self.device.channel(channel_id)?.clone();
                let targets: BTreeSet<String> = match (spec.addressing, initial_target) {
                    (Addressing::Global, _) => self.register.names().map(String::from).collect(),
                    (Addressing::Local, Some(t)) => t.iter().cloned().collect(),
                    (Addressing::Local, None) => BTreeSet::new(),
                };
                let mut slots = Vec::new();
                if !targets.is_empty() {
                    slots.push(TimeSlot {
                        start: 0,
                        end: 0,
                        kind: SlotKind::Target,
                        targets: targets.clone(),
                    });
                }
                self.channels.insert(
                    name.clone(),
                    DeclaredChannel {
                        name: name.clone(),
                        channel_id: channel_id.clone(),
                        spec,
                        targets,
                        slots,
                    },
                );
            }
            SeqOp::Target { channel, qubits } => {
                let ch = self.channels.get_mut(channel).expect("checked");
                let targets: BTreeSet<String> = qubits.iter().cloned().collect();
                // the first target of a fresh channel is free; retargets
                // cost the channel's retarget time
                let (start, end) = if ch.slots.is_empty() {
                    (0, 0)
                } else {
                    let end = ch.end();
                    (end, end + ch.spec.retarget_time)
                };
                ch.slots.push(TimeSlot { start, end, kind: SlotKind::Target, targets: targets.clone() });
                ch.targets = targets;
            }
            SeqOp::Add { channel, protocol, pulse } => {
                let Some(pulse) = pulse.resolve(&empty)? else {
                    return Ok(()); // zero-length pulse: nothing to schedule
                };
                self.exec_add(channel, *protocol, pulse)?;
            }
            SeqOp::Delay { channel, duration_ns } => {
                let d = crate::params::eval_duration(duration_ns, &empty)?;
                if d > 0 {
                    let ch = self.channels.get_mut(channel).expect("checked");
                    let end = ch.end();
                    let targets = ch.targets.clone();
                    ch.slots.push(TimeSlot {
                        start: end,
                        end: end + d,
                        kind: SlotKind::Delay,
                        targets,
                    });
                }
            }
            SeqOp::Align { channels } => {
                let tmax = channels
                    .iter()
                    .map(|name| self.channels[name.as_str()].end())
                    .max()
                    .unwrap_or(0);
                for name in channels {
                    let ch = self.channels.get_mut(name).expect("checked");
                    let end = ch.end();
                    if end < tmax {
                        let targets = ch.targets.clone();
                        ch.slots.push(TimeSlot {
                            start: end,
                            end: tmax,
                            kind: SlotKind::Delay,
                            targets,
                        });
                    }
                }
            }
            SeqOp::PhaseShift { qubits, basis, phase_rad } => {
                let phi = phase_rad.eval(&empty)?;
                for q in qubits {
                    let entry = self.phase_refs.entry((q.clone(), *basis)).or_insert(0.0);
                    *entry = normalize_phase(*entry + phi);
                }
            }
            SeqOp::Measure { basis } => {
                self.measurement = Some(*basis);
            }
        }
        Ok(())
    }

    fn exec_add(&mut self, channel: &str, protocol: Protocol, pulse: Pulse) -> Result<(), SequenceError> {
        let ch = &self.channels[channel];
        let violations = self.device.validate_pulse(&ch.channel_id, &pulse)?;
        if !violations.is_empty() {
            return Err(SequenceError::PulseViolations(violations));
        }
        if ch.targets.is_empty() {
            return Err(SequenceError::NoTargetSet(channel.to_string()));
        }
        let basis = ch.spec.basis;
        let mut refs = ch
            .targets
            .iter()
            .map(|q| *self.phase_refs.get(&(q.clone(), basis)).unwrap_or(&0.0));
        let phase_ref = refs.next().expect("nonempty targets");
        if refs.any(|r| r != phase_ref) {
            return Err(SequenceError::PhaseRefMismatch);
        }

        let own_end = ch.end();
        let t0 = match protocol {
            Protocol::NoDelay => own_end,
            Protocol::WaitForAll => self.channels.values().map(|c| c.end()).max().unwrap_or(0),
            Protocol::MinDelay => {
                let targets = &ch.targets;
                let busy = self
                    .channels
                    .values()
                    .filter(|c| c.name != channel)
                    .flat_map(|c| c.slots.iter())
                    .filter(|s| s.is_pulse() && !s.targets.is_disjoint(targets))
                    .map(|s| s.end)
                    .max()
                    .unwrap_or(0);
                own_end.max(busy)
            }
        };

        let ch = self.channels.get_mut(channel).expect("checked");
        let targets = ch.targets.clone();
        if t0 > own_end {
            ch.slots.push(TimeSlot {
                start: own_end,
                end: t0,
                kind: SlotKind::Delay,
                targets: targets.clone(),
            });
        }
        let end = t0 + pulse.duration_ns();
        ch.slots.push(TimeSlot {
            start: t0,
            end,
            kind: SlotKind::Pulse(pulse.with_phase_shift(phase_ref)),
            targets,
        });
        Ok(())
    }
}
