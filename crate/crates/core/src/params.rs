//! Deferred parameters for parametrized sequences.
//!
//! A [`Param`] is either a concrete number or an [`Expr`] over declared
//! sequence variables. Expressions support the usual arithmetic and are
//! evaluated when a blueprint is built with concrete variable values.

use crate::signal::{Pulse, SignalError, Waveform};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("index {index} out of range for variable `{name}` of size {size}")]
    IndexOutOfRange { name: String, index: usize, size: usize },
    #[error("variable `{0}` has size > 1 and must be indexed")]
    ScalarUseOfVector(String),
    #[error("expression evaluated to a non-finite value")]
    NonFinite,
    #[error("duration evaluated to a negative value ({0})")]
    NegativeDuration(f64),
}

/// Arithmetic over declared variables, evaluated at build time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Expr {
    Const(f64),
    Var {
        var: String,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        index: Option<usize>,
    },
    Neg { neg: Box<Expr> },
    Add { add: [Box<Expr>; 2] },
    Sub { sub: [Box<Expr>; 2] },
    Mul { mul: [Box<Expr>; 2] },
    Div { div: [Box<Expr>; 2] },
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var { var: name.into(), index: None }
    }

    pub fn var_index(name: impl Into<String>, index: usize) -> Expr {
        Expr::Var { var: name.into(), index: Some(index) }
    }

    pub fn eval(&self, bindings: &HashMap<String, Vec<f64>>) -> Result<f64, ParamError> {
        let value = match self {
            Expr::Const(c) => *c,
            Expr::Var { var, index } => {
                let values = bindings.get(var).ok_or_else(|| ParamError::UnknownVariable(var.clone()))?;
                match index {
                    Some(i) => *values.get(*i).ok_or_else(|| ParamError::IndexOutOfRange {
                        name: var.clone(),
                        index: *i,
                        size: values.len(),
                    })?,
                    None if values.len() == 1 => values[0],
                    None => return Err(ParamError::ScalarUseOfVector(var.clone())),
                }
            }
            Expr::Neg { neg } => -neg.eval(bindings)?,
            Expr::Add { add: [a, b] } => a.eval(bindings)? + b.eval(bindings)?,
            Expr::Sub { sub: [a, b] } => a.eval(bindings)? - b.eval(bindings)?,
            Expr::Mul { mul: [a, b] } => a.eval(bindings)? * b.eval(bindings)?,
            Expr::Div { div: [a, b] } => a.eval(bindings)? / b.eval(bindings)?,
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(ParamError::NonFinite)
        }
    }

    /// Visit every variable reference.
    pub fn visit_vars(&self, f: &mut impl FnMut(&str, Option<usize>)) {
        match self {
            Expr::Const(_) => {}
            Expr::Var { var, index } => f(var, *index),
            Expr::Neg { neg } => neg.visit_vars(f),
            Expr::Add { add: [a, b] }
            | Expr::Sub { sub: [a, b] }
            | Expr::Mul { mul: [a, b] }
            | Expr::Div { div: [a, b] } => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
        }
    }
}

macro_rules! expr_binop {
    ($trait:ident, $method:ident, $variant:ident, $field:ident) => {
        impl std::ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant { $field: [Box::new(self), Box::new(rhs)] }
            }
        }
        impl std::ops::$trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::$variant { $field: [Box::new(self), Box::new(Expr::Const(rhs))] }
            }
        }
        impl std::ops::$trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant { $field: [Box::new(Expr::Const(self)), Box::new(rhs)] }
            }
        }
    };
}

expr_binop!(Add, add, Add, add);
expr_binop!(Sub, sub, Sub, sub);
expr_binop!(Mul, mul, Mul, mul);
expr_binop!(Div, div, Div, div);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg { neg: Box::new(self) }
    }
}

/// Handle returned by `Sequence::declare_variable`.
#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    name: String,
    size: usize,
}

impl Variable {
    pub(crate) fn new(name: String, size: usize) -> Variable {
        Variable { name, size }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// The whole variable as a scalar expression (size-1 variables only;
    /// larger ones must be indexed).
    pub fn expr(&self) -> Expr {
        Expr::var(&self.name)
    }

    pub fn index(&self, i: usize) -> Expr {
        Expr::var_index(&self.name, i)
    }

    /// One expression per element, in order.
    pub fn iter(&self) -> impl Iterator<Item = Expr> + '_ {
        (0..self.size).map(|i| self.index(i))
    }
}

/// A number that may still depend on sequence variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Value(f64),
    Expr(Expr),
}

impl Param {
    pub fn eval(&self, bindings: &HashMap<String, Vec<f64>>) -> Result<f64, ParamError> {
        match self {
            Param::Value(v) => Ok(*v),
            Param::Expr(e) => e.eval(bindings),
        }
    }

    pub fn as_value(&self) -> Option<f64> {
        match self {
            Param::Value(v) => Some(*v),
            Param::Expr(Expr::Const(c)) => Some(*c),
            Param::Expr(_) => None,
        }
    }

    pub fn visit_vars(&self, f: &mut impl FnMut(&str, Option<usize>)) {
        if let Param::Expr(e) = self {
            e.visit_vars(f)
        }
    }

    pub fn is_concrete(&self) -> bool {
        let mut found = false;
        self.visit_vars(&mut |_, _| found = true);
        !found
    }

    fn substitute(&self, bindings: &HashMap<String, Vec<f64>>) -> Result<Param, ParamError> {
        Ok(Param::Value(self.eval(bindings)?))
    }
}

impl From<f64> for Param {
    fn from(v: f64) -> Param {
        Param::Value(v)
    }
}

impl From<u64> for Param {
    fn from(v: u64) -> Param {
        Param::Value(v as f64)
    }
}

impl From<i32> for Param {
    fn from(v: i32) -> Param {
        Param::Value(v as f64)
    }
}

impl From<Expr> for Param {
    fn from(e: Expr) -> Param {
        // a bare constant serializes as a number, which reads back as a
        // Value; collapsing it here keeps documents round-trip stable
        match e {
            Expr::Const(c) => Param::Value(c),
            other => Param::Expr(other),
        }
    }
}

impl From<&Variable> for Param {
    fn from(v: &Variable) -> Param {
        Param::Expr(v.expr())
    }
}

/// Evaluate a Param holding a duration: rounded to the nearest ns, negative
/// values rejected. A zero result means "nothing to schedule".
pub(crate) fn eval_duration(
    param: &Param,
    bindings: &HashMap<String, Vec<f64>>,
) -> Result<u64, ParamError> {
    let raw = param.eval(bindings)?;
    let rounded = raw.round();
    if rounded < 0.0 {
        return Err(ParamError::NegativeDuration(raw));
    }
    Ok(rounded as u64)
}

/// Waveform whose numeric fields may be deferred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WaveformTemplate {
    Constant { duration_ns: Param, value: Param },
    Ramp { duration_ns: Param, start: Param, stop: Param },
    Blackman { duration_ns: Param, area: Param },
    Arbitrary { samples: Vec<f64> },
}

impl WaveformTemplate {
    pub fn constant(duration_ns: impl Into<Param>, value: impl Into<Param>) -> Self {
        WaveformTemplate::Constant { duration_ns: duration_ns.into(), value: value.into() }
    }

    pub fn ramp(duration_ns: impl Into<Param>, start: impl Into<Param>, stop: impl Into<Param>) -> Self {
        WaveformTemplate::Ramp {
            duration_ns: duration_ns.into(),
            start: start.into(),
            stop: stop.into(),
        }
    }

    pub fn blackman(duration_ns: impl Into<Param>, area: impl Into<Param>) -> Self {
        WaveformTemplate::Blackman { duration_ns: duration_ns.into(), area: area.into() }
    }

    /// Rendered waveform, or `None` when the duration rounds to zero.
    pub(crate) fn resolve(
        &self,
        bindings: &HashMap<String, Vec<f64>>,
    ) -> Result<Option<Waveform>, TemplateError> {
        let wf = match self {
            WaveformTemplate::Constant { duration_ns, value } => {
                let d = eval_duration(duration_ns, bindings)?;
                if d == 0 {
                    return Ok(None);
                }
                Waveform::constant(d, value.eval(bindings)?)?
            }
            WaveformTemplate::Ramp { duration_ns, start, stop } => {
                let d = eval_duration(duration_ns, bindings)?;
                if d == 0 {
                    return Ok(None);
                }
                Waveform::ramp(d, start.eval(bindings)?, stop.eval(bindings)?)?
            }
            WaveformTemplate::Blackman { duration_ns, area } => {
                let d = eval_duration(duration_ns, bindings)?;
                if d == 0 {
                    return Ok(None);
                }
                Waveform::blackman(d, area.eval(bindings)?)?
            }
            WaveformTemplate::Arbitrary { samples } => Waveform::arbitrary(samples.clone())?,
        };
        Ok(Some(wf))
    }

    pub fn visit_vars(&self, f: &mut impl FnMut(&str, Option<usize>)) {
        match self {
            WaveformTemplate::Constant { duration_ns, value } => {
                duration_ns.visit_vars(f);
                value.visit_vars(f);
            }
            WaveformTemplate::Ramp { duration_ns, start, stop } => {
                duration_ns.visit_vars(f);
                start.visit_vars(f);
                stop.visit_vars(f);
            }
            WaveformTemplate::Blackman { duration_ns, area } => {
                duration_ns.visit_vars(f);
                area.visit_vars(f);
            }
            WaveformTemplate::Arbitrary { .. } => {}
        }
    }

    fn substitute(&self, bindings: &HashMap<String, Vec<f64>>) -> Result<Self, ParamError> {
        Ok(match self {
            WaveformTemplate::Constant { duration_ns, value } => WaveformTemplate::Constant {
                duration_ns: duration_ns.substitute(bindings)?,
                value: value.substitute(bindings)?,
            },
            WaveformTemplate::Ramp { duration_ns, start, stop } => WaveformTemplate::Ramp {
                duration_ns: duration_ns.substitute(bindings)?,
                start: start.substitute(bindings)?,
                stop: stop.substitute(bindings)?,
            },
            WaveformTemplate::Blackman { duration_ns, area } => WaveformTemplate::Blackman {
                duration_ns: duration_ns.substitute(bindings)?,
                area: area.substitute(bindings)?,
            },
            WaveformTemplate::Arbitrary { samples } => {
                WaveformTemplate::Arbitrary { samples: samples.clone() }
            }
        })
    }
}

impl From<Waveform> for WaveformTemplate {
    fn from(wf: Waveform) -> Self {
        match wf {
            Waveform::Constant { duration_ns, value } => {
                WaveformTemplate::constant(duration_ns, value)
            }
            Waveform::Ramp { duration_ns, start, stop } => {
                WaveformTemplate::ramp(duration_ns, start, stop)
            }
            Waveform::Blackman { duration_ns, area } => {
                WaveformTemplate::blackman(duration_ns, area)
            }
            Waveform::Arbitrary { samples } => WaveformTemplate::Arbitrary { samples },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TemplateError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// Pulse whose waveform fields and phase may be deferred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseTemplate {
    pub amplitude: WaveformTemplate,
    pub detuning: WaveformTemplate,
    pub phase_rad: Param,
}

impl PulseTemplate {
    pub fn new(
        amplitude: WaveformTemplate,
        detuning: WaveformTemplate,
        phase: impl Into<Param>,
    ) -> Self {
        PulseTemplate { amplitude, detuning, phase_rad: phase.into() }
    }

    /// Constant amplitude and detuning over the given duration.
    pub fn constant(
        duration_ns: impl Into<Param>,
        amplitude: impl Into<Param>,
        detuning: impl Into<Param>,
        phase: impl Into<Param>,
    ) -> Self {
        let duration: Param = duration_ns.into();
        PulseTemplate {
            amplitude: WaveformTemplate::constant(duration.clone(), amplitude),
            detuning: WaveformTemplate::constant(duration, detuning),
            phase_rad: phase.into(),
        }
    }

    pub fn constant_detuning(
        amplitude: WaveformTemplate,
        detuning: impl Into<Param>,
        phase: impl Into<Param>,
    ) -> Self {
        let duration = amplitude.duration_param();
        PulseTemplate {
            amplitude,
            detuning: WaveformTemplate::constant(duration, detuning),
            phase_rad: phase.into(),
        }
    }

    pub fn constant_amplitude(
        amplitude: impl Into<Param>,
        detuning: WaveformTemplate,
        phase: impl Into<Param>,
    ) -> Self {
        let duration = detuning.duration_param();
        PulseTemplate {
            amplitude: WaveformTemplate::constant(duration, amplitude),
            detuning,
            phase_rad: phase.into(),
        }
    }

    /// Rendered pulse, or `None` when both waveform durations round to zero.
    pub(crate) fn resolve(
        &self,
        bindings: &HashMap<String, Vec<f64>>,
    ) -> Result<Option<Pulse>, TemplateError> {
        let amp = self.amplitude.resolve(bindings)?;
        let det = self.detuning.resolve(bindings)?;
        let phase = self.phase_rad.eval(bindings)?;
        match (amp, det) {
            (None, None) => Ok(None),
            (Some(a), Some(d)) => Ok(Some(Pulse::new(a, d, phase)?)),
            (Some(a), None) => Err(SignalError::DurationMismatch {
                amplitude: a.duration_ns(),
                detuning: 0,
            }
            .into()),
            (None, Some(d)) => Err(SignalError::DurationMismatch {
                amplitude: 0,
                detuning: d.duration_ns(),
            }
            .into()),
        }
    }

    pub fn visit_vars(&self, f: &mut impl FnMut(&str, Option<usize>)) {
        self.amplitude.visit_vars(f);
        self.detuning.visit_vars(f);
        self.phase_rad.visit_vars(f);
    }

    pub(crate) fn substitute(&self, bindings: &HashMap<String, Vec<f64>>) -> Result<Self, ParamError> {
        Ok(PulseTemplate {
            amplitude: self.amplitude.substitute(bindings)?,
            detuning: self.detuning.substitute(bindings)?,
            phase_rad: self.phase_rad.substitute(bindings)?,
        })
    }
}

impl WaveformTemplate {
    fn duration_param(&self) -> Param {
        match self {
            WaveformTemplate::Constant { duration_ns, .. }
            | WaveformTemplate::Ramp { duration_ns, .. }
            | WaveformTemplate::Blackman { duration_ns, .. } => duration_ns.clone(),
            WaveformTemplate::Arbitrary { samples } => Param::Value(samples.len() as f64),
        }
    }
}

impl From<Pulse> for PulseTemplate {
    fn from(pulse: Pulse) -> Self {
        PulseTemplate {
            amplitude: pulse.amplitude().clone().into(),
            detuning: pulse.detuning().clone().into(),
            phase_rad: Param::Value(pulse.phase()),
        }
    }
}
