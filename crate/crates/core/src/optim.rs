//! Derivative-free simplex optimization and the closed-loop QAOA harness.

use crate::analysis::{mis_cost, AnalysisError};
use crate::device::Basis;
use crate::emulator::{run, EmulatorError, SimConfig};
use crate::sequence::{Sequence, SequenceError};
use std::cell::RefCell;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimError {
    #[error("objective is not finite at the starting point")]
    NonFiniteStart,
    #[error("the starting point must have at least one coordinate")]
    EmptyStart,
    #[error("the sequence is not parametrized")]
    NotParametrized,
    #[error("expected duration variables `t_list` and `s_list`, each of size {0}")]
    WrongVariables(usize),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Emulator(#[from] EmulatorError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// One objective evaluation, in call order.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub index: usize,
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    /// Cap on objective evaluations (the starting point always counts as
    /// one, so the effective cap is at least 1).
    pub max_evals: usize,
    /// Stop once the simplex value spread falls to this.
    pub f_tol: f64,
    /// Stop once the simplex diameter falls to this.
    pub x_tol: f64,
    /// Edge length of the initial axis-aligned simplex.
    pub init_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions { max_evals: 200, f_tol: 1e-9, x_tol: 1e-9, init_step: 0.3 }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<EvalRecord>,
}

// standard simplex coefficients: reflection, expansion, contraction, shrink
const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

struct Tracker<'a, F> {
    f: F,
    trace: &'a mut Vec<EvalRecord>,
    best: Option<(Vec<f64>, f64)>,
    max_evals: usize,
}

impl<F: FnMut(&[f64]) -> f64> Tracker<'_, F> {
    fn budget_left(&self) -> bool {
        self.trace.len() < self.max_evals
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        let raw = (self.f)(x);
        let value = if raw.is_finite() { raw } else { f64::INFINITY };
        self.trace.push(EvalRecord { index: self.trace.len(), point: x.to_vec(), value });
        if self.best.as_ref().is_none_or(|(_, fb)| value < *fb) {
            self.best = Some((x.to_vec(), value));
        }
        value
    }
}

/// Minimize with the Nelder-Mead simplex method.
///
/// Terminates on the evaluation budget or once the simplex value spread or
/// diameter crosses its tolerance; on tolerance-based convergence the final
/// simplex centroid is evaluated once and returned if it is at least as
/// good as the best vertex. The result never beats `trace` — the returned
/// point is the best evaluated one.
pub fn nelder_mead(
    objective: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    options: &NelderMeadOptions,
) -> Result<NelderMeadResult, OptimError> {
    if x0.is_empty() {
        return Err(OptimError::EmptyStart);
    }
    let dim = x0.len();
    let mut trace = Vec::new();
    let mut tracker = Tracker {
        f: objective,
        trace: &mut trace,
        best: None,
        max_evals: options.max_evals.max(1),
    };

    let f0 = tracker.eval(x0);
    if !f0.is_finite() {
        return Err(OptimError::NonFiniteStart);
    }

    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), f0)];
    for i in 0..dim {
        if !tracker.budget_left() {
            break;
        }
        let mut v = x0.to_vec();
        v[i] += options.init_step;
        let fv = tracker.eval(&v);
        simplex.push((v, fv));
    }

    let mut iterations = 0;
    let mut converged = false;
    if simplex.len() == dim + 1 {
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread = simplex[dim].1 - simplex[0].1;
            let diameter = simplex[1..]
                .iter()
                .map(|(v, _)| {
                    v.iter()
                        .zip(&simplex[0].0)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(0.0f64, f64::max);
            if spread <= options.f_tol || diameter <= options.x_tol {
                converged = true;
                // polish: the centroid of a converged simplex is as good a
                // summary as any vertex, so it wins ties
                if tracker.budget_left() {
                    let centroid = full_centroid(&simplex);
                    let fc = tracker.eval(&centroid);
                    if tracker.best.as_ref().is_some_and(|(_, fb)| fc <= *fb) {
                        tracker.best = Some((centroid, fc));
                    }
                }
                break;
            }
            if !tracker.budget_left() {
                break;
            }
            iterations += 1;

            let centroid = centroid_excluding_worst(&simplex);
            let worst = simplex[dim].clone();
            let reflected: Vec<f64> = centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + REFLECT * (c - w))
                .collect();
            let fr = tracker.eval(&reflected);

            if fr < simplex[0].1 {
                if tracker.budget_left() {
                    let expanded: Vec<f64> = centroid
                        .iter()
                        .zip(&reflected)
                        .map(|(c, r)| c + EXPAND * (r - c))
                        .collect();
                    let fe = tracker.eval(&expanded);
                    simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
                } else {
                    simplex[dim] = (reflected, fr);
                }
            } else if fr < simplex[dim - 1].1 {
                simplex[dim] = (reflected, fr);
            } else {
                // contraction, outside or inside of the reflection
                let (anchor, f_anchor) =
                    if fr < worst.1 { (&reflected, fr) } else { (&worst.0, worst.1) };
                if !tracker.budget_left() {
                    break;
                }
                let contracted: Vec<f64> = centroid
                    .iter()
                    .zip(anchor)
                    .map(|(c, a)| c + CONTRACT * (a - c))
                    .collect();
                let fc = tracker.eval(&contracted);
                if fc < f_anchor {
                    simplex[dim] = (contracted, fc);
                } else {
                    // shrink every vertex towards the best
                    let best = simplex[0].0.clone();
                    for vertex in simplex.iter_mut().skip(1) {
                        if !tracker.budget_left() {
                            break;
                        }
                        let shrunk: Vec<f64> = best
                            .iter()
                            .zip(&vertex.0)
                            .map(|(b, v)| b + SHRINK * (v - b))
                            .collect();
                        let fs = tracker.eval(&shrunk);
                        *vertex = (shrunk, fs);
                    }
                }
            }
        }
    }

    let (x, f) = tracker.best.clone().expect("x0 was evaluated");
    let evals = trace.len();
    Ok(NelderMeadResult { x, f, evals, iterations, converged, trace })
}

fn centroid_excluding_worst(simplex: &[(Vec<f64>, f64)]) -> Vec<f64> {
    let dim = simplex.len() - 1;
    let mut c = vec![0.0; simplex[0].0.len()];
    for (v, _) in &simplex[..dim] {
        for (ci, vi) in c.iter_mut().zip(v) {
            *ci += vi;
        }
    }
    for ci in &mut c {
        *ci /= dim as f64;
    }
    c
}

fn full_centroid(simplex: &[(Vec<f64>, f64)]) -> Vec<f64> {
    let mut c = vec![0.0; simplex[0].0.len()];
    for (v, _) in simplex {
        for (ci, vi) in c.iter_mut().zip(v) {
            *ci += vi;
        }
    }
    for ci in &mut c {
        *ci /= simplex.len() as f64;
    }
    c
}

#[derive(Debug, Clone)]
pub struct QaoaOptions {
    pub layers: usize,
    /// Measurement shots per objective evaluation.
    pub samples_per_eval: u64,
    /// Shots in the final histogram at the best parameters.
    pub final_samples: u64,
    pub seed: u64,
    /// Objective evaluation budget for the optimizer.
    pub budget: usize,
    /// Independent-set penalty weight (> 1).
    pub penalty: f64,
    pub sampling_rate: f64,
    /// Starting durations in µs, length 2·layers (t then s).
    pub initial_point: Vec<f64>,
    pub initial_step: f64,
}

impl QaoaOptions {
    pub fn new(layers: usize) -> QaoaOptions {
        QaoaOptions {
            layers,
            samples_per_eval: 500,
            final_samples: 10_000,
            seed: 0,
            budget: 100,
            penalty: 2.0,
            sampling_rate: 1.0,
            initial_point: vec![1.0; 2 * layers],
            initial_step: 0.3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QaoaOutcome {
    /// Best layer durations found, in µs (t_list then s_list, clamped).
    pub best_params: Vec<f64>,
    pub best_cost: f64,
    /// Histogram of `final_samples` shots at the best parameters.
    pub counts: BTreeMap<String, u64>,
    pub trace: Vec<EvalRecord>,
    pub evals: usize,
}

/// Closed-loop QAOA: optimize the layer durations of a parametrized
/// sequence against the sampled independent-set cost on `edges`.
///
/// The blueprint must declare `t_list` and `s_list`, both of size
/// `layers`. Durations are in µs; candidates below zero are clamped to the
/// largest channel minimum so every build stays valid.
pub fn qaoa_loop(
    blueprint: &Sequence,
    edges: &[(usize, usize)],
    options: &QaoaOptions,
) -> Result<QaoaOutcome, OptimError> {
    if !blueprint.is_parametrized() {
        return Err(OptimError::NotParametrized);
    }
    let layers = options.layers;
    let sizes_ok = blueprint.variables().len() == 2
        && blueprint.variables().get("t_list") == Some(&layers)
        && blueprint.variables().get("s_list") == Some(&layers);
    if !sizes_ok {
        return Err(OptimError::WrongVariables(layers));
    }
    let min_duration_ns = blueprint
        .declared_channels()
        .map(|c| c.spec().min_duration)
        .max()
        .unwrap_or(1) as f64;
    // negative and sub-minimum durations snap to the channel minimum;
    // exact zeros stay zero, which drops the pulse entirely
    let clamp = move |params: &[f64]| -> Vec<f64> {
        params
            .iter()
            .map(|&p| {
                if p < 0.0 {
                    return min_duration_ns / 1000.0;
                }
                let ns = (p * 1000.0).round();
                if ns > 0.0 && ns < min_duration_ns {
                    min_duration_ns / 1000.0
                } else {
                    p
                }
            })
            .collect()
    };

    let config = SimConfig { sampling_rate: options.sampling_rate, ..SimConfig::default() };
    let evaluate = |params: &[f64], shots: u64, seed: u64| -> Result<(Vec<f64>, f64, BTreeMap<String, u64>), OptimError> {
        let clamped = clamp(params);
        let built = blueprint.build(&[
            ("t_list", clamped[..layers].to_vec()),
            ("s_list", clamped[layers..].to_vec()),
        ])?;
        let results = run(&built, &config)?;
        let counts = results.sample_final_state(shots, Some(Basis::GroundRydberg), Some(seed))?;
        let cost = mis_cost(&counts, edges, options.penalty)?;
        Ok((clamped, cost, counts))
    };

    let failure: RefCell<Option<OptimError>> = RefCell::new(None);
    let eval_counter = RefCell::new(0u64);
    let objective = |params: &[f64]| -> f64 {
        let index = {
            let mut c = eval_counter.borrow_mut();
            *c += 1;
            *c
        };
        let seed = options.seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        match evaluate(params, options.samples_per_eval, seed) {
            Ok((_, cost, _)) => cost,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };

    let nm_options = NelderMeadOptions {
        max_evals: options.budget,
        init_step: options.initial_step,
        ..NelderMeadOptions::default()
    };
    let result = nelder_mead(objective, &options.initial_point, &nm_options);
    // an evaluation failure surfaces as a non-finite objective; report the
    // underlying error rather than the optimizer's view of it
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let result = result?;

    let (best_params, _, counts) =
        evaluate(&result.x, options.final_samples, options.seed.wrapping_add(1))?;
    Ok(QaoaOutcome {
        best_params,
        best_cost: result.f,
        counts,
        trace: result.trace,
        evals: result.evals,
    })
}
