//! State-vector emulation of a concrete sequence: time evolution under the
//! sampled drives plus Rydberg interactions, expectation values, basis
//! reduction, and measurement sampling.
//!
//! Propagation is piecewise-constant: time is cut into macro-steps of
//! Δ = round(1/sampling_rate) ns, H is evaluated at the midpoint tick of
//! each step, and the state advances by exp(−i H Δ) computed to solver
//! tolerance, which preserves unitarity. ħ = 1 throughout; energies are
//! rad/µs and times µs.

mod hamiltonian;
mod levels;
mod propagate;

pub use hamiltonian::{Hamiltonian, HamiltonianBuilder};
pub use levels::{Level, LevelStructure};

use crate::device::{Basis, Device};
use crate::par;
use crate::register::Register;
use crate::sampler::{sample_sequence, DriveSamples, SamplerError};
use crate::sequence::Sequence;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use std::collections::BTreeMap;
use thiserror::Error;

/// Per-step solver tolerance for the exp(−iHΔ) action.
const STEP_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmulatorError {
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error("Hilbert space dimension {dim} exceeds the cap of {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },
    #[error("sampling rate must lie in (0, 1], got {0}")]
    BadSamplingRate(f64),
    #[error("initial state has dimension {got}, system needs {expected}")]
    InitialStateDimension { got: usize, expected: usize },
    #[error("initial state norm deviates from 1 by more than 1e-12")]
    InitialStateNotNormalized,
    #[error("operator dimension {op_dim} does not match the system dimension {state_dim}")]
    DimensionMismatch { op_dim: usize, state_dim: usize },
    #[error("reduction discards population {leakage:.3e}, above the tolerance {tol:.3e}")]
    LeakageAboveTolerance { leakage: f64, tol: f64 },
    #[error("basis {0} is not representable in this level structure")]
    BasisNotInStructure(Basis),
    #[error("no measurement basis: measure the sequence or pass one explicitly")]
    NoMeasurementBasis,
    #[error("sample count must be at least 1")]
    NoSamples,
}

/// Emulation parameters.
#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Fraction of ns ticks at which H is re-evaluated; the macro-step is
    /// round(1/sampling_rate) ns.
    pub sampling_rate: f64,
    /// Start state; defaults to every atom in |g⟩.
    pub initial_state: Option<DVector<Complex64>>,
    /// Default tolerance on discarded population in basis reduction.
    pub leakage_tol: f64,
    /// Default seed for measurement sampling.
    pub seed: u64,
    /// Override of the built-in dimension cap (3⁸ for three-level systems,
    /// 2¹⁴ for two-level ones).
    pub max_dimension: Option<usize>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            sampling_rate: 1.0,
            initial_state: None,
            leakage_tol: 1e-2,
            seed: 0,
            max_dimension: None,
        }
    }
}

impl SimConfig {
    pub fn with_sampling_rate(rate: f64) -> SimConfig {
        SimConfig { sampling_rate: rate, ..SimConfig::default() }
    }
}

/// Time-indexed state vectors of one run, with post-processing accessors.
#[derive(Debug, Clone)]
pub struct SimResults {
    times_us: Vec<f64>,
    states: Vec<DVector<Complex64>>,
    structure: LevelStructure,
    qubits: Vec<String>,
    meas_basis: Option<Basis>,
    default_seed: u64,
}

/// Normalized basis state with the given per-atom levels.
pub fn product_state(structure: &LevelStructure, levels: &[Level]) -> Option<DVector<Complex64>> {
    let index = structure.state_index(levels)?;
    let mut psi = DVector::zeros(structure.dim()?);
    psi[index] = Complex64::new(1.0, 0.0);
    Some(psi)
}

/// Dense H(t)/ħ at one tick of the sampled drives.
pub fn build_hamiltonian(
    samples: &DriveSamples,
    register: &Register,
    device: &Device,
    structure: &LevelStructure,
    tick: u64,
) -> DMatrix<Complex64> {
    HamiltonianBuilder::new(samples, register, device, structure.clone())
        .at_tick(tick)
        .to_dense()
}

/// Evolve a concrete sequence and record the state at every macro-step
/// boundary.
pub fn run(seq: &Sequence, config: &SimConfig) -> Result<SimResults, EmulatorError> {
    if !(config.sampling_rate > 0.0 && config.sampling_rate <= 1.0) {
        return Err(EmulatorError::BadSamplingRate(config.sampling_rate));
    }
    let samples = sample_sequence(seq)?;
    let structure = LevelStructure::from_bases(&samples.bases, seq.register().len());
    let default_cap = if structure.n_levels() == 3 { 6561 } else { 16384 };
    let cap = config.max_dimension.unwrap_or(default_cap);
    let dim = structure.dim().filter(|&d| d <= cap).ok_or_else(|| {
        EmulatorError::DimensionTooLarge { dim: structure.dim().unwrap_or(usize::MAX), cap }
    })?;

    let mut psi = match &config.initial_state {
        Some(state) => {
            if state.len() != dim {
                return Err(EmulatorError::InitialStateDimension { got: state.len(), expected: dim });
            }
            if (state.norm() - 1.0).abs() > 1e-12 {
                return Err(EmulatorError::InitialStateNotNormalized);
            }
            state.clone()
        }
        None => {
            let mut psi = DVector::zeros(dim);
            psi[structure.all_ground_index()] = Complex64::new(1.0, 0.0);
            psi
        }
    };

    let builder = HamiltonianBuilder::new(&samples, seq.register(), seq.device(), structure.clone());
    let delta = (1.0 / config.sampling_rate).round().max(1.0) as u64;
    let duration = samples.duration_ns;
    let mut times_us = vec![0.0];
    let mut states = vec![psi.clone()];
    let mut t = 0u64;
    while t < duration {
        let len = delta.min(duration - t);
        let h = builder.at_window_center(t, len);
        psi = propagate::expmv(&h, len as f64 * 1e-3, &psi, STEP_TOL);
        t += len;
        times_us.push(t as f64 * 1e-3);
        states.push(psi.clone());
    }

    Ok(SimResults {
        times_us,
        states,
        structure,
        qubits: samples.qubits,
        meas_basis: seq.measurement_basis(),
        default_seed: config.seed,
    })
}

/// Run several sequences under the same configuration; with the `parallel`
/// feature the runs fan out over the thread pool.
pub fn run_batch(seqs: &[Sequence], config: &SimConfig) -> Result<Vec<SimResults>, EmulatorError> {
    par::try_map(seqs, |seq| run(seq, config))
}

impl SimResults {
    /// Evaluation times in µs, starting at 0 and ending at the sequence
    /// duration.
    pub fn times_us(&self) -> &[f64] {
        &self.times_us
    }

    pub fn states(&self) -> &[DVector<Complex64>] {
        &self.states
    }

    pub fn structure(&self) -> &LevelStructure {
        &self.structure
    }

    pub fn qubits(&self) -> &[String] {
        &self.qubits
    }

    pub fn measurement_basis(&self) -> Option<Basis> {
        self.meas_basis
    }

    pub fn final_state(&self) -> &DVector<Complex64> {
        self.states.last().expect("at least the initial state is recorded")
    }

    /// ⟨ψ(t)|O|ψ(t)⟩ for each operator, over all recorded times.
    pub fn expect(&self, operators: &[DMatrix<Complex64>]) -> Result<Vec<Vec<Complex64>>, EmulatorError> {
        let dim = self.final_state().len();
        for op in operators {
            if op.nrows() != dim || op.ncols() != dim {
                return Err(EmulatorError::DimensionMismatch { op_dim: op.nrows(), state_dim: dim });
            }
        }
        Ok(operators
            .iter()
            .map(|op| {
                par::map_indexed(self.states.len(), |k| {
                    let psi = &self.states[k];
                    psi.dotc(&(op * psi))
                })
            })
            .collect())
    }

    /// Final state, optionally projected onto the two levels of `basis`.
    ///
    /// Reduction fails if the discarded population exceeds `tol`; otherwise
    /// the projected state is renormalized and rotated by a global phase
    /// that makes its largest-magnitude amplitude real and non-negative.
    pub fn get_final_state(
        &self,
        reduce_to_basis: Option<Basis>,
        tol: f64,
    ) -> Result<DVector<Complex64>, EmulatorError> {
        let last = self.final_state();
        let Some(basis) = reduce_to_basis else {
            return Ok(last.clone());
        };
        let kept = match basis {
            Basis::GroundRydberg => [Level::R, Level::G],
            Basis::Digital => [Level::G, Level::H],
        };
        let kept_idx: Vec<usize> = kept
            .iter()
            .map(|&l| self.structure.index_of(l).ok_or(EmulatorError::BasisNotInStructure(basis)))
            .collect::<Result<_, _>>()?;
        let n = self.structure.n_atoms();
        let reduced_dim = 1usize << n;
        let mut reduced = DVector::zeros(reduced_dim);
        for k in 0..reduced_dim {
            // bit 0 of an atom selects the first kept level (r < g < h order)
            let mut full = 0usize;
            for atom in 0..n {
                let bit = (k >> (n - 1 - atom)) & 1;
                full += kept_idx[bit] * self.structure.stride(atom);
            }
            reduced[k] = last[full];
        }
        let kept_population = reduced.norm_squared();
        let leakage = (last.norm_squared() - kept_population).max(0.0);
        if leakage > tol {
            return Err(EmulatorError::LeakageAboveTolerance { leakage, tol });
        }
        if kept_population > 0.0 {
            reduced.unscale_mut(kept_population.sqrt());
        }
        let largest = reduced.iter().cloned().max_by(|a, b| a.norm().total_cmp(&b.norm()));
        if let Some(z) = largest {
            if z.norm() > 0.0 {
                let rotation = z.conj() / z.norm();
                reduced *= rotation;
            }
        }
        Ok(reduced)
    }

    /// Probability of each measured bitstring of the final state, per the
    /// basis-dependent measurement convention.
    pub fn bitstring_probabilities(&self, basis: Basis) -> BTreeMap<String, f64> {
        let last = self.final_state();
        let mut probs: BTreeMap<String, f64> = BTreeMap::new();
        for (index, amp) in last.iter().enumerate() {
            let p = amp.norm_sqr();
            if p > 0.0 {
                *probs.entry(self.structure.bitstring_of(index, basis)).or_insert(0.0) += p;
            }
        }
        probs
    }

    /// JSON export: times in µs, active levels, qubit names, and one state
    /// vector per time with amplitudes as [re, im] pairs.
    pub fn export_json(&self) -> serde_json::Value {
        serde_json::json!({
            "times_us": self.times_us,
            "levels": self.structure.levels().iter().map(|l| l.label().to_string()).collect::<Vec<_>>(),
            "qubits": self.qubits,
            "states": self
                .states
                .iter()
                .map(|s| s.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    /// Multinomial sample of `n_samples` measurement outcomes of the final
    /// state. The basis must come from `measure()` or be given here.
    pub fn sample_final_state(
        &self,
        n_samples: u64,
        meas_basis: Option<Basis>,
        seed: Option<u64>,
    ) -> Result<BTreeMap<String, u64>, EmulatorError> {
        if n_samples == 0 {
            return Err(EmulatorError::NoSamples);
        }
        let basis = meas_basis.or(self.meas_basis).ok_or(EmulatorError::NoMeasurementBasis)?;
        let probs = self.bitstring_probabilities(basis);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(self.default_seed));
        Ok(multinomial(&probs, n_samples, &mut rng))
    }
}

/// Draw a multinomial sample by chained conditional binomials; outcome
/// order (sorted bitstrings) makes the draw reproducible for a fixed seed.
fn multinomial(
    probs: &BTreeMap<String, f64>,
    n_samples: u64,
    rng: &mut ChaCha8Rng,
) -> BTreeMap<String, u64> {
    let total: f64 = probs.values().sum();
    let mut counts = BTreeMap::new();
    let mut remaining = n_samples;
    let mut rest = total;
    let mut entries = probs.iter().peekable();
    while let Some((bits, &p)) = entries.next() {
        if remaining == 0 {
            break;
        }
        let draw = if entries.peek().is_none() || rest <= p {
            remaining
        } else {
            let q = (p / rest).clamp(0.0, 1.0);
            Binomial::new(remaining, q).expect("q in [0, 1]").sample(rng)
        };
        if draw > 0 {
            counts.insert(bits.clone(), draw);
        }
        remaining -= draw;
        rest -= p;
    }
    counts
}
