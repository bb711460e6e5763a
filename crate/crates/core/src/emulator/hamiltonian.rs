//! The instantaneous Hamiltonian H(t)/ħ of the driven, interacting array.
//!
//! For every driven (atom, basis) pair the drive contributes
//! (Ω/2)(e^{-iφ}|a⟩⟨b| + e^{+iφ}|b⟩⟨a|) − (δ/2)(|b⟩⟨b| − |a⟩⟨a|), with
//! (a, b) the lower/upper levels of the transition; atom pairs both in |r⟩
//! pick up the van der Waals shift C₆/R⁶. Everything is kept in the
//! diagonal + one-atom-coupling form so applying H to a state costs
//! O(dim · terms) instead of O(dim²).

use super::levels::{Level, LevelStructure};
use crate::device::Device;
use crate::par;
use crate::register::Register;
use crate::sampler::DriveSamples;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Size below which applying H stays single-threaded.
const PAR_DIM_THRESHOLD: usize = 1 << 12;
const PAR_CHUNK: usize = 1 << 10;

/// One driven transition of one atom at a fixed tick.
#[derive(Debug, Clone, Copy)]
struct Coupling {
    stride: usize,
    /// Signed index offset from the |a⟩ digit to the |b⟩ digit.
    offset: isize,
    a: usize,
    b: usize,
    /// (Ω/2)·e^{-iφ}, the coefficient of |a⟩⟨b|.
    amp: Complex64,
}

/// Hamiltonian at one tick, in matrix-free form.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    structure: LevelStructure,
    dim: usize,
    diag: Vec<f64>,
    couplings: Vec<Coupling>,
}

impl Hamiltonian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// out = H·v.
    pub fn apply(&self, v: &DVector<Complex64>, out: &mut DVector<Complex64>) {
        debug_assert_eq!(v.len(), self.dim);
        let vs = v.as_slice();
        let diag = &self.diag;
        let couplings = &self.couplings;
        let levels = self.structure.n_levels();
        let entry = |i: usize| {
            let mut acc = vs[i] * diag[i];
            for c in couplings {
                let digit = (i / c.stride) % levels;
                if digit == c.a {
                    let j = (i as isize + c.offset) as usize;
                    acc += c.amp * vs[j];
                } else if digit == c.b {
                    let j = (i as isize - c.offset) as usize;
                    acc += c.amp.conj() * vs[j];
                }
            }
            acc
        };
        if self.dim < PAR_DIM_THRESHOLD {
            for (i, slot) in out.as_mut_slice().iter_mut().enumerate() {
                *slot = entry(i);
            }
        } else {
            par::fill_indexed(out.as_mut_slice(), PAR_CHUNK, entry);
        }
    }

    /// (self + other) / 2 for two Hamiltonians over the same structure.
    fn mean_with(mut self, other: Hamiltonian) -> Hamiltonian {
        debug_assert_eq!(self.dim, other.dim);
        for (d, od) in self.diag.iter_mut().zip(&other.diag) {
            *d = 0.5 * (*d + od);
        }
        for c in &mut self.couplings {
            c.amp *= 0.5;
        }
        self.couplings.extend(other.couplings.into_iter().map(|mut c| {
            c.amp *= 0.5;
            c
        }));
        self
    }

    /// Dense matrix form, ⟨i|H|j⟩ at (i, j).
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            m[(i, i)] = Complex64::from(self.diag[i]);
        }
        let levels = self.structure.n_levels();
        for c in &self.couplings {
            for i in 0..self.dim {
                if (i / c.stride) % levels == c.a {
                    let j = (i as isize + c.offset) as usize;
                    m[(i, j)] += c.amp;
                    m[(j, i)] += c.amp.conj();
                }
            }
        }
        m
    }

}

/// Prepares per-tick Hamiltonians for one run: the interaction diagonal is
/// computed once, drive terms are read from the samples at each tick.
pub struct HamiltonianBuilder<'a> {
    samples: &'a DriveSamples,
    structure: LevelStructure,
    dim: usize,
    interaction: Vec<f64>,
}

impl<'a> HamiltonianBuilder<'a> {
    pub fn new(
        samples: &'a DriveSamples,
        register: &Register,
        device: &Device,
        structure: LevelStructure,
    ) -> HamiltonianBuilder<'a> {
        let dim = structure.dim().expect("dimension checked by caller");
        let interaction = interaction_diagonal(register, device, &structure);
        HamiltonianBuilder { samples, structure, dim, interaction }
    }

    pub fn structure(&self) -> &LevelStructure {
        &self.structure
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// H centered on the window [start, start+len): the central tick for
    /// odd lengths, the mean of the two central ticks for even ones (tick
    /// k holds the drive over [k, k+1), so the window center falls between
    /// samples; H is linear in the drives, so averaging is exact there).
    pub fn at_window_center(&self, start: u64, len: u64) -> Hamiltonian {
        if len % 2 == 1 || len == 0 {
            self.at_tick(start + len / 2)
        } else {
            let lo = self.at_tick(start + len / 2 - 1);
            let hi = self.at_tick(start + len / 2);
            lo.mean_with(hi)
        }
    }

    /// H at the given tick (ns index into the drive samples).
    pub fn at_tick(&self, tick: u64) -> Hamiltonian {
        let mut diag = self.interaction.clone();
        let mut couplings = Vec::new();
        let k = tick as usize;
        for ((atom, basis), track) in &self.samples.tracks {
            let amp = track.amp[k];
            let det = track.det[k];
            if amp == 0.0 && det == 0.0 {
                continue;
            }
            let Some((a, b)) = self.structure.transition(*basis) else {
                continue;
            };
            let stride = self.structure.stride(*atom);
            if det != 0.0 {
                let half = det / 2.0;
                let levels = self.structure.n_levels();
                for (i, d) in diag.iter_mut().enumerate() {
                    let digit = (i / stride) % levels;
                    if digit == b {
                        *d -= half;
                    } else if digit == a {
                        *d += half;
                    }
                }
            }
            if amp != 0.0 {
                let phase = track.phase[k];
                couplings.push(Coupling {
                    stride,
                    offset: (b as isize - a as isize) * stride as isize,
                    a,
                    b,
                    amp: 0.5 * amp * Complex64::new(0.0, -phase).exp(),
                });
            }
        }
        Hamiltonian { structure: self.structure.clone(), dim: self.dim, diag, couplings }
    }
}

/// Σ_{j<i} C₆/R_ij⁶ n_i n_j over basis states, zero when |r⟩ is inactive.
fn interaction_diagonal(register: &Register, device: &Device, structure: &LevelStructure) -> Vec<f64> {
    let dim = structure.dim().expect("dimension checked by caller");
    let Some(r) = structure.index_of(Level::R) else {
        return vec![0.0; dim];
    };
    let n = register.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j, device.c6 / register.distance(i, j).powi(6)));
        }
    }
    let levels = structure.n_levels();
    let strides: Vec<usize> = (0..n).map(|atom| structure.stride(atom)).collect();
    let entry = |index: usize| {
        pairs
            .iter()
            .filter(|(i, j, _)| {
                (index / strides[*i]) % levels == r && (index / strides[*j]) % levels == r
            })
            .map(|(_, _, v)| v)
            .sum::<f64>()
    };
    let mut diag = vec![0.0; dim];
    if dim < PAR_DIM_THRESHOLD {
        for (i, d) in diag.iter_mut().enumerate() {
            *d = entry(i);
        }
    } else {
        par::fill_indexed(&mut diag, PAR_CHUNK, entry);
    }
    diag
}
