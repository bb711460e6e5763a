//! Observables over measured (or exactly known) occupations: spin-spin
//! correlations on a lattice, the staggered correlation score, and the
//! independent-set cost function.
//!
//! Occupation here always means the measured bit of an atom, so one code
//! path serves exact state probabilities and empirical counts alike.

use crate::register::Register;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("atom {index} at ({x}, {y}) is not on a lattice of spacing {spacing}")]
    OffLattice { index: usize, x: f64, y: f64, spacing: f64 },
    #[error("atoms {a} and {b} share the lattice site ({k}, {l})")]
    DuplicateSite { a: usize, b: usize, k: i64, l: i64 },
    #[error("no atom pair with displacement ({k}, {l})")]
    NoSuchDisplacement { k: i64, l: i64 },
    #[error("bitstring `{0}` does not match the atom count")]
    BitstringLength(String),
    #[error("occupation statistics need at least one outcome")]
    Empty,
    #[error("the penalty weight must exceed 1, got {0}")]
    BadPenalty(f64),
}

/// Integer lattice coordinates of each atom, in register order.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeMap {
    coords: Vec<(i64, i64)>,
    spacing_um: f64,
}

impl LatticeMap {
    /// Snap register positions to a lattice of the given spacing; the
    /// lattice origin is the register's lower-left corner, so translated
    /// registers work. Each coordinate must sit within 1e-6 µm of a site
    /// and sites must be distinct.
    pub fn from_register(register: &Register, spacing_um: f64) -> Result<LatticeMap, AnalysisError> {
        let x0 = register.atoms().iter().map(|a| a.x_um).fold(f64::INFINITY, f64::min);
        let y0 = register.atoms().iter().map(|a| a.y_um).fold(f64::INFINITY, f64::min);
        let mut coords = Vec::with_capacity(register.len());
        for (index, atom) in register.atoms().iter().enumerate() {
            let k = ((atom.x_um - x0) / spacing_um).round();
            let l = ((atom.y_um - y0) / spacing_um).round();
            if (x0 + k * spacing_um - atom.x_um).abs() > 1e-6
                || (y0 + l * spacing_um - atom.y_um).abs() > 1e-6
            {
                return Err(AnalysisError::OffLattice {
                    index,
                    x: atom.x_um,
                    y: atom.y_um,
                    spacing: spacing_um,
                });
            }
            coords.push((k as i64, l as i64));
        }
        for a in 0..coords.len() {
            for b in a + 1..coords.len() {
                if coords[a] == coords[b] {
                    return Err(AnalysisError::DuplicateSite {
                        a,
                        b,
                        k: coords[a].0,
                        l: coords[a].1,
                    });
                }
            }
        }
        Ok(LatticeMap { coords, spacing_um })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[(i64, i64)] {
        &self.coords
    }

    pub fn spacing_um(&self) -> f64 {
        self.spacing_um
    }

    /// Ordered atom pairs (i, j) with coord(j) − coord(i) = (k, l).
    fn pairs_with_displacement(&self, k: i64, l: i64) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for i in 0..self.coords.len() {
            for j in 0..self.coords.len() {
                if i != j {
                    let (xi, yi) = self.coords[i];
                    let (xj, yj) = self.coords[j];
                    if (xj - xi, yj - yi) == (k, l) {
                        pairs.push((i, j));
                    }
                }
            }
        }
        pairs
    }

    /// Every displacement (k, l) ≠ (0, 0) realized by at least one ordered
    /// pair, sorted.
    pub fn realized_displacements(&self) -> Vec<(i64, i64)> {
        let mut set = std::collections::BTreeSet::new();
        for i in 0..self.coords.len() {
            for j in 0..self.coords.len() {
                if i != j {
                    let (xi, yi) = self.coords[i];
                    let (xj, yj) = self.coords[j];
                    set.insert((xj - xi, yj - yi));
                }
            }
        }
        set.into_iter().collect()
    }
}

/// First and second moments ⟨n_i⟩, ⟨n_i n_j⟩ of measured occupations.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationStats {
    n_atoms: usize,
    mean: Vec<f64>,
    pair: Vec<f64>, // row-major n × n, symmetric
}

impl OccupationStats {
    /// Accumulate from weighted bitstrings; weights need not be normalized
    /// (counts work as-is).
    pub fn from_weighted<'a, I>(outcomes: I) -> Result<OccupationStats, AnalysisError>
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        let mut n_atoms = None;
        let mut total = 0.0;
        let mut mean: Vec<f64> = Vec::new();
        let mut pair: Vec<f64> = Vec::new();
        for (bits, weight) in outcomes {
            let n = *n_atoms.get_or_insert_with(|| {
                mean = vec![0.0; bits.len()];
                pair = vec![0.0; bits.len() * bits.len()];
                bits.len()
            });
            if bits.len() != n || bits.bytes().any(|b| b != b'0' && b != b'1') {
                return Err(AnalysisError::BitstringLength(bits.to_string()));
            }
            let z: Vec<f64> = bits.bytes().map(|b| (b - b'0') as f64).collect();
            total += weight;
            for i in 0..n {
                mean[i] += weight * z[i];
                for j in 0..n {
                    pair[i * n + j] += weight * z[i] * z[j];
                }
            }
        }
        let n = n_atoms.ok_or(AnalysisError::Empty)?;
        if total <= 0.0 {
            return Err(AnalysisError::Empty);
        }
        for m in &mut mean {
            *m /= total;
        }
        for p in &mut pair {
            *p /= total;
        }
        Ok(OccupationStats { n_atoms: n, mean, pair })
    }

    pub fn from_probabilities(probs: &BTreeMap<String, f64>) -> Result<OccupationStats, AnalysisError> {
        OccupationStats::from_weighted(probs.iter().map(|(b, &p)| (b.as_str(), p)))
    }

    pub fn from_counts(counts: &BTreeMap<String, u64>) -> Result<OccupationStats, AnalysisError> {
        OccupationStats::from_weighted(counts.iter().map(|(b, &c)| (b.as_str(), c as f64)))
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.mean[i]
    }

    pub fn pair(&self, i: usize, j: usize) -> f64 {
        self.pair[i * self.n_atoms + j]
    }
}

/// Connected occupation correlation averaged over ordered atom pairs at
/// lattice displacement (k, l).
pub fn g2(stats: &OccupationStats, lattice: &LatticeMap, k: i64, l: i64) -> Result<f64, AnalysisError> {
    let pairs = lattice.pairs_with_displacement(k, l);
    if pairs.is_empty() {
        return Err(AnalysisError::NoSuchDisplacement { k, l });
    }
    let sum: f64 = pairs
        .iter()
        .map(|&(i, j)| stats.pair(i, j) - stats.mean(i) * stats.mean(j))
        .sum();
    Ok(sum / pairs.len() as f64)
}

/// Staggered sum Σ_{(k,l)≠0} (−1)^{|k|+|l|} g²(k,l) over every realized
/// displacement; largest for a checkerboard-ordered state.
pub fn neel_score(stats: &OccupationStats, lattice: &LatticeMap) -> Result<f64, AnalysisError> {
    let mut score = 0.0;
    for (k, l) in lattice.realized_displacements() {
        if (k, l) == (0, 0) {
            continue;
        }
        let sign = if (k.abs() + l.abs()) % 2 == 0 { 1.0 } else { -1.0 };
        score += sign * g2(stats, lattice, k, l)?;
    }
    Ok(score)
}

/// Independent-set cost of one bitstring: −(set size) plus `penalty` per
/// edge with both endpoints selected. For penalty > 1 the minima over all
/// bitstrings are exactly the maximum independent sets.
pub fn mis_bitstring_cost(bits: &str, edges: &[(usize, usize)], penalty: f64) -> f64 {
    let z: Vec<f64> = bits.bytes().map(|b| (b - b'0') as f64).collect();
    let selected: f64 = z.iter().sum();
    let violated: f64 = edges.iter().map(|&(i, j)| z[i] * z[j]).sum();
    -selected + penalty * violated
}

/// Mean independent-set cost over sampled bitstrings; lower is better.
pub fn mis_cost(
    counts: &BTreeMap<String, u64>,
    edges: &[(usize, usize)],
    penalty: f64,
) -> Result<f64, AnalysisError> {
    if !(penalty > 1.0) {
        return Err(AnalysisError::BadPenalty(penalty));
    }
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(AnalysisError::Empty);
    }
    let sum: f64 = counts
        .iter()
        .map(|(bits, &c)| c as f64 * mis_bitstring_cost(bits, edges, penalty))
        .sum();
    Ok(sum / total as f64)
}
