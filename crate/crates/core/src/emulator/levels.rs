//! Hilbert-space bookkeeping: which single-atom levels are active and how
//! multi-atom basis states are indexed.
//!
//! Levels order as r < g < h; atoms tensor in register order with the first
//! atom most significant. The active level set follows the declared channel
//! bases: ground-rydberg alone gives {r, g}, digital alone {g, h}, both
//! give the full {r, g, h}.

use crate::device::Basis;
use std::collections::BTreeSet;

/// Single-atom electronic level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    /// Rydberg state |r⟩.
    R,
    /// Ground state |g⟩.
    G,
    /// Hyperfine state |h⟩.
    H,
}

impl Level {
    pub fn label(self) -> char {
        match self {
            Level::R => 'r',
            Level::G => 'g',
            Level::H => 'h',
        }
    }

    /// Measured bit of this level in the given basis: the state exclusive
    /// to the basis reads 1, everything else 0.
    pub fn bit(self, basis: Basis) -> char {
        match (basis, self) {
            (Basis::GroundRydberg, Level::R) | (Basis::Digital, Level::H) => '1',
            _ => '0',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelStructure {
    levels: Vec<Level>,
    n_atoms: usize,
}

impl LevelStructure {
    pub fn new(levels: Vec<Level>, n_atoms: usize) -> LevelStructure {
        debug_assert!(levels.windows(2).all(|w| w[0] < w[1]));
        LevelStructure { levels, n_atoms }
    }

    /// Active levels for the given set of driven bases; an empty set
    /// defaults to ground-rydberg.
    pub fn from_bases(bases: &BTreeSet<Basis>, n_atoms: usize) -> LevelStructure {
        let gr = bases.contains(&Basis::GroundRydberg);
        let dig = bases.contains(&Basis::Digital);
        let levels = match (gr, dig) {
            (true, true) => vec![Level::R, Level::G, Level::H],
            (false, true) => vec![Level::G, Level::H],
            _ => vec![Level::R, Level::G],
        };
        LevelStructure::new(levels, n_atoms)
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    /// Total Hilbert-space dimension (levels ^ atoms), if representable.
    pub fn dim(&self) -> Option<usize> {
        (self.n_levels()).checked_pow(u32::try_from(self.n_atoms).ok()?)
    }

    /// Index of a level within the active set.
    pub fn index_of(&self, level: Level) -> Option<usize> {
        self.levels.iter().position(|&l| l == level)
    }

    /// (lower, upper) level indices of the transition a basis drives.
    pub fn transition(&self, basis: Basis) -> Option<(usize, usize)> {
        let g = self.index_of(Level::G)?;
        match basis {
            Basis::GroundRydberg => Some((g, self.index_of(Level::R)?)),
            Basis::Digital => Some((g, self.index_of(Level::H)?)),
        }
    }

    /// Stride of one atom's digit in the state index.
    pub fn stride(&self, atom: usize) -> usize {
        self.n_levels().pow((self.n_atoms - 1 - atom) as u32)
    }

    /// Level digit of `atom` within basis state `index`.
    pub fn level_digit(&self, index: usize, atom: usize) -> usize {
        (index / self.stride(atom)) % self.n_levels()
    }

    /// Basis-state index of a per-atom level assignment.
    pub fn state_index(&self, levels: &[Level]) -> Option<usize> {
        if levels.len() != self.n_atoms {
            return None;
        }
        let mut index = 0;
        for &level in levels {
            index = index * self.n_levels() + self.index_of(level)?;
        }
        Some(index)
    }

    /// Index of the all-ground state.
    pub fn all_ground_index(&self) -> usize {
        let g = self.index_of(Level::G).expect("g is always active");
        let mut index = 0;
        for _ in 0..self.n_atoms {
            index = index * self.n_levels() + g;
        }
        index
    }

    /// Measured bitstring of a basis state per the measurement convention,
    /// first atom leftmost.
    pub fn bitstring_of(&self, index: usize, basis: Basis) -> String {
        (0..self.n_atoms)
            .map(|atom| self.levels[self.level_digit(index, atom)].bit(basis))
            .collect()
    }
}
