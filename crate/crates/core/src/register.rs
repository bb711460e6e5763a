//! Atom names, 2D coordinates, geometric validation, and the blockade graph.

use crate::device::{Device, Violation};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegisterError {
    #[error("duplicate atom name `{0}`")]
    DuplicateName(String),
    #[error("a register needs at least one atom")]
    Empty,
    #[error("coordinate of atom `{0}` is not finite")]
    NonFiniteCoordinate(String),
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub name: String,
    pub x_um: f64,
    pub y_um: f64,
}

/// Ordered set of named atoms; insertion order fixes the tensor order used
/// by the emulator and the bit order of sampled bitstrings.
#[derive(Debug, Clone, PartialEq)]
pub struct Register {
    atoms: Vec<Atom>,
    index: HashMap<String, usize>,
}

impl Register {
    /// Register from explicit (name, position) pairs, in order.
    pub fn from_named<I, S>(pairs: I) -> Result<Register, RegisterError>
    where
        I: IntoIterator<Item = (S, [f64; 2])>,
        S: Into<String>,
    {
        let mut atoms = Vec::new();
        let mut index = HashMap::new();
        for (name, [x, y]) in pairs {
            let name = name.into();
            if !x.is_finite() || !y.is_finite() {
                return Err(RegisterError::NonFiniteCoordinate(name));
            }
            if index.insert(name.clone(), atoms.len()).is_some() {
                return Err(RegisterError::DuplicateName(name));
            }
            atoms.push(Atom { name, x_um: x, y_um: y });
        }
        if atoms.is_empty() {
            return Err(RegisterError::Empty);
        }
        Ok(Register { atoms, index })
    }

    /// Register from bare coordinates; atoms are named `{prefix}{i}` in
    /// order (bare indices when `prefix` is empty).
    pub fn from_coordinates(coords: &[[f64; 2]], prefix: &str) -> Result<Register, RegisterError> {
        Register::from_named(
            coords.iter().enumerate().map(|(i, &pos)| (format!("{prefix}{i}"), pos)),
        )
    }

    /// side × side square lattice with the given spacing, centered on its
    /// centroid, named `{prefix}{i}` in row-major order.
    pub fn square(side: usize, spacing: f64, prefix: &str) -> Result<Register, RegisterError> {
        if side == 0 {
            return Err(RegisterError::Empty);
        }
        let offset = (side as f64 - 1.0) / 2.0;
        let coords: Vec<[f64; 2]> = (0..side * side)
            .map(|i| {
                let (row, col) = (i / side, i % side);
                [(col as f64 - offset) * spacing, (offset - row as f64) * spacing]
            })
            .collect();
        Register::from_coordinates(&coords, prefix)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.atoms.iter().map(|a| a.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn position(&self, index: usize) -> [f64; 2] {
        let a = &self.atoms[index];
        [a.x_um, a.y_um]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let [xi, yi] = self.position(i);
        let [xj, yj] = self.position(j);
        ((xi - xj).powi(2) + (yi - yj).powi(2)).sqrt()
    }

    pub fn centroid(&self) -> [f64; 2] {
        let n = self.atoms.len() as f64;
        let (sx, sy) = self
            .atoms
            .iter()
            .fold((0.0, 0.0), |(sx, sy), a| (sx + a.x_um, sy + a.y_um));
        [sx / n, sy / n]
    }

    /// Undirected edges (i, j), i < j, between atoms at distance ≤ `radius`.
    pub fn blockade_graph(&self, radius: f64) -> Result<Vec<(usize, usize)>, RegisterError> {
        if !(radius > 0.0) {
            return Err(RegisterError::NonPositiveRadius(radius));
        }
        let mut edges = Vec::new();
        for i in 0..self.atoms.len() {
            for j in i + 1..self.atoms.len() {
                if self.distance(i, j) <= radius {
                    edges.push((i, j));
                }
            }
        }
        Ok(edges)
    }

    /// Check the register against a device's geometric limits. Violations
    /// are returned as data; an empty list means the register fits.
    pub fn validate_against(&self, device: &Device) -> Vec<Violation> {
        let mut violations = Vec::new();
        if self.atoms.len() > device.max_atom_count {
            violations.push(Violation::TooManyAtoms {
                count: self.atoms.len(),
                max: device.max_atom_count,
            });
        }
        for i in 0..self.atoms.len() {
            for j in i + 1..self.atoms.len() {
                let d = self.distance(i, j);
                if d < device.min_atom_distance {
                    violations.push(Violation::AtomsTooClose {
                        a: self.atoms[i].name.clone(),
                        b: self.atoms[j].name.clone(),
                        distance_um: d,
                        min_um: device.min_atom_distance,
                    });
                }
            }
        }
        let [cx, cy] = self.centroid();
        for atom in &self.atoms {
            let d = ((atom.x_um - cx).powi(2) + (atom.y_um - cy).powi(2)).sqrt();
            if d > device.max_radius_from_center {
                violations.push(Violation::AtomTooFarFromCenter {
                    name: atom.name.clone(),
                    distance_um: d,
                    max_um: device.max_radius_from_center,
                });
            }
        }
        violations
    }
}

impl Serialize for Register {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            atoms: &'a [Atom],
        }
        Repr { atoms: &self.atoms }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Register {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            atoms: Vec<Atom>,
        }
        let repr = Repr::deserialize(deserializer)?;
        Register::from_named(repr.atoms.into_iter().map(|a| (a.name, [a.x_um, a.y_um])))
            .map_err(serde::de::Error::custom)
    }
}

/// Atom positions of the five-atom unit-disk graph example.
pub const MIS_EXAMPLE_POSITIONS: [[f64; 2]; 5] =
    [[0.0, 0.0], [-4.0, -7.0], [4.0, -7.0], [8.0, 6.0], [-8.0, 6.0]];
