use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Structural kind of one tensor factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubsystemKind {
    Atom { levels: usize },
    Boson { truncation: usize },
}

impl SubsystemKind {
    pub fn dim(self) -> usize {
        match self {
            SubsystemKind::Atom { levels } => levels,
            SubsystemKind::Boson { truncation } => truncation,
        }
    }

    pub fn is_boson(self) -> bool {
        matches!(self, SubsystemKind::Boson { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsystemSpec {
    pub kind: SubsystemKind,
    pub label: String,
}

impl SubsystemSpec {
    pub fn atom(label: &str, levels: usize) -> Self {
        SubsystemSpec {
            kind: SubsystemKind::Atom { levels },
            label: label.to_string(),
        }
    }

    pub fn boson(label: &str, truncation: usize) -> Self {
        SubsystemSpec {
            kind: SubsystemKind::Boson { truncation },
            label: label.to_string(),
        }
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }
}

/// Ordered tensor product of subsystems.
///
/// Basis index of a product ket is row-major over `parts`: the last part
/// varies fastest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompositeSpace {
    parts: Vec<SubsystemSpec>,
    dims: Vec<usize>,
    dim: usize,
}

/// Labels of the canonical network ordering (atom1, atom2, cavity1, MO, cavity2).
pub const ATOM1: usize = 0;
pub const ATOM2: usize = 1;
pub const CAVITY1: usize = 2;
pub const MO: usize = 3;
pub const CAVITY2: usize = 4;
pub const NETWORK_LABELS: [&str; 5] = ["a1", "a2", "c1", "m", "c2"];

impl CompositeSpace {
    pub fn new(parts: Vec<SubsystemSpec>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidDimension("space needs at least one part".into()));
        }
        for (i, p) in parts.iter().enumerate() {
            let (what, d) = match p.kind {
                SubsystemKind::Atom { levels } => ("atom levels", levels),
                SubsystemKind::Boson { truncation } => ("boson truncation", truncation),
            };
            if d < 2 {
                return Err(Error::InvalidDimension(format!(
                    "{what} of `{}` is {d}, need >= 2",
                    p.label
                )));
            }
            if parts[..i].iter().any(|q| q.label == p.label) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate subsystem label `{}`",
                    p.label
                )));
            }
        }
        let dims: Vec<usize> = parts.iter().map(SubsystemSpec::dim).collect();
        let dim = dims.iter().product();
        Ok(CompositeSpace { parts, dims, dim })
    }

    /// Single-subsystem space.
    pub fn single(spec: SubsystemSpec) -> Result<Self> {
        Self::new(vec![spec])
    }

    pub fn single_boson(truncation: usize) -> Result<Self> {
        Self::single(SubsystemSpec::boson("mode", truncation))
    }

    pub fn single_atom(levels: usize) -> Result<Self> {
        Self::single(SubsystemSpec::atom("atom", levels))
    }

    /// The five-part network space with three-level atoms.
    pub fn network(cavity1: usize, mo: usize, cavity2: usize) -> Result<Self> {
        Self::new(vec![
            SubsystemSpec::atom(NETWORK_LABELS[ATOM1], 3),
            SubsystemSpec::atom(NETWORK_LABELS[ATOM2], 3),
            SubsystemSpec::boson(NETWORK_LABELS[CAVITY1], cavity1),
            SubsystemSpec::boson(NETWORK_LABELS[MO], mo),
            SubsystemSpec::boson(NETWORK_LABELS[CAVITY2], cavity2),
        ])
    }

    /// True when this is the canonical network layout.
    pub fn is_network(&self) -> bool {
        self.parts.len() == 5
            && self
                .parts
                .iter()
                .zip(NETWORK_LABELS)
                .enumerate()
                .all(|(i, (p, l))| {
                    p.label == l && (p.kind.is_boson() == (i >= CAVITY1))
                })
    }

    pub fn parts(&self) -> &[SubsystemSpec] {
        &self.parts
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.parts.iter().position(|p| p.label == label)
    }

    /// Space spanned by the listed parts, kept in canonical order.
    pub fn subspace(&self, keep: &[usize]) -> Result<Self> {
        let keep = self.normalize_keep(keep)?;
        Self::new(keep.iter().map(|&i| self.parts[i].clone()).collect())
    }

    /// Sorted, deduplicated, range-checked copy of `keep`.
    pub(crate) fn normalize_keep(&self, keep: &[usize]) -> Result<Vec<usize>> {
        if keep.is_empty() {
            return Err(Error::InvalidArgument("empty subsystem set".into()));
        }
        let mut k = keep.to_vec();
        k.sort_unstable();
        k.dedup();
        if let Some(&bad) = k.iter().find(|&&i| i >= self.parts.len()) {
            return Err(Error::InvalidIndex(format!(
                "subsystem {bad} out of range for {} parts",
                self.parts.len()
            )));
        }
        Ok(k)
    }

    /// Flat basis index of a product ket.
    pub fn flat_index(&self, label: &[usize]) -> Result<usize> {
        if label.len() != self.dims.len() {
            return Err(Error::InvalidIndex(format!(
                "label has {} entries, space has {} parts",
                label.len(),
                self.dims.len()
            )));
        }
        let mut idx = 0;
        for (k, (&n, &d)) in label.iter().zip(&self.dims).enumerate() {
            if n >= d {
                return Err(Error::InvalidIndex(format!(
                    "level {n} of `{}` outside 0..{d}",
                    self.parts[k].label
                )));
            }
            idx = idx * d + n;
        }
        Ok(idx)
    }

    /// Inverse of [`flat_index`](Self::flat_index).
    pub fn unflatten(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    /// Stride of part `k` in the flat index.
    pub fn stride(&self, k: usize) -> usize {
        self.dims[k + 1..].iter().product()
    }
}
