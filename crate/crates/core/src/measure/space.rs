use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Atomic spaces carry the full power set of their atoms; grid spaces split
/// `[0, 1)` into `count` equal cells `[k/N, (k+1)/N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Atomic,
    Grid,
}

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    kind: SpaceKind,
    count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

/// A finite measurable space. Measurable sets are arbitrary sets of atoms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct MeasurableSpace {
    kind: SpaceKind,
    count: usize,
    labels: Option<Vec<String>>,
}

impl MeasurableSpace {
    pub fn atomic(count: usize) -> Result<Self> {
        Self::new(SpaceKind::Atomic, count, None)
    }

    /// A dyadic grid on `[0, 1)`; `cells` must be a power of two.
    pub fn grid(cells: usize) -> Result<Self> {
        Self::new(SpaceKind::Grid, cells, None)
    }

    pub fn new(kind: SpaceKind, count: usize, labels: Option<Vec<String>>) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidSpace("a space needs at least one atom".into()));
        }
        if kind == SpaceKind::Grid && !count.is_power_of_two() {
            return Err(Error::InvalidSpace(format!(
                "grid cell count {count} is not a power of two"
            )));
        }
        if let Some(labels) = &labels {
            if labels.len() != count {
                return Err(Error::InvalidSpace(format!(
                    "{} labels given for {count} atoms",
                    labels.len()
                )));
            }
        }
        Ok(MeasurableSpace { kind, count, labels })
    }

    pub fn with_labels(self, labels: Vec<String>) -> Result<Self> {
        Self::new(self.kind, self.count, Some(labels))
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Width of a grid cell, or `None` for atomic spaces.
    pub fn cell_width(&self) -> Option<f64> {
        match self.kind {
            SpaceKind::Grid => Some(1.0 / self.count as f64),
            SpaceKind::Atomic => None,
        }
    }

    /// Kind and count must agree; labels are ignored.
    pub fn is_compatible(&self, other: &MeasurableSpace) -> bool {
        self.kind == other.kind && self.count == other.count
    }

    pub fn ensure_compatible(&self, other: &MeasurableSpace) -> Result<()> {
        if self.is_compatible(other) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                expected: self.to_string(),
                found: other.to_string(),
            })
        }
    }

    pub fn check_atom(&self, index: usize) -> Result<()> {
        if index < self.count {
            Ok(())
        } else {
            Err(Error::AtomOutOfRange {
                index,
                count: self.count,
            })
        }
    }
}

impl fmt::Display for MeasurableSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SpaceKind::Atomic => write!(f, "atomic({})", self.count),
            SpaceKind::Grid => write!(f, "grid({})", self.count),
        }
    }
}

impl TryFrom<SpaceRepr> for MeasurableSpace {
    type Error = Error;

    fn try_from(repr: SpaceRepr) -> Result<Self> {
        MeasurableSpace::new(repr.kind, repr.count, repr.labels)
    }
}

impl From<MeasurableSpace> for SpaceRepr {
    fn from(space: MeasurableSpace) -> Self {
        SpaceRepr {
            kind: space.kind,
            count: space.count,
            labels: space.labels,
        }
    }
}
