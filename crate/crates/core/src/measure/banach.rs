use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub const ALL: [Norm; 3] = [Norm::L1, Norm::L2, Norm::Linf];

    pub fn eval(self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().map(|x| x.abs()).sum(),
            Norm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Norm::Linf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::Linf => "linf",
        })
    }
}

#[derive(Deserialize)]
struct BanachRepr {
    dim: usize,
    norm: Norm,
}

/// `R^dim` under one of the standard norms. Finite-dimensional, so every
/// vector measure into it of bounded variation has a Bochner density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BanachRepr")]
pub struct BanachSpace {
    dim: usize,
    norm: Norm,
}

impl BanachSpace {
    pub fn new(dim: usize, norm: Norm) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("vector dimension must be positive".into()));
        }
        Ok(BanachSpace { dim, norm })
    }

    /// The real line; all three norms coincide with `|x|`.
    pub fn scalar() -> Self {
        BanachSpace { dim: 1, norm: Norm::L1 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_kind(&self) -> Norm {
        self.norm
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        debug_assert_eq!(v.len(), self.dim);
        self.norm.eval(v)
    }

    pub fn check_vector(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMeasure("vector has a non-finite component".into()));
        }
        Ok(())
    }

    pub fn zero(&self) -> Vec<f64> {
        vec![0.0; self.dim]
    }
}

impl TryFrom<BanachRepr> for BanachSpace {
    type Error = Error;

    fn try_from(r: BanachRepr) -> Result<Self> {
        BanachSpace::new(r.dim, r.norm)
    }
}

// Small vector helpers shared across modules.

pub(crate) fn add_assign(acc: &mut [f64], v: &[f64]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += x;
    }
}

pub(crate) fn axpy(acc: &mut [f64], alpha: f64, v: &[f64]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += alpha * x;
    }
}

pub(crate) fn scaled(v: &[f64], alpha: f64) -> Vec<f64> {
    v.iter().map(|x| alpha * x).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_norms() {
        let v = [3.0, -4.0];
        assert_eq!(Norm::L1.eval(&v), 7.0);
        assert_eq!(Norm::L2.eval(&v), 5.0);
        assert_eq!(Norm::Linf.eval(&v), 4.0);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(BanachSpace::new(0, Norm::L2).is_err());
    }

    fn vec3() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1e3..1e3f64, 3)
    }

    proptest! {
        #[test]
        fn triangle_inequality(u in vec3(), v in vec3()) {
            for norm in Norm::ALL {
                let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
                prop_assert!(norm.eval(&sum) <= norm.eval(&u) + norm.eval(&v) + 1e-9);
            }
        }

        #[test]
        fn absolute_homogeneity(u in vec3(), alpha in -50.0..50.0f64) {
            for norm in Norm::ALL {
                let lhs = norm.eval(&scaled(&u, alpha));
                let rhs = alpha.abs() * norm.eval(&u);
                prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs));
            }
        }
    }
}
