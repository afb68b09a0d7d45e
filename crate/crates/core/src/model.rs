//! Finite positive joint distributions on X×Y×Z.
//!
//! [`JointModel`] owns the full probability table P(x, y, z); marginals,
//! conditionals and the interventional target are derived from it on demand.
//! The table is validated on construction and immutable afterwards, so every
//! downstream consumer can assume strict positivity and normalization.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Smallest admissible table entry; anything below counts as zero.
pub const POSITIVITY_FLOOR: f64 = 1e-12;

/// Absolute tolerance on the table summing to 1.
pub const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("axis `{axis}` has zero categories")]
    EmptyAxis { axis: &'static str },
    #[error("probability table has {got} entries, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("entry ({x},{y},{z}) = {value} is below the positivity floor {POSITIVITY_FLOOR}")]
    NonPositiveEntry {
        x: usize,
        y: usize,
        z: usize,
        value: f64,
    },
    #[error("probability table sums to {sum}, more than {NORMALIZATION_TOL} away from 1")]
    NotNormalized { sum: f64 },
    #[error("{axis} index {index} out of range (size {size})")]
    IndexOutOfRange {
        axis: &'static str,
        index: usize,
        size: usize,
    },
}

/// A strictly positive joint distribution on X×Y×Z.
///
/// The table is stored flat in row-major (x, y, z) order with x slowest.
/// Construction rejects non-positive entries and tables that do not sum to 1;
/// nothing is ever silently re-normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointModel {
    x_size: usize,
    y_size: usize,
    z_size: usize,
    probs: Vec<f64>,
}

/// The distribution of Y after setting X to `x` in the mutilated model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterventionalDist {
    /// The intervention value.
    pub x: usize,
    /// Entry y is the interventional probability of label y.
    pub p: Vec<f64>,
}

impl JointModel {
    /// Validates a flat probability table and wraps it in a model.
    pub fn new(
        x_size: usize,
        y_size: usize,
        z_size: usize,
        probs: Vec<f64>,
    ) -> Result<Self, ModelError> {
        for (axis, size) in [("x", x_size), ("y", y_size), ("z", z_size)] {
            if size == 0 {
                return Err(ModelError::EmptyAxis { axis });
            }
        }
        let expected = x_size * y_size * z_size;
        if probs.len() != expected {
            return Err(ModelError::WrongLength {
                expected,
                got: probs.len(),
            });
        }
        let model = JointModel {
            x_size,
            y_size,
            z_size,
            probs,
        };
        for x in 0..x_size {
            for y in 0..y_size {
                for z in 0..z_size {
                    let value = model.probs[model.flat_index(x, y, z)];
                    if !(value >= POSITIVITY_FLOOR) {
                        return Err(ModelError::NonPositiveEntry { x, y, z, value });
                    }
                }
            }
        }
        let sum: f64 = model.probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(ModelError::NotNormalized { sum });
        }
        Ok(model)
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn z_size(&self) -> usize {
        self.z_size
    }

    /// The validated flat table, row-major (x, y, z) with x slowest.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn flat_index(&self, x: usize, y: usize, z: usize) -> usize {
        (x * self.y_size + y) * self.z_size + z
    }

    /// P(X=x, Y=y, Z=z). Indices must be in range.
    pub fn prob(&self, x: usize, y: usize, z: usize) -> f64 {
        self.probs[self.flat_index(x, y, z)]
    }

    fn check_x(&self, x: usize) -> Result<(), ModelError> {
        if x >= self.x_size {
            return Err(ModelError::IndexOutOfRange {
                axis: "x",
                index: x,
                size: self.x_size,
            });
        }
        Ok(())
    }

    fn check_y(&self, y: usize) -> Result<(), ModelError> {
        if y >= self.y_size {
            return Err(ModelError::IndexOutOfRange {
                axis: "y",
                index: y,
                size: self.y_size,
            });
        }
        Ok(())
    }

    fn check_z(&self, z: usize) -> Result<(), ModelError> {
        if z >= self.z_size {
            return Err(ModelError::IndexOutOfRange {
                axis: "z",
                index: z,
                size: self.z_size,
            });
        }
        Ok(())
    }

    /// P(Z=z) for a single z, summed over x then y in ascending order.
    fn marginal_z_one(&self, z: usize) -> f64 {
        let mut total = 0.0;
        for x in 0..self.x_size {
            for y in 0..self.y_size {
                total += self.prob(x, y, z);
            }
        }
        total
    }

    /// The marginal distribution of Z.
    pub fn marginal_z(&self) -> Vec<f64> {
        (0..self.z_size).map(|z| self.marginal_z_one(z)).collect()
    }

    /// P(Y=· | X=x, Z=z). The denominator is strictly positive by model positivity.
    pub fn conditional_y_given_xz(&self, x: usize, z: usize) -> Result<Vec<f64>, ModelError> {
        self.check_x(x)?;
        self.check_z(z)?;
        let denom: f64 = (0..self.y_size).map(|y| self.prob(x, y, z)).sum();
        Ok((0..self.y_size)
            .map(|y| self.prob(x, y, z) / denom)
            .collect())
    }

    /// One adjustment-sum term: P(Z=z) · P(Y=y | X=x, Z=z).
    ///
    /// Summing this over z in ascending order reproduces
    /// [`interventional_py`](Self::interventional_py) bit-for-bit; both go
    /// through the same arithmetic path.
    pub fn p_yz(&self, x: usize, y: usize, z: usize) -> Result<f64, ModelError> {
        self.check_x(x)?;
        self.check_y(y)?;
        self.check_z(z)?;
        Ok(self.p_yz_unchecked(x, y, z))
    }

    fn p_yz_unchecked(&self, x: usize, y: usize, z: usize) -> f64 {
        let denom: f64 = (0..self.y_size).map(|yy| self.prob(x, yy, z)).sum();
        self.marginal_z_one(z) * (self.prob(x, y, z) / denom)
    }

    /// The interventional distribution of Y after setting X to `x`:
    /// p_y = Σ_z P(Z=z) · P(Y=y | X=x, Z=z).
    pub fn interventional_py(&self, x: usize) -> Result<InterventionalDist, ModelError> {
        self.check_x(x)?;
        let p: Vec<f64> = (0..self.y_size)
            .map(|y| {
                (0..self.z_size)
                    .map(|z| self.p_yz_unchecked(x, y, z))
                    .sum()
            })
            .collect();
        debug_assert!((p.iter().sum::<f64>() - 1.0).abs() <= NORMALIZATION_TOL);
        Ok(InterventionalDist { x, p })
    }
}


#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_model() -> impl Strategy<Value = JointModel> {
        (1usize..4, 1usize..4, 1usize..4).prop_flat_map(|(xs, ys, zs)| {
            let cells = xs * ys * zs;
            proptest::collection::vec(1e-3f64..1.0, cells).prop_map(move |raw| {
                let total: f64 = raw.iter().sum();
                let probs = raw.iter().map(|v| v / total).collect();
                JointModel::new(xs, ys, zs, probs).expect("normalized positive table")
            })
        })
    }

    proptest! {
        #[test]
        fn interventional_sums_to_one(m in arb_model()) {
            for x in 0..m.x_size() {
                let p = m.interventional_py(x).unwrap().p;
                let total: f64 = p.iter().sum();
                prop_assert!((total - 1.0).abs() <= 1e-9);
            }
        }

        #[test]
        fn p_yz_sums_to_interventional(m in arb_model()) {
            for x in 0..m.x_size() {
                let p = m.interventional_py(x).unwrap().p;
                for y in 0..m.y_size() {
                    let summed: f64 = (0..m.z_size()).map(|z| m.p_yz(x, y, z).unwrap()).sum();
                    prop_assert!((summed - p[y]).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn marginal_and_conditional_recompose(m in arb_model()) {
            let mz = m.marginal_z();
            let total: f64 = mz.iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-9);
            for z in 0..m.z_size() {
                // z marginal recomposes from per-(y) partial sums
                let partial: f64 = (0..m.y_size())
                    .map(|y| (0..m.x_size()).map(|x| m.prob(x, y, z)).sum::<f64>())
                    .sum();
                prop_assert!((partial - mz[z]).abs() <= 1e-12);
                // conditional times its denominator gives the table back
                for x in 0..m.x_size() {
                    let cond = m.conditional_y_given_xz(x, z).unwrap();
                    let denom: f64 = (0..m.y_size()).map(|y| m.prob(x, y, z)).sum();
                    for y in 0..m.y_size() {
                        prop_assert!((cond[y] * denom - m.prob(x, y, z)).abs() <= 1e-12);
                    }
                }
            }
        }
    }
}
