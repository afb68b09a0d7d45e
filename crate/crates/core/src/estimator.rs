//! Sufficient statistics and the regularized interventional estimator.
//!
//! The estimate of the interventional label probability is
//!
//! ```text
//! F_y = Σ_z  (n_z + c)/(N + c) · (n_xyz + c)/(n_xz + c)
//! ```
//!
//! summed over z in ascending order with no compensated summation, so the
//! decomposition F_y = Σ_z F_{y,z} holds bit-for-bit. The constant c replaces
//! every "+1" slot uniformly, including the N+1 denominator; c = 1 is the
//! canonical choice carrying the finite-sample guarantee.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sampling::Dataset;

#[derive(Debug, Error, PartialEq)]
pub enum EstimatorError {
    #[error("row {row} has {axis} index {index}, size is {size}")]
    IndexOutOfRange {
        row: usize,
        axis: &'static str,
        index: usize,
        size: usize,
    },
    #[error("{axis} index {index} out of range (size {size})")]
    QueryOutOfRange {
        axis: &'static str,
        index: usize,
        size: usize,
    },
    #[error("regularization constant must be > 0, got {0}")]
    NonPositiveC(f64),
    #[error("count table axis `{axis}` has zero categories")]
    EmptyAxis { axis: &'static str },
    #[error("count table has {got} cells, expected {expected}")]
    WrongLength { expected: usize, got: usize },
}

/// Additive smoothing constant; `c = 1` is the default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regularization {
    c: f64,
}

impl Regularization {
    pub fn new(c: f64) -> Result<Self, EstimatorError> {
        if !(c > 0.0) {
            return Err(EstimatorError::NonPositiveC(c));
        }
        Ok(Regularization { c })
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

impl Default for Regularization {
    fn default() -> Self {
        Regularization { c: 1.0 }
    }
}

/// Sufficient statistics of a dataset: N, n_z, n_xz, n_xyz.
///
/// The marginal identities (Σ_z n_z = N and so on) hold by construction; both
/// constructors derive the coarser tables from the finest one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    n: u64,
    x_size: usize,
    y_size: usize,
    z_size: usize,
    n_z: Vec<u64>,
    n_xz: Vec<u64>,
    n_xyz: Vec<u64>,
}

impl CountTable {
    /// Builds the table from per-(x,y,z) cell counts.
    pub fn from_xyz_counts(
        x_size: usize,
        y_size: usize,
        z_size: usize,
        n_xyz: Vec<u64>,
    ) -> Result<Self, EstimatorError> {
        for (axis, size) in [("x", x_size), ("y", y_size), ("z", z_size)] {
            if size == 0 {
                return Err(EstimatorError::EmptyAxis { axis });
            }
        }
        let expected = x_size * y_size * z_size;
        if n_xyz.len() != expected {
            return Err(EstimatorError::WrongLength {
                expected,
                got: n_xyz.len(),
            });
        }
        let mut n_xz = vec![0u64; x_size * z_size];
        let mut n_z = vec![0u64; z_size];
        let mut n = 0u64;
        for x in 0..x_size {
            for y in 0..y_size {
                for z in 0..z_size {
                    let count = n_xyz[(x * y_size + y) * z_size + z];
                    n_xz[x * z_size + z] += count;
                    n_z[z] += count;
                    n += count;
                }
            }
        }
        Ok(CountTable {
            n,
            x_size,
            y_size,
            z_size,
            n_z,
            n_xz,
            n_xyz,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
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

    pub fn n_z(&self, z: usize) -> u64 {
        self.n_z[z]
    }

    pub fn n_xz(&self, x: usize, z: usize) -> u64 {
        self.n_xz[x * self.z_size + z]
    }

    pub fn n_xyz(&self, x: usize, y: usize, z: usize) -> u64 {
        self.n_xyz[(x * self.y_size + y) * self.z_size + z]
    }

    fn check_x(&self, x: usize) -> Result<(), EstimatorError> {
        if x >= self.x_size {
            return Err(EstimatorError::QueryOutOfRange {
                axis: "x",
                index: x,
                size: self.x_size,
            });
        }
        Ok(())
    }

    fn check_y(&self, y: usize) -> Result<(), EstimatorError> {
        if y >= self.y_size {
            return Err(EstimatorError::QueryOutOfRange {
                axis: "y",
                index: y,
                size: self.y_size,
            });
        }
        Ok(())
    }

    fn check_z(&self, z: usize) -> Result<(), EstimatorError> {
        if z >= self.z_size {
            return Err(EstimatorError::QueryOutOfRange {
                axis: "z",
                index: z,
                size: self.z_size,
            });
        }
        Ok(())
    }
}

/// Tabulates a dataset into its sufficient statistics.
pub fn fit_counts(
    dataset: &Dataset,
    x_size: usize,
    y_size: usize,
    z_size: usize,
) -> Result<CountTable, EstimatorError> {
    for (axis, size) in [("x", x_size), ("y", y_size), ("z", z_size)] {
        if size == 0 {
            return Err(EstimatorError::EmptyAxis { axis });
        }
    }
    let mut n_xyz = vec![0u64; x_size * y_size * z_size];
    for (row, &(x, y, z)) in dataset.rows.iter().enumerate() {
        for (axis, index, size) in [("x", x, x_size), ("y", y, y_size), ("z", z, z_size)] {
            if index >= size {
                return Err(EstimatorError::IndexOutOfRange {
                    row,
                    axis,
                    index,
                    size,
                });
            }
        }
        n_xyz[(x * y_size + y) * z_size + z] += 1;
    }
    CountTable::from_xyz_counts(x_size, y_size, z_size, n_xyz)
}

fn f_z_term(counts: &CountTable, x: usize, y: usize, z: usize, c: f64) -> f64 {
    let first = (counts.n_z(z) as f64 + c) / (counts.n() as f64 + c);
    let second = (counts.n_xyz(x, y, z) as f64 + c) / (counts.n_xz(x, z) as f64 + c);
    first * second
}

/// One adjustment-sum term F_{y,z}; summing these over ascending z gives
/// [`estimate_f`] bit-for-bit.
pub fn estimate_f_z(
    counts: &CountTable,
    x: usize,
    y: usize,
    z: usize,
    reg: Regularization,
) -> Result<f64, EstimatorError> {
    counts.check_x(x)?;
    counts.check_y(y)?;
    counts.check_z(z)?;
    Ok(f_z_term(counts, x, y, z, reg.c()))
}

/// The regularized estimate F_y of the interventional label probability.
pub fn estimate_f(
    counts: &CountTable,
    x: usize,
    y: usize,
    reg: Regularization,
) -> Result<f64, EstimatorError> {
    counts.check_x(x)?;
    counts.check_y(y)?;
    Ok((0..counts.z_size())
        .map(|z| f_z_term(counts, x, y, z, reg.c()))
        .sum())
}

/// F_y for every label at once.
pub fn estimate_f_vector(
    counts: &CountTable,
    x: usize,
    reg: Regularization,
) -> Result<Vec<f64>, EstimatorError> {
    counts.check_x(x)?;
    (0..counts.y_size())
        .map(|y| estimate_f(counts, x, y, reg))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::sampling::{sample_iid, RngSpec};

    fn c1() -> Regularization {
        Regularization::default()
    }

    #[test]
    fn counts_of_empty_dataset() {
        let counts = fit_counts(&Dataset::default(), 2, 2, 2).unwrap();
        assert_eq!(counts.n(), 0);
        assert_eq!(counts.n_z(0), 0);
        assert_eq!(counts.n_xyz(1, 1, 1), 0);
    }

    #[test]
    fn counts_by_hand() {
        let ds = Dataset::new(vec![(1, 1, 0), (1, 0, 0), (0, 1, 1)]);
        let counts = fit_counts(&ds, 2, 2, 2).unwrap();
        assert_eq!(counts.n(), 3);
        assert_eq!(counts.n_z(0), 2);
        assert_eq!(counts.n_z(1), 1);
        assert_eq!(counts.n_xz(1, 0), 2);
        assert_eq!(counts.n_xyz(1, 1, 0), 1);
    }

    #[test]
    fn counts_of_repeated_row_satisfy_marginals() {
        let k = 17;
        let ds = Dataset::new(vec![(1, 0, 1); k]);
        let counts = fit_counts(&ds, 2, 2, 2).unwrap();
        assert_eq!(counts.n_xyz(1, 0, 1), k as u64);
        assert_eq!(counts.n_xz(1, 1), k as u64);
        assert_eq!(counts.n_z(1), k as u64);
        assert_eq!(counts.n(), k as u64);
    }

    #[test]
    fn counts_reject_out_of_range_rows() {
        let ds = Dataset::new(vec![(0, 0, 0), (0, 2, 0)]);
        let err = fit_counts(&ds, 2, 2, 2).unwrap_err();
        assert_eq!(
            err,
            EstimatorError::IndexOutOfRange {
                row: 1,
                axis: "y",
                index: 2,
                size: 2
            }
        );
    }

    #[test]
    fn empty_sample_estimate_is_z_size() {
        let counts = fit_counts(&Dataset::default(), 2, 2, 3).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(estimate_f(&counts, x, y, c1()).unwrap(), 3.0);
            }
        }
    }

    #[test]
    fn single_row_estimate_by_hand() {
        // one row (x, y, z0) on 2x2x2: matching-z term 1, other term 0.5
        let ds = Dataset::new(vec![(1, 0, 0)]);
        let counts = fit_counts(&ds, 2, 2, 2).unwrap();
        assert_eq!(estimate_f(&counts, 1, 0, c1()).unwrap(), 1.5);
        assert_eq!(estimate_f_z(&counts, 1, 0, 0, c1()).unwrap(), 1.0);
        assert_eq!(estimate_f_z(&counts, 1, 0, 1, c1()).unwrap(), 0.5);
    }

    #[test]
    fn degenerate_x_closed_form() {
        // all rows have X = 1; y=1 observed twice among N=3, |Z|=2
        let ds = Dataset::new(vec![(1, 1, 0), (1, 1, 1), (1, 0, 0)]);
        let counts = fit_counts(&ds, 2, 2, 2).unwrap();
        let f1 = estimate_f(&counts, 1, 1, c1()).unwrap();
        assert!((f1 - 1.0).abs() < 1e-15, "(k+|Z|)/(N+1) = 1, got {f1}");
        let f0 = estimate_f(&counts, 1, 0, c1()).unwrap();
        assert!((f0 - 0.75).abs() < 1e-15);
    }

    #[test]
    fn decomposition_is_bit_exact() {
        let m = fixtures::m1();
        let ds = sample_iid(&m, 250, RngSpec::new(77, 0));
        let counts = fit_counts(&ds, 2, 2, 2).unwrap();
        for reg in [c1(), Regularization::new(0.25).unwrap()] {
            for x in 0..2 {
                for y in 0..2 {
                    let whole = estimate_f(&counts, x, y, reg).unwrap();
                    let parts: f64 = (0..2)
                        .map(|z| estimate_f_z(&counts, x, y, z, reg).unwrap())
                        .sum();
                    assert_eq!(whole, parts);
                }
            }
        }
    }

    #[test]
    fn vector_matches_elementwise_calls() {
        let ds = Dataset::new(vec![(1, 1, 0), (1, 0, 0), (0, 1, 1)]);
        let counts = fit_counts(&ds, 2, 2, 2).unwrap();
        let vec = estimate_f_vector(&counts, 1, c1()).unwrap();
        for y in 0..2 {
            assert_eq!(vec[y], estimate_f(&counts, 1, y, c1()).unwrap());
        }
        // N=0 vector is all |Z|
        let empty = fit_counts(&Dataset::default(), 2, 2, 2).unwrap();
        assert_eq!(estimate_f_vector(&empty, 0, c1()).unwrap(), vec![2.0, 2.0]);
    }

    #[test]
    fn estimates_approach_target_at_large_n() {
        let m = fixtures::m1();
        let ds = sample_iid(&m, 10_000, RngSpec::new(123, 0));
        let counts = fit_counts(&ds, 2, 2, 2).unwrap();
        let f = estimate_f_vector(&counts, 1, c1()).unwrap();
        let p = m.interventional_py(1).unwrap().p;
        for y in 0..2 {
            assert!((f[y] - p[y]).abs() < 0.05, "y={y}: {} vs {}", f[y], p[y]);
        }
    }

    #[test]
    fn mean_absolute_error_decreases_with_n() {
        let m = fixtures::m1();
        let p = m.interventional_py(1).unwrap().p;
        let mut maes = Vec::new();
        for &n in &[100usize, 1_000, 10_000] {
            let mut total = 0.0;
            for seed in 0..100u64 {
                let ds = sample_iid(&m, n, RngSpec::new(31_000 + seed, 0));
                let counts = fit_counts(&ds, 2, 2, 2).unwrap();
                let f = estimate_f_vector(&counts, 1, c1()).unwrap();
                total += (0..2).map(|y| (f[y] - p[y]).abs()).sum::<f64>() / 2.0;
            }
            maes.push(total / 100.0);
        }
        assert!(maes[0] > maes[1] && maes[1] > maes[2], "MAEs {maes:?}");
    }

    #[test]
    fn rejects_bad_regularization() {
        assert!(Regularization::new(0.0).is_err());
        assert!(Regularization::new(-1.0).is_err());
        assert!(Regularization::new(f64::NAN).is_err());
        assert!(Regularization::new(0.25).is_ok());
    }

    #[test]
    fn query_out_of_range() {
        let counts = fit_counts(&Dataset::default(), 2, 2, 2).unwrap();
        assert!(estimate_f(&counts, 2, 0, c1()).is_err());
        assert!(estimate_f(&counts, 0, 2, c1()).is_err());
        assert!(estimate_f_z(&counts, 0, 0, 2, c1()).is_err());
    }
}
