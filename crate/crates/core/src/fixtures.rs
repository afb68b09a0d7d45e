//! Small built-in models shared by tests, docs, and the bundled example files.

use crate::experiments::exact::RationalModel;
use crate::model::JointModel;

/// Integer weights (in eightieths) of the M1 benchmark model, row-major
/// (x, y, z) with x slowest.
///
/// M1 is constructed from the factors P(Z=0)=1/4, P(X=1|Z=z)=1/2,
/// P(Y=1|X=1,Z=0)=1/5, P(Y=1|X=1,Z=1)=4/5, P(Y=1|X=0,Z=z)=1/2; the cell
/// probabilities are the products of those factors.
pub const M1_WEIGHTS: [u64; 8] = [5, 15, 5, 15, 8, 6, 2, 24];

const M1_DENOM: f64 = 80.0;

/// The 2×2×2 benchmark model M1 with a confounded treatment effect.
pub fn m1() -> JointModel {
    let probs = M1_WEIGHTS.iter().map(|&w| w as f64 / M1_DENOM).collect();
    JointModel::new(2, 2, 2, probs).expect("M1 is a valid model")
}

/// Exact-rational rendering of [`m1`], for the enumeration oracle.
pub fn m1_rational() -> RationalModel {
    RationalModel::from_integer_weights(2, 2, 2, &M1_WEIGHTS).expect("M1 is a valid model")
}

/// The uniform model on a table of the given dimensions.
pub fn uniform(x_size: usize, y_size: usize, z_size: usize) -> JointModel {
    let cells = x_size * y_size * z_size;
    JointModel::new(x_size, y_size, z_size, vec![1.0 / cells as f64; cells])
        .expect("uniform table is a valid model")
}

/// Exact-rational uniform model.
pub fn uniform_rational(x_size: usize, y_size: usize, z_size: usize) -> RationalModel {
    let cells = x_size * y_size * z_size;
    RationalModel::from_integer_weights(x_size, y_size, z_size, &vec![1u64; cells])
        .expect("uniform table is a valid model")
}
