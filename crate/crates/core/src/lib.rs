#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod cqs;
pub mod divisibility;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod open_system;
pub mod uqs;

pub use error::{Error, Result};

#[cfg(test)]
pub(crate) mod testutil {
    use crate::channels::DensityMatrix;
    use crate::linalg::{c, ComplexMatrix};

    /// State `G G^dag / tr` from eight reals filling a 2x2 complex `G`.
    pub fn random_state(entries: &[f64]) -> DensityMatrix {
        let g = ComplexMatrix::from_rows([
            [c(entries[0], entries[1]), c(entries[2], entries[3])],
            [c(entries[4], entries[5]), c(entries[6] + 1e-3, entries[7])],
        ]);
        let gg = &g * &g.adjoint();
        let tr = gg.trace().re;
        DensityMatrix::new(gg.scale_real(1.0 / tr)).expect("valid state")
    }
}
