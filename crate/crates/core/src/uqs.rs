//! Universal quantum switch for qubits.
//!
//! Works from the two causal-order output states alone: both are
//! diagonalized, a basis `{chi, chi_perp}` maximizing the overlap functional
//! is found, and each spectrum is reassembled in that shared basis.

use std::f64::consts::PI;

use crate::channels::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, inner, ComplexMatrix, EigenDecomposition, C64};

const GRID_THETA: usize = 64;
const GRID_PHI: usize = 128;
const REFINE_HALVINGS: usize = 40;
/// Gains below this do not count as progress.
const MIN_GAIN: f64 = 1e-12;
const MAX_REFINE_ROUNDS: usize = 100_000;
/// Bloch components below this are treated as zero when picking the axis sign.
pub const AXIS_TOL: f64 = 1e-6;

/// `order_12` is `Λ1` applied after `Λ2`; `order_21` the reverse.
#[derive(Clone, Debug, PartialEq)]
pub struct CausalOrderPair {
    pub order_12: DensityMatrix,
    pub order_21: DensityMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimalBasis {
    pub chi: [C64; 2],
    pub chi_perp: [C64; 2],
    pub f_value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UqsOutput {
    pub rho_f1: DensityMatrix,
    pub rho_f2: DensityMatrix,
    pub basis: OptimalBasis,
}

/// Evaluates both causal orders through opaque state maps and validates the
/// results.
pub fn causal_order_states<F, G>(evolve_12: F, evolve_21: G, rho: &DensityMatrix) -> Result<CausalOrderPair>
where
    F: Fn(&DensityMatrix) -> Result<ComplexMatrix>,
    G: Fn(&DensityMatrix) -> Result<ComplexMatrix>,
{
    let check = |name: &str, out: ComplexMatrix| {
        DensityMatrix::new(out).map_err(|e| match e {
            Error::InvalidState(msg) => Error::InvalidState(format!("{name} output: {msg}")),
            other => other,
        })
    };
    Ok(CausalOrderPair {
        order_12: check("order 12", evolve_12(rho)?)?,
        order_21: check("order 21", evolve_21(rho)?)?,
    })
}

/// `(a, b) -> (-conj(b), conj(a))`.
pub fn orthogonal_complement(chi: &[C64; 2]) -> [C64; 2] {
    [-chi[1].conj(), chi[0].conj()]
}

fn bloch_state(theta: f64, phi: f64) -> [C64; 2] {
    [
        C64::new((theta / 2.0).cos(), 0.0),
        C64::from_polar((theta / 2.0).sin(), phi),
    ]
}

fn bloch_axis(chi: &[C64; 2]) -> [f64; 3] {
    let cross = chi[0].conj() * chi[1];
    [2.0 * cross.re, 2.0 * cross.im, chi[0].norm_sqr() - chi[1].norm_sqr()]
}

/// `Σ_i |<chi|λ_i>| + |<chi_perp|λ_i>| + |<chi|μ_i>| + |<chi_perp|μ_i>|`.
pub fn overlap_functional(chi: &[C64; 2], eig_lambda: &EigenDecomposition, eig_mu: &EigenDecomposition) -> f64 {
    let perp = orthogonal_complement(chi);
    eig_lambda
        .vectors
        .iter()
        .chain(&eig_mu.vectors)
        .map(|v| inner(chi, v).norm() + inner(&perp, v).norm())
        .sum()
}

fn check_qubit(eig: &EigenDecomposition) -> Result<()> {
    if eig.vectors.len() != 2 || eig.vectors.iter().any(|v| v.len() != 2) {
        return Err(Error::DimensionMismatch {
            op: "universal switch (qubit only)",
            left: 2,
            right: eig.vectors.len(),
        });
    }
    Ok(())
}

/// Picks the axis sign with lexicographically largest `(x, y, z)` and makes
/// the first component of `chi` real and non-negative.
fn canonicalize(chi: [C64; 2]) -> [C64; 2] {
    let axis = bloch_axis(&chi);
    let flip = axis.iter().find(|c| c.abs() > AXIS_TOL).is_some_and(|&c| c < 0.0);
    let chi = if flip { orthogonal_complement(&chi) } else { chi };
    let phase = if chi[0].norm() > 1e-15 {
        chi[0].conj() / chi[0].norm()
    } else {
        chi[1].conj() / chi[1].norm()
    };
    let norm = (chi[0].norm_sqr() + chi[1].norm_sqr()).sqrt();
    let mut out = [chi[0] * phase / norm, chi[1] * phase / norm];
    out[0] = C64::new(out[0].re.max(0.0), 0.0);
    out
}

/// Maximizes the overlap functional over Bloch angles: a 64 x 128 grid
/// followed by a pattern search that halves its step 40 times.
pub fn optimize_basis(eig_lambda: &EigenDecomposition, eig_mu: &EigenDecomposition) -> Result<OptimalBasis> {
    check_qubit(eig_lambda)?;
    check_qubit(eig_mu)?;
    let f = |theta: f64, phi: f64| overlap_functional(&bloch_state(theta, phi), eig_lambda, eig_mu);

    let d_theta = PI / (GRID_THETA - 1) as f64;
    let d_phi = 2.0 * PI / GRID_PHI as f64;
    let mut best = (0.0, 0.0, f64::NEG_INFINITY);
    for i in 0..GRID_THETA {
        for j in 0..GRID_PHI {
            let (theta, phi) = (i as f64 * d_theta, j as f64 * d_phi);
            let value = f(theta, phi);
            if value > best.2 {
                best = (theta, phi, value);
            }
        }
    }

    let (mut step_theta, mut step_phi) = (d_theta, d_phi);
    let mut halvings = 0;
    let mut rounds = 0;
    while halvings < REFINE_HALVINGS && rounds < MAX_REFINE_ROUNDS {
        rounds += 1;
        let (theta, phi, value) = best;
        let mut round_best = best;
        for (dt, dp) in [
            (step_theta, 0.0),
            (-step_theta, 0.0),
            (0.0, step_phi),
            (0.0, -step_phi),
            (step_theta, step_phi),
            (step_theta, -step_phi),
            (-step_theta, step_phi),
            (-step_theta, -step_phi),
        ] {
            let candidate = f(theta + dt, phi + dp);
            if candidate > round_best.2 {
                round_best = (theta + dt, phi + dp, candidate);
            }
        }
        if round_best.2 > value + MIN_GAIN {
            best = round_best;
        } else {
            step_theta /= 2.0;
            step_phi /= 2.0;
            halvings += 1;
        }
    }

    let chi = canonicalize(bloch_state(best.0, best.1));
    Ok(OptimalBasis {
        chi,
        chi_perp: orthogonal_complement(&chi),
        f_value: overlap_functional(&chi, eig_lambda, eig_mu),
    })
}

fn rebuild(values: &[f64], basis: &OptimalBasis) -> Result<DensityMatrix> {
    let a = ComplexMatrix::outer(&basis.chi).scale_real(values[0]);
    let b = ComplexMatrix::outer(&basis.chi_perp).scale_real(values[1]);
    DensityMatrix::new(&a + &b)
}

/// `rho_f1 = λ1 |chi><chi| + λ2 |chi_perp><chi_perp|` from `order_12` and
/// `rho_f2` likewise from `order_21`, eigenvalues descending.
pub fn uqs_outputs(pair: &CausalOrderPair) -> Result<UqsOutput> {
    let eig_lambda = hermitian_eig(pair.order_12.matrix())?;
    let eig_mu = hermitian_eig(pair.order_21.matrix())?;
    let basis = optimize_basis(&eig_lambda, &eig_mu)?;
    Ok(UqsOutput {
        rho_f1: rebuild(&eig_lambda.values, &basis)?,
        rho_f2: rebuild(&eig_mu.values, &basis)?,
        basis,
    })
}
