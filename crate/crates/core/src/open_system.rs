//! A qubit coupled to a single-qubit environment through
//! `H = h Z⊗I + h I⊗Z + j X⊗X`, in units with `ħ = 1`.
//!
//! The system is the first tensor factor. The same environment persists
//! across all segments of a schedule unless the refresh variant is used.

use crate::channels::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_exp, partial_trace, tensor_product, ComplexMatrix, Subsystem};
use crate::uqs::{causal_order_states, CausalOrderPair};

const CONTIGUITY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SeHamiltonian {
    h: f64,
    j: f64,
    mat: ComplexMatrix,
}

impl SeHamiltonian {
    pub fn new(h: f64, j: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("energy unit h = {h} must be positive")));
        }
        if !j.is_finite() {
            return Err(Error::InvalidParameter(format!("coupling j = {j} must be finite")));
        }
        let (x, z, id) = (
            ComplexMatrix::pauli_x(),
            ComplexMatrix::pauli_z(),
            ComplexMatrix::identity(2),
        );
        let mat = &(&tensor_product(&z, &id).scale_real(h) + &tensor_product(&id, &z).scale_real(h))
            + &tensor_product(&x, &x).scale_real(j);
        Ok(Self { h, j, mat })
    }

    /// `h = 1`, `j = 0.5`.
    pub fn weak() -> Self {
        Self::new(1.0, 0.5).expect("valid constants")
    }

    /// `h = 1`, `j = 1`.
    pub fn strong() -> Self {
        Self::new(1.0, 1.0).expect("valid constants")
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub hamiltonian: SeHamiltonian,
    pub t_start: f64,
    pub t_end: f64,
}

/// Contiguous segments starting at `t = 0`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InteractionSchedule {
    segments: Vec<Segment>,
}

impl InteractionSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let mut clock = 0.0;
        for seg in &segments {
            if (seg.t_start - clock).abs() > CONTIGUITY_TOL {
                return Err(Error::InvalidParameter(format!(
                    "segment starts at {} but the previous one ends at {clock}",
                    seg.t_start
                )));
            }
            if !(seg.t_end >= seg.t_start) || !seg.t_end.is_finite() {
                return Err(Error::InvalidInterval {
                    start: seg.t_start,
                    end: seg.t_end,
                });
            }
            clock = seg.t_end;
        }
        Ok(Self { segments })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(ham: &SeHamiltonian, t: f64) -> Result<Self> {
        Self::new(vec![Segment {
            hamiltonian: ham.clone(),
            t_start: 0.0,
            t_end: t,
        }])
    }

    /// `first` on `[0, t1]`, then `second` on `[t1, t2]`.
    pub fn two_step(first: &SeHamiltonian, second: &SeHamiltonian, t1: f64, t2: f64) -> Result<Self> {
        Self::new(vec![
            Segment {
                hamiltonian: first.clone(),
                t_start: 0.0,
                t_end: t1,
            },
            Segment {
                hamiltonian: second.clone(),
                t_start: t1,
                t_end: t2,
            },
        ])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }
}

/// The two probe states and the environment state used in the experiments.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedInputs {
    pub sigma1: DensityMatrix,
    pub sigma2: DensityMatrix,
    pub rho_env: DensityMatrix,
}

impl FixedInputs {
    pub fn standard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sigma1 = ComplexMatrix::from_real_rows([[0.5 * (1.0 + s), 0.5 * s], [0.5 * s, 0.5 * (1.0 - s)]]);
        Self {
            sigma1: DensityMatrix::new(sigma1).expect("valid state"),
            sigma2: DensityMatrix::plus(),
            rho_env: DensityMatrix::ket0(),
        }
    }
}

/// `exp(-i H (t_b - t_a))`.
pub fn se_unitary(ham: &SeHamiltonian, t_a: f64, t_b: f64) -> Result<ComplexMatrix> {
    if !(t_b >= t_a) {
        return Err(Error::InvalidInterval { start: t_a, end: t_b });
    }
    hermitian_exp(ham.matrix(), -(t_b - t_a))
}

fn check_qubit(rho: &DensityMatrix, op: &'static str) -> Result<()> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            op,
            left: 2,
            right: rho.dim(),
        });
    }
    Ok(())
}

/// Global state after the whole schedule, starting from `rho_sys ⊗ rho_env`.
pub fn evolve_global(
    schedule: &InteractionSchedule,
    rho_sys: &DensityMatrix,
    rho_env: &DensityMatrix,
) -> Result<ComplexMatrix> {
    check_qubit(rho_sys, "system state")?;
    check_qubit(rho_env, "environment state")?;
    let mut global = tensor_product(rho_sys.matrix(), rho_env.matrix());
    for seg in schedule.segments() {
        global = se_unitary(&seg.hamiltonian, seg.t_start, seg.t_end)?.conjugate(&global)?;
    }
    Ok(global)
}

/// Reduced system state with one environment shared by every segment.
pub fn evolve_reduced(
    schedule: &InteractionSchedule,
    rho_sys: &DensityMatrix,
    rho_env: &DensityMatrix,
) -> Result<DensityMatrix> {
    let global = evolve_global(schedule, rho_sys, rho_env)?;
    DensityMatrix::new(partial_trace(&global, Subsystem::Second, (2, 2))?)
}

/// Reduced system state with a fresh copy of `rho_env` at every segment.
pub fn evolve_reduced_with_refresh(
    schedule: &InteractionSchedule,
    rho_sys: &DensityMatrix,
    rho_env: &DensityMatrix,
) -> Result<DensityMatrix> {
    check_qubit(rho_sys, "system state")?;
    let mut state = rho_sys.clone();
    for seg in schedule.segments() {
        let single = InteractionSchedule::single(&seg.hamiltonian, seg.t_end - seg.t_start)?;
        state = evolve_reduced(&single, &state, rho_env)?;
    }
    Ok(state)
}

/// `Tr_E[U(t,0) (rho_sys ⊗ rho_env) U(t,0)^dag]` at each time.
pub fn reduced_map_trajectory(
    ham: &SeHamiltonian,
    rho_env: &DensityMatrix,
    rho_sys: &DensityMatrix,
    times: &[f64],
) -> Result<Vec<DensityMatrix>> {
    if let Some(&first) = times.first() {
        if !(first >= 0.0) {
            return Err(Error::InvalidParameter(format!("trajectory starts at {first} < 0")));
        }
    }
    if let Some(w) = times.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(format!(
            "trajectory times must increase ({} then {})",
            w[0], w[1]
        )));
    }
    times
        .iter()
        .map(|&t| evolve_reduced(&InteractionSchedule::single(ham, t)?, rho_sys, rho_env))
        .collect()
}

/// Causal-order states for `Λ_ham1` and `Λ_ham2` with `t1 = t`, `t2 = 2t`:
/// `order_12` runs `ham2` first and `ham1` second, `order_21` the reverse.
pub fn causal_order_pair(
    ham1: &SeHamiltonian,
    ham2: &SeHamiltonian,
    t: f64,
    rho_sys: &DensityMatrix,
    rho_env: &DensityMatrix,
) -> Result<CausalOrderPair> {
    let schedule_12 = InteractionSchedule::two_step(ham2, ham1, t, 2.0 * t)?;
    let schedule_21 = InteractionSchedule::two_step(ham1, ham2, t, 2.0 * t)?;
    causal_order_states(
        |r| Ok(evolve_reduced(&schedule_12, r, rho_env)?.into_matrix()),
        |r| Ok(evolve_reduced(&schedule_21, r, rho_env)?.into_matrix()),
        rho_sys,
    )
}
