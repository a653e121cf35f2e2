//! Quantum states, Kraus channels and the qubit noise families.
//!
//! The three memoryless families (phase damping, depolarizing, amplitude
//! damping) are parametrized either by a Lindblad coefficient `gamma` and a
//! duration, or directly by a noise strength `p = 1 - exp(-gamma * duration)`.
//! Interval maps depend only on the duration `t2 - t1`.
//!
//! Note the phase damping family uses the Kraus pair
//! `{sqrt(1-p) I, sqrt(p) Z}`, which multiplies coherences by `1 - 2p`. Unlike
//! the depolarizing and amplitude damping families it is therefore not a
//! semigroup in the duration.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, hermitian_exp, re, tensor_product, trace_norm, ComplexMatrix, C64};

/// Tolerance for every density-matrix and completeness check.
pub const STATE_TOL: f64 = 1e-10;

/// A validated quantum state: Hermitian, unit trace, positive semidefinite,
/// each to [`STATE_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let deviation = mat.hermitian_deviation();
        if deviation > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (max |rho - rho^dag| = {deviation:e})"
            )));
        }
        let mat = mat.hermitian_part();
        let tr = mat.trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min_eig = *hermitian_eig(&mat)?.values.last().expect("non-empty spectrum");
        if min_eig < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(Self(mat))
    }

    /// Pure state `|v><v|`; `v` is normalized first.
    pub fn from_ket(v: &[C64]) -> Result<Self> {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        let unit: Vec<C64> = v.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&unit))
    }

    pub fn ket0() -> Self {
        Self(ComplexMatrix::from_real_rows([[1.0, 0.0], [0.0, 0.0]]))
    }

    pub fn ket1() -> Self {
        Self(ComplexMatrix::from_real_rows([[0.0, 0.0], [0.0, 1.0]]))
    }

    pub fn plus() -> Self {
        Self(ComplexMatrix::from_real_rows([[0.5, 0.5], [0.5, 0.5]]))
    }

    pub fn minus() -> Self {
        Self(ComplexMatrix::from_real_rows([[0.5, -0.5], [-0.5, 0.5]]))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig(&self.0).expect("state is Hermitian").values
    }

    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }
}

/// Noise strength `p` in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct NoiseStrength(f64);

impl NoiseStrength {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("noise strength {p} outside [0, 1]")));
        }
        Ok(Self(p))
    }

    /// `p = 1 - exp(-gamma * duration)`.
    pub fn from_rate(gamma: f64, duration: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Lindblad coefficient {gamma} must be finite and non-negative"
            )));
        }
        if !(duration >= 0.0 && duration.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "duration {duration} must be finite and non-negative"
            )));
        }
        Ok(Self(-(-gamma * duration).exp_m1()))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 - p`.
    pub fn survival(self) -> f64 {
        1.0 - self.0
    }
}

/// A completely positive trace-preserving map in Kraus form, tagged with
/// the time interval it covers.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    kraus: Vec<ComplexMatrix>,
    label: String,
    interval: (f64, f64),
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>, label: impl Into<String>, interval: (f64, f64)) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty Kraus family".into()))?;
        let dim = first.dim();
        if let Some(bad) = kraus.iter().find(|k| k.dim() != dim) {
            return Err(Error::DimensionMismatch {
                op: "Kraus family",
                left: dim,
                right: bad.dim(),
            });
        }
        if !(interval.1 >= interval.0) {
            return Err(Error::InvalidInterval {
                start: interval.0,
                end: interval.1,
            });
        }
        let channel = Self {
            kraus,
            label: label.into(),
            interval,
        };
        let defect = channel.completeness_defect();
        if defect > STATE_TOL {
            return Err(Error::InvalidParameter(format!(
                "Kraus family '{}' is not complete (max |sum K^dag K - I| = {defect:e})",
                channel.label
            )));
        }
        Ok(channel)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            kraus: vec![ComplexMatrix::identity(dim)],
            label: "identity".into(),
            interval: (0.0, 0.0),
        }
    }

    pub fn unitary(u: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        Self::new(vec![u], label, (0.0, 0.0))
    }

    /// `{sqrt(1-p) I, sqrt(p) Z}`.
    pub fn phase_damping(p: NoiseStrength) -> Self {
        Self {
            kraus: vec![
                ComplexMatrix::identity(2).scale_real(p.survival().sqrt()),
                ComplexMatrix::pauli_z().scale_real(p.value().sqrt()),
            ],
            label: "phase_damping".into(),
            interval: (0.0, 0.0),
        }
    }

    /// `{sqrt(1+3(1-p))/2 I, sqrt(p)/2 X, sqrt(p)/2 Y, sqrt(p)/2 Z}`.
    pub fn depolarizing(p: NoiseStrength) -> Self {
        let k0 = (1.0 + 3.0 * p.survival()).sqrt() / 2.0;
        let kp = p.value().sqrt() / 2.0;
        Self {
            kraus: vec![
                ComplexMatrix::identity(2).scale_real(k0),
                ComplexMatrix::pauli_x().scale_real(kp),
                ComplexMatrix::pauli_y().scale_real(kp),
                ComplexMatrix::pauli_z().scale_real(kp),
            ],
            label: "depolarizing".into(),
            interval: (0.0, 0.0),
        }
    }

    /// `{diag(1, sqrt(1-p)), sqrt(p) |0><1|}`.
    pub fn amplitude_damping(p: NoiseStrength) -> Self {
        Self {
            kraus: vec![
                ComplexMatrix::from_real_rows([[1.0, 0.0], [0.0, p.survival().sqrt()]]),
                ComplexMatrix::from_real_rows([[0.0, p.value().sqrt()], [0.0, 0.0]]),
            ],
            label: "amplitude_damping".into(),
            interval: (0.0, 0.0),
        }
    }

    pub fn with_interval(mut self, t1: f64, t2: f64) -> Result<Self> {
        if !(t2 >= t1) {
            return Err(Error::InvalidInterval { start: t1, end: t2 });
        }
        self.interval = (t1, t2);
        Ok(self)
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].dim()
    }

    /// Largest entry of `|Σ K^dag K - I|`.
    pub fn completeness_defect(&self) -> f64 {
        let dim = self.dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for k in &self.kraus {
            sum = &sum + &(&k.adjoint() * k);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(dim))
    }

    /// Equivalent family `K'_a = Σ_b V_ab K_b` for a unitary mixing matrix `V`.
    pub fn mixed(&self, mixing: &ComplexMatrix) -> Result<Self> {
        let n = mixing.dim();
        if n < self.kraus.len() {
            return Err(Error::DimensionMismatch {
                op: "Kraus mixing",
                left: self.kraus.len(),
                right: n,
            });
        }
        let ops = self.padded(n);
        let kraus = (0..n)
            .map(|a| {
                ops.iter()
                    .enumerate()
                    .fold(ComplexMatrix::zeros(self.dim()), |acc, (b, k)| {
                        &acc + &k.scale(mixing[(a, b)])
                    })
            })
            .collect();
        Self::new(kraus, self.label.clone(), self.interval)
    }

    /// Kraus operators extended with zero operators up to `len`.
    pub fn padded(&self, len: usize) -> Vec<ComplexMatrix> {
        let mut ops = self.kraus.clone();
        ops.resize(len.max(ops.len()), ComplexMatrix::zeros(self.dim()));
        ops
    }

    /// `Σ_i K_i x K_i^dag` for an arbitrary operator `x`.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                op: "channel application",
                left: self.dim(),
                right: x.dim(),
            });
        }
        let mut out = ComplexMatrix::zeros(x.dim());
        for k in &self.kraus {
            out = &out + &k.conjugate(x)?;
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.apply_operator(rho.matrix())?)
    }

    /// `(id ⊗ Λ)(|Ω><Ω|)` with the unnormalized `|Ω> = Σ_i |i>|i>`.
    pub fn choi_matrix(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut choi = ComplexMatrix::zeros(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut unit = ComplexMatrix::zeros(d);
                unit[(i, j)] = re(1.0);
                let block = self.apply_operator(&unit).expect("matching dimension");
                let mut e = ComplexMatrix::zeros(d);
                e[(i, j)] = re(1.0);
                choi = &choi + &tensor_product(&e, &block);
            }
        }
        choi
    }
}

/// `later ∘ earlier`, Kraus family `{L_i K_j}`.
pub fn compose(later: &KrausChannel, earlier: &KrausChannel) -> Result<KrausChannel> {
    if later.dim() != earlier.dim() {
        return Err(Error::DimensionMismatch {
            op: "channel composition",
            left: later.dim(),
            right: earlier.dim(),
        });
    }
    let kraus = later
        .kraus
        .iter()
        .flat_map(|l| earlier.kraus.iter().map(move |k| l * k))
        .collect();
    KrausChannel::new(
        kraus,
        format!("{}*{}", later.label, earlier.label),
        (
            earlier.interval.0.min(later.interval.0),
            earlier.interval.1.max(later.interval.1),
        ),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    PhaseDamping,
    Depolarizing,
    AmplitudeDamping,
    Unitary,
    GlobalHamiltonian,
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelKind::PhaseDamping => "PDC",
            ChannelKind::Depolarizing => "DC",
            ChannelKind::AmplitudeDamping => "ADC",
            ChannelKind::Unitary => "U",
            ChannelKind::GlobalHamiltonian => "H",
        })
    }
}

/// A time-parametrized family of channels able to emit interval maps.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelFamily {
    PhaseDamping {
        gamma: f64,
    },
    Depolarizing {
        gamma: f64,
    },
    AmplitudeDamping {
        gamma: f64,
    },
    /// `exp(-i G Δ)` for a Hermitian generator `G`.
    Unitary {
        generator: ComplexMatrix,
    },
    /// Reduced dynamics of `exp(-i H t)` on `system ⊗ environment` with the
    /// environment starting in `|0>`. Only maps starting at `t = 0` are
    /// guaranteed completely positive.
    GlobalHamiltonian {
        hamiltonian: ComplexMatrix,
        system_dim: usize,
    },
}

impl ChannelFamily {
    pub fn identity(dim: usize) -> Self {
        ChannelFamily::Unitary {
            generator: ComplexMatrix::zeros(dim),
        }
    }

    pub fn kind(&self) -> ChannelKind {
        match self {
            ChannelFamily::PhaseDamping { .. } => ChannelKind::PhaseDamping,
            ChannelFamily::Depolarizing { .. } => ChannelKind::Depolarizing,
            ChannelFamily::AmplitudeDamping { .. } => ChannelKind::AmplitudeDamping,
            ChannelFamily::Unitary { .. } => ChannelKind::Unitary,
            ChannelFamily::GlobalHamiltonian { .. } => ChannelKind::GlobalHamiltonian,
        }
    }

    pub fn system_dim(&self) -> usize {
        match self {
            ChannelFamily::Unitary { generator } => generator.dim(),
            ChannelFamily::GlobalHamiltonian { system_dim, .. } => *system_dim,
            _ => 2,
        }
    }

    /// Interval map `Λ(t2, t1)`.
    pub fn make_channel(&self, t1: f64, t2: f64) -> Result<KrausChannel> {
        if !(t1.is_finite() && t2.is_finite()) || t1 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "interval ({t1}, {t2}) must be finite and start at t >= 0"
            )));
        }
        if t2 < t1 {
            return Err(Error::InvalidInterval { start: t1, end: t2 });
        }
        let duration = t2 - t1;
        let channel = match self {
            ChannelFamily::PhaseDamping { gamma } => {
                KrausChannel::phase_damping(NoiseStrength::from_rate(*gamma, duration)?)
            }
            ChannelFamily::Depolarizing { gamma } => {
                KrausChannel::depolarizing(NoiseStrength::from_rate(*gamma, duration)?)
            }
            ChannelFamily::AmplitudeDamping { gamma } => {
                KrausChannel::amplitude_damping(NoiseStrength::from_rate(*gamma, duration)?)
            }
            ChannelFamily::Unitary { generator } => {
                KrausChannel::unitary(hermitian_exp(generator, -duration)?, "unitary")?
            }
            ChannelFamily::GlobalHamiltonian {
                hamiltonian,
                system_dim,
            } => {
                if t1 != 0.0 {
                    return Err(Error::NotCompletelyPositive(format!(
                        "reduced map of a global Hamiltonian over ({t1}, {t2}) starts after t = 0"
                    )));
                }
                global_kraus(hamiltonian, *system_dim, duration)?
            }
        };
        channel.with_interval(t1, t2)
    }
}

/// `make_channel` as a free function.
pub fn make_channel(family: &ChannelFamily, t1: f64, t2: f64) -> Result<KrausChannel> {
    family.make_channel(t1, t2)
}

fn global_kraus(hamiltonian: &ComplexMatrix, system_dim: usize, t: f64) -> Result<KrausChannel> {
    let n = hamiltonian.dim();
    if system_dim == 0 || !n.is_multiple_of(system_dim) {
        return Err(Error::DimensionMismatch {
            op: "global Hamiltonian",
            left: n,
            right: system_dim,
        });
    }
    let env_dim = n / system_dim;
    let u = hermitian_exp(hamiltonian, -t)?;
    // K_k = (I ⊗ <k|) U (I ⊗ |0>)
    let kraus = (0..env_dim)
        .map(|k| ComplexMatrix::from_fn(system_dim, |a, b| u[(a * env_dim + k, b * env_dim)]))
        .collect();
    KrausChannel::new(kraus, "global_hamiltonian", (0.0, 0.0))
}

/// `D(a, b) = ½ ||a - b||_1`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    let diff = a.matrix().checked_sub(b.matrix())?;
    Ok(0.5 * trace_norm(&diff))
}

/// Minimum error probability `½ - ½ ||p1 ρ1 - (1 - p1) ρ2||_1`.
pub fn helstrom_error(p1: f64, rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::InvalidParameter(format!("prior {p1} outside [0, 1]")));
    }
    let weighted = rho1
        .matrix()
        .scale_real(p1)
        .checked_sub(&rho2.matrix().scale_real(1.0 - p1))?;
    Ok(0.5 - 0.5 * trace_norm(&weighted))
}
