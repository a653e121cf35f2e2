//! Conventional quantum switch.
//!
//! Two channels, each split into an early and a late slot, are placed in a
//! coherent superposition of both orders on `system ⊗ control`:
//!
//! ```text
//! W_ij = K1_i(late) K2_j(early) ⊗ |0><0| + K2_j(late) K1_i(early) ⊗ |1><1|
//! ```
//!
//! after which the control is projected onto `|+>` or `|->`.

use crate::channels::{ChannelFamily, DensityMatrix, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::{tensor_product, trace_norm, ComplexMatrix, C64};

/// Smallest post-selection probability that still yields a state.
pub const MIN_POST_SELECTION: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SwitchMode {
    /// Early slot over `(t1, s)`, late slot over `(s, t2)`.
    TimeSplit,
    /// Both slots of a channel carry its full `(t1, t2)` map.
    Static,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// How Kraus indices are shared between a channel's two slots.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum IndexPairing {
    /// One index per channel, reused across both slots.
    #[default]
    Shared,
    /// Independent indices per slot, rescaled to stay trace preserving.
    Independent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwitchConfig {
    pub mode: SwitchMode,
    pub control_state: DensityMatrix,
    pub branch: Branch,
    pub t1: f64,
    pub t2: f64,
    /// Split point, used by [`SwitchMode::TimeSplit`] only.
    pub split: f64,
    pub pairing: IndexPairing,
}

impl SwitchConfig {
    pub fn time_split(t1: f64, split: f64, t2: f64) -> Result<Self> {
        let cfg = Self {
            mode: SwitchMode::TimeSplit,
            control_state: DensityMatrix::plus(),
            branch: Branch::Plus,
            t1,
            t2,
            split,
            pairing: IndexPairing::Shared,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn static_interval(t1: f64, t2: f64) -> Result<Self> {
        let cfg = Self {
            mode: SwitchMode::Static,
            control_state: DensityMatrix::plus(),
            branch: Branch::Plus,
            t1,
            t2,
            split: t1,
            pairing: IndexPairing::Shared,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    pub fn with_pairing(mut self, pairing: IndexPairing) -> Self {
        self.pairing = pairing;
        self
    }

    pub fn with_control(mut self, control: DensityMatrix) -> Result<Self> {
        self.control_state = control;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t1.is_finite() && self.t2.is_finite() && self.t1 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "switch interval ({}, {}) must be finite and non-negative",
                self.t1, self.t2
            )));
        }
        if self.t2 < self.t1 {
            return Err(Error::InvalidInterval {
                start: self.t1,
                end: self.t2,
            });
        }
        if self.mode == SwitchMode::TimeSplit && !(self.t1 <= self.split && self.split <= self.t2) {
            return Err(Error::InvalidParameter(format!(
                "split {} outside [{}, {}]",
                self.split, self.t1, self.t2
            )));
        }
        if self.control_state.dim() != 2 {
            return Err(Error::DimensionMismatch {
                op: "control state",
                left: 2,
                right: self.control_state.dim(),
            });
        }
        Ok(())
    }
}

/// The four channel slots fed to the switch.
#[derive(Clone, Debug, PartialEq)]
pub struct SwitchSlots {
    pub ch1_late: KrausChannel,
    pub ch1_early: KrausChannel,
    pub ch2_late: KrausChannel,
    pub ch2_early: KrausChannel,
}

impl SwitchSlots {
    /// Each channel fills both of its slots.
    pub fn static_pair(ch1: KrausChannel, ch2: KrausChannel) -> Self {
        Self {
            ch1_late: ch1.clone(),
            ch1_early: ch1,
            ch2_late: ch2.clone(),
            ch2_early: ch2,
        }
    }

    pub fn from_families(cfg: &SwitchConfig, fam1: &ChannelFamily, fam2: &ChannelFamily) -> Result<Self> {
        cfg.validate()?;
        Ok(match cfg.mode {
            SwitchMode::Static => {
                Self::static_pair(fam1.make_channel(cfg.t1, cfg.t2)?, fam2.make_channel(cfg.t1, cfg.t2)?)
            }
            SwitchMode::TimeSplit => Self {
                ch1_late: fam1.make_channel(cfg.split, cfg.t2)?,
                ch1_early: fam1.make_channel(cfg.t1, cfg.split)?,
                ch2_late: fam2.make_channel(cfg.split, cfg.t2)?,
                ch2_early: fam2.make_channel(cfg.t1, cfg.split)?,
            },
        })
    }

    /// Slots with each channel's late and early families padded to a common length.
    fn padded(&self) -> [Vec<ComplexMatrix>; 4] {
        let n1 = self.ch1_late.kraus().len().max(self.ch1_early.kraus().len());
        let n2 = self.ch2_late.kraus().len().max(self.ch2_early.kraus().len());
        [
            self.ch1_late.padded(n1),
            self.ch1_early.padded(n1),
            self.ch2_late.padded(n2),
            self.ch2_early.padded(n2),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwitchOutcome {
    pub state: DensityMatrix,
    /// Post-selection probability.
    pub prob: f64,
}

fn check_dims(channels: [&KrausChannel; 4]) -> Result<usize> {
    let dim = channels[0].dim();
    for ch in &channels[1..] {
        if ch.dim() != dim {
            return Err(Error::DimensionMismatch {
                op: "switch slots",
                left: dim,
                right: ch.dim(),
            });
        }
    }
    Ok(dim)
}

fn control_projector(bit: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(2);
    p[(bit, bit)] = C64::new(1.0, 0.0);
    p
}

fn switch_operator(branch0: &ComplexMatrix, branch1: &ComplexMatrix) -> ComplexMatrix {
    &tensor_product(branch0, &control_projector(0)) + &tensor_product(branch1, &control_projector(1))
}

/// Shared-index switch operators `{W_ij}`. Each channel's two slots must
/// have the same number of Kraus operators.
pub fn build_switch_kraus(
    ch1_late: &KrausChannel,
    ch1_early: &KrausChannel,
    ch2_late: &KrausChannel,
    ch2_early: &KrausChannel,
) -> Result<Vec<ComplexMatrix>> {
    check_dims([ch1_late, ch1_early, ch2_late, ch2_early])?;
    for (channel, late, early) in [(1u8, ch1_late, ch1_early), (2u8, ch2_late, ch2_early)] {
        if late.kraus().len() != early.kraus().len() {
            return Err(Error::KrausCountMismatch {
                channel,
                late: late.kraus().len(),
                early: early.kraus().len(),
            });
        }
    }
    Ok(shared_operators(
        ch1_late.kraus(),
        ch1_early.kraus(),
        ch2_late.kraus(),
        ch2_early.kraus(),
    ))
}

fn shared_operators(
    l1: &[ComplexMatrix],
    e1: &[ComplexMatrix],
    l2: &[ComplexMatrix],
    e2: &[ComplexMatrix],
) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(l1.len() * l2.len());
    for i in 0..l1.len() {
        for j in 0..l2.len() {
            out.push(switch_operator(&(&l1[i] * &e2[j]), &(&l2[j] * &e1[i])));
        }
    }
    out
}

/// Switch operators with independent slot indices, each scaled by
/// `1 / sqrt(n1 n2)`.
pub fn build_switch_kraus_independent(
    ch1_late: &KrausChannel,
    ch1_early: &KrausChannel,
    ch2_late: &KrausChannel,
    ch2_early: &KrausChannel,
) -> Result<Vec<ComplexMatrix>> {
    check_dims([ch1_late, ch1_early, ch2_late, ch2_early])?;
    let slots = SwitchSlots {
        ch1_late: ch1_late.clone(),
        ch1_early: ch1_early.clone(),
        ch2_late: ch2_late.clone(),
        ch2_early: ch2_early.clone(),
    };
    let [l1, e1, l2, e2] = slots.padded();
    Ok(independent_operators(&l1, &e1, &l2, &e2))
}

fn independent_operators(
    l1: &[ComplexMatrix],
    e1: &[ComplexMatrix],
    l2: &[ComplexMatrix],
    e2: &[ComplexMatrix],
) -> Vec<ComplexMatrix> {
    let scale = 1.0 / ((l1.len() * l2.len()) as f64).sqrt();
    let mut out = Vec::new();
    for late1 in l1 {
        for early2 in e2 {
            let branch0 = late1 * early2;
            for late2 in l2 {
                for early1 in e1 {
                    out.push(switch_operator(&branch0, &(late2 * early1)).scale_real(scale));
                }
            }
        }
    }
    out
}

/// `<b| X |b>` for `X` on `system ⊗ control` and `|b> = (|0> ± |1>)/sqrt(2)`.
fn project_control(x: &ComplexMatrix, branch: Branch) -> ComplexMatrix {
    let d = x.dim() / 2;
    let s = branch.sign();
    ComplexMatrix::from_fn(d, |a, b| {
        0.5 * (x[(2 * a, 2 * b)] + s * x[(2 * a, 2 * b + 1)] + s * x[(2 * a + 1, 2 * b)] + x[(2 * a + 1, 2 * b + 1)])
    })
}

/// Runs the switch on explicit channel slots.
pub fn apply_switch(
    slots: &SwitchSlots,
    control: &DensityMatrix,
    branch: Branch,
    pairing: IndexPairing,
    rho: &DensityMatrix,
) -> Result<SwitchOutcome> {
    let dim = check_dims([&slots.ch1_late, &slots.ch1_early, &slots.ch2_late, &slots.ch2_early])?;
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch {
            op: "switch input",
            left: dim,
            right: rho.dim(),
        });
    }
    if control.dim() != 2 {
        return Err(Error::DimensionMismatch {
            op: "control state",
            left: 2,
            right: control.dim(),
        });
    }
    let [l1, e1, l2, e2] = slots.padded();
    let ops = match pairing {
        IndexPairing::Shared => shared_operators(&l1, &e1, &l2, &e2),
        IndexPairing::Independent => independent_operators(&l1, &e1, &l2, &e2),
    };
    let joint = tensor_product(rho.matrix(), control.matrix());
    let mut out = ComplexMatrix::zeros(2 * dim);
    for w in &ops {
        out = &out + &w.conjugate(&joint)?;
    }
    let block = project_control(&out, branch);
    let prob = block.trace().re;
    if !(prob >= MIN_POST_SELECTION) {
        return Err(Error::PostSelectionImpossible { prob });
    }
    Ok(SwitchOutcome {
        state: DensityMatrix::new(block.scale_real(1.0 / prob))?,
        prob,
    })
}

/// Runs the switch on interval maps drawn from two channel families.
pub fn apply_cqs(
    cfg: &SwitchConfig,
    fam1: &ChannelFamily,
    fam2: &ChannelFamily,
    rho: &DensityMatrix,
) -> Result<SwitchOutcome> {
    let slots = SwitchSlots::from_families(cfg, fam1, fam2)?;
    apply_switch(&slots, &cfg.control_state, cfg.branch, cfg.pairing, rho)
}

fn interval_slots(
    fam1: &ChannelFamily,
    fam2: &ChannelFamily,
    t1: f64,
    s: f64,
    t2: f64,
) -> Result<[Vec<ComplexMatrix>; 4]> {
    if !(t1 <= s && s <= t2) {
        return Err(Error::InvalidParameter(format!(
            "interval triple ({t1}, {s}, {t2}) is not ordered"
        )));
    }
    let cfg = SwitchConfig::time_split(t1, s, t2)?;
    Ok(SwitchSlots::from_families(&cfg, fam1, fam2)?.padded())
}

/// `¼ Σ_ij (A + B) x (A + B)^dag` with `A = K2_j(t2,s) K1_i(s,t1)` and
/// `B = K1_i(t2,s) K2_j(s,t1)`, applied to an arbitrary operator.
pub fn sigma_interval_operator(
    fam1: &ChannelFamily,
    fam2: &ChannelFamily,
    t1: f64,
    s: f64,
    t2: f64,
    x: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let [l1, e1, l2, e2] = interval_slots(fam1, fam2, t1, s, t2)?;
    if x.dim() != l1[0].dim() {
        return Err(Error::DimensionMismatch {
            op: "interval map input",
            left: l1[0].dim(),
            right: x.dim(),
        });
    }
    let mut out = ComplexMatrix::zeros(x.dim());
    for i in 0..l1.len() {
        for j in 0..l2.len() {
            let sum = &(&l2[j] * &e1[i]) + &(&l1[i] * &e2[j]);
            out = &out + &sum.conjugate(x)?;
        }
    }
    Ok(out.scale_real(0.25))
}

/// The interval map on a state. The result is an operator, not a state: its
/// trace departs from 1 when the Kraus operators fail to commute.
pub fn sigma_interval_map(
    fam1: &ChannelFamily,
    fam2: &ChannelFamily,
    t1: f64,
    s: f64,
    t2: f64,
    rho: &DensityMatrix,
) -> Result<ComplexMatrix> {
    sigma_interval_operator(fam1, fam2, t1, s, t2, rho.matrix())
}

/// Two-stage expression `¼ Σ_ijmn (P p + Q q) ρ (P p + Q q)^dag` for
/// `t2 ≥ s2 ≥ t1 ≥ s1 ≥ 0`, where
/// `P = K2_n(t2,s2) K1_m(s2,t1)`, `Q = K1_m(t2,s2) K2_n(s2,t1)`,
/// `p = K2_j(t1,s1) K1_i(s1,0)` and `q = K1_i(t1,s1) K2_j(s1,0)`.
pub fn sigma_two_stage(
    fam1: &ChannelFamily,
    fam2: &ChannelFamily,
    t2: f64,
    t1: f64,
    s2: f64,
    s1: f64,
    rho: &DensityMatrix,
) -> Result<ComplexMatrix> {
    if !(t2 >= s2 && s2 >= t1 && t1 >= s1 && s1 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "two-stage times must satisfy t2 >= s2 >= t1 >= s1 >= 0, got ({t2}, {s2}, {t1}, {s1})"
        )));
    }
    let [a_l1, a_e1, a_l2, a_e2] = interval_slots(fam1, fam2, 0.0, s1, t1)?;
    let [b_l1, b_e1, b_l2, b_e2] = interval_slots(fam1, fam2, t1, s2, t2)?;
    if rho.dim() != a_l1[0].dim() {
        return Err(Error::DimensionMismatch {
            op: "two-stage input",
            left: a_l1[0].dim(),
            right: rho.dim(),
        });
    }
    let mut out = ComplexMatrix::zeros(rho.dim());
    for i in 0..a_l1.len() {
        for j in 0..a_l2.len() {
            let p = &a_l2[j] * &a_e1[i];
            let q = &a_l1[i] * &a_e2[j];
            for m in 0..b_l1.len() {
                for n in 0..b_l2.len() {
                    let big_p = &b_l2[n] * &b_e1[m];
                    let big_q = &b_l1[m] * &b_e2[n];
                    let sum = &(&big_p * &p) + &(&big_q * &q);
                    out = &out + &sum.conjugate(rho.matrix())?;
                }
            }
        }
    }
    Ok(out.scale_real(0.25))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutativityReport {
    pub max_defect: f64,
    pub worst_triple: (f64, f64, f64),
    pub worst_pair: (usize, usize),
}

/// Largest trace norm of `Y_ij = K2_j(t2,s) K1_i(s,t1) - K1_i(t2,s) K2_j(s,t1)`
/// over the grid of `(t1, s, t2)` triples and all index pairs.
pub fn commutativity_defect(
    fam1: &ChannelFamily,
    fam2: &ChannelFamily,
    grid: &[(f64, f64, f64)],
) -> Result<CommutativityReport> {
    let mut report: Option<CommutativityReport> = None;
    for &(t1, s, t2) in grid {
        let [l1, e1, l2, e2] = interval_slots(fam1, fam2, t1, s, t2)?;
        for i in 0..l1.len() {
            for j in 0..l2.len() {
                let y = &(&l2[j] * &e1[i]) - &(&l1[i] * &e2[j]);
                let defect = trace_norm(&y);
                if report.is_none_or(|r| defect > r.max_defect) {
                    report = Some(CommutativityReport {
                        max_defect: defect,
                        worst_triple: (t1, s, t2),
                        worst_pair: (i, j),
                    });
                }
            }
        }
    }
    report.ok_or_else(|| Error::InvalidParameter("empty commutativity grid".into()))
}

/// 27 equal-split triples `(t1, t1 + w, t1 + 2w)` with
/// `t1 ∈ {0, 0.5, 1}` and `w ∈ {0.1, ..., 0.9}`.
pub fn midpoint_grid() -> Vec<(f64, f64, f64)> {
    let mut grid = Vec::with_capacity(27);
    for t1 in [0.0, 0.5, 1.0] {
        for k in 1..=9 {
            let w = k as f64 / 10.0;
            grid.push((t1, t1 + w, t1 + 2.0 * w));
        }
    }
    grid
}
