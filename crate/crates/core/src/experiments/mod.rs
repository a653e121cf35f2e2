//! Batch experiments producing CSV tables.

pub mod csv;

use std::f64::consts::PI;
use std::fmt;

use crate::channels::{helstrom_error, trace_distance, ChannelFamily, DensityMatrix, KrausChannel, NoiseStrength};
use crate::cqs::{apply_cqs, apply_switch, midpoint_grid, Branch, IndexPairing, SwitchConfig, SwitchMode, SwitchSlots};
use crate::divisibility::{
    certify_cp_divisibility, scan_monotonicity, Trajectory, WitnessReport, ANALYTIC_TOL, OPTIMIZER_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix};
use crate::open_system::{causal_order_pair, reduced_map_trajectory, FixedInputs, SeHamiltonian};
use crate::uqs::{causal_order_states, uqs_outputs};

pub use csv::{format_g15, Cell, CsvTable};

/// Tolerance below which a commutativity defect certifies CP-divisibility.
pub const CERTIFICATE_TOL: f64 = 1e-12;

/// Crossover angles of the universal switch curve expected at `noise_p = 0.5`.
pub const EXPECTED_CROSSOVERS: [f64; 2] = [1.01314, 2.12846];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Experiment {
    /// Switched depolarizing pair.
    Fig2,
    /// Switched depolarizing and amplitude damping pair.
    Fig3,
    /// Switched depolarizing and phase damping pair.
    Fig4,
    /// Unitary discrimination through a phase damping channel.
    Fig5,
    /// Universal switch on the two coupled-qubit dynamics.
    Fig6,
    PdcCert,
    AdcCert,
    /// All five channel-pair certificates.
    Certificates,
    /// Revivals of the two coupled-qubit reduced dynamics.
    HxPind,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Fig2,
        Experiment::Fig3,
        Experiment::Fig4,
        Experiment::Fig5,
        Experiment::Fig6,
        Experiment::PdcCert,
        Experiment::AdcCert,
        Experiment::Certificates,
        Experiment::HxPind,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::Fig4 => "fig4",
            Experiment::Fig5 => "fig5",
            Experiment::Fig6 => "fig6",
            Experiment::PdcCert => "pdc-cert",
            Experiment::AdcCert => "adc-cert",
            Experiment::Certificates => "certificates",
            Experiment::HxPind => "hx-pind",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub gamma1: f64,
    pub gamma2: f64,
    pub noise_p: f64,
    pub theta_steps: usize,
    pub t_max: f64,
    pub t_steps: usize,
    pub switch_mode: SwitchMode,
    pub branch: Branch,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let (t_max, switch_mode) = match experiment {
            Experiment::Fig6 | Experiment::HxPind => (10.0, SwitchMode::TimeSplit),
            Experiment::Fig5 => (3.0, SwitchMode::Static),
            _ => (3.0, SwitchMode::TimeSplit),
        };
        Self {
            experiment,
            gamma1: 1.0,
            gamma2: 5.0,
            noise_p: 0.5,
            theta_steps: 500,
            t_max,
            t_steps: 500,
            switch_mode,
            branch: Branch::Plus,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.t_steps < 2 || self.theta_steps < 2 {
            return bad(format!(
                "t_steps ({}) and theta_steps ({}) must be at least 2",
                self.t_steps, self.theta_steps
            ));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return bad(format!("t_max = {} must be positive", self.t_max));
        }
        if !(0.0..=1.0).contains(&self.noise_p) {
            return bad(format!("noise_p = {} outside [0, 1]", self.noise_p));
        }
        for (name, g) in [("gamma1", self.gamma1), ("gamma2", self.gamma2)] {
            if !(g >= 0.0 && g.is_finite()) {
                return bad(format!("{name} = {g} must be finite and non-negative"));
            }
        }
        Ok(())
    }

    /// `t_steps` uniform samples on `[0, t_max]`.
    pub fn times(&self) -> Vec<f64> {
        uniform_grid(self.t_max, self.t_steps)
    }
}

fn uniform_grid(end: f64, steps: usize) -> Vec<f64> {
    (0..steps).map(|k| end * k as f64 / (steps - 1) as f64).collect()
}

/// Dispatches on `cfg.experiment`.
pub fn run(cfg: &ExperimentConfig) -> Result<CsvTable> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Fig2 | Experiment::Fig3 | Experiment::Fig4 => run_fig2_3_4(cfg),
        Experiment::Fig5 => run_fig5(cfg),
        Experiment::Fig6 => run_fig6(cfg),
        Experiment::PdcCert | Experiment::AdcCert | Experiment::Certificates => run_certificates(cfg),
        Experiment::HxPind => run_hx_pind(cfg),
    }
}

fn witness_comment(column: &str, r: &WitnessReport) -> String {
    let mut line = format!("witness {column}: violated={}", r.violated);
    if let (Some((a, b)), Some(inc)) = (r.t_pair, r.increase) {
        line += &format!(
            " t_a={} t_b={} increase={}",
            format_g15(a),
            format_g15(b),
            format_g15(inc)
        );
    }
    line + &format!(" tolerance={}", format_g15(r.tolerance))
}

fn attach_witnesses(table: &mut CsvTable, columns: &[&str], tol: f64) -> Result<Vec<WitnessReport>> {
    let times = table.column(table.header()[0].clone().as_str()).expect("time column");
    let mut reports = Vec::new();
    for col in columns {
        let d = table.column(col).expect("known column");
        let report = scan_monotonicity(&Trajectory::new(times.clone(), d)?, tol)?;
        table.push_comment(witness_comment(col, &report));
        reports.push(report);
    }
    Ok(reports)
}

fn switched_family(kind: u8, gamma: f64) -> ChannelFamily {
    match kind {
        0 => ChannelFamily::Depolarizing { gamma },
        1 => ChannelFamily::AmplitudeDamping { gamma },
        _ => ChannelFamily::PhaseDamping { gamma },
    }
}

/// Switched-pair distance between outputs for `|0>` and `|1>`, with
/// `t1 = t`, `t2 = 2t`.
pub fn switched_pair_distance(
    cfg: &ExperimentConfig,
    fam1: &ChannelFamily,
    fam2: &ChannelFamily,
    t: f64,
) -> Result<f64> {
    let switch = match cfg.switch_mode {
        SwitchMode::TimeSplit => SwitchConfig::time_split(0.0, t, 2.0 * t)?,
        SwitchMode::Static => SwitchConfig::static_interval(0.0, t)?,
    }
    .with_branch(cfg.branch);
    let a = apply_cqs(&switch, fam1, fam2, &DensityMatrix::ket0())?;
    let b = apply_cqs(&switch, fam1, fam2, &DensityMatrix::ket1())?;
    trace_distance(&a.state, &b.state)
}

/// Depolarizing channel switched with a second family, at equal rates and at
/// `(gamma1, gamma2)`.
pub fn run_fig2_3_4(cfg: &ExperimentConfig) -> Result<CsvTable> {
    let partner = match cfg.experiment {
        Experiment::Fig2 => 0,
        Experiment::Fig3 => 1,
        Experiment::Fig4 => 2,
        other => {
            return Err(Error::InvalidParameter(format!(
                "{other} is not a switched-pair experiment"
            )));
        }
    };
    let dc = switched_family(0, cfg.gamma1);
    let equal = switched_family(partner, cfg.gamma1);
    let unequal = switched_family(partner, cfg.gamma2);
    let mut table = CsvTable::new(["t", "D_equal_rates", "D_unequal_rates"]);
    for t in cfg.times() {
        table.push_row(vec![
            t.into(),
            switched_pair_distance(cfg, &dc, &equal, t)?.into(),
            switched_pair_distance(cfg, &dc, &unequal, t)?.into(),
        ])?;
    }
    attach_witnesses(&mut table, &["D_equal_rates", "D_unequal_rates"], ANALYTIC_TOL)?;
    Ok(table)
}

/// `cos(theta) I - i sin(theta) Y`.
pub fn rotation(theta: f64) -> ComplexMatrix {
    &ComplexMatrix::identity(2).scale_real(theta.cos()) - &ComplexMatrix::pauli_y().scale(c(0.0, theta.sin()))
}

/// Helstrom error probabilities at one angle for the definite order, the
/// conventional switch and the universal switch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscriminationPoint {
    pub theta: f64,
    pub p_err_dco: f64,
    pub p_err_cqs: f64,
    pub p_err_uqs: f64,
}

pub fn discrimination_point(cfg: &ExperimentConfig, theta: f64) -> Result<DiscriminationPoint> {
    let probe = DensityMatrix::plus();
    let strength = NoiseStrength::new(cfg.noise_p)?;
    let noise = KrausChannel::phase_damping(strength);
    let u = KrausChannel::unitary(rotation(theta), "rotation")?;
    let reference = noise.apply(&probe)?;

    let dco = u.apply(&reference)?;

    let slots = match cfg.switch_mode {
        SwitchMode::Static => SwitchSlots::static_pair(u.clone(), noise.clone()),
        SwitchMode::TimeSplit => {
            let half = KrausChannel::phase_damping(NoiseStrength::new(1.0 - strength.survival().sqrt())?);
            let half_u = KrausChannel::unitary(rotation(theta / 2.0), "rotation")?;
            SwitchSlots {
                ch1_late: half_u.clone(),
                ch1_early: half_u,
                ch2_late: half.clone(),
                ch2_early: half,
            }
        }
    };
    let cqs = apply_switch(&slots, &DensityMatrix::plus(), cfg.branch, IndexPairing::Shared, &probe)?;

    let pair = causal_order_states(
        |r| u.apply_operator(&noise.apply_operator(r.matrix())?),
        |r| noise.apply_operator(&u.apply_operator(r.matrix())?),
        &probe,
    )?;
    let uqs = uqs_outputs(&pair)?;

    Ok(DiscriminationPoint {
        theta,
        p_err_dco: helstrom_error(0.5, &dco, &reference)?,
        p_err_cqs: helstrom_error(0.5, &cqs.state, &reference)?,
        p_err_uqs: helstrom_error(0.5, &uqs.rho_f1, &reference)?,
    })
}

/// Angles where the universal switch starts or stops beating both others.
pub fn uqs_crossovers(points: &[DiscriminationPoint]) -> Vec<f64> {
    let best = |p: &DiscriminationPoint| p.p_err_uqs < p.p_err_dco.min(p.p_err_cqs) - 1e-12;
    points
        .windows(2)
        .filter(|w| best(&w[0]) != best(&w[1]))
        .map(|w| w[1].theta)
        .collect()
}

pub fn run_fig5(cfg: &ExperimentConfig) -> Result<CsvTable> {
    let mut table = CsvTable::new(["theta", "p_err_dco", "p_err_cqs", "p_err_uqs"]);
    let points = uniform_grid(PI, cfg.theta_steps)
        .into_iter()
        .map(|theta| discrimination_point(cfg, theta))
        .collect::<Result<Vec<_>>>()?;
    for p in &points {
        table.push_row(vec![
            p.theta.into(),
            p.p_err_dco.into(),
            p.p_err_cqs.into(),
            p.p_err_uqs.into(),
        ])?;
    }
    let fmt_list = |xs: &[f64]| {
        if xs.is_empty() {
            "none".to_owned()
        } else {
            xs.iter().map(|&x| format_g15(x)).collect::<Vec<_>>().join(" ")
        }
    };
    table.push_comment(format!("noise_p={}", format_g15(cfg.noise_p)));
    table.push_comment(format!(
        "expected uqs crossover angles: {}",
        fmt_list(&EXPECTED_CROSSOVERS)
    ));
    table.push_comment(format!(
        "observed uqs crossover angles: {}",
        fmt_list(&uqs_crossovers(&points))
    ));
    let dco = table.column("p_err_dco").expect("column");
    let spread =
        dco.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - dco.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread < 1e-12 {
        table.push_comment(format!(
            "deviation: p_err_dco is constant at {} because the noise fully dephases the probe",
            format_g15(dco[0])
        ));
    }
    Ok(table)
}

/// Trace distance between the universal-switch outputs for the two probe
/// states at `t1 = t`, `t2 = 2t`.
pub fn uqs_probe_distance(t: f64) -> Result<f64> {
    let inputs = FixedInputs::standard();
    let (h1, h2) = (SeHamiltonian::weak(), SeHamiltonian::strong());
    let f1 = uqs_outputs(&causal_order_pair(&h1, &h2, t, &inputs.sigma1, &inputs.rho_env)?)?;
    let f2 = uqs_outputs(&causal_order_pair(&h1, &h2, t, &inputs.sigma2, &inputs.rho_env)?)?;
    trace_distance(&f1.rho_f1, &f2.rho_f1)
}

pub fn run_fig6(cfg: &ExperimentConfig) -> Result<CsvTable> {
    let mut table = CsvTable::new(["t", "D_sigma_f"]);
    for t in cfg.times() {
        table.push_row(vec![t.into(), uqs_probe_distance(t)?.into()])?;
    }
    attach_witnesses(&mut table, &["D_sigma_f"], OPTIMIZER_TOL)?;
    Ok(table)
}

pub fn run_hx_pind(cfg: &ExperimentConfig) -> Result<CsvTable> {
    let inputs = FixedInputs::standard();
    let times = cfg.times();
    let distances = |ham: &SeHamiltonian| -> Result<Vec<f64>> {
        let a = reduced_map_trajectory(ham, &inputs.rho_env, &inputs.sigma1, &times)?;
        let b = reduced_map_trajectory(ham, &inputs.rho_env, &inputs.sigma2, &times)?;
        a.iter().zip(&b).map(|(x, y)| trace_distance(x, y)).collect()
    };
    let d1 = distances(&SeHamiltonian::weak())?;
    let d2 = distances(&SeHamiltonian::strong())?;
    let mut table = CsvTable::new(["t", "D_H1", "D_H2"]);
    for ((t, a), b) in times.iter().zip(d1).zip(d2) {
        table.push_row(vec![(*t).into(), a.into(), b.into()])?;
    }
    attach_witnesses(&mut table, &["D_H1", "D_H2"], ANALYTIC_TOL)?;
    Ok(table)
}

fn certificate_pairs(cfg: &ExperimentConfig) -> Vec<(&'static str, ChannelFamily, ChannelFamily)> {
    let (g1, g2) = (cfg.gamma1, cfg.gamma2);
    let pdc = ChannelFamily::PhaseDamping { gamma: g1 };
    let adc = ChannelFamily::AmplitudeDamping { gamma: g1 };
    let dc = ChannelFamily::Depolarizing { gamma: g1 };
    let all = vec![
        ("PDC+PDC", pdc, ChannelFamily::PhaseDamping { gamma: g2 }),
        ("ADC+ADC", adc, ChannelFamily::AmplitudeDamping { gamma: g2 }),
        ("DC+DC", dc.clone(), ChannelFamily::Depolarizing { gamma: g2 }),
        ("DC+ADC", dc.clone(), ChannelFamily::AmplitudeDamping { gamma: g2 }),
        ("DC+PDC", dc, ChannelFamily::PhaseDamping { gamma: g2 }),
    ];
    let keep = |label: &str| match cfg.experiment {
        Experiment::PdcCert => label == "PDC+PDC",
        Experiment::AdcCert => label == "ADC+ADC",
        _ => true,
    };
    all.into_iter().filter(|(label, _, _)| keep(label)).collect()
}

/// Commutativity-defect certificates over the equal-split grid.
pub fn run_certificates(cfg: &ExperimentConfig) -> Result<CsvTable> {
    let grid = midpoint_grid();
    let mut table = CsvTable::new([
        "pair",
        "gamma1",
        "gamma2",
        "max_defect",
        "t1",
        "s",
        "t2",
        "i",
        "j",
        "verdict",
    ]);
    for (label, fam1, fam2) in certificate_pairs(cfg) {
        let (divisible, report) = certify_cp_divisibility(&fam1, &fam2, &grid, CERTIFICATE_TOL)?;
        let (t1, s, t2) = report.worst_triple;
        let (i, j) = report.worst_pair;
        table.push_row(vec![
            label.into(),
            cfg.gamma1.into(),
            cfg.gamma2.into(),
            report.max_defect.into(),
            t1.into(),
            s.into(),
            t2.into(),
            (i as f64).into(),
            (j as f64).into(),
            if divisible { "cp_divisible" } else { "cp_indivisible" }.into(),
        ])?;
    }
    table.push_comment(format!(
        "grid: {} equal-split triples, tolerance {}",
        grid.len(),
        format_g15(CERTIFICATE_TOL)
    ));
    Ok(table)
}
