use std::error::Error;
use std::process::{Command, ExitCode};

use qswitch_core::channels::{compose, trace_distance, ChannelFamily, DensityMatrix};
use qswitch_core::cqs::{
    apply_cqs, apply_switch, commutativity_defect, midpoint_grid, sigma_interval_map, sigma_interval_operator,
    sigma_two_stage, Branch, IndexPairing, SwitchConfig, SwitchSlots,
};
use qswitch_core::divisibility::{scan_monotonicity, Trajectory, WitnessReport};
use qswitch_core::experiments::{run, CsvTable, Experiment, ExperimentConfig};
use qswitch_core::linalg::{c, hermitian_eig, inner, re, ComplexMatrix, C64};
use qswitch_core::open_system::{causal_order_pair, FixedInputs, SeHamiltonian};
use qswitch_core::uqs::{causal_order_states, uqs_outputs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Outcome = Result<String, Box<dyn Error>>;
type Criterion = (&'static str, fn() -> Outcome);

const QUBIT_BOUND: f64 = 4.0 * std::f64::consts::SQRT_2;
const SEED: u64 = 0x5eed_c0de;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), Box<dyn Error>> {
    if cond {
        Ok(())
    } else {
        Err(msg().into())
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn ginibre(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| gaussian(rng))
}

fn random_state(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let g = ginibre(rng, 2);
    let gg = &g * &g.adjoint();
    let tr = gg.trace().re;
    DensityMatrix::new(gg.scale_real(1.0 / tr)).expect("Ginibre state")
}

fn random_states(n: usize) -> Vec<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..n).map(|_| random_state(&mut rng)).collect()
}

/// Gram-Schmidt on the columns of a Ginibre matrix.
fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let g = ginibre(rng, dim);
    let mut cols: Vec<Vec<C64>> = Vec::new();
    for j in 0..dim {
        let mut v: Vec<C64> = (0..dim).map(|i| g[(i, j)]).collect();
        for u in &cols {
            let proj = inner(u, &v);
            for (x, y) in v.iter_mut().zip(u) {
                *x -= proj * y;
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|x| x / norm).collect());
    }
    ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
}

fn families(gamma: f64) -> [ChannelFamily; 3] {
    [
        ChannelFamily::PhaseDamping { gamma },
        ChannelFamily::Depolarizing { gamma },
        ChannelFamily::AmplitudeDamping { gamma },
    ]
}

fn channel_validity() -> Outcome {
    let (mut completeness, mut negativity, mut count) = (0.0f64, 0.0f64, 0);
    for gamma in [0.2, 1.0, 5.0] {
        for k in 0..=30 {
            let delta = f64::from(k) * 0.1;
            for fam in families(gamma) {
                let ch = fam.make_channel(0.0, delta)?;
                completeness = completeness.max(ch.completeness_defect());
                let min_eig = *hermitian_eig(&ch.choi_matrix())?.values.last().expect("eigenvalues");
                negativity = negativity.max(-min_eig);
                count += 1;
            }
        }
    }
    ensure(completeness <= 1e-10 && negativity <= 1e-10, || {
        format!("completeness {completeness:e}, Choi negativity {negativity:e}")
    })?;
    Ok(format!(
        "{count} channels, completeness defect {completeness:.1e}, Choi negativity {negativity:.1e}"
    ))
}

type M2 = [[C64; 2]; 2];

fn mul2(a: &M2, b: &M2) -> M2 {
    let mut out = [[re(0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Sum of singular values of a 2 x 2 matrix: `sqrt(|Y|_F^2 + 2 |det Y|)`.
fn trace_norm2(y: &M2) -> f64 {
    let frob: f64 = y.iter().flatten().map(|x| x.norm_sqr()).sum();
    let det = (y[0][0] * y[1][1] - y[0][1] * y[1][0]).norm();
    (frob + 2.0 * det).max(0.0).sqrt()
}

fn scaled(m: [[f64; 2]; 2], s: f64) -> M2 {
    m.map(|row| row.map(|x| re(x * s)))
}

fn pdc_ops(p: f64) -> Vec<M2> {
    vec![
        scaled([[1.0, 0.0], [0.0, 1.0]], (1.0 - p).sqrt()),
        scaled([[1.0, 0.0], [0.0, -1.0]], p.sqrt()),
    ]
}

fn dc_ops(p: f64) -> Vec<M2> {
    let y = [[re(0.0), c(0.0, -p.sqrt() / 2.0)], [c(0.0, p.sqrt() / 2.0), re(0.0)]];
    vec![
        scaled([[1.0, 0.0], [0.0, 1.0]], (1.0 + 3.0 * (1.0 - p)).sqrt() / 2.0),
        scaled([[0.0, 1.0], [1.0, 0.0]], p.sqrt() / 2.0),
        y,
        scaled([[1.0, 0.0], [0.0, -1.0]], p.sqrt() / 2.0),
    ]
}

fn adc_ops(p: f64) -> Vec<M2> {
    vec![
        [[re(1.0), re(0.0)], [re(0.0), re((1.0 - p).sqrt())]],
        scaled([[0.0, 1.0], [0.0, 0.0]], p.sqrt()),
    ]
}

/// Largest `|K2_j K1_i - K1_i K2_j|_1` when both halves of the triple have equal length.
fn oracle_defect(k1: &[M2], k2: &[M2]) -> f64 {
    let mut worst = 0.0f64;
    for a in k1 {
        for b in k2 {
            let (ab, ba) = (mul2(b, a), mul2(a, b));
            let mut y = [[re(0.0); 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    y[i][j] = ab[i][j] - ba[i][j];
                }
            }
            worst = worst.max(trace_norm2(&y));
        }
    }
    worst
}

fn certificates() -> Outcome {
    let grid = midpoint_grid();
    let mut pdc_worst = 0.0f64;
    for (g1, g2) in [(1.0, 1.0), (1.0, 5.0), (0.2, 5.0)] {
        let report = commutativity_defect(
            &ChannelFamily::PhaseDamping { gamma: g1 },
            &ChannelFamily::PhaseDamping { gamma: g2 },
            &grid,
        )?;
        pdc_worst = pdc_worst.max(report.max_defect);
    }
    ensure(grid.len() == 27 && pdc_worst <= 1e-12, || {
        format!("PDC+PDC defect {pdc_worst:e} on {} triples", grid.len())
    })?;

    let p = -(-0.5f64).exp_m1();
    let triple = [(0.0, 0.5, 1.0)];
    let adc = ChannelFamily::AmplitudeDamping { gamma: 1.0 };
    let dc = ChannelFamily::Depolarizing { gamma: 1.0 };
    let pdc = ChannelFamily::PhaseDamping { gamma: 1.0 };
    let adc_adc = commutativity_defect(&adc, &adc, &triple)?.max_defect;
    let dc_pdc = commutativity_defect(&dc, &pdc, &triple)?.max_defect;
    let adc_oracle = oracle_defect(&adc_ops(p), &adc_ops(p));
    let dc_pdc_oracle = oracle_defect(&dc_ops(p), &pdc_ops(p));
    ensure(adc_adc > 0.05 && dc_pdc > 0.05, || {
        format!("ADC+ADC {adc_adc}, DC+PDC {dc_pdc} not above 0.05")
    })?;
    ensure(
        (adc_adc - adc_oracle).abs() <= 1e-12 && (dc_pdc - dc_pdc_oracle).abs() <= 1e-12,
        || format!("oracle mismatch: ADC+ADC {adc_adc} vs {adc_oracle}, DC+PDC {dc_pdc} vs {dc_pdc_oracle}"),
    )?;
    Ok(format!(
        "PDC+PDC {pdc_worst:.1e}, ADC+ADC {adc_adc:.6} (oracle {adc_oracle:.6}), DC+PDC {dc_pdc:.6} (oracle {dc_pdc_oracle:.6})"
    ))
}

fn commuting_consistency() -> Outcome {
    let grid = midpoint_grid();
    let states = random_states(20);
    let pairs = [(1.0, 1.0), (1.0, 5.0)];
    let (mut state_err, mut prob_err, mut closure_err, mut checked) = (0.0f64, 0.0f64, 0.0f64, 0);
    for (g1, g2) in pairs {
        let f1 = ChannelFamily::PhaseDamping { gamma: g1 };
        let f2 = ChannelFamily::PhaseDamping { gamma: g2 };
        for &(t1, s, t2) in &grid {
            if commutativity_defect(&f1, &f2, &[(t1, s, t2)])?.max_defect > 1e-12 {
                continue;
            }
            let cfg = SwitchConfig::time_split(t1, s, t2)?;
            let plain = compose(&f1.make_channel(s, t2)?, &f2.make_channel(t1, s)?)?;
            for rho in &states {
                let out = apply_cqs(&cfg, &f1, &f2, rho)?;
                state_err = state_err.max(out.state.matrix().max_abs_diff(plain.apply(rho)?.matrix()));
                prob_err = prob_err.max((out.prob - 1.0).abs());

                let (s1, first) = (s / 2.0, s);
                let s2 = 0.5 * (s + t2);
                let two_stage = sigma_two_stage(&f1, &f2, t2, first, s2, s1, rho)?;
                let inner_map = sigma_interval_map(&f1, &f2, 0.0, s1, first, rho)?;
                let nested = sigma_interval_operator(&f1, &f2, first, s2, t2, &inner_map)?;
                closure_err = closure_err.max(two_stage.max_abs_diff(&nested));
            }
            checked += 1;
        }
    }
    ensure(checked == pairs.len() * grid.len(), || {
        format!("only {checked} commuting triples")
    })?;
    ensure(state_err <= 1e-10 && prob_err <= 1e-10 && closure_err <= 1e-10, || {
        format!("state {state_err:e}, prob {prob_err:e}, closure {closure_err:e}")
    })?;
    Ok(format!(
        "{checked} triples x 20 states, state {state_err:.1e}, prob {prob_err:.1e}, two-stage closure {closure_err:.1e}"
    ))
}

fn column_witness(table: &CsvTable, time: &str, column: &str) -> Result<WitnessReport, Box<dyn Error>> {
    let times = table.column(time).ok_or("missing time column")?;
    let d = table.column(column).ok_or_else(|| format!("missing column {column}"))?;
    Ok(scan_monotonicity(&Trajectory::new(times, d)?, 1e-3)?)
}

fn revivals(experiments: &[Experiment], columns: &[&str]) -> Outcome {
    let mut summary = Vec::new();
    for &exp in experiments {
        let cfg = ExperimentConfig::defaults(exp);
        let table = run(&cfg)?;
        for col in columns {
            let r = column_witness(&table, "t", col)?;
            let inc = r.increase.unwrap_or(0.0);
            let (t_a, t_b) = r.t_pair.unwrap_or((0.0, 0.0));
            ensure(inc >= 1e-3 && t_b > 0.0 && t_b <= cfg.t_max, || {
                format!("{} {col}: increase {inc:e}", exp.name())
            })?;
            summary.push(format!("{} {col} +{inc:.4} ({t_a:.3}->{t_b:.3})", exp.name()));
        }
    }
    Ok(summary.join(", "))
}

fn switched_pairs() -> Outcome {
    revivals(
        &[Experiment::Fig2, Experiment::Fig3, Experiment::Fig4],
        &["D_equal_rates", "D_unequal_rates"],
    )
}

fn reduced_dynamics() -> Outcome {
    revivals(&[Experiment::HxPind], &["D_H1", "D_H2"])
}

fn uqs_trajectory() -> Outcome {
    let witness = revivals(&[Experiment::Fig6], &["D_sigma_f"])?;
    let inputs = FixedInputs::standard();
    let (h1, h2) = (SeHamiltonian::weak(), SeHamiltonian::strong());
    let mut identity_err = 0.0f64;
    for t in ExperimentConfig::defaults(Experiment::Fig6).times() {
        for sigma in [&inputs.sigma1, &inputs.sigma2] {
            let pair = causal_order_pair(&h1, &h2, t, sigma, &inputs.rho_env)?;
            let out = uqs_outputs(&pair)?;
            let d = trace_distance(&out.rho_f1, &out.rho_f2)?;
            let lambda = pair.order_12.eigenvalues()[0];
            let mu = pair.order_21.eigenvalues()[0];
            identity_err = identity_err.max((d - (lambda - mu).abs()).abs());
        }
    }
    ensure(identity_err <= 1e-10, || {
        format!("shared-basis identity off by {identity_err:e}")
    })?;
    Ok(format!("{witness}, identity {identity_err:.1e}"))
}

fn optimizer_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let (mut lo, mut hi, mut spectrum_err, mut ortho_err) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for _ in 0..200 {
        let a = random_state(&mut rng);
        let b = random_state(&mut rng);
        let pair = causal_order_states(
            |_| Ok(a.matrix().clone()),
            |_| Ok(b.matrix().clone()),
            &DensityMatrix::maximally_mixed(2),
        )?;
        let out = uqs_outputs(&pair)?;
        lo = lo.min(out.basis.f_value);
        hi = hi.max(out.basis.f_value);
        for (rebuilt, original) in [(&out.rho_f1, &a), (&out.rho_f2, &b)] {
            for (x, y) in rebuilt.eigenvalues().iter().zip(original.eigenvalues()) {
                spectrum_err = spectrum_err.max((x - y).abs());
            }
        }
        ortho_err = ortho_err.max(inner(&out.basis.chi, &out.basis.chi_perp).norm());
    }
    ensure(lo >= QUBIT_BOUND - 1e-6 && hi <= QUBIT_BOUND + 1e-9, || {
        format!("f_value range [{lo}, {hi}]")
    })?;
    ensure(spectrum_err <= 1e-10 && ortho_err <= 1e-10, || {
        format!("spectrum {spectrum_err:e}, orthogonality {ortho_err:e}")
    })?;
    Ok(format!(
        "200 pairs, f - 4 sqrt2 in [{:.1e}, {:.1e}], spectrum {spectrum_err:.1e}",
        lo - QUBIT_BOUND,
        hi - QUBIT_BOUND
    ))
}

fn discrimination() -> Outcome {
    const CURVES: [&str; 3] = ["p_err_dco", "p_err_cqs", "p_err_uqs"];
    let curves = |noise_p: Option<f64>| -> Result<Vec<Vec<f64>>, Box<dyn Error>> {
        let mut cfg = ExperimentConfig::defaults(Experiment::Fig5);
        if let Some(p) = noise_p {
            cfg.noise_p = p;
        }
        let table = run(&cfg)?;
        CURVES
            .iter()
            .map(|name| table.column(name).ok_or_else(|| format!("missing {name}").into()))
            .collect()
    };
    let defaults = curves(None)?;
    let out_of_range = defaults.iter().flatten().filter(|x| !(0.0..=0.5).contains(*x)).count();
    ensure(out_of_range == 0, || {
        format!("{out_of_range} error probabilities outside [0, 1/2]")
    })?;
    let origin_err = defaults.iter().map(|col| (col[0] - 0.5).abs()).fold(0.0, f64::max);
    ensure(origin_err <= 1e-10, || format!("theta = 0 off 1/2 by {origin_err:e}"))?;

    let moderate = curves(Some(0.3))?;
    let mut gaps = Vec::new();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let gap = moderate[i]
            .iter()
            .zip(&moderate[j])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        ensure(gap > 1e-3, || {
            format!("{} and {} coincide at p = 0.3 (gap {gap:e})", CURVES[i], CURVES[j])
        })?;
        gaps.push(format!("{:.4}", gap));
    }
    Ok(format!(
        "theta = 0 within {origin_err:.1e} of 1/2, pairwise gaps at p = 0.3: {}",
        gaps.join("/")
    ))
}

fn kraus_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    let states = random_states(20);
    let v2 = random_unitary(&mut rng, 2);
    let v4 = random_unitary(&mut rng, 4);
    let unitary_err = [(&v2, 2), (&v4, 4)]
        .iter()
        .map(|(v, n)| (&v.adjoint() * *v).max_abs_diff(&ComplexMatrix::identity(*n)))
        .fold(0.0, f64::max);
    ensure(unitary_err <= 1e-12, || {
        format!("mixing matrix not unitary ({unitary_err:e})")
    })?;

    let dc = ChannelFamily::Depolarizing { gamma: 1.0 };
    let pdc = ChannelFamily::PhaseDamping { gamma: 1.0 };
    let adc = ChannelFamily::AmplitudeDamping { gamma: 5.0 };
    let cases = [(&dc, &pdc, &v4), (&pdc, &adc, &v2), (&adc, &dc, &v2)];
    let configs = [
        SwitchConfig::static_interval(0.0, 0.7)?,
        SwitchConfig::time_split(0.0, 0.4, 1.0)?,
    ];
    let mut worst = 0.0f64;
    for (f1, f2, v) in cases {
        for cfg in &configs {
            let slots = SwitchSlots::from_families(cfg, f1, f2)?;
            let mixed = SwitchSlots {
                ch1_late: slots.ch1_late.mixed(v)?,
                ch1_early: slots.ch1_early.mixed(v)?,
                ..slots.clone()
            };
            for rho in &states {
                let a = apply_switch(&slots, &DensityMatrix::plus(), Branch::Plus, IndexPairing::Shared, rho)?;
                let b = apply_switch(&mixed, &DensityMatrix::plus(), Branch::Plus, IndexPairing::Shared, rho)?;
                worst = worst
                    .max(a.state.matrix().max_abs_diff(b.state.matrix()))
                    .max((a.prob - b.prob).abs());
            }
        }
    }
    ensure(worst < 1e-10, || format!("output moved by {worst:e}"))?;
    Ok(format!("2x2 and 4x4 mixings, 20 states, max change {worst:.1e}"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir()?;
    for exp in Experiment::ALL {
        let mut outputs = Vec::new();
        for round in 0..2 {
            let path = dir.path().join(format!("{}-{round}.csv", exp.name()));
            let status = Command::new(env!("CARGO_BIN_EXE_qswitch"))
                .args([exp.name(), "--out", path.to_str().ok_or("non-UTF-8 temp path")?])
                .status()?;
            ensure(status.success(), || format!("{} exited with {status}", exp.name()))?;
            outputs.push(std::fs::read(&path)?);
        }
        ensure(outputs[0] == outputs[1], || {
            format!("{} output differs between runs", exp.name())
        })?;
    }
    Ok(format!(
        "{} subcommands byte-identical across two runs",
        Experiment::ALL.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("channel validity", channel_validity),
        ("commutativity certificates", certificates),
        ("commuting-case consistency", commuting_consistency),
        ("switched-pair revivals", switched_pairs),
        ("reduced-dynamics revivals", reduced_dynamics),
        ("universal-switch trajectory", uqs_trajectory),
        ("overlap optimizer", optimizer_bound),
        ("state discrimination sweep", discrimination),
        ("Kraus representation invariance", kraus_invariance),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(e) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {e}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
