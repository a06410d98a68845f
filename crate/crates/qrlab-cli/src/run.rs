use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use qrlab::channels::{KrausChannel, SiteChannelSpec};
use qrlab::codes::{build_code, joint_distribution, CssCode, JointDistribution};
use qrlab::diagnostics::{
    certify_bounds, coherent_info_decrease, entanglement_fidelity, environment_state,
    mutual_trace_distance, BoundReport, Subsystem,
};
use qrlab::recovery::{build_recovery, BuiltRecovery, DecoderRule, RecoverySpec, SDP_DIM_CAP};
use qrlab::Error;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::interp::{bisect, Pchip};
use crate::records::{CrossingRecord, SweepRecord, TsGridRecord, SCHEMA_VERSION};

/// Runs `f` over `0..n` on a shared-nothing worker pool; results keep the
/// index order, so output is identical for any worker count.
pub fn parallel_map<T, F>(n: usize, workers: usize, f: F) -> CliResult<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> CliResult<T> + Sync,
{
    if workers <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let counter = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<CliResult<T>>>> = (0..n).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers.min(n) {
            scope.spawn(|| loop {
                let i = counter.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let value = f(i);
                *slots[i].lock().expect("result slot") = Some(value);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("poisoned slot").expect("slot filled"))
        .collect()
}

/// True for errors that skip a quantity without aborting the run.
fn is_skippable(e: &Error) -> bool {
    matches!(e, Error::Resource(_) | Error::DimensionLimit(_))
}

struct CellOutcome {
    records: Vec<SweepRecord>,
    bounds_violated: bool,
}

/// Evaluates one (code, p) cell of a sweep: every recovery, the
/// environment diagnostics, optional certification and Monte Carlo
/// cross-checks.
fn sweep_cell(
    config: &ExperimentConfig,
    channel_spec: &SiteChannelSpec,
    code_name: &str,
    p: f64,
    cell_index: usize,
) -> CliResult<CellOutcome> {
    let started = Instant::now();
    let code = build_code(code_name)?;
    let n = code.n();
    let recoveries = config.recovery_specs()?;

    let base = |recovery: &str| SweepRecord {
        schema_version: SCHEMA_VERSION,
        code: code_name.to_string(),
        n_physical: n,
        channel: channel_spec.to_string(),
        p,
        recovery: recovery.to_string(),
        fe: None,
        fe2: None,
        t_re: None,
        i_re: None,
        slack_min: None,
        bounds_hold: None,
        mc_fe2: None,
        skipped: Vec::new(),
        wall_time_ms: None,
    };

    // Product channel; a Kraus blow-up skips the whole cell.
    let site = channel_spec.channel(p)?;
    let kraus_count = (site.kraus_ops().len() as f64).powi(n as i32);
    if kraus_count > config.caps.kraus_limit as f64 {
        let records = recoveries
            .iter()
            .map(|(name, _)| {
                let mut r = base(name);
                r.skipped.push(format!(
                    "fe: product channel needs {kraus_count:.0} Kraus operators (cap {})",
                    config.caps.kraus_limit
                ));
                r
            })
            .collect();
        return Ok(CellOutcome {
            records,
            bounds_violated: false,
        });
    }
    let channel = site.tensor_power(n)?;
    let noise = channel_spec.site_noise(p)?;
    let joint = match &noise {
        Some(site_noise) => Some(joint_distribution(&code, site_noise)?),
        None => None,
    };

    // Shared diagnostics for the cell.
    let mut t_re = None;
    let mut i_re = None;
    let mut diag_skip = None;
    let env_dim = code.logical_dim() * code.dim() * channel.kraus_ops().len();
    if env_dim > config.caps.max_dim {
        diag_skip = Some(format!(
            "t_re,i_re: tripartite dimension {env_dim} exceeds cap {}",
            config.caps.max_dim
        ));
    } else {
        match environment_state(&channel, &code) {
            Ok(state) => {
                t_re = Some(mutual_trace_distance(&state, (Subsystem::R, Subsystem::E))?);
                i_re = Some(coherent_info_decrease(&state)?.i_re);
            }
            Err(e) if is_skippable(&e) => diag_skip = Some(format!("t_re,i_re: {e}")),
            Err(e) => return Err(e.into()),
        }
    }

    // Optional certification, once per cell.
    let mut slack_min = None;
    let mut bounds_hold = None;
    let mut certify_skip = None;
    if config.certify {
        let specs: Vec<RecoverySpec> = recoveries.iter().map(|(_, s)| s.clone()).collect();
        match certify_bounds(&code, channel_spec, p, &specs) {
            Ok(report) => {
                slack_min = report.min_slack();
                bounds_hold = Some(report.all_hold);
            }
            Err(e) if is_skippable(&e) => certify_skip = Some(format!("bounds: {e}")),
            Err(e) => return Err(e.into()),
        }
    }

    let mut records = Vec::with_capacity(recoveries.len());
    for (rec_index, (name, spec)) in recoveries.iter().enumerate() {
        let mut record = base(name);
        record.t_re = t_re;
        record.i_re = i_re;
        record.slack_min = slack_min;
        record.bounds_hold = bounds_hold;
        if let Some(s) = &diag_skip {
            record.skipped.push(s.clone());
        }
        if let Some(s) = &certify_skip {
            record.skipped.push(s.clone());
        }

        let unavailable = match spec {
            RecoverySpec::Sdp { .. } if code.dim() > SDP_DIM_CAP => Some(format!(
                "fe: sdp needs dimension <= {SDP_DIM_CAP}, code has {}",
                code.dim()
            )),
            RecoverySpec::Ml | RecoverySpec::Sampler { .. } if noise.is_none() => {
                Some("fe: decoder recoveries need Pauli noise".to_string())
            }
            _ => None,
        };
        if let Some(reason) = unavailable {
            record.skipped.push(reason);
            records.push(record);
            continue;
        }

        match build_recovery(spec, &code, &channel, noise.as_ref()) {
            Ok(BuiltRecovery::Channel(recovery)) => {
                let fe = entanglement_fidelity(&recovery, &channel, &code)?;
                record.fe = Some(fe);
                record.fe2 = Some(fe * fe);
            }
            Ok(BuiltRecovery::Sdp(solution)) => {
                record.fe = Some(solution.fe());
                record.fe2 = Some(solution.objective);
                if !solution.converged {
                    record
                        .skipped
                        .push("fe: sdp did not converge; value is a lower bound".into());
                }
            }
            Err(e) if is_skippable(&e) => record.skipped.push(format!("fe: {e}")),
            Err(e) => return Err(e.into()),
        }

        if config.mc_samples > 0 {
            match (&joint, spec) {
                (Some(joint), RecoverySpec::Ml) => {
                    record.mc_fe2 = Some(mc_success(
                        joint,
                        DecoderRule::Ml,
                        config.mc_samples,
                        mc_seed(config.seed, cell_index, rec_index),
                    ));
                }
                (Some(joint), RecoverySpec::Sampler { alpha }) => {
                    record.mc_fe2 = Some(mc_success(
                        joint,
                        DecoderRule::Sampler { alpha: *alpha },
                        config.mc_samples,
                        mc_seed(config.seed, cell_index, rec_index),
                    ));
                }
                _ => record
                    .skipped
                    .push("mc_fe2: cross-check applies to decoder recoveries only".into()),
            }
        }

        records.push(record);
    }

    if config.timings {
        let ms = started.elapsed().as_secs_f64() * 1e3;
        for record in &mut records {
            record.wall_time_ms = Some(ms / recoveries.len() as f64);
        }
    }

    Ok(CellOutcome {
        bounds_violated: bounds_hold == Some(false),
        records,
    })
}

fn mc_seed(seed: u64, cell: usize, recovery: usize) -> u64 {
    seed ^ (cell as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (recovery as u64).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

/// Monte Carlo estimate of the decoder success probability: draw a coset
/// from the joint table, a correction from the rule, and count matches.
fn mc_success(joint: &JointDistribution, rule: DecoderRule, samples: u64, seed: u64) -> f64 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        // Sample (class, syndrome) from the joint distribution.
        let mut u: f64 = rng.random();
        let mut drawn = (0usize, 0usize);
        'outer: for s in 0..joint.n_syndromes() {
            for c in 0..joint.n_classes() {
                u -= joint.prob(c, s);
                if u <= 0.0 {
                    drawn = (c, s);
                    break 'outer;
                }
            }
        }
        let (class, syndrome) = drawn;
        let decoded = match rule {
            DecoderRule::Ml => joint.ml_class(syndrome),
            DecoderRule::Sampler { alpha } => {
                let q = joint.posterior(syndrome, alpha);
                let mut v: f64 = rng.random();
                let mut pick = 0usize;
                for (c, qc) in q.iter().enumerate() {
                    v -= qc;
                    if v <= 0.0 {
                        pick = c;
                        break;
                    }
                }
                pick
            }
        };
        if decoded == class {
            hits += 1;
        }
    }
    hits as f64 / samples as f64
}

pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub bounds_violated: bool,
}

pub fn run_sweep(config: &ExperimentConfig) -> CliResult<SweepOutcome> {
    let channel_spec = config.channel_spec()?;
    let points = config.grid.points();
    let cells: Vec<(String, f64)> = config
        .codes
        .iter()
        .flat_map(|c| points.iter().map(move |&p| (c.clone(), p)))
        .collect();
    let outcomes = parallel_map(cells.len(), config.workers, |i| {
        let (code, p) = &cells[i];
        sweep_cell(config, &channel_spec, code, *p, i)
    })?;
    let mut records = Vec::new();
    let mut bounds_violated = false;
    for outcome in outcomes {
        bounds_violated |= outcome.bounds_violated;
        records.extend(outcome.records);
    }
    Ok(SweepOutcome {
        records,
        bounds_violated,
    })
}

pub struct CertifyOutcome {
    pub reports: Vec<BoundReport>,
    pub bounds_violated: bool,
}

pub fn run_certify(config: &ExperimentConfig) -> CliResult<CertifyOutcome> {
    let channel_spec = config.channel_spec()?;
    let specs: Vec<RecoverySpec> = config
        .recovery_specs()?
        .into_iter()
        .map(|(_, s)| s)
        .collect();
    let points = config.grid.points();
    let cells: Vec<(String, f64)> = config
        .codes
        .iter()
        .flat_map(|c| points.iter().map(move |&p| (c.clone(), p)))
        .collect();
    let reports = parallel_map(cells.len(), config.workers, |i| {
        let (code_name, p) = &cells[i];
        let code = build_code(code_name)?;
        certify_bounds(&code, &channel_spec, *p, &specs).map_err(CliError::from)
    })?;
    let bounds_violated = reports.iter().any(|r| !r.all_hold);
    Ok(CertifyOutcome {
        reports,
        bounds_violated,
    })
}

/// Builds the student recovery for an assumed parameter `p_s`.
fn student_recovery(
    spec: &RecoverySpec,
    code: &CssCode,
    channel_spec: &SiteChannelSpec,
    p_s: f64,
) -> CliResult<KrausChannel> {
    let assumed = channel_spec.channel(p_s)?.tensor_power(code.n())?;
    let noise = channel_spec.site_noise(p_s)?;
    match build_recovery(spec, code, &assumed, noise.as_ref())? {
        BuiltRecovery::Channel(ch) => Ok(ch),
        BuiltRecovery::Sdp(_) => Err(CliError::Config(
            "ts-grid supports petz, ml and sampler recoveries".into(),
        )),
    }
}

pub fn run_ts_grid(config: &ExperimentConfig) -> CliResult<Vec<TsGridRecord>> {
    if config.codes.len() != 1 {
        return Err(CliError::Config("ts-grid runs on exactly one code".into()));
    }
    let (recovery_name, recovery_spec) = config.recovery_specs()?.remove(0);
    if matches!(recovery_spec, RecoverySpec::Sdp { .. }) {
        return Err(CliError::Config(
            "ts-grid supports petz, ml and sampler recoveries".into(),
        ));
    }
    let channel_spec = config.channel_spec()?;
    let code = build_code(&config.codes[0])?;
    let points = config.grid.points();

    // Student recoveries depend only on p_s; build each once.
    let students = parallel_map(points.len(), config.workers, |i| {
        student_recovery(&recovery_spec, &code, &channel_spec, points[i])
    })?;

    let pairs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|s| (0..points.len()).map(move |t| (s, t)))
        .collect();
    let records = parallel_map(pairs.len(), config.workers, |idx| {
        let (s_idx, t_idx) = pairs[idx];
        let teacher = channel_spec
            .channel(points[t_idx])?
            .tensor_power(code.n())?;
        let fe = entanglement_fidelity(&students[s_idx], &teacher, &code)?;
        Ok(TsGridRecord {
            schema_version: SCHEMA_VERSION,
            code: code.name().to_string(),
            channel: channel_spec.to_string(),
            recovery: recovery_name.clone(),
            p_star: points[t_idx],
            p_student: points[s_idx],
            fe,
            fe2: fe * fe,
            is_diagonal: s_idx == t_idx,
        })
    })?;
    Ok(records)
}

pub fn run_crossing(config: &ExperimentConfig) -> CliResult<Vec<CrossingRecord>> {
    let channel_spec = config.channel_spec()?;
    let points = config.grid.points();
    let recoveries = config.recovery_specs()?;
    let mut records = Vec::new();

    for (recovery_name, recovery_spec) in &recoveries {
        // One fidelity curve per code.
        let mut curves: Vec<(String, Vec<f64>)> = Vec::new();
        for code_name in &config.codes {
            let code = build_code(code_name)?;
            let fes = parallel_map(points.len(), config.workers, |i| {
                let p = points[i];
                let channel = channel_spec.channel(p)?.tensor_power(code.n())?;
                let noise = channel_spec.site_noise(p)?;
                match build_recovery(recovery_spec, &code, &channel, noise.as_ref())? {
                    BuiltRecovery::Channel(recovery) => {
                        Ok(entanglement_fidelity(&recovery, &channel, &code)?)
                    }
                    BuiltRecovery::Sdp(solution) => Ok(solution.fe()),
                }
            })?;
            curves.push((code_name.clone(), fes));
        }

        let mut pair_records = Vec::new();
        let mut found = Vec::new();
        for i in 0..curves.len() {
            for j in i + 1..curves.len() {
                let (name_a, ys_a) = &curves[i];
                let (name_b, ys_b) = &curves[j];
                let pa = Pchip::new(points.clone(), ys_a.clone())?;
                let pb = Pchip::new(points.clone(), ys_b.clone())?;
                let diff = |p: f64| pa.eval(p) - pb.eval(p);
                // Brackets from sign changes at grid nodes.
                let mut crossing = None;
                let mut brackets = 0usize;
                for w in 0..points.len() - 1 {
                    let (a, b) = (points[w], points[w + 1]);
                    let (fa, fb) = (diff(a), diff(b));
                    if fa == 0.0 {
                        crossing.get_or_insert(a);
                        brackets += 1;
                    } else if fa.signum() != fb.signum() {
                        if let Some(root) = bisect(diff, a, b, 1e-4) {
                            crossing.get_or_insert(root);
                            brackets += 1;
                        }
                    }
                }
                let note = match brackets {
                    0 => "no sign change in grid".to_string(),
                    1 => "ok".to_string(),
                    n => format!("{n} brackets; first reported"),
                };
                if let Some(c) = crossing {
                    found.push(c);
                }
                pair_records.push(CrossingRecord {
                    schema_version: SCHEMA_VERSION,
                    channel: channel_spec.to_string(),
                    recovery: recovery_name.clone(),
                    code_a: name_a.clone(),
                    code_b: name_b.clone(),
                    crossing,
                    spread: None,
                    note,
                });
            }
        }
        let spread = if found.len() > 1 {
            let max = found.iter().cloned().fold(f64::MIN, f64::max);
            let min = found.iter().cloned().fold(f64::MAX, f64::min);
            Some(max - min)
        } else {
            None
        };
        for mut record in pair_records {
            record.spread = spread;
            records.push(record);
        }
    }
    Ok(records)
}
