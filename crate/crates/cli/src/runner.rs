//! Executes a validated config. Steps run in order; every file is written from
//! this thread, so output ordering never depends on the worker pool.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use cyllab_core::degeneration::{run_family, DegenerationReport, FamilyOptions, FamilySchedule, Monotonicity};
use cyllab_core::estimates::{
    build_bump, check_diff_inequality, com_residual, convolution_window_check, default_slack,
    diff_inequality_precondition, elliptic_constant_probe, exp_bound_check, gamma_profile, pointwise_decay_check,
    two_sided_decay, window_decay_check, EstimateConstants, DELTA,
};
use cyllab_core::io::{read_field, write_field};
use cyllab_core::vfield::flow_ode_directed;
use cyllab_core::{make_instance, sup_derivative_norm, CylError, Cylinder, SpectralField, VectorFieldSequence, Window};
use serde::{Deserialize, Serialize};

use crate::config::{CheckConfig, Command, ExperimentConfig, FamilyConfig, FlowlineConfig, SolveConfig};
use crate::manifest::{RunManifest, StepRecord, StepStatus};

pub const MANIFEST_FILE: &str = "manifest.json";

struct Output {
    dir: PathBuf,
}

impl Output {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn json<T: Serialize>(&self, m: &mut RunManifest, name: &str, value: &T) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(self.path(name), text).with_context(|| format!("writing {name}"))?;
        m.files.push(name.to_string());
        Ok(())
    }

    fn csv(&self, m: &mut RunManifest, name: &str, header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_path(self.path(name)).with_context(|| format!("writing {name}"))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row.iter().map(|v| format!("{v:e}")))?;
        }
        w.flush()?;
        m.files.push(name.to_string());
        Ok(())
    }
}

/// Runs `config` and writes `manifest.json` last. Invalid configs and missing
/// inputs are errors; numerical failures are recorded as failed steps.
pub fn run(config: &ExperimentConfig) -> anyhow::Result<RunManifest> {
    config.validate()?;
    let started = Instant::now();
    fs::create_dir_all(&config.out_dir).with_context(|| format!("creating {}", config.out_dir.display()))?;
    let out = Output { dir: config.out_dir.clone() };
    let mut m = RunManifest::new(config);
    match &config.command {
        Command::Solve(c) => solve(c, &out, &mut m)?,
        Command::Check(c) => check(c, config.seed, &out, &mut m)?,
        Command::Family(c) => family(c, &out, &mut m)?,
        Command::Flowline(c) => flowline(c, &out, &mut m)?,
    }
    m.total_seconds = started.elapsed().as_secs_f64();
    let mut text = serde_json::to_string_pretty(&m)?;
    text.push('\n');
    fs::write(out.path(MANIFEST_FILE), text).context("writing manifest")?;
    Ok(m)
}

fn status(pass: bool) -> StepStatus {
    if pass {
        StepStatus::Passed
    } else {
        StepStatus::Failed
    }
}

fn errored<'a>(m: &'a mut RunManifest, name: &str, t: Instant, err: &CylError) -> &'a mut StepRecord {
    let step = m.push(name, StepStatus::Error, t.elapsed().as_secs_f64());
    step.message = Some(err.to_string());
    step
}

fn solve(c: &SolveConfig, out: &Output, m: &mut RunManifest) -> anyhow::Result<()> {
    let bdata = c.bdata.load()?;
    let cyl = Cylinder::new(c.grid.r, c.grid.s_samples, c.grid.t_modes, c.vfield.real_dim() / 2)?;
    bdata.check_against(&cyl)?;
    let t = Instant::now();
    let seq = VectorFieldSequence::constant(c.vfield.clone());
    match make_instance(cyl, c.eps, &bdata, &seq, 1, c.tol) {
        Ok((u, report)) => {
            let step = m.push("solve", StepStatus::Passed, t.elapsed().as_secs_f64());
            step.metrics.insert("iterations".into(), report.iterations as f64);
            step.metrics.insert("final_residual".into(), report.final_residual);
            step.metrics.insert("discrete_residual".into(), report.discrete_residual);
            step.metrics.insert("ball_violation".into(), report.ball_violation);
            write_field(&u, &out.path("field.json"))?;
            m.files.push("field.json".into());
            m.files.push("field.csv".into());
            out.json(m, "solve_report.json", &report)?;
        }
        Err(e) => {
            errored(m, "solve", t, &e);
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub status: StepStatus,
    /// Worst margin of an inequality, where one applies.
    pub margin: Option<f64>,
    /// Fitted constant, where one applies.
    pub fitted: Option<f64>,
    /// Fitted constant over its boundary scale.
    pub ratio: Option<f64>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub eps: f64,
    pub r: f64,
    pub constants: EstimateConstants,
    pub checks: Vec<CheckEntry>,
}

fn entry(name: &str, status: StepStatus) -> CheckEntry {
    CheckEntry { name: name.into(), status, margin: None, fitted: None, ratio: None, message: None }
}

fn check(c: &CheckConfig, seed: u64, out: &Output, m: &mut RunManifest) -> anyhow::Result<()> {
    let u = read_field(&c.field).with_context(|| format!("reading field {}", c.field.display()))?;
    let cyl = *u.cylinder();
    if cyl.real_dim() != c.vfield.real_dim() {
        anyhow::bail!("vfield has real dimension {}, field has {}", c.vfield.real_dim(), cyl.real_dim());
    }
    let r = cyl.half_length();
    let bump = build_bump();
    let mut constants = EstimateConstants::analytic(&bump);
    let mut checks = Vec::new();

    let t = Instant::now();
    let com = com_residual(&u, &c.vfield, c.eps)?;
    let mut e = entry("center_of_mass", status(com.interior_max <= c.com_tol));
    e.margin = Some(c.com_tol - com.interior_max);
    checks.push((e, t.elapsed().as_secs_f64()));

    let t = Instant::now();
    let profile = gamma_profile(&u);
    let pre = diff_inequality_precondition(&u, &c.vfield, c.eps);
    let t_profile = t.elapsed().as_secs_f64();
    match &pre {
        Ok(p) => {
            let mut e = entry("precondition", StepStatus::Passed);
            e.margin = Some(p.limit - p.value);
            checks.push((e, t_profile));
            let t = Instant::now();
            let di = check_diff_inequality(&profile, default_slack(&profile));
            let mut e = entry("diff_inequality", status(di.pass));
            e.margin = Some(di.worst_budgeted_margin);
            checks.push((e, t.elapsed().as_secs_f64()));
        }
        Err(err) => {
            let mut e = entry("precondition", StepStatus::Skipped);
            e.message = Some(err.to_string());
            checks.push((e, t_profile));
            let mut e = entry("diff_inequality", StepStatus::Skipped);
            e.message = Some("precondition not met".into());
            checks.push((e, 0.0));
        }
    }

    let t = Instant::now();
    let exp = exp_bound_check(&profile, r, c.kappa);
    let mut e = entry("exp_bound", status(exp.pass));
    e.fitted = Some(exp.fitted_c);
    e.ratio = Some(exp.ratio());
    checks.push((e, t.elapsed().as_secs_f64()));

    let t = Instant::now();
    let win = window_decay_check(&u, r, c.kappa)?;
    let mut e = entry("window_decay", status(win.pass));
    e.fitted = Some(win.fitted);
    e.ratio = Some(win.ratio());
    checks.push((e, t.elapsed().as_secs_f64()));

    for k in 0..2 {
        let t = Instant::now();
        let pw = pointwise_decay_check(&u, r, k, c.kappa)?;
        let mut e = entry(&format!("pointwise_decay_{k}"), status(pw.pass));
        e.fitted = Some(pw.fitted);
        e.ratio = Some(pw.ratio());
        constants.m_k.push(pw.fitted);
        checks.push((e, t.elapsed().as_secs_f64()));
    }

    let t = Instant::now();
    let conv = convolution_window_check(&u, &profile, &bump, exp.fitted_c, default_slack(&profile), c.max_centers);
    let mut e = entry("convolution", status(conv.pass));
    e.margin = Some(conv.worst_margin);
    e.fitted = Some(conv.derived_constant);
    e.ratio = Some(conv.worst_window_ratio);
    checks.push((e, t.elapsed().as_secs_f64()));

    for k in 0..3 {
        constants.c_k.push(sup_derivative_norm(&u, k, Window::span(-r, r))?);
    }

    if c.elliptic_corpus > 0 {
        let t = Instant::now();
        let corpus: Vec<SpectralField> = (0..c.elliptic_corpus)
            .map(|i| SpectralField::random_smooth(cyl, seed.wrapping_add(i as u64), (cyl.t_modes() / 4).max(1) as i64, 3, 0.1))
            .collect();
        let c_ell = elliptic_constant_probe(&corpus, 1, DELTA)?;
        constants.c_ell = Some(c_ell);
        let mut e = entry("elliptic_probe", StepStatus::Passed);
        e.fitted = Some(c_ell);
        checks.push((e, t.elapsed().as_secs_f64()));
    }

    for (e, secs) in &checks {
        let step = m.push(&e.name, e.status, *secs);
        for (key, v) in [("margin", e.margin), ("fitted", e.fitted), ("ratio", e.ratio)] {
            if let Some(v) = v {
                step.metrics.insert(key.into(), v);
            }
        }
        step.message = e.message.clone();
    }
    let report = CheckReport { eps: c.eps, r, constants, checks: checks.into_iter().map(|(e, _)| e).collect() };
    out.json(m, "check_report.json", &report)?;
    let header: Vec<String> = ["s", "gamma", "gamma_dd", "rhs", "bound"].iter().map(|s| s.to_string()).collect();
    let rows = (0..profile.s.len()).map(|j| {
        let s = profile.s[j];
        vec![s, profile.gamma[j], profile.gamma_dd[j], profile.rhs[j], exp.fitted_c * two_sided_decay(DELTA, r, s)]
    });
    out.csv(m, "gamma_series.csv", &header, rows)?;
    Ok(())
}

fn monotone_step(m: &mut RunManifest, name: &str, mono: &Monotonicity) {
    let step = m.push(name, status(mono.strictly_decreasing), 0.0);
    if let Some(last) = mono.values.last() {
        step.metrics.insert("final".into(), *last);
    }
}

fn family(c: &FamilyConfig, out: &Output, m: &mut RunManifest) -> anyhow::Result<()> {
    let bdata = c.bdata.load()?;
    let schedule = FamilySchedule::from_radii(c.ell, &c.r_list)?;
    let opts = FamilyOptions { grid: c.grid, tol: c.tol };
    let t = Instant::now();
    let run = match run_family(&schedule, &bdata, &c.vfield, &opts) {
        Ok(run) => run,
        Err(e) => {
            errored(m, "family", t, &e);
            return Ok(());
        }
    };
    let report: &DegenerationReport = &run.report;
    let s = &report.summary;
    let step = m.push("family", StepStatus::Passed, t.elapsed().as_secs_f64());
    step.metrics.insert("amplitude_scale".into(), report.amplitude_scale);
    step.metrics.insert("included".into(), s.included as f64);

    let all = s.included == report.entries.len();
    let step = m.push("entries_included", status(all), 0.0);
    if !all {
        let why: Vec<String> = report
            .entries
            .iter()
            .filter_map(|e| e.excluded.as_ref().map(|x| format!("r = {}: {x}", e.r)))
            .collect();
        step.message = Some(why.join("; "));
    }
    monotone_step(m, "neck_oscillation_decreasing", &s.neck_oscillation);
    if c.ell > 0.0 {
        monotone_step(m, "flow_error_decreasing", &s.flow_error);
    } else {
        monotone_step(m, "endpoint_gap_decreasing", &s.endpoint_gap);
    }
    m.push("eps_rho_bounded", status(s.eps_rho_bounded), 0.0);

    out.json(m, "family_report.json", report)?;
    let d = c.vfield.limit.real_dim();
    let mut header = vec!["sigma".to_string()];
    header.extend((0..d).map(|i| format!("p{i}")));
    header.extend((0..d).map(|i| format!("oracle{i}")));
    header.push("diff".into());
    for (i, e) in report.entries.iter().enumerate() {
        if let Some(rows) = run.series(i) {
            let rows = rows.into_iter().map(|(s, p, o, diff)| {
                let mut row = vec![s];
                row.extend(p);
                row.extend(o);
                row.push(diff);
                row
            });
            out.csv(m, &format!("family_entry_{}.csv", e.index), &header, rows)?;
        }
    }
    Ok(())
}

/// Observed order from endpoints at steps `h`, `h/2`, `h/4`; `None` when the
/// differences are at roundoff level.
pub fn richardson_order(c: &FlowlineConfig) -> cyllab_core::Result<Option<f64>> {
    let ends: Vec<Vec<f64>> = [1.0, 2.0, 4.0]
        .iter()
        .map(|f| flow_ode_directed(&c.vfield, &c.start, c.duration, c.step / f, c.backward).map(|s| s.end().to_vec()))
        .collect::<cyllab_core::Result<_>>()?;
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let (e1, e2) = (dist(&ends[0], &ends[1]), dist(&ends[1], &ends[2]));
    Ok((e2 > 1e-14).then(|| (e1 / e2).log2()))
}

fn flowline(c: &FlowlineConfig, out: &Output, m: &mut RunManifest) -> anyhow::Result<()> {
    let t = Instant::now();
    let seg = match flow_ode_directed(&c.vfield, &c.start, c.duration, c.step, c.backward) {
        Ok(seg) => seg,
        Err(e) => {
            errored(m, "flowline", t, &e);
            return Ok(());
        }
    };
    let order = richardson_order(c)?;
    let step = m.push("flowline", StepStatus::Passed, t.elapsed().as_secs_f64());
    step.metrics.insert("step".into(), seg.step);
    step.metrics.insert("escaped".into(), if seg.escaped { 1.0 } else { 0.0 });
    if let Some(p) = order {
        step.metrics.insert("richardson_order".into(), p);
    }
    let sign = if c.backward { -1.0 } else { 1.0 };
    let mut header = vec!["tau".to_string()];
    header.extend((0..c.start.len()).map(|i| format!("x{i}")));
    let rows = seg.times().into_iter().zip(&seg.samples).map(|(tau, x)| {
        let mut row = vec![sign * tau];
        row.extend(x.iter().copied());
        row
    });
    out.csv(m, "flowline.csv", &header, rows)?;
    Ok(())
}

/// Where `run` writes its manifest.
pub fn manifest_path(out_dir: &Path) -> PathBuf {
    out_dir.join(MANIFEST_FILE)
}
