//! Family runs: generate `u_n` for a schedule `(r_n, eps_n)`, cut each member
//! into end plates and a neck, and compare the rescaled neck with the flow
//! line of the limit field.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ends::{cauchy_profile, estimate_endpoints, neck_oscillation, EndLimits};
use super::schedule::{select_rho, FamilySchedule};
use super::trace::{compare_flowline, rescale_trace, FlowComparison, RescaledTrace};
use crate::cylinder::Cylinder;
use crate::error::{CylError, Result};
use crate::field::SpectralField;
use crate::solve::{make_instance, solve_nonlinear, sup_norm, SolveReport, SpectralBoundaryData, DEFAULT_TOL};
use crate::vfield::VectorFieldSequence;

/// Target for `sup |u|` on the largest member when the data is rescaled.
pub const AUTOSCALE_TARGET: f64 = 0.9;

/// How many s-samples each member gets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum SampleRule {
    /// The same `S` for every member.
    Fixed { s_samples: usize },
    /// Spacing close to `1 / samples_per_unit` on every member.
    Density { samples_per_unit: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyGrid {
    pub samples: SampleRule,
    pub t_modes: usize,
}

impl FamilyGrid {
    pub fn cylinder(&self, r: f64, ambient_dim: usize) -> Result<Cylinder> {
        match self.samples {
            SampleRule::Fixed { s_samples } => Cylinder::new(r, s_samples, self.t_modes, ambient_dim),
            SampleRule::Density { samples_per_unit } => Cylinder::with_density(r, samples_per_unit, self.t_modes, ambient_dim),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyOptions {
    pub grid: FamilyGrid,
    pub tol: f64,
}

impl FamilyOptions {
    pub fn new(grid: FamilyGrid) -> Self {
        FamilyOptions { grid, tol: DEFAULT_TOL }
    }
}

/// Split of `[-r, r]` into end plates of width `rho` and the neck.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeckDecomposition {
    pub rho: usize,
    /// Cauchy proxy `d(k)`, `k = 1, 2, ..`, against the largest member.
    pub cauchy: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub half_length: f64,
    pub points: usize,
    /// `sup |p' - V_n(p)|`.
    pub sup_residual: f64,
    /// `sup |p(0) - p(sigma)|` over the trace; zero for a constant flow line.
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryReport {
    /// Sequence index `n` of `V_n`, starting at 1.
    pub index: usize,
    pub r: f64,
    pub eps: f64,
    pub s_samples: usize,
    pub t_modes: usize,
    pub solve: Option<SolveReport>,
    pub neck: Option<NeckDecomposition>,
    pub limits: Option<EndLimits>,
    /// `sup |u - q|` over the neck.
    pub neck_oscillation: Option<f64>,
    pub trace: Option<TraceSummary>,
    pub comparison: Option<FlowComparison>,
    /// Why the entry was excluded, if it was.
    pub excluded: Option<String>,
}

/// Strict monotonicity along the included entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monotonicity {
    pub values: Vec<f64>,
    pub strictly_decreasing: bool,
}

impl Monotonicity {
    fn of(values: Vec<f64>) -> Self {
        let strictly_decreasing = values.windows(2).all(|w| w[1] < w[0]);
        Monotonicity { values, strictly_decreasing }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub included: usize,
    pub neck_oscillation: Monotonicity,
    pub flow_error: Monotonicity,
    pub trace_residual: Monotonicity,
    /// `|x_+ - x_-|` per entry.
    pub endpoint_gap: Monotonicity,
    pub rho: Vec<usize>,
    pub rho_nondecreasing: bool,
    /// `eps rho <= sqrt(eps)` on every entry.
    pub eps_rho_bounded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerationReport {
    pub schedule: FamilySchedule,
    pub options: FamilyOptions,
    /// Factor applied once to the template data.
    pub amplitude_scale: f64,
    pub boundary_data: SpectralBoundaryData,
    pub entries: Vec<EntryReport>,
    pub summary: FamilySummary,
}

/// Heavy per-entry data kept out of the JSON report.
#[derive(Debug, Clone)]
pub struct MemberData {
    pub field: SpectralField,
    pub trace: Option<RescaledTrace>,
    pub comparison: Option<FlowComparison>,
}

#[derive(Debug, Clone)]
pub struct FamilyRun {
    pub report: DegenerationReport,
    /// Aligned with `report.entries`; `None` for excluded entries.
    pub members: Vec<Option<MemberData>>,
}

impl FamilyRun {
    /// Rows `(sigma, p, oracle, |p - oracle|)` of entry `i` for plotting.
    pub fn series(&self, i: usize) -> Option<Vec<(f64, Vec<f64>, Vec<f64>, f64)>> {
        let m = self.members.get(i)?.as_ref()?;
        let tr = m.trace.as_ref()?;
        Some(
            tr.sigma
                .iter()
                .enumerate()
                .map(|(j, &s)| {
                    let oracle = m.comparison.as_ref().map(|c| c.oracle[j].clone()).unwrap_or_else(|| tr.p[j].clone());
                    let diff = tr.p[j].iter().zip(&oracle).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                    (s, tr.p[j].clone(), oracle, diff)
                })
                .collect(),
        )
    }
}

fn amplitude_scale(
    schedule: &FamilySchedule,
    template: &SpectralBoundaryData,
    sequence: &VectorFieldSequence,
    opts: &FamilyOptions,
    dim: usize,
) -> Result<f64> {
    let (idx, e) = schedule
        .entries
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.r.total_cmp(&b.1.r))
        .expect("validated schedule is nonempty");
    let cyl = opts.grid.cylinder(e.r, dim)?;
    let (u, _) = solve_nonlinear(cyl, template, &sequence.member(idx + 1), e.eps, opts.tol)?;
    let sup = sup_norm(&u);
    Ok(if sup > AUTOSCALE_TARGET { AUTOSCALE_TARGET / sup } else { 1.0 })
}

/// Solves every member, selects `rho_n`, and compares necks with the flow
/// line of `sequence.limit`. Members are processed in parallel; the summary is
/// a sequential pass over the entries in schedule order.
pub fn run_family(
    schedule: &FamilySchedule,
    template: &SpectralBoundaryData,
    sequence: &VectorFieldSequence,
    opts: &FamilyOptions,
) -> Result<FamilyRun> {
    schedule.validate()?;
    let d = sequence.limit.real_dim();
    if d % 2 != 0 {
        return Err(CylError::Dimension { expected: d + 1, got: d });
    }
    let dim = d / 2;
    let scale = amplitude_scale(schedule, template, sequence, opts, dim)?;
    let bdata = template.scaled(scale);

    let solved: Vec<Result<(SpectralField, SolveReport)>> = schedule
        .entries
        .par_iter()
        .enumerate()
        .map(|(i, e)| {
            let cyl = opts.grid.cylinder(e.r, dim)?;
            make_instance(cyl, e.eps, &bdata, sequence, i + 1, opts.tol)
        })
        .collect();

    let mut entries: Vec<EntryReport> = schedule
        .entries
        .iter()
        .enumerate()
        .zip(&solved)
        .map(|((i, e), res)| {
            let cyl = opts.grid.cylinder(e.r, dim).ok();
            EntryReport {
                index: i + 1,
                r: e.r,
                eps: e.eps,
                s_samples: cyl.map_or(0, |c| c.s_samples()),
                t_modes: opts.grid.t_modes,
                solve: res.as_ref().ok().map(|(_, rep)| rep.clone()),
                neck: None,
                limits: None,
                neck_oscillation: None,
                trace: None,
                comparison: None,
                excluded: res.as_ref().err().map(|err| format!("generation failed: {err}")),
            }
        })
        .collect();

    // Cauchy proxy against the largest successfully solved member.
    let reference = schedule
        .entries
        .iter()
        .zip(&solved)
        .filter_map(|(e, res)| res.as_ref().ok().map(|(u, _)| (e.r, u)))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, u)| u);
    let Some(reference) = reference else {
        return Err(CylError::Inapplicable("no family member could be generated".into()));
    };

    let analysed: Vec<Option<Result<(NeckDecomposition, EndLimits, f64, Option<MemberData>)>>> = schedule
        .entries
        .par_iter()
        .zip(&solved)
        .enumerate()
        .map(|(i, (e, res))| {
            let (u, _) = res.as_ref().ok()?;
            Some(analyse_entry(i + 1, e.r, e.eps, u, reference, sequence, schedule.ell))
        })
        .collect();

    let mut members = Vec::with_capacity(entries.len());
    for ((entry, res), an) in entries.iter_mut().zip(solved).zip(analysed) {
        match (res, an) {
            (Ok((field, _)), Some(Ok((neck, limits, osc, data)))) => {
                entry.neck = Some(neck);
                entry.limits = Some(limits);
                entry.neck_oscillation = Some(osc);
                let data = data.unwrap_or(MemberData { field, trace: None, comparison: None });
                entry.trace = data.trace.as_ref().map(|t| summarize(t));
                entry.comparison = data.comparison.clone();
                members.push(Some(data));
            }
            (_, Some(Err(err))) => {
                entry.excluded = Some(format!("analysis failed: {err}"));
                members.push(None);
            }
            _ => members.push(None),
        }
    }

    let summary = summarize_family(&entries);
    let report = DegenerationReport {
        schedule: schedule.clone(),
        options: opts.clone(),
        amplitude_scale: scale,
        boundary_data: bdata,
        entries,
        summary,
    };
    Ok(FamilyRun { report, members })
}

fn summarize(t: &RescaledTrace) -> TraceSummary {
    let mid = (0..t.sigma.len()).min_by(|&a, &b| t.sigma[a].abs().total_cmp(&t.sigma[b].abs())).unwrap_or(0);
    let spread = t
        .p
        .iter()
        .map(|p| p.iter().zip(&t.p[mid]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    TraceSummary { half_length: t.half_length, points: t.sigma.len(), sup_residual: t.sup_residual, spread }
}

type Analysis = (NeckDecomposition, EndLimits, f64, Option<MemberData>);

fn analyse_entry(
    index: usize,
    r: f64,
    eps: f64,
    u: &SpectralField,
    reference: &SpectralField,
    sequence: &VectorFieldSequence,
    ell: f64,
) -> Result<Analysis> {
    let cap = if eps > 0.0 { (1.0 / eps.sqrt()).floor() } else { f64::INFINITY };
    let k_max = cap.min(r.ceil() - 1.0).min(reference.cylinder().half_length().ceil() - 1.0);
    if k_max < 1.0 {
        return Err(CylError::Inapplicable(format!("no admissible rho for eps = {eps}, r = {r}")));
    }
    let cauchy = cauchy_profile(u, reference, k_max as usize, u.cylinder().h());
    let rho = select_rho(eps, r, &cauchy)?;
    let limits = estimate_endpoints(u, r, rho as f64);
    let osc = neck_oscillation(u, r, rho as f64);
    let mut data = MemberData { field: u.clone(), trace: None, comparison: None };
    if eps > 0.0 {
        let trace = rescale_trace(u, &sequence.member(index), eps, r, rho as f64)?;
        if ell > 0.0 {
            data.comparison = Some(compare_flowline(&trace, &limits, &sequence.limit, ell)?);
        }
        data.trace = Some(trace);
    }
    Ok((NeckDecomposition { rho, cauchy }, limits, osc, Some(data)))
}

fn summarize_family(entries: &[EntryReport]) -> FamilySummary {
    let inc: Vec<&EntryReport> = entries.iter().filter(|e| e.excluded.is_none()).collect();
    let rho: Vec<usize> = inc.iter().filter_map(|e| e.neck.as_ref().map(|n| n.rho)).collect();
    let eps_rho_bounded = inc
        .iter()
        .filter_map(|e| e.neck.as_ref().map(|n| (e.eps, n.rho)))
        .all(|(eps, rho)| eps * rho as f64 <= eps.sqrt() * (1.0 + 1e-12));
    FamilySummary {
        included: inc.len(),
        neck_oscillation: Monotonicity::of(inc.iter().filter_map(|e| e.neck_oscillation).collect()),
        flow_error: Monotonicity::of(inc.iter().filter_map(|e| e.comparison.as_ref().map(|c| c.sup_error)).collect()),
        trace_residual: Monotonicity::of(inc.iter().filter_map(|e| e.trace.as_ref().map(|t| t.sup_residual)).collect()),
        endpoint_gap: Monotonicity::of(inc.iter().filter_map(|e| e.limits.as_ref().map(|l| l.gap())).collect()),
        rho_nondecreasing: rho.windows(2).all(|w| w[1] >= w[0]),
        rho,
        eps_rho_bounded,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vfield::VectorFieldModel;
    use num_complex::Complex64;

    fn template() -> SpectralBoundaryData {
        let c = |re: f64| Complex64::new(re, 0.0);
        SpectralBoundaryData::from_modes(&[(0, vec![c(0.3)]), (1, vec![c(0.1)]), (-1, vec![c(0.1)])]).unwrap()
    }

    fn grid() -> FamilyOptions {
        FamilyOptions::new(FamilyGrid { samples: SampleRule::Density { samples_per_unit: 40.0 }, t_modes: 8 })
    }

    #[test]
    fn zero_eps_single_entry_has_end_disks_only() {
        let sched = FamilySchedule { ell: 0.0, entries: vec![super::super::FamilyEntry { r: 6.0, eps: 0.0 }] };
        let seq = VectorFieldSequence::constant(VectorFieldModel::scalar(0.5, 2));
        let run = run_family(&sched, &template(), &seq, &grid()).unwrap();
        let e = &run.report.entries[0];
        assert!(e.excluded.is_none());
        assert_eq!(e.neck.as_ref().unwrap().rho, 5);
        assert!(e.trace.is_none() && e.comparison.is_none());
        let lim = e.limits.as_ref().unwrap();
        assert!(lim.gap() < 1e-15);
        assert_eq!(run.report.amplitude_scale, 1.0);
    }

    #[test]
    fn linear_family_converges() {
        let sched = FamilySchedule::from_radii(0.5, &[5.0, 10.0, 20.0]).unwrap();
        let seq = VectorFieldSequence::constant(VectorFieldModel::scalar(0.5, 2));
        let run = run_family(&sched, &template(), &seq, &grid()).unwrap();
        let s = &run.report.summary;
        assert_eq!(s.included, 3);
        assert_eq!(s.rho, vec![3, 4, 6]);
        assert!(s.eps_rho_bounded && s.rho_nondecreasing);
        assert!(s.neck_oscillation.strictly_decreasing, "{:?}", s.neck_oscillation);
        assert!(s.flow_error.strictly_decreasing, "{:?}", s.flow_error);
        for e in &run.report.entries {
            let c = e.comparison.as_ref().unwrap();
            assert!(c.within_budget, "{c:?}");
        }
        let rows = run.series(2).unwrap();
        assert_eq!(rows.len(), run.report.entries[2].trace.as_ref().unwrap().points);
    }

    #[test]
    fn oversized_data_is_rescaled_once() {
        let sched = FamilySchedule::from_radii(0.5, &[5.0, 10.0]).unwrap();
        let seq = VectorFieldSequence::constant(VectorFieldModel::scalar(0.5, 2));
        let big = template().scaled(4.0);
        let run = run_family(&sched, &big, &seq, &grid()).unwrap();
        assert!(run.report.amplitude_scale < 1.0);
        assert!(run.report.entries.iter().all(|e| e.excluded.is_none()));
        let sups: Vec<f64> = run.members.iter().flatten().map(|m| sup_norm(&m.field)).collect();
        // Only the largest member is pinned to the target; shorter ones grow less
        // along the neck but keep the same end data.
        assert!((sups[1] - AUTOSCALE_TARGET).abs() < 1e-9);
        assert!(sups[0] <= 1.0);
    }
}
