//! Error metrics, voltage unbalance, and the LP-versus-AC studies.

use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ac_oracle::{sweep_solve, AcError, PhasorState, SweepConfig};
use crate::lp_solver::{solve_network, LinearSolution, LpError, ModelConfig};
use crate::{gamma, CVec3, Network};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error("vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("every reference component is zero")]
    EmptyAfterExclusion,
    #[error("positive-sequence voltage is zero")]
    ZeroPositiveSequence,
    #[error("no angle perturbation reaches VUF {target}%")]
    NoFeasibleAngle { target: f64 },
    #[error("target VUF {0}% outside [0, 15]")]
    InvalidTarget(f64),
}

/// Mean relative difference in percent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaMetric {
    pub value: f64,
    pub included: usize,
    /// Components skipped because the reference is (near) zero.
    pub excluded: usize,
}

/// `100 · mean |x_test − x_ref| / |x_ref|`, skipping components with `|x_ref| < 1e−9`.
pub fn delta_metric(x_test: &[f64], x_ref: &[f64]) -> Result<DeltaMetric, ExperimentError> {
    if x_test.len() != x_ref.len() {
        return Err(ExperimentError::LengthMismatch(x_test.len(), x_ref.len()));
    }
    let mut sum = 0.0;
    let mut included = 0;
    for (t, r) in x_test.iter().zip(x_ref) {
        if r.abs() < 1e-9 {
            continue;
        }
        sum += (t - r).abs() / r.abs();
        included += 1;
    }
    if included == 0 {
        return Err(ExperimentError::EmptyAfterExclusion);
    }
    Ok(DeltaMetric {
        value: 100.0 * sum / included as f64,
        included,
        excluded: x_ref.len() - included,
    })
}

/// Voltage unbalance factor `100 · |V_n| / |V_p|` in percent.
pub fn vuf(v: &CVec3) -> Result<f64, ExperimentError> {
    let g = gamma();
    let g2 = g * g;
    let vp = (v[0] + g2 * v[1] + g * v[2]) / 3.0;
    let vn = (v[0] + g * v[1] + g2 * v[2]) / 3.0;
    if vp.norm() <= 1e-12 {
        return Err(ExperimentError::ZeroPositiveSequence);
    }
    Ok(100.0 * vn.norm() / vp.norm())
}

const THETA_C_RANGE: f64 = 0.35;
const THETA_B_RANGE: f64 = 0.6;
const THETA_B_GRID: usize = 240;
const MAX_DRAWS: usize = 50;

fn rotate(vref: &CVec3, theta_b: f64, theta_c: f64) -> CVec3 {
    CVec3::new(
        vref[0],
        vref[1] * Complex64::from_polar(1.0, theta_b),
        vref[2] * Complex64::from_polar(1.0, theta_c),
    )
}

/// Rotate phases b and c of `vref` so that its VUF equals `target_vuf`.
/// Equivalent to [`perturb_vref_to_vuf_stream`] on stream 0.
pub fn perturb_vref_to_vuf(
    vref: &CVec3,
    target_vuf: f64,
    seed: u64,
) -> Result<CVec3, ExperimentError> {
    perturb_vref_to_vuf_stream(vref, target_vuf, seed, 0)
}

/// θ_c is drawn uniformly from [−0.35, 0.35] rad; θ_b is then found by
/// bisection on [−0.6, 0.6] rad, taking the root closest to zero. Magnitudes
/// are unchanged. Each `stream` gives an independent draw for the same seed.
pub fn perturb_vref_to_vuf_stream(
    vref: &CVec3,
    target_vuf: f64,
    seed: u64,
    stream: u64,
) -> Result<CVec3, ExperimentError> {
    if !(0.0..=15.0).contains(&target_vuf) {
        return Err(ExperimentError::InvalidTarget(target_vuf));
    }
    if target_vuf == 0.0 {
        return Ok(*vref);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    for _ in 0..MAX_DRAWS {
        let theta_c = rng.random_range(-THETA_C_RANGE..=THETA_C_RANGE);
        let f = |tb: f64| vuf(&rotate(vref, tb, theta_c)).map(|u| u - target_vuf);
        let mut best: Option<f64> = None;
        let step = 2.0 * THETA_B_RANGE / THETA_B_GRID as f64;
        let mut lo = -THETA_B_RANGE;
        let mut f_lo = f(lo)?;
        for k in 1..=THETA_B_GRID {
            let hi = -THETA_B_RANGE + k as f64 * step;
            let f_hi = f(hi)?;
            if f_lo == 0.0 || f_lo.signum() != f_hi.signum() {
                let root = bisect(&f, lo, hi, f_lo)?;
                if best.is_none_or(|b| root.abs() < b.abs()) {
                    best = Some(root);
                }
            }
            lo = hi;
            f_lo = f_hi;
        }
        if let Some(tb) = best {
            let v = rotate(vref, tb, theta_c);
            if (vuf(&v)? - target_vuf).abs() <= 1e-6 {
                return Ok(v);
            }
        }
    }
    Err(ExperimentError::NoFeasibleAngle { target: target_vuf })
}

fn bisect(
    f: &impl Fn(f64) -> Result<f64, ExperimentError>,
    mut lo: f64,
    mut hi: f64,
    mut f_lo: f64,
) -> Result<f64, ExperimentError> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid.abs() <= 1e-9 || hi - lo < 1e-15 {
            return Ok(mid);
        }
        if f_lo.signum() == f_mid.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

// ---------------------------------------------------------------- models

/// The five model variants compared in the studies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Linear model, linearized exponential loads.
    LpDE,
    /// Linear model, constant-power loads.
    LpD,
    /// Exact power flow, exponential loads.
    AcDE,
    /// Exact power flow, constant-power loads.
    AcD,
    /// Exact power flow with delta loads wrongly treated as wye.
    AcWE,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::LpDE,
        ModelKind::LpD,
        ModelKind::AcDE,
        ModelKind::AcD,
        ModelKind::AcWE,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::LpDE => "lp-d-e",
            ModelKind::LpD => "lp-d",
            ModelKind::AcDE => "ac-d-e",
            ModelKind::AcD => "ac-d",
            ModelKind::AcWE => "ac-w-e",
        }
    }

    pub fn parse(s: &str) -> Option<ModelKind> {
        ModelKind::ALL.into_iter().find(|m| m.name() == s)
    }

    /// Exact model the variant is measured against.
    pub fn reference(self) -> ModelKind {
        match self {
            ModelKind::LpD | ModelKind::AcD => ModelKind::AcD,
            _ => ModelKind::AcDE,
        }
    }

    pub fn is_linear(self) -> bool {
        matches!(self, ModelKind::LpDE | ModelKind::LpD)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveFailure {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Ac(#[from] AcError),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Solved {
    Linear(LinearSolution),
    Phasor(PhasorState),
}

impl Solved {
    pub fn objective(&self) -> f64 {
        match self {
            Solved::Linear(s) => s.objective,
            Solved::Phasor(s) => s.objective(),
        }
    }

    pub fn iterations(&self) -> Option<usize> {
        match self {
            Solved::Linear(_) => None,
            Solved::Phasor(s) => Some(s.iterations),
        }
    }

    fn w_diag(&self, bus: usize) -> [f64; 3] {
        match self {
            Solved::Linear(s) => s.w_diag(bus),
            Solved::Phasor(s) => s.w_diag(bus),
        }
    }

    fn sb(&self) -> &[CVec3] {
        match self {
            Solved::Linear(s) => &s.sb,
            Solved::Phasor(s) => &s.sb,
        }
    }

    /// `diag(W)` (or `|V|²`) over every bus phase, in network order.
    pub fn w_vector(&self, network: &Network) -> Vec<f64> {
        let mut out = Vec::new();
        for (b, bus) in network.buses.iter().enumerate() {
            let d = self.w_diag(b);
            out.extend(bus.phases.iter().map(|p| d[p.index()]));
        }
        out
    }

    /// Load withdrawals `S^b` over every load and the bus phases it touches.
    pub fn sb_vector(&self, network: &Network) -> Vec<Complex64> {
        let sb = self.sb();
        let mut out = Vec::new();
        for (l, load) in network.loads.iter().enumerate() {
            out.extend(load.bus_phases().iter().map(|p| sb[l][p.index()]));
        }
        out
    }
}

pub fn solve_model(network: &Network, model: ModelKind) -> Result<Solved, SolveFailure> {
    Ok(match model {
        ModelKind::LpDE => Solved::Linear(solve_network(network, &ModelConfig::lp_d_e())?),
        ModelKind::LpD => Solved::Linear(solve_network(network, &ModelConfig::lp_d())?),
        ModelKind::AcDE => Solved::Phasor(sweep_solve(network, &SweepConfig::ac_d_e())?),
        ModelKind::AcD => Solved::Phasor(sweep_solve(network, &SweepConfig::ac_d())?),
        ModelKind::AcWE => Solved::Phasor(sweep_solve(network, &SweepConfig::ac_w_e())?),
    })
}

/// Δ metrics of `test` against `reference`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Deltas {
    pub w: f64,
    pub pb: f64,
    pub qb: f64,
    pub obj: f64,
}

fn metric_or_zero(test: &[f64], reference: &[f64]) -> f64 {
    match delta_metric(test, reference) {
        Ok(m) => m.value,
        // every reference component zero: both sides agree on "nothing"
        Err(_) => 0.0,
    }
}

pub fn deltas(network: &Network, test: &Solved, reference: &Solved) -> Deltas {
    let sb_t = test.sb_vector(network);
    let sb_r = reference.sb_vector(network);
    let re = |v: &[Complex64]| v.iter().map(|z| z.re).collect::<Vec<_>>();
    let im = |v: &[Complex64]| v.iter().map(|z| z.im).collect::<Vec<_>>();
    Deltas {
        w: metric_or_zero(&test.w_vector(network), &reference.w_vector(network)),
        pb: metric_or_zero(&re(&sb_t), &re(&sb_r)),
        qb: metric_or_zero(&im(&sb_t), &im(&sb_r)),
        obj: metric_or_zero(&[test.objective()], &[reference.objective()]),
    }
}

/// Real power lost in line series impedances.
pub fn series_losses(network: &Network, state: &PhasorState) -> f64 {
    network
        .lines
        .iter()
        .zip(&state.i_series)
        .map(|(line, i)| {
            let zi = line.z_series * i;
            (0..3).map(|k| (zi[k] * i[k].conj()).re).sum::<f64>()
        })
        .sum()
}

// ---------------------------------------------------------------- studies

#[derive(Clone, Debug, PartialEq)]
pub struct NominalRecord {
    pub feeder: String,
    pub model: ModelKind,
    pub objective: Option<f64>,
    pub deltas: Option<Deltas>,
    pub iterations: Option<usize>,
    pub ms: f64,
    pub error: Option<String>,
}

/// Solve every model and measure it against its exact reference.
pub fn run_nominal_comparison(network: &Network, models: &[ModelKind]) -> Vec<NominalRecord> {
    let mut references: Vec<(ModelKind, Result<Solved, SolveFailure>)> = Vec::new();
    let mut records = Vec::new();
    for &model in models {
        let start = Instant::now();
        let result = solve_model(network, model);
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let reference_kind = model.reference();
        if !references.iter().any(|(k, _)| *k == reference_kind) {
            let r = if reference_kind == model {
                result.clone()
            } else {
                solve_model(network, reference_kind)
            };
            references.push((reference_kind, r));
        }
        let reference = &references
            .iter()
            .find(|(k, _)| *k == reference_kind)
            .expect("reference solved above")
            .1;
        let record = match (&result, reference) {
            (Ok(sol), Ok(r)) => NominalRecord {
                feeder: network.name.clone(),
                model,
                objective: Some(sol.objective()),
                deltas: Some(deltas(network, sol, r)),
                iterations: sol.iterations(),
                ms,
                error: None,
            },
            (Ok(sol), Err(e)) => NominalRecord {
                feeder: network.name.clone(),
                model,
                objective: Some(sol.objective()),
                deltas: None,
                iterations: sol.iterations(),
                ms,
                error: Some(format!("reference {}: {e}", reference_kind.name())),
            },
            (Err(e), _) => NominalRecord {
                feeder: network.name.clone(),
                model,
                objective: None,
                deltas: None,
                iterations: match e {
                    SolveFailure::Ac(AcError::NotConverged { iterations, .. }) => Some(*iterations),
                    _ => None,
                },
                ms,
                error: Some(e.to_string()),
            },
        };
        records.push(record);
    }
    records
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentRecord {
    pub alpha: f64,
    pub obj_lp: Option<f64>,
    pub obj_ac: Option<f64>,
    /// Series losses of the exact solution.
    pub ac_losses: Option<f64>,
}

/// LP-D-E and AC-D-E objectives with every load at α = β = value.
pub fn run_exponent_sweep(network: &Network, alphas: &[f64]) -> Vec<ExponentRecord> {
    map_ordered(alphas, |_, &alpha| {
        let net = network.with_uniform_exponent(alpha);
        let lp = solve_network(&net, &ModelConfig::lp_d_e()).ok();
        let ac = sweep_solve(&net, &SweepConfig::ac_d_e()).ok();
        ExponentRecord {
            alpha,
            obj_lp: lp.map(|s| s.objective),
            obj_ac: ac.as_ref().map(|s| s.objective()),
            ac_losses: ac.as_ref().map(|s| series_losses(&net, s)),
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct VufRecord {
    pub target: f64,
    pub sample: usize,
    pub dw: Option<f64>,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VufSummary {
    pub target: f64,
    pub min: f64,
    pub p10: f64,
    pub median: f64,
    pub p90: f64,
    pub max: f64,
    pub count: usize,
    pub excluded: usize,
}

fn lp_ac_dw(net: &Network) -> Result<f64, SolveFailure> {
    let lp = solve_model(net, ModelKind::LpDE)?;
    let ac = solve_model(net, ModelKind::AcDE)?;
    Ok(deltas(net, &lp, &ac).w)
}

/// Δw between LP-D-E and AC-D-E with the slack voltage unbalanced to each
/// target VUF, `samples` random draws per target.
pub fn run_vuf_sweep(network: &Network, targets: &[f64], samples: usize, seed: u64) -> Vec<VufRecord> {
    let vref = network.slack_vref().unwrap_or_else(CVec3::zeros);
    let scenarios: Vec<(f64, usize)> = targets
        .iter()
        .flat_map(|&t| (0..samples).map(move |s| (t, s)))
        .collect();
    map_ordered(&scenarios, |index, &(target, sample)| {
        let dw = perturb_vref_to_vuf_stream(&vref, target, seed, index as u64)
            .ok()
            .and_then(|v| lp_ac_dw(&network.with_vref(v)).ok());
        VufRecord {
            target,
            sample,
            dw,
            converged: dw.is_some(),
        }
    })
}

/// Linear-interpolation percentile of sorted data, `q` in [0, 1].
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Per-target statistics over converged samples.
pub fn summarize_vuf(records: &[VufRecord]) -> Vec<VufSummary> {
    let mut targets: Vec<f64> = Vec::new();
    for r in records {
        if !targets.contains(&r.target) {
            targets.push(r.target);
        }
    }
    targets
        .into_iter()
        .filter_map(|target| {
            let rows: Vec<&VufRecord> = records.iter().filter(|r| r.target == target).collect();
            let mut values: Vec<f64> = rows.iter().filter_map(|r| r.dw).collect();
            if values.is_empty() {
                return None;
            }
            values.sort_by(f64::total_cmp);
            Some(VufSummary {
                target,
                min: values[0],
                p10: percentile(&values, 0.1),
                median: percentile(&values, 0.5),
                p90: percentile(&values, 0.9),
                max: values[values.len() - 1],
                count: values.len(),
                excluded: rows.len() - values.len(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct VrefRecord {
    pub m: f64,
    pub dw: Option<f64>,
    /// The linear model solved with positive squared voltages everywhere.
    pub converged_lp: bool,
    pub converged_ac: bool,
}

/// Δw between LP-D-E and AC-D-E with `|vref|` scaled by each factor.
pub fn run_vref_sweep(network: &Network, factors: &[f64]) -> Vec<VrefRecord> {
    let vref = network.slack_vref().unwrap_or_else(CVec3::zeros);
    map_ordered(factors, |_, &m| {
        let net = network.with_vref(vref * Complex64::new(m, 0.0));
        let lp = solve_model(&net, ModelKind::LpDE).ok().filter(|s| {
            s.w_vector(&net).iter().all(|&w| w > 0.0)
        });
        let ac = solve_model(&net, ModelKind::AcDE).ok();
        let dw = match (&lp, &ac) {
            (Some(l), Some(a)) => Some(deltas(&net, l, a).w),
            _ => None,
        };
        VrefRecord {
            m,
            dw,
            converged_lp: lp.is_some(),
            converged_ac: ac.is_some(),
        }
    })
}

/// `from, from + step, …, to` with each point rounded to 1e−9.
pub fn grid(from: f64, to: f64, step: f64) -> Vec<f64> {
    if step == 0.0 || (to - from) * step < 0.0 {
        return vec![from];
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    (0..=n)
        .map(|k| ((from + k as f64 * step) * 1e9).round() / 1e9)
        .collect()
}

#[cfg(feature = "parallel")]
fn map_ordered<T: Sync, R: Send>(items: &[T], f: impl Fn(usize, &T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().enumerate().map(|(i, x)| f(i, x)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_ordered<T, R>(items: &[T], f: impl Fn(usize, &T) -> R) -> Vec<R> {
    items.iter().enumerate().map(|(i, x)| f(i, x)).collect()
}

// ---------------------------------------------------------------- CSV

fn num(x: f64) -> String {
    let s = format!("{x:.9}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Grid values print with up to 9 decimals and no trailing zeros.
fn param(x: f64) -> String {
    let s = format!("{x:.9}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

/// `ms` is left empty unless `timing` is set, so that repeated runs match.
pub fn nominal_csv(records: &[NominalRecord], timing: bool) -> String {
    let mut out = String::from("feeder,model,objective,dw_pct,dpb_pct,dqb_pct,iters,ms\n");
    for r in records {
        let d = r.deltas;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.feeder,
            r.model.name(),
            opt(r.objective),
            opt(d.map(|d| d.w)),
            opt(d.map(|d| d.pb)),
            opt(d.map(|d| d.qb)),
            r.iterations.map(|i| i.to_string()).unwrap_or_default(),
            if timing { format!("{:.3}", r.ms) } else { String::new() },
        );
    }
    out
}

pub fn exponent_csv(records: &[ExponentRecord]) -> String {
    let mut out = String::from("alpha,obj_lp,obj_ac\n");
    for r in records {
        let _ = writeln!(out, "{},{},{}", param(r.alpha), opt(r.obj_lp), opt(r.obj_ac));
    }
    out
}

pub fn vuf_csv(records: &[VufRecord]) -> String {
    let mut out = String::from("target_vuf,sample,dw_pct,converged\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            param(r.target),
            r.sample,
            opt(r.dw),
            r.converged
        );
    }
    out
}

pub fn vuf_summary_csv(summary: &[VufSummary]) -> String {
    let mut out = String::from("target_vuf,min,p10,median,p90,max,count,excluded\n");
    for s in summary {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            param(s.target),
            num(s.min),
            num(s.p10),
            num(s.median),
            num(s.p90),
            num(s.max),
            s.count,
            s.excluded
        );
    }
    out
}

pub fn vref_csv(records: &[VrefRecord]) -> String {
    let mut out = String::from("m,dw_pct,converged_lp,converged_ac\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            param(r.m),
            opt(r.dw),
            r.converged_lp,
            r.converged_ac
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balanced_vref;
    use proptest::prelude::*;

    #[test]
    fn delta_metric_examples() {
        assert_eq!(delta_metric(&[1.0, 2.0], &[1.0, 2.0]).unwrap().value, 0.0);
        let m = delta_metric(&[1.0, 2.0], &[1.1, 2.0]).unwrap();
        assert!((m.value - 100.0 * (0.1 / 1.1) / 2.0).abs() < 1e-12);
        let m = delta_metric(&[1.0, 0.3], &[1.0, 0.0]).unwrap();
        assert_eq!((m.included, m.excluded), (1, 1));
        assert_eq!(
            delta_metric(&[1.0], &[0.0]),
            Err(ExperimentError::EmptyAfterExclusion)
        );
    }

    #[test]
    fn vuf_examples() {
        let g = gamma();
        assert!(vuf(&balanced_vref(1.0)).unwrap() < 1e-12);
        let v = CVec3::new(Complex64::new(1.0, 0.0), g, g * g * 1.03);
        assert!((vuf(&v).unwrap() - 100.0 * 0.01 / 1.01).abs() < 1e-9);
        let ones = CVec3::from_element(Complex64::new(1.0, 0.0));
        assert_eq!(vuf(&ones), Err(ExperimentError::ZeroPositiveSequence));
    }

    #[test]
    fn perturbation_hits_target() {
        let vref = balanced_vref(1.0);
        assert_eq!(perturb_vref_to_vuf(&vref, 0.0, 7).unwrap(), vref);
        for target in [0.5, 1.0, 2.0, 5.0, 10.0] {
            let v = perturb_vref_to_vuf(&vref, target, 42).unwrap();
            assert!((vuf(&v).unwrap() - target).abs() <= 1e-6);
            for k in 0..3 {
                assert!((v[k].norm() - 1.0).abs() < 1e-14);
            }
            assert_eq!(v, perturb_vref_to_vuf(&vref, target, 42).unwrap());
        }
        assert!(perturb_vref_to_vuf(&vref, 20.0, 1).is_err());
    }

    #[test]
    fn grid_points() {
        assert_eq!(grid(1.0, 0.9, -0.025), vec![1.0, 0.975, 0.95, 0.925, 0.9]);
        assert_eq!(grid(0.0, 3.0, 0.5).len(), 7);
        assert_eq!(grid(0.0, 0.3, 0.1)[3], 0.3);
    }

    #[test]
    fn percentile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(percentile(&v, 0.5), 3.0);
        assert!((percentile(&v, 0.1) - 1.4).abs() < 1e-12);
    }

    #[test]
    fn model_names_round_trip() {
        for m in ModelKind::ALL {
            assert_eq!(ModelKind::parse(m.name()), Some(m));
        }
        assert_eq!(ModelKind::LpD.reference(), ModelKind::AcD);
        assert_eq!(ModelKind::AcWE.reference(), ModelKind::AcDE);
    }

    proptest! {
        #[test]
        fn vuf_invariant_to_rotation_and_scale(
            mag in 0.1f64..10.0, ang in -3.0f64..3.0,
            tb in -0.3f64..0.3, tc in -0.3f64..0.3, mb in 0.9f64..1.1,
        ) {
            let v = rotate(&balanced_vref(1.0), tb, tc);
            let v = CVec3::new(v[0], v[1] * mb, v[2]);
            let c = Complex64::from_polar(mag, ang);
            let scaled = v * c;
            prop_assert!((vuf(&scaled).unwrap() - vuf(&v).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn delta_metric_of_identical_is_zero(x in proptest::collection::vec(-5.0f64..5.0, 1..20)) {
            let shifted: Vec<f64> = x.iter().map(|v| v + 10.0).collect();
            prop_assert_eq!(delta_metric(&shifted, &shifted).unwrap().value, 0.0);
        }
    }
}
