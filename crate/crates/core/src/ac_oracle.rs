//! Exact phasor power flow for radial feeders by backward/forward sweep.

use num_complex::Complex64;
use thiserror::Error;

use crate::delta_wye::{branch_voltages, delta_bus_currents};
use crate::load_models::{as_wye_equivalent, exact_power};
use crate::network::{mask_vec, masked_inverse, orient_toward_root, OrientedTree, TopologyError};
use crate::{CVec3, Configuration, LoadSpec, Network, Phase};

/// How loads respond to voltage in the exact model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AcLoadMode {
    /// Every load draws its nominal power.
    Constant,
    /// Exponential loads follow `p⁰(|V|/|V⁰|)^α` exactly.
    Exponential,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepConfig {
    /// Stop when no voltage moves by more than this between sweeps.
    pub tol: f64,
    pub max_iter: usize,
    pub load_mode: AcLoadMode,
    pub delta_as_wye: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            tol: 1e-10,
            max_iter: 200,
            load_mode: AcLoadMode::Exponential,
            delta_as_wye: false,
        }
    }
}

impl SweepConfig {
    pub fn ac_d() -> SweepConfig {
        SweepConfig {
            load_mode: AcLoadMode::Constant,
            ..SweepConfig::default()
        }
    }

    pub fn ac_d_e() -> SweepConfig {
        SweepConfig::default()
    }

    pub fn ac_w_e() -> SweepConfig {
        SweepConfig {
            delta_as_wye: true,
            ..SweepConfig::default()
        }
    }
}

/// A solved (or last-iterate) phasor state.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasorState {
    /// Bus voltages, zero on absent phases.
    pub v: Vec<CVec3>,
    /// Series current of every line, flowing away from the root.
    pub i_series: Vec<CVec3>,
    pub sd: Vec<CVec3>,
    pub sb: Vec<CVec3>,
    /// Squared applied voltage of every load.
    pub v_load: Vec<[f64; 3]>,
    pub s_slack: CVec3,
    pub iterations: usize,
    pub load_mode: AcLoadMode,
    pub delta_as_wye: bool,
}

impl PhasorState {
    /// Total real power supplied by the slack.
    pub fn objective(&self) -> f64 {
        self.s_slack.iter().map(|s| s.re).sum()
    }

    /// `|V|²` per phase of a bus.
    pub fn w_diag(&self, bus: usize) -> [f64; 3] {
        let v = &self.v[bus];
        [v[0].norm_sqr(), v[1].norm_sqr(), v[2].norm_sqr()]
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AcError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("sweep did not converge after {iterations} iterations (last step {last_step:e})")]
    NotConverged {
        iterations: usize,
        last_step: f64,
        last: Box<PhasorState>,
    },
    #[error("voltage on bus {bus} phase {phase} collapsed to zero")]
    ZeroVoltagePhase { bus: String, phase: Phase },
    #[error("series impedance of line {0} is singular")]
    SingularImpedance(String),
}

struct LoadDraw {
    sd: CVec3,
    sb: CVec3,
    v: [f64; 3],
    /// Current withdrawn from each bus phase.
    current: CVec3,
}

fn effective_load(load: &LoadSpec, delta_as_wye: bool) -> LoadSpec {
    if delta_as_wye {
        as_wye_equivalent(load)
    } else {
        load.clone()
    }
}

fn load_draw(
    load: &LoadSpec,
    v: &CVec3,
    mode: AcLoadMode,
    bus_id: &str,
) -> Result<LoadDraw, AcError> {
    let zero_voltage = |p: Phase| AcError::ZeroVoltagePhase {
        bus: bus_id.to_string(),
        phase: p,
    };
    let applied = match load.configuration {
        Configuration::Wye => *v,
        Configuration::Delta => branch_voltages(v),
    };
    let mut vmag2 = [0.0; 3];
    for p in load.phases.iter() {
        let k = p.index();
        vmag2[k] = applied[k].norm_sqr();
    }
    let sd = match mode {
        AcLoadMode::Constant => load.s0,
        AcLoadMode::Exponential => {
            exact_power(load, &vmag2).map_err(|_| zero_voltage(Phase::A))?
        }
    };
    let mut branch_current = CVec3::zeros();
    for p in load.phases.iter() {
        let k = p.index();
        if sd[k] == Complex64::new(0.0, 0.0) {
            continue;
        }
        if applied[k].norm() < 1e-6 {
            return Err(zero_voltage(p));
        }
        branch_current[k] = (sd[k] / applied[k]).conj();
    }
    let (current, sb) = match load.configuration {
        Configuration::Wye => (branch_current, sd),
        Configuration::Delta => {
            let ib = delta_bus_currents(&branch_current);
            (ib, CVec3::from_fn(|i, _| v[i] * ib[i].conj()))
        }
    };
    Ok(LoadDraw {
        sd,
        sb,
        v: vmag2,
        current,
    })
}

struct Evaluation {
    i_series: Vec<CVec3>,
    root_current: CVec3,
    draws: Vec<LoadDraw>,
}

/// Backward pass: every load and shunt current at voltages `v`, accumulated
/// toward the root.
fn backward(
    network: &Network,
    tree: &OrientedTree,
    loads: &[LoadSpec],
    v: &[CVec3],
    mode: AcLoadMode,
) -> Result<Evaluation, AcError> {
    let n = network.buses.len();
    let mut inject = vec![CVec3::zeros(); n];
    let mut draws = Vec::with_capacity(loads.len());
    for (l, load) in loads.iter().enumerate() {
        let b = tree.load_bus[l];
        let d = load_draw(load, &v[b], mode, &network.buses[b].id)?;
        inject[b] += d.current;
        draws.push(d);
    }
    for (s, shunt) in network.shunts.iter().enumerate() {
        let b = tree.shunt_bus[s];
        inject[b] += shunt.y * v[b];
    }
    let mut i_series = vec![CVec3::zeros(); network.lines.len()];
    for &bus in tree.order.iter().rev() {
        let mut total = inject[bus];
        for c in tree.child_lines(bus) {
            total += tree.ysh_parent(network, c) * v[bus] + i_series[c];
        }
        match tree.parent_line[bus] {
            Some(e) => {
                total += tree.ysh_child(network, e) * v[bus];
                i_series[e] = mask_vec(total, network.lines[e].phases);
            }
            None => inject[bus] = total,
        }
    }
    Ok(Evaluation {
        i_series,
        root_current: mask_vec(inject[tree.root], network.buses[tree.root].phases),
        draws,
    })
}

fn build_state(
    v: Vec<CVec3>,
    eval: Evaluation,
    root: usize,
    iterations: usize,
    config: &SweepConfig,
) -> PhasorState {
    let v0 = v[root];
    let s_slack = CVec3::from_fn(|i, _| v0[i] * eval.root_current[i].conj());
    let mut sd = Vec::with_capacity(eval.draws.len());
    let mut sb = Vec::with_capacity(eval.draws.len());
    let mut v_load = Vec::with_capacity(eval.draws.len());
    for d in eval.draws {
        sd.push(d.sd);
        sb.push(d.sb);
        v_load.push(d.v);
    }
    PhasorState {
        v,
        i_series: eval.i_series,
        sd,
        sb,
        v_load,
        s_slack,
        iterations,
        load_mode: config.load_mode,
        delta_as_wye: config.delta_as_wye,
    }
}

/// Solve the exact power flow from a flat start at the slack voltage.
pub fn sweep_solve(network: &Network, config: &SweepConfig) -> Result<PhasorState, AcError> {
    let tree = orient_toward_root(network)?;
    let vref = network.buses[tree.root].vref.ok_or(TopologyError::NoRoot)?;
    let loads: Vec<LoadSpec> = network
        .loads
        .iter()
        .map(|l| effective_load(l, config.delta_as_wye))
        .collect();
    let mut v: Vec<CVec3> = network
        .buses
        .iter()
        .map(|b| mask_vec(vref, b.phases))
        .collect();

    let mut last_step = f64::INFINITY;
    for iter in 1..=config.max_iter {
        let eval = backward(network, &tree, &loads, &v, config.load_mode)?;
        let mut next = v.clone();
        for &bus in tree.order.iter().skip(1) {
            let e = tree.parent_line[bus].expect("non-root bus has a parent line");
            let parent = tree.parent[bus].expect("non-root bus has a parent");
            let line = &network.lines[e];
            let drop = line.z_series * eval.i_series[e];
            next[bus] = mask_vec(next[parent] - drop, line.phases);
        }
        last_step = v
            .iter()
            .zip(&next)
            .flat_map(|(a, b)| (a - b).iter().map(|d| d.norm()).collect::<Vec<_>>())
            .fold(0.0, |m, d| if d.is_nan() { f64::NAN } else { m.max(d) });
        v = next;
        if last_step.is_nan() {
            break;
        }
        if last_step <= config.tol {
            let eval = backward(network, &tree, &loads, &v, config.load_mode)?;
            return Ok(build_state(v, eval, tree.root, iter, config));
        }
    }
    let last = match backward(network, &tree, &loads, &v, config.load_mode) {
        Ok(eval) => build_state(v, eval, tree.root, config.max_iter, config),
        Err(_) => {
            let n_lines = network.lines.len();
            let n_loads = loads.len();
            PhasorState {
                v,
                i_series: vec![CVec3::zeros(); n_lines],
                sd: vec![CVec3::zeros(); n_loads],
                sb: vec![CVec3::zeros(); n_loads],
                v_load: vec![[0.0; 3]; n_loads],
                s_slack: CVec3::zeros(),
                iterations: config.max_iter,
                load_mode: config.load_mode,
                delta_as_wye: config.delta_as_wye,
            }
        }
    };
    Err(AcError::NotConverged {
        iterations: config.max_iter,
        last_step,
        last: Box::new(last),
    })
}

/// Largest complex power imbalance over all bus phases, with line currents
/// recomputed from Ohm's law and loads re-evaluated at the state's voltages.
pub fn power_mismatch(network: &Network, state: &PhasorState) -> Result<f64, AcError> {
    let tree = orient_toward_root(network)?;
    let loads: Vec<LoadSpec> = network
        .loads
        .iter()
        .map(|l| effective_load(l, state.delta_as_wye))
        .collect();
    let v = &state.v;
    let mut series = vec![CVec3::zeros(); network.lines.len()];
    for ol in &tree.lines {
        let line = &network.lines[ol.line];
        let zinv = masked_inverse(&line.z_series, line.phases)
            .ok_or_else(|| AcError::SingularImpedance(line.id.clone()))?;
        series[ol.line] = zinv * (v[ol.from] - v[ol.to]);
    }
    let mut worst = 0.0f64;
    for &bus in &tree.order {
        let vb = v[bus];
        // current leaving the bus through every attached element
        let mut out = CVec3::zeros();
        for c in tree.child_lines(bus) {
            out += series[c] + tree.ysh_parent(network, c) * vb;
        }
        if let Some(e) = tree.parent_line[bus] {
            out += tree.ysh_child(network, e) * vb - series[e];
        }
        for (s, shunt) in network.shunts.iter().enumerate() {
            if tree.shunt_bus[s] == bus {
                out += shunt.y * vb;
            }
        }
        for (l, load) in loads.iter().enumerate() {
            if tree.load_bus[l] == bus {
                let mode = state.load_mode;
                out += load_draw(load, &vb, mode, &network.buses[bus].id)?.current;
            }
        }
        for p in network.buses[bus].phases.iter() {
            let k = p.index();
            let mut imbalance = vb[k] * out[k].conj();
            if bus == tree.root {
                imbalance -= state.s_slack[k];
            }
            worst = worst.max(imbalance.norm());
        }
    }
    Ok(worst)
}
