//! Feeder files (JSON) in, solution tables (CSV) out.
//!
//! A feeder file is a JSON object:
//!
//! ```text
//! {
//!   "name": "...",                        optional
//!   "sbase_kva": 1000,
//!   "vbase_kv": 2.4 | {"bus id": kV, ...},
//!   "buses":  [{"id", "phases": "abc", "vmin_pu"?, "vmax_pu"?}],
//!   "lines":  [{"id", "from_bus", "to_bus", "phases",
//!               "z_ohm" | "z_pu", "ysh_from_s" | "ysh_from_pu"?, "ysh_to_s" | "ysh_to_pu"?}],
//!   "loads":  [{"id", "bus", "configuration": "wye" | "delta", "phases",
//!               "model": "constant_power" | "exponential",
//!               "s_kva" | "s_pu", "v0_pu"?, "alpha"?, "beta"?}],
//!   "shunts": [{"id", "bus", "y_s" | "y_pu"}],
//!   "source": {"bus", "vref_pu": [[re, im], [re, im], [re, im]]}
//! }
//! ```
//!
//! Complex numbers are `[re, im]`, 3×3 matrices are row-major nested arrays
//! and per-phase vectors are 3-element arrays. For delta loads the phases
//! name the branches: `a` is branch ab, `b` is bc and `c` is ca. Scalar
//! `vmin_pu`, `vmax_pu`, `v0_pu`, `alpha` and `beta` apply to every phase.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::ac_oracle::PhasorState;
use crate::lp_solver::LinearSolution;
use crate::network::{validate, ValidationReport};
use crate::{
    Bus, CMat3, CVec3, Configuration, Line, LoadModel, LoadSpec, Network, Phase, PhaseSet,
    ShuntDevice,
};

#[derive(Debug, Error)]
pub enum FeederError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("{element}: {message}")]
    Unit { element: String, message: String },
    #[error("invalid network:\n{0}")]
    Validation(ValidationReport),
}

fn parse_error(path: &str, message: impl Into<String>) -> FeederError {
    FeederError::Parse {
        path: path.to_string(),
        message: message.into(),
    }
}

/// `z_pu = z_ohm · sbase / (1000 · vbase²)` with sbase in kVA, vbase in kV.
pub fn ohm_to_pu(z: Complex64, sbase_kva: f64, vbase_kv: f64) -> Complex64 {
    z * sbase_kva / (1000.0 * vbase_kv * vbase_kv)
}

pub fn pu_to_ohm(z: Complex64, sbase_kva: f64, vbase_kv: f64) -> Complex64 {
    z * (1000.0 * vbase_kv * vbase_kv) / sbase_kva
}

/// `y_pu = y_s · 1000 · vbase² / sbase`.
pub fn siemens_to_pu(y: Complex64, sbase_kva: f64, vbase_kv: f64) -> Complex64 {
    y * (1000.0 * vbase_kv * vbase_kv) / sbase_kva
}

pub fn pu_to_siemens(y: Complex64, sbase_kva: f64, vbase_kv: f64) -> Complex64 {
    y * sbase_kva / (1000.0 * vbase_kv * vbase_kv)
}

// ---------------------------------------------------------------- reading

struct Node<'a> {
    value: &'a Value,
    path: String,
}

impl<'a> Node<'a> {
    fn root(value: &'a Value) -> Node<'a> {
        Node {
            value,
            path: "$".to_string(),
        }
    }

    fn err(&self, message: impl Into<String>) -> FeederError {
        parse_error(&self.path, message)
    }

    fn object(&self) -> Result<&'a Map<String, Value>, FeederError> {
        self.value.as_object().ok_or_else(|| self.err("expected an object"))
    }

    fn get(&self, key: &str) -> Result<Node<'a>, FeederError> {
        self.opt(key)?
            .ok_or_else(|| self.err(format!("missing key `{key}`")))
    }

    fn opt(&self, key: &str) -> Result<Option<Node<'a>>, FeederError> {
        Ok(self.object()?.get(key).map(|value| Node {
            value,
            path: format!("{}.{key}", self.path),
        }))
    }

    fn items(&self) -> Result<Vec<Node<'a>>, FeederError> {
        let arr = self.value.as_array().ok_or_else(|| self.err("expected an array"))?;
        Ok(arr
            .iter()
            .enumerate()
            .map(|(i, value)| Node {
                value,
                path: format!("{}[{i}]", self.path),
            })
            .collect())
    }

    fn number(&self) -> Result<f64, FeederError> {
        self.value.as_f64().ok_or_else(|| self.err("expected a number"))
    }

    fn string(&self) -> Result<&'a str, FeederError> {
        self.value.as_str().ok_or_else(|| self.err("expected a string"))
    }

    fn complex(&self) -> Result<Complex64, FeederError> {
        let items = self.items()?;
        if items.len() != 2 {
            return Err(self.err("expected [re, im]"));
        }
        Ok(Complex64::new(items[0].number()?, items[1].number()?))
    }

    fn cvec3(&self) -> Result<CVec3, FeederError> {
        let items = self.items()?;
        if items.len() != 3 {
            return Err(self.err("expected 3 complex entries"));
        }
        Ok(CVec3::new(
            items[0].complex()?,
            items[1].complex()?,
            items[2].complex()?,
        ))
    }

    fn cmat3(&self) -> Result<CMat3, FeederError> {
        let rows = self.items()?;
        if rows.len() != 3 {
            return Err(self.err("expected 3 rows"));
        }
        let mut m = CMat3::zeros();
        for (r, row) in rows.iter().enumerate() {
            let v = row.cvec3()?;
            for c in 0..3 {
                m[(r, c)] = v[c];
            }
        }
        Ok(m)
    }

    /// A number applied to all phases, or a 3-element array.
    fn per_phase(&self) -> Result<[f64; 3], FeederError> {
        if let Some(x) = self.value.as_f64() {
            return Ok([x; 3]);
        }
        let items = self.items()?;
        if items.len() != 3 {
            return Err(self.err("expected a number or 3 numbers"));
        }
        Ok([items[0].number()?, items[1].number()?, items[2].number()?])
    }

    fn phases(&self) -> Result<PhaseSet, FeederError> {
        let s = self.string()?;
        let mut set = PhaseSet::EMPTY;
        for ch in s.chars() {
            let p = Phase::from_label(ch)
                .ok_or_else(|| self.err(format!("unknown phase `{ch}`")))?;
            set.insert(p);
        }
        if set.is_empty() {
            return Err(self.err("empty phase set"));
        }
        Ok(set)
    }
}

enum Unit {
    Physical,
    PerUnit,
}

/// Pick the per-unit or physical variant of `stem` and remember which was
/// used, rejecting elements that mix the two.
struct UnitTracker<'n, 'a> {
    node: &'n Node<'a>,
    element: String,
    seen: Option<(Unit, String)>,
}

impl<'n, 'a> UnitTracker<'n, 'a> {
    fn new(node: &'n Node<'a>, element: String) -> Self {
        UnitTracker {
            node,
            element,
            seen: None,
        }
    }

    fn pick(&mut self, stem: &str, physical: &str) -> Result<Option<(Node<'a>, Unit)>, FeederError> {
        let phys_key = format!("{stem}_{physical}");
        let pu_key = format!("{stem}_pu");
        let phys = self.node.opt(&phys_key)?;
        let pu = self.node.opt(&pu_key)?;
        let (node, unit, key) = match (phys, pu) {
            (Some(_), Some(_)) => {
                return Err(FeederError::Unit {
                    element: self.element.clone(),
                    message: format!("both `{phys_key}` and `{pu_key}` given"),
                })
            }
            (Some(n), None) => (n, Unit::Physical, phys_key),
            (None, Some(n)) => (n, Unit::PerUnit, pu_key),
            (None, None) => return Ok(None),
        };
        if let Some((prev, prev_key)) = &self.seen {
            let same = matches!(
                (prev, &unit),
                (Unit::Physical, Unit::Physical) | (Unit::PerUnit, Unit::PerUnit)
            );
            if !same {
                return Err(FeederError::Unit {
                    element: self.element.clone(),
                    message: format!("mixed units: `{prev_key}` and `{key}`"),
                });
            }
        } else {
            self.seen = Some((
                match unit {
                    Unit::Physical => Unit::Physical,
                    Unit::PerUnit => Unit::PerUnit,
                },
                key,
            ));
        }
        Ok(Some((node, unit)))
    }
}

struct Bases {
    sbase_kva: f64,
    uniform: Option<f64>,
    per_bus: HashMap<String, f64>,
}

impl Bases {
    fn vbase(&self, bus: &str, at: &Node<'_>) -> Result<f64, FeederError> {
        self.uniform
            .or_else(|| self.per_bus.get(bus).copied())
            .ok_or_else(|| at.err(format!("no vbase_kv for bus `{bus}`")))
    }
}

fn impedance(
    tracker: &mut UnitTracker<'_, '_>,
    stem: &str,
    bases: &Bases,
    vbase_bus: &str,
    admittance: bool,
) -> Result<Option<CMat3>, FeederError> {
    let Some((node, unit)) = tracker.pick(stem, if admittance { "s" } else { "ohm" })? else {
        return Ok(None);
    };
    let m = node.cmat3()?;
    Ok(Some(match unit {
        Unit::PerUnit => m,
        Unit::Physical => {
            let vb = bases.vbase(vbase_bus, &node)?;
            m.map(|z| {
                if admittance {
                    siemens_to_pu(z, bases.sbase_kva, vb)
                } else {
                    ohm_to_pu(z, bases.sbase_kva, vb)
                }
            })
        }
    }))
}

fn parse_bus(node: &Node<'_>) -> Result<Bus, FeederError> {
    let mut bus = Bus::new(node.get("id")?.string()?, node.get("phases")?.phases()?);
    if let Some(n) = node.opt("vmin_pu")? {
        bus.vmin = n.per_phase()?;
    }
    if let Some(n) = node.opt("vmax_pu")? {
        bus.vmax = n.per_phase()?;
    }
    Ok(bus)
}

fn parse_line(node: &Node<'_>, bases: &Bases) -> Result<Line, FeederError> {
    let id = node.get("id")?.string()?;
    let from = node.get("from_bus")?.string()?;
    let to = node.get("to_bus")?.string()?;
    let mut tracker = UnitTracker::new(node, format!("line {id}"));
    let z = impedance(&mut tracker, "z", bases, from, false)?
        .ok_or_else(|| node.err("missing key `z_ohm` or `z_pu`"))?;
    let mut line = Line::new(id, from, to, node.get("phases")?.phases()?, z);
    if let Some(y) = impedance(&mut tracker, "ysh_from", bases, from, true)? {
        line.ysh_from = y;
    }
    if let Some(y) = impedance(&mut tracker, "ysh_to", bases, to, true)? {
        line.ysh_to = y;
    }
    Ok(line)
}

fn parse_load(node: &Node<'_>, bases: &Bases) -> Result<LoadSpec, FeederError> {
    let id = node.get("id")?.string()?;
    let bus = node.get("bus")?.string()?;
    let cfg_node = node.get("configuration")?;
    let configuration = match cfg_node.string()? {
        "wye" => Configuration::Wye,
        "delta" => Configuration::Delta,
        other => return Err(cfg_node.err(format!("unknown configuration `{other}`"))),
    };
    let phases = node.get("phases")?.phases()?;
    let mut tracker = UnitTracker::new(node, format!("load {id}"));
    let (s_node, unit) = tracker
        .pick("s", "kva")?
        .ok_or_else(|| node.err("missing key `s_kva` or `s_pu`"))?;
    let mut s0 = s_node.cvec3()?;
    if let Unit::Physical = unit {
        s0 /= Complex64::new(bases.sbase_kva, 0.0);
    }
    let mut load = LoadSpec::constant_power(id, bus, configuration, phases, s0);
    let model_node = node.get("model")?;
    match model_node.string()? {
        "constant_power" => {}
        "exponential" => {
            load.model = LoadModel::Exponential;
            let alpha = node.get("alpha")?.per_phase()?;
            let beta = node.get("beta")?.per_phase()?;
            for p in Phase::ALL {
                if phases.contains(p) {
                    load.alpha[p.index()] = alpha[p.index()];
                    load.beta[p.index()] = beta[p.index()];
                }
            }
        }
        other => return Err(model_node.err(format!("unknown model `{other}`"))),
    }
    if let Some(n) = node.opt("v0_pu")? {
        let v0 = n.per_phase()?;
        for p in phases.iter() {
            load.v0mag[p.index()] = v0[p.index()];
        }
    }
    Ok(load)
}

fn parse_shunt(node: &Node<'_>, bases: &Bases) -> Result<ShuntDevice, FeederError> {
    let id = node.get("id")?.string()?;
    let bus = node.get("bus")?.string()?;
    let mut tracker = UnitTracker::new(node, format!("shunt {id}"));
    let y = impedance(&mut tracker, "y", bases, bus, true)?
        .ok_or_else(|| node.err("missing key `y_s` or `y_pu`"))?;
    Ok(ShuntDevice {
        id: id.to_string(),
        bus: bus.to_string(),
        y,
    })
}

/// Build a per-unit network from a parsed feeder document, without validating.
pub fn network_from_json(doc: &Value, default_name: &str) -> Result<Network, FeederError> {
    let root = Node::root(doc);
    let sbase_kva = root.get("sbase_kva")?.number()?;
    let vbase_node = root.get("vbase_kv")?;
    let mut bases = Bases {
        sbase_kva,
        uniform: vbase_node.value.as_f64(),
        per_bus: HashMap::new(),
    };
    if bases.uniform.is_none() {
        for (bus, v) in vbase_node.object()? {
            let n = Node {
                value: v,
                path: format!("{}.{bus}", vbase_node.path),
            };
            bases.per_bus.insert(bus.clone(), n.number()?);
        }
    }
    let name = match root.opt("name")? {
        Some(n) => n.string()?.to_string(),
        None => default_name.to_string(),
    };
    let mut net = Network::new(name);
    net.sbase_kva = sbase_kva;
    for n in root.get("buses")?.items()? {
        net.buses.push(parse_bus(&n)?);
    }
    for n in root.get("lines")?.items()? {
        net.lines.push(parse_line(&n, &bases)?);
    }
    for n in root.get("loads")?.items()? {
        net.loads.push(parse_load(&n, &bases)?);
    }
    if let Some(shunts) = root.opt("shunts")? {
        for n in shunts.items()? {
            net.shunts.push(parse_shunt(&n, &bases)?);
        }
    }
    let source = root.get("source")?;
    let src_bus = source.get("bus")?;
    let vref = source.get("vref_pu")?.cvec3()?;
    let id = src_bus.string()?;
    let bus = net
        .buses
        .iter_mut()
        .find(|b| b.id == id)
        .ok_or_else(|| src_bus.err(format!("unknown bus `{id}`")))?;
    bus.is_slack = true;
    bus.vref = Some(vref);
    Ok(net)
}

/// Parse and validate a feeder from JSON text.
pub fn parse_feeder_str(text: &str, default_name: &str) -> Result<Network, FeederError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| {
        parse_error("$", format!("line {} column {}: {e}", e.line(), e.column()))
    })?;
    let net = network_from_json(&doc, default_name)?;
    let report = validate(&net);
    if !report.is_empty() {
        return Err(FeederError::Validation(report));
    }
    Ok(net)
}

/// Read, convert to per-unit and validate a feeder file.
pub fn parse_feeder(path: impl AsRef<Path>) -> Result<Network, FeederError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| FeederError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_feeder_str(&text, &stem)
}

// ---------------------------------------------------------------- writing

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn cvec_json(v: &CVec3) -> Value {
    Value::Array(v.iter().map(|z| complex_json(*z)).collect())
}

fn cmat_json(m: &CMat3) -> Value {
    Value::Array(
        (0..3)
            .map(|r| Value::Array((0..3).map(|c| complex_json(m[(r, c)])).collect()))
            .collect(),
    )
}

fn phases_str(p: PhaseSet) -> String {
    p.iter().map(|p| p.label()).collect()
}

/// The network as a per-unit feeder document (`vbase_kv` is written as 1).
pub fn network_to_json(network: &Network) -> Value {
    let buses: Vec<Value> = network
        .buses
        .iter()
        .map(|b| {
            json!({
                "id": b.id,
                "phases": phases_str(b.phases),
                "vmin_pu": b.vmin,
                "vmax_pu": b.vmax,
            })
        })
        .collect();
    let lines: Vec<Value> = network
        .lines
        .iter()
        .map(|l| {
            json!({
                "id": l.id,
                "from_bus": l.from_bus,
                "to_bus": l.to_bus,
                "phases": phases_str(l.phases),
                "z_pu": cmat_json(&l.z_series),
                "ysh_from_pu": cmat_json(&l.ysh_from),
                "ysh_to_pu": cmat_json(&l.ysh_to),
            })
        })
        .collect();
    let loads: Vec<Value> = network
        .loads
        .iter()
        .map(|l| {
            let mut obj = json!({
                "id": l.id,
                "bus": l.bus,
                "configuration": match l.configuration {
                    Configuration::Wye => "wye",
                    Configuration::Delta => "delta",
                },
                "phases": phases_str(l.phases),
                "model": match l.model {
                    LoadModel::ConstantPower => "constant_power",
                    LoadModel::Exponential => "exponential",
                },
                "s_pu": cvec_json(&l.s0),
                "v0_pu": l.v0mag,
            });
            if l.model == LoadModel::Exponential {
                obj["alpha"] = json!(l.alpha);
                obj["beta"] = json!(l.beta);
            }
            obj
        })
        .collect();
    let shunts: Vec<Value> = network
        .shunts
        .iter()
        .map(|s| json!({"id": s.id, "bus": s.bus, "y_pu": cmat_json(&s.y)}))
        .collect();
    let mut doc = json!({
        "name": network.name,
        "sbase_kva": network.sbase_kva,
        "vbase_kv": 1.0,
        "buses": buses,
        "lines": lines,
        "loads": loads,
        "shunts": shunts,
    });
    if let Some(root) = network.root() {
        let bus = &network.buses[root];
        doc["source"] = json!({
            "bus": bus.id,
            "vref_pu": cvec_json(&bus.vref.unwrap_or_else(CVec3::zeros)),
        });
    }
    doc
}

pub fn write_feeder(network: &Network, path: impl AsRef<Path>) -> Result<(), FeederError> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(&network_to_json(network))
        .expect("feeder document serializes");
    std::fs::write(path, text + "\n").map_err(|source| FeederError::Io {
        path: path.display().to_string(),
        source,
    })
}

// ---------------------------------------------------------------- solutions

/// A solution from either solver.
#[derive(Clone, Copy, Debug)]
pub enum SolutionRef<'a> {
    Linear(&'a LinearSolution),
    Phasor(&'a PhasorState),
}

/// `x` with 9 significant digits; zero prints as `0.0`.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0.0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0.0".into()
    } else {
        s
    }
}

fn fixed9(x: f64) -> String {
    let s = format!("{x:.9}");
    if s == "-0.000000000" {
        "0.000000000".into()
    } else {
        s
    }
}

/// Solution table as CSV text: one row per bus phase, then one row per load
/// slot. For delta loads, slot `a` holds branch ab's power (`pd`, `qd`) and
/// phase a's withdrawal (`pb`, `qb`).
pub fn solution_csv(network: &Network, solution: SolutionRef<'_>) -> String {
    let mut out = String::from("bus,phase,vm_pu,va_deg,w_pu\n");
    for (b, bus) in network.buses.iter().enumerate() {
        for p in bus.phases.iter() {
            let k = p.index();
            let (vm, va, w) = match solution {
                SolutionRef::Linear(s) => {
                    let w = s.w_diag(b)[k];
                    (w.max(0.0).sqrt(), String::new(), w)
                }
                SolutionRef::Phasor(s) => {
                    let v = s.v[b][k];
                    (v.norm(), format_sig9(v.arg().to_degrees()), v.norm_sqr())
                }
            };
            let _ = writeln!(out, "{},{},{},{},{}", bus.id, p.label(), fixed9(vm), va, fixed9(w));
        }
    }
    out.push_str("load,phase,pd_pu,qd_pu,pb_pu,qb_pu\n");
    let (sd, sb) = match solution {
        SolutionRef::Linear(s) => (&s.sd, &s.sb),
        SolutionRef::Phasor(s) => (&s.sd, &s.sb),
    };
    for (l, load) in network.loads.iter().enumerate() {
        let bus_phases = load.bus_phases();
        for p in Phase::ALL {
            let k = p.index();
            if !load.phases.contains(p) && !bus_phases.contains(p) {
                continue;
            }
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                load.id,
                p.label(),
                fixed9(sd[l][k].re),
                fixed9(sd[l][k].im),
                fixed9(sb[l][k].re),
                fixed9(sb[l][k].im)
            );
        }
    }
    out
}

pub fn write_solution_csv(
    network: &Network,
    solution: SolutionRef<'_>,
    path: impl AsRef<Path>,
) -> Result<(), FeederError> {
    let path = path.as_ref();
    std::fs::write(path, solution_csv(network, solution)).map_err(|source| FeederError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ac_oracle::{sweep_solve, SweepConfig};
    use crate::lp_solver::{solve_network, ModelConfig};

    const TWO_BUS: &str = r#"{
        "sbase_kva": 1000,
        "vbase_kv": 4.16,
        "buses": [{"id": "0", "phases": "abc"}, {"id": "1", "phases": "abc"}],
        "lines": [{"id": "e", "from_bus": "0", "to_bus": "1", "phases": "abc",
                   "z_ohm": [[[0.4, 0.8], [0, 0], [0, 0]],
                             [[0, 0], [0.4, 0.8], [0, 0]],
                             [[0, 0], [0, 0], [0.4, 0.8]]]}],
        "loads": [],
        "shunts": [],
        "source": {"bus": "0", "vref_pu": [[1, 0], [-0.5, -0.8660254037844386], [-0.5, 0.8660254037844386]]}
    }"#;

    #[test]
    fn ohm_conversion() {
        let net = parse_feeder_str(TWO_BUS, "t").unwrap();
        let z = net.lines[0].z_series[(0, 0)];
        assert!((z.re - 0.4 / (4.16 * 4.16)).abs() < 1e-15);
        assert!((z.re - 0.023114).abs() < 1e-6);
        assert!((z.im - 0.046228).abs() < 1e-6);
        assert!(net.loads.is_empty());
        let vref = net.slack_vref().unwrap();
        assert!((vref - crate::balanced_vref(1.0)).norm() < 1e-15);
    }

    #[test]
    fn inverse_conversions() {
        let z = Complex64::new(0.3465, 1.0179);
        let back = pu_to_ohm(ohm_to_pu(z, 5000.0, 2.4018), 5000.0, 2.4018);
        assert!((back - z).norm() / z.norm() < 1e-12);
        let y = Complex64::new(0.0, 5.6e-6);
        let back = pu_to_siemens(siemens_to_pu(y, 5000.0, 2.4018), 5000.0, 2.4018);
        assert!((back - y).norm() / y.norm() < 1e-12);
    }

    #[test]
    fn missing_key_reports_path() {
        let text = TWO_BUS.replace("\"from_bus\": \"0\", ", "");
        let err = parse_feeder_str(&text, "t").unwrap_err();
        match err {
            FeederError::Parse { path, message } => {
                assert_eq!(path, "$.lines[0]");
                assert!(message.contains("from_bus"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mixed_units_rejected() {
        let text = TWO_BUS.replace(
            "\"phases\": \"abc\",\n                   \"z_ohm\"",
            "\"phases\": \"abc\", \"ysh_to_pu\": [[[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]]],\n                   \"z_ohm\"",
        );
        assert!(text.contains("ysh_to_pu"));
        assert!(matches!(
            parse_feeder_str(&text, "t"),
            Err(FeederError::Unit { .. })
        ));
    }

    #[test]
    fn malformed_json() {
        assert!(matches!(
            parse_feeder_str("{", "t"),
            Err(FeederError::Parse { .. })
        ));
    }

    #[test]
    fn validation_failure() {
        let text = TWO_BUS.replace("\"to_bus\": \"1\"", "\"to_bus\": \"9\"");
        assert!(matches!(
            parse_feeder_str(&text, "t"),
            Err(FeederError::Validation(_))
        ));
    }

    #[test]
    fn sig9_formatting() {
        assert_eq!(format_sig9(0.0), "0.0");
        assert_eq!(format_sig9(-0.0), "0.0");
        assert_eq!(format_sig9(-120.0), "-120.000000");
        assert_eq!(format_sig9(0.5), "0.500000000");
        assert_eq!(format_sig9(1e-14), "0.0000000000000100000000");
    }

    #[test]
    fn slack_row_and_linear_angle() {
        let net = parse_feeder_str(TWO_BUS, "t").unwrap();
        let ac = sweep_solve(&net, &SweepConfig::default()).unwrap();
        let csv = solution_csv(&net, SolutionRef::Phasor(&ac));
        assert!(csv.lines().any(|l| l == "0,a,1.000000000,0.0,1.000000000"));
        assert!(csv.lines().any(|l| l == "0,b,1.000000000,-120.000000,1.000000000"));
        let lp = solve_network(&net, &ModelConfig::default()).unwrap();
        let csv = solution_csv(&net, SolutionRef::Linear(&lp));
        assert!(csv.lines().any(|l| l == "0,a,1.000000000,,1.000000000"));
    }
}
