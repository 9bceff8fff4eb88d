//! In-memory multiphase radial network and its topology queries.
//!
//! Every per-phase quantity is stored in a fixed three-slot array (or 3×3
//! matrix) indexed by [`Phase`], together with an explicit [`PhaseSet`] mask.
//! Slots outside the mask are zero.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::{CMat3, CVec3};

/// One of the three phases, coded `a = 0`, `b = 1`, `c = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    A = 0,
    B = 1,
    C = 2,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::A, Phase::B, Phase::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Phase {
        match i % 3 {
            0 => Phase::A,
            1 => Phase::B,
            _ => Phase::C,
        }
    }

    /// φ⁺ = (φ + 1) mod 3.
    pub fn succ(self) -> Phase {
        Phase::from_index(self.index() + 1)
    }

    /// φ⁻ = (φ + 2) mod 3.
    pub fn pred(self) -> Phase {
        Phase::from_index(self.index() + 2)
    }

    pub fn label(self) -> char {
        match self {
            Phase::A => 'a',
            Phase::B => 'b',
            Phase::C => 'c',
        }
    }

    pub fn from_label(c: char) -> Option<Phase> {
        match c.to_ascii_lowercase() {
            'a' => Some(Phase::A),
            'b' => Some(Phase::B),
            'c' => Some(Phase::C),
            _ => None,
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Subset of {a, b, c} as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PhaseSet(u8);

impl PhaseSet {
    pub const EMPTY: PhaseSet = PhaseSet(0);
    pub const ABC: PhaseSet = PhaseSet(0b111);

    pub fn from_phases(phases: &[Phase]) -> PhaseSet {
        PhaseSet(phases.iter().fold(0, |m, p| m | (1 << p.index())))
    }

    pub fn contains(self, p: Phase) -> bool {
        self.0 & (1 << p.index()) != 0
    }

    pub fn is_subset(self, other: PhaseSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn insert(&mut self, p: Phase) {
        self.0 |= 1 << p.index();
    }

    pub fn iter(self) -> impl Iterator<Item = Phase> {
        Phase::ALL.into_iter().filter(move |p| self.contains(*p))
    }

    pub fn indices(self) -> Vec<usize> {
        self.iter().map(Phase::index).collect()
    }
}

impl fmt::Debug for PhaseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, p) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for PhaseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bus {
    pub id: String,
    pub phases: PhaseSet,
    /// Voltage magnitude bounds in p.u. (not squared).
    pub vmin: [f64; 3],
    pub vmax: [f64; 3],
    pub is_slack: bool,
    pub vref: Option<CVec3>,
}

impl Bus {
    pub fn new(id: impl Into<String>, phases: PhaseSet) -> Bus {
        Bus {
            id: id.into(),
            phases,
            vmin: [0.8; 3],
            vmax: [1.2; 3],
            is_slack: false,
            vref: None,
        }
    }

    pub fn slack(id: impl Into<String>, phases: PhaseSet, vref: CVec3) -> Bus {
        Bus {
            is_slack: true,
            vref: Some(vref),
            ..Bus::new(id, phases)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Line {
    pub id: String,
    pub from_bus: String,
    pub to_bus: String,
    pub phases: PhaseSet,
    pub z_series: CMat3,
    pub ysh_from: CMat3,
    pub ysh_to: CMat3,
}

impl Line {
    pub fn new(
        id: impl Into<String>,
        from_bus: impl Into<String>,
        to_bus: impl Into<String>,
        phases: PhaseSet,
        z_series: CMat3,
    ) -> Line {
        Line {
            id: id.into(),
            from_bus: from_bus.into(),
            to_bus: to_bus.into(),
            phases,
            z_series,
            ysh_from: CMat3::zeros(),
            ysh_to: CMat3::zeros(),
        }
    }
}

/// Shunt admittance attached to a bus (capacitor banks, reactors).
#[derive(Clone, Debug, PartialEq)]
pub struct ShuntDevice {
    pub id: String,
    pub bus: String,
    pub y: CMat3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Configuration {
    Wye,
    Delta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LoadModel {
    ConstantPower,
    Exponential,
}

/// A multiphase load. For a delta load, slot φ refers to the branch between
/// phases φ and φ⁺.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadSpec {
    pub id: String,
    pub bus: String,
    pub configuration: Configuration,
    pub phases: PhaseSet,
    pub model: LoadModel,
    /// Nominal power p⁰ + i q⁰ per phase/branch (p.u.).
    pub s0: CVec3,
    /// Reference voltage magnitude per phase/branch (p.u.).
    pub v0mag: [f64; 3],
    pub alpha: [f64; 3],
    pub beta: [f64; 3],
}

impl LoadSpec {
    /// Default reference magnitude: 1 for wye, √3 (line-to-line) for delta.
    pub fn default_v0mag(configuration: Configuration) -> f64 {
        match configuration {
            Configuration::Wye => 1.0,
            Configuration::Delta => 3f64.sqrt(),
        }
    }

    pub fn constant_power(
        id: impl Into<String>,
        bus: impl Into<String>,
        configuration: Configuration,
        phases: PhaseSet,
        s0: CVec3,
    ) -> LoadSpec {
        let v0 = LoadSpec::default_v0mag(configuration);
        let mut v0mag = [0.0; 3];
        for p in phases.iter() {
            v0mag[p.index()] = v0;
        }
        LoadSpec {
            id: id.into(),
            bus: bus.into(),
            configuration,
            phases,
            model: LoadModel::ConstantPower,
            s0,
            v0mag,
            alpha: [0.0; 3],
            beta: [0.0; 3],
        }
    }

    /// Exponential load with uniform exponents on the present phases.
    pub fn exponential(
        id: impl Into<String>,
        bus: impl Into<String>,
        configuration: Configuration,
        phases: PhaseSet,
        s0: CVec3,
        alpha: f64,
        beta: f64,
    ) -> LoadSpec {
        let mut load = LoadSpec::constant_power(id, bus, configuration, phases, s0);
        load.model = LoadModel::Exponential;
        load.set_exponents(alpha, beta);
        load
    }

    /// Switch to the exponential model with α = β uniform on present phases.
    pub fn set_exponents(&mut self, alpha: f64, beta: f64) {
        self.model = LoadModel::Exponential;
        for p in Phase::ALL {
            let on = self.phases.contains(p);
            self.alpha[p.index()] = if on { alpha } else { 0.0 };
            self.beta[p.index()] = if on { beta } else { 0.0 };
        }
    }

    /// Phases of the bus this load touches.
    pub fn bus_phases(&self) -> PhaseSet {
        match self.configuration {
            Configuration::Wye => self.phases,
            Configuration::Delta => {
                let mut set = PhaseSet::EMPTY;
                for p in self.phases.iter() {
                    set.insert(p);
                    set.insert(p.succ());
                }
                set
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    pub name: String,
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    pub shunts: Vec<ShuntDevice>,
    pub loads: Vec<LoadSpec>,
    /// Power base in kVA used when the network was converted to per-unit.
    pub sbase_kva: f64,
}

impl Network {
    pub fn new(name: impl Into<String>) -> Network {
        Network {
            name: name.into(),
            buses: Vec::new(),
            lines: Vec::new(),
            shunts: Vec::new(),
            loads: Vec::new(),
            sbase_kva: 1000.0,
        }
    }

    pub fn bus_index(&self, id: &str) -> Option<usize> {
        self.buses.iter().position(|b| b.id == id)
    }

    /// Index of the slack bus, if exactly one exists.
    pub fn root(&self) -> Option<usize> {
        let mut slack = self.buses.iter().enumerate().filter(|(_, b)| b.is_slack);
        match (slack.next(), slack.next()) {
            (Some((i, _)), None) => Some(i),
            _ => None,
        }
    }

    pub fn slack_vref(&self) -> Option<CVec3> {
        self.root().and_then(|r| self.buses[r].vref)
    }

    /// Replace the slack reference voltage (phases absent at the slack are zeroed).
    pub fn with_vref(&self, vref: CVec3) -> Network {
        let mut net = self.clone();
        if let Some(r) = net.root() {
            let phases = net.buses[r].phases;
            net.buses[r].vref = Some(mask_vec(vref, phases));
        }
        net
    }

    /// Copy with every load switched to the exponential model, α = β = `exponent`.
    pub fn with_uniform_exponent(&self, exponent: f64) -> Network {
        let mut net = self.clone();
        for load in &mut net.loads {
            load.set_exponents(exponent, exponent);
        }
        net
    }

    /// Copy with every load switched to constant power.
    pub fn with_constant_power_loads(&self) -> Network {
        let mut net = self.clone();
        for load in &mut net.loads {
            load.model = LoadModel::ConstantPower;
        }
        net
    }
}

pub(crate) fn mask_vec(v: CVec3, phases: PhaseSet) -> CVec3 {
    CVec3::from_fn(|i, _| {
        if phases.contains(Phase::from_index(i)) {
            v[i]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// One violated network invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub element: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.element, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, element: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            element: element.into(),
            message: message.into(),
        });
    }

    pub fn mentions(&self, needle: &str) -> bool {
        self.violations.iter().any(|v| v.message.contains(needle))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn zero_outside(m: &CMat3, phases: PhaseSet) -> bool {
    (0..3).all(|r| {
        (0..3).all(|c| {
            let inside =
                phases.contains(Phase::from_index(r)) && phases.contains(Phase::from_index(c));
            inside || m[(r, c)] == Complex64::new(0.0, 0.0)
        })
    })
}

fn zero_outside_vec(v: &[f64; 3], phases: PhaseSet) -> bool {
    Phase::ALL
        .iter()
        .all(|p| phases.contains(*p) || v[p.index()] == 0.0)
}

/// Restriction of a 3×3 matrix to the rows/columns in `phases`.
pub fn restrict(m: &CMat3, phases: PhaseSet) -> DMatrix<Complex64> {
    let idx = phases.indices();
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
}

/// Inverse of `m` restricted to `phases`, zero-padded back to 3×3.
pub fn masked_inverse(m: &CMat3, phases: PhaseSet) -> Option<CMat3> {
    let idx = phases.indices();
    if idx.is_empty() {
        return Some(CMat3::zeros());
    }
    let sub = restrict(m, phases);
    let scale = sub.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    let inv = sub.clone().try_inverse()?;
    // Reject numerically singular blocks.
    let inv_scale = inv.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !inv_scale.is_finite() || scale * inv_scale > 1e12 {
        return None;
    }
    let mut out = CMat3::zeros();
    for (r, &i) in idx.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            out[(i, j)] = inv[(r, c)];
        }
    }
    Some(out)
}

/// Check every network invariant and report each violation.
pub fn validate(network: &Network) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut index: HashMap<&str, usize> = HashMap::new();

    if network.buses.is_empty() {
        report.push(&network.name, "network has no buses");
        return report;
    }
    for (i, bus) in network.buses.iter().enumerate() {
        if index.insert(bus.id.as_str(), i).is_some() {
            report.push(&bus.id, "duplicate bus id");
        }
        if bus.phases.is_empty() {
            report.push(&bus.id, "bus has no phases");
        }
        for p in bus.phases.iter() {
            let (lo, hi) = (bus.vmin[p.index()], bus.vmax[p.index()]);
            if !(lo <= hi) {
                report.push(&bus.id, format!("vmin > vmax on phase {p}"));
            }
        }
        if bus.is_slack && bus.vref.is_none() {
            report.push(&bus.id, "slack bus without vref");
        }
        if !bus.is_slack && bus.vref.is_some() {
            report.push(&bus.id, "vref given on a non-slack bus");
        }
    }
    let n_slack = network.buses.iter().filter(|b| b.is_slack).count();
    if n_slack != 1 {
        report.push(
            &network.name,
            format!("expected exactly one slack bus, found {n_slack}"),
        );
    }

    let mut line_ids = BTreeSet::new();
    let mut edges_ok = true;
    for line in &network.lines {
        if !line_ids.insert(line.id.as_str()) {
            report.push(&line.id, "duplicate line id");
        }
        let from = index.get(line.from_bus.as_str());
        let to = index.get(line.to_bus.as_str());
        if from.is_none() {
            report.push(&line.id, format!("unknown from_bus {}", line.from_bus));
        }
        if to.is_none() {
            report.push(&line.id, format!("unknown to_bus {}", line.to_bus));
        }
        if from.is_none() || to.is_none() {
            edges_ok = false;
            continue;
        }
        let (fi, ti) = (from.copied().unwrap_or(0), to.copied().unwrap_or(0));
        if fi == ti {
            report.push(&line.id, "line connects a bus to itself");
            edges_ok = false;
        }
        if line.phases.is_empty() {
            report.push(&line.id, "line has no phases");
        }
        for (end, bi) in [("from", fi), ("to", ti)] {
            let bus = &network.buses[bi];
            if !line.phases.is_subset(bus.phases) {
                report.push(
                    &line.id,
                    format!(
                        "line phases {} not a subset of {end} bus {} phases {}",
                        line.phases, bus.id, bus.phases
                    ),
                );
            }
        }
        for (name, m) in [
            ("z_series", &line.z_series),
            ("ysh_from", &line.ysh_from),
            ("ysh_to", &line.ysh_to),
        ] {
            if !zero_outside(m, line.phases) {
                report.push(&line.id, format!("{name} has entries on absent phases"));
            }
        }
        if !line.phases.is_empty() && masked_inverse(&line.z_series, line.phases).is_none() {
            report.push(&line.id, "series impedance is singular on the line phases");
        }
    }

    if network.buses.len() == 1 {
        report.push(
            &network.name,
            "network has a single bus; the root needs at least one line",
        );
    } else if edges_ok {
        match orient_toward_root(network) {
            Ok(tree) => {
                // Every non-root bus must be energized on all of its phases.
                for (j, bus) in network.buses.iter().enumerate() {
                    if let Some(e) = tree.parent_line[j] {
                        let line = &network.lines[e];
                        if !bus.phases.is_subset(line.phases) {
                            report.push(
                                &bus.id,
                                format!(
                                    "bus phases {} not served by feeder line {} phases {}",
                                    bus.phases, line.id, line.phases
                                ),
                            );
                        }
                    }
                }
            }
            Err(_) => report.push(&network.name, "disconnected / not a tree"),
        }
    }

    let mut load_ids = BTreeSet::new();
    for load in &network.loads {
        if !load_ids.insert(load.id.as_str()) {
            report.push(&load.id, "duplicate load id");
        }
        let Some(&bi) = index.get(load.bus.as_str()) else {
            report.push(&load.id, format!("unknown bus {}", load.bus));
            continue;
        };
        let bus = &network.buses[bi];
        match load.configuration {
            Configuration::Wye => {
                if !load.phases.is_subset(bus.phases) {
                    report.push(
                        &load.id,
                        format!(
                            "wye phases {} not a subset of bus {} phases {}",
                            load.phases, bus.id, bus.phases
                        ),
                    );
                }
            }
            Configuration::Delta => {
                for p in load.phases.iter() {
                    let need = PhaseSet::from_phases(&[p, p.succ()]);
                    if !need.is_subset(bus.phases) {
                        report.push(
                            &load.id,
                            format!("delta branch {p} requires phases {need}"),
                        );
                    }
                }
            }
        }
        let p0 = [load.s0[0].re, load.s0[1].re, load.s0[2].re];
        let q0 = [load.s0[0].im, load.s0[1].im, load.s0[2].im];
        for (name, v) in [
            ("p0", &p0),
            ("q0", &q0),
            ("alpha", &load.alpha),
            ("beta", &load.beta),
        ] {
            if !zero_outside_vec(v, load.phases) {
                report.push(&load.id, format!("{name} nonzero on an absent phase"));
            }
        }
        for p in load.phases.iter() {
            let i = p.index();
            if !(load.alpha[i] >= 0.0 && load.beta[i] >= 0.0) {
                report.push(&load.id, format!("negative exponent on phase {p}"));
            }
            if !(load.v0mag[i] > 0.0) {
                report.push(&load.id, format!("v0mag must be positive on phase {p}"));
            }
            if !(load.s0[i].re.is_finite() && load.s0[i].im.is_finite()) {
                report.push(&load.id, format!("non-finite s0 on phase {p}"));
            }
        }
    }

    let mut shunt_ids = BTreeSet::new();
    for shunt in &network.shunts {
        if !shunt_ids.insert(shunt.id.as_str()) {
            report.push(&shunt.id, "duplicate shunt id");
        }
        match index.get(shunt.bus.as_str()) {
            None => report.push(&shunt.id, format!("unknown bus {}", shunt.bus)),
            Some(&bi) => {
                if !zero_outside(&shunt.y, network.buses[bi].phases) {
                    report.push(&shunt.id, "admittance has entries on phases absent at the bus");
                }
            }
        }
    }
    report
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("network has no unique slack bus")]
    NoRoot,
    #[error("line {0} references an unknown bus")]
    UnknownBus(String),
    #[error("cycle detected through line {0}")]
    CycleDetected(String),
    #[error("bus {0} is not connected to the root")]
    Disconnected(String),
}

/// A line with its endpoints normalized so that `from` is the parent side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrientedLine {
    pub line: usize,
    pub from: usize,
    pub to: usize,
    /// True if the stored line runs child → parent.
    pub flipped: bool,
}

#[derive(Clone, Debug)]
pub struct OrientedTree {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    /// Index (into `network.lines`) of the line feeding each bus.
    pub parent_line: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    /// Buses in breadth-first order from the root.
    pub order: Vec<usize>,
    /// Oriented copy of every line, same indexing as `network.lines`.
    pub lines: Vec<OrientedLine>,
    /// Bus index of every load and shunt.
    pub load_bus: Vec<usize>,
    pub shunt_bus: Vec<usize>,
}

impl OrientedTree {
    /// Line shunt admittance on the parent (from) side of an oriented line.
    pub fn ysh_parent<'a>(&self, network: &'a Network, e: usize) -> &'a CMat3 {
        let line = &network.lines[e];
        if self.lines[e].flipped {
            &line.ysh_to
        } else {
            &line.ysh_from
        }
    }

    pub fn ysh_child<'a>(&self, network: &'a Network, e: usize) -> &'a CMat3 {
        let line = &network.lines[e];
        if self.lines[e].flipped {
            &line.ysh_from
        } else {
            &line.ysh_to
        }
    }

    /// Lines whose child end is `bus`'s children, i.e. the lines leaving `bus`.
    pub fn child_lines(&self, bus: usize) -> impl Iterator<Item = usize> + '_ {
        self.children[bus]
            .iter()
            .filter_map(move |&c| self.parent_line[c])
    }
}

/// Root the tree at the slack bus and orient every line away from it.
pub fn orient_toward_root(network: &Network) -> Result<OrientedTree, TopologyError> {
    let n = network.buses.len();
    let root = network.root().ok_or(TopologyError::NoRoot)?;
    let index: HashMap<&str, usize> = network
        .buses
        .iter()
        .enumerate()
        .map(|(i, b)| (b.id.as_str(), i))
        .collect();
    let lookup = |id: &str, line: &Line| {
        index
            .get(id)
            .copied()
            .ok_or_else(|| TopologyError::UnknownBus(line.id.clone()))
    };

    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut ends = Vec::with_capacity(network.lines.len());
    for (e, line) in network.lines.iter().enumerate() {
        let (f, t) = (lookup(&line.from_bus, line)?, lookup(&line.to_bus, line)?);
        if f == t {
            return Err(TopologyError::CycleDetected(line.id.clone()));
        }
        adjacency[f].push((t, e));
        adjacency[t].push((f, e));
        ends.push((f, t));
    }

    let mut parent = vec![None; n];
    let mut parent_line = vec![None; n];
    let mut children = vec![Vec::new(); n];
    let mut visited = vec![false; n];
    let mut used = vec![false; network.lines.len()];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([root]);
    visited[root] = true;
    while let Some(i) = queue.pop_front() {
        order.push(i);
        for &(j, e) in &adjacency[i] {
            if used[e] {
                continue;
            }
            used[e] = true;
            if visited[j] {
                return Err(TopologyError::CycleDetected(network.lines[e].id.clone()));
            }
            visited[j] = true;
            parent[j] = Some(i);
            parent_line[j] = Some(e);
            children[i].push(j);
            queue.push_back(j);
        }
    }
    if let Some(j) = visited.iter().position(|v| !v) {
        return Err(TopologyError::Disconnected(network.buses[j].id.clone()));
    }

    let lines = ends
        .iter()
        .enumerate()
        .map(|(e, &(f, t))| {
            let flipped = parent[f] == Some(t) && parent_line[f] == Some(e);
            let (from, to) = if flipped { (t, f) } else { (f, t) };
            OrientedLine {
                line: e,
                from,
                to,
                flipped,
            }
        })
        .collect();

    let load_bus = network
        .loads
        .iter()
        .map(|l| {
            index
                .get(l.bus.as_str())
                .copied()
                .ok_or_else(|| TopologyError::UnknownBus(l.id.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let shunt_bus = network
        .shunts
        .iter()
        .map(|s| {
            index
                .get(s.bus.as_str())
                .copied()
                .ok_or_else(|| TopologyError::UnknownBus(s.id.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(OrientedTree {
        root,
        parent,
        parent_line,
        children,
        order,
        lines,
        load_bus,
        shunt_bus,
    })
}

/// Buses of degree one, excluding the root.
pub fn leaf_buses(network: &Network) -> BTreeSet<String> {
    let mut degree = vec![0usize; network.buses.len()];
    for line in &network.lines {
        for id in [&line.from_bus, &line.to_bus] {
            if let Some(i) = network.bus_index(id) {
                degree[i] += 1;
            }
        }
    }
    let root = network.root();
    network
        .buses
        .iter()
        .enumerate()
        .filter(|(i, _)| degree[*i] == 1 && Some(*i) != root)
        .map(|(_, b)| b.id.clone())
        .collect()
}
