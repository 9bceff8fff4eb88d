//! Linear multiphase branch-flow model with delta connections and linearized
//! exponential loads.
//!
//! Unknowns are the Hermitian voltage products `W_i` of every bus, one
//! sending-end flow `S_e` per line, the branch powers `S^d`, bus withdrawals
//! `S^b` and squared applied voltages `v` of every load, and the slack
//! injection. The model:
//!
//! - fixes `W_0 = V_ref V_refᴴ` at the slack;
//! - propagates `W_j = W_i − M Zᴴ − Z Mᴴ` along each line with
//!   `M = Γ diag(S_e)` (flows outside the line's phases are absent, i.e. zero);
//! - balances power at each bus with line flows lossless (`S_ji = −S_ij`),
//!   shunt draws `diag(W Yᴴ)` kept exact, and load withdrawals;
//! - ties each load's `v` to `diag(W)` (wye) or `3·diag(W)` (delta), its
//!   `S^d` to the tangent-line load model, and its `S^b` to `S^d` directly
//!   (wye) or through the 6×6 delta mapping.
//!
//! With only the slack supplying power the system is square and its unique
//! solution is the model's optimum, so it is solved directly.

use num_complex::Complex64;
use thiserror::Error;

use crate::delta_wye::{delta_matrix, gamma_matrix};
use crate::load_models::{as_wye_equivalent, linearization, AffineLoad};
use crate::network::{orient_toward_root, OrientedTree, TopologyError};
use crate::sparse::{SolveError, TripletMatrix};
use crate::{CMat3, CVec3, Configuration, LoadSpec, Network, Phase};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoadMode {
    /// Every load draws its nominal power (LP-D).
    Constant,
    /// Exponential loads use the tangent-line model (LP-D-E).
    LinearizedExponential,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelConfig {
    pub load_mode: LoadMode,
    /// Model delta loads as if they were wye-connected.
    pub delta_as_wye: bool,
    /// Normalized squared voltage at which exponential loads are linearized.
    pub linearization_point: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            load_mode: LoadMode::LinearizedExponential,
            delta_as_wye: false,
            linearization_point: 1.0,
        }
    }
}

impl ModelConfig {
    pub fn lp_d() -> ModelConfig {
        ModelConfig {
            load_mode: LoadMode::Constant,
            ..ModelConfig::default()
        }
    }

    pub fn lp_d_e() -> ModelConfig {
        ModelConfig::default()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("assembled system is {rows}×{cols}; only the slack may supply power")]
    NonSquareSystem { rows: usize, cols: usize },
    #[error("structurally singular system: {0}")]
    StructurallySingular(String),
    #[error("numerically singular system: {0}")]
    NumericallySingular(String),
}

/// Upper-triangle slot of an off-diagonal phase pair.
fn pair_slot(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 1) => 0,
        (1, 2) => 1,
        _ => 2,
    }
}

/// Position of every unknown in the solution vector. Complex unknowns occupy
/// two consecutive slots (real, imaginary).
#[derive(Clone, Debug, Default)]
pub struct Layout {
    pub w_diag: Vec<[Option<usize>; 3]>,
    /// Slots for the pairs (a,b), (b,c), (a,c).
    pub w_off: Vec<[Option<usize>; 3]>,
    pub flow: Vec<[Option<usize>; 3]>,
    pub sd: Vec<[Option<usize>; 3]>,
    pub sb: Vec<[Option<usize>; 3]>,
    pub v: Vec<[Option<usize>; 3]>,
    pub slack: [Option<usize>; 3],
    pub len: usize,
}

impl Layout {
    fn take(&mut self, width: usize) -> usize {
        let at = self.len;
        self.len += width;
        at
    }
}

/// Real-linear combination of unknowns with a complex value.
#[derive(Clone, Debug, Default)]
struct CExpr {
    re: Vec<(usize, f64)>,
    im: Vec<(usize, f64)>,
    constant: Complex64,
}

impl CExpr {
    fn var(slot: usize) -> CExpr {
        CExpr {
            re: vec![(slot, 1.0)],
            im: vec![(slot + 1, 1.0)],
            constant: Complex64::new(0.0, 0.0),
        }
    }

    fn real_var(slot: usize) -> CExpr {
        CExpr {
            re: vec![(slot, 1.0)],
            ..CExpr::default()
        }
    }

    /// self += c · x
    fn add(&mut self, c: Complex64, x: &CExpr) {
        for &(k, a) in &x.re {
            self.re.push((k, c.re * a));
            self.im.push((k, c.im * a));
        }
        for &(k, a) in &x.im {
            self.re.push((k, -c.im * a));
            self.im.push((k, c.re * a));
        }
        self.constant += c * x.constant;
    }

    /// self += c · conj(x)
    fn add_conj(&mut self, c: Complex64, x: &CExpr) {
        let conj = CExpr {
            re: x.re.clone(),
            im: x.im.iter().map(|&(k, a)| (k, -a)).collect(),
            constant: x.constant.conj(),
        };
        self.add(c, &conj);
    }

    fn add_real(&mut self, c: f64, x: &CExpr) {
        self.add(Complex64::new(c, 0.0), x);
    }
}

/// The assembled real system `matrix · x = rhs`.
#[derive(Clone, Debug)]
pub struct SparseLinearSystem {
    pub matrix: TripletMatrix,
    pub rhs: Vec<f64>,
    pub layout: Layout,
    pub tree: OrientedTree,
}

struct Assembler {
    matrix: TripletMatrix,
    rhs: Vec<f64>,
}

impl Assembler {
    fn row(&mut self, terms: &[(usize, f64)], value: f64) {
        let r = self.rhs.len();
        for &(c, v) in terms {
            self.matrix.push(r, c, v);
        }
        self.rhs.push(value);
    }

    /// Emit `expr = 0` as its real part, and its imaginary part unless `real_only`.
    fn equate_zero(&mut self, expr: &CExpr, real_only: bool) {
        self.row(&expr.re, -expr.constant.re);
        if !real_only {
            self.row(&expr.im, -expr.constant.im);
        }
    }
}

/// The load as the model sees it.
fn effective_load(load: &LoadSpec, config: &ModelConfig) -> LoadSpec {
    if config.delta_as_wye {
        as_wye_equivalent(load)
    } else {
        load.clone()
    }
}

fn load_affine(load: &LoadSpec, config: &ModelConfig) -> AffineLoad {
    match config.load_mode {
        LoadMode::Constant => AffineLoad {
            slope_p: [0.0; 3],
            slope_q: [0.0; 3],
            offset: load.s0,
        },
        LoadMode::LinearizedExponential => linearization(load, config.linearization_point),
    }
}

/// Expression for `W_i[φ, ψ]` (zero if either phase is absent at the bus).
fn w_expr(layout: &Layout, bus: usize, r: usize, c: usize) -> CExpr {
    if r == c {
        return layout.w_diag[bus][r].map(CExpr::real_var).unwrap_or_default();
    }
    match layout.w_off[bus][pair_slot(r, c)] {
        None => CExpr::default(),
        Some(slot) if r < c => CExpr::var(slot),
        Some(slot) => CExpr {
            re: vec![(slot, 1.0)],
            im: vec![(slot + 1, -1.0)],
            constant: Complex64::new(0.0, 0.0),
        },
    }
}

/// `diag(W Yᴴ)_φ = Σ_k W_φk · conj(Y_φk)`.
fn shunt_draw(expr: &mut CExpr, layout: &Layout, bus: usize, y: &CMat3, phase: usize) {
    for k in 0..3 {
        let coeff = y[(phase, k)].conj();
        if coeff != Complex64::new(0.0, 0.0) {
            expr.add(coeff, &w_expr(layout, bus, phase, k));
        }
    }
}

/// Build the real sparse system for `network` under `config`.
pub fn assemble(network: &Network, config: &ModelConfig) -> Result<SparseLinearSystem, LpError> {
    let tree = orient_toward_root(network)?;
    let n_bus = network.buses.len();
    let loads: Vec<LoadSpec> = network
        .loads
        .iter()
        .map(|l| effective_load(l, config))
        .collect();

    let mut layout = Layout {
        w_diag: vec![[None; 3]; n_bus],
        w_off: vec![[None; 3]; n_bus],
        flow: vec![[None; 3]; network.lines.len()],
        sd: vec![[None; 3]; loads.len()],
        sb: vec![[None; 3]; loads.len()],
        v: vec![[None; 3]; loads.len()],
        ..Layout::default()
    };
    let mut loads_at: Vec<Vec<usize>> = vec![Vec::new(); n_bus];
    for (l, &b) in tree.load_bus.iter().enumerate() {
        loads_at[b].push(l);
    }
    let mut shunts_at: Vec<Vec<usize>> = vec![Vec::new(); n_bus];
    for (s, &b) in tree.shunt_bus.iter().enumerate() {
        shunts_at[b].push(s);
    }

    for &bus in &tree.order {
        let phases = network.buses[bus].phases;
        for p in phases.iter() {
            layout.w_diag[bus][p.index()] = Some(layout.take(1));
        }
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            if phases.contains(Phase::from_index(i)) && phases.contains(Phase::from_index(j)) {
                layout.w_off[bus][pair_slot(i, j)] = Some(layout.take(2));
            }
        }
        if let Some(e) = tree.parent_line[bus] {
            for p in network.lines[e].phases.iter() {
                layout.flow[e][p.index()] = Some(layout.take(2));
            }
        }
        for &l in &loads_at[bus] {
            let load = &loads[l];
            let all = load.configuration == Configuration::Delta;
            for p in Phase::ALL {
                let on = load.phases.contains(p);
                if on {
                    layout.v[l][p.index()] = Some(layout.take(1));
                }
                if on || all {
                    layout.sd[l][p.index()] = Some(layout.take(2));
                    layout.sb[l][p.index()] = Some(layout.take(2));
                }
            }
        }
    }
    for p in network.buses[tree.root].phases.iter() {
        layout.slack[p.index()] = Some(layout.take(2));
    }

    let mut asm = Assembler {
        matrix: TripletMatrix::new(0, layout.len),
        rhs: Vec::new(),
    };

    // Slack voltage.
    let vref = network.buses[tree.root]
        .vref
        .ok_or(TopologyError::NoRoot)?;
    let root_phases = network.buses[tree.root].phases.indices();
    for (a, &r) in root_phases.iter().enumerate() {
        for &c in &root_phases[a..] {
            let mut e = w_expr(&layout, tree.root, r, c);
            e.constant -= vref[r] * vref[c].conj();
            asm.equate_zero(&e, r == c);
        }
    }

    // Voltage propagation along each line.
    let gmat = gamma_matrix();
    for ol in &tree.lines {
        let line = &network.lines[ol.line];
        let z = &line.z_series;
        let child = network.buses[ol.to].phases.indices();
        for (a, &r) in child.iter().enumerate() {
            for &c in &child[a..] {
                let mut e = w_expr(&layout, ol.to, r, c);
                e.add_real(-1.0, &w_expr(&layout, ol.from, r, c));
                for k in 0..3 {
                    let Some(s) = layout.flow[ol.line][k] else {
                        continue;
                    };
                    let s = CExpr::var(s);
                    // (M Zᴴ)_rc = Γ_rk S_k conj(Z_ck); (Z Mᴴ)_rc = Z_rk conj(Γ_ck S_k)
                    e.add(gmat[(r, k)] * z[(c, k)].conj(), &s);
                    e.add_conj(z[(r, k)] * gmat[(c, k)].conj(), &s);
                }
                asm.equate_zero(&e, r == c);
            }
        }
    }

    // Power balance per bus and phase.
    let dm = delta_matrix();
    for &bus in &tree.order {
        for p in network.buses[bus].phases.iter() {
            let k = p.index();
            let mut e = CExpr::default();
            for c in tree.child_lines(bus) {
                if let Some(s) = layout.flow[c][k] {
                    e.add_real(1.0, &CExpr::var(s));
                }
                shunt_draw(&mut e, &layout, bus, tree.ysh_parent(network, c), k);
            }
            if let Some(pl) = tree.parent_line[bus] {
                if let Some(s) = layout.flow[pl][k] {
                    e.add_real(-1.0, &CExpr::var(s));
                }
                shunt_draw(&mut e, &layout, bus, tree.ysh_child(network, pl), k);
            }
            for &s in &shunts_at[bus] {
                shunt_draw(&mut e, &layout, bus, &network.shunts[s].y, k);
            }
            for &l in &loads_at[bus] {
                if let Some(sb) = layout.sb[l][k] {
                    e.add_real(1.0, &CExpr::var(sb));
                }
            }
            if bus == tree.root {
                if let Some(s) = layout.slack[k] {
                    e.add_real(-1.0, &CExpr::var(s));
                }
            }
            asm.equate_zero(&e, false);
        }
    }

    // Loads.
    for (l, load) in loads.iter().enumerate() {
        let bus = tree.load_bus[l];
        let affine = load_affine(load, config);
        let vscale = match load.configuration {
            Configuration::Wye => 1.0,
            Configuration::Delta => 3.0,
        };
        for p in Phase::ALL {
            let k = p.index();
            if let Some(v) = layout.v[l][k] {
                let mut e = CExpr::real_var(v);
                e.add_real(-vscale, &w_expr(&layout, bus, k, k));
                asm.equate_zero(&e, true);
            }
            if let Some(sd) = layout.sd[l][k] {
                let mut e = CExpr::var(sd);
                if let Some(v) = layout.v[l][k] {
                    e.re.push((v, -affine.slope_p[k]));
                    e.im.push((v, -affine.slope_q[k]));
                    e.constant -= affine.offset[k];
                }
                asm.equate_zero(&e, false);
            }
        }
        match load.configuration {
            Configuration::Wye => {
                for k in 0..3 {
                    if let (Some(sb), Some(sd)) = (layout.sb[l][k], layout.sd[l][k]) {
                        let mut e = CExpr::var(sb);
                        e.add_real(-1.0, &CExpr::var(sd));
                        asm.equate_zero(&e, false);
                    }
                }
            }
            Configuration::Delta => {
                // stacked index m ↦ slot of p_m (m < 3) or q_{m−3}
                let stacked = |slots: &[Option<usize>; 3], m: usize| {
                    slots[m % 3].map(|s| if m < 3 { s } else { s + 1 })
                };
                for row in 0..6 {
                    let mut terms = Vec::new();
                    for m in 0..6 {
                        if let Some(s) = stacked(&layout.sb[l], m) {
                            terms.push((s, dm.a[(row, m)]));
                        }
                        if let Some(s) = stacked(&layout.sd[l], m) {
                            terms.push((s, -dm.b[(row, m)]));
                        }
                    }
                    asm.row(&terms, 0.0);
                }
            }
        }
    }

    let mut matrix = asm.matrix;
    matrix.rows = asm.rhs.len();
    if matrix.rows != matrix.cols {
        return Err(LpError::NonSquareSystem {
            rows: matrix.rows,
            cols: matrix.cols,
        });
    }
    let (empty_rows, empty_cols) = matrix.empty_lines();
    if !empty_rows.is_empty() || !empty_cols.is_empty() {
        return Err(LpError::StructurallySingular(format!(
            "{} empty rows, {} empty columns",
            empty_rows.len(),
            empty_cols.len()
        )));
    }
    Ok(SparseLinearSystem {
        matrix,
        rhs: asm.rhs,
        layout,
        tree,
    })
}

/// Solution of the linear model.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSolution {
    /// Hermitian `W_i` per bus (zero rows/columns on absent phases).
    pub w: Vec<CMat3>,
    /// Flow per line, measured at the parent-side end.
    pub flow: Vec<CVec3>,
    pub sd: Vec<CVec3>,
    pub sb: Vec<CVec3>,
    pub v_load: Vec<[f64; 3]>,
    pub s_slack: CVec3,
    /// Total real power supplied by the slack.
    pub objective: f64,
}

impl LinearSolution {
    /// `diag(W_i)` per bus.
    pub fn w_diag(&self, bus: usize) -> [f64; 3] {
        let w = &self.w[bus];
        [w[(0, 0)].re, w[(1, 1)].re, w[(2, 2)].re]
    }
}

fn unpack(system: &SparseLinearSystem, x: &[f64]) -> LinearSolution {
    let lay = &system.layout;
    let cplx = |slot: Option<usize>| {
        slot.map(|s| Complex64::new(x[s], x[s + 1]))
            .unwrap_or_default()
    };
    let cvec = |slots: &[Option<usize>; 3]| CVec3::from_fn(|i, _| cplx(slots[i]));
    let w = (0..lay.w_diag.len())
        .map(|b| {
            let mut m = CMat3::zeros();
            for i in 0..3 {
                if let Some(s) = lay.w_diag[b][i] {
                    m[(i, i)] = Complex64::new(x[s], 0.0);
                }
            }
            for (i, j) in [(0, 1), (1, 2), (0, 2)] {
                let z = cplx(lay.w_off[b][pair_slot(i, j)]);
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
            m
        })
        .collect();
    let s_slack = cvec(&lay.slack);
    LinearSolution {
        w,
        flow: lay.flow.iter().map(cvec).collect(),
        sd: lay.sd.iter().map(cvec).collect(),
        sb: lay.sb.iter().map(cvec).collect(),
        v_load: lay
            .v
            .iter()
            .map(|slots| {
                let mut v = [0.0; 3];
                for i in 0..3 {
                    if let Some(s) = slots[i] {
                        v[i] = x[s];
                    }
                }
                v
            })
            .collect(),
        objective: s_slack.iter().map(|s| s.re).sum(),
        s_slack,
    }
}

/// Factor and solve the assembled system.
pub fn solve(system: &SparseLinearSystem) -> Result<LinearSolution, LpError> {
    let x = system.matrix.solve(&system.rhs).map_err(|e| match e {
        SolveError::NotSquare { rows, cols } => LpError::NonSquareSystem { rows, cols },
        other => LpError::NumericallySingular(other.to_string()),
    })?;
    let mx = system.matrix.mul_vec(&x);
    let residual = mx
        .iter()
        .zip(&system.rhs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let scale = system.rhs.iter().map(|v| v.abs()).fold(1.0, f64::max);
    if !(residual <= 1e-9 * scale) {
        return Err(LpError::NumericallySingular(format!(
            "residual {residual:e} after solve"
        )));
    }
    Ok(unpack(system, &x))
}

/// Assemble and solve in one step.
pub fn solve_network(network: &Network, config: &ModelConfig) -> Result<LinearSolution, LpError> {
    solve(&assemble(network, config)?)
}

/// One squared-voltage bound violation.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitViolation {
    pub bus: String,
    pub phase: Phase,
    pub w: f64,
    /// Distance outside `[vmin², vmax²]`, in squared p.u.
    pub excess: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LimitReport {
    pub violations: Vec<LimitViolation>,
}

impl LimitReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Report every (bus, phase) whose `diag(W)` lies outside `[vmin², vmax²]`.
pub fn check_operational_limits(solution: &LinearSolution, network: &Network) -> LimitReport {
    let mut report = LimitReport::default();
    for (b, bus) in network.buses.iter().enumerate() {
        let diag = solution.w_diag(b);
        for p in bus.phases.iter() {
            let k = p.index();
            let (lo, hi) = (bus.vmin[k].powi(2), bus.vmax[k].powi(2));
            let w = diag[k];
            let excess = if w < lo {
                lo - w
            } else if w > hi {
                w - hi
            } else {
                continue;
            };
            report.violations.push(LimitViolation {
                bus: bus.id.clone(),
                phase: p,
                w,
                excess,
            });
        }
    }
    report
}
