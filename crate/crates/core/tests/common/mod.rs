#![allow(dead_code, clippy::type_complexity, clippy::needless_range_loop)]

//! Shared fixtures: small synthetic feeders and an independent dense
//! reference for the linear model.

use std::collections::VecDeque;

use mdopf::network::{Bus, Line, ShuntDevice};
use mdopf::{
    balanced_vref, CMat3, CVec3, Configuration, LoadModel, LoadSpec, Network, Phase, PhaseSet,
};
use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn ph(s: &str) -> PhaseSet {
    let v: Vec<Phase> = s.chars().map(|ch| Phase::from_label(ch).unwrap()).collect();
    PhaseSet::from_phases(&v)
}

pub fn coupled_z(scale: f64) -> CMat3 {
    let d = c(0.0120, 0.0350) * scale;
    let o = c(0.0050, 0.0150) * scale;
    CMat3::from_fn(|i, j| if i == j { d } else { o })
}

fn masked(m: CMat3, phases: PhaseSet) -> CMat3 {
    CMat3::from_fn(|i, j| {
        if phases.contains(Phase::from_index(i)) && phases.contains(Phase::from_index(j)) {
            m[(i, j)]
        } else {
            c(0.0, 0.0)
        }
    })
}

fn vec3(entries: [(f64, f64); 3]) -> CVec3 {
    CVec3::new(
        c(entries[0].0, entries[0].1),
        c(entries[1].0, entries[1].1),
        c(entries[2].0, entries[2].1),
    )
}

/// Two buses, diagonal impedance, balanced wye constant-power load.
pub fn two_bus_wye() -> Network {
    let mut net = Network::new("two_bus_wye");
    net.buses.push(Bus::slack("0", PhaseSet::ABC, balanced_vref(1.0)));
    net.buses.push(Bus::new("1", PhaseSet::ABC));
    net.lines.push(Line::new(
        "0-1",
        "0",
        "1",
        PhaseSet::ABC,
        CMat3::from_diagonal_element(c(0.01, 0.02)),
    ));
    net.loads.push(LoadSpec::constant_power(
        "L",
        "1",
        Configuration::Wye,
        PhaseSet::ABC,
        CVec3::from_element(c(0.1, 0.05)),
    ));
    net
}

/// Three-bus path with coupled impedances, an unbalanced exponential delta
/// load and a wye load on a line stored child → parent.
pub fn three_bus_delta() -> Network {
    let mut net = Network::new("three_bus_delta");
    net.buses.push(Bus::slack("s", PhaseSet::ABC, balanced_vref(1.02)));
    net.buses.push(Bus::new("m", PhaseSet::ABC));
    net.buses.push(Bus::new("e", PhaseSet::ABC));
    net.lines.push(Line::new("s-m", "s", "m", PhaseSet::ABC, coupled_z(1.0)));
    let mut back = Line::new("e-m", "e", "m", PhaseSet::ABC, coupled_z(0.6));
    back.ysh_from = CMat3::from_diagonal_element(c(0.0, 0.002));
    back.ysh_to = CMat3::from_diagonal_element(c(0.0, 0.001));
    net.lines.push(back);
    net.loads.push(LoadSpec::exponential(
        "D",
        "m",
        Configuration::Delta,
        PhaseSet::ABC,
        vec3([(0.20, 0.08), (0.12, 0.05), (0.16, 0.02)]),
        1.0,
        2.0,
    ));
    net.loads.push(LoadSpec::exponential(
        "Y",
        "e",
        Configuration::Wye,
        PhaseSet::ABC,
        vec3([(0.05, 0.02), (0.07, 0.03), (0.04, 0.01)]),
        0.7,
        1.4,
    ));
    net
}

/// Four buses: a three-phase trunk, a two-phase (b, c) lateral with a delta
/// branch load, and a single-phase a tap. Line charging and a capacitor.
pub fn four_bus_mixed() -> Network {
    let mut net = Network::new("four_bus_mixed");
    net.buses.push(Bus::slack("s", PhaseSet::ABC, balanced_vref(1.0)));
    net.buses.push(Bus::new("t", PhaseSet::ABC));
    net.buses.push(Bus::new("bc", ph("bc")));
    net.buses.push(Bus::new("a", ph("a")));
    let mut trunk = Line::new("s-t", "s", "t", PhaseSet::ABC, coupled_z(1.2));
    let charging = CMat3::from_fn(|i, j| if i == j { c(0.0, 0.004) } else { c(0.0, -0.001) });
    trunk.ysh_from = charging;
    trunk.ysh_to = charging;
    net.lines.push(trunk);
    let mut lat = Line::new("t-bc", "t", "bc", ph("bc"), masked(coupled_z(2.0), ph("bc")));
    lat.ysh_to = masked(charging, ph("bc"));
    net.lines.push(lat);
    net.lines.push(Line::new("a-t", "a", "t", ph("a"), masked(coupled_z(1.5), ph("a"))));
    net.shunts.push(ShuntDevice {
        id: "cap".into(),
        bus: "t".into(),
        y: CMat3::from_diagonal_element(c(0.0, 0.03)),
    });
    net.loads.push(LoadSpec::exponential(
        "T",
        "t",
        Configuration::Delta,
        PhaseSet::ABC,
        vec3([(0.10, 0.04), (0.09, 0.03), (0.12, 0.05)]),
        1.5,
        2.5,
    ));
    net.loads.push(LoadSpec::exponential(
        "B",
        "bc",
        Configuration::Delta,
        ph("b"),
        vec3([(0.0, 0.0), (0.08, 0.03), (0.0, 0.0)]),
        2.0,
        2.0,
    ));
    net.loads.push(LoadSpec::constant_power(
        "A",
        "a",
        Configuration::Wye,
        ph("a"),
        vec3([(0.06, 0.02), (0.0, 0.0), (0.0, 0.0)]),
    ));
    net
}

pub fn synthetic_feeders() -> Vec<Network> {
    vec![two_bus_wye(), three_bus_delta(), four_bus_mixed()]
}

/// Every load in `net` scaled by `factor`.
pub fn scaled_loads(net: &Network, factor: f64) -> Network {
    let mut out = net.clone();
    for l in &mut out.loads {
        l.s0 *= c(factor, 0.0);
    }
    out
}

pub fn bundled_feeder(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../feeders")
        .join(format!("{name}.json"))
}

// ------------------------------------------------------------------ dense reference

/// Quantities of a linear-model solution, indexed like the network.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    pub w: Vec<CMat3>,
    pub flow: Vec<CVec3>,
    pub sb: Vec<CVec3>,
    pub sd: Vec<CVec3>,
    pub s_slack: CVec3,
}

struct Vars {
    n: usize,
}

impl Vars {
    fn alloc(&mut self, k: usize) -> usize {
        self.n += k;
        self.n - k
    }
}

#[derive(Clone)]
struct Index {
    /// W[bus][r][c] → (slot of real part, slot of imaginary part or None)
    w: Vec<[[Option<(usize, Option<usize>, f64)>; 3]; 3]>,
    flow: Vec<[Option<usize>; 3]>,
    sd: Vec<[Option<usize>; 3]>,
    sb: Vec<[Option<usize>; 3]>,
    v: Vec<[Option<usize>; 3]>,
    slack: [Option<usize>; 3],
}

fn read_w(ix: &Index, x: &[f64], b: usize, r: usize, col: usize) -> Complex64 {
    match ix.w[b][r][col] {
        None => c(0.0, 0.0),
        Some((re, im, sign)) => c(x[re], im.map(|k| sign * x[k]).unwrap_or(0.0)),
    }
}

fn read_c(slot: Option<usize>, x: &[f64]) -> Complex64 {
    slot.map(|k| c(x[k], x[k + 1])).unwrap_or(c(0.0, 0.0))
}

fn gamma_mat() -> CMat3 {
    let g = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI / 3.0);
    let one = c(1.0, 0.0);
    CMat3::new(one, g * g, g, g, one, g * g, g * g, g, one)
}

fn delta_a_b() -> ([[f64; 6]; 6], [[f64; 6]; 6]) {
    let s = 3f64.sqrt() / 2.0;
    let r3 = 3f64.sqrt();
    let a = [
        [1.0, 1.0, 1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
        [0.0, 1.5, 0.0, 0.0, -s, 0.0],
        [0.0, s, 0.0, 0.0, 1.5, 0.0],
        [0.0, 0.0, 1.5, 0.0, r3, -s],
        [0.0, -r3, s, 0.0, 0.0, 1.5],
    ];
    let b = [
        [1.0, 1.0, 1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
        [0.5, 1.0, 0.0, -s, 0.0, 0.0],
        [s, 0.0, 0.0, 0.5, 1.0, 0.0],
        [0.5, 0.0, 1.0, s, 0.0, 0.0],
        [-s, 0.0, 0.0, 0.5, 0.0, 1.0],
    ];
    (a, b)
}

/// Parent of every bus and the line feeding it, found by BFS from the slack.
fn tree(net: &Network) -> (usize, Vec<Option<(usize, usize)>>, Vec<usize>) {
    let n = net.buses.len();
    let root = net.buses.iter().position(|b| b.is_slack).unwrap();
    let idx = |id: &str| net.buses.iter().position(|b| b.id == id).unwrap();
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    let mut order = vec![root];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for (e, line) in net.lines.iter().enumerate() {
            let (a, b) = (idx(&line.from_bus), idx(&line.to_bus));
            let other = if a == u { b } else if b == u { a } else { continue };
            if !seen[other] {
                seen[other] = true;
                parent[other] = Some((u, e));
                order.push(other);
                queue.push_back(other);
            }
        }
    }
    (root, parent, order)
}

/// Assemble the linear model densely by probing its affine residual, then
/// solve by Gaussian elimination with partial pivoting. `linearized` picks
/// tangent-line exponential loads; otherwise every load is constant power.
pub fn dense_solve(net: &Network, linearized: bool) -> DenseSolution {
    let nb = net.buses.len();
    let (root, parent, _order) = tree(net);
    let bus_of = |id: &str| net.buses.iter().position(|b| b.id == id).unwrap();
    let mut vars = Vars { n: 0 };
    let mut ix = Index {
        w: vec![[[None; 3]; 3]; nb],
        flow: vec![[None; 3]; net.lines.len()],
        sd: vec![[None; 3]; net.loads.len()],
        sb: vec![[None; 3]; net.loads.len()],
        v: vec![[None; 3]; net.loads.len()],
        slack: [None; 3],
    };
    // slack first, then loads, then lines, then buses: a different order
    // from the sparse assembly on purpose
    for p in net.buses[root].phases.iter() {
        ix.slack[p.index()] = Some(vars.alloc(2));
    }
    for (l, load) in net.loads.iter().enumerate() {
        for p in Phase::ALL {
            let on = load.phases.contains(p);
            if on || load.configuration == Configuration::Delta {
                ix.sd[l][p.index()] = Some(vars.alloc(2));
                ix.sb[l][p.index()] = Some(vars.alloc(2));
            }
            if on {
                ix.v[l][p.index()] = Some(vars.alloc(1));
            }
        }
    }
    for (e, line) in net.lines.iter().enumerate() {
        for p in line.phases.iter() {
            ix.flow[e][p.index()] = Some(vars.alloc(2));
        }
    }
    for b in 0..nb {
        let ph = net.buses[b].phases;
        for r in 0..3 {
            for col in r..3 {
                if !(ph.contains(Phase::from_index(r)) && ph.contains(Phase::from_index(col))) {
                    continue;
                }
                if r == col {
                    ix.w[b][r][r] = Some((vars.alloc(1), None, 1.0));
                } else {
                    let k = vars.alloc(2);
                    ix.w[b][r][col] = Some((k, Some(k + 1), 1.0));
                    ix.w[b][col][r] = Some((k, Some(k + 1), -1.0));
                }
            }
        }
    }
    let n = vars.n;
    let gm = gamma_mat();
    let (am, bm) = delta_a_b();

    let residual = |x: &[f64]| -> Vec<f64> {
        let mut out = Vec::new();
        let wmat = |b: usize| CMat3::from_fn(|r, col| read_w(&ix, x, b, r, col));
        let push_herm = |out: &mut Vec<f64>, m: &CMat3, ph: PhaseSet| {
            for r in 0..3 {
                for col in r..3 {
                    if ph.contains(Phase::from_index(r)) && ph.contains(Phase::from_index(col)) {
                        out.push(m[(r, col)].re);
                        if r != col {
                            out.push(m[(r, col)].im);
                        }
                    }
                }
            }
        };
        let vref = net.buses[root].vref.unwrap();
        push_herm(
            &mut out,
            &(wmat(root) - vref * vref.adjoint()),
            net.buses[root].phases,
        );
        let mut flows = vec![CVec3::zeros(); net.lines.len()];
        for e in 0..net.lines.len() {
            flows[e] = CVec3::from_fn(|k, _| read_c(ix.flow[e][k], x));
        }
        for b in 0..nb {
            let Some((p, e)) = parent[b] else { continue };
            let z = net.lines[e].z_series;
            let m = gm * CMat3::from_diagonal(&flows[e]);
            let d = wmat(b) - wmat(p) + m * z.adjoint() + z * m.adjoint();
            push_herm(&mut out, &d, net.buses[b].phases);
        }
        for b in 0..nb {
            let w = wmat(b);
            let draw = |y: &CMat3| {
                let d = w * y.adjoint();
                CVec3::new(d[(0, 0)], d[(1, 1)], d[(2, 2)])
            };
            let mut bal = CVec3::zeros();
            for (e, line) in net.lines.iter().enumerate() {
                let (fb, tb) = (bus_of(&line.from_bus), bus_of(&line.to_bus));
                if fb != b && tb != b {
                    continue;
                }
                let other = if fb == b { tb } else { fb };
                let y = if fb == b { &line.ysh_from } else { &line.ysh_to };
                bal += draw(y);
                if parent[b] == Some((other, e)) {
                    bal -= flows[e];
                } else {
                    bal += flows[e];
                }
            }
            for s in &net.shunts {
                if bus_of(&s.bus) == b {
                    bal += draw(&s.y);
                }
            }
            for (l, load) in net.loads.iter().enumerate() {
                if bus_of(&load.bus) == b {
                    bal += CVec3::from_fn(|k, _| read_c(ix.sb[l][k], x));
                }
            }
            if b == root {
                bal -= CVec3::from_fn(|k, _| read_c(ix.slack[k], x));
            }
            for p in net.buses[b].phases.iter() {
                out.push(bal[p.index()].re);
                out.push(bal[p.index()].im);
            }
        }
        for (l, load) in net.loads.iter().enumerate() {
            let b = bus_of(&load.bus);
            let w = wmat(b);
            let delta = load.configuration == Configuration::Delta;
            for p in Phase::ALL {
                let k = p.index();
                let sd = read_c(ix.sd[l][k], x);
                if let Some(vk) = ix.v[l][k] {
                    let factor = if delta { 3.0 } else { 1.0 };
                    out.push(x[vk] - factor * w[(k, k)].re);
                    let s0 = load.s0[k];
                    let target = if linearized && load.model == LoadModel::Exponential {
                        let u = x[vk] / load.v0mag[k].powi(2);
                        c(
                            s0.re * (1.0 + load.alpha[k] / 2.0 * (u - 1.0)),
                            s0.im * (1.0 + load.beta[k] / 2.0 * (u - 1.0)),
                        )
                    } else {
                        s0
                    };
                    out.push((sd - target).re);
                    out.push((sd - target).im);
                } else if ix.sd[l][k].is_some() {
                    out.push(sd.re);
                    out.push(sd.im);
                }
            }
            if delta {
                let st = |slots: &[Option<usize>; 3]| {
                    let v = CVec3::from_fn(|k, _| read_c(slots[k], x));
                    [v[0].re, v[1].re, v[2].re, v[0].im, v[1].im, v[2].im]
                };
                let (xb, xd) = (st(&ix.sb[l]), st(&ix.sd[l]));
                for row in 0..6 {
                    let mut acc = 0.0;
                    for m in 0..6 {
                        acc += am[row][m] * xb[m] - bm[row][m] * xd[m];
                    }
                    out.push(acc);
                }
            } else {
                for p in load.phases.iter() {
                    let d = read_c(ix.sb[l][p.index()], x) - read_c(ix.sd[l][p.index()], x);
                    out.push(d.re);
                    out.push(d.im);
                }
            }
        }
        out
    };

    let zero = vec![0.0; n];
    let f0 = residual(&zero);
    assert_eq!(f0.len(), n, "dense system must be square");
    let mut a = vec![vec![0.0; n + 1]; n];
    for k in 0..n {
        let mut e = zero.clone();
        e[k] = 1.0;
        let fk = residual(&e);
        for r in 0..n {
            a[r][k] = fk[r] - f0[r];
        }
    }
    for r in 0..n {
        a[r][n] = -f0[r];
    }
    let x = gauss(a);
    DenseSolution {
        w: (0..nb)
            .map(|b| CMat3::from_fn(|r, col| read_w(&ix, &x, b, r, col)))
            .collect(),
        flow: (0..net.lines.len())
            .map(|e| CVec3::from_fn(|k, _| read_c(ix.flow[e][k], &x)))
            .collect(),
        sb: (0..net.loads.len())
            .map(|l| CVec3::from_fn(|k, _| read_c(ix.sb[l][k], &x)))
            .collect(),
        sd: (0..net.loads.len())
            .map(|l| CVec3::from_fn(|k, _| read_c(ix.sd[l][k], &x)))
            .collect(),
        s_slack: CVec3::from_fn(|k, _| read_c(ix.slack[k], &x)),
    }
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn gauss(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        assert!(a[piv][col].abs() > 1e-14, "dense system is singular");
        a.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for k in col..=n {
                    a[r][k] -= f * a[col][k];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = a[r][n];
        for k in r + 1..n {
            s -= a[r][k] * x[k];
        }
        x[r] = s / a[r][r];
    }
    x
}
