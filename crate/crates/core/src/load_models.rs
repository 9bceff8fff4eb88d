//! Exponential load model, its tangent-line approximation, and the squared
//! voltage magnitude a load sees in each configuration.
//!
//! All voltages here are squared magnitudes `v = |V|²`.

use num_complex::Complex64;
use thiserror::Error;

use crate::{CMat3, CVec3, Configuration, LoadModel, LoadSpec, Phase};

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum LoadError {
    #[error("negative squared voltage {value} on phase {phase}")]
    NegativeSquaredVoltage { phase: Phase, value: f64 },
}

/// Coefficients `a = p⁰/|V⁰|^α`, `b = q⁰/|V⁰|^β`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoadCoefficients {
    pub a: [f64; 3],
    pub b: [f64; 3],
}

impl LoadCoefficients {
    pub fn of(load: &LoadSpec) -> LoadCoefficients {
        let mut a = [0.0; 3];
        let mut b = [0.0; 3];
        for p in load.phases.iter() {
            let i = p.index();
            let v0 = load.v0mag[i];
            a[i] = load.s0[i].re / v0.powf(load.alpha[i]);
            b[i] = load.s0[i].im / v0.powf(load.beta[i]);
        }
        LoadCoefficients { a, b }
    }
}

/// Power consumed at squared applied voltage `v`.
pub fn exact_power(load: &LoadSpec, v: &[f64; 3]) -> Result<CVec3, LoadError> {
    let mut s = CVec3::zeros();
    for p in load.phases.iter() {
        let i = p.index();
        if v[i] < 0.0 {
            return Err(LoadError::NegativeSquaredVoltage {
                phase: p,
                value: v[i],
            });
        }
    }
    if load.model == LoadModel::ConstantPower {
        return Ok(load.s0);
    }
    let k = LoadCoefficients::of(load);
    for p in load.phases.iter() {
        let i = p.index();
        let pd = if k.a[i] == 0.0 {
            0.0
        } else {
            k.a[i] * v[i].powf(load.alpha[i] / 2.0)
        };
        let qd = if k.b[i] == 0.0 {
            0.0
        } else {
            k.b[i] * v[i].powf(load.beta[i] / 2.0)
        };
        s[i] = Complex64::new(pd, qd);
    }
    Ok(s)
}

/// Affine form `s = slope ∘ v + offset` of a load's linearized power.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineLoad {
    pub slope_p: [f64; 3],
    pub slope_q: [f64; 3],
    pub offset: CVec3,
}

impl AffineLoad {
    pub fn eval(&self, v: &[f64; 3]) -> CVec3 {
        CVec3::from_fn(|i, _| {
            Complex64::new(self.slope_p[i] * v[i], self.slope_q[i] * v[i]) + self.offset[i]
        })
    }
}

/// Tangent of `x^{e/2}` at `x = point`, as (slope, value − slope·point).
fn tangent(e: f64, point: f64) -> (f64, f64) {
    let value = point.powf(e / 2.0);
    let slope = if e == 0.0 {
        0.0
    } else {
        e / 2.0 * point.powf(e / 2.0 - 1.0)
    };
    (slope, value - slope * point)
}

/// Tangent-line approximation of the exponential model. The tangent is taken
/// at `v = point · |V⁰|²`; with `|V⁰| = 1` and `point = 1` this is
/// `p = (aα/2)(v − 1) + a`, and likewise for `q`.
pub fn linearization(load: &LoadSpec, point: f64) -> AffineLoad {
    let mut out = AffineLoad {
        slope_p: [0.0; 3],
        slope_q: [0.0; 3],
        offset: CVec3::zeros(),
    };
    if load.model == LoadModel::ConstantPower {
        out.offset = load.s0;
        return out;
    }
    for p in load.phases.iter() {
        let i = p.index();
        let v0sq = load.v0mag[i] * load.v0mag[i];
        // p = p⁰ (v/|V⁰|²)^{α/2}; tangent in u = v/|V⁰|² at u = point
        let (sp, cp) = tangent(load.alpha[i], point);
        let (sq, cq) = tangent(load.beta[i], point);
        out.slope_p[i] = load.s0[i].re * sp / v0sq;
        out.slope_q[i] = load.s0[i].im * sq / v0sq;
        out.offset[i] = Complex64::new(load.s0[i].re * cp, load.s0[i].im * cq);
    }
    out
}

/// Linearized power at squared applied voltage `v`, tangent at `v = 1`.
pub fn linearized_power(load: &LoadSpec, v: &[f64; 3]) -> CVec3 {
    linearization(load, 1.0).eval(v)
}

/// Where a load's applied voltage is read from.
#[derive(Clone, Copy, Debug)]
pub enum VoltageSource<'a> {
    W(&'a CMat3),
    Phasor(&'a CVec3),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VoltageMode {
    Exact,
    /// Delta branches use `3 W_φφ`.
    Linearized,
}

/// Squared applied voltage per phase (wye) or branch (delta).
pub fn applied_vmag2(load: &LoadSpec, source: VoltageSource<'_>, mode: VoltageMode) -> [f64; 3] {
    let w = match source {
        VoltageSource::W(w) => *w,
        VoltageSource::Phasor(v) => v * v.adjoint(),
    };
    let mut out = [0.0; 3];
    for p in load.phases.iter() {
        let i = p.index();
        let j = p.succ().index();
        out[i] = match (load.configuration, mode) {
            (Configuration::Wye, _) => w[(i, i)].re,
            (Configuration::Delta, VoltageMode::Linearized) => 3.0 * w[(i, i)].re,
            (Configuration::Delta, VoltageMode::Exact) => {
                w[(i, i)].re + w[(j, j)].re - 2.0 * w[(i, j)].re
            }
        };
    }
    out
}

/// The load a delta device becomes when it is wrongly modeled as wye: branch
/// φ is placed on phase φ and its reference magnitude becomes the
/// line-to-neutral value `|V⁰|/√3`.
pub fn as_wye_equivalent(load: &LoadSpec) -> LoadSpec {
    if load.configuration == Configuration::Wye {
        return load.clone();
    }
    let mut wye = load.clone();
    wye.configuration = Configuration::Wye;
    for v in wye.v0mag.iter_mut() {
        *v /= 3f64.sqrt();
    }
    wye
}
