//! Delta-connection algebra.
//!
//! A delta device's branch φ sits between phases φ and φ⁺. Its applied
//! voltages are `Λ V` and its bus currents are `Λᵀ I^d`. Under exactly
//! balanced bus voltages the bus withdrawals `S^b` are a fixed real-linear
//! function of the branch powers `S^d`, written as the 6×6 system
//! `A x^b = B x^d` over stacked `(p₁, p₂, p₃, q₁, q₂, q₃)`.
//!
//! `B` has a two-dimensional kernel: a circulating current around the delta
//! changes the branch powers without changing any bus current. Going from
//! bus powers back to branch powers therefore picks the preimage with zero
//! circulating current.

use std::sync::OnceLock;

use nalgebra::{Matrix3, Matrix6, Vector6};
use num_complex::Complex64;
use thiserror::Error;

use crate::{gamma, CVec3, Phase};

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum DeltaError {
    #[error("delta branch {0} carries power but sees zero voltage")]
    SingularBranchVoltage(Phase),
}

/// Λ = [[1, −1, 0], [0, 1, −1], [−1, 0, 1]].
pub fn lambda() -> Matrix3<f64> {
    Matrix3::new(1.0, -1.0, 0.0, 0.0, 1.0, -1.0, -1.0, 0.0, 1.0)
}

/// Γ, the circulant of unit phasors with rows [1, γ², γ], [γ, 1, γ²], [γ², γ, 1].
pub fn gamma_matrix() -> Matrix3<Complex64> {
    let g = gamma();
    let g2 = g * g;
    let one = Complex64::new(1.0, 0.0);
    Matrix3::new(one, g2, g, g, one, g2, g2, g, one)
}

/// Branch voltages `Λ v`.
pub fn branch_voltages(v: &CVec3) -> CVec3 {
    CVec3::new(v[0] - v[1], v[1] - v[2], v[2] - v[0])
}

/// The constant matrices of the linear delta mapping.
#[derive(Clone, Debug)]
pub struct DeltaMapMatrix {
    pub a: Matrix6<f64>,
    pub b: Matrix6<f64>,
    pub a_inv: Matrix6<f64>,
    /// `A⁻¹ B`: stacked branch powers → stacked bus powers.
    pub forward: Matrix6<f64>,
    /// Minimum-norm right inverse of `forward` (zero circulating current).
    pub backward: Matrix6<f64>,
}

/// Rows of `A` and `B` in the order (Σp, Σq, branch-b real, branch-b imag,
/// branch-c real, branch-c imag), anchored on phase a.
pub fn build_delta_matrix() -> DeltaMapMatrix {
    let h = 0.5;
    let s = 3f64.sqrt() / 2.0;
    let r3 = 3f64.sqrt();
    #[rustfmt::skip]
    let a = Matrix6::from_row_slice(&[
        1.0, 1.0, 1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0, 1.0, 1.0,
        0.0, 1.5, 0.0, 0.0, -s,  0.0,
        0.0, s,   0.0, 0.0, 1.5, 0.0,
        0.0, 0.0, 1.5, 0.0, r3,  -s,
        0.0, -r3, s,   0.0, 0.0, 1.5,
    ]);
    #[rustfmt::skip]
    let b = Matrix6::from_row_slice(&[
        1.0, 1.0, 1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0, 1.0, 1.0,
        h,   1.0, 0.0, -s,  0.0, 0.0,
        s,   0.0, 0.0, h,   1.0, 0.0,
        h,   0.0, 1.0, s,   0.0, 0.0,
        -s,  0.0, 0.0, h,   0.0, 1.0,
    ]);
    let a_inv = a
        .try_inverse()
        .expect("delta mapping matrix A is invertible");
    let residual = (a_inv * a - Matrix6::identity()).abs().max();
    assert!(residual <= 1e-12, "A⁻¹A deviates from I by {residual:e}");
    let forward = a_inv * b;
    let backward = forward
        .pseudo_inverse(1e-10)
        .expect("SVD of the delta mapping converges");
    DeltaMapMatrix {
        a,
        b,
        a_inv,
        forward,
        backward,
    }
}

/// Shared instance, built on first use.
pub fn delta_matrix() -> &'static DeltaMapMatrix {
    static MATRIX: OnceLock<DeltaMapMatrix> = OnceLock::new();
    MATRIX.get_or_init(build_delta_matrix)
}

pub fn stack(s: &CVec3) -> Vector6<f64> {
    Vector6::new(s[0].re, s[1].re, s[2].re, s[0].im, s[1].im, s[2].im)
}

pub fn unstack(x: &Vector6<f64>) -> CVec3 {
    CVec3::new(
        Complex64::new(x[0], x[3]),
        Complex64::new(x[1], x[4]),
        Complex64::new(x[2], x[5]),
    )
}

/// Bus withdrawals of a delta device from its branch powers.
pub fn delta_to_bus(sd: &CVec3) -> CVec3 {
    unstack(&(delta_matrix().forward * stack(sd)))
}

/// Branch powers with zero circulating current that produce `sb`.
pub fn bus_to_delta(sb: &CVec3) -> CVec3 {
    unstack(&(delta_matrix().backward * stack(sb)))
}

/// Exact bus withdrawals of a delta device at bus voltage `v`:
/// `I^d_φ = (sd_φ / (Λv)_φ)*`, `S^b = v ∘ (Λᵀ I^d)*`.
pub fn exact_delta_bus_power(v: &CVec3, sd: &CVec3) -> Result<CVec3, DeltaError> {
    let id = delta_branch_currents(v, sd)?;
    let ib = delta_bus_currents(&id);
    Ok(CVec3::from_fn(|i, _| v[i] * ib[i].conj()))
}

pub(crate) fn delta_branch_currents(v: &CVec3, sd: &CVec3) -> Result<CVec3, DeltaError> {
    let vl = branch_voltages(v);
    let mut id = CVec3::zeros();
    for p in Phase::ALL {
        let k = p.index();
        if sd[k] == Complex64::new(0.0, 0.0) {
            continue;
        }
        if vl[k].norm() == 0.0 {
            return Err(DeltaError::SingularBranchVoltage(p));
        }
        id[k] = (sd[k] / vl[k]).conj();
    }
    Ok(id)
}

/// `Λᵀ I^d`.
pub(crate) fn delta_bus_currents(id: &CVec3) -> CVec3 {
    CVec3::new(id[0] - id[2], id[1] - id[0], id[2] - id[1])
}
