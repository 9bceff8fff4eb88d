//! Browser bindings for the demo page in `www/`.
//!
//! Every export has a plain Rust twin (`*_impl`) so the numbers can be
//! checked natively; the exported wrappers only translate errors.

use mdopf::delta_wye::{delta_to_bus, exact_delta_bus_power};
use mdopf::experiments::{deltas, perturb_vref_to_vuf, solve_model, vuf, ModelKind, Solved};
use mdopf::feeder_io::parse_feeder_str;
use mdopf::load_models::{exact_power, linearized_power};
use mdopf::{balanced_vref, CVec3, Configuration, LoadSpec, Network, PhaseSet};
use num_complex::Complex64;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const FEEDER: &str = include_str!("../../../feeders/eight_bus_mixed.json");

fn feeder() -> Network {
    parse_feeder_str(FEEDER, "eight_bus_mixed").expect("bundled feeder parses")
}

/// Linear and exact bus withdrawals of a delta load.
///
/// `sd` holds the branch powers as `[p_ab, p_bc, p_ca, q_ab, q_bc, q_ca]`.
/// The bus voltage is the balanced set with phases b and c rotated by the
/// given angles (degrees). Returns `[linear(6), exact(6), vuf_pct]` in the
/// same re/im layout.
#[wasm_bindgen]
pub fn delta_mapping(sd: &[f64], theta_b_deg: f64, theta_c_deg: f64) -> Result<Vec<f64>, JsError> {
    delta_mapping_impl(sd, theta_b_deg, theta_c_deg).map_err(|e| JsError::new(&e))
}

pub fn delta_mapping_impl(sd: &[f64], theta_b_deg: f64, theta_c_deg: f64) -> Result<Vec<f64>, String> {
    if sd.len() != 6 {
        return Err(format!("expected 6 branch values, got {}", sd.len()));
    }
    let sd = CVec3::from_fn(|i, _| Complex64::new(sd[i], sd[i + 3]));
    let base = balanced_vref(1.0);
    let v = CVec3::new(
        base[0],
        base[1] * Complex64::from_polar(1.0, theta_b_deg.to_radians()),
        base[2] * Complex64::from_polar(1.0, theta_c_deg.to_radians()),
    );
    let linear = delta_to_bus(&sd);
    let exact = exact_delta_bus_power(&v, &sd).map_err(|e| e.to_string())?;
    let unbalance = vuf(&v).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(13);
    for s in [linear, exact] {
        out.extend(s.iter().map(|z| z.re));
        out.extend(s.iter().map(|z| z.im));
    }
    out.push(unbalance);
    Ok(out)
}

/// Exact and tangent-line power of a single-phase exponential load over
/// `n` voltage magnitudes in `[vmin, vmax]`.
///
/// Returns rows of `[|V|, p_exact, q_exact, p_linear, q_linear]`, flattened.
#[wasm_bindgen]
pub fn load_curve(p0: f64, q0: f64, alpha: f64, beta: f64, vmin: f64, vmax: f64, n: usize) -> Result<Vec<f64>, JsError> {
    load_curve_impl(p0, q0, alpha, beta, vmin, vmax, n).map_err(|e| JsError::new(&e))
}

pub fn load_curve_impl(
    p0: f64,
    q0: f64,
    alpha: f64,
    beta: f64,
    vmin: f64,
    vmax: f64,
    n: usize,
) -> Result<Vec<f64>, String> {
    if n < 2 || !(0.0..vmax).contains(&vmin) {
        return Err("need n >= 2 and 0 <= vmin < vmax".into());
    }
    let load = LoadSpec::exponential(
        "demo",
        "bus",
        Configuration::Wye,
        PhaseSet::from_phases(&[mdopf::Phase::A]),
        CVec3::new(Complex64::new(p0, q0), Complex64::default(), Complex64::default()),
        alpha,
        beta,
    );
    let mut out = Vec::with_capacity(5 * n);
    for k in 0..n {
        let vm = vmin + (vmax - vmin) * k as f64 / (n - 1) as f64;
        let v2 = [vm * vm, 0.0, 0.0];
        let exact = exact_power(&load, &v2).map_err(|e| e.to_string())?;
        let lin = linearized_power(&load, &v2);
        out.extend([vm, exact[0].re, exact[0].im, lin[0].re, lin[0].im]);
    }
    Ok(out)
}

/// Solve the bundled eight-bus feeder with both the linear and the exact
/// model after setting every load exponent to `alpha`, scaling the source
/// by `m` and unbalancing it to `vuf_pct`.
///
/// Returns JSON with per-bus-phase labels, `|V|²` from each model, the two
/// objectives and the error metrics, or an `error` field when the exact
/// model fails.
#[wasm_bindgen]
pub fn feeder_profile(alpha: f64, m: f64, vuf_pct: f64, seed: u32) -> Result<String, JsError> {
    feeder_profile_impl(alpha, m, vuf_pct, seed as u64)
        .map(|v| v.to_string())
        .map_err(|e| JsError::new(&e))
}

pub fn feeder_profile_impl(alpha: f64, m: f64, vuf_pct: f64, seed: u64) -> Result<Value, String> {
    let base = feeder();
    let vref = base.slack_vref().ok_or("feeder has no source")? * Complex64::new(m, 0.0);
    let vref = perturb_vref_to_vuf(&vref, vuf_pct, seed).map_err(|e| e.to_string())?;
    let net = base.with_uniform_exponent(alpha).with_vref(vref);
    let labels: Vec<String> = net
        .buses
        .iter()
        .flat_map(|b| b.phases.iter().map(move |p| format!("{}.{}", b.id, p.label())))
        .collect();
    let lp = solve_model(&net, ModelKind::LpDE).map_err(|e| e.to_string())?;
    let ac = solve_model(&net, ModelKind::AcDE);
    let mut out = json!({
        "labels": labels,
        "lp": lp.w_vector(&net),
        "obj_lp": lp.objective(),
        "vuf": vuf(&vref).map_err(|e| e.to_string())?,
    });
    match ac {
        Ok(ac) => {
            let d = deltas(&net, &lp, &ac);
            out["ac"] = json!(ac.w_vector(&net));
            out["obj_ac"] = json!(ac.objective());
            if let Solved::Phasor(st) = &ac {
                out["iterations"] = json!(st.iterations);
            }
            out["dw"] = json!(d.w);
            out["dpb"] = json!(d.pb);
            out["dqb"] = json!(d.qb);
        }
        Err(e) => out["error"] = json!(e.to_string()),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_voltage_gives_equal_mappings() {
        let r = delta_mapping_impl(&[0.3, 0.1, 0.2, 0.1, 0.0, 0.05], 0.0, 0.0).unwrap();
        for k in 0..6 {
            assert!((r[k] - r[k + 6]).abs() < 1e-12);
        }
        assert!(r[12].abs() < 1e-12);
    }

    #[test]
    fn unbalance_separates_mappings() {
        let r = delta_mapping_impl(&[0.3, 0.1, 0.2, 0.1, 0.0, 0.05], 4.0, -2.0).unwrap();
        let gap: f64 = (0..6).map(|k| (r[k] - r[k + 6]).abs()).sum();
        assert!(gap > 1e-3);
        // both conserve the total
        let tot = |o: usize| r[o] + r[o + 1] + r[o + 2];
        assert!((tot(0) - 0.6).abs() < 1e-12 && (tot(6) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn load_curve_touches_at_nominal() {
        let r = load_curve_impl(1.0, 0.5, 2.0, 1.0, 0.8, 1.2, 5).unwrap();
        let mid = &r[10..15];
        assert!((mid[0] - 1.0).abs() < 1e-15);
        assert!((mid[1] - mid[3]).abs() < 1e-15 && (mid[2] - mid[4]).abs() < 1e-15);
        // exact α = 2 is |V|², linear in |V|² so the tangent is exact
        assert!((r[1] - r[3]).abs() < 1e-12);
        assert!(load_curve_impl(1.0, 0.5, 2.0, 1.0, 1.2, 0.8, 5).is_err());
    }

    #[test]
    fn feeder_profile_reports_both_models() {
        let v = feeder_profile_impl(1.0, 1.0, 2.0, 7).unwrap();
        let n = v["labels"].as_array().unwrap().len();
        assert_eq!(v["lp"].as_array().unwrap().len(), n);
        assert_eq!(v["ac"].as_array().unwrap().len(), n);
        assert!((v["vuf"].as_f64().unwrap() - 2.0).abs() < 1e-6);
        assert!(v["dw"].as_f64().unwrap() < 1.0);
    }

    #[test]
    fn feeder_profile_reports_divergence() {
        let v = feeder_profile_impl(0.0, 0.3, 0.0, 0).unwrap();
        assert!(v["error"].as_str().unwrap().contains("converge"));
        assert!(v.get("ac").is_none());
        assert!(feeder_profile_impl(0.0, 1.0, 40.0, 0).is_err());
    }
}
