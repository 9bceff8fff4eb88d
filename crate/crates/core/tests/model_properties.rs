mod common;

use mdopf::ac_oracle::{power_mismatch, sweep_solve, SweepConfig};
use mdopf::experiments::{run_exponent_sweep, series_losses};
use mdopf::feeder_io::parse_feeder;
use mdopf::lp_solver::{assemble, check_operational_limits, solve_network};
use mdopf::{balanced_vref, CMat3, CVec3, ModelConfig, Network};
use num_complex::Complex64;
use proptest::prelude::*;

fn bundled(name: &str) -> Network {
    parse_feeder(common::bundled_feeder(name)).unwrap()
}

#[test]
fn linear_model_is_lossless() {
    for net in common::synthetic_feeders().into_iter().chain([bundled("eight_bus_mixed")]) {
        let s = solve_network(&net, &ModelConfig::lp_d_e()).unwrap();
        let loads: Complex64 = s.sb.iter().flat_map(|v| v.iter()).sum();
        let mut shunts = Complex64::new(0.0, 0.0);
        let bus = |id: &str| net.bus_index(id).unwrap();
        let draw = |w: &CMat3, y: &CMat3| (w * y.adjoint()).trace();
        for sh in &net.shunts {
            shunts += draw(&s.w[bus(&sh.bus)], &sh.y);
        }
        for l in &net.lines {
            shunts += draw(&s.w[bus(&l.from_bus)], &l.ysh_from);
            shunts += draw(&s.w[bus(&l.to_bus)], &l.ysh_to);
        }
        let slack: Complex64 = s.s_slack.iter().sum();
        assert!((slack - loads - shunts).norm() < 1e-12, "{}", net.name);
        for w in &s.w {
            assert!((w - w.adjoint()).camax() < 1e-15);
        }
    }
}

#[test]
fn gap_equals_losses_for_constant_loads_without_conductance() {
    // constant loads draw the same total in both models and lossless shunts
    // draw no real power, so the objective gap is exactly the series loss
    for net in [bundled("two_bus"), bundled("eight_bus_mixed")] {
        let r = &run_exponent_sweep(&net, &[0.0])[0];
        let gap = r.obj_ac.unwrap() - r.obj_lp.unwrap();
        assert!((gap - r.ac_losses.unwrap()).abs() <= 1e-9 * r.obj_ac.unwrap(), "{}", net.name);
    }
}

#[test]
fn exact_model_conserves_power_on_bundled_feeders() {
    for name in ["two_bus", "eight_bus_mixed"] {
        let net = bundled(name);
        for cfg in [SweepConfig::ac_d_e(), SweepConfig::ac_d(), SweepConfig::ac_w_e()] {
            let st = sweep_solve(&net, &cfg).unwrap();
            assert!(power_mismatch(&net, &st).unwrap() < 1e-8);
            let loads: f64 = st.sb.iter().flat_map(|v| v.iter()).map(|z| z.re).sum();
            let loss = series_losses(&net, &st);
            assert!((st.objective() - loads - loss).abs() < 1e-8);
        }
    }
}

#[test]
fn nominal_solution_within_limits() {
    let net = bundled("eight_bus_mixed");
    let s = solve_network(&net, &ModelConfig::lp_d_e()).unwrap();
    assert!(check_operational_limits(&s, &net).is_empty());
}

#[test]
fn delta_as_wye_changes_only_delta_feeders() {
    let cfg = ModelConfig {
        delta_as_wye: true,
        ..ModelConfig::lp_d_e()
    };
    let wye = common::two_bus_wye();
    let a = assemble(&wye, &ModelConfig::lp_d_e()).unwrap();
    let b = assemble(&wye, &cfg).unwrap();
    assert_eq!(a.matrix.entries, b.matrix.entries);
    assert_eq!(a.rhs, b.rhs);
    let delta = common::three_bus_delta();
    let a = solve_network(&delta, &ModelConfig::lp_d_e()).unwrap();
    let b = solve_network(&delta, &cfg).unwrap();
    assert!((a.sb[0] - b.sb[0]).camax() > 1e-3);
}

#[test]
fn reversed_line_storage_gives_same_solution() {
    let net = common::three_bus_delta();
    let mut flipped = net.clone();
    for line in &mut flipped.lines {
        std::mem::swap(&mut line.from_bus, &mut line.to_bus);
        std::mem::swap(&mut line.ysh_from, &mut line.ysh_to);
    }
    let a = solve_network(&net, &ModelConfig::lp_d_e()).unwrap();
    let b = solve_network(&flipped, &ModelConfig::lp_d_e()).unwrap();
    assert!((a.objective - b.objective).abs() < 1e-14);
    for (x, y) in a.w.iter().zip(&b.w) {
        assert!((x - y).camax() < 1e-14);
    }
}

fn max_w_gap(scale: f64, vbar: f64) -> f64 {
    let mut net = common::scaled_loads(&common::four_bus_mixed(), scale).with_vref(balanced_vref(vbar));
    net.shunts.clear();
    for l in &mut net.lines {
        l.ysh_from = CMat3::zeros();
        l.ysh_to = CMat3::zeros();
    }
    let lp = solve_network(&net, &ModelConfig::lp_d_e()).unwrap();
    let ac = sweep_solve(&net, &SweepConfig::default()).unwrap();
    (0..net.buses.len())
        .flat_map(|b| {
            let (x, y) = (lp.w_diag(b), ac.w_diag(b));
            (0..3).map(move |k| (x[k] - y[k]).abs())
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // Without shunt currents the two models differ only through the load.
    // At a nominal source the error is second order in the load; off
    // nominal the load tangent adds a first-order term.
    #[test]
    fn light_load_models_agree(scale in 1e-4f64..1e-2, vbar in 0.95f64..1.05) {
        let nominal = max_w_gap(scale, 1.0);
        prop_assert!(nominal <= 1e-3 * scale * scale + 1e-14, "{nominal:e}");
        let off = max_w_gap(scale, vbar);
        prop_assert!(off <= 1e-4 * scale + 1e-14, "{off:e}");
    }

    // A balanced feeder with identical phases keeps diag(W) equal across phases.
    #[test]
    fn balanced_feeder_stays_balanced(p in 0.01f64..0.3, q in 0.0f64..0.2, alpha in 0.0f64..3.0) {
        let mut net = common::two_bus_wye();
        net.loads[0].s0 = CVec3::from_element(Complex64::new(p, q));
        let net = net.with_uniform_exponent(alpha);
        let s = solve_network(&net, &ModelConfig::lp_d_e()).unwrap();
        let d = s.w_diag(1);
        prop_assert!((d[0] - d[1]).abs() < 1e-14 && (d[1] - d[2]).abs() < 1e-14);
    }
}
