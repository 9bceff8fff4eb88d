mod common;

use mdopf::feeder_io::{
    network_from_json, network_to_json, ohm_to_pu, parse_feeder, pu_to_ohm, pu_to_siemens,
    siemens_to_pu, write_feeder,
};
use mdopf::network::validate;
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn bundled_feeders_parse_and_validate() {
    for name in ["two_bus", "eight_bus_mixed"] {
        let net = parse_feeder(common::bundled_feeder(name)).unwrap();
        assert!(validate(&net).is_empty());
        assert_eq!(net.name, name);
    }
}

#[test]
fn write_then_parse_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mut nets = common::synthetic_feeders();
    nets.push(parse_feeder(common::bundled_feeder("eight_bus_mixed")).unwrap());
    for net in nets {
        let path = dir.path().join(format!("{}.json", net.name));
        write_feeder(&net, &path).unwrap();
        let back = parse_feeder(&path).unwrap();
        assert_eq!(back, net);
    }
}

#[test]
fn document_round_trip_is_exact() {
    let net = common::four_bus_mixed();
    let back = network_from_json(&network_to_json(&net), "x").unwrap();
    assert_eq!(back, net);
}

#[test]
fn per_bus_voltage_bases() {
    let text = r#"{
        "sbase_kva": 500,
        "vbase_kv": {"hv": 7.2, "lv": 2.4},
        "buses": [{"id": "hv", "phases": "a"}, {"id": "lv", "phases": "a"}],
        "lines": [{"id": "x", "from_bus": "lv", "to_bus": "hv", "phases": "a",
                   "z_ohm": [[[1, 2], [0, 0], [0, 0]], [[0, 0], [0, 0], [0, 0]], [[0, 0], [0, 0], [0, 0]]]}],
        "loads": [{"id": "l", "bus": "lv", "configuration": "wye", "phases": "a",
                   "model": "exponential", "alpha": 1, "beta": 2,
                   "s_kva": [[50, 10], [0, 0], [0, 0]]}],
        "shunts": [{"id": "c", "bus": "hv",
                    "y_s": [[[0, 0.001], [0, 0], [0, 0]], [[0, 0], [0, 0], [0, 0]], [[0, 0], [0, 0], [0, 0]]]}],
        "source": {"bus": "hv", "vref_pu": [[1, 0], [0, 0], [0, 0]]}
    }"#;
    let net = mdopf::feeder_io::parse_feeder_str(text, "t").unwrap();
    let z = net.lines[0].z_series[(0, 0)];
    // the line is converted on its from-bus base
    assert!((z - Complex64::new(1.0, 2.0) * 500.0 / (1000.0 * 2.4 * 2.4)).norm() < 1e-15);
    let y = net.shunts[0].y[(0, 0)];
    assert!((y.im - 0.001 * 1000.0 * 7.2 * 7.2 / 500.0).abs() < 1e-15);
    assert!((net.loads[0].s0[0] - Complex64::new(0.1, 0.02)).norm() < 1e-15);
}

proptest! {
    #[test]
    fn impedance_conversion_inverts(
        re in 1e-4f64..10.0, im in -10.0f64..10.0,
        sbase in 10.0f64..1e5, vbase in 0.1f64..100.0,
    ) {
        let z = Complex64::new(re, im);
        let back = pu_to_ohm(ohm_to_pu(z, sbase, vbase), sbase, vbase);
        prop_assert!((back - z).norm() / z.norm() <= 1e-12);
        let back = pu_to_siemens(siemens_to_pu(z, sbase, vbase), sbase, vbase);
        prop_assert!((back - z).norm() / z.norm() <= 1e-12);
    }
}
