//! Closed-form steady state against a 200-digit reference table.

use kerr_core::{exact_steady, KerrParams, C64};
use serde_json::Value;

fn table() -> Value {
    serde_json::from_str(include_str!("fixtures/exact_steady_reference.json")).unwrap()
}

fn complex(v: &Value) -> C64 {
    C64::new(v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn series_and_moments_match_reference() {
    let t = table();
    let rows = t["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 80);
    for r in rows {
        let e = r["drive"].as_f64().unwrap();
        let p = KerrParams::paper(e);
        let h = exact_steady::HyperParams::from_params(&p).unwrap();
        let z = C64::new(h.z, 0.0);
        let f = exact_steady::hyper0f2(h.p, h.q, z).unwrap();
        let f1 = exact_steady::hyper0f2(h.p + 1.0, h.q, z).unwrap();
        let fr = complex(&r["f_pq"]);
        assert!((f - fr).norm() / fr.norm() < 1e-12, "E={e}: {f} vs {fr}");
        assert!((f1 - complex(&r["f_p1q"])).norm() / fr.norm() < 1e-12, "E={e}");
        let a = exact_steady::mean_field(&p).unwrap();
        let ar = complex(&r["mean_field"]);
        assert!((a - ar).norm() / ar.norm() < 1e-10, "E={e}: {a} vs {ar}");
        let n = exact_steady::photon_number(&p).unwrap();
        let nr = r["photon_number"].as_f64().unwrap();
        assert!((n - nr).abs() / nr < 1e-10, "E={e}: {n} vs {nr}");
        let g2 = exact_steady::g2_zero(&p).unwrap();
        let gr = r["g2"].as_f64().unwrap();
        assert!((g2 - gr).abs() / gr < 1e-10, "E={e}: {g2} vs {gr}");
    }
}

#[test]
fn quoted_photon_numbers() {
    for (e, n) in [(8.0, 1.0322625275), (10.0, 4.4167392748), (20.0, 6.6458946549)] {
        let got = exact_steady::photon_number(&KerrParams::paper(e)).unwrap();
        assert!((got - n).abs() < 1e-9, "E={e}: {got}");
    }
}
