use kerr_core::tebd::checkpoint::Checkpoint;
use kerr_core::tebd::{self, build_gates, evolve, SystemDims, TebdPreset};
use kerr_core::{InitialState, KerrParams};

fn short_run() -> (tebd::MatrixProductState, tebd::GateSet, tebd::TruncationReport) {
    let p = KerrParams::paper(4.0);
    let preset = TebdPreset { n_chain: 6, chi_max: 8, dims: SystemDims { system: 15, chain: 4 }, dt: 1e-2, t_end: 0.1, omega_c: 60.0 };
    let gates = build_gates(&p, &preset.coefficients(&p).unwrap(), preset.dt, preset.dims).unwrap();
    let mut s = tebd::init_state(&InitialState::new(1.0, 0.2).unwrap(), preset.dims, preset.n_chain, preset.chi_max).unwrap();
    let (_, rep) = evolve(&mut s, &gates, preset.t_end).unwrap();
    (s, gates, rep)
}

#[test]
fn round_trip_resumes_identically() {
    let (s, gates, rep) = short_run();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ck.json");
    Checkpoint::new(s.clone(), 10, rep.clone()).save(&path).unwrap();
    let back = Checkpoint::load(&path).unwrap();
    assert_eq!(back.step, 10);
    assert_eq!(back.truncation, rep);
    assert_eq!(back.state, s);

    let (mut a, mut b) = (s, back.state);
    let (ra, _) = evolve(&mut a, &gates, 0.05).unwrap();
    let (rb, _) = evolve(&mut b, &gates, 0.05).unwrap();
    assert_eq!(ra, rb);
}

#[test]
fn rejects_foreign_or_damaged_files() {
    let (s, _, rep) = short_run();
    let json = Checkpoint::new(s, 1, rep).to_json().unwrap();
    assert!(Checkpoint::from_json(&json.replace("kerr-mps-checkpoint", "other")).is_err());
    assert!(Checkpoint::from_json(&json.replacen("\"version\":1", "\"version\":9", 1)).is_err());
    assert!(Checkpoint::from_json(&json[..json.len() / 2]).is_err());
    let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
    v["state"]["local_dims"][0] = serde_json::json!(3);
    assert!(Checkpoint::from_json(&v.to_string()).is_err());
}
