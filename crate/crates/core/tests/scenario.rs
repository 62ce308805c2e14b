use std::fs;

use optomech::scenario::*;
use optomech::Error;
use serde_json::{json, Value};

/// Small driven transfer network that runs in milliseconds.
fn tiny() -> Value {
    json!({
        "name": "tiny",
        "space": {"c1": 3, "m": 2, "c2": 3},
        "params": {"Omega1": [2.0, 2.0], "Omega2": [2.0, 2.0]},
        "initial_state": {"c1": {"fock": 1}},
        "run": {"time_evolution": {"t1": 1.0, "samples": 11}},
        "measurements": [
            {"fidelity": {"reference": "c1", "target": "c2"}},
            {"number": {"mode": "c1"}},
            {"quadrature": {"mode": "c2", "name": "qc2"}},
            {"population": {"label": [0, 0, 1, 0, 0]}}
        ]
    })
}

fn parse(v: Value) -> optomech::Result<Scenario> {
    Scenario::from_value(v, &Overrides::default())
}

fn edit(mut v: Value, path: &str, x: Value) -> Value {
    set_path(&mut v, path, x).unwrap();
    v
}

#[test]
fn minimal_config_gets_documented_defaults() {
    let sc = parse(json!({"name": "bare"})).unwrap();
    assert_eq!(sc.space.truncations(), TRANSFER_TRUNCATIONS);
    assert_eq!(sc.output.dir.as_deref(), Some("out/bare"));
    assert!(matches!(sc.run, RunConfig::TimeEvolution(_)));
    assert!(sc.hamiltonian.effective && sc.hamiltonian.drive);

    let steady = parse(json!({
        "name": "bare_ss",
        "params": {"kappa_a": [0.1, 0.1]},
        "dissipation": {"enabled": true},
        "run": {"steady_state": {}}
    }))
    .unwrap();
    assert_eq!(steady.space.truncations(), STEADY_TRUNCATIONS);
}

#[test]
fn shipped_scenarios_parse_and_round_trip() {
    for entry in library() {
        let sc = entry.load(&Overrides::default()).unwrap();
        assert_eq!(sc.name, entry.name);
        assert!(!entry.description().is_empty(), "{} lacks a description", entry.name);
        let again = parse(sc.to_json()).unwrap();
        assert_eq!(again, sc, "{} does not round-trip", entry.name);
    }
}

#[test]
fn unknown_keys_are_listed() {
    let v = edit(tiny(), "params.kapa_b", json!(0.1));
    let v = edit(v, "run.time_evolution.sample", json!(3));
    match parse(v) {
        Err(Error::UnknownKeys(keys)) => {
            assert!(keys.iter().any(|k| k.contains("kapa_b")), "{keys:?}");
            assert!(keys.iter().any(|k| k.contains("sample")), "{keys:?}");
        }
        other => panic!("expected unknown keys, got {other:?}"),
    }
}

#[test]
fn zero_detuning_is_a_model_regime_error() {
    let err = parse(edit(tiny(), "params.Delta", json!([0.0, -1.0]))).unwrap_err();
    assert!(matches!(err, Error::ModelRegime(_)), "{err}");
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("Delta[0]"));
}

#[test]
fn physical_and_schema_violations_name_their_path() {
    let cases = [
        ("params.kappa_b", json!(-0.1), "kappa_b"),
        ("space.m", json!(1), "space.m"),
        ("initial_state.a1", json!({"squeezed": {"r": 0.1}}), "initial_state.a1"),
    ];
    for (path, value, needle) in cases {
        let err = parse(edit(tiny(), path, value)).unwrap_err();
        assert_eq!(err.exit_code(), 1, "{err}");
        assert!(err.to_string().contains(needle), "{err}");
    }
}

#[test]
fn dissipation_toggle_must_match_rates() {
    let lossy = edit(tiny(), "params.kappa_a", json!([0.1, 0.1]));
    assert!(matches!(parse(lossy.clone()), Err(Error::Config { .. })));
    assert!(parse(edit(lossy, "dissipation.enabled", json!(true))).is_ok());
    assert!(matches!(
        parse(edit(tiny(), "dissipation.enabled", json!(true))),
        Err(Error::Config { .. })
    ));
}

#[test]
fn overrides_apply_before_validation() {
    let o = Overrides {
        set: vec!["params.q=0.25".into(), "description=edited".into()],
        truncation: vec!["c2=5".into()],
        tolerance: Some(1e-9),
    };
    let sc = Scenario::from_value(tiny(), &o).unwrap();
    assert_eq!(sc.params.q, 0.25);
    assert_eq!(sc.description, "edited");
    assert_eq!(sc.space.truncations(), [3, 2, 5]);
    match &sc.run {
        RunConfig::TimeEvolution(e) => assert_eq!(e.rtol, Some(1e-9)),
        other => panic!("{other:?}"),
    }
    let bad = Overrides {
        truncation: vec!["a1=4".into()],
        ..Default::default()
    };
    assert!(Scenario::from_value(tiny(), &bad).is_err());
}

#[test]
fn table_has_one_row_per_sample_and_declared_columns() {
    let sc = parse(tiny()).unwrap();
    let b = run(&sc).unwrap();
    assert_eq!(b.table.columns, ["t", "F_c2", "n_c1", "qc2", "P_00100"]);
    assert_eq!(b.table.rows.len(), 11);
    assert_eq!(b.diagnostics.path, "vector");
    // Fidelity of |1> against the vacuum start of cavity 2.
    assert!(b.column("F_c2").unwrap()[0].abs() < 1e-12);
    assert!((b.column("n_c1").unwrap()[0] - 1.0).abs() < 1e-12);
    assert!((b.column("P_00100").unwrap()[0] - 1.0).abs() < 1e-12);
}

#[test]
fn zero_duration_grid_reports_initial_measurements() {
    let v = edit(tiny(), "run.time_evolution", json!({"t0": 0.0, "t1": 0.0, "samples": 1}));
    let b = run(&parse(v).unwrap()).unwrap();
    assert_eq!(b.table.rows.len(), 1);
    assert_eq!(b.column("t").unwrap(), [0.0]);
    assert!((b.column("qc2").unwrap()[0] - 0.25).abs() < 1e-12);
}

#[test]
fn runs_are_deterministic_and_emission_is_atomic() {
    let dir = tempfile::tempdir().unwrap();
    let sc = parse(tiny()).unwrap();
    let first = table_csv(&run(&sc).unwrap().table);
    let files = emit(&run(&sc).unwrap(), dir.path()).unwrap();
    emit(&run(&sc).unwrap(), dir.path()).unwrap();
    let on_disk = fs::read_to_string(&files[0]).unwrap();
    assert_eq!(first, on_disk);
    assert!(!on_disk.contains('\r'));
    let header = on_disk.lines().next().unwrap();
    assert_eq!(header, "t,F_c2,n_c1,qc2,P_00100");
    let leftovers: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");
}

#[test]
fn numbers_are_written_with_seventeen_digits() {
    assert_eq!(format_num(0.1), "1.0000000000000001e-1");
    assert_eq!(format_num(-2.5), "-2.5000000000000000e0");
    let x = 0.123_456_789_012_345_67_f64;
    assert_eq!(format_num(x).parse::<f64>().unwrap(), x);
}

#[test]
fn metadata_echo_reproduces_the_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let sc = parse(tiny()).unwrap();
    let files = emit(&run(&sc).unwrap(), dir.path()).unwrap();
    let meta: Value = serde_json::from_str(&fs::read_to_string(files.last().unwrap()).unwrap()).unwrap();
    assert_eq!(parse(meta["config"].clone()).unwrap(), sc);
    assert!(meta["timestamp"].as_str().is_some());
    assert!(meta["diagnostics"]["max_drift"].as_f64().unwrap() < 1e-7);
}

#[test]
fn vacuum_wigner_snapshot_peaks_at_one_over_pi() {
    let v = edit(
        tiny(),
        "measurements",
        json!([{"wigner": {"mode": "c2", "times": [0.0], "grid": {"x": [-2, 2], "p": [-2, 2], "resolution": 41}}}]),
    );
    let dir = tempfile::tempdir().unwrap();
    let b = run(&parse(v).unwrap()).unwrap();
    assert_eq!(b.wigners.len(), 1);
    let files = emit(&b, dir.path()).unwrap();
    let text = fs::read_to_string(&files[1]).unwrap();
    let rows: Vec<[f64; 3]> = text
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect();
    assert_eq!(rows.len(), 41 * 41);
    let peak = rows.iter().max_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
    assert!(peak[0].abs() < 1e-12 && peak[1].abs() < 1e-12);
    assert!((peak[2] - std::f64::consts::FRAC_1_PI).abs() < 1e-9);
}

fn sweep(values: Value, measurements: Value) -> Value {
    let inner = tiny()["run"].clone();
    let v = edit(
        tiny(),
        "run",
        json!({"sweep": {
            "axes": [{"name": "Omega", "targets": {"params.Omega1[0]": 1.0, "params.Omega2[1]": 0.5}, "values": values}],
            "inner": inner
        }}),
    );
    edit(v, "measurements", measurements)
}

#[test]
fn single_value_sweep_matches_plain_run() {
    let fid = json!([{"fidelity": {"reference": "c1", "target": "c2"}}]);
    let sc = parse(sweep(json!([2.0]), fid.clone())).unwrap();
    let b = run(&sc).unwrap();
    assert_eq!(b.table.columns, ["point", "Omega", "measurement", "t", "value", "error"]);
    assert_eq!(b.table.rows.len(), 1);

    let mut plain = edit(tiny(), "measurements", fid);
    set_path(&mut plain, "params.Omega2[1]", json!(1.0)).unwrap();
    let p = run(&parse(plain).unwrap()).unwrap();
    let f = p.column("F_c2").unwrap();
    let t2 = p.diagnostics.t2.unwrap();
    let k = p.column("t").unwrap().iter().position(|&t| t == t2).unwrap();
    assert_eq!(b.column("value").unwrap()[0], f[k]);
    assert_eq!(b.column("t").unwrap()[0], t2);
}

#[test]
fn failing_sweep_point_becomes_an_error_row() {
    let meas = json!([
        {"fidelity": {"reference": "c1", "target": "c2"}},
        {"number": {"mode": "m"}}
    ]);
    let mut v = sweep(json!([1.0, 2.0]), meas);
    // The second point squeezes beyond what truncation 3 can hold.
    set_path(
        &mut v,
        "run.sweep.axes[0].targets",
        json!({"params.Omega1[0]": 1.0, "initial_state.c1.squeezed.r": 0.15}),
    )
    .unwrap();
    set_path(&mut v, "initial_state.c1", json!({"squeezed": {"r": 0.15}})).unwrap();
    let b = run(&parse(v).unwrap()).unwrap();
    assert_eq!(b.diagnostics.sweep_points, Some(2));
    assert_eq!(b.diagnostics.sweep_errors, Some(1));
    // two measurements for the good point plus one error row
    assert_eq!(b.table.rows.len(), 3);
    let last = b.table.rows.last().unwrap();
    match last.last().unwrap() {
        Cell::Text(msg) => assert!(msg.contains("truncation"), "{msg}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn zipped_sweep_pairs_axis_values() {
    let mut v = sweep(json!([1.0, 2.0, 3.0]), json!([{"number": {"mode": "c1"}}]));
    let axes = v["run"]["sweep"]["axes"].as_array_mut().unwrap();
    axes.push(json!({"name": "q", "targets": {"params.q": 1.0}, "values": [0.0, 0.1, 0.2]}));
    let mut zipped = v.clone();
    set_path(&mut zipped, "run.sweep.zip", json!(true)).unwrap();
    assert_eq!(run(&parse(v).unwrap()).unwrap().table.rows.len(), 9);
    let z = run(&parse(zipped.clone()).unwrap()).unwrap();
    assert_eq!(z.table.rows.len(), 3);
    assert_eq!(z.column("q").unwrap(), [0.0, 0.1, 0.2]);

    let axes = zipped["run"]["sweep"]["axes"].as_array_mut().unwrap();
    axes[1]["values"] = json!([0.0]);
    assert!(matches!(parse(zipped), Err(Error::Config { .. })));
}

#[test]
fn steady_state_run_reports_one_row() {
    let v = json!({
        "name": "cavity_ss",
        "space": {"c1": 4, "m": 2, "c2": 2},
        "params": {"g": [0.0, 0.0], "kappa_a": [1.0, 1.0], "nbar_c": [0.2, 0.0]},
        "initial_state": {"c1": {"fock": 2}},
        "dissipation": {"enabled": true},
        "run": {"steady_state": {"criteria": {"window": 5.0, "check_every": 1.0}}},
        "measurements": [{"number": {"mode": "c1"}}, {"wigner": {"mode": "c1"}}]
    });
    let b = run(&parse(v).unwrap()).unwrap();
    assert_eq!(b.table.rows.len(), 1);
    let steady = b.diagnostics.steady.as_ref().unwrap();
    assert!(steady.residual < 1e-8);
    assert_eq!(b.wigners.len(), 1);
    // truncated thermal mean at n̄ = 0.2
    let z = 1.2f64;
    let p: Vec<f64> = (0..4).map(|n| (0.2 / z).powi(n) / z).collect();
    let mean: f64 = p.iter().enumerate().map(|(n, x)| n as f64 * x).sum::<f64>() / p.iter().sum::<f64>();
    assert!((b.column("n_c1").unwrap()[0] - mean).abs() < 1e-6);
}

#[test]
fn rwa_validation_produces_one_column_per_lambda() {
    let v = json!({
        "name": "rwa_tiny",
        "space": {"c1": 2, "m": 2, "c2": 2},
        "params": {"g": [10.0, 10.0], "Omega1": [1.0, 1.0], "Omega2": [1.0, 1.0]},
        "initial_state": {"c1": {"fock": 1}},
        "run": {"rwa_validation": {"t1": 2.0, "samples": 5, "lambdas": [0.01, 0.02]}}
    });
    let b = run(&parse(v).unwrap()).unwrap();
    assert_eq!(b.table.columns, ["t", "F_rwa_0.01", "F_rwa_0.02"]);
    assert_eq!(b.diagnostics.rwa_min_fidelity.len(), 2);
    assert_eq!(b.column("F_rwa_0.01").unwrap()[0], 1.0);

    let too_big = edit(v_with(json!([0.2])), "name", json!("x"));
    assert!(matches!(parse(too_big), Err(Error::ModelRegime(_))));
}

fn v_with(lambdas: Value) -> Value {
    json!({
        "name": "rwa",
        "space": {"c1": 2, "m": 2, "c2": 2},
        "run": {"rwa_validation": {"t1": 1.0, "samples": 3, "lambdas": lambdas}}
    })
}

#[test]
fn library_lookup() {
    assert!(lookup("fig5a").is_ok());
    assert_eq!(lookup("nope").unwrap_err().exit_code(), 1);
    assert_eq!(library().len(), 14);
}
