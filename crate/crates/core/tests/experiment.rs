use std::fs;

use tdgl_core::experiment::*;
use tdgl_core::io::{read_diagnostics_csv, read_errors_csv, read_rates_csv};
use tdgl_core::Error;

fn cfg(scheme: SchemeKind, m: usize, dir: &std::path::Path) -> RunConfig {
    RunConfig {
        output_dir: dir.to_path_buf(),
        ..RunConfig::new(scheme, m)
    }
}

#[test]
fn config_json_round_trip_and_strictness() {
    let c = RunConfig::new(SchemeKind::Direct, 32);
    let text = serde_json::to_string(&c).unwrap();
    assert!(
        text.contains("\"M\":32")
            && text.contains("\"T\":1.0")
            && text.contains("\"tau_rule\":\"equal_h\"")
    );
    assert_eq!(RunConfig::from_json(&text).unwrap(), c);
    let minimal = RunConfig::from_json(r#"{"scheme":"hodge","M":16}"#).unwrap();
    assert_eq!(minimal.resolved_tau().unwrap(), 1.0 / 16.0);
    assert!(matches!(
        RunConfig::from_json(r#"{"scheme":"hodge","M":16,"Tau":0.1}"#),
        Err(Error::Config(_))
    ));
    let both = RunConfig::from_json(r#"{"scheme":"hodge","M":16,"tau":0.05,"tau_rule":"equal_h"}"#)
        .unwrap();
    assert!(both.validate().is_err());
}

#[test]
fn invalid_configs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = cfg(SchemeKind::Hodge, 16, dir.path());
    c.tau = Some(0.3);
    c.tau_rule = None;
    assert!(matches!(cmd_run(&c), Err(Error::Config(_))));
    let c = cfg(SchemeKind::Hodge, 15, dir.path());
    assert!(matches!(cmd_run(&c), Err(Error::MeshParameter { .. })));
    let c = RunConfig {
        kappa: 5.0,
        ..cfg(SchemeKind::Hodge, 16, dir.path())
    };
    assert!(matches!(cmd_run(&c), Err(Error::Config(_))));
}

#[test]
fn zero_final_time_gives_zero_errors() {
    let dir = tempfile::tempdir().unwrap();
    for scheme in [SchemeKind::Hodge, SchemeKind::Direct] {
        let c = RunConfig {
            t_final: 0.0,
            ..cfg(scheme, 8, dir.path())
        };
        let out = cmd_run(&c).unwrap();
        let e = out.errors;
        assert_eq!([e.e_psi, e.e_mod_psi, e.e_a, e.e_u, e.e_v], [0.0; 5]);
        assert_eq!(out.diagnostics.len(), 1);
    }
}

#[test]
fn run_writes_golden_errors_and_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    cmd_run(&cfg(SchemeKind::Hodge, 16, a.path())).unwrap();
    cmd_run(&cfg(SchemeKind::Hodge, 16, b.path())).unwrap();
    for f in ["errors.csv", "diagnostics.csv"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
    let rows = read_errors_csv(&a.path().join("errors.csv")).unwrap();
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!((r.h, r.tau, r.scheme.as_str()), (0.0625, 0.0625, "hodge"));
    // frozen from the first run of this implementation
    let golden = [
        3.7978360763396644e-3,
        3.4058699323695637e-3,
        3.7170526966537748e-2,
        2.1615856146812728e-2,
        2.3470603730259009e-2,
    ];
    for (got, want) in [r.e_psi, r.e_mod_psi, r.e_a, r.e_u, r.e_v]
        .iter()
        .zip(golden)
    {
        assert!(
            (got - want).abs() <= 1e-9 * want,
            "{got:.16e} vs {want:.16e}"
        );
    }
    let diags = read_diagnostics_csv(&a.path().join("diagnostics.csv")).unwrap();
    assert_eq!(diags.len(), 17);
    assert_eq!(diags.last().unwrap().step, 16);
}

#[test]
fn exports_are_written_on_request() {
    let dir = tempfile::tempdir().unwrap();
    for scheme in [SchemeKind::Hodge, SchemeKind::Direct] {
        let out = dir.path().join(scheme.tag());
        let c = RunConfig {
            export_fields: true,
            export_matrices: true,
            snapshot_times: vec![0.0, 0.5],
            ..cfg(scheme, 8, &out)
        };
        cmd_run(&c).unwrap();
        for f in [
            "fields_00000.vtk",
            "fields_00004.vtk",
            "fields_00008.vtk",
            "psi_system_step1.mtx",
        ] {
            assert!(out.join(f).exists(), "{scheme:?} {f}");
        }
    }
}

#[test]
fn study_writes_rates_and_flags_single_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let c = cfg(SchemeKind::Hodge, 16, dir.path());
    let table = cmd_convergence_study(&c, &[8, 16]).unwrap();
    assert_eq!(table.runs.len(), 2);
    let rates = table.rates.unwrap();
    assert!(rates.iter().all(|r| r.is_finite()));
    assert_eq!(
        read_rates_csv(&dir.path().join("rates.csv")).unwrap(),
        table
    );
    assert!(dir.path().join("M8").join("errors.csv").exists());

    let single = cmd_convergence_study(&c, &[8]).unwrap();
    assert!(single.rates.is_none());
    assert!(cmd_convergence_study(&c, &[16, 8]).is_err());
}

#[test]
fn compare_produces_two_rows_and_identical_psi_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let out = cmd_compare(&cfg(SchemeKind::Hodge, 16, dir.path())).unwrap();
    assert!(out.psi_matrices_identical);
    let rows = read_errors_csv(&dir.path().join("compare.csv")).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].h, rows[1].h);
    assert_eq!(
        (rows[0].scheme.as_str(), rows[1].scheme.as_str()),
        ("hodge", "direct")
    );
    assert!(out.hodge.e_a < out.direct.e_a);
}
