//! End-to-end runs of the `sgc` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sgc_core::output::Table;

fn sgc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgc")).current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = sgc(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn table(dir: &Path, name: &str) -> Table {
    Table::read_csv(&dir.join(name)).unwrap()
}

fn argmin(v: &[f64]) -> usize {
    (0..v.len()).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap()
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap()
}

#[test]
fn close_gain_doublet() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["probe-spectrum", "--preset", "fig3", "--config", &write(d.path(), "g.json", r#"{"delta1_min": -2, "delta1_max": 2}"#), "--points", "801", "--out", "s.csv"]);
    let t = table(d.path(), "s.csv");
    assert_eq!(t.columns, ["delta1", "re_chi", "im_chi", "slope"]);
    let x = t.column("delta1").unwrap();
    let im = t.column("im_chi").unwrap();
    let (left, right) = im.split_at(400);
    let l = x[argmin(left)];
    let r = x[400 + argmin(right)];
    // the lines overlap (width ~ γ2/2 against a splitting of 0.75), which pulls the maxima inward
    assert!(l > -0.75 && l < -0.5 && r > 0.5 && r < 0.75, "{l} {r}");
    assert!(left[argmin(left)] < 0.0 && right[argmin(right)] < 0.0);
    let at = |d: f64| im[x.iter().position(|&v| (v - d).abs() < 1e-9).unwrap()];
    assert!(at(-0.75) < 0.0 && at(0.75) < 0.0);
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn group_velocity_column_and_json_mirror() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["probe-spectrum", "--preset", "fig2b", "--points", "5", "--k-value", "100", "--json", "--out", "s.csv"]);
    let t = table(d.path(), "s.csv");
    let slope = t.column("slope").unwrap();
    let ratio = t.column("c_over_vg").unwrap();
    assert_eq!(ratio[2], 1.0 + 100.0 * slope[2]);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 5);
    assert_eq!(json[2]["slope"], slope[2]);
}

#[test]
fn interference_sweep_endpoints() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["interference-sweep", "--out", "full.csv"]);
    let full = table(d.path(), "full.csv");
    assert_eq!(full.columns, ["p", "slope_normalized"]);
    let s = full.column("slope_normalized").unwrap();
    assert_eq!(s.len(), 201);
    assert!(s.windows(2).all(|w| w[1] < w[0]));

    ok(d.path(), &["interference-sweep", "--config", &write(d.path(), "z.json", r#"{"p_values": [0]}"#), "--out", "zero.csv"]);
    ok(d.path(), &["interference-sweep", "--config", &write(d.path(), "o.json", r#"{"p_values": [1]}"#), "--out", "one.csv"]);
    let zero = table(d.path(), "zero.csv").rows;
    let one = table(d.path(), "one.csv").rows;
    assert_eq!(zero.len(), 1);
    assert!(zero[0][1] > 0.0);
    let most_negative = s.iter().cloned().fold(f64::INFINITY, f64::min);
    assert_eq!(one[0][1], most_negative);
}

#[test]
fn pump_sweep_files() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["pump-sweeps", "--preset", "fig6", "--points", "1001", "--out", "pop.csv"]);
    let pop = table(d.path(), "pop.csv");
    assert_eq!(pop.columns, ["delta2", "rho11", "rho22", "rho33"]);
    let rho11 = pop.column("rho11").unwrap();
    assert_eq!(pop.column("delta2").unwrap()[argmax(&rho11)], 0.0);
    let coh = table(d.path(), "pop_coherences.csv");
    assert_eq!(coh.columns, ["delta2", "re_rho23", "im_rho23", "re_rho34", "im_rho34"]);

    ok(d.path(), &["pump-sweeps", "--preset", "fig8", "--points", "3", "--out", "c.csv"]);
    let re23 = table(d.path(), "c_coherences.csv").column("re_rho23").unwrap()[1];
    assert!((re23 - 0.3).abs() < 0.01, "{re23}");
    ok(d.path(), &["pump-sweeps", "--preset", "fig8-perp", "--points", "3", "--out", "perp.csv"]);
    assert_eq!(table(d.path(), "perp_coherences.csv").column("re_rho23").unwrap()[1], 0.0);
}

#[test]
fn dressed_evolution_with_full_comparison() {
    let d = tempfile::tempdir().unwrap();
    let stdout = ok(d.path(), &["dressed-evolve", "--oracle-check", "--points", "201", "--out", "dyn.csv"]);
    let t = table(d.path(), "dyn.csv");
    assert_eq!(t.columns, ["t", "rho11", "rho_pp", "rho_mm", "rho_dd", "rho_1m", "rho11_full"]);
    let secular = t.column("rho11").unwrap();
    let full = t.column("rho11_full").unwrap();
    assert_eq!(secular[0], 0.0);
    let last = secular.len() - 1;
    assert!(secular[last] > 0.5);
    assert!(secular[last] > t.column("rho_pp").unwrap()[last] + t.column("rho_mm").unwrap()[last]);
    assert!((secular[last] - full[last]).abs() < 0.15 * full[last]);
    let summary: serde_json::Value = serde_json::from_str(stdout.lines().next().unwrap()).unwrap();
    assert!(summary["relative_difference"].as_f64().unwrap() < 0.15);
    assert!(summary["secular_steady_state"]["rho11"].as_f64().unwrap() > 0.8);
}

#[test]
fn dressed_evolution_without_interference_never_fills_the_upper_doublet() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["dressed-evolve", "--config", &write(d.path(), "c.json", r#"{"theta_deg": 90}"#), "--points", "51", "--emit-trajectory", "--out", "dyn.csv"]);
    assert!(table(d.path(), "dyn.csv").column("rho11").unwrap().iter().all(|&x| x == 0.0));
    let traj = table(d.path(), "dyn_trajectory.csv");
    assert_eq!(traj.columns.len(), 31);
    assert_eq!(traj.rows.len(), 51);
    assert!(traj.column("re_rho11").unwrap().iter().all(|&x| x == 0.0));
}

#[test]
fn every_preset_round_trips_through_emitted_params() {
    let d = tempfile::tempdir().unwrap();
    for name in sgc_core::presets::PRESET_NAMES {
        let out = format!("{name}.csv");
        ok(d.path(), &["probe-spectrum", "--preset", name, "--points", "41", "--emit-params", "--out", &out]);
        let params = d.path().join(format!("{name}_params.json"));
        let again = format!("{name}_again.csv");
        ok(d.path(), &["probe-spectrum", "--config", params.to_str().unwrap(), "--out", &again]);
        let a = std::fs::read(d.path().join(&out)).unwrap();
        let b = std::fs::read(d.path().join(&again)).unwrap();
        assert_eq!(a, b, "{name}");
    }
    for (cmd, name) in [("interference-sweep", "fig4"), ("pump-sweeps", "fig8"), ("dressed-evolve", "fig7")] {
        ok(d.path(), &[cmd, "--preset", name, "--points", "21", "--emit-params", "--out", "x.csv"]);
        ok(d.path(), &[cmd, "--config", "x_params.json", "--out", "y.csv"]);
        assert_eq!(std::fs::read(d.path().join("x.csv")).unwrap(), std::fs::read(d.path().join("y.csv")).unwrap(), "{cmd}");
    }
}

#[test]
fn liouvillian_dump() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["dump-liouvillian", "--preset", "fig5b", "--out", "l.json"]);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.path().join("l.json")).unwrap()).unwrap();
    assert_eq!(v["system_kind"], "V_THREE_LEVEL");
    assert_eq!(v["m0"].as_array().unwrap().len(), 8);
    ok(d.path(), &["probe-spectrum", "--points", "3", "--emit-liouvillian", "--out", "s.csv"]);
    assert!(PathBuf::from(d.path().join("s_liouvillian.json")).exists());
}

fn error_record(out: &Output) -> serde_json::Value {
    assert!(!out.status.success());
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.lines().last().unwrap()).unwrap()
}

#[test]
fn failures_exit_non_zero_with_a_record() {
    let d = tempfile::tempdir().unwrap();
    let e = error_record(&sgc(d.path(), &["probe-spectrum", "--points", "0"]));
    assert_eq!(e["error"], "validation");
    let e = error_record(&sgc(d.path(), &["probe-spectrum", "--preset", "fig42"]));
    assert_eq!(e["error"], "unknown_preset");
    let e = error_record(&sgc(d.path(), &["probe-spectrum", "--config", &write(d.path(), "u.json", r#"{"gamma_1": 1}"#)]));
    assert_eq!(e["error"], "json");
    let e = error_record(&sgc(d.path(), &["dressed-evolve", "--preset", "fig8", "--config", &write(d.path(), "l.json", r#"{"Delta2": 0.5}"#)]));
    assert_eq!(e["error"], "lock_violation");
    assert!(e["message"].as_str().unwrap().contains("Delta2"));
    let e = error_record(&sgc(d.path(), &["pump-sweeps", "--preset", "fig5b"]));
    assert_eq!(e["error"], "wrong_system_kind");
    let e = error_record(&sgc(d.path(), &["probe-spectrum", "--out", "/nonexistent/dir/x.csv"]));
    assert_eq!(e["error"], "io");
}
