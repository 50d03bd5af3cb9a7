use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_g2ambient"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run_config(text: &str, extra: &[&str]) -> (Output, toml::Table) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.toml", text);
    let out = bin().arg("--config").arg(&cfg).args(extra).output().unwrap();
    let report: toml::Table = String::from_utf8(out.stdout.clone()).unwrap().parse().unwrap();
    (out, report)
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn get<'a>(t: &'a toml::Table, path: &str) -> &'a toml::Value {
    let mut cur: &toml::Value = t.get(path.split('.').next().unwrap()).unwrap_or_else(|| panic!("missing {path}"));
    for k in path.split('.').skip(1) {
        cur = cur.get(k).unwrap_or_else(|| panic!("missing {path}"));
    }
    cur
}

fn verdict(report: &toml::Table, name: &str) -> bool {
    report["verdict"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["name"].as_str() == Some(name))
        .unwrap_or_else(|| panic!("no verdict {name}"))["pass"]
        .as_bool()
        .unwrap()
}

const EINSTEIN_5: &str = r#"
command = "fg-expand"
dimension = 5
x_order = 6
rho_order = 2
[metric]
diagonal = ["1", "1", "1", "1", "1"]
conformal_factor = "1/(1 + (x1^2 + x2^2 + x3^2 + x4^2 + x5^2)/4)^2"
"#;

#[test]
fn fg_expand_on_einstein_seed_matches_closed_form_pattern() {
    let (out, rep) = run_config(EINSTEIN_5, &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(verdict(&rep, "einstein_pattern"));
    assert!(verdict(&rep, "initial_term"));
    assert!(verdict(&rep, "ricci_order"));
    assert_eq!(get(&rep, "results.einstein_constant.value").as_str(), Some("1/2"));
    let coeffs = get(&rep, "results.rho_coefficients").as_array().unwrap();
    // (1 + ρ/2)² = 1 + ρ + ρ²/4 at the base point, where g = δ
    for (m, want) in [(0, "1"), (1, "1"), (2, "1/4")] {
        let v = &coeffs[m]["base_point_value"];
        assert_eq!(v[0][0].as_str(), Some(want));
        assert_eq!(v[0][1].as_str(), Some("0"));
    }
    assert_eq!(get(&rep, "outcome.status").as_str(), Some("pass"));
}

#[test]
fn fg_expand_on_even_einstein_seed_uses_closed_form() {
    let cfg = r#"
command = "fg-expand"
x_order = 6
rho_order = 3
[metric]
diagonal = ["1", "1", "1", "1"]
conformal_factor = "1/(1 - (x1^2 + x2^2 + x3^2 + x4^2)/2)^2"
"#;
    let (out, rep) = run_config(cfg, &[]);
    assert_eq!(code(&out), 0);
    assert_eq!(get(&rep, "results.method").as_str(), Some("einstein-closed-form"));
    assert_eq!(get(&rep, "results.einstein_constant.value").as_str(), Some("-1"));
    assert!(verdict(&rep, "einstein_pattern"));
}

#[test]
fn fg_expand_on_non_einstein_metric_reports_no_pattern() {
    let cfg = r#"
command = "fg-expand"
x_order = 5
rho_order = 1
[metric]
matrix = [["1 + x2^2", "x1*x3", "0", "0", "0"],
          ["x1*x3", "1", "0", "0", "0"],
          ["0", "0", "1", "x4", "0"],
          ["0", "0", "x4", "1", "0"],
          ["0", "0", "0", "0", "1 + 1/3*x5^3"]]
[expect]
einstein = false
"#;
    let (out, rep) = run_config(cfg, &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(verdict(&rep, "initial_term"));
    assert!(verdict(&rep, "expect_einstein"));
    assert!(get(&rep, "results").get("einstein_constant").is_none());
}

#[test]
fn check_2plane_flat_model() {
    let cfg = "command = \"check-2plane\"\n[two_plane]\nF = \"q^2\"\n";
    let (out, rep) = run_config(cfg, &[]);
    assert_eq!(code(&out), 0);
    assert_eq!(get(&rep, "results.generic").as_bool(), Some(true));
    assert_eq!(get(&rep, "results.quartic_is_zero").as_bool(), Some(true));
    for i in 0..5 {
        assert_eq!(get(&rep, &format!("results.quartic.A{i}.value")).as_str(), Some("0"));
    }
    assert_eq!(get(&rep, "results.l_rank.value").as_integer(), Some(0));
    assert_eq!(get(&rep, "results.l_rank.provenance").as_str(), Some("computed"));
    assert_eq!(get(&rep, "results.l_injective").as_bool(), Some(false));
}

#[test]
fn check_2plane_float_mode_agrees() {
    let cfg = "command = \"check-2plane\"\n[two_plane]\nF = \"q^2 + q^6 + 1/5*x*y*q^3\"\n";
    let (out_e, rep_e) = run_config(cfg, &[]);
    let (out_f, rep_f) = run_config(cfg, &["--mode", "float", "--tol", "1e-8"]);
    assert_eq!(code(&out_e), 0);
    assert_eq!(code(&out_f), 0);
    assert_eq!(get(&rep_f, "run.mode").as_str(), Some("float"));
    for i in 0..5 {
        let e = get(&rep_e, &format!("results.quartic.A{i}.value")).as_str().unwrap();
        let (n, d) = e.split_once('/').unwrap_or((e, "1"));
        let e = n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap();
        let f = get(&rep_f, &format!("results.quartic.A{i}.value")).as_float().unwrap();
        assert!((e - f).abs() < 1e-7 * (1.0 + e.abs()), "A{i}: {e} vs {f}");
    }
    assert_eq!(get(&rep_e, "results.l_rank.value"), get(&rep_f, "results.l_rank.value"));
}

#[test]
fn check_2plane_quartic_expectation() {
    let cfg = r#"
command = "check-2plane"
[two_plane]
F = "q^2 + q^6"
[expect]
quartic = ["36", "0", "0", "0", "0"]
"#;
    let (out, rep) = run_config(cfg, &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(verdict(&rep, "expect_quartic"));
    let wrong = cfg.replace("\"36\"", "\"35\"");
    let (out, rep) = run_config(&wrong, &[]);
    assert_eq!(code(&out), 1);
    assert!(!verdict(&rep, "expect_quartic"));
}

#[test]
fn non_generic_field_fails_the_check() {
    let cfg = "command = \"check-2plane\"\n[two_plane]\nF = \"p^2\"\n";
    let (out, rep) = run_config(cfg, &[]);
    assert_eq!(code(&out), 1);
    assert!(!verdict(&rep, "generic"));
    assert_eq!(get(&rep, "outcome.status").as_str(), Some("fail"));
}

#[test]
fn failed_expectation_gives_exit_one() {
    let cfg = "command = \"check-2plane\"\n[two_plane]\nF = \"q^2\"\n[expect]\nl_rank = 6\n";
    let (out, rep) = run_config(cfg, &[]);
    assert_eq!(code(&out), 1);
    let failed = get(&rep, "outcome.failed_checks").as_array().unwrap();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0].as_str(), Some("expect_l_rank"));
}

#[test]
fn extend_tractor_on_non_parallel_seed_exits_two_with_diagnostic() {
    let cfg = r#"
command = "extend-tractor"
rho_order = 1
x_order = 4
[tractor]
components = ["1 + x1^2", "0", "0", "0", "0", "0"]
[tractor.metric]
diagonal = ["1", "1", "1", "1"]
"#;
    let (out, rep) = run_config(cfg, &[]);
    assert_eq!(code(&out), 2);
    assert_eq!(get(&rep, "outcome.error_kind").as_str(), Some("not-parallel"));
    let diag = get(&rep, "outcome.diagnostic").as_array().unwrap();
    assert!(!diag.is_empty());
    assert!(diag[0].as_str().unwrap().contains("2*x1"));
}

#[test]
fn extend_tractor_einstein_seed_is_parallel_through_truncation() {
    let cfg = r#"
command = "extend-tractor"
x_order = 8
rho_order = 3
[tractor]
components = ["1", "0", "0", "0", "0", "-1/3"]
[tractor.metric]
diagonal = ["1", "1", "1", "1"]
conformal_factor = "1/(1 + (x1^2 + x2^2 + x3^2 + x4^2)/6)^2"
"#;
    let (out, rep) = run_config(cfg, &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(get(&rep, "results.achieved_order.provenance").as_str(), Some("truncation-limited"));
    assert_eq!(get(&rep, "results.achieved_order.value"), get(&rep, "results.truncation_limit.value"));
    assert_eq!(get(&rep, "results.residual_leading").as_array().map(|a| a.len()), Some(0));
}

#[test]
fn extend_tractor_from_sigma_on_flat_metric() {
    let cfg = r#"
command = "extend-tractor"
x_order = 4
rho_order = 1
[tractor]
sigma = "1 + x1^2 + x2^2 + x3^2 + x4^2 + x5^2"
[tractor.metric]
diagonal = ["1", "1", "1", "1", "1"]
"#;
    let (out, rep) = run_config(cfg, &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(verdict(&rep, "parallel_extension_order"));
}

#[test]
fn check_pe_d_rt_is_parallel_for_arbitrary_family() {
    let cfg = r#"
command = "check-pe"
dimension = 4
x_order = 4
[pe_family]
k = [[["1", "y1*y2", "0"], ["y1*y2", "1", "0"], ["0", "0", "1 + y3^2"]],
     [["y2", "0", "0"], ["0", "0", "0"], ["0", "0", "1"]]]
"#;
    let (out, rep) = run_config(cfg, &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(verdict(&rep, "d_rt_parallel"));
    assert_eq!(get(&rep, "results.d_rt_order.value").as_str(), Some("unbounded"));
}

#[test]
fn check_pe_juhl_metric_for_hyperbolic_family() {
    // k_u = δ makes the doubled metric the hyperbolic metric in half-space form.
    let cfg = r#"
command = "check-pe"
x_order = 4
[pe_family]
k = [[["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]],
     [["0", "0", "0"], ["0", "0", "0"], ["0", "0", "0"]]]
juhl_s0 = "1"
"#;
    let (out, rep) = run_config(cfg, &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(verdict(&rep, "juhl_einstein"));
}

#[test]
fn check_cr_sphere() {
    let cfg = r#"
command = "check-cr"
dimension = 2
x_order = 4
[cr]
u = "1 - z1*zb1 - z2*zb2"
center = ["1", "0"]
[expect]
ricci_flat = true
levi_determinant_one = true
"#;
    let (out, rep) = run_config(cfg, &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(verdict(&rep, "kahler_form_parallel"));
    assert!(verdict(&rep, "hessian_determinant_identity"));
    assert_eq!(get(&rep, "results.ricci_valuation.value").as_str(), Some("unbounded"));
}

#[test]
fn check_cr_rejects_non_real_function() {
    let cfg = "command = \"check-cr\"\ndimension = 2\n[cr]\nu = \"z2 + z1^2 + zb2\"\n";
    let (out, rep) = run_config(cfg, &[]);
    assert_eq!(code(&out), 2);
    assert_eq!(get(&rep, "outcome.error_kind").as_str(), Some("invalid-input"));
}

#[test]
fn fhol_reports_calibrated_quartic() {
    let cfg = "command = \"fhol\"\n[fhol]\nf = \"q^6 + 3/7*x*q^5\"\n";
    let (out, rep) = run_config(cfg, &[]);
    assert_eq!(code(&out), 0);
    assert_eq!(get(&rep, "results.partials.q6.value").as_str(), Some("720"));
    assert_eq!(get(&rep, "results.quartic.A0.value").as_str(), Some("36"));
    assert_eq!(get(&rep, "results.quartic.A1.value").as_str(), Some("18/7"));
}

#[test]
fn invalid_inputs_exit_two() {
    let cases = [
        "command = \"check-2plane\"\n[two_plane]\nF = \"q^2 +\"\n",
        "command = \"check-2plane\"\n[two_plane]\nF = \"w^2\"\n",
        "command = \"fg-expand\"\ndimension = 4\n[metric]\ndiagonal = [\"1\", \"1\", \"1\"]\n",
        "command = \"fg-expand\"\n[metric]\nmatrix = [[\"1\", \"x1\"], [\"0\", \"1\"]]\n",
        "command = \"fg-expand\"\n[two_plane]\nF = \"q^2\"\n",
        "command = \"check-2plane\"\n",
        "command = \"no-such-command\"\n[two_plane]\nF = \"q^2\"\n",
        "command = \"check-2plane\"\nx_order = 0\n[two_plane]\nF = \"q^2\"\n",
        "command = \"check-2plane\"\nx_order = 5\n[two_plane]\nF = \"q^2\"\n",
        "command = \"check-2plane\"\n[two_plane]\nF = \"q^2\"\n[metric]\ndiagonal = [\"1\"]\n",
        "command = \"check-2plane\"\nunknown_key = 1\n[two_plane]\nF = \"q^2\"\n",
        "this is not toml",
    ];
    for c in cases {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), "bad.toml", c);
        let out = bin().arg("--config").arg(&cfg).output().unwrap();
        assert_eq!(code(&out), 2, "config {c:?} gave {}", String::from_utf8_lossy(&out.stdout));
        let rep: toml::Table = String::from_utf8(out.stdout).unwrap().parse().unwrap();
        assert_eq!(get(&rep, "outcome.status").as_str(), Some("invalid-input"));
    }
}

#[test]
fn missing_config_file_and_bad_flags_exit_two() {
    let out = bin().args(["--config", "/nonexistent/run.toml"]).output().unwrap();
    assert_eq!(code(&out), 2);
    let out = bin().args(["--no-such-flag"]).output().unwrap();
    assert_eq!(code(&out), 2);
    let out = bin().args(["--command", "check-2plane", "--mode", "approximate"]).output().unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn flags_override_config() {
    let cfg = "command = \"fhol\"\nx_order = 9\n[two_plane]\nF = \"q^2\"\n";
    let (out, rep) = run_config(cfg, &["--command", "check-2plane", "--order", "8", "--rho-order", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(get(&rep, "run.command").as_str(), Some("check-2plane"));
    assert_eq!(get(&rep, "run.x_order").as_integer(), Some(8));
    assert_eq!(get(&rep, "run.rho_order").as_integer(), Some(3));
}

#[test]
fn report_file_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.toml", EINSTEIN_5);
    let mut texts = Vec::new();
    for k in 0..2 {
        let rp = dir.path().join(format!("report{k}.toml"));
        let out = bin().arg("--config").arg(&cfg).arg("--report").arg(&rp).output().unwrap();
        assert_eq!(code(&out), 0);
        assert!(out.stdout.is_empty());
        texts.push(std::fs::read_to_string(&rp).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    let stdout = bin().arg("--config").arg(&cfg).output().unwrap().stdout;
    assert_eq!(String::from_utf8(stdout).unwrap(), texts[0]);
}

#[test]
fn timing_is_opt_in() {
    let (_, rep) = run_config(EINSTEIN_5, &[]);
    assert!(rep.get("timing").is_none());
    let (_, rep) = run_config(EINSTEIN_5, &["--timing"]);
    assert!(get(&rep, "timing.elapsed_ms").as_float().unwrap() >= 0.0);
}
