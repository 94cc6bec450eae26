use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use survnet::milp::{parse_lp_file, solve_milp};
use survnet::planner::NetworkConfiguration;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn survnet(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_survnet"));
    cmd.args(args).env_remove("SURVNET_OUT_DIR");
    if let Some(d) = out_dir {
        cmd.env("SURVNET_OUT_DIR", d);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> =
        std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    v.sort();
    v
}

#[test]
fn plan_bundled_instance_writes_configuration_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let inst = data("nationwide12.json");
    let o = survnet(
        &[
            "plan",
            inst.to_str().unwrap(),
            "--mode",
            "ml-interlayer-brs",
            "--approach",
            "sequential",
            "--cost-ratio",
            "cr1",
            "--gap",
            "0.03",
        ],
        Some(dir.path()),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        files(dir.path()),
        vec![
            "nationwide12.ml-interlayer-brs.sequential.json".to_string(),
            "nationwide12.ml-interlayer-brs.sequential.report.txt".to_string(),
        ]
    );
    let cfg = NetworkConfiguration::from_json(
        &std::fs::read_to_string(dir.path().join("nationwide12.ml-interlayer-brs.sequential.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(cfg.lsps.len(), 126);
    assert!(stdout(&o).contains("Interlayer BRS"));
}

#[test]
fn out_dir_flag_overrides_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let inst = data("ring4.json");
    let o = survnet(&["plan", inst.to_str().unwrap(), "--out-dir", flag_dir.path().to_str().unwrap()], Some(env_dir.path()));
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(files(env_dir.path()).is_empty());
    assert_eq!(files(flag_dir.path()).len(), 2);
}

#[test]
fn bad_mode_is_a_usage_error() {
    let inst = data("ring4.json");
    let o = survnet(&["plan", inst.to_str().unwrap(), "--mode", "bogus"], None);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("possible values"), "{}", stderr(&o));
}

#[test]
fn schema_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"nodes": [1, 2], "links": [[1, 2]], "params": {"C": 10, "W": 4, "Q": 1}, "cost_ratio": "CR1", "demands": []}"#)
        .unwrap();
    let o = survnet(&["plan", bad.to_str().unwrap()], Some(dir.path()));
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let o = survnet(&["plan", dir.path().join("missing.json").to_str().unwrap()], Some(dir.path()));
    assert_eq!(code(&o), 2);
    let o = survnet(&["verify"], None);
    assert_eq!(code(&o), 2);
}

#[test]
fn infeasible_plan_exits_1() {
    // on a four-node ring the working design leaves no node-disjoint protection path
    let dir = tempfile::tempdir().unwrap();
    let inst = data("ring4.json");
    let o = survnet(&["plan", inst.to_str().unwrap(), "--mode", "single-layer", "--gap", "0"], Some(dir.path()));
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stderr(&o).contains("infeasible"));
    assert!(files(dir.path()).is_empty());
}

#[test]
fn emit_lp_writes_one_model_per_phase_and_no_solution() {
    let dir = tempfile::tempdir().unwrap();
    let inst = data("ring4.json");
    let o = survnet(&["plan", inst.to_str().unwrap(), "--mode", "ml-interlayer-brs", "--emit-lp"], Some(dir.path()));
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let names = files(dir.path());
    let phases: Vec<&str> = names
        .iter()
        .map(|n| n.strip_prefix("ring4.ml-interlayer-brs.sequential.phase_").and_then(|s| s.strip_suffix(".lp")).unwrap())
        .collect();
    assert_eq!(phases, vec!["I", "II", "III-p", "III-w", "IV"]);
    for n in &names {
        let model = parse_lp_file(&std::fs::read_to_string(dir.path().join(n)).unwrap()).unwrap();
        assert!(!model.variables.is_empty(), "{n}");
    }
}

#[test]
fn verify_passes_planned_configuration_and_catches_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let inst = data("ring4.json");
    let o = survnet(&["plan", inst.to_str().unwrap(), "--mode", "ml-spare-unprotected", "--gap", "0", "--verify"], Some(dir.path()));
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let cfg_path = dir.path().join("ring4.ml-spare-unprotected.sequential.json");
    let verify_text = std::fs::read_to_string(dir.path().join("ring4.ml-spare-unprotected.sequential.verify.txt")).unwrap();
    assert!(verify_text.ends_with("PASS\n"), "{verify_text}");

    let o = survnet(&["verify", cfg_path.to_str().unwrap(), "--detail"], None);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("restorability 100.00%"));

    let mut value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cfg_path).unwrap()).unwrap();
    let working_route = value["lightpaths"][0]["route"].clone();
    value["protection_lightpaths"][0]["route"] = working_route;
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, serde_json::to_string(&value).unwrap()).unwrap();
    let o = survnet(&["verify", tampered.to_str().unwrap()], None);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).ends_with("FAIL\n"));
}

#[test]
fn external_solution_listing_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    let inst = data("ring4.json");
    let o = survnet(&["plan", inst.to_str().unwrap(), "--emit-lp"], Some(dir.path()));
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let lp = dir.path().join("ring4.none.sequential.phase_I.lp");
    let model = parse_lp_file(&std::fs::read_to_string(&lp).unwrap()).unwrap();
    let sol = solve_milp(&model, 0.0, 60.0).unwrap();
    let listing: String =
        model.variables.iter().zip(&sol.values).map(|(v, x)| format!("{} {}\n", v.name, x.round())).collect();
    let good = dir.path().join("good.sol");
    std::fs::write(&good, &listing).unwrap();
    let o = survnet(&["verify", "--model", lp.to_str().unwrap(), "--solution-in", good.to_str().unwrap()], None);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("solution violations 0"));

    // all zeros breaks the flow-conservation rows
    let bad = dir.path().join("bad.sol");
    std::fs::write(&bad, "# nothing routed\n").unwrap();
    let o = survnet(&["verify", "--model", lp.to_str().unwrap(), "--solution-in", bad.to_str().unwrap()], None);
    assert_eq!(code(&o), 1, "{}", stdout(&o));

    let garbage = dir.path().join("garbage.sol");
    std::fs::write(&garbage, "no_such_variable 1\n").unwrap();
    let o = survnet(&["verify", "--model", lp.to_str().unwrap(), "--solution-in", garbage.to_str().unwrap()], None);
    assert_eq!(code(&o), 2);
}

fn numbers(text: &str) -> Vec<f64> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars().chain(std::iter::once(' ')) {
        if c.is_ascii_digit() || c == '.' || (c == '-' && cur.is_empty()) {
            cur.push(c);
        } else {
            if let Ok(x) = cur.parse::<f64>() {
                out.push(x);
            }
            cur.clear();
        }
    }
    out
}

#[test]
fn report_formats_agree() {
    let dir = tempfile::tempdir().unwrap();
    let inst = data("ring4.json");
    for (mode, approach) in [("ml-interlayer-brs", "sequential"), ("none", "integrated"), ("ml-double-protection", "sequential")] {
        let o = survnet(&["plan", inst.to_str().unwrap(), "--mode", mode, "--approach", approach, "--gap", "0"], Some(dir.path()));
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let cfgs = [
        "ring4.ml-interlayer-brs.sequential.json",
        "ring4.none.integrated.json",
        "ring4.ml-double-protection.sequential.json",
    ]
    .map(|n| dir.path().join(n).to_string_lossy().into_owned());
    let run = |format: &str| {
        let mut args = vec!["report", "--labels", "A,B,C", "--report-format", format];
        args.extend(cfgs.iter().map(String::as_str));
        let o = survnet(&args, None);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        stdout(&o)
    };
    let table = run("table");
    let csv = run("csv");
    // row by row, the table and the CSV carry the same figures
    let table_rows: Vec<Vec<f64>> = table.lines().skip(2).map(numbers).collect();
    let csv_rows: Vec<Vec<f64>> = csv.lines().skip(1).map(numbers).filter(|r| !r.is_empty()).collect();
    let flat = |rows: &[Vec<f64>]| {
        let mut v: Vec<f64> = rows.iter().flatten().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    };
    assert_eq!(flat(&table_rows), flat(&csv_rows), "table:\n{table}\ncsv:\n{csv}");

    let json: serde_json::Value = serde_json::from_str(&run("json")).unwrap();
    assert_eq!(json["columns"].as_array().unwrap().len(), 3);
    assert_eq!(json["columns"][0]["label"], "A");
    assert!(json["columns"][0]["brs_extra"].is_u64());
    assert!(json["columns"][1]["protection_carrying"].is_null());
}

#[test]
fn report_relative_difference() {
    let dir = tempfile::tempdir().unwrap();
    let inst = data("ring4.json");
    for approach in ["sequential", "integrated"] {
        let o = survnet(&["plan", inst.to_str().unwrap(), "--approach", approach, "--gap", "0"], Some(dir.path()));
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let seq = dir.path().join("ring4.none.sequential.json");
    let int = dir.path().join("ring4.none.integrated.json");
    let o = survnet(&["report", seq.to_str().unwrap(), int.to_str().unwrap(), "--relative", "2:1"], None);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    // 43 against 46
    assert!(stdout(&o).contains(": -6.5%"), "{}", stdout(&o));
    let o = survnet(&["report", seq.to_str().unwrap(), "--relative", "1:3"], None);
    assert_eq!(code(&o), 2);
}

#[test]
fn gen_topology_estimate_and_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let gen = dir.path().join("gen.json");
    let o = survnet(
        &["gen-topology", "--nodes", "5", "--degree", "2.5", "--demands", "3", "--seed", "4", "-o", gen.to_str().unwrap()],
        None,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let inst = survnet::model::Instance::load(&gen).unwrap();
    assert_eq!(inst.topology.node_count(), 5);
    assert_eq!(inst.lsps.len(), 3);

    let o = survnet(&["oracle", gen.to_str().unwrap(), "--mode", "ml-double-protection"], Some(dir.path()));
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(dir.path().join("gen.ml-double-protection.sequential.oracle.json").exists());
    let o = survnet(&["oracle", data("nationwide12.json").to_str().unwrap()], Some(dir.path()));
    assert_eq!(code(&o), 2);

    let o = survnet(&["estimate-size", "--nodes", "12", "--lsps", "126", "--max-parallel", "2", "--links", "24"], None);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("sequential estimate 18144"));
    assert!(stdout(&o).contains("integrated estimate 25056"));
    let o = survnet(&["estimate-size", "--nodes", "12"], None);
    assert_eq!(code(&o), 2);

    let o = survnet(&["gen-topology", "--nodes", "2", "--degree", "2"], None);
    assert_eq!(code(&o), 2);
}
