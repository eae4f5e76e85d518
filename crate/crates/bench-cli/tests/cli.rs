// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::fs;
use std::process::Command;

fn lfrbench(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_lfrbench")).args(args).output().unwrap()
}

#[test]
fn generate_detect_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = lfrbench(&["generate", "--model", "cm", "--n", "400", "--k_max", "40", "--avg_k", "12", "--mu", "0.2", "--seed", "3", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let edges = dir.path().join("edges.tsv");
    let truth = dir.path().join("membership.tsv");
    assert!(edges.exists() && truth.exists());

    let o = lfrbench(&["measure", "--graph", edges.to_str().unwrap(), "--truth", truth.to_str().unwrap()]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report["transitivity_global"].as_f64().is_some());

    let found = dir.path().join("found.tsv");
    let o = lfrbench(&["detect", "--graph", edges.to_str().unwrap(), "--algorithm", "louvain", "--out", found.to_str().unwrap()]);
    assert!(o.status.success());
    let o = lfrbench(&["evaluate", "--truth", truth.to_str().unwrap(), "--found", found.to_str().unwrap()]);
    assert!(o.status.success());
    let score: f64 = String::from_utf8_lossy(&o.stdout).trim().parse().unwrap();
    assert!((0.0..=1.0).contains(&score));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let ok = d.join("ok");
    let o = lfrbench(&["sweep", "--model", "ba", "--n", "150", "--m", "4", "--mu_values", "0.3", "--replicates", "1", "--algorithms", "lp", "--workers", "1", "--out", ok.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let o = lfrbench(&["sweep", "--n", "1", "--out", d.join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = lfrbench(&["sweep", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(1));
    let cfg = d.join("bad.json");
    fs::write(&cfg, r#"{"replicates": 0}"#).unwrap();
    let o = lfrbench(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    let o = lfrbench(&["sweep", "--model", "ba", "--n", "30", "--m", "2", "--c_min", "20", "--c_max", "20", "--mu_values", "0.3", "--replicates", "1", "--algorithms", "", "--out", d.join("f").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    assert_eq!(lfrbench(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = dir.path().join("run");
    fs::write(&cfg, r#"{"model": "ev", "n": 150, "m": 4, "mu_values": [0.2], "replicates": 1, "algorithms": []}"#).unwrap();
    let o = lfrbench(&["sweep", "--config", cfg.to_str().unwrap(), "--replicates", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().starts_with("0,ev,0.2,0,"));
}
