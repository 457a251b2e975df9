//! End-to-end CLI checks: subcommand wiring, the output-root override,
//! worker-count independence, evaluator plumbing and exit codes.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_factforge")
}

fn run(args: &[&str], envs: &[(&str, &str)]) -> (bool, String, String) {
    let mut cmd = Command::new(bin());
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    // Keep the override out of unrelated invocations.
    if envs.iter().all(|(k, _)| *k != "FACTFORGE_OUT") {
        cmd.env_remove("FACTFORGE_OUT");
    }
    let out = cmd.output().expect("spawn factforge");
    (
        out.status.success(),
        String::from_utf8_lossy(&out.stdout).to_string(),
        String::from_utf8_lossy(&out.stderr).to_string(),
    )
}

fn tree_digest(root: &Path) -> BTreeMap<String, String> {
    fn walk(dir: &Path, base: &Path, out: &mut BTreeMap<String, String>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(&path, base, out);
            } else {
                let bytes = std::fs::read(&path).unwrap();
                out.insert(
                    path.strip_prefix(base).unwrap().to_string_lossy().to_string(),
                    factforge_core::ids::sha256_hex(&bytes),
                );
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

#[test]
fn full_cli_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let fixture_dir = root.join("fx");

    // Small fixture keeps the walltime low while exercising every path.
    let (ok, out, err) = run(
        &["fixture", "--out", fixture_dir.to_str().unwrap(), "--people", "60"],
        &[],
    );
    assert!(ok, "fixture failed: {}", err);
    assert!(out.contains("fixture written"));
    let config = fixture_dir.join("build.json");

    // Build with --jobs 1 and --jobs 3; outputs must be identical.
    let out_a = root.join("out-a");
    let out_b = root.join("out-b");
    let (ok, stdout, err) = run(
        &[
            "build",
            "--config",
            config.to_str().unwrap(),
            "--bench",
            "--jobs",
            "1",
            "--out",
            out_a.to_str().unwrap(),
        ],
        &[],
    );
    assert!(ok, "build failed: {}", err);
    assert!(stdout.contains("build "), "missing build id line: {}", stdout);
    let (ok, _, err) = run(
        &[
            "build",
            "--config",
            config.to_str().unwrap(),
            "--bench",
            "--jobs",
            "3",
            "--out",
            out_b.to_str().unwrap(),
        ],
        &[],
    );
    assert!(ok, "parallel build failed: {}", err);
    assert_eq!(tree_digest(&out_a), tree_digest(&out_b), "--jobs changed the outputs");

    // FACTFORGE_OUT env override governs the output root.
    let out_env = root.join("out-env");
    let (ok, _, err) = run(
        &["build", "--config", config.to_str().unwrap()],
        &[("FACTFORGE_OUT", out_env.to_str().unwrap())],
    );
    assert!(ok, "env-routed build failed: {}", err);
    assert!(out_env.join("manifest.json").exists());

    // validate-pointers over the full build.
    let (ok, stdout, err) = run(
        &[
            "validate-pointers",
            "--config",
            config.to_str().unwrap(),
            "--build",
            out_a.to_str().unwrap(),
        ],
        &[],
    );
    assert!(ok, "validate failed: {}", err);
    assert!(stdout.contains("drift=0 fail=0"), "unexpected validation: {}", stdout);

    // Sampled validation.
    let (ok, stdout, _) = run(
        &[
            "validate-pointers",
            "--config",
            config.to_str().unwrap(),
            "--build",
            out_a.to_str().unwrap(),
            "--sample",
            "10",
        ],
        &[],
    );
    assert!(ok);
    assert!(stdout.contains("checked=10"));

    // stats prints canonical JSON diagnostics.
    let (ok, stdout, err) = run(&["stats", "--build", out_a.to_str().unwrap()], &[]);
    assert!(ok, "stats failed: {}", err);
    assert!(stdout.contains("\"n_eff\""));
    assert!(stdout.contains("\"funnel\""));

    // pack hash and policy hash print content hashes.
    let (ok, stdout, _) = run(
        &["pack", "hash", "--file", fixture_dir.join("packs/en.json").to_str().unwrap()],
        &[],
    );
    assert!(ok);
    assert_eq!(stdout.trim().len(), 64);
    let (ok, stdout, _) = run(
        &["policy", "hash", "--file", fixture_dir.join("policy.json").to_str().unwrap()],
        &[],
    );
    assert!(ok);
    assert!(stdout.trim().starts_with("default+"));

    // Evaluators read prediction JSONL.
    let kgc_dir = out_a.join("bench/kgc");
    let test_lines = std::fs::read_to_string(kgc_dir.join("test.tsv")).unwrap();
    let mut kgc_preds = String::new();
    for line in test_lines.lines().take(5) {
        let cols: Vec<&str> = line.split('\t').collect();
        // Oracle-style: the target gets the top score.
        kgc_preds.push_str(&format!(
            "{{\"s\":\"{}\",\"p\":\"{}\",\"o\":\"{}\",\"direction\":\"tail\",\"scores\":[[\"{}\",1.0]]}}\n",
            cols[0], cols[1], cols[2], cols[2]
        ));
        kgc_preds.push_str(&format!(
            "{{\"s\":\"{}\",\"p\":\"{}\",\"o\":\"{}\",\"direction\":\"head\",\"scores\":[[\"{}\",1.0]]}}\n",
            cols[0], cols[1], cols[2], cols[0]
        ));
    }
    let kgc_pred_path = root.join("kgc-preds.jsonl");
    std::fs::write(&kgc_pred_path, kgc_preds).unwrap();
    let (ok, stdout, err) = run(
        &[
            "bench",
            "eval",
            "kgc",
            "--gold",
            kgc_dir.to_str().unwrap(),
            "--predictions",
            kgc_pred_path.to_str().unwrap(),
        ],
        &[],
    );
    assert!(ok, "kgc eval failed: {}", err);
    assert!(stdout.contains("mrr="), "kgc eval output: {}", stdout);

    // MKQA: echo the gold logical forms as predictions; scores must be
    // perfect and all valid.
    let questions = std::fs::read_to_string(out_a.join("bench/mkqa/questions.jsonl")).unwrap();
    let mut mkqa_preds = String::new();
    let mut n = 0;
    for line in questions.lines().take(50) {
        let v = factforge_core::canon::parse(line).unwrap();
        let id = v.get("question_id").unwrap().as_str().unwrap();
        let lf = v.get("lf").unwrap().as_str().unwrap();
        mkqa_preds.push_str(&format!(
            "{{\"question_id\":\"{}\",\"output\":\"{}\"}}\n",
            id,
            lf.replace('"', "\\\"")
        ));
        n += 1;
    }
    assert!(n > 10, "fixture produced too few questions");
    let mkqa_pred_path = root.join("mkqa-preds.jsonl");
    std::fs::write(&mkqa_pred_path, mkqa_preds).unwrap();
    let (ok, stdout, err) = run(
        &[
            "bench",
            "eval",
            "mkqa",
            "--build",
            out_a.to_str().unwrap(),
            "--gold",
            out_a.join("bench/mkqa/questions.jsonl").to_str().unwrap(),
            "--predictions",
            mkqa_pred_path.to_str().unwrap(),
        ],
        &[],
    );
    assert!(ok, "mkqa eval failed: {}", err);
    // Unanswered questions score 0; the answered prefix is perfect, so
    // validity is strictly positive.
    assert!(stdout.contains("macro_f1="), "mkqa eval output: {}", stdout);

    // MFC: echo gold labels and evidence.
    let claims = std::fs::read_to_string(out_a.join("bench/mfc/claims.jsonl")).unwrap();
    let mut mfc_preds = String::new();
    for line in claims.lines() {
        let v = factforge_core::canon::parse(line).unwrap();
        let id = v.get("claim_id").unwrap().as_str().unwrap();
        let label = v.get("label").unwrap().as_str().unwrap();
        let evidence = v
            .get("gold_evidence")
            .map(|g| factforge_core::canon::canon_string(g))
            .unwrap_or_else(|| "[]".to_string());
        mfc_preds.push_str(&format!(
            "{{\"claim_id\":\"{}\",\"label\":\"{}\",\"evidence\":{}}}\n",
            id, label, evidence
        ));
    }
    let mfc_pred_path = root.join("mfc-preds.jsonl");
    std::fs::write(&mfc_pred_path, mfc_preds).unwrap();
    let (ok, stdout, err) = run(
        &[
            "bench",
            "eval",
            "mfc",
            "--gold",
            out_a.join("bench/mfc/claims.jsonl").to_str().unwrap(),
            "--predictions",
            mfc_pred_path.to_str().unwrap(),
        ],
        &[],
    );
    assert!(ok, "mfc eval failed: {}", err);
    assert!(stdout.contains("accuracy=1.000000"), "gold echo should be perfect: {}", stdout);
    assert!(stdout.contains("recall@5=1.000000"), "mfc eval output: {}", stdout);
    assert!(stdout.contains("span_f1=1.000000"), "mfc eval output: {}", stdout);
}

#[test]
fn missing_input_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(
        &config,
        r#"{"snapshot_date":"d","entities":"missing.json","languages":[],"policy":"missing-policy.json","schema_map":"missing.tsv","relation_map":"missing.json","out":"out"}"#,
    )
    .unwrap();
    let (ok, _, err) = run(&["build", "--config", config.to_str().unwrap()], &[]);
    assert!(!ok);
    assert!(!err.is_empty());
    // No manifest appears on failure.
    assert!(!dir.path().join("out/manifest.json").exists());
}
