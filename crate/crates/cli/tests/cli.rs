mod common;

use std::fs;

use common::{fixtures, kb_path, query_paths, run_bin};

fn s(p: &std::path::Path) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn translate_writes_problems_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let mut args = vec!["translate".to_string(), "--kb".into(), s(&kb_path())];
    for q in query_paths() {
        args.extend(["--query".into(), s(&q)]);
    }
    args.extend(["--out".into(), s(&out), "--reproducible".into()]);
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let o = run_bin(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for q in ["tqg3", "tqg11", "tqg22alt4", "tqg27", "wordex"] {
        let text = fs::read_to_string(out.join(format!("{q}.p"))).unwrap();
        assert!(!text.contains("% Date:"));
        assert!(text.contains("thf(conj,conjecture,"));
    }
    let summary = fs::read_to_string(out.join("kb-summary.txt")).unwrap();
    assert!(summary.contains("skipped-modal\t0\n"), "{summary}");
    let again = run_bin(&args);
    assert!(again.status.success());
    let first = fs::read_to_string(out.join("tqg27.p")).unwrap();
    assert!(first.contains("(in @ s_o @ s_Planet)"));

    let c = run_bin(&["check", &s(&out)]);
    assert!(c.status.success(), "{}", String::from_utf8_lossy(&c.stdout));
}

#[test]
fn modal_rule_is_counted_as_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run_bin(&["translate", "--kb", &s(&fixtures().join("modal.kif")), "--out", &s(&out)]);
    assert!(o.status.success());
    let summary = fs::read_to_string(out.join("kb-summary.txt")).unwrap();
    assert!(summary.contains("skipped-modal\t1\n"), "{summary}");
    assert!(summary.contains("translated\t1\n"), "{summary}");
}

#[test]
fn missing_input_exits_2_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run_bin(&[
        "translate",
        "--kb",
        &s(&kb_path()),
        "--query",
        &s(&dir.path().join("absent.kif")),
        "--out",
        &s(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn translate_errors_are_positioned_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.kif");
    fs::write(&bad, "(instance a B)\n(p @R @S)\n").unwrap();
    let json = dir.path().join("errors.json");
    let out = dir.path().join("out");
    let o = run_bin(&["translate", "--kb", &s(&bad), "--out", &s(&out), "--errors-json", &s(&json)]);
    assert_eq!(o.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("bad.kif:2:7: "), "{stderr}");
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v[0]["line"], 2);
    assert_eq!(v[0]["col"], 7);
    let o = run_bin(&["translate", "--kb", &s(&bad), "--out", &s(&out), "--keep-going"]);
    assert_eq!(o.status.code(), Some(0));
    let summary = fs::read_to_string(out.join("kb-summary.txt")).unwrap();
    assert!(summary.contains("errored\t1\n"));
}

#[test]
fn explain_and_dump_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run_bin(&[
        "translate",
        "--kb",
        &s(&kb_path()),
        "--query",
        &s(&fixtures().join("queries/tqg27.kif")),
        "--out",
        &s(&out),
        "--explain-guards",
        "--dump-signature",
    ]);
    assert!(o.status.success());
    assert!(fs::read_to_string(out.join("guards.txt")).unwrap().contains("kb_mini_merge_"));
    assert!(fs::read_to_string(out.join("signature.txt")).unwrap().contains("partition"));
}

#[test]
fn oracle_exit_codes() {
    let ok = run_bin(&["oracle", &s(&fixtures().join("claims.lemmas"))]);
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).contains("6 lemmas checked"));

    let wrong = run_bin(&["oracle", &s(&fixtures().join("seeded-wrong.lemmas"))]);
    assert_eq!(wrong.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&wrong.stdout).contains("FAIL"));

    let dir = tempfile::tempdir().unwrap();
    let corrupt = dir.path().join("c.lemmas");
    fs::write(&corrupt, "# header\nfine: ((len @ nil) = n0)\nbroken: ((len @ nil) = n0\n").unwrap();
    let o = run_bin(&["oracle", &s(&corrupt)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("c.lemmas:3:"));

    let empty = dir.path().join("e.lemmas");
    fs::write(&empty, "").unwrap();
    let o = run_bin(&["oracle", &s(&empty)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("0 lemmas checked"));
}

#[test]
fn check_reports_a_deleted_paren() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    run_bin(&["translate", "--kb", &s(&kb_path()), "--query", &s(&fixtures().join("queries/tqg27.kif")), "--out", &s(&out)]);
    let p = out.join("tqg27.p");
    let text = fs::read_to_string(&p).unwrap();
    let at = text.find("thf(conj").unwrap() + 3;
    let broken = format!("{}{}", &text[..at], &text[at + 1..]);
    fs::write(&p, broken).unwrap();
    let o = run_bin(&["check", &s(&p)]);
    assert_eq!(o.status.code(), Some(1));
    let report = String::from_utf8_lossy(&o.stdout);
    assert_eq!(report.lines().count(), 1, "{report}");
    assert!(report.contains("tqg27.p:"));
}

#[test]
fn config_file_drives_translation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        format!(
            "kb = {}\nquery = {}\nout = built\n",
            s(&kb_path()),
            s(&fixtures().join("queries/wordex.kif"))
        ),
    )
    .unwrap();
    let o = run_bin(&["translate", "--config", &s(&cfg), "--reproducible"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("built/wordex.p").exists());
}
