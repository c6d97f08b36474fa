mod common;

use std::path::Path;

use sslguard::cli::run;
use sslguard_fixtures::corpus::{idiom_corpus, taxonomy_corpus};

use common::{assert_schema, chain_dir, manifest, materialize, store_path, AS_OF};

/// Runs the CLI and returns (exit code, stdout, stderr).
fn sslguard(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(args.iter().copied(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn no_arguments_prints_usage() {
    let (code, out, err) = sslguard(&[]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("Usage"), "{err}");
    let (code, out, _) = sslguard(&["--help"]);
    assert_eq!(code, 0);
    for cmd in ["policy-check", "verify", "scan", "audit", "report"] {
        assert!(out.contains(cmd), "{cmd} missing from help");
    }
}

#[test]
fn policy_check_outputs() {
    let (code, out, _) = sslguard(&["policy-check", "--manifest", p(&manifest("pinned.xml"))]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["valid"], true);

    let (code, out, _) = sslguard(&["policy-check", "--manifest", p(&manifest("empty_policy.xml"))]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["valid"], false);
    assert!(v["error"].is_string());

    let (code, _, err) = sslguard(&["policy-check", "--manifest", "/nonexistent/AndroidManifest.xml"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"));
}

fn verify(manifest_name: &str, chain: &str, host: &str) -> (i32, serde_json::Value, String) {
    let chain = chain_dir(chain).join("presented.pem");
    let store = store_path("android-4.2");
    let (code, out, err) = sslguard(&[
        "verify",
        "--manifest",
        p(&manifest(manifest_name)),
        "--chain",
        p(&chain),
        "--host",
        host,
        "--store",
        p(&store),
        "--as-of",
        AS_OF,
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out}"));
    assert_schema("verification-verdict.schema.json", &v);
    (code, v, err)
}

#[test]
fn verify_pinned_self_signed() {
    let (code, v, err) = verify("pinned.xml", "self_signed", "b.foo.com");
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["reason"], "OkPinned");
    assert_eq!(v["matched_pin"]["kind"], "SelfPin");
    assert!(err.is_empty(), "{err}");

    let (code, v, _) = verify("pinned.xml", "untrusted_root", "www.foo.com");
    assert_eq!(code, 1);
    assert_eq!(v["reason"], "PinMismatch");
}

#[test]
fn verify_plain_and_debuggable() {
    let (code, v, _) = verify("plain.xml", "valid", "www.foo.com");
    assert_eq!((code, v["reason"].as_str()), (0, Some("Ok")));
    let (code, v, _) = verify("plain.xml", "self_signed", "b.foo.com");
    assert_eq!(code, 1, "{v}");
    // Warnings go to stderr so stdout stays parseable.
    let (code, v, err) = verify("debuggable.xml", "self_signed", "evil.example");
    assert_eq!((code, v["reason"].as_str()), (0, Some("OkDebugBypass")));
    assert!(err.contains("DebugBypassActive"));
}

#[test]
fn verify_without_as_of_warns() {
    let chain = chain_dir("valid").join("presented.pem");
    let (_, out, err) = sslguard(&[
        "verify",
        "--manifest",
        p(&manifest("plain.xml")),
        "--chain",
        p(&chain),
        "--host",
        "www.foo.com",
        "--store",
        p(&store_path("android-4.2")),
    ]);
    assert!(err.contains("warning"), "{err}");
    serde_json::from_str::<serde_json::Value>(&out).unwrap();
}

#[test]
fn scan_then_report() {
    let apps: Vec<_> = taxonomy_corpus().into_iter().map(|(a, _)| a).collect();
    let (dir, corpus, ads) = materialize(&apps);
    let scans = dir.path().join("scans.json");
    let (code, out, _) =
        sslguard(&["scan", "--corpus", p(&corpus), "--ads", p(&ads), "--out", p(&scans), "--jobs", "4"]);
    assert_eq!(code, 1, "findings should flag the run");
    assert!(out.is_empty());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&scans).unwrap()).unwrap();
    assert_schema("app-scan-report.schema.json", &doc);
    assert_eq!(doc.as_array().unwrap().len(), apps.len());

    let (code, out, _) = sslguard(&["report", "--scans", p(&scans)]);
    assert_eq!(code, 0);
    let summary: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_schema("corpus-summary.schema.json", &summary);
    assert_eq!(summary["total_apps"], apps.len());

    let (code, md, _) = sslguard(&["--format", "markdown", "report", "--scans", p(&scans)]);
    assert_eq!(code, 0);
    assert!(md.contains("| Total |"), "{md}");
}

#[test]
fn clean_corpus_exits_zero() {
    let apps: Vec<_> = idiom_corpus().into_iter().filter(|a| a.expected.idioms.is_empty()).collect();
    assert!(!apps.is_empty());
    let (_dir, corpus, ads) = materialize(&apps);
    let (code, out, _) = sslguard(&["scan", "--corpus", p(&corpus), "--ads", p(&ads)]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn scan_errors() {
    let (code, _, err) = sslguard(&["scan", "--corpus", "/nonexistent", "--ads", "/nonexistent"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"));
}

#[test]
fn audit_fixture_targets() {
    let dir = tempfile::tempdir().unwrap();
    let targets = dir.path().join("targets.txt");
    let lines: String = ["valid", "self_signed", "expired_leaf", "untrusted_root"]
        .iter()
        .map(|n| format!("file:{}\n", chain_dir(n).join("presented.pem").display()))
        .collect();
    std::fs::write(&targets, format!("# fixtures\n{lines}")).unwrap();
    let (old, new) = (store_path("android-2.3.3"), store_path("android-4.2"));
    let args = [
        "audit",
        "--targets",
        p(&targets),
        "--store",
        p(&old),
        p(&new),
        "--as-of",
        AS_OF,
    ];
    let (code, out, _) = sslguard(&args);
    assert_eq!(code, 1);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_schema("cert-audit-result.schema.json", &doc);
    let classes: Vec<&str> = doc.as_array().unwrap().iter().map(|r| r["cert_class"].as_str().unwrap()).collect();
    assert_eq!(classes.len(), 4);
    for want in ["Valid", "SelfSigned", "Expired", "UntrustedCa"] {
        assert!(classes.contains(&want), "{classes:?}");
    }
    assert!(doc[0]["per_profile"].get("android-4.2").is_some());
}

#[test]
fn audit_bad_target_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let targets = dir.path().join("t.txt");
    std::fs::write(&targets, "host:notaport\n").unwrap();
    let (code, _, err) =
        sslguard(&["audit", "--targets", p(&targets), "--store", p(&store_path("android-4.2")), "--as-of", AS_OF]);
    assert_eq!(code, 2, "{err}");
}
