#![allow(dead_code)]

pub mod props;

use std::path::PathBuf;

use chrono::{DateTime, TimeZone, Utc};
use sslguard::x509::{CertRecord, PresentedChain, TrustStore};
use sslguard_fixtures::certs::{CertSpec, Issued};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn chain_dir(name: &str) -> PathBuf {
    fixtures().join("chains").join(name)
}

pub fn manifest(name: &str) -> PathBuf {
    fixtures().join("manifests").join(name)
}

pub fn presented(name: &str) -> PresentedChain {
    let pem = std::fs::read(chain_dir(name).join("presented.pem")).unwrap();
    PresentedChain::from_pem(&pem).unwrap()
}

pub fn cert(chain: &str, file: &str) -> CertRecord {
    let pem = std::fs::read(chain_dir(chain).join(file)).unwrap();
    CertRecord::all_from_pem(&pem).unwrap().remove(0)
}

pub fn store_path(profile: &str) -> PathBuf {
    chain_dir("stores").join(format!("{profile}.pem"))
}

pub fn store(profile: &str) -> TrustStore {
    TrustStore::load(&store_path(profile)).unwrap()
}

/// The time every fixture is judged at.
pub fn as_of() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2013, 3, 1, 0, 0, 0).unwrap()
}

pub const AS_OF: &str = "2013-03-01T00:00:00Z";

/// Chain fixtures whose expected check against android-4.2 is known.
pub const CHAIN_CASES: [(&str, &str); 4] = [
    ("valid", "Ok"),
    ("expired_intermediate", "Expired"),
    ("intermediate_not_ca", "CaBitMissing"),
    ("untrusted_root", "UntrustedRoot"),
];

pub fn record(issued: &Issued) -> CertRecord {
    CertRecord::from_der(&issued.der()).unwrap()
}

pub fn self_signed(cn: &str, sans: &[&str]) -> CertRecord {
    record(&Issued::self_signed(&CertSpec::leaf(cn, sans)).unwrap())
}

/// Identifier-level vectors: host, DNS identifier, expected result
/// (`None` means the identifier is malformed).
pub const NAME_VECTORS: &[(&str, &str, Option<bool>)] = &[
    ("www.foo.com", "www.foo.com", Some(true)),
    ("WWW.FOO.COM", "www.foo.com", Some(true)),
    ("www.foo.com", "WwW.fOo.CoM", Some(true)),
    ("www.foo.com.", "www.foo.com", Some(true)),
    ("www.foo.com", "www.foo.com.", Some(true)),
    ("www.foo.com", "foo.com", Some(false)),
    ("foo.com", "www.foo.com", Some(false)),
    ("www.foo.com", "www.foo.org", Some(false)),
    ("b.foo.com", "*.foo.com", Some(true)),
    ("B.Foo.Com", "*.foo.com", Some(true)),
    ("a.b.foo.com", "*.foo.com", Some(false)),
    ("foo.com", "*.foo.com", Some(false)),
    ("b.bar.com", "*.foo.com", Some(false)),
    ("b.foo.com.", "*.foo.com", Some(true)),
    ("foo.com", "*.com", Some(false)),
    ("anything.com", "*.com", Some(false)),
    ("a.b.foo.com", "*.b.foo.com", Some(true)),
    ("10.0.0.1", "*.0.0.1", Some(false)),
    ("xn--bcher-kva.example.com", "*.example.com", Some(true)),
    ("a.foo.com", "f*o.foo.com", None),
    ("a.foo.com", "*oo.foo.com", None),
    ("a.b.foo.com", "a.*.foo.com", None),
    ("a.b.foo.com", "*.*.foo.com", None),
    ("a.foo.com", "*.foo..com", None),
    ("a.foo.com", "", None),
];

/// Writes `apps` plus the fixture ad list into a fresh directory. Returns
/// the directory guard, the corpus root and the ad-list path.
pub fn materialize(apps: &[sslguard_fixtures::corpus::AppFixture]) -> (tempfile::TempDir, PathBuf, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("apps");
    sslguard_fixtures::corpus::write_corpus(apps, &corpus).unwrap();
    let ads = dir.path().join("adlist.txt");
    std::fs::write(&ads, sslguard_fixtures::corpus::AD_LIST).unwrap();
    (dir, corpus, ads)
}

pub fn idiom_names(report: &sslguard::scanner::AppScanReport) -> Vec<String> {
    let mut names: Vec<String> = sslguard::scanner::idiom_set(report).iter().map(|i| format!("{i:?}")).collect();
    names.sort();
    names
}

/// Validates `doc` against one of the shipped schema files.
pub fn assert_schema(schema_file: &str, doc: &serde_json::Value) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema").join(schema_file);
    let schema: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{schema_file}: {errors:#?}");
}
