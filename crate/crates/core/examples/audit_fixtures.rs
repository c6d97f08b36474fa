//! Classifies stored server chains against two root-store profiles.

use std::time::Duration;

use chrono::{TimeZone, Utc};
use sslguard::audit::{audit_batch, Target};
use sslguard::x509::TrustStore;

const CHAINS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/chains");

fn main() {
    let profiles: Vec<TrustStore> = ["android-2.3.3", "android-4.2"]
        .iter()
        .map(|p| TrustStore::load(format!("{CHAINS}/stores/{p}.pem").as_ref()).unwrap())
        .collect();
    let targets: Vec<Target> = ["valid", "self_signed", "untrusted_root", "expired_leaf", "self_signed_expired"]
        .iter()
        .map(|n| Target::Fixture {
            label: n.to_string(),
            path: format!("{CHAINS}/{n}/presented.pem").into(),
        })
        .collect();
    let at = Utc.with_ymd_and_hms(2013, 3, 1, 0, 0, 0).unwrap();
    for r in audit_batch(&targets, &profiles, at, Duration::from_secs(5), 2).unwrap() {
        println!("{:<20} {:<12?} {:?}", r.endpoint_or_fixture, r.cert_class, r.per_profile);
    }
}
