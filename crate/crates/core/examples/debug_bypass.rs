//! A debuggable build accepts any certificate, but says so.

use chrono::Utc;
use sslguard::policy::parse_manifest_policy;
use sslguard::x509::{verify_peer, CertRecord, PresentedChain, TrustStore};
use sslguard_fixtures::certs::{CertSpec, Issued};

fn main() {
    let xml = r#"<manifest xmlns:android="http://schemas.android.com/apk/res/android">
  <application android:debuggable="true"/>
</manifest>"#;
    let bundle = parse_manifest_policy(xml).unwrap().bundle;
    let rogue = Issued::self_signed(&CertSpec::leaf("attacker.example", &["attacker.example"])).unwrap();
    let chain = PresentedChain::new(CertRecord::from_der(&rogue.der()).unwrap(), vec![]);

    let v = verify_peer("bank.example", &chain, &bundle, &TrustStore::empty("none"), Utc::now());
    println!("accepted={} reason={:?} warnings={:?}", v.accepted, v.reason, v.warnings);

    let release = sslguard::policy::PolicyBundle::default();
    let v = verify_peer("bank.example", &chain, &release, &TrustStore::empty("none"), Utc::now());
    println!("release build: accepted={} reason={:?}", v.accepted, v.reason);
}
