//! Verifies peers against a pinning-only policy: a pinned self-signed
//! server is accepted, a chain to an unpinned root is not.

use chrono::{TimeZone, Utc};
use sslguard::policy::parse_manifest_policy;
use sslguard::x509::{verify_peer, PresentedChain, TrustStore};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

fn chain(name: &str) -> PresentedChain {
    let pem = std::fs::read(format!("{FIXTURES}/chains/{name}/presented.pem")).unwrap();
    PresentedChain::from_pem(&pem).unwrap()
}

fn main() {
    let xml = std::fs::read_to_string(format!("{FIXTURES}/manifests/pinned.xml")).unwrap();
    let bundle = parse_manifest_policy(&xml).unwrap().bundle;
    let store = TrustStore::load(format!("{FIXTURES}/chains/stores/android-4.2.pem").as_ref()).unwrap();
    let at = Utc.with_ymd_and_hms(2013, 3, 1, 0, 0, 0).unwrap();

    for (name, host) in [("self_signed", "b.foo.com"), ("valid", "www.foo.com"), ("untrusted_root", "www.foo.com")] {
        let v = verify_peer(host, &chain(name), &bundle, &store, at);
        let pin = v.matched_pin.as_ref().map(|p| p.kind.manifest_name()).unwrap_or("-");
        println!("{name:<16} {host:<12} accepted={:<5} {:?} pin={pin}", v.accepted, v.reason);
    }
}
