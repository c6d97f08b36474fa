//! Reads the SSL settings out of a manifest.
//!
//! cargo run --example parse_policy [-- path/to/AndroidManifest.xml]

use sslguard::policy::parse_manifest_policy;

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/manifests/pinned.xml").into());
    let xml = std::fs::read_to_string(&path).expect("read manifest");
    match parse_manifest_policy(&xml) {
        Ok(parsed) => {
            let b = parsed.bundle;
            println!("debuggable: {}", b.debuggable);
            match b.pinning {
                None => println!("no pinning, default verification"),
                Some(p) => {
                    println!("use default trust store: {}", p.use_default_trust_store);
                    for pin in &p.pins {
                        println!("  {} {} {}", pin.kind.manifest_name(), pin.algo.manifest_name(), pin.fingerprint.to_colon_hex());
                    }
                }
            }
            for w in parsed.warnings {
                println!("warning: {w:?}");
            }
        }
        Err(e) => println!("invalid policy: {e}"),
    }
}
