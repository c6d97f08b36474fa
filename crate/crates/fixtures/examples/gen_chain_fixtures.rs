//! Writes the frozen certificate fixtures used by the sslguard test suites.
//!
//! Usage: cargo run -p sslguard-fixtures --example gen_chain_fixtures -- <out-dir>

use std::fs;
use std::path::Path;

use sslguard_fixtures::certs::{CaBit, CertSpec, ChainFault, Day, Issued, ThreeChain};

fn write(dir: &Path, name: &str, text: &str) {
    fs::create_dir_all(dir).expect("create fixture dir");
    fs::write(dir.join(name), text).expect("write fixture");
}

fn write_chain(out: &Path, name: &str, chain: &ThreeChain) {
    let dir = out.join(name);
    write(&dir, "root.pem", &chain.root.pem());
    write(&dir, "intermediate.pem", &chain.intermediate.pem());
    write(&dir, "leaf.pem", &chain.leaf.pem());
    write(&dir, "presented.pem", &chain.presented_pem());
}

fn main() {
    let out = std::env::args().nth(1).expect("usage: gen_chain_fixtures <out-dir>");
    let out = Path::new(&out);

    let valid = ThreeChain::generate("Valid", ChainFault::None).unwrap();
    write_chain(out, "valid", &valid);
    let expired = ThreeChain::generate("Lapsed", ChainFault::ExpiredIntermediate).unwrap();
    write_chain(out, "expired_intermediate", &expired);
    let not_ca = ThreeChain::generate("NoCa", ChainFault::IntermediateNotCa).unwrap();
    write_chain(out, "intermediate_not_ca", &not_ca);

    // Same shape as `valid`, but the root is never put in a store; the
    // server also sends its root.
    let rogue = ThreeChain::generate("Rogue", ChainFault::None).unwrap();
    write_chain(out, "untrusted_root", &rogue);
    write(
        &out.join("untrusted_root"),
        "presented.pem",
        &format!("{}{}{}", rogue.leaf.pem(), rogue.intermediate.pem(), rogue.root.pem()),
    );

    // Leaf expired at 2013-03-01, issued under the trusted `valid` intermediate.
    let stale_leaf = Issued::signed_by(
        &CertSpec::leaf("old.foo.com", &["old.foo.com"]).valid(Day(2011, 1, 1), Day(2012, 6, 30)),
        &valid.intermediate,
    )
    .unwrap();
    let dir = out.join("expired_leaf");
    write(&dir, "leaf.pem", &stale_leaf.pem());
    write(&dir, "presented.pem", &format!("{}{}", stale_leaf.pem(), valid.intermediate.pem()));

    let self_signed = Issued::self_signed(&CertSpec::leaf("b.foo.com", &["b.foo.com"])).unwrap();
    let dir = out.join("self_signed");
    write(&dir, "leaf.pem", &self_signed.pem());
    write(&dir, "presented.pem", &self_signed.pem());

    let self_signed_expired = Issued::self_signed(
        &CertSpec::leaf("dev.foo.com", &["dev.foo.com"]).valid(Day(2011, 1, 1), Day(2012, 1, 1)),
    )
    .unwrap();
    let dir = out.join("self_signed_expired");
    write(&dir, "leaf.pem", &self_signed_expired.pem());
    write(&dir, "presented.pem", &self_signed_expired.pem());

    // CN-only certificate: no SubjectAltName extension at all.
    let mut cn_only_spec = CertSpec::leaf("legacy.foo.com", &[]);
    cn_only_spec.ca = CaBit::Absent;
    let cn_only = Issued::signed_by(&cn_only_spec, &valid.intermediate).unwrap();
    let dir = out.join("cn_only");
    write(&dir, "leaf.pem", &cn_only.pem());
    write(&dir, "presented.pem", &format!("{}{}", cn_only.pem(), valid.intermediate.pem()));

    // Two profiles differing by exactly one root.
    let legacy_root = Issued::self_signed(&CertSpec::ca("Legacy Commercial Root")).unwrap();
    let stores = out.join("stores");
    write(&stores, "android-2.3.3.pem", &legacy_root.pem());
    write(
        &stores,
        "android-4.2.pem",
        &format!("{}{}{}{}", legacy_root.pem(), valid.root.pem(), expired.root.pem(), not_ca.root.pem()),
    );
}
