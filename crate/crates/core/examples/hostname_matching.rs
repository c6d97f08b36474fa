//! Host name checks: single-level wildcards, SAN before CN.

use sslguard::x509::{extract_identifiers, host_matches, match_hostname, CertRecord};
use sslguard_fixtures::certs::{CertSpec, Issued};

fn main() {
    for (host, id) in [
        ("b.foo.com", "*.foo.com"),
        ("a.b.foo.com", "*.foo.com"),
        ("foo.com", "*.foo.com"),
        ("x.com", "*.com"),
        ("a.foo.com", "f*o.foo.com"),
    ] {
        println!("{host:<12} vs {id:<12} {:?}", match_hostname(host, id));
    }

    let issued = Issued::self_signed(&CertSpec::leaf("cn.foo.com", &["www.foo.com"])).unwrap();
    let ids = extract_identifiers(&CertRecord::from_der(&issued.der()).unwrap());
    println!("SAN present, CN fallback used: {}", ids.cn_fallback_used);
    println!("www.foo.com matches: {}", host_matches("www.foo.com", &ids));
    println!("cn.foo.com matches: {}", host_matches("cn.foo.com", &ids));
}
