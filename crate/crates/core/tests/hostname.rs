mod common;

use proptest::prelude::*;
use sslguard::x509::{extract_identifiers, host_matches, match_hostname, Identifier};

use common::{cert, self_signed, NAME_VECTORS};

#[test]
fn name_vectors() {
    for (host, id, expected) in NAME_VECTORS {
        let got = match_hostname(host, id).ok();
        assert_eq!(got, *expected, "host {host:?} vs {id:?}");
    }
}

#[test]
fn san_wins_over_cn() {
    let c = self_signed("cn.foo.com", &["www.foo.com"]);
    let ids = extract_identifiers(&c);
    assert!(!ids.cn_fallback_used);
    assert_eq!(ids.names, vec![Identifier::Dns("www.foo.com".into())]);
    assert!(host_matches("www.foo.com", &ids));
    assert!(!host_matches("cn.foo.com", &ids));
}

#[test]
fn cn_fallback_when_no_san() {
    let c = cert("cn_only", "leaf.pem");
    let ids = extract_identifiers(&c);
    assert!(ids.cn_fallback_used);
    assert!(host_matches("legacy.foo.com", &ids));
    assert!(!host_matches("www.foo.com", &ids));
}

#[test]
fn frozen_leaf_identifiers() {
    let ids = extract_identifiers(&cert("valid", "leaf.pem"));
    assert!(!ids.cn_fallback_used);
    assert!(host_matches("www.foo.com", &ids));
    assert!(host_matches("b.foo.com", &ids));
    assert!(!host_matches("a.b.foo.com", &ids));
    assert!(!host_matches("foo.com", &ids));
}

#[test]
fn ip_identities() {
    let c = self_signed("10.1.2.3", &["10.1.2.3", "::1", "host.foo.com"]);
    let ids = extract_identifiers(&c);
    assert!(host_matches("10.1.2.3", &ids));
    assert!(host_matches("::1", &ids));
    assert!(host_matches("host.foo.com", &ids));
    assert!(!host_matches("10.1.2.4", &ids));

    // An IP in the CN alone never names an IP host.
    let cn_ip = self_signed("10.1.2.3", &[]);
    let ids = extract_identifiers(&cn_ip);
    assert!(ids.cn_fallback_used);
    assert!(!host_matches("10.1.2.3", &ids));
}

#[test]
fn no_identifiers_at_all() {
    let mut c = self_signed("x.foo.com", &[]);
    c.cn = None;
    let ids = extract_identifiers(&c);
    assert!(ids.names.is_empty());
    assert!(!host_matches("x.foo.com", &ids));
}

fn label() -> impl Strategy<Value = String> {
    "[a-z0-9]([a-z0-9-]{0,6}[a-z0-9])?"
}

fn host(min: usize, max: usize) -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(label(), min..=max)
}

proptest! {
    #[test]
    fn exact_name_matches_itself_in_any_case(labels in host(1, 5), upper in any::<bool>()) {
        let name = labels.join(".");
        let host = if upper { name.to_uppercase() } else { name.clone() };
        prop_assert_eq!(match_hostname(&host, &name), Ok(true));
    }

    #[test]
    fn wildcard_covers_exactly_one_label(
        first in label(),
        extra in label(),
        base in host(2, 4),
    ) {
        let base = base.join(".");
        let id = format!("*.{base}");
        prop_assert_eq!(match_hostname(&format!("{first}.{base}"), &id), Ok(true));
        prop_assert_eq!(match_hostname(&base, &id), Ok(false));
        prop_assert_eq!(match_hostname(&format!("{extra}.{first}.{base}"), &id), Ok(false));
    }

    #[test]
    fn wildcard_needs_two_literal_labels(first in label(), tld in label()) {
        prop_assert_eq!(match_hostname(&format!("{first}.{tld}"), &format!("*.{tld}")), Ok(false));
    }

    #[test]
    fn label_count_must_agree(a in host(1, 4), b in host(1, 4)) {
        if a.len() != b.len() {
            prop_assert_eq!(match_hostname(&a.join("."), &b.join(".")), Ok(false));
        }
    }

    #[test]
    fn no_panic_on_arbitrary_input(h in "\\PC{0,30}", id in "\\PC{0,30}") {
        let _ = match_hostname(&h, &id);
    }
}
