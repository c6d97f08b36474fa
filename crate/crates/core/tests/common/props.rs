//! Randomized checks of the manifest policy semantics, shared by the
//! property tests and the acceptance run.

use std::sync::LazyLock;

use chrono::{DateTime, TimeZone, Utc};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use sslguard::policy::{PinAlgo, PinEntry, PinKind, PinningPolicy, PolicyBundle};
use sslguard::x509::{
    build_chain, extract_identifiers, host_matches, verify_chain, verify_peer, CertRecord, ChainCheck, PresentedChain,
    TrustStore, VerdictReason, VerdictWarning,
};
use sslguard_fixtures::certs::{CertSpec, Day, Issued};

use super::{cert, presented, record, store};

pub const CHAINS: [&str; 8] = [
    "valid",
    "expired_intermediate",
    "intermediate_not_ca",
    "untrusted_root",
    "expired_leaf",
    "self_signed",
    "self_signed_expired",
    "cn_only",
];

pub const HOSTS: [&str; 8] = [
    "www.foo.com",
    "b.foo.com",
    "old.foo.com",
    "legacy.foo.com",
    "dev.foo.com",
    "a.b.foo.com",
    "foo.com",
    "evil.example",
];

pub struct Pool {
    pub chains: Vec<PresentedChain>,
    /// Every certificate that appears in some fixture.
    pub certs: Vec<CertRecord>,
    /// android-4.2 roots plus the rogue root.
    pub roots: Vec<CertRecord>,
}

pub static POOL: LazyLock<Pool> = LazyLock::new(|| {
    let chains: Vec<PresentedChain> = CHAINS.iter().map(|n| presented(n)).collect();
    let mut certs: Vec<CertRecord> = Vec::new();
    for c in chains.iter().flat_map(|p| std::iter::once(&p.leaf).chain(&p.extras)) {
        if !certs.contains(c) {
            certs.push(c.clone());
        }
    }
    let mut roots = store("android-4.2").roots().to_vec();
    roots.push(cert("untrusted_root", "root.pem"));
    for r in &roots {
        if !certs.contains(r) {
            certs.push(r.clone());
        }
    }
    Pool { chains, certs, roots }
});

pub fn pin() -> impl Strategy<Value = PinEntry> {
    let known = (0..POOL.certs.len(), any::<bool>(), any::<bool>()).prop_map(|(i, is_self, sha1)| {
        let algo = if sha1 { PinAlgo::Sha1 } else { PinAlgo::Sha256 };
        let kind = if is_self { PinKind::SelfPin } else { PinKind::CaPin };
        PinEntry::new(kind, algo, POOL.certs[i].fingerprints.get(algo)).unwrap()
    });
    let random = prop::collection::vec(any::<u8>(), 20).prop_map(|fp| PinEntry::new(PinKind::CaPin, PinAlgo::Sha1, &fp).unwrap());
    prop_oneof![4 => known, 1 => random]
}

pub fn as_of() -> impl Strategy<Value = DateTime<Utc>> {
    // 2009-01-01 .. 2036-01-01
    (1_230_768_000i64..2_082_758_400).prop_map(|s| Utc.timestamp_opt(s, 0).unwrap())
}

pub fn store_from(mask: u8) -> TrustStore {
    let roots = POOL
        .roots
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, r)| r.clone())
        .collect();
    TrustStore::new(format!("mask{mask:02x}"), roots).unwrap()
}

pub fn pinning(pins: Vec<PinEntry>, use_default: bool) -> Option<PinningPolicy> {
    PinningPolicy::new(use_default, pins).ok()
}

/// (i) With the default store switched off, nothing is accepted without a
/// matching pin.
pub fn pinned_only_accepts_with_pin(
    chain: usize,
    host: usize,
    pins: Vec<PinEntry>,
    mask: u8,
    at: DateTime<Utc>,
) -> Result<(), TestCaseError> {
    let Some(pinning) = pinning(pins, false) else {
        return Ok(());
    };
    let bundle = PolicyBundle {
        debuggable: false,
        pinning: Some(pinning),
    };
    let v = verify_peer(HOSTS[host], &POOL.chains[chain], &bundle, &store_from(mask), at);
    if v.accepted {
        prop_assert!(v.matched_pin.is_some(), "accepted without a pin: {v:?}");
        prop_assert_eq!(v.reason, VerdictReason::OkPinned);
    }
    Ok(())
}

/// A throwaway self-signed certificate with arbitrary names and validity.
pub fn random_self_signed() -> impl Strategy<Value = CertRecord> {
    ("[a-z]{1,8}(\\.[a-z]{1,8}){0,3}", any::<bool>(), 1990i32..2040, 0i32..30).prop_map(|(cn, san, from, len)| {
        let sans: Vec<&str> = if san { vec![cn.as_str()] } else { vec![] };
        let spec = CertSpec::leaf(&cn, &sans).valid(Day(from, 1, 1), Day(from + len, 6, 30));
        record(&Issued::self_signed(&spec).unwrap())
    })
}

/// (ii) A debuggable build accepts any certificate and says so.
pub fn debuggable_accepts_anything(
    leaf: CertRecord,
    host: String,
    pins: Vec<PinEntry>,
    use_default: bool,
    mask: u8,
    at: DateTime<Utc>,
) -> Result<(), TestCaseError> {
    let bundle = PolicyBundle {
        debuggable: true,
        pinning: pinning(pins, use_default),
    };
    let v = verify_peer(&host, &PresentedChain::new(leaf, vec![]), &bundle, &store_from(mask), at);
    prop_assert!(v.accepted);
    prop_assert_eq!(v.reason, VerdictReason::OkDebugBypass);
    prop_assert_eq!(v.warnings, vec![VerdictWarning::DebugBypassActive]);
    Ok(())
}

/// (iii) Without a debug flag or pinning, the verdict is exactly chain
/// building, then the chain checks, then the host name.
pub fn plain_policy_is_default_verification(
    chain: usize,
    host: usize,
    mask: u8,
    at: DateTime<Utc>,
) -> Result<(), TestCaseError> {
    let s = store_from(mask);
    let p = &POOL.chains[chain];
    let expected = match build_chain(p, &s) {
        Err(_) => VerdictReason::ChainBuildFailure,
        Ok(built) => match verify_chain(&built.certs, &s, at) {
            ChainCheck::Ok => {
                let ids = extract_identifiers(&built.certs[0]);
                if ids.names.is_empty() {
                    VerdictReason::NoIdentifiers
                } else if host_matches(HOSTS[host], &ids) {
                    VerdictReason::Ok
                } else {
                    VerdictReason::HostnameMismatch
                }
            }
            ChainCheck::Expired => VerdictReason::Expired,
            ChainCheck::NotYetValid => VerdictReason::NotYetValid,
            ChainCheck::CaBitMissing => VerdictReason::CaBitMissing,
            ChainCheck::UntrustedRoot => VerdictReason::UntrustedRoot,
        },
    };
    let v = verify_peer(HOSTS[host], p, &PolicyBundle::default(), &s, at);
    prop_assert_eq!(v.reason, expected);
    prop_assert!(v.matched_pin.is_none());
    Ok(())
}

/// (iv) Taking a root out of the store never turns a rejection into an
/// acceptance.
#[allow(clippy::too_many_arguments)]
pub fn removing_a_root_never_helps(
    chain: usize,
    host: usize,
    pins: Vec<PinEntry>,
    mode: u8,
    mask: u8,
    drop: usize,
    at: DateTime<Utc>,
) -> Result<(), TestCaseError> {
    let pinning = match mode % 3 {
        0 => None,
        1 => pinning(pins, true),
        _ => pinning(pins, false),
    };
    let bundle = PolicyBundle {
        debuggable: false,
        pinning,
    };
    let full = store_from(mask);
    let smaller = full.without(&POOL.roots[drop % POOL.roots.len()]);
    let p = &POOL.chains[chain];
    let with = verify_peer(HOSTS[host], p, &bundle, &full, at);
    let without = verify_peer(HOSTS[host], p, &bundle, &smaller, at);
    if without.accepted {
        prop_assert!(with.accepted, "accepted only after removing a root: {without:?} vs {with:?}");
    }
    Ok(())
}
