//! Server identity: which names a certificate claims, and whether a host
//! matches one of them.
//!
//! SubjectAltName entries are authoritative; the subject CN is consulted only
//! when the certificate carries no SAN at all. Wildcards follow the
//! single-level rule: `*.foo.com` covers `b.foo.com` but neither `foo.com`
//! nor `a.b.foo.com`.

use std::net::IpAddr;

use serde::Serialize;
use thiserror::Error;

use super::CertRecord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HostnameError {
    #[error("malformed DNS identifier {0:?}: {1}")]
    MalformedIdentifier(String, &'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum Identifier {
    Dns(String),
    Ip(IpAddr),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Identifiers {
    pub names: Vec<Identifier>,
    pub cn_fallback_used: bool,
}

pub fn extract_identifiers(cert: &CertRecord) -> Identifiers {
    if !cert.san_dns.is_empty() || !cert.san_ip.is_empty() {
        let names = cert
            .san_dns
            .iter()
            .cloned()
            .map(Identifier::Dns)
            .chain(cert.san_ip.iter().copied().map(Identifier::Ip))
            .collect();
        return Identifiers {
            names,
            cn_fallback_used: false,
        };
    }
    match &cert.cn {
        Some(cn) => Identifiers {
            names: vec![Identifier::Dns(cn.clone())],
            cn_fallback_used: true,
        },
        None => Identifiers {
            names: Vec::new(),
            cn_fallback_used: false,
        },
    }
}

/// Matches a normalized host name against one DNS identifier.
///
/// A wildcard is legal only as the entire leftmost label, matches exactly
/// one host label, and needs at least two literal labels after it.
/// Wildcards never match IP-address hosts.
pub fn match_hostname(host: &str, identifier: &str) -> Result<bool, HostnameError> {
    let id = identifier.strip_suffix('.').unwrap_or(identifier);
    let id_labels: Vec<&str> = id.split('.').collect();
    if id_labels.iter().any(|l| l.is_empty()) {
        return Err(HostnameError::MalformedIdentifier(
            identifier.to_string(),
            "empty label",
        ));
    }
    let wildcard = id_labels[0] == "*";
    if id_labels[0].contains('*') && !wildcard {
        return Err(HostnameError::MalformedIdentifier(
            identifier.to_string(),
            "partial-label wildcard",
        ));
    }
    if id_labels[1..].iter().any(|l| l.contains('*')) {
        return Err(HostnameError::MalformedIdentifier(
            identifier.to_string(),
            "wildcard outside the leftmost label",
        ));
    }

    let host = host.strip_suffix('.').unwrap_or(host);
    let host_labels: Vec<&str> = host.split('.').collect();
    if host_labels.iter().any(|l| l.is_empty()) || host_labels.len() != id_labels.len() {
        return Ok(false);
    }

    if wildcard {
        if id_labels.len() < 3 || host.parse::<IpAddr>().is_ok() {
            return Ok(false);
        }
        return Ok(labels_equal(&host_labels[1..], &id_labels[1..]));
    }
    Ok(labels_equal(&host_labels, &id_labels))
}

fn labels_equal(a: &[&str], b: &[&str]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.eq_ignore_ascii_case(y))
}

/// Lowercases and drops one trailing dot.
pub(crate) fn normalize_host(host: &str) -> String {
    host.trim()
        .strip_suffix('.')
        .unwrap_or(host.trim())
        .to_ascii_lowercase()
}

/// Whether `host` matches any of `ids`. Malformed identifiers
/// never match.
pub fn host_matches(host: &str, ids: &Identifiers) -> bool {
    let host = normalize_host(host);
    if let Ok(ip) = host.parse::<IpAddr>() {
        // CN fallback never stands in for an IP identity.
        return !ids.cn_fallback_used
            && ids
                .names
                .iter()
                .any(|id| matches!(id, Identifier::Ip(other) if *other == ip));
    }
    ids.names.iter().any(|id| match id {
        Identifier::Dns(name) => match_hostname(&host, name).unwrap_or(false),
        Identifier::Ip(_) => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_and_case() {
        assert_eq!(match_hostname("www.foo.com", "www.foo.com"), Ok(true));
        assert_eq!(match_hostname("www.foo.com", "WWW.Foo.COM"), Ok(true));
        assert_eq!(match_hostname("www.foo.com", "www.foo.org"), Ok(false));
    }

    #[test]
    fn single_level_wildcard() {
        assert_eq!(match_hostname("b.foo.com", "*.foo.com"), Ok(true));
        assert_eq!(match_hostname("a.b.foo.com", "*.foo.com"), Ok(false));
        assert_eq!(match_hostname("foo.com", "*.foo.com"), Ok(false));
    }

    #[test]
    fn malformed_identifiers() {
        for id in ["f*o.foo.com", "www.*.com", "*.foo..com", "**.foo.com", ""] {
            assert!(match_hostname("a.foo.com", id).is_err(), "{id}");
        }
    }

    #[test]
    fn wildcards_skip_ip_hosts() {
        assert_eq!(match_hostname("10.0.0.1", "*.0.0.1"), Ok(false));
    }
}
