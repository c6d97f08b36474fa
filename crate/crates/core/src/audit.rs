//! Server certificate audit.
//!
//! A target is either a live endpoint, whose chain is captured with an
//! unverified TLS handshake, or a PEM file. The chain is checked against
//! each root-store profile separately and then put into one certificate
//! class. Host names play no part in the class; they are reported on the
//! side.

use std::collections::BTreeMap;
use std::fmt;
use std::io::ErrorKind;
use std::net::{IpAddr, TcpStream, ToSocketAddrs};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use chrono::{DateTime, Utc};
use rayon::prelude::*;
use rustls::client::danger::{HandshakeSignatureValid, ServerCertVerified, ServerCertVerifier};
use rustls::crypto::{verify_tls12_signature, verify_tls13_signature, CryptoProvider};
use rustls::pki_types::{CertificateDer, ServerName, UnixTime};
use rustls::{ClientConfig, ClientConnection, DigitallySignedStruct, SignatureScheme};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::x509::{
    build_chain, extract_identifiers, host_matches, verify_chain, CertError, CertRecord, ChainCheck, PresentedChain, TrustStore,
};

pub const DEFAULT_PORT: u16 = 443;

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("{0}: unreachable: {1}")]
    Unreachable(String, String),
    #[error("{0}: handshake failed: {1}")]
    HandshakeFailure(String, String),
    #[error("bad fixture {path}: {reason}")]
    BadFixture { path: String, reason: String },
    #[error("bad target {0:?}: {1}")]
    BadTarget(String, &'static str),
    #[error("no root-store profiles given")]
    NoProfiles,
    #[error("building worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Endpoint {
    pub host: String,
    pub port: u16,
}

impl Endpoint {
    pub fn new(host: impl Into<String>, port: u16) -> Result<Self, AuditError> {
        let host = host.into();
        if port == 0 {
            return Err(AuditError::BadTarget(format!("{host}:{port}"), "port out of range"));
        }
        let valid = host.parse::<IpAddr>().is_ok()
            || (!host.is_empty()
                && host.len() <= 253
                && host
                    .trim_end_matches('.')
                    .split('.')
                    .all(|l| !l.is_empty() && l.len() <= 63 && l.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-')));
        if !valid {
            return Err(AuditError::BadTarget(host, "not a host name or IP address"));
        }
        Ok(Endpoint { host, port })
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.host.contains(':') {
            write!(f, "[{}]:{}", self.host, self.port)
        } else {
            write!(f, "{}:{}", self.host, self.port)
        }
    }
}

impl FromStr for Endpoint {
    type Err = AuditError;

    /// `host`, `host:port`, `[v6]` or `[v6]:port`.
    fn from_str(s: &str) -> Result<Self, AuditError> {
        let bad = |why| AuditError::BadTarget(s.to_string(), why);
        let (host, port) = if let Some(rest) = s.strip_prefix('[') {
            let (host, tail) = rest.split_once(']').ok_or_else(|| bad("unclosed '['"))?;
            match tail {
                "" => (host, None),
                _ => (host, Some(tail.strip_prefix(':').ok_or_else(|| bad("junk after ']'"))?)),
            }
        } else if s.parse::<IpAddr>().is_ok() {
            (s, None)
        } else {
            match s.rsplit_once(':') {
                Some((h, p)) => (h, Some(p)),
                None => (s, None),
            }
        };
        let port = match port {
            Some(p) => p.parse::<u16>().map_err(|_| bad("port out of range"))?,
            None => DEFAULT_PORT,
        };
        Endpoint::new(host, port)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Endpoint(Endpoint),
    /// `label` is the target as written; `path` is where it resolves.
    Fixture { label: String, path: PathBuf },
}

impl Target {
    /// Parses one line of a targets file. Relative fixture paths resolve
    /// against `base`.
    pub fn parse(line: &str, base: &Path) -> Result<Self, AuditError> {
        let line = line.trim();
        match line.strip_prefix("file:") {
            Some("") => Err(AuditError::BadTarget(line.to_string(), "empty path")),
            Some(p) => Ok(Target::Fixture {
                label: line.to_string(),
                path: base.join(p),
            }),
            None => Ok(Target::Endpoint(line.parse()?)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Target::Endpoint(e) => e.to_string(),
            Target::Fixture { label, .. } => label.clone(),
        }
    }
}

/// Targets file: one target per line, `#` comments and blank lines ignored.
pub fn parse_targets(text: &str, base: &Path) -> Result<Vec<Target>, AuditError> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| Target::parse(l, base))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CertClass {
    Valid,
    SelfSigned,
    UntrustedCa,
    Expired,
    Unreachable,
}

/// Result of checking a chain against one profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChainOutcome {
    Ok,
    Expired,
    NotYetValid,
    CaBitMissing,
    UntrustedRoot,
    ChainBuildFailure,
}

impl From<ChainCheck> for ChainOutcome {
    fn from(check: ChainCheck) -> Self {
        match check {
            ChainCheck::Ok => ChainOutcome::Ok,
            ChainCheck::Expired => ChainOutcome::Expired,
            ChainCheck::NotYetValid => ChainOutcome::NotYetValid,
            ChainCheck::CaBitMissing => ChainOutcome::CaBitMissing,
            ChainCheck::UntrustedRoot => ChainOutcome::UntrustedRoot,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertAuditResult {
    pub endpoint_or_fixture: String,
    pub cert_class: CertClass,
    /// Empty when the target was unreachable.
    pub per_profile: BTreeMap<String, ChainOutcome>,
    pub as_of: DateTime<Utc>,
    /// Whether the leaf names the endpoint's host. Advisory; unset for
    /// fixtures and unreachable targets.
    #[serde(default)]
    pub hostname_match: Option<bool>,
    #[serde(default)]
    pub detail: Option<String>,
}

/// Checks `presented` against every profile and classifies it.
///
/// Valid if any profile accepts the chain. Otherwise Expired if the leaf,
/// or a profile's chain, has lapsed; then SelfSigned for a self-signed
/// leaf; anything else is UntrustedCa.
pub fn classify_chain(
    presented: &PresentedChain,
    profiles: &[TrustStore],
    as_of: DateTime<Utc>,
) -> (CertClass, BTreeMap<String, ChainOutcome>) {
    let per_profile: BTreeMap<String, ChainOutcome> = profiles
        .iter()
        .map(|store| {
            let outcome = match build_chain(presented, store) {
                Ok(built) => verify_chain(&built.certs, store, as_of).into(),
                Err(_) => ChainOutcome::ChainBuildFailure,
            };
            (store.profile_name().to_string(), outcome)
        })
        .collect();

    let leaf = &presented.leaf;
    let class = if per_profile.values().any(|o| *o == ChainOutcome::Ok) {
        CertClass::Valid
    } else if leaf.not_after < as_of || per_profile.values().any(|o| *o == ChainOutcome::Expired) {
        CertClass::Expired
    } else if leaf.is_self_signed() {
        CertClass::SelfSigned
    } else {
        CertClass::UntrustedCa
    };
    (class, per_profile)
}

pub fn load_fixture(path: &Path) -> Result<PresentedChain, AuditError> {
    let bad = |reason: String| AuditError::BadFixture {
        path: path.display().to_string(),
        reason,
    };
    let bytes = std::fs::read(path).map_err(|e| bad(e.to_string()))?;
    PresentedChain::from_pem(&bytes).map_err(|e| bad(e.to_string()))
}

pub fn audit_target(
    target: &Target,
    profiles: &[TrustStore],
    as_of: DateTime<Utc>,
    timeout: Duration,
) -> Result<CertAuditResult, AuditError> {
    if profiles.is_empty() {
        return Err(AuditError::NoProfiles);
    }
    let label = target.label();
    let (presented, host) = match target {
        Target::Fixture { path, .. } => (load_fixture(path)?, None),
        Target::Endpoint(endpoint) => match fetch_chain(endpoint, timeout) {
            Ok(chain) => (chain, Some(endpoint.host.as_str())),
            Err(e @ (AuditError::Unreachable(..) | AuditError::HandshakeFailure(..))) => {
                return Ok(CertAuditResult {
                    endpoint_or_fixture: label,
                    cert_class: CertClass::Unreachable,
                    per_profile: BTreeMap::new(),
                    as_of,
                    hostname_match: None,
                    detail: Some(e.to_string()),
                })
            }
            Err(e) => return Err(e),
        },
    };
    let (cert_class, per_profile) = classify_chain(&presented, profiles, as_of);
    Ok(CertAuditResult {
        endpoint_or_fixture: label,
        cert_class,
        per_profile,
        as_of,
        hostname_match: host.map(|h| host_matches(h, &extract_identifiers(&presented.leaf))),
        detail: None,
    })
}

/// Audits every target on at most `jobs` threads. Results are sorted by
/// target label.
pub fn audit_batch(
    targets: &[Target],
    profiles: &[TrustStore],
    as_of: DateTime<Utc>,
    timeout: Duration,
    jobs: usize,
) -> Result<Vec<CertAuditResult>, AuditError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| AuditError::Pool(e.to_string()))?;
    let mut results = pool.install(|| {
        targets
            .par_iter()
            .map(|t| audit_target(t, profiles, as_of, timeout))
            .collect::<Result<Vec<_>, _>>()
    })?;
    results.sort_by(|a, b| a.endpoint_or_fixture.cmp(&b.endpoint_or_fixture));
    Ok(results)
}

/// Accepts nothing; it only keeps what the server presented. Returning an
/// error from the certificate check aborts the handshake before any
/// application data can flow.
#[derive(Debug)]
struct Recorder {
    seen: Mutex<Option<Vec<Vec<u8>>>>,
    provider: Arc<CryptoProvider>,
}

const CAPTURED: &str = "chain captured";

impl ServerCertVerifier for Recorder {
    fn verify_server_cert(
        &self,
        end_entity: &CertificateDer<'_>,
        intermediates: &[CertificateDer<'_>],
        _server_name: &ServerName<'_>,
        _ocsp_response: &[u8],
        _now: UnixTime,
    ) -> Result<ServerCertVerified, rustls::Error> {
        let certs = std::iter::once(end_entity)
            .chain(intermediates)
            .map(|c| c.as_ref().to_vec())
            .collect();
        *self.seen.lock().unwrap() = Some(certs);
        Err(rustls::Error::General(CAPTURED.into()))
    }

    fn verify_tls12_signature(
        &self,
        message: &[u8],
        cert: &CertificateDer<'_>,
        dss: &DigitallySignedStruct,
    ) -> Result<HandshakeSignatureValid, rustls::Error> {
        verify_tls12_signature(message, cert, dss, &self.provider.signature_verification_algorithms)
    }

    fn verify_tls13_signature(
        &self,
        message: &[u8],
        cert: &CertificateDer<'_>,
        dss: &DigitallySignedStruct,
    ) -> Result<HandshakeSignatureValid, rustls::Error> {
        verify_tls13_signature(message, cert, dss, &self.provider.signature_verification_algorithms)
    }

    fn supported_verify_schemes(&self) -> Vec<SignatureScheme> {
        self.provider.signature_verification_algorithms.supported_schemes()
    }
}

/// Connects to `endpoint` and returns the certificates it presents,
/// without judging them.
pub fn fetch_chain(endpoint: &Endpoint, timeout: Duration) -> Result<PresentedChain, AuditError> {
    let label = endpoint.to_string();
    let unreachable = |why: String| AuditError::Unreachable(label.clone(), why);
    let handshake = |why: String| AuditError::HandshakeFailure(label.clone(), why);

    let addrs: Vec<_> = (endpoint.host.as_str(), endpoint.port)
        .to_socket_addrs()
        .map_err(|e| unreachable(e.to_string()))?
        .collect();
    let mut last_err = "no addresses".to_string();
    let mut stream = None;
    for addr in addrs {
        match TcpStream::connect_timeout(&addr, timeout) {
            Ok(s) => {
                stream = Some(s);
                break;
            }
            Err(e) => last_err = e.to_string(),
        }
    }
    let mut stream = stream.ok_or_else(|| unreachable(last_err))?;
    stream.set_read_timeout(Some(timeout)).map_err(|e| unreachable(e.to_string()))?;
    stream.set_write_timeout(Some(timeout)).map_err(|e| unreachable(e.to_string()))?;

    let provider = Arc::new(rustls::crypto::ring::default_provider());
    let recorder = Arc::new(Recorder {
        seen: Mutex::new(None),
        provider: provider.clone(),
    });
    let config = ClientConfig::builder_with_provider(provider)
        .with_safe_default_protocol_versions()
        .map_err(|e| handshake(e.to_string()))?
        .dangerous()
        .with_custom_certificate_verifier(recorder.clone())
        .with_no_client_auth();
    let name = ServerName::try_from(endpoint.host.clone()).map_err(|e| handshake(e.to_string()))?;
    let mut conn = ClientConnection::new(Arc::new(config), name).map_err(|e| handshake(e.to_string()))?;

    let mut failure = None;
    while conn.is_handshaking() {
        if let Err(e) = conn.complete_io(&mut stream) {
            failure = Some(e);
            break;
        }
    }
    if let Some(der) = recorder.seen.lock().unwrap().take() {
        let certs = der
            .iter()
            .map(|d| CertRecord::from_der(d))
            .collect::<Result<Vec<_>, CertError>>()
            .map_err(|e| handshake(e.to_string()))?;
        return PresentedChain::from_certs(certs).map_err(|e| handshake(e.to_string()));
    }
    match failure {
        Some(e) if matches!(e.kind(), ErrorKind::TimedOut | ErrorKind::WouldBlock) => {
            Err(unreachable("timed out".into()))
        }
        Some(e) => Err(handshake(e.to_string())),
        None => Err(handshake("peer sent no certificate".into())),
    }
}
