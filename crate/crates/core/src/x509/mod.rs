//! Certificate facts, chain building, pinning and identity checks.
//!
//! Parsing and signature checks go through `x509-parser`; everything that
//! decides whether a peer is accepted lives in this module.

mod chain;
mod hostname;
mod store;
mod verify;

use std::fmt;
use std::net::IpAddr;

use base64::{engine::general_purpose::STANDARD, Engine as _};
use chrono::{DateTime, TimeZone, Utc};
use serde::{Serialize, Serializer};
use sha1::Sha1;
use sha2::{Digest, Sha256};
use thiserror::Error;
use x509_parser::extensions::GeneralName;
use x509_parser::prelude::{FromDer, X509Certificate};

use crate::policy::PinAlgo;

pub use chain::{build_chain, verify_chain, BuiltChain, ChainCheck, ChainError, ChainTerminal};
pub use hostname::{extract_identifiers, host_matches, match_hostname, HostnameError, Identifier, Identifiers};
pub use store::{StoreError, TrustStore};
pub use verify::{match_pins, verify_peer, VerdictReason, VerdictWarning, VerificationVerdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertError {
    #[error("certificate parse failure: {0}")]
    ParseFailure(String),
    #[error("no CERTIFICATE blocks found")]
    NoCertificates,
}

/// SHA-1 and SHA-256 digests of a certificate's DER encoding.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Fingerprints {
    pub sha1: [u8; 20],
    pub sha256: [u8; 32],
}

impl Fingerprints {
    pub fn of_der(der: &[u8]) -> Self {
        Fingerprints {
            sha1: Sha1::digest(der).into(),
            sha256: Sha256::digest(der).into(),
        }
    }

    pub fn get(&self, algo: PinAlgo) -> &[u8] {
        match algo {
            PinAlgo::Sha1 => &self.sha1,
            PinAlgo::Sha256 => &self.sha256,
        }
    }
}

impl fmt::Debug for Fingerprints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sha256:{}", hex::encode(self.sha256))
    }
}

impl Serialize for Fingerprints {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Fingerprints", 2)?;
        st.serialize_field("SHA1", &hex::encode_upper(self.sha1))?;
        st.serialize_field("SHA256", &hex::encode_upper(self.sha256))?;
        st.end()
    }
}

/// The parts of an X.509 certificate that verification looks at.
#[derive(Debug, Clone, Serialize)]
pub struct CertRecord {
    pub subject: String,
    pub issuer: String,
    pub san_dns: Vec<String>,
    pub san_ip: Vec<IpAddr>,
    /// Most specific (last) CN of the subject.
    pub cn: Option<String>,
    pub not_before: DateTime<Utc>,
    pub not_after: DateTime<Utc>,
    /// Basic Constraints CA bit; false when the extension is absent.
    pub is_ca: bool,
    pub fingerprints: Fingerprints,
    #[serde(skip)]
    pub raw_der: Vec<u8>,
}

impl PartialEq for CertRecord {
    fn eq(&self, other: &Self) -> bool {
        self.raw_der == other.raw_der
    }
}

impl Eq for CertRecord {}

impl CertRecord {
    pub fn from_der(der: &[u8]) -> Result<Self, CertError> {
        let cert = parse_der(der)?;
        let subject = cert.subject().to_string();
        let issuer = cert.issuer().to_string();
        let cn = cert
            .subject()
            .iter_common_name()
            .filter_map(|attr| attr.as_str().ok())
            .last()
            .map(str::to_string);

        let mut san_dns = Vec::new();
        let mut san_ip = Vec::new();
        let san = cert
            .subject_alternative_name()
            .map_err(|e| CertError::ParseFailure(format!("subjectAltName: {e}")))?;
        if let Some(san) = san {
            for name in &san.value.general_names {
                match name {
                    GeneralName::DNSName(dns) => san_dns.push(dns.to_string()),
                    GeneralName::IPAddress(bytes) => {
                        if let Some(ip) = ip_from_bytes(bytes) {
                            san_ip.push(ip);
                        }
                    }
                    _ => {}
                }
            }
        }

        let is_ca = cert
            .basic_constraints()
            .map_err(|e| CertError::ParseFailure(format!("basicConstraints: {e}")))?
            .map(|bc| bc.value.ca)
            .unwrap_or(false);

        let validity = cert.validity();
        let not_before = timestamp(validity.not_before.timestamp())?;
        let not_after = timestamp(validity.not_after.timestamp())?;
        if not_before > not_after {
            return Err(CertError::ParseFailure(
                "notBefore is later than notAfter".into(),
            ));
        }

        Ok(CertRecord {
            subject,
            issuer,
            san_dns,
            san_ip,
            cn,
            not_before,
            not_after,
            is_ca,
            fingerprints: Fingerprints::of_der(der),
            raw_der: der.to_vec(),
        })
    }

    /// Parses every `CERTIFICATE` block of a PEM document, in order.
    pub fn all_from_pem(pem: &[u8]) -> Result<Vec<Self>, CertError> {
        let mut out = Vec::new();
        for block in x509_parser::pem::Pem::iter_from_buffer(pem) {
            let block = block.map_err(|e| CertError::ParseFailure(format!("PEM: {e}")))?;
            if block.label == "CERTIFICATE" {
                out.push(Self::from_der(&block.contents)?);
            }
        }
        if out.is_empty() {
            return Err(CertError::NoCertificates);
        }
        Ok(out)
    }

    /// Accepts either PEM text or a single DER certificate.
    pub fn all_from_pem_or_der(bytes: &[u8]) -> Result<Vec<Self>, CertError> {
        if bytes.windows(10).any(|w| w == b"-----BEGIN") {
            Self::all_from_pem(bytes)
        } else {
            Ok(vec![Self::from_der(bytes)?])
        }
    }

    pub fn is_self_issued(&self) -> bool {
        normalize_dn(&self.subject) == normalize_dn(&self.issuer)
    }

    /// Subject equals issuer and the signature verifies under the
    /// certificate's own key.
    pub fn is_self_signed(&self) -> bool {
        self.is_self_issued() && self.signature_valid_under(self)
    }

    /// Whether `parent`'s key verifies this certificate's signature.
    pub fn signature_valid_under(&self, parent: &CertRecord) -> bool {
        let (Ok(child), Ok(parent)) = (parse_der(&self.raw_der), parse_der(&parent.raw_der)) else {
            return false;
        };
        child.verify_signature(Some(parent.public_key())).is_ok()
    }

    /// `issuer` names this certificate's issuer and signed it.
    pub fn is_issued_by(&self, issuer: &CertRecord) -> bool {
        normalize_dn(&self.issuer) == normalize_dn(&issuer.subject) && self.signature_valid_under(issuer)
    }

    /// Inclusive validity check at second granularity.
    pub fn valid_at(&self, as_of: DateTime<Utc>) -> bool {
        self.not_before <= as_of && as_of <= self.not_after
    }

    pub fn to_pem(&self) -> String {
        let body = STANDARD.encode(&self.raw_der);
        let mut out = String::from("-----BEGIN CERTIFICATE-----\n");
        for line in body.as_bytes().chunks(64) {
            out.push_str(std::str::from_utf8(line).expect("base64 is ascii"));
            out.push('\n');
        }
        out.push_str("-----END CERTIFICATE-----\n");
        out
    }
}

/// What a server sent: its own certificate plus whatever else it chose to
/// include, in presentation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentedChain {
    pub leaf: CertRecord,
    pub extras: Vec<CertRecord>,
}

impl PresentedChain {
    pub fn new(leaf: CertRecord, extras: Vec<CertRecord>) -> Self {
        PresentedChain { leaf, extras }
    }

    /// First certificate is the leaf.
    pub fn from_certs(mut certs: Vec<CertRecord>) -> Result<Self, CertError> {
        if certs.is_empty() {
            return Err(CertError::NoCertificates);
        }
        let leaf = certs.remove(0);
        Ok(PresentedChain { leaf, extras: certs })
    }

    pub fn from_pem(pem: &[u8]) -> Result<Self, CertError> {
        Self::from_certs(CertRecord::all_from_pem_or_der(pem)?)
    }
}

/// Case-folded, whitespace-collapsed distinguished name used for chaining.
pub fn normalize_dn(dn: &str) -> String {
    dn.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

fn parse_der(der: &[u8]) -> Result<X509Certificate<'_>, CertError> {
    let (rest, cert) =
        X509Certificate::from_der(der).map_err(|e| CertError::ParseFailure(e.to_string()))?;
    if !rest.is_empty() {
        return Err(CertError::ParseFailure(format!(
            "{} trailing bytes after certificate",
            rest.len()
        )));
    }
    Ok(cert)
}

fn timestamp(secs: i64) -> Result<DateTime<Utc>, CertError> {
    Utc.timestamp_opt(secs, 0)
        .single()
        .ok_or_else(|| CertError::ParseFailure(format!("time out of range: {secs}")))
}

fn ip_from_bytes(bytes: &[u8]) -> Option<IpAddr> {
    match bytes.len() {
        4 => Some(IpAddr::from(<[u8; 4]>::try_from(bytes).ok()?)),
        16 => Some(IpAddr::from(<[u8; 16]>::try_from(bytes).ok()?)),
        _ => None,
    }
}
