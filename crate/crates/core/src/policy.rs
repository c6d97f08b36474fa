//! Manifest-level SSL configuration.
//!
//! Two knobs live in an app manifest: the `android:debuggable` flag on the
//! `application` element, which turns certificate verification off for
//! development builds, and the `uses-SSLPinning` element, which declares the
//! certificates (self-signed server certs or issuing CAs) the app trusts:
//!
//! ```xml
//! <uses-SSLPinning useDefaultTrustStore="false">
//!   <Cert type="self" algo="SHA-1">B8:01:...</Cert>
//!   <Cert type="ca" algo="SHA-1">93:E6:...</Cert>
//! </uses-SSLPinning>
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Namespace of the `android:` attribute prefix.
pub const ANDROID_NS: &str = "http://schemas.android.com/apk/res/android";

const PINNING_ELEMENT: &str = "uses-SSLPinning";
const CERT_ELEMENT: &str = "Cert";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolicyError {
    #[error("malformed manifest XML: {0}")]
    MalformedXml(String),
    #[error("manifest has no <application> element")]
    MissingApplication,
    #[error("unknown Cert type {0:?} (expected \"self\" or \"ca\")")]
    UnknownCertType(String),
    #[error("unknown fingerprint algorithm {0:?}")]
    UnknownAlgo(String),
    #[error("bad {algo} fingerprint: {reason}")]
    BadFingerprint { algo: PinAlgo, reason: String },
    #[error("uses-SSLPinning has no pins and useDefaultTrustStore=\"false\"; nothing would be trusted")]
    EmptyTrustPolicy,
    #[error("more than one <uses-SSLPinning> element")]
    DuplicatePinningElement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PinKind {
    /// Pins the server's own (typically self-signed) certificate.
    SelfPin,
    /// Pins an issuing CA anywhere above the leaf.
    CaPin,
}

impl PinKind {
    pub fn manifest_name(self) -> &'static str {
        match self {
            PinKind::SelfPin => "self",
            PinKind::CaPin => "ca",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PinAlgo {
    #[serde(rename = "SHA1")]
    Sha1,
    #[serde(rename = "SHA256")]
    Sha256,
}

impl PinAlgo {
    pub fn digest_len(self) -> usize {
        match self {
            PinAlgo::Sha1 => 20,
            PinAlgo::Sha256 => 32,
        }
    }

    /// Attribute spelling used when writing a manifest.
    pub fn manifest_name(self) -> &'static str {
        match self {
            PinAlgo::Sha1 => "SHA-1",
            PinAlgo::Sha256 => "SHA-256",
        }
    }
}

impl fmt::Display for PinAlgo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PinAlgo::Sha1 => "SHA1",
            PinAlgo::Sha256 => "SHA256",
        })
    }
}

impl FromStr for PinAlgo {
    type Err = PolicyError;

    /// Accepts `SHA-1`, `SHA1`, `SHA-256`, `SHA256` in any case.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let folded: String = s
            .trim()
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .collect::<String>()
            .to_ascii_uppercase();
        match folded.as_str() {
            "SHA1" => Ok(PinAlgo::Sha1),
            "SHA256" => Ok(PinAlgo::Sha256),
            _ => Err(PolicyError::UnknownAlgo(s.to_string())),
        }
    }
}

/// Raw fingerprint bytes whose length matches their algorithm.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint(Vec<u8>);

impl Fingerprint {
    pub fn from_bytes(algo: PinAlgo, bytes: &[u8]) -> Result<Self, PolicyError> {
        if bytes.len() != algo.digest_len() {
            return Err(PolicyError::BadFingerprint {
                algo,
                reason: format!("expected {} bytes, got {}", algo.digest_len(), bytes.len()),
            });
        }
        Ok(Fingerprint(bytes.to_vec()))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Upper-case, colon-separated form (`B8:01:...`).
    pub fn to_colon_hex(&self) -> String {
        self.0
            .iter()
            .map(|b| format!("{b:02X}"))
            .collect::<Vec<_>>()
            .join(":")
    }
}

impl fmt::Debug for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fingerprint({})", hex::encode_upper(&self.0))
    }
}

impl Serialize for Fingerprint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_colon_hex())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PinEntry {
    pub kind: PinKind,
    pub algo: PinAlgo,
    pub fingerprint: Fingerprint,
}

impl PinEntry {
    pub fn new(kind: PinKind, algo: PinAlgo, fingerprint: &[u8]) -> Result<Self, PolicyError> {
        Ok(PinEntry {
            kind,
            algo,
            fingerprint: Fingerprint::from_bytes(algo, fingerprint)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PinningPolicy {
    pub use_default_trust_store: bool,
    pub pins: Vec<PinEntry>,
}

impl PinningPolicy {
    /// Rejects the one configuration that can never accept a peer.
    pub fn new(use_default_trust_store: bool, pins: Vec<PinEntry>) -> Result<Self, PolicyError> {
        if pins.is_empty() && !use_default_trust_store {
            return Err(PolicyError::EmptyTrustPolicy);
        }
        Ok(PinningPolicy {
            use_default_trust_store,
            pins,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PolicyBundle {
    pub debuggable: bool,
    /// `None` means no `uses-SSLPinning` element: default verification.
    pub pinning: Option<PinningPolicy>,
}

/// Something in the manifest that was seen but not interpreted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolicyWarning {
    pub element: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifestPolicy {
    pub bundle: PolicyBundle,
    pub warnings: Vec<PolicyWarning>,
}

/// Decodes a hex fingerprint, ignoring case, `:` separators and whitespace.
pub fn normalize_fingerprint(text: &str, algo: PinAlgo) -> Result<Fingerprint, PolicyError> {
    let digits: String = text
        .chars()
        .filter(|c| *c != ':' && !c.is_whitespace())
        .collect();
    let bytes = hex::decode(&digits).map_err(|e| PolicyError::BadFingerprint {
        algo,
        reason: e.to_string(),
    })?;
    Fingerprint::from_bytes(algo, &bytes)
}

/// Extracts the debug flag and pinning policy from manifest XML.
pub fn parse_manifest_policy(xml_text: &str) -> Result<ManifestPolicy, PolicyError> {
    let doc = roxmltree::Document::parse(xml_text)
        .map_err(|e| PolicyError::MalformedXml(e.to_string()))?;
    let mut warnings = Vec::new();

    let application = doc
        .descendants()
        .find(|n| n.is_element() && n.tag_name().name() == "application")
        .ok_or(PolicyError::MissingApplication)?;

    let debuggable = match application.attribute((ANDROID_NS, "debuggable")) {
        None => false,
        Some(v) if v.trim().eq_ignore_ascii_case("true") => true,
        Some(v) if v.trim().eq_ignore_ascii_case("false") => false,
        Some(other) => {
            warnings.push(PolicyWarning {
                element: "application".into(),
                message: format!("android:debuggable={other:?} is not a literal boolean; treated as false"),
            });
            false
        }
    };

    let mut pinning_nodes = doc
        .descendants()
        .filter(|n| n.is_element() && n.tag_name().name() == PINNING_ELEMENT);
    let pinning = match (pinning_nodes.next(), pinning_nodes.next()) {
        (None, _) => None,
        (Some(_), Some(_)) => return Err(PolicyError::DuplicatePinningElement),
        (Some(node), None) => Some(parse_pinning(node, &mut warnings)?),
    };

    Ok(ManifestPolicy {
        bundle: PolicyBundle {
            debuggable,
            pinning,
        },
        warnings,
    })
}

fn parse_pinning(
    node: roxmltree::Node<'_, '_>,
    warnings: &mut Vec<PolicyWarning>,
) -> Result<PinningPolicy, PolicyError> {
    let mut use_default_trust_store = false;
    for attr in node.attributes() {
        if attr.name() == "useDefaultTrustStore" {
            use_default_trust_store = match attr.value().trim() {
                v if v.eq_ignore_ascii_case("true") => true,
                v if v.eq_ignore_ascii_case("false") => false,
                other => {
                    warnings.push(PolicyWarning {
                        element: PINNING_ELEMENT.into(),
                        message: format!("useDefaultTrustStore={other:?} is not a boolean; treated as false"),
                    });
                    false
                }
            };
        } else {
            warnings.push(unknown_attribute(PINNING_ELEMENT, attr.name()));
        }
    }

    let mut pins = Vec::new();
    for child in node.children().filter(|c| c.is_element()) {
        if child.tag_name().name() != CERT_ELEMENT {
            warnings.push(PolicyWarning {
                element: PINNING_ELEMENT.into(),
                message: format!("ignoring unknown child element <{}>", child.tag_name().name()),
            });
            continue;
        }
        pins.push(parse_cert(child, warnings)?);
    }

    PinningPolicy::new(use_default_trust_store, pins)
}

fn parse_cert(
    node: roxmltree::Node<'_, '_>,
    warnings: &mut Vec<PolicyWarning>,
) -> Result<PinEntry, PolicyError> {
    for attr in node.attributes() {
        if attr.name() != "type" && attr.name() != "algo" {
            warnings.push(unknown_attribute(CERT_ELEMENT, attr.name()));
        }
    }
    let kind = match node.attribute("type") {
        Some("self") => PinKind::SelfPin,
        Some("ca") => PinKind::CaPin,
        other => return Err(PolicyError::UnknownCertType(other.unwrap_or("").to_string())),
    };
    let algo: PinAlgo = node
        .attribute("algo")
        .ok_or_else(|| PolicyError::UnknownAlgo(String::new()))?
        .parse()?;
    // Text may be split by comments, so gather every text descendant.
    let text: String = node
        .descendants()
        .filter(|n| n.is_text())
        .filter_map(|n| n.text())
        .collect();
    let fingerprint = normalize_fingerprint(&text, algo)?;
    Ok(PinEntry {
        kind,
        algo,
        fingerprint,
    })
}

fn unknown_attribute(element: &str, attr: &str) -> PolicyWarning {
    PolicyWarning {
        element: element.into(),
        message: format!("ignoring unknown attribute {attr:?}"),
    }
}

/// Writes a minimal manifest carrying `bundle`. The inverse of
/// [`parse_manifest_policy`] for warning-free input.
pub fn render_manifest(bundle: &PolicyBundle) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n");
    out.push_str(&format!(
        "<manifest xmlns:android=\"{ANDROID_NS}\" package=\"com.example.app\">\n"
    ));
    if let Some(pinning) = &bundle.pinning {
        out.push_str(&format!(
            "  <{PINNING_ELEMENT} useDefaultTrustStore=\"{}\">\n",
            pinning.use_default_trust_store
        ));
        for pin in &pinning.pins {
            out.push_str(&format!(
                "    <{CERT_ELEMENT} type=\"{}\" algo=\"{}\">\n      {}\n    </{CERT_ELEMENT}>\n",
                pin.kind.manifest_name(),
                pin.algo.manifest_name(),
                pin.fingerprint.to_colon_hex()
            ));
        }
        out.push_str(&format!("  </{PINNING_ELEMENT}>\n"));
    }
    if bundle.debuggable {
        out.push_str("  <application android:debuggable=\"true\" android:label=\"app\"/>\n");
    } else {
        out.push_str("  <application android:label=\"app\"/>\n");
    }
    out.push_str("</manifest>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SELF_FP: &str = "B8:01:3C:5E:77:90:A1:B2:C3:D4:E5:F6:07:18:29:3A:4B:5C:6D:7E";
    const CA_FP: &str = "93:E6:AB:12:34:56:78:9A:BC:DE:F0:11:22:33:44:55:66:77:88:99";

    fn pinned_manifest(debug_attr: &str) -> String {
        format!(
            r#"<?xml version="1.0" encoding="utf-8"?>
<manifest xmlns:android="http://schemas.android.com/apk/res/android" package="com.example">
<uses-SSLPinning useDefaultTrustStore="false" >
<!--Self-signed Server Certificate-->
<Cert type="self" algo="SHA-1">
  {SELF_FP}
</Cert>
<!--Trusted Issuer CA Certificate-->
<Cert type="ca" algo="SHA-1">
  {CA_FP}
</Cert>
</uses-SSLPinning>
<application {debug_attr} android:label="demo"/>
</manifest>"#
        )
    }

    #[test]
    fn pinned_manifest_policy() {
        let parsed = parse_manifest_policy(&pinned_manifest("")).unwrap();
        assert!(parsed.warnings.is_empty());
        let bundle = parsed.bundle;
        assert!(!bundle.debuggable);
        let pinning = bundle.pinning.unwrap();
        assert!(!pinning.use_default_trust_store);
        assert_eq!(pinning.pins.len(), 2);
        assert_eq!(pinning.pins[0].kind, PinKind::SelfPin);
        assert_eq!(pinning.pins[0].algo, PinAlgo::Sha1);
        assert_eq!(&pinning.pins[0].fingerprint.as_bytes()[..2], &[0xB8, 0x01]);
        assert_eq!(pinning.pins[1].kind, PinKind::CaPin);
        assert_eq!(&pinning.pins[1].fingerprint.as_bytes()[..2], &[0x93, 0xE6]);
    }

    #[test]
    fn debuggable_without_pinning() {
        let xml = r#"<manifest xmlns:android="http://schemas.android.com/apk/res/android">
            <application android:debuggable="true"/></manifest>"#;
        let bundle = parse_manifest_policy(xml).unwrap().bundle;
        assert_eq!(
            bundle,
            PolicyBundle {
                debuggable: true,
                pinning: None
            }
        );
    }

    #[test]
    fn all_defaults() {
        let xml = r#"<manifest><application/></manifest>"#;
        assert_eq!(parse_manifest_policy(xml).unwrap().bundle, PolicyBundle::default());
    }

    #[test]
    fn fingerprint_separators_and_case() {
        let a = normalize_fingerprint(&SELF_FP.to_lowercase(), PinAlgo::Sha1).unwrap();
        let b = normalize_fingerprint(&SELF_FP.replace(':', ""), PinAlgo::Sha1).unwrap();
        let c = normalize_fingerprint(&SELF_FP.replace(':', " "), PinAlgo::Sha1).unwrap();
        assert_eq!(a, b);
        assert_eq!(b, c);
        assert_eq!(a.as_bytes().len(), 20);
        assert_eq!(&a.as_bytes()[..2], &[0xB8, 0x01]);
    }

    #[test]
    fn fingerprint_length_mismatch() {
        assert!(matches!(
            normalize_fingerprint("B8:01", PinAlgo::Sha1),
            Err(PolicyError::BadFingerprint { .. })
        ));
        // A SHA-1 digest is not a SHA-256 pin.
        assert!(normalize_fingerprint(SELF_FP, PinAlgo::Sha256).is_err());
        assert!(normalize_fingerprint("zz", PinAlgo::Sha1).is_err());
    }

    #[test]
    fn sha256_pins() {
        let fp = "AB".repeat(32);
        let xml = format!(
            r#"<manifest><uses-SSLPinning useDefaultTrustStore="true">
            <Cert type="ca" algo="SHA-256">{fp}</Cert></uses-SSLPinning><application/></manifest>"#
        );
        let pin = &parse_manifest_policy(&xml).unwrap().bundle.pinning.unwrap().pins[0];
        assert_eq!(pin.algo, PinAlgo::Sha256);
        assert_eq!(pin.fingerprint.as_bytes(), &[0xAB; 32]);
    }

    #[test]
    fn error_paths() {
        let wrap = |inner: &str| format!("<manifest>{inner}<application/></manifest>");
        assert!(matches!(
            parse_manifest_policy("<manifest><application>"),
            Err(PolicyError::MalformedXml(_))
        ));
        assert_eq!(
            parse_manifest_policy("<manifest/>"),
            Err(PolicyError::MissingApplication)
        );
        assert_eq!(
            parse_manifest_policy(&wrap(&format!(
                r#"<uses-SSLPinning><Cert type="server" algo="SHA-1">{SELF_FP}</Cert></uses-SSLPinning>"#
            ))),
            Err(PolicyError::UnknownCertType("server".into()))
        );
        assert_eq!(
            parse_manifest_policy(&wrap(&format!(
                r#"<uses-SSLPinning><Cert type="self" algo="MD5">{SELF_FP}</Cert></uses-SSLPinning>"#
            ))),
            Err(PolicyError::UnknownAlgo("MD5".into()))
        );
        assert!(matches!(
            parse_manifest_policy(&wrap(
                r#"<uses-SSLPinning><Cert type="self" algo="SHA-1">B8:01</Cert></uses-SSLPinning>"#
            )),
            Err(PolicyError::BadFingerprint { .. })
        ));
        assert_eq!(
            parse_manifest_policy(&wrap(r#"<uses-SSLPinning useDefaultTrustStore="false"/>"#)),
            Err(PolicyError::EmptyTrustPolicy)
        );
        assert_eq!(
            parse_manifest_policy(&wrap(
                r#"<uses-SSLPinning useDefaultTrustStore="true"/><uses-SSLPinning useDefaultTrustStore="true"/>"#
            )),
            Err(PolicyError::DuplicatePinningElement)
        );
    }

    #[test]
    fn empty_pins_with_default_store_is_allowed() {
        let xml = r#"<manifest><uses-SSLPinning useDefaultTrustStore="true"/><application/></manifest>"#;
        let pinning = parse_manifest_policy(xml).unwrap().bundle.pinning.unwrap();
        assert!(pinning.use_default_trust_store);
        assert!(pinning.pins.is_empty());
    }

    #[test]
    fn unknown_attributes_warn() {
        let xml = format!(
            r#"<manifest><uses-SSLPinning useDefaultTrustStore="true" expires="2014">
            <Cert type="self" algo="SHA-1" note="x">{SELF_FP}</Cert><Extra/></uses-SSLPinning>
            <application/></manifest>"#
        );
        let parsed = parse_manifest_policy(&xml).unwrap();
        assert_eq!(parsed.warnings.len(), 3);
        assert_eq!(parsed.bundle.pinning.unwrap().pins.len(), 1);
    }

    #[test]
    fn render_round_trips_pinned_manifest() {
        let bundle = parse_manifest_policy(&pinned_manifest("android:debuggable=\"true\""))
            .unwrap()
            .bundle;
        let again = parse_manifest_policy(&render_manifest(&bundle)).unwrap();
        assert!(again.warnings.is_empty());
        assert_eq!(again.bundle, bundle);
    }
}
