use chrono::{DateTime, Utc};
use serde::Serialize;

use super::chain::check_validity_and_ca;
use super::hostname::host_matches;
use super::{build_chain, extract_identifiers, verify_chain, CertRecord, ChainCheck, PresentedChain, TrustStore};
use crate::policy::{PinEntry, PinKind, PolicyBundle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum VerdictReason {
    Ok,
    OkPinned,
    OkDebugBypass,
    ChainBuildFailure,
    Expired,
    NotYetValid,
    CaBitMissing,
    UntrustedRoot,
    PinMismatch,
    HostnameMismatch,
    NoIdentifiers,
}

impl VerdictReason {
    pub fn is_accept(self) -> bool {
        matches!(
            self,
            VerdictReason::Ok | VerdictReason::OkPinned | VerdictReason::OkDebugBypass
        )
    }

    fn from_check(check: ChainCheck) -> Option<Self> {
        match check {
            ChainCheck::Ok => None,
            ChainCheck::Expired => Some(VerdictReason::Expired),
            ChainCheck::NotYetValid => Some(VerdictReason::NotYetValid),
            ChainCheck::CaBitMissing => Some(VerdictReason::CaBitMissing),
            ChainCheck::UntrustedRoot => Some(VerdictReason::UntrustedRoot),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum VerdictWarning {
    DebugBypassActive,
    CnFallbackUsed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationVerdict {
    pub accepted: bool,
    pub reason: VerdictReason,
    pub warnings: Vec<VerdictWarning>,
    pub matched_pin: Option<PinEntry>,
    /// Leaf to terminal, when a chain was established.
    pub chain_used: Option<Vec<CertRecord>>,
}

impl VerificationVerdict {
    fn reject(reason: VerdictReason, chain: Option<Vec<CertRecord>>, pin: Option<PinEntry>) -> Self {
        VerificationVerdict {
            accepted: false,
            reason,
            warnings: Vec::new(),
            matched_pin: pin,
            chain_used: chain,
        }
    }
}

/// First pin, in policy order, that matches the chain. Self pins look at
/// the leaf only; CA pins at every certificate above it.
pub fn match_pins(chain: &[CertRecord], pins: &[PinEntry]) -> Option<PinEntry> {
    let (leaf, issuers) = chain.split_first()?;
    pins.iter()
        .find(|pin| {
            let fp = pin.fingerprint.as_bytes();
            match pin.kind {
                PinKind::SelfPin => leaf.fingerprints.get(pin.algo) == fp,
                PinKind::CaPin => issuers.iter().any(|c| c.fingerprints.get(pin.algo) == fp),
            }
        })
        .cloned()
}

/// Decides whether to accept `presented` as the identity of `host`.
///
/// In order: debug bypass; chain building (a self pin on the leaf rescues a
/// chain that cannot be built); pin matching, which replaces root trust but
/// not validity or CA-bit checks; default trust when no pin matched and the
/// policy allows the default store; finally the host name. A rejection
/// always names the first check that failed.
pub fn verify_peer(
    host: &str,
    presented: &PresentedChain,
    bundle: &PolicyBundle,
    store: &TrustStore,
    as_of: DateTime<Utc>,
) -> VerificationVerdict {
    if bundle.debuggable {
        return VerificationVerdict {
            accepted: true,
            reason: VerdictReason::OkDebugBypass,
            warnings: vec![VerdictWarning::DebugBypassActive],
            matched_pin: None,
            chain_used: None,
        };
    }

    let chain = match build_chain(presented, store) {
        Ok(built) => built.certs,
        Err(_) => {
            let leaf_only = vec![presented.leaf.clone()];
            let self_pinned = bundle.pinning.as_ref().is_some_and(|p| {
                let self_pins: Vec<PinEntry> = p
                    .pins
                    .iter()
                    .filter(|pin| pin.kind == PinKind::SelfPin)
                    .cloned()
                    .collect();
                match_pins(&leaf_only, &self_pins).is_some()
            });
            if !self_pinned {
                return VerificationVerdict::reject(VerdictReason::ChainBuildFailure, None, None);
            }
            leaf_only
        }
    };

    let mut matched_pin = None;
    if let Some(pinning) = &bundle.pinning {
        matched_pin = match_pins(&chain, &pinning.pins);
        if matched_pin.is_none() && !pinning.use_default_trust_store {
            return VerificationVerdict::reject(VerdictReason::PinMismatch, Some(chain), None);
        }
    }

    let check = if matched_pin.is_some() {
        check_validity_and_ca(&chain, as_of)
    } else {
        verify_chain(&chain, store, as_of)
    };
    if let Some(reason) = VerdictReason::from_check(check) {
        return VerificationVerdict::reject(reason, Some(chain), matched_pin);
    }

    let ids = extract_identifiers(&chain[0]);
    let mut warnings = Vec::new();
    if ids.cn_fallback_used {
        warnings.push(VerdictWarning::CnFallbackUsed);
    }
    let reason = if ids.names.is_empty() {
        VerdictReason::NoIdentifiers
    } else if !host_matches(host, &ids) {
        VerdictReason::HostnameMismatch
    } else if matched_pin.is_some() {
        VerdictReason::OkPinned
    } else {
        VerdictReason::Ok
    };
    VerificationVerdict {
        accepted: reason.is_accept(),
        reason,
        warnings,
        matched_pin,
        chain_used: Some(chain),
    }
}
