use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{CertRecord, PresentedChain, TrustStore};

const MAX_DEPTH: usize = 16;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum ChainError {
    #[error("no issuer path from the leaf to a root or self-signed certificate")]
    ChainBuildFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChainTerminal {
    /// The last certificate is a root of the store.
    TrustedRoot,
    /// The last certificate is self-signed but unknown to the store.
    UntrustedSelfSigned,
}

/// An issuer path, leaf first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuiltChain {
    pub certs: Vec<CertRecord>,
    pub terminal: ChainTerminal,
}

impl BuiltChain {
    pub fn leaf(&self) -> &CertRecord {
        &self.certs[0]
    }
}

/// Outcome of the validity / CA-bit / root-trust checks on a built chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChainCheck {
    Ok,
    Expired,
    NotYetValid,
    CaBitMissing,
    UntrustedRoot,
}

/// Finds an issuer path from the presented leaf.
///
/// Each step requires the child's issuer DN to equal the parent's subject DN
/// and the child's signature to verify under the parent's key. A path ending
/// at a store root is preferred; otherwise a path ending at a self-signed
/// certificate outside the store is returned as
/// [`ChainTerminal::UntrustedSelfSigned`]. Extras may arrive in any order
/// and unused ones are dropped.
pub fn build_chain(presented: &PresentedChain, store: &TrustStore) -> Result<BuiltChain, ChainError> {
    let mut search = Search {
        extras: &presented.extras,
        store,
        used: vec![false; presented.extras.len()],
        untrusted: None,
    };
    let mut path = vec![&presented.leaf];
    if let Some(trusted) = search.walk(&mut path) {
        return Ok(BuiltChain {
            certs: trusted,
            terminal: ChainTerminal::TrustedRoot,
        });
    }
    match search.untrusted {
        Some(certs) => Ok(BuiltChain {
            certs,
            terminal: ChainTerminal::UntrustedSelfSigned,
        }),
        None => Err(ChainError::ChainBuildFailure),
    }
}

struct Search<'a> {
    extras: &'a [CertRecord],
    store: &'a TrustStore,
    used: Vec<bool>,
    untrusted: Option<Vec<CertRecord>>,
}

impl<'a> Search<'a> {
    fn walk(&mut self, path: &mut Vec<&'a CertRecord>) -> Option<Vec<CertRecord>> {
        let current = *path.last().expect("path starts with the leaf");
        if self.store.contains(current) {
            return Some(owned(path));
        }
        for root in self.store.roots() {
            if current.is_issued_by(root) {
                let mut done = owned(path);
                done.push(root.clone());
                return Some(done);
            }
        }
        if current.is_self_signed() {
            if self.untrusted.is_none() {
                self.untrusted = Some(owned(path));
            }
            return None;
        }
        if path.len() >= MAX_DEPTH {
            return None;
        }
        for idx in 0..self.extras.len() {
            if self.used[idx] {
                continue;
            }
            let candidate = &self.extras[idx];
            if path.contains(&candidate) || !current.is_issued_by(candidate) {
                continue;
            }
            self.used[idx] = true;
            path.push(candidate);
            let found = self.walk(path);
            path.pop();
            self.used[idx] = false;
            if found.is_some() {
                return found;
            }
        }
        None
    }
}

fn owned(path: &[&CertRecord]) -> Vec<CertRecord> {
    path.iter().map(|c| (*c).clone()).collect()
}

/// Expiry, then CA bit, then root trust; the first failure wins.
pub fn verify_chain(chain: &[CertRecord], store: &TrustStore, as_of: DateTime<Utc>) -> ChainCheck {
    match check_validity_and_ca(chain, as_of) {
        ChainCheck::Ok => {}
        failure => return failure,
    }
    match chain.last() {
        Some(terminal) if store.contains(terminal) => ChainCheck::Ok,
        _ => ChainCheck::UntrustedRoot,
    }
}

/// The checks that still apply when a pin stands in for root trust.
pub(crate) fn check_validity_and_ca(chain: &[CertRecord], as_of: DateTime<Utc>) -> ChainCheck {
    for cert in chain {
        if as_of > cert.not_after {
            return ChainCheck::Expired;
        }
        if as_of < cert.not_before {
            return ChainCheck::NotYetValid;
        }
    }
    if chain.iter().skip(1).any(|c| !c.is_ca) {
        return ChainCheck::CaBitMissing;
    }
    ChainCheck::Ok
}
