use std::fs;
use std::path::Path;

use thiserror::Error;

use super::{CertError, CertRecord};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("reading trust store {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("trust store {profile}: {source}")]
    Cert {
        profile: String,
        #[source]
        source: CertError,
    },
    #[error("trust store {profile}: {subject:?} is not a self-issued CA certificate")]
    NotARoot { profile: String, subject: String },
}

/// A named set of root certificates, e.g. the roots shipped with one
/// Android release.
#[derive(Debug, Clone)]
pub struct TrustStore {
    profile_name: String,
    roots: Vec<CertRecord>,
}

impl TrustStore {
    /// Every root must carry the CA bit and have subject == issuer.
    pub fn new(profile_name: impl Into<String>, roots: Vec<CertRecord>) -> Result<Self, StoreError> {
        let profile_name = profile_name.into();
        let mut kept: Vec<CertRecord> = Vec::with_capacity(roots.len());
        for root in roots {
            if !root.is_ca || !root.is_self_issued() {
                return Err(StoreError::NotARoot {
                    profile: profile_name,
                    subject: root.subject,
                });
            }
            if !kept.contains(&root) {
                kept.push(root);
            }
        }
        Ok(TrustStore {
            profile_name,
            roots: kept,
        })
    }

    pub fn empty(profile_name: impl Into<String>) -> Self {
        TrustStore {
            profile_name: profile_name.into(),
            roots: Vec::new(),
        }
    }

    pub fn from_pem(profile_name: impl Into<String>, pem: &[u8]) -> Result<Self, StoreError> {
        let profile_name = profile_name.into();
        let roots = match CertRecord::all_from_pem(pem) {
            Ok(roots) => roots,
            // An empty bundle is a legitimate (if useless) profile.
            Err(CertError::NoCertificates) => Vec::new(),
            Err(source) => {
                return Err(StoreError::Cert {
                    profile: profile_name,
                    source,
                })
            }
        };
        Self::new(profile_name, roots)
    }

    /// Loads a PEM bundle; the profile is named after the file stem
    /// (`android-4.2.pem` becomes `android-4.2`).
    pub fn load(path: &Path) -> Result<Self, StoreError> {
        let bytes = fs::read(path).map_err(|source| StoreError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Self::from_pem(name, &bytes)
    }

    /// Union of several stores under a combined profile name.
    pub fn merged(stores: &[TrustStore]) -> Self {
        let name = stores
            .iter()
            .map(|s| s.profile_name.as_str())
            .collect::<Vec<_>>()
            .join("+");
        let mut roots: Vec<CertRecord> = Vec::new();
        for root in stores.iter().flat_map(|s| s.roots.iter()) {
            if !roots.contains(root) {
                roots.push(root.clone());
            }
        }
        TrustStore {
            profile_name: name,
            roots,
        }
    }

    pub fn profile_name(&self) -> &str {
        &self.profile_name
    }

    pub fn roots(&self) -> &[CertRecord] {
        &self.roots
    }

    pub fn contains(&self, cert: &CertRecord) -> bool {
        self.roots.iter().any(|r| r == cert)
    }

    /// A copy with `cert` removed.
    pub fn without(&self, cert: &CertRecord) -> Self {
        TrustStore {
            profile_name: self.profile_name.clone(),
            roots: self.roots.iter().filter(|r| *r != cert).cloned().collect(),
        }
    }
}
