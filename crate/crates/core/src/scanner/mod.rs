//! Static SSL audit of decompiled app trees.
//!
//! A corpus is laid out as `<corpus>/<app_id>/<package dirs>/<files>`. For
//! every app the scanner greps for SSL keywords, attributes each hit to ad
//! or non-ad code by package path, and looks for verification-bypass idioms
//! in the non-ad files.

mod adlist;
mod idioms;
mod keywords;
mod lexer;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use walkdir::WalkDir;

pub use adlist::{classify_path, AdLibraryList, Origin};
pub use idioms::{detect_idioms, Idiom, IdiomFinding, IdiomScan};
pub use keywords::{scan_file, scan_file_bytes, Keyword};
pub use lexer::SourceProfile;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("not a directory: {0}")]
    MissingDirectory(String),
    #[error("{0}: not a text file")]
    NonTextFile(String),
    #[error("{path}: {source}")]
    UnreadableFile {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("building worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KeywordHit {
    /// Path relative to the app root, `/`-separated.
    pub file_path: String,
    pub line: usize,
    pub keyword: Keyword,
    /// Unset until the path has been classified.
    pub origin: Option<Origin>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SslClass {
    NoSsl,
    SrcOnly,
    AdsOnly,
    SrcAndAds,
}

impl SslClass {
    pub const ALL: [SslClass; 4] = [SslClass::NoSsl, SslClass::SrcOnly, SslClass::AdsOnly, SslClass::SrcAndAds];

    /// App code (not just bundled ad libraries) uses SSL.
    pub fn has_source_ssl(self) -> bool {
        matches!(self, SslClass::SrcOnly | SslClass::SrcAndAds)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BypassFlags {
    /// Some trust manager accepts any certificate.
    pub any_certificate: bool,
    /// Some hostname verifier accepts any host.
    pub any_hostname: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppScanReport {
    pub app_id: String,
    pub ssl_class: SslClass,
    pub flags: BypassFlags,
    pub hits: Vec<KeywordHit>,
    /// Non-ad code only.
    pub findings: Vec<IdiomFinding>,
    /// Regions the idiom detector could not delimit.
    #[serde(default)]
    pub skipped_regions: usize,
    #[serde(default)]
    pub warnings: Vec<String>,
}

/// Class names already known to bypass verification. Each line is a class
/// name (simple or fully qualified), optionally followed by an idiom tag
/// such as `trust-all`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnownBadClasses {
    entries: Vec<(String, Option<Idiom>)>,
}

impl KnownBadClasses {
    pub fn parse(text: &str) -> Self {
        let entries = text
            .lines()
            .map(|line| line.split('#').next().unwrap_or("").trim())
            .filter(|line| !line.is_empty())
            .map(|line| {
                let mut words = line.split_whitespace();
                let name = words.next().unwrap_or("").replace('/', ".");
                let idiom = words.next().and_then(Idiom::from_tag);
                (name, idiom)
            })
            .collect();
        KnownBadClasses { entries }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn lookup(&self, declared: &[String]) -> Option<Option<Idiom>> {
        self.entries.iter().find_map(|(name, idiom)| {
            declared
                .iter()
                .any(|d| d == name || d.rsplit('.').next() == Some(name.as_str()))
                .then_some(*idiom)
        })
    }
}

pub fn classify_app(hits: &[KeywordHit]) -> SslClass {
    let ad = hits.iter().any(|h| h.origin == Some(Origin::Ad));
    let src = hits.iter().any(|h| h.origin != Some(Origin::Ad));
    match (src, ad) {
        (false, false) => SslClass::NoSsl,
        (true, false) => SslClass::SrcOnly,
        (false, true) => SslClass::AdsOnly,
        (true, true) => SslClass::SrcAndAds,
    }
}

static JAVA_PACKAGE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?m)^\s*package\s+([\w.]+)\s*;").unwrap());
static JAVA_CLASS: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\b(?:class|interface|enum)\s+([A-Za-z_$][\w$]*)").unwrap());
static SMALI_CLASS: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?m)^\s*\.class\b[^\n]*?\bL([^;\s]+);").unwrap());

/// Fully qualified names of the classes a file declares, with the offset
/// of each declaration.
fn declared_classes(path: &str, text: &str) -> Vec<(String, usize)> {
    match SourceProfile::for_path(path) {
        SourceProfile::Smali => SMALI_CLASS
            .captures_iter(text)
            .map(|c| (c[1].replace('/', "."), c.get(0).unwrap().start()))
            .collect(),
        SourceProfile::JavaLike => {
            let package = JAVA_PACKAGE.captures(text).map(|c| c[1].to_string());
            JAVA_CLASS
                .captures_iter(text)
                .map(|c| {
                    let name = match &package {
                        Some(p) => format!("{p}.{}", &c[1]),
                        None => c[1].to_string(),
                    };
                    (name, c.get(0).unwrap().start())
                })
                .collect()
        }
    }
}

/// Without an explicit tag, the idiom is inferred from the interface the
/// class implements.
fn infer_idiom(text: &str) -> Idiom {
    if text.contains("TrustManager") {
        Idiom::TrustAllTrustManager
    } else if text.contains("HostnameVerifier") {
        Idiom::AllowAllHostnameVerifierCustom
    } else if text.contains("WebViewClient") {
        Idiom::IgnoreSslErrorWebViewClient
    } else {
        Idiom::TrustAllTrustManager
    }
}

fn known_class_finding(path: &str, text: &str, known_bad: &KnownBadClasses) -> Option<IdiomFinding> {
    let declared = declared_classes(path, text);
    let names: Vec<String> = declared.iter().map(|(n, _)| n.clone()).collect();
    let tag = known_bad.lookup(&names)?;
    let idiom = tag.unwrap_or_else(|| infer_idiom(text));
    let offset = declared.first().map(|(_, o)| *o).unwrap_or(0);
    let line_start = text[..offset].rfind('\n').map_or(0, |i| i + 1);
    let line_end = text[offset..].find('\n').map_or(text.len(), |i| offset + i);
    let mut evidence = text[line_start..line_end].trim_end().to_string();
    if evidence.len() > 200 {
        let mut cut = 200;
        while !evidence.is_char_boundary(cut) {
            cut -= 1;
        }
        evidence.truncate(cut);
    }
    Some(IdiomFinding {
        file_path: path.to_string(),
        line: idioms::line_of(text, line_start),
        idiom,
        evidence,
        known_class: true,
    })
}

fn relative_slash_path(root: &Path, path: &Path) -> String {
    path.strip_prefix(root)
        .unwrap_or(path)
        .components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

/// Scans one app directory.
pub fn scan_app(
    root_dir: &Path,
    ads: &AdLibraryList,
    known_bad: Option<&KnownBadClasses>,
) -> Result<AppScanReport, ScanError> {
    if !root_dir.is_dir() {
        return Err(ScanError::MissingDirectory(root_dir.display().to_string()));
    }
    let app_id = root_dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();

    let mut warnings = Vec::new();
    let mut files: Vec<(String, PathBuf)> = Vec::new();
    for entry in WalkDir::new(root_dir).follow_links(false) {
        match entry {
            Ok(e) if e.file_type().is_file() => {
                files.push((relative_slash_path(root_dir, e.path()), e.into_path()));
            }
            Ok(_) => {}
            Err(e) => warnings.push(format!("walk: {e}")),
        }
    }
    files.sort();

    let mut hits = Vec::new();
    let mut findings = Vec::new();
    let mut skipped_regions = 0;
    for (rel, path) in &files {
        let bytes = match fs::read(path) {
            Ok(b) => b,
            Err(source) => {
                warnings.push(ScanError::UnreadableFile { path: rel.clone(), source }.to_string());
                continue;
            }
        };
        let text = match keywords::decode_text(rel, &bytes) {
            Ok(t) => t,
            Err(e) => {
                warnings.push(e.to_string());
                continue;
            }
        };
        let origin = classify_path(rel, ads);
        hits.extend(scan_file(rel, text).into_iter().map(|mut h| {
            h.origin = Some(origin);
            h
        }));
        if origin == Origin::Ad {
            continue;
        }
        if let Some(finding) = known_bad.and_then(|kb| known_class_finding(rel, text, kb)) {
            findings.push(finding);
            continue;
        }
        let scan = detect_idioms(rel, text);
        skipped_regions += scan.skipped_regions;
        findings.extend(scan.findings);
    }

    Ok(build_report(app_id, hits, findings, skipped_regions, warnings))
}

fn build_report(
    app_id: String,
    mut hits: Vec<KeywordHit>,
    mut findings: Vec<IdiomFinding>,
    skipped_regions: usize,
    warnings: Vec<String>,
) -> AppScanReport {
    hits.sort();
    findings.sort();
    let flags = BypassFlags {
        any_certificate: findings.iter().any(|f| f.idiom.bypasses_certificate()),
        any_hostname: findings.iter().any(|f| f.idiom.bypasses_hostname()),
    };
    AppScanReport {
        app_id,
        ssl_class: classify_app(&hits),
        flags,
        hits,
        findings,
        skipped_regions,
        warnings,
    }
}

/// Every app directory under `corpus`, scanned on at most `jobs` threads.
/// Reports come back sorted by app id whatever the thread count.
pub fn scan_corpus(
    corpus: &Path,
    ads: &AdLibraryList,
    known_bad: Option<&KnownBadClasses>,
    jobs: usize,
) -> Result<Vec<AppScanReport>, ScanError> {
    let entries = fs::read_dir(corpus).map_err(|_| ScanError::MissingDirectory(corpus.display().to_string()))?;
    let mut apps: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    apps.sort();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| ScanError::Pool(e.to_string()))?;
    let mut reports = pool.install(|| {
        apps.par_iter()
            .map(|app| scan_app(app, ads, known_bad))
            .collect::<Result<Vec<_>, _>>()
    })?;
    reports.sort_by(|a, b| a.app_id.cmp(&b.app_id));
    Ok(reports)
}

/// Distinct idioms of a report, sorted.
pub fn idiom_set(report: &AppScanReport) -> BTreeSet<Idiom> {
    report.findings.iter().map(|f| f.idiom).collect()
}
