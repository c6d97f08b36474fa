//! Corpus-level tallies of scan and audit results.
//!
//! Apps whose own code uses SSL fall into one of four bypass buckets. Apps
//! that also have an audit result are crossed against their certificate
//! class, with self-signed and untrusted-CA certificates sharing a row.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audit::{CertAuditResult, CertClass};
use crate::scanner::{AppScanReport, BypassFlags, SslClass};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("app id {0:?} appears more than once")]
    DuplicateAppId(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bucket {
    AcOnly,
    AhOnly,
    Both,
    None,
}

impl Bucket {
    pub fn of(flags: BypassFlags) -> Self {
        match (flags.any_certificate, flags.any_hostname) {
            (true, true) => Bucket::Both,
            (true, false) => Bucket::AcOnly,
            (false, true) => Bucket::AhOnly,
            (false, false) => Bucket::None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BypassCounts {
    pub ac_only: u64,
    pub ah_only: u64,
    pub both: u64,
    pub none: u64,
}

impl BypassCounts {
    pub fn total(&self) -> u64 {
        self.ac_only + self.ah_only + self.both + self.none
    }

    fn bump(&mut self, bucket: Bucket) {
        match bucket {
            Bucket::AcOnly => self.ac_only += 1,
            Bucket::AhOnly => self.ah_only += 1,
            Bucket::Both => self.both += 1,
            Bucket::None => self.none += 1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossRow {
    pub ac_only: u64,
    pub ah_only: u64,
    pub both: u64,
}

impl CrossRow {
    pub fn total(&self) -> u64 {
        self.ac_only + self.ah_only + self.both
    }
}

/// Bypassing apps by the class of their server certificate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertCross {
    pub self_signed_or_untrusted: CrossRow,
    pub expired: CrossRow,
    pub valid: CrossRow,
}

/// Percentages with two decimals, rounded half up.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Percentages {
    /// Share of all apps.
    pub class: BTreeMap<SslClass, f64>,
    /// Share of apps whose own code uses SSL.
    pub bypass: BTreeMap<Bucket, f64>,
    /// Share of apps whose own code uses SSL and bypasses some check.
    pub any_bypass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub total_apps: u64,
    /// Apps with at least one SSL keyword hit anywhere.
    pub ssl_apps: u64,
    pub class_counts: BTreeMap<SslClass, u64>,
    pub bypass_counts: BypassCounts,
    pub cert_cross: CertCross,
    /// Apps whose own code uses SSL and that have an audit result.
    pub audited_apps: u64,
    pub percentages: Percentages,
}

impl Default for CorpusSummary {
    fn default() -> Self {
        summarize(Vec::new())
    }
}

/// `part / whole` as a percentage in hundredths, half up, integers only.
pub fn percent_hundredths(part: u64, whole: u64) -> u64 {
    if whole == 0 {
        return 0;
    }
    (part * 20_000 + whole) / (2 * whole)
}

pub fn percent(part: u64, whole: u64) -> f64 {
    percent_hundredths(part, whole) as f64 / 100.0
}

pub fn aggregate(
    scans: &[AppScanReport],
    audits: Option<&BTreeMap<String, CertAuditResult>>,
) -> Result<CorpusSummary, ReportError> {
    let mut seen = HashSet::new();
    for scan in scans {
        if !seen.insert(scan.app_id.as_str()) {
            return Err(ReportError::DuplicateAppId(scan.app_id.clone()));
        }
    }
    let rows = scans.iter().map(|s| {
        let audit = audits.and_then(|a| a.get(&s.app_id)).map(|a| a.cert_class);
        (s.ssl_class, s.flags, audit)
    });
    Ok(summarize(rows.collect()))
}

fn summarize(rows: Vec<(SslClass, BypassFlags, Option<CertClass>)>) -> CorpusSummary {
    let mut class_counts: BTreeMap<SslClass, u64> = SslClass::ALL.iter().map(|c| (*c, 0)).collect();
    let mut bypass_counts = BypassCounts::default();
    let mut cert_cross = CertCross::default();
    let mut audited_apps = 0;

    for (class, flags, audit) in &rows {
        *class_counts.entry(*class).or_default() += 1;
        if !class.has_source_ssl() {
            continue;
        }
        let bucket = Bucket::of(*flags);
        bypass_counts.bump(bucket);
        let Some(cert) = audit else { continue };
        audited_apps += 1;
        let row = match cert {
            CertClass::SelfSigned | CertClass::UntrustedCa => &mut cert_cross.self_signed_or_untrusted,
            CertClass::Expired => &mut cert_cross.expired,
            CertClass::Valid => &mut cert_cross.valid,
            CertClass::Unreachable => continue,
        };
        match bucket {
            Bucket::AcOnly => row.ac_only += 1,
            Bucket::AhOnly => row.ah_only += 1,
            Bucket::Both => row.both += 1,
            Bucket::None => {}
        }
    }

    let total_apps = rows.len() as u64;
    let ssl_apps = total_apps - class_counts[&SslClass::NoSsl];
    let src = bypass_counts.total();
    let percentages = Percentages {
        class: class_counts.iter().map(|(c, n)| (*c, percent(*n, total_apps))).collect(),
        bypass: [
            (Bucket::AcOnly, bypass_counts.ac_only),
            (Bucket::AhOnly, bypass_counts.ah_only),
            (Bucket::Both, bypass_counts.both),
            (Bucket::None, bypass_counts.none),
        ]
        .into_iter()
        .map(|(b, n)| (b, percent(n, src)))
        .collect(),
        any_bypass: percent(src - bypass_counts.none, src),
    };
    CorpusSummary {
        total_apps,
        ssl_apps,
        class_counts,
        bypass_counts,
        cert_cross,
        audited_apps,
        percentages,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Markdown,
}

pub fn emit_report(summary: &CorpusSummary, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_string_pretty(summary).expect("summary serializes");
            out.push('\n');
            out
        }
        ReportFormat::Markdown => markdown(summary),
    }
}

fn class_label(class: SslClass) -> &'static str {
    match class {
        SslClass::NoSsl => "no SSL",
        SslClass::SrcOnly => "app code only",
        SslClass::AdsOnly => "ad libraries only",
        SslClass::SrcAndAds => "app code and ad libraries",
    }
}

fn markdown(s: &CorpusSummary) -> String {
    let p = &s.percentages;
    let mut out = String::new();
    let _ = writeln!(out, "# SSL usage summary\n");
    let _ = writeln!(out, "{} apps, {} using SSL.\n", s.total_apps, s.ssl_apps);

    let _ = writeln!(out, "## Where SSL is used\n");
    let _ = writeln!(out, "| SSL usage | Apps | % |\n|---|---:|---:|");
    for (class, n) in &s.class_counts {
        let _ = writeln!(out, "| {} | {} | {:.2} |", class_label(*class), n, p.class[class]);
    }

    let b = &s.bypass_counts;
    let _ = writeln!(out, "\n## Verification bypass in app code\n");
    let _ = writeln!(out, "| Bucket | Apps | % |\n|---|---:|---:|");
    for (label, n, bucket) in [
        ("Trust any certificate only (AC)", b.ac_only, Bucket::AcOnly),
        ("Allow any hostname only (AH)", b.ah_only, Bucket::AhOnly),
        ("Both AC and AH", b.both, Bucket::Both),
        ("Neither", b.none, Bucket::None),
    ] {
        let _ = writeln!(out, "| {label} | {n} | {:.2} |", p.bypass[&bucket]);
    }
    let _ = writeln!(out, "| **Total** | {} | 100.00 |", b.total());
    let _ = writeln!(
        out,
        "\n{} of {} apps ({:.2}%) bypass at least one check.",
        b.total() - b.none,
        b.total(),
        p.any_bypass
    );

    let c = &s.cert_cross;
    let _ = writeln!(out, "\n## Bypassing apps by server certificate\n");
    let _ = writeln!(out, "| Certificate | AC only | AH only | Both | Total |\n|---|---:|---:|---:|---:|");
    for (label, row) in [
        ("Self-signed or untrusted CA", &c.self_signed_or_untrusted),
        ("Expired", &c.expired),
        ("Valid", &c.valid),
    ] {
        let _ = writeln!(
            out,
            "| {label} | {} | {} | {} | {} |",
            row.ac_only,
            row.ah_only,
            row.both,
            row.total()
        );
    }
    out
}
