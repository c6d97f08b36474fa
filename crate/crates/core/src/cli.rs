//! The `sslguard` command line.
//!
//! Exit status is 0 on success, 1 when the result holds a rejection, an
//! idiom finding or a non-valid certificate, and 2 on usage or runtime
//! errors. Results go to stdout (or `--out`); warnings go to stderr.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use chrono::{DateTime, SecondsFormat, Utc};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::audit::{self, CertAuditResult, CertClass};
use crate::policy::{self, PolicyBundle};
use crate::report::{self, ReportFormat};
use crate::scanner::{self, AdLibraryList, AppScanReport, KnownBadClasses};
use crate::x509::{PresentedChain, TrustStore, VerificationVerdict};

#[derive(Debug, Parser)]
#[command(name = "sslguard", version, about = "Manifest SSL policy checks and app corpus SSL audits")]
#[command(arg_required_else_help = true)]
pub struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Markdown,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse the SSL settings of an app manifest.
    PolicyCheck {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Decide whether a presented chain is acceptable for a host.
    Verify {
        #[arg(long)]
        manifest: PathBuf,
        /// PEM file, leaf first.
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        host: String,
        /// Root-store PEM bundles; all given stores are trusted.
        #[arg(long, required = true, num_args = 1..)]
        store: Vec<PathBuf>,
        /// RFC 3339 time to verify at. Defaults to now.
        #[arg(long)]
        as_of: Option<String>,
    },
    /// Scan a corpus of decompiled apps for SSL use and bypass idioms.
    Scan {
        #[arg(long)]
        corpus: PathBuf,
        /// Ad-library package list.
        #[arg(long)]
        ads: PathBuf,
        /// Class names known to bypass verification.
        #[arg(long)]
        known_bad: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Classify server certificates against root-store profiles.
    Audit {
        /// One `host[:port]` or `file:<path>` per line.
        #[arg(long)]
        targets: PathBuf,
        /// One PEM bundle per profile, named after the file stem.
        #[arg(long, required = true, num_args = 1..)]
        store: Vec<PathBuf>,
        #[arg(long)]
        as_of: Option<String>,
        /// Seconds per connection.
        #[arg(long, default_value_t = 10)]
        timeout: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Summarize scan (and optionally audit) results.
    Report {
        /// Scan output files: a report array or a single report each.
        #[arg(long, required = true, num_args = 1..)]
        scans: Vec<PathBuf>,
        /// JSON object mapping app id to an audit result.
        #[arg(long)]
        audits: Option<PathBuf>,
    },
}

/// Failure that maps to exit status 2.
struct Fatal(String);

impl<E: std::fmt::Display> From<E> for Fatal {
    fn from(e: E) -> Self {
        Fatal(e.to_string())
    }
}

struct Output {
    body: String,
    flagged: bool,
}

/// Runs one invocation. `args` excludes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv = std::iter::once(OsString::from("sslguard")).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli, err) {
        Ok(result) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &result.body).map_err(|e| format!("{}: {e}", path.display())),
                None => out.write_all(result.body.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => i32::from(result.flagged),
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    2
                }
            }
        }
        Err(Fatal(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn execute(cli: &Cli, err: &mut dyn Write) -> Result<Output, Fatal> {
    match &cli.command {
        Command::PolicyCheck { manifest } => policy_check(manifest, cli.format, err),
        Command::Verify {
            manifest,
            chain,
            host,
            store,
            as_of,
        } => verify(manifest, chain, host, store, as_of.as_deref(), cli.format, err),
        Command::Scan {
            corpus,
            ads,
            known_bad,
            jobs,
        } => scan(corpus, ads, known_bad.as_deref(), *jobs, cli.format, err),
        Command::Audit {
            targets,
            store,
            as_of,
            timeout,
            jobs,
        } => audit(targets, store, as_of.as_deref(), *timeout, *jobs, cli.format, err),
        Command::Report { scans, audits } => report(scans, audits.as_deref(), cli.format),
    }
}

fn read(path: &Path) -> Result<String, Fatal> {
    fs::read_to_string(path).map_err(|e| Fatal(format!("{}: {e}", path.display())))
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("result serializes");
    s.push('\n');
    s
}

fn parse_as_of(arg: Option<&str>, err: &mut dyn Write) -> Result<DateTime<Utc>, Fatal> {
    match arg {
        Some(text) => DateTime::parse_from_rfc3339(text)
            .map(|t| t.with_timezone(&Utc))
            .map_err(|e| Fatal(format!("--as-of {text:?}: {e}"))),
        None => {
            let now = Utc::now();
            let _ = writeln!(
                err,
                "warning: no --as-of given; using the current time {}",
                now.to_rfc3339_opts(SecondsFormat::Secs, true)
            );
            Ok(now)
        }
    }
}

#[derive(Serialize)]
struct PolicyCheckResult<'a> {
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    policy: Option<&'a PolicyBundle>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    warnings: Vec<String>,
}

fn policy_check(manifest: &Path, format: Format, err: &mut dyn Write) -> Result<Output, Fatal> {
    let xml = read(manifest)?;
    let parsed = policy::parse_manifest_policy(&xml);
    let (result, flagged) = match &parsed {
        Ok(mp) => {
            let warnings: Vec<String> = mp.warnings.iter().map(|w| format!("{}: {}", w.element, w.message)).collect();
            for w in &warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            let r = PolicyCheckResult {
                valid: true,
                policy: Some(&mp.bundle),
                error: None,
                warnings,
            };
            (r, false)
        }
        Err(e) => {
            let r = PolicyCheckResult {
                valid: false,
                policy: None,
                error: Some(e.to_string()),
                warnings: Vec::new(),
            };
            (r, true)
        }
    };
    let body = match format {
        Format::Json => json(&result),
        Format::Text | Format::Markdown => match (&parsed, &result.error) {
            (Ok(mp), _) => policy_text(&mp.bundle),
            (Err(_), Some(e)) => format!("invalid: {e}\n"),
            (Err(_), None) => unreachable!(),
        },
    };
    Ok(Output { body, flagged })
}

fn policy_text(bundle: &PolicyBundle) -> String {
    let mut s = format!("debuggable: {}\n", bundle.debuggable);
    match &bundle.pinning {
        None => s.push_str("pinning: none\n"),
        Some(p) => {
            s.push_str(&format!("pinning: useDefaultTrustStore={}\n", p.use_default_trust_store));
            for pin in &p.pins {
                s.push_str(&format!(
                    "  {} {} {}\n",
                    pin.kind.manifest_name(),
                    pin.algo.manifest_name(),
                    pin.fingerprint.to_colon_hex()
                ));
            }
        }
    }
    s
}

fn load_stores(paths: &[PathBuf]) -> Result<Vec<TrustStore>, Fatal> {
    paths.iter().map(|p| TrustStore::load(p).map_err(Fatal::from)).collect()
}

fn verify(
    manifest: &Path,
    chain: &Path,
    host: &str,
    stores: &[PathBuf],
    as_of: Option<&str>,
    format: Format,
    err: &mut dyn Write,
) -> Result<Output, Fatal> {
    let as_of = parse_as_of(as_of, err)?;
    let bundle = policy::parse_manifest_policy(&read(manifest)?)?.bundle;
    let pem = fs::read(chain).map_err(|e| Fatal(format!("{}: {e}", chain.display())))?;
    let presented = PresentedChain::from_pem(&pem).map_err(|e| Fatal(format!("{}: {e}", chain.display())))?;
    let store = TrustStore::merged(&load_stores(stores)?);
    let verdict = crate::x509::verify_peer(host, &presented, &bundle, &store, as_of);
    for w in &verdict.warnings {
        let _ = writeln!(err, "warning: {w:?}");
    }
    let body = match format {
        Format::Json => json(&verdict),
        Format::Text | Format::Markdown => verdict_text(&verdict),
    };
    Ok(Output {
        body,
        flagged: !verdict.accepted,
    })
}

fn verdict_text(v: &VerificationVerdict) -> String {
    let mut s = format!("{} {:?}\n", if v.accepted { "accepted" } else { "rejected" }, v.reason);
    if let Some(pin) = &v.matched_pin {
        s.push_str(&format!("matched pin: {} {}\n", pin.kind.manifest_name(), pin.fingerprint.to_colon_hex()));
    }
    s
}

fn scan(
    corpus: &Path,
    ads: &Path,
    known_bad: Option<&Path>,
    jobs: usize,
    format: Format,
    err: &mut dyn Write,
) -> Result<Output, Fatal> {
    let ads = AdLibraryList::parse(&read(ads)?);
    let known_bad = known_bad.map(read).transpose()?.map(|t| KnownBadClasses::parse(&t));
    let reports = scanner::scan_corpus(corpus, &ads, known_bad.as_ref(), jobs)?;
    for r in &reports {
        for w in &r.warnings {
            let _ = writeln!(err, "warning: {}: {w}", r.app_id);
        }
    }
    let flagged = reports.iter().any(|r| !r.findings.is_empty());
    let body = match format {
        Format::Json => json(&reports),
        Format::Text | Format::Markdown => reports.iter().map(scan_text).collect(),
    };
    Ok(Output { body, flagged })
}

fn scan_text(r: &AppScanReport) -> String {
    let mut s = format!("{} {:?}\n", r.app_id, r.ssl_class);
    for f in &r.findings {
        s.push_str(&format!("  {}:{} {:?}\n", f.file_path, f.line, f.idiom));
    }
    s
}

fn audit(
    targets: &Path,
    stores: &[PathBuf],
    as_of: Option<&str>,
    timeout: u64,
    jobs: usize,
    format: Format,
    err: &mut dyn Write,
) -> Result<Output, Fatal> {
    let as_of = parse_as_of(as_of, err)?;
    let base = targets.parent().unwrap_or(Path::new("."));
    let targets = audit::parse_targets(&read(targets)?, base)?;
    let profiles = load_stores(stores)?;
    let results = audit::audit_batch(&targets, &profiles, as_of, Duration::from_secs(timeout), jobs)?;
    let flagged = results.iter().any(|r| r.cert_class != CertClass::Valid);
    let body = match format {
        Format::Json => json(&results),
        Format::Text | Format::Markdown => results
            .iter()
            .map(|r| format!("{} {:?}\n", r.endpoint_or_fixture, r.cert_class))
            .collect(),
    };
    Ok(Output { body, flagged })
}

fn report(scans: &[PathBuf], audits: Option<&Path>, format: Format) -> Result<Output, Fatal> {
    let mut all: Vec<AppScanReport> = Vec::new();
    for path in scans {
        let text = read(path)?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Fatal(format!("{}: {e}", path.display())))?;
        let parsed = if value.is_array() {
            serde_json::from_value::<Vec<AppScanReport>>(value)
        } else {
            serde_json::from_value::<AppScanReport>(value).map(|r| vec![r])
        };
        all.extend(parsed.map_err(|e| Fatal(format!("{}: {e}", path.display())))?);
    }
    let audits: Option<BTreeMap<String, CertAuditResult>> = audits
        .map(|p| {
            serde_json::from_str(&read(p)?).map_err(|e| Fatal(format!("{}: {e}", p.display())))
        })
        .transpose()?;
    let summary = report::aggregate(&all, audits.as_ref())?;
    let format = match format {
        Format::Json => ReportFormat::Json,
        Format::Text | Format::Markdown => ReportFormat::Markdown,
    };
    Ok(Output {
        body: report::emit_report(&summary, format),
        flagged: false,
    })
}
