//! Scans the 20-app taxonomy corpus and prints the summary tables.

use sslguard::report::{aggregate, emit_report, ReportFormat};
use sslguard::scanner::{scan_corpus, AdLibraryList};
use sslguard_fixtures::corpus::{taxonomy_corpus, write_corpus, AD_LIST};

fn main() {
    let tmp = tempfile::tempdir().unwrap();
    let apps: Vec<_> = taxonomy_corpus().into_iter().map(|(a, _)| a).collect();
    write_corpus(&apps, tmp.path()).unwrap();
    let scans = scan_corpus(tmp.path(), &AdLibraryList::parse(AD_LIST), None, 4).unwrap();
    let summary = aggregate(&scans, None).unwrap();
    print!("{}", emit_report(&summary, ReportFormat::Markdown));
}
