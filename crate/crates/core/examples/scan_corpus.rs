//! Scans a corpus of decompiled apps. Without arguments it writes the
//! synthetic idiom corpus to a temporary directory and scans that.
//!
//! cargo run --example scan_corpus [-- CORPUS ADLIST]

use sslguard::scanner::{idiom_set, scan_corpus, AdLibraryList};
use sslguard_fixtures::corpus::{idiom_corpus, write_corpus, AD_LIST};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let tmp = tempfile::tempdir().unwrap();
    let (corpus, ads) = match args.as_slice() {
        [corpus, ads] => (corpus.into(), AdLibraryList::parse(&std::fs::read_to_string(ads).unwrap())),
        _ => {
            write_corpus(&idiom_corpus(), tmp.path()).unwrap();
            (tmp.path().to_path_buf(), AdLibraryList::parse(AD_LIST))
        }
    };
    let reports = scan_corpus(&corpus, &ads, None, 4).unwrap();
    for r in &reports {
        println!("{:<14} {:<10?} {} hits  {:?}", r.app_id, r.ssl_class, r.hits.len(), idiom_set(r));
    }
}
