use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// Whether a file belongs to a bundled ad/analytics library.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Origin {
    Ad,
    NonAd,
}

/// Package prefixes of known ad and analytics libraries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AdLibraryList {
    entries: BTreeSet<String>,
}

/// Directory names that sit above the package tree in decompiler output.
fn is_source_root(component: &str) -> bool {
    matches!(component, "src" | "main" | "java" | "kotlin" | "sources" | "smali")
        || component.starts_with("smali_classes")
}

impl AdLibraryList {
    /// One package per line, dotted or slashed; `#` starts a comment.
    pub fn parse(text: &str) -> Self {
        let entries = text
            .lines()
            .map(|line| line.split('#').next().unwrap_or("").trim())
            .filter(|line| !line.is_empty())
            .map(normalize_entry)
            .filter(|e| !e.is_empty())
            .collect();
        AdLibraryList { entries }
    }

    pub fn from_entries<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        AdLibraryList {
            entries: entries
                .into_iter()
                .map(|e| normalize_entry(e.as_ref()))
                .filter(|e| !e.is_empty())
                .collect(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(String::as_str)
    }

    /// The longest entry that is a whole-component prefix of the file's
    /// package directories.
    pub fn matching_entry(&self, path: &str) -> Option<&str> {
        let mut dirs: Vec<&str> = path.split(['/', '\\']).filter(|c| !c.is_empty()).collect();
        dirs.pop(); // file name
        let start = dirs.iter().take_while(|c| is_source_root(c)).count();
        let dirs = &dirs[start..];
        let mut best = None;
        let mut dotted = String::new();
        for dir in dirs {
            if !dotted.is_empty() {
                dotted.push('.');
            }
            dotted.push_str(&dir.to_ascii_lowercase());
            if let Some(entry) = self.entries.get(&dotted) {
                best = Some(entry.as_str());
            }
        }
        best
    }
}

fn normalize_entry(entry: &str) -> String {
    entry
        .trim()
        .replace(['/', '\\'], ".")
        .trim_matches('.')
        .to_ascii_lowercase()
}

pub fn classify_path(path: &str, ads: &AdLibraryList) -> Origin {
    if ads.matching_entry(path).is_some() {
        Origin::Ad
    } else {
        Origin::NonAd
    }
}
