use serde::{Deserialize, Serialize};

use super::{KeywordHit, ScanError};

/// The SSL-related search terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Keyword {
    #[serde(rename = "SSLSocketFactory")]
    SslSocketFactory,
    TrustManager,
    HostnameVerifier,
    #[serde(rename = "HttpsURLConnection")]
    HttpsUrlConnection,
    #[serde(rename = "SSLContext")]
    SslContext,
    #[serde(rename = "SSLSocket")]
    SslSocket,
    #[serde(rename = "SSL")]
    Ssl,
    #[serde(rename = "https://")]
    HttpsScheme,
}

impl Keyword {
    pub const ALL: [Keyword; 8] = [
        Keyword::SslSocketFactory,
        Keyword::TrustManager,
        Keyword::HostnameVerifier,
        Keyword::HttpsUrlConnection,
        Keyword::SslContext,
        Keyword::SslSocket,
        Keyword::Ssl,
        Keyword::HttpsScheme,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::SslSocketFactory => "SSLSocketFactory",
            Keyword::TrustManager => "TrustManager",
            Keyword::HostnameVerifier => "HostnameVerifier",
            Keyword::HttpsUrlConnection => "HttpsURLConnection",
            Keyword::SslContext => "SSLContext",
            Keyword::SslSocket => "SSLSocket",
            Keyword::Ssl => "SSL",
            Keyword::HttpsScheme => "https://",
        }
    }
}

fn is_ident_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

/// Bare `SSL` must start a token and must not run on into lower case, so
/// `SSLSocket` and `SSL_ERROR` count but `OpenSSL`, `Cassl` and `SSLeay`
/// do not.
fn ssl_token_at(line: &[u8], at: usize) -> bool {
    let left_ok = at == 0 || !is_ident_byte(line[at - 1]);
    let right_ok = line
        .get(at + 3)
        .is_none_or(|b| !b.is_ascii_lowercase());
    left_ok && right_ok
}

fn occurrences<'a>(line: &'a str, needle: &'a str) -> impl Iterator<Item = usize> + 'a {
    line.match_indices(needle).map(|(i, _)| i)
}

fn keyword_on_line(line: &str, keyword: Keyword) -> bool {
    let word = keyword.as_str();
    match keyword {
        Keyword::Ssl => occurrences(line, word).any(|at| ssl_token_at(line.as_bytes(), at)),
        Keyword::HttpsScheme => line.contains(word),
        _ => occurrences(line, word).any(|at| {
            // A longer search term starting at the same offset claims the
            // match (`SSLSocketFactory` is not also an `SSLSocket` hit).
            !Keyword::ALL.iter().any(|longer| {
                *longer != Keyword::Ssl
                    && longer.as_str().len() > word.len()
                    && longer.as_str().starts_with(word)
                    && line[at..].starts_with(longer.as_str())
            })
        }),
    }
}

/// One hit per (line, keyword) pair, in line order. Origins are left unset.
pub fn scan_file(path: &str, text: &str) -> Vec<KeywordHit> {
    let mut hits = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        for keyword in Keyword::ALL {
            if keyword_on_line(line, keyword) {
                hits.push(KeywordHit {
                    file_path: path.to_string(),
                    keyword,
                    line: idx + 1,
                    origin: None,
                });
            }
        }
    }
    hits
}

/// Like [`scan_file`] for raw bytes; binary content is refused.
pub fn scan_file_bytes(path: &str, bytes: &[u8]) -> Result<Vec<KeywordHit>, ScanError> {
    Ok(scan_file(path, decode_text(path, bytes)?))
}

pub(crate) fn decode_text<'a>(path: &str, bytes: &'a [u8]) -> Result<&'a str, ScanError> {
    if bytes.contains(&0) {
        return Err(ScanError::NonTextFile(path.to_string()));
    }
    std::str::from_utf8(bytes).map_err(|_| ScanError::NonTextFile(path.to_string()))
}
