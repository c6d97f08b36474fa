//! Structural detection of verification-bypass idioms.
//!
//! Detection keys on method names, parameter shapes and bodies, never on
//! class names, so renamed (obfuscated) classes are caught the same way as
//! the originals.

use std::collections::BTreeSet;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::lexer::{mask, SourceProfile};

const EVIDENCE_LIMIT: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Idiom {
    /// `checkServerTrusted` with an empty body.
    TrustAllTrustManager,
    /// `verify(String, SSLSession)` that always returns true.
    AllowAllHostnameVerifierCustom,
    /// Use of the platform's allow-all verifier.
    AllowAllHostnameVerifierBuiltin,
    /// `onReceivedSslError` that calls `proceed()` on its handler.
    IgnoreSslErrorWebViewClient,
}

impl Idiom {
    pub fn bypasses_certificate(self) -> bool {
        self == Idiom::TrustAllTrustManager
    }

    pub fn bypasses_hostname(self) -> bool {
        matches!(
            self,
            Idiom::AllowAllHostnameVerifierCustom | Idiom::AllowAllHostnameVerifierBuiltin
        )
    }

    /// Short tag accepted in known-bad class lists.
    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag.to_ascii_lowercase().as_str() {
            "trust-all" | "trustalltrustmanager" => Some(Idiom::TrustAllTrustManager),
            "allow-all-hostname" | "allowallhostnameverifiercustom" => {
                Some(Idiom::AllowAllHostnameVerifierCustom)
            }
            "allow-all-builtin" | "allowallhostnameverifierbuiltin" => {
                Some(Idiom::AllowAllHostnameVerifierBuiltin)
            }
            "ignore-ssl-error" | "ignoresslerrorwebviewclient" => {
                Some(Idiom::IgnoreSslErrorWebViewClient)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IdiomFinding {
    pub file_path: String,
    /// 1-based line where the evidence starts.
    pub line: usize,
    pub idiom: Idiom,
    /// Verbatim text from the file starting at `line`, at most 200 bytes.
    pub evidence: String,
    /// Flagged through the known-bad class list rather than by its body.
    #[serde(default)]
    pub known_class: bool,
}

/// Findings for one file plus the number of regions that could not be
/// delimited (unbalanced braces, unterminated `.method`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdiomScan {
    pub findings: Vec<IdiomFinding>,
    pub skipped_regions: usize,
}

pub fn detect_idioms(path: &str, text: &str) -> IdiomScan {
    let profile = SourceProfile::for_path(path);
    let masked = mask(text, profile);
    // Masking only ever writes ASCII spaces over whole characters.
    let masked = String::from_utf8(masked).expect("masking preserves UTF-8");
    let mut ctx = Ctx {
        path,
        text,
        masked: &masked,
        scan: IdiomScan::default(),
    };
    match profile {
        SourceProfile::JavaLike => ctx.java(),
        SourceProfile::Smali => ctx.smali(),
    }
    ctx.builtin_tokens();
    let mut scan = ctx.scan;
    scan.findings.sort();
    scan.findings.dedup();
    scan
}

static BUILTIN_TOKEN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\b(ALLOW_ALL_HOSTNAME_VERIFIER|AllowAllHostnameVerifier)\b").unwrap());
static JAVA_METHOD: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\b(checkServerTrusted|verify|onReceivedSslError)\s*\(").unwrap());
static RETURN_ONLY: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^(return\s*;)?$").unwrap());
static RETURN_TRUE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^return\s*(\(\s*true\s*\)|true)\s*;$").unwrap());
static SMALI_CONST_TRUE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^const(/4|/16)?\s+([vp]\d+)\s*,\s*(0x1|1)$").unwrap());
static SMALI_RETURN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^return\s+([vp]\d+)$").unwrap());
static SMALI_PROCEED: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^invoke-\S+\s*\{[^}]*\}\s*,\s*Landroid/webkit/SslErrorHandler;->proceed\(\)V$").unwrap()
});

const SMALI_CHECK_SERVER: &str = "checkServerTrusted([Ljava/security/cert/X509Certificate;Ljava/lang/String;)V";
const SMALI_VERIFY: &str = "verify(Ljava/lang/String;Ljavax/net/ssl/SSLSession;)Z";
const SMALI_SSL_ERROR: &str =
    "onReceivedSslError(Landroid/webkit/WebView;Landroid/webkit/SslErrorHandler;Landroid/net/http/SslError;)V";

struct Ctx<'a> {
    path: &'a str,
    text: &'a str,
    masked: &'a str,
    scan: IdiomScan,
}

impl Ctx<'_> {
    fn record(&mut self, idiom: Idiom, start: usize, end: usize) {
        let mut cut = end.min(start + EVIDENCE_LIMIT).min(self.text.len());
        while !self.text.is_char_boundary(cut) {
            cut -= 1;
        }
        self.scan.findings.push(IdiomFinding {
            file_path: self.path.to_string(),
            line: line_of(self.text, start),
            idiom,
            evidence: self.text[start..cut].to_string(),
            known_class: false,
        });
    }

    fn builtin_tokens(&mut self) {
        let mut seen_lines = BTreeSet::new();
        let spans: Vec<(usize, usize)> = BUILTIN_TOKEN
            .find_iter(self.masked)
            .map(|m| (m.start(), m.end()))
            .collect();
        for (start, end) in spans {
            if seen_lines.insert(line_of(self.text, start)) {
                self.record(Idiom::AllowAllHostnameVerifierBuiltin, start, end);
            }
        }
    }

    fn java(&mut self) {
        let masked = self.masked;
        let bytes = masked.as_bytes();
        for caps in JAVA_METHOD.captures_iter(masked) {
            let whole = caps.get(0).unwrap();
            let name = caps.get(1).unwrap().as_str();
            let open_paren = whole.end() - 1;
            let Some(close_paren) = matching(bytes, open_paren, b'(', b')') else {
                self.scan.skipped_regions += 1;
                continue;
            };
            let Some(open_brace) = body_start(bytes, close_paren + 1) else {
                // A call site or an abstract declaration, not a definition.
                continue;
            };
            let Some(close_brace) = matching(bytes, open_brace, b'{', b'}') else {
                self.scan.skipped_regions += 1;
                continue;
            };
            let params = split_params(&masked[open_paren + 1..close_paren]);
            let body = collapse(&masked[open_brace + 1..close_brace]);
            let start = whole.start();
            let end = close_brace + 1;
            match name {
                "checkServerTrusted" => {
                    if params.len() == 2 && RETURN_ONLY.is_match(&body) {
                        self.record(Idiom::TrustAllTrustManager, start, end);
                    }
                }
                "verify" => {
                    let shaped = params.len() == 2
                        && param_type(&params[0]).ends_with("String")
                        && param_type(&params[1]).ends_with("SSLSession");
                    if shaped && RETURN_TRUE.is_match(&body) {
                        self.record(Idiom::AllowAllHostnameVerifierCustom, start, end);
                    }
                }
                "onReceivedSslError" => {
                    let handler = params
                        .iter()
                        .find(|p| param_type(p).ends_with("SslErrorHandler"))
                        .or_else(|| params.get(1))
                        .map(|p| param_name(p).to_string());
                    if let Some(handler) = handler.filter(|h| !h.is_empty()) {
                        let call = Regex::new(&format!(r"\b{}\s*\.\s*proceed\s*\(", regex::escape(&handler)))
                            .expect("escaped identifier");
                        if call.is_match(&body) {
                            self.record(Idiom::IgnoreSslErrorWebViewClient, start, end);
                        }
                    }
                }
                _ => {}
            }
        }
    }

    fn smali(&mut self) {
        let masked = self.masked;
        let mut offset = 0;
        let mut current: Option<(usize, String, Vec<String>)> = None;
        let mut in_block = false;
        for line in masked.split_inclusive('\n') {
            let line_start = offset;
            offset += line.len();
            let trimmed = line.trim();
            if let Some(rest) = trimmed.strip_prefix(".method ") {
                if current.is_some() {
                    self.scan.skipped_regions += 1;
                }
                let signature = rest.split_whitespace().last().unwrap_or("").to_string();
                let indent = line.len() - line.trim_start().len();
                current = Some((line_start + indent, signature, Vec::new()));
                in_block = false;
                continue;
            }
            let Some((start, signature, instructions)) = current.as_mut() else {
                continue;
            };
            if trimmed == ".end method" {
                let (start, signature, instructions) = (*start, signature.clone(), std::mem::take(instructions));
                current = None;
                self.smali_method(start, line_start + line.trim_end().len(), &signature, &instructions);
                continue;
            }
            if in_block {
                if trimmed.starts_with(".end ") {
                    in_block = false;
                }
                continue;
            }
            if trimmed.starts_with(".annotation") {
                in_block = true;
                continue;
            }
            if trimmed.is_empty() || trimmed.starts_with('.') || trimmed.starts_with(':') {
                continue;
            }
            instructions.push(trimmed.split_whitespace().collect::<Vec<_>>().join(" "));
        }
        if current.is_some() {
            self.scan.skipped_regions += 1;
        }
    }

    fn smali_method(&mut self, start: usize, end: usize, signature: &str, instructions: &[String]) {
        match signature {
            SMALI_CHECK_SERVER => {
                if instructions.iter().all(|i| i == "return-void") {
                    self.record(Idiom::TrustAllTrustManager, start, end);
                }
            }
            SMALI_VERIFY => {
                if let [load, ret] = instructions {
                    let loaded = SMALI_CONST_TRUE.captures(load).map(|c| c[2].to_string());
                    let returned = SMALI_RETURN.captures(ret).map(|c| c[1].to_string());
                    if loaded.is_some() && loaded == returned {
                        self.record(Idiom::AllowAllHostnameVerifierCustom, start, end);
                    }
                }
            }
            SMALI_SSL_ERROR if instructions.iter().any(|i| SMALI_PROCEED.is_match(i)) => {
                self.record(Idiom::IgnoreSslErrorWebViewClient, start, end);
            }
            _ => {}
        }
    }
}

pub(crate) fn line_of(text: &str, offset: usize) -> usize {
    text.as_bytes()[..offset].iter().filter(|b| **b == b'\n').count() + 1
}

fn matching(bytes: &[u8], open: usize, open_ch: u8, close_ch: u8) -> Option<usize> {
    let mut depth = 0usize;
    for (i, b) in bytes.iter().enumerate().skip(open) {
        if *b == open_ch {
            depth += 1;
        } else if *b == close_ch {
            depth -= 1;
            if depth == 0 {
                return Some(i);
            }
        }
    }
    None
}

/// After a parameter list: skip an optional `throws` clause and return the
/// offset of the body's `{`, or `None` when the declaration has no body.
fn body_start(bytes: &[u8], from: usize) -> Option<usize> {
    let mut i = from;
    while i < bytes.len() && bytes[i].is_ascii_whitespace() {
        i += 1;
    }
    if bytes.get(i) == Some(&b'{') {
        return Some(i);
    }
    if !bytes[i..].starts_with(b"throws") {
        return None;
    }
    bytes[i..]
        .iter()
        .position(|b| *b == b'{' || *b == b';')
        .map(|p| i + p)
        .filter(|p| bytes[*p] == b'{')
}

fn split_params(params: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    for c in params.chars() {
        match c {
            '<' | '(' | '[' => depth += 1,
            '>' | ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(collapse(&current));
                current.clear();
                continue;
            }
            _ => {}
        }
        current.push(c);
    }
    let last = collapse(&current);
    if !last.is_empty() {
        out.push(last);
    }
    out
}

/// Type part of `final java.lang.String host` (everything but the name).
fn param_type(param: &str) -> String {
    let words: Vec<&str> = param
        .split_whitespace()
        .filter(|w| *w != "final" && !w.starts_with('@'))
        .collect();
    match words.len() {
        0 => String::new(),
        1 => words[0].to_string(),
        n => words[..n - 1].join(" "),
    }
}

fn param_name(param: &str) -> &str {
    param.split_whitespace().last().unwrap_or("")
}

fn collapse(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idioms(path: &str, text: &str) -> Vec<Idiom> {
        detect_idioms(path, text).findings.iter().map(|f| f.idiom).collect()
    }

    #[test]
    fn empty_check_server_trusted() {
        let src = "TrustManager tm = new X509TrustManager(){\n    public void checkServerTrusted(X509Certificate[] c, String\n        at) throws CertificateException\n        {} // nothing\n};";
        let scan = detect_idioms("T.java", src);
        assert_eq!(scan.findings.len(), 1);
        let f = &scan.findings[0];
        assert_eq!(f.idiom, Idiom::TrustAllTrustManager);
        assert_eq!(f.line, 2);
        assert!(f.evidence.starts_with("checkServerTrusted(X509Certificate[] c"));
        assert!(src.contains(&f.evidence));
    }

    #[test]
    fn bare_return_counts_as_empty() {
        let src = "void checkServerTrusted(X509Certificate[] a, String b) { return; }";
        assert_eq!(idioms("T.java", src), [Idiom::TrustAllTrustManager]);
    }

    #[test]
    fn real_trust_checks_are_not_flagged() {
        let src = "public void checkServerTrusted(X509Certificate[] a, String b) throws CertificateException {\n  delegate.checkServerTrusted(a, b);\n}";
        assert!(idioms("T.java", src).is_empty());
    }

    #[test]
    fn verify_always_true() {
        let src = "public boolean verify(String r1, SSLSession r2) {\n    return true; // ok\n}";
        assert_eq!(idioms("V.java", src), [Idiom::AllowAllHostnameVerifierCustom]);
        let src = "public final boolean verify(final java.lang.String h, javax.net.ssl.SSLSession s) { return (true); }";
        assert_eq!(idioms("V.java", src), [Idiom::AllowAllHostnameVerifierCustom]);
    }

    #[test]
    fn computed_verify_is_clean() {
        let src = "public boolean verify(String host, SSLSession s) { return HOST.equals(host); }";
        assert!(idioms("V.java", src).is_empty());
        // Other `verify` shapes are unrelated APIs.
        let src = "public boolean verify(byte[] sig) { return true; }";
        assert!(idioms("V.java", src).is_empty());
    }

    #[test]
    fn builtin_tokens_ignore_comments_and_strings() {
        let src = "f.setHostnameVerifier(SSLSocketFactory.\n    ALLOW_ALL_HOSTNAME_VERIFIER);\n// AllowAllHostnameVerifier\nString s = \"ALLOW_ALL_HOSTNAME_VERIFIER\";";
        let scan = detect_idioms("B.java", src);
        assert_eq!(scan.findings.len(), 1);
        assert_eq!(scan.findings[0].line, 2);
        assert_eq!(scan.findings[0].evidence, "ALLOW_ALL_HOSTNAME_VERIFIER");
        assert_eq!(
            idioms("B.java", "HostnameVerifier v = new AllowAllHostnameVerifier();"),
            [Idiom::AllowAllHostnameVerifierBuiltin]
        );
    }

    #[test]
    fn ssl_error_proceed() {
        let src = "public void onReceivedSslError(WebView w, SslErrorHandler\n h, SslError e) {\n  h.proceed();\n}";
        assert_eq!(idioms("W.java", src), [Idiom::IgnoreSslErrorWebViewClient]);
        let src = "public void onReceivedSslError(WebView w, SslErrorHandler h, SslError e) { h.cancel(); }";
        assert!(idioms("W.java", src).is_empty());
    }

    #[test]
    fn call_sites_are_not_definitions() {
        let src = "tm.checkServerTrusted(chain, type);\nboolean ok = v.verify(host, session);";
        let scan = detect_idioms("C.java", src);
        assert!(scan.findings.is_empty());
        assert_eq!(scan.skipped_regions, 0);
    }

    #[test]
    fn unbalanced_region_is_tallied() {
        let src = "void checkServerTrusted(X509Certificate[] a, String b) {";
        let scan = detect_idioms("T.java", src);
        assert!(scan.findings.is_empty());
        assert_eq!(scan.skipped_regions, 1);
    }

    #[test]
    fn smali_forms() {
        let tm = ".method public checkServerTrusted([Ljava/security/cert/X509Certificate;Ljava/lang/String;)V\n    .locals 0\n    .annotation system Ldalvik/annotation/Throws;\n        value = {\n            Ljava/security/cert/CertificateException;\n        }\n    .end annotation\n\n    .line 3\n    return-void\n.end method\n";
        assert_eq!(idioms("a.smali", tm), [Idiom::TrustAllTrustManager]);

        let hv = ".method public verify(Ljava/lang/String;Ljavax/net/ssl/SSLSession;)Z\n    .locals 1\n    const/4 v0, 0x1\n    return v0\n.end method\n";
        assert_eq!(idioms("b.smali", hv), [Idiom::AllowAllHostnameVerifierCustom]);
        let hv_false = hv.replace("0x1", "0x0");
        assert!(idioms("b.smali", &hv_false).is_empty());

        let wv = ".method public onReceivedSslError(Landroid/webkit/WebView;Landroid/webkit/SslErrorHandler;Landroid/net/http/SslError;)V\n    .locals 0\n    invoke-virtual {p2}, Landroid/webkit/SslErrorHandler;->proceed()V\n    return-void\n.end method\n";
        assert_eq!(idioms("c.smali", wv), [Idiom::IgnoreSslErrorWebViewClient]);

        let builtin = "    sget-object v1, Lorg/apache/http/conn/ssl/SSLSocketFactory;->ALLOW_ALL_HOSTNAME_VERIFIER:Lorg/apache/http/conn/ssl/X509HostnameVerifier;\n";
        assert_eq!(idioms("d.smali", builtin), [Idiom::AllowAllHostnameVerifierBuiltin]);
    }

    #[test]
    fn smali_unterminated_method() {
        let scan = detect_idioms("e.smali", ".method public verify(Ljava/lang/String;Ljavax/net/ssl/SSLSession;)Z\n const/4 v0, 0x1\n");
        assert!(scan.findings.is_empty());
        assert_eq!(scan.skipped_regions, 1);
    }

    #[test]
    fn evidence_is_capped() {
        let filler = "x();\n".repeat(100);
        let src = format!("public void onReceivedSslError(WebView w, SslErrorHandler h, SslError e) {{\n{filler} h.proceed(); }}");
        let f = &detect_idioms("W.java", &src).findings[0];
        assert!(f.evidence.len() <= EVIDENCE_LIMIT);
        assert!(src.contains(&f.evidence));
    }
}
