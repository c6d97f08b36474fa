//! Comment and string masking.
//!
//! Detectors run over a copy of the file in which comments and the contents
//! of string/char literals are blanked out byte-for-byte. Offsets in the
//! masked copy are offsets in the original, so evidence can be sliced from
//! the real text.

/// Which tokenizer a file gets, chosen by extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceProfile {
    /// Decompiled Java (or anything else that uses `//`, `/* */` and quotes).
    JavaLike,
    /// baksmali output: `#` comments, `.method` blocks.
    Smali,
}

impl SourceProfile {
    pub fn for_path(path: &str) -> Self {
        if path.rsplit('.').next().is_some_and(|ext| ext.eq_ignore_ascii_case("smali")) && path.contains('.') {
            SourceProfile::Smali
        } else {
            SourceProfile::JavaLike
        }
    }
}

pub fn mask(text: &str, profile: SourceProfile) -> Vec<u8> {
    match profile {
        SourceProfile::JavaLike => mask_java(text.as_bytes()),
        SourceProfile::Smali => mask_smali(text.as_bytes()),
    }
}

fn blank(b: u8) -> u8 {
    if b == b'\n' {
        b'\n'
    } else {
        b' '
    }
}

fn mask_java(src: &[u8]) -> Vec<u8> {
    #[derive(PartialEq)]
    enum State {
        Code,
        Line,
        Block,
        Str(u8),
    }
    let mut out = src.to_vec();
    let mut state = State::Code;
    let mut i = 0;
    while i < src.len() {
        let b = src[i];
        let next = src.get(i + 1).copied();
        match state {
            State::Code => match (b, next) {
                (b'/', Some(b'/')) => {
                    state = State::Line;
                    out[i] = b' ';
                    out[i + 1] = b' ';
                    i += 1;
                }
                (b'/', Some(b'*')) => {
                    state = State::Block;
                    out[i] = b' ';
                    out[i + 1] = b' ';
                    i += 1;
                }
                (b'"', _) | (b'\'', _) => state = State::Str(b),
                _ => {}
            },
            State::Line => {
                if b == b'\n' {
                    state = State::Code;
                } else {
                    out[i] = b' ';
                }
            }
            State::Block => {
                if b == b'*' && next == Some(b'/') {
                    out[i] = b' ';
                    out[i + 1] = b' ';
                    i += 1;
                    state = State::Code;
                } else {
                    out[i] = blank(b);
                }
            }
            State::Str(quote) => {
                if b == b'\\' {
                    out[i] = b' ';
                    if let Some(n) = next {
                        out[i + 1] = blank(n);
                    }
                    i += 1;
                } else if b == quote {
                    state = State::Code;
                } else if b == b'\n' {
                    // Unterminated literal; resynchronise at the line end.
                    state = State::Code;
                } else {
                    out[i] = b' ';
                }
            }
        }
        i += 1;
    }
    out
}

fn mask_smali(src: &[u8]) -> Vec<u8> {
    let mut out = src.to_vec();
    let mut in_str = false;
    let mut in_comment = false;
    let mut i = 0;
    while i < src.len() {
        let b = src[i];
        if b == b'\n' {
            in_str = false;
            in_comment = false;
        } else if in_comment {
            out[i] = b' ';
        } else if in_str {
            if b == b'\\' && i + 1 < src.len() && src[i + 1] != b'\n' {
                out[i] = b' ';
                out[i + 1] = b' ';
                i += 1;
            } else if b == b'"' {
                in_str = false;
            } else {
                out[i] = b' ';
            }
        } else if b == b'"' {
            in_str = true;
        } else if b == b'#' {
            in_comment = true;
            out[i] = b' ';
        }
        i += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn java_comments_and_strings_are_blanked() {
        let src = "a(); // x\n/* y\n z */ s = \"q\\\"r\"; c = '\\'';";
        let masked = String::from_utf8(mask(src, SourceProfile::JavaLike)).unwrap();
        assert_eq!(masked.len(), src.len());
        assert_eq!(masked.lines().count(), src.lines().count());
        assert!(!masked.contains('x') && !masked.contains('y') && !masked.contains('q'));
        assert!(masked.contains("a();"));
        assert!(masked.contains("s = \""));
    }

    #[test]
    fn smali_comments_and_strings_are_blanked() {
        let src = "const-string v0, \"a#b\" # note\nreturn v0";
        let masked = String::from_utf8(mask(src, SourceProfile::Smali)).unwrap();
        assert_eq!(masked.len(), src.len());
        assert!(!masked.contains("note") && !masked.contains("a#b"));
        assert!(masked.contains("return v0"));
    }

    #[test]
    fn multibyte_text_keeps_offsets() {
        let src = "// caf\u{e9}\nx";
        assert_eq!(mask(src, SourceProfile::JavaLike).len(), src.len());
    }

    #[test]
    fn profile_by_extension() {
        assert_eq!(SourceProfile::for_path("a/b/C.smali"), SourceProfile::Smali);
        assert_eq!(SourceProfile::for_path("a/b/C.java"), SourceProfile::JavaLike);
        assert_eq!(SourceProfile::for_path("smali"), SourceProfile::JavaLike);
    }
}
