//! Percent escaping used by every line-oriented file: `%`, tab, LF, `;`
//! and `=` become `%25`, `%09`, `%0A`, `%3B`, `%3D`. Nothing else is
//! touched.

use std::borrow::Cow;

pub fn escape(s: &str) -> Cow<'_, str> {
    if !s.bytes().any(needs_escape) {
        return Cow::Borrowed(s);
    }
    let mut out = String::with_capacity(s.len() + 8);
    for c in s.chars() {
        match c {
            '%' => out.push_str("%25"),
            '\t' => out.push_str("%09"),
            '\n' => out.push_str("%0A"),
            ';' => out.push_str("%3B"),
            '=' => out.push_str("%3D"),
            c => out.push(c),
        }
    }
    Cow::Owned(out)
}

fn needs_escape(b: u8) -> bool {
    matches!(b, b'%' | b'\t' | b'\n' | b';' | b'=')
}

/// Inverse of [`escape`]. Accepts any `%XX` hex pair; the result must be
/// UTF-8.
pub fn unescape(s: &str) -> Result<Cow<'_, str>, &'static str> {
    if !s.contains('%') {
        return Ok(Cow::Borrowed(s));
    }
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = bytes.get(i + 1..i + 3).ok_or("truncated escape")?;
            let hex = std::str::from_utf8(hex).map_err(|_| "bad escape")?;
            out.push(u8::from_str_radix(hex, 16).map_err(|_| "bad escape")?);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out)
        .map(Cow::Owned)
        .map_err(|_| "escaped value is not UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reserved_bytes() {
        assert_eq!(escape("a=b;c\td\ne%"), "a%3Db%3Bc%09d%0Ae%25");
        assert_eq!(escape("plain/ok"), "plain/ok");
        assert!(unescape("%G1").is_err());
        assert!(unescape("%2").is_err());
    }

    proptest! {
        #[test]
        fn round_trip(s in any::<String>()) {
            let e = escape(&s);
            prop_assert!(!e.contains(['\t', '\n', ';', '=']));
            prop_assert_eq!(unescape(&e).unwrap(), s.as_str());
        }
    }
}
