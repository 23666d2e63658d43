use alloc::vec::Vec;

use crate::span::Span;

/// Space, tab, CR and LF. No other byte counts as whitespace.
pub fn is_whitespace(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\r' | b'\n')
}

/// ASCII alphanumerics plus every non-ASCII byte.
pub fn is_word_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b >= 0x80
}

/// One span per maximal run of word bytes and one per remaining
/// non-whitespace byte.
pub fn tokenize(content: &[u8]) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut i = 0;
    while i < content.len() {
        let b = content[i];
        if is_whitespace(b) {
            i += 1;
        } else if is_word_byte(b) {
            let start = i;
            while i < content.len() && is_word_byte(content[i]) {
                i += 1;
            }
            spans.push(Span::new(start, i));
        } else {
            spans.push(Span::new(i, i + 1));
            i += 1;
        }
    }
    spans
}
