use alloc::vec::Vec;

use crate::span::Span;

fn is_terminal(text: &[u8]) -> bool {
    matches!(text, b"." | b"!" | b"?")
}

/// Groups sorted token spans into sentences: each sentence ends at a
/// terminal token (`.`, `!`, `?`) or at the last token.
pub fn split_sentences(content: &[u8], tokens: &[Span]) -> Vec<Span> {
    let mut out = Vec::new();
    let mut first: Option<Span> = None;
    for tok in tokens {
        let start = *first.get_or_insert(*tok);
        if is_terminal(&content[tok.start..tok.end]) {
            out.push(Span::new(start.start, tok.end));
            first = None;
        }
    }
    if let (Some(start), Some(last)) = (first, tokens.last()) {
        out.push(Span::new(start.start, last.end));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vie::tokenize;
    use alloc::vec;

    fn sentences(text: &[u8]) -> Vec<Span> {
        split_sentences(text, &tokenize(text))
    }

    #[test]
    fn rule() {
        assert_eq!(sentences(b"Sarah savored the soup."), vec![Span::new(0, 23)]);
        assert_eq!(
            sentences(b"Dog bites man. Newshound implicated."),
            vec![Span::new(0, 14), Span::new(15, 36)]
        );
        assert!(sentences(b" \t\r\n ").is_empty());
        assert_eq!(sentences(b"Really?! no end"), vec![Span::new(0, 7), Span::new(7, 8), Span::new(9, 15)]);
    }
}
