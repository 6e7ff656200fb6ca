use std::ops::Range;

/// Splits `text` into sentence byte ranges. A sentence ends at `.`, `!` or `?`
/// immediately followed by whitespace; abbreviations are not special-cased.
/// Ranges are trimmed of surrounding whitespace and never empty.
pub fn sentence_spans(text: &str) -> Vec<Range<usize>> {
    let mut spans = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            if let Some(&(_, next)) = chars.peek() {
                if next.is_whitespace() {
                    push_trimmed(text, start..i + c.len_utf8(), &mut spans);
                    start = i + c.len_utf8();
                }
            }
        }
    }
    push_trimmed(text, start..text.len(), &mut spans);
    spans
}

fn push_trimmed(text: &str, range: Range<usize>, out: &mut Vec<Range<usize>>) {
    let slice = &text[range.clone()];
    let lead = slice.len() - slice.trim_start().len();
    let trail = slice.len() - slice.trim_end().len();
    if lead + trail < slice.len() {
        out.push(range.start + lead..range.end - trail);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split(text: &str) -> Vec<&str> {
        sentence_spans(text).into_iter().map(|r| &text[r]).collect()
    }

    #[test]
    fn terminal_punctuation_then_whitespace() {
        assert_eq!(
            split("One. Two! Three? Four"),
            ["One.", "Two!", "Three?", "Four"]
        );
    }

    #[test]
    fn punctuation_without_whitespace_does_not_split() {
        assert_eq!(split("v1.2 is out...really"), ["v1.2 is out...really"]);
        assert_eq!(split("Wow!! Nice."), ["Wow!!", "Nice."]);
    }

    #[test]
    fn empty_and_blank() {
        assert!(split("").is_empty());
        assert!(split("   \n ").is_empty());
        assert_eq!(split("  padded.  "), ["padded."]);
    }
}
