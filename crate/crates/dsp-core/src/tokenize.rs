//! Whitespace tokenization over lowercased, punctuation-separated text.
//!
//! Tokens are opaque strings everywhere else in the crate; this is the single
//! place raw text is turned into tokens, so datasets, predictions and gold
//! annotations all agree on boundaries. The `;` character is reserved as the
//! reference trigger separator in tree serializations, so utterance semicolons
//! are escaped to [`SEMICOLON_ESCAPE`] here.

/// Replacement token for a literal `;` occurring in utterance text.
pub const SEMICOLON_ESCAPE: &str = "<semi>";

fn is_separator_punct(ch: char) -> bool {
    matches!(ch, '.' | ',' | '!' | '?' | ';' | ':' | '"' | '(' | ')')
}

/// Lowercase `text`, split punctuation into its own tokens, and split on
/// whitespace. `;` becomes [`SEMICOLON_ESCAPE`]. Angle-bracketed specials such
/// as `<sep>` pass through untouched.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.to_lowercase().chars() {
        if ch.is_whitespace() {
            flush(&mut out, &mut cur);
        } else if is_separator_punct(ch) {
            flush(&mut out, &mut cur);
            if ch == ';' {
                out.push(SEMICOLON_ESCAPE.to_string());
            } else {
                out.push(ch.to_string());
            }
        } else {
            cur.push(ch);
        }
    }
    flush(&mut out, &mut cur);
    out
}

fn flush(out: &mut Vec<String>, cur: &mut String) {
    if !cur.is_empty() {
        out.push(std::mem::take(cur));
    }
}

/// Join tokens back into a single line of text.
pub fn detokenize(tokens: &[String]) -> String {
    tokens.join(" ")
}
