use std::sync::OnceLock;

use regex::Regex;
use unicode_normalization::UnicodeNormalization;
use unicode_segmentation::UnicodeSegmentation;

fn emoji_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[\p{Extended_Pictographic}\p{Regional_Indicator}]").unwrap())
}

fn punct_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\p{P}+$").unwrap())
}

fn is_emoji(grapheme: &str) -> bool {
    emoji_re().is_match(grapheme)
}

fn is_punct(grapheme: &str) -> bool {
    punct_re().is_match(grapheme)
}

/// Splits text into lowercase NFC tokens.
///
/// Whitespace separates chunks. Inside a chunk every emoji grapheme becomes
/// its own token, and punctuation at either edge of a word is peeled off one
/// grapheme at a time. Punctuation inside a word (`don't`, `e.g`) stays.
pub fn tokenize(text: &str) -> Vec<String> {
    let normalized: String = text.to_lowercase().nfc().collect();
    let mut tokens = Vec::new();
    for chunk in normalized.split_whitespace() {
        let mut run: Vec<&str> = Vec::new();
        for g in chunk.graphemes(true) {
            if is_emoji(g) {
                flush_word(&run, &mut tokens);
                run.clear();
                tokens.push(g.to_string());
            } else {
                run.push(g);
            }
        }
        flush_word(&run, &mut tokens);
    }
    tokens
}

/// Canonical form of a single dictionary word: trimmed, lowercased, NFC.
/// Unlike [`tokenize`] it never splits.
pub fn normalize_word(word: &str) -> String {
    word.trim().to_lowercase().nfc().collect()
}

fn flush_word(graphemes: &[&str], out: &mut Vec<String>) {
    if graphemes.is_empty() {
        return;
    }
    let lead = graphemes.iter().take_while(|g| is_punct(g)).count();
    if lead == graphemes.len() {
        out.extend(graphemes.iter().map(|g| g.to_string()));
        return;
    }
    let trail = graphemes.iter().rev().take_while(|g| is_punct(g)).count();
    out.extend(graphemes[..lead].iter().map(|g| g.to_string()));
    out.push(graphemes[lead..graphemes.len() - trail].concat());
    out.extend(graphemes[graphemes.len() - trail..].iter().map(|g| g.to_string()));
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s)
    }

    #[test]
    fn splits_trailing_punctuation() {
        assert_eq!(toks("I ran, happy!"), ["i", "ran", ",", "happy", "!"]);
    }

    #[test]
    fn empty_text() {
        assert!(toks("").is_empty());
        assert!(toks("   \t\n").is_empty());
    }

    #[test]
    fn emoji_kept_whole() {
        assert_eq!(toks("خوب 😡"), ["خوب", "😡"]);
        assert_eq!(toks("great😀😀"), ["great", "😀", "😀"]);
        // ZWJ family sequence is one grapheme
        assert_eq!(toks("👨‍👩‍👧 ok"), ["👨‍👩‍👧", "ok"]);
    }

    #[test]
    fn interior_punctuation_stays() {
        assert_eq!(toks("Don't (stop)..."), ["don't", "(", "stop", ")", ".", ".", "."]);
        assert_eq!(toks("¿Qué?"), ["¿", "qué", "?"]);
        assert_eq!(toks("سلام؟"), ["سلام", "؟"]);
    }

    #[test]
    fn nfc_normalizes() {
        // e + combining acute vs precomposed é
        assert_eq!(toks("caf\u{0065}\u{0301}"), toks("caf\u{00e9}"));
    }

    proptest! {
        #[test]
        fn idempotent_on_rejoined_tokens(s in "\\PC{0,40}") {
            let once = tokenize(&s);
            let twice = tokenize(&once.join(" "));
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn deterministic(s in "[a-zA-Z ,.!?😀é]{0,30}") {
            prop_assert_eq!(tokenize(&s), tokenize(&s));
        }
    }
}
