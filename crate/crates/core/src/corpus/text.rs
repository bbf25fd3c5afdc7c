/// Characters that may open a sentence before its first letter.
const OPENERS: &[char] = &['"', '\'', '“', '‘', '(', '[', '«'];

/// Splits text into sentences, keeping each terminator with its sentence.
///
/// Rules:
/// * `。！？` always end a sentence.
/// * `!` and `?` end a sentence when followed by whitespace or end of text.
/// * `.` ends a sentence at end of text, or when followed by whitespace and
///   then an uppercase letter (optionally behind an opening quote or
///   bracket). "U.S. officials" and "5 p.m. today" therefore stay whole.
pub fn sentence_split(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        let end = i + ch.len_utf8();
        let rest = &text[end..];
        let boundary = match ch {
            '。' | '！' | '？' => true,
            '!' | '?' => rest.chars().next().map_or(true, char::is_whitespace),
            '.' => period_ends_sentence(rest),
            _ => false,
        };
        if boundary {
            push_trimmed(&mut out, &text[start..end]);
            start = end;
        }
    }
    push_trimmed(&mut out, &text[start..]);
    out
}

fn period_ends_sentence(rest: &str) -> bool {
    let trimmed = rest.trim_start();
    if trimmed.is_empty() {
        return true;
    }
    if trimmed.len() == rest.len() {
        return false;
    }
    trimmed
        .trim_start_matches(OPENERS)
        .chars()
        .next()
        .is_some_and(char::is_uppercase)
}

fn push_trimmed(out: &mut Vec<String>, piece: &str) {
    let piece = piece.trim();
    if !piece.is_empty() {
        out.push(piece.to_string());
    }
}

pub(crate) fn is_cjk(c: char) -> bool {
    matches!(c as u32,
        0x3040..=0x30FF      // kana
        | 0x3400..=0x4DBF
        | 0x4E00..=0x9FFF
        | 0xF900..=0xFAFF
        | 0x20000..=0x2A6DF)
}

/// Splits on whitespace and punctuation. Alphanumeric runs form tokens
/// (ASCII letters lowercased); each CJK codepoint is a token of its own.
/// Pre-segmented CJK text bypasses this via the dataset's `pretokenized`
/// field.
pub fn tokenize(sentence: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in sentence.chars() {
        if is_cjk(ch) {
            flush(&mut tokens, &mut current);
            tokens.push(ch.to_string());
        } else if ch.is_alphanumeric() {
            current.push(ch.to_ascii_lowercase());
        } else {
            flush(&mut tokens, &mut current);
        }
    }
    flush(&mut tokens, &mut current);
    tokens
}

fn flush(tokens: &mut Vec<String>, current: &mut String) {
    if !current.is_empty() {
        tokens.push(std::mem::take(current));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_simple_sentences() {
        assert_eq!(sentence_split("A fox. A dog."), vec!["A fox.", "A dog."]);
        assert_eq!(sentence_split("A. B."), vec!["A.", "B."]);
        assert!(sentence_split("").is_empty());
        assert!(sentence_split("   ").is_empty());
    }

    #[test]
    fn iso_date_before_period_does_not_block_split() {
        let s = sentence_split("He left on 2016-12-06. Bowie receives four posthumous awards.");
        assert_eq!(s.len(), 2);
        assert_eq!(s[0], "He left on 2016-12-06.");
    }

    #[test]
    fn abbreviations_stay_whole() {
        assert_eq!(
            sentence_split("U.S. officials met at 5 p.m. today. They left."),
            vec!["U.S. officials met at 5 p.m. today.", "They left."]
        );
    }

    #[test]
    fn exclamation_question_and_cjk() {
        assert_eq!(sentence_split("Really? Yes! ok"), vec!["Really?", "Yes!", "ok"]);
        assert_eq!(sentence_split("他来了。她走了！"), vec!["他来了。", "她走了！"]);
        assert_eq!(sentence_split("Wait!!! Then."), vec!["Wait!!!", "Then."]);
    }

    #[test]
    fn quoted_sentence_start() {
        assert_eq!(sentence_split("He left. \"Why?\" she asked."), vec!["He left.", "\"Why?\" she asked."]);
    }

    #[test]
    fn tokenizes_words() {
        assert_eq!(tokenize("Rock and Roll Hall"), vec!["rock", "and", "roll", "hall"]);
        assert_eq!(tokenize("1996-01-17"), vec!["1996", "01", "17"]);
        assert_eq!(
            tokenize("Buys the AC Milan football club"),
            vec!["buys", "the", "ac", "milan", "football", "club"]
        );
    }

    #[test]
    fn tokenize_edge_cases() {
        assert!(tokenize("!!! ...").is_empty());
        assert_eq!(tokenize("Émile"), vec!["Émile"]);
        assert_eq!(tokenize("中国 人民"), vec!["中", "国", "人", "民"]);
        assert_eq!(tokenize("COVID19 up"), vec!["covid19", "up"]);
    }
}
