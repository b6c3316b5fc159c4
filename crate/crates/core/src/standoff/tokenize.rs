//! Deterministic, toolkit-free tokenization and sentence splitting.
//!
//! All offsets here and everywhere else in the corpus layer are Unicode
//! code-point offsets, matching the standoff annotation convention.

/// A token surface with its `[start, end)` code-point span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSpan {
    pub surface: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Copy, PartialEq)]
enum CharClass {
    Whitespace,
    Alphanumeric,
    Punctuation,
}

fn classify(c: char) -> CharClass {
    if c.is_whitespace() {
        CharClass::Whitespace
    } else if c.is_alphanumeric() {
        CharClass::Alphanumeric
    } else {
        CharClass::Punctuation
    }
}

/// Splits text on whitespace, then at every alphanumeric/punctuation
/// boundary inside a chunk. Concatenating the surfaces with the skipped
/// whitespace reproduces the input exactly.
pub fn tokenize(text: &str) -> Vec<TokenSpan> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut start = None::<usize>;
    let mut class = CharClass::Whitespace;
    for (i, &c) in chars.iter().enumerate() {
        let k = classify(c);
        match (start, k) {
            (Some(s), CharClass::Whitespace) => {
                tokens.push(span(&chars, s, i));
                start = None;
            }
            (Some(s), _) if k != class => {
                tokens.push(span(&chars, s, i));
                start = Some(i);
            }
            (None, CharClass::Whitespace) => {}
            (None, _) => start = Some(i),
            _ => {}
        }
        class = k;
    }
    if let Some(s) = start {
        tokens.push(span(&chars, s, chars.len()));
    }
    tokens
}

fn span(chars: &[char], start: usize, end: usize) -> TokenSpan {
    TokenSpan {
        surface: chars[start..end].iter().collect(),
        start,
        end,
    }
}

/// Splits `text` into sentence spans at `.`/`!`/`?` followed by whitespace
/// and an uppercase letter or digit. A split whose boundary falls strictly
/// inside any span in `protected` is suppressed, so annotations never
/// straddle a sentence break.
pub fn split_sentences(text: &str, protected: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let inside = |pos: usize| protected.iter().any(|&(s, e)| s < pos && pos < e);

    let mut sentences = Vec::new();
    let mut sent_start = None::<usize>;
    let mut i = 0;
    while i < n {
        let c = chars[i];
        if sent_start.is_none() {
            if !c.is_whitespace() {
                sent_start = Some(i);
            }
            i += 1;
            continue;
        }
        if matches!(c, '.' | '!' | '?') {
            let mut j = i + 1;
            while j < n && chars[j].is_whitespace() {
                j += 1;
            }
            let starts_new = j > i + 1 && j < n && (chars[j].is_uppercase() || chars[j].is_numeric());
            if starts_new && !inside(i + 1) && !inside(j) {
                sentences.push((sent_start.unwrap(), i + 1));
                sent_start = None;
                i = j;
                continue;
            }
        }
        i += 1;
    }
    if let Some(s) = sent_start {
        let mut e = n;
        while e > s && chars[e - 1].is_whitespace() {
            e -= 1;
        }
        if e > s {
            sentences.push((s, e));
        }
    }
    sentences
}
