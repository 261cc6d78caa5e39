//! Personal-identifier extraction: split a bio on delimiters, clean each
//! phrase, drop phrases that are too short or too long, return the rest.

mod rules;

pub use rules::{parse_spec, write_spec, RuleSet, RuleSpec, DEFAULT_RULES};

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Phrases with more whitespace tokens than this are dropped.
pub const MAX_TOKENS: usize = 3;
/// Phrases with this many alphanumeric characters or fewer are dropped.
pub const MAX_SHORT_LETTERS: usize = 2;

/// One extracted identifier occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhraseRecord {
    pub text: String,
    pub token_count: usize,
    pub source_user: String,
    /// 0-based index among the phrases kept for this bio.
    pub position: usize,
}

/// Emoji and pictographic symbols, including the joiners and modifiers used
/// inside emoji sequences.
pub fn is_emoji(c: char) -> bool {
    matches!(c as u32,
        0x1F000..=0x1FAFF   // mahjong .. symbols & pictographs extended-a
        | 0x2600..=0x27BF   // misc symbols, dingbats
        | 0x2300..=0x23FF   // misc technical (watch, hourglass, ...)
        | 0x2B00..=0x2BFF   // arrows, stars, circles
        | 0x2190..=0x21FF   // arrows
        | 0x3030 | 0x303D | 0x3297 | 0x3299
        | 0xFE0F            // variation selector-16
        | 0x200D            // zero width joiner
        | 0x20E3            // keycap
        | 0xE0020..=0xE007F // tag sequences
    )
}

/// Splits a bio on the configured delimiters. Empty segments are dropped;
/// whitespace-only segments are kept for the cleaning step to discard.
pub fn split_bio<'a>(bio: &'a str, rules: &RuleSet) -> Vec<&'a str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut i = 0;
    let bytes_len = bio.len();
    while i < bytes_len {
        let rest = &bio[i..];
        let multi = rules
            .multi_delims
            .iter()
            .find(|d| rest.starts_with(d.as_str()))
            .map(|d| d.len());
        let c = rest.chars().next().expect("non-empty");
        let width = match multi {
            Some(len) => Some(len),
            None if rules.is_delimiter_char(c) => Some(c.len_utf8()),
            None => None,
        };
        match width {
            Some(w) => {
                if start < i {
                    out.push(&bio[start..i]);
                }
                i += w;
                start = i;
            }
            None => i += c.len_utf8(),
        }
    }
    if start < bytes_len {
        out.push(&bio[start..]);
    }
    out
}

/// NFKC + lowercase. ASCII input skips normalization.
pub(crate) fn fold_case(s: &str) -> String {
    if s.is_ascii() {
        return s.to_ascii_lowercase();
    }
    let lowered: String = s.nfkc().collect::<String>().to_lowercase();
    lowered.nfkc().collect()
}

fn is_apostrophe(c: char) -> bool {
    matches!(
        c,
        '\'' | '\u{2019}' | '\u{2018}' | '\u{02BC}' | '`' | '\u{00B4}'
    )
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || is_combining_mark(c)
}

/// Kept inside tokens when stripping punctuation.
fn is_inner_symbol(c: char) -> bool {
    matches!(c, '/' | '-' | '@' | '#')
}

/// Strips punctuation from one whitespace token; returns `None` if nothing
/// word-like remains.
fn strip_token(token: &str) -> Option<String> {
    let t = token.trim_start_matches(['#', '/', '-']);
    let t = t.trim_end_matches(['#', '/', '-', '@']);
    let t = t.trim_start_matches('#');
    if t.chars().any(|c| c.is_alphanumeric()) {
        Some(t.to_string())
    } else {
        None
    }
}

/// Case folding, replacements-free character cleanup and whitespace collapse.
/// Used for phrases and for the rule lists themselves.
pub(crate) fn normalize_text(s: &str, strip_punctuation: bool) -> String {
    let folded = fold_case(s);
    tokens_of(&folded, strip_punctuation, false).join(" ")
}

fn tokens_of(s: &str, strip_punctuation: bool, strip_emoji: bool) -> Vec<String> {
    if !strip_punctuation {
        return s
            .split_whitespace()
            .map(|t| {
                if strip_emoji {
                    t.chars().filter(|&c| !is_emoji(c)).collect()
                } else {
                    t.to_string()
                }
            })
            .filter(|t: &String| !t.is_empty())
            .collect();
    }
    let mut spaced = String::with_capacity(s.len());
    for c in s.chars() {
        if is_word_char(c) || is_inner_symbol(c) {
            spaced.push(c);
        } else if is_apostrophe(c) {
            // dropped without splitting: "mother's" -> "mothers"
        } else {
            spaced.push(' ');
        }
    }
    spaced.split_whitespace().filter_map(strip_token).collect()
}

fn remove_phrases(tokens: &mut Vec<String>, removals: &[Vec<String>]) {
    'scan: loop {
        for pattern in removals {
            let n = pattern.len();
            if n == 0 || n > tokens.len() {
                continue;
            }
            if let Some(at) = (0..=tokens.len() - n).find(|&i| tokens[i..i + n] == pattern[..]) {
                tokens.drain(at..at + n);
                continue 'scan;
            }
        }
        break;
    }
}

fn clean_once(raw: &str, rules: &RuleSet) -> String {
    let mut text = fold_case(raw);
    for (from, to) in &rules.replacements {
        if text.contains(from.as_str()) {
            text = text.replace(from.as_str(), to);
        }
    }
    let mut tokens = tokens_of(&text, rules.strip_punctuation(), rules.strip_emoji());
    remove_phrases(&mut tokens, &rules.removals);
    let start = tokens
        .iter()
        .position(|t| !rules.stopwords.contains(t))
        .unwrap_or(tokens.len());
    let end = tokens
        .iter()
        .rposition(|t| !rules.stopwords.contains(t))
        .map_or(start, |i| i + 1);
    tokens[start..end.max(start)].join(" ")
}

/// Lowercases, normalizes, applies replacements and removals, strips edge
/// stopwords and punctuation, and collapses whitespace. The result may be
/// empty. Cleaning a cleaned phrase returns it unchanged.
pub fn clean_phrase(raw: &str, rules: &RuleSet) -> String {
    let mut current = clean_once(raw, rules);
    // Each step can expose a match for an earlier one (e.g. a removal that
    // leaves a new stopword at the edge); iterate to a fixpoint.
    for _ in 0..8 {
        let next = clean_once(&current, rules);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

pub fn token_count(phrase: &str) -> usize {
    phrase.split_whitespace().count()
}

pub fn letter_count(phrase: &str) -> usize {
    phrase.chars().filter(|c| c.is_alphanumeric()).count()
}

/// Length limits applied by [`filter_phrases_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhraseLimits {
    /// `None` keeps phrases of any length.
    pub max_tokens: Option<usize>,
    pub max_short_letters: usize,
}

impl Default for PhraseLimits {
    fn default() -> Self {
        PhraseLimits {
            max_tokens: Some(MAX_TOKENS),
            max_short_letters: MAX_SHORT_LETTERS,
        }
    }
}

impl PhraseLimits {
    /// Only the empty and short-phrase filters; used to collect long candidates.
    pub fn unbounded() -> Self {
        PhraseLimits {
            max_tokens: None,
            ..Default::default()
        }
    }

    pub fn accepts(&self, phrase: &str) -> bool {
        let tokens = token_count(phrase);
        tokens > 0
            && letter_count(phrase) > self.max_short_letters
            && self.max_tokens.is_none_or(|max| tokens <= max)
    }
}

pub fn filter_phrases<I, S>(phrases: I) -> Vec<PhraseRecord>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    filter_phrases_with(phrases, PhraseLimits::default())
}

pub fn filter_phrases_with<I, S>(phrases: I, limits: PhraseLimits) -> Vec<PhraseRecord>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut out = Vec::new();
    for phrase in phrases {
        let text: String = phrase.into();
        if !limits.accepts(&text) {
            continue;
        }
        out.push(PhraseRecord {
            token_count: token_count(&text),
            text,
            source_user: String::new(),
            position: out.len(),
        });
    }
    out
}

/// Split, clean and filter one bio.
pub fn extract_identifiers(bio: &str, rules: &RuleSet) -> Vec<PhraseRecord> {
    extract_with(bio, rules, PhraseLimits::default())
}

pub fn extract_with(bio: &str, rules: &RuleSet, limits: PhraseLimits) -> Vec<PhraseRecord> {
    filter_phrases_with(
        split_bio(bio, rules)
            .into_iter()
            .map(|seg| clean_phrase(seg, rules)),
        limits,
    )
}

/// [`extract_identifiers`] with `source_user` filled in.
pub fn extract_for_user(user_id: &str, bio: &str, rules: &RuleSet) -> Vec<PhraseRecord> {
    let mut phrases = extract_identifiers(bio, rules);
    for p in &mut phrases {
        p.source_user = user_id.to_string();
    }
    phrases
}
