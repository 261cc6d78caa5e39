//! Declarative extraction rules and their text file format.
//!
//! ```text
//! [flags]
//! strip_punctuation = true
//! strip_emoji = true
//!
//! [delimiters]
//! ,
//! \s-\s
//!
//! [removals]
//! i love
//!
//! [stopwords]
//! to
//!
//! [replacements]
//! &amp => \s
//! ```
//!
//! One entry per line; `#` starts a comment line. Unescaped whitespace at the
//! ends of an entry is trimmed. Escapes: `\s` space, `\t`, `\n`, `\r`, `\#`,
//! `\\`, `\u{HEX}`. A replacement line is `pattern => substitute`.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::{is_emoji, normalize_text};

pub const DEFAULT_RULES: &str = include_str!("../../rules/default.rules");

/// Editable rule lists as written in a rules file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSpec {
    pub delimiters: Vec<String>,
    pub removals: Vec<String>,
    pub stopwords: Vec<String>,
    pub replacements: Vec<(String, String)>,
    pub strip_punctuation: bool,
    pub strip_emoji: bool,
}

/// A validated [`RuleSpec`] with lookup structures precomputed.
#[derive(Debug, Clone)]
pub struct RuleSet {
    spec: RuleSpec,
    pub(super) single_delims: HashSet<char>,
    /// Longest first.
    pub(super) multi_delims: Vec<String>,
    /// Tokenized removal phrases, longest first.
    pub(super) removals: Vec<Vec<String>>,
    pub(super) stopwords: HashSet<String>,
    pub(super) replacements: Vec<(String, String)>,
}

impl RuleSet {
    pub fn compile(spec: RuleSpec) -> Result<RuleSet> {
        let bad = |message: String| Error::Rules { line: 0, message };
        if spec.delimiters.is_empty() {
            return Err(bad("at least one delimiter is required".into()));
        }
        let mut single_delims = HashSet::new();
        let mut multi_delims = Vec::new();
        for d in &spec.delimiters {
            let mut chars = d.chars();
            match (chars.next(), chars.next()) {
                (None, _) => return Err(bad("empty delimiter".into())),
                (Some(c), None) => {
                    single_delims.insert(c);
                }
                _ => multi_delims.push(d.clone()),
            }
        }
        multi_delims.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));

        let mut removals = Vec::new();
        for r in &spec.removals {
            let norm = normalize_text(r, spec.strip_punctuation);
            if norm.is_empty() {
                return Err(bad(format!(
                    "removal phrase `{r}` is empty after normalization"
                )));
            }
            let tokens: Vec<String> = norm.split(' ').map(str::to_string).collect();
            if !removals.contains(&tokens) {
                removals.push(tokens);
            }
        }
        removals.sort_by_key(|r: &Vec<String>| std::cmp::Reverse(r.len()));

        let stopwords = spec
            .stopwords
            .iter()
            .map(|w| normalize_text(w, spec.strip_punctuation))
            .filter(|w| !w.is_empty() && !w.contains(' '))
            .collect();

        let mut replacements = Vec::new();
        for (from, to) in &spec.replacements {
            let from = crate::extractor::fold_case(from);
            if from.is_empty() {
                return Err(bad("empty replacement pattern".into()));
            }
            replacements.push((from, crate::extractor::fold_case(to)));
        }

        Ok(RuleSet {
            spec,
            single_delims,
            multi_delims,
            removals,
            stopwords,
            replacements,
        })
    }

    pub fn spec(&self) -> &RuleSpec {
        &self.spec
    }

    pub fn strip_punctuation(&self) -> bool {
        self.spec.strip_punctuation
    }

    pub fn strip_emoji(&self) -> bool {
        self.spec.strip_emoji
    }

    /// Whether `c` alone splits a bio under these rules.
    pub fn is_delimiter_char(&self, c: char) -> bool {
        self.single_delims.contains(&c) || (self.spec.strip_emoji && is_emoji(c))
    }

    pub fn parse(text: &str) -> Result<RuleSet> {
        RuleSet::compile(parse_spec(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<RuleSet> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RuleSet::parse(&text)
    }

    /// Canonical rules-file text for this rule set.
    pub fn to_rules_text(&self) -> String {
        write_spec(&self.spec)
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet::parse(DEFAULT_RULES).expect("bundled default rules are valid")
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Flags,
    Delimiters,
    Removals,
    Stopwords,
    Replacements,
}

fn unescape(raw: &str, line: usize) -> Result<String> {
    let err = |message: String| Error::Rules { line, message };
    let mut out = String::new();
    let mut chars = raw.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('s') => out.push(' '),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('#') => out.push('#'),
            Some('\\') => out.push('\\'),
            Some('u') => {
                if chars.next() != Some('{') {
                    return Err(err("expected `{` after \\u".into()));
                }
                let hex: String = chars.by_ref().take_while(|&c| c != '}').collect();
                let cp = u32::from_str_radix(&hex, 16)
                    .ok()
                    .and_then(char::from_u32)
                    .ok_or_else(|| err(format!("invalid code point `{hex}`")))?;
                out.push(cp);
            }
            Some(other) => return Err(err(format!("unknown escape `\\{other}`"))),
            None => return Err(err("dangling backslash".into())),
        }
    }
    Ok(out)
}

fn escape(s: &str) -> String {
    let mut out = String::new();
    let last = s.chars().count().saturating_sub(1);
    for (i, c) in s.chars().enumerate() {
        match c {
            ' ' if i == 0 || i == last => out.push_str("\\s"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\\' => out.push_str("\\\\"),
            '#' if i == 0 => out.push_str("\\#"),
            '[' if i == 0 && s.ends_with(']') => out.push_str("\\u{5B}"),
            '=' if s[..].contains("=>") => out.push_str("\\u{3D}"),
            c if c.is_control() || (c.is_whitespace() && c != ' ') => {
                let _ = write!(out, "\\u{{{:X}}}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

pub fn parse_spec(text: &str) -> Result<RuleSpec> {
    let mut spec = RuleSpec {
        delimiters: Vec::new(),
        removals: Vec::new(),
        stopwords: Vec::new(),
        replacements: Vec::new(),
        strip_punctuation: true,
        strip_emoji: true,
    };
    let mut section = Section::None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: String| Error::Rules {
            line: line_no,
            message,
        };
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') && line.len() > 2 {
            section = match &line[1..line.len() - 1] {
                "flags" => Section::Flags,
                "delimiters" => Section::Delimiters,
                "removals" => Section::Removals,
                "stopwords" => Section::Stopwords,
                "replacements" => Section::Replacements,
                other => return Err(err(format!("unknown section `[{other}]`"))),
            };
            continue;
        }
        match section {
            Section::None => return Err(err("entry outside of a section".into())),
            Section::Flags => {
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| err("expected `key = value`".into()))?;
                let value = match value.trim() {
                    "true" => true,
                    "false" => false,
                    v => return Err(err(format!("flag value must be true/false, got `{v}`"))),
                };
                match key.trim() {
                    "strip_punctuation" => spec.strip_punctuation = value,
                    "strip_emoji" => spec.strip_emoji = value,
                    k => return Err(err(format!("unknown flag `{k}`"))),
                }
            }
            Section::Delimiters => spec.delimiters.push(unescape(line, line_no)?),
            Section::Removals => spec.removals.push(unescape(line, line_no)?),
            Section::Stopwords => spec.stopwords.push(unescape(line, line_no)?),
            Section::Replacements => {
                let (from, to) = line
                    .split_once("=>")
                    .ok_or_else(|| err("expected `pattern => substitute`".into()))?;
                spec.replacements.push((
                    unescape(from.trim(), line_no)?,
                    unescape(to.trim(), line_no)?,
                ));
            }
        }
    }
    Ok(spec)
}

pub fn write_spec(spec: &RuleSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[flags]");
    let _ = writeln!(out, "strip_punctuation = {}", spec.strip_punctuation);
    let _ = writeln!(out, "strip_emoji = {}", spec.strip_emoji);
    for (name, entries) in [
        ("delimiters", &spec.delimiters),
        ("removals", &spec.removals),
        ("stopwords", &spec.stopwords),
    ] {
        let _ = writeln!(out, "\n[{name}]");
        for e in entries {
            let _ = writeln!(out, "{}", escape(e));
        }
    }
    let _ = writeln!(out, "\n[replacements]");
    for (from, to) in &spec.replacements {
        let _ = writeln!(out, "{} => {}", escape(from), escape(to));
    }
    out
}
