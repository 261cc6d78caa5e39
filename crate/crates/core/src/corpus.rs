//! Profile-record ingestion and account-level filtering.
//!
//! Records arrive one per line, either as JSON objects or as tab-separated
//! rows with a declared column list. Every record passes through three
//! filters in a fixed order: blank bio, organizational language, then
//! last-status language. [`FilterReport`] tallies each stage.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::ops::{Add, AddAssign};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sex {
    Male,
    Female,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Democrat,
    Republican,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Race {
    White,
    Black,
    Hispanic,
    Asian,
    Other,
}

macro_rules! category_names {
    ($ty:ty { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub const ALL: &'static [$ty] = &[$(<$ty>::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $(<$ty>::$variant => $name),+ }
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($name => Ok(<$ty>::$variant),)+
                    other => Err(format!("unknown {} value `{}`", stringify!($ty).to_lowercase(), other)),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

category_names!(Sex { Male => "male", Female => "female" });
category_names!(Party { Democrat => "democrat", Republican => "republican", Other => "other" });
category_names!(Race { White => "white", Black => "black", Hispanic => "hispanic", Asian => "asian", Other => "other" });

/// One profile row. `None` marks a missing value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct UserRecord {
    pub user_id: String,
    pub bio: String,
    pub last_status_lang: Option<String>,
    pub verified: Option<bool>,
    pub followers: Option<u64>,
    pub friends: Option<u64>,
    pub statuses: Option<u64>,
    pub sex: Option<Sex>,
    pub party: Option<Party>,
    pub race: Option<Race>,
    pub age: Option<f64>,
    pub pct_rural: Option<f64>,
}

impl UserRecord {
    pub fn new(user_id: impl Into<String>, bio: impl Into<String>) -> Self {
        UserRecord {
            user_id: user_id.into(),
            bio: bio.into(),
            ..Default::default()
        }
    }

    /// `ln((friends + 1) / (followers + 1))`, when both counts are present.
    pub fn friend_follower_ratio(&self) -> Option<f64> {
        match (self.friends, self.followers) {
            (Some(fr), Some(fo)) => Some(crate::stats::friend_follower_ratio::<f64>(fr, fo)),
            _ => None,
        }
    }
}

/// Field names accepted in input records.
pub const FIELDS: &[&str] = &[
    "user_id",
    "bio",
    "last_status_lang",
    "verified",
    "followers",
    "friends",
    "statuses",
    "sex",
    "party",
    "race",
    "age",
    "pct_rural",
];

/// Cell values of `record` in [`FIELDS`] order, unescaped; missing values
/// are empty strings. Pair with [`crate::tsv::write_row`] to produce a file
/// that `Schema::Tsv` reads back unchanged.
pub fn record_cells(record: &UserRecord) -> Vec<String> {
    fn opt<T: ToString>(v: &Option<T>) -> String {
        v.as_ref().map_or(String::new(), T::to_string)
    }
    vec![
        record.user_id.clone(),
        record.bio.clone(),
        opt(&record.last_status_lang),
        opt(&record.verified),
        opt(&record.followers),
        opt(&record.friends),
        opt(&record.statuses),
        opt(&record.sex),
        opt(&record.party),
        opt(&record.race),
        opt(&record.age),
        opt(&record.pct_rural),
    ]
}

/// Layout of one input line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Schema {
    /// One JSON object per line, keyed by field name. Unknown keys are ignored.
    JsonLines,
    /// Tab-separated values in the given column order. Unknown column names are
    /// ignored; an empty cell is a missing value. `\t`, `\n`, `\r` and `\\`
    /// escapes are decoded inside cells.
    Tsv { columns: Vec<String> },
    /// One bio per line, no attributes; the user id is `line<N>` for 1-based
    /// line number `N`.
    Text,
}

impl Schema {
    pub fn tsv<S: AsRef<str>>(columns: &[S]) -> Self {
        Schema::Tsv {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
        }
    }
}

fn record_err(line: usize, message: impl Into<String>) -> Error {
    Error::Record {
        line,
        message: message.into(),
    }
}

/// Field-by-field builder shared by both input layouts.
#[derive(Default)]
struct RecordBuilder {
    rec: UserRecord,
    has_id: bool,
    has_bio: bool,
}

enum RawValue<'a> {
    Missing,
    Text(&'a str),
    Number(f64),
    Bool(bool),
}

impl RecordBuilder {
    fn set(&mut self, field: &str, value: RawValue<'_>) -> std::result::Result<(), String> {
        let r = &mut self.rec;
        match field {
            "user_id" => match value {
                RawValue::Text(s) if !s.is_empty() => {
                    r.user_id = s.to_string();
                    self.has_id = true;
                }
                RawValue::Number(n) if n.fract() == 0.0 => {
                    r.user_id = format!("{n:.0}");
                    self.has_id = true;
                }
                _ => return Err("user_id must be a non-empty string".into()),
            },
            "bio" => {
                r.bio = match value {
                    RawValue::Missing => String::new(),
                    RawValue::Text(s) => s.to_string(),
                    _ => return Err("bio must be text".into()),
                };
                self.has_bio = true;
            }
            "last_status_lang" => r.last_status_lang = text(value, field)?.map(str::to_string),
            "verified" => {
                r.verified = match value {
                    RawValue::Missing => None,
                    RawValue::Bool(b) => Some(b),
                    RawValue::Text(s) => Some(parse_bool(s)?),
                    RawValue::Number(n) if n == 0.0 || n == 1.0 => Some(n == 1.0),
                    RawValue::Number(_) => return Err("verified must be a boolean".into()),
                }
            }
            "followers" => r.followers = count(value, field)?,
            "friends" => r.friends = count(value, field)?,
            "statuses" => r.statuses = count(value, field)?,
            "sex" => r.sex = category(value, field)?,
            "party" => r.party = category(value, field)?,
            "race" => r.race = category(value, field)?,
            "age" => {
                r.age = real(value, field)?;
                if matches!(r.age, Some(a) if a < 0.0) {
                    return Err("age must be non-negative".into());
                }
            }
            "pct_rural" => {
                r.pct_rural = real(value, field)?;
                if matches!(r.pct_rural, Some(p) if !(0.0..=1.0).contains(&p)) {
                    return Err("pct_rural must lie in [0, 1]".into());
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn finish(self) -> std::result::Result<UserRecord, String> {
        if !self.has_id {
            return Err("missing user_id".into());
        }
        if !self.has_bio {
            return Err("missing bio".into());
        }
        Ok(self.rec)
    }
}

fn is_missing_text(s: &str) -> bool {
    s.is_empty() || s.eq_ignore_ascii_case("missing") || s.eq_ignore_ascii_case("na")
}

fn text<'a>(value: RawValue<'a>, field: &str) -> std::result::Result<Option<&'a str>, String> {
    match value {
        RawValue::Missing => Ok(None),
        RawValue::Text("") => Ok(None),
        RawValue::Text(s) => Ok(Some(s)),
        _ => Err(format!("{field} must be text")),
    }
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(format!("invalid boolean `{other}`")),
    }
}

fn real(value: RawValue<'_>, field: &str) -> std::result::Result<Option<f64>, String> {
    let x = match value {
        RawValue::Missing => return Ok(None),
        RawValue::Number(n) => n,
        RawValue::Text(s) if is_missing_text(s) => return Ok(None),
        RawValue::Text(s) => s
            .trim()
            .parse::<f64>()
            .map_err(|_| format!("{field}: invalid number `{s}`"))?,
        RawValue::Bool(_) => return Err(format!("{field} must be numeric")),
    };
    if !x.is_finite() {
        return Err(format!("{field} must be finite"));
    }
    Ok(Some(x))
}

fn count(value: RawValue<'_>, field: &str) -> std::result::Result<Option<u64>, String> {
    match real(value, field)? {
        None => Ok(None),
        Some(x) if x < 0.0 => Err(format!("{field}: negative count {x}")),
        Some(x) if x.fract() != 0.0 => Err(format!("{field}: non-integer count {x}")),
        Some(x) => Ok(Some(x as u64)),
    }
}

fn category<T: FromStr<Err = String>>(
    value: RawValue<'_>,
    field: &str,
) -> std::result::Result<Option<T>, String> {
    match value {
        RawValue::Missing => Ok(None),
        RawValue::Text(s) if is_missing_text(s.trim()) => Ok(None),
        RawValue::Text(s) => s.parse().map(Some),
        _ => Err(format!("{field} must be a category name")),
    }
}

fn unescape_cell(cell: &str) -> String {
    if !cell.contains('\\') {
        return cell.to_string();
    }
    let mut out = String::with_capacity(cell.len());
    let mut chars = cell.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('\\') => out.push('\\'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

/// Parses one input line. `line_no` is 1-based and only used in errors.
pub fn parse_user_record(line: &str, line_no: usize, schema: &Schema) -> Result<UserRecord> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    let mut builder = RecordBuilder::default();
    match schema {
        Schema::JsonLines => {
            let value: Value =
                serde_json::from_str(line).map_err(|e| record_err(line_no, e.to_string()))?;
            let Value::Object(map) = value else {
                return Err(record_err(line_no, "record is not a JSON object"));
            };
            for (key, v) in &map {
                if !FIELDS.contains(&key.as_str()) {
                    continue;
                }
                let raw = match v {
                    Value::Null => RawValue::Missing,
                    Value::String(s) => RawValue::Text(s),
                    Value::Number(n) => RawValue::Number(n.as_f64().unwrap_or(f64::NAN)),
                    Value::Bool(b) => RawValue::Bool(*b),
                    _ => return Err(record_err(line_no, format!("{key}: unsupported value"))),
                };
                builder.set(key, raw).map_err(|m| record_err(line_no, m))?;
            }
        }
        Schema::Tsv { columns } => {
            let cells: Vec<&str> = line.split('\t').collect();
            if cells.len() != columns.len() {
                return Err(record_err(
                    line_no,
                    format!("expected {} columns, found {}", columns.len(), cells.len()),
                ));
            }
            for (col, cell) in columns.iter().zip(cells) {
                let cell = unescape_cell(cell);
                let raw = if cell.is_empty() {
                    RawValue::Missing
                } else {
                    RawValue::Text(&cell)
                };
                builder.set(col, raw).map_err(|m| record_err(line_no, m))?;
            }
        }
        Schema::Text => {
            return Ok(UserRecord::new(
                format!("line{line_no}"),
                unescape_cell(line),
            ));
        }
    }
    builder.finish().map_err(|m| record_err(line_no, m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    BlankBio,
    OrgLanguage,
    Language,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Keep,
    Drop(DropReason),
}

/// Substrings that mark an organizational account.
pub const ORG_MARKERS: &[&str] = &["we are", "not affiliated"];

/// Last-status languages kept by the language filter. Missing and `und`
/// are always kept. `None` keeps every language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllowedLanguages(Option<BTreeSet<String>>);

impl AllowedLanguages {
    pub fn new<I, S>(codes: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        AllowedLanguages(Some(
            codes
                .into_iter()
                .map(|c| primary_subtag(c.as_ref()))
                .filter(|c| !c.is_empty())
                .collect(),
        ))
    }

    pub fn any() -> Self {
        AllowedLanguages(None)
    }

    pub fn allows(&self, lang: Option<&str>) -> bool {
        match lang.map(primary_subtag) {
            None => true,
            Some(code) if code.is_empty() || code == "und" => true,
            Some(code) => self.0.as_ref().is_none_or(|set| set.contains(&code)),
        }
    }

    pub fn codes(&self) -> impl Iterator<Item = &str> {
        self.0.iter().flatten().map(String::as_str)
    }
}

impl Default for AllowedLanguages {
    fn default() -> Self {
        AllowedLanguages::new(["en", "es"])
    }
}

/// `en-GB` and `EN` both reduce to `en`.
fn primary_subtag(code: &str) -> String {
    code.trim()
        .split(['-', '_'])
        .next()
        .unwrap_or("")
        .to_ascii_lowercase()
}

/// Applies the blank → organizational → language filters, in that order.
pub fn filter_account(record: &UserRecord, allowed: &AllowedLanguages) -> Verdict {
    if record.bio.trim().is_empty() {
        return Verdict::Drop(DropReason::BlankBio);
    }
    let lower = record.bio.to_lowercase();
    if ORG_MARKERS.iter().any(|m| lower.contains(m)) {
        return Verdict::Drop(DropReason::OrgLanguage);
    }
    if !allowed.allows(record.last_status_lang.as_deref()) {
        return Verdict::Drop(DropReason::Language);
    }
    Verdict::Keep
}

/// Per-stage filter counts. Partial reports merge with `+`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    pub n_input: u64,
    pub n_blank_bio: u64,
    pub n_org_language: u64,
    pub n_language_rejected: u64,
    pub n_retained: u64,
    /// Lines that failed to parse; not part of `n_input`.
    pub n_parse_errors: u64,
}

impl FilterReport {
    pub fn record(&mut self, verdict: Verdict) {
        self.n_input += 1;
        match verdict {
            Verdict::Keep => self.n_retained += 1,
            Verdict::Drop(DropReason::BlankBio) => self.n_blank_bio += 1,
            Verdict::Drop(DropReason::OrgLanguage) => self.n_org_language += 1,
            Verdict::Drop(DropReason::Language) => self.n_language_rejected += 1,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.n_retained + self.n_blank_bio + self.n_org_language + self.n_language_rejected
            == self.n_input
    }
}

impl AddAssign for FilterReport {
    fn add_assign(&mut self, rhs: Self) {
        self.n_input += rhs.n_input;
        self.n_blank_bio += rhs.n_blank_bio;
        self.n_org_language += rhs.n_org_language;
        self.n_language_rejected += rhs.n_language_rejected;
        self.n_retained += rhs.n_retained;
        self.n_parse_errors += rhs.n_parse_errors;
    }
}

impl Add for FilterReport {
    type Output = FilterReport;

    fn add(mut self, rhs: Self) -> FilterReport {
        self += rhs;
        self
    }
}

const MAX_KEPT_ERRORS: usize = 100;

/// Streaming reader over a record file that yields retained records in input order.
///
/// The [`FilterReport`] is complete once the iterator is exhausted.
pub struct CorpusReader<R> {
    lines: std::io::Lines<R>,
    line_no: usize,
    schema: Schema,
    allowed: AllowedLanguages,
    report: FilterReport,
    seen: HashSet<String>,
    errors: Vec<Error>,
    fatal: Option<Error>,
}

impl<R: BufRead> CorpusReader<R> {
    /// For `Schema::Tsv` with an empty column list, the first line is read as the header.
    pub fn new(reader: R, schema: Schema, allowed: AllowedLanguages) -> Self {
        CorpusReader {
            lines: reader.lines(),
            line_no: 0,
            schema,
            allowed,
            report: FilterReport::default(),
            seen: HashSet::new(),
            errors: Vec::new(),
            fatal: None,
        }
    }

    pub fn report(&self) -> FilterReport {
        self.report
    }

    /// The first few record-level errors (all are counted in the report).
    pub fn errors(&self) -> &[Error] {
        &self.errors
    }

    /// An I/O error that ended the stream early, if any.
    pub fn take_fatal(&mut self) -> Option<Error> {
        self.fatal.take()
    }

    fn note_error(&mut self, err: Error) {
        self.report.n_parse_errors += 1;
        if self.errors.len() < MAX_KEPT_ERRORS {
            self.errors.push(err);
        }
    }
}

impl<R: BufRead> Iterator for CorpusReader<R> {
    type Item = UserRecord;

    fn next(&mut self) -> Option<UserRecord> {
        loop {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => {
                    self.fatal = Some(Error::InvalidInput(format!(
                        "read failed after line {}: {e}",
                        self.line_no
                    )));
                    return None;
                }
            };
            self.line_no += 1;
            if let Schema::Tsv { columns } = &mut self.schema {
                if columns.is_empty() {
                    *columns = line
                        .trim_end_matches('\r')
                        .split('\t')
                        .map(str::to_string)
                        .collect();
                    continue;
                }
            }
            if line.trim().is_empty() && self.schema != Schema::Text {
                continue;
            }
            let record = match parse_user_record(&line, self.line_no, &self.schema) {
                Ok(r) => r,
                Err(e) => {
                    self.note_error(e);
                    continue;
                }
            };
            if !self.seen.insert(record.user_id.clone()) {
                let msg = format!("duplicate user_id `{}`", record.user_id);
                self.note_error(record_err(self.line_no, msg));
                continue;
            }
            let verdict = filter_account(&record, &self.allowed);
            self.report.record(verdict);
            if verdict == Verdict::Keep {
                return Some(record);
            }
        }
    }
}

/// Opens a record file for streaming.
pub fn open_corpus(
    path: impl AsRef<Path>,
    schema: Schema,
    allowed: AllowedLanguages,
) -> Result<CorpusReader<BufReader<File>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(CorpusReader::new(BufReader::new(file), schema, allowed))
}

/// Reads a whole record file, returning the retained records and the filter tally.
pub fn load_corpus(
    path: impl AsRef<Path>,
    schema: Schema,
    allowed: AllowedLanguages,
) -> Result<(Vec<UserRecord>, FilterReport)> {
    let mut reader = open_corpus(path, schema, allowed)?;
    let records: Vec<UserRecord> = reader.by_ref().collect();
    if let Some(e) = reader.take_fatal() {
        return Err(e);
    }
    Ok((records, reader.report()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn json(line: &str) -> Result<UserRecord> {
        parse_user_record(line, 1, &Schema::JsonLines)
    }

    #[test]
    fn cells_round_trip() {
        let mut rec = UserRecord::new("u9", "tab\there. new\nline");
        rec.verified = Some(false);
        rec.sex = Some(Sex::Female);
        rec.age = Some(41.5);
        rec.followers = Some(12);
        let mut buf = Vec::new();
        crate::tsv::write_row(&mut buf, &record_cells(&rec)).unwrap();
        let line = String::from_utf8(buf).unwrap();
        let back = parse_user_record(line.trim_end_matches('\n'), 1, &Schema::tsv(FIELDS)).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn any_language() {
        let mut r = UserRecord::new("u", "mom");
        r.last_status_lang = Some("fr".into());
        assert_eq!(filter_account(&r, &AllowedLanguages::any()), Verdict::Keep);
        assert_eq!(
            filter_account(&r, &AllowedLanguages::default()),
            Verdict::Drop(DropReason::Language)
        );
    }

    #[test]
    fn text_lines() {
        let input = "wife. mom.\n\nWe are a bakery\n";
        let mut reader =
            CorpusReader::new(input.as_bytes(), Schema::Text, AllowedLanguages::default());
        let kept: Vec<UserRecord> = reader.by_ref().collect();
        assert_eq!(kept, vec![UserRecord::new("line1", "wife. mom.")]);
        let rep = reader.report();
        assert_eq!(
            (rep.n_input, rep.n_blank_bio, rep.n_org_language),
            (3, 1, 1)
        );
    }

    #[test]
    fn minimal_record() {
        let r = json(r#"{"user_id":"u1","bio":"wife. mom."}"#).unwrap();
        assert_eq!(r, UserRecord::new("u1", "wife. mom."));
    }

    #[test]
    fn negative_count_rejected() {
        let err = json(r#"{"user_id":"u2","bio":"x","followers":-3}"#).unwrap_err();
        assert!(matches!(err, Error::Record { line: 1, .. }));
        assert!(err.to_string().contains("negative"));
    }

    #[test]
    fn categorical_and_numeric_fields() {
        let r =
            json(r#"{"user_id":"u3","bio":"runner","sex":"female","age":34,"extra":[1]}"#).unwrap();
        assert_eq!(r.sex, Some(Sex::Female));
        assert_eq!(r.age, Some(34.0));
        assert_eq!(r.party, None);
    }

    #[test]
    fn out_of_range_fraction_rejected() {
        assert!(json(r#"{"user_id":"a","bio":"x","pct_rural":1.5}"#).is_err());
        assert!(json(r#"{"user_id":"a","bio":"x","sex":"robot"}"#).is_err());
        assert!(json(r#"{"bio":"x"}"#).is_err());
        assert!(json("not json").is_err());
    }

    #[test]
    fn tsv_record() {
        let schema = Schema::tsv(&["user_id", "bio", "friends", "followers", "race", "ignored"]);
        let r = parse_user_record("u9\tdad\\tcoach\t219\t115\tBlack\tzzz", 4, &schema).unwrap();
        assert_eq!(r.bio, "dad\tcoach");
        assert_eq!(r.friends, Some(219));
        assert_eq!(r.race, Some(Race::Black));
        let err = parse_user_record("u9\tdad", 4, &schema).unwrap_err();
        assert!(matches!(err, Error::Record { line: 4, .. }));
    }

    #[test]
    fn filter_examples() {
        let langs = AllowedLanguages::default();
        let mut r = UserRecord::new("a", "");
        assert_eq!(
            filter_account(&r, &langs),
            Verdict::Drop(DropReason::BlankBio)
        );
        r.bio = "  \n ".into();
        assert_eq!(
            filter_account(&r, &langs),
            Verdict::Drop(DropReason::BlankBio)
        );

        r.bio = "We are a family bakery".into();
        r.last_status_lang = Some("en".into());
        assert_eq!(
            filter_account(&r, &langs),
            Verdict::Drop(DropReason::OrgLanguage)
        );
        r.bio = "Views NOT AFFILIATED with employer".into();
        assert_eq!(
            filter_account(&r, &langs),
            Verdict::Drop(DropReason::OrgLanguage)
        );

        r.bio = "runner".into();
        r.last_status_lang = Some("fr".into());
        assert_eq!(
            filter_account(&r, &langs),
            Verdict::Drop(DropReason::Language)
        );
        r.last_status_lang = None;
        assert_eq!(filter_account(&r, &langs), Verdict::Keep);
        r.last_status_lang = Some("und".into());
        assert_eq!(filter_account(&r, &langs), Verdict::Keep);
        r.last_status_lang = Some("es".into());
        assert_eq!(filter_account(&r, &langs), Verdict::Keep);
        r.last_status_lang = Some("en-GB".into());
        assert_eq!(filter_account(&r, &langs), Verdict::Keep);
    }

    #[test]
    fn org_filter_precedes_language_filter() {
        let mut r = UserRecord::new("a", "we are here");
        r.last_status_lang = Some("fr".into());
        assert_eq!(
            filter_account(&r, &AllowedLanguages::default()),
            Verdict::Drop(DropReason::OrgLanguage)
        );
    }

    fn read(text: &str) -> (Vec<UserRecord>, FilterReport) {
        let mut reader = CorpusReader::new(
            text.as_bytes(),
            Schema::JsonLines,
            AllowedLanguages::default(),
        );
        let recs: Vec<_> = reader.by_ref().collect();
        (recs, reader.report())
    }

    #[test]
    fn four_record_corpus() {
        let text = r#"{"user_id":"1","bio":""}
{"user_id":"2","bio":"Not affiliated with anyone"}
{"user_id":"3","bio":"wife, mom"}
{"user_id":"4","bio":"runner"}
"#;
        let (recs, report) = read(text);
        assert_eq!(recs.len(), 2);
        assert_eq!(
            (
                report.n_input,
                report.n_blank_bio,
                report.n_org_language,
                report.n_language_rejected,
                report.n_retained
            ),
            (4, 1, 1, 0, 2)
        );
        assert!(report.is_consistent());
    }

    #[test]
    fn empty_and_all_blank() {
        let (recs, report) = read("");
        assert!(recs.is_empty());
        assert_eq!(report, FilterReport::default());

        let (recs, report) =
            read("{\"user_id\":\"1\",\"bio\":\"\"}\n{\"user_id\":\"2\",\"bio\":null}\n");
        assert!(recs.is_empty());
        assert_eq!(report.n_blank_bio, report.n_input);
        assert_eq!(report.n_retained, 0);
    }

    #[test]
    fn parse_errors_and_duplicates_are_counted_not_fatal() {
        let text = "{\"user_id\":\"1\",\"bio\":\"a\"}\nbroken\n{\"user_id\":\"1\",\"bio\":\"b\"}\n";
        let mut reader = CorpusReader::new(
            text.as_bytes(),
            Schema::JsonLines,
            AllowedLanguages::default(),
        );
        let recs: Vec<_> = reader.by_ref().collect();
        assert_eq!(recs.len(), 1);
        assert_eq!(reader.report().n_parse_errors, 2);
        assert_eq!(reader.report().n_input, 1);
        assert!(matches!(reader.errors()[0], Error::Record { line: 2, .. }));
    }

    #[test]
    fn tsv_header_from_first_line() {
        let text = "user_id\tbio\tlast_status_lang\nu1\tcoach\tfr\nu2\tcoach\t\n";
        let mut reader = CorpusReader::new(
            text.as_bytes(),
            Schema::Tsv { columns: vec![] },
            AllowedLanguages::default(),
        );
        let recs: Vec<_> = reader.by_ref().collect();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].user_id, "u2");
        assert_eq!(reader.report().n_language_rejected, 1);
    }

    #[test]
    fn report_merge_matches_sequential_tally() {
        let verdicts = [
            Verdict::Keep,
            Verdict::Drop(DropReason::BlankBio),
            Verdict::Drop(DropReason::Language),
            Verdict::Keep,
            Verdict::Drop(DropReason::OrgLanguage),
        ];
        let mut whole = FilterReport::default();
        verdicts.iter().for_each(|v| whole.record(*v));
        let (mut left, mut right) = (FilterReport::default(), FilterReport::default());
        verdicts[..2].iter().for_each(|v| left.record(*v));
        verdicts[2..].iter().for_each(|v| right.record(*v));
        assert_eq!(left + right, whole);
        assert_eq!(right + left, whole);
    }
}
