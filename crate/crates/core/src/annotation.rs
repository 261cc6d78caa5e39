//! Annotation samples (stratified and bio-count weighted) and merging of the
//! returned labels into reliability and per-bucket estimates.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::index::{IdentifierIndex, IdentifierStats};
use crate::scalar::Scalar;
use crate::stats::{
    agresti_coull_interval, krippendorff_alpha, BinomialEstimate, ReliabilityTable,
};
use crate::tsv;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum TokenBucket {
    One,
    Two,
    Three,
    FourPlus,
}

impl TokenBucket {
    pub const ALL: [TokenBucket; 4] = [Self::One, Self::Two, Self::Three, Self::FourPlus];

    pub fn of(tokens: usize) -> Self {
        match tokens {
            0 | 1 => Self::One,
            2 => Self::Two,
            3 => Self::Three,
            _ => Self::FourPlus,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::One => "1",
            Self::Two => "2",
            Self::Three => "3",
            Self::FourPlus => "4+",
        }
    }
}

/// Bio-count buckets: 1, 2, [3,5), [5,10), [10,25), [25,100), 100 and up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BioBucket {
    One,
    Two,
    ThreeToFive,
    FiveToTen,
    TenTo25,
    From25To100,
    HundredPlus,
}

impl BioBucket {
    pub const ALL: [BioBucket; 7] = [
        Self::One,
        Self::Two,
        Self::ThreeToFive,
        Self::FiveToTen,
        Self::TenTo25,
        Self::From25To100,
        Self::HundredPlus,
    ];

    pub fn of(bio_count: u64) -> Option<Self> {
        Some(match bio_count {
            0 => return None,
            1 => Self::One,
            2 => Self::Two,
            3..=4 => Self::ThreeToFive,
            5..=9 => Self::FiveToTen,
            10..=24 => Self::TenTo25,
            25..=99 => Self::From25To100,
            _ => Self::HundredPlus,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::One => "1",
            Self::Two => "2",
            Self::ThreeToFive => "3-5",
            Self::FiveToTen => "5-10",
            Self::TenTo25 => "10-25",
            Self::From25To100 => "25-100",
            Self::HundredPlus => "100+",
        }
    }
}

macro_rules! parse_by_name {
    ($ty:ident) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                $ty::ALL
                    .into_iter()
                    .find(|b| b.as_str() == s)
                    .ok_or_else(|| {
                        Error::InvalidInput(format!("unknown {} `{s}`", stringify!($ty)))
                    })
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

parse_by_name!(TokenBucket);
parse_by_name!(BioBucket);
parse_by_name!(Label);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Label {
    Yes,
    No,
    /// Yes, but possibly more than one identifier.
    YesMulti,
    Unclear,
}

impl Label {
    pub const ALL: [Label; 4] = [Self::Yes, Self::No, Self::YesMulti, Self::Unclear];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Yes => "yes",
            Self::No => "no",
            Self::YesMulti => "yes_multi",
            Self::Unclear => "unclear",
        }
    }

    /// The label used for reliability and proportions.
    pub fn collapsed(self) -> Label {
        match self {
            Self::YesMulti => Self::Yes,
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnnotationItem {
    pub item_id: String,
    pub phrase: String,
    pub token_bucket: TokenBucket,
    pub bio_bucket: BioBucket,
    pub bio_count: u64,
}

fn item_of(s: &IdentifierStats) -> Option<(String, TokenBucket, BioBucket, u64)> {
    let bio = BioBucket::of(s.bio_count)?;
    Some((
        s.phrase.clone(),
        TokenBucket::of(s.token_count),
        bio,
        s.bio_count,
    ))
}

/// Shuffles with the seed and numbers the items, so the annotator-facing
/// order does not reveal buckets.
fn number_items(
    mut raw: Vec<(String, TokenBucket, BioBucket, u64)>,
    rng: &mut ChaCha8Rng,
) -> Vec<AnnotationItem> {
    raw.shuffle(rng);
    let width = raw.len().to_string().len().max(4);
    raw.into_iter()
        .enumerate()
        .map(
            |(i, (phrase, token_bucket, bio_bucket, bio_count))| AnnotationItem {
                item_id: format!("item{:0width$}", i + 1),
                phrase,
                token_bucket,
                bio_bucket,
                bio_count,
            },
        )
        .collect()
}

/// Up to `per_cell` phrases from each of the 4 × 7 token/bio-count cells,
/// uniformly without replacement. The 1–3 token cells come from `index`;
/// the 4+ cells from `long_index` when given (phrases extracted without the
/// token limit), otherwise from `index`.
pub fn stratified_sample(
    index: &IdentifierIndex,
    long_index: Option<&IdentifierIndex>,
    per_cell: usize,
    seed: u64,
) -> Result<Vec<AnnotationItem>> {
    if per_cell == 0 {
        return Err(Error::InvalidInput("per_cell must be at least 1".into()));
    }
    if index.is_empty() && long_index.is_none_or(IdentifierIndex::is_empty) {
        return Err(Error::InvalidInput(
            "cannot sample from an empty index".into(),
        ));
    }
    let mut cells: BTreeMap<(TokenBucket, BioBucket), Vec<&IdentifierStats>> = BTreeMap::new();
    for t in TokenBucket::ALL {
        for b in BioBucket::ALL {
            cells.insert((t, b), Vec::new());
        }
    }
    let long_source = long_index.unwrap_or(index);
    for s in index.stats().iter().filter(|s| s.token_count <= 3) {
        if let Some(b) = BioBucket::of(s.bio_count) {
            cells
                .get_mut(&(TokenBucket::of(s.token_count), b))
                .expect("cell")
                .push(s);
        }
    }
    for s in long_source.stats().iter().filter(|s| s.token_count >= 4) {
        if let Some(b) = BioBucket::of(s.bio_count) {
            cells
                .get_mut(&(TokenBucket::FourPlus, b))
                .expect("cell")
                .push(s);
        }
    }
    let mut raw = Vec::new();
    for (cell_no, ((t, b), members)) in cells.iter().enumerate() {
        if members.len() < per_cell {
            log::warn!(
                "cell tokens={t} bios={b} has {} phrases, fewer than {per_cell}",
                members.len()
            );
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(cell_no as u64 + 1);
        raw.extend(
            members
                .choose_multiple(&mut rng, per_cell)
                .filter_map(|s| item_of(s)),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(number_items(raw, &mut rng))
}

/// `n` distinct phrases drawn without replacement, each draw with
/// probability proportional to bio count.
pub fn probabilistic_sample(
    index: &IdentifierIndex,
    n: usize,
    seed: u64,
) -> Result<Vec<AnnotationItem>> {
    if n > index.len() {
        return Err(Error::InvalidInput(format!(
            "cannot draw {n} phrases from an index of {}",
            index.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen: Vec<&IdentifierStats> = index
        .stats()
        .choose_multiple_weighted(&mut rng, n, |s| s.bio_count as f64)
        .map_err(|e| Error::InvalidInput(format!("weighted sampling failed: {e}")))?
        .collect();
    let raw = chosen.into_iter().filter_map(item_of).collect();
    Ok(number_items(raw, &mut rng))
}

/// Writes the annotator-facing file (`item_id`, `phrase`) and the key file
/// that also carries buckets and bio counts.
pub fn write_sample<W1: Write, W2: Write>(
    items: &[AnnotationItem],
    blind: &mut W1,
    key: &mut W2,
) -> std::io::Result<()> {
    tsv::write_row(blind, &["item_id", "phrase"])?;
    tsv::write_row(
        key,
        &[
            "item_id",
            "phrase",
            "token_bucket",
            "bio_bucket",
            "bio_count",
        ],
    )?;
    for it in items {
        tsv::write_row(blind, &[it.item_id.as_str(), &it.phrase])?;
        tsv::write_row(
            key,
            &[
                it.item_id.as_str(),
                &it.phrase,
                it.token_bucket.as_str(),
                it.bio_bucket.as_str(),
                &it.bio_count.to_string(),
            ],
        )?;
    }
    Ok(())
}

pub fn read_sample_key<R: BufRead>(reader: R) -> Result<Vec<AnnotationItem>> {
    let table = tsv::read_table(reader)?;
    let col = |name| table.column(name);
    let (id, phrase, tb, bb, bc) = (
        col("item_id")?,
        col("phrase")?,
        col("token_bucket")?,
        col("bio_bucket")?,
        col("bio_count")?,
    );
    table
        .rows
        .iter()
        .map(|(line, cells)| {
            let bad = |e: Error| Error::Record {
                line: *line,
                message: e.to_string(),
            };
            Ok(AnnotationItem {
                item_id: cells[id].clone(),
                phrase: cells[phrase].clone(),
                token_bucket: cells[tb].parse().map_err(bad)?,
                bio_bucket: cells[bb].parse().map_err(bad)?,
                bio_count: tsv::parse_cell(&cells[bc], *line, "bio_count")?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelRecord {
    pub item_id: String,
    pub annotator: String,
    pub label: Label,
}

/// Reads `item_id`, `annotator_id`, `label` rows. Empty and `missing`
/// labels are skipped.
pub fn read_labels<R: BufRead>(reader: R) -> Result<Vec<LabelRecord>> {
    let table = tsv::read_table(reader)?;
    let col = |name| table.column(name);
    let (id, ann, lab) = (col("item_id")?, col("annotator_id")?, col("label")?);
    let mut out = Vec::new();
    for (line, cells) in &table.rows {
        let raw = cells[lab].trim().to_ascii_lowercase();
        if raw.is_empty() || raw == "missing" {
            continue;
        }
        let label = raw.parse().map_err(|e: Error| Error::Record {
            line: *line,
            message: e.to_string(),
        })?;
        out.push(LabelRecord {
            item_id: cells[id].clone(),
            annotator: cells[ann].clone(),
            label,
        });
    }
    Ok(out)
}

/// Majority collapsed label; a tie for first place is `Unclear`.
pub fn majority(labels: &[Label]) -> Option<Label> {
    let mut counts: Vec<(Label, usize)> = Vec::new();
    for l in labels.iter().map(|l| l.collapsed()) {
        match counts.iter_mut().find(|(k, _)| *k == l) {
            Some((_, n)) => *n += 1,
            None => counts.push((l, 1)),
        }
    }
    let top = counts.iter().map(|c| c.1).max()?;
    let mut leaders = counts.iter().filter(|c| c.1 == top);
    let first = leaders.next()?.0;
    Some(if leaders.next().is_some() {
        Label::Unclear
    } else {
        first
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketProportions<T> {
    /// `token` or `bio`.
    pub dimension: &'static str,
    pub bucket: String,
    pub n_items: u64,
    pub yes: BinomialEstimate<T>,
    pub no: BinomialEstimate<T>,
    pub unclear: BinomialEstimate<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergeReport<T> {
    #[serde(skip)]
    pub table: ReliabilityTable,
    pub annotators: Vec<String>,
    /// `None` when no item has two labels.
    pub alpha_all: Option<T>,
    pub alpha_excluding_unclear: Option<T>,
    pub n_pairable_all: usize,
    pub n_pairable_excluding_unclear: usize,
    pub n_labelled: usize,
    pub buckets: Vec<BucketProportions<T>>,
}

fn alpha_or_none<T: Scalar>(table: &ReliabilityTable) -> Result<Option<T>> {
    match krippendorff_alpha(table) {
        Ok(a) => Ok(Some(a)),
        Err(Error::NoPairableValues) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Builds the reliability table (yes_multi counted as yes), alpha with and
/// without items anyone marked unclear, and per-bucket proportions of
/// majority labels with Agresti–Coull intervals.
pub fn merge_annotations<T: Scalar>(
    items: &[AnnotationItem],
    labels: &[LabelRecord],
    confidence: T,
) -> Result<MergeReport<T>> {
    let by_id: HashMap<&str, &AnnotationItem> =
        items.iter().map(|i| (i.item_id.as_str(), i)).collect();
    if let Some(bad) = labels
        .iter()
        .find(|l| !by_id.contains_key(l.item_id.as_str()))
    {
        return Err(Error::UnknownItem(bad.item_id.clone()));
    }
    let table = ReliabilityTable::from_triples(labels.iter().map(|l| {
        (
            l.item_id.as_str(),
            l.annotator.as_str(),
            l.label.collapsed().as_str(),
        )
    }))?;
    let unclear = table
        .categories
        .iter()
        .position(|c| c == Label::Unclear.as_str());
    let clear = table.filter_units(|u| unclear.is_none_or(|k| !u.labels.contains(&Some(k))));

    let mut per_item: HashMap<&str, Vec<Label>> = HashMap::new();
    for l in labels {
        per_item
            .entry(l.item_id.as_str())
            .or_default()
            .push(l.label);
    }
    let mut token_tally: BTreeMap<TokenBucket, [u64; 4]> = BTreeMap::new();
    let mut bio_tally: BTreeMap<BioBucket, [u64; 4]> = BTreeMap::new();
    for item in items {
        let Some(m) = per_item
            .get(item.item_id.as_str())
            .and_then(|ls| majority(ls))
        else {
            continue;
        };
        let slot = match m {
            Label::Yes | Label::YesMulti => 0,
            Label::No => 1,
            Label::Unclear => 2,
        };
        for tally in [
            token_tally.entry(item.token_bucket).or_default(),
            bio_tally.entry(item.bio_bucket).or_default(),
        ] {
            tally[slot] += 1;
            tally[3] += 1;
        }
    }
    let estimate =
        |dimension: &'static str, bucket: &str, t: &[u64; 4]| -> Result<BucketProportions<T>> {
            Ok(BucketProportions {
                dimension,
                bucket: bucket.to_string(),
                n_items: t[3],
                yes: agresti_coull_interval(t[0], t[3], confidence)?,
                no: agresti_coull_interval(t[1], t[3], confidence)?,
                unclear: agresti_coull_interval(t[2], t[3], confidence)?,
            })
        };
    let mut buckets = Vec::new();
    for (b, t) in &token_tally {
        buckets.push(estimate("token", b.as_str(), t)?);
    }
    for (b, t) in &bio_tally {
        buckets.push(estimate("bio", b.as_str(), t)?);
    }
    let total: [u64; 4] = token_tally.values().fold([0; 4], |mut acc, t| {
        acc.iter_mut().zip(t).for_each(|(a, b)| *a += b);
        acc
    });
    if total[3] > 0 {
        buckets.push(estimate("all", "all", &total)?);
    }
    Ok(MergeReport {
        annotators: table.annotators.clone(),
        alpha_all: alpha_or_none(&table)?,
        alpha_excluding_unclear: alpha_or_none(&clear)?,
        n_pairable_all: table.pairable_units(),
        n_pairable_excluding_unclear: clear.pairable_units(),
        n_labelled: per_item.len(),
        table,
        buckets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::UserRecord;
    use crate::extractor::PhraseRecord;
    use crate::index::IndexBuilder;
    use std::collections::HashSet;

    /// An index where phrase `p` appears in exactly `count` bios.
    fn index_with(counts: &[(String, u64)]) -> IdentifierIndex {
        let mut b = IndexBuilder::new();
        let max = counts.iter().map(|c| c.1).max().unwrap_or(0);
        for u in 0..max {
            let user = UserRecord::new(format!("u{u}"), String::new());
            let phrases: Vec<PhraseRecord> = counts
                .iter()
                .filter(|(_, n)| u < *n)
                .map(|(p, _)| PhraseRecord {
                    text: p.clone(),
                    token_count: p.split(' ').count(),
                    source_user: user.user_id.clone(),
                    position: 0,
                })
                .collect();
            b.add(&user, &phrases);
        }
        b.finish()
    }

    const BUCKET_COUNTS: [u64; 7] = [1, 2, 3, 7, 12, 40, 150];

    fn phrase(tokens: usize, tag: &str) -> String {
        (0..tokens)
            .map(|t| format!("{tag}w{t}"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn full_index(per_cell: usize) -> (IdentifierIndex, IdentifierIndex) {
        let mut short = Vec::new();
        let mut long = Vec::new();
        for (bi, &c) in BUCKET_COUNTS.iter().enumerate() {
            for i in 0..per_cell {
                for tokens in 1..=4 {
                    let p = (phrase(tokens, &format!("b{bi}i{i}t")), c);
                    if tokens <= 3 {
                        short.push(p)
                    } else {
                        long.push(p)
                    }
                }
            }
        }
        (index_with(&short), index_with(&long))
    }

    #[test]
    fn buckets_are_half_open() {
        let got: Vec<&str> = [1, 2, 3, 4, 5, 9, 10, 24, 25, 99, 100, 5000]
            .iter()
            .map(|&c| BioBucket::of(c).unwrap().as_str())
            .collect();
        assert_eq!(
            got,
            [
                "1", "2", "3-5", "3-5", "5-10", "5-10", "10-25", "10-25", "25-100", "25-100",
                "100+", "100+"
            ]
        );
        assert_eq!(BioBucket::of(0), None);
        assert_eq!(TokenBucket::of(7), TokenBucket::FourPlus);
    }

    #[test]
    fn one_per_cell_gives_28() {
        let (short, long) = full_index(1);
        let s = stratified_sample(&short, Some(&long), 1, 3).unwrap();
        assert_eq!(s.len(), 28);
        let cells: HashSet<(TokenBucket, BioBucket)> =
            s.iter().map(|i| (i.token_bucket, i.bio_bucket)).collect();
        assert_eq!(cells.len(), 28);
    }

    #[test]
    fn thirty_per_cell_gives_840() {
        let (short, long) = full_index(32);
        let s = stratified_sample(&short, Some(&long), 30, 9).unwrap();
        assert_eq!(s.len(), 840);
        let phrases: HashSet<&str> = s.iter().map(|i| i.phrase.as_str()).collect();
        assert_eq!(phrases.len(), 840);
        assert_eq!(s, stratified_sample(&short, Some(&long), 30, 9).unwrap());
        assert_ne!(s, stratified_sample(&short, Some(&long), 30, 10).unwrap());
    }

    #[test]
    fn small_cells_are_not_padded() {
        let (short, _) = full_index(2);
        let s = stratified_sample(&short, None, 5, 1).unwrap();
        assert_eq!(s.len(), 3 * 7 * 2);
    }

    #[test]
    fn empty_index_rejected() {
        let empty = IndexBuilder::new().finish();
        assert!(stratified_sample(&empty, None, 1, 0).is_err());
    }

    #[test]
    fn weighted_sample_sizes() {
        let idx = index_with(&[("aaa".into(), 5), ("bbb".into(), 1), ("ccc".into(), 2)]);
        assert_eq!(probabilistic_sample(&idx, 3, 0).unwrap().len(), 3);
        assert!(probabilistic_sample(&idx, 4, 0).is_err());
        let two = probabilistic_sample(&idx, 2, 4).unwrap();
        assert_ne!(two[0].phrase, two[1].phrase);
    }

    #[test]
    fn weighted_sample_frequency() {
        let idx = index_with(&[("aaa".into(), 100), ("bbb".into(), 1)]);
        let hits = (0..10_000u64)
            .filter(|&s| probabilistic_sample(&idx, 1, s).unwrap()[0].phrase == "aaa")
            .count();
        let freq = hits as f64 / 10_000.0;
        assert!((freq - 100.0 / 101.0).abs() <= 0.01, "{freq}");
    }

    #[test]
    fn sample_files_round_trip() {
        let (short, long) = full_index(1);
        let s = stratified_sample(&short, Some(&long), 1, 3).unwrap();
        let (mut blind, mut key) = (Vec::new(), Vec::new());
        write_sample(&s, &mut blind, &mut key).unwrap();
        let blind = String::from_utf8(blind).unwrap();
        assert!(blind.starts_with("item_id\tphrase\n"));
        assert!(!blind.contains("100+"));
        assert_eq!(read_sample_key(key.as_slice()).unwrap(), s);
    }

    fn ten_items() -> Vec<AnnotationItem> {
        (1..=10)
            .map(|i| AnnotationItem {
                item_id: format!("i{i}"),
                phrase: format!("p{i}"),
                token_bucket: if i <= 5 {
                    TokenBucket::One
                } else {
                    TokenBucket::Two
                },
                bio_bucket: BioBucket::One,
                bio_count: 1,
            })
            .collect()
    }

    fn labels(pairs: &[(&str, &str)]) -> Vec<LabelRecord> {
        pairs
            .iter()
            .enumerate()
            .flat_map(|(i, (a, b))| {
                [("r1", a), ("r2", b)].map(|(who, l)| LabelRecord {
                    item_id: format!("i{}", i + 1),
                    annotator: who.into(),
                    label: l.parse().unwrap(),
                })
            })
            .collect()
    }

    #[test]
    fn unanimous_yes() {
        let ls = labels(&[("yes", "yes"); 10]);
        let r: MergeReport<f64> = merge_annotations(&ten_items(), &ls, 0.95).unwrap();
        assert_eq!(r.alpha_all, Some(1.0));
        assert!(r.buckets.iter().all(|b| b.yes.point == 1.0));
    }

    #[test]
    fn ten_item_hand_computation() {
        // Items 6 and 7 disagree; item 10 is yes_multi vs unclear.
        let ls = labels(&[
            ("yes", "yes"),
            ("yes", "yes"),
            ("yes", "yes"),
            ("yes", "yes"),
            ("yes", "yes"),
            ("yes", "no"),
            ("no", "yes"),
            ("no", "no"),
            ("no", "no"),
            ("yes_multi", "unclear"),
        ]);
        let r: MergeReport<f64> = merge_annotations(&ten_items(), &ls, 0.95).unwrap();
        // n_yes = 13, n_no = 6, n_unclear = 1, n = 20, off-diagonal mass 6.
        let all = 1.0 - 19.0 * 6.0 / (2.0 * (13.0 * 6.0 + 13.0 + 6.0));
        // Without item 10: n_yes = 12, n_no = 6, n = 18, off-diagonal mass 4.
        let clear = 1.0 - 17.0 * 4.0 / (2.0 * 12.0 * 6.0);
        assert!((r.alpha_all.unwrap() - all).abs() < 1e-12);
        assert!((r.alpha_excluding_unclear.unwrap() - clear).abs() < 1e-12);
        assert!(r.n_pairable_all > r.n_pairable_excluding_unclear);

        let overall = r.buckets.iter().find(|b| b.dimension == "all").unwrap();
        assert_eq!(overall.n_items, 10);
        assert_eq!(
            (
                overall.yes.successes,
                overall.no.successes,
                overall.unclear.successes
            ),
            (5, 2, 3)
        );
    }

    #[test]
    fn unknown_item_rejected() {
        let mut ls = labels(&[("yes", "yes")]);
        ls[0].item_id = "nope".into();
        let err = merge_annotations::<f64>(&ten_items(), &ls, 0.95).unwrap_err();
        assert!(matches!(err, Error::UnknownItem(id) if id == "nope"));
    }

    #[test]
    fn label_file_parsing() {
        let text = "item_id\tannotator_id\tlabel\ni1\ta\tYes\ni1\tb\tmissing\ni2\ta\tyes_multi\n";
        let ls = read_labels(text.as_bytes()).unwrap();
        assert_eq!(ls.len(), 2);
        assert_eq!(ls[1].label, Label::YesMulti);
        assert!(read_labels("item_id\tannotator_id\tlabel\ni1\ta\tmaybe\n".as_bytes()).is_err());
    }

    #[test]
    fn majority_rule() {
        use Label::*;
        assert_eq!(majority(&[Yes, YesMulti, No]), Some(Yes));
        assert_eq!(majority(&[Yes, No]), Some(Unclear));
        assert_eq!(majority(&[]), None);
    }
}
