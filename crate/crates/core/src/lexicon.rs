//! Pre-existing identity lexica: coverage of extracted identifiers and
//! meaning-dimension comparisons by presence.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extractor::{clean_phrase, RuleSet};
use crate::index::IdentifierIndex;
use crate::scalar::Scalar;
use crate::stats::{bootstrap_mean_ci, BootstrapCi};

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry<T> {
    pub term: String,
    /// One value per dimension; `None` where the file cell was empty.
    pub values: Vec<Option<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon<T> {
    pub name: String,
    pub dimensions: Vec<String>,
    pub entries: Vec<LexiconEntry<T>>,
}

impl<T: Scalar> Lexicon<T> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, term: &str) -> Option<&LexiconEntry<T>> {
        self.entries.iter().find(|e| e.term == term)
    }

    pub fn terms(&self) -> HashSet<&str> {
        self.entries.iter().map(|e| e.term.as_str()).collect()
    }

    /// A lexicon of bare terms, no dimensions.
    pub fn from_terms<I, S>(name: &str, terms: I, rules: &RuleSet) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut lex = Lexicon {
            name: name.to_string(),
            dimensions: Vec::new(),
            entries: Vec::new(),
        };
        let mut seen = HashSet::new();
        for t in terms {
            let term = clean_phrase(t.as_ref(), rules);
            if !term.is_empty() && seen.insert(term.clone()) {
                lex.entries.push(LexiconEntry {
                    term,
                    values: Vec::new(),
                });
            }
        }
        lex
    }
}

/// Parses a CSV lexicon with header `term,dim1,...,dimN`. Terms are cleaned
/// with the extractor rules; after cleaning, the first occurrence of a term
/// wins and later ones are reported with a warning.
pub fn read_lexicon<T: Scalar, R: Read>(
    reader: R,
    name: &str,
    rules: &RuleSet,
) -> Result<Lexicon<T>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut records = csv.records();
    let header = match records.next() {
        None => return Err(Error::InvalidInput(format!("lexicon `{name}` is empty"))),
        Some(h) => h.map_err(|e| csv_error(e, 1))?,
    };
    if header.is_empty() || !header[0].eq_ignore_ascii_case("term") {
        return Err(Error::Record {
            line: 1,
            message: format!("lexicon `{name}` needs a header starting with `term`"),
        });
    }
    let dimensions: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut entries: Vec<LexiconEntry<T>> = Vec::new();
    let mut seen = HashSet::new();
    for row in records {
        let row = row.map_err(|e| csv_error(e, 0))?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        if row.len() != dimensions.len() + 1 {
            return Err(Error::Record {
                line,
                message: format!(
                    "expected {} cells, found {}",
                    dimensions.len() + 1,
                    row.len()
                ),
            });
        }
        let term = clean_phrase(&row[0], rules);
        if term.is_empty() {
            log::warn!(
                "lexicon `{name}` line {line}: term `{}` is empty after cleaning",
                &row[0]
            );
            continue;
        }
        let mut values = Vec::with_capacity(dimensions.len());
        for (cell, dim) in row.iter().skip(1).zip(&dimensions) {
            values.push(if cell.is_empty() {
                None
            } else {
                let x: f64 = cell.parse().map_err(|_| Error::Record {
                    line,
                    message: format!("`{cell}` is not a number in column `{dim}`"),
                })?;
                Some(T::of(x))
            });
        }
        if !seen.insert(term.clone()) {
            log::warn!(
                "lexicon `{name}` line {line}: `{}` duplicates `{term}` after normalization; keeping the first",
                &row[0]
            );
            continue;
        }
        entries.push(LexiconEntry { term, values });
    }
    Ok(Lexicon {
        name: name.to_string(),
        dimensions,
        entries,
    })
}

fn csv_error(e: csv::Error, fallback_line: usize) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line() as usize);
    Error::Record {
        line,
        message: e.to_string(),
    }
}

pub fn load_lexicon<T: Scalar>(path: &Path, name: &str, rules: &RuleSet) -> Result<Lexicon<T>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_lexicon(std::io::BufReader::new(file), name, rules)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapCurve {
    pub thresholds: Vec<u64>,
    pub fractions: Vec<f64>,
    pub n_remaining: Vec<usize>,
}

impl OverlapCurve {
    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }
}

pub const DEFAULT_MIN_REMAINING: usize = 100;

/// Log-spaced integer cutoffs from 1 to `max`, about `per_decade` per power
/// of ten, deduplicated and increasing.
pub fn log_thresholds(max: u64, per_decade: usize) -> Vec<u64> {
    if max == 0 {
        return vec![0];
    }
    let steps = ((max as f64).log10() * per_decade as f64).ceil() as usize;
    let mut out: Vec<u64> = (0..=steps)
        .map(|i| 10f64.powf(i as f64 / per_decade as f64).round() as u64)
        .map(|t| t.min(max))
        .collect();
    out.dedup();
    out
}

/// Fraction of identifiers with `bio_count > t` that are lexicon terms, for
/// each threshold in increasing order. The curve keeps points while more
/// than `min_remaining` identifiers are above the cutoff; if the first
/// cutoff already fails that, the curve is that single point.
pub fn overlap_curve<T: Scalar>(
    index: &IdentifierIndex,
    lexicon: &Lexicon<T>,
    thresholds: &[u64],
    min_remaining: usize,
) -> Result<OverlapCurve> {
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "thresholds must be strictly increasing".into(),
        ));
    }
    let terms = lexicon.terms();
    let mut curve = OverlapCurve {
        thresholds: Vec::new(),
        fractions: Vec::new(),
        n_remaining: Vec::new(),
    };
    for &t in thresholds {
        let (mut above, mut hits) = (0usize, 0usize);
        for s in index.stats() {
            if s.bio_count > t {
                above += 1;
                hits += usize::from(terms.contains(s.phrase.as_str()));
            }
        }
        let first = curve.is_empty();
        if above <= min_remaining && !first {
            break;
        }
        curve.thresholds.push(t);
        curve.fractions.push(if above == 0 {
            0.0
        } else {
            hits as f64 / above as f64
        });
        curve.n_remaining.push(above);
        if above <= min_remaining {
            break;
        }
    }
    Ok(curve)
}

/// Splits lexicon terms into those seen in at least one bio and the rest.
pub fn presence_split<'a, T: Scalar>(
    index: &IdentifierIndex,
    lexicon: &'a Lexicon<T>,
) -> (Vec<&'a LexiconEntry<T>>, Vec<&'a LexiconEntry<T>>) {
    lexicon
        .entries
        .iter()
        .partition(|e| index.bio_count(&e.term) >= 1)
}

/// Min-max scales each dimension to [0, 1] over the terms that have a value.
/// A dimension with a single distinct value maps to 0.5.
pub fn scale_dimensions<T: Scalar>(lexicon: &Lexicon<T>) -> Lexicon<T> {
    let mut out = lexicon.clone();
    for d in 0..lexicon.dimensions.len() {
        let vals = lexicon.entries.iter().filter_map(|e| e.values[d]);
        let (lo, hi) = vals.fold((T::infinity(), T::neg_infinity()), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        });
        for e in &mut out.entries {
            if let Some(x) = e.values[d].as_mut() {
                *x = if hi > lo {
                    (*x - lo) / (hi - lo)
                } else {
                    T::of(0.5)
                };
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionComparison<T> {
    pub dimension: String,
    pub n_present: usize,
    pub n_absent: usize,
    /// `None` when no present term has a value on this dimension.
    pub present: Option<BootstrapCi<T>>,
    pub absent: Option<BootstrapCi<T>>,
}

/// Per-dimension means (with bootstrap intervals) of scaled values for terms
/// present in and absent from the index. An empty side is left out with a
/// warning.
pub fn meaning_comparison<T: Scalar>(
    index: &IdentifierIndex,
    lexicon: &Lexicon<T>,
    n_resamples: usize,
    confidence: T,
    seed: u64,
) -> Result<Vec<DimensionComparison<T>>> {
    let scaled = scale_dimensions(lexicon);
    let (present, absent) = presence_split(index, &scaled);
    let mut out = Vec::with_capacity(scaled.dimensions.len());
    for (d, dim) in scaled.dimensions.iter().enumerate() {
        let side = |entries: &[&LexiconEntry<T>],
                    label: &str|
         -> Result<(usize, Option<BootstrapCi<T>>)> {
            let vals: Vec<T> = entries.iter().filter_map(|e| e.values[d]).collect();
            if vals.is_empty() {
                log::warn!(
                    "lexicon `{}`: no {label} terms with a value for `{dim}`; skipped",
                    scaled.name
                );
                return Ok((0, None));
            }
            Ok((
                vals.len(),
                Some(bootstrap_mean_ci(&vals, n_resamples, confidence, seed)?),
            ))
        };
        let (n_present, p) = side(&present, "present")?;
        let (n_absent, a) = side(&absent, "absent")?;
        out.push(DimensionComparison {
            dimension: dim.clone(),
            n_present,
            n_absent,
            present: p,
            absent: a,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::UserRecord;
    use crate::extractor::PhraseRecord;
    use crate::index::IndexBuilder;
    use proptest::prelude::*;

    fn rules() -> RuleSet {
        RuleSet::default()
    }

    fn index_with(counts: &[(&str, u64)]) -> IdentifierIndex {
        let mut b = IndexBuilder::new();
        let max = counts.iter().map(|c| c.1).max().unwrap_or(0);
        for u in 0..max {
            let user = UserRecord::new(format!("u{u}"), String::new());
            let phrases: Vec<PhraseRecord> = counts
                .iter()
                .filter(|(_, n)| u < *n)
                .map(|(p, _)| PhraseRecord {
                    text: p.to_string(),
                    token_count: 1,
                    source_user: user.user_id.clone(),
                    position: 0,
                })
                .collect();
            b.add(&user, &phrases);
        }
        b.finish()
    }

    #[test]
    fn loads_rows_and_normalizes_terms() {
        let text = "term,evaluation,potency,activity\nDoctor,1.2,0.9,0.1\nnurse,,0.5,\n";
        let lex: Lexicon<f64> = read_lexicon(text.as_bytes(), "act", &rules()).unwrap();
        assert_eq!(lex.dimensions, ["evaluation", "potency", "activity"]);
        assert_eq!(
            lex.get("doctor").unwrap().values,
            vec![Some(1.2), Some(0.9), Some(0.1)]
        );
        assert_eq!(
            lex.get("nurse").unwrap().values,
            vec![None, Some(0.5), None]
        );
    }

    #[test]
    fn duplicate_after_normalization_keeps_first() {
        let text = "term,x\nMom,1\nmom,2\n";
        let lex: Lexicon<f64> = read_lexicon(text.as_bytes(), "l", &rules()).unwrap();
        assert_eq!(lex.len(), 1);
        assert_eq!(lex.entries[0].values, vec![Some(1.0)]);
    }

    #[test]
    fn empty_or_headerless_rejected() {
        assert!(read_lexicon::<f64, _>("".as_bytes(), "l", &rules()).is_err());
        assert!(read_lexicon::<f64, _>("doctor,1\n".as_bytes(), "l", &rules()).is_err());
        assert!(read_lexicon::<f64, _>("term,x\ndoctor,abc\n".as_bytes(), "l", &rules()).is_err());
    }

    #[test]
    fn overlap_hand_counts() {
        let idx = index_with(&[("aaa", 5), ("bbb", 50), ("ccc", 500)]);
        let with_c = Lexicon::<f64>::from_terms("l", ["ccc"], &rules());
        let c = overlap_curve(&idx, &with_c, &[0, 10, 100], 0).unwrap();
        assert_eq!(c.n_remaining, vec![3, 2, 1]);
        assert_eq!(c.fractions, vec![1.0 / 3.0, 0.5, 1.0]);

        let with_b = Lexicon::<f64>::from_terms("l", ["bbb"], &rules());
        let c = overlap_curve(&idx, &with_b, &[0, 10, 100], 0).unwrap();
        assert_eq!(c.fractions, vec![1.0 / 3.0, 0.5, 0.0]);
    }

    #[test]
    fn empty_lexicon_gives_zero() {
        let idx = index_with(&[("aaa", 5), ("bbb", 50)]);
        let lex = Lexicon::<f64>::from_terms("l", Vec::<String>::new(), &rules());
        let c = overlap_curve(&idx, &lex, &[0, 10], 0).unwrap();
        assert!(c.fractions.iter().all(|&f| f == 0.0));
    }

    #[test]
    fn truncation_leaves_single_point() {
        let idx = index_with(&[("aaa", 5), ("bbb", 50)]);
        let lex = Lexicon::<f64>::from_terms("l", ["aaa"], &rules());
        let c = overlap_curve(&idx, &lex, &[0, 10, 100], DEFAULT_MIN_REMAINING).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.thresholds, vec![0]);
    }

    #[test]
    fn full_lexicon_over_own_terms_is_one() {
        let idx = index_with(&[("aaa", 3), ("bbb", 7), ("ccc", 20)]);
        let lex = Lexicon::<f64>::from_terms("l", ["aaa", "bbb", "ccc"], &rules());
        let c = overlap_curve(&idx, &lex, &[0, 5, 10], 0).unwrap();
        assert!(c.fractions.iter().all(|&f| f == 1.0));
    }

    #[test]
    fn log_grid() {
        assert_eq!(log_thresholds(1000, 1), vec![1, 10, 100, 1000]);
        let g = log_thresholds(350, 4);
        assert_eq!(g.first(), Some(&1));
        assert_eq!(g.last(), Some(&350));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn meaning_toy_values() {
        let idx = index_with(&[("xxx", 1)]);
        let text = "term,evaluation\nxxx,0.0\nyyy,1.0\n";
        let lex: Lexicon<f64> = read_lexicon(text.as_bytes(), "l", &rules()).unwrap();
        let cmp = meaning_comparison(&idx, &lex, 100, 0.95, 1).unwrap();
        assert_eq!(cmp[0].present.unwrap().mean, 0.0);
        assert_eq!(cmp[0].absent.unwrap().mean, 1.0);
    }

    #[test]
    fn all_present_skips_absent_side() {
        let idx = index_with(&[("xxx", 1), ("yyy", 2)]);
        let lex: Lexicon<f64> =
            read_lexicon("term,e\nxxx,1\nyyy,3\n".as_bytes(), "l", &rules()).unwrap();
        let cmp = meaning_comparison(&idx, &lex, 50, 0.95, 1).unwrap();
        assert!(cmp[0].present.is_some());
        assert!(cmp[0].absent.is_none());
        assert_eq!(cmp[0].n_absent, 0);
    }

    proptest! {
        #[test]
        fn scaling_hits_exact_extremes(vals in prop::collection::vec(-1e3f64..1e3, 2..20)) {
            let lex = Lexicon {
                name: "l".into(),
                dimensions: vec!["d".into()],
                entries: vals.iter().enumerate().map(|(i, &v)| LexiconEntry {
                    term: format!("t{i}"),
                    values: vec![Some(v)],
                }).collect(),
            };
            let s = scale_dimensions(&lex);
            let xs: Vec<f64> = s.entries.iter().map(|e| e.values[0].unwrap()).collect();
            let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let distinct = vals.iter().any(|&v| v != vals[0]);
            if distinct {
                prop_assert_eq!((lo, hi), (0.0, 1.0));
            } else {
                prop_assert!(xs.iter().all(|&x| x == 0.5));
            }
        }

        #[test]
        fn affine_rescaling_invariance(
            vals in prop::collection::vec(-10f64..10.0, 3..15),
            present in prop::collection::vec(any::<bool>(), 15),
            a in 0.01f64..100.0,
            b in -100f64..100.0,
        ) {
            let names: Vec<String> = (0..vals.len()).map(|i| format!("term{i}")).collect();
            let counts: Vec<(&str, u64)> = names.iter().zip(&present)
                .filter(|(_, &p)| p).map(|(n, _)| (n.as_str(), 1)).collect();
            let idx = index_with(&counts);
            let make = |f: &dyn Fn(f64) -> f64| Lexicon {
                name: "l".into(),
                dimensions: vec!["d".into()],
                entries: names.iter().zip(&vals).map(|(n, &v)| LexiconEntry {
                    term: n.clone(),
                    values: vec![Some(f(v))],
                }).collect(),
            };
            let base = meaning_comparison(&idx, &make(&|x| x), 64, 0.9, 3).unwrap();
            let moved = meaning_comparison(&idx, &make(&|x| a * x + b), 64, 0.9, 3).unwrap();
            let close = |p: Option<BootstrapCi<f64>>, q: Option<BootstrapCi<f64>>| match (p, q) {
                (None, None) => true,
                (Some(p), Some(q)) => (p.mean - q.mean).abs() < 1e-9
                    && (p.lower - q.lower).abs() < 1e-9
                    && (p.upper - q.upper).abs() < 1e-9,
                _ => false,
            };
            prop_assert!(close(base[0].present, moved[0].present));
            prop_assert!(close(base[0].absent, moved[0].absent));
        }

        #[test]
        fn presence_is_a_partition(present in prop::collection::vec(any::<bool>(), 1..30)) {
            let names: Vec<String> = (0..present.len()).map(|i| format!("term{i}")).collect();
            let counts: Vec<(&str, u64)> = names.iter().zip(&present)
                .filter(|(_, &p)| p).map(|(n, _)| (n.as_str(), 2)).collect();
            let idx = index_with(&counts);
            let lex = Lexicon::<f64>::from_terms("l", &names, &rules());
            let (p, a) = presence_split(&idx, &lex);
            prop_assert_eq!(p.len() + a.len(), lex.len());
            prop_assert_eq!(p.len(), counts.len());
        }
    }
}
