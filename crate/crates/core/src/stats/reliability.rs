use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One coded item: a label index (into the table's categories) per annotator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReliabilityUnit {
    pub id: String,
    pub labels: Vec<Option<usize>>,
}

/// Nominal codes from several annotators, missing values allowed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReliabilityTable {
    pub categories: Vec<String>,
    pub annotators: Vec<String>,
    pub units: Vec<ReliabilityUnit>,
}

impl ReliabilityTable {
    /// Builds a table from `(item, annotator, label)` triples. Items,
    /// annotators and categories are ordered by first appearance. A repeated
    /// (item, annotator) pair is an error.
    pub fn from_triples<I, A, B, C>(triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B, C)>,
        A: AsRef<str>,
        B: AsRef<str>,
        C: AsRef<str>,
    {
        let mut table = ReliabilityTable::default();
        let mut item_pos: BTreeMap<String, usize> = BTreeMap::new();
        let mut ann_pos: BTreeMap<String, usize> = BTreeMap::new();
        for (item, annotator, label) in triples {
            let cat = table.category_index(label.as_ref());
            let a = *ann_pos
                .entry(annotator.as_ref().to_string())
                .or_insert_with(|| {
                    table.annotators.push(annotator.as_ref().to_string());
                    table.annotators.len() - 1
                });
            let u = *item_pos
                .entry(item.as_ref().to_string())
                .or_insert_with(|| {
                    table.units.push(ReliabilityUnit {
                        id: item.as_ref().to_string(),
                        labels: Vec::new(),
                    });
                    table.units.len() - 1
                });
            let labels = &mut table.units[u].labels;
            if labels.len() <= a {
                labels.resize(a + 1, None);
            }
            if labels[a].is_some() {
                return Err(Error::InvalidInput(format!(
                    "item `{}` labelled twice by `{}`",
                    item.as_ref(),
                    annotator.as_ref()
                )));
            }
            labels[a] = Some(cat);
        }
        let n_ann = table.annotators.len();
        for unit in &mut table.units {
            unit.labels.resize(n_ann, None);
        }
        Ok(table)
    }

    fn category_index(&mut self, label: &str) -> usize {
        match self.categories.iter().position(|c| c == label) {
            Some(i) => i,
            None => {
                self.categories.push(label.to_string());
                self.categories.len() - 1
            }
        }
    }

    /// Keeps the units for which `keep` holds.
    pub fn filter_units(&self, mut keep: impl FnMut(&ReliabilityUnit) -> bool) -> Self {
        ReliabilityTable {
            categories: self.categories.clone(),
            annotators: self.annotators.clone(),
            units: self.units.iter().filter(|u| keep(u)).cloned().collect(),
        }
    }

    /// Units with at least two values.
    pub fn pairable_units(&self) -> usize {
        self.units
            .iter()
            .filter(|u| u.labels.iter().flatten().count() >= 2)
            .count()
    }
}

/// Krippendorff's alpha for nominal data, `1 - D_o / D_e`, from the
/// coincidence matrix. Units with fewer than two values are ignored.
/// Returns 1 when all pairable values fall in one category.
pub fn krippendorff_alpha<T: Scalar>(table: &ReliabilityTable) -> Result<T> {
    let k = table.categories.len();
    let mut coincidence = vec![T::zero(); k * k];
    for unit in &table.units {
        let values: Vec<usize> = unit.labels.iter().flatten().copied().collect();
        let m = values.len();
        if m < 2 {
            continue;
        }
        if let Some(&bad) = values.iter().find(|&&v| v >= k) {
            return Err(Error::InvalidInput(format!(
                "label index {bad} out of range"
            )));
        }
        let weight = T::one() / T::of_usize(m - 1);
        for (i, &c) in values.iter().enumerate() {
            for (j, &d) in values.iter().enumerate() {
                if i != j {
                    coincidence[c * k + d] += weight;
                }
            }
        }
    }
    let marginals: Vec<T> = (0..k)
        .map(|c| (0..k).map(|d| coincidence[c * k + d]).sum())
        .collect();
    let n: T = marginals.iter().copied().sum();
    if n == T::zero() {
        return Err(Error::NoPairableValues);
    }
    let mut observed = T::zero();
    let mut expected = T::zero();
    for c in 0..k {
        for d in 0..k {
            if c != d {
                observed += coincidence[c * k + d];
                expected += marginals[c] * marginals[d];
            }
        }
    }
    if expected == T::zero() {
        return Ok(T::one());
    }
    // D_o = observed / n, D_e = expected / (n (n - 1))
    Ok(T::one() - (n - T::one()) * observed / expected)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_rater(pairs: &[(&str, &str)]) -> ReliabilityTable {
        let triples = pairs
            .iter()
            .enumerate()
            .flat_map(|(i, (a, b))| [(i.to_string(), "r1", *a), (i.to_string(), "r2", *b)]);
        ReliabilityTable::from_triples(triples).unwrap()
    }

    #[test]
    fn hand_computed_examples() {
        let perfect = two_rater(&[("a", "a"), ("b", "b"), ("c", "c")]);
        assert_eq!(krippendorff_alpha::<f64>(&perfect).unwrap(), 1.0);

        let swapped = two_rater(&[("a", "b"), ("b", "a")]);
        assert!((krippendorff_alpha::<f64>(&swapped).unwrap() + 0.5).abs() < 1e-12);

        let mixed = two_rater(&[("a", "a"), ("a", "a"), ("b", "b"), ("a", "b")]);
        let expected = 1.0 - 0.25 / (30.0 / 56.0);
        assert!((krippendorff_alpha::<f64>(&mixed).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.5333).abs() < 1e-4);
    }

    #[test]
    fn single_category_is_one() {
        let t = two_rater(&[("a", "a"), ("a", "a")]);
        assert_eq!(krippendorff_alpha::<f64>(&t).unwrap(), 1.0);
    }

    #[test]
    fn no_pairable_values() {
        let t = ReliabilityTable::from_triples([("1", "r1", "a"), ("2", "r2", "b")]).unwrap();
        assert_eq!(t.pairable_units(), 0);
        assert!(matches!(
            krippendorff_alpha::<f64>(&t),
            Err(Error::NoPairableValues)
        ));
    }

    #[test]
    fn duplicate_label_rejected() {
        assert!(ReliabilityTable::from_triples([("1", "r1", "a"), ("1", "r1", "b")]).is_err());
    }

    #[test]
    fn relabeling_invariance() {
        let t = two_rater(&[("a", "a"), ("b", "a"), ("c", "c"), ("b", "b"), ("a", "c")]);
        let renamed = two_rater(&[("x", "x"), ("y", "x"), ("z", "z"), ("y", "y"), ("x", "z")]);
        let a: f64 = krippendorff_alpha(&t).unwrap();
        let b: f64 = krippendorff_alpha(&renamed).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(a <= 1.0);
    }
}
