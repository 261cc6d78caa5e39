use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;

use crate::corpus::{Party, Race, Sex};
use crate::error::{Error, Result};
use crate::index::{Category, ContinuousAttr, IdentifierIndex, IdentifierStats};
use crate::scalar::Scalar;

use super::log_odds::CategoryContrast;

/// A two-group split of one categorical attribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contrast {
    pub name: String,
    pub label_a: String,
    pub label_b: String,
    pub group_a: Vec<Category>,
    pub group_b: Vec<Category>,
}

impl Contrast {
    /// Recognized names:
    /// - `sex`: male vs female
    /// - `party`: democrat vs republican
    /// - `race`: every non-white value vs white
    /// - `race:<value>`: that value vs white
    /// - `verified`: verified vs not verified
    pub fn parse(name: &str) -> Result<Contrast> {
        let make = |a: &str, b: &str, ga: Vec<Category>, gb: Vec<Category>| Contrast {
            name: name.to_string(),
            label_a: a.to_string(),
            label_b: b.to_string(),
            group_a: ga,
            group_b: gb,
        };
        let white = vec![Category::Race(Race::White)];
        Ok(match name {
            "sex" => make(
                "male",
                "female",
                vec![Category::Sex(Sex::Male)],
                vec![Category::Sex(Sex::Female)],
            ),
            "party" => make(
                "democrat",
                "republican",
                vec![Category::Party(Party::Democrat)],
                vec![Category::Party(Party::Republican)],
            ),
            "race" => make(
                "non-white",
                "white",
                Race::ALL
                    .iter()
                    .filter(|r| **r != Race::White)
                    .map(|r| Category::Race(*r))
                    .collect(),
                white,
            ),
            "verified" => make(
                "verified",
                "unverified",
                vec![Category::Verified(true)],
                vec![Category::Verified(false)],
            ),
            other => match other.strip_prefix("race:").map(str::parse::<Race>) {
                Some(Ok(r)) if r != Race::White => {
                    make(r.as_str(), "white", vec![Category::Race(r)], white)
                }
                _ => return Err(Error::UnknownAttribute(other.to_string())),
            },
        })
    }

    pub fn count_a(&self, s: &IdentifierStats) -> u64 {
        self.group_a.iter().map(|c| s.count(*c)).sum()
    }

    pub fn count_b(&self, s: &IdentifierStats) -> u64 {
        self.group_b.iter().map(|c| s.count(*c)).sum()
    }

    /// Resolves a side given as `a`/`b` or by its group label.
    pub fn side(&self, name: &str) -> Result<Side> {
        match name {
            "a" | "high" => Ok(Side::A),
            "b" | "low" => Ok(Side::B),
            n if n == self.label_a => Ok(Side::A),
            n if n == self.label_b => Ok(Side::B),
            n => Err(Error::InvalidInput(format!(
                "side must be `{}` or `{}`, got `{n}`",
                self.label_a, self.label_b
            ))),
        }
    }
}

/// Which end of a ranking to report. For contrasts `A` is the first group;
/// for continuous attributes `A` is the high end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedContrast<T> {
    pub contrast: CategoryContrast<T>,
    pub bio_count: u64,
}

fn tie_break(a: &IdentifierStats, b: &IdentifierStats) -> Ordering {
    b.bio_count
        .cmp(&a.bio_count)
        .then_with(|| a.phrase.cmp(&b.phrase))
}

fn by_value<T: Scalar>(x: T, y: T, side: Side) -> Ordering {
    let ord = x.partial_cmp(&y).unwrap_or(Ordering::Equal);
    match side {
        Side::A => ord.reverse(),
        Side::B => ord,
    }
}

/// Phrases in at least `min_bios` bios, ordered by normalized log-odds toward
/// `side`; ties go to the larger bio count, then the smaller phrase.
pub fn rank_by_category<T: Scalar>(
    index: &IdentifierIndex,
    contrast: &Contrast,
    side: Side,
    top_k: usize,
    min_bios: u64,
    prior: T,
) -> Vec<RankedContrast<T>> {
    let n_a: u64 = index.stats().iter().map(|s| contrast.count_a(s)).sum();
    let n_b: u64 = index.stats().iter().map(|s| contrast.count_b(s)).sum();
    let mut ranked: Vec<(&IdentifierStats, CategoryContrast<T>)> = index
        .stats()
        .iter()
        .filter(|s| s.bio_count >= min_bios)
        .map(|s| {
            let c = CategoryContrast::new(
                s.phrase.clone(),
                contrast.count_a(s),
                contrast.count_b(s),
                n_a,
                n_b,
                prior,
            );
            (s, c)
        })
        .collect();
    ranked.sort_by(|(sa, ca), (sb, cb)| {
        by_value(ca.normalized_log_odds, cb.normalized_log_odds, side)
            .then_with(|| tie_break(sa, sb))
    });
    ranked
        .into_iter()
        .take(top_k)
        .map(|(s, contrast)| RankedContrast {
            contrast,
            bio_count: s.bio_count,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanRank<T> {
    pub phrase: String,
    pub mean: T,
    /// Users contributing a non-missing value.
    pub n: u64,
    pub bio_count: u64,
}

/// Phrases in at least `min_bios` bios ordered by the mean of `attr` over
/// the users expressing them, highest first for `Side::A`.
pub fn continuous_mean_ranking<T: Scalar>(
    index: &IdentifierIndex,
    attr: ContinuousAttr,
    side: Side,
    top_k: usize,
    min_bios: u64,
) -> Vec<MeanRank<T>> {
    let mut ranked: Vec<(&IdentifierStats, T)> = index
        .stats()
        .iter()
        .filter(|s| s.bio_count >= min_bios)
        .filter_map(|s| s.mean(attr).map(|m| (s, T::of(m))))
        .collect();
    ranked.sort_by(|(sa, ma), (sb, mb)| by_value(*ma, *mb, side).then_with(|| tie_break(sa, sb)));
    ranked
        .into_iter()
        .take(top_k)
        .map(|(s, mean)| MeanRank {
            phrase: s.phrase.clone(),
            mean,
            n: s.continuous[attr.slot()].n,
            bio_count: s.bio_count,
        })
        .collect()
}

/// Pearson correlation coefficient.
pub fn pearson<T: Scalar>(xs: &[T], ys: &[T]) -> Result<T> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(Error::InvalidInput(
            "correlation needs two equal-length, non-empty series".into(),
        ));
    }
    let n = T::of_usize(xs.len());
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == T::zero() {
        return Err(Error::ZeroVariance("first series"));
    }
    if syy == T::zero() {
        return Err(Error::ZeroVariance("second series"));
    }
    Ok(sxy / (sxx.sqrt() * syy.sqrt()))
}

/// Correlation of bio counts over the union of both indexes' phrases; a
/// phrase absent from one index counts 0 there.
pub fn count_correlation<T: Scalar>(a: &IdentifierIndex, b: &IdentifierIndex) -> Result<T> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput("both indexes must be non-empty".into()));
    }
    let mut union: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for s in a.stats() {
        union.entry(&s.phrase).or_default().0 = s.bio_count;
    }
    for s in b.stats() {
        union.entry(&s.phrase).or_default().1 = s.bio_count;
    }
    let (xs, ys): (Vec<T>, Vec<T>) = union
        .values()
        .map(|&(x, y)| (T::of(x as f64), T::of(y as f64)))
        .unzip();
    pearson(&xs, &ys)
}
