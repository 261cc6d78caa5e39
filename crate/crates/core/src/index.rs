//! Per-identifier aggregates and the identifier × user incidence matrix.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::corpus::{Party, Race, Sex, UserRecord};
use crate::error::{Error, Result};
use crate::extractor::PhraseRecord;
use crate::tsv;

/// One value of a categorical attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    Sex(Sex),
    Party(Party),
    Race(Race),
    Verified(bool),
}

impl Category {
    pub const COUNT: usize = 12;

    pub const ALL: [Category; Category::COUNT] = [
        Category::Sex(Sex::Male),
        Category::Sex(Sex::Female),
        Category::Party(Party::Democrat),
        Category::Party(Party::Republican),
        Category::Party(Party::Other),
        Category::Race(Race::White),
        Category::Race(Race::Black),
        Category::Race(Race::Hispanic),
        Category::Race(Race::Asian),
        Category::Race(Race::Other),
        Category::Verified(true),
        Category::Verified(false),
    ];

    pub fn slot(self) -> usize {
        match self {
            Category::Sex(Sex::Male) => 0,
            Category::Sex(Sex::Female) => 1,
            Category::Party(Party::Democrat) => 2,
            Category::Party(Party::Republican) => 3,
            Category::Party(Party::Other) => 4,
            Category::Race(Race::White) => 5,
            Category::Race(Race::Black) => 6,
            Category::Race(Race::Hispanic) => 7,
            Category::Race(Race::Asian) => 8,
            Category::Race(Race::Other) => 9,
            Category::Verified(true) => 10,
            Category::Verified(false) => 11,
        }
    }

    /// Column name in index files, e.g. `sex_male`.
    pub fn column(self) -> &'static str {
        const NAMES: [&str; Category::COUNT] = [
            "sex_male",
            "sex_female",
            "party_democrat",
            "party_republican",
            "party_other",
            "race_white",
            "race_black",
            "race_hispanic",
            "race_asian",
            "race_other",
            "verified_true",
            "verified_false",
        ];
        NAMES[self.slot()]
    }

    /// Categories a user belongs to (missing values contribute nothing).
    pub fn of(user: &UserRecord) -> impl Iterator<Item = Category> {
        [
            user.sex.map(Category::Sex),
            user.party.map(Category::Party),
            user.race.map(Category::Race),
            user.verified.map(Category::Verified),
        ]
        .into_iter()
        .flatten()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContinuousAttr {
    Age,
    PctRural,
    /// `ln((friends + 1) / (followers + 1))`
    FriendFollowerRatio,
}

impl ContinuousAttr {
    pub const ALL: [ContinuousAttr; 3] = [
        ContinuousAttr::Age,
        ContinuousAttr::PctRural,
        ContinuousAttr::FriendFollowerRatio,
    ];

    pub fn slot(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ContinuousAttr::Age => "age",
            ContinuousAttr::PctRural => "pct_rural",
            ContinuousAttr::FriendFollowerRatio => "ff_ratio",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "age" => Ok(ContinuousAttr::Age),
            "pct_rural" | "rural" => Ok(ContinuousAttr::PctRural),
            "ff_ratio" | "friend_follower_ratio" | "status_ratio" => {
                Ok(ContinuousAttr::FriendFollowerRatio)
            }
            other => Err(Error::UnknownAttribute(other.to_string())),
        }
    }

    pub fn value(self, user: &UserRecord) -> Option<f64> {
        match self {
            ContinuousAttr::Age => user.age,
            ContinuousAttr::PctRural => user.pct_rural,
            ContinuousAttr::FriendFollowerRatio => user.friend_follower_ratio(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunningSum {
    pub sum: f64,
    pub n: u64,
}

impl RunningSum {
    pub fn push(&mut self, x: f64) {
        self.sum += x;
        self.n += 1;
    }

    pub fn mean(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum / self.n as f64)
    }

    fn merge(&mut self, other: &RunningSum) {
        self.sum += other.sum;
        self.n += other.n;
    }
}

/// Aggregates for one distinct phrase.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentifierStats {
    pub phrase: String,
    pub token_count: usize,
    /// Distinct users whose bio yielded the phrase.
    pub bio_count: u64,
    pub categories: [u64; Category::COUNT],
    pub continuous: [RunningSum; 3],
}

impl IdentifierStats {
    fn new(phrase: String, token_count: usize) -> Self {
        IdentifierStats {
            phrase,
            token_count,
            bio_count: 0,
            categories: [0; Category::COUNT],
            continuous: [RunningSum::default(); 3],
        }
    }

    pub fn count(&self, category: Category) -> u64 {
        self.categories[category.slot()]
    }

    pub fn mean(&self, attr: ContinuousAttr) -> Option<f64> {
        self.continuous[attr.slot()].mean()
    }

    fn add_user(&mut self, user: &UserRecord) {
        self.bio_count += 1;
        for c in Category::of(user) {
            self.categories[c.slot()] += 1;
        }
        for attr in ContinuousAttr::ALL {
            if let Some(v) = attr.value(user) {
                self.continuous[attr.slot()].push(v);
            }
        }
    }

    fn merge(&mut self, other: &IdentifierStats) {
        self.bio_count += other.bio_count;
        for (a, b) in self.categories.iter_mut().zip(other.categories.iter()) {
            *a += b;
        }
        for (a, b) in self.continuous.iter_mut().zip(other.continuous.iter()) {
            a.merge(b);
        }
    }
}

/// Accumulates (user, phrases) pairs. Builders over consecutive shards
/// merge with [`IndexBuilder::merge`].
#[derive(Debug, Default, Clone)]
pub struct IndexBuilder {
    entries: HashMap<String, (IdentifierStats, Vec<u32>)>,
    users: Vec<String>,
    n_bios: u64,
}

impl IndexBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one user's extracted phrases. Repeated phrases count once.
    pub fn add(&mut self, user: &UserRecord, phrases: &[PhraseRecord]) {
        self.n_bios += 1;
        if phrases.is_empty() {
            return;
        }
        let col = u32::try_from(self.users.len()).expect("fewer than 2^32 users");
        let mut added = false;
        for (i, p) in phrases.iter().enumerate() {
            if phrases[..i].iter().any(|q| q.text == p.text) {
                continue;
            }
            let (stats, users) = self.entries.entry(p.text.clone()).or_insert_with(|| {
                (
                    IdentifierStats::new(p.text.clone(), p.token_count),
                    Vec::new(),
                )
            });
            stats.add_user(user);
            users.push(col);
            added = true;
        }
        if added {
            self.users.push(user.user_id.clone());
        }
    }

    /// Appends `other`, whose users come after this builder's users.
    pub fn merge(mut self, other: IndexBuilder) -> IndexBuilder {
        let offset = u32::try_from(self.users.len()).expect("fewer than 2^32 users");
        self.n_bios += other.n_bios;
        self.users.extend(other.users);
        for (phrase, (stats, users)) in other.entries {
            match self.entries.get_mut(&phrase) {
                Some((s, u)) => {
                    s.merge(&stats);
                    u.extend(users.iter().map(|c| c + offset));
                }
                None => {
                    let users = users.iter().map(|c| c + offset).collect();
                    self.entries.insert(phrase, (stats, users));
                }
            }
        }
        self
    }

    pub fn finish(self) -> IdentifierIndex {
        let mut entries: Vec<_> = self.entries.into_values().collect();
        entries.sort_by(|a, b| a.0.phrase.cmp(&b.0.phrase));
        let (stats, postings): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
        IdentifierIndex::from_parts(stats, postings, self.users, self.n_bios)
    }
}

/// Distinct phrases (sorted) with their statistics and the users expressing each.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentifierIndex {
    stats: Vec<IdentifierStats>,
    /// Per phrase, ascending indices into `users`.
    postings: Vec<Vec<u32>>,
    /// Users with at least one phrase, in input order.
    users: Vec<String>,
    n_bios: u64,
    lookup: HashMap<String, usize>,
}

impl IdentifierIndex {
    fn from_parts(
        stats: Vec<IdentifierStats>,
        postings: Vec<Vec<u32>>,
        users: Vec<String>,
        n_bios: u64,
    ) -> Self {
        let lookup = stats
            .iter()
            .enumerate()
            .map(|(i, s)| (s.phrase.clone(), i))
            .collect();
        IdentifierIndex {
            stats,
            postings,
            users,
            n_bios,
            lookup,
        }
    }

    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }

    pub fn stats(&self) -> &[IdentifierStats] {
        &self.stats
    }

    pub fn get(&self, phrase: &str) -> Option<&IdentifierStats> {
        self.lookup.get(phrase).map(|&i| &self.stats[i])
    }

    pub fn bio_count(&self, phrase: &str) -> u64 {
        self.get(phrase).map_or(0, |s| s.bio_count)
    }

    pub fn postings(&self, row: usize) -> &[u32] {
        &self.postings[row]
    }

    pub fn users(&self) -> &[String] {
        &self.users
    }

    /// Bios indexed, including those that yielded no phrase.
    pub fn n_bios(&self) -> u64 {
        self.n_bios
    }

    /// Total occurrences of all phrases among users in `category`.
    pub fn category_total(&self, category: Category) -> u64 {
        self.stats.iter().map(|s| s.count(category)).sum()
    }

    /// Writes the statistics table.
    pub fn write_stats<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        let mut header: Vec<String> = ["phrase", "token_count", "bio_count"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        header.extend(Category::ALL.iter().map(|c| c.column().to_string()));
        for attr in ContinuousAttr::ALL {
            header.push(format!("{}_sum", attr.name()));
            header.push(format!("{}_n", attr.name()));
        }
        tsv::write_row(w, &header)?;
        for s in &self.stats {
            let mut row = vec![
                s.phrase.clone(),
                s.token_count.to_string(),
                s.bio_count.to_string(),
            ];
            row.extend(s.categories.iter().map(|c| c.to_string()));
            for rs in &s.continuous {
                row.push(rs.sum.to_string());
                row.push(rs.n.to_string());
            }
            tsv::write_row(w, &row)?;
        }
        Ok(())
    }

    /// Writes one line per user: `user_id`, then the space-separated row
    /// numbers (0-based, in stats-table order) of the user's phrases.
    pub fn write_postings<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        let mut by_user: Vec<Vec<usize>> = vec![Vec::new(); self.users.len()];
        for (row, users) in self.postings.iter().enumerate() {
            for &u in users {
                by_user[u as usize].push(row);
            }
        }
        tsv::write_row(w, &["user_id", "rows"])?;
        for (user, rows) in self.users.iter().zip(by_user) {
            let rows: Vec<String> = rows.iter().map(|r| r.to_string()).collect();
            tsv::write_row(w, &[user.as_str(), &rows.join(" ")])?;
        }
        Ok(())
    }

    /// Reads a statistics table and, optionally, the matching postings.
    /// `n_bios` is not stored in either file and must be supplied.
    pub fn read<R1: BufRead, R2: BufRead>(
        stats_reader: R1,
        postings_reader: Option<R2>,
        n_bios: u64,
    ) -> Result<IdentifierIndex> {
        let table = tsv::read_table(stats_reader)?;
        let phrase_col = table.column("phrase")?;
        let tok_col = table.column("token_count")?;
        let bio_col = table.column("bio_count")?;
        let cat_cols: Vec<usize> = Category::ALL
            .iter()
            .map(|c| table.column(c.column()))
            .collect::<Result<_>>()?;
        let cont_cols: Vec<(usize, usize)> = ContinuousAttr::ALL
            .iter()
            .map(|a| {
                Ok((
                    table.column(&format!("{}_sum", a.name()))?,
                    table.column(&format!("{}_n", a.name()))?,
                ))
            })
            .collect::<Result<_>>()?;
        let mut stats = Vec::with_capacity(table.rows.len());
        for (line, row) in &table.rows {
            let line = *line;
            let mut s = IdentifierStats::new(
                row[phrase_col].clone(),
                tsv::parse_cell(&row[tok_col], line, "token_count")?,
            );
            s.bio_count = tsv::parse_cell(&row[bio_col], line, "bio_count")?;
            for (slot, &col) in cat_cols.iter().enumerate() {
                s.categories[slot] = tsv::parse_cell(&row[col], line, "category count")?;
            }
            for (slot, &(sum_col, n_col)) in cont_cols.iter().enumerate() {
                s.continuous[slot] = RunningSum {
                    sum: tsv::parse_cell(&row[sum_col], line, "sum")?,
                    n: tsv::parse_cell(&row[n_col], line, "count")?,
                };
            }
            if s.bio_count == 0 {
                return Err(Error::Record {
                    line,
                    message: "bio_count must be at least 1".into(),
                });
            }
            stats.push(s);
        }
        if stats.windows(2).any(|w| w[0].phrase >= w[1].phrase) {
            stats.sort_by(|a, b| a.phrase.cmp(&b.phrase));
            if stats.windows(2).any(|w| w[0].phrase == w[1].phrase) {
                return Err(Error::InvalidInput("duplicate phrase in index".into()));
            }
            if postings_reader.is_some() {
                return Err(Error::InvalidInput(
                    "index rows must be sorted when postings are supplied".into(),
                ));
            }
        }

        let mut postings = vec![Vec::new(); stats.len()];
        let mut users = Vec::new();
        if let Some(reader) = postings_reader {
            let table = tsv::read_table(reader)?;
            let user_col = table.column("user_id")?;
            let rows_col = table.column("rows")?;
            for (line, row) in &table.rows {
                let col = users.len() as u32;
                users.push(row[user_col].clone());
                for r in row[rows_col].split_whitespace() {
                    let r: usize = tsv::parse_cell(r, *line, "row number")?;
                    let list: &mut Vec<u32> = postings.get_mut(r).ok_or_else(|| Error::Record {
                        line: *line,
                        message: format!("row {r} out of range"),
                    })?;
                    list.push(col);
                }
            }
            for (s, p) in stats.iter().zip(&postings) {
                if p.len() as u64 != s.bio_count {
                    return Err(Error::InvalidInput(format!(
                        "postings for `{}` list {} users but bio_count is {}",
                        s.phrase,
                        p.len(),
                        s.bio_count
                    )));
                }
            }
        }
        Ok(IdentifierIndex::from_parts(stats, postings, users, n_bios))
    }
}

/// Builds an index from users and their extracted phrases.
pub fn build_index<'a, I>(records: I) -> IdentifierIndex
where
    I: IntoIterator<Item = (&'a UserRecord, &'a [PhraseRecord])>,
{
    let mut builder = IndexBuilder::new();
    for (user, phrases) in records {
        builder.add(user, phrases);
    }
    builder.finish()
}

/// Binary identifier × user matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteMatrix {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub indptr: Vec<usize>,
    pub indices: Vec<u32>,
    pub values: Vec<u32>,
}

impl BipartiteMatrix {
    /// Builds from `(row, col)` coordinates with value 1; duplicates collapse.
    pub fn from_pairs(rows: Vec<String>, cols: Vec<String>, pairs: &[(usize, usize)]) -> Self {
        let mut per_row: Vec<Vec<u32>> = vec![Vec::new(); rows.len()];
        for &(r, c) in pairs {
            assert!(c < cols.len(), "column {c} out of range");
            per_row[r].push(c as u32);
        }
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        indptr.push(0);
        for mut list in per_row {
            list.sort_unstable();
            list.dedup();
            indices.extend(list);
            indptr.push(indices.len());
        }
        let values = vec![1; indices.len()];
        BipartiteMatrix {
            rows,
            cols,
            indptr,
            indices,
            values,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()]
            .iter()
            .zip(&self.values[span])
            .map(|(&c, &v)| (c as usize, v))
    }

    pub fn row_sums(&self) -> Vec<u64> {
        (0..self.n_rows())
            .map(|r| self.row(r).map(|(_, v)| v as u64).sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        let mut sums = vec![0u64; self.n_cols()];
        for (&c, &v) in self.indices.iter().zip(&self.values) {
            sums[c as usize] += v as u64;
        }
        sums
    }

    /// Coordinate list: `row \t col \t value`, 0-based.
    pub fn write_coo<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        tsv::write_row(w, &["row", "col", "value"])?;
        for r in 0..self.n_rows() {
            for (c, v) in self.row(r) {
                writeln!(w, "{r}\t{c}\t{v}")?;
            }
        }
        Ok(())
    }

    pub fn write_labels<W: Write>(labels: &[String], w: &mut W) -> std::io::Result<()> {
        for l in labels {
            writeln!(w, "{}", tsv::escape(l))?;
        }
        Ok(())
    }
}

/// Restricts the index to identifiers in more than `min_bio_count` bios and
/// users with more than `min_user_identifiers` of those identifiers,
/// re-applying both thresholds until neither removes anything.
pub fn build_matrix(
    index: &IdentifierIndex,
    min_bio_count: u64,
    min_user_identifiers: u64,
) -> Result<BipartiteMatrix> {
    let n_users = index.users.len();
    let mut row_alive: Vec<bool> = index
        .stats
        .iter()
        .map(|s| s.bio_count > min_bio_count)
        .collect();
    let mut col_alive = vec![true; n_users];
    loop {
        let mut col_deg = vec![0u64; n_users];
        for (r, users) in index.postings.iter().enumerate() {
            if row_alive[r] {
                for &u in users {
                    col_deg[u as usize] += 1;
                }
            }
        }
        let mut changed = false;
        for (alive, &deg) in col_alive.iter_mut().zip(&col_deg) {
            if *alive && deg <= min_user_identifiers {
                *alive = false;
                changed = true;
            }
        }
        for (r, users) in index.postings.iter().enumerate() {
            if row_alive[r] {
                let deg = users.iter().filter(|&&u| col_alive[u as usize]).count() as u64;
                if deg <= min_bio_count {
                    row_alive[r] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut col_map = vec![u32::MAX; n_users];
    let mut cols = Vec::new();
    for (u, alive) in col_alive.iter().enumerate() {
        if *alive {
            col_map[u] = cols.len() as u32;
            cols.push(index.users[u].clone());
        }
    }
    let mut rows = Vec::new();
    let mut pairs = Vec::new();
    for (r, users) in index.postings.iter().enumerate() {
        if !row_alive[r] {
            continue;
        }
        let row = rows.len();
        rows.push(index.stats[r].phrase.clone());
        pairs.extend(
            users
                .iter()
                .filter(|&&u| col_alive[u as usize])
                .map(|&u| (row, col_map[u as usize] as usize)),
        );
    }
    if rows.is_empty() || cols.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    Ok(BipartiteMatrix::from_pairs(rows, cols, &pairs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extractor::filter_phrases;

    fn user(id: &str) -> UserRecord {
        UserRecord::new(id, "")
    }

    fn phrases(texts: &[&str]) -> Vec<PhraseRecord> {
        filter_phrases(texts.iter().copied())
    }

    fn index_of(data: &[(UserRecord, Vec<PhraseRecord>)]) -> IdentifierIndex {
        build_index(data.iter().map(|(u, p)| (u, p.as_slice())))
    }

    #[test]
    fn distinct_bio_counting() {
        let data = vec![
            (user("a"), phrases(&["wife"])),
            (user("b"), phrases(&["wife", "mom", "mom"])),
        ];
        let idx = index_of(&data);
        assert_eq!(idx.bio_count("wife"), 2);
        assert_eq!(idx.bio_count("mom"), 1);
        assert_eq!(idx.bio_count("dad"), 0);
        assert_eq!(idx.n_bios(), 2);
    }

    #[test]
    fn category_tally_skips_missing() {
        let mut m = user("m");
        m.sex = Some(Sex::Male);
        let mut f = user("f");
        f.sex = Some(Sex::Female);
        let x = user("x");
        let data = vec![
            (m, phrases(&["father"])),
            (f, phrases(&["mother"])),
            (x, phrases(&["father"])),
        ];
        let idx = index_of(&data);
        let father = idx.get("father").unwrap();
        assert_eq!(father.bio_count, 2);
        assert_eq!(father.count(Category::Sex(Sex::Male)), 1);
        assert_eq!(father.count(Category::Sex(Sex::Female)), 0);
        assert_eq!(idx.category_total(Category::Sex(Sex::Female)), 1);
    }

    #[test]
    fn continuous_sums() {
        let mut a = user("a");
        a.age = Some(20.0);
        a.friends = Some(0);
        a.followers = Some(0);
        let mut b = user("b");
        b.age = Some(22.0);
        let data = vec![(a, phrases(&["gamer"])), (b, phrases(&["gamer"]))];
        let idx = index_of(&data);
        let s = idx.get("gamer").unwrap();
        assert_eq!(s.mean(ContinuousAttr::Age), Some(21.0));
        assert_eq!(s.mean(ContinuousAttr::FriendFollowerRatio), Some(0.0));
        assert_eq!(s.mean(ContinuousAttr::PctRural), None);
    }

    fn sample_data() -> Vec<(UserRecord, Vec<PhraseRecord>)> {
        (0..30)
            .map(|i| {
                let mut u = user(&format!("u{i}"));
                u.sex = [Some(Sex::Male), Some(Sex::Female), None][i % 3];
                u.age = Some(i as f64);
                let pool = ["wife", "mom", "dad", "runner", "coach", "writer"];
                let ps: Vec<&str> = (0..(i % 4)).map(|k| pool[(i * 7 + k * 3) % 6]).collect();
                (u, phrases(&ps))
            })
            .collect()
    }

    #[test]
    fn sharded_merge_equals_sequential() {
        let data = sample_data();
        let sequential = index_of(&data);
        let shard = |range: std::ops::Range<usize>| {
            let mut b = IndexBuilder::new();
            for (u, p) in &data[range] {
                b.add(u, p);
            }
            b
        };
        let left_first = shard(0..10)
            .merge(shard(10..20))
            .merge(shard(20..30))
            .finish();
        let right_first = shard(0..10)
            .merge(shard(10..20).merge(shard(20..30)))
            .finish();
        assert_eq!(left_first, sequential);
        assert_eq!(right_first, sequential);
    }

    #[test]
    fn permutation_leaves_stats_unchanged() {
        let data = sample_data();
        let mut rev = data.clone();
        rev.reverse();
        assert_eq!(index_of(&data).stats(), index_of(&rev).stats());
    }

    #[test]
    fn files_round_trip() {
        let idx = index_of(&sample_data());
        let (mut stats, mut postings) = (Vec::new(), Vec::new());
        idx.write_stats(&mut stats).unwrap();
        idx.write_postings(&mut postings).unwrap();
        let back = IdentifierIndex::read(stats.as_slice(), Some(postings.as_slice()), idx.n_bios())
            .unwrap();
        assert_eq!(back, idx);
        let stats_only = IdentifierIndex::read(stats.as_slice(), None::<&[u8]>, 0).unwrap();
        assert_eq!(stats_only.stats(), idx.stats());
    }

    #[test]
    fn full_toy_matrix() {
        let data = vec![
            (user("u1"), phrases(&["aaa", "bbb", "ccc"])),
            (user("u2"), phrases(&["aaa", "bbb", "ccc"])),
            (user("u3"), phrases(&["aaa", "bbb", "ccc"])),
        ];
        let m = build_matrix(&index_of(&data), 0, 0).unwrap();
        assert_eq!((m.n_rows(), m.n_cols(), m.nnz()), (3, 3, 9));
        assert!(m.values.iter().all(|&v| v == 1));
    }

    #[test]
    fn pruning_reaches_fixpoint() {
        // u4 has a single identifier and is dropped; "ddd" then has one bio
        // and falls under min_bio_count = 1.
        let data = vec![
            (user("u1"), phrases(&["aaa", "bbb"])),
            (user("u2"), phrases(&["aaa", "ccc", "ddd"])),
            (user("u3"), phrases(&["bbb", "ccc"])),
            (user("u4"), phrases(&["ddd"])),
        ];
        let idx = index_of(&data);
        let m = build_matrix(&idx, 1, 1).unwrap();
        assert_eq!(m.rows, vec!["aaa", "bbb", "ccc"]);
        assert_eq!(m.cols, vec!["u1", "u2", "u3"]);
        for (deg, min) in [(m.row_sums(), 1), (m.col_sums(), 1)] {
            assert!(deg.iter().all(|&d| d > min));
        }
    }

    #[test]
    fn empty_after_pruning() {
        let data = vec![(user("u1"), phrases(&["aaa"]))];
        assert!(matches!(
            build_matrix(&index_of(&data), 0, 1),
            Err(Error::EmptyMatrix)
        ));
    }

    #[test]
    fn coo_dump() {
        let m = BipartiteMatrix::from_pairs(
            vec!["r0".into(), "r1".into()],
            vec!["c0".into(), "c1".into()],
            &[(1, 0), (0, 1), (0, 1)],
        );
        let mut out = Vec::new();
        m.write_coo(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "row\tcol\tvalue\n0\t1\t1\n1\t0\t1\n"
        );
    }
}
