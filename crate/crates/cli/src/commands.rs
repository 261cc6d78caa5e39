use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use bioid::annotation::{self, AnnotationItem};
use bioid::cocluster::{self, CoClusterConfig};
use bioid::corpus::{self, AllowedLanguages, CorpusReader, FilterReport, Schema, UserRecord};
use bioid::extractor::{extract_with, PhraseLimits, PhraseRecord, RuleSet};
use bioid::index::{build_matrix, BipartiteMatrix, ContinuousAttr, IdentifierIndex, IndexBuilder};
use bioid::lexicon::{self, Lexicon};
use bioid::stats::{self, Contrast, Side};
use bioid::tsv;

use crate::output::{Output, Writer};
use crate::{
    CliError, ClusterArgs, ContinuousArgs, ContrastArgs, CorrelateArgs, ExtractArgs, IndexArgs,
    InputFormat, MeaningArgs, OverlapArgs, PhraseSource, ProbArgs, ReliabilityArgs, ReportArgs,
    RulesArg, StratifiedArgs,
};

type Result<T> = std::result::Result<T, CliError>;

const CHUNK: usize = 1 << 14;
const PHRASE_HEADER: [&str; 4] = ["user_id", "position", "phrase", "token_count"];

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::io(path, e))
}

fn load_rules(arg: &RulesArg) -> Result<RuleSet> {
    Ok(match &arg.rules {
        Some(path) => RuleSet::load(path)?,
        None => RuleSet::default(),
    })
}

fn schema_for(path: &Path, format: InputFormat) -> Schema {
    let format = match format {
        InputFormat::Auto => match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "json" | "ndjson") => InputFormat::Jsonl,
            Some("tsv") => InputFormat::Tsv,
            _ => InputFormat::Text,
        },
        f => f,
    };
    match format {
        InputFormat::Jsonl => Schema::JsonLines,
        InputFormat::Tsv => Schema::tsv::<&str>(&[]),
        _ => Schema::Text,
    }
}

fn write_phrases(w: &mut Writer, user: &str, phrases: &[PhraseRecord]) -> Result<()> {
    for p in phrases {
        w.row(&[
            user,
            &p.position.to_string(),
            &p.text,
            &p.token_count.to_string(),
        ])?;
    }
    Ok(())
}

pub fn extract(args: &ExtractArgs) -> Result<()> {
    let rules = load_rules(&args.rules)?;
    let allowed = if args.all_languages {
        AllowedLanguages::any()
    } else {
        AllowedLanguages::new(&args.languages)
    };
    let schema = schema_for(&args.input, args.format);
    let mut reader = CorpusReader::new(open(&args.input)?, schema, allowed);
    let mut out = Output::create(&args.output, "extract", None)?;
    let mut phrases = out.file("phrases.tsv")?;
    phrases.row(&PHRASE_HEADER)?;
    let mut users = out.file("users.tsv")?;
    users.row(corpus::FIELDS)?;
    let mut candidates = if args.candidates {
        let mut w = out.file("candidates.tsv")?;
        w.row(&PHRASE_HEADER)?;
        Some(w)
    } else {
        None
    };
    let mut n_phrases = 0u64;
    loop {
        let chunk: Vec<UserRecord> = reader.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        let extracted: Vec<(Vec<PhraseRecord>, Vec<PhraseRecord>)> = chunk
            .par_iter()
            .map(|u| {
                let short = extract_with(&u.bio, &rules, PhraseLimits::default());
                let long = if args.candidates {
                    extract_with(&u.bio, &rules, PhraseLimits::unbounded())
                } else {
                    Vec::new()
                };
                (short, long)
            })
            .collect();
        for (user, (short, long)) in chunk.iter().zip(extracted) {
            users.row(&corpus::record_cells(user))?;
            write_phrases(&mut phrases, &user.user_id, &short)?;
            n_phrases += short.len() as u64;
            if let Some(w) = candidates.as_mut() {
                write_phrases(w, &user.user_id, &long)?;
            }
        }
    }
    if let Some(e) = reader.take_fatal() {
        return Err(e.into());
    }
    for e in reader.errors() {
        log::warn!("{}: {e}", args.input.display());
    }
    let report = reader.report();
    phrases.finish()?;
    users.finish()?;
    if let Some(w) = candidates {
        w.finish()?;
    }
    log::info!(
        "{} of {} bios retained, {n_phrases} phrases",
        report.n_retained,
        report.n_input
    );
    out.json("filter_report.json", &report)?;
    out.manifest(args, &[&args.input])
}

/// Lines of a TSV file with `#` comments dropped; the first is the header.
fn data_lines(path: &Path) -> Result<impl Iterator<Item = (usize, std::io::Result<String>)>> {
    Ok(open(path)?
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !matches!(l, Ok(s) if s.starts_with('#') || s.is_empty())))
}

#[derive(Serialize, Deserialize)]
struct IndexMeta {
    n_bios: u64,
    n_users_with_identifiers: usize,
    n_identifiers: usize,
}

pub fn index(args: &IndexArgs) -> Result<()> {
    let users_path = args.input.join("users.tsv");
    let phrases_path = args.input.join(match args.source {
        PhraseSource::Phrases => "phrases.tsv",
        PhraseSource::Candidates => "candidates.tsv",
    });
    let mut user_lines = data_lines(&users_path)?;
    let header = match user_lines.next() {
        Some((_, line)) => line.map_err(|e| CliError::io(&users_path, e))?,
        None => {
            return Err(CliError::Usage(format!(
                "{} is empty",
                users_path.display()
            )))
        }
    };
    let schema = Schema::tsv(&header.split('\t').collect::<Vec<_>>());
    let mut phrase_lines = data_lines(&phrases_path)?.peekable();
    match phrase_lines.next() {
        Some((_, Ok(h))) if h.split('\t').eq(PHRASE_HEADER) => {}
        _ => {
            return Err(CliError::Usage(format!(
                "{} lacks the phrase header",
                phrases_path.display()
            )))
        }
    }
    let parse_phrase = |line_no: usize, line: &str| -> Result<(String, PhraseRecord)> {
        let cells: Vec<String> = line.split('\t').map(tsv::unescape).collect();
        if cells.len() != 4 {
            return Err(bioid::Error::Record {
                line: line_no,
                message: format!("{}: expected 4 cells", phrases_path.display()),
            }
            .into());
        }
        Ok((
            cells[0].clone(),
            PhraseRecord {
                text: cells[2].clone(),
                token_count: tsv::parse_cell(&cells[3], line_no, "token_count")?,
                source_user: cells[0].clone(),
                position: tsv::parse_cell(&cells[1], line_no, "position")?,
            },
        ))
    };

    let mut builder = IndexBuilder::new();
    let mut n_bios = 0u64;
    let mut pending: Option<(String, PhraseRecord)> = None;
    for (line_no, line) in user_lines {
        let line = line.map_err(|e| CliError::io(&users_path, e))?;
        let user = corpus::parse_user_record(&line, line_no, &schema)?;
        n_bios += 1;
        let mut mine = Vec::new();
        loop {
            if pending.is_none() {
                match phrase_lines.next() {
                    Some((n, l)) => {
                        let l = l.map_err(|e| CliError::io(&phrases_path, e))?;
                        pending = Some(parse_phrase(n, &l)?);
                    }
                    None => break,
                }
            }
            match pending.take() {
                Some((uid, p)) if uid == user.user_id => mine.push(p),
                other => {
                    pending = other;
                    break;
                }
            }
        }
        builder.add(&user, &mine);
    }
    if let Some((uid, _)) = pending {
        return Err(CliError::Usage(format!(
            "{}: phrases for `{uid}` do not follow users.tsv order",
            phrases_path.display()
        )));
    }
    let idx = builder.finish();
    let meta = IndexMeta {
        n_bios,
        n_users_with_identifiers: idx.users().len(),
        n_identifiers: idx.len(),
    };
    log::info!("{} identifiers from {n_bios} bios", idx.len());
    let mut out = Output::create(&args.output, "index", None)?;
    let mut w = out.file("index.tsv")?;
    idx.write_stats(&mut w)?;
    w.finish()?;
    let mut w = out.file("postings.tsv")?;
    idx.write_postings(&mut w)?;
    w.finish()?;
    out.json("index_meta.json", &meta)?;
    out.manifest(args, &[&users_path, &phrases_path])
}

fn load_index(dir: &Path, with_postings: bool) -> Result<IdentifierIndex> {
    let meta_path = dir.join("index_meta.json");
    let meta: IndexMeta = serde_json::from_reader(open(&meta_path)?)?;
    let stats = open(&dir.join("index.tsv"))?;
    let postings = if with_postings {
        Some(open(&dir.join("postings.tsv"))?)
    } else {
        None
    };
    Ok(IdentifierIndex::read(stats, postings, meta.n_bios)?)
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

pub fn contrast(args: &ContrastArgs) -> Result<()> {
    let idx = load_index(&args.index, false)?;
    let contrast = Contrast::parse(&args.attribute)?;
    let name = format!("contrast_{}.tsv", args.attribute.replace(':', "_"));
    let mut out = Output::create(&args.output, "contrast", None)?;
    let mut w = out.file(&name)?;
    w.row(&[
        "side",
        "group",
        "rank",
        "phrase",
        "bio_count",
        "count_a",
        "count_b",
        "raw_log_odds",
        "normalized_log_odds",
    ])?;
    for (side, label) in [(Side::A, &contrast.label_a), (Side::B, &contrast.label_b)] {
        let ranked =
            stats::rank_by_category(&idx, &contrast, side, args.top, args.min_bios, args.prior);
        for (rank, r) in ranked.iter().enumerate() {
            let c = &r.contrast;
            w.row(&[
                if side == Side::A { "a" } else { "b" },
                label,
                &(rank + 1).to_string(),
                &c.phrase,
                &r.bio_count.to_string(),
                &c.count_a.to_string(),
                &c.count_b.to_string(),
                &fmt(c.raw_log_odds),
                &fmt(c.normalized_log_odds),
            ])?;
        }
    }
    w.finish()?;
    out.manifest(args, &[&args.index])
}

pub fn continuous(args: &ContinuousArgs) -> Result<()> {
    let idx = load_index(&args.index, false)?;
    let attr = ContinuousAttr::parse(&args.attribute)?;
    let mut out = Output::create(&args.output, "continuous", None)?;
    let mut w = out.file(&format!("continuous_{}.tsv", attr.name()))?;
    w.row(&["side", "rank", "phrase", "mean", "n", "bio_count"])?;
    for (side, label) in [(Side::A, "high"), (Side::B, "low")] {
        let ranked =
            stats::continuous_mean_ranking::<f64>(&idx, attr, side, args.top, args.min_bios);
        for (rank, r) in ranked.iter().enumerate() {
            w.row(&[
                label,
                &(rank + 1).to_string(),
                &r.phrase,
                &fmt(r.mean),
                &r.n.to_string(),
                &r.bio_count.to_string(),
            ])?;
        }
    }
    w.finish()?;
    out.manifest(args, &[&args.index])
}

#[derive(Serialize)]
struct ClusterInfo {
    n_identifiers: usize,
    n_users: usize,
    nnz: usize,
    k: usize,
    n_singular_vectors: usize,
    objective: f64,
}

pub fn cluster(args: &ClusterArgs) -> Result<()> {
    let idx = load_index(&args.index, true)?;
    let m: BipartiteMatrix = build_matrix(&idx, args.min_bio_count, args.min_user_identifiers)?;
    log::info!(
        "matrix {} x {}, {} entries",
        m.n_rows(),
        m.n_cols(),
        m.nnz()
    );
    let mut cfg = CoClusterConfig::new(args.k);
    cfg.n_singular_vectors = args.singular_vectors;
    cfg.kmeans_restarts = args.restarts;
    cfg.max_iterations = args.max_iterations;
    cfg.seed = args.seed;
    let result = cocluster::spectral_cocluster::<f64>(&m, &cfg)?;

    let mut out = Output::create(&args.output, "cluster", Some(args.seed))?;
    let mut w = out.file("identifier_clusters.tsv")?;
    cocluster::write_assignments(&mut w, ["phrase", "cluster"], &m.rows, &result.row_labels)?;
    w.finish()?;
    let mut w = out.file("user_clusters.tsv")?;
    cocluster::write_assignments(&mut w, ["user_id", "cluster"], &m.cols, &result.col_labels)?;
    w.finish()?;
    let mut w = out.file("cluster_summary.tsv")?;
    w.row(&[
        "cluster",
        "n_identifiers",
        "n_users",
        "rank",
        "phrase",
        "bio_count",
    ])?;
    for s in cocluster::cluster_summary(&idx, &m, &result, args.top) {
        for (rank, (phrase, count)) in s.top.iter().enumerate() {
            w.row(&[
                s.cluster.to_string(),
                s.n_identifiers.to_string(),
                s.n_users.to_string(),
                (rank + 1).to_string(),
                phrase.clone(),
                count.to_string(),
            ])?;
        }
    }
    w.finish()?;
    out.json(
        "cluster.json",
        &ClusterInfo {
            n_identifiers: m.n_rows(),
            n_users: m.n_cols(),
            nnz: m.nnz(),
            k: args.k,
            n_singular_vectors: cfg.singular_vectors(),
            objective: result.objective,
        },
    )?;
    out.manifest(args, &[&args.index])
}

fn lexicon_specs(specs: &[String]) -> Vec<(String, PathBuf)> {
    specs
        .iter()
        .map(|s| match s.split_once('=') {
            Some((name, path)) if !name.is_empty() => (name.to_string(), PathBuf::from(path)),
            _ => {
                let path = PathBuf::from(s);
                let name = path
                    .file_stem()
                    .map_or_else(|| s.clone(), |n| n.to_string_lossy().into_owned());
                (name, path)
            }
        })
        .collect()
}

fn load_lexicons(specs: &[String], rules: &RuleSet) -> Result<Vec<(Lexicon<f64>, PathBuf)>> {
    lexicon_specs(specs)
        .into_iter()
        .map(|(name, path)| Ok((lexicon::load_lexicon(&path, &name, rules)?, path)))
        .collect()
}

pub fn overlap(args: &OverlapArgs) -> Result<()> {
    let idx = load_index(&args.index, false)?;
    let rules = load_rules(&args.rules)?;
    let lexicons = load_lexicons(&args.lexicons, &rules)?;
    let thresholds = if args.thresholds.is_empty() {
        let max = idx.stats().iter().map(|s| s.bio_count).max().unwrap_or(0);
        let mut grid = vec![0];
        grid.extend(
            lexicon::log_thresholds(max, args.per_decade.max(1))
                .into_iter()
                .filter(|&t| t > 0),
        );
        grid
    } else {
        args.thresholds.clone()
    };
    let mut out = Output::create(&args.output, "overlap", None)?;
    let mut w = out.file("overlap.tsv")?;
    w.row(&["lexicon", "threshold", "n_remaining", "fraction"])?;
    for (lex, _) in &lexicons {
        let curve = lexicon::overlap_curve(&idx, lex, &thresholds, args.min_remaining)?;
        for i in 0..curve.len() {
            w.row(&[
                lex.name.clone(),
                curve.thresholds[i].to_string(),
                curve.n_remaining[i].to_string(),
                fmt(curve.fractions[i]),
            ])?;
        }
    }
    w.finish()?;
    let mut inputs: Vec<&Path> = vec![&args.index];
    inputs.extend(lexicons.iter().map(|(_, p)| p.as_path()));
    out.manifest(args, &inputs)
}

pub fn meaning(args: &MeaningArgs) -> Result<()> {
    let idx = load_index(&args.index, false)?;
    let rules = load_rules(&args.rules)?;
    let lexicons = load_lexicons(&args.lexicons, &rules)?;
    let mut out = Output::create(&args.output, "meaning", Some(args.seed))?;
    let mut w = out.file("meaning.tsv")?;
    w.row(&[
        "lexicon",
        "dimension",
        "side",
        "n",
        "mean",
        "lower",
        "upper",
    ])?;
    for (lex, _) in &lexicons {
        let rows =
            lexicon::meaning_comparison(&idx, lex, args.resamples, args.confidence, args.seed)?;
        for d in rows {
            for (side, n, ci) in [
                ("present", d.n_present, d.present),
                ("absent", d.n_absent, d.absent),
            ] {
                let Some(ci) = ci else { continue };
                w.row(&[
                    lex.name.clone(),
                    d.dimension.clone(),
                    side.to_string(),
                    n.to_string(),
                    fmt(ci.mean),
                    fmt(ci.lower),
                    fmt(ci.upper),
                ])?;
            }
        }
    }
    w.finish()?;
    let mut inputs: Vec<&Path> = vec![&args.index];
    inputs.extend(lexicons.iter().map(|(_, p)| p.as_path()));
    out.manifest(args, &inputs)
}

fn write_sample_files(out: &mut Output, items: &[AnnotationItem]) -> Result<()> {
    let mut blind = out.file("sample.tsv")?;
    let mut key = out.file("sample_key.tsv")?;
    annotation::write_sample(items, &mut blind, &mut key)?;
    blind.finish()?;
    key.finish()
}

pub fn sample_stratified(args: &StratifiedArgs) -> Result<()> {
    let idx = load_index(&args.index, false)?;
    let long = args
        .long_index
        .as_deref()
        .map(|p| load_index(p, false))
        .transpose()?;
    let items = annotation::stratified_sample(&idx, long.as_ref(), args.per_cell, args.seed)?;
    let mut out = Output::create(&args.output, "sample-stratified", Some(args.seed))?;
    write_sample_files(&mut out, &items)?;
    let mut inputs: Vec<&Path> = vec![&args.index];
    inputs.extend(args.long_index.as_deref());
    out.manifest(args, &inputs)
}

pub fn sample_prob(args: &ProbArgs) -> Result<()> {
    let idx = load_index(&args.index, false)?;
    let items = annotation::probabilistic_sample(&idx, args.n, args.seed)?;
    let mut out = Output::create(&args.output, "sample-prob", Some(args.seed))?;
    write_sample_files(&mut out, &items)?;
    out.manifest(args, &[&args.index])
}

#[derive(Serialize)]
struct ReliabilitySummary {
    annotators: Vec<String>,
    n_items: usize,
    n_labelled: usize,
    alpha_all: Option<f64>,
    n_pairable_all: usize,
    alpha_excluding_unclear: Option<f64>,
    n_pairable_excluding_unclear: usize,
}

pub fn reliability(args: &ReliabilityArgs) -> Result<()> {
    let items = annotation::read_sample_key(open(&args.key)?)?;
    let mut labels = Vec::new();
    for path in &args.labels {
        labels.extend(annotation::read_labels(open(path)?)?);
    }
    let report = annotation::merge_annotations(&items, &labels, args.confidence)?;
    let mut out = Output::create(&args.output, "reliability", None)?;
    let mut w = out.file("proportions.tsv")?;
    w.row(&[
        "dimension",
        "bucket",
        "n_items",
        "label",
        "count",
        "proportion",
        "lower",
        "upper",
    ])?;
    for b in &report.buckets {
        for (label, est) in [("yes", &b.yes), ("no", &b.no), ("unclear", &b.unclear)] {
            w.row(&[
                b.dimension.to_string(),
                b.bucket.clone(),
                b.n_items.to_string(),
                label.to_string(),
                est.successes.to_string(),
                fmt(est.point),
                fmt(est.lower),
                fmt(est.upper),
            ])?;
        }
    }
    w.finish()?;
    out.json(
        "reliability.json",
        &ReliabilitySummary {
            annotators: report.annotators.clone(),
            n_items: items.len(),
            n_labelled: report.n_labelled,
            alpha_all: report.alpha_all,
            n_pairable_all: report.n_pairable_all,
            alpha_excluding_unclear: report.alpha_excluding_unclear,
            n_pairable_excluding_unclear: report.n_pairable_excluding_unclear,
        },
    )?;
    let mut inputs: Vec<&Path> = vec![&args.key];
    inputs.extend(args.labels.iter().map(PathBuf::as_path));
    out.manifest(args, &inputs)
}

#[derive(Serialize)]
struct Correlation {
    n_identifiers_a: usize,
    n_identifiers_b: usize,
    n_shared: usize,
    n_union: usize,
    pearson: f64,
}

pub fn correlate(args: &CorrelateArgs) -> Result<()> {
    let [a, b] = args.indexes.as_slice() else {
        return Err(CliError::Usage(
            "correlate needs exactly two --index directories".into(),
        ));
    };
    let ia = load_index(a, false)?;
    let ib = load_index(b, false)?;
    let r = stats::count_correlation::<f64>(&ia, &ib)?;
    let shared = ia
        .stats()
        .iter()
        .filter(|s| ib.get(&s.phrase).is_some())
        .count();
    let mut out = Output::create(&args.output, "correlate", None)?;
    out.json(
        "correlation.json",
        &Correlation {
            n_identifiers_a: ia.len(),
            n_identifiers_b: ib.len(),
            n_shared: shared,
            n_union: ia.len() + ib.len() - shared,
            pearson: r,
        },
    )?;
    out.manifest(args, &[a.as_path(), b.as_path()])
}

#[derive(Serialize)]
struct Report {
    n_bios: u64,
    n_bios_with_identifier: usize,
    share_with_identifier: f64,
    n_distinct_identifiers: usize,
    n_occurrences: u64,
    mean_identifiers_per_bio: f64,
    identifiers_by_token_count: BTreeMap<usize, usize>,
    top_identifiers: Vec<(String, u64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    filter_report: Option<FilterReport>,
}

pub fn report(args: &ReportArgs) -> Result<()> {
    let idx = load_index(&args.index, false)?;
    let meta: IndexMeta = serde_json::from_reader(open(&args.index.join("index_meta.json"))?)?;
    let occurrences: u64 = idx.stats().iter().map(|s| s.bio_count).sum();
    let mut by_tokens = BTreeMap::new();
    for s in idx.stats() {
        *by_tokens.entry(s.token_count).or_insert(0) += 1;
    }
    let mut top: Vec<(String, u64)> = idx
        .stats()
        .iter()
        .map(|s| (s.phrase.clone(), s.bio_count))
        .collect();
    top.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    top.truncate(args.top);
    let filter_report = match &args.extract {
        Some(dir) => Some(serde_json::from_reader(open(
            &dir.join("filter_report.json"),
        )?)?),
        None => None,
    };
    let per_bio = |x: f64| {
        if meta.n_bios == 0 {
            0.0
        } else {
            x / meta.n_bios as f64
        }
    };
    let report = Report {
        n_bios: meta.n_bios,
        n_bios_with_identifier: meta.n_users_with_identifiers,
        share_with_identifier: per_bio(meta.n_users_with_identifiers as f64),
        n_distinct_identifiers: idx.len(),
        n_occurrences: occurrences,
        mean_identifiers_per_bio: per_bio(occurrences as f64),
        identifiers_by_token_count: by_tokens,
        top_identifiers: top,
        filter_report,
    };
    let mut out = Output::create(&args.output, "report", None)?;
    out.json("report.json", &report)?;
    let mut inputs: Vec<&Path> = vec![&args.index];
    inputs.extend(args.extract.as_deref());
    out.manifest(args, &inputs)
}
