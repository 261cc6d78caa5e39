#![allow(dead_code)]

use std::io::Write;
use std::path::Path;

use bioid::corpus::{Party, Race, Sex, UserRecord};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Identity phrases per synthetic community. Users mostly draw from their
/// own community, so the communities show up as co-clusters and contrasts.
pub const GROUPS: [&[&str]; 3] = [
    &[
        "proud dad",
        "husband",
        "golfer",
        "veteran",
        "army strong",
        "cowboys fan",
        "hunter",
        "fisherman",
        "truck driver",
        "retired firefighter",
        "grandpa",
        "bbq lover",
        "gun owner",
        "patriot",
        "farmer",
    ],
    &[
        "mom",
        "wife",
        "teacher",
        "nurse",
        "dog mom",
        "yoga",
        "book lover",
        "coffee addict",
        "crossfit",
        "grandma",
        "mother of three",
        "she/her",
        "bible study",
        "volunteer",
        "gardener",
    ],
    &[
        "software engineer",
        "phd student",
        "data scientist",
        "writer",
        "musician",
        "photographer",
        "designer",
        "runner",
        "vegan",
        "activist",
        "they/them",
        "podcaster",
        "gamer",
        "climber",
        "traveler",
    ],
];

pub const SHARED: &[&str] = &[
    "christian",
    "dreamer",
    "sports fan",
    "foodie",
    "blessed",
    "texan",
];

const DELIMITERS: &[&str] = &[", ", " | ", ". ", " • ", "; ", " ~ "];
const FILLERS: &[&str] = &[
    "views my own",
    "living my best life every day",
    "follow for more",
    "tweets are not endorsements",
];

/// A bio of identity phrases joined by delimiters, with some noise.
pub fn bio<R: Rng>(rng: &mut R, group: usize) -> String {
    let n = rng.gen_range(3..=7);
    let mut parts: Vec<String> = Vec::with_capacity(n + 1);
    for _ in 0..n {
        let phrase = if rng.gen_bool(0.85) {
            GROUPS[group].choose(rng).unwrap()
        } else if rng.gen_bool(0.5) {
            SHARED.choose(rng).unwrap()
        } else {
            GROUPS[rng.gen_range(0..GROUPS.len())].choose(rng).unwrap()
        };
        let mut p = phrase.to_string();
        match rng.gen_range(0..20) {
            0 => p = format!("I love {p}"),
            1 => p = p.to_uppercase(),
            2 => p = format!("{p} 🇺🇸"),
            _ => {}
        }
        parts.push(p);
    }
    if rng.gen_bool(0.3) {
        // long tail of rare identifiers
        parts.push(format!("local {}", rng.gen_range(0..200_000)));
    }
    if rng.gen_bool(0.5) {
        parts.push(FILLERS.choose(rng).unwrap().to_string());
    }
    let mut out = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            out.push_str(DELIMITERS.choose(rng).unwrap());
        }
        out.push_str(p);
    }
    out
}

/// User `i` of a synthetic corpus, with demographic attributes skewed by
/// community. About 2% post in a language outside en/es.
pub fn user<R: Rng>(rng: &mut R, i: usize) -> UserRecord {
    let group = i % GROUPS.len();
    let mut u = UserRecord::new(format!("u{i:07}"), bio(rng, group));
    u.last_status_lang = Some(if rng.gen_bool(0.02) { "fr" } else { "en" }.to_string());
    u.verified = Some(rng.gen_bool(0.01));
    u.followers = Some(rng.gen_range(0..5000));
    u.friends = Some(rng.gen_range(0..2000));
    u.statuses = Some(rng.gen_range(0..50_000));
    let male_p = [0.85, 0.15, 0.5][group];
    u.sex = Some(if rng.gen_bool(male_p) {
        Sex::Male
    } else {
        Sex::Female
    });
    let dem_p = [0.2, 0.5, 0.8][group];
    u.party = Some(if rng.gen_bool(dem_p) {
        Party::Democrat
    } else {
        Party::Republican
    });
    u.race = Some(if rng.gen_bool(0.7) {
        Race::White
    } else {
        Race::Black
    });
    let base = [55.0, 42.0, 28.0][group];
    u.age = Some(base + rng.gen_range(-8.0..8.0f64).round());
    u.pct_rural = Some(rng.gen_range(0.0..1.0f64));
    if rng.gen_bool(0.05) {
        u.age = None;
    }
    u
}

pub fn users(n: usize, seed: u64) -> Vec<UserRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|i| user(&mut rng, i)).collect()
}

/// Streams `n` synthetic users to a JSON-lines file.
pub fn write_synthetic(path: &Path, n: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = std::io::BufWriter::new(std::fs::File::create(path).unwrap());
    for i in 0..n {
        serde_json::to_writer(&mut w, &user(&mut rng, i)).unwrap();
        w.write_all(b"\n").unwrap();
    }
    w.flush().unwrap();
}

pub fn write_jsonl(path: &Path, users: &[UserRecord]) {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path).unwrap());
    for u in users {
        serde_json::to_writer(&mut w, u).unwrap();
        w.write_all(b"\n").unwrap();
    }
    w.flush().unwrap();
}
