//! Seeded synthetic post corpora with planted topical hashtag groups.

use chrono::{Duration, NaiveDate, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::PostRecord;

/// Shape of a synthetic corpus.
///
/// Hashtags are split into `groups` topics of `group_size` each. Every topic
/// owns a vocabulary, a pool of users and a pool of URLs; a post picks one
/// topic and draws everything from it. From day `shift_day` (0-based)
/// onward the hashtags are re-dealt into new topics, so each new topic mixes
/// hashtags from every old one.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSpec {
    pub start: NaiveDate,
    pub days: usize,
    pub posts_per_day: usize,
    pub groups: usize,
    pub group_size: usize,
    pub hashtags_per_post: usize,
    pub words_per_post: usize,
    pub users_per_group: usize,
    pub shift_day: usize,
    /// Chance that a post swaps one hashtag for a random one of any topic.
    pub stray_rate: f64,
    pub seed: u64,
}

impl Default for CorpusSpec {
    /// The bundled toy corpus: 3 days of 67 posts, shifting on day 3.
    fn default() -> Self {
        Self {
            start: NaiveDate::from_ymd_opt(2020, 3, 1).expect("valid date"),
            days: 3,
            posts_per_day: 67,
            groups: 3,
            group_size: 6,
            hashtags_per_post: 2,
            words_per_post: 8,
            users_per_group: 8,
            shift_day: 2,
            stray_rate: 0.1,
            seed: 2020,
        }
    }
}

const TOPIC_WORDS: usize = 12;
const SHARED_WORDS: [&str; 6] = ["the", "today", "news", "people", "update", "now"];

/// Topic of each hashtag before and after the shift.
pub fn planted_topics(spec: &CorpusSpec) -> (Vec<usize>, Vec<usize>) {
    let n = spec.groups * spec.group_size;
    let before: Vec<usize> = (0..n).map(|h| h / spec.group_size).collect();
    // Deal hashtags round-robin so every new topic takes from every old one.
    let after: Vec<usize> = (0..n).map(|h| h % spec.groups).collect();
    (before, after)
}

pub fn hashtag_name(h: usize) -> String {
    format!("tag{h:02}")
}

pub fn generate(spec: &CorpusSpec) -> Vec<PostRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (before, after) = planted_topics(spec);
    let mut posts = Vec::with_capacity(spec.days * spec.posts_per_day);
    for day in 0..spec.days {
        let shifted = day >= spec.shift_day;
        let topic_of = if shifted { &after } else { &before };
        // Topic identities (words, users, urls) are fresh after the shift.
        let era = usize::from(shifted);
        let members: Vec<Vec<usize>> = (0..spec.groups)
            .map(|g| (0..topic_of.len()).filter(|&h| topic_of[h] == g).collect())
            .collect();
        let midnight = Utc.from_utc_datetime(
            &(spec.start + Duration::days(day as i64))
                .and_hms_opt(0, 0, 0)
                .expect("valid time"),
        );
        for p in 0..spec.posts_per_day {
            let g = rng.gen_range(0..spec.groups);
            let mut picked: Vec<usize> = members[g]
                .choose_multiple(&mut rng, spec.hashtags_per_post.min(members[g].len()))
                .copied()
                .collect();
            if rng.gen_bool(spec.stray_rate) {
                let stray = rng.gen_range(0..topic_of.len());
                if !picked.contains(&stray) {
                    picked[0] = stray;
                }
            }
            let tags: Vec<String> = picked.into_iter().map(hashtag_name).collect();
            let user = format!(
                "user_e{era}_g{g}_{}",
                rng.gen_range(0..spec.users_per_group)
            );
            let mut words: Vec<String> = (0..spec.words_per_post)
                .map(|_| {
                    if rng.gen_bool(0.2) {
                        SHARED_WORDS[rng.gen_range(0..SHARED_WORDS.len())].to_string()
                    } else {
                        format!("w{era}{g}x{}", rng.gen_range(0..TOPIC_WORDS))
                    }
                })
                .collect();
            let mut urls = Vec::new();
            if rng.gen_bool(0.5) {
                let url = format!("https://news{era}{g}.example/a{}", rng.gen_range(0..4));
                words.push(url.clone());
                urls.push(url);
            }
            let mut text = String::new();
            if rng.gen_bool(0.25) {
                text.push_str(&format!("RT @{user}: "));
            }
            text.push_str(&words.join(" "));
            for t in &tags {
                text.push_str(&format!(" #{t}"));
            }
            if rng.gen_bool(0.3) {
                text.push_str("!!");
            }
            let seconds = rng.gen_range(0..86_400);
            posts.push(PostRecord {
                post_id: format!("d{day}p{p:03}"),
                timestamp: midnight + Duration::seconds(seconds),
                user_id: user,
                text,
                hashtags: tags,
                urls,
            });
        }
    }
    posts
}

/// JSON-lines rendering, one post per line.
pub fn to_jsonl(posts: &[PostRecord]) -> String {
    let mut out = String::new();
    for p in posts {
        out.push_str(&serde_json::to_string(p).expect("post serialises"));
        out.push('\n');
    }
    out
}
