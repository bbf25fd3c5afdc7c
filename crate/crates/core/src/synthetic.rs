//! Seeded synthetic corpora with a known answer: a handful of "planted"
//! dates carry bursts of coverage while scattered noise dates carry one or
//! two sentences each.

use chrono::{Datelike, Duration, NaiveDate};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Article, Timeline, TimelineEntry, Topic};

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedSpec {
    pub start: NaiveDate,
    pub days: usize,
    pub planted: usize,
    pub articles_per_planted: usize,
    pub sentences_per_article: usize,
    pub noise_dates: usize,
    pub max_noise_sentences: usize,
}

impl Default for PlantedSpec {
    /// 60 days, 5 planted dates of 4 × 5 = 20 sentences, 8 noise dates of
    /// at most 2 sentences.
    fn default() -> Self {
        PlantedSpec {
            start: NaiveDate::from_ymd_opt(2021, 3, 1).unwrap(),
            days: 60,
            planted: 5,
            articles_per_planted: 4,
            sentences_per_article: 5,
            noise_dates: 8,
            max_noise_sentences: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedCorpus {
    pub topic: Topic,
    /// Ascending.
    pub planted_dates: Vec<NaiveDate>,
    pub noise_dates: Vec<NaiveDate>,
}

const SYLLABLES: &[&str] = &[
    "ba", "ke", "lo", "mi", "nu", "pa", "re", "si", "tu", "vo", "za", "ge", "ri", "fo", "hu", "ne",
];

const MONTH_NAMES: [&str; 12] = [
    "January", "February", "March", "April", "May", "June", "July", "August", "September",
    "October", "November", "December",
];

fn pseudo_word(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(2..=3);
    (0..n).map(|_| SYLLABLES[rng.gen_range(0..SYLLABLES.len())]).collect()
}

fn words(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    (0..n).map(|_| pseudo_word(rng)).collect()
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next()
        .map(|f| f.to_uppercase().collect::<String>() + c.as_str())
        .unwrap_or_default()
}

fn sentence(parts: &[&str]) -> String {
    format!("{}.", capitalize(&parts.join(" ")))
}

fn long_date(d: NaiveDate) -> String {
    format!("{} {}, {}", MONTH_NAMES[d.month0() as usize], d.day(), d.year())
}

/// Generates a topic named `name`. The reference timeline ("planted") has
/// one entry per planted date.
pub fn planted_topic(name: &str, seed: u64, spec: &PlantedSpec) -> PlantedCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offsets = sample(&mut rng, spec.days, spec.planted + spec.noise_dates).into_vec();
    let date_at = |o: usize| spec.start + Duration::days(o as i64);
    let mut planted_dates: Vec<NaiveDate> = offsets[..spec.planted].iter().map(|&o| date_at(o)).collect();
    let mut noise_dates: Vec<NaiveDate> = offsets[spec.planted..].iter().map(|&o| date_at(o)).collect();
    planted_dates.sort();
    noise_dates.sort();

    let filler = words(&mut rng, 30);
    let mut articles = Vec::new();
    let mut reference = Vec::new();
    for (e, &date) in planted_dates.iter().enumerate() {
        let vocab = words(&mut rng, 8);
        for a in 0..spec.articles_per_planted {
            let mut sentences = Vec::new();
            for s in 0..spec.sentences_per_article {
                let mut parts: Vec<&str> = Vec::new();
                for _ in 0..3 {
                    parts.push(&vocab[rng.gen_range(0..vocab.len())]);
                }
                for _ in 0..3 {
                    parts.push(&filler[rng.gen_range(0..filler.len())]);
                }
                let text = sentence(&parts);
                if s == 0 {
                    sentences.push(format!("On {} {}", long_date(date), lower_first(&text)));
                } else {
                    sentences.push(text);
                }
            }
            if a == 0 {
                reference.push(TimelineEntry {
                    date,
                    summary: vec![sentences[1].clone()],
                });
            }
            let title = capitalize(&format!("{} {}", vocab[0], vocab[1]));
            articles.push(Article::from_text(
                format!("e{e}a{a}"),
                date,
                title,
                &sentences.join(" "),
            ));
        }
    }
    for (i, &date) in noise_dates.iter().enumerate() {
        let n = rng.gen_range(1..=spec.max_noise_sentences.max(1));
        let sentences: Vec<String> = (0..n)
            .map(|_| {
                let w = words(&mut rng, 5);
                let f = &filler[rng.gen_range(0..filler.len())];
                let mut parts: Vec<&str> = w.iter().map(String::as_str).collect();
                parts.push(f);
                sentence(&parts)
            })
            .collect();
        articles.push(Article::from_text(
            format!("n{i}"),
            date,
            capitalize(&pseudo_word(&mut rng)),
            &sentences.join(" "),
        ));
    }
    articles.sort_by(|a, b| a.publish_date.cmp(&b.publish_date).then(a.id.cmp(&b.id)));

    PlantedCorpus {
        topic: Topic {
            name: name.to_string(),
            articles,
            queries: vec![],
            reference_timelines: vec![Timeline::from_entries("planted", reference)],
        },
        planted_dates,
        noise_dates,
    }
}

fn lower_first(s: &str) -> String {
    let mut c = s.chars();
    c.next()
        .map(|f| f.to_lowercase().collect::<String>() + c.as_str())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_shape() {
        let spec = PlantedSpec::default();
        let c = planted_topic("t", 7, &spec);
        assert_eq!(c.planted_dates.len(), 5);
        assert_eq!(c.noise_dates.len(), 8);
        for d in &c.planted_dates {
            let n: usize = c
                .topic
                .articles
                .iter()
                .filter(|a| a.publish_date == *d)
                .map(|a| a.sentences.len())
                .sum();
            assert_eq!(n, 20);
        }
        for d in &c.noise_dates {
            let n: usize = c
                .topic
                .articles
                .iter()
                .filter(|a| a.publish_date == *d)
                .map(|a| a.sentences.len())
                .sum();
            assert!((1..=2).contains(&n));
        }
        let (lo, hi) = c.topic.publication_range();
        assert!((hi - lo).num_days() < 60);
        assert_eq!(c.topic.reference_timelines[0].dates(), c.planted_dates);
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = PlantedSpec::default();
        assert_eq!(planted_topic("t", 3, &spec), planted_topic("t", 3, &spec));
        assert_ne!(planted_topic("t", 3, &spec), planted_topic("t", 4, &spec));
    }

    #[test]
    fn planted_dates_are_mentioned() {
        let c = planted_topic("t", 11, &PlantedSpec::default());
        let first = c.planted_dates[0];
        let mentions = c
            .topic
            .sentences()
            .flat_map(|s| s.mentions.iter())
            .filter(|m| m.resolved == first)
            .count();
        assert_eq!(mentions, 4);
    }
}
