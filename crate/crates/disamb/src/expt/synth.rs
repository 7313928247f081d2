//! Synthetic labeled corpus generator for desk-scale pipeline
//! verification: authors with their own coauthor pools and topic
//! vocabularies, mixed with shared pools according to an overlap knob,
//! and block ambiguity created by giving several authors the same
//! canonical focal name.

use std::collections::HashSet;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::json;

use crate::corpus::{BibRecord, Corpus, NameInstance};

#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub authors: usize,
    pub instances_per_author: usize,
    /// Authors sharing one canonical focal-name key.
    pub ambiguity: usize,
    /// Probability that a title word or coauthor comes from the shared
    /// pool instead of the author's own; 0 = fully separated identities,
    /// 1 = features carry no identity signal.
    pub overlap: f64,
    /// Distinct collaborators per author.
    pub coauthor_pool: usize,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), String> {
        if self.authors < 1 || self.instances_per_author < 1 {
            return Err("authors and per-author instance counts must be >= 1".into());
        }
        if self.ambiguity < 1 {
            return Err("ambiguity must be >= 1".into());
        }
        if self.coauthor_pool < 1 {
            return Err("coauthor pool must be >= 1".into());
        }
        if !(0.0..=1.0).contains(&self.overlap) {
            return Err("overlap must lie in [0, 1]".into());
        }
        Ok(())
    }
}

const VOCAB_PER_AUTHOR: usize = 40;
const SHARED_VOCAB: usize = 150;
const SHARED_COAUTHORS: usize = 40;
const TITLE_WORDS: usize = 8;
const COAUTHORS_PER_RECORD: usize = 3;

struct WordGen {
    used: HashSet<String>,
}

impl WordGen {
    fn new() -> Self {
        WordGen {
            used: HashSet::new(),
        }
    }

    /// A fresh random lowercase word, globally unique so that pools are
    /// disjoint unless the overlap knob mixes them.
    fn fresh(&mut self, rng: &mut ChaCha20Rng) -> String {
        loop {
            let len = rng.random_range(5..=8);
            let word: String = (0..len)
                .map(|_| (b'a' + rng.random_range(0..26u8)) as char)
                .collect();
            if self.used.insert(word.clone()) {
                return word;
            }
        }
    }
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

struct Author {
    forename: String,
    surname: String,
    label: String,
    vocab: Vec<String>,
    coauthors: Vec<String>,
}

/// Generate a labeled corpus per the spec; deterministic in the seed.
pub fn synth_corpus(spec: &SynthSpec) -> Corpus {
    spec.validate().expect("spec validated by caller");
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let mut words = WordGen::new();

    let shared_vocab: Vec<String> = (0..SHARED_VOCAB).map(|_| words.fresh(&mut rng)).collect();
    let shared_coauthors: Vec<String> = (0..SHARED_COAUTHORS)
        .map(|_| {
            let forename = capitalize(&words.fresh(&mut rng));
            let surname = capitalize(&words.fresh(&mut rng));
            format!("{forename} {surname}")
        })
        .collect();

    let n_groups = spec.authors.div_ceil(spec.ambiguity);
    let group_names: Vec<(char, String)> = (0..n_groups)
        .map(|_| {
            let initial = (b'a' + rng.random_range(0..26u8)) as char;
            let surname = capitalize(&words.fresh(&mut rng));
            (initial, surname)
        })
        .collect();

    let authors: Vec<Author> = (0..spec.authors)
        .map(|a| {
            let (initial, surname) = &group_names[a / spec.ambiguity];
            let tail = words.fresh(&mut rng);
            let forename = capitalize(&format!("{initial}{tail}"));
            Author {
                forename,
                surname: surname.clone(),
                label: format!("a{a:04}"),
                vocab: (0..VOCAB_PER_AUTHOR).map(|_| words.fresh(&mut rng)).collect(),
                coauthors: (0..spec.coauthor_pool)
                    .map(|_| {
                        let f = capitalize(&words.fresh(&mut rng));
                        let s = capitalize(&words.fresh(&mut rng));
                        format!("{f} {s}")
                    })
                    .collect(),
            }
        })
        .collect();

    let mut records = Vec::new();
    let mut instances = Vec::new();
    let mut next_id = 0usize;
    for author in &authors {
        for _ in 0..spec.instances_per_author {
            let title: Vec<&str> = (0..TITLE_WORDS)
                .map(|_| {
                    if rng.random::<f64>() < spec.overlap {
                        shared_vocab[rng.random_range(0..shared_vocab.len())].as_str()
                    } else {
                        author.vocab[rng.random_range(0..author.vocab.len())].as_str()
                    }
                })
                .collect();

            let mut coauthors: Vec<String> = Vec::new();
            let mut attempts = 0;
            while coauthors.len() < COAUTHORS_PER_RECORD && attempts < 40 {
                attempts += 1;
                let pick = if rng.random::<f64>() < spec.overlap {
                    &shared_coauthors[rng.random_range(0..shared_coauthors.len())]
                } else {
                    &author.coauthors[rng.random_range(0..author.coauthors.len())]
                };
                if !coauthors.contains(pick) {
                    coauthors.push(pick.clone());
                }
            }

            let focal = match rng.random_range(0..3u8) {
                0 => format!(
                    "{}. {}",
                    author.forename.chars().next().unwrap().to_uppercase(),
                    author.surname
                ),
                1 => format!("{} {}", author.forename, author.surname),
                _ => format!("{}, {}", author.surname, author.forename),
            };
            let position = rng.random_range(0..=coauthors.len());
            let mut byline = coauthors;
            byline.insert(position, focal);

            records.push(BibRecord {
                record_id: format!("r{next_id:06}"),
                title_raw: title.join(" "),
                venue: None,
                year: None,
                authors: byline,
            });
            instances.push(NameInstance {
                instance_id: format!("i{next_id:06}"),
                record_id: format!("r{next_id:06}"),
                author_position: position,
                author_label: author.label.clone(),
            });
            next_id += 1;
        }
    }
    Corpus::new(records, instances).expect("generator emits a valid corpus")
}

/// Write a corpus in the canonical JSONL format: records first, then
/// instances, both in id order.
pub fn write_jsonl(corpus: &Corpus, mut writer: impl Write) -> std::io::Result<()> {
    for rec in corpus.records() {
        let line = json!({
            "kind": "record",
            "record_id": rec.record_id,
            "title": rec.title_raw,
            "venue": rec.venue,
            "year": rec.year,
            "authors": rec.authors,
        });
        writeln!(writer, "{line}")?;
    }
    for inst in corpus.instances() {
        let line = json!({
            "kind": "instance",
            "instance_id": inst.instance_id,
            "record_id": inst.record_id,
            "author_position": inst.author_position,
            "author_label": inst.author_label,
        });
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_blocks, load_corpus};
    use std::io::Cursor;

    fn spec(authors: usize, per: usize, ambiguity: usize, overlap: f64, seed: u64) -> SynthSpec {
        SynthSpec {
            authors,
            instances_per_author: per,
            ambiguity,
            overlap,
            coauthor_pool: 5,
            seed,
        }
    }

    #[test]
    fn generates_requested_counts_and_blocks() {
        let corpus = synth_corpus(&spec(10, 6, 5, 0.2, 3));
        assert_eq!(corpus.instance_count(), 60);
        assert_eq!(corpus.record_count(), 60);
        let outcome = build_blocks(&corpus);
        assert!(outcome.rejected.is_empty());
        assert_eq!(outcome.blocks.len(), 2);
        assert!(outcome.blocks.iter().all(|b| b.len() == 30));
    }

    #[test]
    fn ambiguous_blocks_hold_several_authors() {
        let corpus = synth_corpus(&spec(6, 4, 3, 0.0, 9));
        let outcome = build_blocks(&corpus);
        for block in &outcome.blocks {
            assert_eq!(corpus.distinct_labels(&block.instance_ids), 3);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = {
            let mut buf = Vec::new();
            write_jsonl(&synth_corpus(&spec(8, 5, 4, 0.5, 77)), &mut buf).unwrap();
            buf
        };
        let b = {
            let mut buf = Vec::new();
            write_jsonl(&synth_corpus(&spec(8, 5, 4, 0.5, 77)), &mut buf).unwrap();
            buf
        };
        assert_eq!(a, b);
        let c = {
            let mut buf = Vec::new();
            write_jsonl(&synth_corpus(&spec(8, 5, 4, 0.5, 78)), &mut buf).unwrap();
            buf
        };
        assert_ne!(a, c);
    }

    #[test]
    fn jsonl_round_trips_through_the_loader() {
        let corpus = synth_corpus(&spec(4, 3, 2, 0.3, 5));
        let mut buf = Vec::new();
        write_jsonl(&corpus, &mut buf).unwrap();
        let loaded = load_corpus(Cursor::new(buf)).unwrap();
        assert_eq!(loaded.instance_count(), corpus.instance_count());
        assert_eq!(loaded.record_count(), corpus.record_count());
    }

    #[test]
    fn spec_validation_rejects_bad_values() {
        assert!(spec(0, 1, 1, 0.0, 0).validate().is_err());
        assert!(spec(1, 1, 1, 1.5, 0).validate().is_err());
        assert!(spec(5, 2, 2, 1.0, 0).validate().is_ok());
    }
}
