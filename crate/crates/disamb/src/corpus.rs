//! Labeled bibliographic data: records, name instances, JSONL ingestion,
//! blocking, and train/test splitting.

use std::collections::BTreeMap;
use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textprep::canonicalize_name;

/// One publication record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BibRecord {
    pub record_id: String,
    #[serde(rename = "title")]
    pub title_raw: String,
    pub venue: Option<String>,
    pub year: Option<i32>,
    pub authors: Vec<String>,
}

/// One author mention on one record, with its truth identity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NameInstance {
    pub instance_id: String,
    pub record_id: String,
    pub author_position: usize,
    pub author_label: String,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Integrity(String),
}

/// A validated corpus: every instance resolves to a record and a valid
/// author position, and all ids are unique.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    records: BTreeMap<String, BibRecord>,
    instances: BTreeMap<String, NameInstance>,
}

impl Corpus {
    pub fn new(
        records: Vec<BibRecord>,
        instances: Vec<NameInstance>,
    ) -> Result<Self, CorpusError> {
        let mut record_map = BTreeMap::new();
        for rec in records {
            if rec.authors.is_empty() {
                return Err(CorpusError::Integrity(format!(
                    "record {} has no authors",
                    rec.record_id
                )));
            }
            let id = rec.record_id.clone();
            if record_map.insert(id.clone(), rec).is_some() {
                return Err(CorpusError::Integrity(format!("duplicate record_id {id:?}")));
            }
        }
        let mut instance_map: BTreeMap<String, NameInstance> = BTreeMap::new();
        let mut seen_positions = BTreeMap::new();
        for inst in instances {
            let record = record_map.get(&inst.record_id).ok_or_else(|| {
                CorpusError::Integrity(format!(
                    "instance {} references missing record {}",
                    inst.instance_id, inst.record_id
                ))
            })?;
            if inst.author_position >= record.authors.len() {
                return Err(CorpusError::Integrity(format!(
                    "instance {} has author_position {} but record {} has {} authors",
                    inst.instance_id,
                    inst.author_position,
                    inst.record_id,
                    record.authors.len()
                )));
            }
            if inst.author_label.is_empty() {
                return Err(CorpusError::Integrity(format!(
                    "instance {} has an empty author_label",
                    inst.instance_id
                )));
            }
            if let Some(prev) = seen_positions.insert(
                (inst.record_id.clone(), inst.author_position),
                inst.instance_id.clone(),
            ) {
                return Err(CorpusError::Integrity(format!(
                    "instances {} and {} both claim record {} position {}",
                    prev, inst.instance_id, inst.record_id, inst.author_position
                )));
            }
            let id = inst.instance_id.clone();
            if instance_map.insert(id.clone(), inst).is_some() {
                return Err(CorpusError::Integrity(format!(
                    "duplicate instance_id {id:?}"
                )));
            }
        }
        Ok(Corpus {
            records: record_map,
            instances: instance_map,
        })
    }

    pub fn record(&self, id: &str) -> Option<&BibRecord> {
        self.records.get(id)
    }

    pub fn instance(&self, id: &str) -> Option<&NameInstance> {
        self.instances.get(id)
    }

    pub fn records(&self) -> impl Iterator<Item = &BibRecord> {
        self.records.values()
    }

    pub fn instances(&self) -> impl Iterator<Item = &NameInstance> {
        self.instances.values()
    }

    pub fn record_count(&self) -> usize {
        self.records.len()
    }

    pub fn instance_count(&self) -> usize {
        self.instances.len()
    }

    /// The raw byline name this instance points at.
    pub fn focal_name(&self, inst: &NameInstance) -> &str {
        &self.records[&inst.record_id].authors[inst.author_position]
    }

    /// (instance_id, author_label) pairs for the given instances.
    pub fn labels_of(&self, ids: &[String]) -> Vec<(String, String)> {
        ids.iter()
            .map(|id| (id.clone(), self.instances[id].author_label.clone()))
            .collect()
    }

    pub fn distinct_labels(&self, ids: &[String]) -> usize {
        ids.iter()
            .map(|id| self.instances[id].author_label.as_str())
            .collect::<std::collections::BTreeSet<_>>()
            .len()
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum JsonLine {
    Record(BibRecord),
    Instance(NameInstance),
}

/// Load a corpus from canonical JSONL: one object per line, records and
/// instances in any order, cross-references resolved after reading.
pub fn load_corpus(reader: impl BufRead) -> Result<Corpus, CorpusError> {
    let mut records = Vec::new();
    let mut instances = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<JsonLine>(&line) {
            Ok(JsonLine::Record(rec)) => records.push(rec),
            Ok(JsonLine::Instance(inst)) => instances.push(inst),
            Err(e) => {
                return Err(CorpusError::Parse {
                    line: idx + 1,
                    message: e.to_string(),
                })
            }
        }
    }
    Corpus::new(records, instances)
}

/// A group of name instances sharing a canonical focal-name key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub block_key: String,
    /// Member instance ids, sorted.
    pub instance_ids: Vec<String>,
}

impl Block {
    pub fn len(&self) -> usize {
        self.instance_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instance_ids.is_empty()
    }
}

/// An instance whose focal name could not be canonicalized.
#[derive(Debug, Clone)]
pub struct RejectedInstance {
    pub instance_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct BlockingOutcome {
    /// Blocks sorted by key.
    pub blocks: Vec<Block>,
    /// Instances that could not be keyed; reported, never silently dropped.
    pub rejected: Vec<RejectedInstance>,
}

/// Partition all instances into blocks keyed by the canonical form of
/// their focal names.
pub fn build_blocks(corpus: &Corpus) -> BlockingOutcome {
    let mut by_key: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut rejected = Vec::new();
    for inst in corpus.instances() {
        match canonicalize_name(corpus.focal_name(inst)) {
            Ok(key) => by_key
                .entry(key.render())
                .or_default()
                .push(inst.instance_id.clone()),
            Err(e) => rejected.push(RejectedInstance {
                instance_id: inst.instance_id.clone(),
                reason: e.to_string(),
            }),
        }
    }
    let blocks = by_key
        .into_iter()
        .map(|(block_key, mut instance_ids)| {
            instance_ids.sort();
            Block {
                block_key,
                instance_ids,
            }
        })
        .collect();
    BlockingOutcome { blocks, rejected }
}

/// Keep blocks with at least `min_size` instances, in stable key order.
pub fn filter_blocks(blocks: &[Block], min_size: usize) -> Vec<Block> {
    assert!(min_size >= 1, "min_size must be at least 1");
    blocks
        .iter()
        .filter(|b| b.len() >= min_size)
        .cloned()
        .collect()
}

/// A 50/50 train/test split of one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitAssignment {
    pub block_key: String,
    pub train_ids: Vec<String>,
    pub test_ids: Vec<String>,
    pub seed: u64,
}

/// Randomly halve a block. Odd sizes put the extra instance in train.
/// Deterministic for a given (block contents, seed).
pub fn split_train_test(block: &Block, seed: u64) -> SplitAssignment {
    let mut ids = block.instance_ids.clone();
    ids.sort();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);
    let train_len = ids.len().div_ceil(2);
    let mut train_ids: Vec<String> = ids[..train_len].to_vec();
    let mut test_ids: Vec<String> = ids[train_len..].to_vec();
    train_ids.sort();
    test_ids.sort();
    SplitAssignment {
        block_key: block.block_key.clone(),
        train_ids,
        test_ids,
        seed,
    }
}
