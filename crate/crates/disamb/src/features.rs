//! Pairwise similarity features: cosine similarity of TF-IDF-weighted
//! character n-gram profiles over two fields, coauthor names and title
//! words, for n in {2, 3, 4}.

use std::collections::BTreeMap;

use crate::corpus::{Corpus, NameInstance};
use crate::textprep::{
    canonicalize_name, normalize_text, porter_stem, remove_stopwords, Stoplist,
};

/// The two feature fields compared between name instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Feature {
    Coauthors,
    TitleWords,
}

pub const NGRAM_SIZES: [usize; 3] = [2, 3, 4];

/// Fixed component order of a [`SimilarityVector`].
pub const VECTOR_LAYOUT: [(Feature, usize); 6] = [
    (Feature::Coauthors, 2),
    (Feature::Coauthors, 3),
    (Feature::Coauthors, 4),
    (Feature::TitleWords, 2),
    (Feature::TitleWords, 3),
    (Feature::TitleWords, 4),
];

pub fn component_index(feature: Feature, n: usize) -> usize {
    debug_assert!(NGRAM_SIZES.contains(&n));
    let offset = match feature {
        Feature::Coauthors => 0,
        Feature::TitleWords => 3,
    };
    offset + (n - 2)
}

/// The text of one feature field of one instance.
///
/// Coauthor entries are canonical `"i surname"` keys and therefore may
/// carry one internal space; each entry is still treated as a single unit
/// when extracting n-grams. Title entries are normalized, stop-listed,
/// stemmed words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldText {
    pub feature: Feature,
    pub tokens: Vec<String>,
}

/// Both feature fields of one instance.
#[derive(Debug, Clone)]
pub struct InstanceFields {
    pub coauthors: FieldText,
    pub title_words: FieldText,
}

impl InstanceFields {
    pub fn field(&self, feature: Feature) -> &FieldText {
        match feature {
            Feature::Coauthors => &self.coauthors,
            Feature::TitleWords => &self.title_words,
        }
    }
}

/// Extract the feature fields of one instance. Coauthors exclude the
/// focal byline position; coauthor names that cannot be canonicalized
/// contribute nothing.
pub fn field_texts(corpus: &Corpus, inst: &NameInstance, stoplist: &Stoplist) -> InstanceFields {
    let record = corpus.record(&inst.record_id).expect("corpus is validated");
    let coauthors = record
        .authors
        .iter()
        .enumerate()
        .filter(|(pos, _)| *pos != inst.author_position)
        .filter_map(|(_, name)| canonicalize_name(name).ok())
        .map(|key| key.render())
        .collect();
    let title_words = remove_stopwords(&normalize_text(&record.title_raw), stoplist)
        .iter()
        .map(|t| porter_stem(t))
        .collect();
    InstanceFields {
        coauthors: FieldText {
            feature: Feature::Coauthors,
            tokens: coauthors,
        },
        title_words: FieldText {
            feature: Feature::TitleWords,
            tokens: title_words,
        },
    }
}

/// Character n-grams within each token independently; no gram crosses a
/// token boundary. Tokens shorter than `n` contribute themselves as a
/// single gram. Counts accumulate across tokens.
pub fn char_ngrams(tokens: &[String], n: usize) -> BTreeMap<String, u64> {
    assert!(NGRAM_SIZES.contains(&n), "n must be one of {NGRAM_SIZES:?}");
    let mut counts = BTreeMap::new();
    for token in tokens {
        let chars: Vec<char> = token.chars().collect();
        if chars.is_empty() {
            continue;
        }
        if chars.len() < n {
            *counts.entry(token.clone()).or_insert(0) += 1;
        } else {
            for window in chars.windows(n) {
                *counts.entry(window.iter().collect::<String>()).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// Raw gram occurrence counts of one field of one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramProfile {
    pub feature: Feature,
    pub n: usize,
    pub counts: BTreeMap<String, u64>,
}

impl NgramProfile {
    pub fn build(text: &FieldText, n: usize) -> Self {
        NgramProfile {
            feature: text.feature,
            n,
            counts: char_ngrams(&text.tokens, n),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Document frequencies of grams over one block's training instances,
/// frozen before any test-pair scoring. One document is one instance's
/// [`FieldText`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdfTable {
    pub feature: Feature,
    pub n: usize,
    pub doc_count: u64,
    pub df: BTreeMap<String, u64>,
}

impl IdfTable {
    pub fn build(docs: &[&FieldText], n: usize) -> Self {
        assert!(!docs.is_empty(), "idf needs at least one document");
        let feature = docs[0].feature;
        debug_assert!(docs.iter().all(|d| d.feature == feature));
        let mut df = BTreeMap::new();
        for doc in docs {
            for gram in char_ngrams(&doc.tokens, n).into_keys() {
                *df.entry(gram).or_insert(0) += 1;
            }
        }
        IdfTable {
            feature,
            n,
            doc_count: docs.len() as u64,
            df,
        }
    }

    /// Document frequency; grams never seen in training score 0.
    pub fn df(&self, gram: &str) -> u64 {
        self.df.get(gram).copied().unwrap_or(0)
    }

    /// Smoothed inverse document frequency: `ln((1 + N) / (1 + df)) + 1`.
    /// Unseen grams get the maximum finite weight.
    pub fn weight(&self, gram: &str) -> f64 {
        ((1.0 + self.doc_count as f64) / (1.0 + self.df(gram) as f64)).ln() + 1.0
    }
}

/// The six IDF tables of one block, in [`VECTOR_LAYOUT`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockIdf {
    pub tables: Vec<IdfTable>,
}

impl BlockIdf {
    /// Build from the training instances' field texts.
    pub fn build(train_fields: &[InstanceFields]) -> Self {
        let tables = VECTOR_LAYOUT
            .iter()
            .map(|&(feature, n)| {
                let docs: Vec<&FieldText> =
                    train_fields.iter().map(|f| f.field(feature)).collect();
                IdfTable::build(&docs, n)
            })
            .collect();
        BlockIdf { tables }
    }

    pub fn table(&self, feature: Feature, n: usize) -> &IdfTable {
        &self.tables[component_index(feature, n)]
    }
}

/// Six cosine similarities in [`VECTOR_LAYOUT`] order, each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityVector(pub [f64; 6]);

impl SimilarityVector {
    pub const DIM: usize = 6;

    pub fn values(&self) -> &[f64; 6] {
        &self.0
    }

    pub fn get(&self, feature: Feature, n: usize) -> f64 {
        self.0[component_index(feature, n)]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone)]
struct WeightedProfile {
    weights: BTreeMap<String, f64>,
    norm_sq: f64,
}

impl WeightedProfile {
    fn build(profile: &NgramProfile, idf: &IdfTable) -> Self {
        let mut weights = BTreeMap::new();
        let mut norm_sq = 0.0;
        for (gram, &tf) in &profile.counts {
            let w = tf as f64 * idf.weight(gram);
            norm_sq += w * w;
            weights.insert(gram.clone(), w);
        }
        WeightedProfile { weights, norm_sq }
    }
}

/// TF-IDF-weighted gram profiles of one instance, ready for scoring.
#[derive(Debug, Clone)]
pub struct InstanceProfiles {
    weighted: Vec<WeightedProfile>,
}

impl InstanceProfiles {
    pub fn build(fields: &InstanceFields, idf: &BlockIdf) -> Self {
        let weighted = VECTOR_LAYOUT
            .iter()
            .map(|&(feature, n)| {
                let profile = NgramProfile::build(fields.field(feature), n);
                WeightedProfile::build(&profile, idf.table(feature, n))
            })
            .collect();
        InstanceProfiles { weighted }
    }
}

/// Cosine of two weighted profiles; 0 when either is empty. Exactly
/// symmetric: the gram intersection is visited in sorted order from
/// either side.
fn cosine(a: &WeightedProfile, b: &WeightedProfile) -> f64 {
    if a.weights.is_empty() || b.weights.is_empty() {
        return 0.0;
    }
    let (small, large) = if a.weights.len() <= b.weights.len() {
        (a, b)
    } else {
        (b, a)
    };
    let mut dot = 0.0;
    for (gram, ws) in &small.weights {
        if let Some(wl) = large.weights.get(gram) {
            dot += ws * wl;
        }
    }
    let denom = (a.norm_sq * b.norm_sq).sqrt();
    if denom == 0.0 {
        return 0.0;
    }
    (dot / denom).clamp(0.0, 1.0)
}

/// Similarity vector of two instances from their precomputed profiles.
pub fn profile_similarity(a: &InstanceProfiles, b: &InstanceProfiles) -> SimilarityVector {
    let mut values = [0.0; 6];
    for (i, v) in values.iter_mut().enumerate() {
        *v = cosine(&a.weighted[i], &b.weighted[i]);
    }
    SimilarityVector(values)
}

/// Similarity vector of two instances' field texts under a block's
/// frozen IDF tables.
pub fn pair_similarity(
    a: &InstanceFields,
    b: &InstanceFields,
    idf: &BlockIdf,
) -> SimilarityVector {
    profile_similarity(
        &InstanceProfiles::build(a, idf),
        &InstanceProfiles::build(b, idf),
    )
}

/// Precomputed weighted profiles for a set of instances, for scoring many
/// pairs against one block's IDF tables.
#[derive(Debug)]
pub struct PairScorer {
    profiles: BTreeMap<String, InstanceProfiles>,
}

impl PairScorer {
    pub fn build(
        corpus: &Corpus,
        instance_ids: &[String],
        idf: &BlockIdf,
        stoplist: &Stoplist,
    ) -> Self {
        let profiles = instance_ids
            .iter()
            .map(|id| {
                let inst = corpus.instance(id).expect("instance id resolves");
                let fields = field_texts(corpus, inst, stoplist);
                (id.clone(), InstanceProfiles::build(&fields, idf))
            })
            .collect();
        PairScorer { profiles }
    }

    pub fn similarity(&self, a: &str, b: &str) -> SimilarityVector {
        profile_similarity(&self.profiles[a], &self.profiles[b])
    }
}
