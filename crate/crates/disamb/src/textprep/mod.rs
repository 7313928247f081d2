//! Text normalization shared by feature extraction: lowercasing, ASCII
//! folding, punctuation handling, stop-listing, Porter stemming, and
//! author-name canonicalization.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use thiserror::Error;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

mod porter;

pub use porter::porter_stem;

/// An ordered sequence of normalized tokens. Tokens are non-empty,
/// lowercase ASCII, and contain no whitespace. The only non-alphanumeric
/// character a token may carry is a single trailing comma, which marks
/// "Surname, Forename" order for name parsing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    pub fn new(tokens: Vec<String>) -> Self {
        debug_assert!(tokens.iter().all(|t| {
            !t.is_empty() && !t.chars().any(char::is_whitespace)
        }));
        TokenSeq(tokens)
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, String> {
        self.0.iter()
    }

    pub fn into_vec(self) -> Vec<String> {
        self.0
    }
}

/// Lowercase, fold to ASCII, and tokenize a raw string.
///
/// Non-ASCII letters are folded via canonical decomposition with combining
/// marks stripped; characters with no ASCII decomposition are dropped.
/// Every non-alphanumeric character becomes a token boundary, except a
/// comma, which stays attached to the end of the preceding token.
pub fn normalize_text(raw: &str) -> TokenSeq {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for ch in raw.nfd() {
        if is_combining_mark(ch) || !ch.is_ascii() {
            continue;
        }
        let ch = ch.to_ascii_lowercase();
        if ch.is_ascii_alphanumeric() {
            cur.push(ch);
        } else if ch == ',' {
            // A comma with nothing before it has no token to attach to.
            if !cur.is_empty() {
                cur.push(',');
                tokens.push(std::mem::take(&mut cur));
            }
        } else if !cur.is_empty() {
            tokens.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    TokenSeq(tokens)
}

/// A set of words to drop from title text before stemming.
#[derive(Debug, Clone, Default)]
pub struct Stoplist {
    words: BTreeSet<String>,
}

impl Stoplist {
    /// Parse a stoplist file: one lowercase word per line, `#` comments.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(|line| match line.find('#') {
                Some(i) => line[..i].trim(),
                None => line.trim(),
            })
            .filter(|w| !w.is_empty())
            .map(str::to_string)
            .collect();
        Stoplist { words }
    }

    /// The stoplist snapshot bundled with the crate.
    pub fn bundled() -> &'static Stoplist {
        static BUNDLED: OnceLock<Stoplist> = OnceLock::new();
        BUNDLED.get_or_init(|| Stoplist::parse(include_str!("stopwords.txt")))
    }

    pub fn empty() -> Self {
        Stoplist::default()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Remove exact stoplist matches, preserving token order.
pub fn remove_stopwords(tokens: &TokenSeq, stoplist: &Stoplist) -> TokenSeq {
    TokenSeq(
        tokens
            .iter()
            .filter(|t| !stoplist.contains(t))
            .cloned()
            .collect(),
    )
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NameError {
    #[error("name {0:?} has no usable tokens after normalization")]
    Empty(String),
}

/// A canonicalized author name: first forename initial plus full surname.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct NameKey {
    pub initial: Option<char>,
    pub surname: String,
}

impl NameKey {
    /// Render as a blocking key: `"j wang"`, or just the surname when the
    /// name had no forename.
    pub fn render(&self) -> String {
        match self.initial {
            Some(i) => format!("{} {}", i, self.surname),
            None => self.surname.clone(),
        }
    }
}

impl std::fmt::Display for NameKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }
}

/// Reduce a raw author name to its first forename initial and surname.
///
/// A comma-bearing token followed by more tokens signals
/// "Surname, Forename" order; everything up to and including that token is
/// the surname. Otherwise the name is read forename-first and the last
/// token is the surname. Single-token names yield a surname with no
/// initial.
pub fn canonicalize_name(raw: &str) -> Result<NameKey, NameError> {
    let tokens = normalize_text(raw);
    if tokens.is_empty() {
        return Err(NameError::Empty(raw.to_string()));
    }
    let toks = tokens.tokens();
    let comma_pos = toks.iter().position(|t| t.ends_with(','));
    let (surname_toks, forename_toks) = match comma_pos {
        Some(i) if i + 1 < toks.len() => (&toks[..=i], &toks[i + 1..]),
        _ => (&toks[toks.len() - 1..], &toks[..toks.len() - 1]),
    };
    let surname = surname_toks
        .iter()
        .map(|t| t.trim_end_matches(','))
        .collect::<Vec<_>>()
        .join(" ");
    if surname.is_empty() {
        return Err(NameError::Empty(raw.to_string()));
    }
    let initial = forename_toks.first().and_then(|t| t.chars().next());
    Ok(NameKey { initial, surname })
}
