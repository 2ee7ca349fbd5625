//! Byte pair encoding subword segmentation.
//!
//! Learning initializes every word as its character sequence followed by
//! a standalone end-of-word symbol, then repeatedly merges the most
//! frequent adjacent symbol pair (ties broken by lexicographic order of
//! the pair, so models are reproducible across runs and platforms).
//! Application replays the learned merges in order and emits subwords
//! separated by spaces, suffixing a continuation marker to every
//! non-final subword of a word. [`decode_bpe`] inverts that convention
//! exactly, restoring the original whitespace tokenization.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{self, BufRead, Write};

#[derive(Debug, thiserror::Error)]
pub enum BpeError {
    #[error("token {token:?} contains the reserved marker {marker:?}")]
    MarkerCollision { token: String, marker: String },
    #[error("invalid marker {marker:?}: {message}")]
    BadMarker { marker: String, message: String },
    #[error("invalid model file at line {line}: {message}")]
    BadModel { line: u64, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Word frequencies aggregated from a corpus.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct WordFrequencyTable {
    entries: BTreeMap<String, u64>,
}

impl WordFrequencyTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds every whitespace-delimited token of `line`.
    pub fn add_line(&mut self, line: &str) {
        for token in line.split_whitespace() {
            *self.entries.entry(token.to_string()).or_insert(0) += 1;
        }
    }

    pub fn insert(&mut self, word: impl Into<String>, count: u64) {
        assert!(count > 0, "word counts must be positive");
        *self.entries.entry(word.into()).or_insert(0) += count;
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().map(|(w, &c)| (w.as_str(), c))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn distinct_words(&self) -> usize {
        self.entries.len()
    }

    pub fn total_count(&self) -> u64 {
        self.entries.values().sum()
    }
}

/// Counts exact whitespace-token frequencies over a line stream.
pub fn count_words<R: BufRead>(reader: R) -> io::Result<WordFrequencyTable> {
    let mut table = WordFrequencyTable::new();
    for line in reader.lines() {
        table.add_line(&line?);
    }
    Ok(table)
}

/// An ordered merge table plus the marker conventions it was built with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpeModel {
    merges: Vec<(String, String)>,
    eow_marker: String,
    continuation_marker: String,
    alphabet: BTreeSet<char>,
}

pub const DEFAULT_EOW_MARKER: &str = "</w>";
pub const DEFAULT_CONTINUATION_MARKER: &str = "@@";

fn validate_marker(marker: &str) -> Result<(), BpeError> {
    if marker.is_empty() {
        return Err(BpeError::BadMarker {
            marker: marker.to_string(),
            message: "must be nonempty".to_string(),
        });
    }
    if marker.chars().any(char::is_whitespace) {
        return Err(BpeError::BadMarker {
            marker: marker.to_string(),
            message: "must not contain whitespace".to_string(),
        });
    }
    Ok(())
}

impl BpeModel {
    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn eow_marker(&self) -> &str {
        &self.eow_marker
    }

    pub fn continuation_marker(&self) -> &str {
        &self.continuation_marker
    }

    /// Characters seen at learn time. Informational; characters outside
    /// it simply never participate in merges.
    pub fn alphabet(&self) -> &BTreeSet<char> {
        &self.alphabet
    }

    /// The model restricted to its first `k` merges.
    pub fn prefix(&self, k: usize) -> BpeModel {
        BpeModel {
            merges: self.merges[..k.min(self.merges.len())].to_vec(),
            eow_marker: self.eow_marker.clone(),
            continuation_marker: self.continuation_marker.clone(),
            alphabet: self.alphabet.clone(),
        }
    }

    /// Splits one word into subwords by replaying the merge table. The
    /// end-of-word symbol is consumed here and never shows up in the
    /// returned subwords.
    pub fn segment_word(&self, word: &str) -> Result<Vec<String>, BpeError> {
        for marker in [&self.eow_marker, &self.continuation_marker] {
            if word.contains(marker.as_str()) {
                return Err(BpeError::MarkerCollision {
                    token: word.to_string(),
                    marker: marker.clone(),
                });
            }
        }
        let mut syms: Vec<String> = word.chars().map(String::from).collect();
        syms.push(self.eow_marker.clone());
        for (left, right) in &self.merges {
            if syms.len() < 2 {
                break;
            }
            replay_merge(&mut syms, left, right);
        }
        if syms.last() == Some(&self.eow_marker) {
            syms.pop();
        } else if let Some(last) = syms.last_mut() {
            if let Some(stripped) = last.strip_suffix(&self.eow_marker) {
                *last = stripped.to_string();
            }
        }
        Ok(syms)
    }

    /// Writes the model file: a header line recording the markers, then
    /// one `left right` merge per line.
    pub fn save<W: Write + ?Sized>(&self, writer: &mut W) -> Result<(), BpeError> {
        writeln!(
            writer,
            "#bpe v1 eow={} cont={}",
            self.eow_marker, self.continuation_marker
        )?;
        for (left, right) in &self.merges {
            writeln!(writer, "{left} {right}")?;
        }
        Ok(())
    }

    /// Loads and validates a model file written by [`BpeModel::save`].
    pub fn load<R: BufRead>(reader: R) -> Result<BpeModel, BpeError> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .transpose()?
            .ok_or_else(|| BpeError::BadModel {
                line: 1,
                message: "empty file, expected `#bpe v1` header".to_string(),
            })?;
        let fields: Vec<&str> = header.split(' ').collect();
        if fields.len() != 4 || fields[0] != "#bpe" || fields[1] != "v1" {
            return Err(BpeError::BadModel {
                line: 1,
                message: "expected header `#bpe v1 eow=<marker> cont=<marker>`".to_string(),
            });
        }
        let eow_marker = fields[2]
            .strip_prefix("eow=")
            .ok_or_else(|| BpeError::BadModel {
                line: 1,
                message: "missing `eow=` field".to_string(),
            })?
            .to_string();
        let continuation_marker = fields[3]
            .strip_prefix("cont=")
            .ok_or_else(|| BpeError::BadModel {
                line: 1,
                message: "missing `cont=` field".to_string(),
            })?
            .to_string();
        validate_marker(&eow_marker).map_err(|e| BpeError::BadModel {
            line: 1,
            message: e.to_string(),
        })?;
        validate_marker(&continuation_marker).map_err(|e| BpeError::BadModel {
            line: 1,
            message: e.to_string(),
        })?;

        let mut merges: Vec<(String, String)> = Vec::new();
        let mut seen: BTreeSet<(String, String)> = BTreeSet::new();
        let mut produced: BTreeSet<String> = BTreeSet::new();
        let mut alphabet: BTreeSet<char> = BTreeSet::new();
        let valid_operand = |operand: &str, produced: &BTreeSet<String>, eow: &str| {
            if operand == eow || produced.contains(operand) {
                return true;
            }
            let bare = operand.strip_suffix(eow).unwrap_or(operand);
            bare.chars().count() == 1 || produced.contains(bare)
        };
        for (idx, line) in lines.enumerate() {
            let line = line?;
            let line_no = idx as u64 + 2;
            let mut parts = line.split(' ');
            let (left, right) = match (parts.next(), parts.next(), parts.next()) {
                (Some(l), Some(r), None) if !l.is_empty() && !r.is_empty() => {
                    (l.to_string(), r.to_string())
                }
                _ => {
                    return Err(BpeError::BadModel {
                        line: line_no,
                        message: "expected `left right` separated by one space".to_string(),
                    })
                }
            };
            for operand in [&left, &right] {
                if !valid_operand(operand, &produced, &eow_marker) {
                    return Err(BpeError::BadModel {
                        line: line_no,
                        message: format!("operand {operand:?} is not a known symbol"),
                    });
                }
            }
            if !seen.insert((left.clone(), right.clone())) {
                return Err(BpeError::BadModel {
                    line: line_no,
                    message: format!("duplicate merge pair ({left:?}, {right:?})"),
                });
            }
            produced.insert(format!("{left}{right}"));
            for operand in [&left, &right] {
                let bare = operand.strip_suffix(&eow_marker).unwrap_or(operand);
                if bare.chars().count() == 1 {
                    alphabet.extend(bare.chars());
                }
            }
            merges.push((left, right));
        }
        Ok(BpeModel {
            merges,
            eow_marker,
            continuation_marker,
            alphabet,
        })
    }
}

/// Merges every non-overlapping left-to-right occurrence of the pair.
fn replay_merge(syms: &mut Vec<String>, left: &str, right: &str) {
    let mut i = 0;
    while i + 1 < syms.len() {
        if syms[i] == left && syms[i + 1] == right {
            syms[i].push_str(right);
            syms.remove(i + 1);
        }
        i += 1;
    }
}

/// Learns a merge table with the default `</w>` / `@@` markers.
pub fn learn_bpe(table: &WordFrequencyTable, num_merges: usize) -> Result<BpeModel, BpeError> {
    learn_bpe_with_markers(
        table,
        num_merges,
        DEFAULT_EOW_MARKER,
        DEFAULT_CONTINUATION_MARKER,
    )
}

/// Learns up to `num_merges` merges from the word frequency table.
///
/// Each round merges the adjacent symbol pair with the highest weighted
/// frequency; ties pick the lexicographically smallest (left, right).
/// Learning stops early once no pair occurs at least twice. Words
/// containing the end-of-word marker are rejected, since they would make
/// segmentation ambiguous.
pub fn learn_bpe_with_markers(
    table: &WordFrequencyTable,
    num_merges: usize,
    eow_marker: &str,
    continuation_marker: &str,
) -> Result<BpeModel, BpeError> {
    validate_marker(eow_marker)?;
    validate_marker(continuation_marker)?;
    if eow_marker == continuation_marker {
        return Err(BpeError::BadMarker {
            marker: continuation_marker.to_string(),
            message: "end-of-word and continuation markers must differ".to_string(),
        });
    }

    let mut alphabet = BTreeSet::new();
    let mut words: Vec<(Vec<String>, u64)> = Vec::with_capacity(table.distinct_words());
    for (word, count) in table.entries() {
        if word.contains(eow_marker) {
            return Err(BpeError::MarkerCollision {
                token: word.to_string(),
                marker: eow_marker.to_string(),
            });
        }
        alphabet.extend(word.chars());
        let mut syms: Vec<String> = word.chars().map(String::from).collect();
        syms.push(eow_marker.to_string());
        words.push((syms, count));
    }

    let mut learner = Learner::new(&words);
    let mut merges = Vec::new();
    while merges.len() < num_merges {
        match learner.merge_best(&mut words) {
            Some(pair) => merges.push(pair),
            None => break,
        }
    }

    Ok(BpeModel {
        merges,
        eow_marker: eow_marker.to_string(),
        continuation_marker: continuation_marker.to_string(),
        alphabet,
    })
}

/// Incremental pair statistics: counts are kept exact under merges, so
/// each round only rescans the words that actually contain the winning
/// pair.
struct Learner {
    pair_counts: HashMap<(String, String), i64>,
    pair_words: HashMap<(String, String), BTreeSet<usize>>,
}

impl Learner {
    fn new(words: &[(Vec<String>, u64)]) -> Self {
        let mut learner = Learner {
            pair_counts: HashMap::new(),
            pair_words: HashMap::new(),
        };
        for (idx, (syms, count)) in words.iter().enumerate() {
            for w in syms.windows(2) {
                learner.add(&w[0], &w[1], *count as i64, idx);
            }
        }
        learner
    }

    fn add(&mut self, left: &str, right: &str, delta: i64, idx: usize) {
        let key = (left.to_string(), right.to_string());
        *self.pair_counts.entry(key.clone()).or_insert(0) += delta;
        self.pair_words.entry(key).or_default().insert(idx);
    }

    fn sub(&mut self, left: &str, right: &str, delta: i64) {
        if let Some(count) = self
            .pair_counts
            .get_mut(&(left.to_string(), right.to_string()))
        {
            *count -= delta;
        }
    }

    /// Picks the most frequent pair (count, then lexicographically
    /// smallest) and merges it everywhere. Returns `None` when no pair
    /// occurs at least twice.
    fn merge_best(&mut self, words: &mut [(Vec<String>, u64)]) -> Option<(String, String)> {
        let mut best: Option<(&(String, String), i64)> = None;
        for (pair, &count) in &self.pair_counts {
            if count < 2 {
                continue;
            }
            best = match best {
                Some((bp, bc)) if count < bc || (count == bc && pair >= bp) => Some((bp, bc)),
                _ => Some((pair, count)),
            };
        }
        let (left, right) = best?.0.clone();
        let merged = format!("{left}{right}");

        let indices = self
            .pair_words
            .remove(&(left.clone(), right.clone()))
            .unwrap_or_default();
        for idx in indices {
            let count = words[idx].1 as i64;
            let syms = &mut words[idx].0;
            let mut i = 0;
            while i + 1 < syms.len() {
                if syms[i] == left && syms[i + 1] == right {
                    if i > 0 {
                        let prev = syms[i - 1].clone();
                        self.sub(&prev, &left, count);
                        self.add(&prev, &merged, count, idx);
                    }
                    if i + 2 < syms.len() {
                        let next = syms[i + 2].clone();
                        self.sub(&right, &next, count);
                        self.add(&merged, &next, count, idx);
                    }
                    self.sub(&left, &right, count);
                    syms[i] = merged.clone();
                    syms.remove(i + 1);
                }
                i += 1;
            }
        }
        self.pair_counts.remove(&(left.clone(), right.clone()));
        Some((left, right))
    }
}

/// Segments every whitespace token of `line` and joins the subwords with
/// single spaces, suffixing the continuation marker to each non-final
/// subword of a word.
pub fn apply_bpe(model: &BpeModel, line: &str) -> Result<String, BpeError> {
    let mut out = String::new();
    for token in line.split_whitespace() {
        let subwords = model.segment_word(token)?;
        let last = subwords.len().saturating_sub(1);
        for (i, sub) in subwords.iter().enumerate() {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(sub);
            if i < last {
                out.push_str(&model.continuation_marker);
            }
        }
    }
    Ok(out)
}

/// Inverts [`apply_bpe`]: removes every `marker + space` occurrence and a
/// trailing marker at end of line.
pub fn decode_bpe(line: &str, continuation_marker: &str) -> String {
    let glued = line.replace(&format!("{continuation_marker} "), "");
    match glued.strip_suffix(continuation_marker) {
        Some(stripped) => stripped.to_string(),
        None => glued,
    }
}

/// Per-corpus application wrapper that caches word segmentations, since
/// real corpora repeat their vocabulary heavily.
pub struct BpeApplier<'a> {
    model: &'a BpeModel,
    cache: HashMap<String, Vec<String>>,
}

impl<'a> BpeApplier<'a> {
    pub fn new(model: &'a BpeModel) -> Self {
        BpeApplier {
            model,
            cache: HashMap::new(),
        }
    }

    pub fn apply_line(&mut self, line: &str) -> Result<String, BpeError> {
        let mut out = String::new();
        for token in line.split_whitespace() {
            if !self.cache.contains_key(token) {
                let subwords = self.model.segment_word(token)?;
                self.cache.insert(token.to_string(), subwords);
            }
            let subwords = &self.cache[token];
            let last = subwords.len().saturating_sub(1);
            for (i, sub) in subwords.iter().enumerate() {
                if !out.is_empty() {
                    out.push(' ');
                }
                out.push_str(sub);
                if i < last {
                    out.push_str(&self.model.continuation_marker);
                }
            }
        }
        Ok(out)
    }
}
