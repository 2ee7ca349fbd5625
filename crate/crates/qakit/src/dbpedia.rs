//! Turns parsed Infobox Property triples into aligned question-answer
//! pairs.
//!
//! The subject and predicate of a triple become the question ("birth Date
//! of Aristotle"), the object becomes the answer. Objects sharing the
//! same (subject, predicate) are merged into one comma-joined answer.

use std::collections::HashMap;

use crate::ntriples::{Term, Triple};

/// One aligned question-answer record.
///
/// `question` is always `property_label + " of " + subject_label` as
/// emitted; the label columns ride along so scoring can aggregate per
/// property without re-parsing question text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QaPair {
    pub question: String,
    pub answer: String,
    pub property_label: String,
    pub subject_label: String,
}

impl QaPair {
    /// Convenience for pairs without property/subject metadata (e.g.
    /// dialogue pairs).
    pub fn bare(question: impl Into<String>, answer: impl Into<String>) -> Self {
        QaPair {
            question: question.into(),
            answer: answer.into(),
            property_label: String::new(),
            subject_label: String::new(),
        }
    }
}

/// How (subject, predicate) groups are collected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grouping {
    /// Adjacent runs only. Constant memory; correct for subject-sorted
    /// dumps, which is how DBpedia ships them.
    Consecutive,
    /// Hash-based grouping over the whole input, for unsorted data.
    /// Memory grows with the number of distinct groups.
    Global,
}

#[derive(Debug, Clone)]
pub struct ExtractConfig {
    /// Keep language-tagged literals only when the tag matches
    /// (ASCII case-insensitive). Untagged literals and IRIs always pass.
    pub language_filter: Option<String>,
    pub lowercase_output: bool,
    pub grouping: Grouping,
    /// Predicates outside this IRI prefix are ignored.
    pub predicate_namespace: String,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            language_filter: Some("en".to_string()),
            lowercase_output: false,
            grouping: Grouping::Consecutive,
            predicate_namespace: "http://dbpedia.org/property/".to_string(),
        }
    }
}

/// Error for IRIs whose final path segment is empty.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unlabelable IRI: {0}")]
pub struct UnlabelableIri(pub String);

/// Extracts a human-readable label from an IRI: the segment after the
/// last `/` or `#`, percent-decoded, underscores replaced by spaces, and
/// one trailing ` (...)` disambiguator removed.
///
/// `http://dbpedia.org/resource/Golden_mean_(philosophy)` becomes
/// `Golden mean`.
pub fn iri_to_label(iri: &str) -> Result<String, UnlabelableIri> {
    let cut = iri.rfind(['/', '#']).map(|i| i + 1).unwrap_or(0);
    let segment = &iri[cut..];
    if segment.is_empty() {
        return Err(UnlabelableIri(iri.to_string()));
    }
    let spaced = percent_decode(segment).replace('_', " ");
    Ok(strip_trailing_parenthetical(&spaced).trim().to_string())
}

fn strip_trailing_parenthetical(label: &str) -> &str {
    if label.ends_with(')') {
        if let Some(i) = label.rfind(" (") {
            return &label[..i];
        }
    }
    label
}

/// Decodes `%XX` sequences. Malformed sequences are kept literally; if
/// the decoded bytes are not valid UTF-8 the input is returned unchanged.
fn percent_decode(s: &str) -> String {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' && i + 2 < bytes.len() {
            let hex = |b: u8| (b as char).to_digit(16);
            if let (Some(hi), Some(lo)) = (hex(bytes[i + 1]), hex(bytes[i + 2])) {
                out.push((hi * 16 + lo) as u8);
                i += 3;
                continue;
            }
        }
        out.push(bytes[i]);
        i += 1;
    }
    String::from_utf8(out).unwrap_or_else(|_| s.to_string())
}

/// Inserts a space wherever a lowercase letter or digit is immediately
/// followed by an uppercase letter. `birthDate` becomes `birth Date`;
/// acronym runs like `ISBNNumber` are left alone.
pub fn split_camel_case(name: &str) -> String {
    let mut out = String::with_capacity(name.len() + 4);
    let mut prev: Option<char> = None;
    for c in name.chars() {
        if let Some(p) = prev {
            if (p.is_lowercase() || p.is_numeric()) && c.is_uppercase() {
                out.push(' ');
            }
        }
        out.push(c);
        prev = Some(c);
    }
    out
}

/// Maps a triple object to its answer text: literals keep their lexical
/// form (tags and datatypes dropped), IRIs are labelled. The result is
/// trimmed and stripped of leading commas; `None` means the object
/// yields an empty answer and the caller should drop it.
pub fn object_to_answer(term: &Term) -> Option<String> {
    let raw = match term {
        Term::Iri(iri) => iri_to_label(iri.as_str()).ok()?,
        other => other.value().to_string(),
    };
    let stripped = raw.trim().trim_start_matches(',').trim();
    if stripped.is_empty() {
        None
    } else {
        Some(stripped.to_string())
    }
}

struct Group {
    subject: String,
    predicate: String,
    property_label: String,
    subject_label: String,
    answers: Vec<String>,
}

impl Group {
    fn emit(self, lowercase: bool) -> Option<QaPair> {
        if self.answers.is_empty() {
            return None;
        }
        let mut pair = QaPair {
            question: format!("{} of {}", self.property_label, self.subject_label),
            answer: self.answers.join(", "),
            property_label: self.property_label,
            subject_label: self.subject_label,
        };
        if lowercase {
            pair.question = pair.question.to_lowercase();
            pair.answer = pair.answer.to_lowercase();
            pair.property_label = pair.property_label.to_lowercase();
            pair.subject_label = pair.subject_label.to_lowercase();
        }
        Some(pair)
    }
}

/// Per-triple preprocessing shared by both grouping modes: namespace
/// filter, label derivation and the language filter. Returns the group
/// labels and the answer contribution (if any).
fn prepare(config: &ExtractConfig, triple: &Triple) -> Option<(String, String, Option<String>)> {
    let local = triple
        .predicate
        .as_str()
        .strip_prefix(&config.predicate_namespace)?;
    if local.is_empty() {
        return None;
    }
    let property_label = split_camel_case(&percent_decode(local));
    let subject_label = iri_to_label(triple.subject.as_str()).ok()?;
    if subject_label.is_empty() {
        return None;
    }
    let answer = match &triple.object {
        Term::LangLiteral { lang, .. } => {
            let keep = config
                .language_filter
                .as_deref()
                .is_none_or(|f| lang.eq_ignore_ascii_case(f));
            if keep {
                object_to_answer(&triple.object)
            } else {
                None
            }
        }
        other => object_to_answer(other),
    };
    Some((property_label, subject_label, answer))
}

/// Streaming extractor for subject-sorted input: one adjacent
/// (subject, predicate) run becomes at most one pair. Memory is bounded
/// by the largest single group.
pub struct ConsecutiveExtractor {
    config: ExtractConfig,
    current: Option<Group>,
}

impl ConsecutiveExtractor {
    pub fn new(config: ExtractConfig) -> Self {
        assert!(
            !config.predicate_namespace.is_empty(),
            "predicate namespace must be nonempty"
        );
        ConsecutiveExtractor {
            config,
            current: None,
        }
    }

    /// Feeds one triple; returns the pair completed by a group-boundary
    /// crossing, if any. Ignored triples (foreign namespace, unusable
    /// subject) are transparent: they do not break runs.
    pub fn push(&mut self, triple: &Triple) -> Option<QaPair> {
        let (property_label, subject_label, answer) = prepare(&self.config, triple)?;
        let same_group = self.current.as_ref().is_some_and(|g| {
            g.subject == triple.subject.as_str() && g.predicate == triple.predicate.as_str()
        });
        let mut emitted = None;
        if !same_group {
            emitted = self
                .current
                .take()
                .and_then(|g| g.emit(self.config.lowercase_output));
            self.current = Some(Group {
                subject: triple.subject.as_str().to_string(),
                predicate: triple.predicate.as_str().to_string(),
                property_label,
                subject_label,
                answers: Vec::new(),
            });
        }
        if let (Some(group), Some(answer)) = (self.current.as_mut(), answer) {
            group.answers.push(answer);
        }
        emitted
    }

    /// Flushes the trailing group at end of input.
    pub fn finish(&mut self) -> Option<QaPair> {
        self.current
            .take()
            .and_then(|g| g.emit(self.config.lowercase_output))
    }
}

/// Whole-input extractor keyed on (subject, predicate) regardless of
/// order. Groups are emitted in first-appearance order; answers keep
/// input order.
pub struct GlobalExtractor {
    config: ExtractConfig,
    groups: Vec<Group>,
    index: HashMap<(String, String), usize>,
}

impl GlobalExtractor {
    pub fn new(config: ExtractConfig) -> Self {
        assert!(
            !config.predicate_namespace.is_empty(),
            "predicate namespace must be nonempty"
        );
        GlobalExtractor {
            config,
            groups: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn push(&mut self, triple: &Triple) {
        let (property_label, subject_label, answer) = match prepare(&self.config, triple) {
            Some(p) => p,
            None => return,
        };
        let key = (
            triple.subject.as_str().to_string(),
            triple.predicate.as_str().to_string(),
        );
        let idx = match self.index.get(&key) {
            Some(&idx) => idx,
            None => {
                self.groups.push(Group {
                    subject: key.0.clone(),
                    predicate: key.1.clone(),
                    property_label,
                    subject_label,
                    answers: Vec::new(),
                });
                self.index.insert(key, self.groups.len() - 1);
                self.groups.len() - 1
            }
        };
        if let Some(answer) = answer {
            self.groups[idx].answers.push(answer);
        }
    }

    pub fn finish(self) -> Vec<QaPair> {
        let lowercase = self.config.lowercase_output;
        self.groups
            .into_iter()
            .filter_map(|g| g.emit(lowercase))
            .collect()
    }
}

/// Runs the configured grouping mode over an in-memory triple sequence.
pub fn extract_qa_pairs<I>(triples: I, config: &ExtractConfig) -> Vec<QaPair>
where
    I: IntoIterator<Item = Triple>,
{
    match config.grouping {
        Grouping::Consecutive => {
            let mut extractor = ConsecutiveExtractor::new(config.clone());
            let mut pairs: Vec<QaPair> = triples
                .into_iter()
                .filter_map(|t| extractor.push(&t))
                .collect();
            pairs.extend(extractor.finish());
            pairs
        }
        Grouping::Global => {
            let mut extractor = GlobalExtractor::new(config.clone());
            for t in triples {
                extractor.push(&t);
            }
            extractor.finish()
        }
    }
}
