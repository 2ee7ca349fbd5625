//! Extracts question-answer dialogue pairs from OPUS-style timed
//! subtitle documents.
//!
//! Documents carry `<s>` sentence elements with `<time>` markers
//! (`HH:MM:SS,mmm`) and either `<w>` word tokens or plain text. A pair is
//! emitted when a sentence ends with a question mark, the next one does
//! not, and the reply starts less than the configured gap after the
//! question ends.

use std::io::{self, BufRead};

use quick_xml::events::Event;
use quick_xml::Reader;

use crate::dbpedia::QaPair;

/// One subtitle sentence. Timestamps are absent when the document did
/// not carry both markers (or carried unparseable or inverted ones);
/// such sentences are never paired.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtitleSentence {
    pub id: String,
    pub start_ms: Option<u64>,
    pub end_ms: Option<u64>,
    pub text: String,
}

impl SubtitleSentence {
    pub fn has_times(&self) -> bool {
        self.start_ms.is_some() && self.end_ms.is_some()
    }
}

/// Pairing thresholds.
#[derive(Debug, Clone)]
pub struct DialogueRule {
    /// Maximum gap between question end and answer start, exclusive.
    pub max_gap_ms: u64,
    /// When false, sentences without timestamps may be skipped over when
    /// looking for the reply; when true only directly adjacent sentences
    /// pair.
    pub require_adjacent: bool,
}

impl Default for DialogueRule {
    fn default() -> Self {
        DialogueRule {
            max_gap_ms: 20_000,
            require_adjacent: true,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SubtitleError {
    #[error("malformed subtitle document at byte {position}: {message}")]
    Malformed { position: u64, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Parses one subtitle document into its sentences, in document order.
/// Sentences whose text normalizes to empty are dropped.
pub fn parse_subtitle_doc<R: BufRead>(reader: R) -> Result<Vec<SubtitleSentence>, SubtitleError> {
    let mut xml = Reader::from_reader(reader);
    let mut buf = Vec::new();
    let mut sentences = Vec::new();
    let mut current: Option<PendingSentence> = None;

    loop {
        let position = xml.buffer_position();
        let event = match xml.read_event_into(&mut buf) {
            Ok(event) => event,
            Err(quick_xml::Error::Io(e)) => {
                return Err(SubtitleError::Io(io::Error::new(e.kind(), e.to_string())))
            }
            Err(e) => {
                return Err(SubtitleError::Malformed {
                    position,
                    message: e.to_string(),
                })
            }
        };
        match event {
            Event::Start(e) if e.name().as_ref() == b"s" => {
                if current.is_some() {
                    return Err(SubtitleError::Malformed {
                        position,
                        message: "nested <s> element".to_string(),
                    });
                }
                let mut pending = PendingSentence::default();
                for attr in e.attributes() {
                    let attr = attr.map_err(|e| SubtitleError::Malformed {
                        position,
                        message: e.to_string(),
                    })?;
                    if attr.key.as_ref() == b"id" {
                        pending.id = String::from_utf8_lossy(&attr.value).into_owned();
                    }
                }
                current = Some(pending);
            }
            Event::End(e) if e.name().as_ref() == b"s" => {
                let pending = current.take().ok_or_else(|| SubtitleError::Malformed {
                    position,
                    message: "unbalanced </s>".to_string(),
                })?;
                if let Some(sentence) = pending.finish() {
                    sentences.push(sentence);
                }
            }
            Event::Start(e) | Event::Empty(e) if e.name().as_ref() == b"time" => {
                if let Some(pending) = current.as_mut() {
                    let mut id = None;
                    let mut value = None;
                    for attr in e.attributes() {
                        let attr = attr.map_err(|e| SubtitleError::Malformed {
                            position,
                            message: e.to_string(),
                        })?;
                        match attr.key.as_ref() {
                            b"id" => id = Some(String::from_utf8_lossy(&attr.value).into_owned()),
                            b"value" => {
                                value = Some(String::from_utf8_lossy(&attr.value).into_owned())
                            }
                            _ => {}
                        }
                    }
                    pending.note_time(id.as_deref(), value.as_deref());
                }
            }
            Event::Text(t) => {
                if let Some(pending) = current.as_mut() {
                    let text = t.unescape().map_err(|e| SubtitleError::Malformed {
                        position,
                        message: e.to_string(),
                    })?;
                    pending.push_text(&text);
                }
            }
            Event::Eof => {
                if current.is_some() {
                    return Err(SubtitleError::Malformed {
                        position,
                        message: "unterminated <s> element".to_string(),
                    });
                }
                break;
            }
            _ => {}
        }
        buf.clear();
    }
    Ok(sentences)
}

#[derive(Default)]
struct PendingSentence {
    id: String,
    start: Option<u64>,
    saw_start: bool,
    end: Option<u64>,
    words: Vec<String>,
}

impl PendingSentence {
    /// Classifies a time marker: ids ending in `S` are starts (first
    /// wins), ids ending in `E` are ends (last wins), anything else is a
    /// start until one is seen and an end afterwards.
    fn note_time(&mut self, id: Option<&str>, value: Option<&str>) {
        let ms = value.and_then(parse_timecode);
        match id {
            Some(id) if id.ends_with('S') => {
                if !self.saw_start {
                    self.start = ms;
                    self.saw_start = true;
                }
            }
            Some(id) if id.ends_with('E') => self.end = ms,
            _ => {
                if !self.saw_start {
                    self.start = ms;
                    self.saw_start = true;
                } else {
                    self.end = ms;
                }
            }
        }
    }

    fn push_text(&mut self, text: &str) {
        self.words
            .extend(text.split_whitespace().map(str::to_string));
    }

    fn finish(self) -> Option<SubtitleSentence> {
        let text = self.words.join(" ");
        if text.is_empty() {
            return None;
        }
        let (start_ms, end_ms) = match (self.start, self.end) {
            // An inverted span is as unusable as a missing one.
            (Some(s), Some(e)) if e >= s => (Some(s), Some(e)),
            _ => (None, None),
        };
        Some(SubtitleSentence {
            id: self.id,
            start_ms,
            end_ms,
            text,
        })
    }
}

/// Parses `HH:MM:SS,mmm` into milliseconds.
pub fn parse_timecode(value: &str) -> Option<u64> {
    let mut parts = value.trim().split(':');
    let hours: u64 = parts.next()?.parse().ok()?;
    let minutes: u64 = parts.next()?.parse().ok()?;
    let rest = parts.next()?;
    if parts.next().is_some() {
        return None;
    }
    let (seconds, millis) = rest.split_once(',')?;
    let seconds: u64 = seconds.parse().ok()?;
    let millis: u64 = millis.parse().ok()?;
    Some(((hours * 60 + minutes) * 60 + seconds) * 1000 + millis)
}

/// True when the text ends with `?` after trailing whitespace and
/// closing quotes are trimmed.
fn ends_with_question_mark(text: &str) -> bool {
    text.trim_end_matches(|c: char| c.is_whitespace() || matches!(c, '"' | '\'' | '”' | '’'))
        .ends_with('?')
}

/// Walks the sentence sequence and emits question-answer pairs.
///
/// A pair (s1, s2) qualifies when s1 ends with a question mark, s2 does
/// not, both carry timestamps, and `0 <= s2.start - s1.end <
/// rule.max_gap_ms`. Overlapping subtitles (negative gap) are excluded.
pub fn extract_dialogue_pairs(sentences: &[SubtitleSentence], rule: &DialogueRule) -> Vec<QaPair> {
    assert!(rule.max_gap_ms > 0, "max_gap_ms must be positive");
    let mut pairs = Vec::new();
    let mut consider = |s1: &SubtitleSentence, s2: &SubtitleSentence| {
        if !s1.has_times() || !s2.has_times() {
            return;
        }
        if !ends_with_question_mark(&s1.text) || ends_with_question_mark(&s2.text) {
            return;
        }
        let (end, start) = (s1.end_ms.unwrap(), s2.start_ms.unwrap());
        if start >= end && start - end < rule.max_gap_ms {
            pairs.push(QaPair::bare(s1.text.clone(), s2.text.clone()));
        }
    };
    if rule.require_adjacent {
        for w in sentences.windows(2) {
            consider(&w[0], &w[1]);
        }
    } else {
        let timed: Vec<&SubtitleSentence> = sentences.iter().filter(|s| s.has_times()).collect();
        for w in timed.windows(2) {
            consider(w[0], w[1]);
        }
    }
    pairs
}
