//! Dataset plumbing: corpus statistics, reproducible train/valid/eval
//! splits and a retrieval baseline answerer that stands in for a trained
//! model so the scoring path can be exercised end to end.

use std::collections::{BTreeSet, HashMap};
use std::io::{self, BufRead};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::dbpedia::QaPair;

/// Line count, distinct whitespace tokens, and mean tokens per line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusStats {
    pub lines: u64,
    pub vocabulary: u64,
    pub avg_words_per_line: f64,
}

/// Exact counts over a line stream. Tokens are whitespace runs, counted
/// case-sensitively unless `lowercase` is set.
pub fn corpus_stats<R: BufRead>(reader: R, lowercase: bool) -> io::Result<CorpusStats> {
    let mut lines = 0u64;
    let mut total_tokens = 0u64;
    let mut vocabulary: BTreeSet<String> = BTreeSet::new();
    for line in reader.lines() {
        let line = line?;
        lines += 1;
        for token in line.split_whitespace() {
            total_tokens += 1;
            if lowercase {
                vocabulary.insert(token.to_lowercase());
            } else {
                vocabulary.insert(token.to_string());
            }
        }
    }
    Ok(CorpusStats {
        lines,
        vocabulary: vocabulary.len() as u64,
        avg_words_per_line: if lines == 0 {
            0.0
        } else {
            total_tokens as f64 / lines as f64
        },
    })
}

/// Split sizes and the shuffle seed.
#[derive(Debug, Clone, Copy)]
pub struct SplitSpec {
    pub seed: u64,
    pub valid_size: usize,
    pub eval_size: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum SplitError {
    #[error("requested validation ({valid}) + evaluation ({eval}) sizes do not leave a training set from {total} pairs")]
    SizesTooLarge {
        valid: usize,
        eval: usize,
        total: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<QaPair>,
    pub valid: Vec<QaPair>,
    pub eval: Vec<QaPair>,
}

/// Shuffles with a ChaCha8-seeded Fisher-Yates permutation (fixed
/// generator, so splits reproduce across runs and platforms), then deals
/// the first `eval_size` pairs to eval, the next `valid_size` to valid
/// and the remainder to train. The three outputs partition the input.
pub fn split_corpus(mut pairs: Vec<QaPair>, spec: &SplitSpec) -> Result<Split, SplitError> {
    let total = pairs.len();
    if spec.valid_size + spec.eval_size >= total {
        return Err(SplitError::SizesTooLarge {
            valid: spec.valid_size,
            eval: spec.eval_size,
            total,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for i in (1..pairs.len()).rev() {
        // Modulo keeps the draw portable; the bias is immaterial at
        // corpus scale.
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        pairs.swap(i, j);
    }
    let train = pairs.split_off(spec.eval_size + spec.valid_size);
    let valid = pairs.split_off(spec.eval_size);
    let eval = pairs;
    Ok(Split { train, valid, eval })
}

/// Drops pairs whose question was already seen, keeping first
/// occurrences in order.
pub fn dedupe_by_question(pairs: Vec<QaPair>) -> Vec<QaPair> {
    let mut seen: BTreeSet<String> = BTreeSet::new();
    pairs
        .into_iter()
        .filter(|p| seen.insert(p.question.clone()))
        .collect()
}

#[derive(Debug, thiserror::Error)]
#[error("cannot build an answer index from zero pairs")]
pub struct EmptyIndex;

struct IndexEntry {
    tokens: BTreeSet<String>,
    question: String,
    answer: String,
}

/// Immutable question lookup: exact matches first, token-set Jaccard
/// overlap otherwise. Safe to share across threads once built.
pub struct AnswerIndex {
    exact: HashMap<String, String>,
    entries: Vec<IndexEntry>,
}

impl AnswerIndex {
    /// First occurrence wins for duplicate questions.
    pub fn build(pairs: &[QaPair]) -> Result<AnswerIndex, EmptyIndex> {
        if pairs.is_empty() {
            return Err(EmptyIndex);
        }
        let mut exact = HashMap::new();
        let mut entries = Vec::with_capacity(pairs.len());
        for pair in pairs {
            exact
                .entry(pair.question.clone())
                .or_insert_with(|| pair.answer.clone());
            entries.push(IndexEntry {
                tokens: pair
                    .question
                    .split_whitespace()
                    .map(str::to_string)
                    .collect(),
                question: pair.question.clone(),
                answer: pair.answer.clone(),
            });
        }
        Ok(AnswerIndex { exact, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total function: an exact question match returns its stored
    /// answer; otherwise the entry with maximal Jaccard token overlap
    /// wins, ties (including all-zero overlap) going to the
    /// lexicographically smallest question.
    pub fn answer(&self, question: &str) -> &str {
        if let Some(answer) = self.exact.get(question) {
            return answer;
        }
        let query: BTreeSet<&str> = question.split_whitespace().collect();
        let mut best: Option<(usize, usize, &IndexEntry)> = None;
        for entry in &self.entries {
            let inter = query.iter().filter(|t| entry.tokens.contains(**t)).count();
            let union = query.len() + entry.tokens.len() - inter;
            let wins = match &best {
                None => true,
                Some((best_inter, best_union, best_entry)) => {
                    // Compare inter/union fractions without dividing.
                    let lhs = inter as u128 * *best_union as u128;
                    let rhs = *best_inter as u128 * union as u128;
                    lhs > rhs || (lhs == rhs && entry.question < best_entry.question)
                }
            };
            if wins {
                best = Some((inter, union, entry));
            }
        }
        &best.expect("index is never empty").2.answer
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(q: &str, a: &str) -> QaPair {
        QaPair::bare(q, a)
    }

    fn numbered(n: usize) -> Vec<QaPair> {
        (0..n)
            .map(|i| pair(&format!("q{i}"), &format!("a{i}")))
            .collect()
    }

    fn sorted(mut pairs: Vec<QaPair>) -> Vec<QaPair> {
        pairs.sort_by(|a, b| a.question.cmp(&b.question));
        pairs
    }

    #[test]
    fn stats_count_lines_vocabulary_and_average() {
        let stats = corpus_stats("a b\na c d\n".as_bytes(), false).unwrap();
        assert_eq!(stats.lines, 2);
        assert_eq!(stats.vocabulary, 4);
        assert!((stats.avg_words_per_line - 2.5).abs() < 1e-12);
    }

    #[test]
    fn stats_of_empty_input_are_zero() {
        let stats = corpus_stats("".as_bytes(), false).unwrap();
        assert_eq!(
            stats,
            CorpusStats {
                lines: 0,
                vocabulary: 0,
                avg_words_per_line: 0.0
            }
        );
    }

    #[test]
    fn stats_match_an_independent_recount() {
        let text = "era of Aristotle\nAncient philosophy\n384\nbirth Date of Aristotle\n";
        let stats = corpus_stats(text.as_bytes(), false).unwrap();
        // Independent recount with plain iterator chains.
        let lines: Vec<&str> = text.lines().collect();
        let all: Vec<&str> = text.split_whitespace().collect();
        let mut distinct = all.clone();
        distinct.sort_unstable();
        distinct.dedup();
        assert_eq!(stats.lines, lines.len() as u64);
        assert_eq!(stats.vocabulary, distinct.len() as u64);
        assert!((stats.avg_words_per_line - all.len() as f64 / lines.len() as f64).abs() < 1e-12);
    }

    #[test]
    fn stats_are_invariant_under_line_reordering() {
        let forward = corpus_stats("a b\nc\nd e f\n".as_bytes(), false).unwrap();
        let backward = corpus_stats("d e f\nc\na b\n".as_bytes(), false).unwrap();
        assert_eq!(forward.lines, backward.lines);
        assert_eq!(forward.vocabulary, backward.vocabulary);
    }

    #[test]
    fn stats_lowercase_flag_merges_case_variants() {
        let sensitive = corpus_stats("The the THE\n".as_bytes(), false).unwrap();
        let folded = corpus_stats("The the THE\n".as_bytes(), true).unwrap();
        assert_eq!(sensitive.vocabulary, 3);
        assert_eq!(folded.vocabulary, 1);
    }

    #[test]
    fn split_partitions_with_requested_sizes() {
        let pairs = numbered(10);
        let spec = SplitSpec {
            seed: 7,
            valid_size: 2,
            eval_size: 3,
        };
        let split = split_corpus(pairs.clone(), &spec).unwrap();
        assert_eq!(split.train.len(), 5);
        assert_eq!(split.valid.len(), 2);
        assert_eq!(split.eval.len(), 3);

        let mut reunited = split.train.clone();
        reunited.extend(split.valid.clone());
        reunited.extend(split.eval.clone());
        assert_eq!(sorted(reunited), sorted(pairs));
    }

    #[test]
    fn split_is_deterministic_per_seed_and_varies_across_seeds() {
        let pairs = numbered(10);
        let spec = SplitSpec {
            seed: 7,
            valid_size: 2,
            eval_size: 3,
        };
        let a = split_corpus(pairs.clone(), &spec).unwrap();
        let b = split_corpus(pairs.clone(), &spec).unwrap();
        assert_eq!(a, b);

        let other = split_corpus(pairs, &SplitSpec { seed: 8, ..spec }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn zero_sizes_yield_a_permuted_train_set() {
        let pairs = numbered(5);
        let split = split_corpus(
            pairs.clone(),
            &SplitSpec {
                seed: 1,
                valid_size: 0,
                eval_size: 0,
            },
        )
        .unwrap();
        assert!(split.valid.is_empty());
        assert!(split.eval.is_empty());
        assert_eq!(sorted(split.train), sorted(pairs));
    }

    #[test]
    fn oversized_requests_error_with_counts() {
        match split_corpus(
            numbered(10),
            &SplitSpec {
                seed: 0,
                valid_size: 5,
                eval_size: 5,
            },
        ) {
            Err(SplitError::SizesTooLarge { valid, eval, total }) => {
                assert_eq!((valid, eval, total), (5, 5, 10));
            }
            other => panic!("expected SizesTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn dedupe_keeps_first_occurrence() {
        let pairs = vec![pair("q", "first"), pair("r", "other"), pair("q", "second")];
        let deduped = dedupe_by_question(pairs);
        assert_eq!(deduped.len(), 2);
        assert_eq!(deduped[0].answer, "first");
    }

    #[test]
    fn exact_question_returns_stored_answer() {
        let index = AnswerIndex::build(&[
            pair("era of Aristotle", "Ancient philosophy"),
            pair("name of Aristotle", "Aristotle"),
        ])
        .unwrap();
        assert_eq!(index.answer("era of Aristotle"), "Ancient philosophy");
    }

    #[test]
    fn duplicate_questions_keep_the_first_answer() {
        let index = AnswerIndex::build(&[pair("q", "first"), pair("q", "second")]).unwrap();
        assert_eq!(index.answer("q"), "first");
    }

    #[test]
    fn jaccard_overlap_picks_the_closest_question() {
        let index = AnswerIndex::build(&[pair("a b", "x"), pair("c d", "y")]).unwrap();
        // Overlap with `a b` is 1/3, with `c d` is 0.
        assert_eq!(index.answer("a z"), "x");
    }

    #[test]
    fn zero_overlap_falls_back_to_smallest_question() {
        let index = AnswerIndex::build(&[pair("m n", "x"), pair("c d", "y")]).unwrap();
        assert_eq!(index.answer("zz"), "y");
    }

    #[test]
    fn single_entry_answers_everything() {
        let index = AnswerIndex::build(&[pair("only question", "only answer")]).unwrap();
        assert_eq!(index.answer("anything at all"), "only answer");
        assert_eq!(index.answer(""), "only answer");
    }

    #[test]
    fn empty_index_is_an_error() {
        assert!(AnswerIndex::build(&[]).is_err());
    }

    #[test]
    fn self_retrieval_returns_stored_answers() {
        let pairs = numbered(20);
        let index = AnswerIndex::build(&pairs).unwrap();
        for p in &pairs {
            assert_eq!(index.answer(&p.question), p.answer);
        }
    }
}
