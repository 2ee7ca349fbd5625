//! The tab-separated pair format shared by the extractors, the splitter
//! and the scorer.
//!
//! Four-column lines are `question<TAB>answer<TAB>property<TAB>subject`;
//! two-column lines drop the metadata. Fields may not contain tabs or
//! line breaks; offending pairs are rejected at write time.

use std::io::{self, BufRead, Write};

use crate::dbpedia::QaPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Columns {
    Two,
    Four,
}

#[derive(Debug, thiserror::Error)]
pub enum TsvError {
    #[error("field `{field}` of pair with question {question:?} contains a tab or line break")]
    BadField {
        field: &'static str,
        question: String,
    },
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn check_field(field: &'static str, value: &str, question: &str) -> Result<(), TsvError> {
    if value.contains(['\t', '\n', '\r']) {
        return Err(TsvError::BadField {
            field,
            question: question.to_string(),
        });
    }
    Ok(())
}

/// Renders one pair as a TSV line (no trailing newline), validating the
/// written fields.
pub fn format_pair(pair: &QaPair, columns: Columns) -> Result<String, TsvError> {
    check_field("question", &pair.question, &pair.question)?;
    check_field("answer", &pair.answer, &pair.question)?;
    match columns {
        Columns::Two => Ok(format!("{}\t{}", pair.question, pair.answer)),
        Columns::Four => {
            check_field("property_label", &pair.property_label, &pair.question)?;
            check_field("subject_label", &pair.subject_label, &pair.question)?;
            Ok(format!(
                "{}\t{}\t{}\t{}",
                pair.question, pair.answer, pair.property_label, pair.subject_label
            ))
        }
    }
}

pub fn write_pairs<'a, W, I>(writer: &mut W, pairs: I, columns: Columns) -> Result<(), TsvError>
where
    W: Write + ?Sized,
    I: IntoIterator<Item = &'a QaPair>,
{
    for pair in pairs {
        writeln!(writer, "{}", format_pair(pair, columns)?)?;
    }
    Ok(())
}

/// Reads a pair file, accepting either column layout but requiring it to
/// be consistent across lines.
pub fn read_pairs<R: BufRead>(reader: R) -> Result<(Vec<QaPair>, Columns), TsvError> {
    let mut pairs = Vec::new();
    let mut columns: Option<Columns> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx as u64 + 1;
        let fields: Vec<&str> = line.split('\t').collect();
        let layout = match fields.len() {
            2 => Columns::Two,
            4 => Columns::Four,
            n => {
                return Err(TsvError::Malformed {
                    line: line_no,
                    message: format!("expected 2 or 4 tab-separated fields, found {n}"),
                })
            }
        };
        match columns {
            None => columns = Some(layout),
            Some(existing) if existing != layout => {
                return Err(TsvError::Malformed {
                    line: line_no,
                    message: "inconsistent column count".to_string(),
                })
            }
            Some(_) => {}
        }
        pairs.push(QaPair {
            question: fields[0].to_string(),
            answer: fields[1].to_string(),
            property_label: fields.get(2).unwrap_or(&"").to_string(),
            subject_label: fields.get(3).unwrap_or(&"").to_string(),
        });
    }
    Ok((pairs, columns.unwrap_or(Columns::Four)))
}
