//! The `qakit` command-line interface.
//!
//! Every subcommand validates its flags and input paths before writing
//! anything, writes output files atomically (temp file + rename, so
//! failed runs leave no partial outputs), sends data to stdout or the
//! `--out` file and diagnostics to stderr, and exits 0 on success, 1 on
//! input/validation errors, 2 on I/O errors and 3 on internal errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use flate2::bufread::GzDecoder;

use crate::bpe::{self, BpeApplier, BpeError, BpeModel, WordFrequencyTable};
use crate::corpus::{corpus_stats, dedupe_by_question, split_corpus, AnswerIndex, SplitSpec};
use crate::dbpedia::{ConsecutiveExtractor, ExtractConfig, GlobalExtractor, Grouping, QaPair};
use crate::metrics::{align_records, score_by_property, score_corpus, MetricConfig};
use crate::ntriples::{NtReader, Parsed};
use crate::subtitles::{extract_dialogue_pairs, parse_subtitle_doc, DialogueRule, SubtitleError};
use crate::tsv::{format_pair, read_pairs, Columns, TsvError};

/// Process exit disposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    /// Bad flags, missing inputs, malformed or inconsistent data.
    Usage,
    /// The system failed us mid-run.
    Io,
    /// A bug: an invariant did not hold.
    Internal,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::Usage => 1,
            ExitStatus::Io => 2,
            ExitStatus::Internal => 3,
        }
    }
}

/// Training hyperparameters recorded for an external seq2seq trainer.
/// Rendered as sorted `key = value` lines so the manifest is byte-stable
/// and trivially diffable.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfigManifest {
    pub layers: u32,
    pub hidden_units: u32,
    pub input_feeding: bool,
    pub batch_size: u32,
    pub dropout: f64,
    pub learning_rate_decay: String,
    pub epochs: u32,
}

impl Default for TrainConfigManifest {
    fn default() -> Self {
        TrainConfigManifest {
            layers: 2,
            hidden_units: 500,
            input_feeding: true,
            batch_size: 64,
            dropout: 0.3,
            learning_rate_decay: "dynamic".to_string(),
            epochs: 13,
        }
    }
}

impl TrainConfigManifest {
    pub fn render(&self) -> String {
        // Keys stay sorted; add new fields in order.
        format!(
            "batch_size = {}\n\
             dropout = {}\n\
             epochs = {}\n\
             hidden_units = {}\n\
             input_feeding = {}\n\
             layers = {}\n\
             learning_rate_decay = {}\n",
            self.batch_size,
            self.dropout,
            self.epochs,
            self.hidden_units,
            self.input_feeding,
            self.layers,
            self.learning_rate_decay,
        )
    }
}

#[derive(Parser)]
#[command(
    name = "qakit",
    version,
    about = "Build, segment and score question-answer corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupingArg {
    Consecutive,
    Global,
}

#[derive(Clone, Copy, ValueEnum)]
enum ColumnsArg {
    #[value(name = "2")]
    Two,
    #[value(name = "4")]
    Four,
}

impl From<ColumnsArg> for Columns {
    fn from(value: ColumnsArg) -> Columns {
        match value {
            ColumnsArg::Two => Columns::Two,
            ColumnsArg::Four => Columns::Four,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Both,
    Questions,
    Answers,
}

#[derive(Subcommand)]
enum Command {
    /// Extract question-answer pairs from an n-triples dump
    ExtractDbpedia {
        /// Input .nt file (.gz accepted)
        input: PathBuf,
        /// Output TSV path
        #[arg(long)]
        out: PathBuf,
        /// Language filter for tagged literals
        #[arg(long, default_value = "en")]
        lang: String,
        /// Lowercase emitted questions and answers
        #[arg(long)]
        lowercase: bool,
        #[arg(long, value_enum, default_value = "consecutive")]
        grouping: GroupingArg,
        /// Abort on the first malformed line instead of skipping it
        #[arg(long)]
        strict: bool,
        /// Output column count
        #[arg(long, value_enum, default_value = "4")]
        columns: ColumnsArg,
        /// Predicate namespace prefix to keep
        #[arg(long, default_value = "http://dbpedia.org/property/")]
        namespace: String,
    },
    /// Extract dialogue pairs from timed subtitle documents
    ExtractSubtitles {
        /// A subtitle XML file or a directory of them (.gz accepted)
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Maximum question-to-answer gap in milliseconds (exclusive)
        #[arg(long, default_value_t = 20_000)]
        max_gap_ms: u64,
        #[arg(long, value_enum, default_value = "2")]
        columns: ColumnsArg,
    },
    /// Learn a BPE merge table from text corpora
    BpeLearn {
        /// Corpus files (plain text or pair TSVs)
        #[arg(required = true)]
        corpus: Vec<PathBuf>,
        /// Number of merges to learn
        #[arg(long, default_value_t = 32_000)]
        merges: usize,
        #[arg(long)]
        out: PathBuf,
        /// Which TSV side to learn from (ignored for plain text)
        #[arg(long, value_enum, default_value = "both")]
        side: SideArg,
    },
    /// Segment a text file with a learned BPE model
    BpeApply {
        model: PathBuf,
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Undo BPE segmentation
    BpeDecode {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Continuation marker the input was encoded with
        #[arg(long, default_value = "@@")]
        marker: String,
    },
    /// Shuffle a pair TSV into train/valid/eval files
    Split {
        input: PathBuf,
        /// Validation set size
        #[arg(long)]
        valid: usize,
        /// Evaluation set size
        #[arg(long)]
        eval: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
        /// Drop repeated questions (first occurrence wins) before
        /// splitting
        #[arg(long)]
        dedupe_questions: bool,
    },
    /// Print line/vocabulary/average-length statistics
    Stats {
        input: PathBuf,
        /// Fold case before counting the vocabulary
        #[arg(long)]
        lowercase: bool,
    },
    /// Answer questions with the retrieval baseline
    Answer {
        /// Training pair TSV
        #[arg(long)]
        train: PathBuf,
        /// One question per line
        #[arg(long)]
        questions: PathBuf,
        /// Output file, one answer per line
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a hypothesis file against gold answers
    Score {
        /// One generated answer per line
        #[arg(long)]
        hyp: PathBuf,
        /// Gold pair TSV
        #[arg(long)]
        gold: PathBuf,
        /// Lowercase both sides before scoring
        #[arg(long)]
        lowercase: bool,
        #[arg(long, default_value_t = 3.0)]
        chrf_beta: f64,
        #[arg(long, default_value_t = 4)]
        bleu_n: usize,
    },
    /// Rank gold properties by average METEOR of their answers
    ScoreByProperty {
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        /// Lowercase both sides before scoring
        #[arg(long)]
        lowercase: bool,
    },
    /// Write the recorded trainer hyperparameters
    EmitTrainConfig {
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses the arguments and runs one subcommand.
pub fn run<I, T>(args: I) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitStatus::Success;
        }
        Err(e) => {
            let message = e.to_string();
            let first = message
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            eprintln!("qakit: {first}");
            return ExitStatus::Usage;
        }
    };
    match catch_unwind(AssertUnwindSafe(|| execute(cli.command))) {
        Ok(Ok(())) => ExitStatus::Success,
        Ok(Err(e)) => {
            eprintln!("qakit: {}", e.message);
            e.status
        }
        Err(_) => {
            eprintln!("qakit: internal error (invariant violation)");
            ExitStatus::Internal
        }
    }
}

struct CmdError {
    status: ExitStatus,
    message: String,
}

fn usage(message: impl ToString) -> CmdError {
    CmdError {
        status: ExitStatus::Usage,
        message: message.to_string(),
    }
}

fn io_err(message: impl ToString) -> CmdError {
    CmdError {
        status: ExitStatus::Io,
        message: message.to_string(),
    }
}

impl From<io::Error> for CmdError {
    fn from(e: io::Error) -> Self {
        io_err(e)
    }
}

impl From<TsvError> for CmdError {
    fn from(e: TsvError) -> Self {
        match e {
            TsvError::Io(e) => io_err(e),
            other => usage(other),
        }
    }
}

impl From<BpeError> for CmdError {
    fn from(e: BpeError) -> Self {
        match e {
            BpeError::Io(e) => io_err(e),
            other => usage(other),
        }
    }
}

impl From<SubtitleError> for CmdError {
    fn from(e: SubtitleError) -> Self {
        match e {
            SubtitleError::Io(e) => io_err(e),
            other => usage(other),
        }
    }
}

/// Input files must exist before any output is touched.
fn require_exists(path: &Path) -> Result<(), CmdError> {
    if !path.exists() {
        return Err(usage(format!(
            "no such file or directory: {}",
            path.display()
        )));
    }
    Ok(())
}

/// Opens a text input, transparently decompressing `.gz`.
fn open_text(path: &Path) -> Result<Box<dyn BufRead>, CmdError> {
    let file =
        File::open(path).map_err(|e| io_err(format!("cannot open {}: {e}", path.display())))?;
    if path.extension().is_some_and(|ext| ext == "gz") {
        Ok(Box::new(BufReader::new(GzDecoder::new(BufReader::new(
            file,
        )))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>, CmdError> {
    open_text(path)?
        .lines()
        .collect::<io::Result<Vec<_>>>()
        .map_err(|e| io_err(format!("reading {}: {e}", path.display())))
}

/// Writes through a temp file in the target directory and renames on
/// success, so interrupted or failed runs never leave partial output.
fn write_atomic<F>(path: &Path, write: F) -> Result<(), CmdError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), CmdError>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| io_err(format!("cannot create temp file in {}: {e}", dir.display())))?;
    {
        let mut buffered = BufWriter::new(tmp.as_file_mut());
        write(&mut buffered)?;
        buffered.flush()?;
    }
    tmp.persist(path)
        .map_err(|e| io_err(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

fn execute(command: Command) -> Result<(), CmdError> {
    match command {
        Command::ExtractDbpedia {
            input,
            out,
            lang,
            lowercase,
            grouping,
            strict,
            columns,
            namespace,
        } => {
            require_exists(&input)?;
            if namespace.is_empty() {
                return Err(usage("--namespace must be nonempty"));
            }
            let config = ExtractConfig {
                language_filter: Some(lang),
                lowercase_output: lowercase,
                grouping: match grouping {
                    GroupingArg::Consecutive => Grouping::Consecutive,
                    GroupingArg::Global => Grouping::Global,
                },
                predicate_namespace: namespace,
            };
            extract_dbpedia(&input, &out, config, strict, columns.into())
        }
        Command::ExtractSubtitles {
            input,
            out,
            max_gap_ms,
            columns,
        } => {
            require_exists(&input)?;
            if max_gap_ms == 0 {
                return Err(usage("--max-gap-ms must be positive"));
            }
            let rule = DialogueRule {
                max_gap_ms,
                require_adjacent: true,
            };
            extract_subtitles(&input, &out, &rule, columns.into())
        }
        Command::BpeLearn {
            corpus,
            merges,
            out,
            side,
        } => {
            for path in &corpus {
                require_exists(path)?;
            }
            let mut table = WordFrequencyTable::new();
            for path in &corpus {
                for line in open_text(path)?.lines() {
                    let line = line?;
                    table.add_line(&select_side(&line, side));
                }
            }
            let model = bpe::learn_bpe(&table, merges)?;
            eprintln!(
                "qakit: learned {} merges from {} distinct words",
                model.merges().len(),
                table.distinct_words()
            );
            write_atomic(&out, |w| Ok(model.save(w)?))
        }
        Command::BpeApply { model, input, out } => {
            require_exists(&model)?;
            require_exists(&input)?;
            let model = BpeModel::load(open_text(&model)?)?;
            let mut applier = BpeApplier::new(&model);
            let lines = read_lines(&input)?;
            write_atomic(&out, |w| {
                for line in &lines {
                    writeln!(w, "{}", applier.apply_line(line)?)?;
                }
                Ok(())
            })
        }
        Command::BpeDecode { input, out, marker } => {
            require_exists(&input)?;
            if marker.is_empty() {
                return Err(usage("--marker must be nonempty"));
            }
            let lines = read_lines(&input)?;
            write_atomic(&out, |w| {
                for line in &lines {
                    writeln!(w, "{}", bpe::decode_bpe(line, &marker))?;
                }
                Ok(())
            })
        }
        Command::Split {
            input,
            valid,
            eval,
            seed,
            out_dir,
            dedupe_questions,
        } => {
            require_exists(&input)?;
            let (mut pairs, columns) = read_pairs(open_text(&input)?)?;
            if dedupe_questions {
                pairs = dedupe_by_question(pairs);
            }
            let spec = SplitSpec {
                seed,
                valid_size: valid,
                eval_size: eval,
            };
            let split = split_corpus(pairs, &spec).map_err(usage)?;
            std::fs::create_dir_all(&out_dir)
                .map_err(|e| io_err(format!("cannot create {}: {e}", out_dir.display())))?;
            for (name, part) in [
                ("train.tsv", &split.train),
                ("valid.tsv", &split.valid),
                ("eval.tsv", &split.eval),
            ] {
                write_atomic(&out_dir.join(name), |w| {
                    Ok(crate::tsv::write_pairs(w, part.iter(), columns)?)
                })?;
            }
            eprintln!(
                "qakit: split {} pairs into {}/{}/{} (train/valid/eval)",
                split.train.len() + split.valid.len() + split.eval.len(),
                split.train.len(),
                split.valid.len(),
                split.eval.len()
            );
            Ok(())
        }
        Command::Stats { input, lowercase } => {
            require_exists(&input)?;
            let stats = corpus_stats(open_text(&input)?, lowercase)?;
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "lines\t{}", stats.lines)?;
            writeln!(stdout, "vocabulary\t{}", stats.vocabulary)?;
            writeln!(
                stdout,
                "avg_words_per_line\t{:.2}",
                stats.avg_words_per_line
            )?;
            Ok(())
        }
        Command::Answer {
            train,
            questions,
            out,
        } => {
            require_exists(&train)?;
            require_exists(&questions)?;
            let (pairs, _) = read_pairs(open_text(&train)?)?;
            let index = AnswerIndex::build(&pairs).map_err(usage)?;
            let questions = read_lines(&questions)?;
            write_atomic(&out, |w| {
                for question in &questions {
                    writeln!(w, "{}", index.answer(question))?;
                }
                Ok(())
            })
        }
        Command::Score {
            hyp,
            gold,
            lowercase,
            chrf_beta,
            bleu_n,
        } => {
            if chrf_beta <= 0.0 {
                return Err(usage("--chrf-beta must be positive"));
            }
            if bleu_n == 0 {
                return Err(usage("--bleu-n must be at least 1"));
            }
            let config = MetricConfig {
                bleu_max_n: bleu_n,
                chrf_beta,
                ..MetricConfig::default()
            };
            let records = load_records(&hyp, &gold, lowercase)?;
            let report = score_corpus(&records, &config).map_err(usage)?;
            let mut stdout = io::stdout().lock();
            for (i, s) in report.per_sentence.iter().enumerate() {
                writeln!(
                    stdout,
                    "{}\t{:.2}\t{:.2}\t{:.2}\t{:.2}",
                    i + 1,
                    s.bleu,
                    s.bleu1,
                    s.meteor,
                    s.chrf
                )?;
            }
            writeln!(stdout, "records\t{}", report.count)?;
            writeln!(stdout, "BLEU\t{:.2}", report.corpus.bleu)?;
            writeln!(stdout, "BLEU-1\t{:.2}", report.corpus.bleu1)?;
            writeln!(stdout, "METEOR\t{:.2}", report.corpus.meteor)?;
            writeln!(stdout, "chrF\t{:.2}", report.corpus.chrf)?;
            Ok(())
        }
        Command::ScoreByProperty {
            hyp,
            gold,
            lowercase,
        } => {
            let records = load_records(&hyp, &gold, lowercase)?;
            let report = score_by_property(&records, &MetricConfig::default()).map_err(usage)?;
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "avg_meteor\tproperty\tappearances")?;
            for row in &report.rows {
                writeln!(
                    stdout,
                    "{:.2}\t{}\t{}",
                    row.avg_meteor, row.property_label, row.appearances
                )?;
            }
            Ok(())
        }
        Command::EmitTrainConfig { out } => {
            let manifest = TrainConfigManifest::default();
            write_atomic(&out, |w| {
                w.write_all(manifest.render().as_bytes())?;
                Ok(())
            })
        }
    }
}

/// Picks the learning text from a corpus line: TSV lines contribute the
/// requested side, plain lines pass through whole.
fn select_side(line: &str, side: SideArg) -> String {
    if !line.contains('\t') {
        return line.to_string();
    }
    let fields: Vec<&str> = line.split('\t').collect();
    match side {
        SideArg::Questions => fields[0].to_string(),
        SideArg::Answers => fields.get(1).copied().unwrap_or("").to_string(),
        SideArg::Both => {
            let mut joined = fields[0].to_string();
            if let Some(answer) = fields.get(1) {
                joined.push(' ');
                joined.push_str(answer);
            }
            joined
        }
    }
}

fn load_records(
    hyp: &Path,
    gold: &Path,
    lowercase: bool,
) -> Result<Vec<crate::metrics::EvalRecord>, CmdError> {
    require_exists(hyp)?;
    require_exists(gold)?;
    let hypotheses = read_lines(hyp)?;
    let (gold_pairs, _) = read_pairs(open_text(gold)?)?;
    let mut records = align_records(&hypotheses, &gold_pairs).map_err(usage)?;
    if lowercase {
        for record in &mut records {
            record.hypothesis = record.hypothesis.to_lowercase();
            record.reference = record.reference.to_lowercase();
        }
    }
    Ok(records)
}

fn extract_dbpedia(
    input: &Path,
    out: &Path,
    config: ExtractConfig,
    strict: bool,
    columns: Columns,
) -> Result<(), CmdError> {
    let grouping = config.grouping;
    let reader = NtReader::with_strict(open_text(input)?, strict);
    let mut lines = 0u64;
    let mut skipped = 0u64;
    let mut errors = 0u64;
    let mut written = 0u64;

    write_atomic(out, |w| {
        let mut consecutive = match grouping {
            Grouping::Consecutive => Some(ConsecutiveExtractor::new(config.clone())),
            Grouping::Global => None,
        };
        let mut global = match grouping {
            Grouping::Global => Some(GlobalExtractor::new(config.clone())),
            Grouping::Consecutive => None,
        };
        let mut emit = |pair: QaPair, w: &mut dyn Write| -> Result<(), CmdError> {
            match format_pair(&pair, columns) {
                Ok(line) => {
                    writeln!(w, "{line}")?;
                    written += 1;
                    Ok(())
                }
                Err(e) if !strict => {
                    eprintln!("qakit: skipping pair: {e}");
                    Ok(())
                }
                Err(e) => Err(usage(e)),
            }
        };
        for outcome in reader {
            let outcome =
                outcome.map_err(|e| io_err(format!("reading {}: {e}", input.display())))?;
            lines = outcome.line_number;
            match outcome.parse {
                Parsed::Triple(triple) => {
                    if let Some(extractor) = consecutive.as_mut() {
                        if let Some(pair) = extractor.push(&triple) {
                            emit(pair, w)?;
                        }
                    } else if let Some(extractor) = global.as_mut() {
                        extractor.push(&triple);
                    }
                }
                Parsed::Skipped => skipped += 1,
                Parsed::Error(e) => {
                    if strict {
                        return Err(usage(format!(
                            "{}:{}: {e}",
                            input.display(),
                            outcome.line_number
                        )));
                    }
                    errors += 1;
                    eprintln!(
                        "qakit: {}:{}: skipping malformed line: {e}",
                        input.display(),
                        outcome.line_number
                    );
                }
            }
        }
        if let Some(mut extractor) = consecutive.take() {
            if let Some(pair) = extractor.finish() {
                emit(pair, w)?;
            }
        }
        if let Some(extractor) = global.take() {
            for pair in extractor.finish() {
                emit(pair, w)?;
            }
        }
        Ok(())
    })?;
    eprintln!(
        "qakit: {lines} lines in, {written} pairs out ({skipped} skipped, {errors} malformed)"
    );
    Ok(())
}

/// Subtitle inputs may be one document or a directory tree of `.xml` /
/// `.xml.gz` documents; directory contents are processed in sorted path
/// order so output is deterministic.
fn subtitle_files(input: &Path) -> Result<Vec<PathBuf>, CmdError> {
    if input.is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    let mut files = Vec::new();
    for entry in walkdir::WalkDir::new(input).sort_by_file_name() {
        let entry = entry.map_err(|e| io_err(format!("scanning {}: {e}", input.display())))?;
        if !entry.file_type().is_file() {
            continue;
        }
        let name = entry.file_name().to_string_lossy();
        if name.ends_with(".xml") || name.ends_with(".xml.gz") {
            files.push(entry.into_path());
        }
    }
    if files.is_empty() {
        return Err(usage(format!(
            "no .xml or .xml.gz subtitle documents under {}",
            input.display()
        )));
    }
    Ok(files)
}

fn extract_subtitles(
    input: &Path,
    out: &Path,
    rule: &DialogueRule,
    columns: Columns,
) -> Result<(), CmdError> {
    let files = subtitle_files(input)?;
    let mut documents = 0u64;
    let mut written = 0u64;
    write_atomic(out, |w| {
        for path in &files {
            let sentences = parse_subtitle_doc(open_text(path)?)
                .map_err(|e| usage(format!("{}: {e}", path.display())))?;
            documents += 1;
            // Pairing never crosses document boundaries.
            for pair in extract_dialogue_pairs(&sentences, rule) {
                writeln!(w, "{}", format_pair(&pair, columns)?)?;
                written += 1;
            }
        }
        Ok(())
    })?;
    eprintln!("qakit: {written} dialogue pairs from {documents} documents");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_records_the_training_recipe() {
        let rendered = TrainConfigManifest::default().render();
        assert!(rendered.contains("epochs = 13"));
        assert!(rendered.contains("layers = 2"));
        assert!(rendered.contains("hidden_units = 500"));
        assert!(rendered.contains("input_feeding = true"));
        assert!(rendered.contains("batch_size = 64"));
        assert!(rendered.contains("dropout = 0.3"));
        assert!(rendered.contains("learning_rate_decay = dynamic"));
    }

    #[test]
    fn manifest_is_byte_stable_and_sorted() {
        let a = TrainConfigManifest::default().render();
        let b = TrainConfigManifest::default().render();
        assert_eq!(a, b);
        let keys: Vec<&str> = a.lines().map(|l| l.split(" = ").next().unwrap()).collect();
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn side_selection_handles_plain_and_tsv_lines() {
        assert_eq!(select_side("plain text", SideArg::Answers), "plain text");
        assert_eq!(select_side("q\ta\tp\ts", SideArg::Questions), "q");
        assert_eq!(select_side("q\ta\tp\ts", SideArg::Answers), "a");
        assert_eq!(select_side("q\ta\tp\ts", SideArg::Both), "q a");
    }

    #[test]
    fn exit_codes_are_stable() {
        assert_eq!(ExitStatus::Success.code(), 0);
        assert_eq!(ExitStatus::Usage.code(), 1);
        assert_eq!(ExitStatus::Io.code(), 2);
        assert_eq!(ExitStatus::Internal.code(), 3);
    }
}
