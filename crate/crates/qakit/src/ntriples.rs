//! Streaming parser for the N-Triples subset used by DBpedia Infobox
//! Property dumps.
//!
//! Each line is `<subject> <predicate> object .` where the object is an
//! IRI, a plain literal, a language-tagged literal or a typed literal.
//! Blank nodes and relative IRIs are rejected: they do not occur in the
//! dumps this toolkit consumes.
//!
//! [`parse_line`] handles one physical line; [`NtReader`] wraps a
//! [`BufRead`] and yields one [`ParseOutcome`] per line while keeping
//! memory bounded by the longest line, not the stream length.

use std::fmt;
use std::io::{self, BufRead};

/// An absolute IRI, stored without the surrounding angle brackets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Iri(String);

impl Iri {
    /// Wraps an IRI string. No validation is performed; IRIs produced by
    /// the parser are guaranteed well formed.
    pub fn new(value: impl Into<String>) -> Self {
        Iri(value.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

/// One term of a triple, with all escape sequences already decoded.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Iri(Iri),
    /// `"..."`
    PlainLiteral(String),
    /// `"..."@lang`
    LangLiteral {
        value: String,
        lang: String,
    },
    /// `"..."^^<datatype>`
    TypedLiteral {
        value: String,
        datatype: Iri,
    },
}

impl Term {
    /// The lexical form of a literal, or the IRI text.
    pub fn value(&self) -> &str {
        match self {
            Term::Iri(iri) => iri.as_str(),
            Term::PlainLiteral(v) => v,
            Term::LangLiteral { value, .. } => value,
            Term::TypedLiteral { value, .. } => value,
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }
}

impl fmt::Display for Term {
    /// Canonical N-Triples serialization. `"`, `\`, tab, LF and CR are
    /// escaped; everything else is emitted as-is, so parsing the output
    /// reproduces the term exactly.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "{iri}"),
            Term::PlainLiteral(v) => write_quoted(f, v),
            Term::LangLiteral { value, lang } => {
                write_quoted(f, value)?;
                write!(f, "@{lang}")
            }
            Term::TypedLiteral { value, datatype } => {
                write_quoted(f, value)?;
                write!(f, "^^{datatype}")
            }
        }
    }
}

fn write_quoted(f: &mut fmt::Formatter<'_>, value: &str) -> fmt::Result {
    f.write_str("\"")?;
    for c in value.chars() {
        match c {
            '\\' => f.write_str("\\\\")?,
            '"' => f.write_str("\\\"")?,
            '\n' => f.write_str("\\n")?,
            '\r' => f.write_str("\\r")?,
            '\t' => f.write_str("\\t")?,
            _ => write!(f, "{c}")?,
        }
    }
    f.write_str("\"")
}

/// A subject-predicate-object statement. Subject and predicate are IRIs
/// by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// A recoverable per-line syntax error with the byte offset (within the
/// line) where the problem was detected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub message: String,
    pub offset: usize,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (byte {})", self.message, self.offset)
    }
}

impl std::error::Error for SyntaxError {}

/// Result of parsing one line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Parsed {
    Triple(Triple),
    /// Blank line or `#` comment.
    Skipped,
    Error(SyntaxError),
}

/// A [`Parsed`] tagged with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseOutcome {
    pub line_number: u64,
    pub parse: Parsed,
}

/// Parses one physical line (without its trailing newline).
///
/// Blank lines and lines whose first non-space character is `#` yield
/// [`Parsed::Skipped`]; malformed lines yield [`Parsed::Error`] rather
/// than failing, so callers decide whether to abort or continue.
pub fn parse_line(line: &str) -> Parsed {
    let mut s = Scanner::new(line);
    s.skip_ws();
    match s.peek() {
        None => return Parsed::Skipped,
        Some(b'#') => return Parsed::Skipped,
        _ => {}
    }
    match parse_triple(&mut s) {
        Ok(triple) => Parsed::Triple(triple),
        Err(e) => Parsed::Error(e),
    }
}

fn parse_triple(s: &mut Scanner<'_>) -> Result<Triple, SyntaxError> {
    let subject = parse_iri_term(s, "subject")?;
    s.require_ws()?;
    let predicate = parse_iri_term(s, "predicate")?;
    s.require_ws()?;
    let object = parse_object(s)?;
    s.skip_ws();
    match s.peek() {
        Some(b'.') => s.bump(),
        _ => return Err(s.err("missing terminating ` .`")),
    }
    s.skip_ws();
    if s.peek().is_some() {
        return Err(s.err("trailing content after terminating `.`"));
    }
    Ok(Triple {
        subject,
        predicate,
        object,
    })
}

fn parse_iri_term(s: &mut Scanner<'_>, role: &str) -> Result<Iri, SyntaxError> {
    match s.peek() {
        Some(b'<') => parse_iri_ref(s),
        Some(b'_') => Err(s.err(format!("{role} must be an IRI, found blank node"))),
        _ => Err(s.err(format!("expected `<` to start {role} IRI"))),
    }
}

fn parse_object(s: &mut Scanner<'_>) -> Result<Term, SyntaxError> {
    match s.peek() {
        Some(b'<') => Ok(Term::Iri(parse_iri_ref(s)?)),
        Some(b'"') => parse_literal(s),
        Some(b'_') => Err(s.err("blank node objects are not supported")),
        _ => Err(s.err("expected IRI or literal object")),
    }
}

/// Characters that may not appear in an IRI reference, raw or escaped.
fn forbidden_in_iri(c: char) -> bool {
    c <= '\u{20}' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
}

fn parse_iri_ref(s: &mut Scanner<'_>) -> Result<Iri, SyntaxError> {
    let start = s.pos;
    s.bump(); // `<`
    let mut value = String::new();
    loop {
        let at = s.pos;
        match s.next_char() {
            None => return Err(SyntaxError::at("unterminated IRI", start)),
            Some('>') => break,
            Some('\\') => {
                let c = decode_ucs_escape(s, at)?;
                if forbidden_in_iri(c) {
                    return Err(SyntaxError::at("escaped character not allowed in IRI", at));
                }
                value.push(c);
            }
            Some(c) if forbidden_in_iri(c) => {
                return Err(SyntaxError::at("invalid character in IRI", at));
            }
            Some(c) => value.push(c),
        }
    }
    if !has_scheme(&value) {
        return Err(SyntaxError::at("IRI is not absolute", start));
    }
    Ok(Iri(value))
}

/// `scheme:` per RFC 3987: a letter followed by letters, digits, `+`,
/// `-` or `.`, then a colon.
fn has_scheme(iri: &str) -> bool {
    let mut chars = iri.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    for c in chars {
        match c {
            ':' => return true,
            c if c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.') => {}
            _ => return false,
        }
    }
    false
}

fn parse_literal(s: &mut Scanner<'_>) -> Result<Term, SyntaxError> {
    let start = s.pos;
    s.bump(); // `"`
    let mut value = String::new();
    loop {
        let at = s.pos;
        match s.next_char() {
            None => return Err(SyntaxError::at("unterminated literal", start)),
            Some('"') => break,
            Some('\\') => value.push(decode_string_escape(s, at)?),
            Some('\n' | '\r') => {
                return Err(SyntaxError::at("unescaped line break in literal", at));
            }
            Some(c) => value.push(c),
        }
    }
    match s.peek() {
        Some(b'@') => {
            s.bump();
            let lang = parse_lang_tag(s)?;
            Ok(Term::LangLiteral { value, lang })
        }
        Some(b'^') => {
            let at = s.pos;
            s.bump();
            if s.peek() != Some(b'^') {
                return Err(SyntaxError::at("expected `^^` before datatype IRI", at));
            }
            s.bump();
            if s.peek() != Some(b'<') {
                return Err(s.err("expected `<` to start datatype IRI"));
            }
            let datatype = parse_iri_ref(s)?;
            Ok(Term::TypedLiteral { value, datatype })
        }
        _ => Ok(Term::PlainLiteral(value)),
    }
}

/// `[a-zA-Z]+(-[a-zA-Z0-9]+)*`
fn parse_lang_tag(s: &mut Scanner<'_>) -> Result<String, SyntaxError> {
    let start = s.pos;
    let mut tag = String::new();
    while let Some(b) = s.peek() {
        if b.is_ascii_alphabetic() {
            tag.push(b as char);
            s.bump();
        } else {
            break;
        }
    }
    if tag.is_empty() {
        return Err(SyntaxError::at("invalid language tag", start));
    }
    while s.peek() == Some(b'-') {
        tag.push('-');
        s.bump();
        let mut any = false;
        while let Some(b) = s.peek() {
            if b.is_ascii_alphanumeric() {
                tag.push(b as char);
                s.bump();
                any = true;
            } else {
                break;
            }
        }
        if !any {
            return Err(SyntaxError::at("invalid language tag", start));
        }
    }
    Ok(tag)
}

/// Decodes the escape following a consumed backslash inside a literal.
fn decode_string_escape(s: &mut Scanner<'_>, backslash_at: usize) -> Result<char, SyntaxError> {
    match s.next_char() {
        Some('"') => Ok('"'),
        Some('\\') => Ok('\\'),
        Some('t') => Ok('\t'),
        Some('n') => Ok('\n'),
        Some('r') => Ok('\r'),
        Some('u') => decode_hex_escape(s, backslash_at, 4),
        Some('U') => decode_hex_escape(s, backslash_at, 8),
        _ => Err(SyntaxError::at("bad escape sequence", backslash_at)),
    }
}

/// Decodes the escape following a consumed backslash inside an IRI,
/// where only `\uXXXX` / `\UXXXXXXXX` are legal.
fn decode_ucs_escape(s: &mut Scanner<'_>, backslash_at: usize) -> Result<char, SyntaxError> {
    match s.next_char() {
        Some('u') => decode_hex_escape(s, backslash_at, 4),
        Some('U') => decode_hex_escape(s, backslash_at, 8),
        _ => Err(SyntaxError::at("bad escape sequence in IRI", backslash_at)),
    }
}

fn decode_hex_escape(
    s: &mut Scanner<'_>,
    backslash_at: usize,
    digits: usize,
) -> Result<char, SyntaxError> {
    let mut code: u32 = 0;
    for _ in 0..digits {
        let d = match s.peek() {
            Some(b) if (b as char).is_ascii_hexdigit() => (b as char).to_digit(16).unwrap(),
            _ => return Err(SyntaxError::at("bad escape sequence", backslash_at)),
        };
        s.bump();
        code = code * 16 + d;
    }
    // char::from_u32 rejects surrogate halves and values past U+10FFFF.
    char::from_u32(code)
        .ok_or_else(|| SyntaxError::at("escape decodes to an invalid code point", backslash_at))
}

struct Scanner<'a> {
    line: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(line: &'a str) -> Self {
        Scanner { line, pos: 0 }
    }

    fn peek(&self) -> Option<u8> {
        self.line.as_bytes().get(self.pos).copied()
    }

    /// Advances one byte. Only call after peeking an ASCII byte.
    fn bump(&mut self) {
        self.pos += 1;
    }

    fn next_char(&mut self) -> Option<char> {
        let c = self.line[self.pos..].chars().next()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t')) {
            self.bump();
        }
    }

    fn require_ws(&mut self) -> Result<(), SyntaxError> {
        if !matches!(self.peek(), Some(b' ') | Some(b'\t')) {
            return Err(self.err("expected whitespace between terms"));
        }
        self.skip_ws();
        Ok(())
    }

    fn err(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError::at(message, self.pos)
    }
}

impl SyntaxError {
    fn at(message: impl Into<String>, offset: usize) -> Self {
        SyntaxError {
            message: message.into(),
            offset,
        }
    }
}

/// Line-by-line reader over an N-Triples stream.
///
/// Yields one [`ParseOutcome`] per input line in order. The internal
/// buffer is reused, so peak memory tracks the longest line rather than
/// the stream length. I/O failures surface as `Err` items and terminate
/// the stream; per-line syntax problems are `Ok` outcomes carrying
/// [`Parsed::Error`]. In strict mode the reader stops after yielding the
/// first syntax error.
pub struct NtReader<R> {
    inner: R,
    buf: Vec<u8>,
    line_number: u64,
    strict: bool,
    done: bool,
}

impl<R: BufRead> NtReader<R> {
    pub fn new(inner: R) -> Self {
        Self::with_strict(inner, false)
    }

    pub fn with_strict(inner: R, strict: bool) -> Self {
        NtReader {
            inner,
            buf: Vec::new(),
            line_number: 0,
            strict,
            done: false,
        }
    }
}

impl<R: BufRead> Iterator for NtReader<R> {
    type Item = io::Result<ParseOutcome>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        self.buf.clear();
        match self.inner.read_until(b'\n', &mut self.buf) {
            Err(e) => {
                self.done = true;
                return Some(Err(e));
            }
            Ok(0) => {
                self.done = true;
                return None;
            }
            Ok(_) => {}
        }
        if self.buf.last() == Some(&b'\n') {
            self.buf.pop();
            if self.buf.last() == Some(&b'\r') {
                self.buf.pop();
            }
        }
        self.line_number += 1;
        let parse = match std::str::from_utf8(&self.buf) {
            Ok(line) => parse_line(line),
            Err(e) => Parsed::Error(SyntaxError::at("invalid UTF-8", e.valid_up_to())),
        };
        if self.strict && matches!(parse, Parsed::Error(_)) {
            self.done = true;
        }
        Some(Ok(ParseOutcome {
            line_number: self.line_number,
            parse,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple(line: &str) -> Triple {
        match parse_line(line) {
            Parsed::Triple(t) => t,
            other => panic!("expected triple for {line:?}, got {other:?}"),
        }
    }

    fn error(line: &str) -> SyntaxError {
        match parse_line(line) {
            Parsed::Error(e) => e,
            other => panic!("expected error for {line:?}, got {other:?}"),
        }
    }

    #[test]
    fn parses_lang_literal_line() {
        let t = triple(
            "<http://dbpedia.org/resource/Aristotle> <http://dbpedia.org/property/name> \"Aristotle\"@en .",
        );
        assert_eq!(t.subject.as_str(), "http://dbpedia.org/resource/Aristotle");
        assert_eq!(t.predicate.as_str(), "http://dbpedia.org/property/name");
        assert_eq!(
            t.object,
            Term::LangLiteral {
                value: "Aristotle".into(),
                lang: "en".into()
            }
        );
    }

    #[test]
    fn parses_typed_literal() {
        let t = triple(
            "<http://a/s> <http://a/p> \"384\"^^<http://www.w3.org/2001/XMLSchema#integer> .",
        );
        assert_eq!(
            t.object,
            Term::TypedLiteral {
                value: "384".into(),
                datatype: Iri::new("http://www.w3.org/2001/XMLSchema#integer"),
            }
        );
    }

    #[test]
    fn parses_iri_object_and_tolerates_extra_whitespace() {
        let t = triple("<http://a/s>\t\t<http://a/p>  <http://a/o>  .");
        assert_eq!(t.object, Term::Iri(Iri::new("http://a/o")));
    }

    #[test]
    fn skips_blank_and_comment_lines() {
        assert_eq!(parse_line(""), Parsed::Skipped);
        assert_eq!(parse_line("   \t"), Parsed::Skipped);
        assert_eq!(parse_line("# comment"), Parsed::Skipped);
        assert_eq!(parse_line("   # indented comment"), Parsed::Skipped);
    }

    #[test]
    fn decodes_escapes_in_literal() {
        // Hand-applied escape rules: \t is a real tab in the decoded value.
        let t = triple("<http://a/s> <http://a/p> \"x\\ty\" .");
        assert_eq!(t.object, Term::PlainLiteral("x\ty".into()));

        let t = triple("<http://a/s> <http://a/p> \"say \\\"hi\\\"\\n\" .");
        assert_eq!(t.object, Term::PlainLiteral("say \"hi\"\n".into()));

        let t = triple("<http://a/s> <http://a/p> \"\\u00e9\\U0001F600\" .");
        assert_eq!(t.object, Term::PlainLiteral("é😀".into()));
    }

    #[test]
    fn rejects_missing_terminator() {
        let e = error("<http://a/s> <http://a/p> \"x\"");
        assert!(e.message.contains("missing terminating"));
        assert_eq!(e.offset, 29);
    }

    #[test]
    fn rejects_unterminated_iri_and_literal() {
        assert!(error("<http://a/s <http://a/p> <http://a/o> .")
            .message
            .contains("invalid character in IRI"));
        let e = error("<http://a/s> <http://a/p");
        assert!(e.message.contains("unterminated IRI"));
        assert_eq!(e.offset, 13);
        assert!(error("<http://a/s> <http://a/p> \"x .")
            .message
            .contains("unterminated literal"));
    }

    #[test]
    fn rejects_bad_escapes() {
        assert!(error("<http://a/s> <http://a/p> \"x\\qy\" .")
            .message
            .contains("bad escape"));
        assert!(error("<http://a/s> <http://a/p> \"x\\u12\" .")
            .message
            .contains("bad escape"));
        // Surrogate half.
        assert!(error("<http://a/s> <http://a/p> \"\\uD800\" .")
            .message
            .contains("invalid code point"));
    }

    #[test]
    fn rejects_blank_nodes_and_relative_iris() {
        let e = error("_:b0 <http://a/p> <http://a/o> .");
        assert!(e.message.contains("subject must be an IRI"));
        assert_eq!(e.offset, 0);
        assert!(error("<http://a/s> _:p <http://a/o> .")
            .message
            .contains("predicate must be an IRI"));
        assert!(error("<http://a/s> <http://a/p> _:o .")
            .message
            .contains("blank node objects"));
        assert!(error("</relative> <http://a/p> <http://a/o> .")
            .message
            .contains("not absolute"));
    }

    #[test]
    fn rejects_bad_language_tags() {
        assert!(error("<http://a/s> <http://a/p> \"x\"@ .")
            .message
            .contains("invalid language tag"));
        assert!(error("<http://a/s> <http://a/p> \"x\"@en- .")
            .message
            .contains("invalid language tag"));
        let t = triple("<http://a/s> <http://a/p> \"x\"@en-GB-2 .");
        assert_eq!(
            t.object,
            Term::LangLiteral {
                value: "x".into(),
                lang: "en-GB-2".into()
            }
        );
    }

    #[test]
    fn requires_whitespace_between_terms() {
        assert!(error("<http://a/s><http://a/p> <http://a/o> .")
            .message
            .contains("expected whitespace"));
    }

    #[test]
    fn stream_yields_outcomes_in_order() {
        let input = "<http://a/s> <http://a/p> \"1\" .\n\
                     \n\
                     bogus\n\
                     <http://a/s> <http://a/p> \"2\" .\n";
        let outcomes: Vec<_> = NtReader::new(input.as_bytes())
            .map(|r| r.unwrap())
            .collect();
        assert_eq!(outcomes.len(), 4);
        assert_eq!(
            outcomes.iter().map(|o| o.line_number).collect::<Vec<_>>(),
            vec![1, 2, 3, 4]
        );
        assert!(matches!(outcomes[0].parse, Parsed::Triple(_)));
        assert!(matches!(outcomes[1].parse, Parsed::Skipped));
        assert!(matches!(outcomes[2].parse, Parsed::Error(_)));
        assert!(matches!(outcomes[3].parse, Parsed::Triple(_)));
    }

    #[test]
    fn strict_stream_stops_after_first_error() {
        let input = "bogus\n<http://a/s> <http://a/p> \"2\" .\n";
        let outcomes: Vec<_> = NtReader::with_strict(input.as_bytes(), true)
            .map(|r| r.unwrap())
            .collect();
        assert_eq!(outcomes.len(), 1);
        assert!(matches!(outcomes[0].parse, Parsed::Error(_)));
    }

    #[test]
    fn stream_handles_crlf_final_line_and_empty_input() {
        let outcomes: Vec<_> = NtReader::new("".as_bytes()).collect();
        assert!(outcomes.is_empty());

        let input = "<http://a/s> <http://a/p> \"1\" .\r\n<http://a/s> <http://a/p> \"2\" .";
        let outcomes: Vec<_> = NtReader::new(input.as_bytes())
            .map(|r| r.unwrap())
            .collect();
        assert_eq!(outcomes.len(), 2);
        assert!(outcomes
            .iter()
            .all(|o| matches!(o.parse, Parsed::Triple(_))));
    }

    #[test]
    fn stream_flags_invalid_utf8_line() {
        let mut input = b"<http://a/s> <http://a/p> \"ok\" .\n".to_vec();
        input.extend_from_slice(b"<http://a/s> <http://a/p> \"\xff\" .\n");
        let outcomes: Vec<_> = NtReader::new(&input[..]).map(|r| r.unwrap()).collect();
        assert_eq!(outcomes.len(), 2);
        match &outcomes[1].parse {
            Parsed::Error(e) => assert!(e.message.contains("invalid UTF-8")),
            other => panic!("expected error, got {other:?}"),
        }
    }

    #[test]
    fn parse_line_is_pure() {
        let line = "<http://a/s> <http://a/p> \"x\"@en .";
        assert_eq!(parse_line(line), parse_line(line));
    }

    #[test]
    fn display_round_trips_tricky_values() {
        let t = Triple {
            subject: Iri::new("http://a/s"),
            predicate: Iri::new("http://a/p"),
            object: Term::PlainLiteral("tab\there \"and\" \\slash\\\nnewline".into()),
        };
        let line = t.to_string();
        assert_eq!(parse_line(&line), Parsed::Triple(t));
    }

    mod roundtrip {
        use super::*;
        use proptest::prelude::*;

        fn arb_iri() -> impl Strategy<Value = Iri> {
            "[a-zA-Z0-9/._~%?&=#+,;:@!$'()*-]{0,24}"
                .prop_map(|rest| Iri::new(format!("http://{rest}")))
        }

        fn arb_term() -> impl Strategy<Value = Term> {
            prop_oneof![
                arb_iri().prop_map(Term::Iri),
                ".*".prop_map(Term::PlainLiteral),
                (".*", "[a-zA-Z]{1,3}(-[a-zA-Z0-9]{1,3}){0,2}")
                    .prop_map(|(value, lang)| Term::LangLiteral { value, lang }),
                (".*", arb_iri())
                    .prop_map(|(value, datatype)| Term::TypedLiteral { value, datatype }),
            ]
        }

        proptest! {
            #[test]
            fn serialize_then_parse_is_identity(
                subject in arb_iri(),
                predicate in arb_iri(),
                object in arb_term(),
            ) {
                let triple = Triple { subject, predicate, object };
                let line = triple.to_string();
                prop_assert_eq!(parse_line(&line), Parsed::Triple(triple));
            }
        }
    }
}
