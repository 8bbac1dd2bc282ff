//! Tokenizer and reader for SUO-KIF s-expressions.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Source position of a token or form (1-based line and column).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Span {
    pub file: Arc<str>,
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(file: &Arc<str>, line: u32, col: u32) -> Self {
        Span {
            file: file.clone(),
            line,
            col,
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomKind {
    Constant,
    Variable,
    RowVariable,
    Numeral,
    Str,
}

#[derive(Debug, Clone)]
pub enum SExpr {
    /// Variables and row variables are stored without their sigil.
    Atom {
        lexeme: String,
        kind: AtomKind,
        span: Span,
    },
    List {
        items: Vec<SExpr>,
        span: Span,
    },
}

// Spans are positional metadata; two forms are equal when they read the same.
impl PartialEq for SExpr {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (
                SExpr::Atom {
                    lexeme: a, kind: k, ..
                },
                SExpr::Atom {
                    lexeme: b, kind: l, ..
                },
            ) => a == b && k == l,
            (SExpr::List { items: a, .. }, SExpr::List { items: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl Eq for SExpr {}

impl SExpr {
    pub fn span(&self) -> &Span {
        match self {
            SExpr::Atom { span, .. } | SExpr::List { span, .. } => span,
        }
    }

    pub fn as_atom(&self) -> Option<(&str, AtomKind)> {
        match self {
            SExpr::Atom { lexeme, kind, .. } => Some((lexeme, *kind)),
            SExpr::List { .. } => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List { items, .. } => Some(items),
            SExpr::Atom { .. } => None,
        }
    }

    /// The constant at the head of a list, if any.
    pub fn head_constant(&self) -> Option<&str> {
        match self.as_list()?.first()?.as_atom()? {
            (name, AtomKind::Constant) => Some(name),
            _ => None,
        }
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom { lexeme, kind, .. } => match kind {
                AtomKind::Variable => write!(f, "?{lexeme}"),
                AtomKind::RowVariable => write!(f, "@{lexeme}"),
                AtomKind::Str => write!(f, "\"{}\"", lexeme.replace('"', "\\\"")),
                AtomKind::Constant | AtomKind::Numeral => f.write_str(lexeme),
            },
            SExpr::List { items, .. } => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{0}: unbalanced parentheses")]
    UnbalancedParens(Span),
    #[error("{0}: bad token: {1}")]
    BadToken(Span, String),
}

impl ParseError {
    pub fn span(&self) -> &Span {
        match self {
            ParseError::UnbalancedParens(s) | ParseError::BadToken(s, _) => s,
        }
    }
}

/// Optional sign, digits, then optionally `.` and more digits.
pub fn is_numeral(lexeme: &str) -> bool {
    let body = lexeme
        .strip_prefix('-')
        .or_else(|| lexeme.strip_prefix('+'))
        .unwrap_or(lexeme);
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    digits(int) && frac.is_none_or(digits)
}

fn classify(raw: &str) -> Option<(String, AtomKind)> {
    if let Some(name) = raw.strip_prefix('?') {
        (!name.is_empty()).then(|| (name.to_string(), AtomKind::Variable))
    } else if let Some(name) = raw.strip_prefix('@') {
        (!name.is_empty()).then(|| (name.to_string(), AtomKind::RowVariable))
    } else if is_numeral(raw) {
        Some((raw.to_string(), AtomKind::Numeral))
    } else {
        Some((raw.to_string(), AtomKind::Constant))
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    file: Arc<str>,
    line: u32,
    col: u32,
}

impl<'a> Reader<'a> {
    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn here(&self) -> Span {
        Span::new(&self.file, self.line, self.col)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c == ';' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn string(&mut self, span: Span) -> Result<SExpr, ParseError> {
        self.bump();
        let mut text = String::new();
        loop {
            match self.bump() {
                None => return Err(ParseError::BadToken(span, "unterminated string".into())),
                Some('\\') => match self.bump() {
                    Some(c) => text.push(c),
                    None => {
                        return Err(ParseError::BadToken(span, "unterminated string".into()))
                    }
                },
                Some('"') => break,
                Some(c) => text.push(c),
            }
        }
        Ok(SExpr::Atom {
            lexeme: text,
            kind: AtomKind::Str,
            span,
        })
    }

    fn atom(&mut self, span: Span) -> Result<SExpr, ParseError> {
        let start = self.chars.peek().map(|&(i, _)| i).unwrap_or(self.src.len());
        let mut end = start;
        while let Some(&(i, c)) = self.chars.peek() {
            if c.is_whitespace() || c == '(' || c == ')' || c == '"' || c == ';' {
                break;
            }
            end = i + c.len_utf8();
            self.bump();
        }
        let raw = &self.src[start..end];
        match classify(raw) {
            Some((lexeme, kind)) => Ok(SExpr::Atom { lexeme, kind, span }),
            None => Err(ParseError::BadToken(span, raw.to_string())),
        }
    }

    fn form(&mut self) -> Result<SExpr, ParseError> {
        let span = self.here();
        match self.peek() {
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        None => return Err(ParseError::UnbalancedParens(span)),
                        Some(')') => {
                            self.bump();
                            return Ok(SExpr::List { items, span });
                        }
                        Some(_) => items.push(self.form()?),
                    }
                }
            }
            Some(')') => Err(ParseError::UnbalancedParens(span)),
            Some('"') => self.string(span),
            _ => self.atom(span),
        }
    }
}

/// Reads every top-level form of a KIF source. The file name only feeds spans.
pub fn parse_forms_in(file: &str, source: &str) -> Result<Vec<SExpr>, ParseError> {
    let mut reader = Reader {
        chars: source.char_indices().peekable(),
        src: source,
        file: Arc::from(file),
        line: 1,
        col: 1,
    };
    let mut forms = Vec::new();
    loop {
        reader.skip_trivia();
        match reader.peek() {
            None => return Ok(forms),
            Some('(') | Some(')') => forms.push(reader.form()?),
            Some(_) => {
                let span = reader.here();
                let stray = reader.form()?;
                return Err(ParseError::BadToken(span, format!("top-level atom {stray}")));
            }
        }
    }
}

pub fn parse_forms(source: &str) -> Result<Vec<SExpr>, ParseError> {
    parse_forms_in("<input>", source)
}
