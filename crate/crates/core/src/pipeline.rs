//! Reading knowledge base and query files into named assertions.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ast::SumoFormula;
use crate::lower::{lower_with, LowerConfig, LowerError, LowerResult};
use crate::sexpr::{parse_forms_in, ParseError, Span};
use crate::translate::{KbAssertion, KbTranslation, TranslateError};

/// One input file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Source {
    pub path: String,
    pub text: String,
}

impl Source {
    pub fn new(path: impl Into<String>, text: impl Into<String>) -> Self {
        Source {
            path: path.into(),
            text: text.into(),
        }
    }
}

/// File name without directory or extension, reduced to `[a-z0-9_]`.
pub fn file_stem(path: &str) -> String {
    let name = path.rsplit(['/', '\\']).next().unwrap_or(path);
    let stem = name.split_once('.').map_or(name, |(s, _)| s);
    let s: String = stem
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect();
    if s.is_empty() {
        "input".into()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Lower(#[from] LowerError),
    #[error("{0}: query in a knowledge base file")]
    QueryInKb(Span),
    #[error("{0}: expected exactly one query, found {1}")]
    QueryCount(String, usize),
    #[error("{name}: {error}")]
    Translate { name: String, error: TranslateError },
}

impl LoadError {
    /// `(file, line, col)` when the error has a source position.
    pub fn location(&self) -> Option<(String, u32, u32)> {
        let s = match self {
            LoadError::Parse(e) => e.span(),
            LoadError::Lower(e) => e.span(),
            LoadError::QueryInKb(s) => s,
            _ => return None,
        };
        Some((s.file.to_string(), s.line, s.col))
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadedKb {
    pub assertions: Vec<KbAssertion>,
    /// Skipped out-of-fragment forms with the head that caused it.
    pub skipped: Vec<(Span, String)>,
    pub errors: Vec<LoadError>,
    pub forms: usize,
    /// Source position of each assertion by name.
    pub locations: BTreeMap<String, Span>,
}

/// Parses and lowers every file. Assertions are named `kb_<stem>_<index>` with the
/// index counting top-level forms of the file from zero.
pub fn load_kb(sources: &[Source], cfg: &LowerConfig) -> LoadedKb {
    let mut out = LoadedKb::default();
    for src in sources {
        let stem = file_stem(&src.path);
        let forms = match parse_forms_in(&src.path, &src.text) {
            Ok(f) => f,
            Err(e) => {
                out.errors.push(e.into());
                continue;
            }
        };
        out.forms += forms.len();
        for (k, form) in forms.iter().enumerate() {
            match lower_with(form, cfg) {
                Ok(LowerResult::Assertion(f)) => {
                    let name = format!("kb_{stem}_{k}");
                    out.locations.insert(name.clone(), form.span().clone());
                    out.assertions.push(KbAssertion { name, formula: f });
                }
                Ok(LowerResult::Skipped(h)) => out.skipped.push((form.span().clone(), h)),
                Ok(LowerResult::Query(_)) => out.errors.push(LoadError::QueryInKb(form.span().clone())),
                Err(e) => out.errors.push(e.into()),
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryFile {
    pub label: String,
    pub path: String,
    pub locals: Vec<KbAssertion>,
    pub query: SumoFormula,
    pub skipped: usize,
    pub locations: BTreeMap<String, Span>,
}

/// A query file: local assertions (named `local_<n>` from one) and one `(query …)`.
pub fn load_query(src: &Source, cfg: &LowerConfig) -> Result<QueryFile, LoadError> {
    let forms = parse_forms_in(&src.path, &src.text)?;
    let mut locals = Vec::new();
    let mut queries = Vec::new();
    let mut skipped = 0;
    let mut locations = BTreeMap::new();
    for form in &forms {
        match lower_with(form, cfg)? {
            LowerResult::Assertion(f) => {
                let name = format!("local_{}", locals.len() + 1);
                locations.insert(name.clone(), form.span().clone());
                locals.push(KbAssertion { name, formula: f });
            }
            LowerResult::Query(q) => {
                locations.insert("conj".to_string(), form.span().clone());
                queries.push(q);
            }
            LowerResult::Skipped(_) => skipped += 1,
        }
    }
    if queries.len() != 1 {
        return Err(LoadError::QueryCount(src.path.clone(), queries.len()));
    }
    Ok(QueryFile {
        label: file_stem(&src.path),
        path: src.path.clone(),
        locals,
        query: queries.remove(0),
        skipped,
        locations,
    })
}

/// Assertion counts for `kb-summary.txt`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KbSummary {
    pub files: usize,
    pub forms: usize,
    pub translated: usize,
    pub skipped_modal: usize,
    pub errored: usize,
}

impl KbSummary {
    pub fn new(files: usize, loaded: &LoadedKb, translation: &KbTranslation) -> Self {
        KbSummary {
            files,
            forms: loaded.forms,
            translated: translation.premises.len(),
            skipped_modal: loaded.skipped.len(),
            errored: loaded.errors.len() + translation.errors.len(),
        }
    }
}

impl fmt::Display for KbSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "files\t{}", self.files)?;
        writeln!(f, "forms\t{}", self.forms)?;
        writeln!(f, "translated\t{}", self.translated)?;
        writeln!(f, "skipped-modal\t{}", self.skipped_modal)?;
        writeln!(f, "errored\t{}", self.errored)
    }
}
