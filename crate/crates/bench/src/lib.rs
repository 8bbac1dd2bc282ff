//! Shared inputs for the benchmarks in `benches/`.

use sumok2set_core::lower::LowerConfig;
use sumok2set_core::pipeline::{load_kb, load_query, Source};
use sumok2set_core::translate::{build_query_problem, KbTranslation, Problem, TranslateOptions};

pub const KB: &str = include_str!("../../core/fixtures/mini-merge.kif");
pub const WORDEX: &str = include_str!("../../core/fixtures/queries/wordex.kif");
pub const CLAIMS: &str = include_str!("../../core/fixtures/claims.lemmas");

/// The fixture KB repeated `copies` times under distinct file names.
pub fn kb_sources(copies: usize) -> Vec<Source> {
    (0..copies).map(|k| Source::new(format!("kb{k}.kif"), KB)).collect()
}

pub fn translate_kb(sources: &[Source]) -> KbTranslation {
    let loaded = load_kb(sources, &LowerConfig::default());
    KbTranslation::new(loaded.assertions, TranslateOptions::default()).expect("fixture KB translates")
}

pub fn wordex_problem(kb: &KbTranslation) -> Problem {
    let q = load_query(&Source::new("wordex.kif", WORDEX), &LowerConfig::default()).expect("fixture query");
    build_query_problem(&q.label, kb, &q.locals, &q.query, None, TranslateOptions::default()).expect("builds")
}
