use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use sumok2set_bench::{kb_sources, translate_kb, wordex_problem, CLAIMS};
use sumok2set_core::hf::lemma::{check_lemma, parse_lemmas, Generators};
use sumok2set_core::th0::{self, check_syntax, EmitOptions};

fn parse_and_translate(c: &mut Criterion) {
    let mut g = c.benchmark_group("parse_translate");
    for copies in [1usize, 8, 32] {
        let sources = kb_sources(copies);
        g.bench_with_input(BenchmarkId::from_parameter(copies), &sources, |b, s| {
            b.iter(|| translate_kb(black_box(s)))
        });
    }
    g.finish();
}

fn render(c: &mut Criterion) {
    let kb = translate_kb(&kb_sources(1));
    let p = wordex_problem(&kb);
    let opts = EmitOptions::default();
    c.bench_function("render_wordex", |b| b.iter(|| th0::render(black_box(&p), &opts)));
    let text = th0::render(&p, &opts);
    c.bench_function("check_syntax_wordex", |b| b.iter(|| check_syntax(black_box(&text))));
}

fn oracle(c: &mut Criterion) {
    let lemmas = parse_lemmas(CLAIMS).expect("shipped lemmas parse");
    let gens = Generators::default();
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    for l in &lemmas {
        g.bench_function(l.name.as_str(), |b| b.iter(|| check_lemma(black_box(l), &gens)));
    }
    g.finish();
}

criterion_group!(benches, parse_and_translate, render, oracle);
criterion_main!(benches);
