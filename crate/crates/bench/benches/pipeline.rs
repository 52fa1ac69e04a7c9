use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use cuneitext::baselines::{dict_transliterate, SamplerConfig};
use cuneitext::chunk::chunk_tablet;
use cuneitext::eval::{chrf, ChrfParams};
use cuneitext::{map_stream, render_transliteration, SignList};
use cuneitext_bench::synthetic_tablet;

fn bench_chrf(c: &mut Criterion) {
    let list = SignList::mini();
    let reference = render_transliteration(&synthetic_tablet(&list, "r", 20, 6).translit);
    let hypothesis = reference.replace("ka", "dug4");
    let params = ChrfParams::default();
    c.bench_function("chrf/20 lines", |b| {
        b.iter(|| chrf(black_box(&hypothesis), black_box(&reference), &params))
    });
}

fn bench_mapping(c: &mut Criterion) {
    let list = SignList::mini();
    let tablet = synthetic_tablet(&list, "m", 50, 8);
    c.bench_function("map_stream/50 lines", |b| {
        b.iter(|| map_stream(black_box(&tablet.translit), &list))
    });
    let counted = list.with_reading_counts(&cuneitext::corpus::count_readings([&tablet]));
    c.bench_function("dict/50 lines", |b| {
        b.iter(|| {
            dict_transliterate(
                black_box(&tablet.glyphs),
                &counted,
                SamplerConfig::default(),
            )
        })
    });
}

fn bench_chunking(c: &mut Criterion) {
    let list = SignList::mini();
    let tablet = synthetic_tablet(&list, "c", 400, 10);
    c.bench_function("chunk_tablet/400 lines", |b| {
        b.iter(|| chunk_tablet(black_box(&tablet), 128))
    });
}

criterion_group!(benches, bench_chrf, bench_mapping, bench_chunking);
criterion_main!(benches);
