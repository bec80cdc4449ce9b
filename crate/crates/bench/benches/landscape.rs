use criterion::{criterion_group, criterion_main, Criterion};
use novascape::landscape::{build_landscape, final_layout, hamming_one_edges, LandscapeParams, LayoutOptions};
use novascape::synth::{generate_corpus, SynthConfig};
use novascape::MechanismVector;

fn landscape(c: &mut Criterion) {
    let set = generate_corpus(&SynthConfig { seed: 2, ..SynthConfig::default() }).unwrap();
    let mut types: Vec<MechanismVector> = set.iter().map(|r| r.vector.clone()).collect();
    types.sort();
    types.dedup();
    let params = LandscapeParams { min_type_count: 1, cf_share_threshold: 0.5 };
    let graph = build_landscape(&set, 2017, &LandscapeParams { min_type_count: 2, ..params });

    let mut g = c.benchmark_group("landscape");
    g.sample_size(10);
    g.bench_function(format!("edges/{}", types.len()), |b| b.iter(|| hamming_one_edges(&types)));
    g.bench_function("build", |b| b.iter(|| build_landscape(&set, 2017, &params)));
    g.bench_function(format!("layout/{}", graph.nodes.len()), |b| {
        b.iter(|| final_layout(&graph, 42, &LayoutOptions::default()).unwrap())
    });
    g.finish();
}

criterion_group!(benches, landscape);
criterion_main!(benches);
