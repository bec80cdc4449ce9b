use criterion::{criterion_group, criterion_main, Criterion};
use novascape::metrics::{score_corpus, WindowSpec};
use novascape::stats::{build_design, fit_glm, poisson_models, primary_models, Frame, GlmOptions};
use novascape::synth::{generate_corpus, SynthConfig};

fn regression(c: &mut Criterion) {
    let cfg = SynthConfig { novelty_boost: 1.0, seed: 3, ..SynthConfig::default() };
    let set = generate_corpus(&cfg).unwrap();
    let scores = score_corpus(&set, None, &[WindowSpec::years(2)], cfg.last_complete_year()).unwrap();
    let frame = Frame::from_records(&set, Some(&scores));
    let specs: Vec<_> = primary_models(2).into_iter().chain(poisson_models(&[2])).collect();

    let mut g = c.benchmark_group("regression");
    g.sample_size(20);
    for spec in &specs {
        let design = build_design(&frame, spec).unwrap();
        let name = format!("{}/{}", spec.family.as_str(), spec.outcome);
        g.bench_function(name, |b| {
            b.iter(|| fit_glm(&design, spec.family, spec.robust_se, &GlmOptions::default()).unwrap())
        });
    }
    g.bench_function("design", |b| b.iter(|| build_design(&frame, &specs[0]).unwrap()));
    g.finish();
}

criterion_group!(benches, regression);
criterion_main!(benches);
