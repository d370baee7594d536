use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use gqca_bench::{row_of_qubits, transport};
use gqca_core::parallel::compile_step;
use gqca_core::synth::{canonical_problem, Geometry};
use gqca_core::{
    apply_sequence, threshold_scan, BitArray, CellConfig, Cutoff, EnablePredicate, GateKind, Gate1, Mode,
    ParallelLayout, PulseSequence, SparseState,
};

fn bit_array(c: &mut Criterion) {
    let mut g = c.benchmark_group("bit_array_transport");
    for q in [4usize, 64, 1024] {
        let start = BitArray::from_config(&row_of_qubits(q)).unwrap();
        let seq = transport();
        g.bench_with_input(BenchmarkId::from_parameter(q), &q, |b, _| {
            b.iter(|| {
                let mut a = start.clone();
                a.apply_sequence(&seq).unwrap();
                black_box(a)
            })
        });
    }
    g.finish();
}

fn sparse_state(c: &mut Criterion) {
    let cfg: CellConfig = "dudddddduddddddduudduudddddd".parse().unwrap();
    let seq: PulseSequence = "A0:H B0:H A0 B0 A0 B0 A0 B0".parse().unwrap();
    c.bench_function("sparse_three_level", |b| {
        b.iter(|| {
            let mut s = SparseState::from_config(&cfg, Mode::ThreeLevel).unwrap();
            apply_sequence(&mut s, &seq).unwrap();
            black_box(s.len())
        })
    });
}

fn synthesis(c: &mut Criterion) {
    let h: Gate1 = "H".parse().unwrap();
    let mut p = canonical_problem(GateKind::OneQubit, h, Geometry::MINIMAL, 8).unwrap();
    p.alphabet = gqca_core::synth::local_alphabet();
    let mut g = c.benchmark_group("synthesis");
    g.sample_size(10);
    g.bench_function("one_qubit_h", |b| b.iter(|| black_box(gqca_core::synthesize(&p).unwrap())));
    g.finish();
}

fn parallel_compile(c: &mut Criterion) {
    let x: Gate1 = "X".parse().unwrap();
    let layout = ParallelLayout::new(256).unwrap();
    let pred = EnablePredicate::parse("interval:1:127").unwrap();
    c.bench_function("compile_step_n256", |b| {
        b.iter(|| black_box(compile_step(&layout, &x, &pred).unwrap()))
    });
}

fn spectra(c: &mut Criterion) {
    let ks: Vec<f64> = (0..200).map(|i| 1.5 + 0.01 * i as f64).collect();
    let mut g = c.benchmark_group("threshold_scan");
    g.bench_function("analytic", |b| {
        b.iter(|| black_box(threshold_scan(1.0, &ks, Cutoff::AnalyticTail, 0.0).unwrap()))
    });
    g.bench_function("truncated_1e4", |b| {
        b.iter(|| black_box(threshold_scan(1.0, &ks, Cutoff::Truncated(10_000), 0.0).unwrap()))
    });
    g.finish();
}

criterion_group!(benches, bit_array, sparse_state, synthesis, parallel_compile, spectra);
criterion_main!(benches);
