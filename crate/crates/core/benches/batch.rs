use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ncreal::par::Exec;
use ncreal::sample;
use ncreal::states::{gram_matrix, Convention, MomentState};
use ncreal::words::words_up_to;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn eval_batch(c: &mut Criterion) {
    let mut rng = sample::rng(11);
    let r = sample::fm_realization(&mut rng, 3, 8, 0.3).unwrap();
    let points: Vec<_> = (0..256).map(|_| sample::tuple(&mut rng, 3, 6, 0.2)).collect();
    let mut group = c.benchmark_group("eval_batch_256x6");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(r.eval_batch(black_box(&points), exec)))
        });
    }
    group.finish();
}

fn gram(c: &mut Criterion) {
    let mut rng = sample::rng(12);
    let z = sample::row_coisometry(&mut rng, 3, 4);
    let st = MomentState::new(z, sample::unit_vector(&mut rng, 4), Convention::Plain, 1e-10).unwrap();
    let words = words_up_to(3, 5);
    let moments = st.moments(10);
    let mut group = c.benchmark_group("gram_d3_n5");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(gram_matrix(black_box(&moments), &words, exec)))
        });
    }
    group.finish();
}

criterion_group!(benches, eval_batch, gram);
criterion_main!(benches);
