use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use lowdens_core::data::{generate, RingWorld};
use lowdens_core::diffusion::NoiseSchedule;
use lowdens_core::guidance::{loss_g1, loss_g2, ClassModelGrid};
use lowdens_core::metrics::{avg_knn, lof, precision, NeighborIndex, Queries};
use lowdens_core::nn::{Architecture, Cond, MicroNet};
use lowdens_core::rng::{normal_vec, Stream};

fn networks(c: &mut Criterion) {
    let net = MicroNet::new(&Architecture::denoiser(2, 4, 64, 3), 1).unwrap();
    let cond = Cond::time_label(0.4, 2);
    let x = [0.3, -1.2];
    c.bench_function("denoiser forward", |b| b.iter(|| net.forward(black_box(&x), &cond).unwrap()));
    let cache = net.forward(&x, &cond).unwrap();
    c.bench_function("denoiser input gradient", |b| b.iter(|| net.grad_input(black_box(&cache), &[1.0, -1.0]).unwrap()));
    c.bench_function("denoiser parameter gradient", |b| b.iter(|| net.grad_params(black_box(&cache), &[1.0, -1.0]).unwrap()));
}

fn guiding_losses(c: &mut Criterion) {
    let specs = RingWorld::default().specs().unwrap();
    let pts = generate(&specs, 100, 3).unwrap();
    let schedule = NoiseSchedule::linear(200, 5e-4, 0.1).unwrap();
    let emb = MicroNet::new(&Architecture::embedder(2, 4, 64, 3, 16), 2).unwrap();
    let disc = MicroNet::new(&Architecture::discriminator(2, 64, 3), 3).unwrap();
    let grid = ClassModelGrid::fit(&emb, &pts, &schedule, 9, 4).unwrap();
    let model = grid.model_for(50);
    let x = [1.1, 0.4];
    c.bench_function("hardness loss and gradient", |b| b.iter(|| loss_g1(model, &emb, black_box(&x), 1, 1.0, 50, 200).unwrap()));
    c.bench_function("fidelity loss and gradient", |b| b.iter(|| loss_g2(&disc, black_box(&x), 1.0, 50, 200).unwrap()));
}

fn neighbour_metrics(c: &mut Criterion) {
    let mut group = c.benchmark_group("neighbour metrics");
    for n in [250usize, 1000] {
        let refs = NeighborIndex::new(2, normal_vec(1, Stream::Data, 0, 0, 2 * n)).unwrap();
        let q = normal_vec(2, Stream::Data, 0, 0, 2 * n);
        group.bench_with_input(BenchmarkId::new("avg_knn", n), &n, |b, _| b.iter(|| avg_knn(Queries::External(&q), &refs, 5).unwrap()));
        group.bench_with_input(BenchmarkId::new("lof", n), &n, |b, _| b.iter(|| lof(Queries::External(&q), &refs, 20).unwrap()));
        group.bench_with_input(BenchmarkId::new("precision", n), &n, |b, _| b.iter(|| precision(&q, &refs, 3).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, networks, guiding_losses, neighbour_metrics);
criterion_main!(benches);
