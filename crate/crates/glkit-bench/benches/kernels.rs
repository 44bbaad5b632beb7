use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use glkit::capelli::{capelli_algebra, capelli_det, capelli_is_central};
use glkit::counting::{enumerate_lifts, DominantTorus, SigmaInstance};
use glkit::eisenstein::{eisenstein_eval, lattice_points, Mode, PacketConfig, Series, WavePacket};
use glkit::exponents::exponent_summary;
use glkit::hecke::{coset_reps, satake_trivial, HeckeOperator};
use glkit::star::StarTable;
use glkit::{q, qi};

fn algebra(c: &mut Criterion) {
    c.bench_function("capelli_det_gl3", |b| b.iter(|| capelli_det(&capelli_algebra(black_box(3)))));
    let gl3 = capelli_algebra(3);
    c.bench_function("capelli_central_gl3", |b| b.iter(|| capelli_is_central(black_box(&gl3))));
    let gl2 = capelli_algebra(2);
    c.bench_function("star_table_gl2_order4", |b| b.iter(|| StarTable::calibrated(black_box(&gl2), 4).unwrap()));
}

fn arithmetic(c: &mut Criterion) {
    c.bench_function("cosets_p3_210", |b| b.iter(|| coset_reps(3, black_box(&[2, 1, 0])).unwrap()));
    let op = HeckeOperator::new(5, &[2, 1, 0]).unwrap();
    c.bench_function("satake_p5_210", |b| b.iter(|| satake_trivial(black_box(&op)).unwrap()));
    let inst = SigmaInstance {
        t: DominantTorus::dyadic(&[1]).unwrap(),
        u: DominantTorus::dyadic(&[0]).unwrap(),
        ell: 6,
        ell_prime: 6,
        x: q(1, 2),
        radius: qi(2),
    };
    c.bench_function("sigma_gl2_ell6", |b| b.iter(|| enumerate_lifts(black_box(&inst), 20_000_000).unwrap()));
    c.bench_function("exponents_50", |b| b.iter(|| exponent_summary(black_box(50))));
}

fn analysis(c: &mut Criterion) {
    let config = PacketConfig::new(64.0);
    c.bench_function("packet_build_t64", |b| b.iter(|| WavePacket::build(black_box(&config)).unwrap()));
    let packet = WavePacket::build(&config).unwrap();
    let g = [[1.1, 0.2], [0.3, 0.9636363636363636]];
    c.bench_function("lattice_points_t64", |b| b.iter(|| lattice_points(black_box(&g), packet.radius)));
    c.bench_function("eisenstein_eval_t64", |b| b.iter(|| eisenstein_eval(&packet, Series::Flat, black_box(&g), Mode::FullFlat)));
}

criterion_group!(benches, algebra, arithmetic, analysis);
criterion_main!(benches);
