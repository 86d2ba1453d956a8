//! Parallel vs sequential timings for the four fan-out hot paths: numeric
//! monodromy loops, parabolic candidate enumeration, star-quiver mask
//! enumeration, and per-pole Stokes reports. Run with
//! `cargo bench` (rayon on) or `cargo bench --no-default-features` to see
//! what the feature flag buys on this machine.

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};
use hitchin_core::exact::{CMatrix, ExactComplex, Poly, Rational};
use hitchin_core::parabolic::{
    parabolic_semistable, parabolic_semistable_seq, ParabolicBundle, ParabolicPoint,
};
use hitchin_core::quiver::{star_stability, star_stability_seq, Alpha, QuiverRep, StarQuiver};
use hitchin_core::spectral::{monodromy_transitive, monodromy_transitive_seq, SpectralCurve};
use hitchin_core::wild::{stokes_report, stokes_report_seq, PolarData, Pole};

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn monodromy_curve() -> SpectralCurve {
    // Rank 3, trace-free, generic enough that every branch point is simple
    // and the loop tracker has real work at each one.
    let a2 = Poly::from_ints(&[1, 0, -3, 0, 1]);
    let a3 = Poly::from_ints(&[-1, 1, 0, -2, 0, 0, 1]);
    SpectralCurve::new(vec![Poly::zero(), a2, a3], vec![2, 4, 6]).unwrap()
}

fn parabolic_bundle() -> (ParabolicBundle, Vec<i64>) {
    let weights = vec![rat(4, 5), rat(3, 5), rat(2, 5), rat(1, 5)];
    let points = (0..4)
        .map(|j| {
            ParabolicPoint::new(ExactComplex::from_int(j), vec![1, 1, 1, 1], weights.clone())
                .unwrap()
        })
        .collect();
    let bundle = ParabolicBundle::new(4, 0, points).unwrap();
    (bundle, vec![-1, -1, -2])
}

fn quiver_rep() -> (QuiverRep, Alpha) {
    let n = 14;
    let quiver = StarQuiver::new(n, 2).unwrap();
    let x = (0..n)
        .map(|j| vec![ExactComplex::one(), ExactComplex::from_int(j as i64 + 1)])
        .collect();
    let rep = QuiverRep::new(quiver, x).unwrap();
    let alpha = Alpha::from_ints(1, &vec![1; n]);
    (rep, alpha)
}

fn polar_data() -> PolarData {
    let poles = (0..16)
        .map(|j| {
            let mut mats = Vec::new();
            for m in 0..6 {
                let (a, b) = if m == 0 { (j + 1, -(j + 1)) } else { (1, 2) };
                mats.push(CMatrix::from_ints(&[&[a, 0], &[0, b]]));
            }
            Pole {
                location: ExactComplex::from_int(j),
                order: 6,
                polar_matrices: mats,
            }
        })
        .collect();
    PolarData::new(poles, false).unwrap()
}

fn bench_all(c: &mut Criterion) {
    let curve = monodromy_curve();
    let mut g = c.benchmark_group("monodromy");
    g.bench_function("parallel", |b| {
        b.iter(|| monodromy_transitive(black_box(&curve)).unwrap())
    });
    g.bench_function("sequential", |b| {
        b.iter(|| monodromy_transitive_seq(black_box(&curve)).unwrap())
    });
    g.finish();

    let (bundle, bounds) = parabolic_bundle();
    let mut g = c.benchmark_group("parabolic_semistable");
    g.bench_function("parallel", |b| {
        b.iter(|| parabolic_semistable(black_box(&bundle), black_box(&bounds)).unwrap())
    });
    g.bench_function("sequential", |b| {
        b.iter(|| parabolic_semistable_seq(black_box(&bundle), black_box(&bounds)).unwrap())
    });
    g.finish();

    let (rep, alpha) = quiver_rep();
    let mut g = c.benchmark_group("star_stability");
    g.bench_function("parallel", |b| {
        b.iter(|| star_stability(black_box(&rep), black_box(&alpha)).unwrap())
    });
    g.bench_function("sequential", |b| {
        b.iter(|| star_stability_seq(black_box(&rep), black_box(&alpha)).unwrap())
    });
    g.finish();

    let data = polar_data();
    let mut g = c.benchmark_group("stokes_report");
    g.bench_function("parallel", |b| {
        b.iter(|| stokes_report(black_box(&data)).unwrap())
    });
    g.bench_function("sequential", |b| {
        b.iter(|| stokes_report_seq(black_box(&data)).unwrap())
    });
    g.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default()
        .sample_size(10)
        .warm_up_time(Duration::from_millis(500))
        .measurement_time(Duration::from_secs(3));
    targets = bench_all
}
criterion_main!(benches);
