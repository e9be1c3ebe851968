use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ars_mobopt::acquisition::{draw_weights, Incumbent, DEFAULT_RHO};
use ars_mobopt::ars::{propose_batch, train_agent, ArsConfig, Policy, RewardContext};
use ars_mobopt::baselines::{latin_hypercube, parego_with_weights, ParegoConfig};
use ars_mobopt::hypervolume::hypervolume_mc;
use ars_mobopt::par::Exec;
use ars_mobopt::pareto::{Evaluation, ParetoArchive, Source};
use ars_mobopt::problems::{Problem, Zdt1};
use ars_mobopt::rng::stream;
use ars_mobopt::surrogate::{BaseSampleKind, BaseSamples, GpConfig, GpModel};

const MODES: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn zdt1_archive(n: usize) -> (Zdt1, ParetoArchive) {
    let problem = Zdt1::new(6).unwrap();
    let mut archive = ParetoArchive::new(problem.default_reference());
    for (i, x) in latin_hypercube(n, problem.space(), &mut stream(0, "bench")).into_iter().enumerate() {
        let f = problem.evaluate(&x).unwrap();
        archive.push(Evaluation::new(i, Source::Prior, x, f, problem.objectives()));
    }
    (problem, archive)
}

fn fit(problem: &Zdt1, archive: &ParetoArchive, exec: Exec) -> GpModel {
    let (xs, ys): (Vec<Vec<f64>>, Vec<Vec<f64>>) = archive.successful().map(|e| (e.x.clone(), e.f_norm.clone())).unzip();
    let config = GpConfig { exec, ..GpConfig::default() };
    GpModel::fit(problem.space(), &xs, &ys, &config, &mut stream(0, "gp")).unwrap()
}

fn bench_hypervolume(c: &mut Criterion) {
    let mut rng = stream(1, "front");
    let front: Vec<Vec<f64>> = (0..20)
        .map(|_| (0..5).map(|_| rand::Rng::random::<f64>(&mut rng)).collect())
        .collect();
    let mut group = c.benchmark_group("hypervolume_mc_5d");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| hypervolume_mc(&front, &[1.0; 5], &[0.0; 5], 500_000, 3, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_gp_fit(c: &mut Criterion) {
    let (problem, archive) = zdt1_archive(40);
    let mut group = c.benchmark_group("gp_fit_40pts");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| fit(&problem, &archive, exec)));
    }
    group.finish();
}

fn bench_ars(c: &mut Criterion) {
    let (problem, archive) = zdt1_archive(20);
    let model = fit(&problem, &archive, Exec::Parallel);
    let base = BaseSamples::new(BaseSampleKind::Normal, 64, 2, &mut stream(0, "base")).unwrap();
    let weights = draw_weights(&mut stream(0, "lambda"), 2, DEFAULT_RHO);
    let incumbent = Incumbent::from_archive(&archive, &weights).unwrap();
    let ctx = RewardContext {
        model: &model,
        base: &base,
        weights: &weights,
        incumbent: &incumbent,
    };
    let x0 = problem.space().to_unit(&archive.evaluations()[0].x);

    let mut group = c.benchmark_group("ars");
    group.sample_size(10);
    for (name, exec) in MODES {
        let config = ArsConfig {
            n_directions: 200,
            max_train_steps: 3,
            exec,
            ..ArsConfig::default()
        };
        group.bench_function(BenchmarkId::new("train_agent", name), |b| {
            b.iter(|| {
                let mut policy = Policy::zeros(6, config.hidden);
                train_agent(&mut policy, &x0, &ctx, &config, &mut stream(0, "agent"))
            })
        });
        group.bench_function(BenchmarkId::new("propose", name), |b| {
            b.iter(|| propose_batch(&archive, &ctx, &config, 5, 1).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("parego");
    group.sample_size(10);
    for (name, exec) in MODES {
        let config = ParegoConfig { exec, ..ParegoConfig::default() };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| parego_with_weights(&archive, &model, &base, weights.clone(), &config, 5).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_hypervolume, bench_gp_fit, bench_ars);
criterion_main!(benches);
