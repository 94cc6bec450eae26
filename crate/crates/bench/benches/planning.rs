use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use survnet::formulation::{build_logical_design, Approach, LogicalPhase, SurvivabilityMode};
use survnet::milp::{emit_lp_file, solve_milp};
use survnet::planner::{plan, EngineKind, PlanOptions};
use survnet::verify::{check_disjointness, check_restorability, enumerate_failures};
use survnet_bench::problem;

fn solver(c: &mut Criterion) {
    let ring = problem("ring4.json", SurvivabilityMode::None, Approach::Sequential);
    let (model, _) = build_logical_design(&LogicalPhase::working(&ring)).unwrap();
    c.bench_function("milp/ring4 working logical design", |b| b.iter(|| solve_milp(black_box(&model), 0.0, 60.0).unwrap()));

    let big = problem("nationwide12.json", SurvivabilityMode::None, Approach::Sequential);
    let (model, _) = build_logical_design(&LogicalPhase::working(&big)).unwrap();
    c.bench_function("lp-emit/nationwide12 working logical design", |b| b.iter(|| emit_lp_file(black_box(&model))));
}

fn planning(c: &mut Criterion) {
    let mut group = c.benchmark_group("plan/ring4");
    for approach in [Approach::Sequential, Approach::Integrated] {
        for mode in [SurvivabilityMode::None, SurvivabilityMode::MlInterlayerBrs] {
            let p = problem("ring4.json", mode, approach);
            group.bench_with_input(BenchmarkId::new(approach.as_str(), mode.as_str()), &p, |b, p| {
                b.iter(|| plan(p, &PlanOptions::exact()).unwrap())
            });
        }
    }
    group.finish();

    let greedy = PlanOptions { engine: EngineKind::Greedy, ..PlanOptions::default() };
    let mut group = c.benchmark_group("plan/nationwide12 greedy");
    group.sample_size(10);
    for mode in SurvivabilityMode::ALL {
        let p = problem("nationwide12.json", mode, Approach::Sequential);
        group.bench_with_input(BenchmarkId::from_parameter(mode.as_str()), &p, |b, p| b.iter(|| plan(p, &greedy).unwrap()));
    }
    group.finish();
}

fn verification(c: &mut Criterion) {
    let greedy = PlanOptions { engine: EngineKind::Greedy, ..PlanOptions::default() };
    let p = problem("nationwide12.json", SurvivabilityMode::MlInterlayerBrs, Approach::Sequential);
    let cfg = plan(&p, &greedy).unwrap();
    let scenarios = enumerate_failures(&cfg);
    c.bench_function("verify/nationwide12 restorability", |b| b.iter(|| check_restorability(black_box(&cfg), &scenarios)));
    c.bench_function("verify/nationwide12 disjointness", |b| b.iter(|| check_disjointness(black_box(&cfg))));
}

criterion_group!(benches, solver, planning, verification);
criterion_main!(benches);
