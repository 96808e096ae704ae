use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use spill_core::cfd::{
    FlowState, FluidProps, Grid2D, Parallelism, PhaseProps, SolverConfig, VofSolver, WATER,
};

const OIL: PhaseProps = PhaseProps {
    density: 900.0,
    viscosity: 0.02,
    diffusivity: 0.0,
};

/// A collapsing oil column a few steps in, so the projection has work to do.
fn dam_break(n: usize, parallelism: Parallelism) -> (VofSolver, FlowState) {
    let grid = Grid2D::with_extent(n, n, 1.0, 1.0).unwrap();
    let fluid = FluidProps::oil_water(OIL, WATER, 9.81);
    let config = SolverConfig {
        parallelism,
        ..SolverConfig::default()
    };
    let solver = VofSolver::new(grid.clone(), fluid.clone(), config).unwrap();
    let mut state = FlowState::new(&grid, &fluid);
    state.fill(&grid, &fluid, |x, y| {
        (if x < 0.4 && y > 0.3 { 1.0 } else { 0.0 }, 0.0)
    });
    solver.init_hydrostatic(&mut state, 0.0);
    for _ in 0..20 {
        let dt = solver.stable_dt(&state, 0.25);
        solver.step(&mut state, dt).unwrap();
    }
    (solver, state)
}

fn step(c: &mut Criterion) {
    let mut group = c.benchmark_group("vof_step");
    group.sample_size(10);
    for n in [64, 128] {
        for (name, par) in [
            ("rayon", Parallelism::Rayon),
            ("sequential", Parallelism::Sequential),
        ] {
            let (solver, state) = dam_break(n, par);
            let dt = solver.stable_dt(&state, 0.25);
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter_batched(
                    || state.clone(),
                    |mut s| black_box(solver.step(&mut s, dt).unwrap()),
                    criterion::BatchSize::LargeInput,
                )
            });
        }
    }
    group.finish();
}

criterion_group!(benches, step);
criterion_main!(benches);
