use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use mqfi_core::anneal::{metropolis_rung, DirectionField};
use mqfi_core::rng::seeded;
use mqfi_core::stabilizer::sample_clifford_two_qubit;
use mqfi_core::statevector::sample_haar_gate;
use mqfi_core::{
    correlation_tensor, run_trajectory_with, Backend, CircuitSpec, ClusterLabeling, Model, PauliString, PureState,
    Tableau,
};

fn tableau(c: &mut Criterion) {
    let n = 128;
    let mut rng = seeded(1);
    let gates: Vec<_> = (0..64).map(|_| sample_clifford_two_qubit(&mut rng)).collect();
    c.bench_function("tableau/clifford_layer_128", |b| {
        let mut t = Tableau::new(n).unwrap();
        b.iter(|| {
            for (k, g) in gates.iter().enumerate() {
                t.apply_clifford(2 * k, 2 * k + 1, g).unwrap();
            }
        })
    });
    c.bench_function("tableau/measure_z_128", |b| {
        let mut t = Tableau::new(n).unwrap();
        for k in 0..n / 2 {
            t.apply_clifford(2 * k, 2 * k + 1, &gates[k % gates.len()]).unwrap();
        }
        let mut rng = seeded(2);
        let mut k = 0;
        b.iter(|| {
            k = (k + 37) % n;
            t.measure_pauli(&PauliString::z(k), &mut rng).unwrap()
        })
    });
}

fn annealer(c: &mut Criterion) {
    let spec = CircuitSpec::unstructured(Model::UnstructuredClifford, 64, 0.1, 3).unwrap();
    let record = run_trajectory_with(&spec, 0, Backend::Stabilizer, false).unwrap();
    let source = record.final_state.pauli_source().unwrap();
    let tensor = correlation_tensor(source).unwrap();
    c.bench_function("anneal/correlation_tensor_64", |b| b.iter(|| correlation_tensor(source).unwrap()));
    c.bench_function("anneal/rung_64x2000", |b| {
        let mut rng = seeded(4);
        let start = DirectionField::random(64, &mut rng);
        b.iter(|| metropolis_rung(&start, &tensor, 0.1, 2000, 0.5, &mut rng).unwrap())
    });
}

fn cluster(c: &mut Criterion) {
    let n = 1024;
    c.bench_function("cluster/ising_step_1024", |b| {
        b.iter_batched(
            || ClusterLabeling::new(n).unwrap(),
            |mut s| {
                for k in 0..n - 1 {
                    s.apply_xx(k).unwrap();
                }
                for k in (0..n).step_by(7) {
                    s.apply_z(k).unwrap();
                }
                s
            },
            BatchSize::SmallInput,
        )
    });
}

fn statevector(c: &mut Criterion) {
    let mut rng = seeded(5);
    let gate = sample_haar_gate(&mut rng);
    c.bench_function("statevector/gate_16", |b| {
        let mut psi = PureState::new(16).unwrap();
        let mut k = 0;
        b.iter(|| {
            k = (k + 1) % 15;
            psi.apply_gate(k, k + 1, &gate).unwrap();
        })
    });
}

criterion_group!(benches, tableau, annealer, cluster, statevector);
criterion_main!(benches);
