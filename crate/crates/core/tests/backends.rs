use mqfi_core::circuit::FinalState;
use mqfi_core::{
    replay, run_trajectory_with, tmi, Backend, Boundary, CircuitSpec, Model, PauliString, TmiPartition,
};

fn statevector(state: FinalState) -> mqfi_core::PureState {
    match state {
        FinalState::Statevector(s) => s,
        other => panic!("expected a statevector, got {other:?}"),
    }
}

fn all_regions(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1 << n) - 1).map(move |mask| (0..n).filter(|q| mask >> q & 1 == 1).collect())
}

#[test]
fn stabilizer_trajectories_replay_exactly_on_statevector() {
    let cases = [
        CircuitSpec::unstructured(Model::UnstructuredClifford, 8, 0.2, 11).unwrap(),
        CircuitSpec::structured(Model::StructuredClifford, 8, 0.5, 0.1, 12).unwrap(),
        CircuitSpec::structured(Model::StructuredNosymClifford, 8, 0.4, 0.2, 13).unwrap(),
        CircuitSpec::projective_ising(8, 0.3, 14).unwrap(),
    ];
    for spec in &cases {
        for index in 0..4 {
            let record = run_trajectory_with(spec, index, Backend::Stabilizer, true).unwrap();
            let FinalState::Stabilizer(tableau) = &record.final_state else { unreachable!() };
            let psi = statevector(replay(&record, Backend::Statevector).unwrap());
            assert!((psi.norm_sqr() - 1.0).abs() < 1e-10);
            // the replayed state must be the +1 eigenstate of every stabilizer
            for g in tableau.stabilizers() {
                let v = psi.expectation_pauli(&g).unwrap();
                assert!((v - 1.0).abs() < 1e-8, "{} index {index}: ⟨g⟩ = {v}", spec.model);
            }
            let p = TmiPartition::new(8).unwrap();
            let (a, b) = (tmi(tableau, &p).unwrap(), tmi(&psi, &p).unwrap());
            assert!((a - b).abs() < 1e-8);
        }
    }
}

#[test]
fn cluster_trajectories_replay_on_both_exact_backends() {
    for boundary in [Boundary::Open, Boundary::Periodic] {
        let spec = CircuitSpec::projective_ising(8, 0.35, 21).unwrap().with_boundary(boundary).unwrap();
        for index in 0..6 {
            let record = run_trajectory_with(&spec, index, Backend::Cluster, true).unwrap();
            let labels = record.final_state.entropy_source();
            let psi = statevector(replay(&record, Backend::Statevector).unwrap());
            let tableau = replay(&record, Backend::Stabilizer).unwrap();
            for region in all_regions(8) {
                let s = labels.entropy(&region).unwrap();
                assert!((psi.reduced_entropy(&region).unwrap() - s).abs() < 1e-8, "{boundary} region {region:?}");
                assert_eq!(tableau.entropy_source().entropy(&region).unwrap(), s);
            }
        }
    }
}

#[test]
fn cluster_sizes_match_single_site_entropies() {
    let spec = CircuitSpec::projective_ising(6, 0.25, 5).unwrap();
    for index in 0..10 {
        let record = run_trajectory_with(&spec, index, Backend::Cluster, true).unwrap();
        let FinalState::Cluster(labels) = &record.final_state else { unreachable!() };
        let psi = statevector(replay(&record, Backend::Statevector).unwrap());
        // a site belongs to a GHZ cluster exactly when it carries one bit
        let entangled = (0..6).filter(|&q| (psi.reduced_entropy(&[q]).unwrap() - 1.0).abs() < 1e-8).count();
        let free = (0..6).filter(|&q| psi.reduced_entropy(&[q]).unwrap().abs() < 1e-8).count();
        assert_eq!(entangled + free, 6);
        assert_eq!(free, labels.unentangled_count());
        assert_eq!(entangled, labels.cluster_sizes().iter().sum::<usize>());
    }
}

#[test]
fn symmetric_structured_circuits_keep_parity() {
    let parity = PauliString::parity(8);
    let clifford = CircuitSpec::structured(Model::StructuredClifford, 8, 0.5, 0.2, 3).unwrap();
    let haar = CircuitSpec::structured(Model::StructuredHaar, 8, 0.5, 0.2, 3).unwrap();
    for index in 0..4 {
        let FinalState::Stabilizer(t) = run_trajectory_with(&clifford, index, Backend::Stabilizer, false).unwrap().final_state
        else {
            unreachable!()
        };
        assert_eq!(t.expectation_pauli(&parity).unwrap(), 1);
        let psi = statevector(run_trajectory_with(&haar, index, Backend::Statevector, false).unwrap().final_state);
        assert!((psi.expectation_pauli(&parity).unwrap() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn replay_rejects_unsupported_backends() {
    let spec = CircuitSpec::unstructured(Model::UnstructuredHaar, 6, 0.2, 1).unwrap();
    let record = run_trajectory_with(&spec, 0, Backend::Statevector, true).unwrap();
    assert!(replay(&record, Backend::Stabilizer).is_err());
    assert!(replay(&record, Backend::Cluster).is_err());
}
