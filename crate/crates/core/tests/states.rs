use mqfi_core::anneal::{anneal, AnnealSchedule};
use mqfi_core::circuit::FinalState;
use mqfi_core::rng::seeded;
use mqfi_core::{
    correlation_tensor, run_trajectory, run_trajectory_with, Backend, CircuitSpec, EntropySource, Model, PureState,
    TmiPartition,
};
use num_complex::Complex64;

fn haar_state(n: usize, p_z: f64, index: u64) -> PureState {
    let spec = CircuitSpec::unstructured(Model::UnstructuredHaar, n, p_z, 77).unwrap();
    match run_trajectory(&spec, index).unwrap().final_state {
        FinalState::Statevector(s) => s,
        _ => unreachable!(),
    }
}

/// ⟨O²⟩ − ⟨O⟩² for `O = Σ n_k·σ_k / 2`, from the amplitudes directly.
fn direct_variance(psi: &PureState, dirs: &[[f64; 3]]) -> f64 {
    let amps = psi.amplitudes();
    let mut image = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (k, n) in dirs.iter().enumerate() {
        let (x, y, z) = (n[0], n[1], n[2]);
        for (i, a) in amps.iter().enumerate() {
            let j = i ^ (1 << k);
            if i >> k & 1 == 0 {
                // column |0⟩ of n·σ: (z, x + iy)
                image[i] += a * z * 0.5;
                image[j] += a * Complex64::new(x, y) * 0.5;
            } else {
                image[i] -= a * z * 0.5;
                image[j] += a * Complex64::new(x, -y) * 0.5;
            }
        }
    }
    let second: f64 = image.iter().map(|c| c.norm_sqr()).sum();
    let first: Complex64 = amps.iter().zip(&image).map(|(a, b)| a.conj() * b).sum();
    second - first.re * first.re
}

#[test]
fn annealed_fisher_is_four_times_a_variance() {
    let schedule = AnnealSchedule::with_iterations(800).unwrap();
    for index in 0..5 {
        let psi = haar_state(8, 0.15, index);
        let tensor = correlation_tensor(&psi).unwrap();
        let result = anneal(&tensor, &schedule, 2, &mut seeded(index)).unwrap();
        let var = direct_variance(&psi, &result.directions.vectors());
        assert!((4.0 * var - result.fisher).abs() < 1e-8, "F = {}, 4 Var = {}", result.fisher, 4.0 * var);
    }
}

#[test]
fn stabilizer_correlations_are_integers() {
    let spec = CircuitSpec::unstructured(Model::UnstructuredClifford, 12, 0.15, 4).unwrap();
    for index in 0..4 {
        let record = run_trajectory_with(&spec, index, Backend::Stabilizer, false).unwrap();
        let tensor = correlation_tensor(record.final_state.pauli_source().unwrap()).unwrap();
        for v in tensor.one_point().iter().chain(tensor.connected()) {
            assert_eq!(v.fract(), 0.0, "entry {v}");
        }
    }
}

#[test]
fn pure_states_have_complementary_entropies() {
    let psi = haar_state(8, 0.1, 3);
    let p = TmiPartition::new(8).unwrap();
    let abc: Vec<usize> = (0..3).flat_map(|q| p.quarter(q)).collect();
    let d = p.quarter(3);
    assert!((psi.entropy(&abc).unwrap() - psi.entropy(&d).unwrap()).abs() < 1e-8);
    for mask in 1u32..255 {
        let region: Vec<usize> = (0..8).filter(|q| mask >> q & 1 == 1).collect();
        let rest: Vec<usize> = (0..8).filter(|q| mask >> q & 1 == 0).collect();
        assert!((psi.entropy(&region).unwrap() - psi.entropy(&rest).unwrap()).abs() < 1e-8);
    }
}

#[test]
fn ghz_and_product_bounds() {
    let schedule = AnnealSchedule::default();
    let ghz = correlation_tensor(&PureState::ghz(6).unwrap()).unwrap();
    let r = anneal(&ghz, &schedule, 2, &mut seeded(1)).unwrap();
    assert!(r.fisher > 0.99 * 36.0);
    assert_eq!(r.multipartiteness, 5);
    let product = correlation_tensor(&PureState::product(&[(0.3, 1.0), (1.2, -0.4), (2.0, 2.5)]).unwrap()).unwrap();
    let r = anneal(&product, &schedule, 2, &mut seeded(2)).unwrap();
    assert!((r.density - 1.0).abs() < 1e-3);
}
