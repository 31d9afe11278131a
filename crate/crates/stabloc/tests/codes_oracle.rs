use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabloc::codes::{build_code_graph, five_qubit_code};
use stabloc::gf2::BitVec;
use stabloc::oracle::{StateVector, STATE_TOL};
use stabloc::sample::random_tableau;

fn random_amplitudes<R: Rng>(rng: &mut R, k: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..1 << k).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

#[test]
fn random_codes_encode_independently_of_record() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..150 {
        let n = rng.gen_range(2..=5);
        let k = rng.gen_range(0..=(7 - n).min(n));
        let t = random_tableau(&mut rng, n);
        let (gens, zs) = t.rows().split_at(n - k);
        let cg = build_code_graph(gens, zs).unwrap();
        for c in 0..1u64 << k {
            let c = BitVec::from_mask(k, c);
            let tab = cg.basis_generators(&c).unwrap();
            assert!(tab.validate().is_ok());
            let basis = cg.basis_state(&c).unwrap();
            let want = StateVector::from_stabilizers(tab.rows()).unwrap();
            assert!(basis.equal_up_to_phase(&want, STATE_TOL).unwrap());
            assert!(cg.basis_graph(&c).unwrap().to_tableau().same_state(&tab));
            for (l, z) in zs.iter().enumerate() {
                assert_eq!(tab.stabilizes(z).unwrap(), Some(!c.get(l)));
            }
        }
        let amps = random_amplitudes(&mut rng, k);
        let target = cg.logical_state(&amps).unwrap();
        for x in 0..1u64 << k {
            let out = cg.encode_with_record(&amps, &BitVec::from_mask(k, x)).unwrap();
            assert!(out.equal_up_to_phase(&target, STATE_TOL).unwrap());
        }
    }
}

#[test]
fn five_qubit_basis_states_are_orthogonal() {
    let (g, z) = five_qubit_code();
    let cg = build_code_graph(&g, &z).unwrap();
    let s0 = cg.basis_state(&BitVec::zeros(1)).unwrap();
    let s1 = cg.basis_state(&BitVec::ones(1)).unwrap();
    assert!(s0.inner(&s1).unwrap().norm() < 1e-12);
}
