use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tnet::exact::tfim;
use tnet::groundstate::{dmrg1_run, dmrg2_run, local_eigensolver, mpo_energy, tebd_imaginary, tfim_bond_terms, DmrgConfig, GroundError, TebdConfig};
use tnet::linalg::{c, eigh, singular_values, Mat};
use tnet::mpo::{build_heisenberg_mpo, build_tfim_mpo};
use tnet::mps::norm_squared;
use tnet::tensor::DenseTensor;

fn assert_monotone(energies: &[f64]) -> Result<(), TestCaseError> {
    for w in energies.windows(2) {
        prop_assert!(w[1] <= w[0] + 1e-10, "energy rose from {} to {}", w[0], w[1]);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn dmrg1_monotone_canonical_and_bounded(seed in any::<u64>(), h in 0.2f64..2.0, n in 3usize..8) {
        let mpo = build_tfim_mpo(1.0, h, n);
        let exact = tfim(n, 1.0, h).ground_energy();
        let cfg = DmrgConfig { bond_dim: 8, max_sweeps: 6, seed, initial_bond: 8, ..Default::default() };
        let (mps, rep) = dmrg1_run(&mpo, &cfg);
        assert_monotone(&rep.energies)?;
        prop_assert!(rep.max_canonical_error < 1e-10);
        prop_assert!(rep.energies.iter().all(|&e| e >= exact - 1e-9));
        prop_assert!((mpo_energy(&mps, &mpo).unwrap() - rep.final_energy()).abs() < 1e-8);
    }

    #[test]
    fn dmrg2_monotone_without_truncation(seed in any::<u64>(), h in 0.2f64..2.0, n in 3usize..8) {
        let mpo = build_tfim_mpo(1.0, h, n);
        let exact = tfim(n, 1.0, h).ground_energy();
        let cfg = DmrgConfig { bond_dim: 16, max_sweeps: 4, seed, ..Default::default() };
        let (_, rep) = dmrg2_run(&mpo, &cfg);
        assert_monotone(&rep.energies)?;
        prop_assert!(rep.truncation_errors.iter().all(|&t| t < 1e-14));
        prop_assert!(rep.max_canonical_error < 1e-10);
        prop_assert!(rep.energies.iter().all(|&e| e >= exact - 1e-9));
        prop_assert!((rep.final_energy() - exact).abs() < 1e-8);
    }

    #[test]
    fn tebd_keeps_unit_norm(steps in 1usize..8, tau in 0.01f64..0.2) {
        let n = 6;
        let terms = tfim_bond_terms(n, 1.0, 1.0);
        let cfg = TebdConfig { tau, steps, bond_dim: 8, ..Default::default() };
        let (mps, rep) = tebd_imaginary(&terms, n, &cfg);
        prop_assert!((norm_squared(&mps).sqrt() - 1.0).abs() < 1e-10);
        let exact = tfim(n, 1.0, 1.0).ground_energy();
        prop_assert!(rep.energies.iter().all(|&e| e >= exact - 1e-9));
    }
}

/// With two sites and bond dimension one, every two-site update solves the
/// full problem and keeps only the largest Schmidt value of the ground state.
#[test]
fn dmrg2_truncation_equals_discarded_schmidt_weight() {
    let h = 0.8;
    let (_, gs) = tfim(2, 1.0, h).ground_state();
    let m = Mat::from_fn(2, 2, |a, b| gs[2 * a + b]);
    let s = singular_values(&m);
    let tot: f64 = s.iter().map(|x| x * x).sum();
    let discarded = s[1] * s[1] / tot;
    let cfg = DmrgConfig { bond_dim: 1, max_sweeps: 3, ..Default::default() };
    let (_, rep) = dmrg2_run(&build_tfim_mpo(1.0, h, 2), &cfg);
    assert!(!rep.truncation_errors.is_empty());
    for t in rep.truncation_errors {
        assert!((t - discarded).abs() < 1e-10, "{t} vs {discarded}");
    }
}

#[test]
fn heisenberg_dmrg_matches_exact() {
    let n = 8;
    let mpo = build_heisenberg_mpo(1.0, 1.0, 1.0, 0.3, n);
    let exact = tnet::exact::heisenberg(n, 1.0, 1.0, 1.0, 0.3).ground_energy();
    let (_, rep) = dmrg2_run(&mpo, &DmrgConfig { bond_dim: 16, seed: 9, ..Default::default() });
    assert!((rep.final_energy() - exact).abs() < 1e-8);
    assert!(rep.energies.iter().all(|&e| e >= exact - 1e-9));
}

#[test]
fn local_eigensolver_examples() {
    let d = Mat::from_diagonal(&DVector::from_vec(vec![c(3.0), c(1.0), c(2.0)]));
    let (e, v) = local_eigensolver(&d, 1e-12).unwrap();
    assert!((e - 1.0).abs() < 1e-12);
    assert!((v[1].norm() - 1.0).abs() < 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let g = DenseTensor::random(&[50, 50], &mut rng).to_matrix(1);
    let h = &g + g.adjoint();
    let (e, v) = local_eigensolver(&h, 1e-10).unwrap();
    assert!((e - eigh(&h).0[0]).abs() < 1e-9);
    assert!((&h * &v - &v * c(e)).norm() <= 1e-9);

    // degenerate minimum: only the residual is checked
    let deg = Mat::from_diagonal(&DVector::from_vec(vec![c(-1.0), c(-1.0), c(4.0)]));
    let (e, v) = local_eigensolver(&deg, 1e-12).unwrap();
    assert!((e + 1.0).abs() < 1e-12 && (&deg * &v - &v * c(e)).norm() < 1e-10);

    assert!(matches!(local_eigensolver(&g, 1e-10), Err(GroundError::NotHermitian(_))));
}
