use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use tnet::linalg::{c, expm_hermitian, eye, kron, max_abs, pauli, random_unitary, spin_ops, Mat};
use tnet::mps::{aklt_site, cluster_site, site_from_matrices, site_matrices};
use tnet::symmetry::{
    classify_phase, disentangle, factor_system, is_coboundary, push_through, u_transfer_radius, FactorSystem, FiniteGroup, ProjectiveRep,
    SymmetryError,
};
use tnet::tensor::C64;

fn phase_free(v: &Mat) -> Mat {
    kron(v, &v.map(|z| z.conj()))
}

fn pauli_reps() -> Vec<Mat> {
    vec![eye(2), pauli('X').unwrap(), pauli('Z').unwrap(), pauli('Y').unwrap()]
}

fn random_phase(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI))
}

fn rotation(n: [f64; 3], angle: f64) -> Mat {
    let (sx, sy, sz) = spin_ops(2);
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    let h = (sx * c(n[0]) + sy * c(n[1]) + sz * c(n[2])) * c(1.0 / norm);
    expm_hermitian(&h, C64::new(0.0, -angle))
}

#[test]
fn u_transfer_radius_within_unit_disk() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = aklt_site();
    for _ in 0..50 {
        let u = random_unitary(3, &mut rng);
        assert!(u_transfer_radius(&a, &u) <= 1.0 + 1e-9);
    }
    assert!((u_transfer_radius(&a, &eye(3)) - 1.0).abs() < 1e-10);
}

#[test]
fn commutator_invariant_under_rephasing() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = FiniteGroup::z2xz2();
    for _ in 0..100 {
        let reps: Vec<Mat> = pauli_reps().into_iter().map(|v| v * random_phase(&mut rng)).collect();
        let fs = factor_system(&ProjectiveRep::new(g.clone(), reps).unwrap()).unwrap();
        assert!(fs.cocycle_error(&g) < 1e-8);
        assert!((fs.commutator(1, 2) + c(1.0)).norm() < 1e-10);
        assert!(fs.omega.iter().flatten().all(|w| (w.norm() - 1.0).abs() < 1e-10));
    }
}

/// δβ on `group`, with β valued in the `m`-th roots of unity.
fn coboundary(group: &FiniteGroup, m: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<C64>> {
    let n = group.order();
    let beta: Vec<C64> = (0..n).map(|_| C64::from_polar(1.0, 2.0 * PI * rng.gen_range(0..m) as f64 / m as f64)).collect();
    (0..n).map(|a| (0..n).map(|b| beta[a] * beta[b] / beta[group.mul(a, b)]).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// On Z2×Z2 the class is detected by the commutator ω[x,z]/ω[z,x]; on cyclic
    /// groups every factor system is a coboundary.
    #[test]
    fn is_coboundary_matches_invariants(m in 1usize..9, twisted in any::<bool>(), n in 2usize..8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = FiniteGroup::z2xz2();
        let pauli_fs = factor_system(&ProjectiveRep::new(g.clone(), pauli_reps()).unwrap()).unwrap();
        let mut omega = coboundary(&g, m, &mut rng);
        if twisted {
            for a in 0..4 {
                for b in 0..4 {
                    omega[a][b] *= pauli_fs.omega[a][b];
                }
            }
        }
        let fs = FactorSystem { omega };
        prop_assert!(fs.cocycle_error(&g) < 1e-10);
        let oracle = (fs.commutator(1, 2) - c(1.0)).norm() < 1e-8;
        prop_assert_eq!(oracle, !twisted);
        prop_assert_eq!(is_coboundary(&fs, &g).unwrap(), oracle);

        let cyc = FiniteGroup::cyclic(n);
        let fs = FactorSystem { omega: coboundary(&cyc, m, &mut rng) };
        prop_assert!(is_coboundary(&fs, &cyc).unwrap());
    }

    #[test]
    fn push_through_identity_for_rotations(nx in -1.0f64..1.0, ny in -1.0f64..1.0, nz in 0.1f64..1.0, angle in 0.0f64..6.3) {
        let u = rotation([nx, ny, nz], angle);
        let a = aklt_site();
        let p = push_through(&a, &u).unwrap();
        prop_assert!(p.residual < 1e-8);
        prop_assert!(max_abs(&(&p.v * &p.v_inv - eye(2))) < 1e-8);
        // check Σ_j u_ij A_j = e^{iθ} v A_i v⁻¹ on the normalized tensor
        let ms = site_matrices(&tnet::mps::normalize_uniform(&a));
        let phase = C64::from_polar(1.0, p.theta);
        for i in 0..3 {
            let mut lhs = Mat::zeros(2, 2);
            for j in 0..3 {
                lhs += &ms[j] * u[(i, j)];
            }
            let rhs = &p.v * &ms[i] * &p.v_inv * phase;
            prop_assert!(max_abs(&(lhs - rhs)) < 1e-8);
        }
    }

    /// A unitary change of gauge A → M A M† conjugates v by M.
    #[test]
    fn push_through_is_gauge_covariant(seed in any::<u64>(), which in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_unitary(2, &mut rng);
        let ms = site_matrices(&aklt_site());
        let gauged = site_from_matrices(&ms.iter().map(|a| &m * a * m.adjoint()).collect::<Vec<_>>());
        let (sx, sy, sz) = spin_ops(2);
        let gen = [sx, sy, sz][which].clone();
        let u = expm_hermitian(&gen, C64::new(0.0, -PI));
        let v = push_through(&aklt_site(), &u).unwrap().v;
        let vg = push_through(&gauged, &u).unwrap().v;
        prop_assert!(max_abs(&(phase_free(&vg) - phase_free(&(&m * &v * m.adjoint())))) < 1e-8);
    }
}

#[test]
fn classification_fixtures() {
    let g = FiniteGroup::z2xz2();
    let (sx, _, sz) = spin_ops(2);
    let rx = expm_hermitian(&sx, C64::new(0.0, -PI));
    let rz = expm_hermitian(&sz, C64::new(0.0, -PI));
    let aklt = classify_phase(&aklt_site(), &g, &[eye(3), rx.clone(), rz.clone(), &rx * &rz]).unwrap();
    assert!(!aklt.trivial && (aklt.commutator.unwrap() + c(1.0)).norm() < 1e-8);
    assert!(aklt.max_residual < 1e-8);
    assert!(aklt.factor_system.cocycle_error(&g) < 1e-8);

    let x = pauli('X').unwrap();
    let (ux, uz) = (kron(&eye(2), &x), kron(&x, &eye(2)));
    let cluster = classify_phase(&cluster_site(), &g, &[eye(4), ux.clone(), uz.clone(), &ux * &uz]).unwrap();
    assert!(!cluster.trivial && (cluster.commutator.unwrap() + c(1.0)).norm() < 1e-8);
    assert!(cluster.max_residual < 1e-8);

    let product = site_from_matrices(&[Mat::from_element(1, 1, c(1.0)), Mat::zeros(1, 1)]);
    let z = pauli('Z').unwrap();
    let p = classify_phase(&product, &g, &[eye(2), z.clone(), z.clone(), eye(2)]).unwrap();
    assert!(p.trivial && (p.commutator.unwrap() - c(1.0)).norm() < 1e-8);
    assert!(p.max_residual < 1e-8);

    // a rep that is not a symmetry of the state
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let r = random_unitary(3, &mut rng);
    let bad = classify_phase(&aklt_site(), &g, &[eye(3), r.clone(), r.clone(), eye(3)]);
    assert!(matches!(bad, Err(SymmetryError::NotASymmetry)));
}

#[test]
fn disentangler_residual_decreases_with_block_size() {
    let r: Vec<f64> = [4, 6, 8].iter().map(|&k| disentangle(&aklt_site(), k, 4).unwrap().residual_infidelity).collect();
    assert!(r[0] > r[1] && r[1] > r[2], "{r:?}");
    assert!(r[1] < 1e-2);
}
