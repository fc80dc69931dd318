use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tnet::linalg::{c, eye, max_abs, pauli, random_isometry, singular_values, Mat};
use tnet::mera::{
    causal_cone_width, causal_cone_width_max, check_isometries, cluster_binary_layer, cone_cut_dims, descending_superoperator, ghz_layer, mera_build,
    product_layer, random_layer, scaling_superoperator, MeraError, MeraLayer,
};
use tnet::tensor::{DenseTensor, C64};

fn unit(v: Vec<C64>) -> DVector<C64> {
    let v = DVector::from_vec(v);
    let n = v.norm();
    v / c(n)
}

fn random_top(d: usize, rng: &mut ChaCha8Rng) -> DVector<C64> {
    unit(DenseTensor::random(&[d], rng).data().to_vec())
}

/// Reduced density matrix of `region` (in that order) from a Kronecker-order
/// state of `n` sites of dimension `d`, site 0 most significant.
fn reduced_density(psi: &DVector<C64>, n: usize, d: usize, region: &[usize]) -> Mat {
    let digit = |idx: usize, s: usize| (idx / d.pow((n - 1 - s) as u32)) % d;
    let rest: Vec<usize> = (0..n).filter(|s| !region.contains(s)).collect();
    let dr = d.pow(region.len() as u32);
    let mut rho = Mat::zeros(dr, dr);
    // group amplitudes by the environment configuration
    let mut by_env: std::collections::HashMap<usize, Vec<(usize, C64)>> = std::collections::HashMap::new();
    for (idx, z) in psi.iter().enumerate() {
        let r = region.iter().fold(0, |acc, &s| acc * d + digit(idx, s));
        let e = rest.iter().fold(0, |acc, &s| acc * d + digit(idx, s));
        by_env.entry(e).or_default().push((r, *z));
    }
    for amps in by_env.values() {
        for &(r1, z1) in amps {
            for &(r2, z2) in amps {
                rho[(r1, r2)] += z1 * z2.conj();
            }
        }
    }
    rho
}

/// Applies a Pauli string given as (qubit, letter) pairs.
fn apply_paulis(psi: &DVector<C64>, n: usize, ops: &[(usize, char)]) -> DVector<C64> {
    let mut out = psi.clone();
    for &(q, p) in ops {
        let m = pauli(p).unwrap();
        let bit = 1 << (n - 1 - q);
        let prev = out.clone();
        for idx in 0..prev.len() {
            let b = (idx & bit != 0) as usize;
            out[idx] = m[(b, 0)] * prev[idx & !bit] + m[(b, 1)] * prev[idx | bit];
        }
    }
    out
}

fn plus() -> DVector<C64> {
    unit(vec![c(1.0), c(1.0)])
}

fn ternary_layers(depth: usize, rng: &mut ChaCha8Rng) -> Vec<MeraLayer> {
    (0..depth).map(|_| random_layer(2, 2, 3, rng)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_mera_states_have_unit_norm(seed in any::<u64>(), binary in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (layers, n) = if binary {
            ((0..4).map(|_| random_layer(2, 2, 2, &mut rng)).collect::<Vec<_>>(), 16)
        } else {
            (ternary_layers(2, &mut rng), 9)
        };
        prop_assert!(layers.iter().all(check_isometries));
        let top = random_top(2, &mut rng);
        let psi = mera_build(&layers, &top, n).unwrap().to_kron_vector();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn descending_matches_dense_partial_trace(seed in any::<u64>(), start in 0usize..9, len in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = ternary_layers(2, &mut rng);
        let top = random_top(2, &mut rng);
        let psi = mera_build(&layers, &top, 9).unwrap().to_kron_vector();
        let region: Vec<usize> = (0..len).map(|k| (start + k) % 9).collect();
        let rho = descending_superoperator(&layers, &top, 9, start, len).unwrap();
        prop_assert!(max_abs(&(rho - reduced_density(&psi, 9, 2, &region))) < 1e-10);
    }

    /// Rényi-0 entropy of a block is bounded by the legs cut while descending
    /// to it: rank ρ ≤ Π dims.
    #[test]
    fn renyi0_bounded_by_cut_bonds(seed in any::<u64>(), start in 0usize..9, len in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = ternary_layers(2, &mut rng);
        let top = random_top(2, &mut rng);
        let psi = mera_build(&layers, &top, 9).unwrap().to_kron_vector();
        let region: Vec<usize> = (0..len).map(|k| (start + k) % 9).collect();
        let rho = reduced_density(&psi, 9, 2, &region);
        let s = singular_values(&rho);
        let rank = s.iter().filter(|&&x| x > 1e-10 * s[0]).count();
        let cut: f64 = cone_cut_dims(&layers, 9, start, len).unwrap().iter().map(|&d| (d as f64).ln()).sum();
        prop_assert!((rank as f64).ln() <= cut + 1e-12, "rank {} cut {}", rank, cut);
    }

    #[test]
    fn scaling_superoperator_properties(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_isometry(8, 2, &mut rng).adjoint();
        let rep = scaling_superoperator(&w).unwrap();
        prop_assert!(rep.unital_error < 1e-10);
        prop_assert!(rep.choi_min_eigenvalue > -1e-10);
        prop_assert!(rep.eigenvalues.iter().all(|z| z.norm() <= 1.0 + 1e-10));
        prop_assert!((rep.eigenvalues[0] - c(1.0)).norm() < 1e-10);
        prop_assert!(rep.scaling_dims.iter().all(|&x| x >= -1e-10));
        prop_assert!(max_abs(&(rep.apply(&eye(2)) - eye(2))) < 1e-10);
    }
}

#[test]
fn product_and_ghz_states() {
    let p = product_layer();
    assert!(check_isometries(&p));
    let psi = mera_build(&[p.clone(), p], &plus(), 9).unwrap().to_kron_vector();
    assert!(psi.iter().all(|z| (z - c(1.0 / 512f64.sqrt())).norm() < 1e-12));

    let g = ghz_layer();
    let psi = mera_build(&[g.clone(), g.clone()], &plus(), 9).unwrap().to_kron_vector();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (k, z) in psi.iter().enumerate() {
        let want = if k == 0 || k == 511 { h } else { 0.0 };
        assert!((z - c(want)).norm() < 1e-12);
    }
    let rho = descending_superoperator(&[g.clone(), g.clone()], &plus(), 9, 7, 3).unwrap();
    let mut want = Mat::zeros(8, 8);
    want[(0, 0)] = c(0.5);
    want[(7, 7)] = c(0.5);
    assert!(max_abs(&(rho - want)) < 1e-12);
    let one = descending_superoperator(&[product_layer(), product_layer()], &plus(), 9, 4, 1).unwrap();
    assert!(max_abs(&(one - Mat::from_element(2, 2, c(0.5)))) < 1e-12);

    let s = scaling_superoperator(&g.w).unwrap();
    let z = pauli('Z').unwrap();
    assert!(max_abs(&(s.apply(&z) - &z)) < 1e-12);
    assert!(s.scaling_dims.iter().filter(|x| x.abs() < 1e-10).count() >= 2);
}

#[test]
fn binary_cluster_mera_gives_cluster_ring() {
    let top = unit(vec![c(1.0); 4]);
    for depth in 1..=3 {
        let layers = vec![cluster_binary_layer(); depth];
        let sites = 1 << depth;
        let n = 2 * sites;
        let psi = mera_build(&layers, &top, sites).unwrap().to_kron_vector();
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        for q in 0..n {
            let stab = [((q + n - 1) % n, 'Z'), (q, 'X'), ((q + 1) % n, 'Z')];
            let v = apply_paulis(&psi, n, &stab);
            assert!((psi.dotc(&v) - c(1.0)).norm() < 1e-10, "{n} qubits, stabilizer at {q}");
        }
        if depth == 2 {
            let rho = descending_superoperator(&layers, &top, sites, 1, 3).unwrap();
            assert!(max_abs(&(rho - reduced_density(&psi, sites, 4, &[1, 2, 3]))) < 1e-10);
        }
    }
}

#[test]
fn isometry_checks() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    assert!(check_isometries(&MeraLayer::new(eye(4), product_layer().w, 3).unwrap()));
    let w = DenseTensor::random(&[2, 8], &mut rng).to_matrix(1);
    let bad = MeraLayer::new(eye(4), w.clone(), 3).unwrap();
    assert!(!check_isometries(&bad));
    assert!(matches!(scaling_superoperator(&w), Err(MeraError::NotIsometric)));
    let mut u = random_layer(2, 2, 3, &mut rng);
    u.u[(0, 0)] += c(1e-6);
    assert!(!check_isometries(&u));
}

#[test]
fn causal_cones() {
    assert_eq!(causal_cone_width_max(5, 5), vec![5, 3, 3, 3, 3, 3]);
    assert!(causal_cone_width_max(8, 1).iter().all(|&w| w <= 3));
    for len in 1..=20 {
        let widths = causal_cone_width_max(4, len);
        assert!(widths[1..].iter().all(|&w| w <= len.max(3)));
        if len <= 9 {
            assert!(widths[2] <= 3, "len {len}: {widths:?}");
        }
    }
    // brute force: sites touched by pairs and blocks one layer up
    for start in -9i64..9 {
        for len in 1..10usize {
            let w = causal_cone_width(1, start, len);
            let mut lo = start;
            let mut hi = start + len as i64 - 1;
            if lo.rem_euclid(3) == 1 {
                lo -= 1;
            }
            if hi.rem_euclid(3) == 0 {
                hi += 1;
            }
            let blocks: std::collections::BTreeSet<i64> = (lo..=hi).map(|s| (s - 1).div_euclid(3)).collect();
            assert_eq!(w[1], blocks.len());
        }
    }
}
