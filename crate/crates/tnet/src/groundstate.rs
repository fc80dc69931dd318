//! Variational ground-state search: one- and two-site DMRG sweeps and
//! imaginary-time TEBD with a first-order odd/even splitting.
//!
//! Environments are stored per MPO bond index as `bra bond × ket bond`
//! matrices. The state is kept in mixed canonical form around the site being
//! updated, so the norm environment is the identity and every local problem
//! is a Hermitian eigenproblem.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exact::lanczos_lowest;
use crate::linalg::{c, eigh, expm_hermitian, is_hermitian, kron, pauli, Mat};
use crate::mpo::MatrixProductOperator;
use crate::mps::{
    canonicalize, left_iso_error, left_step, right_iso_error, right_step, Boundary, Canonical, Form,
    MatrixProductState,
};
use crate::tensor::{svd_split, DenseTensor, SvdOptions, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroundError {
    #[error("state is not in mixed canonical form at site {0}")]
    NotCanonical(usize),
    #[error("effective Hamiltonian is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// Local problems up to this dimension are solved densely.
pub const DENSE_LOCAL_LIMIT: usize = 512;

#[derive(Clone, Debug)]
pub struct DmrgConfig {
    pub bond_dim: usize,
    pub max_sweeps: usize,
    pub energy_tolerance: f64,
    pub eigensolver_tolerance: f64,
    pub seed: u64,
    /// Bond dimension of the random starting state (two-site DMRG grows it).
    pub initial_bond: usize,
}

impl Default for DmrgConfig {
    fn default() -> Self {
        Self {
            bond_dim: 16,
            max_sweeps: 20,
            energy_tolerance: 1e-10,
            eigensolver_tolerance: 1e-10,
            seed: 0,
            initial_bond: 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TebdConfig {
    pub tau: f64,
    pub steps: usize,
    pub bond_dim: usize,
    pub trunc_threshold: f64,
}

impl Default for TebdConfig {
    fn default() -> Self {
        Self {
            tau: 0.01,
            steps: 1000,
            bond_dim: 16,
            trunc_threshold: 1e-12,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SweepReport {
    /// Energy after every local update (DMRG) or every time step (TEBD).
    pub energies: Vec<f64>,
    /// Discarded weight at every SVD split.
    pub truncation_errors: Vec<f64>,
    /// Energy at the end of every full sweep.
    pub sweep_energies: Vec<f64>,
    /// Largest isometry violation seen right after any update.
    pub max_canonical_error: f64,
    pub converged: bool,
}

impl SweepReport {
    pub fn final_energy(&self) -> f64 {
        self.energies.last().copied().unwrap_or(f64::NAN)
    }
}

// environments

fn mpo_entries(w: &DenseTensor) -> Vec<(usize, usize, Mat)> {
    let s = w.shape();
    let mut out = Vec::new();
    for a in 0..s[0] {
        for b in 0..s[1] {
            let m = Mat::from_fn(s[2], s[3], |i, j| w.get(&[a, b, i, j]));
            if m.iter().any(|z| *z != c(0.0)) {
                out.push((a, b, m));
            }
        }
    }
    out
}

fn site_mats(t: &DenseTensor) -> Vec<Mat> {
    crate::mps::site_matrices(t)
}

/// `L'_b = Σ_{a,i,j} W[a,b,i,j] A_i† L_a A_j`.
fn extend_left(l: &[Mat], a: &DenseTensor, w: &DenseTensor) -> Vec<Mat> {
    let am = site_mats(a);
    let dr = a.shape()[2];
    let mut out = vec![Mat::zeros(dr, dr); w.shape()[1]];
    for (x, y, op) in mpo_entries(w) {
        for j in 0..am.len() {
            let la = &l[x] * &am[j];
            for i in 0..am.len() {
                let o = op[(i, j)];
                if o != c(0.0) {
                    out[y] += am[i].adjoint() * &la * o;
                }
            }
        }
    }
    out
}

/// `R'_a = Σ_{b,i,j} W[a,b,i,j] conj(A_i) R_b A_jᵀ`.
fn extend_right(r: &[Mat], a: &DenseTensor, w: &DenseTensor) -> Vec<Mat> {
    let am = site_mats(a);
    let dl = a.shape()[0];
    let mut out = vec![Mat::zeros(dl, dl); w.shape()[0]];
    for (x, y, op) in mpo_entries(w) {
        for j in 0..am.len() {
            let ra = &r[y] * am[j].transpose();
            for i in 0..am.len() {
                let o = op[(i, j)];
                if o != c(0.0) {
                    out[x] += am[i].conjugate() * &ra * o;
                }
            }
        }
    }
    out
}

fn boundary_vectors(mps: &MatrixProductState) -> Result<(&[C64], &[C64]), GroundError> {
    match &mps.boundary {
        Boundary::Open { left, right } => Ok((left, right)),
        _ => Err(GroundError::ShapeMismatch("open boundary required".into())),
    }
}

fn left_edge(mpo: &MatrixProductOperator, l: &[C64]) -> Vec<Mat> {
    let v = DVector::from_column_slice(l);
    let outer = v.conjugate() * v.transpose();
    mpo.left.iter().map(|&x| &outer * x).collect()
}

fn right_edge(mpo: &MatrixProductOperator, r: &[C64]) -> Vec<Mat> {
    let v = DVector::from_column_slice(r);
    let outer = v.conjugate() * v.transpose();
    mpo.right.iter().map(|&x| &outer * x).collect()
}

struct Envs {
    /// `left[k]` covers sites `< k`.
    left: Vec<Option<Vec<Mat>>>,
    /// `right[k]` covers sites `>= k`.
    right: Vec<Option<Vec<Mat>>>,
}

impl Envs {
    fn new(mps: &MatrixProductState, mpo: &MatrixProductOperator) -> Result<Self, GroundError> {
        let n = mps.len();
        let (l, r) = boundary_vectors(mps)?;
        let mut left = vec![None; n + 1];
        let mut right = vec![None; n + 1];
        left[0] = Some(left_edge(mpo, l));
        right[n] = Some(right_edge(mpo, r));
        Ok(Envs { left, right })
    }

    fn update_left(&mut self, mps: &MatrixProductState, mpo: &MatrixProductOperator, k: usize) {
        let l = self.left[k].as_ref().expect("left environment");
        self.left[k + 1] = Some(extend_left(l, &mps.sites[k], &mpo.sites[k]));
    }

    fn update_right(&mut self, mps: &MatrixProductState, mpo: &MatrixProductOperator, k: usize) {
        let r = self.right[k + 1].as_ref().expect("right environment");
        self.right[k] = Some(extend_right(r, &mps.sites[k], &mpo.sites[k]));
    }
}

/// Effective one-site Hamiltonian acting on a site tensor stored as a flat
/// vector in tensor order `(left bond, physical, right bond)`.
fn apply_one_site(l: &[Mat], w: &DenseTensor, r: &[Mat], shape: [usize; 3], x: &DVector<C64>) -> DVector<C64> {
    let [dl, d, dr] = shape;
    let xs: Vec<Mat> = (0..d)
        .map(|j| Mat::from_fn(dl, dr, |a, b| x[a + dl * (j + d * b)]))
        .collect();
    let mut ys = vec![Mat::zeros(dl, dr); d];
    for (a, b, op) in mpo_entries(w) {
        for (j, xj) in xs.iter().enumerate() {
            let lx = &l[a] * xj * r[b].transpose();
            for (i, y) in ys.iter_mut().enumerate() {
                let o = op[(i, j)];
                if o != c(0.0) {
                    *y += &lx * o;
                }
            }
        }
    }
    DVector::from_fn(dl * d * dr, |k, _| {
        let a = k % dl;
        let i = (k / dl) % d;
        let b = k / (dl * d);
        ys[i][(a, b)]
    })
}

/// Effective two-site Hamiltonian on a tensor `(left, phys, phys, right)`.
fn apply_two_site(
    l: &[Mat],
    w1: &DenseTensor,
    w2: &DenseTensor,
    r: &[Mat],
    shape: [usize; 4],
    x: &DVector<C64>,
) -> DVector<C64> {
    let [dl, d1, d2, dr] = shape;
    let idx = |a: usize, j: usize, k: usize, b: usize| a + dl * (j + d1 * (k + d2 * b));
    let xs: Vec<Vec<Mat>> = (0..d1)
        .map(|j| (0..d2).map(|k| Mat::from_fn(dl, dr, |a, b| x[idx(a, j, k, b)])).collect())
        .collect();
    let mid = w1.shape()[1];
    // t[b][i][k] = Σ_{a,j} W1[a,b,i,j] L_a X_{jk}
    let mut t = vec![vec![vec![Mat::zeros(dl, dr); d2]; d1]; mid];
    for (a, b, op) in mpo_entries(w1) {
        for j in 0..d1 {
            for k in 0..d2 {
                let lx = &l[a] * &xs[j][k];
                for i in 0..d1 {
                    let o = op[(i, j)];
                    if o != c(0.0) {
                        t[b][i][k] += &lx * o;
                    }
                }
            }
        }
    }
    let mut ys = vec![vec![Mat::zeros(dl, dr); d2]; d1];
    for (b, cc, op) in mpo_entries(w2) {
        let rt = r[cc].transpose();
        for i in 0..d1 {
            for k in 0..d2 {
                let tr = &t[b][i][k] * &rt;
                for m in 0..d2 {
                    let o = op[(m, k)];
                    if o != c(0.0) {
                        ys[i][m] += &tr * o;
                    }
                }
            }
        }
    }
    DVector::from_fn(dl * d1 * d2 * dr, |q, _| {
        let a = q % dl;
        let j = (q / dl) % d1;
        let k = (q / (dl * d1)) % d2;
        let b = q / (dl * d1 * d2);
        ys[j][k][(a, b)]
    })
}

fn dense_from_action(dim: usize, f: impl Fn(&DVector<C64>) -> DVector<C64>) -> Mat {
    let mut m = Mat::zeros(dim, dim);
    for col in 0..dim {
        let mut e = DVector::zeros(dim);
        e[col] = c(1.0);
        m.set_column(col, &f(&e));
    }
    m
}

/// Lowest eigenpair of an operator given by its action: dense for small
/// dimensions, Lanczos from `x0` above [`DENSE_LOCAL_LIMIT`].
fn solve_local(dim: usize, x0: &DVector<C64>, tol: f64, f: impl Fn(&DVector<C64>) -> DVector<C64>) -> (f64, DVector<C64>) {
    if dim <= DENSE_LOCAL_LIMIT {
        let h = dense_from_action(dim, &f);
        let (vals, vecs) = eigh(&h);
        (vals[0], vecs.column(0).into_owned())
    } else {
        lanczos_lowest(&f, x0, tol, 200)
    }
}

/// Minimum eigenpair of a Hermitian matrix with residual at most `tol`.
pub fn local_eigensolver(h_eff: &Mat, tol: f64) -> Result<(f64, DVector<C64>), GroundError> {
    let dev = crate::linalg::max_abs(&(h_eff - h_eff.adjoint()));
    if !h_eff.is_square() || !is_hermitian(h_eff, 1e-8) {
        return Err(GroundError::NotHermitian(dev));
    }
    let dim = h_eff.nrows();
    let x0 = DVector::from_fn(dim, |k, _| c(1.0 + (k % 7) as f64 * 0.1));
    Ok(solve_local(dim, &x0, tol, |v| h_eff * v))
}

/// Effective Hamiltonian at `site` on the grouped (left bond, physical,
/// right bond) space, plus whether the norm environment is the identity.
#[derive(Clone, Debug)]
pub struct LocalEnvironment {
    pub h_env: Mat,
    pub norm_is_identity: bool,
}

pub fn build_environments(
    mps: &MatrixProductState,
    mpo: &MatrixProductOperator,
    site: usize,
) -> Result<LocalEnvironment, GroundError> {
    let n = mps.len();
    if mpo.len() != n || site >= n {
        return Err(GroundError::ShapeMismatch("MPO and MPS lengths or site".into()));
    }
    let (l, r) = boundary_vectors(mps)?;
    if l.len() != 1 || r.len() != 1 || l[0].norm() != 1.0 || r[0].norm() != 1.0 {
        return Err(GroundError::NotCanonical(site));
    }
    for k in 0..site {
        if left_iso_error(&mps.sites[k]) > 1e-10 {
            return Err(GroundError::NotCanonical(site));
        }
    }
    for k in site + 1..n {
        if right_iso_error(&mps.sites[k]) > 1e-10 {
            return Err(GroundError::NotCanonical(site));
        }
    }
    let mut envs = Envs::new(mps, mpo)?;
    for k in 0..site {
        envs.update_left(mps, mpo, k);
    }
    for k in (site + 1..n).rev() {
        envs.update_right(mps, mpo, k);
    }
    let s = mps.sites[site].shape();
    let shape = [s[0], s[1], s[2]];
    let le = envs.left[site].as_ref().unwrap();
    let re = envs.right[site + 1].as_ref().unwrap();
    let h_env = dense_from_action(shape.iter().product(), |x| apply_one_site(le, &mpo.sites[site], re, shape, x));
    Ok(LocalEnvironment {
        h_env,
        norm_is_identity: true,
    })
}

fn vector_of(t: &DenseTensor) -> DVector<C64> {
    DVector::from_column_slice(t.data())
}

/// Random open chain with bonds capped at the exact Schmidt rank bound.
fn random_start(n: usize, d: usize, bond: usize, seed: u64) -> MatrixProductState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = |k: usize| {
        // bond to the right of site k
        let left = (k + 1) as u32;
        let right = (n - k - 1) as u32;
        bond.min(d.saturating_pow(left)).min(d.saturating_pow(right)).max(1)
    };
    let sites = (0..n)
        .map(|k| {
            let dl = if k == 0 { 1 } else { cap(k - 1) };
            let dr = if k == n - 1 { 1 } else { cap(k) };
            DenseTensor::random(&[dl, d, dr], &mut rng)
        })
        .collect();
    let mps = MatrixProductState::new(
        sites,
        Boundary::Open {
            left: vec![c(1.0)],
            right: vec![c(1.0)],
        },
    )
    .expect("consistent random chain");
    canonicalize(&mps, Form::Mixed(0)).expect("open chain")
}

fn canonical_error(mps: &MatrixProductState, lo: usize, hi: usize) -> f64 {
    // sites < lo left-isometric, sites > hi right-isometric
    let mut e: f64 = 0.0;
    for k in 0..lo {
        e = e.max(left_iso_error(&mps.sites[k]));
    }
    for k in hi + 1..mps.len() {
        e = e.max(right_iso_error(&mps.sites[k]));
    }
    e
}

fn energy_with_envs(mps: &MatrixProductState, mpo: &MatrixProductOperator) -> f64 {
    let (l, r) = boundary_vectors(mps).expect("open chain");
    let mut env = left_edge(mpo, l);
    for k in 0..mps.len() {
        env = extend_left(&env, &mps.sites[k], &mpo.sites[k]);
    }
    let redge = right_edge(mpo, r);
    let mut e = c(0.0);
    for (a, m) in env.iter().enumerate() {
        e += (m.transpose() * &redge[a]).trace();
    }
    e.re / crate::mps::norm_squared(mps)
}

/// ⟨ψ|H|ψ⟩/⟨ψ|ψ⟩ for an open-boundary MPS.
pub fn mpo_energy(mps: &MatrixProductState, mpo: &MatrixProductOperator) -> Result<f64, GroundError> {
    if mps.len() != mpo.len() {
        return Err(GroundError::ShapeMismatch("MPO and MPS lengths".into()));
    }
    boundary_vectors(mps)?;
    Ok(energy_with_envs(mps, mpo))
}

fn check_input(mpo: &MatrixProductOperator, config: &DmrgConfig) {
    assert!(config.bond_dim > 0, "bond dimension must be positive");
    assert!(config.max_sweeps > 0, "at least one sweep");
    assert!(!mpo.is_empty(), "empty MPO");
}

/// Single-site DMRG from a seeded random state of bond dimension
/// `config.bond_dim`.
pub fn dmrg1_run(mpo: &MatrixProductOperator, config: &DmrgConfig) -> (MatrixProductState, SweepReport) {
    check_input(mpo, config);
    let n = mpo.len();
    let d = mpo.phys_dim(0);
    let mut mps = random_start(n, d, config.bond_dim, config.seed);
    let mut envs = Envs::new(&mps, mpo).expect("open chain");
    for k in (1..n).rev() {
        envs.update_right(&mps, mpo, k);
    }
    let mut report = SweepReport::default();
    let mut prev = f64::INFINITY;
    for _ in 0..config.max_sweeps {
        let order: Vec<(usize, bool)> = (0..n.saturating_sub(1))
            .map(|k| (k, true))
            .chain((1..n).rev().map(|k| (k, false)))
            .chain(if n == 1 { Some((0, true)) } else { None })
            .collect();
        for (k, rightwards) in order {
            let s = mps.sites[k].shape().to_vec();
            let shape = [s[0], s[1], s[2]];
            let le = envs.left[k].as_ref().unwrap();
            let re = envs.right[k + 1].as_ref().unwrap();
            let x0 = vector_of(&mps.sites[k]);
            let (e, v) = solve_local(x0.len(), &x0, config.eigensolver_tolerance, |x| {
                apply_one_site(le, &mpo.sites[k], re, shape, x)
            });
            mps.sites[k] = DenseTensor::new(s.clone(), v.normalize().as_slice().to_vec()).unwrap();
            report.energies.push(e);
            report.max_canonical_error = report.max_canonical_error.max(canonical_error(&mps, k, k));
            if n > 1 {
                if rightwards {
                    left_step(&mut mps.sites, k);
                    envs.update_left(&mps, mpo, k);
                } else {
                    right_step(&mut mps.sites, k);
                    envs.update_right(&mps, mpo, k);
                }
            }
        }
        let e = *report.energies.last().unwrap();
        report.sweep_energies.push(e);
        if (prev - e).abs() < config.energy_tolerance {
            report.converged = true;
            break;
        }
        prev = e;
    }
    mps.canonical = Canonical::Mixed(0);
    (mps, report)
}

/// Two-site DMRG; bonds grow from `config.initial_bond` up to
/// `config.bond_dim`.
pub fn dmrg2_run(mpo: &MatrixProductOperator, config: &DmrgConfig) -> (MatrixProductState, SweepReport) {
    check_input(mpo, config);
    let n = mpo.len();
    let d = mpo.phys_dim(0);
    if n < 2 {
        return dmrg1_run(mpo, config);
    }
    let start = config.initial_bond.min(config.bond_dim).max(1);
    let mut mps = random_start(n, d, start, config.seed);
    let mut envs = Envs::new(&mps, mpo).expect("open chain");
    for k in (1..n).rev() {
        envs.update_right(&mps, mpo, k);
    }
    let opts = SvdOptions {
        max_rank: Some(config.bond_dim),
        threshold: 1e-14,
    };
    let mut report = SweepReport::default();
    let mut prev = f64::INFINITY;
    for _ in 0..config.max_sweeps {
        let order: Vec<(usize, bool)> = (0..n - 1)
            .map(|k| (k, true))
            .chain((0..n - 1).rev().map(|k| (k, false)))
            .collect();
        for (k, rightwards) in order {
            let (a, b) = (&mps.sites[k], &mps.sites[k + 1]);
            let (dl, d1, d2, dr) = (a.shape()[0], a.shape()[1], b.shape()[1], b.shape()[2]);
            let theta = crate::tensor::contract(a, &[2], b, &[0]).unwrap();
            let shape = [dl, d1, d2, dr];
            let le = envs.left[k].as_ref().unwrap();
            let re = envs.right[k + 2].as_ref().unwrap();
            let x0 = vector_of(&theta);
            let (e, v) = solve_local(x0.len(), &x0, config.eigensolver_tolerance, |x| {
                apply_two_site(le, &mpo.sites[k], &mpo.sites[k + 1], re, shape, x)
            });
            let theta = DenseTensor::new(shape.to_vec(), v.normalize().as_slice().to_vec()).unwrap();
            let split = svd_split(&theta, &[0, 1], opts).unwrap();
            report.truncation_errors.push(split.discarded_weight);
            let kept: f64 = split.singular_values.iter().map(|s| s * s).sum::<f64>().sqrt();
            let sv: Vec<C64> = split.singular_values.iter().map(|s| c(s / kept)).collect();
            let r = split.rank();
            if rightwards {
                mps.sites[k] = split.left_isometry;
                let mut right = split.right_isometry;
                scale_leg0(&mut right, &sv);
                mps.sites[k + 1] = right;
            } else {
                let mut left = split.left_isometry;
                scale_last(&mut left, &sv);
                mps.sites[k] = left;
                mps.sites[k + 1] = split.right_isometry;
            }
            debug_assert_eq!(mps.sites[k].shape()[2], r);
            report.energies.push(e);
            let center = if rightwards { k + 1 } else { k };
            report.max_canonical_error = report.max_canonical_error.max(canonical_error(&mps, center, center));
            if rightwards {
                envs.update_left(&mps, mpo, k);
            } else {
                envs.update_right(&mps, mpo, k + 1);
            }
        }
        let e = *report.energies.last().unwrap();
        report.sweep_energies.push(e);
        if (prev - e).abs() < config.energy_tolerance {
            report.converged = true;
            break;
        }
        prev = e;
    }
    mps.canonical = Canonical::Mixed(0);
    (mps, report)
}

fn scale_leg0(t: &mut DenseTensor, s: &[C64]) {
    let r = t.shape()[0];
    for (k, v) in t.data_mut().iter_mut().enumerate() {
        *v *= s[k % r];
    }
}

fn scale_last(t: &mut DenseTensor, s: &[C64]) {
    let r = *t.shape().last().unwrap();
    let block = t.len() / r;
    for (k, v) in t.data_mut().iter_mut().enumerate() {
        *v *= s[k / block];
    }
}

// TEBD

/// Bond terms of `-j Σ XX - h Σ Z` with each field split evenly between the
/// two bonds touching a site (the chain ends keep their full field).
pub fn tfim_bond_terms(n: usize, j: f64, h: f64) -> Vec<Mat> {
    let x = pauli('X').unwrap();
    let z = pauli('Z').unwrap();
    let i2 = pauli('I').unwrap();
    (0..n - 1)
        .map(|k| {
            let hl = if k == 0 { h } else { h / 2.0 };
            let hr = if k == n - 2 { h } else { h / 2.0 };
            -kron(&x, &x) * c(j) - kron(&z, &i2) * c(hl) - kron(&i2, &z) * c(hr)
        })
        .collect()
}

/// ⟨ψ|Σ_k h_k|ψ⟩/⟨ψ|ψ⟩ for two-site terms `h_k` on bonds `(k, k+1)`.
pub fn bond_energy(mps: &MatrixProductState, terms: &[Mat]) -> f64 {
    let n = mps.len();
    let (l, r) = boundary_vectors(mps).expect("open chain");
    let lv = DVector::from_column_slice(l);
    let rv = DVector::from_column_slice(r);
    let mut lefts = vec![lv.conjugate() * lv.transpose()];
    for k in 0..n {
        let am = site_mats(&mps.sites[k]);
        let prev = &lefts[k];
        lefts.push(am.iter().map(|a| a.adjoint() * prev * a).sum());
    }
    let mut rights = vec![Mat::zeros(0, 0); n + 1];
    rights[n] = rv.conjugate() * rv.transpose();
    for k in (0..n).rev() {
        let am = site_mats(&mps.sites[k]);
        rights[k] = am.iter().map(|a| a.conjugate() * &rights[k + 1] * a.transpose()).sum();
    }
    let norm = (lefts[n].transpose() * &rights[n]).trace();
    let mut e = c(0.0);
    for (k, h) in terms.iter().enumerate() {
        let a = site_mats(&mps.sites[k]);
        let b = site_mats(&mps.sites[k + 1]);
        let (d1, d2) = (a.len(), b.len());
        let theta: Vec<Mat> = (0..d1 * d2).map(|q| &a[q / d2] * &b[q % d2]).collect();
        for p in 0..d1 * d2 {
            let mut ht = Mat::zeros(theta[0].nrows(), theta[0].ncols());
            for (q, t) in theta.iter().enumerate() {
                let w = h[(p, q)];
                if w != c(0.0) {
                    ht += t * w;
                }
            }
            e += (theta[p].adjoint() * &lefts[k] * ht * rights[k + 2].transpose()).trace();
        }
    }
    (e / norm).re
}

fn plus_state(n: usize, d: usize) -> MatrixProductState {
    let amp = c(1.0 / (d as f64).sqrt());
    let site = DenseTensor::from_fn(&[1, d, 1], |_| amp);
    MatrixProductState::new(
        vec![site; n],
        Boundary::Open {
            left: vec![c(1.0)],
            right: vec![c(1.0)],
        },
    )
    .expect("product state")
}

/// Imaginary-time TEBD from the uniform superposition |+…+⟩.
pub fn tebd_imaginary(terms: &[Mat], n: usize, config: &TebdConfig) -> (MatrixProductState, SweepReport) {
    let d = (terms[0].nrows() as f64).sqrt().round() as usize;
    tebd_imaginary_from(terms, plus_state(n, d), config)
}

/// Imaginary-time TEBD from a given open-boundary state. Each step applies
/// `exp(-τ h_k)` on the bonds (0,1), (2,3), … and then on (1,2), (3,4), …,
/// trims every split to `config.bond_dim` and renormalises.
pub fn tebd_imaginary_from(
    terms: &[Mat],
    initial: MatrixProductState,
    config: &TebdConfig,
) -> (MatrixProductState, SweepReport) {
    assert!(config.tau > 0.0, "tau must be positive");
    let n = initial.len();
    assert_eq!(terms.len(), n - 1, "one term per bond");
    let gates: Vec<Mat> = terms.iter().map(|h| expm_hermitian(h, c(-config.tau))).collect();
    let mut mps = canonicalize(&initial, Form::Mixed(0)).expect("open chain");
    let opts = SvdOptions {
        max_rank: Some(config.bond_dim),
        threshold: config.trunc_threshold,
    };
    let mut report = SweepReport::default();
    let odd: Vec<usize> = (0..n - 1).step_by(2).collect();
    let even: Vec<usize> = (1..n - 1).step_by(2).collect();
    for _ in 0..config.steps {
        // centre at 0; odd layer left to right
        let mut center = 0;
        for &k in &odd {
            while center < k {
                left_step(&mut mps.sites, center);
                center += 1;
            }
            let err = apply_gate(&mut mps, k, &gates[k], opts, true);
            report.truncation_errors.push(err);
            center = k + 1;
        }
        // even layer right to left
        while center < n - 1 {
            left_step(&mut mps.sites, center);
            center += 1;
        }
        for &k in even.iter().rev() {
            while center > k + 1 {
                right_step(&mut mps.sites, center);
                center -= 1;
            }
            let err = apply_gate(&mut mps, k, &gates[k], opts, false);
            report.truncation_errors.push(err);
            center = k;
        }
        while center > 0 {
            right_step(&mut mps.sites, center);
            center -= 1;
        }
        let nrm = mps.sites[0].norm();
        mps.sites[0] = mps.sites[0].scale(c(1.0 / nrm));
        report.energies.push(bond_energy(&mps, terms));
    }
    mps.canonical = Canonical::Mixed(0);
    report.converged = true;
    (mps, report)
}

/// Applies a two-site gate with the orthogonality centre on the bond and
/// moves the centre to `k + 1` (rightwards) or `k`.
fn apply_gate(mps: &mut MatrixProductState, k: usize, gate: &Mat, opts: SvdOptions, rightwards: bool) -> f64 {
    let a = &mps.sites[k];
    let b = &mps.sites[k + 1];
    let (dl, d1, d2, dr) = (a.shape()[0], a.shape()[1], b.shape()[1], b.shape()[2]);
    let theta = crate::tensor::contract(a, &[2], b, &[0]).unwrap();
    let new = DenseTensor::from_fn(&[dl, d1, d2, dr], |ix| {
        let p = ix[1] * d2 + ix[2];
        let mut s = c(0.0);
        for j in 0..d1 {
            for m in 0..d2 {
                let g = gate[(p, j * d2 + m)];
                if g != c(0.0) {
                    s += g * theta.get(&[ix[0], j, m, ix[3]]);
                }
            }
        }
        s
    });
    let total: f64 = new.norm().powi(2);
    let split = svd_split(&new, &[0, 1], opts).unwrap();
    let sv: Vec<C64> = split.singular_values.iter().map(|&s| c(s)).collect();
    if rightwards {
        mps.sites[k] = split.left_isometry;
        let mut right = split.right_isometry;
        scale_leg0(&mut right, &sv);
        mps.sites[k + 1] = right;
    } else {
        let mut left = split.left_isometry;
        scale_last(&mut left, &sv);
        mps.sites[k] = left;
        mps.sites[k + 1] = split.right_isometry;
    }
    if total > 0.0 {
        split.discarded_weight / total
    } else {
        0.0
    }
}
