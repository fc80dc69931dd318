//! Matrix product states.
//!
//! Site tensors have legs `(left bond, physical, right bond)`; the matrix for
//! physical value `i` is `A_i[a, b] = T[a, i, b]`. Dense vectors produced here
//! use the Kronecker convention with site 0 as the most significant digit.

use crate::linalg::{c, eigh, eigvals, eye, kernel, kron, max_abs, svd, Mat};
use crate::tensor::{DenseTensor, C64};
use nalgebra::DVector;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MpsError {
    #[error("dense form would have {0} entries")]
    TooLarge(usize),
    #[error("operation requires open boundary conditions")]
    PeriodicUnsupported,
    #[error("gauge matrix has no left inverse")]
    Singular,
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("region too large: {0}")]
    RegionTooLarge(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Boundary {
    /// amplitude = vLᵀ A…A vR
    Open { left: Vec<C64>, right: Vec<C64> },
    /// amplitude = Tr(A…A)
    Periodic,
    /// amplitude = Tr(A…A M)
    PeriodicWithInsertion(Mat),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Canonical {
    None,
    Left,
    Right,
    Mixed(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    Left,
    Right,
    Mixed(usize),
}

#[derive(Clone, Debug)]
pub struct MatrixProductState {
    pub sites: Vec<DenseTensor>,
    pub boundary: Boundary,
    pub canonical: Canonical,
}

/// Rank-3 site tensor from the matrices `A_i`.
pub fn site_from_matrices(ms: &[Mat]) -> DenseTensor {
    let (dl, dr) = ms[0].shape();
    DenseTensor::from_fn(&[dl, ms.len(), dr], |ix| ms[ix[1]][(ix[0], ix[2])])
}

/// The matrices `A_i` of a rank-3 site tensor.
pub fn site_matrices(t: &DenseTensor) -> Vec<Mat> {
    let s = t.shape();
    (0..s[1])
        .map(|i| Mat::from_fn(s[0], s[2], |a, b| t.get(&[a, i, b])))
        .collect()
}

fn ones(n: usize) -> Vec<C64> {
    vec![c(1.0); n]
}

impl MatrixProductState {
    pub fn new(sites: Vec<DenseTensor>, boundary: Boundary) -> Result<Self, MpsError> {
        if sites.is_empty() {
            return Err(MpsError::ShapeMismatch("no sites".into()));
        }
        for (k, t) in sites.iter().enumerate() {
            if t.rank() != 3 {
                return Err(MpsError::ShapeMismatch(format!("site {} has rank {}", k, t.rank())));
            }
        }
        let n = sites.len();
        for k in 0..n - 1 {
            if sites[k].shape()[2] != sites[k + 1].shape()[0] {
                return Err(MpsError::ShapeMismatch(format!("bond {} mismatch", k)));
            }
        }
        let dl = sites[0].shape()[0];
        let dr = sites[n - 1].shape()[2];
        match &boundary {
            Boundary::Open { left, right } => {
                if left.len() != dl || right.len() != dr {
                    return Err(MpsError::ShapeMismatch("boundary vectors".into()));
                }
            }
            Boundary::Periodic => {
                if dl != dr {
                    return Err(MpsError::ShapeMismatch("periodic bond".into()));
                }
            }
            Boundary::PeriodicWithInsertion(m) => {
                if m.shape() != (dr, dl) {
                    return Err(MpsError::ShapeMismatch("insertion operator".into()));
                }
            }
        }
        Ok(Self {
            sites,
            boundary,
            canonical: Canonical::None,
        })
    }

    /// Uniform chain of `n` copies of `site`.
    pub fn uniform(site: DenseTensor, n: usize, boundary: Boundary) -> Result<Self, MpsError> {
        Self::new(vec![site; n], boundary)
    }

    /// Seeded random open chain with the given physical and bond dimensions.
    pub fn random<R: Rng + ?Sized>(n: usize, d: usize, bond: usize, rng: &mut R) -> Self {
        let mut sites = Vec::with_capacity(n);
        for k in 0..n {
            let dl = if k == 0 { 1 } else { bond };
            let dr = if k == n - 1 { 1 } else { bond };
            sites.push(DenseTensor::random(&[dl, d, dr], rng));
        }
        Self::new(
            sites,
            Boundary::Open {
                left: ones(1),
                right: ones(1),
            },
        )
        .expect("consistent shapes")
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn phys_dim(&self, k: usize) -> usize {
        self.sites[k].shape()[1]
    }

    /// Bond dimensions to the right of each site.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.sites.iter().map(|t| t.shape()[2]).collect()
    }

    pub fn max_bond(&self) -> usize {
        self.sites
            .iter()
            .map(|t| t.shape()[0].max(t.shape()[2]))
            .max()
            .unwrap_or(1)
    }

    pub fn matrices(&self, k: usize) -> Vec<Mat> {
        site_matrices(&self.sites[k])
    }

    pub fn is_open(&self) -> bool {
        matches!(self.boundary, Boundary::Open { .. })
    }

    /// Total dimension of the dense state.
    pub fn hilbert_dim(&self) -> usize {
        (0..self.len()).map(|k| self.phys_dim(k)).fold(1usize, |a, d| a.saturating_mul(d))
    }
}

// analytic states

/// |0…0> with bond dimension 1.
pub fn make_product(n: usize) -> MatrixProductState {
    let a = site_from_matrices(&[Mat::from_element(1, 1, c(1.0)), Mat::zeros(1, 1)]);
    MatrixProductState::uniform(
        a,
        n,
        Boundary::Open {
            left: ones(1),
            right: ones(1),
        },
    )
    .expect("valid")
}

/// |0…0> with the padded 2×2 matrices A0 = diag(1, 0), A1 = 0, traced.
pub fn make_product_padded(n: usize) -> MatrixProductState {
    let a0 = crate::linalg::real_mat(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    let a = site_from_matrices(&[a0, Mat::zeros(2, 2)]);
    MatrixProductState::uniform(a, n, Boundary::Periodic).expect("valid")
}

/// Unnormalised W state, Tr(A…A X) with A0 = I, A1 = [[0,1],[0,0]].
pub fn make_w(n: usize) -> MatrixProductState {
    let a1 = crate::linalg::real_mat(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let a = site_from_matrices(&[eye(2), a1]);
    let x = crate::linalg::pauli('X').unwrap();
    MatrixProductState::uniform(a, n, Boundary::PeriodicWithInsertion(x)).expect("valid")
}

pub fn ghz_site() -> DenseTensor {
    let a0 = crate::linalg::real_mat(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    let a1 = crate::linalg::real_mat(2, 2, &[0.0, 0.0, 0.0, 1.0]);
    site_from_matrices(&[a0, a1])
}

/// Unnormalised GHZ state |0…0> + |1…1> as a traced chain.
pub fn make_ghz(n: usize) -> MatrixProductState {
    MatrixProductState::uniform(ghz_site(), n, Boundary::Periodic).expect("valid")
}

/// GHZ with open boundary vectors (1, 1) on both ends.
pub fn make_ghz_open(n: usize) -> MatrixProductState {
    MatrixProductState::uniform(
        ghz_site(),
        n,
        Boundary::Open {
            left: ones(2),
            right: ones(2),
        },
    )
    .expect("valid")
}

/// AKLT site tensor from projecting two spin-1/2 halves of neighbouring
/// singlets onto spin 1. Physical basis is m = +1, 0, -1.
pub fn aklt_site() -> DenseTensor {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let ap = crate::linalg::real_mat(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let a0 = crate::linalg::real_mat(2, 2, &[-h, 0.0, 0.0, h]);
    let am = crate::linalg::real_mat(2, 2, &[0.0, 0.0, -1.0, 0.0]);
    site_from_matrices(&[ap, a0, am])
}

pub fn make_aklt(n: usize, boundary: Boundary) -> Result<MatrixProductState, MpsError> {
    MatrixProductState::uniform(aklt_site(), n, boundary)
}

/// Blocked cluster-state tensor on qubit pairs. Physical index p = a + 2b
/// where a is the first qubit of the pair and b the second.
pub fn cluster_site() -> DenseTensor {
    let m = |v: [f64; 4]| crate::linalg::real_mat(2, 2, &v);
    let a00 = m([1.0, 0.0, 1.0, 0.0]);
    let a01 = m([0.0, 1.0, 0.0, 1.0]);
    let a10 = m([1.0, 0.0, -1.0, 0.0]);
    let a11 = m([0.0, -1.0, 0.0, 1.0]);
    // p = a + 2b: p=0 -> (0,0), p=1 -> (1,0), p=2 -> (0,1), p=3 -> (1,1)
    site_from_matrices(&[a00, a10, a01, a11])
}

/// Periodic cluster state on `2 * n_pairs` qubits (unnormalised).
pub fn make_cluster(n_pairs: usize) -> MatrixProductState {
    MatrixProductState::uniform(cluster_site(), n_pairs, Boundary::Periodic).expect("valid")
}

// dense conversion

const DENSE_LIMIT: usize = 1 << 20;

/// Amplitude vector in Kronecker order (site 0 most significant).
pub fn to_vector(mps: &MatrixProductState) -> Result<DVector<C64>, MpsError> {
    let total = mps.hilbert_dim();
    if total > DENSE_LIMIT {
        return Err(MpsError::TooLarge(total));
    }
    let d0 = mps.sites[0].shape()[0];
    // r[(a, p, b)] stored as vector over p of d0 x db matrices
    let mut states: Vec<Mat> = vec![eye(d0)];
    for k in 0..mps.len() {
        let ams = mps.matrices(k);
        let mut next = Vec::with_capacity(states.len() * ams.len());
        for s in &states {
            for a in &ams {
                next.push(s * a);
            }
        }
        states = next;
    }
    let amps = states.iter().map(|m| match &mps.boundary {
        Boundary::Open { left, right } => {
            let l = DVector::from_column_slice(left);
            let r = DVector::from_column_slice(right);
            (l.transpose() * m * r)[(0, 0)]
        }
        Boundary::Periodic => m.trace(),
        Boundary::PeriodicWithInsertion(x) => (m * x).trace(),
    });
    Ok(DVector::from_iterator(total, amps))
}

/// Dense tensor with one leg per site (first site fastest in storage).
pub fn to_dense(mps: &MatrixProductState) -> Result<DenseTensor, MpsError> {
    let v = to_vector(mps)?;
    let n = mps.len();
    let rev: Vec<usize> = (0..n).rev().map(|k| mps.phys_dim(k)).collect();
    let t = DenseTensor::new(rev, v.as_slice().to_vec()).expect("sizes agree");
    let perm: Vec<usize> = (0..n).rev().collect();
    Ok(t.permute(&perm).expect("valid permutation"))
}

// transfer matrices

/// Σ_ij O_ij A_i ⊗ conj(A_j), Kronecker row index a·D + a'.
pub fn transfer_with(a: &DenseTensor, op: Option<&Mat>) -> Mat {
    let ms = site_matrices(a);
    let (dl, dr) = ms[0].shape();
    let mut e = Mat::zeros(dl * dl, dr * dr);
    match op {
        None => {
            for m in &ms {
                e += kron(m, &m.map(|z| z.conj()));
            }
        }
        Some(o) => {
            for (i, mi) in ms.iter().enumerate() {
                for (j, mj) in ms.iter().enumerate() {
                    if o[(i, j)].norm() != 0.0 {
                        e += kron(mi, &mj.map(|z| z.conj())) * o[(i, j)];
                    }
                }
            }
        }
    }
    e
}

/// Transfer matrix whose products give ⟨ψ|O|ψ⟩: Σ_ij O_ij A_j ⊗ conj(A_i).
pub fn expectation_transfer(a: &DenseTensor, op: Option<&Mat>) -> Mat {
    match op {
        None => transfer_with(a, None),
        Some(o) => transfer_with(a, Some(&o.transpose())),
    }
}

#[derive(Clone, Debug)]
pub struct TransferAnalysis {
    pub matrix: Mat,
    /// Eigenvalues sorted by decreasing modulus.
    pub spectrum: Vec<C64>,
    pub leading_eigenvalue: C64,
    /// Right fixed point Σ A ρ A† = λ ρ, Hermitian PSD with unit trace.
    pub fixed_point_rho: Mat,
    /// Left fixed point Σ A† l A = λ l, Hermitian PSD with unit trace.
    pub left_fixed_point: Mat,
    pub second_modulus: f64,
    pub injective: bool,
}

fn unvec(v: &DVector<C64>, d: usize) -> Mat {
    Mat::from_fn(d, d, |a, b| v[a * d + b])
}

fn psd_from_eigvec(v: &DVector<C64>, d: usize) -> Mat {
    let x = unvec(v, d);
    let mut h = (&x + x.adjoint()) * c(0.5);
    let tr = h.trace().re;
    if tr.abs() < 1e-14 {
        h = &x * x.adjoint();
    } else if tr < 0.0 {
        h = -h;
    }
    let tr = h.trace().re;
    if tr.abs() > 0.0 {
        h /= c(tr);
    }
    h
}

/// Left map X ↦ Σ A_i† X A_i in the same vectorisation as [`transfer_with`].
pub fn left_map(a: &DenseTensor) -> Mat {
    let ms = site_matrices(a);
    let (dl, dr) = ms[0].shape();
    let mut l = Mat::zeros(dr * dr, dl * dl);
    for m in &ms {
        // (A† X A)[b, b'] = Σ conj(A[a,b]) X[a,a'] A[a',b']
        l += kron(&m.adjoint(), &m.transpose());
    }
    l
}

fn min_eig_ratio(m: &Mat) -> f64 {
    let (vals, _) = eigh(m);
    let max = vals.last().copied().unwrap_or(0.0);
    if max <= 0.0 {
        return 0.0;
    }
    vals[0] / max
}

/// Spectral analysis of a uniform site tensor.
pub fn analyze_transfer(a: &DenseTensor, op: Option<&Mat>) -> TransferAnalysis {
    let matrix = transfer_with(a, op);
    let e = transfer_with(a, None);
    let dl = a.shape()[0];
    let square = a.shape()[0] == a.shape()[2];
    let spectrum = if square { eigvals(&e) } else { vec![] };
    let leading = spectrum.first().copied().unwrap_or(c(0.0));
    let second_modulus = spectrum.get(1).map(|z| z.norm()).unwrap_or(0.0);
    let (rho, left, injective) = if square && leading.norm() > 0.0 {
        let kr = kernel(&e, leading, 1e-9);
        let rho = psd_from_eigvec(&kr[0], dl);
        let lm = left_map(a);
        let kl = kernel(&lm, leading.conj(), 1e-9);
        let left = psd_from_eigvec(&kl[0], dl);
        let simple = second_modulus < leading.norm() * (1.0 - 1e-6);
        let full = min_eig_ratio(&rho) > 1e-10 && min_eig_ratio(&left) > 1e-10;
        (rho, left, simple && full)
    } else {
        (Mat::zeros(dl, dl), Mat::zeros(dl, dl), false)
    };
    TransferAnalysis {
        matrix,
        spectrum,
        leading_eigenvalue: leading,
        fixed_point_rho: rho,
        left_fixed_point: left,
        second_modulus,
        injective,
    }
}

/// Analysis of the site tensor at `site`.
pub fn transfer_matrix(mps: &MatrixProductState, site: usize, op: Option<&Mat>) -> Result<TransferAnalysis, MpsError> {
    if site >= mps.len() {
        return Err(MpsError::OutOfRange(format!("site {}", site)));
    }
    Ok(analyze_transfer(&mps.sites[site], op))
}

/// Rescales a uniform tensor so the transfer matrix has spectral radius 1.
pub fn normalize_uniform(a: &DenseTensor) -> DenseTensor {
    let lead = eigvals(&transfer_with(a, None))
        .first()
        .map(|z| z.norm())
        .unwrap_or(1.0);
    a.scale(c(1.0 / lead.sqrt()))
}

/// ξ = -1/ln|λ2/λ1|; zero without a second eigenvalue, infinite when degenerate.
pub fn correlation_length_of(a: &DenseTensor) -> f64 {
    let t = analyze_transfer(a, None);
    let l1 = t.leading_eigenvalue.norm();
    if t.spectrum.len() < 2 || t.second_modulus <= 1e-300 || l1 == 0.0 {
        return 0.0;
    }
    let r = t.second_modulus / l1;
    if r >= 1.0 - 1e-10 {
        return f64::INFINITY;
    }
    -1.0 / r.ln()
}

pub fn correlation_length(mps: &MatrixProductState) -> f64 {
    correlation_length_of(&mps.sites[0])
}

// expectation values

/// Boundary closure for a ket chain paired with a bra chain.
fn closure(ket: &Boundary, bra: &Boundary, dl_ket: usize, dl_bra: usize, dr_ket: usize, dr_bra: usize, t: &Mat) -> C64 {
    // t has rows (a, a') on the left bond and columns (b, b') on the right bond
    let left = |bd: &Boundary, a: usize, b: usize| -> C64 {
        match bd {
            Boundary::Open { left, right } => left[a] * right[b],
            Boundary::Periodic => {
                if a == b {
                    c(1.0)
                } else {
                    c(0.0)
                }
            }
            Boundary::PeriodicWithInsertion(m) => m[(b, a)],
        }
    };
    let mut s = c(0.0);
    for a in 0..dl_ket {
        for a2 in 0..dl_bra {
            for b in 0..dr_ket {
                for b2 in 0..dr_bra {
                    let w = left(ket, a, b) * left(bra, a2, b2).conj();
                    if w.norm() != 0.0 {
                        s += w * t[(a * dl_bra + a2, b * dr_bra + b2)];
                    }
                }
            }
        }
    }
    s
}

/// Mixed transfer Σ_ij O_ij ket_j ⊗ conj(bra_i).
fn mixed_transfer(ket: &DenseTensor, bra: &DenseTensor, op: Option<&Mat>) -> Mat {
    let km = site_matrices(ket);
    let bm = site_matrices(bra);
    let (kl, kr) = km[0].shape();
    let (bl, br) = bm[0].shape();
    let mut e = Mat::zeros(kl * bl, kr * br);
    for i in 0..bm.len() {
        for j in 0..km.len() {
            let w = match op {
                None => {
                    if i == j {
                        c(1.0)
                    } else {
                        continue;
                    }
                }
                Some(o) => o[(i, j)],
            };
            if w.norm() != 0.0 {
                e += kron(&km[j], &bm[i].map(|z| z.conj())) * w;
            }
        }
    }
    e
}

/// ⟨bra| Π_k O_k |ket⟩ with operators at the listed sites.
pub fn sandwich(bra: &MatrixProductState, ket: &MatrixProductState, ops: &[(usize, &Mat)]) -> Result<C64, MpsError> {
    let n = ket.len();
    if bra.len() != n {
        return Err(MpsError::ShapeMismatch("chains differ in length".into()));
    }
    for &(s, o) in ops {
        if s >= n {
            return Err(MpsError::OutOfRange(format!("site {}", s)));
        }
        let d = ket.phys_dim(s);
        if o.shape() != (d, d) {
            return Err(MpsError::ShapeMismatch(format!("operator at site {}", s)));
        }
    }
    let op_at = |k: usize| ops.iter().find(|(s, _)| *s == k).map(|(_, o)| *o);
    let both_open = ket.is_open() && bra.is_open();
    if both_open {
        let (kl, kr) = match &ket.boundary {
            Boundary::Open { left, right } => (left, right),
            _ => unreachable!(),
        };
        let (bl, br) = match &bra.boundary {
            Boundary::Open { left, right } => (left, right),
            _ => unreachable!(),
        };
        let mut v = DVector::from_iterator(
            kl.len() * bl.len(),
            kl.iter().flat_map(|a| bl.iter().map(move |b| a * b.conj())),
        )
        .transpose();
        for k in 0..n {
            v = v * mixed_transfer(&ket.sites[k], &bra.sites[k], op_at(k));
        }
        let r = DVector::from_iterator(
            kr.len() * br.len(),
            kr.iter().flat_map(|a| br.iter().map(move |b| a * b.conj())),
        );
        return Ok((v * r)[(0, 0)]);
    }
    let mut t = mixed_transfer(&ket.sites[0], &bra.sites[0], op_at(0));
    for k in 1..n {
        t = t * mixed_transfer(&ket.sites[k], &bra.sites[k], op_at(k));
    }
    Ok(closure(
        &ket.boundary,
        &bra.boundary,
        ket.sites[0].shape()[0],
        bra.sites[0].shape()[0],
        ket.sites[n - 1].shape()[2],
        bra.sites[n - 1].shape()[2],
        &t,
    ))
}

pub fn overlap(bra: &MatrixProductState, ket: &MatrixProductState) -> Result<C64, MpsError> {
    sandwich(bra, ket, &[])
}

pub fn norm_squared(mps: &MatrixProductState) -> f64 {
    overlap(mps, mps).expect("same chain").re
}

/// ⟨ψ|Π O_k|ψ⟩ / ⟨ψ|ψ⟩.
pub fn expectation(mps: &MatrixProductState, ops: &[(usize, &Mat)]) -> Result<C64, MpsError> {
    Ok(sandwich(mps, mps, ops)? / c(norm_squared(mps)))
}

/// ⟨O1_i O2_j⟩ on the finite chain for i < j.
pub fn correlator(mps: &MatrixProductState, op1: &Mat, op2: &Mat, i: usize, j: usize) -> Result<C64, MpsError> {
    if i >= j || j >= mps.len() {
        return Err(MpsError::OutOfRange(format!("sites ({}, {}) on {} sites", i, j, mps.len())));
    }
    expectation(mps, &[(i, op1), (j, op2)])
}

/// ⟨O1_i O2_j⟩ - ⟨O1_i⟩⟨O2_j⟩.
pub fn connected_correlator(mps: &MatrixProductState, op1: &Mat, op2: &Mat, i: usize, j: usize) -> Result<C64, MpsError> {
    let both = correlator(mps, op1, op2, i, j)?;
    Ok(both - expectation(mps, &[(i, op1)])? * expectation(mps, &[(j, op2)])?)
}

/// Connected correlator at separation `dist` in the infinite uniform chain.
pub fn correlator_infinite(a: &DenseTensor, op1: &Mat, op2: &Mat, dist: usize) -> C64 {
    let an = normalize_uniform(a);
    let t = analyze_transfer(&an, None);
    let d = an.shape()[0];
    let e = transfer_with(&an, None);
    let e1 = expectation_transfer(&an, Some(op1));
    let e2 = expectation_transfer(&an, Some(op2));
    // left vector from l (rows a·D+a'), right vector from ρ
    let lvec = DVector::from_iterator(d * d, (0..d * d).map(|k| t.left_fixed_point[(k / d, k % d)])).transpose();
    let rvec = DVector::from_iterator(d * d, (0..d * d).map(|k| t.fixed_point_rho[(k / d, k % d)]));
    let norm = (&lvec * &rvec)[(0, 0)];
    let one = |m: &Mat| (&lvec * m * &rvec)[(0, 0)] / norm;
    let mut mid = eye(d * d);
    for _ in 1..dist {
        mid *= &e;
    }
    let both = (&lvec * &e1 * mid * &e2 * &rvec)[(0, 0)] / norm;
    both - one(&e1) * one(&e2)
}

// canonical forms

fn absorb_boundary(mps: &MatrixProductState) -> Result<MatrixProductState, MpsError> {
    let (left, right) = match &mps.boundary {
        Boundary::Open { left, right } => (left.clone(), right.clone()),
        _ => return Err(MpsError::PeriodicUnsupported),
    };
    let mut sites = mps.sites.clone();
    let n = sites.len();
    let first = &sites[0];
    let (dl, d, dr) = (first.shape()[0], first.shape()[1], first.shape()[2]);
    if dl != 1 || left[0] != c(1.0) {
        sites[0] = DenseTensor::from_fn(&[1, d, dr], |ix| {
            (0..dl).map(|a| left[a] * first.get(&[a, ix[1], ix[2]])).sum()
        });
    }
    let last = sites[n - 1].clone();
    let (dl, d, dr) = (last.shape()[0], last.shape()[1], last.shape()[2]);
    if dr != 1 || right[0] != c(1.0) {
        sites[n - 1] = DenseTensor::from_fn(&[dl, d, 1], |ix| {
            (0..dr).map(|b| last.get(&[ix[0], ix[1], b]) * right[b]).sum()
        });
    }
    Ok(MatrixProductState {
        sites,
        boundary: Boundary::Open {
            left: ones(1),
            right: ones(1),
        },
        canonical: Canonical::None,
    })
}

/// Left-orthonormalises site k, pushing the remainder into site k + 1.
pub(crate) fn left_step(sites: &mut [DenseTensor], k: usize) {
    let s = sites[k].shape().to_vec();
    let m = sites[k].to_matrix(2);
    let qr = m.qr();
    let (q, r) = (qr.q(), qr.r());
    let nb = q.ncols();
    sites[k] = DenseTensor::new(vec![s[0], s[1], nb], q.as_slice().to_vec()).unwrap();
    let nx = &sites[k + 1];
    let ns = nx.shape().to_vec();
    let prod = r * nx.to_matrix(1);
    sites[k + 1] = DenseTensor::new(vec![nb, ns[1], ns[2]], prod.as_slice().to_vec()).unwrap();
}

/// Right-orthonormalises site k, pushing the remainder into site k - 1.
pub(crate) fn right_step(sites: &mut [DenseTensor], k: usize) {
    let s = sites[k].shape().to_vec();
    let m = sites[k].to_matrix(1);
    let qr = m.adjoint().qr();
    let (q, r) = (qr.q(), qr.r());
    let nb = q.ncols();
    let b = q.adjoint();
    sites[k] = DenseTensor::new(vec![nb, s[1], s[2]], b.as_slice().to_vec()).unwrap();
    let pv = &sites[k - 1];
    let ps = pv.shape().to_vec();
    let prod = pv.to_matrix(2) * r.adjoint();
    sites[k - 1] = DenseTensor::new(vec![ps[0], ps[1], nb], prod.as_slice().to_vec()).unwrap();
}

fn normalize_site(t: &mut DenseTensor) {
    let n = t.norm();
    if n > 0.0 {
        *t = t.scale(c(1.0 / n));
    }
}

/// Brings an open chain to left, right or mixed canonical form; the state is
/// normalised, its ray unchanged.
pub fn canonicalize(mps: &MatrixProductState, form: Form) -> Result<MatrixProductState, MpsError> {
    let mut out = absorb_boundary(mps)?;
    let n = out.len();
    let center = match form {
        Form::Left => n - 1,
        Form::Right => 0,
        Form::Mixed(c) => {
            if c >= n {
                return Err(MpsError::OutOfRange(format!("center {}", c)));
            }
            c
        }
    };
    for k in 0..center {
        left_step(&mut out.sites, k);
    }
    for k in (center + 1..n).rev() {
        right_step(&mut out.sites, k);
    }
    normalize_site(&mut out.sites[center]);
    out.canonical = match form {
        Form::Left => Canonical::Left,
        Form::Right => Canonical::Right,
        Form::Mixed(c) => Canonical::Mixed(c),
    };
    Ok(out)
}

/// Largest deviation of Σ A† A from the identity at site k.
pub fn left_iso_error(t: &DenseTensor) -> f64 {
    let m = t.to_matrix(2);
    max_abs(&(m.adjoint() * &m - eye(m.ncols())))
}

/// Largest deviation of Σ A A† from the identity at site k.
pub fn right_iso_error(t: &DenseTensor) -> f64 {
    let m = t.to_matrix(1);
    max_abs(&(&m * m.adjoint() - eye(m.nrows())))
}

/// Pseudo-inverse via SVD; errors when `m` has no left inverse.
pub fn left_inverse(m: &Mat) -> Result<Mat, MpsError> {
    if m.nrows() < m.ncols() {
        return Err(MpsError::Singular);
    }
    let (u, s, vt) = svd(m);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 || s.last().copied().unwrap_or(0.0) <= 1e-12 * smax {
        return Err(MpsError::Singular);
    }
    let sinv = Mat::from_diagonal(&DVector::from_iterator(s.len(), s.iter().map(|&x| c(1.0 / x))));
    Ok(vt.adjoint() * sinv * u.adjoint())
}

/// Inserts m⁺m = I on the bond between `site` and `site + 1`:
/// A_site ← A_site m⁺ and A_{site+1} ← m A_{site+1}. For a traced chain the
/// bond after the last site wraps to site 0.
pub fn gauge_transform(mps: &MatrixProductState, site: usize, m: &Mat) -> Result<MatrixProductState, MpsError> {
    let n = mps.len();
    let wrap = matches!(mps.boundary, Boundary::Periodic) && site == n - 1;
    if site >= n || (site == n - 1 && !wrap) {
        return Err(MpsError::OutOfRange(format!("bond after site {}", site)));
    }
    let next = (site + 1) % n;
    let bond = mps.sites[site].shape()[2];
    if m.ncols() != bond {
        return Err(MpsError::ShapeMismatch(format!(
            "gauge matrix has {} columns for bond {}",
            m.ncols(),
            bond
        )));
    }
    let minv = left_inverse(m)?;
    let mut sites = mps.sites.clone();
    let s = sites[site].shape().to_vec();
    let left = sites[site].to_matrix(2) * &minv;
    sites[site] = DenseTensor::new(vec![s[0], s[1], m.nrows()], left.as_slice().to_vec()).unwrap();
    let s = sites[next].shape().to_vec();
    let right = m * sites[next].to_matrix(1);
    sites[next] = DenseTensor::new(vec![m.nrows(), s[1], s[2]], right.as_slice().to_vec()).unwrap();
    Ok(MatrixProductState {
        sites,
        boundary: mps.boundary.clone(),
        canonical: Canonical::None,
    })
}

// entanglement

/// Schmidt values across the bond before site `cut` (1 ≤ cut < n), normalised.
pub fn schmidt_values(mps: &MatrixProductState, cut: usize) -> Result<Vec<f64>, MpsError> {
    if !mps.is_open() {
        return Err(MpsError::PeriodicUnsupported);
    }
    if cut == 0 || cut >= mps.len() {
        return Err(MpsError::OutOfRange(format!("cut {}", cut)));
    }
    let can = canonicalize(mps, Form::Mixed(cut))?;
    let (_, s, _) = svd(&can.sites[cut].to_matrix(1));
    let tot: f64 = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(s.iter().map(|x| x / tot).collect())
}

/// Rényi entropy (natural log) from Schmidt values; alpha = 1 is von Neumann.
pub fn renyi_from_schmidt(s: &[f64], alpha: f64) -> f64 {
    let smax = s.iter().copied().fold(0.0, f64::max);
    let p: Vec<f64> = s
        .iter()
        .filter(|&&x| x > 1e-12 * smax)
        .map(|x| x * x)
        .collect();
    if alpha == 0.0 {
        (p.len() as f64).ln()
    } else if alpha == 1.0 {
        -p.iter().map(|&q| q * q.ln()).sum::<f64>()
    } else {
        p.iter().map(|&q| q.powf(alpha)).sum::<f64>().ln() / (1.0 - alpha)
    }
}

pub fn entanglement_entropy(mps: &MatrixProductState, cut: usize, alpha: f64) -> Result<f64, MpsError> {
    if alpha < 0.0 {
        return Err(MpsError::OutOfRange(format!("alpha {}", alpha)));
    }
    Ok(renyi_from_schmidt(&schmidt_values(mps, cut)?, alpha))
}

/// Reduced density matrix of a contiguous region in Kronecker order.
pub fn reduced_density(mps: &MatrixProductState, start: usize, len: usize) -> Result<Mat, MpsError> {
    let n = mps.len();
    if len == 0 || start + len > n {
        return Err(MpsError::OutOfRange(format!("region {}..{}", start, start + len)));
    }
    let dim: usize = (start..start + len).map(|k| mps.phys_dim(k)).product();
    if len > 10 || dim > 1024 {
        return Err(MpsError::RegionTooLarge(format!("{} sites, dimension {}", len, dim)));
    }
    // environment on the complement: rows (c, c') after the region, cols (a, a') before it
    let dl = mps.sites[start].shape()[0];
    let dr = mps.sites[start + len - 1].shape()[2];
    let env: Mat = match &mps.boundary {
        Boundary::Open { left, right } => {
            let mut lv = DVector::from_iterator(
                left.len() * left.len(),
                left.iter().flat_map(|a| left.iter().map(move |b| a * b.conj())),
            )
            .transpose();
            for k in 0..start {
                lv = lv * transfer_with(&mps.sites[k], None);
            }
            let mut rv = DVector::from_iterator(
                right.len() * right.len(),
                right.iter().flat_map(|a| right.iter().map(move |b| a * b.conj())),
            );
            for k in (start + len..n).rev() {
                rv = transfer_with(&mps.sites[k], None) * rv;
            }
            &rv * &lv
        }
        bd => {
            let mut t = eye(dr * dr);
            for k in start + len..n {
                t *= transfer_with(&mps.sites[k], None);
            }
            if let Boundary::PeriodicWithInsertion(m) = bd {
                t *= kron(m, &m.map(|z| z.conj()));
            }
            for k in 0..start {
                t *= transfer_with(&mps.sites[k], None);
            }
            t
        }
    };
    // ket block K[p] (dl x dr) for each region configuration p
    let mut blocks: Vec<Mat> = vec![eye(dl)];
    for k in start..start + len {
        let ams = mps.matrices(k);
        let mut next = Vec::with_capacity(blocks.len() * ams.len());
        for b in &blocks {
            for a in &ams {
                next.push(b * a);
            }
        }
        blocks = next;
    }
    // Y[p][(a', c')] = Σ_{a,c} env[(c,c'),(a,a')] K[p][a,c]
    let ys: Vec<Mat> = blocks
        .iter()
        .map(|k| {
            Mat::from_fn(dl, dr, |a2, c2| {
                let mut s = c(0.0);
                for a in 0..dl {
                    for cc in 0..dr {
                        s += env[(cc * dr + c2, a * dl + a2)] * k[(a, cc)];
                    }
                }
                s
            })
        })
        .collect();
    let mut rho = Mat::from_fn(dim, dim, |p, q| {
        let y = &ys[p];
        let k = &blocks[q];
        y.iter().zip(k.iter()).map(|(a, b)| a * b.conj()).sum()
    });
    let tr = rho.trace();
    rho /= tr;
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn basis(n: usize, k: usize) -> DVector<C64> {
        let mut v = DVector::zeros(n);
        v[k] = c(1.0);
        v
    }

    #[test]
    fn product_states() {
        assert_eq!(to_vector(&make_product(1)).unwrap(), basis(2, 0));
        assert_eq!(to_vector(&make_product(3)).unwrap(), basis(8, 0));
        assert_eq!(to_vector(&make_product_padded(3)).unwrap(), basis(8, 0));
    }

    #[test]
    fn w_states() {
        let v = to_vector(&make_w(2)).unwrap();
        assert_eq!(v, basis(4, 1) + basis(4, 2));
        let v = to_vector(&make_w(3)).unwrap();
        assert_eq!(v, basis(8, 4) + basis(8, 2) + basis(8, 1));
    }

    #[test]
    fn ghz_forms() {
        let v = to_vector(&make_ghz(4)).unwrap();
        assert_eq!(v, basis(16, 0) + basis(16, 15));
        assert_eq!(to_vector(&make_ghz_open(4)).unwrap(), v);
        let t = to_dense(&make_ghz(3)).unwrap();
        assert_eq!(t.shape(), &[2, 2, 2]);
        assert_eq!(t.get(&[1, 1, 1]), c(1.0));
    }

    #[test]
    fn dense_limit() {
        assert!(matches!(to_vector(&make_product(21)), Err(MpsError::TooLarge(_))));
    }

    #[test]
    fn product_transfer() {
        let t = transfer_matrix(&make_product(3), 0, None).unwrap();
        assert_eq!(t.matrix.shape(), (1, 1));
        assert!(t.injective);
        assert_eq!(correlation_length(&make_product(3)), 0.0);
    }

    #[test]
    fn ghz_transfer() {
        let t = analyze_transfer(&ghz_site(), None);
        let mods: Vec<f64> = t.spectrum.iter().map(|z| z.norm()).collect();
        assert!((mods[0] - 1.0).abs() < 1e-12 && (mods[1] - 1.0).abs() < 1e-12);
        assert!(mods[2] < 1e-12 && mods[3] < 1e-12);
        assert!(!t.injective);
        assert!(correlation_length(&make_ghz(4)).is_infinite());
    }

    #[test]
    fn aklt_transfer() {
        let a = normalize_uniform(&aklt_site());
        let t = analyze_transfer(&a, None);
        assert!((t.spectrum[0] - c(1.0)).norm() < 1e-12);
        for z in &t.spectrum[1..] {
            assert!((z - c(-1.0 / 3.0)).norm() < 1e-10);
        }
        assert!(t.injective);
        assert!((correlation_length_of(&a) - 1.0 / 3f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn canonical_isometries() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = MatrixProductState::random(6, 2, 3, &mut rng);
        let l = canonicalize(&m, Form::Left).unwrap();
        for s in &l.sites {
            assert!(left_iso_error(s) < 1e-10);
        }
        let r = canonicalize(&m, Form::Right).unwrap();
        for s in &r.sites {
            assert!(right_iso_error(s) < 1e-10);
        }
        let mx = canonicalize(&m, Form::Mixed(3)).unwrap();
        for s in &mx.sites[..3] {
            assert!(left_iso_error(s) < 1e-10);
        }
        for s in &mx.sites[4..] {
            assert!(right_iso_error(s) < 1e-10);
        }
        let ov = overlap(&m, &mx).unwrap().norm();
        assert!((ov - norm_squared(&m).sqrt()).abs() < 1e-10 * ov);
        assert!(canonicalize(&make_ghz(3), Form::Left).is_err());
    }

    #[test]
    fn ghz_schmidt() {
        let s = schmidt_values(&make_ghz_open(4), 2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s[0] - h).abs() < 1e-12 && (s[1] - h).abs() < 1e-12);
        for alpha in [0.0, 1.0, 2.0] {
            let e = entanglement_entropy(&make_ghz_open(4), 2, alpha).unwrap();
            assert!((e - 2f64.ln()).abs() < 1e-12);
        }
        assert!(entanglement_entropy(&make_product(4), 1, 1.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn ghz_reduced() {
        let r = reduced_density(&make_ghz(4), 1, 2).unwrap();
        let mut want = Mat::zeros(4, 4);
        want[(0, 0)] = c(0.5);
        want[(3, 3)] = c(0.5);
        assert!(max_abs(&(r - want)) < 1e-12);
        let r = reduced_density(&make_product(3), 1, 1).unwrap();
        assert!((r[(0, 0)] - c(1.0)).norm() < 1e-12);
        assert!(matches!(
            reduced_density(&make_product(12), 0, 11),
            Err(MpsError::RegionTooLarge(_))
        ));
    }

    #[test]
    fn gauge_identity_and_embedding() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = MatrixProductState::random(4, 2, 2, &mut rng);
        let g = gauge_transform(&m, 1, &eye(2)).unwrap();
        assert!(to_vector(&g).unwrap().iter().zip(to_vector(&m).unwrap().iter()).all(|(a, b)| (a - b).norm() < 1e-14));
        let emb = Mat::from_fn(4, 2, |r, col| if r == col { c(1.0) } else { c(0.3 * r as f64) });
        let g = gauge_transform(&m, 1, &emb).unwrap();
        assert_eq!(g.sites[1].shape()[2], 4);
        let diff = to_vector(&g).unwrap() - to_vector(&m).unwrap();
        assert!(diff.norm() < 1e-12);
        assert!(matches!(gauge_transform(&m, 1, &Mat::zeros(2, 2)), Err(MpsError::Singular)));
    }
}
