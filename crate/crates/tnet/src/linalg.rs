//! Small dense linear-algebra helpers over `DMatrix<C64>`.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64 as C64;

pub type Mat = DMatrix<C64>;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn eye(n: usize) -> Mat {
    Mat::identity(n, n)
}

pub fn mat(rows: usize, cols: usize, row_major: &[C64]) -> Mat {
    Mat::from_row_slice(rows, cols, row_major)
}

pub fn real_mat(rows: usize, cols: usize, row_major: &[f64]) -> Mat {
    Mat::from_row_iterator(rows, cols, row_major.iter().map(|&x| c(x)))
}

/// Pauli matrix by name (`I`, `X`, `Y`, `Z`).
pub fn pauli(name: char) -> Option<Mat> {
    let i = C64::new(0.0, 1.0);
    let z = c(0.0);
    let o = c(1.0);
    Some(match name {
        'I' => eye(2),
        'X' => mat(2, 2, &[z, o, o, z]),
        'Y' => mat(2, 2, &[z, -i, i, z]),
        'Z' => mat(2, 2, &[o, z, z, -o]),
        _ => return None,
    })
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

/// Kronecker product of a list of matrices, first factor most significant.
pub fn kron_all(ms: &[Mat]) -> Mat {
    let mut acc = Mat::identity(1, 1);
    for m in ms {
        acc = acc.kronecker(m);
    }
    acc
}

/// SVD with singular values in descending order.
///
/// Equal singular values keep the order produced by the factorization.
pub fn svd(m: &Mat) -> (Mat, Vec<f64>, Mat) {
    let (u, s, vt) = checked_svd(m);
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap_or(std::cmp::Ordering::Equal));
    let u2 = Mat::from_fn(u.nrows(), order.len(), |r, k| u[(r, order[k])]);
    let vt2 = Mat::from_fn(order.len(), vt.ncols(), |k, col| vt[(order[k], col)]);
    let s2 = order.iter().map(|&k| s[k]).collect();
    (u2, s2, vt2)
}

fn raw_svd(m: &Mat) -> (Mat, Vec<f64>, Mat) {
    let svd = SVD::new_unordered(m.clone(), true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    (u, svd.singular_values.iter().copied().collect(), vt)
}

fn reconstruction_error(m: &Mat, (u, s, vt): &(Mat, Vec<f64>, Mat)) -> f64 {
    let mut us = u.clone();
    for (j, x) in s.iter().enumerate() {
        us.column_mut(j).scale_mut(*x);
    }
    max_abs(&(us * vt - m))
}

/// The complex SVD occasionally returns a wrong factorization when a leading
/// row is (nearly) real, so the result is checked and, if needed, recomputed
/// on the adjoint or after a fixed unitary rotation of the rows.
fn checked_svd(m: &Mat) -> (Mat, Vec<f64>, Mat) {
    let tol = 1e-13 * (1.0 + max_abs(m)) * (m.nrows() + m.ncols()) as f64;
    let first = raw_svd(m);
    let mut best_err = reconstruction_error(m, &first);
    if best_err <= tol {
        return first;
    }
    let mut best = first;
    let (ua, sa, vta) = raw_svd(&m.adjoint());
    let cand = (vta.adjoint(), sa, ua.adjoint());
    let err = reconstruction_error(m, &cand);
    if err < best_err {
        best = cand;
        best_err = err;
    }
    if best_err <= tol {
        return best;
    }
    let n = m.nrows();
    let q = Mat::from_fn(n, n, |a, b| C64::from_polar(1.0 / (n as f64).sqrt(), 2.0 * std::f64::consts::PI * (a * b) as f64 / n as f64 + 0.37 * a as f64));
    let (uq, sq, vtq) = raw_svd(&(&q * m));
    let cand = (q.adjoint() * uq, sq, vtq);
    if reconstruction_error(m, &cand) < best_err {
        best = cand;
    }
    best
}

pub fn singular_values(m: &Mat) -> Vec<f64> {
    svd(m).1
}

/// Hermitian eigendecomposition with ascending eigenvalues.
pub fn eigh(m: &Mat) -> (Vec<f64>, Mat) {
    let h = (m + m.adjoint()) * c(0.5);
    let e = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        e.eigenvalues[a]
            .partial_cmp(&e.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals = order.iter().map(|&k| e.eigenvalues[k]).collect();
    let vecs = Mat::from_fn(m.nrows(), order.len(), |r, k| e.eigenvectors[(r, order[k])]);
    (vals, vecs)
}

/// Eigenvalues of a general square matrix, sorted by descending modulus.
pub fn eigvals(m: &Mat) -> Vec<C64> {
    let n = m.nrows();
    if n == 0 {
        return vec![];
    }
    let mut v = schur_diagonal(m);
    v.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap_or(std::cmp::Ordering::Equal));
    v
}

/// Diagonal of a Schur form. The unshifted iteration can stall for a long
/// time on spectra symmetric under λ → -λ, so the iteration count is capped
/// and the problem retried with a complex shift, then with a rotated basis.
fn schur_diagonal(m: &Mat) -> Vec<C64> {
    use nalgebra::linalg::Schur;
    let n = m.nrows();
    let max_iter = 200 * n.max(4);
    let diag = |t: &Mat, shift: C64| (0..n).map(|k| t[(k, k)] - shift).collect::<Vec<C64>>();
    if let Some(s) = Schur::try_new(m.clone(), f64::EPSILON, max_iter) {
        return diag(&s.unpack().1, c(0.0));
    }
    let scale = max_abs(m).max(1e-300);
    let shift = C64::new(0.137, 0.291) * scale;
    let id = Mat::identity(n, n);
    if let Some(s) = Schur::try_new(m + &id * shift, f64::EPSILON, max_iter) {
        return diag(&s.unpack().1, shift);
    }
    let q = Mat::from_fn(n, n, |a, b| C64::from_polar(1.0 / (n as f64).sqrt(), 2.0 * std::f64::consts::PI * (a * b) as f64 / n as f64 + 0.61 * b as f64));
    let rotated = &q * m * q.adjoint() + id * shift;
    diag(&Schur::new(rotated).unpack().1, shift)
}

/// Unit vectors spanning the numerical kernel of `m - lambda`.
///
/// Returns at least one vector (the least singular direction).
pub fn kernel(m: &Mat, lambda: C64, tol: f64) -> Vec<DVector<C64>> {
    let n = m.nrows();
    let shifted = m - Mat::identity(n, n) * lambda;
    let (_, s, vt) = svd(&shifted);
    let scale = s.first().copied().unwrap_or(0.0).max(1.0);
    let mut out = Vec::new();
    for k in (0..n).rev() {
        if s[k] <= tol * scale || out.is_empty() {
            out.push(vt.row(k).adjoint());
        } else {
            break;
        }
    }
    out
}

/// Nearest unitary in Frobenius norm (the unitary factor of the polar decomposition).
pub fn polar_unitary(m: &Mat) -> Mat {
    let (u, _, vt) = svd(m);
    u * vt
}

/// Square root of a Hermitian positive semidefinite matrix.
pub fn sqrtm_psd(m: &Mat) -> Mat {
    let (vals, vecs) = eigh(m);
    let d = DVector::from_iterator(vals.len(), vals.iter().map(|&x| c(x.max(0.0).sqrt())));
    &vecs * Mat::from_diagonal(&d) * vecs.adjoint()
}

/// `exp(z * h)` for Hermitian `h` and complex `z`.
pub fn expm_hermitian(h: &Mat, z: C64) -> Mat {
    let (vals, vecs) = eigh(h);
    let d = DVector::from_iterator(vals.len(), vals.iter().map(|&x| (z * x).exp()));
    &vecs * Mat::from_diagonal(&d) * vecs.adjoint()
}

pub fn is_unitary(m: &Mat, tol: f64) -> bool {
    m.is_square() && max_abs(&(m.adjoint() * m - eye(m.nrows()))) <= tol
}

pub fn is_hermitian(m: &Mat, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.adjoint())) <= tol
}

/// Largest entry modulus.
pub fn max_abs(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn trace(m: &Mat) -> C64 {
    m.diagonal().sum()
}

/// Spin-s operators (Sx, Sy, Sz) in the basis m = s, s-1, ..., -s.
pub fn spin_ops(two_s: usize) -> (Mat, Mat, Mat) {
    let s = two_s as f64 / 2.0;
    let d = two_s + 1;
    let m = |k: usize| s - k as f64;
    let mut sp = Mat::zeros(d, d);
    for k in 1..d {
        // <m+1| S+ |m> with |m> = basis k, |m+1> = basis k-1
        let mk = m(k);
        sp[(k - 1, k)] = c((s * (s + 1.0) - mk * (mk + 1.0)).sqrt());
    }
    let sm = sp.adjoint();
    let sx = (&sp + &sm) * c(0.5);
    let sy = (&sp - &sm) * C64::new(0.0, -0.5);
    let sz = Mat::from_diagonal(&DVector::from_iterator(d, (0..d).map(|k| c(m(k)))));
    (sx, sy, sz)
}

/// Matrix with orthonormal columns (`rows ≥ cols`), from the QR factor of a
/// random complex matrix.
pub fn random_isometry<R: rand::Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Mat {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let m = Mat::from_fn(rows, cols, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let q = m.qr().q();
    q.columns(0, cols).into_owned()
}

pub fn random_unitary<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Mat {
    random_isometry(n, n, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svd_with_nearly_real_leading_row() {
        // the unchecked factorization of this matrix is off by 5e-2
        let m = mat(
            2,
            2,
            &[
                C64::new(-0.01383393817335623, -5.204170427930421e-18),
                c(0.7674433865828525),
                C64::new(0.005473422161092402, -0.016651658934085767),
                C64::new(0.18913804140711296, -0.5754100568671745),
            ],
        );
        let (u, s, vt) = svd(&m);
        let rebuilt = &u * Mat::from_diagonal(&DVector::from_iterator(2, s.iter().map(|&x| c(x)))) * &vt;
        assert!(max_abs(&(rebuilt - &m)) < 1e-13);
        assert!((s[0] - 0.9776703349600835).abs() < 1e-12);
    }

    #[test]
    fn pauli_algebra() {
        let x = pauli('X').unwrap();
        let y = pauli('Y').unwrap();
        let z = pauli('Z').unwrap();
        let i = C64::new(0.0, 1.0);
        assert!(max_abs(&(&x * &y - &z * i)) < 1e-15);
        assert!(pauli('Q').is_none());
    }

    #[test]
    fn spin_one_commutators() {
        let (sx, sy, sz) = spin_ops(2);
        let i = C64::new(0.0, 1.0);
        assert!(max_abs(&(&sx * &sy - &sy * &sx - &sz * i)) < 1e-14);
        let cas = &sx * &sx + &sy * &sy + &sz * &sz;
        assert!(max_abs(&(cas - eye(3) * c(2.0))) < 1e-14);
    }

    #[test]
    fn general_eigenvalues() {
        let m = real_mat(2, 2, &[0.0, 1.0, -2.0, -3.0]);
        let ev = eigvals(&m);
        assert!((ev[0] - c(-2.0)).norm() < 1e-12);
        assert!((ev[1] - c(-1.0)).norm() < 1e-12);
    }

    #[test]
    fn polar_and_sqrt() {
        let m = real_mat(2, 2, &[2.0, 1.0, 0.0, 3.0]);
        assert!(is_unitary(&polar_unitary(&m), 1e-12));
        let p = &m * m.adjoint();
        let r = sqrtm_psd(&p);
        assert!(max_abs(&(&r * &r - &p)) < 1e-12);
    }
}
