//! Exact-diagonalization oracles: sums of local product operators acting on
//! dense state vectors, and a Lanczos solver for the lowest eigenpair.
//!
//! State vectors use Kronecker order with site 0 most significant, the same
//! convention as [`crate::mps::to_vector`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::linalg::{c, eigh, pauli, Mat};

/// Product operator `coef * ⊗_k ops[k]` with identities elsewhere.
#[derive(Clone, Debug)]
pub struct ProductTerm {
    pub coef: C64,
    pub ops: Vec<(usize, Mat)>,
}

impl ProductTerm {
    pub fn new(coef: C64, ops: Vec<(usize, Mat)>) -> Self {
        ProductTerm { coef, ops }
    }

    /// Product of Pauli matrices, e.g. `pauli_string(-1.0, &[(0,'X'), (1,'X')])`.
    pub fn pauli_string(coef: f64, ops: &[(usize, char)]) -> Self {
        let ops = ops
            .iter()
            .map(|&(k, p)| (k, pauli(p).expect("Pauli name")))
            .collect();
        ProductTerm { coef: c(coef), ops }
    }
}

/// Hamiltonian given as an explicit sum of product terms on `n` sites of
/// local dimension `d`.
#[derive(Clone, Debug)]
pub struct OpSum {
    pub n: usize,
    pub d: usize,
    pub terms: Vec<ProductTerm>,
}

impl OpSum {
    pub fn new(n: usize, d: usize) -> Self {
        OpSum { n, d, terms: Vec::new() }
    }

    pub fn push(&mut self, term: ProductTerm) {
        self.terms.push(term);
    }

    pub fn dim(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        let mut out = DVector::zeros(v.len());
        for t in &self.terms {
            let mut w = v.clone();
            for (site, op) in &t.ops {
                w = apply_local(&w, op, *site, self.n, self.d);
            }
            out.axpy(t.coef, &w, c(1.0));
        }
        out
    }

    /// Dense matrix; intended for small systems only.
    pub fn to_dense(&self) -> Mat {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut e = DVector::zeros(dim);
            e[col] = c(1.0);
            m.set_column(col, &self.apply(&e));
        }
        m
    }

    /// Lowest eigenvalue by Lanczos from a fixed start vector.
    pub fn ground_energy(&self) -> f64 {
        self.ground_state().0
    }

    pub fn ground_state(&self) -> (f64, DVector<C64>) {
        let dim = self.dim();
        let v0 = DVector::from_fn(dim, |k, _| {
            C64::new(1.0 + 0.37 * ((k * 7919) % 101) as f64 / 101.0, 0.1 * ((k * 31) % 7) as f64)
        });
        lanczos_lowest(|x| self.apply(x), &v0, 1e-11, 300)
    }
}

/// Applies a d×d operator on one site of an n-site state vector.
pub fn apply_local(v: &DVector<C64>, op: &Mat, site: usize, n: usize, d: usize) -> DVector<C64> {
    let stride = d.pow((n - 1 - site) as u32);
    let block = stride * d;
    let mut out = DVector::zeros(v.len());
    let mut base = 0;
    while base < v.len() {
        for off in 0..stride {
            for i in 0..d {
                let mut acc = c(0.0);
                for j in 0..d {
                    let o = op[(i, j)];
                    if o != c(0.0) {
                        acc += o * v[base + j * stride + off];
                    }
                }
                out[base + i * stride + off] = acc;
            }
        }
        base += block;
    }
    out
}

/// Lowest eigenpair of a Hermitian operator given by its action.
///
/// Lanczos with full reorthogonalization, restarted from the current Ritz
/// vector when the Krylov space reaches `max_krylov` without meeting the
/// residual tolerance `tol`.
pub fn lanczos_lowest<F>(apply: F, v0: &DVector<C64>, tol: f64, max_krylov: usize) -> (f64, DVector<C64>)
where
    F: Fn(&DVector<C64>) -> DVector<C64>,
{
    let dim = v0.len();
    let max_k = max_krylov.min(dim).max(1);
    let mut start = v0.normalize();
    let mut best = (f64::INFINITY, start.clone());
    for _restart in 0..50 {
        let mut basis: Vec<DVector<C64>> = vec![start.clone()];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut done = false;
        loop {
            let k = basis.len() - 1;
            let mut w = apply(&basis[k]);
            let a = basis[k].dotc(&w).re;
            alphas.push(a);
            for _ in 0..2 {
                for b in &basis {
                    let p = b.dotc(&w);
                    w.axpy(-p, b, c(1.0));
                }
            }
            let beta = w.norm();
            let (theta, y) = tridiag_lowest(&alphas, &betas);
            let resid = beta * y[y.len() - 1].abs();
            if resid <= tol || beta < 1e-13 || basis.len() >= max_k {
                let mut ritz = DVector::zeros(dim);
                for (coef, b) in y.iter().zip(&basis) {
                    ritz.axpy(c(*coef), b, c(1.0));
                }
                let ritz = ritz.normalize();
                best = (theta, ritz.clone());
                if resid <= tol || beta < 1e-13 || basis.len() == dim {
                    done = true;
                }
                start = ritz;
                break;
            }
            betas.push(beta);
            basis.push(w / c(beta));
        }
        if done {
            break;
        }
    }
    best
}

fn tridiag_lowest(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let k = alphas.len();
    let mut t = Mat::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = c(alphas[i]);
        if i + 1 < k {
            t[(i, i + 1)] = c(betas[i]);
            t[(i + 1, i)] = c(betas[i]);
        }
    }
    let (vals, vecs) = eigh(&t);
    // the tridiagonal matrix is real symmetric, so the eigenvector can be made real
    let col = vecs.column(0);
    let anchor = col.iter().fold(c(0.0), |acc, z| if z.norm() > acc.norm() { *z } else { acc });
    let phase = if anchor.norm() > 0.0 { anchor.conj() / anchor.norm() } else { c(1.0) };
    (vals[0], col.iter().map(|z| (z * phase).re).collect())
}

/// `-j Σ X_i X_{i+1} - h Σ Z_i` on an open chain.
pub fn tfim(n: usize, j: f64, h: f64) -> OpSum {
    let mut s = OpSum::new(n, 2);
    for i in 0..n.saturating_sub(1) {
        s.push(ProductTerm::pauli_string(-j, &[(i, 'X'), (i + 1, 'X')]));
    }
    for i in 0..n {
        s.push(ProductTerm::pauli_string(-h, &[(i, 'Z')]));
    }
    s
}

/// `-Σ_α j_α Σ α_i α_{i+1} - h Σ Z_i` on an open chain.
pub fn heisenberg(n: usize, jx: f64, jy: f64, jz: f64, h: f64) -> OpSum {
    let mut s = OpSum::new(n, 2);
    for i in 0..n.saturating_sub(1) {
        for (p, jp) in [('X', jx), ('Y', jy), ('Z', jz)] {
            s.push(ProductTerm::pauli_string(-jp, &[(i, p), (i + 1, p)]));
        }
    }
    for i in 0..n {
        s.push(ProductTerm::pauli_string(-h, &[(i, 'Z')]));
    }
    s
}

/// `-j Σ Z_{i-1} X_i Z_{i+1} - h Σ X_i` on an open chain.
pub fn cluster(n: usize, j: f64, h: f64) -> OpSum {
    let mut s = OpSum::new(n, 2);
    for i in 0..n.saturating_sub(2) {
        s.push(ProductTerm::pauli_string(-j, &[(i, 'Z'), (i + 1, 'X'), (i + 2, 'Z')]));
    }
    for i in 0..n {
        s.push(ProductTerm::pauli_string(-h, &[(i, 'X')]));
    }
    s
}

/// Sum of the same two-site operator (d²×d², Kronecker order) on every bond.
pub fn from_bond_terms(bond_terms: &[Mat], n: usize, d: usize) -> OpSum {
    let mut s = OpSum::new(n, d);
    for (i, h) in bond_terms.iter().enumerate() {
        // expand h = Σ h[(a b),(a' b')] |a><a'| ⊗ |b><b'|
        for a in 0..d {
            for ap in 0..d {
                let mut ea = Mat::zeros(d, d);
                ea[(a, ap)] = c(1.0);
                let mut rest = Mat::zeros(d, d);
                for b in 0..d {
                    for bp in 0..d {
                        rest[(b, bp)] = h[(a * d + b, ap * d + bp)];
                    }
                }
                if rest.iter().any(|z| z.norm() > 0.0) {
                    s.push(ProductTerm::new(c(1.0), vec![(i, ea.clone()), (i + 1, rest)]));
                }
            }
        }
    }
    s
}
