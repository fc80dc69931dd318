//! Bell states, teleportation, purification and Stinespring dilation.
//!
//! Multi-party vectors use the Kronecker convention: the first subsystem is
//! the most significant digit of the flat index.

use crate::linalg::{c, eigh, eye, is_hermitian, is_unitary, kron, max_abs, sqrtm_psd, trace, Mat};
use nalgebra::DVector;
use num_complex::Complex64 as C64;
use thiserror::Error;

pub type Vector = DVector<C64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QinfoError {
    #[error("operator is not square")]
    NonSquare,
    #[error("unknown Pauli label {0:?}")]
    InvalidPauli(String),
    #[error("operator is not unitary")]
    NonUnitary,
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("Kraus operators do not satisfy sum K K^dagger = I")]
    IncompleteKraus,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn parse(s: &str) -> Result<Self, QinfoError> {
        match s.trim() {
            "I" | "i" => Ok(Pauli::I),
            "X" | "x" => Ok(Pauli::X),
            "Y" | "y" => Ok(Pauli::Y),
            "Z" | "z" => Ok(Pauli::Z),
            other => Err(QinfoError::InvalidPauli(other.to_string())),
        }
    }

    pub fn matrix(self) -> Mat {
        let ch = match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        crate::linalg::pauli(ch).expect("known Pauli")
    }
}

/// Maximally entangled state sum_k |kk> / sqrt(d).
pub fn omega(d: usize) -> Vector {
    let mut v = Vector::zeros(d * d);
    let s = 1.0 / (d as f64).sqrt();
    for k in 0..d {
        v[k * d + k] = c(s);
    }
    v
}

/// (op ⊗ I)|Ω>.
pub fn vectorize(op: &Mat) -> Result<Vector, QinfoError> {
    if !op.is_square() {
        return Err(QinfoError::NonSquare);
    }
    let d = op.nrows();
    Ok(kron(op, &eye(d)) * omega(d))
}

/// Clock-and-shift Pauli X^a Z^b on a qudit of dimension d.
pub fn qudit_pauli(d: usize, a: usize, b: usize) -> Mat {
    let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / d as f64);
    let mut shift = Mat::zeros(d, d);
    let mut clock = Mat::zeros(d, d);
    for k in 0..d {
        shift[((k + 1) % d, k)] = c(1.0);
        clock[(k, k)] = w.powu(k as u32);
    }
    shift.pow(a as u32) * clock.pow(b as u32)
}

fn check_vec(psi: &Vector, d: usize) -> Result<(), QinfoError> {
    if psi.len() != d {
        return Err(QinfoError::DimensionMismatch(format!(
            "state of length {} for dimension {}",
            psi.len(),
            d
        )));
    }
    Ok(())
}

/// Projects systems (0,1) of `state` (d^3 entries) onto `bra_pair` and
/// returns the unnormalised state of system 2.
fn project_first_pair(state: &Vector, bra_pair: &Vector, d: usize) -> Vector {
    let mut out = Vector::zeros(d);
    for a in 0..d {
        for b in 0..d {
            let w = bra_pair[a * d + b].conj();
            if w.norm() == 0.0 {
                continue;
            }
            for k in 0..d {
                out[k] += w * state[(a * d + b) * d + k];
            }
        }
    }
    out
}

/// Teleports with a generic resource pair and measurement outcome `p`.
fn teleport_with(psi: &Vector, resource: &Vector, p: &Mat, correction: &Mat) -> Vector {
    let d = psi.len();
    let state = kron(&Mat::from_column_slice(d, 1, psi.as_slice()), &Mat::from_column_slice(d * d, 1, resource.as_slice()));
    let state = Vector::from_column_slice(state.as_slice());
    let outcome = kron(p, &eye(d)) * omega(d);
    correction * project_first_pair(&state, &outcome, d)
}

/// Qubit teleportation for Bell outcome Ω(p) followed by correction p; returns ψ/2.
pub fn teleport(psi: &Vector, p: Pauli) -> Result<Vector, QinfoError> {
    check_vec(psi, 2)?;
    let pm = p.matrix();
    Ok(teleport_with(psi, &omega(2), &pm, &pm))
}

/// Qudit teleportation with outcome X^a Z^b; returns ψ/d.
pub fn teleport_qudit(psi: &Vector, a: usize, b: usize) -> Vector {
    let d = psi.len();
    let pm = qudit_pauli(d, a % d, b % d);
    teleport_with(psi, &omega(d), &pm, &pm)
}

/// Gate teleportation through the resource Ω(uᵀ); correction u p u† gives u·ψ/2.
pub fn gate_teleport(psi: &Vector, u: &Mat, p: Pauli) -> Result<Vector, QinfoError> {
    check_vec(psi, 2)?;
    if u.shape() != (2, 2) || !is_unitary(u, 1e-10) {
        return Err(QinfoError::NonUnitary);
    }
    let resource = vectorize(&u.transpose())?;
    let pm = p.matrix();
    let corr = u * &pm * u.adjoint();
    Ok(teleport_with(psi, &resource, &pm, &corr))
}

fn check_density(rho: &Mat) -> Result<(), QinfoError> {
    if !rho.is_square() {
        return Err(QinfoError::NotDensityMatrix("not square".into()));
    }
    if !is_hermitian(rho, 1e-10) {
        return Err(QinfoError::NotDensityMatrix("not Hermitian".into()));
    }
    if (trace(rho) - c(1.0)).norm() > 1e-10 {
        return Err(QinfoError::NotDensityMatrix("trace differs from 1".into()));
    }
    if eigh(rho).0.first().copied().unwrap_or(0.0) < -1e-10 {
        return Err(QinfoError::NotDensityMatrix("negative eigenvalue".into()));
    }
    Ok(())
}

/// sqrt(d)·(√ρ ⊗ I)|Ω>, a normalised purification of ρ.
pub fn purify(rho: &Mat) -> Result<Vector, QinfoError> {
    check_density(rho)?;
    let d = rho.nrows();
    let v = vectorize(&sqrtm_psd(rho))?;
    Ok(v * c((d as f64).sqrt()))
}

/// Purification from the spectral decomposition, sum_k sqrt(p_k)|e_k>|k>.
pub fn purify_spectral(rho: &Mat) -> Result<Vector, QinfoError> {
    check_density(rho)?;
    let d = rho.nrows();
    let (vals, vecs) = eigh(rho);
    let mut v = Vector::zeros(d * d);
    for (k, &p) in vals.iter().enumerate() {
        let s = p.max(0.0).sqrt();
        for i in 0..d {
            v[i * d + k] += vecs[(i, k)] * s;
        }
    }
    Ok(v)
}

/// Reduced state on the first factor of a bipartite vector with dimensions (da, db).
pub fn reduce_first(psi: &Vector, da: usize, db: usize) -> Mat {
    // row index a, column index b
    let m = Mat::from_fn(da, db, |a, b| psi[a * db + b]);
    &m * m.adjoint()
}

/// max_V |<ψ1|(I ⊗ V)|ψ2>| over unitaries V on the second factor.
pub fn purification_overlap(psi1: &Vector, psi2: &Vector, d: usize) -> f64 {
    let m1 = Mat::from_fn(d, d, |a, b| psi1[a * d + b]);
    let m2 = Mat::from_fn(d, d, |a, b| psi2[a * d + b]);
    crate::linalg::singular_values(&(m1.adjoint() * m2)).iter().sum()
}

#[derive(Clone, Debug)]
pub struct KrausChannel {
    pub kraus_ops: Vec<Mat>,
}

impl KrausChannel {
    /// Validates the completeness relation sum_i K_i K_i† = I.
    pub fn new(kraus_ops: Vec<Mat>) -> Result<Self, QinfoError> {
        let d = kraus_ops
            .first()
            .ok_or(QinfoError::IncompleteKraus)?
            .nrows();
        let mut acc = Mat::zeros(d, d);
        for k in &kraus_ops {
            if k.shape() != (d, d) {
                return Err(QinfoError::DimensionMismatch("Kraus operators differ in shape".into()));
            }
            acc += k * k.adjoint();
        }
        if max_abs(&(acc - eye(d))) > 1e-10 {
            return Err(QinfoError::IncompleteKraus);
        }
        Ok(Self { kraus_ops })
    }

    pub fn dim(&self) -> usize {
        self.kraus_ops[0].nrows()
    }

    /// E(ρ) = sum_i K_i† ρ K_i.
    pub fn apply(&self, rho: &Mat) -> Mat {
        let d = self.dim();
        let mut out = Mat::zeros(d, d);
        for k in &self.kraus_ops {
            out += k.adjoint() * rho * k;
        }
        out
    }
}

/// Isometry U = sum_i |i>_anc ⊗ K_i†, ancilla most significant.
pub fn stinespring(ch: &KrausChannel) -> Mat {
    let d = ch.dim();
    let r = ch.kraus_ops.len();
    let mut u = Mat::zeros(r * d, d);
    for (i, k) in ch.kraus_ops.iter().enumerate() {
        u.view_mut((i * d, 0), (d, d)).copy_from(&k.adjoint());
    }
    u
}

/// Tr_anc(U ρ U†) for an isometry with the ancilla as the leading factor.
pub fn dilated_channel(u: &Mat, rho: &Mat) -> Mat {
    let d = rho.nrows();
    let r = u.nrows() / d;
    let big = u * rho * u.adjoint();
    let mut out = Mat::zeros(d, d);
    for i in 0..r {
        out += big.view((i * d, i * d), (d, d));
    }
    out
}
