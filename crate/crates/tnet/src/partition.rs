//! Classical partition functions on open square lattices as tensor networks,
//! and the pure PEPS whose squared amplitudes are Boltzmann weights.
//!
//! Spins live on the sites of a `width × height` grid with nearest-neighbour
//! couplings `h[s, s']`. Site `(r, c)` has index `r * width + c`.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::linalg::{c, max_abs, Mat};
use crate::netgraph::{contract_network, greedy_bubbling, Bubbling, NetError, TensorNetwork};
use crate::tensor::{DenseTensor, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("state dimension {0} exceeds the dense limit")]
    TooLarge(usize),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// Dense limit for [`thermal_peps_state`].
pub const THERMAL_DENSE_LIMIT: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionSpec {
    /// Bond energy `h[s, s']`, symmetric.
    pub coupling: DMatrix<f64>,
    /// Value of the observable attached to each spin state, e.g. ±1 for Ising.
    pub values: Vec<f64>,
    pub beta: f64,
    pub width: usize,
    pub height: usize,
}

impl PartitionSpec {
    /// Ising model `H = -J Σ s_i s_j` with spin states (+1, -1).
    pub fn ising(j: f64, beta: f64, width: usize, height: usize) -> Self {
        PartitionSpec {
            coupling: DMatrix::from_row_slice(2, 2, &[-j, j, j, -j]),
            values: vec![1.0, -1.0],
            beta,
            width,
            height,
        }
    }

    pub fn q(&self) -> usize {
        self.coupling.nrows()
    }

    pub fn n_sites(&self) -> usize {
        self.width * self.height
    }

    pub fn validate(&self) -> Result<(), PartitionError> {
        let q = self.q();
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return Err(PartitionError::InvalidSpec("beta must be finite and non-negative".into()));
        }
        if q == 0 || self.coupling.ncols() != q || self.values.len() != q {
            return Err(PartitionError::InvalidSpec("coupling must be q×q with q spin values".into()));
        }
        if (&self.coupling - self.coupling.transpose()).amax() > 1e-12 {
            return Err(PartitionError::InvalidSpec("coupling must be symmetric".into()));
        }
        if self.width == 0 || self.height == 0 {
            return Err(PartitionError::InvalidSpec("empty lattice".into()));
        }
        Ok(())
    }

    /// Nearest-neighbour bonds `(i, j)` with `i < j`.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let w = self.width;
        let mut out = Vec::new();
        for r in 0..self.height {
            for col in 0..w {
                let s = r * w + col;
                if col + 1 < w {
                    out.push((s, s + 1));
                }
                if r + 1 < self.height {
                    out.push((s, s + w));
                }
            }
        }
        out
    }

    /// Ising coupling strength `J` when `h = -J s s'` with values ±1.
    pub fn ising_coupling(&self) -> Option<f64> {
        if self.q() != 2 || self.values != [1.0, -1.0] {
            return None;
        }
        let j = -self.coupling[(0, 0)];
        let want = DMatrix::from_row_slice(2, 2, &[-j, j, j, -j]);
        ((&self.coupling - want).amax() < 1e-14).then_some(j)
    }

    fn boltzmann(&self, scale: f64) -> Mat {
        self.coupling.map(|h| c((-self.beta * scale * h).exp()))
    }
}

fn delta(rank: usize, q: usize, weights: Option<&[f64]>) -> DenseTensor {
    DenseTensor::from_fn(&vec![q; rank], |i| {
        if i.iter().all(|&x| x == i[0]) {
            c(weights.map(|w| w[i[0]]).unwrap_or(1.0))
        } else {
            c(0.0)
        }
    })
}

/// Network of copy tensors on sites and Boltzmann matrices on bonds; sites in
/// `marked` carry the spin value as a weight.
fn dm_network(spec: &PartitionSpec, marked: &[usize]) -> TensorNetwork {
    let q = spec.q();
    let n = spec.n_sites();
    let bonds = spec.bonds();
    let mut degree = vec![0usize; n];
    for &(a, b) in &bonds {
        degree[a] += 1;
        degree[b] += 1;
    }
    let mut net = TensorNetwork::new();
    for s in 0..n {
        let times = marked.iter().filter(|&&m| m == s).count() as i32;
        let weights: Option<Vec<f64>> = (times > 0).then(|| spec.values.iter().map(|v| v.powi(times)).collect());
        // a lone site still needs one leg so the sum runs over its states
        let rank = degree[s].max(1);
        let t = delta(rank, q, weights.as_deref());
        net.add_node(format!("D{}", s), t);
    }
    let mut used = vec![0usize; n];
    let m = DenseTensor::from_matrix(&spec.boltzmann(1.0));
    for &(a, b) in &bonds {
        let id = net.add_node(format!("M{}_{}", a, b), m.clone());
        net.bond(a, used[a], id, 0);
        net.bond(id, 1, b, used[b]);
        used[a] += 1;
        used[b] += 1;
    }
    for s in 0..n {
        if degree[s] == 0 {
            let ones = DenseTensor::from_vector(&vec![c(1.0); q]);
            let id = net.add_node(format!("E{}", s), ones);
            net.bond(s, 0, id, 0);
        }
    }
    net
}

fn contract_scalar(net: &TensorNetwork) -> Result<f64, PartitionError> {
    let plan: Bubbling = greedy_bubbling(net);
    let t = contract_network(net, &plan)?;
    Ok(t.scalar_value().map(|z| z.re).unwrap_or(0.0))
}

/// `Z = Σ_s exp(-β H[s])`. The Ising model is contracted through its
/// site tensor `Q = 2cosh(βJ/2 Σ legs)`; other couplings use copy tensors
/// joined by Boltzmann matrices.
pub fn partition_function(spec: &PartitionSpec) -> Result<f64, PartitionError> {
    spec.validate()?;
    if let Some(j) = spec.ising_coupling() {
        if let Some(z) = ising_q_partition(spec, j)? {
            return Ok(z);
        }
    }
    contract_scalar(&dm_network(spec, &[]))
}

/// `Z · ⟨Π_k v(s_k)⟩` with the spin value inserted at every listed site.
pub fn partition_with_insertions(spec: &PartitionSpec, sites: &[usize]) -> Result<f64, PartitionError> {
    spec.validate()?;
    if let Some(&bad) = sites.iter().find(|&&s| s >= spec.n_sites()) {
        return Err(PartitionError::InvalidSpec(format!("site {} outside the lattice", bad)));
    }
    contract_scalar(&dm_network(spec, sites))
}

/// Thermal expectation of the product of spin values at `sites`.
pub fn thermal_expectation(spec: &PartitionSpec, sites: &[usize]) -> Result<f64, PartitionError> {
    Ok(partition_with_insertions(spec, sites)? / partition_with_insertions(spec, &[])?)
}

/// Site tensor of the Ising network with four spin-valued legs:
/// `Q[i,j,k,l] = Σ_a exp(βJ/2 · s_a (s_i+s_j+s_k+s_l)) = 2cosh(βJ/2 Σ s)`.
pub fn ising_q_tensor(beta: f64, j: f64) -> DenseTensor {
    let s = |x: usize| if x == 0 { 1.0 } else { -1.0 };
    DenseTensor::from_fn(&[2, 2, 2, 2], |i| {
        let sum: f64 = i.iter().map(|&x| s(x)).sum();
        c(2.0 * (beta * j / 2.0 * sum).cosh())
    })
}

/// General form `Q[i,j,k,l] = Σ_a exp(-β/2 Σ_legs h[s_leg, s_a])`.
pub fn q_tensor(spec: &PartitionSpec) -> DenseTensor {
    let q = spec.q();
    DenseTensor::from_fn(&[q, q, q, q], |i| {
        let w: f64 = (0..q)
            .map(|a| {
                let e: f64 = i.iter().map(|&x| spec.coupling[(x, a)]).sum();
                (-spec.beta / 2.0 * e).exp()
            })
            .sum();
        c(w)
    })
}

/// Contracts Q tensors. With `S[a, σ] = exp(βJ/2 s_a σ)` each Q is a copy
/// tensor with `S` on every leg, and `S Sᵀ` is not the Boltzmann matrix
/// `M`, so neighbouring legs are joined by `G = S⁺ M S⁺ᵀ` and dangling legs
/// closed with `u` solving `S u = 1`. Returns `None` if `G` fails to
/// reproduce `M`.
fn ising_q_partition(spec: &PartitionSpec, j: f64) -> Result<Option<f64>, PartitionError> {
    let k = spec.beta * j / 2.0;
    let s = DMatrix::from_row_slice(2, 2, &[k.exp(), (-k).exp(), (-k).exp(), k.exp()]).map(c);
    let m = spec.boltzmann(1.0);
    let sp = match s.clone().pseudo_inverse(1e-13) {
        Ok(p) => p,
        Err(_) => return Ok(None),
    };
    let g = &sp * &m * sp.transpose();
    if max_abs(&(&s * &g * s.transpose() - &m)) > 1e-12 * max_abs(&m).max(1.0) {
        return Ok(None);
    }
    let ones = DVector::from_element(2, c(1.0));
    let u = &sp * &ones;
    if (&s * &u - &ones).iter().any(|z| z.norm() > 1e-12) {
        return Ok(None);
    }
    let (w, h) = (spec.width, spec.height);
    let qt = ising_q_tensor(spec.beta, j);
    let mut net = TensorNetwork::new();
    for r in 0..h {
        for col in 0..w {
            net.add_node(format!("Q{}_{}", r, col), qt.clone());
        }
    }
    let gt = DenseTensor::from_matrix(&g);
    let ut = DenseTensor::from_vector(u.as_slice());
    // legs (left, right, up, down)
    for r in 0..h {
        for col in 0..w {
            let site = r * w + col;
            if col + 1 < w {
                let id = net.add_node(format!("G{}r", site), gt.clone());
                net.bond(site, 1, id, 0);
                net.bond(id, 1, site + 1, 0);
            }
            if r + 1 < h {
                let id = net.add_node(format!("G{}d", site), gt.clone());
                net.bond(site, 3, id, 0);
                net.bond(id, 1, site + w, 2);
            }
            for (edge, leg) in [(col == 0, 0), (col + 1 == w, 1), (r == 0, 2), (r + 1 == h, 3)] {
                if edge {
                    let id = net.add_node(format!("U{}_{}", site, leg), ut.clone());
                    net.bond(site, leg, id, 0);
                }
            }
        }
    }
    contract_scalar(&net).map(Some)
}

/// Unnormalised PEPS `Σ_s Π_bonds exp(-β/2 h[s_i, s_j]) |s⟩`, whose norm
/// squared is `Z`. Kronecker order over sites.
pub fn thermal_peps_state(spec: &PartitionSpec) -> Result<DVector<C64>, PartitionError> {
    spec.validate()?;
    let q = spec.q();
    let n = spec.n_sites();
    let dim = (q as f64).powi(n as i32);
    if dim > THERMAL_DENSE_LIMIT as f64 {
        return Err(PartitionError::TooLarge(dim as usize));
    }
    let bonds = spec.bonds();
    let mut degree = vec![0usize; n];
    for &(a, b) in &bonds {
        degree[a] += 1;
        degree[b] += 1;
    }
    let mut net = TensorNetwork::new();
    for s in 0..n {
        // copy tensor with the physical leg last
        net.add_node(format!("P{}", s), delta(degree[s] + 1, q, None));
    }
    let half = DenseTensor::from_matrix(&spec.boltzmann(0.5));
    let mut used = vec![0usize; n];
    for &(a, b) in &bonds {
        let id = net.add_node(format!("B{}_{}", a, b), half.clone());
        net.bond(a, used[a], id, 0);
        net.bond(id, 1, b, used[b]);
        used[a] += 1;
        used[b] += 1;
    }
    for s in 0..n {
        net.open_legs.push((s, degree[s]));
    }
    let plan = greedy_bubbling(&net);
    let t = contract_network(&net, &plan)?;
    Ok(t.to_kron_vector())
}

/// `⟨ψ|Π_k V_k|ψ⟩ / ⟨ψ|ψ⟩` on the thermal PEPS, with `V` the diagonal
/// operator of spin values.
pub fn thermal_peps_correlator(spec: &PartitionSpec, sites: &[usize]) -> Result<f64, PartitionError> {
    let psi = thermal_peps_state(spec)?;
    let n = spec.n_sites();
    let q = spec.q();
    if let Some(&bad) = sites.iter().find(|&&s| s >= n) {
        return Err(PartitionError::InvalidSpec(format!("site {} outside the lattice", bad)));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (idx, amp) in psi.iter().enumerate() {
        let p = amp.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let weight: f64 = sites
            .iter()
            .map(|&s| {
                let state = (idx / q.pow((n - 1 - s) as u32)) % q;
                spec.values[state]
            })
            .product();
        num += p * weight;
        den += p;
    }
    Ok(num / den)
}
