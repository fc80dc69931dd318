//! Small exact PEPS: builders for a few textbook tensors and brute-force
//! contraction of open rectangular lattices.
//!
//! Virtual legs are ordered (left, right, up, down). Site (r, c) sits in row
//! r (top row 0) and column c; its right leg meets the left leg of (r, c+1)
//! and its down leg meets the up leg of (r+1, c). Physical legs follow the
//! four virtual legs, and the contracted state lists sites row-major.

use nalgebra::DVector;
use thiserror::Error;

use crate::linalg::{c, Mat};
use crate::netgraph::{contract_network, Bubbling, NetError, TensorNetwork};
use crate::tensor::{DenseTensor, C64};

/// Largest total physical dimension accepted by [`contract_peps_exact`].
pub const PEPS_DENSE_LIMIT: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PepsError {
    #[error("unknown PEPS name {0:?}")]
    UnknownName(String),
    #[error("lattice too large: physical dimension {0} exceeds the dense limit")]
    TooLarge(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PepsTensor {
    pub virtual_dims: [usize; 4],
    pub phys_dims: Vec<usize>,
    pub data: DenseTensor,
}

impl PepsTensor {
    pub fn new(data: DenseTensor) -> Result<Self, PepsError> {
        let s = data.shape();
        if s.len() < 5 {
            return Err(PepsError::ShapeMismatch(format!("need 4 virtual legs and at least one physical leg, got rank {}", s.len())));
        }
        Ok(PepsTensor {
            virtual_dims: [s[0], s[1], s[2], s[3]],
            phys_dims: s[4..].to_vec(),
            data,
        })
    }

    pub fn phys_dim(&self) -> usize {
        self.phys_dims.iter().product()
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        self.data.data().iter().filter(|z| z.norm() > 0.0).count()
    }
}

pub const PEPS_NAMES: [&str; 5] = ["product", "ghz2d", "toric", "cluster2d", "rvb"];

pub fn build_peps(name: &str) -> Result<PepsTensor, PepsError> {
    let t = match name {
        "product" => DenseTensor::from_fn(&[1, 1, 1, 1, 2], |i| c(if i[4] == 0 { 1.0 } else { 0.0 })),
        "ghz2d" => DenseTensor::from_fn(&[2, 2, 2, 2, 2], |i| c(if i.iter().all(|&x| x == i[0]) { 1.0 } else { 0.0 })),
        // physical legs are the left, bottom, right and top edges (i, j, k, l) of
        // the plaquette; virtual legs sit on its corners
        "toric" => DenseTensor::from_fn(&[2, 2, 2, 2, 2, 2, 2, 2], |x| {
            let (i, j, k, l) = (x[4], x[5], x[6], x[7]);
            let want = [(l + i) % 2, (j + k) % 2, (k + l) % 2, (i + j) % 2];
            c(if x[..4] == want { 1.0 } else { 0.0 })
        }),
        // left and down copy the physical value a, up (b) and right (g) pick up
        // the controlled phase
        "cluster2d" => DenseTensor::from_fn(&[2, 2, 2, 2, 2], |x| {
            let (l, g, b, d, a) = (x[0], x[1], x[2], x[3], x[4]);
            if l != a || d != a {
                c(0.0)
            } else if a == 0 {
                c(1.0)
            } else {
                c(if (b + g) % 2 == 0 { 1.0 } else { -1.0 })
            }
        }),
        // value 2 means no bond; exactly one leg carries the physical spin
        "rvb" => DenseTensor::from_fn(&[3, 3, 3, 3, 2], |x| {
            let a = x[4];
            let carrying: Vec<usize> = (0..4).filter(|&k| x[k] != 2).collect();
            c(if carrying.len() == 1 && x[carrying[0]] == a { 1.0 } else { 0.0 })
        }),
        _ => return Err(PepsError::UnknownName(name.to_string())),
    };
    PepsTensor::new(t)
}

/// Vectors contracted into the dangling virtual legs on each side.
#[derive(Clone, Debug, PartialEq)]
pub struct PepsBoundary {
    pub left: DVector<C64>,
    pub right: DVector<C64>,
    pub up: DVector<C64>,
    pub down: DVector<C64>,
}

impl PepsBoundary {
    pub fn uniform(v: DVector<C64>) -> Self {
        PepsBoundary {
            left: v.clone(),
            right: v.clone(),
            up: v.clone(),
            down: v,
        }
    }

    /// Every dangling leg fixed to basis state `idx` of dimension `dim`.
    pub fn fixed(dim: usize, idx: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[idx] = c(1.0);
        Self::uniform(v)
    }

    /// Boundary used with each builtin tensor: the GHZ legs are summed, the
    /// toric code is fixed to no loop, the cluster copy legs are summed while
    /// the phase legs see 0, and the RVB legs are projected on "no bond".
    pub fn for_builtin(name: &str) -> Result<Self, PepsError> {
        let ones = |d: usize| DVector::from_element(d, c(1.0));
        let e = |d: usize, k: usize| {
            let mut v = DVector::zeros(d);
            v[k] = c(1.0);
            v
        };
        Ok(match name {
            "product" => Self::fixed(1, 0),
            "ghz2d" => Self::uniform(ones(2)),
            "toric" => Self::fixed(2, 0),
            "cluster2d" => PepsBoundary {
                left: ones(2),
                down: ones(2),
                right: e(2, 0),
                up: e(2, 0),
            },
            "rvb" => Self::fixed(3, 2),
            _ => return Err(PepsError::UnknownName(name.to_string())),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContractionOrder {
    RowMajor,
    ColumnMajor,
}

/// Network of `width × height` copies of the tensor with boundary vectors on
/// the dangling legs; open legs are the physical legs, row-major by site.
pub fn peps_network(tensor: &PepsTensor, width: usize, height: usize, boundary: &PepsBoundary) -> Result<(TensorNetwork, Vec<Vec<usize>>), PepsError> {
    let [dl, dr, du, dd] = tensor.virtual_dims;
    if dl != dr || du != dd {
        return Err(PepsError::ShapeMismatch("opposite virtual legs must match".into()));
    }
    let sides = [(&boundary.left, dl), (&boundary.right, dr), (&boundary.up, du), (&boundary.down, dd)];
    if sides.iter().any(|(v, d)| v.len() != *d) {
        return Err(PepsError::ShapeMismatch("boundary vector length differs from the virtual dimension".into()));
    }
    let mut net = TensorNetwork::new();
    let site = |r: usize, col: usize| r * width + col;
    for r in 0..height {
        for col in 0..width {
            net.add_node(format!("p{}_{}", r, col), tensor.data.clone());
        }
    }
    // groups[s] = nodes absorbed together with site s (the site first)
    let mut groups: Vec<Vec<usize>> = (0..width * height).map(|s| vec![s]).collect();
    for r in 0..height {
        for col in 0..width {
            let s = site(r, col);
            if col + 1 < width {
                net.bond(s, 1, site(r, col + 1), 0);
            }
            if r + 1 < height {
                net.bond(s, 3, site(r + 1, col), 2);
            }
            let edges = [(col == 0, 0usize), (col + 1 == width, 1), (r == 0, 2), (r + 1 == height, 3)];
            for (on_edge, leg) in edges {
                if on_edge {
                    let v = sides[leg].0;
                    let b = net.add_node(format!("b{}_{}", s, leg), DenseTensor::from_vector(v.as_slice()));
                    net.bond(s, leg, b, 0);
                    groups[s].push(b);
                }
            }
        }
    }
    for s in 0..width * height {
        for p in 0..tensor.phys_dims.len() {
            net.open_legs.push((s, 4 + p));
        }
    }
    Ok((net, groups))
}

/// Dense state of the open lattice, with one leg per physical leg.
pub fn contract_peps_exact(tensor: &PepsTensor, width: usize, height: usize, boundary: &PepsBoundary, order: ContractionOrder) -> Result<DenseTensor, PepsError> {
    let total = (tensor.phys_dim() as f64).powi((width * height) as i32);
    if width == 0 || height == 0 || total > PEPS_DENSE_LIMIT as f64 {
        return Err(PepsError::TooLarge(total as usize));
    }
    let (net, groups) = peps_network(tensor, width, height, boundary)?;
    let sites: Vec<usize> = match order {
        ContractionOrder::RowMajor => (0..width * height).collect(),
        ContractionOrder::ColumnMajor => (0..width).flat_map(|col| (0..height).map(move |r| r * width + col)).collect(),
    };
    let plan = Bubbling {
        order: sites.iter().flat_map(|&s| groups[s].iter().copied()).collect(),
    };
    Ok(contract_network(&net, &plan)?)
}

/// Whether applying `op` to all four virtual legs leaves the tensor
/// entrywise unchanged to 1e-12.
pub fn g_injectivity_check(tensor: &PepsTensor, op: &Mat) -> Result<bool, PepsError> {
    let d = tensor.virtual_dims[0];
    if tensor.virtual_dims.iter().any(|&x| x != d) || op.shape() != (d, d) {
        return Err(PepsError::ShapeMismatch("operator must match every virtual dimension".into()));
    }
    let mut t = tensor.data.clone();
    let rank = t.rank();
    for leg in 0..4 {
        let opt = DenseTensor::from_matrix(op);
        // contract op's input leg with `leg`; the new leg lands at the end
        let out = crate::tensor::contract(&t, &[leg], &opt, &[1]).map_err(NetError::from)?;
        let mut perm: Vec<usize> = (0..rank - 1).collect();
        perm.insert(leg, rank - 1);
        t = out.permute(&perm).map_err(NetError::from)?;
    }
    Ok(t.max_abs_diff(&tensor.data) <= 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eye, pauli};

    #[test]
    fn builtin_shapes() {
        assert_eq!(build_peps("ghz2d").unwrap().nnz(), 2);
        let t = build_peps("toric").unwrap();
        assert_eq!(t.nnz(), 16);
        assert_eq!(t.phys_dims, vec![2; 4]);
        assert_eq!(build_peps("rvb").unwrap().nnz(), 8);
        assert!(matches!(build_peps("kagome"), Err(PepsError::UnknownName(_))));
    }

    #[test]
    fn toric_virtual_symmetry() {
        let t = build_peps("toric").unwrap();
        assert!(g_injectivity_check(&t, &pauli('Z').unwrap()).unwrap());
        assert!(!g_injectivity_check(&t, &pauli('X').unwrap()).unwrap());
        assert!(g_injectivity_check(&t, &eye(2)).unwrap());
        assert!(g_injectivity_check(&t, &eye(3)).is_err());
    }

    #[test]
    fn ghz_two_by_three() {
        let t = build_peps("ghz2d").unwrap();
        let b = PepsBoundary::for_builtin("ghz2d").unwrap();
        let s = contract_peps_exact(&t, 3, 2, &b, ContractionOrder::RowMajor).unwrap();
        let v = s.data();
        assert_eq!(v.len(), 64);
        for (k, z) in v.iter().enumerate() {
            let want = if k == 0 || k == 63 { 1.0 } else { 0.0 };
            assert!((z - c(want)).norm() < 1e-14);
        }
    }

    #[test]
    fn too_large() {
        let t = build_peps("toric").unwrap();
        let b = PepsBoundary::fixed(2, 0);
        assert!(matches!(contract_peps_exact(&t, 3, 3, &b, ContractionOrder::RowMajor), Err(PepsError::TooLarge(_))));
    }
}
