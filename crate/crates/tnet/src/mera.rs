//! Exact MERA on small periodic chains.
//!
//! A layer maps a coarse chain of `n` sites to a fine chain of `arity · n`
//! sites: each coarse site `k` is expanded by `w†` into fine sites
//! `arity·k + 1 ..= arity·k + arity`, then `u` acts on every pair
//! `(arity·k, arity·k + 1)` straddling two blocks (indices mod the fine
//! length). `layers[0]` is the layer next to the physical sites.
//!
//! `w` is stored as a `d_coarse × d_fine^arity` matrix with `w w† = I`, and
//! `u` as a `d_fine² × d_fine²` unitary; both use Kronecker order with the
//! leftmost site most significant.

use std::collections::BTreeSet;

use nalgebra::DVector;
use rand::Rng;
use thiserror::Error;

use crate::linalg::{c, eigvals, eye, eigh, kernel, kron, max_abs, random_isometry, random_unitary, Mat};
use crate::tensor::{contract, partial_trace, DenseTensor, TensorError, C64};

pub const MERA_DENSE_LIMIT: usize = 1 << 20;
const ISO_TOL: f64 = 1e-10;
const COARSE_TAG: usize = 1 << 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeraError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("layer tensors are not isometric")]
    NotIsometric,
    #[error("region of {0} sites is larger than the supported 3")]
    RegionTooLarge(usize),
    #[error("state dimension {0} exceeds the dense limit")]
    TooLarge(usize),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeraLayer {
    pub u: Mat,
    pub w: Mat,
    pub arity: usize,
    pub d_fine: usize,
    pub d_coarse: usize,
}

impl MeraLayer {
    pub fn new(u: Mat, w: Mat, arity: usize) -> Result<Self, MeraError> {
        if arity < 2 {
            return Err(MeraError::ShapeMismatch("arity must be at least 2".into()));
        }
        let d2 = u.nrows();
        let d_fine = (d2 as f64).sqrt().round() as usize;
        if u.ncols() != d2 || d_fine * d_fine != d2 {
            return Err(MeraError::ShapeMismatch("u must be square on two sites".into()));
        }
        if w.ncols() != d_fine.pow(arity as u32) {
            return Err(MeraError::ShapeMismatch(format!("w needs {} columns", d_fine.pow(arity as u32))));
        }
        let d_coarse = w.nrows();
        Ok(MeraLayer { u, w, arity, d_fine, d_coarse })
    }

    /// `w†` as a tensor with legs (fine_1 … fine_arity, coarse).
    fn w_dag_tensor(&self) -> DenseTensor {
        let mut shape = vec![self.d_fine; self.arity];
        shape.push(self.d_coarse);
        let a = self.arity;
        let d = self.d_fine;
        DenseTensor::from_fn(&shape, |i| {
            let f = i[..a].iter().fold(0, |acc, &x| acc * d + x);
            self.w[(i[a], f)].conj()
        })
    }

    /// `u` as a tensor with legs (out_1, out_2, in_1, in_2).
    fn u_tensor(&self) -> DenseTensor {
        let d = self.d_fine;
        DenseTensor::from_fn(&[d, d, d, d], |i| self.u[(i[0] * d + i[1], i[2] * d + i[3])])
    }

    fn u_is_identity(&self) -> bool {
        max_abs(&(&self.u - eye(self.u.nrows()))) == 0.0
    }

    /// Fine-level pairs acted on by `u` for a fine chain of `n` sites.
    fn pairs(&self, n: usize) -> Vec<(usize, usize)> {
        let a = self.arity;
        (0..n / a).map(|k| (a * k, a * k + 1)).collect()
    }

    /// Coarse site whose block contains fine site `s` of an `n`-site chain.
    fn block_of(&self, s: usize, n: usize) -> usize {
        ((s + n - 1) % n) / self.arity
    }

    fn block_sites(&self, k: usize, n: usize) -> Vec<usize> {
        (1..=self.arity).map(|j| (self.arity * k + j) % n).collect()
    }
}

/// Both constraints `u†u = I` and `w w† = I` to 1e-10.
pub fn check_isometries(layer: &MeraLayer) -> bool {
    let u_ok = max_abs(&(layer.u.adjoint() * &layer.u - eye(layer.u.ncols()))) <= ISO_TOL;
    let w_ok = max_abs(&(&layer.w * layer.w.adjoint() - eye(layer.w.nrows()))) <= ISO_TOL;
    u_ok && w_ok
}

/// Ternary layer with `u = I` and `w†|s⟩ = |+⟩|s⟩|+⟩`, given as the table of
/// `w†` with row labels read left to right as the three fine sites.
pub fn product_layer() -> MeraLayer {
    const TABLE: [(&str, [f64; 2]); 8] = [
        ("000", [0.5, 0.0]),
        ("100", [0.5, 0.0]),
        ("010", [0.0, 0.5]),
        ("110", [0.0, 0.5]),
        ("001", [0.5, 0.0]),
        ("101", [0.5, 0.0]),
        ("011", [0.0, 0.5]),
        ("111", [0.0, 0.5]),
    ];
    let mut w = Mat::zeros(2, 8);
    for (label, row) in TABLE {
        let f = label.bytes().fold(0, |acc, b| acc * 2 + (b - b'0') as usize);
        for (col, v) in row.iter().enumerate() {
            w[(col, f)] = c(*v);
        }
    }
    MeraLayer::new(eye(4), w, 3).expect("valid layer")
}

/// Ternary layer with `u = I` and the copy tensor `w†|s⟩ = |sss⟩`.
pub fn ghz_layer() -> MeraLayer {
    let mut w = Mat::zeros(2, 8);
    w[(0, 0)] = c(1.0);
    w[(1, 7)] = c(1.0);
    MeraLayer::new(eye(4), w, 3).expect("valid layer")
}

/// Binary layer on two-qubit sites: `w†` applies CZ to the coarse pair
/// (a, b), sends a to the first fine qubit and b to the last, prepares the
/// middle two qubits in CZ|++⟩ and applies CZ inside each fine site.
pub fn cluster_binary_layer() -> MeraLayer {
    let mut wd = Mat::zeros(16, 4);
    let sgn = |x: usize| if x % 2 == 0 { 1.0 } else { -1.0 };
    for a in 0..2 {
        for b in 0..2 {
            for q1 in 0..2 {
                for q2 in 0..2 {
                    let (q0, q3) = (a, b);
                    let phase = sgn(a * b) * sgn(q1 * q2) * sgn(q0 * q1) * sgn(q2 * q3);
                    wd[(8 * q0 + 4 * q1 + 2 * q2 + q3, 2 * a + b)] = c(0.5 * phase);
                }
            }
        }
    }
    MeraLayer::new(eye(16), wd.adjoint(), 2).expect("valid layer")
}

/// Random layer with `u` Haar-like unitary and `w` a random isometry.
pub fn random_layer<R: Rng + ?Sized>(d: usize, d_coarse: usize, arity: usize, rng: &mut R) -> MeraLayer {
    let u = random_unitary(d * d, rng);
    let w = random_isometry(d.pow(arity as u32), d_coarse, rng).adjoint();
    MeraLayer::new(u, w, arity).expect("valid layer")
}

fn top_sites(layers: &[MeraLayer], n_sites: usize) -> Result<usize, MeraError> {
    let mut n = n_sites;
    for (k, l) in layers.iter().enumerate() {
        if n % l.arity != 0 {
            return Err(MeraError::ShapeMismatch(format!("{} sites at level {} not divisible by arity {}", n, k, l.arity)));
        }
        n /= l.arity;
        if let Some(next) = layers.get(k + 1) {
            if next.d_fine != l.d_coarse {
                return Err(MeraError::ShapeMismatch(format!("layer {} coarse dimension differs from layer {} fine dimension", k, k + 1)));
            }
        }
    }
    Ok(n)
}

fn check_top(layers: &[MeraLayer], top: &DVector<C64>, n_top: usize) -> Result<usize, MeraError> {
    let d_top = layers.last().map(|l| l.d_coarse).ok_or_else(|| MeraError::ShapeMismatch("no layers".into()))?;
    let want = (d_top as f64).powi(n_top as i32);
    if top.len() as f64 != want {
        return Err(MeraError::ShapeMismatch(format!("top vector has length {}, expected {}", top.len(), want)));
    }
    Ok(d_top)
}

/// Permutation taking the current leg order `cur` to `want`.
fn perm_to<T: PartialEq>(cur: &[T], want: &[T]) -> Vec<usize> {
    want.iter().map(|x| cur.iter().position(|y| y == x).expect("leg present")).collect()
}

/// Exact state, one leg per physical site.
pub fn mera_build(layers: &[MeraLayer], top: &DVector<C64>, n_sites: usize) -> Result<DenseTensor, MeraError> {
    let n_top = top_sites(layers, n_sites)?;
    let d_top = check_top(layers, top, n_top)?;
    let d_phys = layers[0].d_fine;
    let total = (d_phys as f64).powi(n_sites as i32);
    if total > MERA_DENSE_LIMIT as f64 {
        return Err(MeraError::TooLarge(total as usize));
    }
    let mut psi = DenseTensor::from_kron_vector(top.as_slice(), &vec![d_top; n_top])?;
    let mut n = n_top;
    for layer in layers.iter().rev() {
        let wt = layer.w_dag_tensor();
        let a = layer.arity;
        // expand coarse sites from the last one so earlier positions stay put
        for k in (0..n).rev() {
            let out = contract(&psi, &[k], &wt, &[a])?;
            let r = psi.rank() - 1;
            let mut perm: Vec<usize> = (0..k).collect();
            perm.extend(r..r + a);
            perm.extend(k..r);
            psi = out.permute(&perm)?;
        }
        n *= a;
        // leg j now holds fine site j + 1; rotate so leg s holds site s
        let cur: Vec<usize> = (0..n).map(|j| (j + 1) % n).collect();
        let want: Vec<usize> = (0..n).collect();
        psi = psi.permute(&perm_to(&cur, &want))?;
        if !layer.u_is_identity() {
            let ut = layer.u_tensor();
            for (p, q) in layer.pairs(n) {
                let out = contract(&psi, &[p, q], &ut, &[2, 3])?;
                // remaining legs keep their order; the outputs land at the end
                let mut cur: Vec<usize> = (0..n).filter(|&x| x != p && x != q).collect();
                cur.push(p);
                cur.push(q);
                let want: Vec<usize> = (0..n).collect();
                psi = out.permute(&perm_to(&cur, &want))?;
            }
        }
    }
    Ok(psi)
}

// descending superoperator

/// Density operator on a list of labelled sites; legs are all kets, then
/// all bras, in label order.
struct LocalRho {
    labels: Vec<usize>,
    t: DenseTensor,
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum Leg {
    Ket(usize),
    Bra(usize),
    OutKet(usize),
    OutBra(usize),
}

impl LocalRho {
    fn m(&self) -> usize {
        self.labels.len()
    }

    /// Applies `op` (legs: outputs then inputs) to the sites at `positions`
    /// on the ket side and its conjugate on the bra side. With one input the
    /// outputs are placed at that position in order and labelled `new_labels`;
    /// otherwise output j replaces input j.
    fn apply(&mut self, positions: &[usize], op: &DenseTensor, n_out: usize, new_labels: &[usize]) -> Result<(), MeraError> {
        let m = self.m();
        let n_in = positions.len();
        let in_legs: Vec<usize> = (n_out..n_out + n_in).collect();
        let t1 = contract(&self.t, positions, op, &in_legs)?;
        // bra legs sit after the m - n_in remaining kets
        let bra_pos: Vec<usize> = positions.iter().map(|&p| m - n_in + p).collect();
        let t2 = contract(&t1, &bra_pos, &op.conj(), &in_legs)?;
        let mut cur: Vec<Leg> = (0..m).filter(|p| !positions.contains(p)).map(Leg::Ket).collect();
        cur.extend((0..m).filter(|p| !positions.contains(p)).map(Leg::Bra));
        cur.extend((0..n_out).map(Leg::OutKet));
        cur.extend((0..n_out).map(Leg::OutBra));
        let mut kets: Vec<Leg> = Vec::new();
        let mut labels = Vec::new();
        for p in 0..m {
            if let Some(j) = positions.iter().position(|&x| x == p) {
                if n_in == 1 {
                    kets.extend((0..n_out).map(Leg::OutKet));
                    labels.extend_from_slice(new_labels);
                } else {
                    kets.push(Leg::OutKet(j));
                    labels.push(self.labels[p]);
                }
            } else {
                kets.push(Leg::Ket(p));
                labels.push(self.labels[p]);
            }
        }
        let bras: Vec<Leg> = kets
            .iter()
            .map(|l| match *l {
                Leg::Ket(p) => Leg::Bra(p),
                Leg::OutKet(j) => Leg::OutBra(j),
                other => other,
            })
            .collect();
        kets.extend(bras);
        self.t = t2.permute(&perm_to(&cur, &kets))?;
        self.labels = labels;
        Ok(())
    }

    fn trace_out(&mut self, label: usize) -> Result<usize, MeraError> {
        let p = self.labels.iter().position(|&l| l == label).expect("label present");
        let m = self.m();
        let dim = self.t.shape()[p];
        self.t = partial_trace(&self.t, p, m + p)?;
        self.labels.remove(p);
        Ok(dim)
    }
}

/// Sites needed at every level for a fine region: `(needed, with_partners)`
/// per layer, plus the needed top sites.
fn cone_sets(layers: &[MeraLayer], n_sites: usize, region: &[usize]) -> (Vec<(BTreeSet<usize>, BTreeSet<usize>)>, BTreeSet<usize>) {
    let mut need: BTreeSet<usize> = region.iter().copied().collect();
    let mut n = n_sites;
    let mut out = Vec::new();
    for layer in layers {
        let mut with = need.clone();
        for (p, q) in layer.pairs(n) {
            if need.contains(&p) || need.contains(&q) {
                with.insert(p);
                with.insert(q);
            }
        }
        let up: BTreeSet<usize> = with.iter().map(|&s| layer.block_of(s, n)).collect();
        out.push((need, with));
        need = up;
        n /= layer.arity;
    }
    (out, need)
}

/// Number of fine sites below each layer.
fn level_sizes(layers: &[MeraLayer], n_sites: usize) -> Vec<usize> {
    layers
        .iter()
        .scan(n_sites, |n, l| {
            let here = *n;
            *n /= l.arity;
            Some(here)
        })
        .collect()
}

fn region_sites(n_sites: usize, start: usize, len: usize) -> Result<Vec<usize>, MeraError> {
    if len == 0 || len > n_sites {
        return Err(MeraError::ShapeMismatch(format!("region of {} sites on a chain of {}", len, n_sites)));
    }
    Ok((0..len).map(|k| (start + k) % n_sites).collect())
}

/// Reduced density matrix of the contiguous region `start .. start+len`
/// (mod n), obtained by passing the top state down through the causal cone.
/// Kronecker order follows the region.
pub fn descending_superoperator(layers: &[MeraLayer], top: &DVector<C64>, n_sites: usize, start: usize, len: usize) -> Result<Mat, MeraError> {
    if len > 3 {
        return Err(MeraError::RegionTooLarge(len));
    }
    descend(layers, top, n_sites, start, len).map(|(m, _)| m)
}

/// Dimensions of every leg traced out while descending to the region: the
/// rank of the reduced density matrix is at most their product.
pub fn cone_cut_dims(layers: &[MeraLayer], n_sites: usize, start: usize, len: usize) -> Result<Vec<usize>, MeraError> {
    let n_top = top_sites(layers, n_sites)?;
    let region = region_sites(n_sites, start, len)?;
    let (levels, top_need) = cone_sets(layers, n_sites, &region);
    let d_top = layers.last().map(|l| l.d_coarse).unwrap_or(1);
    let mut dims: Vec<usize> = (0..n_top).filter(|s| !top_need.contains(s)).map(|_| d_top).collect();
    let sizes = level_sizes(layers, n_sites);
    for ((layer, (need, with)), &n) in layers.iter().zip(&levels).zip(&sizes).rev() {
        let expanded = with.iter().map(|&s| layer.block_of(s, n)).collect::<BTreeSet<_>>().len() * layer.arity;
        dims.extend(std::iter::repeat(layer.d_fine).take(expanded - need.len()));
    }
    Ok(dims)
}

fn descend(layers: &[MeraLayer], top: &DVector<C64>, n_sites: usize, start: usize, len: usize) -> Result<(Mat, Vec<usize>), MeraError> {
    let n_top = top_sites(layers, n_sites)?;
    let d_top = check_top(layers, top, n_top)?;
    let region = region_sites(n_sites, start, len)?;
    let (levels, top_need) = cone_sets(layers, n_sites, &region);
    let mut traced = Vec::new();
    let psi = DenseTensor::from_kron_vector(top.as_slice(), &vec![d_top; n_top])?;
    let mut rho = LocalRho {
        labels: (0..n_top).collect(),
        t: crate::tensor::tensor_product(&psi, &psi.conj()),
    };
    for s in 0..n_top {
        if !top_need.contains(&s) {
            traced.push(rho.trace_out(s)?);
        }
    }
    let sizes = level_sizes(layers, n_sites);
    for ((layer, (need, with)), n_level) in layers.iter().zip(&levels).zip(&sizes).rev() {
        let a = layer.arity;
        let wt = layer.w_dag_tensor();
        // move coarse labels out of the way of the fine ones being created
        let coarse: Vec<usize> = rho.labels.clone();
        for l in rho.labels.iter_mut() {
            *l += COARSE_TAG;
        }
        for k in coarse {
            let p = rho.labels.iter().position(|&l| l == k + COARSE_TAG).expect("coarse label");
            let fine = layer.block_sites(k, *n_level);
            rho.apply(&[p], &wt, a, &fine)?;
            for f in fine {
                if !with.contains(&f) {
                    traced.push(rho.trace_out(f)?);
                }
            }
        }
        if !layer.u_is_identity() {
            let ut = layer.u_tensor();
            for (p, q) in layer.pairs(*n_level) {
                if need.contains(&p) || need.contains(&q) {
                    let pp = rho.labels.iter().position(|&l| l == p).expect("pair site");
                    let qq = rho.labels.iter().position(|&l| l == q).expect("pair site");
                    rho.apply(&[pp, qq], &ut, 2, &[])?;
                }
            }
        }
        let extra: Vec<usize> = rho.labels.iter().copied().filter(|l| !need.contains(l)).collect();
        for l in extra {
            traced.push(rho.trace_out(l)?);
        }
    }
    // reorder kets and bras to follow the region
    let m = rho.m();
    let mut perm: Vec<usize> = region.iter().map(|s| rho.labels.iter().position(|l| l == s).expect("region site")).collect();
    perm.extend(perm.clone().iter().map(|p| p + m));
    let t = rho.t.permute(&perm)?;
    let d = layers[0].d_fine;
    let dim = d.pow(m as u32);
    // kets are the row index; both sides in Kronecker order
    let v = t.to_kron_vector();
    let out = Mat::from_fn(dim, dim, |r, col| v[r * dim + col]);
    Ok((out, traced))
}

// scaling superoperator

#[derive(Clone, Debug)]
pub struct ScalingReport {
    /// Superoperator on row-major vectorised operators: vec(S(φ)) = S vec(φ).
    pub superop: Mat,
    /// Eigenvalues sorted by decreasing modulus.
    pub eigenvalues: Vec<C64>,
    /// `-log_3 |λ|` for every eigenvalue with `|λ| > 1e-12`.
    pub scaling_dims: Vec<f64>,
    /// Largest entry of `S(I) - I`.
    pub unital_error: f64,
    /// Smallest eigenvalue of the Choi matrix.
    pub choi_min_eigenvalue: f64,
}

impl ScalingReport {
    /// Applies the superoperator to a single-site operator.
    pub fn apply(&self, phi: &Mat) -> Mat {
        let d = phi.nrows();
        let v = DVector::from_iterator(d * d, (0..d * d).map(|k| phi[(k / d, k % d)]));
        let out = &self.superop * v;
        Mat::from_fn(d, d, |r, col| out[r * d + col])
    }

    /// Eigenoperator for an eigenvalue, as a `d × d` matrix.
    pub fn eigenoperator(&self, lambda: C64) -> Mat {
        let d = (self.superop.nrows() as f64).sqrt().round() as usize;
        let v = &kernel(&self.superop, lambda, 1e-9)[0];
        Mat::from_fn(d, d, |r, col| v[r * d + col])
    }
}

/// `S(φ) = w (I ⊗ φ ⊗ I) w†` for a ternary isometry with equal fine and
/// coarse dimension.
pub fn scaling_superoperator(w: &Mat) -> Result<ScalingReport, MeraError> {
    let dc = w.nrows();
    let d = (w.ncols() as f64).cbrt().round() as usize;
    if d.pow(3) != w.ncols() || dc != d {
        return Err(MeraError::ShapeMismatch("expected a d × d³ ternary isometry".into()));
    }
    if max_abs(&(w * w.adjoint() - eye(dc))) > ISO_TOL {
        return Err(MeraError::NotIsometric);
    }
    // Kraus operators M_{ij}[c, m] = w[c, (i, m, j)]
    let mut s = Mat::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let k = Mat::from_fn(dc, d, |cc, m| w[(cc, (i * d + m) * d + j)]);
            s += kron(&k, &k.map(|z| z.conj()));
        }
    }
    let eigenvalues = eigvals(&s);
    let scaling_dims = eigenvalues
        .iter()
        .filter(|z| z.norm() > 1e-12)
        .map(|z| -z.norm().ln() / 3f64.ln())
        .collect();
    let id = DVector::from_iterator(d * d, (0..d * d).map(|k| c(if k / d == k % d { 1.0 } else { 0.0 })));
    let si = &s * &id;
    let unital_error = (si - id).iter().map(|z| z.norm()).fold(0.0, f64::max);
    // Choi matrix Σ_ab |a⟩⟨b| ⊗ S(|a⟩⟨b|)
    let mut choi = Mat::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            let col = s.column(a * d + b);
            for x in 0..d {
                for y in 0..d {
                    choi[(a * d + x, b * d + y)] = col[x * d + y];
                }
            }
        }
    }
    let herm = (&choi + choi.adjoint()) * c(0.5);
    let choi_min_eigenvalue = eigh(&herm).0[0];
    Ok(ScalingReport {
        superop: s,
        eigenvalues,
        scaling_dims,
        unital_error,
        choi_min_eigenvalue,
    })
}

// causal cones

/// Width of the causal cone of a contiguous operator on sites
/// `start .. start+len` of an infinite ternary chain, before any layer and
/// after each of `depth` layers.
pub fn causal_cone_width(depth: usize, start: i64, len: usize) -> Vec<usize> {
    let mut lo = start;
    let mut hi = start + len as i64 - 1;
    let mut out = vec![len];
    for _ in 0..depth {
        // pairs (3k, 3k+1), blocks {3k+1, 3k+2, 3k+3}
        if lo.rem_euclid(3) == 1 {
            lo -= 1;
        }
        if hi.rem_euclid(3) == 0 {
            hi += 1;
        }
        lo = (lo - 1).div_euclid(3);
        hi = (hi - 1).div_euclid(3);
        out.push((hi - lo + 1) as usize);
    }
    out
}

/// Largest cone width over every placement of the operator; the pattern
/// repeats with period `3^depth`.
pub fn causal_cone_width_max(depth: usize, len: usize) -> Vec<usize> {
    let period = 3i64.pow(depth.min(12) as u32);
    let runs: Vec<Vec<usize>> = (0..period).map(|s| causal_cone_width(depth, s, len)).collect();
    (0..=depth).map(|k| runs.iter().map(|r| r[k]).max().unwrap_or(0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;

    fn plus() -> DVector<C64> {
        DVector::from_element(2, c(std::f64::consts::FRAC_1_SQRT_2))
    }

    #[test]
    fn builtin_layers_are_isometric() {
        assert!(check_isometries(&product_layer()));
        assert!(check_isometries(&ghz_layer()));
        assert!(check_isometries(&cluster_binary_layer()));
        let mut bad = ghz_layer();
        bad.w[(0, 1)] = c(0.3);
        assert!(!check_isometries(&bad));
    }

    #[test]
    fn product_state() {
        let l = product_layer();
        let psi = mera_build(&[l.clone(), l], &plus(), 9).unwrap().to_kron_vector();
        let want = 1.0 / (512f64).sqrt();
        assert!(psi.iter().all(|z| (z - c(want)).norm() < 1e-12));
    }

    #[test]
    fn ghz_state() {
        let l = ghz_layer();
        let psi = mera_build(&[l.clone(), l.clone()], &plus(), 9).unwrap().to_kron_vector();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((psi[0] - c(h)).norm() < 1e-12 && (psi[511] - c(h)).norm() < 1e-12);
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        let s = scaling_superoperator(&l.w).unwrap();
        let z = pauli('Z').unwrap();
        assert!(max_abs(&(s.apply(&z) - &z)) < 1e-12);
    }

    #[test]
    fn cone_widths() {
        assert_eq!(causal_cone_width_max(4, 5), vec![5, 3, 3, 3, 3]);
        // a block-aligned three-site operator keeps width 3
        assert_eq!(causal_cone_width(3, 24, 5), vec![5, 3, 3, 3]);
        assert!(causal_cone_width_max(6, 1).iter().all(|&w| w <= 3));
        let nine = causal_cone_width_max(3, 9);
        assert!(nine[2] <= 3);
    }

    #[test]
    fn descending_matches_small_cases() {
        let l = ghz_layer();
        let rho = descending_superoperator(&[l.clone(), l], &plus(), 9, 4, 2).unwrap();
        let mut want = Mat::zeros(4, 4);
        want[(0, 0)] = c(0.5);
        want[(3, 3)] = c(0.5);
        assert!(max_abs(&(rho - want)) < 1e-12);
        assert!(matches!(descending_superoperator(&[ghz_layer()], &plus(), 3, 0, 4), Err(MeraError::RegionTooLarge(4))));
    }
}
