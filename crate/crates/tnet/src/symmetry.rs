//! Injective uniform MPS: the disentangling circuit, pushing on-site
//! symmetries through to the virtual level, factor systems of projective
//! representations and the resulting phase labels.
//!
//! Uniform tensors are first rescaled so the transfer matrix has spectral
//! radius 1 and then brought to left-canonical gauge (Σ A_i† A_i = I). In
//! that gauge the virtual action of a symmetry is unitary.

use nalgebra::DVector;
use thiserror::Error;

use crate::linalg::{c, eigvals, eye, is_unitary, kernel, kron, max_abs, polar_unitary, sqrtm_psd, Mat};
use crate::mps::{analyze_transfer, left_inverse, normalize_uniform, site_from_matrices, site_matrices, TransferAnalysis};
use crate::tensor::{DenseTensor, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmetryError {
    #[error("tensor is not injective")]
    NotInjective,
    #[error("operator is not a symmetry of the state")]
    NotASymmetry,
    #[error("matrices do not form a projective representation: {0}")]
    NotProjective(String),
    #[error("factor system entry is not a root of unity")]
    NotRootOfUnity,
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("block of {k} sites spans dimension {got}, need at least {need}")]
    BlockTooSmall { k: usize, got: usize, need: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// Injectivity verdict plus the spectral data it was based on.
pub fn injectivity_check(a: &DenseTensor) -> (bool, TransferAnalysis) {
    let t = analyze_transfer(&normalize_uniform(a), None);
    (t.injective, t)
}

/// Rescaled tensor in left-canonical gauge together with the gauge matrix
/// `L` (so `A' = L A L⁻¹`) and the right fixed point in that gauge.
struct Canonical {
    mats: Vec<Mat>,
    gauge: Mat,
    gauge_inv: Mat,
    rho: Mat,
}

fn left_canonical(a: &DenseTensor) -> Result<Canonical, SymmetryError> {
    let an = normalize_uniform(a);
    let t = analyze_transfer(&an, None);
    if !t.injective {
        return Err(SymmetryError::NotInjective);
    }
    let dim = an.shape()[0];
    let l = sqrtm_psd(&t.left_fixed_point);
    let linv = left_inverse(&l).map_err(|_| SymmetryError::NotInjective)?;
    let mut mats: Vec<Mat> = site_matrices(&an).iter().map(|m| &l * m * &linv).collect();
    // fix the scale so that Σ A†A = I exactly
    let s: Mat = mats.iter().map(|m| m.adjoint() * m).sum();
    let scale = (s.trace().re / dim as f64).sqrt();
    for m in &mut mats {
        *m /= c(scale);
    }
    let t2 = analyze_transfer(&site_from_matrices(&mats), None);
    Ok(Canonical {
        mats,
        gauge: l,
        gauge_inv: linv,
        rho: t2.fixed_point_rho,
    })
}

// disentangling circuit

/// Two-layer circuit for a chain blocked into groups of `k` sites: each
/// block is rotated by a unitary completing `block_isometry†`, which maps the
/// block onto two virtual-sized registers, and `bond_unitary` then acts on
/// the pair of registers straddling every block boundary.
#[derive(Clone, Debug)]
pub struct Disentangler {
    /// Isometry `d^k × D²`; columns indexed by `(p1, p2)` with `p1` slowest.
    pub block_isometry: Mat,
    /// Unitary on `D ⊗ D` sending the bond state `Σ √ρ_jk |j,k⟩` to |00⟩.
    pub bond_unitary: Mat,
    /// `1 - |⟨0…0|ψ_out⟩| / ‖ψ_out‖` on a periodic chain of `n_blocks` blocks.
    pub residual_infidelity: f64,
}

/// Builds and evaluates the disentangling circuit for the uniform periodic
/// chain of `n_blocks · k` sites.
pub fn disentangle(a: &DenseTensor, k: usize, n_blocks: usize) -> Result<Disentangler, SymmetryError> {
    let can = left_canonical(a)?;
    let dv = can.mats[0].nrows();
    let d = can.mats.len();
    let dk = d.checked_pow(k as u32).unwrap_or(usize::MAX);
    if k == 0 || dk < dv * dv {
        return Err(SymmetryError::BlockTooSmall { k, got: dk, need: dv * dv });
    }
    if n_blocks == 0 {
        return Err(SymmetryError::ShapeMismatch("no blocks".into()));
    }
    // blocked matrices B_s = A_{s1} … A_{sk}, s1 most significant
    let mut blocks: Vec<Mat> = vec![eye(dv)];
    for _ in 0..k {
        blocks = blocks
            .iter()
            .flat_map(|b| can.mats.iter().map(move |m| b * m))
            .collect();
    }
    let sq = sqrtm_psd(&can.rho);
    let d2 = dv * dv;
    // idealised tensor Ã_{(p1,p2)}[a,b] = √ρ[a,p1] δ[p2,b]; rows q, columns vec(a,b)
    let m_ideal = Mat::from_fn(d2, d2, |q, ab| {
        let (p1, p2) = (q / dv, q % dv);
        let (x, y) = (ab / dv, ab % dv);
        if p2 == y {
            sq[(x, p1)]
        } else {
            c(0.0)
        }
    });
    let m_block = Mat::from_fn(dk, d2, |s, ab| blocks[s][(ab / dv, ab % dv)]);
    let ideal_inv = m_ideal
        .clone()
        .try_inverse()
        .ok_or(SymmetryError::NotInjective)?;
    let w = polar_unitary(&(&m_block * ideal_inv));

    let phi = DVector::from_fn(d2, |q, _| sq[(q / dv, q % dv)]);
    let phi = phi.normalize();
    let bond_unitary = unitary_with_first_row(&phi);

    // C_q = Σ_s conj(W[s,q]) B_s, then G[(a,p1),(b,p1')] = Σ_p2 C_{p1 p2}[a,b] conj(φ[p2,p1'])
    let cq: Vec<Mat> = (0..d2)
        .map(|q| {
            let mut acc = Mat::zeros(dv, dv);
            for (s, b) in blocks.iter().enumerate() {
                let x = w[(s, q)].conj();
                if x != c(0.0) {
                    acc += b * x;
                }
            }
            acc
        })
        .collect();
    let g = Mat::from_fn(d2, d2, |r, col| {
        let (a, p1) = (r / dv, r % dv);
        let (b, p1n) = (col / dv, col % dv);
        (0..dv)
            .map(|p2| cq[p1 * dv + p2][(a, b)] * phi[p2 * dv + p1n].conj())
            .sum()
    });
    let e_block: Mat = blocks.iter().map(|b| kron(b, &b.map(|z| z.conj()))).sum();
    let overlap = g.pow(n_blocks as u32).trace();
    let norm2 = e_block.pow(n_blocks as u32).trace().re;
    let residual = (1.0 - overlap.norm() / norm2.sqrt()).max(0.0);
    Ok(Disentangler {
        block_isometry: w,
        bond_unitary,
        residual_infidelity: residual,
    })
}

/// Unitary whose first row is `φ†`, so it maps `φ` to the first basis vector.
fn unitary_with_first_row(phi: &DVector<C64>) -> Mat {
    let n = phi.len();
    let mut m = Mat::identity(n, n);
    m.set_column(0, phi);
    // fill the remaining columns with the basis vectors least aligned with φ
    let anchor = crate::tensor::phase_anchor(phi.iter().copied());
    let mut col = 1;
    for k in 0..n {
        if k != anchor && col < n {
            let mut e = DVector::zeros(n);
            e[k] = c(1.0);
            m.set_column(col, &e);
            col += 1;
        }
    }
    let mut q = m.qr().q();
    // QR may rotate the phase of the first column
    let ph = q.column(0).dotc(phi);
    let fix = ph / ph.norm();
    for z in q.column_mut(0).iter_mut() {
        *z *= fix;
    }
    q.adjoint()
}

// push-through

#[derive(Clone, Debug)]
pub struct PushThrough {
    /// Virtual action in the gauge of the input tensor: Σ_j u_ij A_j = e^{iθ} v A_i v⁻¹.
    pub v: Mat,
    pub v_inv: Mat,
    /// The same action in left-canonical gauge, where it is unitary.
    pub v_canonical: Mat,
    pub theta: f64,
    /// Largest entrywise deviation of the push-through identity (rescaled tensor).
    pub residual: f64,
}

/// Finds `v` and `θ` with `Σ_j u_ij A_j = e^{iθ} v A_i v†` for an on-site
/// unitary `u`. For a left-canonical input (e.g. AKLT, cluster) `v` is unitary;
/// otherwise the returned `v` is conjugated by the canonicalising gauge.
pub fn push_through(a: &DenseTensor, u: &Mat) -> Result<PushThrough, SymmetryError> {
    let d = a.shape()[1];
    if u.shape() != (d, d) || !is_unitary(u, 1e-10) {
        return Err(SymmetryError::ShapeMismatch("u must be a unitary on the physical leg".into()));
    }
    let can = left_canonical(a)?;
    let dv = can.mats[0].nrows();
    let ua: Vec<Mat> = (0..d)
        .map(|i| {
            let mut acc = Mat::zeros(dv, dv);
            for j in 0..d {
                acc += &can.mats[j] * u[(i, j)];
            }
            acc
        })
        .collect();
    // left map X ↦ Σ_i A_i† X (uA)_i; its unit-circle eigenvector is v†
    let mut lm = Mat::zeros(dv * dv, dv * dv);
    for i in 0..d {
        lm += kron(&can.mats[i].adjoint(), &ua[i].transpose());
    }
    let ev = eigvals(&lm);
    let lambda = ev
        .into_iter()
        .find(|z| z.norm() > 1.0 - 1e-6)
        .ok_or(SymmetryError::NotASymmetry)?;
    let x = &kernel(&lm, lambda, 1e-8)[0];
    let xm = Mat::from_fn(dv, dv, |p, q| x[p * dv + q]);
    let v = polar_unitary(&xm).adjoint();
    let theta = lambda.arg();
    let phase = C64::from_polar(1.0, theta);
    let residual = (0..d)
        .map(|i| max_abs(&(&ua[i] - &v * &can.mats[i] * v.adjoint() * phase)))
        .fold(0.0, f64::max);
    if residual > 1e-6 {
        return Err(SymmetryError::NotASymmetry);
    }
    // back to the input gauge: A = L⁻¹ A' L
    let v_in = &can.gauge_inv * &v * &can.gauge;
    let v_in_inv = &can.gauge_inv * v.adjoint() * &can.gauge;
    Ok(PushThrough {
        v: v_in,
        v_inv: v_in_inv,
        v_canonical: v,
        theta,
        residual,
    })
}

/// Spectral radius of the u-transfer matrix Σ_ij u_ij A_j ⊗ conj(A_i) of the
/// rescaled tensor.
pub fn u_transfer_radius(a: &DenseTensor, u: &Mat) -> f64 {
    let an = normalize_uniform(a);
    let ms = site_matrices(&an);
    let d = ms.len();
    let dv = ms[0].nrows();
    let mut e = Mat::zeros(dv * dv, dv * dv);
    for i in 0..d {
        for j in 0..d {
            if u[(i, j)] != c(0.0) {
                e += kron(&ms[j], &ms[i].map(|z| z.conj())) * u[(i, j)];
            }
        }
    }
    eigvals(&e).first().map(|z| z.norm()).unwrap_or(0.0)
}

// groups and factor systems

/// Finite group given by its multiplication table `table[g][h] = gh`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGroup {
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
}

impl FiniteGroup {
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self, SymmetryError> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(SymmetryError::InvalidGroup("table must be square with entries in range".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| SymmetryError::InvalidGroup("no identity".into()))?;
        for g in 0..n {
            if !(0..n).any(|h| table[g][h] == identity && table[h][g] == identity) {
                return Err(SymmetryError::InvalidGroup(format!("element {} has no inverse", g)));
            }
            for h in 0..n {
                for k in 0..n {
                    if table[table[g][h]][k] != table[g][table[h][k]] {
                        return Err(SymmetryError::InvalidGroup("not associative".into()));
                    }
                }
            }
        }
        Ok(FiniteGroup { table, identity })
    }

    /// Z2×Z2 with elements (e, x, z, xz) = (0, 1, 2, 3).
    pub fn z2xz2() -> Self {
        Self::new((0..4).map(|g| (0..4).map(|h| g ^ h).collect()).collect()).expect("valid group")
    }

    /// Cyclic group Z_n.
    pub fn cyclic(n: usize) -> Self {
        Self::new((0..n).map(|g| (0..n).map(|h| (g + h) % n).collect()).collect()).expect("valid group")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    fn is_z2xz2(&self) -> bool {
        self.order() == 4
            && (0..4).all(|g| self.mul(g, g) == self.identity)
            && (0..4).all(|g| (0..4).all(|h| self.mul(g, h) == self.mul(h, g)))
    }
}

#[derive(Clone, Debug)]
pub struct ProjectiveRep {
    pub group: FiniteGroup,
    pub unitaries: Vec<Mat>,
}

impl ProjectiveRep {
    pub fn new(group: FiniteGroup, unitaries: Vec<Mat>) -> Result<Self, SymmetryError> {
        if unitaries.len() != group.order() {
            return Err(SymmetryError::ShapeMismatch("one matrix per group element".into()));
        }
        let dim = unitaries[0].nrows();
        for u in &unitaries {
            if u.shape() != (dim, dim) || !is_unitary(u, 1e-10) {
                return Err(SymmetryError::NotProjective("matrices must be unitary of equal size".into()));
            }
        }
        Ok(Self { group, unitaries })
    }
}

/// Phases ω[g][h] with v_g v_h = ω[g][h] v_{gh}.
#[derive(Clone, Debug)]
pub struct FactorSystem {
    pub omega: Vec<Vec<C64>>,
}

impl FactorSystem {
    /// Largest violation of ω[g,h] ω[gh,k] = ω[g,hk] ω[h,k].
    pub fn cocycle_error(&self, group: &FiniteGroup) -> f64 {
        let n = group.order();
        let w = &self.omega;
        let mut err: f64 = 0.0;
        for g in 0..n {
            for h in 0..n {
                for k in 0..n {
                    let lhs = w[g][h] * w[group.mul(g, h)][k];
                    let rhs = w[g][group.mul(h, k)] * w[h][k];
                    err = err.max((lhs - rhs).norm());
                }
            }
        }
        err
    }

    /// ω[g,h]/ω[h,g], invariant under rephasing when g and h commute.
    pub fn commutator(&self, g: usize, h: usize) -> C64 {
        self.omega[g][h] / self.omega[h][g]
    }
}

pub fn factor_system(rep: &ProjectiveRep) -> Result<FactorSystem, SymmetryError> {
    let n = rep.group.order();
    let mut omega = vec![vec![c(1.0); n]; n];
    for g in 0..n {
        for h in 0..n {
            let prod = &rep.unitaries[g] * &rep.unitaries[h];
            let target = &rep.unitaries[rep.group.mul(g, h)];
            let idx = crate::tensor::phase_anchor(target.iter().copied());
            let w = prod.as_slice()[idx] / target.as_slice()[idx];
            if max_abs(&(&prod - target * w)) > 1e-8 || (w.norm() - 1.0).abs() > 1e-8 {
                return Err(SymmetryError::NotProjective(format!("v_{} v_{} not proportional to v_{}", g, h, rep.group.mul(g, h))));
            }
            omega[g][h] = w;
        }
    }
    let fs = FactorSystem { omega };
    if fs.cocycle_error(&rep.group) > 1e-8 {
        return Err(SymmetryError::NotProjective("cocycle condition fails".into()));
    }
    Ok(fs)
}

/// Largest root-of-unity order searched by [`is_coboundary`].
pub const MAX_ROOT_ORDER: usize = 4096;

/// Whether ω = β[g]β[h]/β[gh] for some phases β. The entries of ω must be
/// roots of unity; if ω takes values in the N-th roots, any solution β can be
/// taken in the (N·|G|)-th roots, so the question becomes a linear system
/// over the integers modulo N·|G|.
pub fn is_coboundary(fs: &FactorSystem, group: &FiniteGroup) -> Result<bool, SymmetryError> {
    let n = group.order();
    let entries: Vec<C64> = fs.omega.iter().flatten().copied().collect();
    let order = (1..=MAX_ROOT_ORDER)
        .find(|&m| entries.iter().all(|w| (w.powu(m as u32) - c(1.0)).norm() < 1e-8))
        .ok_or(SymmetryError::NotRootOfUnity)?;
    let modulus = (order * n) as i64;
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut rows = Vec::with_capacity(n * n);
    let mut rhs = Vec::with_capacity(n * n);
    for g in 0..n {
        for h in 0..n {
            let w = fs.omega[g][h];
            let k = (w.arg() / two_pi * order as f64).round() as i64;
            let k = k.rem_euclid(order as i64);
            let mut row = vec![0i64; n];
            row[g] += 1;
            row[h] += 1;
            row[group.mul(g, h)] -= 1;
            rows.push(row);
            rhs.push(k * n as i64);
        }
    }
    Ok(solvable_mod(rows, rhs, modulus))
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Bézout coefficients for a 2×2 unimodular step; a plain elimination when
/// `p` already divides `q`, so a settled pivot never moves.
fn bezout_step(p: i64, q: i64) -> (i64, i64, i64) {
    if q % p == 0 {
        (p, 1, 0)
    } else {
        ext_gcd(p, q)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    ext_gcd(a.abs(), b.abs()).0
}

/// Whether `A x ≡ y (mod m)` has an integer solution, by diagonalising `A`
/// with unimodular row and column operations carried out modulo `m`.
pub(crate) fn solvable_mod(mut a: Vec<Vec<i64>>, mut y: Vec<i64>, m: i64) -> bool {
    let rows = a.len();
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    for r in a.iter_mut() {
        for v in r.iter_mut() {
            *v = v.rem_euclid(m);
        }
    }
    for v in y.iter_mut() {
        *v = v.rem_euclid(m);
    }
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: any nonzero entry in the remaining block
        let Some((pr, pc)) = (t..rows)
            .flat_map(|r| (t..cols).map(move |cc| (r, cc)))
            .find(|&(r, cc)| a[r][cc] != 0)
        else {
            break;
        };
        a.swap(t, pr);
        y.swap(t, pr);
        for r in a.iter_mut() {
            r.swap(t, pc);
        }
        loop {
            // clear column t below the pivot with row operations
            for r in t + 1..rows {
                if a[r][t] != 0 {
                    let (p, q) = (a[t][t], a[r][t]);
                    let (g, s, u) = bezout_step(p, q);
                    let (pg, qg) = (p / g, q / g);
                    for cc in 0..cols {
                        let (x, z) = (a[t][cc], a[r][cc]);
                        a[t][cc] = (s * x + u * z).rem_euclid(m);
                        a[r][cc] = (-qg * x + pg * z).rem_euclid(m);
                    }
                    let (x, z) = (y[t], y[r]);
                    y[t] = (s * x + u * z).rem_euclid(m);
                    y[r] = (-qg * x + pg * z).rem_euclid(m);
                }
            }
            // clear row t right of the pivot with column operations
            for cc in t + 1..cols {
                if a[t][cc] != 0 {
                    let (p, q) = (a[t][t], a[t][cc]);
                    let (g, s, u) = bezout_step(p, q);
                    let (pg, qg) = (p / g, q / g);
                    for row in a.iter_mut() {
                        let (x, z) = (row[t], row[cc]);
                        row[t] = (s * x + u * z).rem_euclid(m);
                        row[cc] = (-qg * x + pg * z).rem_euclid(m);
                    }
                }
            }
            if (t + 1..rows).all(|r| a[r][t] == 0) {
                break;
            }
        }
        t += 1;
    }
    for r in 0..rows {
        let piv = if r < cols { a[r][r] } else { 0 };
        let g = gcd(piv, m);
        if y[r] % g != 0 {
            return false;
        }
    }
    true
}

/// Result of classifying an injective MPS under an on-site group action.
#[derive(Clone, Debug)]
pub struct PhaseLabel {
    pub factor_system: FactorSystem,
    /// Virtual actions v_g in left-canonical gauge, rephased to unit determinant.
    pub virtual_reps: Vec<Mat>,
    pub trivial: bool,
    /// ω[x,z]/ω[z,x] for Z2×Z2 (elements 1 and 2).
    pub commutator: Option<C64>,
    pub max_residual: f64,
}

/// Pushes every `u_g` through the tensor and classifies the resulting
/// projective representation.
pub fn classify_phase(a: &DenseTensor, group: &FiniteGroup, reps: &[Mat]) -> Result<PhaseLabel, SymmetryError> {
    if reps.len() != group.order() {
        return Err(SymmetryError::ShapeMismatch("one unitary per group element".into()));
    }
    let mut vs = Vec::with_capacity(reps.len());
    let mut max_residual: f64 = 0.0;
    for u in reps {
        let p = push_through(a, u)?;
        max_residual = max_residual.max(p.residual);
        vs.push(unit_determinant(&p.v_canonical));
    }
    let rep = ProjectiveRep::new(group.clone(), vs.clone())?;
    let fs = factor_system(&rep)?;
    let trivial = is_coboundary(&fs, group)?;
    let commutator = if group.is_z2xz2() { Some(fs.commutator(1, 2)) } else { None };
    Ok(PhaseLabel {
        factor_system: fs,
        virtual_reps: vs,
        trivial,
        commutator,
        max_residual,
    })
}

/// Rescales a unitary so its determinant is 1; the factor system then takes
/// values in the D-th roots of unity.
fn unit_determinant(v: &Mat) -> Mat {
    let det = v.determinant();
    let dim = v.nrows() as f64;
    let phase = C64::from_polar(1.0, -det.arg() / dim);
    v * phase
}
