//! Matrix product operators and the particle-decay compiler.
//!
//! An MPO site tensor has legs `(left bond, right bond, out, in)`, so the
//! operator-valued matrix entry `M[a][b]` is the `d×d` block `W[a, b, :, :]`.
//! The dense operator is `v_Lᵀ M_0 M_1 … M_{n-1} v_R` with Kronecker products
//! taken between the operator entries.
//!
//! Decay rule sets describe a finite automaton on the virtual index: a
//! particle enters from the left boundary and has to reach the vacuum at the
//! right boundary, emitting local operators along the way. In 2D the particle
//! enters through a W superposition on the left column and the remaining
//! boundaries are fixed to the vacuum.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::exact::{OpSum, ProductTerm};
use crate::linalg::{c, eye, kron, pauli, Mat};
use crate::mps::{Boundary, MatrixProductState};
use crate::tensor::{DenseTensor, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MpoError {
    #[error("invalid rule: {0}")]
    InvalidRule(String),
    #[error("unknown rule set: {0}")]
    UnknownRuleset(String),
    #[error("lattice {width}x{height} too large for exact contraction")]
    LatticeTooLarge { width: usize, height: usize },
    #[error("dense operator of dimension {0} too large")]
    TooLarge(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// Largest Hilbert dimension accepted by [`mpo_to_dense`].
pub const DENSE_LIMIT: usize = 1 << 12;

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixProductOperator {
    pub sites: Vec<DenseTensor>,
    pub left: Vec<C64>,
    pub right: Vec<C64>,
}

impl MatrixProductOperator {
    pub fn new(sites: Vec<DenseTensor>, left: Vec<C64>, right: Vec<C64>) -> Result<Self, MpoError> {
        if sites.is_empty() {
            return Err(MpoError::ShapeMismatch("no sites".into()));
        }
        for (k, w) in sites.iter().enumerate() {
            let s = w.shape();
            if s.len() != 4 || s[2] != s[3] {
                return Err(MpoError::ShapeMismatch(format!("site {} has shape {:?}", k, s)));
            }
            if k + 1 < sites.len() && s[1] != sites[k + 1].shape()[0] {
                return Err(MpoError::ShapeMismatch(format!("bond {} mismatch", k)));
            }
        }
        if left.len() != sites[0].shape()[0] || right.len() != sites[sites.len() - 1].shape()[1] {
            return Err(MpoError::ShapeMismatch("boundary vectors".into()));
        }
        Ok(Self { sites, left, right })
    }

    /// `n` copies of the operator-valued matrix `m` (row-major grid of d×d
    /// blocks, `None` for zero entries).
    pub fn uniform(m: &[Vec<Option<Mat>>], n: usize, left: Vec<C64>, right: Vec<C64>) -> Result<Self, MpoError> {
        let w = site_from_grid(m)?;
        Self::new(vec![w; n], left, right)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn phys_dim(&self, k: usize) -> usize {
        self.sites[k].shape()[2]
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        self.sites.iter().map(|w| w.shape()[1]).collect()
    }

    pub fn max_bond(&self) -> usize {
        self.sites.iter().map(|w| w.shape()[0].max(w.shape()[1])).max().unwrap_or(1)
    }

    /// The operator entry `M_k[a][b]`.
    pub fn entry(&self, k: usize, a: usize, b: usize) -> Mat {
        let w = &self.sites[k];
        let d = w.shape()[2];
        Mat::from_fn(d, d, |i, j| w.get(&[a, b, i, j]))
    }
}

fn site_from_grid(m: &[Vec<Option<Mat>>]) -> Result<DenseTensor, MpoError> {
    let dl = m.len();
    let dr = m.first().map(|r| r.len()).unwrap_or(0);
    let d = m
        .iter()
        .flatten()
        .flatten()
        .map(|o| o.nrows())
        .next()
        .ok_or_else(|| MpoError::ShapeMismatch("all entries zero".into()))?;
    for row in m {
        if row.len() != dr {
            return Err(MpoError::ShapeMismatch("ragged operator matrix".into()));
        }
        for o in row.iter().flatten() {
            if o.shape() != (d, d) {
                return Err(MpoError::ShapeMismatch("operator entries differ in size".into()));
            }
        }
    }
    Ok(DenseTensor::from_fn(&[dl, dr, d, d], |ix| match &m[ix[0]][ix[1]] {
        Some(o) => o[(ix[2], ix[3])],
        None => c(0.0),
    }))
}

fn unit(n: usize, k: usize) -> Vec<C64> {
    let mut v = vec![c(0.0); n];
    v[k] = c(1.0);
    v
}

fn p(name: char) -> Mat {
    pauli(name).expect("Pauli name")
}

/// `-j Σ X_i X_{i+1} - h Σ Z_i` with index order (·, 1, →).
pub fn build_tfim_mpo(j: f64, h: f64, n: usize) -> MatrixProductOperator {
    let (x, z, i) = (p('X'), p('Z'), eye(2));
    let m = vec![
        vec![Some(i.clone()), None, None],
        vec![Some(x.clone()), None, None],
        vec![Some(z * c(-h)), Some(x * c(-j)), Some(i)],
    ];
    MatrixProductOperator::uniform(&m, n, unit(3, 2), unit(3, 0)).expect("valid")
}

/// `-Σ_α j_α Σ α_i α_{i+1} - h Σ Z_i` with index order (·, x, y, z, →).
pub fn build_heisenberg_mpo(jx: f64, jy: f64, jz: f64, h: f64, n: usize) -> MatrixProductOperator {
    let (x, y, z, i) = (p('X'), p('Y'), p('Z'), eye(2));
    let m = vec![
        vec![Some(i.clone()), None, None, None, None],
        vec![Some(x.clone()), None, None, None, None],
        vec![Some(y.clone()), None, None, None, None],
        vec![Some(z.clone()), None, None, None, None],
        vec![
            Some(z.clone() * c(-h)),
            Some(x * c(-jx)),
            Some(y * c(-jy)),
            Some(z * c(-jz)),
            Some(i),
        ],
    ];
    MatrixProductOperator::uniform(&m, n, unit(5, 4), unit(5, 0)).expect("valid")
}

/// `-j Σ Z_{i-1} X_i Z_{i+1} - h Σ X_i` on an open chain, bond dimension 4,
/// index order (·, 1, 2, →).
pub fn build_cluster_mpo(j: f64, h: f64, n: usize) -> MatrixProductOperator {
    let (x, z, i) = (p('X'), p('Z'), eye(2));
    let m = vec![
        vec![Some(i.clone()), None, None, None],
        vec![Some(z.clone()), None, None, None],
        vec![None, Some(x.clone()), None, None],
        vec![Some(x * c(-h)), None, Some(z * c(-j)), Some(i)],
    ];
    MatrixProductOperator::uniform(&m, n, unit(4, 3), unit(4, 0)).expect("valid")
}

/// Dense operator in Kronecker order (site 0 most significant).
pub fn mpo_to_dense(mpo: &MatrixProductOperator) -> Result<Mat, MpoError> {
    let total = (0..mpo.len()).fold(1usize, |acc, k| acc.saturating_mul(mpo.phys_dim(k)));
    if total > DENSE_LIMIT {
        return Err(MpoError::TooLarge(total));
    }
    // acc[b] = (v_Lᵀ M_0 … M_k)[b] as a dense operator
    let mut acc: Vec<Option<Mat>> = mpo
        .left
        .iter()
        .map(|&v| if v == c(0.0) { None } else { Some(Mat::from_element(1, 1, v)) })
        .collect();
    for k in 0..mpo.len() {
        let s = mpo.sites[k].shape().to_vec();
        let mut next: Vec<Option<Mat>> = vec![None; s[1]];
        for (a, la) in acc.iter().enumerate() {
            let Some(la) = la else { continue };
            for (b, slot) in next.iter_mut().enumerate() {
                let e = mpo.entry(k, a, b);
                if e.iter().all(|z| *z == c(0.0)) {
                    continue;
                }
                let term = kron(la, &e);
                *slot = Some(match slot.take() {
                    Some(t) => t + term,
                    None => term,
                });
            }
        }
        acc = next;
    }
    let mut out = Mat::zeros(total, total);
    for (b, lb) in acc.iter().enumerate() {
        if let Some(lb) = lb {
            out += lb * mpo.right[b];
        }
    }
    Ok(out)
}

/// MPO applied to an open-boundary MPS; bond dimensions multiply with the
/// combined index `a·D_mps + α`.
pub fn apply_mpo(mpo: &MatrixProductOperator, mps: &MatrixProductState) -> Result<MatrixProductState, MpoError> {
    if mpo.len() != mps.len() {
        return Err(MpoError::ShapeMismatch(format!("{} MPO sites vs {} MPS sites", mpo.len(), mps.len())));
    }
    let Boundary::Open { left, right } = &mps.boundary else {
        return Err(MpoError::ShapeMismatch("MPS must have open boundaries".into()));
    };
    let mut sites = Vec::with_capacity(mps.len());
    for k in 0..mps.len() {
        let w = &mpo.sites[k];
        let a = &mps.sites[k];
        let (ws, as_) = (w.shape(), a.shape());
        if ws[3] != as_[1] {
            return Err(MpoError::ShapeMismatch(format!("physical dimension at site {}", k)));
        }
        let (wl, wr, d, din) = (ws[0], ws[1], ws[2], ws[3]);
        let (al, ar) = (as_[0], as_[2]);
        sites.push(DenseTensor::from_fn(&[wl * al, d, wr * ar], |ix| {
            let (x, alpha) = (ix[0] / al, ix[0] % al);
            let (y, beta) = (ix[2] / ar, ix[2] % ar);
            let mut s = c(0.0);
            for j in 0..din {
                s += w.get(&[x, y, ix[1], j]) * a.get(&[alpha, j, beta]);
            }
            s
        }));
    }
    let combine = |u: &[C64], v: &[C64]| u.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect::<Vec<_>>();
    MatrixProductState::new(
        sites,
        Boundary::Open {
            left: combine(&mpo.left, left),
            right: combine(&mpo.right, right),
        },
    )
    .map_err(|e| MpoError::ShapeMismatch(e.to_string()))
}

// decay rules

/// Local operator of a rule: a Pauli name or an explicit matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum OpSpec {
    Named(char),
    Matrix(Mat),
}

impl OpSpec {
    pub fn matrix(&self) -> Result<Mat, MpoError> {
        match self {
            OpSpec::Named(n) => pauli(*n).ok_or_else(|| MpoError::InvalidRule(format!("unknown operator {}", n))),
            OpSpec::Matrix(m) => Ok(m.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayRule {
    pub left: String,
    pub right: String,
    pub up: Option<String>,
    pub down: Option<String>,
    pub op: OpSpec,
    pub coef: C64,
}

impl DecayRule {
    pub fn d1(left: &str, right: &str, op: char, coef: f64) -> Self {
        DecayRule {
            left: left.into(),
            right: right.into(),
            up: None,
            down: None,
            op: OpSpec::Named(op),
            coef: c(coef),
        }
    }

    /// 2D rule with legs given in the order (left, right, up, down).
    pub fn d2(legs: [&str; 4], op: char, coef: f64) -> Self {
        DecayRule {
            left: legs[0].into(),
            right: legs[1].into(),
            up: Some(legs[2].into()),
            down: Some(legs[3].into()),
            op: OpSpec::Named(op),
            coef: c(coef),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayRuleSet {
    pub dimension: usize,
    pub index_names: Vec<String>,
    pub vacuum: String,
    pub particle: String,
    pub rules: Vec<DecayRule>,
    pub auto_stable: bool,
}

/// A rule with its legs resolved to index positions.
struct Resolved {
    legs: Vec<usize>,
    op: Mat,
}

impl DecayRuleSet {
    fn index_of(&self, name: &str) -> Result<usize, MpoError> {
        self.index_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| MpoError::InvalidRule(format!("unknown index {:?}", name)))
    }

    /// Checks the invariants and returns the local dimension.
    pub fn validate(&self) -> Result<usize, MpoError> {
        if self.dimension != 1 && self.dimension != 2 {
            return Err(MpoError::InvalidRule(format!("dimension {}", self.dimension)));
        }
        for (k, n) in self.index_names.iter().enumerate() {
            if self.index_names[..k].contains(n) {
                return Err(MpoError::InvalidRule(format!("duplicate index {:?}", n)));
            }
        }
        if self.vacuum == self.particle {
            return Err(MpoError::InvalidRule("vacuum and particle coincide".into()));
        }
        self.index_of(&self.vacuum)?;
        self.index_of(&self.particle)?;
        let mut d = None;
        for r in &self.rules {
            let has_vertical = r.up.is_some() || r.down.is_some();
            if (self.dimension == 1) == has_vertical || (self.dimension == 2 && (r.up.is_none() || r.down.is_none())) {
                return Err(MpoError::InvalidRule(format!(
                    "rule {}|{} does not match dimension {}",
                    r.left, r.right, self.dimension
                )));
            }
            for leg in [Some(&r.left), Some(&r.right), r.up.as_ref(), r.down.as_ref()].into_iter().flatten() {
                self.index_of(leg)?;
            }
            let m = r.op.matrix()?;
            if !m.is_square() || *d.get_or_insert(m.nrows()) != m.nrows() {
                return Err(MpoError::InvalidRule("operators must be square and of equal size".into()));
            }
        }
        Ok(d.unwrap_or(2))
    }

    fn resolve(&self) -> Result<(usize, Vec<Resolved>), MpoError> {
        let d = self.validate()?;
        let mut out = Vec::new();
        for r in &self.rules {
            let mut legs = vec![self.index_of(&r.left)?, self.index_of(&r.right)?];
            if self.dimension == 2 {
                legs.push(self.index_of(r.up.as_deref().unwrap_or_default())?);
                legs.push(self.index_of(r.down.as_deref().unwrap_or_default())?);
            }
            out.push(Resolved {
                legs,
                op: r.op.matrix()? * r.coef,
            });
        }
        if self.auto_stable {
            let v = self.index_of(&self.vacuum)?;
            let p = self.index_of(&self.particle)?;
            let stable = if self.dimension == 1 {
                vec![vec![v, v], vec![p, p]]
            } else {
                vec![vec![v, v, v, v], vec![p, p, v, v]]
            };
            for legs in stable {
                if !out.iter().any(|r| r.legs == legs) {
                    out.push(Resolved { legs, op: eye(d) });
                }
            }
        }
        Ok((d, out))
    }

    /// Site tensor with legs (left, right[, up, down], out, in).
    fn site_tensor(&self) -> Result<(usize, DenseTensor), MpoError> {
        let (d, rules) = self.resolve()?;
        let nv = self.index_names.len();
        let mut shape = vec![nv; 2 * self.dimension];
        shape.extend([d, d]);
        let mut t = DenseTensor::zeros(&shape);
        let mut idx = vec![0; shape.len()];
        for r in &rules {
            idx[..r.legs.len()].copy_from_slice(&r.legs);
            for i in 0..d {
                for j in 0..d {
                    idx[r.legs.len()] = i;
                    idx[r.legs.len() + 1] = j;
                    let v = t.get(&idx) + r.op[(i, j)];
                    t.set(&idx, v);
                }
            }
        }
        Ok((d, t))
    }
}

/// Compiles a 1D rule set to an `n`-site MPO with the particle on the left
/// boundary and the vacuum on the right.
pub fn compile_decay_1d(rules: &DecayRuleSet, n: usize) -> Result<MatrixProductOperator, MpoError> {
    if rules.dimension != 1 {
        return Err(MpoError::InvalidRule("expected a 1D rule set".into()));
    }
    if n == 0 {
        return Err(MpoError::ShapeMismatch("empty chain".into()));
    }
    let (_, w) = rules.site_tensor()?;
    let nv = rules.index_names.len();
    let left = unit(nv, rules.index_of(&rules.particle)?);
    let right = unit(nv, rules.index_of(&rules.vacuum)?);
    MatrixProductOperator::new(vec![w; n], left, right)
}

/// Number of virtual index sequences `(i_0, …, i_n)` with `i_0` the particle,
/// every transition carrying a nonzero operator, and the final index the
/// vacuum (`right_free = false`) or either vacuum or particle.
pub fn count_decay_configs(rules: &DecayRuleSet, n: usize, right_free: bool) -> Result<u64, MpoError> {
    let (_, w) = rules.site_tensor()?;
    let nv = rules.index_names.len();
    let d = w.shape()[2];
    let nonzero = |a: usize, b: usize| (0..d).any(|i| (0..d).any(|j| w.get(&[a, b, i, j]) != c(0.0)));
    let vac = rules.index_of(&rules.vacuum)?;
    let part = rules.index_of(&rules.particle)?;
    let mut counts = vec![0u64; nv];
    counts[part] = 1;
    for _ in 0..n {
        let mut next = vec![0u64; nv];
        for a in 0..nv {
            for (b, slot) in next.iter_mut().enumerate() {
                if counts[a] > 0 && nonzero(a, b) {
                    *slot += counts[a];
                }
            }
        }
        counts = next;
    }
    Ok(if right_free { counts[vac] + counts[part] } else { counts[vac] })
}

/// Compiled 2D rule set on a `width × height` lattice. Sites are numbered
/// row-major from the top-left corner.
#[derive(Clone, Debug)]
pub struct PepoLattice {
    pub width: usize,
    pub height: usize,
    /// Legs (left, right, up, down, out, in); the same tensor on every site.
    pub tensors: Vec<DenseTensor>,
    pub vacuum: usize,
    pub particle: usize,
    pub phys_dim: usize,
}

impl PepoLattice {
    pub fn tensor(&self, row: usize, col: usize) -> &DenseTensor {
        &self.tensors[row * self.width + col]
    }

    pub fn virtual_dim(&self) -> usize {
        self.tensors[0].shape()[0]
    }

    pub fn n_sites(&self) -> usize {
        self.width * self.height
    }
}

pub fn compile_decay_2d(rules: &DecayRuleSet, width: usize, height: usize) -> Result<PepoLattice, MpoError> {
    if rules.dimension != 2 {
        return Err(MpoError::InvalidRule("expected a 2D rule set".into()));
    }
    if width == 0 || height == 0 {
        return Err(MpoError::ShapeMismatch("empty lattice".into()));
    }
    let (d, t) = rules.site_tensor()?;
    Ok(PepoLattice {
        width,
        height,
        tensors: vec![t; width * height],
        vacuum: rules.index_of(&rules.vacuum)?,
        particle: rules.index_of(&rules.particle)?,
        phys_dim: d,
    })
}

/// Frontier of the row-major sweep: the index entering the next site from
/// the left, the vertical index below each column, and whether the particle
/// has already entered through the left column.
type Frontier = (usize, Vec<usize>, bool);

/// Row-major transfer sweep shared by the dense and the term contraction.
/// `extend(value, op)` appends the operator of the next site.
fn sweep_pepo<V: Clone>(
    lat: &PepoLattice,
    start: V,
    mut extend: impl FnMut(&V, Mat) -> V,
    mut merge: impl FnMut(&mut V, V),
) -> Option<V> {
    let nv = lat.virtual_dim();
    let d = lat.phys_dim;
    let (vac, part) = (lat.vacuum, lat.particle);
    let mut states: BTreeMap<Frontier, V> = BTreeMap::new();
    states.insert((vac, vec![vac; lat.width], false), start);
    for r in 0..lat.height {
        for col in 0..lat.width {
            let t = lat.tensor(r, col);
            let mut next: BTreeMap<Frontier, V> = BTreeMap::new();
            for ((h, verts, injected), val) in &states {
                let lefts: Vec<(usize, bool)> = if col == 0 {
                    let mut l = vec![(vac, *injected)];
                    if !injected {
                        l.push((part, true));
                    }
                    l
                } else {
                    vec![(*h, *injected)]
                };
                for (l, inj) in lefts {
                    let u = verts[col];
                    for rt in 0..nv {
                        if col + 1 == lat.width && rt != vac {
                            continue;
                        }
                        for dn in 0..nv {
                            if r + 1 == lat.height && dn != vac {
                                continue;
                            }
                            let op = Mat::from_fn(d, d, |i, j| t.get(&[l, rt, u, dn, i, j]));
                            if op.iter().all(|z| *z == c(0.0)) {
                                continue;
                            }
                            let mut vs = verts.clone();
                            vs[col] = dn;
                            let nval = extend(val, op);
                            match next.get_mut(&(rt, vs.clone(), inj)) {
                                Some(existing) => merge(existing, nval),
                                None => {
                                    next.insert((rt, vs, inj), nval);
                                }
                            }
                        }
                    }
                }
            }
            states = next;
        }
    }
    let mut out: Option<V> = None;
    for ((_, _, injected), val) in states {
        if injected {
            match out.as_mut() {
                Some(o) => merge(o, val),
                None => out = Some(val),
            }
        }
    }
    out
}

/// Largest lattice side accepted by the exact contractions.
pub const MAX_LATTICE_SIDE: usize = 4;
/// Largest number of sites for [`pepo_to_dense`].
pub const MAX_DENSE_SITES: usize = 10;

fn check_lattice(lat: &PepoLattice) -> Result<(), MpoError> {
    if lat.width > MAX_LATTICE_SIDE || lat.height > MAX_LATTICE_SIDE {
        return Err(MpoError::LatticeTooLarge {
            width: lat.width,
            height: lat.height,
        });
    }
    Ok(())
}

/// Exact contraction of the PEPO with the physical legs left open, as a dense
/// operator on `width·height` sites in row-major Kronecker order.
pub fn pepo_to_dense(lat: &PepoLattice) -> Result<Mat, MpoError> {
    check_lattice(lat)?;
    if lat.n_sites() > MAX_DENSE_SITES {
        return Err(MpoError::LatticeTooLarge {
            width: lat.width,
            height: lat.height,
        });
    }
    let dim = lat.phys_dim.pow(lat.n_sites() as u32);
    let res = sweep_pepo(lat, Mat::from_element(1, 1, c(1.0)), |v, op| kron(v, &op), |a, b| *a += b);
    Ok(res.unwrap_or_else(|| Mat::zeros(dim, dim)))
}

/// Exact contraction of the PEPO as a sum of product operators, usable on
/// lattices up to 4×4 through [`OpSum::apply`].
pub fn pepo_terms(lat: &PepoLattice) -> Result<OpSum, MpoError> {
    check_lattice(lat)?;
    let d = lat.phys_dim;
    let id = eye(d);
    type Partial = Vec<(C64, Vec<Mat>)>;
    let res = sweep_pepo(
        lat,
        vec![(c(1.0), Vec::new())] as Partial,
        |v, op| {
            v.iter()
                .map(|(cf, ops)| {
                    let mut ops = ops.clone();
                    ops.push(op.clone());
                    (*cf, ops)
                })
                .collect()
        },
        |a, b| a.extend(b),
    );
    let mut sum = OpSum::new(lat.n_sites(), d);
    for (cf, ops) in res.unwrap_or_default() {
        let ops = ops
            .into_iter()
            .enumerate()
            .filter(|(_, o)| *o != id)
            .collect();
        sum.push(ProductTerm::new(cf, ops));
    }
    Ok(sum)
}

// builtin rule sets

const VAC: &str = ".";
const PART: &str = ">";

fn names(extra: &[&str]) -> Vec<String> {
    let mut v = vec![VAC.to_string()];
    v.extend(extra.iter().map(|s| s.to_string()));
    v.push(PART.to_string());
    v
}

fn ruleset(dimension: usize, extra: &[&str], rules: Vec<DecayRule>) -> DecayRuleSet {
    DecayRuleSet {
        dimension,
        index_names: names(extra),
        vacuum: VAC.into(),
        particle: PART.into(),
        rules,
        auto_stable: true,
    }
}

/// Names accepted by [`builtin_ruleset`].
pub const BUILTIN_RULESETS: [&str; 9] = [
    "tfim1d",
    "heisenberg1d",
    "cluster1d",
    "field2d",
    "plaquette9",
    "wen_toric",
    "compass",
    "tfim2d",
    "cluster2d",
];

/// `-j Σ XX - h Σ Z`, index names (".", "1", ">").
pub fn tfim_rules(j: f64, h: f64) -> DecayRuleSet {
    ruleset(
        1,
        &["1"],
        vec![
            DecayRule::d1(VAC, VAC, 'I', 1.0),
            DecayRule::d1(PART, PART, 'I', 1.0),
            DecayRule::d1(PART, "1", 'X', -j),
            DecayRule::d1("1", VAC, 'X', 1.0),
            DecayRule::d1(PART, VAC, 'Z', -h),
        ],
    )
}

/// `-Σ_α j_α Σ αα - h Σ Z`, index names (".", "x", "y", "z", ">").
pub fn heisenberg_rules(jx: f64, jy: f64, jz: f64, h: f64) -> DecayRuleSet {
    ruleset(
        1,
        &["x", "y", "z"],
        vec![
            DecayRule::d1(VAC, VAC, 'I', 1.0),
            DecayRule::d1(PART, PART, 'I', 1.0),
            DecayRule::d1(PART, "x", 'X', -jx),
            DecayRule::d1("x", VAC, 'X', 1.0),
            DecayRule::d1(PART, "y", 'Y', -jy),
            DecayRule::d1("y", VAC, 'Y', 1.0),
            DecayRule::d1(PART, "z", 'Z', -jz),
            DecayRule::d1("z", VAC, 'Z', 1.0),
            DecayRule::d1(PART, VAC, 'Z', -h),
        ],
    )
}

/// Operators placed by the nine plaquette rules, row-major over the 3×3 block.
pub const PLAQUETTE9_OPS: [[char; 3]; 3] = [['X', 'Y', 'Z'], ['Z', 'X', 'Y'], ['Y', 'Z', 'X']];

/// The rule table for `name` with unit couplings.
pub fn builtin_ruleset(name: &str) -> Result<DecayRuleSet, MpoError> {
    let v = VAC;
    let pt = PART;
    Ok(match name {
        "tfim1d" => tfim_rules(1.0, 1.0),
        "heisenberg1d" => heisenberg_rules(1.0, 1.0, 1.0, 1.0),
        "cluster1d" => ruleset(
            1,
            &["1", "2"],
            vec![
                DecayRule::d1(v, v, 'I', 1.0),
                DecayRule::d1(pt, pt, 'I', 1.0),
                DecayRule::d1(pt, "2", 'Z', 1.0),
                DecayRule::d1("2", "1", 'X', 1.0),
                DecayRule::d1("1", v, 'Z', 1.0),
            ],
        ),
        "field2d" => ruleset(2, &[], vec![DecayRule::d2([pt, v, v, v], 'Z', 1.0)]),
        "plaquette9" => {
            let o = PLAQUETTE9_OPS;
            ruleset(
                2,
                &["1", "2"],
                vec![
                    DecayRule::d2([pt, "2", v, "2"], o[0][0], 1.0),
                    DecayRule::d2(["2", "1", v, "2"], o[0][1], 1.0),
                    DecayRule::d2(["1", v, v, "2"], o[0][2], 1.0),
                    DecayRule::d2([v, "2", "2", "1"], o[1][0], 1.0),
                    DecayRule::d2(["2", "1", "2", "1"], o[1][1], 1.0),
                    DecayRule::d2(["1", v, "2", "1"], o[1][2], 1.0),
                    DecayRule::d2([v, "2", "1", v], o[2][0], 1.0),
                    DecayRule::d2(["2", "1", "1", v], o[2][1], 1.0),
                    DecayRule::d2(["1", v, "1", v], o[2][2], 1.0),
                ],
            )
        }
        "wen_toric" => ruleset(
            2,
            &["1"],
            vec![
                DecayRule::d2([pt, "1", v, "1"], 'X', 1.0),
                DecayRule::d2(["1", v, "1", v], 'X', 1.0),
                DecayRule::d2(["1", v, v, "1"], 'Y', 1.0),
                DecayRule::d2([v, "1", "1", v], 'Y', 1.0),
            ],
        ),
        "compass" => ruleset(
            2,
            &["1"],
            vec![
                DecayRule::d2([pt, "1", v, v], 'X', 1.0),
                DecayRule::d2(["1", v, v, v], 'X', 1.0),
                DecayRule::d2([pt, v, v, "1"], 'Y', 1.0),
                DecayRule::d2([v, v, "1", v], 'Y', 1.0),
            ],
        ),
        "tfim2d" => ruleset(
            2,
            &["1"],
            vec![
                DecayRule::d2([pt, v, v, v], 'Z', 1.0),
                DecayRule::d2([pt, "1", v, v], 'X', -1.0),
                DecayRule::d2([pt, v, v, "1"], 'X', -1.0),
                DecayRule::d2(["1", v, v, v], 'X', 1.0),
                DecayRule::d2([v, v, "1", v], 'X', 1.0),
            ],
        ),
        // The vertical leg from the central X down to the lower Z carries "2"
        // so that a Z emitted downwards from a vacuum site can only be
        // absorbed by the central X of a complete pattern.
        "cluster2d" => ruleset(
            2,
            &["1", "2"],
            vec![
                DecayRule::d2([pt, "2", v, v], 'Z', 1.0),
                DecayRule::d2(["1", v, v, v], 'Z', 1.0),
                DecayRule::d2([v, v, "2", v], 'Z', 1.0),
                DecayRule::d2([v, v, v, "1"], 'Z', 1.0),
                DecayRule::d2(["2", "1", "1", "2"], 'X', 1.0),
            ],
        ),
        _ => return Err(MpoError::UnknownRuleset(name.into())),
    })
}
