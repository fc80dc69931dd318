//! Dense complex tensors.
//!
//! Data is stored flat with the first index running fastest, so the entry at
//! multi-index `(i1, i2, ..., ir)` lives at `i1 + d1*i2 + d1*d2*i3 + ...`.
//! Grouping consecutive legs is therefore a pure reshape.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

pub type C64 = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("leg {0} listed more than once")]
    DuplicateLeg(usize),
    #[error("leg {leg} out of range for rank {rank}")]
    LegOutOfRange { leg: usize, rank: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("bisection must put at least one leg on each side")]
    EmptyBisection,
    #[error("data length {got} does not match shape product {expected}")]
    DataLength { expected: usize, got: usize },
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<C64>,
    labels: Option<Vec<String>>,
}

/// Converts a flat offset into a multi-index (first index fastest).
pub fn unravel(mut flat: usize, shape: &[usize]) -> Vec<usize> {
    let mut idx = Vec::with_capacity(shape.len());
    for &d in shape {
        idx.push(flat % d);
        flat /= d;
    }
    idx
}

/// Converts a multi-index into a flat offset (first index fastest).
pub fn ravel(idx: &[usize], shape: &[usize]) -> usize {
    let mut flat = 0;
    let mut stride = 1;
    for (&i, &d) in idx.iter().zip(shape) {
        debug_assert!(i < d);
        flat += i * stride;
        stride *= d;
    }
    flat
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = Vec::with_capacity(shape.len());
    let mut acc = 1;
    for &d in shape {
        s.push(acc);
        acc *= d;
    }
    s
}

impl DenseTensor {
    pub fn new(shape: Vec<usize>, data: Vec<C64>) -> Result<Self, TensorError> {
        if shape.iter().any(|&d| d == 0) {
            return Err(TensorError::DimensionMismatch(
                "leg dimensions must be positive".into(),
            ));
        }
        let expected: usize = shape.iter().product();
        if data.len() != expected {
            return Err(TensorError::DataLength {
                expected,
                got: data.len(),
            });
        }
        Ok(Self {
            shape,
            data,
            labels: None,
        })
    }

    pub fn zeros(shape: &[usize]) -> Self {
        let n = shape.iter().product();
        Self {
            shape: shape.to_vec(),
            data: vec![C64::new(0.0, 0.0); n],
            labels: None,
        }
    }

    pub fn scalar(v: C64) -> Self {
        Self {
            shape: vec![],
            data: vec![v],
            labels: None,
        }
    }

    pub fn from_real(shape: &[usize], data: &[f64]) -> Result<Self, TensorError> {
        Self::new(
            shape.to_vec(),
            data.iter().map(|&x| C64::new(x, 0.0)).collect(),
        )
    }

    /// Builds a tensor by evaluating `f` at every multi-index.
    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[usize]) -> C64) -> Self {
        let n: usize = shape.iter().product();
        let mut data = Vec::with_capacity(n);
        let mut idx = vec![0usize; shape.len()];
        for _ in 0..n {
            data.push(f(&idx));
            for (k, i) in idx.iter_mut().enumerate() {
                *i += 1;
                if *i < shape[k] {
                    break;
                }
                *i = 0;
            }
        }
        Self {
            shape: shape.to_vec(),
            data,
            labels: None,
        }
    }

    /// Entries with real and imaginary parts uniform in [-1, 1).
    pub fn random<R: Rng + ?Sized>(shape: &[usize], rng: &mut R) -> Self {
        let n: usize = shape.iter().product();
        let data = (0..n)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Self {
            shape: shape.to_vec(),
            data,
            labels: None,
        }
    }

    /// Rank-2 tensor from a matrix; leg 0 is the row index.
    pub fn from_matrix(m: &DMatrix<C64>) -> Self {
        Self {
            shape: vec![m.nrows(), m.ncols()],
            data: m.as_slice().to_vec(),
            labels: None,
        }
    }

    pub fn from_vector(v: &[C64]) -> Self {
        Self {
            shape: vec![v.len()],
            data: v.to_vec(),
            labels: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, TensorError> {
        if labels.len() != self.shape.len() {
            return Err(TensorError::LabelCount {
                expected: self.shape.len(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        self.data[ravel(idx, &self.shape)]
    }

    pub fn set(&mut self, idx: &[usize], v: C64) {
        let k = ravel(idx, &self.shape);
        self.data[k] = v;
    }

    /// The value of a rank-0 tensor.
    pub fn scalar_value(&self) -> Option<C64> {
        if self.shape.is_empty() {
            Some(self.data[0])
        } else {
            None
        }
    }

    /// Matrix view grouping the first `row_legs` legs as the row index.
    pub fn to_matrix(&self, row_legs: usize) -> DMatrix<C64> {
        let rows: usize = self.shape[..row_legs].iter().product();
        let cols: usize = self.shape[row_legs..].iter().product();
        DMatrix::from_column_slice(rows, cols, &self.data)
    }

    /// Reinterprets the flat data with a new shape of equal size.
    pub fn reshape(&self, shape: &[usize]) -> Result<Self, TensorError> {
        let n: usize = shape.iter().product();
        if n != self.data.len() {
            return Err(TensorError::DimensionMismatch(format!(
                "cannot reshape {:?} into {:?}",
                self.shape, shape
            )));
        }
        Ok(Self {
            shape: shape.to_vec(),
            data: self.data.clone(),
            labels: None,
        })
    }

    /// Reorders legs: output leg `k` is input leg `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self, TensorError> {
        let r = self.rank();
        if perm.len() != r {
            return Err(TensorError::InvalidPartition(format!(
                "permutation of length {} for rank {}",
                perm.len(),
                r
            )));
        }
        let mut seen = vec![false; r];
        for &p in perm {
            if p >= r {
                return Err(TensorError::LegOutOfRange { leg: p, rank: r });
            }
            if seen[p] {
                return Err(TensorError::DuplicateLeg(p));
            }
            seen[p] = true;
        }
        if perm.iter().enumerate().all(|(k, &p)| k == p) {
            return Ok(self.clone());
        }
        let new_shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let old_strides = strides(&self.shape);
        let src_strides: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
        let n = self.data.len();
        let mut data = Vec::with_capacity(n);
        let mut idx = vec![0usize; r];
        let mut off = 0usize;
        for _ in 0..n {
            data.push(self.data[off]);
            for k in 0..r {
                idx[k] += 1;
                off += src_strides[k];
                if idx[k] < new_shape[k] {
                    break;
                }
                off -= src_strides[k] * new_shape[k];
                idx[k] = 0;
            }
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| perm.iter().map(|&p| l[p].clone()).collect());
        Ok(Self {
            shape: new_shape,
            data,
            labels,
        })
    }

    pub fn conj(&self) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|z| z.conj()).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|z| z * s).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        if self.shape != other.shape {
            return Err(TensorError::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.shape, other.shape
            )));
        }
        Ok(Self {
            shape: self.shape.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
            labels: None,
        })
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of the difference; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.shape != other.shape {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Inner product `<self|other>` over the flattened data.
    pub fn dot(&self, other: &Self) -> C64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Flattened data in Kronecker order (leg 0 most significant).
    pub fn to_kron_vector(&self) -> nalgebra::DVector<C64> {
        let perm: Vec<usize> = (0..self.rank()).rev().collect();
        let t = self.permute(&perm).expect("valid permutation");
        nalgebra::DVector::from_vec(t.data)
    }

    /// Inverse of [`DenseTensor::to_kron_vector`].
    pub fn from_kron_vector(v: &[C64], shape: &[usize]) -> Result<Self, TensorError> {
        let rev: Vec<usize> = shape.iter().rev().copied().collect();
        let t = DenseTensor::new(rev, v.to_vec())?;
        let perm: Vec<usize> = (0..shape.len()).rev().collect();
        t.permute(&perm)
    }
}

/// Outer product; the legs of `a` come first.
pub fn tensor_product(a: &DenseTensor, b: &DenseTensor) -> DenseTensor {
    let mut data = Vec::with_capacity(a.len() * b.len());
    for &y in &b.data {
        for &x in &a.data {
            data.push(x * y);
        }
    }
    let mut shape = a.shape.clone();
    shape.extend_from_slice(&b.shape);
    DenseTensor {
        shape,
        data,
        labels: None,
    }
}

/// Sums over the diagonal of legs `x` and `y`.
pub fn partial_trace(t: &DenseTensor, x: usize, y: usize) -> Result<DenseTensor, TensorError> {
    let r = t.rank();
    for &l in &[x, y] {
        if l >= r {
            return Err(TensorError::LegOutOfRange { leg: l, rank: r });
        }
    }
    if x == y {
        return Err(TensorError::DuplicateLeg(x));
    }
    if t.shape[x] != t.shape[y] {
        return Err(TensorError::DimensionMismatch(format!(
            "trace over legs of dimension {} and {}",
            t.shape[x], t.shape[y]
        )));
    }
    let keep: Vec<usize> = (0..r).filter(|&k| k != x && k != y).collect();
    let mut perm = keep.clone();
    perm.push(x);
    perm.push(y);
    let p = t.permute(&perm)?;
    let d = t.shape[x];
    let rest: usize = keep.iter().map(|&k| t.shape[k]).product();
    let mut data = vec![C64::new(0.0, 0.0); rest];
    for k in 0..d {
        let base = rest * (k + d * k);
        for (i, v) in data.iter_mut().enumerate() {
            *v += p.data[base + i];
        }
    }
    Ok(DenseTensor {
        shape: keep.iter().map(|&k| t.shape[k]).collect(),
        data,
        labels: None,
    })
}

fn check_leg_list(legs: &[usize], rank: usize) -> Result<(), TensorError> {
    let mut seen = vec![false; rank];
    for &l in legs {
        if l >= rank {
            return Err(TensorError::LegOutOfRange { leg: l, rank });
        }
        if seen[l] {
            return Err(TensorError::DuplicateLeg(l));
        }
        seen[l] = true;
    }
    Ok(())
}

/// Contracts `a_legs[k]` of `a` with `b_legs[k]` of `b`.
///
/// The result carries the free legs of `a` (in order) followed by the free
/// legs of `b`. Internally both operands are grouped into matrices and
/// multiplied.
pub fn contract(
    a: &DenseTensor,
    a_legs: &[usize],
    b: &DenseTensor,
    b_legs: &[usize],
) -> Result<DenseTensor, TensorError> {
    if a_legs.len() != b_legs.len() {
        return Err(TensorError::DimensionMismatch(format!(
            "{} legs of a paired with {} legs of b",
            a_legs.len(),
            b_legs.len()
        )));
    }
    check_leg_list(a_legs, a.rank())?;
    check_leg_list(b_legs, b.rank())?;
    for (&la, &lb) in a_legs.iter().zip(b_legs) {
        if a.shape[la] != b.shape[lb] {
            return Err(TensorError::DimensionMismatch(format!(
                "leg {} of a has dimension {}, leg {} of b has {}",
                la, a.shape[la], lb, b.shape[lb]
            )));
        }
    }
    let free_a: Vec<usize> = (0..a.rank()).filter(|l| !a_legs.contains(l)).collect();
    let free_b: Vec<usize> = (0..b.rank()).filter(|l| !b_legs.contains(l)).collect();
    let mut pa = free_a.clone();
    pa.extend_from_slice(a_legs);
    let mut pb = b_legs.to_vec();
    pb.extend_from_slice(&free_b);
    let ap = a.permute(&pa)?;
    let bp = b.permute(&pb)?;
    let m = ap.to_matrix(free_a.len());
    let n = bp.to_matrix(a_legs.len());
    let prod = m * n;
    let mut shape: Vec<usize> = free_a.iter().map(|&l| a.shape[l]).collect();
    shape.extend(free_b.iter().map(|&l| b.shape[l]));
    Ok(DenseTensor {
        shape,
        data: prod.as_slice().to_vec(),
        labels: None,
    })
}

/// Fuses each group of consecutive legs into a single leg.
///
/// Groups must list the legs in their current order and cover every leg, so
/// the result is a reinterpretation of the same flat data.
pub fn group_indices(t: &DenseTensor, partition: &[Vec<usize>]) -> Result<DenseTensor, TensorError> {
    let mut next = 0usize;
    let mut shape = Vec::with_capacity(partition.len());
    for g in partition {
        if g.is_empty() {
            return Err(TensorError::InvalidPartition("empty group".into()));
        }
        let mut d = 1;
        for &l in g {
            if l != next {
                return Err(TensorError::InvalidPartition(format!(
                    "expected leg {} but found {}",
                    next, l
                )));
            }
            d *= t.shape[l];
            next += 1;
        }
        shape.push(d);
    }
    if next != t.rank() {
        return Err(TensorError::InvalidPartition(format!(
            "partition covers {} of {} legs",
            next,
            t.rank()
        )));
    }
    Ok(DenseTensor {
        shape,
        data: t.data.clone(),
        labels: None,
    })
}

/// Splits `leg` into legs of dimensions `new_shape`; inverse of grouping.
pub fn split_indices(t: &DenseTensor, leg: usize, new_shape: &[usize]) -> Result<DenseTensor, TensorError> {
    if leg >= t.rank() {
        return Err(TensorError::LegOutOfRange {
            leg,
            rank: t.rank(),
        });
    }
    let prod: usize = new_shape.iter().product();
    if prod != t.shape[leg] || new_shape.contains(&0) {
        return Err(TensorError::DimensionMismatch(format!(
            "cannot split dimension {} into {:?}",
            t.shape[leg], new_shape
        )));
    }
    let mut shape = t.shape[..leg].to_vec();
    shape.extend_from_slice(new_shape);
    shape.extend_from_slice(&t.shape[leg + 1..]);
    Ok(DenseTensor {
        shape,
        data: t.data.clone(),
        labels: None,
    })
}

#[derive(Clone, Debug)]
pub struct SvdResult {
    /// Legs: the left legs of the input, then the bond.
    pub left_isometry: DenseTensor,
    pub singular_values: Vec<f64>,
    /// Legs: the bond, then the right legs of the input. This is V†.
    pub right_isometry: DenseTensor,
    pub discarded_weight: f64,
}

impl SvdResult {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// U·S·V† with the left legs first.
    pub fn recompose(&self) -> DenseTensor {
        let k = self.rank();
        let mut us = self.left_isometry.clone();
        let rows = us.len() / k;
        for (j, s) in self.singular_values.iter().enumerate() {
            for v in &mut us.data[j * rows..(j + 1) * rows] {
                *v *= s;
            }
        }
        let r = us.rank() - 1;
        contract(&us, &[r], &self.right_isometry, &[0]).expect("consistent factors")
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SvdOptions {
    pub max_rank: Option<usize>,
    pub threshold: f64,
}

impl Default for SvdOptions {
    fn default() -> Self {
        Self {
            max_rank: None,
            threshold: 1e-14,
        }
    }
}

/// Index of the largest-modulus entry; near-ties resolve to the lowest index.
pub(crate) fn phase_anchor(v: impl Iterator<Item = C64> + Clone) -> usize {
    let max = v.clone().map(|z| z.norm()).fold(0.0, f64::max);
    let cut = max * (1.0 - 1e-12);
    v.enumerate()
        .find(|(_, z)| z.norm() >= cut)
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Truncated SVD across the bisection `left_legs | rest`.
///
/// The remaining legs keep their relative order on the right factor. Each
/// left singular vector is rotated so its largest-modulus entry is real and
/// positive, with the inverse phase moved onto the matching row of V†.
pub fn svd_split(t: &DenseTensor, left_legs: &[usize], opts: SvdOptions) -> Result<SvdResult, TensorError> {
    check_leg_list(left_legs, t.rank())?;
    if left_legs.is_empty() || left_legs.len() == t.rank() {
        return Err(TensorError::EmptyBisection);
    }
    let right_legs: Vec<usize> = (0..t.rank()).filter(|l| !left_legs.contains(l)).collect();
    let mut perm = left_legs.to_vec();
    perm.extend_from_slice(&right_legs);
    let p = t.permute(&perm)?;
    let m = p.to_matrix(left_legs.len());
    let (u, s, vt) = crate::linalg::svd(&m);
    let full = s.len();
    let mut keep = opts.max_rank.map_or(full, |r| r.min(full)).max(1);
    if s[0] > 0.0 {
        while keep > 1 && s[keep - 1] / s[0] < opts.threshold {
            keep -= 1;
        }
    }
    let discarded_weight: f64 = s[keep..].iter().map(|x| x * x).sum();
    let mut u = u.columns(0, keep).into_owned();
    let mut vt = vt.rows(0, keep).into_owned();
    for j in 0..keep {
        let a = phase_anchor(u.column(j).iter().copied());
        let z = u[(a, j)];
        if z.norm() > 0.0 {
            let ph = z / z.norm();
            u.column_mut(j).iter_mut().for_each(|x| *x /= ph);
            vt.row_mut(j).iter_mut().for_each(|x| *x *= ph);
        }
    }
    let mut ushape: Vec<usize> = left_legs.iter().map(|&l| t.shape[l]).collect();
    ushape.push(keep);
    let mut vshape = vec![keep];
    vshape.extend(right_legs.iter().map(|&l| t.shape[l]));
    Ok(SvdResult {
        left_isometry: DenseTensor::new(ushape, u.as_slice().to_vec())?,
        singular_values: s[..keep].to_vec(),
        right_isometry: DenseTensor::new(vshape, vt.as_slice().to_vec())?,
        discarded_weight,
    })
}
