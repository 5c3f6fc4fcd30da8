//! Truncated multi-index Hilbert spaces, weighted shifts and the numeric
//! toolbox: operator norms, interior compression, polar and square-root
//! factors.
//!
//! The truncation convention is a hard cutoff per index (`k_i < N_i`); shifts
//! annihilate the top level, so the catalog formulas stay exact on the
//! interior and truncation error concentrates on the margin.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::algebra::{GenLabel, Polynomial, Word};
use crate::error::{Error, Result};

/// Deformation parameter, strictly inside (0,1); `q = 1` is the classical
/// case and excluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QValue(f64);

impl QValue {
    pub fn new(q: f64) -> Result<QValue> {
        if q > 0.0 && q < 1.0 {
            Ok(QValue(q))
        } else {
            Err(Error::InvalidParameter(format!(
                "q must lie strictly in (0,1), got {}",
                q
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Finite cube of multi-indices `0 <= k_i < dims[i]`, enumerated row-major
/// (last index fastest). Tensoring appends an axis, which makes the
/// canonical identification `H_n (x) l2 ~ H_{n+1}` the identity on flat
/// indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSpace {
    dims: Vec<usize>,
}

impl TruncatedSpace {
    /// `m` indices with one shared cutoff `N`.
    pub fn cube(m: usize, n_cutoff: usize) -> TruncatedSpace {
        TruncatedSpace { dims: vec![n_cutoff; m] }
    }

    pub fn from_dims(dims: Vec<usize>) -> TruncatedSpace {
        TruncatedSpace { dims }
    }

    pub fn m(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product::<usize>().max(1)
    }

    /// Append one axis of size `k`, as the fastest-varying index.
    pub fn tensor_axis(&self, k: usize) -> TruncatedSpace {
        let mut dims = self.dims.clone();
        dims.push(k);
        TruncatedSpace { dims }
    }

    pub fn flat(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.dims.len());
        let mut idx = 0;
        for (k, n) in multi.iter().zip(&self.dims) {
            debug_assert!(k < n);
            idx = idx * n + k;
        }
        idx
    }

    pub fn multi(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for i in (0..self.dims.len()).rev() {
            out[i] = flat % self.dims[i];
            flat /= self.dims[i];
        }
        out
    }

    /// Iterate all multi-indices in flat order.
    pub fn iter_multi(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.dim()).map(move |i| self.multi(i))
    }

    /// Flags selecting basis vectors with every `k_i <= dims[i] - 1 - margin`.
    pub fn interior_flags(&self, margin: usize) -> Vec<bool> {
        (0..self.dim())
            .map(|i| {
                self.multi(i)
                    .iter()
                    .zip(&self.dims)
                    .all(|(k, n)| k + margin + 1 <= *n)
            })
            .collect()
    }
}

/// Diagonal 0/1 projection onto the interior of a truncated space.
#[derive(Debug, Clone)]
pub struct InteriorProjector {
    pub space: TruncatedSpace,
    pub margin: usize,
}

impl InteriorProjector {
    pub fn new(space: TruncatedSpace, margin: usize) -> Self {
        InteriorProjector { space, margin }
    }

    pub fn matrix(&self) -> OperatorMatrix {
        let flags = self.space.interior_flags(self.margin);
        OperatorMatrix::diagonal(flags.len(), |i| {
            if flags[i] {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }
}

/// Sparse complex square matrix in row-major adjacency form. All heavy
/// catalog operators (shifts, diagonals and their short products) have O(1)
/// entries per row, so products and norms stay linear in the dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

const ZERO_DROP: f64 = 0.0;

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        OperatorMatrix { dim, rows: vec![Vec::new(); dim] }
    }

    pub fn identity(dim: usize) -> Self {
        OperatorMatrix::diagonal(dim, |_| Complex64::new(1.0, 0.0))
    }

    pub fn diagonal(dim: usize, f: impl Fn(usize) -> Complex64) -> Self {
        let mut m = OperatorMatrix::zeros(dim);
        for i in 0..dim {
            let v = f(i);
            if v.norm_sqr() > ZERO_DROP {
                m.rows[i].push((i, v));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        if v.norm_sqr() <= ZERO_DROP {
            self.rows[i].retain(|(c, _)| *c != j);
            return;
        }
        match self.rows[i].binary_search_by_key(&j, |(c, _)| *c) {
            Ok(k) => self.rows[i][k].1 = v,
            Err(k) => self.rows[i].insert(k, (j, v)),
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: Complex64) {
        if v.norm_sqr() <= ZERO_DROP {
            return;
        }
        match self.rows[i].binary_search_by_key(&j, |(c, _)| *c) {
            Ok(k) => {
                self.rows[i][k].1 += v;
                if self.rows[i][k].1.norm_sqr() <= ZERO_DROP {
                    self.rows[i].remove(k);
                }
            }
            Err(k) => self.rows[i].insert(k, (j, v)),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.rows[i]
            .binary_search_by_key(&j, |(c, _)| *c)
            .map(|k| self.rows[i][k].1)
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |(j, v)| (i, *j, *v)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for row in &mut out.rows {
            for (_, v) in row.iter_mut() {
                *v *= c;
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        let mut out = self.clone();
        for (i, row) in other.rows.iter().enumerate() {
            for (j, v) in row {
                out.add_to(i, *j, *v);
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn adjoint(&self) -> Self {
        let mut out = OperatorMatrix::zeros(self.dim);
        for (i, j, v) in self.entries() {
            out.rows[j].push((i, v.conj()));
        }
        for row in &mut out.rows {
            row.sort_by_key(|(c, _)| *c);
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        let mut out = OperatorMatrix::zeros(self.dim);
        for i in 0..self.dim {
            let mut acc: BTreeMap<usize, Complex64> = BTreeMap::new();
            for (k, a) in &self.rows[i] {
                for (j, b) in &other.rows[*k] {
                    *acc.entry(*j).or_insert(Complex64::new(0.0, 0.0)) += a * b;
                }
            }
            out.rows[i] = acc
                .into_iter()
                .filter(|(_, v)| v.norm_sqr() > ZERO_DROP)
                .collect();
        }
        out
    }

    /// Kronecker product; the right factor runs along the appended (fastest)
    /// axis, matching [`TruncatedSpace::tensor_axis`].
    pub fn kron(&self, other: &Self) -> Self {
        let d2 = other.dim;
        let mut out = OperatorMatrix::zeros(self.dim * d2);
        for (i1, j1, a) in self.entries() {
            for (i2, j2, b) in other.entries() {
                out.rows[i1 * d2 + i2].push((j1 * d2 + j2, a * b));
            }
        }
        for row in &mut out.rows {
            row.sort_by_key(|(c, _)| *c);
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, a) in row {
                out[i] += a * v[*j];
            }
        }
        out
    }

    pub fn matvec_adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, a) in row {
                out[*j] += a.conj() * v[i];
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().all(|(j, _)| *j == i))
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries().map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries()
            .map(|(_, _, v)| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Operator norm (largest singular value). Diagonal matrices are read
    /// off exactly; otherwise power iteration on `A*A` with relative
    /// tolerance 1e-12 and a deterministic start vector.
    pub fn op_norm(&self) -> f64 {
        if self.dim == 0 || self.nnz() == 0 {
            return 0.0;
        }
        if self.is_diagonal() {
            return self.max_abs_entry();
        }
        let mut v: Vec<Complex64> = deterministic_unit_vector(self.dim);
        let mut last = 0.0f64;
        let mut sigma_sq = 0.0f64;
        for _ in 0..100_000 {
            let w = self.matvec(&v);
            sigma_sq = w.iter().map(|x| x.norm_sqr()).sum::<f64>();
            if sigma_sq <= f64::MIN_POSITIVE {
                return 0.0;
            }
            let u = self.matvec_adjoint(&w);
            let nu = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if nu <= f64::MIN_POSITIVE {
                break;
            }
            for (vi, ui) in v.iter_mut().zip(&u) {
                *vi = ui / nu;
            }
            if (sigma_sq - last).abs() <= 1e-12 * sigma_sq.max(f64::MIN_POSITIVE) {
                break;
            }
            last = sigma_sq;
        }
        sigma_sq.sqrt()
    }

    /// Zero every entry outside the interior (both row and column).
    pub fn compress(&self, flags: &[bool]) -> Self {
        let mut out = OperatorMatrix::zeros(self.dim);
        for (i, j, v) in self.entries() {
            if flags[i] && flags[j] {
                out.rows[i].push((j, v));
            }
        }
        out
    }

    /// Extract the square submatrix on the flagged indices.
    pub fn restrict(&self, flags: &[bool]) -> Self {
        let map: Vec<Option<usize>> = {
            let mut next = 0usize;
            flags
                .iter()
                .map(|f| {
                    if *f {
                        let k = next;
                        next += 1;
                        Some(k)
                    } else {
                        None
                    }
                })
                .collect()
        };
        let new_dim = map.iter().filter(|x| x.is_some()).count();
        let mut out = OperatorMatrix::zeros(new_dim);
        for (i, j, v) in self.entries() {
            if let (Some(ni), Some(nj)) = (map[i], map[j]) {
                out.rows[ni].push((nj, v));
            }
        }
        for row in &mut out.rows {
            row.sort_by_key(|(c, _)| *c);
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut d = vec![Complex64::new(0.0, 0.0); self.dim * self.dim];
        for (i, j, v) in self.entries() {
            d[i * self.dim + j] = v;
        }
        d
    }

    pub fn from_dense(dim: usize, dense: &[Complex64], drop_tol: f64) -> Self {
        let mut m = OperatorMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                let v = dense[i * dim + j];
                if v.norm() > drop_tol {
                    m.rows[i].push((j, v));
                }
            }
        }
        m
    }

    /// Largest entrywise difference |A - B| over interior rows and columns.
    pub fn max_abs_diff_on(&self, other: &Self, flags: &[bool]) -> f64 {
        let mut worst = 0.0f64;
        let a = self.compress(flags);
        let b = other.compress(flags);
        let diff = a.sub(&b);
        for (_, _, v) in diff.entries() {
            worst = worst.max(v.norm());
        }
        worst
    }
}

fn deterministic_unit_vector(dim: usize) -> Vec<Complex64> {
    // splitmix64 stream, fixed seed: reproducible start for power iteration.
    let mut state = 0x9E3779B97F4A7C15u64 ^ (dim as u64);
    let mut next = move || {
        state = state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    };
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| {
            let re = (next() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            let im = (next() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            Complex64::new(re, im)
        })
        .collect();
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= norm;
    }
    v
}

/// The weighted shift `S_r` on a truncated space:
/// `S_r xi_k = sqrt((1 - q^{1+k_r}) q^{k_{r+1}+...+k_m}) xi_{k + e_r}` for
/// `r < m` and `S_m xi_k = sqrt(1 - q^{1+k_m}) xi_{k + e_m}`; vectors with
/// `k_r` at the cutoff map to zero.
pub fn weighted_shift(r: usize, space: &TruncatedSpace, q: QValue) -> Result<OperatorMatrix> {
    let m = space.m();
    if r < 1 || r > m {
        return Err(Error::InvalidParameter(format!(
            "shift index {} out of range 1..={}",
            r, m
        )));
    }
    let q = q.get();
    let mut mat = OperatorMatrix::zeros(space.dim());
    for k in space.iter_multi() {
        if k[r - 1] + 2 > space.dims()[r - 1] {
            continue; // truncation: the top level maps to zero
        }
        let tail: usize = k[r..].iter().sum();
        let weight = ((1.0 - q.powi(1 + k[r - 1] as i32)) * q.powi(tail as i32)).sqrt();
        let mut target = k.clone();
        target[r - 1] += 1;
        mat.set(space.flat(&target), space.flat(&k), Complex64::new(weight, 0.0));
    }
    Ok(mat)
}

/// Diagonal matrix with entry `q^{(sum_{i in which} k_i)/2}`; `which` uses
/// 1-based axis numbers, and the empty set gives the identity.
pub fn q_diagonal(space: &TruncatedSpace, q: QValue, which: &[usize]) -> Result<OperatorMatrix> {
    let m = space.m();
    for i in which {
        if *i < 1 || *i > m {
            return Err(Error::InvalidParameter(format!(
                "diagonal axis {} out of range 1..={}",
                i, m
            )));
        }
    }
    let q = q.get();
    let dim = space.dim();
    let mut mat = OperatorMatrix::zeros(dim);
    for (flat, k) in space.iter_multi().enumerate() {
        let total: usize = which.iter().map(|i| k[*i - 1]).sum();
        mat.set(flat, flat, Complex64::new(q.powf(total as f64 / 2.0), 0.0));
    }
    Ok(mat)
}

/// Generator assignment for numerical evaluation of polynomials.
#[derive(Debug, Clone)]
pub struct Assignment {
    pub space: TruncatedSpace,
    pub q: f64,
    mats: BTreeMap<(GenLabel, u32), OperatorMatrix>,
}

impl Assignment {
    pub fn new(space: TruncatedSpace, q: f64) -> Self {
        Assignment { space, q, mats: BTreeMap::new() }
    }

    pub fn insert(&mut self, label: GenLabel, index: u32, m: OperatorMatrix) {
        assert_eq!(m.dim(), self.space.dim(), "operator dimension mismatch");
        self.mats.insert((label, index), m);
    }

    pub fn get(&self, label: GenLabel, index: u32) -> Option<&OperatorMatrix> {
        self.mats.get(&(label, index))
    }

    /// Evaluate a word as a product of assigned matrices (adjoints for
    /// starred letters). The empty word is the identity.
    pub fn eval_word(&self, w: &Word) -> Result<OperatorMatrix> {
        let mut acc = OperatorMatrix::identity(self.space.dim());
        for g in &w.0 {
            let m = self.get(g.label, g.index).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "generator {}{} not assigned",
                    g.label.letter(),
                    g.index
                ))
            })?;
            let factor = if g.starred { m.adjoint() } else { m.clone() };
            acc = acc.matmul(&factor);
        }
        Ok(acc)
    }

    /// The unique *-homomorphic extension to polynomials, with scalars
    /// evaluated at the assignment's `q`.
    pub fn eval(&self, p: &Polynomial) -> Result<OperatorMatrix> {
        let mut acc = OperatorMatrix::zeros(self.space.dim());
        for (w, c) in p.iter() {
            let m = self.eval_word(w)?;
            acc = acc.add(&m.scale(Complex64::new(c.eval(self.q), 0.0)));
        }
        Ok(acc)
    }
}

/// Operator norm of the interior compression `P eval(expr) P`.
pub fn residual(expr: &Polynomial, assignment: &Assignment, margin: usize) -> Result<f64> {
    let m = assignment.eval(expr)?;
    let flags = assignment.space.interior_flags(margin);
    Ok(m.compress(&flags).op_norm())
}

// ---------------------------------------------------------------------------
// Dense Hermitian eigensolver (cyclic Jacobi) and the factors built on it.
// ---------------------------------------------------------------------------

pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    /// Column k of `vectors` is the eigenvector for `eigenvalues[k]`.
    pub vectors: Vec<Complex64>,
    pub dim: usize,
}

impl HermitianEig {
    pub fn vector_entry(&self, row: usize, col: usize) -> Complex64 {
        self.vectors[row * self.dim + col]
    }
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix. Deterministic; cost
/// is O(dim^3) per sweep, which is ample at desk scale.
pub fn jacobi_hermitian_eig(mat: &OperatorMatrix) -> HermitianEig {
    let dim = mat.dim();
    let mut a = mat.to_dense();
    let mut u = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        u[i * dim + i] = Complex64::new(1.0, 0.0);
    }
    let scale = mat.max_abs_entry().max(1.0);
    for _sweep in 0..80 {
        let mut off = 0.0f64;
        for p in 0..dim {
            for q in (p + 1)..dim {
                off = off.max(a[p * dim + q].norm());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = a[p * dim + q];
                let beta = apq.norm();
                if beta <= 1e-300 {
                    continue;
                }
                let app = a[p * dim + p].re;
                let aqq = a[q * dim + q].re;
                let phase = apq / beta;
                let theta = 0.5 * (2.0 * beta).atan2(app - aqq);
                let (c, s) = (theta.cos(), theta.sin());
                // V = [[e^{i phi} c, -e^{i phi} s], [s, c]] on columns (p,q).
                let vp = phase * c;
                let vp2 = -phase * s;
                // rows: A <- V* A
                for j in 0..dim {
                    let rp = a[p * dim + j];
                    let rq = a[q * dim + j];
                    a[p * dim + j] = vp.conj() * rp + s * rq;
                    a[q * dim + j] = vp2.conj() * rp + c * rq;
                }
                // cols: A <- A V
                for i in 0..dim {
                    let cp = a[i * dim + p];
                    let cq = a[i * dim + q];
                    a[i * dim + p] = cp * vp + cq * s;
                    a[i * dim + q] = cp * vp2 + cq * c;
                }
                for i in 0..dim {
                    let cp = u[i * dim + p];
                    let cq = u[i * dim + q];
                    u[i * dim + p] = cp * vp + cq * s;
                    u[i * dim + q] = cp * vp2 + cq * c;
                }
            }
        }
    }
    let eigenvalues = (0..dim).map(|i| a[i * dim + i].re).collect();
    HermitianEig { eigenvalues, vectors: u, dim }
}

fn hermitian_function(
    mat: &OperatorMatrix,
    f: impl Fn(f64) -> f64,
) -> OperatorMatrix {
    if mat.is_diagonal() {
        return OperatorMatrix::diagonal(mat.dim(), |i| {
            Complex64::new(f(mat.entry(i, i).re), 0.0)
        });
    }
    let eig = jacobi_hermitian_eig(mat);
    let dim = eig.dim;
    let fv: Vec<f64> = eig.eigenvalues.iter().map(|l| f(*l)).collect();
    // U diag(f) U*
    let mut dense = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                if fv[k] == 0.0 {
                    continue;
                }
                acc += eig.vector_entry(i, k) * fv[k] * eig.vector_entry(j, k).conj();
            }
            dense[i * dim + j] = acc;
        }
    }
    OperatorMatrix::from_dense(dim, &dense, 0.0)
}

/// Smallest and largest eigenvalue of a Hermitian matrix.
pub fn hermitian_extremes(mat: &OperatorMatrix) -> (f64, f64) {
    if mat.dim() == 0 {
        return (0.0, 0.0);
    }
    let eigs: Vec<f64> = if mat.is_diagonal() {
        (0..mat.dim()).map(|i| mat.entry(i, i).re).collect()
    } else {
        jacobi_hermitian_eig(mat).eigenvalues
    };
    let lo = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Polar isometry factor `T = A (A*A)^{-1/2}`.
///
/// Singular values below `tol` raise `NotInvertible`: truncation has
/// destroyed invertibility and the caller should raise the cutoff. With
/// `tol = 0` the factor is formed through the spectral pseudo-inverse, so an
/// exact truncation kernel (e.g. the annihilated top level of a shift) maps
/// to zero and `T` is the expected partial isometry.
pub fn polar_isometry(a: &OperatorMatrix, tol: f64) -> Result<OperatorMatrix> {
    let h = a.adjoint().matmul(a);
    let eigs: Vec<f64> = if h.is_diagonal() {
        (0..h.dim()).map(|i| h.entry(i, i).re).collect()
    } else {
        jacobi_hermitian_eig(&h).eigenvalues
    };
    let lambda_max = eigs.iter().cloned().fold(0.0f64, f64::max);
    let lambda_min = eigs.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0);
    let sigma_min = lambda_min.sqrt();
    if sigma_min < tol {
        return Err(Error::NotInvertible { sigma_min, tol });
    }
    let floor = lambda_max * h.dim() as f64 * f64::EPSILON;
    let t = a.matmul(&hermitian_function(&h, |l| {
        if l <= floor {
            0.0
        } else {
            1.0 / l.sqrt()
        }
    }));
    Ok(t)
}

/// The positive-semidefinite square root of a self-adjoint matrix whose
/// spectrum is bounded below by -1e-10 (small negative eigenvalues from
/// rounding are clamped to zero).
pub fn psd_sqrt(a: &OperatorMatrix) -> Result<OperatorMatrix> {
    let herm_defect = a.sub(&a.adjoint()).max_abs_entry();
    if herm_defect > 1e-9 * a.max_abs_entry().max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "psd_sqrt needs a self-adjoint matrix (defect {:.3e})",
            herm_defect
        )));
    }
    let (lambda_min, _) = hermitian_extremes(a);
    if lambda_min < -1e-10 {
        return Err(Error::NotPositive { lambda_min });
    }
    Ok(hermitian_function(a, |l| l.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn qvalue_bounds() {
        assert!(QValue::new(0.5).is_ok());
        assert!(QValue::new(0.0).is_err());
        assert!(QValue::new(1.0).is_err());
    }

    #[test]
    fn space_indexing_roundtrip() {
        let sp = TruncatedSpace::cube(3, 4);
        assert_eq!(sp.dim(), 64);
        for i in 0..sp.dim() {
            assert_eq!(sp.flat(&sp.multi(i)), i);
        }
        // row-major: last index fastest
        assert_eq!(sp.flat(&[0, 0, 1]), 1);
        assert_eq!(sp.flat(&[0, 1, 0]), 4);
        assert_eq!(sp.flat(&[1, 0, 0]), 16);
        // zero-index space is the scalars
        let pt = TruncatedSpace::cube(0, 5);
        assert_eq!(pt.dim(), 1);
        assert!(pt.interior_flags(3)[0]);
    }

    #[test]
    fn weighted_shift_examples() {
        // m=1, q=0.5, N=3: S_1 xi_0 = sqrt(0.5) xi_1
        let sp = TruncatedSpace::cube(1, 3);
        let s1 = weighted_shift(1, &sp, QValue::new(0.5).unwrap()).unwrap();
        assert!((s1.entry(1, 0).re - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((s1.entry(2, 1).re - 0.75f64.sqrt()).abs() < 1e-15);
        // top level annihilated
        assert_eq!(s1.entry(0, 2), c(0.0));
        for j in 0..3 {
            assert_eq!(s1.entry(j, 2), c(0.0));
        }

        // m=2, q=0.25: S_1 xi_{0,1} = sqrt(0.75*0.25) xi_{1,1}
        let sp = TruncatedSpace::cube(2, 3);
        let s1 = weighted_shift(1, &sp, QValue::new(0.25).unwrap()).unwrap();
        let from = sp.flat(&[0, 1]);
        let to = sp.flat(&[1, 1]);
        assert!((s1.entry(to, from).re - (0.75 * 0.25f64).sqrt()).abs() < 1e-15);

        assert!(weighted_shift(3, &sp, QValue::new(0.25).unwrap()).is_err());
    }

    #[test]
    fn shift_is_strictly_raising_and_contractive() {
        let sp = TruncatedSpace::cube(2, 5);
        for q in [0.3, 0.6, 0.9] {
            for r in 1..=2 {
                let s = weighted_shift(r, &sp, QValue::new(q).unwrap()).unwrap();
                for (i, j, v) in s.entries() {
                    let ki = sp.multi(i);
                    let kj = sp.multi(j);
                    assert_eq!(ki[r - 1], kj[r - 1] + 1, "raises k_r by one");
                    assert!(v.norm() <= 1.0 + 1e-15);
                }
                assert!(s.op_norm() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn q_diagonal_examples() {
        let sp = TruncatedSpace::cube(1, 3);
        let q = QValue::new(0.25).unwrap();
        let d = q_diagonal(&sp, q, &[1]).unwrap();
        assert!((d.entry(0, 0).re - 1.0).abs() < 1e-15);
        assert!((d.entry(1, 1).re - 0.5).abs() < 1e-15);
        assert!((d.entry(2, 2).re - 0.25).abs() < 1e-15);

        let id = q_diagonal(&sp, q, &[]).unwrap();
        assert_eq!(id, OperatorMatrix::identity(3));

        let sp2 = TruncatedSpace::cube(2, 3);
        let d2 = q_diagonal(&sp2, QValue::new(0.5).unwrap(), &[1, 2]).unwrap();
        let at = sp2.flat(&[1, 1]);
        assert!((d2.entry(at, at).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn op_norm_basics() {
        let id = OperatorMatrix::identity(7);
        assert!((id.op_norm() - 1.0).abs() < 1e-12);
        let z = OperatorMatrix::zeros(7);
        assert_eq!(z.op_norm(), 0.0);
        // non-diagonal: a nilpotent Jordan block has norm 1
        let mut j = OperatorMatrix::zeros(4);
        for i in 0..3 {
            j.set(i + 1, i, c(1.0));
        }
        assert!((j.op_norm() - 1.0).abs() < 1e-10);
        // 2x2 with known singular value
        let mut m = OperatorMatrix::zeros(2);
        m.set(0, 0, c(3.0));
        m.set(0, 1, c(4.0));
        assert!((m.op_norm() - 5.0).abs() < 1e-10);
    }

    #[test]
    fn jacobi_diagonalizes() {
        // Hermitian test matrix with complex off-diagonals.
        let mut m = OperatorMatrix::zeros(3);
        m.set(0, 0, c(2.0));
        m.set(1, 1, c(-1.0));
        m.set(2, 2, c(0.5));
        m.set(0, 1, Complex64::new(0.3, 0.7));
        m.set(1, 0, Complex64::new(0.3, -0.7));
        m.set(1, 2, Complex64::new(-0.2, 0.1));
        m.set(2, 1, Complex64::new(-0.2, -0.1));
        let eig = jacobi_hermitian_eig(&m);
        // reconstruct U D U*
        let dim = 3;
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    acc += eig.vector_entry(i, k)
                        * eig.eigenvalues[k]
                        * eig.vector_entry(j, k).conj();
                }
                assert!((acc - m.entry(i, j)).norm() < 1e-12, "entry ({}, {})", i, j);
            }
        }
        // U unitary
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    acc += eig.vector_entry(k, i).conj() * eig.vector_entry(k, j);
                }
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((acc - c(expected)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn polar_isometry_examples() {
        // c * identity -> identity
        let a = OperatorMatrix::identity(5).scale(c(3.5));
        let t = polar_isometry(&a, 1e-8).unwrap();
        assert!(t.sub(&OperatorMatrix::identity(5)).max_abs_entry() < 1e-12);

        // zero singular value with tol = 1e-8 -> not invertible
        let mut a = OperatorMatrix::identity(3);
        a.set(2, 2, c(0.0));
        match polar_isometry(&a, 1e-8) {
            Err(Error::NotInvertible { .. }) => {}
            other => panic!("expected NotInvertible, got {:?}", other.map(|_| ())),
        }

        // truncated weighted shift with tol = 0: polar factor is the
        // truncated unilateral shift, entrywise.
        let k = 8;
        let sp = TruncatedSpace::cube(1, k);
        let w = weighted_shift(1, &sp, QValue::new(0.5).unwrap()).unwrap();
        let t = polar_isometry(&w, 0.0).unwrap();
        let mut shift = OperatorMatrix::zeros(k);
        for i in 0..k - 1 {
            shift.set(i + 1, i, c(1.0));
        }
        assert!(t.sub(&shift).max_abs_entry() < 1e-12);
        // T*T = 1 on the co-kernel of the truncation defect
        let tt = t.adjoint().matmul(&t);
        for i in 0..k - 1 {
            assert!((tt.entry(i, i) - c(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn psd_sqrt_examples() {
        let id = OperatorMatrix::identity(4);
        assert!(psd_sqrt(&id).unwrap().sub(&id).max_abs_entry() < 1e-14);

        let q: f64 = 0.3;
        let d = OperatorMatrix::diagonal(6, |i| c(q.powi(i as i32)));
        let r = psd_sqrt(&d).unwrap();
        for i in 0..6 {
            assert!((r.entry(i, i).re - q.powf(i as f64 / 2.0)).abs() < 1e-14);
        }
        let sq = r.matmul(&r);
        assert!(sq.sub(&d).max_abs_entry() < 1e-12);

        let neg = OperatorMatrix::diagonal(2, |i| c(if i == 0 { 1.0 } else { -0.5 }));
        match psd_sqrt(&neg) {
            Err(Error::NotPositive { .. }) => {}
            other => panic!("expected NotPositive, got {:?}", other.map(|_| ())),
        }

        // non-diagonal PSD: A = B*B for a shift-like B
        let sp = TruncatedSpace::cube(1, 5);
        let b = weighted_shift(1, &sp, QValue::new(0.4).unwrap()).unwrap()
            .add(&OperatorMatrix::identity(5).scale(c(0.5)));
        let a = b.adjoint().matmul(&b);
        let r = psd_sqrt(&a).unwrap();
        assert!(r.matmul(&r).sub(&a).max_abs_entry() < 1e-11);
        assert!(r.sub(&r.adjoint()).max_abs_entry() < 1e-12);
    }

    #[test]
    fn interior_compression() {
        let sp = TruncatedSpace::cube(2, 4);
        let flags = sp.interior_flags(1);
        // interior: both k_i <= 2
        for (i, f) in flags.iter().enumerate() {
            let k = sp.multi(i);
            assert_eq!(*f, k[0] <= 2 && k[1] <= 2);
        }
        let p = InteriorProjector::new(sp.clone(), 1).matrix();
        let pp = p.matmul(&p);
        assert!(pp.sub(&p).max_abs_entry() == 0.0);
        assert!(p.sub(&p.adjoint()).max_abs_entry() == 0.0);
    }
}
