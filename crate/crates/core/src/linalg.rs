//! Small dense complex linear algebra.
//!
//! Everything the simulator needs lives in dimensions 2, 4 and 8, so the
//! matrices here are plain row-major `Vec`s and the eigen-solver is a cyclic
//! Jacobi iteration with a fixed sweep order. Results are bit-for-bit
//! reproducible for identical input.
//!
//! Tensor products put the first factor's index slowest: for `a ⊗ b` the
//! composite index is `i_a * dim_b + i_b`. Every module uses this ordering
//! (system ⊗ environment, system ⊗ control).

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Entrywise tolerance used to accept a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 64;
const JACOBI_OFF_TOL: f64 = 1e-14;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("matrix dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::BadShape {
                dim,
                expected: dim * dim,
                got: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from literal rows. Panics if the rows are not square.
    pub fn from_rows<const N: usize>(rows: [[C64; N]; N]) -> Self {
        Self {
            dim: N,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self {
            dim: N,
            data: rows.into_iter().flatten().map(re).collect(),
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for col in 0..dim {
                data.push(f(r, col));
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, col| if r == col { re(1.0) } else { re(0.0) })
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_fn(n, |r, col| if r == col { values[r] } else { re(0.0) })
    }

    pub fn pauli_x() -> Self {
        Self::from_real_rows([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn pauli_y() -> Self {
        Self::from_rows([[re(0.0), c(0.0, -1.0)], [c(0.0, 1.0), re(0.0)]])
    }

    pub fn pauli_z() -> Self {
        Self::from_real_rows([[1.0, 0.0], [0.0, -1.0]])
    }

    /// `|v><v|` for a column vector `v`.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |r, col| v[r] * v[col].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, col| self[(col, r)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(re(factor))
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        self.conform("product", rhs)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for col in 0..n {
                    out.data[r * n + col] += a * rhs.data[k * n + col];
                }
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.conform("sum", rhs)?;
        Ok(self.zip_with(rhs, |a, b| a + b))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.conform("difference", rhs)?;
        Ok(self.zip_with(rhs, |a, b| a - b))
    }

    /// `self * rho * self^dag`.
    pub fn conjugate(&self, rho: &Self) -> Result<Self> {
        self.checked_mul(rho)?.checked_mul(&self.adjoint())
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                op: "matrix-vector product",
                left: self.dim,
                right: v.len(),
            });
        }
        Ok((0..self.dim)
            .map(|r| (0..self.dim).map(|k| self[(r, k)] * v[k]).sum())
            .collect())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff on different dimensions");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self^dag`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for col in r..n {
                worst = worst.max((self[(r, col)] - self[(col, r)].conj()).norm());
            }
        }
        worst
    }

    /// `(A + A^dag) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |r, col| (self[(r, col)] + self[(col, r)].conj()) * 0.5)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn conform(&self, op: &'static str, rhs: &Self) -> Result<()> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                op,
                left: self.dim,
                right: rhs.dim,
            });
        }
        Ok(())
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (r, col): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + col]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, col): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + col]
    }
}

// Operator forms panic on mismatched dimensions; use the `checked_*` methods
// where the dimensions come from user input.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_mul(rhs).expect("matrix product")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_add(rhs).expect("matrix sum")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_sub(rhs).expect("matrix difference")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for col in 0..self.dim {
                let z = self[(r, col)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b`, `a`'s index slowest.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim, b.dim);
    ComplexMatrix::from_fn(da * db, |r, col| a[(r / db, col / db)] * b[(r % db, col % db)])
}

/// Kronecker product of column vectors.
pub fn tensor_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Which tensor factor a partial trace removes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

pub fn partial_trace(rho: &ComplexMatrix, traced: Subsystem, dims: (usize, usize)) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    if da == 0 || db == 0 || rho.dim != da * db {
        return Err(Error::DimensionMismatch {
            op: "partial trace",
            left: rho.dim,
            right: da * db,
        });
    }
    Ok(match traced {
        Subsystem::Second => {
            ComplexMatrix::from_fn(da, |a1, a2| (0..db).map(|b| rho[(a1 * db + b, a2 * db + b)]).sum())
        }
        Subsystem::First => ComplexMatrix::from_fn(db, |b1, b2| (0..da).map(|a| rho[(a * db + b1, a * db + b2)]).sum()),
    })
}

/// Spectral decomposition of a Hermitian matrix.
///
/// `values` are sorted descending; `vectors[k]` is the unit eigenvector for
/// `values[k]`, with its global phase fixed so that its largest-magnitude
/// component (first one on ties) is real and non-negative. Inside a
/// degenerate eigenspace the basis is whatever the rotation sequence yields.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
}

impl EigenDecomposition {
    /// `Σ_k values_k |v_k><v_k|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n);
        for (value, v) in self.values.iter().zip(&self.vectors) {
            for r in 0..n {
                for col in 0..n {
                    out[(r, col)] += v[r] * v[col].conj() * *value;
                }
            }
        }
        out
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim;
    let mut s = 0.0;
    for r in 0..n {
        for col in 0..n {
            if r != col {
                s += a[(r, col)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    let deviation = a.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let n = a.dim;
    let mut w = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_OFF_TOL * a.frobenius_norm().max(1.0);

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&w) < threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut w, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        w[(j, j)]
            .re
            .partial_cmp(&w[(i, i)].re)
            .expect("finite eigenvalues")
            .then(i.cmp(&j))
    });

    let values = order.iter().map(|&k| w[(k, k)].re).collect();
    let vectors = order
        .iter()
        .map(|&k| canonical_phase((0..n).map(|r| v[(r, k)]).collect()))
        .collect();
    Ok(EigenDecomposition { values, vectors })
}

/// Zeroes `w[p][q]` with a unitary plane rotation `J`, updating
/// `w <- J^dag w J` and `v <- v J`.
fn jacobi_rotate(w: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = w[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = w[(p, p)].re;
    let aqq = w[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;

    // J = diag(1, e^{-i phi}) · [[c, s], [-s, c]] restricted to the (p, q) plane.
    let jpp = re(cs);
    let jpq = re(sn);
    let jqp = -phase.conj() * sn;
    let jqq = phase.conj() * cs;

    let n = w.dim;
    for k in 0..n {
        let akp = w[(k, p)];
        let akq = w[(k, q)];
        w[(k, p)] = akp * jpp + akq * jqp;
        w[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let apk = w[(p, k)];
        let aqk = w[(q, k)];
        w[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        w[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    w[(p, q)] = re(0.0);
    w[(q, p)] = re(0.0);
    w[(p, p)] = re(w[(p, p)].re);
    w[(q, q)] = re(w[(q, q)].re);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

fn canonical_phase(mut vec: Vec<C64>) -> Vec<C64> {
    let max = vec.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return vec;
    }
    let pivot = vec
        .iter()
        .position(|z| z.norm() >= max - 1e-12)
        .expect("some component reaches the maximum");
    let rot = vec[pivot].conj() / vec[pivot].norm();
    for z in vec.iter_mut() {
        *z *= rot;
    }
    vec[pivot] = re(vec[pivot].re);
    vec
}

/// `exp(i * phase * h)` for Hermitian `h`, through its eigendecomposition.
pub fn hermitian_exp(h: &ComplexMatrix, phase: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h)?;
    let n = h.dim;
    let mut out = ComplexMatrix::zeros(n);
    for (value, v) in eig.values.iter().zip(&eig.vectors) {
        let e = C64::from_polar(1.0, phase * value);
        for r in 0..n {
            for col in 0..n {
                out[(r, col)] += e * v[r] * v[col].conj();
            }
        }
    }
    Ok(out)
}

/// Sum of singular values, `tr sqrt(A^dag A)`.
pub fn trace_norm(a: &ComplexMatrix) -> f64 {
    let scale = a.frobenius_norm().max(1.0);
    if a.hermitian_deviation() <= 1e-13 * scale {
        let eig = hermitian_eig(a).expect("checked Hermitian");
        return eig.values.iter().map(|x| x.abs()).sum();
    }
    let gram = (&a.adjoint() * a).hermitian_part();
    let eig = hermitian_eig(&gram).expect("Gram matrix is Hermitian");
    eig.values.iter().map(|x| x.max(0.0).sqrt()).sum()
}

/// `<a|b>`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
