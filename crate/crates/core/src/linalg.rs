//! Dense complex matrices and kets.
//!
//! Everything here is row-major and sized at desk scale (a few thousand
//! entries), so the routines favour clarity over blocking or SIMD.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_traits::{One, Zero};

use crate::error::{NaimarkError, Result};
use crate::scalar::{Real, C};

/// Dense complex matrix with explicit shape.
#[derive(Clone, PartialEq)]
pub struct Matrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<C<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(NaimarkError::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { C::one() } else { C::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[C<T>]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |r, c| if r == c { diag[r] } else { C::zero() })
    }

    /// Builds a matrix from row vectors of equal length.
    pub fn from_rows(rows: &[Vec<C<T>>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(NaimarkError::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix from nested `(re, im)` literals.
    pub fn from_f64_rows(rows: &[&[(f64, f64)]]) -> Result<Self> {
        let rows: Vec<Vec<C<T>>> = rows
            .iter()
            .map(|r| r.iter().map(|&(re, im)| C::new(T::lit(re), T::lit(im))).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C<T>] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<C<T>> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: C<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Kronecker product `self ⊗ other`; `self` indexes the most significant factor.
    pub fn kron(&self, other: &Self) -> Self {
        let (pr, pc) = (other.rows, other.cols);
        Self::from_fn(self.rows * pr, self.cols * pc, |r, c| {
            self[(r / pr, c / pc)] * other[(r % pr, c % pc)]
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(NaimarkError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d = *d + a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &Ket<T>) -> Result<Ket<T>> {
        if self.cols != v.dim() {
            return Err(NaimarkError::DimensionMismatch {
                expected: self.cols,
                found: v.dim(),
            });
        }
        let amps = (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v.amplitudes())
                    .map(|(&a, &b)| a * b)
                    .sum()
            })
            .collect();
        Ok(Ket::from_amplitudes(amps))
    }

    /// Entrywise maximum modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// `‖self − other‖_max`; infinite when the shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        if self.rows != other.rows || self.cols != other.cols {
            return T::infinity();
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// `‖A†A − I‖_max`; infinite for non-square input.
    pub fn unitarity_residual(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitarity_residual() <= tol
    }

    /// `‖A − A†‖_max`.
    pub fn hermiticity_residual(&self) -> T {
        self.max_abs_diff(&self.adjoint())
    }

    /// The `size × size` block whose top-left corner is `(r·size, c·size)`.
    pub fn block(&self, r: usize, c: usize, size: usize) -> Self {
        Self::from_fn(size, size, |i, j| self[(r * size + i, c * size + j)])
    }

    pub fn set_block(&mut self, r: usize, c: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r * block.rows + i, c * block.cols + j)] = block[(i, j)];
            }
        }
    }

    /// Eigenvalues (ascending) of a Hermitian matrix; only the Hermitian part is used.
    pub fn hermitian_eigenvalues(&self) -> Vec<T> {
        assert!(self.is_square(), "eigenvalues of a non-square matrix");
        let n = self.rows;
        let half = T::lit(0.5);
        // Real symmetric embedding [[A_re, -A_im], [A_im, A_re]] doubles every eigenvalue.
        let m = 2 * n;
        let mut real = vec![T::zero(); m * m];
        for r in 0..n {
            for c in 0..n {
                let h = (self[(r, c)] + self[(c, r)].conj()) * half;
                real[r * m + c] = h.re;
                real[(r + n) * m + c + n] = h.re;
                real[r * m + c + n] = -h.im;
                real[(r + n) * m + c] = h.im;
            }
        }
        let eig = symmetric_eigenvalues(real, m);
        eig.chunks(2).map(|p| (p[0] + p[1]) * half).collect()
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> Vec<T> {
        let gram = &self.adjoint() * self;
        let mut sv: Vec<T> = gram
            .hermitian_eigenvalues()
            .into_iter()
            .map(|x| x.max(T::zero()).sqrt())
            .collect();
        sv.reverse();
        sv
    }

    /// Finds a row permutation relating `self` to `other`;
    /// returns the permutation `p` with `self.row(i) == other.row(p[i])`.
    pub fn row_permutation_of(&self, other: &Self, tol: T) -> Option<Vec<usize>> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        let close = |a: &[C<T>], b: &[C<T>]| a.iter().zip(b).all(|(x, y)| (*x - *y).norm() <= tol);
        let mut used = vec![false; other.rows];
        let mut perm = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let j = (0..other.rows).find(|&j| !used[j] && close(self.row(i), other.row(j)))?;
            used[j] = true;
            perm.push(j);
        }
        Some(perm)
    }
}

impl<T: Real> Index<(usize, usize)> for Matrix<T> {
    type Output = C<T>;

    fn index(&self, (r, c): (usize, usize)) -> &C<T> {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C<T> {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: Self) -> Matrix<T> {
        self.try_mul(rhs)
            .unwrap_or_else(|e| panic!("matrix product: {e}"))
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: Self) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: Self) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl<T: Real> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(r) {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Complex column vector. Fiducials and input states are normalized at construction
/// via [`Ket::normalized`]; intermediate results may not be.
#[derive(Clone, PartialEq)]
pub struct Ket<T: Real> {
    amplitudes: Vec<C<T>>,
}

impl<T: Real> Ket<T> {
    /// Wraps amplitudes without any normalization check.
    pub fn from_amplitudes(amplitudes: Vec<C<T>>) -> Self {
        Self { amplitudes }
    }

    /// Accepts amplitudes whose 2-norm is within `tol` of one.
    pub fn normalized(amplitudes: Vec<C<T>>, tol: T) -> Result<Self> {
        let ket = Self { amplitudes };
        if ket.dim() == 0 {
            return Err(NaimarkError::InvalidDimension {
                dim: 0,
                reason: "empty ket",
            });
        }
        let norm = ket.norm();
        if (norm - T::one()).abs() > tol {
            return Err(NaimarkError::NotNormalized {
                norm: norm.to_f64_lossy(),
            });
        }
        Ok(ket)
    }

    /// Rescales to unit norm.
    pub fn normalize(amplitudes: Vec<C<T>>) -> Result<Self> {
        let ket = Self { amplitudes };
        let norm = ket.norm();
        if norm <= T::epsilon() {
            return Err(NaimarkError::InvalidInput("cannot normalize a zero vector".into()));
        }
        Ok(ket.scale(C::new(norm.recip(), T::zero())))
    }

    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(NaimarkError::IndexOutOfRange { index: k, dim });
        }
        let mut amplitudes = vec![C::zero(); dim];
        amplitudes[k] = C::one();
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C<T>> {
        self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C<T> {
        debug_assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Componentwise complex conjugate `|ψ*⟩`.
    pub fn conj(&self) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|&z| z * s).collect(),
        }
    }

    /// `|self⟩ ⊗ |other⟩`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for &a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|&b| a * b));
        }
        Self { amplitudes }
    }

    /// `|self⟩⟨other|`.
    pub fn outer(&self, other: &Self) -> Matrix<T> {
        Matrix::from_fn(self.dim(), other.dim(), |r, c| {
            self.amplitudes[r] * other.amplitudes[c].conj()
        })
    }

    /// `‖self − other‖_∞`; infinite when dimensions differ.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        if self.dim() != other.dim() {
            return T::infinity();
        }
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }
}

impl<T: Real> Index<usize> for Ket<T> {
    type Output = C<T>;

    fn index(&self, i: usize) -> &C<T> {
        &self.amplitudes[i]
    }
}

impl<T: Real> fmt::Debug for Ket<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.amplitudes.iter().map(|z| (z.re, z.im)))
            .finish()
    }
}

/// Eigenvalues (ascending) of a real symmetric `n × n` matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues<T: Real>(mut a: Vec<T>, n: usize) -> Vec<T> {
    assert_eq!(a.len(), n * n);
    let two = T::lit(2.0);
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q] * a[p * n + q])
            .sum();
        let diag: T = (0..n).map(|p| a[p * n + p] * a[p * n + p]).sum();
        if off <= T::epsilon() * T::epsilon() * (diag + off) || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let cos = (t * t + T::one()).sqrt().recip();
                let sin = t * cos;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = cos * akp - sin * akq;
                    a[k * n + q] = sin * akp + cos * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = cos * apk - sin * aqk;
                    a[q * n + k] = sin * apk + cos * aqk;
                }
            }
        }
    }
    let mut eig: Vec<T> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    eig
}

/// Solves the real system `a·x = b` by LU with partial pivoting.
pub fn solve_real<T: Real>(mut a: Vec<T>, mut b: Vec<T>, n: usize) -> Result<Vec<T>> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    let scale = a.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let floor = scale * T::epsilon() * T::from_count(n.max(1));
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                a[i * n + col]
                    .abs()
                    .partial_cmp(&a[j * n + col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty pivot range");
        if a[pivot * n + col].abs() <= floor {
            return Err(NaimarkError::NumericalFailure(format!(
                "singular system at column {col}"
            )));
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            b.swap(pivot, col);
        }
        let diag = a[col * n + col];
        for r in col + 1..n {
            let factor = a[r * n + col] / diag;
            if factor == T::zero() {
                continue;
            }
            for k in col..n {
                a[r * n + k] = a[r * n + k] - factor * a[col * n + k];
            }
            b[r] = b[r] - factor * b[col];
        }
    }
    let mut x = vec![T::zero(); n];
    for r in (0..n).rev() {
        let tail: T = (r + 1..n).map(|k| a[r * n + k] * x[k]).sum();
        x[r] = (b[r] - tail) / a[r * n + r];
    }
    Ok(x)
}
