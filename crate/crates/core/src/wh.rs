//! Weyl–Heisenberg operators, the discrete Fourier transform and the
//! generalized Bell basis.
//!
//! Conventions used throughout the crate:
//! - `D_jk = X^j Z^k` with no extra phase, for odd and even `d` alike.
//! - Outcome `(j, k)` is flattened to the linear index `j·d + k`.
//! - In `H_d ⊗ H_d` the first factor is the most significant index.

use std::fmt;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{NaimarkError, Result};
use crate::linalg::{Ket, Matrix};
use crate::scalar::{cis, Real, C};

/// Index `(j, k)` of a displacement operator, reduced mod `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WhIndex {
    pub j: usize,
    pub k: usize,
}

impl WhIndex {
    /// Reduces arbitrary integers mod `d`.
    pub fn new(d: usize, j: i64, k: i64) -> Self {
        let m = d as i64;
        Self {
            j: j.rem_euclid(m) as usize,
            k: k.rem_euclid(m) as usize,
        }
    }

    pub fn linear(self, d: usize) -> usize {
        self.j * d + self.k
    }

    pub fn from_linear(d: usize, idx: usize) -> Self {
        Self {
            j: idx / d,
            k: idx % d,
        }
    }

    /// All `d²` indices in `j·d + k` order.
    pub fn all(d: usize) -> impl Iterator<Item = WhIndex> {
        (0..d * d).map(move |i| Self::from_linear(d, i))
    }
}

impl fmt::Display for WhIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.j, self.k)
    }
}

fn require_dim(d: usize, min: usize) -> Result<()> {
    if d < min {
        return Err(NaimarkError::InvalidDimension {
            dim: d,
            reason: if min == 1 { "d must be at least 1" } else { "d must be at least 2" },
        });
    }
    Ok(())
}

/// `ω^p = exp(2πi·p/d)` with the exponent reduced mod `d` before evaluation.
pub fn omega_pow<T: Real>(d: usize, p: i64) -> C<T> {
    let p = p.rem_euclid(d as i64);
    if p == 0 {
        return C::one();
    }
    cis(T::TAU() * T::from_count(p as usize) / T::from_count(d))
}

/// The primitive root `ω = exp(2πi/d)`.
pub fn root_of_unity<T: Real>(d: usize) -> Result<C<T>> {
    require_dim(d, 1)?;
    Ok(omega_pow(d, 1))
}

/// Shift `X|k⟩ = |k+1⟩`.
pub fn shift_op<T: Real>(d: usize) -> Result<Matrix<T>> {
    require_dim(d, 2)?;
    Ok(shift_power(d, 1))
}

/// Clock `Z|k⟩ = ω^k|k⟩`.
pub fn clock_op<T: Real>(d: usize) -> Result<Matrix<T>> {
    require_dim(d, 2)?;
    Ok(clock_power(d, 1))
}

/// `X^p` for any integer `p`.
pub fn shift_power<T: Real>(d: usize, p: i64) -> Matrix<T> {
    let p = p.rem_euclid(d as i64) as usize;
    Matrix::from_fn(d, d, |r, c| if r == (c + p) % d { C::one() } else { C::zero() })
}

/// `Z^p` for any integer `p`.
pub fn clock_power<T: Real>(d: usize, p: i64) -> Matrix<T> {
    let diag: Vec<C<T>> = (0..d).map(|m| omega_pow(d, p * m as i64)).collect();
    Matrix::from_diagonal(&diag)
}

/// `D_jk = X^j Z^k`.
pub fn displacement<T: Real>(d: usize, idx: WhIndex) -> Result<Matrix<T>> {
    require_dim(d, 2)?;
    if idx.j >= d || idx.k >= d {
        return Err(NaimarkError::IndexOutOfRange {
            index: idx.j.max(idx.k),
            dim: d,
        });
    }
    // Column m carries ω^{km} into row m + j.
    Ok(Matrix::from_fn(d, d, |r, c| {
        if r == (c + idx.j) % d {
            omega_pow(d, (idx.k * c) as i64)
        } else {
            C::zero()
        }
    }))
}

/// `D_jk|v⟩` computed without forming the matrix.
pub fn displace<T: Real>(d: usize, idx: WhIndex, v: &Ket<T>) -> Ket<T> {
    debug_assert_eq!(v.dim(), d);
    let mut out = vec![C::zero(); d];
    for (m, &a) in v.amplitudes().iter().enumerate() {
        out[(m + idx.j) % d] = a * omega_pow::<T>(d, (idx.k * m) as i64);
    }
    Ket::from_amplitudes(out)
}

/// `F = (1/√d) Σ_jk ω^{jk}|j⟩⟨k|`.
pub fn fourier<T: Real>(d: usize) -> Result<Matrix<T>> {
    require_dim(d, 1)?;
    let s = T::from_count(d).sqrt().recip();
    Ok(Matrix::from_fn(d, d, |r, c| omega_pow::<T>(d, (r * c) as i64) * s))
}

/// `|D_jk⟩ = (1/√d) Σ_l ω^{kl}|j+l, l⟩`, a vector in `H_d ⊗ H_d`.
pub fn bell_vector<T: Real>(d: usize, idx: WhIndex) -> Result<Ket<T>> {
    require_dim(d, 2)?;
    if idx.j >= d || idx.k >= d {
        return Err(NaimarkError::IndexOutOfRange {
            index: idx.j.max(idx.k),
            dim: d,
        });
    }
    let s = T::from_count(d).sqrt().recip();
    let mut amps = vec![C::zero(); d * d];
    for l in 0..d {
        amps[((idx.j + l) % d) * d + l] = omega_pow::<T>(d, (idx.k * l) as i64) * s;
    }
    Ok(Ket::from_amplitudes(amps))
}

/// `𝒟 = Σ_jk |j,k⟩⟨D_jk|`: row `j·d + k` is the conjugated Bell vector.
pub fn bell_change_of_basis<T: Real>(d: usize) -> Result<Matrix<T>> {
    require_dim(d, 2)?;
    let mut out = Matrix::zeros(d * d, d * d);
    for idx in WhIndex::all(d) {
        let v = bell_vector::<T>(d, idx)?;
        let row = idx.linear(d);
        for (c, z) in v.amplitudes().iter().enumerate() {
            out[(row, c)] = z.conj();
        }
    }
    Ok(out)
}

/// Hilbert–Schmidt inner product `tr(A† B)`.
pub fn hilbert_schmidt<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> C<T> {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x.conj() * y)
        .fold(Complex::zero(), |acc, z| acc + z)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn close(a: C<f64>, re: f64, im: f64) -> bool {
        (a - C::new(re, im)).norm() < TOL
    }

    #[test]
    fn roots_of_unity() {
        assert!(close(root_of_unity::<f64>(1).unwrap(), 1.0, 0.0));
        assert!(close(root_of_unity::<f64>(2).unwrap(), -1.0, 0.0));
        assert!(close(root_of_unity::<f64>(4).unwrap(), 0.0, 1.0));
        assert!(matches!(
            root_of_unity::<f64>(0),
            Err(NaimarkError::InvalidDimension { dim: 0, .. })
        ));
    }

    #[test]
    fn pauli_limits_at_d2() {
        let x = shift_op::<f64>(2).unwrap();
        let z = clock_op::<f64>(2).unwrap();
        let px = Matrix::from_f64_rows(&[&[(0., 0.), (1., 0.)], &[(1., 0.), (0., 0.)]]).unwrap();
        let pz = Matrix::from_f64_rows(&[&[(1., 0.), (0., 0.)], &[(0., 0.), (-1., 0.)]]).unwrap();
        assert!(x.max_abs_diff(&px) < TOL);
        assert!(z.max_abs_diff(&pz) < TOL);
        assert!(shift_op::<f64>(1).is_err());
        assert!(clock_op::<f64>(0).is_err());
    }

    #[test]
    fn clock_qutrit_diagonal() {
        let z = clock_op::<f64>(3).unwrap();
        let w = C::from_polar(1.0, std::f64::consts::TAU / 3.0);
        assert!(close(z[(0, 0)], 1.0, 0.0));
        assert!((z[(1, 1)] - w).norm() < TOL);
        assert!((z[(2, 2)] - w * w).norm() < TOL);
    }

    #[test]
    fn displacement_examples() {
        let d00 = displacement::<f64>(2, WhIndex { j: 0, k: 0 }).unwrap();
        assert!(d00.max_abs_diff(&Matrix::identity(2)) < TOL);
        let d11 = displacement::<f64>(2, WhIndex { j: 1, k: 1 }).unwrap();
        let expect = Matrix::from_f64_rows(&[&[(0., 0.), (-1., 0.)], &[(1., 0.), (0., 0.)]]).unwrap();
        assert!(d11.max_abs_diff(&expect) < TOL);
        // Oracle: explicit product of powers.
        let x = shift_op::<f64>(3).unwrap();
        let z = clock_op::<f64>(3).unwrap();
        let d12 = displacement::<f64>(3, WhIndex { j: 1, k: 2 }).unwrap();
        assert!(d12.max_abs_diff(&(&x * &(&z * &z))) < TOL);
        assert!(close(hilbert_schmidt(&d12, &d12), 3.0, 0.0));
        let d10 = displacement::<f64>(3, WhIndex { j: 1, k: 0 }).unwrap();
        assert!(close(hilbert_schmidt(&d12, &d10), 0.0, 0.0));
    }

    #[test]
    fn displace_matches_matrix() {
        let v = Ket::from_amplitudes(vec![C::new(0.3, 0.1), C::new(-0.2, 0.5), C::new(0.7, 0.0), C::new(0.0, -0.4)]);
        for idx in WhIndex::all(4) {
            let m = displacement::<f64>(4, idx).unwrap();
            assert!(m.apply(&v).unwrap().max_abs_diff(&displace(4, idx, &v)) < TOL);
        }
    }

    #[test]
    fn fourier_examples() {
        let h = 0.5f64.sqrt();
        let f2 = fourier::<f64>(2).unwrap();
        let had = Matrix::from_f64_rows(&[&[(h, 0.), (h, 0.)], &[(h, 0.), (-h, 0.)]]).unwrap();
        assert!(f2.max_abs_diff(&had) < TOL);
        assert!(fourier::<f64>(1).unwrap().max_abs_diff(&Matrix::identity(1)) < TOL);
        let f5 = fourier::<f64>(5).unwrap();
        let conj = &(&f5.adjoint() * &clock_op(5).unwrap()) * &f5;
        assert!(conj.max_abs_diff(&shift_op(5).unwrap()) < TOL);
    }

    #[test]
    fn bell_vector_examples() {
        let h = 0.5f64.sqrt();
        let b00 = bell_vector::<f64>(2, WhIndex { j: 0, k: 0 }).unwrap();
        assert!(close(b00[0], h, 0.) && close(b00[3], h, 0.) && close(b00[1], 0., 0.));
        // (1/√2)(|1,0⟩ + ω|0,1⟩) with ω = −1.
        let b11 = bell_vector::<f64>(2, WhIndex { j: 1, k: 1 }).unwrap();
        assert!(close(b11[2], h, 0.) && close(b11[1], -h, 0.));
        assert!(close(b11[0], 0., 0.) && close(b11[3], 0., 0.));
    }

    #[test]
    fn bell_rows_are_conjugated_vectors() {
        let dd = bell_change_of_basis::<f64>(3).unwrap();
        for idx in WhIndex::all(3) {
            let v = bell_vector::<f64>(3, idx).unwrap();
            let row: Vec<C<f64>> = dd.row(idx.linear(3)).to_vec();
            let conj: Vec<C<f64>> = v.amplitudes().iter().map(|z| z.conj()).collect();
            assert!(row.iter().zip(&conj).all(|(a, b)| (a - b).norm() < TOL));
        }
        assert!(dd.unitarity_residual() < TOL);
        let dd2 = bell_change_of_basis::<f64>(2).unwrap();
        let bell = bell_vector::<f64>(2, WhIndex { j: 0, k: 0 }).unwrap();
        assert!(dd2.apply(&bell).unwrap().max_abs_diff(&Ket::basis(4, 0).unwrap()) < TOL);
    }

    #[test]
    fn wh_index_reduces_mod_d() {
        assert_eq!(WhIndex::new(3, -1, 7), WhIndex { j: 2, k: 1 });
        assert_eq!(WhIndex::from_linear(3, 7).linear(3), 7);
    }

    #[test]
    fn single_precision_fourier_conjugacy() {
        let f = fourier::<f32>(4).unwrap();
        let conj = &(&f.adjoint() * &clock_op::<f32>(4).unwrap()) * &f;
        assert!(conj.max_abs_diff(&shift_op::<f32>(4).unwrap()) < 1e-5);
    }
}
