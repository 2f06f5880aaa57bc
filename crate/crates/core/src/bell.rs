//! The same Naimark unitary seen as an ancilla preparation followed by a
//! generalized Bell-basis measurement: `U = 𝒟 (I ⊗ Mᵀ)`.
//!
//! Tensor order is system ⊗ ancilla; the ancilla is the control of the
//! controlled shift.

use crate::block::{require_unitary, NaimarkExtension, Provenance};
use crate::error::{NaimarkError, Result};
use crate::fiducials::{Fiducial, PHYSICAL_TOL};
use crate::linalg::Matrix;
use crate::scalar::{tol, Real, C};
use crate::block::diagonal_blocks_closed_form;
use crate::wh::{bell_change_of_basis, clock_power, fourier, omega_pow, shift_power};

/// `U = 𝒟 (I ⊗ Mᵀ)`.
pub fn build_bell_naimark<T: Real>(m: &Matrix<T>) -> Result<NaimarkExtension<T>> {
    require_unitary(m, tol(PHYSICAL_TOL))?;
    let d = m.rows();
    let u = &bell_change_of_basis::<T>(d)? * &Matrix::identity(d).kron(&m.transpose());
    Ok(NaimarkExtension {
        dim: d,
        m: m.clone(),
        u,
        diag_blocks: diagonal_blocks_closed_form(m)?,
        provenance: Provenance::BellConstruction,
    })
}

/// Closed form `⟨r,s|U|t,u⟩ = ω^{-s(t−r)} ⟨u|M|t−r⟩ / √d`.
pub fn matrix_element<T: Real>(m: &Matrix<T>, r: usize, s: usize, t: usize, u: usize) -> Result<C<T>> {
    let d = m.rows();
    if let Some(&bad) = [r, s, t, u].iter().find(|&&x| x >= d) {
        return Err(NaimarkError::IndexOutOfRange { index: bad, dim: d });
    }
    let q = (t + d - r) % d;
    Ok(omega_pow::<T>(d, -((s * q) as i64)) * m[(u, q)] * T::from_count(d).sqrt().recip())
}

/// `Σ_j X^{-j} ⊗ |j⟩⟨j|`, shift on the system controlled by the ancilla.
pub fn controlled_shift<T: Real>(d: usize) -> Result<Matrix<T>> {
    if d < 2 {
        return Err(NaimarkError::InvalidDimension {
            dim: d,
            reason: "d must be at least 2",
        });
    }
    let mut out = Matrix::zeros(d * d, d * d);
    for j in 0..d {
        let proj = Matrix::from_fn(d, d, |a, b| {
            if a == j && b == j { C::new(T::one(), T::zero()) } else { C::new(T::zero(), T::zero()) }
        });
        out = &out + &shift_power::<T>(d, -(j as i64)).kron(&proj);
    }
    Ok(out)
}

/// `(I ⊗ F†)(Σ_j X^{-j} ⊗ |j⟩⟨j|)`, which equals the Bell change of basis.
pub fn shift_decomposition<T: Real>(d: usize) -> Result<Matrix<T>> {
    let cs = controlled_shift::<T>(d)?;
    let left = Matrix::identity(d).kron(&fourier::<T>(d)?.adjoint());
    Ok(&left * &cs)
}

/// `[(F† ⊗ F†)(Σ_j |j⟩⟨j| ⊗ Z^{-j})(F ⊗ I)](I ⊗ Mᵀ)`: controlled clock with
/// control and target exchanged relative to [`shift_decomposition`].
pub fn clock_decomposition<T: Real>(m: &Matrix<T>) -> Result<Matrix<T>> {
    require_unitary(m, tol(PHYSICAL_TOL))?;
    let d = m.rows();
    let f = fourier::<T>(d)?;
    let fd = f.adjoint();
    let id = Matrix::identity(d);
    let mut controlled_clock = Matrix::zeros(d * d, d * d);
    for j in 0..d {
        let proj = Matrix::from_fn(d, d, |a, b| {
            if a == j && b == j { C::new(T::one(), T::zero()) } else { C::new(T::zero(), T::zero()) }
        });
        controlled_clock = &controlled_clock + &proj.kron(&clock_power(d, -(j as i64)));
    }
    let basis = &(&fd.kron(&fd) * &controlled_clock) * &f.kron(&id);
    Ok(&basis * &id.kron(&m.transpose()))
}

/// `|m_i⟩` with `⟨m_i| = ⟨i|M`: the fiducial realized by the embedding `|ψ, i⟩`.
pub fn fiducial_for_embedding<T: Real>(m: &Matrix<T>, i: usize) -> Result<Fiducial<T>> {
    if i >= m.rows() {
        return Err(NaimarkError::IndexOutOfRange { index: i, dim: m.rows() });
    }
    let amps = m.row(i).iter().map(|z| z.conj()).collect();
    Fiducial::new(format!("row-{i}"), amps, tol(PHYSICAL_TOL))
}
