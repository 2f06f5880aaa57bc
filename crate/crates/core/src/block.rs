//! Block-circulant Naimark unitary built from a `d × d` unitary `M`.
//!
//! Given `M` whose first row is `⟨φ|`, the `d² × d²` unitary has the block
//! layout
//!
//! ```text
//! U = | S_0     S_1  ...  S_{d-1} |
//!     | S_{d-1} S_0  ...  S_{d-2} |
//!     |  ...                      |
//! ```
//!
//! with rank-one blocks `S_k = |f_k⟩⟨m_k|`, where `|f_k⟩ = F†|k⟩` and
//! `⟨m_k| = ⟨k|Mᵀ`. The `1/√d` normalization lives inside `F†`, so it is
//! applied exactly once. Fourier transforming the block index diagonalizes
//! `U` into blocks `U_j = F† Z^{-j} Mᵀ`.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{NaimarkError, Result};
use crate::fiducials::{ququart_alpha, ququart_norm, Fiducial, PHYSICAL_TOL};
use crate::linalg::{Ket, Matrix};
use crate::scalar::{cis, tol, Real, C};
use crate::wh::{clock_power, fourier, omega_pow};

/// Which construction produced a [`NaimarkExtension`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    BlockConstruction,
    BellConstruction,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::BlockConstruction => "block-construction",
            Provenance::BellConstruction => "bell-construction",
        }
    }
}

/// Naimark unitary together with the data it was built from.
#[derive(Debug, Clone)]
pub struct NaimarkExtension<T: Real> {
    pub dim: usize,
    pub m: Matrix<T>,
    pub u: Matrix<T>,
    /// `U_j = F† Z^{-j} Mᵀ`, the Fourier block diagonal of `u`.
    pub diag_blocks: Vec<Matrix<T>>,
    pub provenance: Provenance,
}

impl<T: Real> NaimarkExtension<T> {
    /// `|m_i⟩`, the fiducial realized by embedding the input at ancilla offset `i`.
    pub fn embedded_fiducial(&self, i: usize) -> Result<Ket<T>> {
        if i >= self.dim {
            return Err(NaimarkError::IndexOutOfRange { index: i, dim: self.dim });
        }
        Ok(Ket::from_amplitudes(self.m.row(i).iter().map(|z| z.conj()).collect()))
    }
}

pub(crate) fn require_unitary<T: Real>(m: &Matrix<T>, tol: T) -> Result<()> {
    if !m.is_square() {
        return Err(NaimarkError::InvalidInput(format!(
            "M must be square, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if m.rows() < 2 {
        return Err(NaimarkError::InvalidDimension {
            dim: m.rows(),
            reason: "d must be at least 2",
        });
    }
    let residual = m.unitarity_residual();
    if residual > tol {
        return Err(NaimarkError::InvalidInput(format!(
            "M is not unitary (residual {residual})"
        )));
    }
    Ok(())
}

/// Completes `⟨φ|` to a unitary `M` deterministically.
///
/// For `d = 2` this returns `[[φ₀*, φ₁*], [−φ₁, φ₀]]`. Otherwise the standard
/// basis vector with the largest overlap against `φ*` is dropped and the rest
/// are orthonormalized against row 0 in index order (modified Gram–Schmidt).
pub fn complete_unitary_m<T: Real>(fiducial: &Fiducial<T>) -> Matrix<T> {
    let phi = fiducial.ket().amplitudes();
    let d = phi.len();
    let first: Vec<C<T>> = phi.iter().map(|z| z.conj()).collect();
    if d == 2 {
        return Matrix::from_rows(&[first, vec![-phi[1], phi[0]]]).expect("2x2");
    }
    let dropped = (0..d)
        .fold((0, T::neg_infinity()), |(best, val), i| {
            let o = phi[i].norm();
            if o > val { (i, o) } else { (best, val) }
        })
        .0;
    let mut rows = vec![first];
    for e in (0..d).filter(|&i| i != dropped) {
        let mut v = vec![C::zero(); d];
        v[e] = Complex::new(T::one(), T::zero());
        // Two passes keep the rows orthogonal to working precision.
        for _ in 0..2 {
            for r in &rows {
                let proj: C<T> = r.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, a) in v.iter_mut().zip(r) {
                    *x = *x - proj * a;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        rows.push(v.into_iter().map(|z| z / norm).collect());
    }
    Matrix::from_rows(&rows).expect("square by construction")
}

/// Labels accepted by [`catalog_m`] with their dimension.
pub const M_CATALOG: &[(usize, &str)] = &[(2, "qubit"), (3, "hesse"), (4, "ququart")];

/// The catalog `M` that pairs with a catalog fiducial label, if any.
pub fn m_label_for_fiducial(label: &str) -> Option<&'static str> {
    match label {
        "qubit-sic" => Some("qubit"),
        "hesse" => Some("hesse"),
        "ququart-sic" => Some("ququart"),
        _ => None,
    }
}

/// The explicit `M` matrices of the qubit, Hesse and ququart SIC examples.
pub fn catalog_m<T: Real>(d: usize, label: &str) -> Result<Matrix<T>> {
    match (d, label) {
        (2, "qubit") => {
            let f = crate::fiducials::builtin_fiducial::<T>(2, "qubit-sic")?;
            let p = f.ket().amplitudes();
            Matrix::from_rows(&[vec![p[0].conj(), p[1].conj()], vec![-p[1], p[0]]])
        }
        (3, "hesse") => {
            let h = 0.5f64.sqrt();
            Matrix::from_f64_rows(&[
                &[(0., 0.), (h, 0.), (-h, 0.)],
                &[(1., 0.), (0., 0.), (0., 0.)],
                &[(0., 0.), (h, 0.), (h, 0.)],
            ])
        }
        (4, "ququart") => {
            let a = ququart_alpha::<T>();
            let n = ququart_norm::<T>();
            let z = T::zero();
            let o = T::one();
            let re = |x: T| Complex::new(x, z);
            let im = |x: T| Complex::new(z, x);
            let phased = [
                [re(o), im(a), re(o), im(-a)],
                [re(-o), im(o), re(-o), im(-o)],
                [re(a), im(-o), re(a), im(o)],
                [re(-o), im(-o), re(-o), im(o)],
            ];
            let plain = [
                [re(o), im(o), re(-o), im(o)],
                [re(-a), im(o), re(a), im(o)],
                [re(-o), im(o), re(o), im(o)],
                [re(o), im(a), re(-o), im(a)],
            ];
            let e = cis(T::FRAC_PI_4());
            Ok(Matrix::from_fn(4, 4, |r, c| (e * phased[r][c] + plain[r][c]) * n))
        }
        _ => Err(NaimarkError::CatalogMiss {
            dim: d,
            label: label.to_string(),
        }),
    }
}

/// `S_k = |f_k⟩⟨m_k|`, i.e. `S_k[s][u] = ω^{-sk} M[u][k] / √d`.
pub fn block_s<T: Real>(m: &Matrix<T>, k: usize) -> Result<Matrix<T>> {
    let d = m.rows();
    if k >= d {
        return Err(NaimarkError::IndexOutOfRange { index: k, dim: d });
    }
    let s = T::from_count(d).sqrt().recip();
    Ok(Matrix::from_fn(d, d, |row, u| {
        omega_pow::<T>(d, -((row * k) as i64)) * m[(u, k)] * s
    }))
}

/// Places `blocks[(t − r) mod d]` at block position `(r, t)`.
pub fn block_circulant<T: Real>(blocks: &[Matrix<T>]) -> Result<Matrix<T>> {
    let d = blocks.len();
    let size = blocks.first().map_or(0, Matrix::rows);
    if blocks.iter().any(|b| b.rows() != size || b.cols() != size) {
        return Err(NaimarkError::InvalidInput("blocks must share one square size".into()));
    }
    let mut u = Matrix::zeros(d * size, d * size);
    for r in 0..d {
        for t in 0..d {
            u.set_block(r, t, &blocks[(t + d - r) % d]);
        }
    }
    Ok(u)
}

/// Builds the block-circulant Naimark unitary from a unitary `M`.
pub fn assemble_u<T: Real>(m: &Matrix<T>) -> Result<NaimarkExtension<T>> {
    require_unitary(m, tol(PHYSICAL_TOL))?;
    let d = m.rows();
    let blocks = (0..d).map(|k| block_s(m, k)).collect::<Result<Vec<_>>>()?;
    let u = block_circulant(&blocks)?;
    Ok(NaimarkExtension {
        dim: d,
        m: m.clone(),
        u,
        diag_blocks: diagonal_blocks_closed_form(m)?,
        provenance: Provenance::BlockConstruction,
    })
}

/// `U_j = Σ_k ω^{-jk} S_k`.
pub fn diagonal_blocks<T: Real>(m: &Matrix<T>) -> Result<Vec<Matrix<T>>> {
    let d = m.rows();
    let blocks = (0..d).map(|k| block_s(m, k)).collect::<Result<Vec<_>>>()?;
    Ok((0..d)
        .map(|j| {
            blocks.iter().enumerate().fold(Matrix::zeros(d, d), |acc, (k, s)| {
                &acc + &s.scale(omega_pow(d, -((j * k) as i64)))
            })
        })
        .collect())
}

/// `U_j = F† Z^{-j} Mᵀ`.
pub fn diagonal_blocks_closed_form<T: Real>(m: &Matrix<T>) -> Result<Vec<Matrix<T>>> {
    let d = m.rows();
    let fd = fourier::<T>(d)?.adjoint();
    let mt = m.transpose();
    Ok((0..d)
        .map(|j| &(&fd * &clock_power(d, -(j as i64))) * &mt)
        .collect())
}

/// `(F† ⊗ I) diag(U_0, …, U_{d−1}) (F ⊗ I)`.
pub fn reassemble_from_blocks<T: Real>(blocks: &[Matrix<T>]) -> Result<Matrix<T>> {
    let d = blocks.len();
    if d == 0 {
        return Err(NaimarkError::InvalidInput("no blocks".into()));
    }
    if blocks.iter().any(|b| b.rows() != d || b.cols() != d) {
        return Err(NaimarkError::InvalidInput(format!(
            "expected {d} blocks of size {d}x{d}"
        )));
    }
    let mut diag = Matrix::zeros(d * d, d * d);
    for (j, b) in blocks.iter().enumerate() {
        diag.set_block(j, j, b);
    }
    let f = fourier::<T>(d)?;
    let id = Matrix::identity(d);
    let left = f.adjoint().kron(&id);
    let right = f.kron(&id);
    Ok(&(&left * &diag) * &right)
}

/// `max_k ‖Σ_j S_j† S_{j+k} − δ_{k0} I‖_max`.
pub fn verify_block_constraints<T: Real>(blocks: &[Matrix<T>]) -> T {
    let d = blocks.len();
    let mut worst = T::zero();
    for k in 0..d {
        let size = blocks[0].rows();
        let mut sum = Matrix::zeros(size, size);
        for j in 0..d {
            sum = &sum + &(&blocks[j].adjoint() * &blocks[(j + k) % d]);
        }
        let target = if k == 0 { Matrix::identity(size) } else { Matrix::zeros(size, size) };
        worst = worst.max(sum.max_abs_diff(&target));
    }
    worst
}

/// `max_{r,t} ‖U^{(r,t)} − U^{(0, t−r)}‖_max`; infinite when `U` is not `d² × d²`.
pub fn block_circulant_residual<T: Real>(u: &Matrix<T>, d: usize) -> T {
    if u.rows() != d * d || u.cols() != d * d {
        return T::infinity();
    }
    let mut worst = T::zero();
    for r in 0..d {
        for t in 0..d {
            let b = u.block(r, t, d);
            worst = worst.max(b.max_abs_diff(&u.block(0, (t + d - r) % d, d)));
        }
    }
    worst
}

/// First block row `[S_0 … S_{d−1}]` of a `d² × d²` matrix.
pub fn first_block_row<T: Real>(u: &Matrix<T>, d: usize) -> Vec<Matrix<T>> {
    (0..d).map(|t| u.block(0, t, d)).collect()
}

/// Reads `M` back out of a block-form unitary: `M[u][q] = √d · U[(0,0), (q,u)]`.
pub fn recover_m<T: Real>(u: &Matrix<T>, d: usize) -> Result<Matrix<T>> {
    if u.rows() != d * d || u.cols() != d * d {
        return Err(NaimarkError::DimensionMismatch {
            expected: d * d,
            found: u.rows(),
        });
    }
    let s = T::from_count(d).sqrt();
    Ok(Matrix::from_fn(d, d, |row, q| u[(0, q * d + row)] * s))
}

/// `‖U − assemble_u(recover_m(U))‖_max`, ignoring unitarity of the recovered `M`.
pub fn block_form_residual<T: Real>(u: &Matrix<T>, d: usize) -> Result<T> {
    let m = recover_m(u, d)?;
    let blocks = (0..d).map(|k| block_s(&m, k)).collect::<Result<Vec<_>>>()?;
    Ok(block_circulant(&blocks)?.max_abs_diff(u))
}

/// Deviation of `Σ_k S_k† S_k` from identity for blocks built from a (possibly
/// non-unitary) `M`, used to demonstrate that unitarity of `M` is required.
pub fn blocks_from_any_m<T: Real>(m: &Matrix<T>) -> Result<Vec<Matrix<T>>> {
    (0..m.rows()).map(|k| block_s(m, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiducials::builtin_fiducial;
    use crate::random::{haar_unitary, seeded_rng};

    #[test]
    fn qubit_completion_is_the_natural_choice() {
        let f = builtin_fiducial::<f64>(2, "qubit-sic").unwrap();
        let m = complete_unitary_m(&f);
        assert!(m.max_abs_diff(&catalog_m(2, "qubit").unwrap()) < 1e-15);
    }

    #[test]
    fn computational_fiducial_completes_to_identity() {
        let f = Fiducial::<f64>::new("e0", vec![C::new(1.0, 0.0), C::zero(), C::zero()], 1e-12).unwrap();
        assert!(complete_unitary_m(&f).max_abs_diff(&Matrix::identity(3)) < 1e-15);
    }

    #[test]
    fn completion_is_unitary_with_fiducial_row() {
        for d in 2..=6 {
            for seed in 0..10 {
                let f = Fiducial::<f64>::haar(d, &mut seeded_rng(seed));
                let m = complete_unitary_m(&f);
                assert!(m.unitarity_residual() < 1e-12);
                for (a, b) in m.row(0).iter().zip(f.ket().amplitudes()) {
                    assert_eq!(*a, b.conj());
                }
                assert_eq!(m, complete_unitary_m(&f));
            }
        }
        let hesse = builtin_fiducial::<f64>(3, "hesse").unwrap();
        assert!(complete_unitary_m(&hesse).unitarity_residual() < 1e-12);
    }

    #[test]
    fn identity_m_blocks_satisfy_constraints() {
        for d in 2..=5 {
            let blocks = blocks_from_any_m(&Matrix::<f64>::identity(d)).unwrap();
            assert!(verify_block_constraints(&blocks) < 1e-12);
            let u = block_circulant(&blocks).unwrap();
            assert!(u.unitarity_residual() < 1e-12);
        }
        let one = [Matrix::<f64>::identity(1)];
        assert_eq!(verify_block_constraints(&one), 0.0);
    }

    #[test]
    fn duplicated_row_breaks_constraints() {
        let h = 0.5f64.sqrt();
        let m = Matrix::<f64>::from_f64_rows(&[&[(h, 0.), (h, 0.)], &[(h, 0.), (h, 0.)]]).unwrap();
        let v = verify_block_constraints(&blocks_from_any_m(&m).unwrap());
        assert!(v >= 0.5, "violation {v}");
        assert!(matches!(assemble_u(&m), Err(NaimarkError::InvalidInput(_))));
    }

    #[test]
    fn qubit_blocks_match_reference_form() {
        let m = catalog_m::<f64>(2, "qubit").unwrap();
        let f = builtin_fiducial::<f64>(2, "qubit-sic").unwrap();
        let (p0, p1) = (f.ket()[0], f.ket()[1]);
        let h = 0.5f64.sqrt();
        let s0 = Matrix::from_rows(&[vec![p0.conj(), -p1], vec![p0.conj(), -p1]]).unwrap().scale_real(h);
        let s1 = Matrix::from_rows(&[vec![p1.conj(), p0], vec![-p1.conj(), -p0]]).unwrap().scale_real(h);
        assert!(block_s(&m, 0).unwrap().max_abs_diff(&s0) < 1e-12);
        assert!(block_s(&m, 1).unwrap().max_abs_diff(&s1) < 1e-12);
        assert!(block_s(&m, 2).is_err());
    }

    #[test]
    fn block_first_column_is_scaled_fourier_column() {
        let m = catalog_m::<f64>(4, "ququart").unwrap();
        let fd = fourier::<f64>(4).unwrap().adjoint();
        for k in 0..4 {
            let s = block_s(&m, k).unwrap();
            for row in 0..4 {
                assert!((s[(row, 0)] - m[(0, k)] * fd[(row, k)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn both_block_formulas_agree_and_are_unitary() {
        for d in 2..=6 {
            let m: Matrix<f64> = haar_unitary(d, &mut seeded_rng(d as u64));
            let sums = diagonal_blocks(&m).unwrap();
            let closed = diagonal_blocks_closed_form(&m).unwrap();
            for (a, b) in sums.iter().zip(&closed) {
                assert!(a.max_abs_diff(b) < 1e-12);
                assert!(a.unitarity_residual() < 1e-12);
            }
        }
    }

    #[test]
    fn reassembly_edge_cases() {
        let id = vec![Matrix::<f64>::identity(3); 3];
        assert!(reassemble_from_blocks(&id).unwrap().max_abs_diff(&Matrix::identity(9)) < 1e-12);
        let bad = vec![Matrix::<f64>::identity(3), Matrix::identity(2), Matrix::identity(3)];
        assert!(reassemble_from_blocks(&bad).is_err());
        let mut rng = seeded_rng(3);
        let random: Vec<Matrix<f64>> = (0..3).map(|_| haar_unitary(3, &mut rng)).collect();
        let u = reassemble_from_blocks(&random).unwrap();
        assert!(u.unitarity_residual() < 1e-12);
        assert!(block_circulant_residual(&u, 3) < 1e-12);
    }

    #[test]
    fn recovered_m_round_trips() {
        let m: Matrix<f64> = haar_unitary(4, &mut seeded_rng(11));
        let ext = assemble_u(&m).unwrap();
        assert!(recover_m(&ext.u, 4).unwrap().max_abs_diff(&m) < 1e-12);
        assert!(block_form_residual(&ext.u, 4).unwrap() < 1e-12);
        let id = Matrix::<f64>::identity(4);
        assert!(block_form_residual(&id, 2).unwrap() > 0.1);
    }

    #[test]
    fn assembled_u_in_single_precision() {
        let m = catalog_m::<f32>(3, "hesse").unwrap();
        let ext = assemble_u(&m).unwrap();
        assert!(ext.u.unitarity_residual() < 1e-5);
    }
}
