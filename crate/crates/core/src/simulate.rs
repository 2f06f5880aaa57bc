//! Embedding, outcome probabilities, finite-shot sampling and linear-inversion
//! tomography.

use num_complex::Complex;
use num_traits::Zero;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::block::NaimarkExtension;
use crate::error::{NaimarkError, Result};
use crate::fiducials::{psd_rank, wh_orbit, Fiducial, PHYSICAL_TOL};
use crate::linalg::{solve_real, Ket, Matrix};
use crate::random::seeded_rng;
use crate::scalar::{tol, Real, C};
use crate::wh::WhIndex;

/// Negative probabilities above this are floating-point dust and clamp to zero.
const CLAMP_FLOOR: f64 = -1e-14;

/// Probabilities of the `d²` outcomes, stored at `j·d + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution<T: Real> {
    dim: usize,
    probs: Vec<T>,
}

impl<T: Real> OutcomeDistribution<T> {
    /// Validates length, clamps dust and checks the total is one within `tol`.
    pub fn new(dim: usize, probs: Vec<T>, total_tol: T) -> Result<Self> {
        if probs.len() != dim * dim {
            return Err(NaimarkError::DimensionMismatch {
                expected: dim * dim,
                found: probs.len(),
            });
        }
        let floor = T::lit(CLAMP_FLOOR);
        let mut clamped = Vec::with_capacity(probs.len());
        for p in probs {
            if p.is_nan() || p < floor {
                return Err(NaimarkError::InvalidInput(format!("negative probability {p}")));
            }
            clamped.push(p.max(T::zero()));
        }
        let total: T = clamped.iter().copied().sum();
        if (total - T::one()).abs() > total_tol {
            return Err(NaimarkError::InvalidInput(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { dim, probs: clamped })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn prob(&self, idx: WhIndex) -> T {
        self.probs[idx.linear(self.dim)]
    }

    pub fn total(&self) -> T {
        self.probs.iter().copied().sum()
    }

    /// `probs[j][k]` layout used by the JSON exports.
    pub fn as_grid(&self) -> Vec<Vec<T>> {
        self.probs.chunks(self.dim).map(<[T]>::to_vec).collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        if self.dim != other.dim {
            return T::infinity();
        }
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max)
    }
}

/// Finite-shot outcome counts, stored at `j·d + k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub dim: usize,
    pub counts: Vec<u64>,
}

impl Counts {
    pub fn shots(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn as_grid(&self) -> Vec<Vec<u64>> {
        self.counts.chunks(self.dim).map(<[u64]>::to_vec).collect()
    }

    /// Relative frequencies as a distribution.
    pub fn frequencies<T: Real>(&self) -> Result<OutcomeDistribution<T>> {
        let n = self.shots();
        if n == 0 {
            return Err(NaimarkError::InvalidInput("no shots recorded".into()));
        }
        let probs = self
            .counts
            .iter()
            .map(|&c| T::lit(c as f64 / n as f64))
            .collect();
        OutcomeDistribution::new(self.dim, probs, tol(PHYSICAL_TOL))
    }
}

/// A density matrix. Reconstructions from sampled data may be indefinite;
/// see [`DensityMatrix::min_eigenvalue`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: Matrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Checks Hermiticity, unit trace and positivity within `tol`.
    pub fn new(matrix: Matrix<T>, check_tol: T) -> Result<Self> {
        if !matrix.is_square() {
            return Err(NaimarkError::InvalidInput("density matrix must be square".into()));
        }
        let herm = matrix.hermiticity_residual();
        if herm > check_tol {
            return Err(NaimarkError::InvalidInput(format!("not Hermitian (residual {herm})")));
        }
        let tr = matrix.trace();
        if (tr - Complex::new(T::one(), T::zero())).norm() > check_tol {
            return Err(NaimarkError::InvalidInput(format!("trace is {tr}, not 1")));
        }
        let rho = Self { matrix };
        let min = rho.min_eigenvalue();
        if min < -check_tol {
            return Err(NaimarkError::InvalidInput(format!("negative eigenvalue {min}")));
        }
        Ok(rho)
    }

    pub(crate) fn new_unchecked(matrix: Matrix<T>) -> Self {
        Self { matrix }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(psi: &Ket<T>) -> Self {
        Self { matrix: psi.outer(psi) }
    }

    /// `I/d`.
    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: Matrix::identity(d).scale_real(T::from_count(d).recip()),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn min_eigenvalue(&self) -> T {
        self.matrix
            .hermitian_eigenvalues()
            .first()
            .copied()
            .unwrap_or_else(T::zero)
    }

    /// `tr(ρ A)`.
    pub fn expectation(&self, a: &Matrix<T>) -> C<T> {
        (&self.matrix * a).trace()
    }
}

/// `|ψ, i⟩ = |ψ⟩ ⊗ |i⟩`: component `ψ_t` lands at `t·d + i`.
pub fn embed<T: Real>(psi: &Ket<T>, i: usize, d: usize) -> Result<Ket<T>> {
    if psi.dim() != d {
        return Err(NaimarkError::DimensionMismatch {
            expected: d,
            found: psi.dim(),
        });
    }
    if i >= d {
        return Err(NaimarkError::IndexOutOfRange { index: i, dim: d });
    }
    let mut amps = vec![C::zero(); d * d];
    for (t, &a) in psi.amplitudes().iter().enumerate() {
        amps[t * d + i] = a;
    }
    Ok(Ket::from_amplitudes(amps))
}

/// Oracle `P(j,k) = |⟨φ_jk|ψ⟩|² / d`.
pub fn direct_probabilities<T: Real>(fiducial: &Fiducial<T>, psi: &Ket<T>) -> Result<OutcomeDistribution<T>> {
    let d = fiducial.dim();
    if psi.dim() != d {
        return Err(NaimarkError::DimensionMismatch {
            expected: d,
            found: psi.dim(),
        });
    }
    let inv_d = T::from_count(d).recip();
    let probs = wh_orbit(fiducial)
        .vectors()
        .iter()
        .map(|v| v.inner(psi).norm_sqr() * inv_d)
        .collect();
    OutcomeDistribution::new(d, probs, tol(PHYSICAL_TOL))
}

/// `tr(ρ E_jk)` for a mixed input.
pub fn frame_probabilities<T: Real>(fiducial: &Fiducial<T>, rho: &DensityMatrix<T>) -> Result<OutcomeDistribution<T>> {
    let d = fiducial.dim();
    if rho.dim() != d {
        return Err(NaimarkError::DimensionMismatch {
            expected: d,
            found: rho.dim(),
        });
    }
    let inv_d = T::from_count(d).recip();
    let probs = wh_orbit(fiducial)
        .vectors()
        .iter()
        .map(|v| {
            // ⟨v|ρ|v⟩
            let rv = rho.matrix().apply(v).expect("dimension checked");
            v.inner(&rv).re * inv_d
        })
        .collect();
    OutcomeDistribution::new(d, probs, tol(PHYSICAL_TOL))
}

/// `P(j,k) = |⟨j,k|U|ψ,i⟩|²`.
pub fn measure_probabilities<T: Real>(
    ext: &NaimarkExtension<T>,
    psi: &Ket<T>,
    i: usize,
) -> Result<OutcomeDistribution<T>> {
    let d = ext.dim;
    let out = ext.u.apply(&embed(psi, i, d)?)?;
    let probs = out.amplitudes().iter().map(|z| z.norm_sqr()).collect();
    OutcomeDistribution::new(d, probs, tol(PHYSICAL_TOL))
}

/// Draws `shots` outcomes; identical `(seed, shots)` gives identical counts.
pub fn sample<T: Real>(dist: &OutcomeDistribution<T>, shots: u64, seed: u64) -> Result<Counts> {
    let weights: Vec<f64> = dist.probs().iter().map(|p| p.to_f64_lossy()).collect();
    let index = WeightedIndex::new(&weights)
        .map_err(|e| NaimarkError::InvalidInput(format!("cannot sample: {e}")))?;
    let mut rng = seeded_rng(seed);
    let mut counts = vec![0u64; weights.len()];
    for _ in 0..shots {
        counts[index.sample(&mut rng)] += 1;
    }
    Ok(Counts {
        dim: dist.dim(),
        counts,
    })
}

/// Result of linear-inversion tomography.
#[derive(Debug, Clone)]
pub struct Reconstruction<T: Real> {
    pub rho: DensityMatrix<T>,
    /// Condition number of the effect Gram matrix.
    pub gram_condition: T,
    /// Smallest eigenvalue of the estimate; negative values are reported, not repaired.
    pub min_eigenvalue: T,
}

/// Linear inversion on the frame `E_jk = |φ_jk⟩⟨φ_jk|/d`.
///
/// Solves `G x = p` with `G_ab = tr(E_a E_b)` and returns `ρ = Σ_a x_a E_a`.
pub fn tomography_reconstruct<T: Real>(
    fiducial: &Fiducial<T>,
    dist: &OutcomeDistribution<T>,
) -> Result<Reconstruction<T>> {
    let d = fiducial.dim();
    if dist.dim() != d {
        return Err(NaimarkError::DimensionMismatch {
            expected: d,
            found: dist.dim(),
        });
    }
    let n = d * d;
    let frame = wh_orbit(fiducial);
    let gram = frame.effect_gram();
    let (rank, gram_condition) = psd_rank(gram.clone(), n, tol(PHYSICAL_TOL));
    if rank < n {
        return Err(NaimarkError::RankDeficientFrame { rank, required: n });
    }
    let x = solve_real(gram, dist.probs().to_vec(), n)?;
    let mut rho = Matrix::zeros(d, d);
    for (idx, &w) in WhIndex::all(d).zip(&x) {
        rho = &rho + &frame.effect(idx).scale_real(w);
    }
    let rho = DensityMatrix::new_unchecked(rho);
    let min_eigenvalue = rho.min_eigenvalue();
    Ok(Reconstruction {
        rho,
        gram_condition,
        min_eigenvalue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::{assemble_u, catalog_m};
    use crate::fiducials::builtin_fiducial;
    use crate::random::{haar_ket, random_density_matrix};

    fn ket(v: &[(f64, f64)]) -> Ket<f64> {
        Ket::from_amplitudes(v.iter().map(|&(a, b)| C::new(a, b)).collect())
    }

    #[test]
    fn embedding_layout() {
        let psi = ket(&[(0.6, 0.0), (0.0, 0.8)]);
        let e0 = embed(&psi, 0, 2).unwrap();
        assert_eq!(e0, ket(&[(0.6, 0.0), (0.0, 0.0), (0.0, 0.8), (0.0, 0.0)]));
        let e1 = embed(&psi, 1, 2).unwrap();
        assert_eq!(e1, ket(&[(0.0, 0.0), (0.6, 0.0), (0.0, 0.0), (0.0, 0.8)]));
        for i in 0..3 {
            let b = embed(&Ket::<f64>::basis(3, 0).unwrap(), i, 3).unwrap();
            assert_eq!(b, Ket::basis(9, i).unwrap());
        }
        assert!(matches!(embed(&psi, 2, 2), Err(NaimarkError::IndexOutOfRange { .. })));
        assert!(matches!(embed(&psi, 0, 3), Err(NaimarkError::DimensionMismatch { .. })));
    }

    #[test]
    fn direct_probabilities_for_sic_fiducial_input() {
        let f = builtin_fiducial::<f64>(2, "qubit-sic").unwrap();
        let p = direct_probabilities(&f, f.ket()).unwrap();
        assert!((p.probs()[0] - 0.5).abs() < 1e-12);
        for q in &p.probs()[1..] {
            assert!((q - 1.0 / 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn direct_probabilities_for_ground_state() {
        let f = builtin_fiducial::<f64>(2, "qubit-sic").unwrap();
        let p = direct_probabilities(&f, &Ket::basis(2, 0).unwrap()).unwrap();
        let hi = (3.0 + 3f64.sqrt()) / 12.0;
        let lo = (3.0 - 3f64.sqrt()) / 12.0;
        let want = [hi, hi, lo, lo];
        for (a, b) in p.probs().iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        let ortho = Ket::from_amplitudes(vec![-f.ket()[1].conj(), f.ket()[0].conj()]);
        let p = direct_probabilities(&f, &ortho).unwrap();
        assert!(p.probs()[0].abs() < 1e-15);
        assert!(direct_probabilities(&f, &Ket::basis(3, 0).unwrap()).is_err());
    }

    #[test]
    fn hesse_extension_on_its_fiducial() {
        let ext = assemble_u(&catalog_m::<f64>(3, "hesse").unwrap()).unwrap();
        let f = builtin_fiducial::<f64>(3, "hesse").unwrap();
        let p = measure_probabilities(&ext, f.ket(), 0).unwrap();
        assert!((p.probs()[0] - 1.0 / 3.0).abs() < 1e-12);
        for q in &p.probs()[1..] {
            assert!((q - 1.0 / 12.0).abs() < 1e-12);
        }
        for i in 0..3 {
            let p = measure_probabilities(&ext, f.ket(), i).unwrap();
            assert!((p.total() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn distribution_validation() {
        assert!(OutcomeDistribution::<f64>::new(2, vec![0.5, 0.5, 0.0], 1e-10).is_err());
        assert!(OutcomeDistribution::<f64>::new(2, vec![0.5, 0.5, 0.1, 0.0], 1e-10).is_err());
        assert!(OutcomeDistribution::<f64>::new(2, vec![1.0, 0.0, -1e-3, 1e-3], 1e-10).is_err());
        let d = OutcomeDistribution::<f64>::new(2, vec![1.0, 0.0, -1e-15, 1e-15], 1e-10).unwrap();
        assert_eq!(d.probs()[2], 0.0);
        assert_eq!(d.as_grid(), vec![vec![1.0, 0.0], vec![0.0, 1e-15]]);
    }

    #[test]
    fn sampling_point_mass_and_determinism() {
        let point = OutcomeDistribution::<f64>::new(2, vec![1.0, 0.0, 0.0, 0.0], 1e-10).unwrap();
        let c = sample(&point, 100, 5).unwrap();
        assert_eq!(c.counts, vec![100, 0, 0, 0]);
        let uniform = OutcomeDistribution::<f64>::new(2, vec![0.25; 4], 1e-10).unwrap();
        let a = sample(&uniform, 1000, 9).unwrap();
        let b = sample(&uniform, 1000, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.shots(), 1000);
    }

    #[test]
    fn sampling_matches_binomial_bound() {
        let uniform = OutcomeDistribution::<f64>::new(2, vec![0.25; 4], 1e-10).unwrap();
        let n = 400_000u64;
        let c = sample(&uniform, n, 2024).unwrap();
        let mean = n as f64 * 0.25;
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        for &k in &c.counts {
            assert!((k as f64 - mean).abs() < 5.0 * sigma, "{k}");
        }
    }

    #[test]
    fn tomography_pure_round_trip() {
        for (d, label) in [(2, "qubit-sic"), (3, "hesse"), (4, "ququart-sic")] {
            let f = builtin_fiducial::<f64>(d, label).unwrap();
            let psi = haar_ket::<f64, _>(d, &mut seeded_rng(d as u64));
            let p = direct_probabilities(&f, &psi).unwrap();
            let rec = tomography_reconstruct(&f, &p).unwrap();
            assert!(rec.rho.matrix().max_abs_diff(&psi.outer(&psi)) < 1e-8);
            assert!(rec.gram_condition.is_finite());
        }
    }

    #[test]
    fn tomography_of_maximally_mixed_state() {
        let f = builtin_fiducial::<f64>(3, "hesse").unwrap();
        let rho = DensityMatrix::maximally_mixed(3);
        let p = frame_probabilities(&f, &rho).unwrap();
        for q in p.probs() {
            assert!((q - 1.0 / 9.0).abs() < 1e-12);
        }
        let rec = tomography_reconstruct(&f, &p).unwrap();
        assert!(rec.rho.matrix().max_abs_diff(rho.matrix()) < 1e-10);
    }

    #[test]
    fn tomography_rejects_non_ic_frame() {
        let f = Fiducial::<f64>::new("e0", vec![C::new(1.0, 0.0), C::zero()], 1e-12).unwrap();
        let p = direct_probabilities(&f, &Ket::basis(2, 0).unwrap()).unwrap();
        assert_eq!(
            tomography_reconstruct(&f, &p).unwrap_err(),
            NaimarkError::RankDeficientFrame { rank: 2, required: 4 }
        );
    }

    #[test]
    fn density_matrix_validation() {
        let rho: DensityMatrix<f64> = random_density_matrix(3, 3, &mut seeded_rng(2));
        assert!(DensityMatrix::new(rho.matrix().clone(), 1e-10).is_ok());
        assert!(DensityMatrix::new(Matrix::<f64>::identity(2), 1e-10).is_err());
        let bad = Matrix::<f64>::from_f64_rows(&[&[(1.5, 0.), (0., 0.)], &[(0., 0.), (-0.5, 0.)]]).unwrap();
        assert!(DensityMatrix::new(bad, 1e-10).is_err());
    }

    #[test]
    fn sampled_tomography_improves_with_shots() {
        let f = builtin_fiducial::<f64>(2, "qubit-sic").unwrap();
        let psi = haar_ket::<f64, _>(2, &mut seeded_rng(77));
        let exact = direct_probabilities(&f, &psi).unwrap();
        let target = psi.outer(&psi);
        let mut medians = Vec::new();
        for shots in [10_000u64, 100_000, 1_000_000] {
            let mut errs: Vec<f64> = (0..5)
                .map(|seed| {
                    let counts = sample(&exact, shots, seed).unwrap();
                    let rec = tomography_reconstruct(&f, &counts.frequencies().unwrap()).unwrap();
                    rec.rho.matrix().max_abs_diff(&target)
                })
                .collect();
            errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            medians.push(errs[2]);
        }
        assert!(medians[0] > medians[1] && medians[1] > medians[2], "{medians:?}");
    }
}
