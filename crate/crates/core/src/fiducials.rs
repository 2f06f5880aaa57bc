//! Fiducial catalog, Weyl–Heisenberg orbits and POVM-level checks.

use num_complex::Complex;
use rand::Rng;

use crate::error::{NaimarkError, Result};
use crate::linalg::{symmetric_eigenvalues, Ket, Matrix};
use crate::random::haar_ket;
use crate::scalar::{cis, Real, C};
use crate::wh::{displace, WhIndex};

/// Tolerance for the exact-algebra catalog fixtures.
pub const FIXTURE_TOL: f64 = 1e-12;
/// Tolerance for physical checks on generic inputs.
pub const PHYSICAL_TOL: f64 = 1e-10;

/// `(d, label)` pairs known to [`builtin_fiducial`].
pub const CATALOG: &[(usize, &str)] = &[
    (2, "qubit-sic"),
    (3, "hesse"),
    (3, "hesse-partner"),
    (4, "ququart-sic"),
];

/// A normalized fiducial state with a human-readable label.
#[derive(Debug, Clone, PartialEq)]
pub struct Fiducial<T: Real> {
    label: String,
    ket: Ket<T>,
}

impl<T: Real> Fiducial<T> {
    /// Wraps a ket, rejecting it unless its norm is within `tol` of one.
    pub fn new(label: impl Into<String>, amplitudes: Vec<C<T>>, tol: T) -> Result<Self> {
        Ok(Self {
            label: label.into(),
            ket: Ket::normalized(amplitudes, tol)?,
        })
    }

    pub fn from_ket(label: impl Into<String>, ket: Ket<T>, tol: T) -> Result<Self> {
        Self::new(label, ket.into_amplitudes(), tol)
    }

    /// Haar-random fiducial.
    pub fn haar<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        Self {
            label: "haar".into(),
            ket: haar_ket(d, rng),
        }
    }

    pub fn dim(&self) -> usize {
        self.ket.dim()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn ket(&self) -> &Ket<T> {
        &self.ket
    }
}

/// Normalization `√((1 − 1/√5)/8)` shared by the ququart fixtures.
pub(crate) fn ququart_norm<T: Real>() -> T {
    let five = T::lit(5.0);
    ((T::one() - five.sqrt().recip()) / T::lit(8.0)).sqrt()
}

/// `α = √(2 + √5)`.
pub(crate) fn ququart_alpha<T: Real>() -> T {
    (T::lit(2.0) + T::lit(5.0).sqrt()).sqrt()
}

/// Looks up one of the catalog fiducials.
pub fn builtin_fiducial<T: Real>(d: usize, label: &str) -> Result<Fiducial<T>> {
    let r = |x: f64| C::new(T::lit(x), T::zero());
    let amps: Vec<C<T>> = match (d, label) {
        (2, "qubit-sic") => {
            let s3 = T::lit(3.0).sqrt();
            let n = T::lit(6.0).sqrt().recip();
            vec![
                C::new((T::lit(3.0) + s3).sqrt() * n, T::zero()),
                cis(T::FRAC_PI_4()) * ((T::lit(3.0) - s3).sqrt() * n),
            ]
        }
        (3, "hesse") => {
            let h = 0.5f64.sqrt();
            vec![r(0.0), r(h), r(-h)]
        }
        (3, "hesse-partner") => {
            let h = 0.5f64.sqrt();
            vec![r(0.0), r(h), r(h)]
        }
        (4, "ququart-sic") => {
            let n = ququart_norm::<T>();
            let a = ququart_alpha::<T>();
            let e = cis(-T::FRAC_PI_4());
            let one = C::new(T::one(), T::zero());
            let i: C<T> = Complex::i();
            vec![
                (e + one) * n,
                -i * (e * a + one) * n,
                (e - one) * n,
                i * (e * a - one) * n,
            ]
        }
        _ => {
            return Err(NaimarkError::CatalogMiss {
                dim: d,
                label: label.to_string(),
            })
        }
    };
    Fiducial::new(label, amps, T::lit(FIXTURE_TOL))
}

/// Finds a catalog fiducial by label alone.
pub fn catalog_fiducial<T: Real>(label: &str) -> Result<Fiducial<T>> {
    let (d, _) = CATALOG
        .iter()
        .find(|(_, l)| *l == label)
        .ok_or_else(|| NaimarkError::CatalogMiss {
            dim: 0,
            label: label.to_string(),
        })?;
    builtin_fiducial(*d, label)
}

/// The `d²` vectors `|φ_jk⟩ = D_jk|φ⟩`, stored at `j·d + k`.
#[derive(Debug, Clone)]
pub struct WhFrame<T: Real> {
    dim: usize,
    vectors: Vec<Ket<T>>,
}

impl<T: Real> WhFrame<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[Ket<T>] {
        &self.vectors
    }

    pub fn vector(&self, idx: WhIndex) -> &Ket<T> {
        &self.vectors[idx.linear(self.dim)]
    }

    /// `E_jk = (1/d)|φ_jk⟩⟨φ_jk|`.
    pub fn effect(&self, idx: WhIndex) -> Matrix<T> {
        let v = self.vector(idx);
        v.outer(v).scale_real(T::from_count(self.dim).recip())
    }

    /// `‖Σ_jk E_jk − I‖_max`.
    pub fn resolution_residual(&self) -> T {
        let mut sum = Matrix::zeros(self.dim, self.dim);
        for v in &self.vectors {
            sum = &sum + &v.outer(v);
        }
        sum.scale_real(T::from_count(self.dim).recip())
            .max_abs_diff(&Matrix::identity(self.dim))
    }

    /// Matrix of squared overlaps `|⟨φ_a|φ_b⟩|²`, row-major `d² × d²`.
    pub fn squared_overlaps(&self) -> Vec<T> {
        let n = self.vectors.len();
        let mut out = vec![T::zero(); n * n];
        for a in 0..n {
            for b in a..n {
                let o = self.vectors[a].inner(&self.vectors[b]).norm_sqr();
                out[a * n + b] = o;
                out[b * n + a] = o;
            }
        }
        out
    }

    /// Real symmetric Gram matrix `G_ab = tr(E_a E_b) = |⟨φ_a|φ_b⟩|²/d²`.
    pub fn effect_gram(&self) -> Vec<T> {
        let scale = T::from_count(self.dim * self.dim).recip();
        self.squared_overlaps().into_iter().map(|x| x * scale).collect()
    }
}

/// Generates the Weyl–Heisenberg orbit of a fiducial.
pub fn wh_orbit<T: Real>(fiducial: &Fiducial<T>) -> WhFrame<T> {
    let d = fiducial.dim();
    let vectors = WhIndex::all(d).map(|idx| displace(d, idx, fiducial.ket())).collect();
    WhFrame { dim: d, vectors }
}

/// Outcome of [`is_informationally_complete`].
#[derive(Debug, Clone, PartialEq)]
pub struct IcReport<T: Real> {
    /// Authoritative verdict: the effect Gram matrix has full rank `d²`.
    pub complete: bool,
    /// Sufficient condition: every `⟨φ|D_jk†|φ⟩` exceeds the tolerance in modulus.
    pub overlaps_nonvanishing: bool,
    /// Index minimizing `|⟨φ|D_jk†|φ⟩|`, first in `(j, k)` order on ties.
    pub witness: WhIndex,
    pub witness_overlap: T,
    pub gram_rank: usize,
    /// Largest over smallest Gram eigenvalue; infinite when rank deficient.
    pub gram_condition: T,
}

/// Numerical rank and condition number of a real symmetric PSD matrix.
pub(crate) fn psd_rank<T: Real>(gram: Vec<T>, n: usize, tol: T) -> (usize, T) {
    let eig = symmetric_eigenvalues(gram, n);
    let max = eig.last().copied().unwrap_or_else(T::zero);
    let cutoff = tol * max.max(T::epsilon());
    let rank = eig.iter().filter(|&&x| x > cutoff).count();
    let min = eig.first().copied().unwrap_or_else(T::zero);
    let cond = if rank == n && min > T::zero() { max / min } else { T::infinity() };
    (rank, cond)
}

/// Checks informational completeness of the WH orbit of `fiducial`.
pub fn is_informationally_complete<T: Real>(fiducial: &Fiducial<T>, tol: T) -> IcReport<T> {
    let d = fiducial.dim();
    let phi = fiducial.ket();
    // ⟨φ|D_jk†|φ⟩ = conj(⟨φ|D_jk|φ⟩).
    let mut witness = WhIndex { j: 0, k: 0 };
    let mut witness_overlap = T::infinity();
    for idx in WhIndex::all(d) {
        let o = phi.inner(&displace(d, idx, phi)).norm();
        if o < witness_overlap {
            witness_overlap = o;
            witness = idx;
        }
    }
    let frame = wh_orbit(fiducial);
    let (gram_rank, gram_condition) = psd_rank(frame.effect_gram(), d * d, tol);
    IcReport {
        complete: gram_rank == d * d,
        overlaps_nonvanishing: witness_overlap > tol,
        witness,
        witness_overlap,
        gram_rank,
        gram_condition,
    }
}

/// `max |⟨φ_a|φ_b⟩|² − (d·δ_ab + 1)/(d + 1)|` over the orbit.
pub fn sic_report<T: Real>(fiducial: &Fiducial<T>) -> T {
    let d = fiducial.dim();
    let n = d * d;
    let frame = wh_orbit(fiducial);
    let overlaps = frame.squared_overlaps();
    let dp1 = T::from_count(d + 1);
    let off = dp1.recip();
    let on = T::from_count(d + 1) / dp1;
    let mut worst = T::zero();
    for a in 0..n {
        for b in 0..n {
            let target = if a == b { on } else { off };
            worst = worst.max((overlaps[a * n + b] - target).abs());
        }
    }
    worst
}

/// SIC deviation of each row `⟨m_i|` of a unitary `M`, taken as the ket `|m_i⟩`.
pub fn compound_sic_report<T: Real>(m: &Matrix<T>, tol: T) -> Result<Vec<T>> {
    let residual = m.unitarity_residual();
    if residual > tol {
        return Err(NaimarkError::InvalidInput(format!(
            "M is not unitary (residual {residual})"
        )));
    }
    (0..m.rows())
        .map(|i| {
            let amps = m.row(i).iter().map(|z| z.conj()).collect();
            Fiducial::new(format!("row-{i}"), amps, tol).map(|f| sic_report(&f))
        })
        .collect()
}
