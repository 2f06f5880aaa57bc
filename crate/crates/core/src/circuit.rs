//! One- and two-qubit synthesis of the qudit gates when `d = 2^n`.
//!
//! Wire 0 is the most significant bit of the global basis index, and inside a
//! qudit register the first wire is the most significant bit of the qudit
//! value. For the two-register circuits the first register (wires `0..n`) is
//! the target/system qudit and the second (wires `n..2n`) the control/ancilla.
//!
//! A [`GateList`] stores gates in application order: the first gate acts
//! first. Operator products written right to left are therefore reversed when
//! they are turned into lists.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{NaimarkError, Result};
use crate::linalg::Matrix;
use crate::scalar::{cis, Real, C};

/// An elementary or opaque gate.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate<T: Real> {
    H(usize),
    /// `R(k) = diag(1, e^{2πi/2^k})`, conjugated when `adjoint`.
    R { k: u32, wire: usize, adjoint: bool },
    /// `R(k)` on `target` controlled by `control`.
    CR {
        k: u32,
        control: usize,
        target: usize,
        adjoint: bool,
    },
    Swap(usize, usize),
    /// Arbitrary unitary on `wires`, the first wire being most significant.
    Unitary { wires: Vec<usize>, matrix: Matrix<T> },
}

fn phase<T: Real>(k: u32, adjoint: bool) -> C<T> {
    let angle = T::TAU() / T::lit(2f64.powi(k as i32));
    cis(if adjoint { -angle } else { angle })
}

impl<T: Real> Gate<T> {
    pub fn wires(&self) -> Vec<usize> {
        match self {
            Gate::H(w) => vec![*w],
            Gate::R { wire, .. } => vec![*wire],
            Gate::CR { control, target, .. } => vec![*control, *target],
            Gate::Swap(a, b) => vec![*a, *b],
            Gate::Unitary { wires, .. } => wires.clone(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::R { .. } => "R",
            Gate::CR { .. } => "CR",
            Gate::Swap(..) => "SWAP",
            Gate::Unitary { .. } => "U",
        }
    }

    /// Local matrix on [`Gate::wires`], in that wire order.
    pub fn local_matrix(&self) -> Matrix<T> {
        let o = C::<T>::one();
        let z = C::<T>::zero();
        match self {
            Gate::H(_) => {
                let h = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
                Matrix::from_rows(&[vec![h, h], vec![h, -h]]).expect("2x2")
            }
            Gate::R { k, adjoint, .. } => Matrix::from_diagonal(&[o, phase(*k, *adjoint)]),
            Gate::CR { k, adjoint, .. } => Matrix::from_diagonal(&[o, o, o, phase(*k, *adjoint)]),
            Gate::Swap(..) => Matrix::from_rows(&[
                vec![o, z, z, z],
                vec![z, z, o, z],
                vec![z, o, z, z],
                vec![z, z, z, o],
            ])
            .expect("4x4"),
            Gate::Unitary { matrix, .. } => matrix.clone(),
        }
    }

    pub fn adjoint(&self) -> Self {
        match self {
            Gate::R { k, wire, adjoint } => Gate::R {
                k: *k,
                wire: *wire,
                adjoint: !adjoint,
            },
            Gate::CR {
                k,
                control,
                target,
                adjoint,
            } => Gate::CR {
                k: *k,
                control: *control,
                target: *target,
                adjoint: !adjoint,
            },
            Gate::Unitary { wires, matrix } => Gate::Unitary {
                wires: wires.clone(),
                matrix: matrix.adjoint(),
            },
            other => other.clone(),
        }
    }

    /// Transposed gate; every elementary gate here is symmetric.
    pub fn transpose(&self) -> Self {
        match self {
            Gate::Unitary { wires, matrix } => Gate::Unitary {
                wires: wires.clone(),
                matrix: matrix.transpose(),
            },
            other => other.clone(),
        }
    }

    /// Renumbers wires through `map`.
    pub fn rewire(&self, map: impl Fn(usize) -> usize) -> Self {
        match self {
            Gate::H(w) => Gate::H(map(*w)),
            Gate::R { k, wire, adjoint } => Gate::R {
                k: *k,
                wire: map(*wire),
                adjoint: *adjoint,
            },
            Gate::CR {
                k,
                control,
                target,
                adjoint,
            } => Gate::CR {
                k: *k,
                control: map(*control),
                target: map(*target),
                adjoint: *adjoint,
            },
            Gate::Swap(a, b) => Gate::Swap(map(*a), map(*b)),
            Gate::Unitary { wires, matrix } => Gate::Unitary {
                wires: wires.iter().map(|&w| map(w)).collect(),
                matrix: matrix.clone(),
            },
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let wires = self.wires();
        if let Some(w) = wires.iter().find(|&&w| w >= n_qubits) {
            return Err(NaimarkError::InvalidCircuit(format!(
                "{} gate uses wire {w} but the circuit has {n_qubits} qubits",
                self.name()
            )));
        }
        for (i, a) in wires.iter().enumerate() {
            if wires[i + 1..].contains(a) {
                return Err(NaimarkError::InvalidCircuit(format!(
                    "{} gate repeats wire {a}",
                    self.name()
                )));
            }
        }
        match self {
            Gate::R { k, .. } | Gate::CR { k, .. } if *k == 0 => Err(NaimarkError::InvalidCircuit(
                "R/CR need k >= 1".into(),
            )),
            Gate::Unitary { wires, matrix }
                if matrix.rows() != 1 << wires.len() || !matrix.is_square() =>
            {
                Err(NaimarkError::InvalidCircuit(format!(
                    "opaque gate on {} wires needs a {}x{} matrix",
                    wires.len(),
                    1 << wires.len(),
                    1 << wires.len()
                )))
            }
            Gate::Unitary { wires, .. } if wires.is_empty() => {
                Err(NaimarkError::InvalidCircuit("opaque gate without wires".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Ordered gate sequence on `n_qubits` wires, first element applied first.
#[derive(Debug, Clone, PartialEq)]
pub struct GateList<T: Real> {
    pub n_qubits: usize,
    pub gates: Vec<Gate<T>>,
}

impl<T: Real> GateList<T> {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn with_gates(n_qubits: usize, gates: Vec<Gate<T>>) -> Result<Self> {
        let list = Self { n_qubits, gates };
        list.validate()?;
        Ok(list)
    }

    pub fn validate(&self) -> Result<()> {
        self.gates.iter().try_for_each(|g| g.validate(self.n_qubits))
    }

    pub fn push(&mut self, gate: Gate<T>) {
        self.gates.push(gate);
    }

    /// Appends `other` (applied after `self`).
    pub fn append(&mut self, other: &GateList<T>) {
        self.gates.extend(other.gates.iter().cloned());
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Inverse circuit: reversed order, each gate adjointed.
    pub fn adjoint(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    /// Circuit for the transposed unitary: reversed order, each gate transposed.
    pub fn transpose(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::transpose).collect(),
        }
    }

    /// Moves the circuit onto a larger register, wire `w` becoming `offset + w`.
    pub fn shifted(&self, offset: usize, n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: self.gates.iter().map(|g| g.rewire(|w| w + offset)).collect(),
        }
    }

    /// Full `2^n × 2^n` unitary.
    pub fn expand(&self) -> Result<Matrix<T>> {
        self.validate()?;
        let dim = 1usize << self.n_qubits;
        let mut columns: Vec<Vec<C<T>>> = (0..dim)
            .map(|c| {
                let mut v = vec![C::zero(); dim];
                v[c] = C::one();
                v
            })
            .collect();
        for gate in &self.gates {
            let local = gate.local_matrix();
            let wires = gate.wires();
            for col in &mut columns {
                apply_local(col, self.n_qubits, &wires, &local);
            }
        }
        Ok(Matrix::from_fn(dim, dim, |r, c| columns[c][r]))
    }
}

fn apply_local<T: Real>(state: &mut [C<T>], n_qubits: usize, wires: &[usize], local: &Matrix<T>) {
    let m = wires.len();
    let local_dim = 1usize << m;
    // Global bit masks for local index bits, local bit 0 being the last wire.
    let masks: Vec<usize> = wires.iter().rev().map(|&w| 1usize << (n_qubits - 1 - w)).collect();
    let all: usize = masks.iter().sum();
    let offset = |base: usize, local: usize| {
        masks
            .iter()
            .enumerate()
            .fold(base, |acc, (b, &mask)| if local >> b & 1 == 1 { acc | mask } else { acc })
    };
    let mut buf = vec![C::zero(); local_dim];
    for base in (0..state.len()).filter(|i| i & all == 0) {
        for (l, slot) in buf.iter_mut().enumerate() {
            *slot = state[offset(base, l)];
        }
        for r in 0..local_dim {
            state[offset(base, r)] = local.row(r).iter().zip(&buf).map(|(a, b)| *a * *b).sum();
        }
    }
}

/// `n` such that `d = 2^n`, or `UnsupportedDimension`.
pub fn qubits_for_dim(d: usize) -> Result<usize> {
    if d < 2 || !d.is_power_of_two() {
        return Err(NaimarkError::UnsupportedDimension { dim: d });
    }
    Ok(d.trailing_zeros() as usize)
}

fn require_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(NaimarkError::InvalidDimension {
            dim: 0,
            reason: "need at least one qubit per qudit",
        });
    }
    Ok(())
}

/// Clock `Z` on the register `wires`: `R(j+1)` on the `j`-th wire.
pub fn qudit_z_on<T: Real>(n_qubits: usize, wires: &[usize]) -> Result<GateList<T>> {
    let gates = wires
        .iter()
        .enumerate()
        .map(|(j, &w)| Gate::R {
            k: j as u32 + 1,
            wire: w,
            adjoint: false,
        })
        .collect();
    GateList::with_gates(n_qubits, gates)
}

/// Clock `Z` of `d = 2^n` on wires `0..n`.
pub fn qudit_z_circuit<T: Real>(n: usize) -> Result<GateList<T>> {
    require_n(n)?;
    qudit_z_on(n, &(0..n).collect::<Vec<_>>())
}

/// Qubit-controlled clock: `CR(j+1)` from `control` onto the `j`-th target wire.
pub fn qcz_circuit<T: Real>(n_qubits: usize, control: usize, targets: &[usize]) -> Result<GateList<T>> {
    if targets.contains(&control) {
        return Err(NaimarkError::InvalidCircuit(format!(
            "control wire {control} is also a target"
        )));
    }
    let gates = targets
        .iter()
        .enumerate()
        .map(|(j, &t)| Gate::CR {
            k: j as u32 + 1,
            control,
            target: t,
            adjoint: false,
        })
        .collect();
    GateList::with_gates(n_qubits, gates)
}

fn registers(n: usize) -> (Vec<usize>, Vec<usize>) {
    ((0..n).collect(), (n..2 * n).collect())
}

/// Qudit-controlled clock `Σ_m Z^m ⊗ |m⟩⟨m|` on `2n` wires.
///
/// The control wire `c_{n−j−1}` carries weight `2^j`, so its qubit-controlled
/// clock is repeated `2^j` times.
pub fn cz_qudit_circuit<T: Real>(n: usize) -> Result<GateList<T>> {
    require_n(n)?;
    let (targets, controls) = registers(n);
    let mut out = GateList::new(2 * n);
    for j in 0..n {
        let qcz = qcz_circuit::<T>(2 * n, controls[n - j - 1], &targets)?;
        for _ in 0..1usize << j {
            out.append(&qcz);
        }
    }
    Ok(out)
}

/// Qudit Fourier transform on `wires`: Hadamard/controlled-phase ladder
/// followed by the wire-reversal swaps.
pub fn qudit_fourier_on<T: Real>(n_qubits: usize, wires: &[usize]) -> Result<GateList<T>> {
    let n = wires.len();
    let mut out = GateList::new(n_qubits);
    for i in 0..n {
        out.push(Gate::H(wires[i]));
        for j in i + 1..n {
            out.push(Gate::CR {
                k: (j - i + 1) as u32,
                control: wires[j],
                target: wires[i],
                adjoint: false,
            });
        }
    }
    for i in 0..n / 2 {
        out.push(Gate::Swap(wires[i], wires[n - 1 - i]));
    }
    out.validate()?;
    Ok(out)
}

/// Qudit Fourier transform of `d = 2^n` on wires `0..n`.
pub fn qudit_fourier_circuit<T: Real>(n: usize) -> Result<GateList<T>> {
    require_n(n)?;
    qudit_fourier_on(n, &(0..n).collect::<Vec<_>>())
}

/// Qudit-controlled shift `Σ_m X^m ⊗ |m⟩⟨m|`: `F` on the target, controlled
/// clock, then `F†` on the target.
pub fn cx_qudit_circuit<T: Real>(n: usize) -> Result<GateList<T>> {
    require_n(n)?;
    let (targets, _) = registers(n);
    let f = qudit_fourier_on::<T>(2 * n, &targets)?;
    let mut out = f.clone();
    out.append(&cz_qudit_circuit(n)?);
    out.append(&f.adjoint());
    Ok(out)
}

/// `Σ_j X^{-j} ⊗ |j⟩⟨j|`, the inverse of [`cx_qudit_circuit`].
pub fn controlled_shift_circuit<T: Real>(n: usize) -> Result<GateList<T>> {
    Ok(cx_qudit_circuit::<T>(n)?.adjoint())
}

/// Generalized Bell rotation `(I ⊗ F†)(Σ_j X^{-j} ⊗ |j⟩⟨j|)`.
pub fn bell_circuit<T: Real>(n: usize) -> Result<GateList<T>> {
    let (_, ancilla) = registers(n);
    let mut out = controlled_shift_circuit(n)?;
    out.append(&qudit_fourier_on::<T>(2 * n, &ancilla)?.adjoint());
    Ok(out)
}

/// How the `d × d` unitary `M` is supplied to [`full_naimark_circuit`].
#[derive(Debug, Clone)]
pub enum MSource<T: Real> {
    /// Used as one opaque gate on the ancilla register.
    Matrix(Matrix<T>),
    /// A circuit on `n` wires whose expansion is `M`.
    Circuit(GateList<T>),
}

/// `U = (I ⊗ F†)(Σ_j X^{-j} ⊗ |j⟩⟨j|)(I ⊗ Mᵀ)` on `2n` wires.
pub fn full_naimark_circuit<T: Real>(m: &MSource<T>, n: usize) -> Result<GateList<T>> {
    require_n(n)?;
    let d = 1usize << n;
    let (_, ancilla) = registers(n);
    let prep = match m {
        MSource::Matrix(m) => {
            if m.rows() != d || m.cols() != d {
                return Err(NaimarkError::InvalidInput(format!(
                    "M is {}x{} but n = {n} needs {d}x{d}",
                    m.rows(),
                    m.cols()
                )));
            }
            GateList::with_gates(
                2 * n,
                vec![Gate::Unitary {
                    wires: ancilla,
                    matrix: m.transpose(),
                }],
            )?
        }
        MSource::Circuit(c) => {
            if c.n_qubits != n {
                return Err(NaimarkError::InvalidInput(format!(
                    "M circuit has {} qubits, expected {n}",
                    c.n_qubits
                )));
            }
            c.transpose().shifted(n, 2 * n)
        }
    };
    let mut out = prep;
    out.append(&bell_circuit(n)?);
    Ok(out)
}

/// `Σ_m A^m ⊗ |m⟩⟨m|` for the closed-form comparisons.
pub fn controlled_powers<T: Real>(op: &Matrix<T>) -> Matrix<T> {
    let d = op.rows();
    let mut out = Matrix::zeros(d * d, d * d);
    let mut power = Matrix::identity(d);
    for m in 0..d {
        let proj = Matrix::from_fn(d, d, |a, b| if a == m && b == m { C::one() } else { C::zero() });
        out = &out + &power.kron(&proj);
        power = &power * op;
    }
    out
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ Z`: qubit-controlled clock with the control first.
pub fn qubit_controlled<T: Real>(op: &Matrix<T>) -> Matrix<T> {
    let d = op.rows();
    let mut out = Matrix::identity(2 * d);
    out.set_block(1, 1, op);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wh::{clock_op, fourier, shift_op};

    const TOL: f64 = 1e-12;

    #[test]
    fn single_gate_expansions() {
        let h = GateList::<f64>::with_gates(1, vec![Gate::H(0)]).unwrap().expand().unwrap();
        assert!(h.max_abs_diff(&fourier(2).unwrap()) < TOL);
        let empty = GateList::<f64>::new(2).expand().unwrap();
        assert!(empty.max_abs_diff(&Matrix::identity(4)) < TOL);
        let swap = GateList::<f64>::with_gates(2, vec![Gate::Swap(0, 1)]).unwrap().expand().unwrap();
        assert!(swap.max_abs_diff(&Gate::<f64>::Swap(0, 1).local_matrix()) < TOL);
    }

    #[test]
    fn bad_circuits_rejected() {
        assert!(GateList::<f64>::with_gates(1, vec![Gate::H(1)]).is_err());
        assert!(GateList::<f64>::with_gates(2, vec![Gate::Swap(1, 1)]).is_err());
        let r0 = Gate::<f64>::R { k: 0, wire: 0, adjoint: false };
        assert!(matches!(
            GateList::with_gates(1, vec![r0]),
            Err(NaimarkError::InvalidCircuit(_))
        ));
        assert!(qcz_circuit::<f64>(3, 1, &[0, 1]).is_err());
        let mut list = GateList::<f64>::new(1);
        list.push(Gate::Unitary { wires: vec![0], matrix: Matrix::identity(4) });
        assert!(list.expand().is_err());
    }

    #[test]
    fn wire_order_is_msb_first() {
        // R(1) = Z on wire 0 of two qubits acts as Z ⊗ I.
        let g = GateList::<f64>::with_gates(2, vec![Gate::R { k: 1, wire: 0, adjoint: false }])
            .unwrap()
            .expand()
            .unwrap();
        let want = clock_op::<f64>(2).unwrap().kron(&Matrix::identity(2));
        assert!(g.max_abs_diff(&want) < TOL);
    }

    #[test]
    fn clock_circuits() {
        let z1 = qudit_z_circuit::<f64>(1).unwrap().expand().unwrap();
        assert!(z1.max_abs_diff(&clock_op(2).unwrap()) < TOL);
        let z2 = qudit_z_circuit::<f64>(2).unwrap().expand().unwrap();
        let i = C::new(0.0, 1.0);
        let want = Matrix::from_diagonal(&[C::one(), i, -C::<f64>::one(), -i]);
        assert!(z2.max_abs_diff(&want) < TOL);
        let z3 = qudit_z_circuit::<f64>(3).unwrap().expand().unwrap();
        assert!(z3.max_abs_diff(&clock_op(8).unwrap()) < TOL);
    }

    #[test]
    fn qubit_controlled_clock() {
        let c1 = qcz_circuit::<f64>(2, 0, &[1]).unwrap().expand().unwrap();
        assert!(c1.max_abs_diff(&qubit_controlled(&clock_op(2).unwrap())) < TOL);
        let c2 = qcz_circuit::<f64>(3, 0, &[1, 2]).unwrap().expand().unwrap();
        assert!(c2.max_abs_diff(&qubit_controlled(&clock_op(4).unwrap())) < TOL);
        // Control in |0⟩ leaves every target state alone.
        for r in 0..4 {
            for c in 0..4 {
                let want = if r == c { 1.0 } else { 0.0 };
                assert!((c2[(r, c)] - C::new(want, 0.0)).norm() < TOL);
            }
        }
    }

    #[test]
    fn qudit_controlled_clock_and_shift() {
        for n in 1..=2 {
            let d = 1 << n;
            let cz = cz_qudit_circuit::<f64>(n).unwrap().expand().unwrap();
            assert!(cz.max_abs_diff(&controlled_powers(&clock_op(d).unwrap())) < TOL);
            let cx = cx_qudit_circuit::<f64>(n).unwrap().expand().unwrap();
            assert!(cx.max_abs_diff(&controlled_powers(&shift_op(d).unwrap())) < TOL);
            // Fourier conjugacy on the target register.
            let f = fourier::<f64>(d).unwrap().kron(&Matrix::identity(d));
            let conj = &(&f.adjoint() * &cz) * &f;
            assert!(conj.max_abs_diff(&cx) < TOL);
        }
    }

    #[test]
    fn fourier_circuits() {
        for n in 1..=3 {
            let f = qudit_fourier_circuit::<f64>(n).unwrap().expand().unwrap();
            assert!(f.max_abs_diff(&fourier(1 << n).unwrap()) < TOL, "n={n}");
        }
        assert_eq!(qudit_fourier_circuit::<f64>(1).unwrap().gates, vec![Gate::H(0)]);
    }

    #[test]
    fn adjoint_and_transpose_of_lists() {
        let f = qudit_fourier_circuit::<f64>(2).unwrap();
        let fd = f.adjoint().expand().unwrap();
        assert!(fd.max_abs_diff(&f.expand().unwrap().adjoint()) < TOL);
        let ft = f.transpose().expand().unwrap();
        assert!(ft.max_abs_diff(&f.expand().unwrap().transpose()) < TOL);
    }

    #[test]
    fn emitted_circuits_are_unitary() {
        for n in 1..=2 {
            for list in [
                qudit_z_circuit::<f64>(n).unwrap(),
                cz_qudit_circuit(n).unwrap(),
                cx_qudit_circuit(n).unwrap(),
                qudit_fourier_circuit(n).unwrap(),
                bell_circuit(n).unwrap(),
            ] {
                assert!(list.expand().unwrap().unitarity_residual() < TOL);
            }
        }
    }

    #[test]
    fn dimension_checks() {
        assert_eq!(qubits_for_dim(8).unwrap(), 3);
        assert!(matches!(qubits_for_dim(6), Err(NaimarkError::UnsupportedDimension { dim: 6 })));
        assert!(qudit_z_circuit::<f64>(0).is_err());
        let m = MSource::Matrix(Matrix::<f64>::identity(3));
        assert!(matches!(full_naimark_circuit(&m, 1), Err(NaimarkError::InvalidInput(_))));
    }

    #[cfg(feature = "slow")]
    #[test]
    fn three_qubit_registers() {
        let cz = cz_qudit_circuit::<f64>(3).unwrap().expand().unwrap();
        assert!(cz.max_abs_diff(&controlled_powers(&clock_op(8).unwrap())) < TOL);
        let cx = cx_qudit_circuit::<f64>(3).unwrap().expand().unwrap();
        assert!(cx.max_abs_diff(&controlled_powers(&shift_op(8).unwrap())) < TOL);
        let q = qcz_circuit::<f64>(4, 0, &[1, 2, 3]).unwrap().expand().unwrap();
        assert!(q.max_abs_diff(&qubit_controlled(&clock_op(8).unwrap())) < TOL);
    }
}
