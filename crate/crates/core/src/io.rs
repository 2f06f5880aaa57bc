//! JSON file formats: matrices, circuits and outcome tables.

use serde::{Deserialize, Serialize};

use crate::circuit::{Gate, GateList};
use crate::error::{NaimarkError, Result};
use crate::linalg::{Ket, Matrix};
use crate::scalar::{Real, C};

/// Dense complex matrix as nested real/imaginary arrays (row-major).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    /// Qudit dimension the matrix belongs to (`d` for `M`, also `d` for the `d² × d²` `U`).
    pub d: usize,
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix<T: Real>(d: usize, m: &Matrix<T>) -> Self {
        let part = |f: fn(&C<T>) -> T| -> Vec<Vec<f64>> {
            (0..m.rows())
                .map(|r| m.row(r).iter().map(|z| f(z).to_f64_lossy()).collect())
                .collect()
        };
        Self {
            d,
            rows: m.rows(),
            cols: m.cols(),
            re: part(|z| z.re),
            im: part(|z| z.im),
        }
    }

    pub fn to_matrix<T: Real>(&self) -> Result<Matrix<T>> {
        let shape_ok = |a: &Vec<Vec<f64>>| a.len() == self.rows && a.iter().all(|r| r.len() == self.cols);
        if !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(NaimarkError::Parse(format!(
                "re/im arrays do not match the declared {}x{} shape",
                self.rows, self.cols
            )));
        }
        Ok(Matrix::from_fn(self.rows, self.cols, |r, c| {
            C::new(T::lit(self.re[r][c]), T::lit(self.im[r][c]))
        }))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| NaimarkError::Parse(e.to_string()))
    }
}

/// Ket as parallel real/imaginary arrays; `im` may be omitted for real vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KetFile {
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

impl KetFile {
    pub fn from_ket<T: Real>(k: &Ket<T>) -> Self {
        Self {
            re: k.amplitudes().iter().map(|z| z.re.to_f64_lossy()).collect(),
            im: k.amplitudes().iter().map(|z| z.im.to_f64_lossy()).collect(),
        }
    }

    /// Raw amplitudes, not yet checked for normalization.
    pub fn amplitudes<T: Real>(&self) -> Result<Vec<C<T>>> {
        if !self.im.is_empty() && self.im.len() != self.re.len() {
            return Err(NaimarkError::Parse(format!(
                "ket has {} real and {} imaginary parts",
                self.re.len(),
                self.im.len()
            )));
        }
        Ok(self
            .re
            .iter()
            .enumerate()
            .map(|(i, &r)| C::new(T::lit(r), T::lit(self.im.get(i).copied().unwrap_or(0.0))))
            .collect())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| NaimarkError::Parse(e.to_string()))
    }
}

/// Real/imaginary parts of an opaque gate's matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFile {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// One gate of a [`CircuitFile`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    /// `"H"`, `"R"`, `"CR"`, `"SWAP"`, or `"U"` for an opaque unitary.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    /// For `CR` the control comes first.
    pub wires: Vec<usize>,
    /// Conjugated phase, for `R`/`CR` inside inverse circuits.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub adjoint: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<GridFile>,
}

/// Circuit in application order: `gates[0]` acts first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitFile {
    pub n_qubits: usize,
    pub gates: Vec<GateRecord>,
}

impl CircuitFile {
    pub fn from_gate_list<T: Real>(list: &GateList<T>) -> Self {
        let gates = list
            .gates
            .iter()
            .map(|g| {
                let (k, adjoint) = match g {
                    Gate::R { k, adjoint, .. } | Gate::CR { k, adjoint, .. } => (Some(*k), *adjoint),
                    _ => (None, false),
                };
                let matrix = match g {
                    Gate::Unitary { matrix, .. } => {
                        let f = MatrixFile::from_matrix(matrix.rows(), matrix);
                        Some(GridFile { re: f.re, im: f.im })
                    }
                    _ => None,
                };
                GateRecord {
                    kind: g.name().to_string(),
                    k,
                    wires: g.wires(),
                    adjoint,
                    matrix,
                }
            })
            .collect();
        Self {
            n_qubits: list.n_qubits,
            gates,
        }
    }

    pub fn to_gate_list<T: Real>(&self) -> Result<GateList<T>> {
        let gates = self
            .gates
            .iter()
            .map(|g| {
                let wires = |n: usize| -> Result<&[usize]> {
                    if g.wires.len() != n {
                        return Err(NaimarkError::InvalidCircuit(format!(
                            "{} gate needs {n} wires, got {}",
                            g.kind,
                            g.wires.len()
                        )));
                    }
                    Ok(&g.wires)
                };
                let k = || {
                    g.k.ok_or_else(|| NaimarkError::InvalidCircuit(format!("{} gate needs k", g.kind)))
                };
                Ok(match g.kind.as_str() {
                    "H" => Gate::H(wires(1)?[0]),
                    "R" => Gate::R {
                        k: k()?,
                        wire: wires(1)?[0],
                        adjoint: g.adjoint,
                    },
                    "CR" => {
                        let w = wires(2)?;
                        Gate::CR {
                            k: k()?,
                            control: w[0],
                            target: w[1],
                            adjoint: g.adjoint,
                        }
                    }
                    "SWAP" => {
                        let w = wires(2)?;
                        Gate::Swap(w[0], w[1])
                    }
                    "U" => {
                        let grid = g.matrix.as_ref().ok_or_else(|| {
                            NaimarkError::InvalidCircuit("U gate needs a matrix".into())
                        })?;
                        let rows = grid.re.len();
                        let file = MatrixFile {
                            d: rows,
                            rows,
                            cols: grid.re.first().map_or(0, Vec::len),
                            re: grid.re.clone(),
                            im: grid.im.clone(),
                        };
                        Gate::Unitary {
                            wires: g.wires.clone(),
                            matrix: file.to_matrix()?,
                        }
                    }
                    other => {
                        return Err(NaimarkError::InvalidCircuit(format!("unknown gate kind '{other}'")))
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        GateList::with_gates(self.n_qubits, gates)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| NaimarkError::Parse(e.to_string()))
    }
}
