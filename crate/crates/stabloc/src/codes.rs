//! Graphs for stabilizer codes: a state graph for |0…0̄⟩ plus input nodes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{BitMatrix, BitVec};
use crate::graph::{GraphError, StabGraph};
use crate::oracle::{OracleError, StateVector, DEFAULT_LIMIT};
use crate::pauli::{Gate, PauliError, PauliOperator};
use crate::rng::Outcome;
use crate::tableau::{StabilizerTableau, TableauError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodeError {
    #[error("code operators do not form a valid stabilizer set: {0}")]
    Tableau(#[from] TableauError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("expected {expected} entries, got {got}")]
    Length { expected: usize, got: usize },
    #[error("{n}+{k} qubits exceeds the oracle limit of {limit}")]
    TooLarge { n: usize, k: usize, limit: usize },
    #[error("amplitudes are not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("bad code JSON: {0}")]
    Json(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeGraph {
    /// Graph of |0…0̄⟩.
    pub base: StabGraph,
    pub k: usize,
    /// Entry (l, j) is set when input node l connects to graph node j.
    pub input_edges: BitMatrix,
    /// Generators of |0…0̄⟩ in the original qubit frame, one per graph node.
    pub canonical: StabilizerTableau,
    pub logical_zs: Vec<PauliOperator>,
}

#[derive(Serialize, Deserialize)]
pub struct CodeSpec {
    pub n: usize,
    pub k: usize,
    pub stabilizers: Vec<String>,
    pub logical_zs: Vec<String>,
}

impl CodeSpec {
    pub fn from_json(text: &str) -> Result<Self, CodeError> {
        serde_json::from_str(text).map_err(|e| CodeError::Json(e.to_string()))
    }

    pub fn build(&self) -> Result<CodeGraph, CodeError> {
        let parse = |v: &[String]| v.iter().map(|s| PauliOperator::parse(s)).collect::<Result<Vec<_>, _>>();
        let gens = parse(&self.stabilizers)?;
        let zs = parse(&self.logical_zs)?;
        if gens.len() + zs.len() != self.n || zs.len() != self.k {
            return Err(CodeError::Length { expected: self.n, got: gens.len() + zs.len() });
        }
        build_code_graph(&gens, &zs)
    }
}

/// Canonicalizes `gens ∪ logical_zs` and records which logical Z entered each canonical generator.
pub fn build_code_graph(gens: &[PauliOperator], logical_zs: &[PauliOperator]) -> Result<CodeGraph, CodeError> {
    let stacked = StabilizerTableau::new(gens.iter().chain(logical_zs).cloned().collect())?;
    let n = stacked.n();
    let k = logical_zs.len();
    let gf = stacked.to_graph_form()?;
    let mut input_edges = BitMatrix::zeros(k, n);
    for l in 0..k {
        for j in 0..n {
            input_edges.set(l, j, gf.combination.get(j, n - k + l));
        }
    }
    Ok(CodeGraph {
        base: StabGraph::from_tableau(&stacked)?,
        k,
        input_edges,
        canonical: stacked.recombine(&gf.combination),
        logical_zs: logical_zs.to_vec(),
    })
}

impl CodeGraph {
    pub fn n(&self) -> usize {
        self.base.n()
    }

    /// Graph nodes attached to input node `l`.
    pub fn input_neighbors(&self, l: usize) -> Vec<usize> {
        self.input_edges.row(l).ones_iter().collect()
    }

    /// Nodes whose generator sign flips for logical basis state c.
    fn flips(&self, c: &BitVec) -> Result<BitVec, CodeError> {
        if c.len() != self.k {
            return Err(CodeError::Length { expected: self.k, got: c.len() });
        }
        Ok(self.input_edges.transpose().mul_vec(c))
    }

    /// Generators of |c̄⟩: base generators with signs `(−1)^{b(j)·c}`.
    pub fn basis_generators(&self, c: &BitVec) -> Result<StabilizerTableau, CodeError> {
        let flips = self.flips(c)?;
        let rows = self
            .canonical
            .rows()
            .iter()
            .enumerate()
            .map(|(j, r)| if flips.get(j) { r.negate() } else { r.clone() })
            .collect();
        Ok(StabilizerTableau::from_rows_unchecked(rows))
    }

    /// Graph of |c̄⟩: the base graph with signs toggled on nodes tied to active inputs.
    pub fn basis_graph(&self, c: &BitVec) -> Result<StabGraph, CodeError> {
        let flips = self.flips(c)?;
        let mut g = self.base.clone();
        for j in flips.ones_iter() {
            g.set_sign(j, !g.has_sign(j));
        }
        Ok(g)
    }

    /// Runs the encoding circuit on `Σ_c α_c |c⟩` with the input register measured in the
    /// X basis; returns the n-qubit output and the measurement record.
    pub fn encode_state(&self, amplitudes: &[Complex64], source: Outcome) -> Result<(StateVector, BitVec), CodeError> {
        let k = self.k;
        let record = BitVec::from_bools(&(0..k).map(|l| source.nth(l as u64).draw()).collect::<Vec<_>>());
        Ok((self.encode_with_record(amplitudes, &record)?, record))
    }

    /// Same as [`encode_state`](Self::encode_state) with a prescribed measurement record.
    pub fn encode_with_record(&self, amplitudes: &[Complex64], record: &BitVec) -> Result<StateVector, CodeError> {
        let (n, k) = (self.n(), self.k);
        if n + k > DEFAULT_LIMIT {
            return Err(CodeError::TooLarge { n, k, limit: DEFAULT_LIMIT });
        }
        if amplitudes.len() != 1 << k {
            return Err(CodeError::Length { expected: 1 << k, got: amplitudes.len() });
        }
        if record.len() != k {
            return Err(CodeError::Length { expected: k, got: record.len() });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(CodeError::NotNormalized(norm));
        }
        let mut full = vec![Complex64::new(0.0, 0.0); 1 << (n + k)];
        for (c, &a) in amplitudes.iter().enumerate() {
            full[c << n] = a;
        }
        let mut s = StateVector::from_amplitudes(n + k, full)?;
        let circ = self.base.to_circuit();
        let mut gates: Vec<Gate> = (0..n).map(Gate::H).collect();
        gates.extend(circ.cz_edges.iter().map(|&(a, b)| Gate::Cz(a, b)));
        for l in 0..k {
            gates.extend(self.input_neighbors(l).into_iter().map(|j| Gate::Cz(n + l, j)));
        }
        for q in 0..n {
            if circ.z_flags[q] {
                gates.push(Gate::Z(q));
            }
            if circ.s_flags[q] {
                gates.push(Gate::S(q));
            }
            if circ.h_flags[q] {
                gates.push(Gate::H(q));
            }
        }
        gates.extend((0..k).map(|l| Gate::H(n + l)));
        s.apply_gates(&gates)?;
        // Keep the branch with input register = record.
        let mut x_mask = 0usize;
        for l in record.ones_iter() {
            x_mask |= 1 << l;
        }
        let out: Vec<Complex64> = (0..1usize << n).map(|b| s.amplitudes()[b | x_mask << n]).collect();
        let mut out = StateVector::from_amplitudes(n, out)?;
        for l in record.ones_iter() {
            out = out.apply_pauli(&self.logical_zs[l])?;
        }
        Ok(out)
    }

    /// Target superposition `Σ_c α_c |c̄⟩` built from the basis generators.
    pub fn logical_state(&self, amplitudes: &[Complex64]) -> Result<StateVector, CodeError> {
        let n = self.n();
        let mut total = vec![Complex64::new(0.0, 0.0); 1 << n];
        for (c, &a) in amplitudes.iter().enumerate() {
            if a.norm() == 0.0 {
                continue;
            }
            let basis = self.basis_state(&BitVec::from_mask(self.k, c as u64))?;
            for (t, b) in total.iter_mut().zip(basis.amplitudes()) {
                *t += a * b;
            }
        }
        Ok(StateVector::from_amplitudes(n, total)?)
    }

    /// |c̄⟩ with the phase fixed by the encoding circuit on basis input |c⟩.
    pub fn basis_state(&self, c: &BitVec) -> Result<StateVector, CodeError> {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << self.k];
        amps[c.to_mask() as usize] = Complex64::new(1.0, 0.0);
        self.encode_with_record(&amps, &BitVec::zeros(self.k))
    }
}

/// The five-qubit code with logical Z = ZZZZZ.
pub fn five_qubit_code() -> (Vec<PauliOperator>, Vec<PauliOperator>) {
    let p = |s: &str| PauliOperator::parse(s).expect("valid literal");
    (vec![p("+XZZXI"), p("+IXZZX"), p("+XIXZZ"), p("+ZXIXZ")], vec![p("+ZZZZZ")])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::STATE_TOL;

    #[test]
    fn five_qubit_inputs() {
        let (g, z) = five_qubit_code();
        let cg = build_code_graph(&g, &z).unwrap();
        assert_eq!(cg.input_neighbors(0), vec![0, 3, 4]);
        let one = cg.basis_generators(&BitVec::ones(1)).unwrap();
        let zero = cg.basis_generators(&BitVec::zeros(1)).unwrap();
        for j in 0..5 {
            assert_eq!(one.row(j).is_negative() != zero.row(j).is_negative(), [0, 3, 4].contains(&j));
        }
        assert!(one.validate().is_ok());
    }

    #[test]
    fn trivial_code() {
        let cg = build_code_graph(&[PauliOperator::parse("+XZ").unwrap(), PauliOperator::parse("+ZX").unwrap()], &[])
            .unwrap();
        assert_eq!(cg.k, 0);
        assert_eq!(cg.input_edges.rows(), 0);
        assert_eq!(cg.basis_generators(&BitVec::zeros(0)).unwrap(), cg.canonical);
    }

    #[test]
    fn repetition_code_superposition() {
        let p = |s: &str| PauliOperator::parse(s).unwrap();
        let cg = build_code_graph(&[p("+ZZI"), p("+IZZ")], &[p("+ZZZ")]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let amps = [Complex64::new(h, 0.0), Complex64::new(h, 0.0)];
        let mut ghz = vec![Complex64::new(0.0, 0.0); 8];
        ghz[0] = Complex64::new(h, 0.0);
        ghz[7] = Complex64::new(h, 0.0);
        let ghz = StateVector::from_amplitudes(3, ghz).unwrap();
        for x in [false, true] {
            let out = cg.encode_with_record(&amps, &BitVec::from_bools(&[x])).unwrap();
            assert!(out.equal_up_to_phase(&ghz, STATE_TOL).unwrap());
        }
    }
}
