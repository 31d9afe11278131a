//! Dense statevector simulator used as ground truth at small qubit counts.
//!
//! Basis index bit `j` holds qubit `j`.

use num_complex::Complex64;
use thiserror::Error;

use crate::graph::GraphCircuit;
use crate::pauli::{Gate, PauliOperator};

pub const DEFAULT_LIMIT: usize = 12;
pub const STATE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{n} qubits exceeds the oracle limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("dimension mismatch: {0} vs {1} qubits")]
    Dimension(usize, usize),
    #[error("operator {0} is not Hermitian")]
    NotHermitian(String),
    #[error("qubit index {index} out of range for {n} qubits")]
    Index { index: usize, n: usize },
    #[error("generators do not stabilize a common state")]
    NoCommonState,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

fn check_size(n: usize) -> Result<(), OracleError> {
    if n > DEFAULT_LIMIT {
        Err(OracleError::TooLarge { n, limit: DEFAULT_LIMIT })
    } else {
        Ok(())
    }
}

impl StateVector {
    /// |0…0⟩.
    pub fn zero(n: usize) -> Result<Self, OracleError> {
        check_size(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Wraps raw amplitudes (normalizing them).
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self, OracleError> {
        check_size(n)?;
        assert_eq!(amps.len(), 1 << n);
        let mut s = StateVector { n, amps };
        s.normalize();
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn normalize(&mut self) {
        let nrm = self.norm_sqr().sqrt();
        if nrm > 0.0 {
            for a in &mut self.amps {
                *a /= nrm;
            }
        }
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64, OracleError> {
        if self.n != other.n {
            return Err(OracleError::Dimension(self.n, other.n));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨a|b⟩| ≥ 1 − tol`.
    pub fn equal_up_to_phase(&self, other: &Self, tol: f64) -> Result<bool, OracleError> {
        Ok(self.inner(other)?.norm() >= 1.0 - tol)
    }

    fn check_qubit(&self, q: usize) -> Result<(), OracleError> {
        if q >= self.n {
            Err(OracleError::Index { index: q, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn apply_gate(&mut self, gate: Gate) -> Result<(), OracleError> {
        for q in gate.qubits() {
            self.check_qubit(q)?;
        }
        let i = Complex64::new(0.0, 1.0);
        match gate {
            Gate::H(q) => {
                let bit = 1usize << q;
                let h = std::f64::consts::FRAC_1_SQRT_2;
                for idx in 0..self.amps.len() {
                    if idx & bit == 0 {
                        let a = self.amps[idx];
                        let b = self.amps[idx | bit];
                        self.amps[idx] = (a + b) * h;
                        self.amps[idx | bit] = (a - b) * h;
                    }
                }
            }
            Gate::S(q) => self.phase_where(|idx| idx >> q & 1 == 1, i),
            Gate::Sdg(q) => self.phase_where(|idx| idx >> q & 1 == 1, -i),
            Gate::Z(q) => self.phase_where(|idx| idx >> q & 1 == 1, Complex64::new(-1.0, 0.0)),
            Gate::Cz(a, b) => {
                self.phase_where(|idx| idx >> a & 1 == 1 && idx >> b & 1 == 1, Complex64::new(-1.0, 0.0))
            }
            Gate::X(q) => {
                let bit = 1usize << q;
                for idx in 0..self.amps.len() {
                    if idx & bit == 0 {
                        self.amps.swap(idx, idx | bit);
                    }
                }
            }
        }
        Ok(())
    }

    fn phase_where(&mut self, pred: impl Fn(usize) -> bool, f: Complex64) {
        for (idx, a) in self.amps.iter_mut().enumerate() {
            if pred(idx) {
                *a *= f;
            }
        }
    }

    pub fn apply_gates(&mut self, gates: &[Gate]) -> Result<(), OracleError> {
        gates.iter().try_for_each(|&g| self.apply_gate(g))
    }

    /// `P|ψ⟩` including the operator's phase.
    pub fn apply_pauli(&self, p: &PauliOperator) -> Result<Self, OracleError> {
        if p.n() != self.n {
            return Err(OracleError::Dimension(self.n, p.n()));
        }
        let xm = p.x().to_mask() as usize;
        let zm = p.z().to_mask() as usize;
        let e = (p.phase() as usize + p.x().and_count(p.z())) % 4;
        let unit = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ][e];
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (idx, &a) in self.amps.iter().enumerate() {
            // X^x Z^z |b⟩ = (−1)^{z·b} |b ⊕ x⟩
            let sign = if (idx & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[idx ^ xm] += a * unit * sign;
        }
        Ok(StateVector { n: self.n, amps: out })
    }

    /// `⟨ψ|P|ψ⟩`; real for Hermitian P.
    pub fn pauli_expectation(&self, p: &PauliOperator) -> Result<Complex64, OracleError> {
        self.inner(&self.apply_pauli(p)?)
    }

    /// Projects onto the `(−1)^m` eigenspace of P. Returns the probability and,
    /// when it exceeds 1e−12, the normalized post-measurement state.
    pub fn project(&self, p: &PauliOperator, m: bool) -> Result<(f64, Option<Self>), OracleError> {
        if !p.is_hermitian() {
            return Err(OracleError::NotHermitian(p.to_string()));
        }
        let pp = self.apply_pauli(p)?;
        let s = if m { -1.0 } else { 1.0 };
        let amps: Vec<Complex64> =
            self.amps.iter().zip(&pp.amps).map(|(a, b)| (a + b * s) * 0.5).collect();
        let mut post = StateVector { n: self.n, amps };
        let prob = post.norm_sqr();
        if prob > 1e-12 {
            post.normalize();
            Ok((prob, Some(post)))
        } else {
            Ok((prob, None))
        }
    }

    /// The unique state stabilized by n independent commuting Hermitian operators.
    pub fn from_stabilizers(gens: &[PauliOperator]) -> Result<Self, OracleError> {
        let n = gens.first().map_or(0, |g| g.n());
        check_size(n)?;
        // Project a generic (dense, irregular) start state; the overlap with the
        // target is then nonzero.
        let amps = (0..1usize << n)
            .map(|k| {
                let t = k as f64 + 1.0;
                Complex64::new((t * 0.7331).sin() + 1.3, (t * 1.917).cos())
            })
            .collect();
        let mut s = StateVector::from_amplitudes(n, amps)?;
        for g in gens {
            let m = g.is_negative();
            let (prob, post) = s.project(&g.with_phase(0), m)?;
            if prob < 1e-12 {
                return Err(OracleError::NoCommonState);
            }
            s = post.ok_or(OracleError::NoCommonState)?;
        }
        Ok(s)
    }
}

/// Runs the layered graph-form circuit: H on every qubit, the CZ layer, then
/// per qubit Z, S, H as flagged, followed by `extra` gates.
pub fn run_circuit(c: &GraphCircuit, extra: &[Gate]) -> Result<StateVector, OracleError> {
    let mut s = StateVector::zero(c.n)?;
    for q in 0..c.n {
        s.apply_gate(Gate::H(q))?;
    }
    for &(a, b) in &c.cz_edges {
        s.apply_gate(Gate::Cz(a, b))?;
    }
    for q in 0..c.n {
        if c.z_flags[q] {
            s.apply_gate(Gate::Z(q))?;
        }
        if c.s_flags[q] {
            s.apply_gate(Gate::S(q))?;
        }
        if c.h_flags[q] {
            s.apply_gate(Gate::H(q))?;
        }
    }
    s.apply_gates(extra)?;
    Ok(s)
}
