//! n-qubit Pauli operators with exact phase bookkeeping.
//!
//! An operator is stored as `(s, x, z)` and denotes `i^s · i^{x·z} · ⊗_j X^{x_j} Z^{z_j}`.
//! The `i^{x·z}` factor makes every `Y` appear as a plain `x_j = z_j = 1`, so the
//! operator is Hermitian exactly when `s` is even.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::gf2::BitVec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PauliError {
    #[error("empty Pauli string")]
    Empty,
    #[error("invalid character {ch:?} at index {index} in Pauli string")]
    BadChar { index: usize, ch: char },
    #[error("dimension mismatch: {0} vs {1} qubits")]
    Dimension(usize, usize),
    #[error("qubit index {index} out of range for {n} qubits")]
    Index { index: usize, n: usize },
}

/// One of the four single-qubit Pauli letters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub const ALL: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];
}

/// Clifford gates acting by conjugation on Pauli operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Z(usize),
    Cz(usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::X(q) | Gate::Z(q) => vec![q],
            Gate::Cz(a, b) => vec![a, b],
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    phase: u8,
    x: BitVec,
    z: BitVec,
}

impl PauliOperator {
    pub fn new(phase: u8, x: BitVec, z: BitVec) -> Self {
        assert_eq!(x.len(), z.len(), "x and z must have equal length");
        PauliOperator { phase: phase % 4, x, z }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(0, BitVec::zeros(n), BitVec::zeros(n))
    }

    /// `+P_j` acting on qubit j of n.
    pub fn single(n: usize, j: usize, letter: Letter) -> Self {
        let mut p = Self::identity(n);
        p.set_letter(j, letter);
        p
    }

    /// Sign-free (+) operator from letters.
    pub fn from_letters(letters: &[Letter]) -> Self {
        let mut p = Self::identity(letters.len());
        for (j, &l) in letters.iter().enumerate() {
            p.set_letter(j, l);
        }
        p
    }

    /// Builds `(−1)^sign` times the operator with binary vector `r = (x | z)`.
    pub fn from_r(r: &BitVec, negative: bool) -> Self {
        assert_eq!(r.len() % 2, 0);
        let n = r.len() / 2;
        Self::new(if negative { 2 } else { 0 }, r.slice(0, n), r.slice(n, 2 * n))
    }

    pub fn parse(text: &str) -> Result<Self, PauliError> {
        let t = text.trim();
        let (phase, body, offset) = if let Some(rest) = t.strip_prefix("+i") {
            (1, rest, 2)
        } else if let Some(rest) = t.strip_prefix("-i") {
            (3, rest, 2)
        } else if let Some(rest) = t.strip_prefix('+') {
            (0, rest, 1)
        } else if let Some(rest) = t.strip_prefix('-') {
            (2, rest, 1)
        } else {
            (0, t, 0)
        };
        if body.is_empty() {
            return Err(PauliError::Empty);
        }
        let mut letters = Vec::with_capacity(body.len());
        for (i, ch) in body.chars().enumerate() {
            letters.push(Letter::from_char(ch).ok_or(PauliError::BadChar { index: i + offset, ch })?);
        }
        let mut p = Self::from_letters(&letters);
        p.phase = phase;
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn x(&self) -> &BitVec {
        &self.x
    }

    pub fn z(&self) -> &BitVec {
        &self.z
    }

    /// Binary-symplectic vector `r = (x | z)`.
    pub fn r(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    pub fn letter(&self, j: usize) -> Letter {
        Letter::from_bits(self.x.get(j), self.z.get(j))
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.n()).map(|j| self.letter(j)).collect()
    }

    pub fn set_letter(&mut self, j: usize, l: Letter) {
        let (x, z) = l.bits();
        self.x.set(j, x);
        self.z.set(j, z);
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// For Hermitian operators: whether the leading sign is −1.
    pub fn is_negative(&self) -> bool {
        self.phase == 2
    }

    pub fn weight(&self) -> usize {
        (0..self.n()).filter(|&j| self.x.get(j) || self.z.get(j)).count()
    }

    /// Support (non-identity positions).
    pub fn support(&self) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.x.get(j) || self.z.get(j)).collect()
    }

    pub fn with_phase(&self, phase: u8) -> Self {
        Self::new(phase, self.x.clone(), self.z.clone())
    }

    pub fn negate(&self) -> Self {
        self.with_phase(self.phase + 2)
    }

    /// Operator product `self · other` with exact phase.
    pub fn multiply(&self, other: &Self) -> Result<Self, PauliError> {
        if self.n() != other.n() {
            return Err(PauliError::Dimension(self.n(), other.n()));
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let x = self.x.xor(&other.x);
        let z = self.z.xor(&other.z);
        // Z^{z_g} X^{x_h} = (-1)^{z_g·x_h} X^{x_h} Z^{z_g}; re-absorb i^{x·z} for the result.
        let e = self.phase as usize
            + other.phase as usize
            + self.x.and_count(&self.z)
            + other.x.and_count(&other.z)
            + 2 * self.z.and_count(&other.x);
        let e = (e + 4 * x.len() - x.and_count(&z) % 4) % 4;
        PauliOperator { phase: e as u8, x, z }
    }

    pub fn commutes(&self, other: &Self) -> Result<bool, PauliError> {
        if self.n() != other.n() {
            return Err(PauliError::Dimension(self.n(), other.n()));
        }
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &Self) -> bool {
        (self.x.and_count(&other.z) + self.z.and_count(&other.x)).is_multiple_of(2)
    }

    fn check_qubit(&self, q: usize) -> Result<(), PauliError> {
        if q >= self.n() {
            Err(PauliError::Index { index: q, n: self.n() })
        } else {
            Ok(())
        }
    }

    /// Images `(U X_q U†, U Z_q U†)` for a gate that touches qubit q.
    fn images(gate: Gate, n: usize, q: usize) -> (PauliOperator, PauliOperator) {
        let x = PauliOperator::single(n, q, Letter::X);
        let z = PauliOperator::single(n, q, Letter::Z);
        match gate {
            Gate::H(_) => (z, x),
            Gate::S(_) => (PauliOperator::single(n, q, Letter::Y), z),
            Gate::Sdg(_) => (PauliOperator::single(n, q, Letter::Y).negate(), z),
            Gate::X(_) => (x, z.negate()),
            Gate::Z(_) => (x.negate(), z),
            Gate::Cz(a, b) => {
                let other = if q == a { b } else { a };
                let mut xi = x;
                xi.z.set(other, true);
                (xi, z)
            }
        }
    }

    /// `U · self · U†` for a Clifford gate U.
    pub fn conjugate(&self, gate: Gate) -> Result<Self, PauliError> {
        let qs = gate.qubits();
        for &q in &qs {
            self.check_qubit(q)?;
        }
        if let Gate::Cz(a, b) = gate {
            if a == b {
                return Err(PauliError::Index { index: a, n: self.n() });
            }
        }
        let n = self.n();
        // Rebuild the operator factor by factor, in the order X^{x_q} Z^{z_q} per qubit,
        // replacing factors on touched qubits by their images.
        let mut acc = PauliOperator::identity(n);
        acc.phase = (self.phase as usize + self.x.and_count(&self.z)) as u8 % 4;
        let mut rest = PauliOperator::identity(n);
        for j in 0..n {
            if !qs.contains(&j) {
                rest.x.set(j, self.x.get(j));
                rest.z.set(j, self.z.get(j));
            }
        }
        // rest is i^{-x·z}-normalised: strip its canonical factor.
        let rest_xz = rest.x.and_count(&rest.z);
        acc.phase = ((acc.phase as usize + 4 * n - rest_xz % 4) % 4) as u8;
        // Untouched qubits commute with touched ones, so the order of the blocks is free.
        acc = acc.mul_unchecked(&rest);
        for &q in &qs {
            let (ix, iz) = Self::images(gate, n, q);
            if self.x.get(q) {
                acc = acc.mul_unchecked(&ix);
            }
            if self.z.get(q) {
                acc = acc.mul_unchecked(&iz);
            }
        }
        Ok(acc)
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        })?;
        for j in 0..self.n() {
            write!(f, "{}", self.letter(j).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for PauliOperator {
    type Err = PauliError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}
