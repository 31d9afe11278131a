//! Stabilizer states as signed generator matrices.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{BitMatrix, BitVec};
use crate::pauli::{Gate, Letter, PauliError, PauliOperator};
use crate::rng::Outcome;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableauError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: PauliError },
    #[error("line {line}: sign prefix (+ or -) is mandatory")]
    MissingSign { line: usize },
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("row {0} is not Hermitian")]
    NotHermitian(usize),
    #[error("invalid tableau: {0}")]
    Invalid(Violation),
    #[error("operator {0} is not Hermitian")]
    NonHermitianOperator(String),
    #[error("measured operator {0} must carry sign +1")]
    NegativeOperator(String),
    #[error("bad JSON: {0}")]
    Json(String),
}

/// Why a set of rows fails to describe a stabilizer state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    RowCount { rows: usize, n: usize },
    Width { row: usize, width: usize, n: usize },
    NonHermitian { row: usize },
    Anticommute { a: usize, b: usize },
    Rank { rank: usize, n: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RowCount { rows, n } => write!(f, "{rows} rows for {n} qubits"),
            Violation::Width { row, width, n } => write!(f, "row {row} has {width} qubits, expected {n}"),
            Violation::NonHermitian { row } => write!(f, "row {row} is not Hermitian"),
            Violation::Anticommute { a, b } => write!(f, "rows {a} and {b} anticommute"),
            Violation::Rank { rank, n } => write!(f, "generator matrix has rank {rank} < {n}"),
        }
    }
}

/// Certain (probability 1) or coin-flip (probability ½) measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Probability {
    One,
    Half,
}

impl Probability {
    pub fn value(self) -> f64 {
        match self {
            Probability::One => 1.0,
            Probability::Half => 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureResult<T> {
    /// Outcome bit m; eigenvalue (−1)^m.
    pub outcome: bool,
    pub probability: Probability,
    pub state: T,
}

impl<T> MeasureResult<T> {
    pub fn eigenvalue(&self) -> i8 {
        if self.outcome {
            -1
        } else {
            1
        }
    }
}

/// Result of converting to graph form: `|input⟩ = local_ops · |tableau⟩`, with
/// `local_ops` listed in application order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphForm {
    pub tableau: StabilizerTableau,
    pub local_ops: Vec<Gate>,
    /// Row i of the graph-form tableau is the product of input rows j with `combination[i][j] = 1`.
    pub combination: BitMatrix,
    /// Qubits that received a Hadamard (non-pivot columns of the X block).
    pub hadamards: Vec<usize>,
    /// Qubits whose Y on the diagonal was cleared with a phase gate.
    pub phases: Vec<usize>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StabilizerTableau {
    n: usize,
    rows: Vec<PauliOperator>,
}

#[derive(Serialize, Deserialize)]
struct TableauJson {
    n: usize,
    rows: Vec<String>,
}

impl StabilizerTableau {
    /// Wraps rows without checking the stabilizer invariants (see [`validate`](Self::validate)).
    pub fn from_rows_unchecked(rows: Vec<PauliOperator>) -> Self {
        let n = rows.first().map_or(0, |r| r.n());
        StabilizerTableau { n, rows }
    }

    /// Builds a tableau and checks every invariant.
    pub fn new(rows: Vec<PauliOperator>) -> Result<Self, TableauError> {
        let t = Self::from_rows_unchecked(rows);
        t.validate().map_err(TableauError::Invalid)?;
        Ok(t)
    }

    pub fn parse_strs(rows: &[&str]) -> Result<Self, TableauError> {
        let ops = rows.iter().map(|s| PauliOperator::parse(s)).collect::<Result<Vec<_>, _>>()?;
        Self::new(ops)
    }

    /// Text format: one signed Pauli string per line, `#` starts a comment.
    pub fn parse_text(text: &str) -> Result<Self, TableauError> {
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if !line.starts_with('+') && !line.starts_with('-') {
                return Err(TableauError::MissingSign { line: i + 1 });
            }
            let p = PauliOperator::parse(line).map_err(|source| TableauError::Parse { line: i + 1, source })?;
            rows.push(p);
        }
        Self::new(rows)
    }

    pub fn to_text(&self) -> String {
        self.rows.iter().map(|r| format!("{r}\n")).collect()
    }

    pub fn from_json(text: &str) -> Result<Self, TableauError> {
        let j: TableauJson = serde_json::from_str(text).map_err(|e| TableauError::Json(e.to_string()))?;
        let rows = j.rows.iter().map(|s| PauliOperator::parse(s)).collect::<Result<Vec<_>, _>>()?;
        let t = Self::new(rows)?;
        if t.n != j.n {
            return Err(TableauError::Invalid(Violation::RowCount { rows: t.rows.len(), n: j.n }));
        }
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        let j = TableauJson { n: self.n, rows: self.rows.iter().map(|r| r.to_string()).collect() };
        serde_json::to_string_pretty(&j).expect("serializable")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[PauliOperator] {
        &self.rows
    }

    pub fn row(&self, j: usize) -> &PauliOperator {
        &self.rows[j]
    }

    /// The n×2n generator matrix `G = (X | Z)`.
    pub fn generator_matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(2 * self.n, self.rows.iter().map(|r| r.r()).collect())
    }

    pub fn x_block(&self) -> BitMatrix {
        BitMatrix::from_rows(self.n, self.rows.iter().map(|r| r.x().clone()).collect())
    }

    pub fn z_block(&self) -> BitMatrix {
        BitMatrix::from_rows(self.n, self.rows.iter().map(|r| r.z().clone()).collect())
    }

    /// Sign bits: 1 where the row carries −1.
    pub fn signs(&self) -> BitVec {
        BitVec::from_bools(&self.rows.iter().map(|r| r.is_negative()).collect::<Vec<_>>())
    }

    pub fn validate(&self) -> Result<(), Violation> {
        if self.rows.len() != self.n {
            return Err(Violation::RowCount { rows: self.rows.len(), n: self.n });
        }
        for (i, r) in self.rows.iter().enumerate() {
            if r.n() != self.n {
                return Err(Violation::Width { row: i, width: r.n(), n: self.n });
            }
            if !r.is_hermitian() {
                return Err(Violation::NonHermitian { row: i });
            }
        }
        for a in 0..self.n {
            for b in a + 1..self.n {
                if !self.rows[a].commutes_unchecked(&self.rows[b]) {
                    return Err(Violation::Anticommute { a, b });
                }
            }
        }
        let rank = self.generator_matrix().rank();
        if rank < self.n {
            return Err(Violation::Rank { rank, n: self.n });
        }
        Ok(())
    }

    /// Phase exponent e (mod 4) of `g₁^{a₁}⋯g_n^{a_n} = i^e · i^{x'·z'} X^{x'} Z^{z'}`.
    ///
    /// `e = Σ a_j (s_j + T_jj) + 2 Σ_{j<k} a_j a_k T_kj − |x' ∧ z'|` with `T = G₁ G₂ᵀ`
    /// taken over the integers.
    pub fn element_phase(&self, a: &BitVec) -> u8 {
        assert_eq!(a.len(), self.rows.len());
        let idx: Vec<usize> = a.ones_iter().collect();
        let mut e = 0usize;
        let mut x = BitVec::zeros(self.n);
        let mut z = BitVec::zeros(self.n);
        for (pos, &j) in idx.iter().enumerate() {
            let g = &self.rows[j];
            e += g.phase() as usize + g.x().and_count(g.z());
            for &k in &idx[pos + 1..] {
                e += 2 * (g.z().and_count(self.rows[k].x()) % 2);
            }
            x.xor_assign(g.x());
            z.xor_assign(g.z());
        }
        e += 4 - x.and_count(&z) % 4;
        (e % 4) as u8
    }

    /// Sign ±1 of the stabilizer element selected by `a`.
    pub fn element_sign(&self, a: &BitVec) -> i8 {
        match self.element_phase(a) {
            0 => 1,
            2 => -1,
            p => panic!("odd phase {p}: rows do not commute"),
        }
    }

    /// The stabilizer element selected by `a`, with its sign.
    pub fn element(&self, a: &BitVec) -> PauliOperator {
        let mut x = BitVec::zeros(self.n);
        let mut z = BitVec::zeros(self.n);
        for j in a.ones_iter() {
            x.xor_assign(self.rows[j].x());
            z.xor_assign(self.rows[j].z());
        }
        PauliOperator::new(self.element_phase(a), x, z)
    }

    /// Dual generators `H` with `G Λ Hᵀ = I` and `H Λ Hᵀ = 0`, as Pauli operators.
    pub fn dual_generators(&self) -> Vec<PauliOperator> {
        let n = self.n;
        let g = self.generator_matrix();
        let gl = g.mul(&BitMatrix::lambda(n));
        let rr = gl.rref();
        let t = rr.transform();
        let mut hs: Vec<BitVec> = (0..n)
            .map(|j| {
                let rhs = t.mul_vec(&BitVec::unit(n, j));
                let mut h = BitVec::zeros(2 * n);
                for (i, &c) in rr.pivot_cols.iter().enumerate() {
                    h.set(c, rhs.get(i));
                }
                h
            })
            .collect();
        // Symplectic Gram-Schmidt: adding g_j to h_k fixes the (h_j, h_k) pairing only.
        for k in 0..n {
            for j in 0..k {
                if symplectic(&hs[j], &hs[k], n) {
                    let gj = g.row(j).clone();
                    hs[k].xor_assign(&gj);
                }
            }
        }
        hs.iter().map(|h| PauliOperator::from_r(h, false)).collect()
    }

    /// Binary decomposition `a` with `r(g) = Σ a_j r(g_j)`, or `None` when ±g is not in the group.
    pub fn decompose_element(&self, g: &PauliOperator) -> Result<Option<BitVec>, TableauError> {
        if !g.is_hermitian() {
            return Err(TableauError::NonHermitianOperator(g.to_string()));
        }
        if g.n() != self.n {
            return Err(PauliError::Dimension(self.n, g.n()).into());
        }
        if self.rows.iter().any(|r| !r.commutes_unchecked(g)) {
            return Ok(None);
        }
        let duals = self.dual_generators();
        let a = BitVec::from_bools(&duals.iter().map(|h| !g.commutes_unchecked(h)).collect::<Vec<_>>());
        let e = self.element(&a);
        if e.x() != g.x() || e.z() != g.z() {
            return Ok(None);
        }
        Ok(Some(a))
    }

    /// Whether the state is a `+1` eigenstate of g (Some(true)), `−1` (Some(false)), or neither.
    pub fn stabilizes(&self, g: &PauliOperator) -> Result<Option<bool>, TableauError> {
        Ok(self.decompose_element(g)?.map(|a| self.element(&a).phase() == g.phase()))
    }

    /// Whether both tableaus describe the same state.
    pub fn same_state(&self, other: &Self) -> bool {
        self.n == other.n
            && other.rows.iter().all(|r| matches!(self.stabilizes(r), Ok(Some(true))))
    }

    pub fn conjugate(&self, gate: Gate) -> Result<Self, TableauError> {
        let rows = self.rows.iter().map(|r| r.conjugate(gate)).collect::<Result<Vec<_>, _>>()?;
        Ok(StabilizerTableau { n: self.n, rows })
    }

    pub fn conjugate_all(&self, gates: &[Gate]) -> Result<Self, TableauError> {
        gates.iter().try_fold(self.clone(), |t, &g| t.conjugate(g))
    }

    /// Measures Hermitian `M` (sign +1).
    pub fn measure(&self, m_op: &PauliOperator, source: Outcome) -> Result<MeasureResult<Self>, TableauError> {
        if !m_op.is_hermitian() {
            return Err(TableauError::NonHermitianOperator(m_op.to_string()));
        }
        if m_op.is_negative() {
            return Err(TableauError::NegativeOperator(m_op.to_string()));
        }
        if m_op.n() != self.n {
            return Err(PauliError::Dimension(self.n, m_op.n()).into());
        }
        let anti: Vec<usize> = (0..self.n).filter(|&j| !self.rows[j].commutes_unchecked(m_op)).collect();
        match anti.split_first() {
            None => {
                let a = self.decompose_element(m_op)?.expect("commuting operator is a stabilizer element");
                Ok(MeasureResult {
                    outcome: self.element_sign(&a) < 0,
                    probability: Probability::One,
                    state: self.clone(),
                })
            }
            Some((&p, others)) => {
                let outcome = source.draw();
                let mut rows = self.rows.clone();
                for &q in others {
                    rows[q] = rows[q].mul_unchecked(&self.rows[p]);
                }
                rows[p] = if outcome { m_op.negate() } else { m_op.clone() };
                Ok(MeasureResult {
                    outcome,
                    probability: Probability::Half,
                    state: StabilizerTableau { n: self.n, rows },
                })
            }
        }
    }

    /// Rows rewritten as the products selected by the rows of `a`, signs via [`element`](Self::element).
    pub fn recombine(&self, a: &BitMatrix) -> Self {
        let rows = (0..a.rows()).map(|i| self.element(a.row(i))).collect();
        StabilizerTableau { n: self.n, rows }
    }

    /// Converts to `(I | B)` with B symmetric and hollow on the diagonal.
    pub fn to_graph_form(&self) -> Result<GraphForm, TableauError> {
        self.validate().map_err(TableauError::Invalid)?;
        let n = self.n;
        let pivots = self.x_block().rref().pivot_cols;
        let hadamards: Vec<usize> = (0..n).filter(|q| !pivots.contains(q)).collect();
        let rotated = self.conjugate_all(&hadamards.iter().map(|&q| Gate::H(q)).collect::<Vec<_>>())?;
        let combination = rotated.x_block().inverse().expect("X block has full rank after Hadamards");
        let combined = rotated.recombine(&combination);
        let phases: Vec<usize> = (0..n).filter(|&j| combined.rows[j].z().get(j)).collect();
        let tableau = combined.conjugate_all(&phases.iter().map(|&q| Gate::Sdg(q)).collect::<Vec<_>>())?;
        let local_ops = phases.iter().map(|&q| Gate::S(q)).chain(hadamards.iter().map(|&q| Gate::H(q))).collect();
        Ok(GraphForm { tableau, local_ops, combination, hadamards, phases })
    }

    /// Graph-state tableau with rows `X_j Π_{k∈N(j)} Z_k`.
    pub fn graph_state(adj: &BitMatrix) -> Self {
        let n = adj.rows();
        let rows = (0..n)
            .map(|j| {
                let mut p = PauliOperator::single(n, j, Letter::X);
                let mut z = adj.row(j).clone();
                z.set(j, false);
                p = PauliOperator::new(0, p.x().clone(), z);
                p
            })
            .collect();
        StabilizerTableau { n, rows }
    }

    /// `|0…0⟩`.
    pub fn zero_state(n: usize) -> Self {
        StabilizerTableau { n, rows: (0..n).map(|j| PauliOperator::single(n, j, Letter::Z)).collect() }
    }
}

fn symplectic(a: &BitVec, b: &BitVec, n: usize) -> bool {
    (a.slice(0, n).and_count(&b.slice(n, 2 * n)) + a.slice(n, 2 * n).and_count(&b.slice(0, n))) % 2 == 1
}

impl fmt::Display for StabilizerTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rows.iter().map(|r| r.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl fmt::Debug for StabilizerTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(rows: &[&str]) -> StabilizerTableau {
        StabilizerTableau::parse_strs(rows).unwrap()
    }

    fn p(s: &str) -> PauliOperator {
        PauliOperator::parse(s).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(t(&["-XX", "+ZZ"]).validate().is_ok());
        let dup = StabilizerTableau::from_rows_unchecked(vec![p("XX"), p("XX")]);
        assert!(matches!(dup.validate(), Err(Violation::Rank { rank: 1, n: 2 })));
        let anti = StabilizerTableau::from_rows_unchecked(vec![p("XI"), p("ZI")]);
        assert_eq!(anti.validate(), Err(Violation::Anticommute { a: 0, b: 1 }));
    }

    #[test]
    fn element_sign_examples() {
        let yy = t(&["+YY", "+ZZ"]);
        assert_eq!(yy.element_sign(&BitVec::from_mask(2, 0b11)), -1);
        assert_eq!(yy.element(&BitVec::from_mask(2, 0b11)), p("-XX"));
        assert_eq!(yy.element_sign(&BitVec::zeros(2)), 1);
    }

    #[test]
    fn duals_and_decomposition() {
        let bell = t(&["-XX", "+ZZ"]);
        let h = bell.dual_generators();
        for (i, g) in bell.rows().iter().enumerate() {
            for (j, d) in h.iter().enumerate() {
                assert_eq!(!g.commutes_unchecked(d), i == j);
            }
        }
        for a in &h {
            for b in &h {
                assert!(a.commutes_unchecked(b));
            }
        }
        let a = bell.decompose_element(&p("YY")).unwrap().unwrap();
        assert_eq!(a.to_mask(), 0b11);
        assert_eq!(bell.decompose_element(&p("-XX")).unwrap().unwrap().to_mask(), 0b01);
        assert_eq!(bell.decompose_element(&p("XI")).unwrap(), None);
    }

    #[test]
    fn graph_form_examples() {
        let bell = t(&["-XX", "+ZZ"]);
        let gf = bell.to_graph_form().unwrap();
        assert_eq!(gf.local_ops, vec![Gate::H(1)]);
        let g = gf.tableau;
        assert_eq!(g.x_block(), BitMatrix::identity(2));
        assert_eq!(g.z_block(), BitMatrix::from_strs(&["01", "10"]));

        let graph = t(&["+XZ", "+ZX"]);
        let gf = graph.to_graph_form().unwrap();
        assert!(gf.local_ops.is_empty());
        assert_eq!(gf.tableau, graph);

        let yy = t(&["+YY", "+ZZ"]);
        let gf = yy.to_graph_form().unwrap();
        assert_eq!(gf.combination.row(0).to_mask(), 0b11);
        assert!(bell.same_state(&yy));
    }

    #[test]
    fn measure_examples() {
        let bell = t(&["-XX", "+ZZ"]);
        let r = bell.measure(&p("ZZ"), Outcome::Seeded(1)).unwrap();
        assert_eq!((r.outcome, r.probability), (false, Probability::One));
        assert_eq!(r.state, bell);
        let r = bell.measure(&p("ZI"), Outcome::Forced(false)).unwrap();
        assert_eq!(r.probability, Probability::Half);
        assert_eq!(r.state, t(&["+ZI", "+ZZ"]));
        let r = bell.measure(&p("II"), Outcome::Forced(true)).unwrap();
        assert_eq!((r.outcome, r.probability), (false, Probability::One));
        assert!(bell.measure(&p("-ZZ"), Outcome::Seeded(0)).is_err());
        assert!(bell.measure(&p("+iZZ"), Outcome::Seeded(0)).is_err());
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(t(&["+X"]).conjugate(Gate::H(0)).unwrap(), t(&["+Z"]));
        assert_eq!(t(&["+Y"]).conjugate(Gate::S(0)).unwrap(), t(&["-X"]));
        assert_eq!(t(&["+XI", "+IX"]).conjugate(Gate::Cz(0, 1)).unwrap(), t(&["+XZ", "+ZX"]));
        assert!(t(&["+X"]).conjugate(Gate::H(3)).is_err());
    }

    #[test]
    fn text_and_json_round_trip() {
        let bell = t(&["-XX", "+ZZ"]);
        assert_eq!(StabilizerTableau::parse_text(&bell.to_text()).unwrap(), bell);
        assert_eq!(StabilizerTableau::from_json(&bell.to_json()).unwrap(), bell);
        assert!(matches!(
            StabilizerTableau::parse_text("# c\nXX\n+ZZ"),
            Err(TableauError::MissingSign { line: 2 })
        ));
    }
}
