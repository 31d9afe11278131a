//! Communication-assisted LHV models on graph states.
//!
//! All models use the table with `v = c = 0`: `z = r`, `x = rΓ`, `y = x + z`, which
//! assigns `+1` to every definite measurement. Submeasurements are bit masks `e`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{BitMatrix, BitVec};
use crate::graph::{GraphError, StabGraph};
use crate::pauli::{Letter, PauliError, PauliOperator};
use crate::tableau::{StabilizerTableau, TableauError};

/// Graphs are handled as u64 row masks.
pub const MAX_NODES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CommError {
    #[error("expected {expected} sites, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("{0} nodes exceeds the limit of {MAX_NODES}")]
    TooLarge(usize),
    #[error("adjacency matrix must be symmetric with an empty diagonal")]
    NotAdjacency,
    #[error("submeasurement {0} is random")]
    Random(String),
    #[error("the chain model needs a path graph 0-1-…-(n-1)")]
    NotChain,
    #[error("ring parameter f must be odd and at least 1, got {0}")]
    RingParameter(usize),
    #[error("unknown counterexample case {0:?}")]
    UnknownCase(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("bad assignment JSON: {0}")]
    Json(String),
}

/// Per-site measurement choices and the submeasurement mask `e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub letters: Vec<Letter>,
    pub mask: BitVec,
}

#[derive(Serialize, Deserialize)]
struct AssignmentJson {
    graph: serde_json::Value,
    measurement: String,
    #[serde(default)]
    mask: Option<Vec<u8>>,
}

impl Assignment {
    /// Global measurement (all-ones mask).
    pub fn global(letters: Vec<Letter>) -> Self {
        let n = letters.len();
        Assignment { letters, mask: BitVec::ones(n) }
    }

    pub fn with_mask(letters: Vec<Letter>, mask: BitVec) -> Result<Self, CommError> {
        if mask.len() != letters.len() {
            return Err(CommError::Dimension { expected: letters.len(), got: mask.len() });
        }
        Ok(Assignment { letters, mask })
    }

    /// Parses letters such as `"YYYIYI"`; sign prefixes are ignored.
    pub fn parse(letters: &str) -> Result<Self, CommError> {
        let p = PauliOperator::parse(letters)?;
        Ok(Self::global(p.letters()))
    }

    pub fn n(&self) -> usize {
        self.letters.len()
    }

    /// The Pauli product actually multiplied: letters outside the mask become `I`.
    pub fn submeasurement(&self) -> PauliOperator {
        let letters: Vec<Letter> =
            self.letters.iter().enumerate().map(|(j, &l)| if self.mask.get(j) { l } else { Letter::I }).collect();
        PauliOperator::from_letters(&letters)
    }

    fn letter_string(&self) -> String {
        self.letters.iter().map(|l| l.as_char()).collect()
    }

    pub fn to_json(&self, graph: &StabGraph) -> String {
        let j = AssignmentJson {
            graph: serde_json::from_str(&graph.to_json()).expect("graph JSON"),
            measurement: self.letter_string(),
            mask: Some(self.mask.iter().map(u8::from).collect()),
        };
        serde_json::to_string_pretty(&j).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<(StabGraph, Self), CommError> {
        let j: AssignmentJson = serde_json::from_str(text).map_err(|e| CommError::Json(e.to_string()))?;
        let graph = StabGraph::from_json(&j.graph.to_string())?;
        let mut a = Self::parse(&j.measurement)?;
        if let Some(mask) = j.mask {
            a = Self::with_mask(a.letters, BitVec::from_bools(&mask.iter().map(|&b| b != 0).collect::<Vec<_>>()))?;
        }
        if a.n() != graph.n() {
            return Err(CommError::Dimension { expected: graph.n(), got: a.n() });
        }
        Ok((graph, a))
    }
}

impl fmt::Display for Assignment {
    /// Letters outside the mask are printed in lowercase.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, l) in self.letters.iter().enumerate() {
            let c = l.as_char();
            let c = if self.mask.get(j) || *l == Letter::I { c } else { c.to_ascii_lowercase() };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Definiteness {
    Definite,
    Random,
}

/// Flip rule of the nearest-neighbour model.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NnVariant {
    /// X and Y flip when `t ≡ 2, 3 (mod 4)`.
    #[default]
    Standard,
    /// X flips when `t ≡ 1, 2`, Y when `t ≡ 0, 3 (mod 4)`.
    Alternative,
}

/// Outputs of one model execution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelRun {
    /// `±1` per site; `+1` for sites measuring `I`.
    pub outputs: Vec<i8>,
    /// Bits `b_j = [M_j ∈ {X, Y}]`.
    pub b: Vec<u8>,
    /// Neighbour tallies `t_j = Σ_k Γ_jk b_k`.
    pub t: Vec<usize>,
    /// Sites that negated their table entry.
    pub flips: Vec<u8>,
    pub bits_sent: usize,
}

impl ModelRun {
    /// Product of outputs over the sites selected by `e`.
    pub fn product(&self, e: &BitVec) -> i8 {
        e.ones_iter().map(|j| self.outputs[j]).product()
    }
}

#[derive(Clone, Debug)]
struct Masks {
    n: usize,
    adj: Vec<u64>,
}

impl Masks {
    fn new(gamma: &BitMatrix) -> Result<Self, CommError> {
        let n = gamma.rows();
        if n > MAX_NODES {
            return Err(CommError::TooLarge(n));
        }
        if gamma.cols() != n || !gamma.is_symmetric() || (0..n).any(|j| gamma.get(j, j)) {
            return Err(CommError::NotAdjacency);
        }
        Ok(Masks { n, adj: (0..n).map(|j| gamma.row(j).to_mask()).collect() })
    }

    fn tally(&self, j: usize, b: u64) -> usize {
        (self.adj[j] & b).count_ones() as usize
    }

    fn is_definite(&self, xm: u64, zm: u64, e: u64) -> bool {
        let be = xm & e;
        (0..self.n).all(|j| ((zm & e) >> j & 1 == 1) == (self.tally(j, be) % 2 == 1))
    }

    /// Exponent of i in the quantum sign of a definite submeasurement.
    fn qm_exponent(&self, xm: u64, e: u64) -> usize {
        let be = xm & e;
        ones(be).map(|j| self.tally(j, be) & !1).sum()
    }

    /// Exponent of i in the nearest-neighbour prediction (tallies use all of b).
    fn nn_exponent(&self, xm: u64, e: u64) -> usize {
        ones(xm & e).map(|j| self.tally(j, xm) & !1).sum()
    }

    /// Equation rows of `Γ̃ e = 0` restricted to the measured sites.
    fn definite_equations(&self, xm: u64, zm: u64) -> Vec<u64> {
        let support = xm | zm;
        (0..self.n).map(|j| ((self.adj[j] & xm) ^ (zm & 1 << j)) & support).collect()
    }

    /// Basis of the definite submeasurements (supported on measured sites), row-reduced so each
    /// vector owns its lowest site; returns `(basis, owner sites)`.
    fn definite_basis(&self, xm: u64, zm: u64) -> (Vec<u64>, Vec<usize>) {
        let (eqs, pivots) = rref_masks(self.definite_equations(xm, zm));
        let support = xm | zm;
        let pivot_set: u64 = pivots.iter().map(|&p| 1u64 << p).sum();
        let basis: Vec<u64> = ones(support & !pivot_set)
            .map(|f| {
                let mut v = 1u64 << f;
                for (row, &p) in eqs.iter().zip(&pivots) {
                    if row >> f & 1 == 1 {
                        v |= 1 << p;
                    }
                }
                v
            })
            .collect();
        rref_masks(basis)
    }
}

fn ones(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&j| mask >> j & 1 == 1)
}

fn sign_of(exponent: usize) -> i8 {
    if exponent.is_multiple_of(4) {
        1
    } else {
        -1
    }
}

/// Reduced row echelon form over u64 rows, pivot = lowest set bit; rows sorted by pivot.
fn rref_masks(rows: Vec<u64>) -> (Vec<u64>, Vec<usize>) {
    let mut out: Vec<u64> = Vec::new();
    let mut piv: Vec<usize> = Vec::new();
    for mut r in rows {
        for (o, &p) in out.iter().zip(&piv) {
            if r >> p & 1 == 1 {
                r ^= o;
            }
        }
        if r == 0 {
            continue;
        }
        let p = r.trailing_zeros() as usize;
        for o in out.iter_mut() {
            if *o >> p & 1 == 1 {
                *o ^= r;
            }
        }
        out.push(r);
        piv.push(p);
    }
    let mut pairs: Vec<(usize, u64)> = piv.into_iter().zip(out).collect();
    pairs.sort_unstable();
    pairs.into_iter().map(|(p, r)| (r, p)).unzip()
}

/// Every vector in the span of `basis`, in Gray-code order starting from 0.
fn span(basis: &[u64]) -> impl Iterator<Item = u64> + '_ {
    let mut cur = 0u64;
    (0u64..1 << basis.len()).map(move |i| {
        if i > 0 {
            cur ^= basis[i.trailing_zeros() as usize];
        }
        cur
    })
}

fn letter_masks(letters: &[Letter]) -> (u64, u64) {
    letters.iter().enumerate().fold((0, 0), |(x, z), (j, l)| {
        let (bx, bz) = l.bits();
        (x | (bx as u64) << j, z | (bz as u64) << j)
    })
}

fn check_len(m: &Masks, n: usize) -> Result<(), CommError> {
    if m.n != n {
        return Err(CommError::Dimension { expected: m.n, got: n });
    }
    Ok(())
}

fn prepared(gamma: &BitMatrix, a: &Assignment) -> Result<(Masks, u64, u64, u64), CommError> {
    let m = Masks::new(gamma)?;
    check_len(&m, a.n())?;
    let (xm, zm) = letter_masks(&a.letters);
    Ok((m, xm, zm, a.mask.to_mask() & (xm | zm)))
}

/// Definite iff `[r₂(M)]_j e_j ≡ Σ_k Γ_jk [r₁(M)]_k e_k (mod 2)` for all j.
pub fn classify_submeasurement(gamma: &BitMatrix, a: &Assignment) -> Result<Definiteness, CommError> {
    let (m, xm, zm, e) = prepared(gamma, a)?;
    Ok(if m.is_definite(xm, zm, e) { Definiteness::Definite } else { Definiteness::Random })
}

/// Quantum outcome `i^{Σ_j b_j e_j (t_j^{(e)} − t̄_j^{(e)})}` of a definite submeasurement.
pub fn qm_sub_sign(gamma: &BitMatrix, a: &Assignment) -> Result<i8, CommError> {
    let (m, xm, zm, e) = prepared(gamma, a)?;
    if !m.is_definite(xm, zm, e) {
        return Err(CommError::Random(a.to_string()));
    }
    Ok(sign_of(m.qm_exponent(xm, e)))
}

/// Nearest-neighbour model prediction `i^{Σ_j b_j e_j (t_j − t̄_j)}` for a definite submeasurement.
pub fn nn_sub_prediction(gamma: &BitMatrix, a: &Assignment) -> Result<i8, CommError> {
    let (m, xm, zm, e) = prepared(gamma, a)?;
    if !m.is_definite(xm, zm, e) {
        return Err(CommError::Random(a.to_string()));
    }
    Ok(sign_of(m.nn_exponent(xm, e)))
}

/// All definite submeasurement masks of a global measurement (supported on its measured sites).
pub fn definite_submeasurements(gamma: &BitMatrix, letters: &[Letter]) -> Result<Vec<BitVec>, CommError> {
    let m = Masks::new(gamma)?;
    check_len(&m, letters.len())?;
    let (xm, zm) = letter_masks(letters);
    let (basis, _) = m.definite_basis(xm, zm);
    Ok(span(&basis).map(|e| BitVec::from_mask(m.n, e)).collect())
}

/// Table entries (as exponent bits) of the `v = c = 0` table for dual values `r`.
fn table_bit(m: &Masks, r: u64, j: usize, l: Letter) -> bool {
    let z = r >> j & 1 == 1;
    let x = m.tally(j, r) % 2 == 1;
    match l {
        Letter::I => false,
        Letter::X => x,
        Letter::Z => z,
        Letter::Y => x ^ z,
    }
}

fn build_run(m: &Masks, letters: &[Letter], r: u64, flips: u64, bits_sent: usize) -> ModelRun {
    let (xm, _) = letter_masks(letters);
    let outputs = (0..m.n)
        .map(|j| {
            let neg = table_bit(m, r, j, letters[j]) ^ (flips >> j & 1 == 1);
            if neg {
                -1
            } else {
                1
            }
        })
        .collect();
    ModelRun {
        outputs,
        b: (0..m.n).map(|j| (xm >> j & 1) as u8).collect(),
        t: (0..m.n).map(|j| m.tally(j, xm)).collect(),
        flips: (0..m.n).map(|j| (flips >> j & 1) as u8).collect(),
        bits_sent,
    }
}

fn run_inputs(gamma: &BitMatrix, letters: &[Letter], r: &BitVec) -> Result<(Masks, u64), CommError> {
    let m = Masks::new(gamma)?;
    check_len(&m, letters.len())?;
    check_len(&m, r.len())?;
    Ok((m, r.to_mask()))
}

/// Site-invariant nearest-neighbour model. Every site sends `b_j` to each neighbour.
pub fn nn_run(gamma: &BitMatrix, letters: &[Letter], r: &BitVec, variant: NnVariant) -> Result<ModelRun, CommError> {
    let (m, r) = run_inputs(gamma, letters, r)?;
    let (xm, _) = letter_masks(letters);
    let mut flips = 0u64;
    for (j, &letter) in letters.iter().enumerate() {
        let t = m.tally(j, xm) % 4;
        let flip = match (letter, variant) {
            (Letter::X | Letter::Y, NnVariant::Standard) => t >= 2,
            (Letter::X, NnVariant::Alternative) => t == 1 || t == 2,
            (Letter::Y, NnVariant::Alternative) => t == 0 || t == 3,
            _ => false,
        };
        if flip {
            flips |= 1 << j;
        }
    }
    let edges: usize = m.adj.iter().map(|a| a.count_ones() as usize).sum();
    Ok(build_run(&m, letters, r, flips, edges))
}

fn is_path(m: &Masks) -> bool {
    (0..m.n).all(|j| {
        let mut want = 0u64;
        if j > 0 {
            want |= 1 << (j - 1);
        }
        if j + 1 < m.n {
            want |= 1 << (j + 1);
        }
        m.adj[j] == want
    })
}

/// Parser for sentences of a global measurement on a chain. Sites outside `0..n` act as
/// bracketing `Z`s.
struct SentenceParser<'a> {
    letters: &'a [Letter],
}

impl SentenceParser<'_> {
    fn at(&self, i: isize) -> Option<Letter> {
        if i < 0 || i as usize >= self.letters.len() {
            None
        } else {
            Some(self.letters[i as usize])
        }
    }

    /// Start of each word that can end at `q` (reading right to left).
    fn words_ending_at(&self, q: isize) -> Vec<isize> {
        match self.at(q) {
            Some(Letter::X) => vec![q],
            Some(Letter::Y) => {
                let mut a = q - 1;
                while self.at(a) == Some(Letter::X) {
                    a -= 1;
                }
                if self.at(a) == Some(Letter::Y) {
                    vec![a]
                } else {
                    vec![]
                }
            }
            _ => vec![],
        }
    }

    fn words_starting_at(&self, s: isize) -> Vec<isize> {
        match self.at(s) {
            Some(Letter::X) => vec![s],
            Some(Letter::Y) => {
                let mut a = s + 1;
                while self.at(a) == Some(Letter::X) {
                    a += 1;
                }
                if self.at(a) == Some(Letter::Y) {
                    vec![a]
                } else {
                    vec![]
                }
            }
            _ => vec![],
        }
    }

    /// Whether site `pos` can close a sentence on the left: a bracketing `Z`, or a singleton
    /// `I` preceded by a word that itself closes on the left.
    fn closes_left(&self, pos: isize) -> bool {
        match self.at(pos) {
            None => pos < 0,
            Some(Letter::Z) => true,
            Some(_) => self.words_ending_at(pos - 1).into_iter().any(|s| self.closes_left(s - 1)),
        }
    }

    fn closes_right(&self, pos: isize) -> bool {
        match self.at(pos) {
            None => pos >= self.letters.len() as isize,
            Some(Letter::Z) => true,
            Some(_) => self.words_starting_at(pos + 1).into_iter().any(|e| self.closes_right(e + 1)),
        }
    }

    /// Whether an `X` site is the middle of an odd `Y X…X Y` word inside some sentence.
    fn flips(&self, p: usize) -> bool {
        let p = p as isize;
        if self.at(p) != Some(Letter::X) {
            return false;
        }
        let (mut l, mut r) = (p, p);
        while self.at(l - 1) == Some(Letter::X) {
            l -= 1;
        }
        while self.at(r + 1) == Some(Letter::X) {
            r += 1;
        }
        let len = r - l + 1;
        len % 2 == 1
            && p == l + len / 2
            && self.at(l - 1) == Some(Letter::Y)
            && self.at(r + 1) == Some(Letter::Y)
            && self.closes_left(l - 2)
            && self.closes_right(r + 2)
    }
}

/// Site-invariant model for 1D chains: measuring sites broadcast their choice and an `X`
/// site flips iff it is the middle of an odd `Y X…X Y` word of a sentence.
pub fn chain_run(gamma: &BitMatrix, letters: &[Letter], r: &BitVec) -> Result<ModelRun, CommError> {
    let (m, r) = run_inputs(gamma, letters, r)?;
    if !is_path(&m) {
        return Err(CommError::NotChain);
    }
    let parser = SentenceParser { letters };
    let flips = (0..m.n).filter(|&p| parser.flips(p)).fold(0u64, |acc, p| acc | 1 << p);
    let broadcasters = letters.iter().filter(|&&l| l != Letter::I).count();
    Ok(build_run(&m, letters, r, flips, broadcasters * m.n.saturating_sub(1)))
}

/// Universal model: a coordinator collects all choices, row-reduces a basis of the definite
/// submeasurements and sends one bit to the owner site of every basis vector whose quantum
/// sign is −1.
pub fn universal_run(gamma: &BitMatrix, letters: &[Letter], r: &BitVec) -> Result<ModelRun, CommError> {
    let (m, r) = run_inputs(gamma, letters, r)?;
    let (xm, zm) = letter_masks(letters);
    let (basis, owners) = m.definite_basis(xm, zm);
    let flips = basis
        .iter()
        .zip(&owners)
        .filter(|(&e, _)| sign_of(m.qm_exponent(xm, e)) < 0)
        .fold(0u64, |acc, (_, &p)| acc | 1 << p);
    Ok(build_run(&m, letters, r, flips, m.n + flips.count_ones() as usize))
}

/// A definite submeasurement the nearest-neighbour model gets wrong.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubViolation {
    pub measurement: String,
    pub mask: Vec<u8>,
    pub quantum: i8,
    pub model: i8,
}

fn sweep_nn(m: &Masks, limit: usize) -> (usize, usize, Vec<SubViolation>) {
    let mut checked = 0;
    let mut violations = 0;
    let mut found = Vec::new();
    for code in 0u64..1 << (2 * m.n) {
        let (mut xm, mut zm) = (0u64, 0u64);
        for j in 0..m.n {
            let (bx, bz) = Letter::ALL[(code >> (2 * j) & 3) as usize].bits();
            xm |= (bx as u64) << j;
            zm |= (bz as u64) << j;
        }
        let (basis, _) = m.definite_basis(xm, zm);
        for e in span(&basis) {
            checked += 1;
            let q = sign_of(m.qm_exponent(xm, e));
            let p = sign_of(m.nn_exponent(xm, e));
            violations += usize::from(q != p);
            if q != p && found.len() < limit {
                let letters: String = (0..m.n).map(|j| Letter::from_bits(xm >> j & 1 == 1, zm >> j & 1 == 1).as_char()).collect();
                found.push(SubViolation {
                    measurement: letters,
                    mask: (0..m.n).map(|j| (e >> j & 1) as u8).collect(),
                    quantum: q,
                    model: p,
                });
            }
        }
    }
    (checked, violations, found)
}

/// Search utility: first definite submeasurement on which the nearest-neighbour model fails.
pub fn find_nn_violation(gamma: &BitMatrix) -> Result<Option<SubViolation>, CommError> {
    let m = Masks::new(gamma)?;
    Ok(sweep_nn(&m, 1).2.into_iter().next())
}

/// Graph families on which the nearest-neighbour model is claimed to be exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphFamily {
    /// `K_{p,q}`.
    CompleteBipartite { p: usize, q: usize },
    /// `K_n` with the edges of `K_b` on its last `b` nodes removed.
    SymmetricDifference { n: usize, b: usize },
    /// Top row 0-1-2, bottom row 3-4-5, rungs 0-3, 1-4, 2-5 (control case).
    Cluster2x3,
}

impl GraphFamily {
    pub fn graph(&self) -> StabGraph {
        match *self {
            GraphFamily::CompleteBipartite { p, q } => {
                let edges: Vec<_> = (0..p).flat_map(|a| (p..p + q).map(move |b| (a, b))).collect();
                StabGraph::from_edges(p + q, &edges)
            }
            GraphFamily::SymmetricDifference { n, b } => {
                let a = n - b.min(n);
                let edges: Vec<_> =
                    (0..n).flat_map(|j| (j + 1..n).map(move |k| (j, k))).filter(|&(j, _)| j < a).collect();
                StabGraph::from_edges(n, &edges)
            }
            GraphFamily::Cluster2x3 => cluster_2x3(),
        }
    }

    /// All members with at most `n_max` nodes (at least 2), excluding edgeless graphs.
    pub fn all_up_to(n_max: usize) -> Vec<GraphFamily> {
        let mut out = Vec::new();
        for n in 2..=n_max {
            for p in 1..=n / 2 {
                out.push(GraphFamily::CompleteBipartite { p, q: n - p });
            }
            for b in 0..n {
                out.push(GraphFamily::SymmetricDifference { n, b });
            }
        }
        out
    }
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphFamily::CompleteBipartite { p, q } => write!(f, "K{{{p},{q}}}"),
            GraphFamily::SymmetricDifference { n, b } => write!(f, "K{n} minus K{b}"),
            GraphFamily::Cluster2x3 => write!(f, "2x3 cluster"),
        }
    }
}

pub fn cluster_2x3() -> StabGraph {
    StabGraph::from_edges(6, &[(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub graph: String,
    pub nodes: usize,
    /// Definite (M, e) pairs compared.
    pub checked: usize,
    pub violation_count: usize,
    /// The first 16 violations found.
    pub violations: Vec<SubViolation>,
}

/// Compares the nearest-neighbour prediction with quantum mechanics on every definite (M, e).
pub fn verify_class(family: &GraphFamily) -> Result<ClassReport, CommError> {
    let g = family.graph();
    let m = Masks::new(g.adjacency())?;
    let (checked, violation_count, violations) = sweep_nn(&m, 16);
    Ok(ClassReport { graph: family.to_string(), nodes: g.n(), checked, violation_count, violations })
}

/// Counterexamples to restricted communication models.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Counterexample {
    /// Three-qubit GHZ, no communication.
    Ghz,
    /// Site invariance on the 2×3 cluster.
    Cluster2x3,
    /// Nearest-neighbour models on an 11-qubit chain.
    Chain11,
    /// Distance `2f − 1` models on a `12f` ring.
    Ring(usize),
}

impl FromStr for Counterexample {
    type Err = CommError;

    /// Accepts `ghz`, `cluster2x3`, `chain11`, `ring`, `ring:F` or `ring(F)`.
    fn from_str(s: &str) -> Result<Self, CommError> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "ghz" => return Ok(Counterexample::Ghz),
            "cluster2x3" => return Ok(Counterexample::Cluster2x3),
            "chain11" => return Ok(Counterexample::Chain11),
            "ring" => return Ok(Counterexample::Ring(1)),
            _ => {}
        }
        let arg = t
            .strip_prefix("ring:")
            .or_else(|| t.strip_prefix("ring(").and_then(|r| r.strip_suffix(')')))
            .ok_or_else(|| CommError::UnknownCase(s.to_string()))?;
        arg.parse().map(Counterexample::Ring).map_err(|_| CommError::UnknownCase(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Contradiction,
    NoContradiction,
}

/// One constraint `Π variables = rhs` imposed by a definite submeasurement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Constraint {
    /// Global measurement, lowercase where excluded from the submeasurement.
    pub measurement: String,
    pub variables: Vec<String>,
    pub rhs: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounterexampleReport {
    pub case: String,
    pub verdict: Verdict,
    pub constraints: Vec<Constraint>,
    /// Product of all right-hand sides.
    pub product: i8,
    /// Variables that do not cancel in the product (empty for a contradiction).
    pub unpaired: Vec<String>,
    /// For the site-invariance argument: pairs of submeasured sites forced to decide alike.
    pub pairs: Vec<(usize, usize)>,
    pub detail: String,
}

impl CounterexampleReport {
    pub fn summary(&self) -> String {
        match (self.verdict, self.pairs.is_empty()) {
            (Verdict::Contradiction, true) => {
                format!("CONTRADICTION: {} constraints, product = {}", self.constraints.len(), self.product)
            }
            (Verdict::Contradiction, false) => format!("CONTRADICTION: {}", self.detail),
            (Verdict::NoContradiction, _) => format!("NO CONTRADICTION: {}", self.detail),
        }
    }
}

/// Sites within `d` edges of each node (excluding itself), sorted.
fn balls(g: &StabGraph, d: usize) -> Vec<Vec<usize>> {
    (0..g.n())
        .map(|s| {
            let mut dist = vec![usize::MAX; g.n()];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                if dist[u] == d {
                    continue;
                }
                for v in g.neighbors(u) {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            (0..g.n()).filter(|&v| v != s && dist[v] != usize::MAX).collect()
        })
        .collect()
}

/// Multiplies the constraints over formal ±1 variables `s_j^α`, where α is the global
/// measurement seen within each site's communication range.
fn parity_argument(
    case: &str,
    t: &StabilizerTableau,
    ranges: &[Vec<usize>],
    cases: &[Assignment],
) -> Result<CounterexampleReport, CommError> {
    let mut constraints = Vec::new();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut product = 1i8;
    for a in cases {
        let rhs = match t.stabilizes(&a.submeasurement())? {
            Some(true) => 1,
            Some(false) => -1,
            None => return Err(CommError::Random(a.to_string())),
        };
        let variables: Vec<String> = a
            .mask
            .ones_iter()
            .filter(|&j| a.letters[j] != Letter::I)
            .map(|j| {
                let context: String = ranges[j].iter().map(|&k| a.letters[k].as_char()).collect();
                let base = format!("{}{}", a.letters[j].as_char().to_ascii_lowercase(), j + 1);
                if context.is_empty() {
                    base
                } else {
                    format!("{base}^{context}")
                }
            })
            .collect();
        for v in &variables {
            *counts.entry(v.clone()).or_default() += 1;
        }
        product *= rhs;
        constraints.push(Constraint { measurement: a.to_string(), variables, rhs });
    }
    let unpaired: Vec<String> = counts.into_iter().filter(|(_, c)| c % 2 == 1).map(|(v, _)| v).collect();
    let verdict = if unpaired.is_empty() && product == -1 { Verdict::Contradiction } else { Verdict::NoContradiction };
    let detail = format!("{} constraints, product = {product}, {} unpaired variables", constraints.len(), unpaired.len());
    Ok(CounterexampleReport { case: case.into(), verdict, constraints, product, unpaired, pairs: vec![], detail })
}

/// Parses `ZXyXxXZIIII`-style rows: uppercase in the submeasurement, lowercase measured only.
fn marked(s: &str) -> Assignment {
    let letters: Vec<Letter> = s.chars().map(|c| Letter::from_char(c.to_ascii_uppercase()).expect("letter")).collect();
    let mask = BitVec::from_bools(&s.chars().map(|c| c.is_ascii_uppercase() && c != 'I').collect::<Vec<_>>());
    Assignment { letters, mask }
}

/// The 16 measurements on an 11-qubit chain refuting nearest-neighbour models (two rows repeat).
pub const CHAIN11_ROWS: [&str; 16] = [
    "ZXyXxXZIIII",
    "ZXyXyXZIIII",
    "IZYXXXYZIII",
    "IZXxXxXZIII",
    "IZYXYxYXYZI",
    "IZXxYXYZIII",
    "IIZXxXyXZII",
    "IIZXxXZIIII",
    "IIZXyXyXZII",
    "IIZXyXZIIII",
    "IIIZXxYXYZI",
    "IIIZXxXZIII",
    "IIIIZXyXyXZ",
    "IIIIZXyXZII",
    "IIIIZXyXyXZ",
    "IIIIZXyXZII",
];

/// The five global measurements and submeasurements on a `12f` ring (1-based labels).
pub fn ring_cases(f: usize) -> Result<Vec<Assignment>, CommError> {
    if f == 0 || f.is_multiple_of(2) {
        return Err(CommError::RingParameter(f));
    }
    let n = 12 * f;
    let set = |pred: &dyn Fn(usize) -> bool| -> BTreeSet<usize> { (1..=n).filter(|&j| pred(j)).collect() };
    let v = set(&|j| j % (4 * f) == 0);
    let mids = set(&|j| j % (4 * f) == 2 * f);
    let y = set(&|j| j % 2 == 1);
    let l = set(&|j| !v.contains(&j) && !mids.contains(&j) && j % 4 == 2);
    let r = set(&|j| !v.contains(&j) && !mids.contains(&j) && j % 4 == 0);
    let seg = |k: usize| set(&|j| 2 * f * (k - 1) < j && j < 2 * f * k);
    let segs = |a: usize, b: usize| -> BTreeSet<usize> { seg(a).union(&seg(b)).copied().collect() };
    let build = |vertex: [Letter; 3], sub: BTreeSet<usize>| -> Assignment {
        let letters = (1..=n)
            .map(|j| {
                if v.contains(&j) {
                    vertex[j / (4 * f) - 1]
                } else if y.contains(&j) {
                    Letter::Y
                } else {
                    Letter::X
                }
            })
            .collect();
        Assignment { letters, mask: BTreeSet::iter(&sub).fold(BitVec::zeros(n), |mut m, &j| {
            m.set(j - 1, true);
            m
        }) }
    };
    let vtx = |k: usize| 4 * f * k;
    let mid = |k: usize| 2 * f * (2 * k - 1);
    let union = |parts: Vec<&BTreeSet<usize>>, extra: &[usize]| -> BTreeSet<usize> {
        parts.into_iter().flatten().copied().chain(extra.iter().copied()).collect()
    };
    let diff = |a: &BTreeSet<usize>, b: &BTreeSet<usize>| -> BTreeSet<usize> { a.difference(b).copied().collect() };
    let inter = |a: &BTreeSet<usize>, b: &BTreeSet<usize>| -> BTreeSet<usize> { a.intersection(b).copied().collect() };
    use Letter::{X, Y};
    let all_even = union(vec![&l, &r], &[mid(1), vtx(1), mid(2), vtx(2), mid(3), vtx(3)]);
    let yyy = union(vec![&y, &l], &[mid(1), mid(2), mid(3)]);
    // Vertex pattern (4f, 8f, 12f), the two segments holding Y's, and the midpoint left out.
    let rotated = |pattern: [Letter; 3], a: usize, b: usize, skipped_mid: usize| {
        let s = segs(a, b);
        let mut extra: Vec<usize> = (1..=3).map(vtx).collect();
        extra.extend((1..=3).map(mid).filter(|&m| m != mid(skipped_mid)));
        build(pattern, union(vec![&inter(&y, &s), &r, &diff(&l, &s)], &extra))
    };
    Ok(vec![
        build([X, X, X], all_even),
        build([Y, Y, Y], yyy),
        rotated([Y, X, Y], 1, 2, 1),
        rotated([Y, Y, X], 3, 4, 2),
        rotated([X, Y, Y], 5, 6, 3),
    ])
}

/// Orbits of the automorphisms of `g` that preserve the measurement letters.
fn letter_orbits(g: &StabGraph, letters: &[Letter]) -> Vec<usize> {
    let n = g.n();
    let mut orbit: Vec<usize> = (0..n).collect();
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn extend(
        g: &StabGraph,
        letters: &[Letter],
        perm: &mut Vec<usize>,
        used: &mut [bool],
        orbit: &mut [usize],
    ) {
        let n = g.n();
        let j = perm.len();
        if j == n {
            for (a, &b) in perm.iter().enumerate() {
                let (ra, rb) = (root(orbit, a), root(orbit, b));
                orbit[ra.max(rb)] = ra.min(rb);
            }
            return;
        }
        for img in 0..n {
            if used[img] || letters[img] != letters[j] {
                continue;
            }
            if (0..j).any(|k| g.has_edge(j, k) != g.has_edge(img, perm[k])) {
                continue;
            }
            used[img] = true;
            perm.push(img);
            extend(g, letters, perm, used, orbit);
            perm.pop();
            used[img] = false;
        }
    }
    fn root(orbit: &[usize], mut a: usize) -> usize {
        while orbit[a] != a {
            a = orbit[a];
        }
        a
    }
    extend(g, letters, &mut perm, &mut used, &mut orbit);
    (0..n).map(|a| root(&orbit, a)).collect()
}

/// Site-invariance argument: if every automorphism orbit meets the submeasurement in an even
/// number of sites, any site-invariant model leaves the table's `+1` unchanged.
pub fn site_invariance_argument(g: &StabGraph, a: &Assignment) -> Result<CounterexampleReport, CommError> {
    let qm = qm_sub_sign(g.adjacency(), a)?;
    let orbits = letter_orbits(g, &a.letters);
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for j in a.mask.ones_iter().filter(|&j| a.letters[j] != Letter::I) {
        groups.entry(orbits[j]).or_default().push(j);
    }
    let even = groups.values().all(|v| v.len() % 2 == 0);
    let pairs: Vec<(usize, usize)> =
        groups.values().flat_map(|v| v.chunks(2).filter(|c| c.len() == 2).map(|c| (c[0] + 1, c[1] + 1))).collect();
    let verdict = if even && qm == -1 { Verdict::Contradiction } else { Verdict::NoContradiction };
    let pair_text: Vec<String> = pairs.iter().map(|(a, b)| format!("{a}/{b}")).collect();
    let detail = format!(
        "symmetric pairs {} force equal decisions, model product +1 vs quantum {qm:+}",
        pair_text.join(", ")
    );
    Ok(CounterexampleReport {
        case: "cluster2x3".into(),
        verdict,
        constraints: vec![],
        product: qm,
        unpaired: vec![],
        pairs,
        detail,
    })
}

pub fn verify_counterexample(case: Counterexample) -> Result<CounterexampleReport, CommError> {
    match case {
        Counterexample::Ghz => {
            let t = StabilizerTableau::parse_strs(&["+XXX", "+ZZI", "+IZZ"])?;
            let cases: Vec<Assignment> = ["XXX", "XYY", "YXY", "YYX"].iter().map(|s| marked(s)).collect();
            parity_argument("ghz", &t, &vec![vec![]; 3], &cases)
        }
        Counterexample::Cluster2x3 => {
            let a = Assignment::with_mask(vec![Letter::Y; 6], BitVec::from_bools(&[true, true, true, false, true, false]))?;
            site_invariance_argument(&cluster_2x3(), &a)
        }
        Counterexample::Chain11 => {
            let g = StabGraph::path(11);
            let cases: Vec<Assignment> = CHAIN11_ROWS.iter().map(|s| marked(s)).collect();
            parity_argument("chain11", &g.to_tableau(), &balls(&g, 1), &cases)
        }
        Counterexample::Ring(f) => {
            let cases = ring_cases(f)?;
            let g = StabGraph::ring(12 * f);
            parity_argument(&format!("ring({f})"), &g.to_tableau(), &balls(&g, 2 * f - 1), &cases)
        }
    }
}
