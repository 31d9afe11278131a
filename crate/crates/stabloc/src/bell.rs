//! Local-realism feasibility by exact linear programming, Bell inequalities and
//! generalized no-signaling (gbit) states.
//!
//! Correlation indices are setting tuples `(s₁, …, s_p)` with `s_i ∈ 0..=settings_i`,
//! where 0 is the identity. They are ordered lexicographically with party 0 most
//! significant, so the all-identity tuple has index 0.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lhv::correlation_range;
use crate::lp::{self, int, LpError, LpOutcome, Q};

/// Largest number of deterministic strategies an LP may enumerate.
pub const STRATEGY_CAP: u64 = 1 << 20;
/// Margin for re-checking rational certificates in floating point.
pub const FLOAT_MARGIN: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BellError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("{count} deterministic strategies exceed the cap of {cap}")]
    TooManyStrategies { count: u128, cap: u64 },
    #[error("malformed correlation vector: {0}")]
    Malformed(String),
    #[error("setting {setting} of party {party} appears an odd number of times")]
    OddObservable { party: usize, setting: usize },
    #[error("index mismatch: {0}")]
    Index(String),
    #[error("c[{j}][{k}] = {c} lies outside the correlation range of its marginals")]
    InvalidGpt { j: usize, k: usize, c: f64 },
    #[error("certificate violation {0} does not clear the floating-point margin")]
    Inconclusive(f64),
    #[error("bad input: {0}")]
    Parse(String),
}

fn tuple_count(parties: &[usize]) -> usize {
    parties.iter().map(|&s| s + 1).product()
}

/// All setting tuples in index order.
pub fn setting_tuples(parties: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &s in parties {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=s).map(move |v| {
                    let mut t = prefix.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

/// Index of a setting tuple.
pub fn tuple_index(parties: &[usize], tuple: &[usize]) -> Result<usize, BellError> {
    if tuple.len() != parties.len() {
        return Err(BellError::Index(format!("tuple {tuple:?} has wrong length for {} parties", parties.len())));
    }
    let mut idx = 0;
    for (&s, &v) in parties.iter().zip(tuple) {
        if v > s {
            return Err(BellError::Index(format!("setting {v} exceeds {s}")));
        }
        idx = idx * (s + 1) + v;
    }
    Ok(idx)
}

fn tuple_key(t: &[usize]) -> String {
    t.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_tuple(key: &str) -> Result<Vec<usize>, BellError> {
    key.split(',').map(|s| s.trim().parse().map_err(|_| BellError::Parse(format!("bad setting in {key:?}")))).collect()
}

/// Parses `p/q`, an integer or a decimal float (rounded to a multiple of 2⁻⁶⁴).
pub fn parse_value(s: &str) -> Result<Q, BellError> {
    let s = s.trim();
    let bad = || BellError::Parse(format!("bad value {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(p, q));
    }
    if let Ok(i) = s.parse::<BigInt>() {
        return Ok(Q::from_integer(i));
    }
    let f: f64 = s.parse().map_err(|_| bad())?;
    if !f.is_finite() {
        return Err(bad());
    }
    Ok(lp::from_f64(f))
}

fn format_value(v: &Q) -> String {
    if v.denom() <= &BigInt::from(1_000_000) {
        if v.is_integer() {
            v.numer().to_string()
        } else {
            format!("{}/{}", v.numer(), v.denom())
        }
    } else {
        format!("{}", lp::to_f64(v))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationVector {
    pub parties: Vec<usize>,
    pub values: Vec<Q>,
}

impl CorrelationVector {
    pub fn new(parties: Vec<usize>, values: Vec<Q>) -> Result<Self, BellError> {
        let expected = tuple_count(&parties);
        if values.len() != expected {
            return Err(BellError::Malformed(format!("{} values for {expected} indices", values.len())));
        }
        if !values[0].is_one() {
            return Err(BellError::Malformed("identity entry must be 1".into()));
        }
        if let Some(v) = values.iter().find(|v| v.abs() > Q::one()) {
            return Err(BellError::Malformed(format!("value {} outside [-1, 1]", format_value(v))));
        }
        Ok(CorrelationVector { parties, values })
    }

    pub fn from_f64(parties: Vec<usize>, values: &[f64]) -> Result<Self, BellError> {
        Self::new(parties, values.iter().map(|&v| lp::from_f64(v)).collect())
    }

    /// Two parties with zero marginals and the given correlator table `corr[j][k] = ⟨A_{j+1} B_{k+1}⟩`.
    pub fn two_party(corr: &[Vec<Q>]) -> Result<Self, BellError> {
        let ma = corr.len();
        let mb = corr.first().map_or(0, |r| r.len());
        let mut values = vec![Q::zero(); (ma + 1) * (mb + 1)];
        values[0] = Q::one();
        for (j, row) in corr.iter().enumerate() {
            if row.len() != mb {
                return Err(BellError::Malformed("ragged correlator table".into()));
            }
            for (k, v) in row.iter().enumerate() {
                values[(j + 1) * (mb + 1) + k + 1] = v.clone();
            }
        }
        Self::new(vec![ma, mb], values)
    }

    /// CHSH-optimal quantum correlations `(1,1,1,−1)/√2` with zero marginals.
    pub fn tsirelson() -> Self {
        let h = lp::from_f64(std::f64::consts::FRAC_1_SQRT_2);
        Self::two_party(&[vec![h.clone(), h.clone()], vec![h.clone(), -h]]).expect("valid")
    }

    /// PR-box correlations `(1,1,1,−1)` with zero marginals.
    pub fn pr_box() -> Self {
        Self::two_party(&[vec![int(1), int(1)], vec![int(1), int(-1)]]).expect("valid")
    }

    /// Correlations of a single deterministic strategy column.
    pub fn deterministic(parties: Vec<usize>, strategy: u64) -> Result<Self, BellError> {
        let m = strategy_matrix(&parties)?;
        let values = (0..m.rows()).map(|r| int(m.entry(r, strategy as usize) as i64)).collect();
        Self::new(parties, values)
    }

    pub fn get(&self, tuple: &[usize]) -> Result<&Q, BellError> {
        Ok(&self.values[tuple_index(&self.parties, tuple)?])
    }

    pub fn to_csv(&self) -> String {
        let mut out: Vec<String> = (0..self.parties.len()).map(|p| format!("p{p}")).collect();
        out.push("value".into());
        let mut lines = vec![out.join(",")];
        for (t, v) in setting_tuples(&self.parties).iter().zip(&self.values) {
            lines.push(format!("{},{}", tuple_key(t), format_value(v)));
        }
        lines.join("\n") + "\n"
    }

    /// Reads the CSV written by [`to_csv`](Self::to_csv). Omitted rows are 0 (the identity row is 1),
    /// so a file listing only full correlators describes unbiased marginals.
    pub fn from_csv(text: &str) -> Result<Self, BellError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| BellError::Parse("empty CSV".into()))?;
        let p = header.split(',').count().checked_sub(1).filter(|&p| p > 0);
        let p = p.ok_or_else(|| BellError::Parse("header needs party columns and a value column".into()))?;
        let mut rows = Vec::new();
        for line in lines {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != p + 1 {
                return Err(BellError::Parse(format!("row {line:?} has {} cells, expected {}", cells.len(), p + 1)));
            }
            let tuple = parse_tuple(&cells[..p].join(","))?;
            rows.push((tuple, parse_value(cells[p])?));
        }
        let parties: Vec<usize> = (0..p).map(|i| rows.iter().map(|(t, _)| t[i]).max().unwrap_or(0)).collect();
        let mut values = vec![Q::zero(); tuple_count(&parties)];
        values[0] = Q::one();
        for (t, v) in rows {
            values[tuple_index(&parties, &t)?] = v;
        }
        Self::new(parties, values)
    }
}

/// ±1 matrix of correlation values (rows, in index order) under each deterministic strategy
/// (columns). Strategy bit `offset(p) + s − 1` set means party p answers −1 to setting s,
/// with party 0 in the lowest bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyMatrix {
    pub parties: Vec<usize>,
    tuples: Vec<Vec<usize>>,
    offsets: Vec<usize>,
}

impl StrategyMatrix {
    pub fn rows(&self) -> usize {
        self.tuples.len()
    }

    pub fn cols(&self) -> usize {
        1 << self.parties.iter().sum::<usize>()
    }

    pub fn entry(&self, row: usize, col: usize) -> i8 {
        let t = &self.tuples[row];
        let flips = t
            .iter()
            .zip(&self.offsets)
            .filter(|(&s, &off)| s > 0 && col >> (off + s - 1) & 1 == 1)
            .count();
        if flips % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn column(&self, col: usize) -> Vec<i8> {
        (0..self.rows()).map(|r| self.entry(r, col)).collect()
    }
}

pub fn strategy_matrix(parties: &[usize]) -> Result<StrategyMatrix, BellError> {
    let total: usize = parties.iter().sum();
    if total > 20 {
        return Err(BellError::TooManyStrategies { count: 1u128 << total.min(127), cap: STRATEGY_CAP });
    }
    let offsets = parties
        .iter()
        .scan(0, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    Ok(StrategyMatrix { parties: parties.to_vec(), tuples: setting_tuples(parties), offsets })
}

/// `Σ coeffs·c ≤ bound`; the identity coefficient is always zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BellInequality {
    pub parties: Vec<usize>,
    pub coeffs: Vec<BigInt>,
    pub bound: BigInt,
}

#[derive(Serialize, Deserialize)]
struct InequalityJson {
    parties: Vec<usize>,
    coeffs: BTreeMap<String, i64>,
    bound: i64,
}

/// Left-hand side and verdict of an inequality evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub lhs: Q,
    pub bound: Q,
    pub satisfied: bool,
}

impl Evaluation {
    fn new(lhs: Q, bound: Q) -> Self {
        let satisfied = lhs <= bound;
        Evaluation { lhs, bound, satisfied }
    }

    pub fn lhs_f64(&self) -> f64 {
        lp::to_f64(&self.lhs)
    }
}

impl BellInequality {
    /// Builds an inequality whose bound is the exact maximum over deterministic strategies.
    pub fn with_tight_bound(parties: Vec<usize>, mut coeffs: Vec<BigInt>) -> Result<Self, BellError> {
        let m = strategy_matrix(&parties)?;
        if coeffs.len() != m.rows() {
            return Err(BellError::Index(format!("{} coefficients for {} indices", coeffs.len(), m.rows())));
        }
        coeffs[0] = BigInt::zero();
        let bound = (0..m.cols())
            .map(|s| column_value(&m, &coeffs, s))
            .max()
            .expect("at least one strategy");
        Ok(BellInequality { parties, coeffs, bound })
    }

    /// The CHSH inequality `A₁B₁ + A₁B₂ + A₂B₁ − A₂B₂ ≤ 2`.
    pub fn chsh() -> Self {
        let mut coeffs = vec![BigInt::zero(); 9];
        for (idx, c) in [(4, 1), (5, 1), (7, 1), (8, -1)] {
            coeffs[idx] = BigInt::from(c);
        }
        Self::with_tight_bound(vec![2, 2], coeffs).expect("small")
    }

    pub fn evaluate(&self, c: &CorrelationVector) -> Result<Evaluation, BellError> {
        if c.parties != self.parties {
            return Err(BellError::Index(format!("parties {:?} vs {:?}", c.parties, self.parties)));
        }
        let lhs = self.coeffs.iter().zip(&c.values).fold(Q::zero(), |acc, (q, v)| acc + Q::from_integer(q.clone()) * v);
        Ok(Evaluation::new(lhs, Q::from_integer(self.bound.clone())))
    }

    /// Floating-point evaluation used to confirm certificates built from rounded inputs.
    pub fn evaluate_f64(&self, values: &[f64]) -> f64 {
        self.coeffs.iter().zip(values).map(|(q, v)| q.to_f64().unwrap_or(f64::NAN) * v).sum()
    }

    pub fn to_json(&self) -> Result<String, BellError> {
        let small = |v: &BigInt| v.to_i64().ok_or_else(|| BellError::Parse(format!("coefficient {v} too large")));
        let mut coeffs = BTreeMap::new();
        for (t, q) in setting_tuples(&self.parties).iter().zip(&self.coeffs) {
            if !q.is_zero() {
                coeffs.insert(tuple_key(t), small(q)?);
            }
        }
        let j = InequalityJson { parties: self.parties.clone(), coeffs, bound: small(&self.bound)? };
        serde_json::to_string_pretty(&j).map_err(|e| BellError::Parse(e.to_string()))
    }

    /// Reads inequality JSON; the stored bound is kept as given.
    pub fn from_json(text: &str) -> Result<Self, BellError> {
        let j: InequalityJson = serde_json::from_str(text).map_err(|e| BellError::Parse(e.to_string()))?;
        let mut coeffs = vec![BigInt::zero(); tuple_count(&j.parties)];
        for (key, v) in &j.coeffs {
            coeffs[tuple_index(&j.parties, &parse_tuple(key)?)?] = BigInt::from(*v);
        }
        Ok(BellInequality { parties: j.parties, coeffs, bound: BigInt::from(j.bound) })
    }
}

fn column_value(m: &StrategyMatrix, coeffs: &[BigInt], s: usize) -> BigInt {
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, q)| !q.is_zero())
        .map(|(r, q)| if m.entry(r, s) > 0 { q.clone() } else { -q.clone() })
        .fold(BigInt::zero(), |a, b| a + b)
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpVerdict {
    /// Nonnegative weights over strategy columns with `M·P = C` exactly.
    Feasible { weights: Vec<Q> },
    /// A Bell inequality the correlations violate, with the exact violating value.
    Infeasible { inequality: BellInequality, value: Q },
}

/// Decides whether a local realistic model reproduces `c`.
///
/// Feasibility is a phase-1 solve of `M P = C, P ≥ 0`. When infeasible, the program
/// `max Cᵀu  s.t.  Mᵀu ≤ 0, u ≥ −1` (with `u = Q − 1`) is solved and its optimum yields
/// the inequality `c̃ᵀq ≤ (M̃ᵀq)_max`.
pub fn lp_feasible(c: &CorrelationVector) -> Result<LpVerdict, BellError> {
    let m = strategy_matrix(&c.parties)?;
    let (rows, cols) = (m.rows(), m.cols());
    let a: Vec<Vec<Q>> = (0..rows).map(|r| (0..cols).map(|s| int(m.entry(r, s) as i64)).collect()).collect();
    let zero_cost = vec![Q::zero(); cols];
    match lp::solve(&a, &c.values, &zero_cost)? {
        LpOutcome::Optimal { x, .. } => return Ok(LpVerdict::Feasible { weights: x }),
        LpOutcome::Unbounded => unreachable!("zero objective cannot be unbounded"),
        LpOutcome::Infeasible { .. } => {}
    }
    // Dual program in standard form over w = u + 1 ≥ 0 and slacks:
    // Mᵀw + s = Mᵀ1, minimize −Cᵀw.
    let dual_a: Vec<Vec<Q>> = (0..cols)
        .map(|s| {
            let mut row: Vec<Q> = (0..rows).map(|r| int(m.entry(r, s) as i64)).collect();
            row.extend((0..cols).map(|k| if k == s { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    let dual_b: Vec<Q> = (0..cols).map(|s| int((0..rows).map(|r| m.entry(r, s) as i64).sum())).collect();
    let mut cost: Vec<Q> = c.values.iter().map(|v| -v).collect();
    cost.extend((0..cols).map(|_| Q::zero()));
    let LpOutcome::Optimal { x, .. } = lp::solve(&dual_a, &dual_b, &cost)? else {
        unreachable!("the dual program is feasible (w = 1) and bounded");
    };
    let u: Vec<Q> = x[..rows].iter().map(|w| w - Q::one()).collect();
    let coeffs = integerize(&u[1..]);
    let mut full = vec![BigInt::zero()];
    full.extend(coeffs);
    let inequality = BellInequality::with_tight_bound(c.parties.clone(), full)?;
    let ev = inequality.evaluate(c)?;
    assert!(!ev.satisfied, "dual optimum must give a violated inequality");
    let floats: Vec<f64> = c.values.iter().map(lp::to_f64).collect();
    let margin = inequality.evaluate_f64(&floats) - inequality.bound.to_f64().unwrap_or(f64::NAN);
    // NaN margins count as inconclusive.
    if margin.partial_cmp(&FLOAT_MARGIN) != Some(std::cmp::Ordering::Greater) {
        return Err(BellError::Inconclusive(margin));
    }
    Ok(LpVerdict::Infeasible { inequality, value: ev.lhs })
}

/// Scales a rational vector to coprime integers.
fn integerize(v: &[Q]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = v.iter().map(|q| (q * Q::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

/// `Σ_{j≠d} |⟨M_j⟩| − (Π_j s_j)|⟨M_d⟩| ≤ m − 2`, where `s_j` is the sign of `⟨M_j⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RvInequality {
    pub parties: Vec<usize>,
    pub terms: Vec<Vec<usize>>,
    pub distinguished: usize,
}

impl RvInequality {
    pub fn bound(&self) -> i64 {
        self.terms.len() as i64 - 2
    }

    pub fn evaluate(&self, c: &CorrelationVector) -> Result<Evaluation, BellError> {
        if c.parties != self.parties {
            return Err(BellError::Index(format!("parties {:?} vs {:?}", c.parties, self.parties)));
        }
        let vals = self.terms.iter().map(|t| c.get(t).cloned()).collect::<Result<Vec<_>, _>>()?;
        let negatives = vals.iter().filter(|v| v.is_negative()).count();
        let mut lhs = Q::zero();
        for (j, v) in vals.iter().enumerate() {
            if j == self.distinguished {
                lhs += if negatives % 2 == 0 { -v.abs() } else { v.abs() };
            } else {
                lhs += v.abs();
            }
        }
        Ok(Evaluation::new(lhs, int(self.bound())))
    }
}

/// All random-variable inequalities for the multiset `terms`, one per distinguished term.
pub fn rv_inequalities(parties: &[usize], terms: &[Vec<usize>]) -> Result<Vec<RvInequality>, BellError> {
    let mut counts = BTreeMap::new();
    for t in terms {
        tuple_index(parties, t)?;
        for (p, &s) in t.iter().enumerate() {
            if s > 0 {
                *counts.entry((p, s)).or_insert(0usize) += 1;
            }
        }
    }
    if let Some((&(party, setting), _)) = counts.iter().find(|(_, &c)| c % 2 == 1) {
        return Err(BellError::OddObservable { party, setting });
    }
    Ok((0..terms.len())
        .map(|d| RvInequality { parties: parties.to_vec(), terms: terms.to_vec(), distinguished: d })
        .collect())
}

/// Tolerance for validating gbit coefficients.
const GPT_TOL: f64 = 1e-12;

/// A gbit state given by fiducial-measurement coefficients.
#[derive(Clone, Debug, PartialEq)]
pub enum GptState {
    /// Means `b_j` of the M fiducial measurements.
    Single { b: Vec<f64> },
    /// Marginal means `a_j`, `b_k` and correlations `c[j][k]`.
    Bipartite { a: Vec<f64>, b: Vec<f64>, c: Vec<Vec<f64>> },
}

/// Validates a two-gbit state: every `c_jk` must lie in the correlation range of `(a_j, b_k)`.
pub fn gpt_make_bipartite(a: Vec<f64>, b: Vec<f64>, c: Vec<Vec<f64>>) -> Result<GptState, BellError> {
    let m = a.len();
    if b.len() != m || c.len() != m || c.iter().any(|r| r.len() != m) {
        return Err(BellError::Index(format!("all coefficient blocks must have size {m}")));
    }
    for (j, row) in c.iter().enumerate() {
        for (k, &cjk) in row.iter().enumerate() {
            let range = correlation_range(&[a[j], b[k]]).map_err(|e| BellError::Malformed(e.to_string()))?;
            if !range.contains(cjk, GPT_TOL) {
                return Err(BellError::InvalidGpt { j, k, c: cjk });
            }
        }
    }
    Ok(GptState::Bipartite { a, b, c })
}

impl GptState {
    /// The PR box: unbiased marginals, `c = (1, 1; 1, −1)`.
    pub fn pr_box() -> Self {
        gpt_make_bipartite(vec![0.0; 2], vec![0.0; 2], vec![vec![1.0, 1.0], vec![1.0, -1.0]]).expect("valid")
    }

    /// Correlations of the CHSH-optimal singlet measurements, `c = (1, 1; 1, −1)/√2`.
    pub fn bell() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        gpt_make_bipartite(vec![0.0; 2], vec![0.0; 2], vec![vec![h, h], vec![h, -h]]).expect("valid")
    }

    /// Uncorrelated product state with `c_jk = a_j b_k`.
    pub fn product(a: Vec<f64>, b: Vec<f64>) -> Result<Self, BellError> {
        let c = a.iter().map(|x| b.iter().map(|y| x * y).collect()).collect();
        gpt_make_bipartite(a, b, c)
    }

    pub fn fiducial_count(&self) -> usize {
        match self {
            GptState::Single { b } => b.len(),
            GptState::Bipartite { a, .. } => a.len(),
        }
    }

    /// State of the first system.
    pub fn reduce(&self) -> GptState {
        match self {
            GptState::Single { .. } => self.clone(),
            GptState::Bipartite { a, .. } => GptState::Single { b: a.clone() },
        }
    }

    pub fn correlation(&self, j: usize, k: usize) -> Result<f64, BellError> {
        match self {
            GptState::Single { .. } => Err(BellError::Index("single-system state has no correlations".into())),
            GptState::Bipartite { c, .. } => c
                .get(j)
                .and_then(|r| r.get(k))
                .copied()
                .ok_or_else(|| BellError::Index(format!("({j}, {k}) out of range"))),
        }
    }

    /// `c₀₀ + c₀₁ + c₁₀ − c₁₁`.
    pub fn chsh_value(&self) -> Result<f64, BellError> {
        Ok(self.correlation(0, 0)? + self.correlation(0, 1)? + self.correlation(1, 0)? - self.correlation(1, 1)?)
    }

    /// Joint outcome probabilities `P(a, b | j, k)` for outcomes ±1, indexed `[j][k][oa][ob]`
    /// with outcome index 0 for +1.
    pub fn probabilities(&self) -> Result<Vec<Vec<[[f64; 2]; 2]>>, BellError> {
        let GptState::Bipartite { a, b, c } = self else {
            return Err(BellError::Index("single-system state".into()));
        };
        let m = a.len();
        let sign = |o: usize| if o == 0 { 1.0 } else { -1.0 };
        Ok((0..m)
            .map(|j| {
                (0..m)
                    .map(|k| {
                        let mut p = [[0.0; 2]; 2];
                        for (oa, row) in p.iter_mut().enumerate() {
                            for (ob, v) in row.iter_mut().enumerate() {
                                *v = (1.0 + sign(oa) * a[j] + sign(ob) * b[k] + sign(oa) * sign(ob) * c[j][k]) / 4.0;
                            }
                        }
                        p
                    })
                    .collect()
            })
            .collect())
    }
}
