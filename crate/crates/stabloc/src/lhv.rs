//! Standard local-hidden-variable tables for Pauli measurements and correlation ranges.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{BitMatrix, BitVec};
use crate::graph::StabGraph;
use crate::pauli::{Letter, PauliOperator};
use crate::sample::all_paulis;
use crate::tableau::{StabilizerTableau, TableauError};

/// Largest qubit count for which the exhaustive checks run.
pub const ENUMERATION_LIMIT: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LhvError {
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("{0} is not a stabilizer element")]
    NotElement(String),
    #[error("{n} qubits is too many for exhaustive enumeration (limit {limit})")]
    TooLarge { n: usize, limit: usize },
    #[error("the graph of this state is disconnected")]
    Disconnected,
    #[error("value {0} lies outside [-1, 1]")]
    OutOfRange(f64),
    #[error("at least one value is required")]
    Empty,
    #[error("angles (theta={theta}, phi={phi}) are outside the allowed wedge")]
    Angles { theta: f64, phi: f64 },
    #[error("bad spec JSON: {0}")]
    Json(String),
}

/// A standard table family: generator values `v` and X·Y·Z correlation bits `c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LhvTableSpec {
    pub v: BitVec,
    pub c: BitVec,
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    n: usize,
    v: Vec<u8>,
    c: Vec<u8>,
}

/// One table: outcomes `(−1)^{x_k}` for X, `(−1)^{z_k}` for Z and `(−1)^{x_k+z_k+c_k}` for Y.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LhvInstance {
    pub x: BitVec,
    pub z: BitVec,
    pub c: BitVec,
}

impl LhvInstance {
    /// Outcome bit for one letter on site k.
    pub fn letter_bit(&self, k: usize, l: Letter) -> bool {
        match l {
            Letter::I => false,
            Letter::X => self.x.get(k),
            Letter::Z => self.z.get(k),
            Letter::Y => self.x.get(k) ^ self.z.get(k) ^ self.c.get(k),
        }
    }

    /// Exponent of the product of the table entries named by `m`'s letters (sign ignored).
    pub fn product_bit(&self, m: &PauliOperator) -> bool {
        (0..m.n()).fold(false, |acc, k| acc ^ self.letter_bit(k, m.letter(k)))
    }
}

fn bits_to_vec(bits: &[u8]) -> BitVec {
    BitVec::from_bools(&bits.iter().map(|&b| b != 0).collect::<Vec<_>>())
}

impl LhvTableSpec {
    pub fn zero(n: usize) -> Self {
        LhvTableSpec { v: BitVec::zeros(n), c: BitVec::zeros(n) }
    }

    pub fn n(&self) -> usize {
        self.v.len()
    }

    pub fn from_json(text: &str) -> Result<Self, LhvError> {
        let j: SpecJson = serde_json::from_str(text).map_err(|e| LhvError::Json(e.to_string()))?;
        if j.v.len() != j.n || j.c.len() != j.n {
            return Err(LhvError::Length { expected: j.n, got: j.v.len().max(j.c.len()) });
        }
        Ok(LhvTableSpec { v: bits_to_vec(&j.v), c: bits_to_vec(&j.c) })
    }

    pub fn to_json(&self) -> String {
        let to = |b: &BitVec| b.iter().map(u8::from).collect();
        serde_json::to_string(&SpecJson { n: self.n(), v: to(&self.v), c: to(&self.c) }).expect("serializable")
    }

    fn check(&self, t: &StabilizerTableau) -> Result<(), LhvError> {
        for len in [self.v.len(), self.c.len()] {
            if len != t.n() {
                return Err(LhvError::Length { expected: t.n(), got: len });
            }
        }
        Ok(())
    }

    /// `(x | z) = (V | R) Λ (G ; H) Λ` with `V_j = v_j + Σ_k c_k [r₁(g_j)]_k [r₂(g_j)]_k` and
    /// likewise `R` from the dual generators and the random bits `r`.
    pub fn build_instance(&self, t: &StabilizerTableau, r: &BitVec) -> Result<LhvInstance, LhvError> {
        self.check(t)?;
        let n = t.n();
        if r.len() != n {
            return Err(LhvError::Length { expected: n, got: r.len() });
        }
        let duals = t.dual_generators();
        let corr = |p: &PauliOperator| p.x().and(p.z()).dot(&self.c);
        let mut vr = BitVec::zeros(2 * n);
        for (j, dual) in duals.iter().enumerate() {
            vr.set(j, self.v.get(j) ^ corr(t.row(j)));
            vr.set(n + j, r.get(j) ^ corr(dual));
        }
        let gh = BitMatrix::from_rows(2 * n, t.rows().iter().chain(&duals).map(|p| p.r()).collect());
        let lam = BitMatrix::lambda(n);
        let xz = lam.vec_mul(&vr);
        let xz = lam.vec_mul(&gh.vec_mul(&xz));
        Ok(LhvInstance { x: xz.slice(0, n), z: xz.slice(n, 2 * n), c: self.c.clone() })
    }

    /// Value `(−1)^{v_g}` assigned to the sign-free measurement of stabilizer element `g`.
    pub fn definite_value(&self, t: &StabilizerTableau, g: &PauliOperator) -> Result<i8, LhvError> {
        self.check(t)?;
        let m = g.with_phase(0);
        t.decompose_element(&m)?.ok_or_else(|| LhvError::NotElement(g.to_string()))?;
        let inst = self.build_instance(t, &BitVec::zeros(t.n()))?;
        Ok(if inst.product_bit(&m) { -1 } else { 1 })
    }

    /// Closed form for graph states `(I | Γ)`: `v_g = a·v + a Γ C aᵀ`.
    pub fn graph_value(&self, gamma: &BitMatrix, a: &BitVec) -> i8 {
        let mut e = a.dot(&self.v);
        let ga = gamma.vec_mul(a);
        e ^= ga.and(&self.c).dot(a);
        if e {
            -1
        } else {
            1
        }
    }

    /// Checks that every stabilizer element gets a fixed value and every other product a
    /// uniformly random one, over all 2^n dual-value vectors r.
    pub fn is_probability_preserving(&self, t: &StabilizerTableau) -> Result<PreservationReport, LhvError> {
        self.check(t)?;
        let n = t.n();
        if n > ENUMERATION_LIMIT {
            return Err(LhvError::TooLarge { n, limit: ENUMERATION_LIMIT });
        }
        let instances = (0..1u64 << n)
            .map(|r| self.build_instance(t, &BitVec::from_mask(n, r)))
            .collect::<Result<Vec<_>, _>>()?;
        check_family(t, &instances)
    }
}

/// Outcome of a probability-preservation check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreservationReport {
    pub preserving: bool,
    /// First offending Pauli product, if any.
    pub witness: Option<PauliOperator>,
}

/// Checks a family of equally likely tables against the state's definite/random classification.
pub fn check_family(t: &StabilizerTableau, instances: &[LhvInstance]) -> Result<PreservationReport, LhvError> {
    let n = t.n();
    if n > ENUMERATION_LIMIT {
        return Err(LhvError::TooLarge { n, limit: ENUMERATION_LIMIT });
    }
    for m in all_paulis(n) {
        let ones = instances.iter().filter(|i| i.product_bit(&m)).count();
        let definite = t.decompose_element(&m)?.is_some();
        let ok = if definite { ones == 0 || ones == instances.len() } else { 2 * ones == instances.len() };
        if !ok {
            return Ok(PreservationReport { preserving: false, witness: Some(m) });
        }
    }
    Ok(PreservationReport { preserving: true, witness: None })
}

/// Number of distinct definite-value assignments over all 2^{2n} specs, by brute force.
pub fn count_distinct_tables(t: &StabilizerTableau) -> Result<usize, LhvError> {
    let n = t.n();
    if n > 5 {
        return Err(LhvError::TooLarge { n, limit: 5 });
    }
    if !StabGraph::from_tableau(t).map_err(|_| LhvError::Disconnected)?.is_connected() {
        return Err(LhvError::Disconnected);
    }
    let elements: Vec<PauliOperator> = (0..1u64 << n).map(|a| t.element(&BitVec::from_mask(n, a)).with_phase(0)).collect();
    let mut seen = HashSet::new();
    for v in 0..1u64 << n {
        for c in 0..1u64 << n {
            let spec = LhvTableSpec { v: BitVec::from_mask(n, v), c: BitVec::from_mask(n, c) };
            let inst = spec.build_instance(t, &BitVec::zeros(n))?;
            let values: Vec<bool> = elements.iter().map(|g| inst.product_bit(g)).collect();
            seen.insert(values);
        }
    }
    Ok(seen.len())
}

/// Closed interval `[lo, hi]`; `lo > hi` encodes the empty set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn contains(&self, p: f64, tol: f64) -> bool {
        p >= self.lo - tol && p <= self.hi + tol
    }
}

/// The achievable means p with `R(a₁)⋯R(aₙ) = R(p)` for ±1 variables with means `a_j`.
pub fn correlation_range(a: &[f64]) -> Result<Interval, LhvError> {
    if a.is_empty() {
        return Err(LhvError::Empty);
    }
    if let Some(&bad) = a.iter().find(|x| !(-1.0..=1.0).contains(*x)) {
        return Err(LhvError::OutOfRange(bad));
    }
    let mut mags: Vec<f64> = a.iter().map(|x| x.abs()).collect();
    mags.sort_by(|x, y| y.partial_cmp(x).expect("finite"));
    let sign: f64 = a.iter().map(|&x| if x < 0.0 { -1.0 } else { 1.0 }).product();
    let n = a.len() as f64;
    let total: f64 = mags.iter().sum();
    let last = mags[mags.len() - 1];
    let lower = total - (n - 1.0);
    let upper = (n - 1.0) - (total - last - last);
    // s·p ∈ [lower, upper] ∩ [−1, 1]
    let (lo, hi) = (lower.max(-1.0), upper.min(1.0));
    Ok(if sign > 0.0 { Interval { lo, hi } } else { Interval { lo: -hi, hi: -lo } })
}

/// Whether a table can reproduce the Bell-pair correlations with the extra measurement
/// `T(θ, φ)`: requires `0 ∈ 𝒞(sin θ cos φ, sin θ sin φ)`.
pub fn nonpauli_check(theta: f64, phi: f64) -> Result<bool, LhvError> {
    const TOL: f64 = 1e-12;
    let corner = theta.abs() < TOL && phi.abs() < TOL;
    let theta_phi = 1.0f64.atan2(phi.sin());
    let wedge = (-TOL..=std::f64::consts::FRAC_PI_4 + TOL).contains(&phi)
        && theta >= theta_phi - TOL
        && theta <= std::f64::consts::FRAC_PI_2 + TOL;
    if !corner && !wedge {
        return Err(LhvError::Angles { theta, phi });
    }
    let range = correlation_range(&[theta.sin() * phi.cos(), theta.sin() * phi.sin()])?;
    Ok(range.contains(0.0, 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn approx(i: Interval, lo: f64, hi: f64) -> bool {
        (i.lo - lo).abs() < 1e-12 && (i.hi - hi).abs() < 1e-12
    }

    #[test]
    fn range_examples() {
        assert!(approx(correlation_range(&[1.0, 0.3]).unwrap(), 0.3, 0.3));
        assert!(approx(correlation_range(&[0.5, 0.5]).unwrap(), 0.0, 1.0));
        let third = 1.0 / 3.0;
        assert!(approx(correlation_range(&[third, third, third]).unwrap(), -1.0, 1.0));
        assert!(approx(correlation_range(&[0.5, -0.3]).unwrap(), -0.8, 0.2));
        assert!(correlation_range(&[1.5]).is_err());
    }

    #[test]
    fn nonpauli_examples() {
        assert!(nonpauli_check(0.0, 0.0).unwrap());
        assert!(!nonpauli_check(FRAC_PI_2, FRAC_PI_4).unwrap());
        assert!(nonpauli_check(FRAC_PI_2, 0.0).unwrap());
        assert!(nonpauli_check(0.3, 0.2).is_err());
    }

    #[test]
    fn edge_instance() {
        let t = StabGraph::path(2).to_tableau();
        let inst = LhvTableSpec::zero(2).build_instance(&t, &BitVec::from_bools(&[true, false])).unwrap();
        assert_eq!((inst.z.to_bools(), inst.x.to_bools()), (vec![true, false], vec![false, true]));
        let zero = LhvTableSpec::zero(2).build_instance(&t, &BitVec::zeros(2)).unwrap();
        assert!(zero.x.is_zero() && zero.z.is_zero());
    }

    #[test]
    fn counts() {
        assert_eq!(count_distinct_tables(&StabGraph::path(2).to_tableau()).unwrap(), 8);
        assert_eq!(count_distinct_tables(&StabGraph::path(3).to_tableau()).unwrap(), 32);
        assert!(matches!(count_distinct_tables(&StabGraph::new(2).to_tableau()), Err(LhvError::Disconnected)));
    }
}
