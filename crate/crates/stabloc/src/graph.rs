//! Stabilizer graphs: solid/hollow nodes with loops and signs over a simple graph.
//!
//! A graph denotes `Π_j H_j^{hollow} S_j^{loop} Z_j^{sign} · Π_{edges} CZ · H^{⊗n} |0…0⟩`,
//! where every node's Z acts first, then S, then H.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::BitMatrix;
use crate::pauli::{Gate, Letter, PauliOperator};
use crate::rng::Outcome;
use crate::tableau::{MeasureResult, Probability, StabilizerTableau, TableauError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node {index} out of range for {n} nodes")]
    Index { index: usize, n: usize },
    #[error("{rule}: {reason}")]
    Precondition { rule: &'static str, reason: String },
    #[error("graphs have different sizes ({0} vs {1})")]
    Size(usize, usize),
    #[error("operator {0} must be Hermitian with sign +1")]
    BadOperator(String),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error("bad graph JSON: {0}")]
    Json(String),
}

/// Single-qubit gates with graphical rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalGate {
    H,
    S,
    Z,
}

/// Equivalence rules that change the graph but not the state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivRule {
    E1(usize),
    E2(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StabGraph {
    n: usize,
    hollow: Vec<bool>,
    loops: Vec<bool>,
    signs: Vec<bool>,
    adj: BitMatrix,
}

/// The layered circuit a graph stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphCircuit {
    pub n: usize,
    pub cz_edges: Vec<(usize, usize)>,
    pub z_flags: Vec<bool>,
    pub s_flags: Vec<bool>,
    pub h_flags: Vec<bool>,
}

/// Node classification for a Z-product measurement.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MeasuredSets {
    pub m_set: BTreeSet<usize>,
    pub m_s: BTreeSet<usize>,
    pub m_h: BTreeSet<usize>,
    pub m_se: BTreeSet<usize>,
    pub b: usize,
}

#[derive(Serialize, Deserialize)]
struct NodeJson {
    id: usize,
    fill: String,
    #[serde(rename = "loop")]
    looped: bool,
    sign: bool,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    nodes: Vec<NodeJson>,
    edges: Vec<[usize; 2]>,
}

impl StabGraph {
    /// n solid, undecorated, isolated nodes (`|+⟩^{⊗n}`).
    pub fn new(n: usize) -> Self {
        StabGraph {
            n,
            hollow: vec![false; n],
            loops: vec![false; n],
            signs: vec![false; n],
            adj: BitMatrix::zeros(n, n),
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::new(n);
        for &(a, b) in edges {
            g.set_edge(a, b, true);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, &(1..n).map(|j| (j - 1, j)).collect::<Vec<_>>())
    }

    pub fn ring(n: usize) -> Self {
        let mut g = Self::path(n);
        if n > 2 {
            g.set_edge(0, n - 1, true);
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for a in 0..n {
            for b in a + 1..n {
                g.set_edge(a, b, true);
            }
        }
        g
    }

    /// Graph state of a symmetric adjacency matrix (diagonal ignored).
    pub fn from_adjacency(adj: &BitMatrix) -> Self {
        let n = adj.rows();
        let mut g = Self::new(n);
        for a in 0..n {
            for b in a + 1..n {
                g.set_edge(a, b, adj.get(a, b));
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_hollow(&self, j: usize) -> bool {
        self.hollow[j]
    }

    pub fn has_loop(&self, j: usize) -> bool {
        self.loops[j]
    }

    pub fn has_sign(&self, j: usize) -> bool {
        self.signs[j]
    }

    pub fn set_hollow(&mut self, j: usize, v: bool) {
        self.hollow[j] = v;
    }

    pub fn set_loop(&mut self, j: usize, v: bool) {
        self.loops[j] = v;
    }

    pub fn set_sign(&mut self, j: usize, v: bool) {
        self.signs[j] = v;
    }

    pub fn adjacency(&self) -> &BitMatrix {
        &self.adj
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj.get(a, b)
    }

    pub fn set_edge(&mut self, a: usize, b: usize, v: bool) {
        assert_ne!(a, b, "self edges are stored as loops");
        self.adj.set(a, b, v);
        self.adj.set(b, a, v);
    }

    pub fn toggle_edge(&mut self, a: usize, b: usize) {
        let v = !self.has_edge(a, b);
        self.set_edge(a, b, v);
    }

    pub fn neighbors(&self, j: usize) -> Vec<usize> {
        self.adj.row(j).ones_iter().collect()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in self.adj.row(a).ones_iter().filter(|&b| b > a) {
                out.push((a, b));
            }
        }
        out
    }

    pub fn hollow_nodes(&self) -> Vec<usize> {
        (0..self.n).filter(|&j| self.hollow[j]).collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(j) = stack.pop() {
            for k in self.neighbors(j) {
                if !seen[k] {
                    seen[k] = true;
                    stack.push(k);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    fn check(&self, j: usize) -> Result<(), GraphError> {
        if j >= self.n {
            Err(GraphError::Index { index: j, n: self.n })
        } else {
            Ok(())
        }
    }

    fn flip_sign(&mut self, j: usize) {
        self.signs[j] ^= true;
    }

    /// Adds a loop, or removes an existing one and flips the sign (an extra S).
    fn advance(&mut self, j: usize) {
        if self.loops[j] {
            self.loops[j] = false;
            self.flip_sign(j);
        } else {
            self.loops[j] = true;
        }
    }

    fn advance_neighbors(&mut self, j: usize) {
        for k in self.neighbors(j) {
            self.advance(k);
        }
    }

    fn flip_neighbor_signs(&mut self, j: usize) {
        for k in self.neighbors(j) {
            self.flip_sign(k);
        }
    }

    /// Complements the edges among the neighbours of `j`.
    pub fn local_complement(&mut self, j: usize) -> Result<(), GraphError> {
        self.check(j)?;
        let nb = self.neighbors(j);
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                self.toggle_edge(a, b);
            }
        }
        Ok(())
    }

    /// LC(j); LC(k); LC(j).
    pub fn local_complement_edge(&mut self, j: usize, k: usize) -> Result<(), GraphError> {
        self.check(j)?;
        self.check(k)?;
        if j == k {
            return Err(GraphError::Precondition { rule: "LC-edge", reason: "nodes must differ".into() });
        }
        self.local_complement(j)?;
        self.local_complement(k)?;
        self.local_complement(j)
    }

    pub fn apply_local_gate(&mut self, gate: LocalGate, j: usize) -> Result<(), GraphError> {
        self.check(j)?;
        match gate {
            LocalGate::H => self.hollow[j] ^= true,
            LocalGate::S => self.apply_s(j),
            LocalGate::Z => {
                self.apply_s(j);
                self.apply_s(j);
            }
        }
        Ok(())
    }

    fn apply_s(&mut self, j: usize) {
        if !self.hollow[j] {
            self.advance(j);
        } else if !self.loops[j] {
            self.lc_unchecked(j);
            self.advance_neighbors(j);
            if self.signs[j] {
                self.flip_neighbor_signs(j);
            }
        } else {
            self.hollow[j] = false;
            self.loops[j] = false;
            self.lc_unchecked(j);
            self.advance_neighbors(j);
            if !self.signs[j] {
                self.flip_neighbor_signs(j);
            }
        }
    }

    fn lc_unchecked(&mut self, j: usize) {
        self.local_complement(j).expect("index checked by caller");
    }

    /// Applies any supported Clifford gate, including CZ.
    pub fn apply_gate(&mut self, gate: Gate) -> Result<(), GraphError> {
        match gate {
            Gate::H(q) => self.apply_local_gate(LocalGate::H, q),
            Gate::S(q) => self.apply_local_gate(LocalGate::S, q),
            Gate::Z(q) => self.apply_local_gate(LocalGate::Z, q),
            Gate::Sdg(q) => {
                for _ in 0..3 {
                    self.apply_local_gate(LocalGate::S, q)?;
                }
                Ok(())
            }
            Gate::X(q) => {
                self.apply_local_gate(LocalGate::H, q)?;
                self.apply_local_gate(LocalGate::Z, q)?;
                self.apply_local_gate(LocalGate::H, q)
            }
            Gate::Cz(a, b) => self.apply_cz(a, b),
        }
    }

    pub fn apply_gates(&mut self, gates: &[Gate]) -> Result<(), GraphError> {
        gates.iter().try_for_each(|&g| self.apply_gate(g))
    }

    /// CZ between `a` and `b`; the graph is reduced first.
    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<(), GraphError> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(GraphError::Precondition { rule: "CZ", reason: "nodes must differ".into() });
        }
        self.reduce();
        match (self.hollow[a], self.hollow[b]) {
            (false, false) => self.toggle_edge(a, b),
            (true, false) => self.cz_hollow_solid(a, b),
            (false, true) => self.cz_hollow_solid(b, a),
            (true, true) => self.cz_hollow_hollow(a, b),
        }
        Ok(())
    }

    fn cz_hollow_solid(&mut self, h: usize, s: usize) {
        let connected = self.has_edge(h, s);
        for u in self.neighbors(h) {
            if u != s {
                self.toggle_edge(s, u);
            }
        }
        if connected != self.signs[h] {
            self.flip_sign(s);
        }
    }

    fn cz_hollow_hollow(&mut self, a: usize, b: usize) {
        let na = self.neighbors(a);
        let nb = self.neighbors(b);
        for &u in &na {
            for &w in &nb {
                if u != w {
                    self.toggle_edge(u, w);
                } else {
                    self.flip_sign(u);
                }
            }
        }
        if self.signs[a] {
            for &w in &nb {
                self.flip_sign(w);
            }
        }
        if self.signs[b] {
            for &u in &na {
                self.flip_sign(u);
            }
        }
    }

    pub fn apply_equiv(&mut self, rule: EquivRule) -> Result<(), GraphError> {
        match rule {
            EquivRule::E1(j) => {
                self.check(j)?;
                if !self.loops[j] {
                    return Err(GraphError::Precondition { rule: "E1", reason: format!("node {j} has no loop") });
                }
                self.e1(j);
            }
            EquivRule::E2(j, k) => {
                self.check(j)?;
                self.check(k)?;
                if j == k || !self.has_edge(j, k) {
                    return Err(GraphError::Precondition {
                        rule: "E2",
                        reason: format!("nodes {j} and {k} are not connected"),
                    });
                }
                if self.loops[j] || self.loops[k] {
                    return Err(GraphError::Precondition {
                        rule: "E2",
                        reason: format!("nodes {j} and {k} must both be loopless"),
                    });
                }
                self.e2(j, k);
            }
        }
        Ok(())
    }

    fn e1(&mut self, j: usize) {
        self.hollow[j] ^= true;
        self.lc_unchecked(j);
        self.advance_neighbors(j);
        self.flip_sign(j);
        if self.signs[j] {
            self.flip_neighbor_signs(j);
        }
    }

    fn e2(&mut self, j: usize, k: usize) {
        let common: Vec<usize> = self.neighbors(j).into_iter().filter(|&c| self.has_edge(k, c)).collect();
        let (sj, sk) = (self.signs[j], self.signs[k]);
        self.hollow[j] ^= true;
        self.hollow[k] ^= true;
        self.local_complement_edge(j, k).expect("checked");
        for c in common {
            self.flip_sign(c);
        }
        for (x, s) in [(j, sj), (k, sk)] {
            if s {
                self.flip_sign(x);
                self.flip_neighbor_signs(x);
            }
        }
    }

    /// No hollow loops and no hollow–hollow edges.
    pub fn is_reduced(&self) -> bool {
        (0..self.n).all(|j| {
            !self.hollow[j] || (!self.loops[j] && self.neighbors(j).iter().all(|&k| !self.hollow[k]))
        })
    }

    /// Rewrites into reduced form with equivalence rules; returns the rules applied.
    pub fn reduce(&mut self) -> Vec<EquivRule> {
        let mut applied = Vec::new();
        loop {
            if let Some(j) = (0..self.n).find(|&j| self.hollow[j] && self.loops[j]) {
                self.e1(j);
                applied.push(EquivRule::E1(j));
                continue;
            }
            let pair = (0..self.n)
                .filter(|&j| self.hollow[j])
                .find_map(|j| self.neighbors(j).into_iter().find(|&k| self.hollow[k]).map(|k| (j, k)));
            match pair {
                Some((j, k)) => {
                    self.e2(j, k);
                    applied.push(EquivRule::E2(j, k));
                }
                None => return applied,
            }
        }
    }

    pub fn reduced(&self) -> Self {
        let mut g = self.clone();
        g.reduce();
        g
    }

    /// Whether two graphs describe the same state.
    pub fn equivalent(&self, other: &Self) -> Result<bool, GraphError> {
        if self.n != other.n {
            return Err(GraphError::Size(self.n, other.n));
        }
        let mut g1 = self.reduced();
        let mut g2 = other.reduced();
        loop {
            let mut found = None;
            'outer: for a in 0..self.n {
                if !(g1.hollow[a] && !g2.hollow[a]) {
                    continue;
                }
                for b in 0..self.n {
                    if g2.hollow[b] && !g1.hollow[b] && (g1.has_edge(a, b) || g2.has_edge(a, b)) {
                        found = Some((a, b));
                        break 'outer;
                    }
                }
            }
            let Some((a, b)) = found else { break };
            // a: hollow in g1, solid in g2; b the reverse.
            if g1.has_edge(a, b) {
                align(&mut g1, a, b);
            } else {
                align(&mut g2, b, a);
            }
        }
        Ok(g1 == g2)
    }

    pub fn to_circuit(&self) -> GraphCircuit {
        GraphCircuit {
            n: self.n,
            cz_edges: self.edges(),
            z_flags: self.signs.clone(),
            s_flags: self.loops.clone(),
            h_flags: self.hollow.clone(),
        }
    }

    pub fn from_circuit(c: &GraphCircuit) -> Self {
        let mut g = Self::from_edges(c.n, &[]);
        for &(a, b) in &c.cz_edges {
            g.toggle_edge(a, b);
        }
        g.signs = c.z_flags.clone();
        g.loops = c.s_flags.clone();
        g.hollow = c.h_flags.clone();
        g
    }

    /// Stabilizer generators: graph generators conjugated through the node decorations.
    pub fn to_tableau(&self) -> StabilizerTableau {
        let mut gates = Vec::new();
        for j in 0..self.n {
            if self.signs[j] {
                gates.push(Gate::Z(j));
            }
            if self.loops[j] {
                gates.push(Gate::S(j));
            }
            if self.hollow[j] {
                gates.push(Gate::H(j));
            }
        }
        StabilizerTableau::graph_state(&self.adj).conjugate_all(&gates).expect("indices in range")
    }

    pub fn from_tableau(t: &StabilizerTableau) -> Result<Self, GraphError> {
        let gf = t.to_graph_form()?;
        let mut g = Self::from_adjacency(&gf.tableau.z_block());
        for &q in &gf.hadamards {
            g.hollow[q] = true;
        }
        for &q in &gf.phases {
            g.loops[q] = true;
        }
        g.signs = gf.tableau.signs().to_bools();
        Ok(g)
    }

    /// Measures a Hermitian Pauli product with sign +1.
    pub fn measure_product(&self, m_op: &PauliOperator, source: Outcome) -> Result<MeasureResult<Self>, GraphError> {
        if m_op.n() != self.n {
            return Err(GraphError::Size(self.n, m_op.n()));
        }
        if m_op.phase() != 0 {
            return Err(GraphError::BadOperator(m_op.to_string()));
        }
        let mut g = self.clone();
        let mut pre = Vec::new();
        let mut post = Vec::new();
        let mut z_set = BTreeSet::new();
        for j in 0..self.n {
            match m_op.letter(j) {
                Letter::I => continue,
                Letter::Z => {}
                Letter::X => {
                    pre.push(Gate::H(j));
                    post.push(Gate::H(j));
                }
                Letter::Y => {
                    pre.extend([Gate::Sdg(j), Gate::H(j)]);
                    post.extend([Gate::H(j), Gate::S(j)]);
                }
            }
            z_set.insert(j);
        }
        g.apply_gates(&pre)?;
        let (result, _) = g.measure_z_product(&z_set, source);
        let mut state = match result.probability {
            Probability::One => return Ok(MeasureResult { state: self.clone(), ..result }),
            Probability::Half => result.state,
        };
        state.apply_gates(&post)?;
        Ok(MeasureResult { state, ..result })
    }

    /// Node sets used by a Z-product measurement, after reduction and disconnection.
    pub fn measured_sets(&self, z_set: &BTreeSet<usize>) -> (Self, MeasuredSets) {
        let mut g = self.clone();
        loop {
            g.reduce();
            let target = z_set.iter().copied().filter(|&h| g.hollow[h]).find_map(|h| {
                g.neighbors(h).into_iter().find(|u| !z_set.contains(u)).map(|u| (h, u))
            });
            let Some((h, u)) = target else { break };
            if !g.loops[u] {
                g.e2(h, u);
            } else {
                g.e1(u);
                g.e1(h);
            }
        }
        let m_s: BTreeSet<usize> = z_set.iter().copied().filter(|&j| !g.hollow[j]).collect();
        let m_h: BTreeSet<usize> = z_set.iter().copied().filter(|&j| g.hollow[j]).collect();
        let m_se = m_s
            .iter()
            .copied()
            .filter(|&j| g.neighbors(j).iter().filter(|k| m_h.contains(k)).count() % 2 == 0)
            .collect();
        let b = m_h.iter().filter(|&&h| g.signs[h]).count();
        let sets = MeasuredSets { m_set: z_set.clone(), m_s, m_h, m_se, b };
        (g, sets)
    }

    fn measure_z_product(&self, z_set: &BTreeSet<usize>, source: Outcome) -> (MeasureResult<Self>, MeasuredSets) {
        let (mut g, sets) = self.measured_sets(z_set);
        let b = sets.b % 2 == 1;
        let Some(&p) = sets.m_se.iter().next() else {
            let r = MeasureResult { outcome: b, probability: Probability::One, state: self.clone() };
            return (r, sets);
        };
        let m = source.draw();
        let flip = m != b;
        let rest: Vec<usize> = sets.m_se.iter().copied().filter(|&w| w != p).collect();
        let np = g.neighbors(p);
        for &u in &np {
            for &w in &rest {
                if u != w {
                    g.toggle_edge(u, w);
                }
            }
        }
        if !g.signs[p] {
            for &u in np.iter().filter(|u| sets.m_se.contains(u)) {
                g.flip_sign(u);
            }
        } else {
            g.signs[p] = false;
            for &w in rest.iter().filter(|w| !np.contains(w)) {
                g.flip_sign(w);
            }
        }
        if flip {
            g.flip_sign(p);
            for &u in &np {
                g.flip_sign(u);
            }
        }
        for &u in &np {
            g.set_edge(p, u, false);
        }
        for &w in &rest {
            g.set_edge(p, w, true);
        }
        g.hollow[p] = true;
        if g.loops[p] {
            g.loops[p] = false;
            g.lc_unchecked(p);
            g.advance_neighbors(p);
            if flip {
                for &w in &rest {
                    g.flip_sign(w);
                }
            }
        }
        (MeasureResult { outcome: m, probability: Probability::Half, state: g }, sets)
    }

    /// Single-qubit Pauli measurement by direct case analysis.
    pub fn measure_single(&self, j: usize, basis: Letter, source: Outcome) -> Result<MeasureResult<Self>, GraphError> {
        self.check(j)?;
        let mut g = self.clone();
        let (pre, post): (&[Gate], &[Gate]) = match basis {
            Letter::I => return Ok(MeasureResult { outcome: false, probability: Probability::One, state: g }),
            Letter::Z => (&[], &[]),
            Letter::X => (&[Gate::H(j)], &[Gate::H(j)]),
            Letter::Y => (&[Gate::Sdg(j), Gate::H(j)], &[Gate::H(j), Gate::S(j)]),
        };
        g.apply_gates(pre)?;
        if g.hollow[j] {
            if g.loops[j] {
                g.e1(j);
            } else if let Some(k) = g.neighbors(j).into_iter().find(|&k| !g.loops[k]) {
                g.e2(j, k);
            } else if let Some(k) = g.neighbors(j).first().copied() {
                g.e1(k);
                g.e1(j);
            } else {
                return Ok(MeasureResult { outcome: g.signs[j], probability: Probability::One, state: self.clone() });
            }
        }
        let m = source.draw();
        if m {
            g.flip_neighbor_signs(j);
        }
        for k in g.neighbors(j) {
            g.set_edge(j, k, false);
        }
        g.hollow[j] = true;
        g.loops[j] = false;
        g.signs[j] = m;
        g.apply_gates(post)?;
        Ok(MeasureResult { outcome: m, probability: Probability::Half, state: g })
    }

    pub fn to_json(&self) -> String {
        let j = GraphJson {
            n: self.n,
            nodes: (0..self.n)
                .map(|i| NodeJson {
                    id: i,
                    fill: if self.hollow[i] { "hollow" } else { "solid" }.into(),
                    looped: self.loops[i],
                    sign: self.signs[i],
                })
                .collect(),
            edges: self.edges().into_iter().map(|(a, b)| [a, b]).collect(),
        };
        serde_json::to_string_pretty(&j).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let j: GraphJson = serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        let mut g = Self::new(j.n);
        for node in &j.nodes {
            g.check(node.id)?;
            g.hollow[node.id] = match node.fill.as_str() {
                "solid" => false,
                "hollow" => true,
                other => return Err(GraphError::Json(format!("unknown fill {other:?}"))),
            };
            g.loops[node.id] = node.looped;
            g.signs[node.id] = node.sign;
        }
        for &[a, b] in &j.edges {
            g.check(a)?;
            g.check(b)?;
            if a == b {
                return Err(GraphError::Json(format!("self edge on node {a}; use the loop flag")));
            }
            g.set_edge(a, b, true);
        }
        Ok(g)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph G {\n");
        for j in 0..self.n {
            let style = if self.hollow[j] { "style=solid" } else { "style=filled, fillcolor=black, fontcolor=white" };
            let label = if self.signs[j] { format!("{j} −") } else { j.to_string() };
            let _ = writeln!(s, "  {j} [shape=circle, {style}, label=\"{label}\"];");
            if self.loops[j] {
                let _ = writeln!(s, "  {j} -- {j};");
            }
        }
        for (a, b) in self.edges() {
            let _ = writeln!(s, "  {a} -- {b};");
        }
        s.push_str("}\n");
        s
    }
}

/// In `g`, node `h` is hollow and `s` solid and they share an edge: make `h` solid and `s` hollow.
fn align(g: &mut StabGraph, h: usize, s: usize) {
    if g.loops[s] {
        g.e1(s);
        g.e1(h);
    } else {
        g.e2(h, s);
    }
}
