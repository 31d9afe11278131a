//! Random and exhaustive generators for graphs, tableaus and Pauli operators.

use rand::Rng;

use crate::gf2::BitMatrix;
use crate::graph::StabGraph;
use crate::pauli::{Letter, PauliOperator};
use crate::tableau::StabilizerTableau;

/// Random graph: each edge present with probability ½, decorations uniform.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize) -> StabGraph {
    let mut g = StabGraph::new(n);
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen() {
                g.set_edge(a, b, true);
            }
        }
        g.set_hollow(a, rng.gen());
        g.set_loop(a, rng.gen());
        g.set_sign(a, rng.gen());
    }
    g
}

/// Random graph-state adjacency (no decorations).
pub fn random_adjacency<R: Rng>(rng: &mut R, n: usize) -> BitMatrix {
    let mut m = BitMatrix::zeros(n, n);
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen() {
                m.set(a, b, true);
                m.set(b, a, true);
            }
        }
    }
    m
}

/// Random Hermitian Pauli product with sign +1.
pub fn random_pauli<R: Rng>(rng: &mut R, n: usize) -> PauliOperator {
    let letters: Vec<Letter> = (0..n).map(|_| Letter::ALL[rng.gen_range(0..4)]).collect();
    PauliOperator::from_letters(&letters)
}

/// Random valid tableau: a random stabilizer graph's generators, mixed by random row operations.
pub fn random_tableau<R: Rng>(rng: &mut R, n: usize) -> StabilizerTableau {
    let t = random_graph(rng, n).to_tableau();
    let mut a = BitMatrix::identity(n);
    for _ in 0..3 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i != j {
            a.add_row(j, i);
        }
    }
    t.recombine(&a)
}

/// Every assignment of (fill, loop, sign) to the nodes of `base`.
pub fn all_decorations(base: &StabGraph) -> impl Iterator<Item = StabGraph> + '_ {
    let n = base.n();
    (0u64..1 << (3 * n)).map(move |mask| {
        let mut g = base.clone();
        for j in 0..n {
            g.set_hollow(j, mask >> (3 * j) & 1 == 1);
            g.set_loop(j, mask >> (3 * j + 1) & 1 == 1);
            g.set_sign(j, mask >> (3 * j + 2) & 1 == 1);
        }
        g
    })
}

/// All Hermitian sign-+1 Pauli products on n qubits.
pub fn all_paulis(n: usize) -> impl Iterator<Item = PauliOperator> {
    (0u64..1 << (2 * n)).map(move |mask| {
        let letters: Vec<Letter> = (0..n).map(|j| Letter::ALL[(mask >> (2 * j) & 3) as usize]).collect();
        PauliOperator::from_letters(&letters)
    })
}

/// Plain graph-state corpus up to `n_max` nodes: paths, rings, complete graphs, stars,
/// 2×2 and 2×3 grids, plus `random_per_n` random graphs per size.
pub fn graph_corpus<R: Rng>(rng: &mut R, n_max: usize, random_per_n: usize) -> Vec<(String, StabGraph)> {
    let mut out = Vec::new();
    for n in 2..=n_max {
        out.push((format!("path{n}"), StabGraph::path(n)));
        out.push((format!("complete{n}"), StabGraph::complete(n)));
        if n >= 3 {
            out.push((format!("ring{n}"), StabGraph::ring(n)));
        }
        if n >= 4 {
            let edges: Vec<_> = (1..n).map(|k| (0, k)).collect();
            out.push((format!("star{n}"), StabGraph::from_edges(n, &edges)));
        }
        for i in 0..random_per_n {
            out.push((format!("random{n}-{i}"), StabGraph::from_adjacency(&random_adjacency(rng, n))));
        }
    }
    if n_max >= 4 {
        out.push(("grid2x2".into(), StabGraph::ring(4)));
    }
    if n_max >= 6 {
        out.push(("grid2x3".into(), StabGraph::from_edges(6, &[(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)])));
    }
    out
}
