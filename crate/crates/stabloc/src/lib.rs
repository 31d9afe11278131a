//! Stabilizer states, graph-state normal forms and local hidden-variable models.

pub mod bell;
pub mod codes;
pub mod comm;
pub mod gf2;
pub mod graph;
pub mod lhv;
pub mod lp;
pub mod oracle;
pub mod pauli;
pub mod rng;
pub mod sample;
pub mod tableau;
