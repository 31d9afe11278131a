use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use stabloc::bell::*;
use stabloc::lp::{self, int, Q};
use stabloc::rng::rng;

fn violated(c: &CorrelationVector) -> (BellInequality, Q) {
    match lp_feasible(c).unwrap() {
        LpVerdict::Infeasible { inequality, value } => (inequality, value),
        LpVerdict::Feasible { .. } => panic!("expected infeasible"),
    }
}

fn assert_valid_for_all_strategies(ineq: &BellInequality) {
    let m = strategy_matrix(&ineq.parties).unwrap();
    for s in 0..m.cols() {
        let c = CorrelationVector::deterministic(ineq.parties.clone(), s as u64).unwrap();
        let ev = ineq.evaluate(&c).unwrap();
        assert!(ev.satisfied, "strategy {s} breaks {ineq:?}");
    }
}

#[test]
fn tsirelson_point_yields_chsh() {
    let (ineq, value) = violated(&CorrelationVector::tsirelson());
    assert_eq!(ineq.bound, BigInt::from(2));
    assert!((lp::to_f64(&value) - 2.0 * 2f64.sqrt()).abs() < 1e-9);
    assert_valid_for_all_strategies(&ineq);
}

#[test]
fn pr_box_violates_at_four() {
    let (ineq, value) = violated(&CorrelationVector::pr_box());
    assert_eq!(ineq.bound, BigInt::from(2));
    assert_eq!(value, int(4));
    assert_valid_for_all_strategies(&ineq);
}

fn check_weights(c: &CorrelationVector, weights: &[Q]) {
    let m = strategy_matrix(&c.parties).unwrap();
    assert!(weights.iter().all(|w| w >= &Q::zero()));
    for r in 0..m.rows() {
        let v = (0..m.cols()).fold(Q::zero(), |acc, s| acc + &weights[s] * int(m.entry(r, s) as i64));
        assert_eq!(v, c.values[r]);
    }
}

#[test]
fn polytope_vertices_and_mixtures_are_feasible() {
    for s in 0..16 {
        let c = CorrelationVector::deterministic(vec![2, 2], s).unwrap();
        let LpVerdict::Feasible { weights } = lp_feasible(&c).unwrap() else { panic!("vertex {s}") };
        check_weights(&c, &weights);
    }
    let m = strategy_matrix(&[2, 2]).unwrap();
    let mut r = rng(11);
    for _ in 0..200 {
        let raw: Vec<i64> = (0..16).map(|_| r.gen_range(0..5)).collect();
        let total: i64 = raw.iter().sum::<i64>().max(1);
        let w: Vec<Q> = if raw.iter().all(|&x| x == 0) {
            (0..16).map(|s| if s == 0 { Q::one() } else { Q::zero() }).collect()
        } else {
            raw.iter().map(|&x| Q::new(BigInt::from(x), BigInt::from(total))).collect()
        };
        let values = (0..m.rows())
            .map(|row| (0..16).fold(Q::zero(), |acc, s| acc + &w[s] * int(m.entry(row, s) as i64)))
            .collect();
        let c = CorrelationVector::new(vec![2, 2], values).unwrap();
        let LpVerdict::Feasible { weights } = lp_feasible(&c).unwrap() else { panic!("mixture") };
        check_weights(&c, &weights);
    }
}

#[test]
fn three_party_ghz_like_correlations_are_infeasible() {
    // Mermin: ⟨XXX⟩ = 1, ⟨XYY⟩ = ⟨YXY⟩ = ⟨YYX⟩ = −1, everything else 0.
    let parties = vec![2, 2, 2];
    let tuples = setting_tuples(&parties);
    let values = tuples
        .iter()
        .map(|t| match t.as_slice() {
            [0, 0, 0] => int(1),
            [1, 1, 1] => int(1),
            [1, 2, 2] | [2, 1, 2] | [2, 2, 1] => int(-1),
            _ => Q::zero(),
        })
        .collect();
    let c = CorrelationVector::new(parties, values).unwrap();
    let (ineq, value) = violated(&c);
    assert!(value > Q::from_integer(ineq.bound.clone()));
    assert_valid_for_all_strategies(&ineq);
}

#[test]
fn rv_inequalities_hold_for_deterministic_strategies() {
    let parties = vec![2, 2];
    let chsh_terms = vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]];
    let families = vec![
        chsh_terms.clone(),
        vec![vec![1, 1], vec![1, 1]],
        vec![vec![1, 0], vec![0, 1], vec![1, 1]],
        vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2], vec![1, 0], vec![1, 0]],
        vec![vec![1, 1], vec![2, 2], vec![1, 2], vec![2, 1], vec![1, 1], vec![1, 1]],
    ];
    let m = strategy_matrix(&parties).unwrap();
    for terms in &families {
        for ineq in rv_inequalities(&parties, terms).unwrap() {
            for s in 0..m.cols() {
                let c = CorrelationVector::deterministic(parties.clone(), s as u64).unwrap();
                assert!(ineq.evaluate(&c).unwrap().satisfied, "{terms:?} fails on strategy {s}");
            }
        }
    }
    // CHSH form, violated by the Tsirelson point.
    let ineqs = rv_inequalities(&parties, &chsh_terms).unwrap();
    let ev = ineqs[3].evaluate(&CorrelationVector::tsirelson()).unwrap();
    assert!((ev.lhs_f64() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    assert!(!ev.satisfied);
    assert!(matches!(
        rv_inequalities(&parties, &[vec![1, 1], vec![1, 2]]),
        Err(BellError::OddObservable { party: 1, setting: 1 })
    ));
    // m = 2 identical terms: |⟨M⟩| − |⟨M⟩| ≤ 0.
    let same = rv_inequalities(&parties, &[vec![2, 1], vec![2, 1]]).unwrap();
    assert_eq!(same[0].evaluate(&CorrelationVector::tsirelson()).unwrap().lhs, Q::zero());
}

/// Experiment: for random 2-party vectors, the m = 4 RV inequalities implying all others up to m = 8.
#[test]
fn two_party_reduction_holds_on_samples() {
    let parties = vec![2, 2];
    let corr: Vec<Vec<usize>> = vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]];
    let mut families = Vec::new();
    for mask in 1u32..(1 << 4) {
        let chosen: Vec<Vec<usize>> = (0..4).filter(|i| mask >> i & 1 == 1).map(|i| corr[i].clone()).collect();
        for extra in [vec![], chosen.clone()] {
            let terms: Vec<Vec<usize>> = chosen.iter().cloned().chain(extra).collect();
            if let Ok(list) = rv_inequalities(&parties, &terms) {
                families.push(list);
            }
        }
    }
    let mut r = rng(5);
    for _ in 0..300 {
        let vals: Vec<f64> = (0..4).map(|_| r.gen_range(-1.0..=1.0)).collect();
        let c = CorrelationVector::two_party(&[
            vec![lp::from_f64(vals[0]), lp::from_f64(vals[1])],
            vec![lp::from_f64(vals[2]), lp::from_f64(vals[3])],
        ])
        .unwrap();
        let four_ok = rv_inequalities(&parties, &corr).unwrap().iter().all(|i| i.evaluate(&c).unwrap().satisfied);
        if four_ok {
            for list in &families {
                assert!(list.iter().all(|i| i.evaluate(&c).unwrap().satisfied));
            }
        }
    }
}

#[test]
fn inequality_on_its_maximizer_hits_bound() {
    let ineq = BellInequality::chsh();
    let m = strategy_matrix(&[2, 2]).unwrap();
    assert!((0..m.cols()).any(|s| {
            let c = CorrelationVector::deterministic(vec![2, 2], s as u64).unwrap();
        ineq.evaluate(&c).unwrap().lhs == Q::from_integer(ineq.bound.clone())
    }));
}
