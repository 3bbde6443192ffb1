//! Recurrence classes, stationary laws and the Cesàro limit of finite stochastic matrices.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::model::{Distribution, StochasticMatrix};
use crate::{Error, Result};

/// Entries above this count as edges of the transition digraph.
pub const EDGE_THRESHOLD: f64 = 1e-14;
/// Pivots below this mark the stationary system as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassDecomposition {
    /// Closed irreducible classes, each sorted, ordered by smallest state.
    pub classes: Vec<Vec<usize>>,
    pub transient: Vec<usize>,
    /// `stationary[h][i]` is the mass of `classes[h][i]`.
    pub stationary: Vec<Distribution>,
}

impl ClassDecomposition {
    pub fn class_of(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for (h, c) in self.classes.iter().enumerate() {
            for &x in c {
                out[x] = Some(h);
            }
        }
        out
    }
}

fn successors(p: &StochasticMatrix, x: usize) -> impl Iterator<Item = usize> + '_ {
    p.row(x).iter().enumerate().filter(|(_, &w)| w > EDGE_THRESHOLD).map(|(y, _)| y)
}

/// Strongly connected components of the positive-transition digraph, each sorted.
fn components(p: &StochasticMatrix) -> Vec<Vec<usize>> {
    let n = p.size();
    let mut g = DiGraph::<(), ()>::with_capacity(n, n * n);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for x in 0..n {
        for y in successors(p, x) {
            g.add_edge(nodes[x], nodes[y], ());
        }
    }
    let mut sccs: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|i| i.index()).collect();
            c.sort_unstable();
            c
        })
        .collect();
    sccs.sort_by_key(|c| c[0]);
    sccs
}

/// Recurrence classes are the closed strongly connected components; every other state is
/// transient.
pub fn decompose(p: &StochasticMatrix) -> ClassDecomposition {
    let n = p.size();
    let sccs = components(p);
    let mut comp_of = vec![0; n];
    for (c, members) in sccs.iter().enumerate() {
        for &x in members {
            comp_of[x] = c;
        }
    }
    let mut classes = Vec::new();
    let mut transient = Vec::new();
    for (c, members) in sccs.into_iter().enumerate() {
        let closed = members.iter().all(|&x| successors(p, x).all(|y| comp_of[y] == c));
        if closed {
            classes.push(members);
        } else {
            transient.extend(members);
        }
    }
    transient.sort_unstable();
    let stationary = classes
        .iter()
        .map(|c| stationary_distribution(&restrict(p, c)).expect("closed irreducible classes have a stationary law"))
        .collect();
    ClassDecomposition { classes, transient, stationary }
}

/// Submatrix on `states`, in the given order.
pub fn restrict(p: &StochasticMatrix, states: &[usize]) -> StochasticMatrix {
    StochasticMatrix::new(states.iter().map(|&x| states.iter().map(|&y| p.get(x, y)).collect()).collect())
}

pub fn reachable_from(p: &StochasticMatrix, support: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; p.size()];
    let mut queue: VecDeque<usize> = support.iter().copied().collect();
    for &s in support {
        seen[s] = true;
    }
    while let Some(x) = queue.pop_front() {
        for y in successors(p, x) {
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    seen
}

/// True iff no state reachable from `support` is transient.
pub fn is_recurrent(p: &StochasticMatrix, support: &[usize]) -> bool {
    let reach = reachable_from(p, support);
    transient_states(p).iter().all(|&x| !reach[x])
}

fn transient_states(p: &StochasticMatrix) -> Vec<usize> {
    let sccs = components(p);
    let mut comp_of = vec![0; p.size()];
    for (c, members) in sccs.iter().enumerate() {
        for &x in members {
            comp_of[x] = c;
        }
    }
    sccs.into_iter()
        .enumerate()
        .filter(|(c, members)| !members.iter().all(|&x| successors(p, x).all(|y| comp_of[y] == *c)))
        .flat_map(|(_, m)| m)
        .collect()
}

/// Unique solution of πP = π, Σπ = 1 for an irreducible stochastic matrix, by LU with partial
/// pivoting on the system with one balance equation replaced by the normalization.
pub fn stationary_distribution(p: &StochasticMatrix) -> Result<Distribution> {
    let n = p.size();
    let closed = p.rows().iter().all(|r| (r.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    if n == 0 || !closed || components(p).len() != 1 {
        return Err(Error::Reducible);
    }
    let mut a = DMatrix::<f64>::from_fn(n, n, |i, j| p.get(j, i) - if i == j { 1.0 } else { 0.0 });
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;
    let lu = a.lu();
    let min_pivot = lu.u().diagonal().iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    if min_pivot < SINGULAR_THRESHOLD {
        return Err(Error::Singular(min_pivot));
    }
    let x = lu.solve(&b).ok_or(Error::Singular(0.0))?;
    let w: Vec<f64> = x.iter().map(|&v| v.max(0.0)).collect();
    Ok(Distribution::normalized(w))
}

/// P* = lim (1/n) Σ_{k=1..n} P^k, in closed form: row x of P* is the stationary law of the
/// class containing x.
pub fn cesaro_limit(p: &StochasticMatrix) -> Result<StochasticMatrix> {
    let d = decompose(p);
    if !d.transient.is_empty() {
        return Err(Error::TransientStates(d.transient));
    }
    let n = p.size();
    let mut out = vec![vec![0.0; n]; n];
    for (class, pi) in d.classes.iter().zip(&d.stationary) {
        for &x in class {
            for (&y, &w) in class.iter().zip(pi.weights()) {
                out[x][y] = w;
            }
        }
    }
    Ok(StochasticMatrix::new(out))
}

/// (1/n) Σ_{k=1..n} P^k by repeated multiplication.
pub fn cesaro_average(p: &StochasticMatrix, n: usize) -> StochasticMatrix {
    let size = p.size();
    let mut power = p.clone();
    let mut sum = vec![vec![0.0; size]; size];
    for k in 1..=n {
        for (s, r) in sum.iter_mut().zip(power.rows()) {
            for (a, b) in s.iter_mut().zip(r) {
                *a += b;
            }
        }
        if k < n {
            power = power.mul(p);
        }
    }
    StochasticMatrix::new(sum.into_iter().map(|r| r.into_iter().map(|v| v / n as f64).collect()).collect())
}

/// max |πP − π| for a candidate stationary vector on the full matrix.
pub fn stationary_residual(p: &StochasticMatrix, pi: &[f64]) -> f64 {
    (0..p.size())
        .map(|j| ((0..p.size()).map(|i| pi[i] * p.get(i, j)).sum::<f64>() - pi[j]).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[f64]]) -> StochasticMatrix {
        StochasticMatrix::new(rows.iter().map(|r| r.to_vec()).collect())
    }

    fn cycle() -> StochasticMatrix {
        m(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    #[test]
    fn identity_gives_singletons() {
        let d = decompose(&StochasticMatrix::identity(3));
        assert_eq!(d.classes, vec![vec![0], vec![1], vec![2]]);
        assert!(d.transient.is_empty());
        assert!(is_recurrent(&StochasticMatrix::identity(3), &[0, 2]));
    }

    #[test]
    fn cycle_is_one_class() {
        let d = decompose(&cycle());
        assert_eq!(d.classes, vec![vec![0, 1]]);
        assert_eq!(d.stationary[0].weights(), &[0.5, 0.5]);
    }

    #[test]
    fn transient_state_detected() {
        let p = m(&[&[0.5, 0.5, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let d = decompose(&p);
        assert_eq!(d.classes, vec![vec![1], vec![2]]);
        assert_eq!(d.transient, vec![0]);
        assert!(!is_recurrent(&p, &[0]));
        assert!(is_recurrent(&p, &[1, 2]));
        assert!(matches!(cesaro_limit(&p), Err(Error::TransientStates(t)) if t == vec![0]));
    }

    #[test]
    fn direct_sum_is_recurrent() {
        let p = StochasticMatrix::direct_sum(&[cycle(), m(&[&[0.9, 0.1], &[0.5, 0.5]])]);
        assert!(is_recurrent(&p, &[0, 1, 2, 3]));
    }

    #[test]
    fn stationary_values() {
        let pi = stationary_distribution(&m(&[&[0.9, 0.1], &[0.5, 0.5]])).unwrap();
        assert!((pi.weights()[0] - 5.0 / 6.0).abs() < 1e-14);
        assert!((pi.weights()[1] - 1.0 / 6.0).abs() < 1e-14);
        let rows = m(&[&[0.2, 0.3, 0.5], &[0.2, 0.3, 0.5], &[0.2, 0.3, 0.5]]);
        let pi = stationary_distribution(&rows).unwrap();
        for (a, b) in pi.weights().iter().zip([0.2, 0.3, 0.5]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(matches!(stationary_distribution(&StochasticMatrix::identity(2)), Err(Error::Reducible)));
    }

    #[test]
    fn cesaro_of_identity_cycle_and_sum() {
        assert_eq!(cesaro_limit(&StochasticMatrix::identity(2)).unwrap(), StochasticMatrix::identity(2));
        let half = m(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!(cesaro_limit(&cycle()).unwrap().max_abs_diff(&half) < 1e-15);
        let sum = StochasticMatrix::direct_sum(&[StochasticMatrix::identity(2), cycle()]);
        let expected = StochasticMatrix::direct_sum(&[StochasticMatrix::identity(2), half]);
        assert!(cesaro_limit(&sum).unwrap().max_abs_diff(&expected) < 1e-15);
        // averaging converges like 1/n on the periodic block
        assert!(cesaro_average(&cycle(), 1000).max_abs_diff(&m(&[&[0.5, 0.5], &[0.5, 0.5]])) <= 1e-3);
    }

    fn arb_block(max: usize) -> impl Strategy<Value = StochasticMatrix> {
        (1..=max).prop_flat_map(|n| {
            prop::collection::vec(prop::collection::vec(0.01f64..1.0, n), n).prop_map(|rows| {
                StochasticMatrix::from_rows(rows.into_iter().map(Distribution::normalized).collect())
            })
        })
    }

    proptest! {
        #[test]
        fn cesaro_is_idempotent_and_invariant(a in arb_block(3), b in arb_block(3)) {
            let p = StochasticMatrix::direct_sum(&[a.clone(), b.clone()]);
            let star = cesaro_limit(&p).unwrap();
            prop_assert!(cesaro_limit(&star).unwrap().max_abs_diff(&star) < 1e-10);
            prop_assert!(p.mul(&star).max_abs_diff(&star) < 1e-10);
            prop_assert!(star.mul(&p).max_abs_diff(&star) < 1e-10);
            let d = decompose(&p);
            prop_assert_eq!(&d.classes, &vec![(0..a.size()).collect::<Vec<_>>(), (a.size()..p.size()).collect()]);
            for (c, pi) in d.classes.iter().zip(&d.stationary) {
                let mut full = vec![0.0; p.size()];
                for (&x, &w) in c.iter().zip(pi.weights()) { full[x] = w; }
                prop_assert!(stationary_residual(&p, &full) < 1e-10);
            }
        }
    }
}
