//! Exact 2-SAT oracles: the linear-time strongly-connected-components
//! solver on the implication digraph, and exhaustive enumeration for small
//! instances.

use thiserror::Error;

use crate::cnf::{Assignment, Formula, Literal};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("brute force enumeration is limited to 24 variables, got {n}")]
    TooManyVariables { n: u32 },
}

/// Verdict of an exact solver. Satisfying assignments are verified against
/// the formula before being returned; the UNSAT witness is a variable that
/// shares a strongly connected component with its own negation (known for
/// the SCC solver, absent for enumeration).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatCertificate {
    Satisfiable(Assignment),
    Unsatisfiable { witness_variable: Option<u32> },
}

impl SatCertificate {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatCertificate::Satisfiable(_))
    }

    pub fn assignment(&self) -> Option<&Assignment> {
        match self {
            SatCertificate::Satisfiable(a) => Some(a),
            SatCertificate::Unsatisfiable { .. } => None,
        }
    }
}

/// Implication digraph in CSR form: node per literal, arcs ¬l1 → l2 and
/// ¬l2 → l1 per clause l1 ∨ l2.
struct ImplicationGraph {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl ImplicationGraph {
    fn build(formula: &Formula) -> Self {
        let nodes = 2 * formula.num_variables() as usize;
        let mut degree = vec![0u32; nodes];
        for clause in formula.clauses() {
            degree[clause.first().negated().index()] += 1;
            degree[clause.second().negated().index()] += 1;
        }
        let mut offsets = vec![0u32; nodes + 1];
        for i in 0..nodes {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0u32; 2 * formula.num_clauses()];
        for clause in formula.clauses() {
            for (from, to) in [
                (clause.first().negated(), clause.second()),
                (clause.second().negated(), clause.first()),
            ] {
                targets[cursor[from.index()] as usize] = to.index() as u32;
                cursor[from.index()] += 1;
            }
        }
        ImplicationGraph { offsets, targets }
    }

    fn successors(&self, node: u32) -> &[u32] {
        &self.targets[self.offsets[node as usize] as usize..self.offsets[node as usize + 1] as usize]
    }
}

const UNVISITED: u32 = u32::MAX;

/// Iterative Tarjan; component ids are assigned in completion order, so a
/// smaller id means later in the topological order of the condensation.
fn tarjan_components(graph: &ImplicationGraph, nodes: usize, root_order: impl Iterator<Item = u32>) -> Vec<u32> {
    let mut index = vec![UNVISITED; nodes];
    let mut lowlink = vec![0u32; nodes];
    let mut component = vec![UNVISITED; nodes];
    let mut on_stack = vec![false; nodes];
    let mut stack: Vec<u32> = Vec::new();
    // frames of (node, next successor offset)
    let mut frames: Vec<(u32, u32)> = Vec::new();
    let mut next_index = 0u32;
    let mut next_component = 0u32;

    for root in root_order {
        if index[root as usize] != UNVISITED {
            continue;
        }
        frames.push((root, 0));
        index[root as usize] = next_index;
        lowlink[root as usize] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(frame) = frames.last_mut() {
            let node = frame.0;
            let successors = graph.successors(node);
            if (frame.1 as usize) < successors.len() {
                let target = successors[frame.1 as usize];
                frame.1 += 1;
                if index[target as usize] == UNVISITED {
                    index[target as usize] = next_index;
                    lowlink[target as usize] = next_index;
                    next_index += 1;
                    stack.push(target);
                    on_stack[target as usize] = true;
                    frames.push((target, 0));
                } else if on_stack[target as usize] {
                    lowlink[node as usize] = lowlink[node as usize].min(index[target as usize]);
                }
            } else {
                frames.pop();
                if let Some(parent) = frames.last() {
                    let p = parent.0 as usize;
                    lowlink[p] = lowlink[p].min(lowlink[node as usize]);
                }
                if lowlink[node as usize] == index[node as usize] {
                    loop {
                        let member = stack.pop().expect("scc stack underflow");
                        on_stack[member as usize] = false;
                        component[member as usize] = next_component;
                        if member == node {
                            break;
                        }
                    }
                    next_component += 1;
                }
            }
        }
    }
    component
}

/// SCC-based exact 2-SAT: UNSAT iff some variable shares a component with
/// its negation; otherwise each variable takes the value whose literal sits
/// later in topological order. DFS roots visit each positive literal before
/// the negative one, which resolves unconstrained variables toward true.
pub fn solve_2sat(formula: &Formula) -> SatCertificate {
    let n = formula.num_variables();
    let nodes = 2 * n as usize;
    let graph = ImplicationGraph::build(formula);
    let roots = (1..=n).flat_map(|v| {
        [
            Literal::positive(v).index() as u32,
            Literal::negative(v).index() as u32,
        ]
    });
    let component = tarjan_components(&graph, nodes, roots);

    let mut values = Vec::with_capacity(n as usize);
    for v in 1..=n {
        let pos = component[Literal::positive(v).index()];
        let neg = component[Literal::negative(v).index()];
        if pos == neg {
            return SatCertificate::Unsatisfiable {
                witness_variable: Some(v),
            };
        }
        values.push(if pos < neg { 1 } else { -1 });
    }
    let assignment = Assignment::from_values(values).expect("values are ±1");
    assert!(
        formula.is_satisfied_by(&assignment),
        "SCC solver produced a non-satisfying assignment"
    );
    SatCertificate::Satisfiable(assignment)
}

/// Exhaustive oracle for n <= 24. Returns the first satisfying assignment in
/// an order that starts from all-true and treats variable 1 as the most
/// significant digit with true before false.
pub fn brute_force_sat(formula: &Formula) -> Result<SatCertificate, SolveError> {
    let n = formula.num_variables();
    if n > 24 {
        return Err(SolveError::TooManyVariables { n });
    }
    for mask in 0u32..1u32 << n {
        let values: Vec<i8> = (0..n)
            .map(|i| if mask >> (n - 1 - i) & 1 == 0 { 1 } else { -1 })
            .collect();
        let assignment = Assignment::from_values(values).expect("values are ±1");
        if formula.is_satisfied_by(&assignment) {
            return Ok(SatCertificate::Satisfiable(assignment));
        }
    }
    Ok(SatCertificate::Unsatisfiable {
        witness_variable: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{generate_random_2cnf, Clause};

    fn formula(n: u32, spec: &[(i64, i64)]) -> Formula {
        let clauses = spec
            .iter()
            .map(|&(a, b)| {
                Clause::new(
                    Literal::from_dimacs(a).unwrap(),
                    Literal::from_dimacs(b).unwrap(),
                )
                .unwrap()
            })
            .collect();
        Formula::new(n, clauses).unwrap()
    }

    #[test]
    fn four_sign_patterns_are_unsat() {
        let f = formula(2, &[(1, 2), (1, -2), (-1, 2), (-1, -2)]);
        let cert = solve_2sat(&f);
        assert!(matches!(
            cert,
            SatCertificate::Unsatisfiable {
                witness_variable: Some(_)
            }
        ));
        assert!(!brute_force_sat(&f).unwrap().is_sat());
    }

    #[test]
    fn empty_formula_prefers_all_true() {
        let f = formula(3, &[]);
        match solve_2sat(&f) {
            SatCertificate::Satisfiable(a) => assert_eq!(a.values(), &[1, 1, 1]),
            _ => panic!("empty formula must be SAT"),
        }
        match brute_force_sat(&f).unwrap() {
            SatCertificate::Satisfiable(a) => assert_eq!(a.values(), &[1, 1, 1]),
            _ => panic!("empty formula must be SAT"),
        }
    }

    #[test]
    fn chain_is_satisfiable() {
        let f = formula(3, &[(-1, 2), (-2, 3)]);
        let cert = solve_2sat(&f);
        let a = cert.assignment().unwrap();
        assert!(f.is_satisfied_by(a));
    }

    #[test]
    fn brute_force_rejects_large_n() {
        let f = generate_random_2cnf(30, 10, 0).unwrap();
        assert_eq!(
            brute_force_sat(&f).unwrap_err(),
            SolveError::TooManyVariables { n: 30 }
        );
    }

    #[test]
    fn agrees_with_brute_force_on_random_instances() {
        use rand::Rng;
        let mut rng = crate::rng::stream(77);
        for _ in 0..500 {
            let n = rng.random_range(2..=8u32);
            let m = rng.random_range(0..=16usize);
            let f = generate_random_2cnf(n, m, rng.random::<u64>()).unwrap();
            let scc = solve_2sat(&f);
            let brute = brute_force_sat(&f).unwrap();
            assert_eq!(scc.is_sat(), brute.is_sat(), "verdict mismatch");
            if let SatCertificate::Satisfiable(a) = &scc {
                assert!(f.is_satisfied_by(a));
            }
        }
    }
}
