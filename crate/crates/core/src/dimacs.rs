//! DIMACS CNF reading and writing, restricted to width-2 clauses.
//!
//! Clause order and the order of the two literals within a clause are
//! preserved exactly: WalkSAT's position draw `h` in `{1, 2}` must survive
//! serialization.

use thiserror::Error;

use crate::cnf::{Clause, CnfError, Formula, Literal};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimacsError {
    #[error("missing 'p cnf <vars> <clauses>' header")]
    MissingHeader,
    #[error("malformed header line: {line:?}")]
    MalformedHeader { line: String },
    #[error("unexpected token {token:?}")]
    BadToken { token: String },
    #[error("literal {literal} out of range for {n} variables")]
    LiteralOutOfRange { literal: i64, n: u32 },
    #[error("clause {index} has width {width}, expected 2")]
    BadClauseWidth { index: usize, width: usize },
    #[error("clause {index} repeats variable x{variable}")]
    RepeatedVariable { index: usize, variable: u32 },
    #[error("header promises {expected} clauses, found {found}")]
    ClauseCountMismatch { expected: usize, found: usize },
    #[error("unterminated final clause")]
    UnterminatedClause,
}

/// Parse standard DIMACS CNF text with exactly two distinct variables per
/// clause. Comment lines (`c ...`) are skipped.
pub fn parse_dimacs(text: &str) -> Result<Formula, DimacsError> {
    let mut lines = text.lines().filter(|l| !l.trim_start().starts_with('c'));
    let header = lines
        .find(|l| !l.trim().is_empty())
        .ok_or(DimacsError::MissingHeader)?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (n, m) = match fields.as_slice() {
        ["p", "cnf", n, m] => (
            n.parse::<u32>().map_err(|_| DimacsError::MalformedHeader {
                line: header.to_string(),
            })?,
            m.parse::<usize>().map_err(|_| DimacsError::MalformedHeader {
                line: header.to_string(),
            })?,
        ),
        _ => {
            return Err(DimacsError::MalformedHeader {
                line: header.to_string(),
            })
        }
    };

    let mut clauses = Vec::with_capacity(m);
    let mut current: Vec<Literal> = Vec::with_capacity(2);
    for token in lines.flat_map(|l| l.split_whitespace()) {
        let value: i64 = token
            .parse()
            .map_err(|_| DimacsError::BadToken {
                token: token.to_string(),
            })?;
        if value == 0 {
            let index = clauses.len();
            if current.len() != 2 {
                return Err(DimacsError::BadClauseWidth {
                    index,
                    width: current.len(),
                });
            }
            let clause = Clause::new(current[0], current[1]).map_err(|e| match e {
                CnfError::RepeatedVariable { variable } => {
                    DimacsError::RepeatedVariable { index, variable }
                }
                _ => unreachable!("Clause::new only reports repeated variables"),
            })?;
            clauses.push(clause);
            current.clear();
        } else {
            let literal =
                Literal::from_dimacs(value).ok_or(DimacsError::BadToken {
                    token: token.to_string(),
                })?;
            if literal.variable() > n {
                return Err(DimacsError::LiteralOutOfRange { literal: value, n });
            }
            if current.len() == 2 {
                // Width > 2; report once the clause terminates so the count
                // in the message is accurate.
                current.push(literal);
                continue;
            }
            current.push(literal);
        }
    }
    if !current.is_empty() {
        return Err(DimacsError::UnterminatedClause);
    }
    if clauses.len() != m {
        return Err(DimacsError::ClauseCountMismatch {
            expected: m,
            found: clauses.len(),
        });
    }
    Ok(Formula::new(n, clauses).expect("literal range checked during parsing"))
}

/// Canonical DIMACS text: header, then one zero-terminated clause per line in
/// clause index order.
pub fn write_dimacs(formula: &Formula) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "p cnf {} {}\n",
        formula.num_variables(),
        formula.num_clauses()
    ));
    for clause in formula.clauses() {
        out.push_str(&format!(
            "{} {} 0\n",
            clause.first().to_dimacs(),
            clause.second().to_dimacs()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_simple_formula() {
        let f = parse_dimacs("p cnf 2 1\n1 -2 0\n").unwrap();
        assert_eq!(f.num_variables(), 2);
        assert_eq!(f.num_clauses(), 1);
        assert_eq!(f.clause(0).first(), Literal::positive(1));
        assert_eq!(f.clause(0).second(), Literal::negative(2));
    }

    #[test]
    fn rejects_repeated_variable() {
        let err = parse_dimacs("p cnf 2 1\n1 1 0\n").unwrap_err();
        assert_eq!(
            err,
            DimacsError::RepeatedVariable {
                index: 0,
                variable: 1
            }
        );
    }

    #[test]
    fn rejects_wrong_width() {
        assert!(matches!(
            parse_dimacs("p cnf 3 1\n1 2 3 0\n").unwrap_err(),
            DimacsError::BadClauseWidth { width: 3, .. }
        ));
        assert!(matches!(
            parse_dimacs("p cnf 3 1\n1 0\n").unwrap_err(),
            DimacsError::BadClauseWidth { width: 1, .. }
        ));
    }

    #[test]
    fn rejects_out_of_range_literal() {
        assert_eq!(
            parse_dimacs("p cnf 2 1\n1 -3 0\n").unwrap_err(),
            DimacsError::LiteralOutOfRange { literal: -3, n: 2 }
        );
    }

    #[test]
    fn rejects_malformed_header() {
        assert!(matches!(
            parse_dimacs("p dnf 2 1\n1 2 0\n").unwrap_err(),
            DimacsError::MalformedHeader { .. }
        ));
        assert_eq!(parse_dimacs("").unwrap_err(), DimacsError::MissingHeader);
    }

    #[test]
    fn rejects_clause_count_mismatch() {
        assert_eq!(
            parse_dimacs("p cnf 2 2\n1 2 0\n").unwrap_err(),
            DimacsError::ClauseCountMismatch {
                expected: 2,
                found: 1
            }
        );
    }

    #[test]
    fn skips_comments_and_blank_lines() {
        let f = parse_dimacs("c hello\n\np cnf 2 1\nc mid\n-1 2 0\n").unwrap();
        assert_eq!(f.num_clauses(), 1);
    }

    #[test]
    fn round_trip_is_canonical() {
        let text = "c comment\np cnf 3 2\n1 -2 0\n-3   1 0\n";
        let f = parse_dimacs(text).unwrap();
        let written = write_dimacs(&f);
        assert_eq!(written, "p cnf 3 2\n1 -2 0\n-3 1 0\n");
        let reparsed = parse_dimacs(&written).unwrap();
        assert_eq!(write_dimacs(&reparsed), written);
    }
}
