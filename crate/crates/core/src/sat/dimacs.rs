//! DIMACS CNF text format.

use std::fmt::Write as _;

use thiserror::Error;

use super::CnfInstance;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {0}: {1}")]
    Syntax(usize, String),
    #[error("missing \"p cnf\" header")]
    MissingHeader,
}

/// Renders the instance with a `p cnf` header and zero-terminated clauses.
pub fn emit_dimacs(cnf: &CnfInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p cnf {} {}", cnf.var_count, cnf.clauses.len());
    for clause in &cnf.clauses {
        for lit in clause {
            let _ = write!(out, "{lit} ");
        }
        out.push_str("0\n");
    }
    out
}

/// Parses DIMACS text; comment lines start with `c`.
pub fn parse_dimacs(text: &str) -> Result<CnfInstance, DimacsError> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError::Syntax(line_no, "duplicate header".into()));
            }
            let mut parts = line.split_whitespace();
            parts.next();
            if parts.next() != Some("cnf") {
                return Err(DimacsError::Syntax(line_no, "expected \"p cnf\"".into()));
            }
            let vars = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| DimacsError::Syntax(line_no, "bad variable count".into()))?;
            let count = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| DimacsError::Syntax(line_no, "bad clause count".into()))?;
            header = Some((vars, count));
            continue;
        }
        if header.is_none() {
            return Err(DimacsError::MissingHeader);
        }
        for tok in line.split_whitespace() {
            let lit: i32 = tok
                .parse()
                .map_err(|_| DimacsError::Syntax(line_no, format!("bad literal \"{tok}\"")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(lit);
            }
        }
    }
    let (var_count, declared) = header.ok_or(DimacsError::MissingHeader)?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != declared {
        return Err(DimacsError::Syntax(
            0,
            format!("header declares {declared} clauses, found {}", clauses.len()),
        ));
    }
    Ok(CnfInstance { var_count, atlas_vars: var_count, clauses })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_unit_instance() {
        let cnf = CnfInstance { var_count: 1, atlas_vars: 1, clauses: vec![vec![1]] };
        assert_eq!(emit_dimacs(&cnf), "p cnf 1 1\n1 0\n");
    }

    #[test]
    fn round_trip_preserves_the_clause_multiset() {
        let cnf = CnfInstance {
            var_count: 4,
            atlas_vars: 4,
            clauses: vec![vec![1, -2], vec![3, 4, -1], vec![1, -2], vec![-4]],
        };
        let parsed = parse_dimacs(&emit_dimacs(&cnf)).unwrap();
        assert_eq!(parsed.var_count, 4);
        assert_eq!(parsed.clauses, cnf.clauses);
    }

    #[test]
    fn comments_and_split_clauses_parse() {
        let text = "c generated\np cnf 3 2\n1 -2\n3 0 2 0\n";
        let parsed = parse_dimacs(text).unwrap();
        assert_eq!(parsed.clauses, vec![vec![1, -2, 3], vec![2]]);
    }

    #[test]
    fn clause_count_mismatch_is_an_error() {
        let text = "p cnf 1 2\n1 0\n";
        assert!(parse_dimacs(text).is_err());
    }
}
