//! DIMACS serialization.
//!
//! CNF uses the standard `p cnf V C` header. DNF reuses the same clause
//! syntax under a `p dnf V C` header, where each line is a conjunction.
//! Comment lines `c field <f> width <w> offset <o>` precede the header so
//! the variable numbering `1 + offset(f) + bit` can be recovered.

use crate::encoding::Literal;
use crate::error::DimacsError;
use crate::normal_form::{Form, NormalFormExpr};
use crate::policy::FieldConfig;

pub fn emit_dimacs(e: &NormalFormExpr) -> String {
    let config = e.config();
    let mut out = String::new();
    for (f, &w) in config.widths().iter().enumerate() {
        out.push_str(&format!(
            "c field {f} width {w} offset {}\n",
            config.bit_offset(f)
        ));
    }
    out.push_str(&format!(
        "p {} {} {}\n",
        e.form().as_str(),
        e.var_count(),
        e.clause_count()
    ));
    for clause in e.clauses() {
        for lit in clause {
            let idx = i64::from(e.var_index(lit));
            out.push_str(&format!("{} ", if lit.positive { idx } else { -idx }));
        }
        out.push_str("0\n");
    }
    out
}

/// A parsed DIMACS file, clauses kept as signed variable indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimacsFile {
    pub form: Form,
    pub var_count: u32,
    pub clauses: Vec<Vec<i64>>,
    /// Widths recovered from `c field` comments, if present.
    pub field_widths: Option<Vec<u32>>,
}

impl DimacsFile {
    /// Clauses with literals sorted inside each clause and clauses sorted,
    /// for multiset comparison.
    pub fn clause_multiset(&self) -> Vec<Vec<i64>> {
        let mut clauses: Vec<Vec<i64>> = self
            .clauses
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.sort_unstable();
                c
            })
            .collect();
        clauses.sort();
        clauses
    }

    /// Rebuilds the expression. Without field comments the variables are
    /// read as one field of `var_count` bits.
    pub fn to_expr(&self) -> Result<NormalFormExpr, DimacsError> {
        let widths = self
            .field_widths
            .clone()
            .unwrap_or_else(|| vec![self.var_count]);
        let config = FieldConfig::new(widths).map_err(|e| DimacsError::Syntax {
            line: 0,
            msg: e.to_string(),
        })?;
        if config.total_bits() != self.var_count {
            return Err(DimacsError::Syntax {
                line: 0,
                msg: format!(
                    "field widths sum to {} but header declares {} variables",
                    config.total_bits(),
                    self.var_count
                ),
            });
        }
        let offsets: Vec<u32> = (0..config.d()).map(|f| config.bit_offset(f)).collect();
        let clauses = self
            .clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&lit| {
                        let idx = lit.unsigned_abs() as u32 - 1;
                        let field = offsets.partition_point(|&o| o <= idx) - 1;
                        Literal::new(field, idx - offsets[field], lit > 0)
                    })
                    .collect()
            })
            .collect();
        Ok(NormalFormExpr::from_raw(self.form, clauses, config))
    }
}

pub fn parse_dimacs(text: &str) -> Result<DimacsFile, DimacsError> {
    let mut header: Option<(Form, u32, usize)> = None;
    let mut fields: Vec<(usize, u32)> = Vec::new();
    let mut clauses = Vec::new();
    let mut current: Vec<i64> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let syntax = |msg: String| DimacsError::Syntax { line: line_no, msg };
        if let Some(comment) = trimmed.strip_prefix('c') {
            let words: Vec<&str> = comment.split_whitespace().collect();
            if let ["field", f, "width", w, "offset", _] = words.as_slice() {
                let f = f
                    .parse()
                    .map_err(|_| syntax(format!("bad field index '{f}'")))?;
                let w = w.parse().map_err(|_| syntax(format!("bad width '{w}'")))?;
                fields.push((f, w));
            }
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('p') {
            if header.is_some() {
                return Err(syntax("duplicate problem line".to_string()));
            }
            let words: Vec<&str> = rest.split_whitespace().collect();
            let [kind, vars, count] = words.as_slice() else {
                return Err(syntax(
                    "expected 'p <cnf|dnf> <vars> <clauses>'".to_string(),
                ));
            };
            let form = match *kind {
                "cnf" => Form::Cnf,
                "dnf" => Form::Dnf,
                other => return Err(syntax(format!("unknown format '{other}'"))),
            };
            let vars = vars
                .parse()
                .map_err(|_| syntax(format!("bad variable count '{vars}'")))?;
            let count = count
                .parse()
                .map_err(|_| syntax(format!("bad clause count '{count}'")))?;
            header = Some((form, vars, count));
            continue;
        }
        let Some((_, vars, _)) = header else {
            return Err(DimacsError::MissingHeader);
        };
        for word in trimmed.split_whitespace() {
            let lit: i64 = word
                .parse()
                .map_err(|_| syntax(format!("bad literal '{word}'")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() > u64::from(vars) {
                return Err(DimacsError::VariableRange { literal: lit, vars });
            } else {
                current.push(lit);
            }
        }
    }

    let (form, var_count, declared) = header.ok_or(DimacsError::MissingHeader)?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != declared {
        return Err(DimacsError::ClauseCount {
            declared,
            found: clauses.len(),
        });
    }
    fields.sort_unstable();
    let field_widths = (!fields.is_empty()).then(|| fields.into_iter().map(|(_, w)| w).collect());
    Ok(DimacsFile {
        form,
        var_count,
        clauses,
        field_widths,
    })
}
