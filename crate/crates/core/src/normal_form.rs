//! DNF and CNF expressions over per-field bit variables, extracted from
//! complete decision trees.
//!
//! Zero clauses is the identity of the form's outer connective (false for
//! DNF, true for CNF). An empty clause is its absorbing element (a true
//! conjunction in DNF, a false disjunction in CNF).

use std::fmt;

use crate::encoding::{canonical_cover, Literal, Prefix};
use crate::error::FormError;
use crate::policy::{Action, FieldConfig, Packet};
use crate::tree::CompleteDecisionTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Form {
    /// Conjunction of disjunctive clauses.
    Cnf,
    /// Disjunction of conjunctive clauses.
    Dnf,
}

impl Form {
    pub fn as_str(self) -> &'static str {
        match self {
            Form::Cnf => "cnf",
            Form::Dnf => "dnf",
        }
    }

    fn dual(self) -> Form {
        match self {
            Form::Cnf => Form::Dnf,
            Form::Dnf => Form::Cnf,
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub type Clause = Vec<Literal>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormExpr {
    form: Form,
    clauses: Vec<Clause>,
    config: FieldConfig,
}

impl NormalFormExpr {
    /// Sorts and deduplicates the literals of each clause and drops clauses
    /// holding both polarities of a variable: such a clause is a tautology
    /// in CNF and a contradiction in DNF, neutral under the outer
    /// connective either way.
    pub fn new(form: Form, clauses: Vec<Clause>, config: FieldConfig) -> Self {
        let clauses = clauses
            .into_iter()
            .filter_map(|mut clause| {
                clause.sort();
                clause.dedup();
                let complementary = clause
                    .windows(2)
                    .any(|w| w[0].var == w[1].var && w[0].positive != w[1].positive);
                (!complementary).then_some(clause)
            })
            .collect();
        NormalFormExpr {
            form,
            clauses,
            config,
        }
    }

    /// Keeps the clauses exactly as given, contradictory ones included.
    pub fn from_raw(form: Form, clauses: Vec<Clause>, config: FieldConfig) -> Self {
        NormalFormExpr {
            form,
            clauses,
            config,
        }
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn config(&self) -> &FieldConfig {
        &self.config
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn var_count(&self) -> u32 {
        self.config.total_bits()
    }

    /// 1-based DIMACS index of a literal's variable.
    pub fn var_index(&self, lit: &Literal) -> u32 {
        1 + self.config.bit_offset(lit.var.field) + lit.var.bit
    }

    pub fn max_clause_len(&self) -> usize {
        self.clauses.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// De Morgan: flips the form tag and every literal's polarity.
    pub fn negate(&self) -> NormalFormExpr {
        NormalFormExpr {
            form: self.form.dual(),
            clauses: self
                .clauses
                .iter()
                .map(|c| c.iter().map(|l| l.negated()).collect())
                .collect(),
            config: self.config.clone(),
        }
    }

    pub fn eval(&self, packet: &Packet) -> bool {
        let values = packet.values();
        let widths = self.config.widths();
        let lit_true = |l: &Literal| l.holds_for(values[l.var.field], widths[l.var.field]);
        match self.form {
            Form::Dnf => self.clauses.iter().any(|c| c.iter().all(lit_true)),
            Form::Cnf => self.clauses.iter().all(|c| c.iter().any(lit_true)),
        }
    }
}

impl fmt::Display for NormalFormExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (inner, outer, empty_clause, no_clauses) = match self.form {
            Form::Dnf => (" & ", " | ", "true", "false"),
            Form::Cnf => (" | ", " & ", "false", "true"),
        };
        if self.clauses.is_empty() {
            return f.write_str(no_clauses);
        }
        for (i, clause) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(outer)?;
            }
            if clause.is_empty() {
                f.write_str(empty_clause)?;
                continue;
            }
            f.write_str("(")?;
            for (j, lit) in clause.iter().enumerate() {
                if j > 0 {
                    f.write_str(inner)?;
                }
                write!(f, "{lit}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Satisfaction relation; linear in the size of the expression.
pub fn eval_expr(e: &NormalFormExpr, packet: &Packet) -> bool {
    e.eval(packet)
}

/// DNF of the packets reaching `target`: for each path ending in `target`,
/// one conjunction per combination of the edges' canonical prefixes.
fn paths_to_dnf(tree: &CompleteDecisionTree, target: Action) -> NormalFormExpr {
    let config = tree.config();
    let mut clauses = Vec::new();
    for path in tree.extract_rules(target) {
        let covers: Vec<Vec<Prefix>> = path
            .predicate
            .iter()
            .enumerate()
            .map(|(f, iv)| {
                canonical_cover(*iv, f, config)
                    .expect("tree edges lie within their field domain")
                    .prefixes
            })
            .collect();
        let mut choice = vec![0usize; covers.len()];
        'product: loop {
            let clause: Clause = covers
                .iter()
                .zip(&choice)
                .flat_map(|(cover, &i)| cover[i].term())
                .collect();
            clauses.push(clause);
            for f in (0..covers.len()).rev() {
                choice[f] += 1;
                if choice[f] < covers[f].len() {
                    continue 'product;
                }
                choice[f] = 0;
            }
            break;
        }
    }
    NormalFormExpr::new(Form::Dnf, clauses, config.clone())
}

/// DNF satisfied by exactly the accepted packets.
pub fn tree_to_dnf(tree: &CompleteDecisionTree) -> NormalFormExpr {
    paths_to_dnf(tree, Action::Accept)
}

/// CNF satisfied by exactly the accepted packets: the negated DNF of the
/// denied packets.
pub fn tree_to_cnf(tree: &CompleteDecisionTree) -> NormalFormExpr {
    paths_to_dnf(tree, Action::Deny).negate()
}

pub fn negate_dnf(e: &NormalFormExpr) -> Result<NormalFormExpr, FormError> {
    if e.form != Form::Dnf {
        return Err(FormError::WrongForm {
            expected: "dnf",
            found: e.form.as_str(),
        });
    }
    Ok(e.negate())
}

/// Clause-count and clause-size ceilings for an expression compiled from
/// `rules` rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub form: Form,
    pub clause_count: usize,
    /// `(2 max w)^d (2n - 1)^d`, the ceiling for trees before completion.
    pub nominal_bound: u128,
    /// `(2 max w)^d (2n + 1)^d`, accounting for the default-action leaves.
    pub adjusted_bound: u128,
    pub max_clause_len: usize,
    /// One literal per bit variable, `sum w`.
    pub literal_ceiling: u32,
}

impl BoundReport {
    pub fn nominal_pass(&self) -> bool {
        self.clause_count as u128 <= self.nominal_bound
    }

    pub fn adjusted_pass(&self) -> bool {
        self.clause_count as u128 <= self.adjusted_bound
    }

    pub fn literal_pass(&self) -> bool {
        self.max_clause_len as u128 <= u128::from(self.literal_ceiling)
    }

    pub fn pass(&self) -> bool {
        self.adjusted_pass() && self.literal_pass()
    }
}

fn saturating_pow(base: u128, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base))
}

/// `(2 max w)^d (2n - 1)^d`. With no rules the default action alone still
/// yields one leaf, so `2n - 1` is floored at one.
pub fn nominal_clause_bound(rules: usize, config: &FieldConfig) -> u128 {
    let per_leaf = 2 * u128::from(*config.widths().iter().max().unwrap());
    let leaves = (2 * rules as u128).saturating_sub(1).max(1);
    saturating_pow(per_leaf, config.d()).saturating_mul(saturating_pow(leaves, config.d()))
}

pub fn adjusted_clause_bound(rules: usize, config: &FieldConfig) -> u128 {
    let per_leaf = 2 * u128::from(*config.widths().iter().max().unwrap());
    let leaves = 2 * rules as u128 + 1;
    saturating_pow(per_leaf, config.d()).saturating_mul(saturating_pow(leaves, config.d()))
}

/// Leaf ceiling `(2n - 1)^d` for a tree built from `rules` rules.
pub fn built_leaf_bound(rules: usize, d: usize) -> u128 {
    saturating_pow((2 * rules as u128).saturating_sub(1), d)
}

/// Leaf ceiling `(2n + 1)^d` once the default action has been added.
pub fn complete_leaf_bound(rules: usize, d: usize) -> u128 {
    saturating_pow(2 * rules as u128 + 1, d)
}

pub fn bound_check(e: &NormalFormExpr, rules: usize, config: &FieldConfig) -> BoundReport {
    BoundReport {
        form: e.form,
        clause_count: e.clause_count(),
        nominal_bound: nominal_clause_bound(rules, config),
        adjusted_bound: adjusted_clause_bound(rules, config),
        max_clause_len: e.max_clause_len(),
        literal_ceiling: config.total_bits(),
    }
}
