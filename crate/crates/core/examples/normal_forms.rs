//! Turns a complete decision tree into DNF and CNF, checks both against the
//! tree on every packet, and prints the CNF as DIMACS.

use std::error::Error;
use std::io::{self, Write};

use fwbool::oracle::all_packets;
use fwbool::{
    bound_check, compile, dnf_sat, emit_dimacs, parse_dimacs, parse_policy, tree_to_cnf,
    tree_to_dnf, Action, Budget, FieldConfig,
};

const POLICY: &str = "\
[4,11] [0,3] -> accept
[0,15] [2,2] -> deny
[6,6] [0,15] -> accept
default deny
";

pub fn run(out: &mut dyn Write) -> Result<(), Box<dyn Error>> {
    let config = FieldConfig::parse("4,4")?;
    let policy = parse_policy(POLICY, &config)?;
    let tree = compile(&policy, &config)?.complete;

    let dnf = tree_to_dnf(&tree);
    let cnf = tree_to_cnf(&tree);
    writeln!(out, "dnf: {dnf}")?;
    writeln!(out, "cnf: {cnf}")?;

    let mut checked = 0;
    for packet in all_packets(&config, Budget::default())? {
        let accepted = tree.evaluate(&packet) == Action::Accept;
        if dnf.eval(&packet) != accepted || cnf.eval(&packet) != accepted {
            return Err(format!("disagreement at {packet}").into());
        }
        checked += 1;
    }
    writeln!(out, "dnf and cnf agree with the tree on {checked} packets")?;
    writeln!(out, "dnf satisfiable: {}", dnf_sat(&dnf)?)?;

    for report in [
        bound_check(&dnf, policy.rules.len(), &config),
        bound_check(&cnf, policy.rules.len(), &config),
    ] {
        writeln!(
            out,
            "{}: {} clauses, ceiling {} ({})",
            report.form,
            report.clause_count,
            report.adjusted_bound,
            if report.pass() {
                "within bound"
            } else {
                "OVER BOUND"
            }
        )?;
    }

    let text = emit_dimacs(&cnf);
    let reparsed = parse_dimacs(&text)?;
    writeln!(
        out,
        "dimacs re-parsed: {} clauses over {} variables",
        reparsed.clauses.len(),
        reparsed.var_count
    )?;
    write!(out, "{text}")?;
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run(&mut io::stdout())
}
