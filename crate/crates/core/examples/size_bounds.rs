//! Compiles random policies of growing size and prints leaf and clause
//! counts next to their polynomial ceilings.

use std::error::Error;
use std::io::{self, Write};

use fwbool::cli::stats_report;
use fwbool::normal_form::{built_leaf_bound, complete_leaf_bound};
use fwbool::{bound_check, compile, tree_to_cnf, tree_to_dnf, FieldConfig, Policy};
use rand::rngs::StdRng;
use rand::SeedableRng;

pub fn run(out: &mut dyn Write) -> Result<(), Box<dyn Error>> {
    let config = FieldConfig::uniform(3, 4)?;
    let mut rng = StdRng::seed_from_u64(7);
    writeln!(
        out,
        "n  built/bound  complete/bound  dnf  cnf  clause-ceiling"
    )?;
    for n in [1, 2, 4, 8, 16, 32] {
        let policy = Policy::random(&mut rng, &config, n);
        let compiled = compile(&policy, &config)?;
        let dnf = bound_check(&tree_to_dnf(&compiled.complete), n, &config);
        let cnf = bound_check(&tree_to_cnf(&compiled.complete), n, &config);
        writeln!(
            out,
            "{n:<2} {}/{}  {}/{}  {}  {}  {}",
            compiled.built.stats().leaf_count,
            built_leaf_bound(n, config.d()),
            compiled.complete.stats().leaf_count,
            complete_leaf_bound(n, config.d()),
            dnf.clause_count,
            cnf.clause_count,
            dnf.adjusted_bound,
        )?;
        if !(dnf.pass() && cnf.pass()) {
            return Err(format!("bound violated at n = {n}").into());
        }
    }
    writeln!(out)?;
    let policy = Policy::random(&mut rng, &config, 10);
    write!(out, "{}", stats_report(&policy, &config)?)?;
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run(&mut io::stdout())
}
