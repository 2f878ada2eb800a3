//! Compiles the two-rule policy
//!
//! ```text
//! [1,10] [2,5] [1,10] -> accept
//! [3,15] [3,4] [1,10] -> deny
//! default deny
//! ```
//!
//! over three 4-bit fields and prints each stage: the raw tree, the grouped
//! tree, the completed tree, and the whitelist and blacklist read off it.

use std::error::Error;
use std::io::{self, Write};

use fwbool::{compile, parse_policy, Action, FieldConfig};

const POLICY: &str = "\
[1,10] [2,5] [1,10] -> accept
[3,15] [3,4] [1,10] -> deny
default deny
";

pub fn run(out: &mut dyn Write) -> Result<(), Box<dyn Error>> {
    let config = FieldConfig::parse("4,4,4")?;
    let policy = parse_policy(POLICY, &config)?;
    let compiled = compile(&policy, &config)?;

    writeln!(
        out,
        "== built ({} leaves)",
        compiled.built.stats().leaf_count
    )?;
    write!(out, "{}", compiled.built.dump())?;
    writeln!(
        out,
        "== grouped ({} leaves)",
        compiled.grouped.stats().leaf_count
    )?;
    write!(out, "{}", compiled.grouped.dump())?;
    writeln!(
        out,
        "== complete ({} leaves)",
        compiled.complete.stats().leaf_count
    )?;
    write!(out, "{}", compiled.complete.dump())?;
    writeln!(out, "== whitelist")?;
    write!(
        out,
        "{}",
        compiled
            .complete
            .normal_form_policy(Action::Accept)
            .to_text()
    )?;
    writeln!(out, "== blacklist")?;
    write!(
        out,
        "{}",
        compiled.complete.normal_form_policy(Action::Deny).to_text()
    )?;
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run(&mut io::stdout())
}
