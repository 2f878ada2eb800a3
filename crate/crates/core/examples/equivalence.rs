//! Checks a policy against its extracted whitelist and blacklist, and shows
//! the counterexample reported when a rule is reordered.

use std::error::Error;
use std::io::{self, Write};

use fwbool::{
    check_equivalence, check_implication, compile, enumerate_decisions, Action, Budget,
    FieldConfig, Policy, Rule,
};

pub fn run(out: &mut dyn Write) -> Result<(), Box<dyn Error>> {
    let config = FieldConfig::uniform(3, 4)?;
    let policy = Policy::new(
        vec![
            Rule::from_bounds(&[(1, 10), (2, 5), (1, 10)], Action::Accept),
            Rule::from_bounds(&[(3, 15), (3, 4), (1, 10)], Action::Deny),
        ],
        Action::Deny,
    );
    let budget = Budget::default();

    let map = enumerate_decisions(&policy, &config, budget)?;
    writeln!(
        out,
        "{} packets, {} accepted",
        map.len(),
        map.count(Action::Accept)
    )?;

    let tree = compile(&policy, &config)?.complete;
    let whitelist = tree.normal_form_policy(Action::Accept);
    let blacklist = tree.normal_form_policy(Action::Deny);
    writeln!(
        out,
        "policy vs whitelist: {}",
        check_equivalence(&policy, &whitelist, &config, budget)?
    )?;
    writeln!(
        out,
        "policy vs blacklist: {}",
        check_equivalence(&policy, &blacklist, &config, budget)?
    )?;

    let mut swapped = policy.clone();
    swapped.rules.swap(0, 1);
    writeln!(
        out,
        "policy vs swapped rules: {}",
        check_equivalence(&policy, &swapped, &config, budget)?
    )?;
    writeln!(
        out,
        "swapped implies policy: {}",
        check_implication(&swapped, &policy, &config, budget)?
    )?;
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run(&mut io::stdout())
}
