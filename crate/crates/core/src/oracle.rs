//! Exhaustive packet-space enumeration.
//!
//! Packets are ordered lexicographically, field 0 most significant, which is
//! also the order of their mixed-radix index. Searches run in parallel but
//! always report the smallest matching index, so counterexamples are
//! reproducible.

use std::fmt;

use rayon::prelude::*;

use crate::error::{FormError, OracleError};
use crate::normal_form::{Form, NormalFormExpr};
use crate::policy::{Action, FieldConfig, Packet, Policy};

pub const DEFAULT_BUDGET: u128 = 1 << 24;

/// Upper limit on the number of packets an enumeration may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u128);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

impl Budget {
    fn admit(self, config: &FieldConfig) -> Result<u64, OracleError> {
        let required = config.space_size();
        if required > self.0 || required > u128::from(u64::MAX) {
            return Err(OracleError::BudgetExceeded {
                required,
                allowed: self.0,
            });
        }
        Ok(required as u64)
    }
}

/// Packet at lexicographic position `index`.
pub fn packet_at(config: &FieldConfig, mut index: u64) -> Packet {
    let mut values = vec![0u64; config.d()];
    for f in (0..config.d()).rev() {
        let w = config.width(f);
        values[f] = index & config.domain_max(f);
        index = if w >= 64 { 0 } else { index >> w };
    }
    Packet::new(values)
}

pub fn index_of(config: &FieldConfig, packet: &Packet) -> u64 {
    packet.values().iter().zip(config.widths()).fold(
        0u64,
        |acc, (&v, &w)| if w >= 64 { v } else { (acc << w) | v },
    )
}

/// Every packet in the space, in lexicographic order.
pub fn all_packets(
    config: &FieldConfig,
    budget: Budget,
) -> Result<impl Iterator<Item = Packet> + '_, OracleError> {
    let total = budget.admit(config)?;
    Ok((0..total).map(move |i| packet_at(config, i)))
}

/// Smallest packet satisfying `pred`, searched in parallel.
pub fn find_first_packet<F>(
    config: &FieldConfig,
    budget: Budget,
    pred: F,
) -> Result<Option<Packet>, OracleError>
where
    F: Fn(&Packet) -> bool + Sync,
{
    let total = budget.admit(config)?;
    Ok((0..total)
        .into_par_iter()
        .map(|i| packet_at(config, i))
        .find_first(|p| pred(p)))
}

/// First-match decision for every packet, indexed by [`index_of`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionMap {
    config: FieldConfig,
    decisions: Vec<Action>,
}

impl DecisionMap {
    pub fn len(&self) -> usize {
        self.decisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decisions.is_empty()
    }

    pub fn get(&self, packet: &Packet) -> Action {
        self.decisions[index_of(&self.config, packet) as usize]
    }

    pub fn decisions(&self) -> &[Action] {
        &self.decisions
    }

    pub fn count(&self, action: Action) -> usize {
        self.decisions.iter().filter(|&&a| a == action).count()
    }

    /// Smallest packet on which `decide` differs from the map.
    pub fn first_disagreement<F>(&self, decide: F) -> Option<Packet>
    where
        F: Fn(&Packet) -> Action + Sync,
    {
        self.decisions
            .par_iter()
            .enumerate()
            .map(|(i, &want)| (packet_at(&self.config, i as u64), want))
            .find_first(|(p, want)| decide(p) != *want)
            .map(|(p, _)| p)
    }
}

pub fn enumerate_decisions(
    policy: &Policy,
    config: &FieldConfig,
    budget: Budget,
) -> Result<DecisionMap, OracleError> {
    let total = budget.admit(config)? as usize;
    let decisions = (0..total)
        .into_par_iter()
        .map(|i| policy.first_match(&packet_at(config, i as u64)))
        .collect();
    Ok(DecisionMap {
        config: config.clone(),
        decisions,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Implies,
    Equivalent,
    Counterexample(Packet),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        !matches!(self, Verdict::Counterexample(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Implies => f.write_str("IMPLIES"),
            Verdict::Equivalent => f.write_str("EQUIVALENT"),
            Verdict::Counterexample(p) => write!(f, "COUNTEREXAMPLE {p}"),
        }
    }
}

/// Whether every packet `first` accepts is also accepted by `second`.
pub fn check_implication(
    first: &Policy,
    second: &Policy,
    config: &FieldConfig,
    budget: Budget,
) -> Result<Verdict, OracleError> {
    let witness = find_first_packet(config, budget, |p| {
        first.first_match(p) == Action::Accept && second.first_match(p) == Action::Deny
    })?;
    Ok(witness.map_or(Verdict::Implies, Verdict::Counterexample))
}

pub fn check_equivalence(
    first: &Policy,
    second: &Policy,
    config: &FieldConfig,
    budget: Budget,
) -> Result<Verdict, OracleError> {
    let witness = find_first_packet(config, budget, |p| {
        first.first_match(p) != second.first_match(p)
    })?;
    Ok(witness.map_or(Verdict::Equivalent, Verdict::Counterexample))
}

/// DNF satisfiability in one pass: some clause must be free of
/// complementary literals.
pub fn dnf_sat(e: &NormalFormExpr) -> Result<bool, FormError> {
    if e.form() != Form::Dnf {
        return Err(FormError::WrongForm {
            expected: "dnf",
            found: e.form().as_str(),
        });
    }
    let width = e.var_count() as usize + 1;
    let mut seen = vec![0u8; width];
    let mut stamp = 0u8;
    'clauses: for clause in e.clauses() {
        stamp = stamp.wrapping_add(2);
        if stamp == 0 {
            seen.iter_mut().for_each(|s| *s = 0);
            stamp = 2;
        }
        for lit in clause {
            let slot = &mut seen[e.var_index(lit) as usize];
            let mark = stamp + u8::from(lit.positive);
            if *slot == mark ^ 1 {
                continue 'clauses;
            }
            *slot = mark;
        }
        return Ok(true);
    }
    Ok(false)
}

/// Satisfiability by trying every packet.
pub fn exhaustive_sat(e: &NormalFormExpr, budget: Budget) -> Result<bool, OracleError> {
    Ok(find_first_packet(e.config(), budget, |p| e.eval(p))?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::Literal;
    use crate::policy::Rule;

    fn cfg() -> FieldConfig {
        FieldConfig::uniform(3, 4).unwrap()
    }

    fn worked_policy() -> Policy {
        Policy::new(
            vec![
                Rule::from_bounds(&[(1, 10), (2, 5), (1, 10)], Action::Accept),
                Rule::from_bounds(&[(3, 15), (3, 4), (1, 10)], Action::Deny),
            ],
            Action::Deny,
        )
    }

    #[test]
    fn packet_indexing_is_lexicographic() {
        let c = FieldConfig::new(vec![2, 3]).unwrap();
        let packets: Vec<Packet> = all_packets(&c, Budget::default()).unwrap().collect();
        assert_eq!(packets.len(), 32);
        assert!(packets.windows(2).all(|w| w[0] < w[1]));
        for (i, p) in packets.iter().enumerate() {
            assert_eq!(index_of(&c, p), i as u64);
        }
        let wide = FieldConfig::new(vec![64]).unwrap();
        assert_eq!(packet_at(&wide, u64::MAX).values(), &[u64::MAX]);
    }

    #[test]
    fn worked_example_accept_count() {
        let map = enumerate_decisions(&worked_policy(), &cfg(), Budget::default()).unwrap();
        assert_eq!(map.len(), 4096);
        assert_eq!(map.count(Action::Accept), 400);
        assert_eq!(map.get(&Packet::new(vec![5, 3, 5])), Action::Accept);
    }

    #[test]
    fn empty_policy_map() {
        let map = enumerate_decisions(
            &Policy::new(vec![], Action::Accept),
            &cfg(),
            Budget::default(),
        )
        .unwrap();
        assert_eq!(map.count(Action::Accept), 4096);
    }

    #[test]
    fn budget_is_enforced() {
        let huge = FieldConfig::uniform(3, 32).unwrap();
        let err = enumerate_decisions(&worked_policy(), &huge, Budget::default()).unwrap_err();
        assert_eq!(
            err,
            OracleError::BudgetExceeded {
                required: 1 << 96,
                allowed: 1 << 24
            }
        );
        assert!(
            check_equivalence(&worked_policy(), &worked_policy(), &cfg(), Budget(4095)).is_err()
        );
    }

    #[test]
    fn implication_examples() {
        let c = cfg();
        let accept_all = Policy::new(vec![], Action::Accept);
        let deny_all = Policy::new(vec![], Action::Deny);
        let v = check_implication(&accept_all, &deny_all, &c, Budget::default()).unwrap();
        assert_eq!(v, Verdict::Counterexample(Packet::new(vec![0, 0, 0])));
        assert_eq!(v.to_string(), "COUNTEREXAMPLE 0 0 0");
        assert_eq!(
            check_implication(&deny_all, &accept_all, &c, Budget::default()).unwrap(),
            Verdict::Implies
        );
        let p = worked_policy();
        assert_eq!(
            check_implication(&p, &p, &c, Budget::default()).unwrap(),
            Verdict::Implies
        );
        assert_eq!(
            check_equivalence(&p, &p, &c, Budget::default())
                .unwrap()
                .to_string(),
            "EQUIVALENT"
        );
    }

    #[test]
    fn single_packet_difference_is_found() {
        let c = cfg();
        let base = worked_policy();
        let mut tweaked = base.clone();
        tweaked.rules.insert(
            0,
            Rule::from_bounds(&[(12, 12), (9, 9), (3, 3)], Action::Accept),
        );
        assert_eq!(
            check_equivalence(&base, &tweaked, &c, Budget::default()).unwrap(),
            Verdict::Counterexample(Packet::new(vec![12, 9, 3]))
        );
    }

    #[test]
    fn dnf_sat_cases() {
        let c = FieldConfig::new(vec![2]).unwrap();
        let x = Literal::new(0, 0, true);
        let contradiction =
            NormalFormExpr::from_raw(Form::Dnf, vec![vec![x, x.negated()]], c.clone());
        assert!(!dnf_sat(&contradiction).unwrap());
        let falsum = NormalFormExpr::new(Form::Dnf, vec![], c.clone());
        assert!(!dnf_sat(&falsum).unwrap());
        let mixed = NormalFormExpr::from_raw(
            Form::Dnf,
            vec![vec![x, x.negated()], vec![x, Literal::new(0, 1, false)]],
            c.clone(),
        );
        assert!(dnf_sat(&mixed).unwrap());
        assert!(dnf_sat(&mixed.negate()).is_err());
    }

    #[test]
    fn dnf_sat_stamps_wrap() {
        let c = FieldConfig::new(vec![1]).unwrap();
        let x = Literal::new(0, 0, true);
        let mut clauses = vec![vec![x, x.negated()]; 300];
        clauses.push(vec![x.negated()]);
        let e = NormalFormExpr::from_raw(Form::Dnf, clauses, c);
        assert!(dnf_sat(&e).unwrap());
    }
}
