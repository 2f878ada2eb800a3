#![allow(dead_code)]

use std::collections::BTreeSet;

use fwbool::oracle::all_packets;
use fwbool::{Action, Budget, FieldConfig, Packet, Policy, Rule};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn cfg444() -> FieldConfig {
    FieldConfig::uniform(3, 4).unwrap()
}

pub fn r1() -> Rule {
    Rule::from_bounds(&[(1, 10), (2, 5), (1, 10)], Action::Accept)
}

pub fn r2() -> Rule {
    Rule::from_bounds(&[(3, 15), (3, 4), (1, 10)], Action::Deny)
}

pub fn worked_policy() -> Policy {
    Policy::new(vec![r1(), r2()], Action::Deny)
}

pub const WORKED_POLICY_TEXT: &str = "\
# worked example
[1,10] [2,5] [1,10] -> accept
[3,15] [3,4] [1,10] -> deny
default deny
";

/// Fixed corpus: 150 policies at d = 3, w = 4 and 60 at d = 2, w = 6, each
/// with 0..=10 rules.
pub fn corpus() -> Vec<(Policy, FieldConfig)> {
    let mut rng = StdRng::seed_from_u64(0x5eed_f00d);
    let small = cfg444();
    let wide = FieldConfig::uniform(2, 6).unwrap();
    let mut out = Vec::new();
    for i in 0..210 {
        let config = if i < 150 { &small } else { &wide };
        let n = rng.random_range(0..=10);
        out.push((Policy::random(&mut rng, config, n), config.clone()));
    }
    out
}

pub fn packets(config: &FieldConfig) -> Vec<Packet> {
    all_packets(config, Budget::default()).unwrap().collect()
}

/// Packets covered by a set of rules, brute force.
pub fn covered(rules: &[Rule], config: &FieldConfig) -> BTreeSet<Packet> {
    packets(config)
        .into_iter()
        .filter(|p| rules.iter().any(|r| r.matches(p)))
        .collect()
}

/// Canonical cover computed by materializing the whole segment tree over
/// `width` bits, marking the leaves in `[lo, hi]`, and repeatedly replacing
/// a marked sibling pair by its marked parent, deepest level first.
pub fn marking_rule_cover(lo: u64, hi: u64, width: u32) -> BTreeSet<String> {
    // marks[level] has 2^level entries; level == width holds the leaves.
    let mut marks: Vec<Vec<bool>> = (0..=width).map(|l| vec![false; 1 << l]).collect();
    for v in lo..=hi {
        marks[width as usize][v as usize] = true;
    }
    for level in (1..=width as usize).rev() {
        for parent in 0..(1usize << (level - 1)) {
            let (l, r) = (2 * parent, 2 * parent + 1);
            if marks[level][l] && marks[level][r] {
                marks[level][l] = false;
                marks[level][r] = false;
                marks[level - 1][parent] = true;
            }
        }
    }
    let mut out = BTreeSet::new();
    for (level, row) in marks.iter().enumerate() {
        for (i, &m) in row.iter().enumerate() {
            if m {
                let s: String = (0..level)
                    .map(|k| {
                        if (i >> (level - 1 - k)) & 1 == 1 {
                            '1'
                        } else {
                            '0'
                        }
                    })
                    .collect();
                out.insert(s);
            }
        }
    }
    out
}
