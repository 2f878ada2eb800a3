//! Exit criteria. Each test prints one `PASS`/`FAIL` line and asserts it.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use std::fs;
use std::time::{Duration, Instant};

use common::*;
use fwbool::cli::{self, EXIT_OK};
use fwbool::normal_form::{adjusted_clause_bound, built_leaf_bound};
use fwbool::oracle::{exhaustive_sat, DecisionMap};
use fwbool::{
    canonical_cover, compile, dnf_sat, emit_dimacs, encode_value, enumerate_decisions,
    interval_to_terms, negate_dnf, parse_dimacs, parse_policy, tree_to_cnf, tree_to_dnf, Action,
    Budget, FieldConfig, Form, Interval, Literal, NormalFormExpr, Packet,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tempfile::TempDir;

const AC1_LIMIT: Duration = Duration::from_secs(1);
const AC2_LIMIT: Duration = Duration::from_secs(1);
const AC3_LIMIT: Duration = Duration::from_secs(60);
const AC3_MIN_POLICIES: usize = 200;
const AC5_LIMIT: Duration = Duration::from_secs(10);
const AC5_MAX_VARS: u32 = 12;

fn verdict(id: &str, what: &str, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    println!("{id} {status}: {what} {detail}");
    assert!(ok, "{id} failed: {what} {detail}");
}

#[test]
fn ac1_worked_example_reproduction() {
    let start = Instant::now();
    let cfg = cfg444();
    let policy = parse_policy(WORKED_POLICY_TEXT, &cfg).unwrap();
    let compiled = compile(&policy, &cfg).unwrap();
    let five = "1,2 | 2,5 | 1,10 -> accept\n\
                3,10 | 2,2 | 1,10 -> accept\n\
                3,10 | 3,4 | 1,10 -> accept\n\
                3,10 | 5,5 | 1,10 -> accept\n\
                11,15 | 3,4 | 1,10 -> deny\n";
    let two = "1,10 | 2,5 | 1,10 -> accept\n11,15 | 3,4 | 1,10 -> deny\n";
    let whitelist = compiled
        .complete
        .normal_form_policy(Action::Accept)
        .to_text();
    let elapsed = start.elapsed();

    let ok = compiled.built.dump() == five
        && compiled.built.stats().leaf_count == 5
        && compiled.grouped.dump() == two
        && compiled.grouped.stats().leaf_count == 2
        && whitelist == "[1,10] [2,5] [1,10] -> accept\ndefault deny\n"
        && elapsed < AC1_LIMIT;
    verdict(
        "AC1",
        "five split paths, two grouped leaves, exact whitelist",
        ok,
        &format!("({elapsed:?})"),
    );
}

#[test]
fn ac2_interval_encoding_golden() {
    let start = Instant::now();
    let nibble = FieldConfig::new(vec![4]).unwrap();
    let terms = interval_to_terms(Interval::new(3, 13).unwrap(), 0, &nibble).unwrap();
    let lit = |bit, positive| Literal::new(0, bit, positive);
    // !x0 !x1 x2 x3 | !x0 x1 | x0 !x1 | x0 x1 !x2, x0 at the root.
    let expected = vec![
        vec![lit(0, false), lit(1, false), lit(2, true), lit(3, true)],
        vec![lit(0, false), lit(1, true)],
        vec![lit(0, true), lit(1, false)],
        vec![lit(0, true), lit(1, true), lit(2, false)],
    ];
    let cover = canonical_cover(Interval::new(3, 13).unwrap(), 0, &nibble).unwrap();

    // !x7 !x6 !x5 !x4 !x3 x2 !x1 x0 with x0 the least significant bit.
    let byte = FieldConfig::new(vec![8]).unwrap();
    let by_lsb_index = [true, false, true, false, false, false, false, false];
    let expected_value: Vec<Literal> = (0..8u32)
        .map(|k| Literal::new(0, k, by_lsb_index[(7 - k) as usize]))
        .collect();
    let five = encode_value(5, 0, &byte).unwrap();
    let elapsed = start.elapsed();

    let ok = terms == expected && cover.len() == 4 && five == expected_value && elapsed < AC2_LIMIT;
    verdict(
        "AC2",
        "cover of [3,13] and encoding of 5",
        ok,
        &format!("({elapsed:?})"),
    );
}

fn four_way_disagreement(
    map: &DecisionMap,
    cfg: &FieldConfig,
    policy: &fwbool::Policy,
) -> Option<String> {
    let tree = compile(policy, cfg).unwrap().complete;
    let dnf = tree_to_dnf(&tree);
    let cnf = tree_to_cnf(&tree);
    let as_action = |b: bool| if b { Action::Accept } else { Action::Deny };
    if let Some(p) = map.first_disagreement(|p| policy.first_match(p)) {
        return Some(format!("first_match at {p}"));
    }
    if let Some(p) = map.first_disagreement(|p| tree.evaluate(p)) {
        return Some(format!("tree at {p}"));
    }
    if let Some(p) = map.first_disagreement(|p| as_action(dnf.eval(p))) {
        return Some(format!("dnf at {p}"));
    }
    if let Some(p) = map.first_disagreement(|p| as_action(cnf.eval(p))) {
        return Some(format!("cnf at {p}"));
    }
    None
}

#[test]
fn ac3_master_semantic_equivalence() {
    let start = Instant::now();
    let corpus = corpus();
    let mut failures = Vec::new();
    let mut packets_checked = 0u128;
    for (i, (policy, cfg)) in corpus.iter().enumerate() {
        let map = enumerate_decisions(policy, cfg, Budget::default()).unwrap();
        packets_checked += map.len() as u128;
        if let Some(why) = four_way_disagreement(&map, cfg, policy) {
            failures.push(format!("policy {i}: {why}"));
        }
    }
    let elapsed = start.elapsed();
    let ok = corpus.len() >= AC3_MIN_POLICIES && failures.is_empty() && elapsed < AC3_LIMIT;
    verdict(
        "AC3",
        "rule list, tree, DNF and CNF agree on every packet",
        ok,
        &format!(
            "({} policies, {packets_checked} packets, {elapsed:?}) {failures:?}",
            corpus.len()
        ),
    );
}

#[test]
fn ac4_size_bounds() {
    let mut violations = Vec::new();
    for (i, (policy, cfg)) in corpus().iter().enumerate() {
        let n = policy.rules.len();
        let d = cfg.d();
        let compiled = compile(policy, cfg).unwrap();
        let leaves = compiled.built.stats().leaf_count as u128;
        if leaves > built_leaf_bound(n, d) {
            violations.push(format!("policy {i}: {leaves} leaves > (2n-1)^d"));
        }
        let intervals = policy
            .rules
            .iter()
            .flat_map(|r| r.predicate.iter().copied().enumerate())
            .chain(
                compiled
                    .complete
                    .as_tree()
                    .paths()
                    .into_iter()
                    .flat_map(|r| r.predicate.into_iter().enumerate()),
            );
        for (f, iv) in intervals {
            let size = canonical_cover(iv, f, cfg).unwrap().len();
            if size > 2 * cfg.width(f) as usize {
                violations.push(format!("policy {i}: cover of {iv} has {size} prefixes"));
            }
        }
        let ceiling = adjusted_clause_bound(n, cfg);
        for e in [
            tree_to_dnf(&compiled.complete),
            tree_to_cnf(&compiled.complete),
        ] {
            if e.clause_count() as u128 > ceiling {
                violations.push(format!(
                    "policy {i}: {} {} clauses > {ceiling}",
                    e.form(),
                    e.clause_count()
                ));
            }
        }
    }
    verdict(
        "AC4",
        "leaf, cover and clause counts within their ceilings",
        violations.is_empty(),
        &format!("{violations:?}"),
    );
}

fn random_dnf(rng: &mut StdRng, vars: u32) -> NormalFormExpr {
    let cfg = FieldConfig::new(vec![vars]).unwrap();
    let clauses = (0..rng.random_range(0..8))
        .map(|_| {
            (0..rng.random_range(0..=vars.min(6)))
                .map(|_| Literal::new(0, rng.random_range(0..vars), rng.random_bool(0.5)))
                .collect()
        })
        .collect();
    NormalFormExpr::from_raw(Form::Dnf, clauses, cfg)
}

#[test]
fn ac5_de_morgan_and_dnf_sat() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0xde_4d);
    let mut failures = Vec::new();
    for vars in 1..=AC5_MAX_VARS {
        for trial in 0..16 {
            let dnf = random_dnf(&mut rng, vars);
            let cnf = negate_dnf(&dnf).unwrap();
            let bad = (0..1u64 << vars)
                .map(|v| Packet::new(vec![v]))
                .find(|p| cnf.eval(p) == dnf.eval(p));
            if let Some(p) = bad {
                failures.push(format!("negation, {vars} vars, trial {trial}, at {p}"));
            }
            let sat = dnf_sat(&dnf).unwrap();
            if sat != exhaustive_sat(&dnf, Budget::default()).unwrap() {
                failures.push(format!("dnf_sat, {vars} vars, trial {trial}"));
            }
        }
    }
    for (i, (policy, cfg)) in corpus().iter().enumerate() {
        let dnf = tree_to_dnf(&compile(policy, cfg).unwrap().complete);
        if dnf_sat(&dnf).unwrap() != exhaustive_sat(&dnf, Budget::default()).unwrap() {
            failures.push(format!("dnf_sat on pipeline policy {i}"));
        }
    }
    let elapsed = start.elapsed();
    verdict(
        "AC5",
        "negation flips every truth-table row, dnf_sat matches exhaustive search",
        failures.is_empty() && elapsed < AC5_LIMIT,
        &format!("({elapsed:?}) {failures:?}"),
    );
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(
        std::iter::once("fwbool").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).unwrap())
}

#[test]
fn ac6_normal_form_round_trip() {
    let dir = TempDir::new().unwrap();
    let mut failures = Vec::new();
    for (i, (policy, cfg)) in corpus().iter().enumerate() {
        let fields = cfg.to_string();
        let original = dir.path().join(format!("p{i}.rules"));
        fs::write(&original, policy.to_text()).unwrap();
        for emit in ["whitelist", "blacklist"] {
            let derived = dir.path().join(format!("p{i}.{emit}"));
            let (code, _) = run_cli(&[
                "compile",
                "--policy",
                original.to_str().unwrap(),
                "--fields",
                &fields,
                "--emit",
                emit,
                "--out",
                derived.to_str().unwrap(),
            ]);
            if code != EXIT_OK {
                failures.push(format!("policy {i}: compile {emit} exited {code}"));
                continue;
            }
            let (code, line) = run_cli(&[
                "check",
                "--left",
                original.to_str().unwrap(),
                "--right",
                derived.to_str().unwrap(),
                "--fields",
                &fields,
                "--mode",
                "equiv",
            ]);
            if code != EXIT_OK || line != "EQUIVALENT\n" {
                failures.push(format!(
                    "policy {i}: {emit} check exited {code}: {}",
                    line.trim()
                ));
            }
        }
    }
    verdict(
        "AC6",
        "whitelist and blacklist are equivalent to their source policy",
        failures.is_empty(),
        &format!("{failures:?}"),
    );
}

#[test]
fn ac7_dimacs_integrity() {
    let dir = TempDir::new().unwrap();
    let mut failures = Vec::new();
    for (i, (policy, cfg)) in corpus().iter().enumerate() {
        let first = emit_dimacs(&tree_to_cnf(&compile(policy, cfg).unwrap().complete));
        let cnf = tree_to_cnf(&compile(policy, cfg).unwrap().complete);
        let second = emit_dimacs(&cnf);
        if first != second {
            failures.push(format!("policy {i}: emission differs between runs"));
        }
        let mut expected: Vec<Vec<i64>> = cnf
            .clauses()
            .iter()
            .map(|c| {
                let mut c: Vec<i64> = c
                    .iter()
                    .map(|l| {
                        let v = i64::from(cnf.var_index(l));
                        if l.positive {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect();
                c.sort_unstable();
                c
            })
            .collect();
        expected.sort();
        match parse_dimacs(&first) {
            Ok(parsed) if parsed.clause_multiset() == expected && parsed.form == Form::Cnf => {}
            Ok(_) => failures.push(format!("policy {i}: clause multiset changed")),
            Err(e) => failures.push(format!("policy {i}: re-parse failed: {e}")),
        }
    }
    // Byte-for-byte through the CLI as well.
    let src = dir.path().join("p.rules");
    fs::write(&src, WORKED_POLICY_TEXT).unwrap();
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("run{run}.cnf"));
        let (code, _) = run_cli(&[
            "compile",
            "--policy",
            src.to_str().unwrap(),
            "--fields",
            "4,4,4",
            "--emit",
            "cnf",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK);
        outputs.push(fs::read(&out).unwrap());
    }
    if outputs[0] != outputs[1] {
        failures.push("cli cnf output differs between runs".to_string());
    }
    verdict(
        "AC7",
        "CNF files re-parse to the same clauses and are byte-deterministic",
        failures.is_empty(),
        &format!("{failures:?}"),
    );
}
