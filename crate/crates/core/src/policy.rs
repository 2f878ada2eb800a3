//! Rule and policy data model, the line-oriented rule-file format, and the
//! first-match reference semantics every other representation is checked
//! against.

use std::fmt;

use rand::Rng;

use crate::error::{ConfigError, ParseError, ParseErrorKind};

/// Largest number of header fields a configuration may carry.
pub const MAX_FIELDS: usize = 12;
/// Largest supported field width in bits.
pub const MAX_WIDTH: u32 = 64;

/// Shape of the packet space: one bit-width per header field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldConfig {
    widths: Vec<u32>,
}

impl FieldConfig {
    pub fn new(widths: Vec<u32>) -> Result<Self, ConfigError> {
        if widths.is_empty() || widths.len() > MAX_FIELDS {
            return Err(ConfigError::FieldCount(widths.len()));
        }
        if let Some((field, &w)) = widths
            .iter()
            .enumerate()
            .find(|(_, &w)| w == 0 || w > MAX_WIDTH)
        {
            return Err(ConfigError::Width { field, width: w });
        }
        Ok(FieldConfig { widths })
    }

    /// `d` copies of the same width.
    pub fn uniform(d: usize, width: u32) -> Result<Self, ConfigError> {
        Self::new(vec![width; d])
    }

    /// Parses a comma-separated width list such as `4,4,4`.
    pub fn parse(spec: &str) -> Result<Self, ConfigError> {
        let widths = spec
            .split(',')
            .map(|w| {
                w.trim()
                    .parse::<u32>()
                    .map_err(|_| ConfigError::Syntax(spec.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(widths)
    }

    pub fn d(&self) -> usize {
        self.widths.len()
    }

    pub fn widths(&self) -> &[u32] {
        &self.widths
    }

    pub fn width(&self, field: usize) -> u32 {
        self.widths[field]
    }

    /// Largest value field `field` can take, `2^w - 1`.
    pub fn domain_max(&self, field: usize) -> u64 {
        domain_max(self.widths[field])
    }

    pub fn full_interval(&self, field: usize) -> Interval {
        Interval {
            lo: 0,
            hi: self.domain_max(field),
        }
    }

    /// Total number of packets, saturating at `u128::MAX`.
    pub fn space_size(&self) -> u128 {
        self.widths
            .iter()
            .fold(1u128, |acc, &w| acc.saturating_mul(1u128 << w))
    }

    /// Total number of bit variables, the sum of all widths.
    pub fn total_bits(&self) -> u32 {
        self.widths.iter().sum()
    }

    /// Offset of field `field`'s first bit in the global variable numbering.
    pub fn bit_offset(&self, field: usize) -> u32 {
        self.widths[..field].iter().sum()
    }
}

impl fmt::Display for FieldConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.widths.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

pub(crate) fn domain_max(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Closed integer range `[lo, hi]`, never empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    lo: u64,
    hi: u64,
}

impl Interval {
    /// Returns `None` when `lo > hi`.
    pub fn new(lo: u64, hi: u64) -> Option<Self> {
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn singleton(v: u64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn contains(&self, v: u64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    /// `self \ other` as at most two intervals, lower piece first.
    pub fn minus(&self, other: &Interval) -> Vec<Interval> {
        if self.intersect(other).is_none() {
            return vec![*self];
        }
        let mut pieces = Vec::with_capacity(2);
        if self.lo < other.lo {
            pieces.push(Interval {
                lo: self.lo,
                hi: other.lo - 1,
            });
        }
        if other.hi < self.hi {
            pieces.push(Interval {
                lo: other.hi + 1,
                hi: self.hi,
            });
        }
        pieces
    }

    /// Number of values in the interval.
    pub fn len(&self) -> u128 {
        (self.hi - self.lo) as u128 + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Accept,
    Deny,
}

impl Action {
    pub fn opposite(self) -> Action {
        match self {
            Action::Accept => Action::Deny,
            Action::Deny => Action::Accept,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Action::Accept => "accept",
            Action::Deny => "deny",
        }
    }

    fn from_keyword(word: &str) -> Option<Action> {
        match word {
            "accept" => Some(Action::Accept),
            "deny" => Some(Action::Deny),
            _ => None,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One interval per field, in field order, plus the action taken on a match.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub predicate: Vec<Interval>,
    pub action: Action,
}

impl Rule {
    pub fn new(predicate: Vec<Interval>, action: Action) -> Self {
        Rule { predicate, action }
    }

    /// Builds a rule from `(lo, hi)` pairs. Panics on `lo > hi`.
    pub fn from_bounds(bounds: &[(u64, u64)], action: Action) -> Self {
        let predicate = bounds
            .iter()
            .map(|&(lo, hi)| Interval::new(lo, hi).expect("lo > hi in rule bounds"))
            .collect();
        Rule { predicate, action }
    }

    /// The rule matching every packet of `config`.
    pub fn match_all(config: &FieldConfig, action: Action) -> Self {
        let predicate = (0..config.d()).map(|f| config.full_interval(f)).collect();
        Rule { predicate, action }
    }

    pub fn matches(&self, packet: &Packet) -> bool {
        self.predicate.len() == packet.values().len()
            && self
                .predicate
                .iter()
                .zip(packet.values())
                .all(|(iv, &v)| iv.contains(v))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for iv in &self.predicate {
            write!(f, "{iv} ")?;
        }
        write!(f, "-> {}", self.action)
    }
}

/// Ordered rule list with a default action for unmatched packets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Policy {
    pub rules: Vec<Rule>,
    pub default_action: Action,
}

impl Policy {
    pub fn new(rules: Vec<Rule>, default_action: Action) -> Self {
        Policy {
            rules,
            default_action,
        }
    }

    /// Reference semantics: the earliest matching rule decides, otherwise
    /// the default action.
    pub fn first_match(&self, packet: &Packet) -> Action {
        self.rules
            .iter()
            .find(|r| r.matches(packet))
            .map_or(self.default_action, |r| r.action)
    }

    /// Normalized textual form: one rule per line followed by the default
    /// directive. Parsing it back yields the same policy.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for rule in &self.rules {
            out.push_str(&rule.to_string());
            out.push('\n');
        }
        out.push_str("default ");
        out.push_str(self.default_action.as_str());
        out.push('\n');
        out
    }

    /// A policy of `n_rules` uniformly random rules with random actions and
    /// a random default.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, config: &FieldConfig, n_rules: usize) -> Policy {
        let random_action = |rng: &mut R| {
            if rng.random_bool(0.5) {
                Action::Accept
            } else {
                Action::Deny
            }
        };
        let rules = (0..n_rules)
            .map(|_| {
                let predicate = (0..config.d())
                    .map(|f| {
                        let max = config.domain_max(f);
                        let a = rng.random_range(0..=max);
                        let b = rng.random_range(0..=max);
                        Interval::new(a.min(b), a.max(b)).unwrap()
                    })
                    .collect();
                Rule::new(predicate, random_action(rng))
            })
            .collect();
        Policy::new(rules, random_action(rng))
    }
}

/// One value per header field.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Packet(Vec<u64>);

impl Packet {
    pub fn new(values: Vec<u64>) -> Self {
        Packet(values)
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn conforms_to(&self, config: &FieldConfig) -> bool {
        self.0.len() == config.d()
            && self
                .0
                .iter()
                .enumerate()
                .all(|(f, &v)| v <= config.domain_max(f))
    }
}

impl From<Vec<u64>> for Packet {
    fn from(values: Vec<u64>) -> Self {
        Packet(values)
    }
}

impl fmt::Display for Packet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A single invariant violation found by [`validate_policy`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Arity {
        rule: usize,
        expected: usize,
        found: usize,
    },
    Range {
        rule: usize,
        field: usize,
        hi: u64,
        max: u64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Arity {
                rule,
                expected,
                found,
            } => write!(
                f,
                "rule {rule}: expected {expected} intervals, found {found}"
            ),
            Violation::Range {
                rule,
                field,
                hi,
                max,
            } => write!(
                f,
                "rule {rule}: field {field} bound {hi} exceeds domain maximum {max}"
            ),
        }
    }
}

/// Lists every rule that breaks arity or range constraints for `config`.
/// An empty list means the policy is valid.
pub fn validate_policy(policy: &Policy, config: &FieldConfig) -> Vec<Violation> {
    let mut report = Vec::new();
    for (idx, rule) in policy.rules.iter().enumerate() {
        if rule.predicate.len() != config.d() {
            report.push(Violation::Arity {
                rule: idx,
                expected: config.d(),
                found: rule.predicate.len(),
            });
            continue;
        }
        for (field, iv) in rule.predicate.iter().enumerate() {
            let max = config.domain_max(field);
            if iv.hi() > max {
                report.push(Violation::Range {
                    rule: idx,
                    field,
                    hi: iv.hi(),
                    max,
                });
            }
        }
    }
    report
}

/// Parses rule-file text. Rule order is preserved and exactly one
/// `default` directive is required.
pub fn parse_policy(text: &str, config: &FieldConfig) -> Result<Policy, ParseError> {
    let mut rules = Vec::new();
    let mut default: Option<(Action, usize)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let mut cur = Cursor::new(raw, line_no);
        cur.skip_ws();
        match cur.peek() {
            None | Some('#') => continue,
            Some('[') => rules.push(parse_rule(&mut cur, config)?),
            Some(_) => {
                let col = cur.column();
                let word = cur.word();
                if word != "default" {
                    return Err(cur.error_at(
                        col,
                        ParseErrorKind::Syntax(format!(
                            "expected '[' or 'default', found '{word}'"
                        )),
                    ));
                }
                cur.require_ws()?;
                let action = cur.action()?;
                cur.finish()?;
                if let Some((_, first)) = default {
                    return Err(ParseError {
                        line: line_no,
                        column: col,
                        kind: ParseErrorKind::DuplicateDefault { first_line: first },
                    });
                }
                default = Some((action, line_no));
            }
        }
    }

    match default {
        Some((default_action, _)) => Ok(Policy::new(rules, default_action)),
        None => Err(ParseError {
            line: text.lines().count().max(1),
            column: 1,
            kind: ParseErrorKind::MissingDefault,
        }),
    }
}

fn parse_rule(cur: &mut Cursor<'_>, config: &FieldConfig) -> Result<Rule, ParseError> {
    let mut predicate = Vec::new();
    loop {
        let col = cur.column();
        cur.expect('[')?;
        cur.skip_ws();
        let lo = cur.nat()?;
        cur.skip_ws();
        cur.expect(',')?;
        cur.skip_ws();
        let hi = cur.nat()?;
        cur.skip_ws();
        cur.expect(']')?;
        let field = predicate.len();
        let iv = Interval::new(lo, hi)
            .ok_or_else(|| cur.error_at(col, ParseErrorKind::Inverted { field, lo, hi }))?;
        if field < config.d() && hi > config.domain_max(field) {
            return Err(cur.error_at(
                col,
                ParseErrorKind::OutOfRange {
                    field,
                    value: hi,
                    max: config.domain_max(field),
                },
            ));
        }
        predicate.push(iv);
        cur.require_ws()?;
        match cur.peek() {
            Some('[') => continue,
            Some('-') => break,
            _ => {
                return Err(
                    cur.error_here(ParseErrorKind::Syntax("expected '[' or '->'".to_string()))
                )
            }
        }
    }
    let arrow_col = cur.column();
    cur.expect('-')?;
    cur.expect('>')?;
    if predicate.len() != config.d() {
        return Err(cur.error_at(
            arrow_col,
            ParseErrorKind::Arity {
                expected: config.d(),
                found: predicate.len(),
            },
        ));
    }
    cur.require_ws()?;
    let action = cur.action()?;
    cur.finish()?;
    Ok(Rule::new(predicate, action))
}

struct Cursor<'a> {
    line: &'a str,
    pos: usize,
    line_no: usize,
}

impl<'a> Cursor<'a> {
    fn new(line: &'a str, line_no: usize) -> Self {
        Cursor {
            line,
            pos: 0,
            line_no,
        }
    }

    fn rest(&self) -> &'a str {
        &self.line[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn column(&self) -> usize {
        self.line[..self.pos].chars().count() + 1
    }

    fn error_at(&self, column: usize, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line_no,
            column,
            kind,
        }
    }

    fn error_here(&self, kind: ParseErrorKind) -> ParseError {
        self.error_at(self.column(), kind)
    }

    fn skip_ws(&mut self) -> usize {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c == ' ' || c == '\t' || c == '\r' {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        self.pos - start
    }

    fn require_ws(&mut self) -> Result<(), ParseError> {
        if self.skip_ws() == 0 {
            return Err(self.error_here(ParseErrorKind::Syntax("expected whitespace".to_string())));
        }
        Ok(())
    }

    fn expect(&mut self, want: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(c) => Err(self.error_here(ParseErrorKind::Syntax(format!(
                "expected '{want}', found '{c}'"
            )))),
            None => Err(self.error_here(ParseErrorKind::Syntax(format!(
                "expected '{want}', found end of line"
            )))),
        }
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        let col = self.column();
        let digits: &str = {
            let rest = self.rest();
            let end = rest
                .find(|c: char| !c.is_ascii_digit())
                .unwrap_or(rest.len());
            &rest[..end]
        };
        if digits.is_empty() {
            return Err(self.error_here(ParseErrorKind::Syntax("expected a number".to_string())));
        }
        self.pos += digits.len();
        digits.parse::<u64>().map_err(|_| {
            self.error_at(
                col,
                ParseErrorKind::Syntax(format!("number too large: {digits}")),
            )
        })
    }

    fn word(&mut self) -> &'a str {
        let rest = self.rest();
        let end = rest.find(|c: char| c.is_whitespace()).unwrap_or(rest.len());
        self.pos += end;
        &rest[..end]
    }

    fn action(&mut self) -> Result<Action, ParseError> {
        let col = self.column();
        let word = self.word();
        Action::from_keyword(word).ok_or_else(|| {
            self.error_at(
                col,
                ParseErrorKind::Syntax(format!("expected 'accept' or 'deny', found '{word}'")),
            )
        })
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.error_here(ParseErrorKind::Syntax(format!(
                "unexpected trailing text '{}'",
                self.rest()
            )))),
        }
    }
}
