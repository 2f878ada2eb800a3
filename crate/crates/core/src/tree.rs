//! Firewall decision trees.
//!
//! A tree has one level per header field. Every internal node at depth `f`
//! branches on field `f` through edges labelled with pairwise-disjoint
//! intervals kept in ascending order, and every terminal sits at depth `d`.
//! Trees built from a rule list cover only the packets some rule matches;
//! [`DecisionTree::complete`] turns them into a [`CompleteDecisionTree`] that
//! decides every packet.

use std::collections::HashMap;

use crate::error::TreeError;
use crate::policy::{Action, FieldConfig, Interval, Packet, Policy, Rule};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Terminal(Action),
    Internal { field: usize, edges: Vec<Edge> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub interval: Interval,
    pub child: Node,
}

impl Node {
    /// The chain `suffix[0] -> suffix[1] -> ... -> action`, starting at
    /// field `field`.
    pub fn chain(suffix: &[Interval], action: Action, field: usize) -> Node {
        suffix
            .iter()
            .enumerate()
            .rev()
            .fold(Node::Terminal(action), |child, (i, &interval)| {
                Node::Internal {
                    field: field + i,
                    edges: vec![Edge { interval, child }],
                }
            })
    }

    /// Levels between this node and its terminals.
    fn levels(&self) -> usize {
        let mut levels = 0;
        let mut node = self;
        while let Node::Internal { edges, .. } = node {
            levels += 1;
            node = &edges[0].child;
        }
        levels
    }

    fn lookup(&self, values: &[u64]) -> Option<Action> {
        let mut node = self;
        let mut values = values.iter();
        loop {
            match node {
                Node::Terminal(action) => return Some(*action),
                Node::Internal { edges, .. } => {
                    let v = *values.next()?;
                    let idx = edges.partition_point(|e| e.interval.hi() < v);
                    let edge = edges.get(idx).filter(|e| e.interval.contains(v))?;
                    node = &edge.child;
                }
            }
        }
    }
}

/// Inserts the rule suffix `suffix -> action` beneath `tree`, whose root
/// tests field `field`.
///
/// Packets already decided by `tree` keep their decision. Packets matched
/// by the suffix but absent from `tree` get `action`. With no tree the
/// result is the plain chain of the suffix.
pub fn addrule(
    suffix: &[Interval],
    action: Action,
    tree: Option<&Node>,
    field: usize,
    config: &FieldConfig,
) -> Result<Node, TreeError> {
    let Some(tree) = tree else {
        return Ok(Node::chain(suffix, action, field));
    };
    match (tree, suffix.split_first()) {
        (Node::Terminal(_), None) => Ok(tree.clone()),
        (Node::Terminal(_), Some(_)) | (Node::Internal { .. }, None) => {
            Err(TreeError::ArityMismatch {
                rule: suffix.len(),
                tree: tree.levels(),
            })
        }
        (
            Node::Internal {
                field: node_field,
                edges,
            },
            Some((&head, rest)),
        ) => {
            let mut out = Vec::with_capacity(edges.len() + 2);
            for edge in edges {
                match edge.interval.intersect(&head) {
                    Some(shared) => {
                        out.push(Edge {
                            interval: shared,
                            child: addrule(
                                rest,
                                action,
                                Some(&edge.child),
                                node_field + 1,
                                config,
                            )?,
                        });
                        for piece in edge.interval.minus(&head) {
                            out.push(Edge {
                                interval: piece,
                                child: edge.child.clone(),
                            });
                        }
                    }
                    None => out.push(edge.clone()),
                }
            }
            for gap in gaps(edges, config.domain_max(*node_field)) {
                if let Some(fresh) = gap.intersect(&head) {
                    out.push(Edge {
                        interval: fresh,
                        child: Node::chain(rest, action, node_field + 1),
                    });
                }
            }
            out.sort_by_key(|e| e.interval.lo());
            Ok(Node::Internal {
                field: *node_field,
                edges: out,
            })
        }
    }
}

/// Maximal runs of `[0, max]` not covered by the sorted, disjoint `edges`.
fn gaps(edges: &[Edge], max: u64) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut next: Option<u64> = Some(0);
    for edge in edges {
        let Some(start) = next else { break };
        if edge.interval.lo() > start {
            out.push(Interval::new(start, edge.interval.lo() - 1).unwrap());
        }
        next = edge.interval.hi().checked_add(1);
    }
    if let Some(start) = next {
        if start <= max {
            out.push(Interval::new(start, max).unwrap());
        }
    }
    out
}

/// Structural interner used by grouping: equal subtrees map to equal ids.
#[derive(Default)]
struct Interner {
    ids: HashMap<Shape, u32>,
}

#[derive(PartialEq, Eq, Hash)]
enum Shape {
    Leaf(Action),
    Inner(Vec<(u64, u64, u32)>),
}

impl Interner {
    fn intern(&mut self, shape: Shape) -> u32 {
        let next = self.ids.len() as u32;
        *self.ids.entry(shape).or_insert(next)
    }

    fn group(&mut self, node: &Node) -> (Node, u32) {
        match node {
            Node::Terminal(action) => (node.clone(), self.intern(Shape::Leaf(*action))),
            Node::Internal { field, edges } => {
                let mut merged: Vec<(Interval, Node, u32)> = Vec::with_capacity(edges.len());
                for edge in edges {
                    let (child, id) = self.group(&edge.child);
                    if let Some(last) = merged.last_mut() {
                        let abuts = last.0.hi().checked_add(1) == Some(edge.interval.lo());
                        if abuts && last.2 == id {
                            last.0 = Interval::new(last.0.lo(), edge.interval.hi()).unwrap();
                            continue;
                        }
                    }
                    merged.push((edge.interval, child, id));
                }
                let shape = Shape::Inner(
                    merged
                        .iter()
                        .map(|(iv, _, id)| (iv.lo(), iv.hi(), *id))
                        .collect(),
                );
                let id = self.intern(shape);
                let edges = merged
                    .into_iter()
                    .map(|(interval, child, _)| Edge { interval, child })
                    .collect();
                (
                    Node::Internal {
                        field: *field,
                        edges,
                    },
                    id,
                )
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeStats {
    pub leaf_count: usize,
    pub node_count: usize,
    pub max_out_degree: usize,
    pub is_complete: bool,
}

/// A possibly partial decision tree over a fixed field configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionTree {
    config: FieldConfig,
    root: Option<Node>,
}

impl DecisionTree {
    pub fn empty(config: FieldConfig) -> Self {
        DecisionTree { config, root: None }
    }

    /// Folds [`addrule`] over the policy's rules in order. The default
    /// action is not applied; see [`DecisionTree::complete`].
    pub fn build(policy: &Policy, config: &FieldConfig) -> Result<Self, TreeError> {
        policy
            .rules
            .iter()
            .try_fold(DecisionTree::empty(config.clone()), |tree, rule| {
                tree.add_rule(rule)
            })
    }

    pub fn add_rule(&self, rule: &Rule) -> Result<Self, TreeError> {
        if rule.predicate.len() != self.config.d() {
            return Err(TreeError::ArityMismatch {
                rule: rule.predicate.len(),
                tree: self.config.d(),
            });
        }
        for (field, iv) in rule.predicate.iter().enumerate() {
            let max = self.config.domain_max(field);
            if iv.hi() > max {
                return Err(TreeError::OutOfRange {
                    field,
                    lo: iv.lo(),
                    hi: iv.hi(),
                    max,
                });
            }
        }
        let root = addrule(
            &rule.predicate,
            rule.action,
            self.root.as_ref(),
            0,
            &self.config,
        )?;
        Ok(DecisionTree {
            config: self.config.clone(),
            root: Some(root),
        })
    }

    /// Merges sibling edges whose intervals abut and whose subtrees are
    /// structurally identical, bottom-up in a single pass.
    pub fn group_adjacent(&self) -> Self {
        let root = self
            .root
            .as_ref()
            .map(|root| Interner::default().group(root).0);
        DecisionTree {
            config: self.config.clone(),
            root,
        }
    }

    /// Sends every packet without a path to `default`. Existing decisions
    /// are unchanged.
    pub fn complete(&self, default: Action) -> CompleteDecisionTree {
        let everything = Rule::match_all(&self.config, default);
        let root = addrule(
            &everything.predicate,
            default,
            self.root.as_ref(),
            0,
            &self.config,
        )
        .expect("match-all rule always has full arity");
        CompleteDecisionTree {
            tree: DecisionTree {
                config: self.config.clone(),
                root: Some(root),
            },
        }
    }

    /// `None` when the packet has no path through the tree.
    pub fn evaluate(&self, packet: &Packet) -> Option<Action> {
        self.root.as_ref()?.lookup(packet.values())
    }

    pub fn config(&self) -> &FieldConfig {
        &self.config
    }

    pub fn root(&self) -> Option<&Node> {
        self.root.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    pub fn is_complete(&self) -> bool {
        fn covers(node: &Node, config: &FieldConfig) -> bool {
            match node {
                Node::Terminal(_) => true,
                Node::Internal { field, edges } => {
                    let contiguous = edges
                        .windows(2)
                        .all(|w| w[0].interval.hi().checked_add(1) == Some(w[1].interval.lo()));
                    contiguous
                        && edges.first().is_some_and(|e| e.interval.lo() == 0)
                        && edges
                            .last()
                            .is_some_and(|e| e.interval.hi() == config.domain_max(*field))
                        && edges.iter().all(|e| covers(&e.child, config))
                }
            }
        }
        self.root.as_ref().is_some_and(|r| covers(r, &self.config))
    }

    pub fn stats(&self) -> TreeStats {
        fn walk(node: &Node, stats: &mut TreeStats) {
            stats.node_count += 1;
            match node {
                Node::Terminal(_) => stats.leaf_count += 1,
                Node::Internal { edges, .. } => {
                    stats.max_out_degree = stats.max_out_degree.max(edges.len());
                    for e in edges {
                        walk(&e.child, stats);
                    }
                }
            }
        }
        let mut stats = TreeStats {
            leaf_count: 0,
            node_count: 0,
            max_out_degree: 0,
            is_complete: self.is_complete(),
        };
        if let Some(root) = &self.root {
            walk(root, &mut stats);
        }
        stats
    }

    /// Every root-to-terminal path as a rule, in ascending interval order.
    pub fn paths(&self) -> Vec<Rule> {
        fn walk(node: &Node, prefix: &mut Vec<Interval>, out: &mut Vec<Rule>) {
            match node {
                Node::Terminal(action) => out.push(Rule::new(prefix.clone(), *action)),
                Node::Internal { edges, .. } => {
                    for e in edges {
                        prefix.push(e.interval);
                        walk(&e.child, prefix, out);
                        prefix.pop();
                    }
                }
            }
        }
        let mut out = Vec::new();
        if let Some(root) = &self.root {
            walk(root, &mut Vec::new(), &mut out);
        }
        out
    }

    /// One line per path, `lo,hi | lo,hi | ... -> action`, ordered by the
    /// path's intervals.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for path in self.paths() {
            let labels: Vec<String> = path
                .predicate
                .iter()
                .map(|iv| format!("{},{}", iv.lo(), iv.hi()))
                .collect();
            out.push_str(&labels.join(" | "));
            out.push_str(" -> ");
            out.push_str(path.action.as_str());
            out.push('\n');
        }
        out
    }
}

/// A decision tree that covers the whole packet space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompleteDecisionTree {
    tree: DecisionTree,
}

impl TryFrom<DecisionTree> for CompleteDecisionTree {
    type Error = TreeError;

    fn try_from(tree: DecisionTree) -> Result<Self, TreeError> {
        if tree.is_complete() {
            Ok(CompleteDecisionTree { tree })
        } else {
            Err(TreeError::Incomplete)
        }
    }
}

impl CompleteDecisionTree {
    pub fn evaluate(&self, packet: &Packet) -> Action {
        self.tree
            .evaluate(packet)
            .expect("complete tree decides every conforming packet")
    }

    pub fn group_adjacent(&self) -> Self {
        CompleteDecisionTree {
            tree: self.tree.group_adjacent(),
        }
    }

    /// One rule per path ending in `keep`. The rules are pairwise disjoint.
    pub fn extract_rules(&self, keep: Action) -> Vec<Rule> {
        self.tree
            .paths()
            .into_iter()
            .filter(|r| r.action == keep)
            .collect()
    }

    /// Extracted `keep` rules plus the opposite default: a whitelist for
    /// `Accept`, a blacklist for `Deny`.
    pub fn normal_form_policy(&self, keep: Action) -> Policy {
        Policy::new(self.extract_rules(keep), keep.opposite())
    }

    pub fn root(&self) -> &Node {
        self.tree.root.as_ref().expect("complete tree has a root")
    }

    pub fn config(&self) -> &FieldConfig {
        &self.tree.config
    }

    pub fn as_tree(&self) -> &DecisionTree {
        &self.tree
    }

    pub fn stats(&self) -> TreeStats {
        self.tree.stats()
    }

    pub fn dump(&self) -> String {
        self.tree.dump()
    }
}

/// The tree at each stage of compiling one policy.
#[derive(Debug, Clone)]
pub struct CompiledPolicy {
    /// Straight fold of the rules, before grouping.
    pub built: DecisionTree,
    pub grouped: DecisionTree,
    /// Completed with the default action, then grouped again.
    pub complete: CompleteDecisionTree,
}

pub fn compile(policy: &Policy, config: &FieldConfig) -> Result<CompiledPolicy, TreeError> {
    let built = DecisionTree::build(policy, config)?;
    let grouped = built.group_adjacent();
    let complete = grouped.complete(policy.default_action).group_adjacent();
    Ok(CompiledPolicy {
        built,
        grouped,
        complete,
    })
}
