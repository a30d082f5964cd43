//! Finite trees on the naturals.
//!
//! A tree is a prefix-closed finite set of finite sequences. Nodes are ordered by
//! length first and lexicographically second; this order extends the prefix
//! order and is the canonical compatible enumeration used everywhere else.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A finite sequence of naturals. The empty sequence is the root.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct TreeNode(Vec<u64>);

impl TreeNode {
    pub fn root() -> Self {
        TreeNode(Vec::new())
    }

    pub fn new(path: impl Into<Vec<u64>>) -> Self {
        TreeNode(path.into())
    }

    pub fn path(&self) -> &[u64] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// `self ⪯ other`.
    pub fn is_prefix_of(&self, other: &TreeNode) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn comparable(&self, other: &TreeNode) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    pub fn parent(&self) -> Option<TreeNode> {
        if self.0.is_empty() {
            None
        } else {
            Some(TreeNode(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn child(&self, label: u64) -> TreeNode {
        let mut p = self.0.clone();
        p.push(label);
        TreeNode(p)
    }

    /// All prefixes of this node, root first, including the node itself.
    pub fn ancestors_inclusive(&self) -> impl Iterator<Item = TreeNode> + '_ {
        (0..=self.0.len()).map(move |k| TreeNode(self.0[..k].to_vec()))
    }

    fn max_entry(&self) -> u64 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

impl Ord for TreeNode {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for TreeNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for TreeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for TreeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("∅");
        }
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

impl From<Vec<u64>> for TreeNode {
    fn from(v: Vec<u64>) -> Self {
        TreeNode(v)
    }
}

impl From<&[u64]> for TreeNode {
    fn from(v: &[u64]) -> Self {
        TreeNode(v.to_vec())
    }
}

/// The (length, lexicographic) enumeration over the alphabet `{0..=base}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Enumeration {
    base: u64,
}

impl Enumeration {
    pub fn with_alphabet_max(base: u64) -> Self {
        Enumeration { base }
    }

    pub fn alphabet_max(&self) -> u64 {
        self.base
    }

    /// Position of `node` in the enumeration; `index(∅) = 0`.
    pub fn index(&self, node: &TreeNode) -> Result<u128> {
        let overflow = || Error::IndexOverflow(node.to_string());
        if node.max_entry() > self.base {
            return Err(Error::Precondition(format!(
                "node {node} has an entry above the alphabet bound {}",
                self.base
            )));
        }
        let radix = u128::from(self.base) + 1;
        // sequences strictly shorter than the node
        let mut below: u128 = 0;
        let mut power: u128 = 1;
        for _ in 0..node.depth() {
            below = below.checked_add(power).ok_or_else(overflow)?;
            power = power.checked_mul(radix).ok_or_else(overflow)?;
        }
        let mut rank: u128 = 0;
        for &v in node.path() {
            rank = rank
                .checked_mul(radix)
                .and_then(|r| r.checked_add(u128::from(v)))
                .ok_or_else(overflow)?;
        }
        below.checked_add(rank).ok_or_else(overflow)
    }

    /// Inverse of [`Enumeration::index`].
    pub fn node_at(&self, mut index: u128) -> TreeNode {
        let radix = u128::from(self.base) + 1;
        let mut len = 0usize;
        let mut block: u128 = 1;
        while index >= block {
            index -= block;
            len += 1;
            block = match block.checked_mul(radix) {
                Some(b) => b,
                None => u128::MAX,
            };
        }
        let mut digits = vec![0u64; len];
        for d in digits.iter_mut().rev() {
            *d = (index % radix) as u64;
            index /= radix;
        }
        TreeNode(digits)
    }
}

/// A prefix-closed finite set of nodes.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct FiniteTree {
    nodes: BTreeSet<TreeNode>,
}

impl FiniteTree {
    pub fn empty() -> Self {
        FiniteTree::default()
    }

    /// Prefix closure of `paths`; also reports whether closure added nodes.
    pub fn from_paths_reporting<I, P>(paths: I) -> (Self, bool)
    where
        I: IntoIterator<Item = P>,
        P: Into<TreeNode>,
    {
        let given: BTreeSet<TreeNode> = paths.into_iter().map(Into::into).collect();
        let mut nodes = BTreeSet::new();
        for p in &given {
            nodes.extend(p.ancestors_inclusive());
        }
        let added = nodes.len() != given.len();
        (FiniteTree { nodes }, added)
    }

    pub fn nodes(&self) -> &BTreeSet<TreeNode> {
        &self.nodes
    }

    pub fn iter(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.iter()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, node: &TreeNode) -> bool {
        self.nodes.contains(node)
    }

    /// Largest label occurring in the tree (0 for `{∅}` and the empty tree).
    pub fn alphabet_max(&self) -> u64 {
        self.nodes.iter().map(TreeNode::max_entry).max().unwrap_or(0)
    }

    pub fn enumeration(&self) -> Enumeration {
        Enumeration::with_alphabet_max(self.alphabet_max())
    }

    pub fn index_of(&self, node: &TreeNode) -> Result<u128> {
        self.enumeration().index(node)
    }

    pub fn children(&self, node: &TreeNode) -> Vec<TreeNode> {
        let lo = node.child(0);
        self.nodes
            .range(lo..)
            .take_while(|n| n.depth() == node.depth() + 1)
            .filter(|n| node.is_prefix_of(n))
            .cloned()
            .collect()
    }

    pub fn leaves(&self) -> Vec<TreeNode> {
        let arena = self.arena();
        arena
            .nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| arena.children[*i].is_empty())
            .map(|(_, n)| n.clone())
            .collect()
    }

    /// Index-based view with parent/children links; parents precede children.
    pub fn arena(&self) -> TreeArena {
        let nodes: Vec<TreeNode> = self.nodes.iter().cloned().collect();
        let pos: BTreeMap<&TreeNode, usize> =
            nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let mut parent = vec![None; nodes.len()];
        let mut children = vec![Vec::new(); nodes.len()];
        for (i, n) in nodes.iter().enumerate() {
            if let Some(p) = n.parent() {
                let pi = pos[&p];
                parent[i] = Some(pi);
                children[pi].push(i);
            }
        }
        TreeArena {
            nodes,
            parent,
            children,
        }
    }
}

/// Finite tree as flat arrays, in enumeration order.
#[derive(Debug, Clone)]
pub struct TreeArena {
    pub nodes: Vec<TreeNode>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
}

/// Prefix closure of the given paths.
pub fn make_tree<I, P>(paths: I) -> FiniteTree
where
    I: IntoIterator<Item = P>,
    P: Into<TreeNode>,
{
    FiniteTree::from_paths_reporting(paths).0
}

/// True iff no element of `a` is comparable with an element of `b`.
pub fn completely_incomparable<'a, 'b, A, B>(a: A, b: B) -> bool
where
    A: IntoIterator<Item = &'a TreeNode>,
    B: IntoIterator<Item = &'b TreeNode> + Clone,
{
    a.into_iter()
        .all(|s| b.clone().into_iter().all(|t| !s.comparable(t)))
}

/// A convex chain of a tree, stored shallowest first.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Segment {
    nodes: Vec<TreeNode>,
}

impl Segment {
    /// Validates that `nodes` is a totally ordered, order-convex subset of `tree`.
    pub fn new(tree: &FiniteTree, nodes: impl IntoIterator<Item = TreeNode>) -> Result<Self> {
        let mut nodes: Vec<TreeNode> = nodes.into_iter().collect();
        nodes.sort();
        nodes.dedup();
        for n in &nodes {
            if !tree.contains(n) {
                return Err(Error::NodeNotInTree(n.to_string()));
            }
        }
        let seg = Segment { nodes };
        seg.check()?;
        Ok(seg)
    }

    /// The path from `top` down to `bottom`, both inclusive.
    pub fn between(tree: &FiniteTree, top: &TreeNode, bottom: &TreeNode) -> Result<Self> {
        if !top.is_prefix_of(bottom) {
            return Err(Error::NotASegment(format!("{top} is not a prefix of {bottom}")));
        }
        let nodes = (top.depth()..=bottom.depth())
            .map(|k| TreeNode::from(&bottom.path()[..k]))
            .collect::<Vec<_>>();
        Segment::new(tree, nodes)
    }

    /// Convexity and chain invariant; every depth between the ends appears once.
    pub fn check(&self) -> Result<()> {
        let Some(bottom) = self.nodes.last() else {
            return Ok(());
        };
        let top_depth = self.nodes[0].depth();
        for (k, n) in self.nodes.iter().enumerate() {
            if !n.is_prefix_of(bottom) {
                return Err(Error::NotASegment(format!("{n} and {bottom} are incomparable")));
            }
            if n.depth() != top_depth + k {
                return Err(Error::NotASegment(format!(
                    "gap above {n}: segment is not order-convex"
                )));
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, node: &TreeNode) -> bool {
        self.nodes.binary_search(node).is_ok()
    }
}

/// All root-to-leaf paths, in enumeration order of their leaves.
pub fn maximal_chains(tree: &FiniteTree) -> Vec<Segment> {
    tree.leaves()
        .into_iter()
        .map(|leaf| Segment {
            nodes: leaf.ancestors_inclusive().collect(),
        })
        .collect()
}

/// Finite ordinal rank: 0 for `{∅}`, otherwise one more than the largest child rank.
pub fn rank(tree: &FiniteTree) -> Result<usize> {
    if tree.is_empty() {
        return Err(Error::EmptyTreeRank);
    }
    let arena = tree.arena();
    let mut r = vec![0usize; arena.nodes.len()];
    for i in (0..arena.nodes.len()).rev() {
        r[i] = arena.children[i]
            .iter()
            .map(|&c| r[c] + 1)
            .max()
            .unwrap_or(0);
    }
    Ok(r[0])
}

/// `{∅, (0), (0,0), …}` with `n` nodes.
pub fn chain_tree(n: usize) -> Result<FiniteTree> {
    if n == 0 {
        return Err(Error::ZeroSize);
    }
    Ok(make_tree([vec![0u64; n - 1]]))
}

/// `∅` plus the `n` children `(base_label)`, …, `(base_label + n - 1)`.
pub fn star_tree(n: usize, base_label: u64) -> Result<FiniteTree> {
    if n == 0 {
        return Err(Error::ZeroSize);
    }
    Ok(make_tree(
        (0..n as u64).map(|i| vec![base_label + i]).chain([vec![]]),
    ))
}

/// A chain of `n` nodes along label 0, each with an extra leaf child labelled 1.
pub fn comb_tree(n: usize) -> Result<FiniteTree> {
    if n == 0 {
        return Err(Error::ZeroSize);
    }
    let mut paths = Vec::with_capacity(2 * n);
    for k in 0..n {
        let spine = vec![0u64; k];
        let mut tooth = spine.clone();
        tooth.push(1);
        paths.push(spine);
        paths.push(tooth);
    }
    Ok(make_tree(paths))
}

/// Random tree grown by attaching children to uniformly chosen open nodes.
/// Deterministic in `seed`.
pub fn random_tree(seed: u64, max_nodes: usize, max_branch: usize) -> Result<FiniteTree> {
    if max_nodes == 0 || max_branch == 0 {
        return Err(Error::ZeroSize);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = rng.gen_range(1..=max_nodes);
    let mut nodes = vec![TreeNode::root()];
    let mut fanout = vec![0usize];
    let mut open: Vec<usize> = vec![0];
    while nodes.len() < target && !open.is_empty() {
        let pick = rng.gen_range(0..open.len());
        let at = open[pick];
        let child = nodes[at].child(fanout[at] as u64);
        fanout[at] += 1;
        if fanout[at] == max_branch {
            open.swap_remove(pick);
        }
        nodes.push(child);
        fanout.push(0);
        open.push(nodes.len() - 1);
    }
    Ok(make_tree(nodes))
}
