//! JSON interchange for trees and vectors.
//!
//! Trees: `{"nodes": [[], [0], [0, 1]]}`. Missing prefixes are added.
//! Vectors: `{"entries": [[[0, 1], "3/2"], ...]}` with exact rational strings.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::tree::{FiniteTree, TreeNode};
use crate::vector::{format_rational, parse_rational, Rational, TreeVector};

#[derive(Serialize, Deserialize)]
struct TreeJson {
    nodes: Vec<Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
struct VectorJson {
    entries: Vec<(Vec<u64>, Value)>,
}

/// A parsed tree and whether prefix closure added nodes.
#[derive(Clone, Debug)]
pub struct ParsedTree {
    pub tree: FiniteTree,
    pub closure_added: bool,
}

pub fn parse_tree(text: &str) -> Result<ParsedTree> {
    let raw: TreeJson = serde_json::from_str(text).map_err(|e| Error::Parse(format!("tree json: {e}")))?;
    let (tree, closure_added) = FiniteTree::from_paths_reporting(raw.nodes);
    Ok(ParsedTree { tree, closure_added })
}

pub fn tree_to_json(tree: &FiniteTree) -> String {
    let raw = TreeJson {
        nodes: tree.iter().map(|n| n.path().to_vec()).collect(),
    };
    serde_json::to_string(&raw).expect("tree serializes")
}

fn coefficient(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() || n.is_u64() => parse_rational(&n.to_string()),
        other => Err(Error::Parse(format!(
            "coefficient {other} must be an exact rational string or an integer"
        ))),
    }
}

pub fn parse_vector(text: &str, tree: Arc<FiniteTree>) -> Result<TreeVector> {
    let raw: VectorJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("vector json: {e}")))?;
    let mut x = TreeVector::zero(tree);
    let mut seen = BTreeSet::new();
    for (path, v) in raw.entries {
        let node = TreeNode::new(path);
        if !seen.insert(node.clone()) {
            return Err(Error::Parse(format!("node {node} listed twice")));
        }
        x.set(node, coefficient(&v)?)?;
    }
    Ok(x)
}

pub fn vector_to_json(x: &TreeVector) -> String {
    let raw = VectorJson {
        entries: x
            .entries()
            .iter()
            .map(|(n, v)| (n.path().to_vec(), Value::String(format_rational(v))))
            .collect(),
    };
    serde_json::to_string(&raw).expect("vector serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::make_tree;
    use crate::vector::rat;

    #[test]
    fn tree_round_trip() {
        let p = parse_tree(r#"{"nodes": [[], [0], [1], [0, 1]]}"#).unwrap();
        assert!(!p.closure_added);
        let q = parse_tree(&tree_to_json(&p.tree)).unwrap();
        assert_eq!(p.tree, q.tree);
        let r = parse_tree(r#"{"nodes": [[2, 1]]}"#).unwrap();
        assert!(r.closure_added);
        assert_eq!(r.tree.len(), 3);
        assert!(parse_tree(r#"{"nodes": [[-1]]}"#).is_err());
        assert!(parse_tree("[]").is_err());
    }

    #[test]
    fn vector_round_trip() {
        let t = Arc::new(make_tree([vec![0u64, 1], vec![1]]));
        let x = parse_vector(r#"{"entries": [[[0, 1], "3/2"], [[1], -2], [[], "0"]]}"#, t.clone()).unwrap();
        assert_eq!(x.get(&TreeNode::from(vec![0, 1])), rat(3, 2));
        assert_eq!(x.support_len(), 2);
        let y = parse_vector(&vector_to_json(&x), t.clone()).unwrap();
        assert_eq!(x, y);
        assert!(parse_vector(r#"{"entries": [[[5], "1"]]}"#, t.clone()).is_err());
        assert!(parse_vector(r#"{"entries": [[[1], 0.5]]}"#, t.clone()).is_err());
        assert!(parse_vector(r#"{"entries": [[[1], "1/0"]]}"#, t).is_err());
    }
}
