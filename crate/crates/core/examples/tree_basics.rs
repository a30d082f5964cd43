//! Build trees, walk the canonical enumeration, and compute ranks.

use baire_lab::tree::{chain_tree, comb_tree, make_tree, maximal_chains, rank, star_tree};
use baire_lab::TreeNode;

fn main() -> baire_lab::Result<()> {
    let t = make_tree([vec![0u64, 1], vec![1], vec![2, 0, 0]]);
    println!("{} nodes, alphabet max {}", t.len(), t.alphabet_max());
    for n in t.iter() {
        println!("  {:<8} index {}", n.to_string(), t.index_of(n)?);
    }
    let e = t.enumeration();
    println!("s_7 = {}", e.node_at(7));
    println!("(0) ⪯ (0,1)? {}", TreeNode::from(vec![0]).is_prefix_of(&TreeNode::from(vec![0, 1])));

    for c in maximal_chains(&t) {
        let nodes: Vec<String> = c.nodes().iter().map(ToString::to_string).collect();
        println!("branch: {}", nodes.join(" ≺ "));
    }

    println!("rank(chain 5) = {}", rank(&chain_tree(5)?)?);
    println!("rank(star 4)  = {}", rank(&star_tree(4, 0)?)?);
    println!("rank(comb 3)  = {}", rank(&comb_tree(3)?)?);
    println!("rank of the tree above = {}", rank(&t)?);
    Ok(())
}
