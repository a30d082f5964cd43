//! Baire-sum norms with their witness families, checked against the oracle.

use std::sync::Arc;

use baire_lab::baire::{baire_norm_oracle, baire_norm_with_witness, BaireParams, Exponent, ORACLE_CAP};
use baire_lab::tree::make_tree;
use baire_lab::vector::{int, rat};
use baire_lab::{BaseNorm, TreeNode, TreeVector};

fn main() -> baire_lab::Result<()> {
    let tree = Arc::new(make_tree([vec![0u64, 0], vec![0, 1], vec![1, 0]]));
    let x = TreeVector::from_entries(
        tree,
        [
            (TreeNode::root(), int(1)),
            (TreeNode::from(vec![0]), int(2)),
            (TreeNode::from(vec![0, 1]), rat(-3, 2)),
            (TreeNode::from(vec![1, 0]), int(3)),
        ],
    )?;

    let cases = [
        BaireParams::zero(BaseNorm::l1()),
        BaireParams::new(Exponent::p(int(1))?, BaseNorm::l1()),
        BaireParams::new(Exponent::p(int(2))?, BaseNorm::l1()),
        BaireParams::new(Exponent::p(int(2))?, BaseNorm::lq(int(2))?),
        BaireParams::new(Exponent::p(int(3))?, BaseNorm::Sup),
    ];
    for params in cases {
        let r = baire_norm_with_witness(&x, &params)?;
        let o = baire_norm_oracle(&x, &params, ORACLE_CAP)?;
        println!("p={} base={}: {}  (oracle {}, agree {})", params.p, params.base, r.value, o.value, r.value.agrees_with(&o.value));
        for s in &r.family {
            let nodes: Vec<String> = s.nodes().iter().map(ToString::to_string).collect();
            println!("    segment {}", nodes.join(" "));
        }
    }
    Ok(())
}
