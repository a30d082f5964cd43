//! Tsirelson norms, their iterates, and a replayable derivation.

use std::sync::Arc;

use baire_lab::tree::star_tree;
use baire_lab::tsirelson::{
    check_fixed_point, replay_derivation, tsirelson_iterate, tsirelson_norm_with_witness, TsirelsonVariant,
};
use baire_lab::vector::{int, rat};
use baire_lab::{TreeNode, TreeVector};

fn main() -> baire_lab::Result<()> {
    let tree = Arc::new(star_tree(6, 3)?);
    let x = TreeVector::from_entries(
        tree,
        (3..9).map(|i| (TreeNode::from(vec![i]), if i % 2 == 0 { int(1) } else { rat(-3, 4) })),
    )?;
    println!("sup {}  l1 {}", x.sup(), x.l1());
    for v in [TsirelsonVariant::Incomparable, TsirelsonVariant::Standard] {
        let r = tsirelson_norm_with_witness(&x, v)?;
        println!("{v}: {}  (witness depth {})", r.value, r.witness.depth());
        println!("  replayed: {}", replay_derivation(&x, v, &r.witness)?);
        let fp = check_fixed_point(&x, v)?;
        println!("  fixed point holds: {} over {} families", fp.holds(), fp.families_checked);
        let iterates: Vec<String> = (0..=3).map(|m| tsirelson_iterate(&x, v, m).map(|r| r.to_string())).collect::<Result<_, _>>()?;
        println!("  iterates: {}", iterates.join(", "));
    }
    let r = tsirelson_norm_with_witness(&x, TsirelsonVariant::Incomparable)?;
    println!("{}", serde_json::to_string_pretty(&r.witness).expect("serializes"));
    Ok(())
}
