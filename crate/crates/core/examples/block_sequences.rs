//! Normalized incomparable block sequences and their sampled constants.

use std::sync::Arc;

use baire_lab::sequence::{
    equivalence_ratio_bounds, generate_incomparable_blocks, unconditionality_constant_lower, NormContext, NormKind,
};
use baire_lab::tree::random_tree;
use baire_lab::tsirelson::{verify_block_domination, TsirelsonVariant};
use baire_lab::vector::rat;

fn main() -> baire_lab::Result<()> {
    let tree = Arc::new(random_tree(5, 40, 4)?);
    let tsi = NormContext::new(NormKind::Tsirelson(TsirelsonVariant::Incomparable), tree.clone())?;
    let ground = NormContext::new(NormKind::Ground, tree.clone())?;
    let count = tree.leaves().len().min(3);
    let seq = generate_incomparable_blocks(&tree, count, 11, &tsi)?;
    for (b, w) in seq.blocks().iter().zip(seq.windows()) {
        let entries: Vec<String> = b.entries().iter().map(|(n, v)| format!("{n}:{v}")).collect();
        println!("window [{}, {}]  {}", w.start, w.end, entries.join(" "));
    }
    let coeffs = vec![rat(1, 1), rat(-2, 3), rat(1, 2)][..count].to_vec();
    let lemma = verify_block_domination(&tree, &seq, &coeffs)?;
    println!("index side {} <= block side {}: {}", lemma.index_norm, lemma.block_norm, lemma.holds);

    let k = equivalence_ratio_bounds(&seq, &tsi, &seq, &ground, 16, 2)?;
    println!("tsirelson vs ground on these blocks: K >= {} at {:?}", k.lower, k.witness.iter().map(ToString::to_string).collect::<Vec<_>>());
    let u = unconditionality_constant_lower(&seq, &tsi, 2, 3)?;
    println!("unconditional constant >= {}", u.lower);
    Ok(())
}
