//! Read a tree and a vector from JSON, evaluate every norm, write them back.

use std::sync::Arc;

use baire_lab::baire::{baire_norm, BaireParams};
use baire_lab::hi::ground_norm;
use baire_lab::io::{parse_tree, parse_vector, tree_to_json, vector_to_json};
use baire_lab::tsirelson::{tsirelson_norm, TsirelsonVariant};
use baire_lab::BaseNorm;

fn main() -> baire_lab::Result<()> {
    let parsed = parse_tree(r#"{"nodes": [[0, 1], [0, 2], [3]]}"#)?;
    println!("closure added nodes: {}", parsed.closure_added);
    let tree = Arc::new(parsed.tree);
    let x = parse_vector(r#"{"entries": [[[0], "1/2"], [[0, 1], "-2"], [[0, 2], 1], [[3], "5/4"]]}"#, tree.clone())?;

    println!("baire p=1 l1   {}", baire_norm(&x, &BaireParams::with_p(1, BaseNorm::l1())?)?);
    println!("baire p=2 l2   {}", baire_norm(&x, &BaireParams::with_p(2, BaseNorm::parse("l2")?)?)?);
    println!("ground         {}", ground_norm(&x)?);
    println!("tsirelson      {}", tsirelson_norm(&x, TsirelsonVariant::Incomparable)?);
    println!("{}", tree_to_json(&tree));
    println!("{}", vector_to_json(&x));
    Ok(())
}
