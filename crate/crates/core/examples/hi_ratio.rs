//! Ground norm against norming-set lower bounds on incomparable unit vectors.

use baire_lab::hi::{schedule, strict_singularity_witness};
use baire_lab::tree::star_tree;

fn main() -> baire_lab::Result<()> {
    let tree = star_tree(64, 4)?;
    println!("{:>3} {:>3} {:>6} {:>6} {:>6} {:>6}", "m", "n", "ground", "lower", "upper", "ratio");
    for (m, n) in [(2, 4), (2, 8), (2, 16), (4, 64), (4, 4)] {
        let (row, f) = strict_singularity_witness(&tree, n, m)?;
        println!(
            "{:>3} {:>3} {:>6} {:>6} {:>6} {:>6}   ops nested: {}",
            row.m, row.n, row.ground, row.lower, row.upper, row.ratio,
            f.provenance.op_depth()
        );
    }
    let s = schedule(3)?;
    for (j, (m, n)) in s.m.iter().zip(&s.n).enumerate() {
        let digits = n.to_string();
        println!("j={} m={m} n has {} digits", j + 1, digits.len());
    }
    Ok(())
}
