//! Finite block sequences, norm contexts, and sampled lower bounds for
//! equivalence and unconditionality constants.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baire::{baire_norm, BaireParams};
use crate::error::{Error, Result};
use crate::hi::{dg_lower_bound, ground_norm, OpPair};
use crate::tree::{completely_incomparable, FiniteTree, TreeNode};
use crate::tsirelson::{tsirelson_norm, TsirelsonVariant};
use crate::vector::{int, rat, NormValue, Rational, TreeVector};

/// Largest sequence length for which all `±1` patterns are sampled.
pub const SIGN_PATTERN_CAP: usize = 10;
/// Largest sequence length for which all `0/1` patterns are sampled.
pub const INDICATOR_PATTERN_CAP: usize = 12;
/// Largest sequence length accepted by [`unconditionality_constant_lower`].
pub const UNCONDITIONAL_CAP: usize = 12;

/// The enumeration indices `start..=end`, i.e. the interval `(p_n, p_{n+1}]`
/// with `p_n = start - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub start: u128,
    pub end: u128,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteBlockSequence {
    blocks: Vec<TreeVector>,
    windows: Vec<Window>,
    incomparable: bool,
}

impl FiniteBlockSequence {
    pub fn new(blocks: Vec<TreeVector>, windows: Vec<Window>) -> Result<Self> {
        if blocks.len() != windows.len() {
            return Err(Error::LengthMismatch(blocks.len(), windows.len()));
        }
        let incomparable = pairwise_incomparable(&blocks);
        let seq = FiniteBlockSequence {
            blocks,
            windows,
            incomparable,
        };
        seq.validate()?;
        Ok(seq)
    }

    /// Windows as small as the supports allow: each starts at the first support
    /// node of its block and ends right before the next block starts.
    pub fn tight(blocks: Vec<TreeVector>) -> Result<Self> {
        let mut starts = Vec::with_capacity(blocks.len());
        for (i, b) in blocks.iter().enumerate() {
            let first = b
                .support()
                .into_iter()
                .next()
                .ok_or_else(|| Error::Precondition(format!("block {i} is zero")))?;
            starts.push(b.tree().index_of(&first)?);
        }
        let mut windows = Vec::with_capacity(blocks.len());
        for (i, b) in blocks.iter().enumerate() {
            let end = match starts.get(i + 1) {
                Some(&next) if next > 0 => next - 1,
                Some(_) => {
                    return Err(Error::Precondition(format!("block {} starts at the root", i + 1)))
                }
                None => {
                    let last = b.support().into_iter().next_back().expect("nonzero block");
                    b.tree().index_of(&last)?
                }
            };
            windows.push(Window {
                start: starts[i],
                end,
            });
        }
        FiniteBlockSequence::new(blocks, windows)
    }

    pub fn blocks(&self) -> &[TreeVector] {
        &self.blocks
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Whether the supports are pairwise completely incomparable.
    pub fn incomparable_supports(&self) -> bool {
        self.incomparable
    }

    /// Checks that blocks are nonzero, live on one tree, sit inside their
    /// windows, and that the windows increase.
    pub fn validate(&self) -> Result<()> {
        if self.blocks.len() != self.windows.len() {
            return Err(Error::LengthMismatch(self.blocks.len(), self.windows.len()));
        }
        for (i, (b, w)) in self.blocks.iter().zip(&self.windows).enumerate() {
            if w.start > w.end {
                return Err(Error::Precondition(format!("window {i} is empty")));
            }
            if i > 0 {
                if !b.same_tree(&self.blocks[0]) {
                    return Err(Error::MixedTrees);
                }
                if self.windows[i - 1].end >= w.start {
                    return Err(Error::Precondition(format!(
                        "windows {} and {i} are not increasing",
                        i - 1
                    )));
                }
            }
            if b.is_zero() {
                return Err(Error::Precondition(format!("block {i} is zero")));
            }
            for n in b.support() {
                let idx = b.tree().index_of(&n)?;
                if idx < w.start || idx > w.end {
                    return Err(Error::Precondition(format!(
                        "support node {n} of block {i} (index {idx}) leaves its window [{}, {}]",
                        w.start, w.end
                    )));
                }
            }
        }
        Ok(())
    }

    /// `Σ a_n y_n`.
    pub fn combine(&self, coeffs: &[Rational]) -> Result<TreeVector> {
        combine(&self.blocks, coeffs)
    }
}

fn pairwise_incomparable(blocks: &[TreeVector]) -> bool {
    let supports: Vec<Vec<TreeNode>> = blocks.iter().map(TreeVector::support).collect();
    supports.iter().enumerate().all(|(i, a)| {
        supports[i + 1..]
            .iter()
            .all(|b| completely_incomparable(a.iter(), b.iter()))
    })
}

/// `Σ a_n y_n` over blocks on a common tree.
pub fn combine(blocks: &[TreeVector], coeffs: &[Rational]) -> Result<TreeVector> {
    if blocks.len() != coeffs.len() {
        return Err(Error::LengthMismatch(blocks.len(), coeffs.len()));
    }
    let first = blocks.first().ok_or(Error::ZeroSize)?;
    let mut acc = TreeVector::zero(first.tree().clone());
    for (b, a) in blocks.iter().zip(coeffs) {
        acc = acc.add(&b.scale(a))?;
    }
    Ok(acc)
}

/// Which norm a context evaluates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormKind {
    Baire(BaireParams),
    Tsirelson(TsirelsonVariant),
    Ground,
    DgLower { depth: usize, ops: Vec<OpPair> },
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::Baire(p) => write!(f, "baire(p={}, base={})", p.p, p.base),
            NormKind::Tsirelson(v) => write!(f, "tsirelson({v})"),
            NormKind::Ground => f.write_str("ground"),
            NormKind::DgLower { depth, ops } => {
                let ops: Vec<String> = ops.iter().map(OpPair::to_string).collect();
                write!(f, "dg_lower(depth={depth}, ops={})", ops.join(","))
            }
        }
    }
}

/// A norm bound to the tree it is evaluated on.
#[derive(Clone, Debug)]
pub struct NormContext {
    pub kind: NormKind,
    pub tree: Arc<FiniteTree>,
}

impl NormContext {
    pub fn new(kind: NormKind, tree: Arc<FiniteTree>) -> Result<Self> {
        if tree.is_empty() {
            return Err(Error::EmptyTree);
        }
        if let NormKind::DgLower { ops, .. } = &kind {
            if ops.is_empty() {
                return Err(Error::InvalidOperation("operation list is empty".into()));
            }
        }
        Ok(NormContext { kind, tree })
    }

    pub fn norm(&self, x: &TreeVector) -> Result<NormValue> {
        if x.tree().as_ref() != self.tree.as_ref() {
            return Err(Error::MixedTrees);
        }
        Ok(match &self.kind {
            NormKind::Baire(params) => baire_norm(x, params)?,
            NormKind::Tsirelson(v) => NormValue::exact(tsirelson_norm(x, *v)?),
            NormKind::Ground => NormValue::exact(ground_norm(x)?),
            NormKind::DgLower { depth, ops } => NormValue::exact(dg_lower_bound(x, *depth, ops)?.value),
        })
    }

    /// Whether the norm is known to be invariant under sign changes of coordinates.
    pub fn is_unconditional(&self) -> bool {
        !matches!(self.kind, NormKind::DgLower { .. })
    }
}

/// Random nonzero rational with numerator in `-6..=6` and denominator in `1..=4`.
pub(crate) fn random_coefficient(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let n: i64 = rng.gen_range(-6..=6);
        if n != 0 {
            return rat(n, rng.gen_range(1..=4));
        }
    }
}

/// Random rational in `[-1, 1]` with denominator 8.
pub(crate) fn random_unit_coefficient(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(-8..=8), 8)
}

/// Largest number of blocks with pairwise completely incomparable supports.
pub fn max_incomparable_blocks(tree: &FiniteTree) -> usize {
    tree.leaves().len()
}

/// [`generate_incomparable_blocks_with`] allowing one extra ancestor per block.
pub fn generate_incomparable_blocks(
    tree: &Arc<FiniteTree>,
    count: usize,
    seed: u64,
    ctx: &NormContext,
) -> Result<FiniteBlockSequence> {
    generate_incomparable_blocks_with(tree, count, seed, ctx, 1)
}

/// Blocks over `count` seeded leaves, each possibly extended by up to
/// `max_extra` ancestors that no other chosen leaf lies below, with random
/// coefficients rescaled to norm 1 under `ctx` (to within the interval
/// tolerance when the norm is irrational).
pub fn generate_incomparable_blocks_with(
    tree: &Arc<FiniteTree>,
    count: usize,
    seed: u64,
    ctx: &NormContext,
    max_extra: usize,
) -> Result<FiniteBlockSequence> {
    if count == 0 {
        return Err(Error::ZeroSize);
    }
    if ctx.tree.as_ref() != tree.as_ref() {
        return Err(Error::MixedTrees);
    }
    let leaves = tree.leaves();
    if count > leaves.len() {
        return Err(Error::TreeTooSmall {
            max: leaves.len(),
            requested: count,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = sample(&mut rng, leaves.len(), count).into_vec();
    picked.sort_unstable();
    let chosen: Vec<TreeNode> = picked.into_iter().map(|i| leaves[i].clone()).collect();

    let mut blocks = Vec::with_capacity(count);
    for (i, leaf) in chosen.iter().enumerate() {
        let mut nodes: BTreeSet<TreeNode> = BTreeSet::from([leaf.clone()]);
        let mut eligible: Vec<TreeNode> = leaf
            .ancestors_inclusive()
            .filter(|a| a != leaf)
            .filter(|a| chosen.iter().all(|c| c == leaf || !a.is_prefix_of(c)))
            .filter(|a| i == 0 || *a > chosen[i - 1])
            .collect();
        for _ in 0..max_extra {
            if eligible.is_empty() || !rng.gen_bool(0.5) {
                break;
            }
            let k = rng.gen_range(0..eligible.len());
            nodes.insert(eligible.swap_remove(k));
        }
        let raw = TreeVector::from_entries(
            tree.clone(),
            nodes.into_iter().map(|n| {
                let c = random_coefficient(&mut rng);
                (n, c)
            }),
        )?;
        let norm = ctx.norm(&raw)?;
        let divisor = norm.exact.clone().unwrap_or_else(|| norm.lower.clone());
        if !divisor.is_positive() {
            return Err(Error::Degenerate(format!("block {i} has zero norm")));
        }
        blocks.push(raw.scale(&divisor.recip()));
    }
    FiniteBlockSequence::tight(blocks)
}

/// Deterministic coefficient family: sign patterns, indicator patterns, and
/// `trials` seeded vectors with entries in `[-1, 1]` (zero vectors skipped).
pub fn coefficient_family(n: usize, trials: usize, seed: u64) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    if n <= SIGN_PATTERN_CAP {
        for mask in 0u32..(1 << n) {
            out.push((0..n).map(|i| if mask >> i & 1 == 1 { int(-1) } else { int(1) }).collect());
        }
    }
    if n <= INDICATOR_PATTERN_CAP {
        for mask in 1u32..(1 << n) {
            out.push((0..n).map(|i| int((mask >> i & 1) as i64)).collect());
        }
    } else {
        out.push(vec![int(1); n]);
        for i in 0..n {
            let mut e = vec![int(0); n];
            e[i] = int(1);
            out.push(e);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut made = 0;
    while made < trials {
        let v: Vec<Rational> = (0..n).map(|_| random_unit_coefficient(&mut rng)).collect();
        if v.iter().any(|c| !c.is_zero()) {
            out.push(v);
            made += 1;
        }
    }
    out
}

/// A certified lower bound for an equivalence or unconditionality constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantBound {
    pub lower: Rational,
    pub witness: Vec<Rational>,
}

/// Certified lower bound for the smallest `K` with `(A) ≈_K (B)`, as a maximum of
/// two-sided norm ratios over [`coefficient_family`].
pub fn equivalence_ratio_bounds(
    a: &FiniteBlockSequence,
    ctx_a: &NormContext,
    b: &FiniteBlockSequence,
    ctx_b: &NormContext,
    trials: usize,
    seed: u64,
) -> Result<ConstantBound> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(Error::ZeroSize);
    }
    let family = coefficient_family(a.len(), trials, seed);
    let mut best = ConstantBound {
        lower: Rational::one(),
        witness: family[0].clone(),
    };
    for coeffs in family {
        let na = ctx_a.norm(&a.combine(&coeffs)?)?;
        let nb = ctx_b.norm(&b.combine(&coeffs)?)?;
        let ratio = match (na.upper.is_zero(), nb.upper.is_zero()) {
            (true, true) => continue,
            (false, false) => std::cmp::max(&na.lower / &nb.upper, &nb.lower / &na.upper),
            _ => {
                return Err(Error::Degenerate(format!(
                    "one side vanishes at coefficients {}",
                    format_coeffs(&coeffs)
                )))
            }
        };
        if ratio > best.lower {
            best = ConstantBound {
                lower: ratio,
                witness: coeffs,
            };
        }
    }
    Ok(best)
}

pub(crate) fn format_coeffs(coeffs: &[Rational]) -> String {
    let parts: Vec<String> = coeffs.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

/// Certified lower bound for the unconditional constant: the largest
/// `‖Σ ε_i a_i y_i‖ / ‖Σ a_i y_i‖` over `ε ∈ {-1, 0, 1}^n`, the all-ones vector
/// and `trials` seeded coefficient vectors. The witness holds `ε_i a_i`.
pub fn unconditionality_constant_lower(
    a: &FiniteBlockSequence,
    ctx: &NormContext,
    trials: usize,
    seed: u64,
) -> Result<ConstantBound> {
    let n = a.len();
    if n > UNCONDITIONAL_CAP {
        return Err(Error::PatternCapExceeded {
            size: n,
            cap: UNCONDITIONAL_CAP,
        });
    }
    if n == 0 {
        return Err(Error::ZeroSize);
    }
    let mut bases = vec![vec![int(1); n]];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while bases.len() < trials + 1 {
        let v: Vec<Rational> = (0..n).map(|_| random_coefficient(&mut rng)).collect();
        bases.push(v);
    }
    // ε = (1, …, 1) gives ratio 1 exactly
    let mut best = ConstantBound {
        lower: Rational::one(),
        witness: bases[0].clone(),
    };
    let patterns = 3usize.pow(n as u32);
    for base in &bases {
        let den = ctx.norm(&a.combine(base)?)?;
        if den.upper.is_zero() {
            continue;
        }
        for code in 0..patterns {
            let mut c = code;
            let coeffs: Vec<Rational> = base
                .iter()
                .map(|v| {
                    let e = c % 3;
                    c /= 3;
                    match e {
                        0 => v.clone(),
                        1 => -v,
                        _ => Rational::zero(),
                    }
                })
                .collect();
            let num = ctx.norm(&a.combine(&coeffs)?)?;
            let ratio = &num.lower / &den.upper;
            if ratio > best.lower {
                best = ConstantBound {
                    lower: ratio,
                    witness: coeffs,
                };
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baire::Exponent;
    use crate::tree::{random_tree, star_tree};
    use crate::vector::BaseNorm;

    fn tsirelson_ctx(tree: &Arc<FiniteTree>) -> NormContext {
        NormContext::new(NormKind::Tsirelson(TsirelsonVariant::Incomparable), tree.clone()).unwrap()
    }

    #[test]
    fn star_singletons() {
        let t = Arc::new(star_tree(5, 3).unwrap());
        let ctx = tsirelson_ctx(&t);
        let seq = generate_incomparable_blocks_with(&t, 5, 9, &ctx, 0).unwrap();
        assert!(seq.incomparable_supports());
        assert_eq!(seq.len(), 5);
        for b in seq.blocks() {
            assert_eq!(b.support_len(), 1);
            assert_eq!(tsirelson_norm(b, TsirelsonVariant::Incomparable).unwrap(), int(1));
        }
        assert_eq!(
            generate_incomparable_blocks(&t, 6, 0, &ctx).unwrap_err(),
            Error::TreeTooSmall { max: 5, requested: 6 }
        );
    }

    #[test]
    fn generation_is_deterministic_and_valid() {
        for seed in 0..20 {
            let t = Arc::new(random_tree(seed, 25, 3).unwrap());
            let ctx = tsirelson_ctx(&t);
            let count = max_incomparable_blocks(&t).min(4);
            let a = generate_incomparable_blocks_with(&t, count, seed, &ctx, 2).unwrap();
            let b = generate_incomparable_blocks_with(&t, count, seed, &ctx, 2).unwrap();
            assert_eq!(a, b);
            assert!(a.incomparable_supports());
            a.validate().unwrap();
            for (blk, w) in a.blocks().iter().zip(a.windows()) {
                let first = blk.support()[0].clone();
                assert_eq!(t.index_of(&first).unwrap(), w.start);
                assert!(ctx.norm(blk).unwrap().contains(&int(1)));
            }
        }
    }

    #[test]
    fn windows_must_increase() {
        let t = Arc::new(star_tree(3, 0).unwrap());
        let u = |i: u64| TreeVector::unit(t.clone(), TreeNode::from(vec![i])).unwrap();
        let bad = FiniteBlockSequence::new(
            vec![u(0), u(1)],
            vec![Window { start: 1, end: 2 }, Window { start: 2, end: 2 }],
        );
        assert!(bad.is_err());
        let outside = FiniteBlockSequence::new(vec![u(1)], vec![Window { start: 1, end: 1 }]);
        assert!(outside.is_err());
        assert!(FiniteBlockSequence::tight(vec![u(1), u(0)]).is_err());
    }

    #[test]
    fn equivalence_examples() {
        let t = Arc::new(star_tree(4, 4).unwrap());
        let tsi = tsirelson_ctx(&t);
        let ground = NormContext::new(NormKind::Ground, t.clone()).unwrap();
        let a = generate_incomparable_blocks_with(&t, 4, 1, &tsi, 0).unwrap();
        let same = equivalence_ratio_bounds(&a, &tsi, &a, &tsi, 20, 3).unwrap();
        assert_eq!(same.lower, int(1));

        let units = FiniteBlockSequence::tight(t.leaves().into_iter().map(|l| TreeVector::unit(t.clone(), l).unwrap()).collect()).unwrap();
        let k = equivalence_ratio_bounds(&units, &tsi, &units, &ground, 10, 5).unwrap();
        let ones = vec![int(1); 4];
        let at_ones = tsi.norm(&units.combine(&ones).unwrap()).unwrap().exact.unwrap()
            / ground.norm(&units.combine(&ones).unwrap()).unwrap().exact.unwrap();
        assert!(k.lower >= at_ones);
        let back = equivalence_ratio_bounds(&units, &ground, &units, &tsi, 10, 5).unwrap();
        assert_eq!(k.lower, back.lower);

        let doubled = FiniteBlockSequence::tight(units.blocks().iter().map(|b| b.scale(&int(2))).collect()).unwrap();
        let k2 = equivalence_ratio_bounds(&units, &tsi, &doubled, &tsi, 5, 1).unwrap();
        assert!(k2.lower >= int(2));
        assert!(equivalence_ratio_bounds(&units, &tsi, &a, &tsi, 1, 1).is_ok());
    }

    #[test]
    fn unconditional_norms() {
        let t = Arc::new(random_tree(77, 30, 4).unwrap());
        let count = max_incomparable_blocks(&t).min(4);
        let kinds = [
            NormKind::Tsirelson(TsirelsonVariant::Incomparable),
            NormKind::Baire(BaireParams::new(Exponent::P(int(1)), BaseNorm::l1())),
            NormKind::Baire(BaireParams::with_p(2, BaseNorm::l1()).unwrap()),
            NormKind::Ground,
        ];
        for kind in kinds {
            let ctx = NormContext::new(kind, t.clone()).unwrap();
            let seq = generate_incomparable_blocks(&t, count, 3, &ctx).unwrap();
            let u = unconditionality_constant_lower(&seq, &ctx, 2, 4).unwrap();
            assert_eq!(u.lower, int(1), "{}", ctx.kind);
        }
        let single = generate_incomparable_blocks(&t, 1, 0, &NormContext::new(NormKind::Ground, t.clone()).unwrap()).unwrap();
        let ctx = NormContext::new(NormKind::Ground, t.clone()).unwrap();
        assert_eq!(unconditionality_constant_lower(&single, &ctx, 3, 0).unwrap().lower, int(1));
    }

    #[test]
    fn unconditional_cap() {
        let t = Arc::new(star_tree(13, 0).unwrap());
        let ctx = NormContext::new(NormKind::Ground, t.clone()).unwrap();
        let seq = generate_incomparable_blocks(&t, 13, 0, &ctx).unwrap();
        assert_eq!(
            unconditionality_constant_lower(&seq, &ctx, 0, 0).unwrap_err(),
            Error::PatternCapExceeded { size: 13, cap: 12 }
        );
    }
}
