//! `ℓ_p`-Baire sums over a tree.
//!
//! `‖x‖_{E,p,θ}` is the supremum, over finite families of pairwise completely
//! incomparable segments, of the `ℓ_p` aggregate of the segment base norms; the
//! `p = 0` variant takes a single segment. [`baire_norm`] evaluates it with a
//! bottom-up pass over the tree; [`baire_norm_oracle`] enumerates families
//! directly and is kept as the reference semantics.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::tree::{completely_incomparable, Segment, TreeNode};
use crate::vector::{
    base_norm_of_segment, coefficient_summary, summary_to_norm, with_precision, BaseNorm, Interval,
    NormValue, Rational, TreeVector, INTERVAL_REL_TOL_BITS,
};

/// Default support cap for [`baire_norm_oracle`].
pub const ORACLE_CAP: usize = 12;

/// Outer exponent of the Baire sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exponent {
    /// The `c_0`-type sum: a single segment.
    Zero,
    /// `p ∈ [1, ∞)`, rational.
    P(Rational),
}

impl Exponent {
    pub fn p(p: Rational) -> Result<Self> {
        if p < Rational::one() {
            return Err(Error::InvalidExponent(format!("p = {p} < 1")));
        }
        Ok(Exponent::P(p))
    }

    /// `0` (or `zero`) is the single-segment sum; anything else must parse as a rational ≥ 1.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("zero") || s == "0" {
            return Ok(Exponent::Zero);
        }
        Exponent::p(crate::vector::parse_rational(s)?)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Zero => f.write_str("0"),
            Exponent::P(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaireParams {
    pub p: Exponent,
    pub base: BaseNorm,
}

impl BaireParams {
    pub fn new(p: Exponent, base: BaseNorm) -> Self {
        BaireParams { p, base }
    }

    pub fn zero(base: BaseNorm) -> Self {
        BaireParams::new(Exponent::Zero, base)
    }

    pub fn with_p(p: i64, base: BaseNorm) -> Result<Self> {
        Ok(BaireParams::new(Exponent::p(crate::vector::int(p))?, base))
    }

    fn validate(&self) -> Result<()> {
        if let Exponent::P(p) = &self.p {
            if p < &Rational::one() {
                return Err(Error::InvalidExponent(format!("p = {p} < 1")));
            }
        }
        if let BaseNorm::Lq(q) = &self.base {
            if q < &Rational::one() {
                return Err(Error::InvalidExponent(format!("q = {q} < 1")));
            }
        }
        Ok(())
    }

    /// Exponent taking a base-norm summary to the `p`-th power of the segment norm.
    fn summary_exponent(&self, p: &Rational) -> Rational {
        match &self.base {
            BaseNorm::Sup => p.clone(),
            BaseNorm::Lq(q) => p / q,
        }
    }
}

/// Norm value together with one optimal family of segments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaireResult {
    pub value: NormValue,
    /// `Σ_i value(I_i)^p` for the p-case, `None` for the single-segment case.
    pub power_sum: Option<NormValue>,
    pub family: Vec<Segment>,
}

/// `‖x‖_{E,p,θ}` (or the `0` variant).
pub fn baire_norm(x: &TreeVector, params: &BaireParams) -> Result<NormValue> {
    Ok(baire_norm_with_witness(x, params)?.value)
}

pub fn baire_norm_with_witness(x: &TreeVector, params: &BaireParams) -> Result<BaireResult> {
    params.validate()?;
    if x.tree().is_empty() {
        return Err(Error::EmptyTree);
    }
    let mut bits = INTERVAL_REL_TOL_BITS + 24;
    loop {
        let out = evaluate_dp(x, params, bits);
        if out.value.interval().relative_width_within(INTERVAL_REL_TOL_BITS) || bits > 4096 {
            return Ok(out);
        }
        bits *= 2;
    }
}

fn midpoint_gt(a: &Interval, b: &Interval) -> bool {
    &a.lo + &a.hi > &b.lo + &b.hi
}

fn evaluate_dp(x: &TreeVector, params: &BaireParams, bits: u32) -> BaireResult {
    let arena = x.tree().arena();
    let n = arena.nodes.len();
    let base = &params.base;
    // best path summary from each node downward, with the child it continues into
    let mut path = vec![Interval::zero(); n];
    let mut next: Vec<Option<usize>> = vec![None; n];
    for v in (0..n).rev() {
        let mut best: Option<usize> = None;
        for &c in &arena.children[v] {
            if best.map_or(true, |b| midpoint_gt(&path[c], &path[b])) {
                best = Some(c);
            }
        }
        let tail = best.map_or_else(Interval::zero, |b| {
            arena.children[v]
                .iter()
                .fold(path[b].clone(), |acc, &c| acc.max(&path[c]))
        });
        let own = coefficient_summary([&x.get(&arena.nodes[v])], base, bits);
        path[v] = match base {
            BaseNorm::Sup => own.max(&tail),
            BaseNorm::Lq(_) => own.add(&tail),
        };
        next[v] = best;
    }

    let trimmed_path = |start: usize| -> Option<Segment> {
        let mut nodes = vec![start];
        while let Some(c) = next[*nodes.last().unwrap()] {
            nodes.push(c);
        }
        while nodes
            .last()
            .is_some_and(|&i| x.get(&arena.nodes[i]).is_zero())
        {
            nodes.pop();
        }
        while nodes.first().is_some_and(|&i| x.get(&arena.nodes[i]).is_zero()) {
            nodes.remove(0);
        }
        if nodes.is_empty() {
            return None;
        }
        Some(
            Segment::new(x.tree(), nodes.iter().map(|&i| arena.nodes[i].clone()))
                .expect("downward path is a segment"),
        )
    };

    match &params.p {
        Exponent::Zero => {
            let mut arg = 0;
            let mut best = path[0].clone();
            for v in 1..n {
                best = best.max(&path[v]);
                if midpoint_gt(&path[v], &path[arg]) {
                    arg = v;
                }
            }
            BaireResult {
                value: NormValue::from_interval(summary_to_norm(&best, base, bits)),
                power_sum: None,
                family: trimmed_path(arg).into_iter().collect(),
            }
        }
        Exponent::P(p) => {
            let e = params.summary_exponent(p);
            let mut family_val = vec![Interval::zero(); n];
            let mut take_path = vec![false; n];
            for v in (0..n).rev() {
                let single = path[v].pow(&e, bits);
                let split = arena.children[v]
                    .iter()
                    .fold(Interval::zero(), |acc, &c| acc.add(&family_val[c]));
                take_path[v] = midpoint_gt(&single, &split);
                family_val[v] = single.max(&split);
            }
            let mut family = Vec::new();
            let mut stack = vec![0usize];
            while let Some(v) = stack.pop() {
                if take_path[v] {
                    family.extend(trimmed_path(v));
                } else {
                    stack.extend(arena.children[v].iter().rev());
                }
            }
            let value = family_val[0].pow(&p.recip(), bits);
            BaireResult {
                value: NormValue::from_interval(value),
                power_sum: Some(NormValue::from_interval(family_val[0].clone())),
                family,
            }
        }
    }
}

/// Reference evaluation by enumerating every family of pairwise completely
/// incomparable segments spanned by support nodes. Requires `|supp(x)| ≤ cap`.
pub fn baire_norm_oracle(x: &TreeVector, params: &BaireParams, cap: usize) -> Result<BaireResult> {
    params.validate()?;
    if x.tree().is_empty() {
        return Err(Error::EmptyTree);
    }
    if x.support_len() > cap {
        return Err(Error::OracleCapExceeded {
            size: x.support_len(),
            cap,
        });
    }
    let support = x.support();
    // minimal segments: top and bottom both in the support
    let mut segments = Vec::new();
    for top in &support {
        for bottom in &support {
            if top.is_prefix_of(bottom) {
                segments.push(Segment::between(x.tree(), top, bottom)?);
            }
        }
    }
    let values: Vec<NormValue> = segments
        .iter()
        .map(|s| base_norm_of_segment(x, s, &params.base))
        .collect::<Result<_>>()?;

    match &params.p {
        Exponent::Zero => {
            let mut best: Option<usize> = None;
            let mut acc = Interval::zero();
            for (i, v) in values.iter().enumerate() {
                acc = acc.max(&v.interval());
                if best.map_or(true, |b| midpoint_gt(&v.interval(), &values[b].interval())) {
                    best = Some(i);
                }
            }
            Ok(BaireResult {
                value: NormValue::from_interval(acc),
                power_sum: None,
                family: best.map(|b| segments[b].clone()).into_iter().collect(),
            })
        }
        Exponent::P(p) => {
            let powered: Vec<Interval> = values
                .iter()
                .map(|v| {
                    with_precision(|bits| v.interval().pow(p, bits))
                })
                .collect();
            let mut search = FamilySearch {
                segments: &segments,
                powered: &powered,
                chosen: Vec::new(),
                best: Interval::zero(),
                best_family: Vec::new(),
            };
            search.run(0, Interval::zero());
            let power = search.best.clone();
            let family = search.best_family.iter().map(|&i| segments[i].clone()).collect();
            let value = with_precision(|bits| power.pow(&p.recip(), bits));
            Ok(BaireResult {
                value: NormValue::from_interval(value),
                power_sum: Some(NormValue::from_interval(power)),
                family,
            })
        }
    }
}

struct FamilySearch<'a> {
    segments: &'a [Segment],
    powered: &'a [Interval],
    chosen: Vec<usize>,
    best: Interval,
    best_family: Vec<usize>,
}

impl FamilySearch<'_> {
    fn run(&mut self, from: usize, acc: Interval) {
        if midpoint_gt(&acc, &self.best) {
            self.best_family = self.chosen.clone();
        }
        self.best = self.best.max(&acc);
        for i in from..self.segments.len() {
            let ok = self.chosen.iter().all(|&j| {
                completely_incomparable(self.segments[i].nodes(), self.segments[j].nodes())
            });
            if ok {
                self.chosen.push(i);
                let next = acc.add(&self.powered[i]);
                self.run(i + 1, next);
                self.chosen.pop();
            }
        }
    }
}

/// Value of an explicit family: `(Σ value(I)^p)^{1/p}`, or the largest value for `p = 0`.
/// The family must be pairwise completely incomparable.
pub fn family_value(x: &TreeVector, family: &[Segment], params: &BaireParams) -> Result<NormValue> {
    for (i, a) in family.iter().enumerate() {
        for (j, b) in family.iter().enumerate().skip(i + 1) {
            if !completely_incomparable(a.nodes(), b.nodes()) {
                return Err(Error::ComparableSupports(i, j));
            }
        }
    }
    let values: Vec<NormValue> = family
        .iter()
        .map(|s| base_norm_of_segment(x, s, &params.base))
        .collect::<Result<_>>()?;
    Ok(aggregate(&values, &params.p))
}

/// `ℓ_p` aggregate (max for `p = 0`) of nonnegative values.
pub fn aggregate(values: &[NormValue], p: &Exponent) -> NormValue {
    NormValue::from_interval(with_precision(|bits| match p {
        Exponent::Zero => values
            .iter()
            .fold(Interval::zero(), |acc, v| acc.max(&v.interval())),
        Exponent::P(p) => values
            .iter()
            .fold(Interval::zero(), |acc, v| acc.add(&v.interval().pow(p, bits)))
            .pow(&p.recip(), bits),
    }))
}

/// Norm of `Σ c_i b_i` next to the `ℓ_p` norm of `(|c_i| ‖b_i‖)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockProfile {
    pub combined: NormValue,
    pub profile: NormValue,
    /// `combined / profile`, as an enclosure.
    pub ratio: NormValue,
}

impl BlockProfile {
    /// Whether the ratio enclosure leaves `[lo, hi]`.
    pub fn outside(&self, lo: &Rational, hi: &Rational) -> bool {
        &self.ratio.lower < lo || &self.ratio.upper > hi
    }
}

pub fn incomparable_block_profile(
    blocks: &[TreeVector],
    coeffs: &[Rational],
    params: &BaireParams,
) -> Result<BlockProfile> {
    if blocks.len() != coeffs.len() {
        return Err(Error::LengthMismatch(blocks.len(), coeffs.len()));
    }
    let Some(first) = blocks.first() else {
        return Err(Error::Precondition("at least one block".into()));
    };
    for (i, b) in blocks.iter().enumerate() {
        if !b.same_tree(first) {
            return Err(Error::MixedTrees);
        }
        if b.is_zero() {
            return Err(Error::Precondition(format!("block {i} is zero")));
        }
    }
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            if !completely_incomparable(blocks[i].entries().keys(), blocks[j].entries().keys()) {
                return Err(Error::ComparableSupports(i, j));
            }
        }
    }
    let mut sum = TreeVector::zero(first.tree().clone());
    let mut scaled = Vec::with_capacity(blocks.len());
    for (b, c) in blocks.iter().zip(coeffs) {
        sum = sum.add(&b.scale(c))?;
        scaled.push(baire_norm(b, params)?.scale(c));
    }
    let combined = baire_norm(&sum, params)?;
    let profile = aggregate(&scaled, &params.p);
    let ratio = if profile.upper.is_zero() {
        NormValue::exact(Rational::one())
    } else {
        let lo = &combined.lower / &profile.upper;
        let hi = if profile.lower.is_zero() {
            lo.clone()
        } else {
            &combined.upper / &profile.lower
        };
        NormValue::from_interval(Interval { lo, hi })
    };
    Ok(BlockProfile {
        combined,
        profile,
        ratio,
    })
}

/// Nodes of `family` in order, for reporting.
pub fn family_nodes(family: &[Segment]) -> Vec<Vec<TreeNode>> {
    family.iter().map(|s| s.nodes().to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{chain_tree, make_tree, star_tree};
    use crate::vector::{int, rat};
    use std::sync::Arc;

    fn node(p: &[u64]) -> TreeNode {
        TreeNode::from(p)
    }

    fn cherry() -> TreeVector {
        let t = Arc::new(make_tree([vec![0u64], vec![1]]));
        TreeVector::from_entries(
            t,
            [(node(&[]), int(1)), (node(&[0]), int(2)), (node(&[1]), int(3))],
        )
        .unwrap()
    }

    #[test]
    fn cherry_examples() {
        let x = cherry();
        let l1 = BaseNorm::l1();
        let r = baire_norm_with_witness(&x, &BaireParams::with_p(1, l1.clone()).unwrap()).unwrap();
        assert_eq!(r.value, NormValue::exact(int(5)));
        assert_eq!(family_nodes(&r.family), vec![vec![node(&[0])], vec![node(&[1])]]);
        let r = baire_norm_with_witness(&x, &BaireParams::zero(l1.clone())).unwrap();
        assert_eq!(r.value, NormValue::exact(int(4)));
        assert_eq!(family_nodes(&r.family), vec![vec![node(&[]), node(&[1])]]);
        for params in [BaireParams::with_p(1, l1.clone()).unwrap(), BaireParams::zero(l1)] {
            let o = baire_norm_oracle(&x, &params, ORACLE_CAP).unwrap();
            assert_eq!(o.value, baire_norm(&x, &params).unwrap());
        }
    }

    #[test]
    fn oracle_edge_cases() {
        let t = Arc::new(star_tree(3, 0).unwrap());
        let params = BaireParams::with_p(2, BaseNorm::l1()).unwrap();
        let zero = TreeVector::zero(t.clone());
        assert_eq!(baire_norm_oracle(&zero, &params, 12).unwrap().value, NormValue::exact(int(0)));
        assert_eq!(baire_norm(&zero, &params).unwrap(), NormValue::exact(int(0)));
        let single = TreeVector::from_entries(t.clone(), [(node(&[1]), rat(-7, 3))]).unwrap();
        assert_eq!(baire_norm_oracle(&single, &params, 12).unwrap().value, NormValue::exact(rat(7, 3)));
        let big = TreeVector::from_entries(
            Arc::new(star_tree(13, 0).unwrap()),
            (0..13).map(|i| (node(&[i]), int(1))),
        )
        .unwrap();
        assert_eq!(
            baire_norm_oracle(&big, &params, 12),
            Err(Error::OracleCapExceeded { size: 13, cap: 12 })
        );
    }

    #[test]
    fn chain_support_gives_plain_norm() {
        let t = Arc::new(chain_tree(4).unwrap());
        let x = TreeVector::from_entries(
            t,
            [(node(&[]), int(3)), (node(&[0, 0]), int(-4)), (node(&[0, 0, 0]), rat(1, 2))],
        )
        .unwrap();
        let coeffs = [int(3), int(-4), rat(1, 2)];
        for (p, base) in [
            (1, BaseNorm::l1()),
            (2, BaseNorm::lq(int(2)).unwrap()),
            (1, BaseNorm::Sup),
            (1, BaseNorm::lq(int(3)).unwrap()),
        ] {
            let params = BaireParams::with_p(p, base.clone()).unwrap();
            let v = baire_norm(&x, &params).unwrap();
            assert!(v.agrees_with(&crate::vector::list_norm(&coeffs, &base)), "{base}");
        }
    }

    #[test]
    fn errors() {
        let x = TreeVector::zero(Arc::new(crate::tree::FiniteTree::empty()));
        assert_eq!(
            baire_norm(&x, &BaireParams::zero(BaseNorm::l1())),
            Err(Error::EmptyTree)
        );
        assert!(Exponent::p(rat(1, 2)).is_err());
        let bad = BaireParams::new(Exponent::P(rat(1, 2)), BaseNorm::l1());
        assert!(baire_norm(&cherry(), &bad).is_err());
        assert_eq!(Exponent::parse("0").unwrap(), Exponent::Zero);
        assert_eq!(Exponent::parse("3/2").unwrap(), Exponent::P(rat(3, 2)));
    }

    #[test]
    fn block_profile_examples() {
        let t = Arc::new(star_tree(4, 0).unwrap());
        let blocks: Vec<_> = (0..4)
            .map(|i| TreeVector::unit(t.clone(), node(&[i])).unwrap())
            .collect();
        let ones = vec![int(1); 4];
        let prof =
            incomparable_block_profile(&blocks, &ones, &BaireParams::with_p(1, BaseNorm::l1()).unwrap())
                .unwrap();
        assert_eq!(prof.combined, NormValue::exact(int(4)));
        assert_eq!(prof.profile, NormValue::exact(int(4)));
        assert_eq!(prof.ratio, NormValue::exact(int(1)));
        let prof =
            incomparable_block_profile(&blocks, &ones, &BaireParams::zero(BaseNorm::l1())).unwrap();
        assert_eq!(prof.combined, NormValue::exact(int(1)));
        let one = incomparable_block_profile(&blocks[..1], &ones[..1], &BaireParams::zero(BaseNorm::l1()))
            .unwrap();
        assert_eq!(one.ratio, NormValue::exact(int(1)));
        let root = TreeVector::unit(t.clone(), TreeNode::root()).unwrap();
        assert_eq!(
            incomparable_block_profile(&[root, blocks[0].clone()], &ones[..2], &BaireParams::zero(BaseNorm::l1())),
            Err(Error::ComparableSupports(0, 1))
        );
    }
}
