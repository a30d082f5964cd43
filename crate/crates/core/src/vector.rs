//! Finitely supported rational vectors on trees and the base norms used on segments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::tree::{FiniteTree, Segment, TreeNode};

pub type Rational = num_rational::BigRational;

/// Relative width allowed for intervals produced by irrational roots.
pub const INTERVAL_REL_TOL_BITS: u32 = 40;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Lowest-terms `p/q`, or `p` for integers.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// A finitely supported vector indexed by the nodes of a tree. Zero entries are not stored.
#[derive(Clone, Debug)]
pub struct TreeVector {
    tree: Arc<FiniteTree>,
    entries: BTreeMap<TreeNode, Rational>,
}

impl PartialEq for TreeVector {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries && self.same_tree(other)
    }
}

impl TreeVector {
    pub fn zero(tree: Arc<FiniteTree>) -> Self {
        TreeVector {
            tree,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_entries<I>(tree: Arc<FiniteTree>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (TreeNode, Rational)>,
    {
        let mut v = TreeVector::zero(tree);
        for (node, value) in entries {
            v.set(node, value)?;
        }
        Ok(v)
    }

    /// Unit vector `e_s`.
    pub fn unit(tree: Arc<FiniteTree>, node: TreeNode) -> Result<Self> {
        TreeVector::from_entries(tree, [(node, Rational::one())])
    }

    pub fn set(&mut self, node: TreeNode, value: Rational) -> Result<()> {
        if !self.tree.contains(&node) {
            return Err(Error::NodeNotInTree(node.to_string()));
        }
        if value.is_zero() {
            self.entries.remove(&node);
        } else {
            self.entries.insert(node, value);
        }
        Ok(())
    }

    pub fn tree(&self) -> &Arc<FiniteTree> {
        &self.tree
    }

    pub fn get(&self, node: &TreeNode) -> Rational {
        self.entries.get(node).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn entries(&self) -> &BTreeMap<TreeNode, Rational> {
        &self.entries
    }

    /// Support nodes in enumeration order.
    pub fn support(&self) -> Vec<TreeNode> {
        self.entries.keys().cloned().collect()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn same_tree(&self, other: &TreeVector) -> bool {
        Arc::ptr_eq(&self.tree, &other.tree) || *self.tree == *other.tree
    }

    pub fn add(&self, other: &TreeVector) -> Result<TreeVector> {
        if !self.same_tree(other) {
            return Err(Error::MixedTrees);
        }
        let mut out = self.clone();
        for (node, value) in &other.entries {
            let sum = out.get(node) + value;
            out.set(node.clone(), sum)?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> TreeVector {
        if c.is_zero() {
            return TreeVector::zero(self.tree.clone());
        }
        TreeVector {
            tree: self.tree.clone(),
            entries: self
                .entries
                .iter()
                .map(|(n, v)| (n.clone(), v * c))
                .collect(),
        }
    }

    /// Zeroes every coordinate outside `set`.
    pub fn restrict<'a, I>(&self, set: I) -> Result<TreeVector>
    where
        I: IntoIterator<Item = &'a TreeNode>,
    {
        let set: BTreeSet<&TreeNode> = set.into_iter().collect();
        for n in &set {
            if !self.tree.contains(n) {
                return Err(Error::NodeNotInTree(n.to_string()));
            }
        }
        Ok(TreeVector {
            tree: self.tree.clone(),
            entries: self
                .entries
                .iter()
                .filter(|(n, _)| set.contains(n))
                .map(|(n, v)| (n.clone(), v.clone()))
                .collect(),
        })
    }

    /// Flips the sign of the coordinates in `nodes`.
    pub fn flip_signs<'a, I>(&self, nodes: I) -> TreeVector
    where
        I: IntoIterator<Item = &'a TreeNode>,
    {
        let mut out = self.clone();
        for n in nodes {
            if let Some(v) = out.entries.get_mut(n) {
                *v = -v.clone();
            }
        }
        out
    }

    pub fn l1(&self) -> Rational {
        self.entries.values().map(|v| v.abs()).sum()
    }

    pub fn sup(&self) -> Rational {
        self.entries
            .values()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// The norm applied to the coefficient list of a segment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseNorm {
    /// `ℓ_q` with rational `q ≥ 1`.
    Lq(Rational),
    /// `c_0` / sup norm.
    Sup,
}

impl BaseNorm {
    pub fn l1() -> Self {
        BaseNorm::Lq(Rational::one())
    }

    pub fn lq(q: Rational) -> Result<Self> {
        if q < Rational::one() {
            return Err(Error::InvalidExponent(format!("q = {q} < 1")));
        }
        Ok(BaseNorm::Lq(q))
    }

    pub fn is_l1(&self) -> bool {
        matches!(self, BaseNorm::Lq(q) if q.is_one())
    }

    /// Parses `l1`, `l2`, `l3/2`, `sup`, or `c0`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "sup" | "c0" | "linf" => Ok(BaseNorm::Sup),
            _ => match s.strip_prefix('l') {
                Some(q) => BaseNorm::lq(parse_rational(q)?),
                None => Err(Error::Parse(format!("unknown base norm {s:?}"))),
            },
        }
    }
}

impl fmt::Display for BaseNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseNorm::Lq(q) => write!(f, "l{q}"),
            BaseNorm::Sup => f.write_str("sup"),
        }
    }
}

/// A closed rational interval `[lo, hi]`; degenerate intervals are exact values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn exact(v: Rational) -> Self {
        Interval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn zero() -> Self {
        Interval::exact(Rational::zero())
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn max(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn scale(&self, c: &Rational) -> Interval {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// `x ↦ x^e` on a nonnegative interval, outward rounded to `bits` relative bits.
    pub fn pow(&self, e: &Rational, bits: u32) -> Interval {
        debug_assert!(!self.lo.is_negative());
        Interval {
            lo: pow_bound(&self.lo, e, bits, Rounding::Down),
            hi: pow_bound(&self.hi, e, bits, Rounding::Up),
        }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// `hi - lo ≤ 2^-bits · lo` (exact intervals always qualify).
    pub fn relative_width_within(&self, bits: u32) -> bool {
        if self.is_exact() {
            return true;
        }
        let scale = Rational::from_integer(BigInt::one() << bits);
        self.width() * scale <= self.lo
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Rounding {
    Down,
    Up,
}

fn pow_bound(x: &Rational, e: &Rational, bits: u32, dir: Rounding) -> Rational {
    if x.is_zero() {
        return Rational::zero();
    }
    let a = e.numer().to_u32().expect("exponent numerator fits u32");
    let b = e.denom().to_u32().expect("exponent denominator fits u32");
    let powered = Rational::new(x.numer().pow(a), x.denom().pow(a));
    if b == 1 {
        return powered;
    }
    let (lo, hi) = nth_root_bounds(&powered, b, bits);
    match dir {
        Rounding::Down => lo,
        Rounding::Up => hi,
    }
}

/// Rational bounds `lo ≤ r^(1/b) ≤ hi` with `hi - lo ≤ 2^-bits · lo`; exact for perfect powers.
pub fn nth_root_bounds(r: &Rational, b: u32, bits: u32) -> (Rational, Rational) {
    assert!(!r.is_negative(), "root of a negative number");
    if r.is_zero() {
        return (Rational::zero(), Rational::zero());
    }
    let n = r.numer().magnitude();
    let d = r.denom().magnitude();
    let (rn, rd) = (n.nth_root(b), d.nth_root(b));
    if &rn.pow(b) == n && &rd.pow(b) == d {
        let v = Rational::new(BigInt::from(rn), BigInt::from(rd));
        return (v.clone(), v);
    }
    let threshold = BigUint::one() << bits;
    let mut k = bits as usize;
    loop {
        // floor(n * 2^(b k) / d), then its floor b-th root
        let scaled = (n << (b as usize * k)) / d;
        let lo_int = scaled.nth_root(b);
        if lo_int >= threshold {
            let denom = BigInt::one() << k;
            let lo = Rational::new(BigInt::from(lo_int.clone()), denom.clone());
            let hi = Rational::new(BigInt::from(lo_int + 1u32), denom);
            return (lo, hi);
        }
        k += bits as usize;
    }
}

/// Value of a norm computation: exact, or a certified enclosing interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormValue {
    pub exact: Option<Rational>,
    pub lower: Rational,
    pub upper: Rational,
}

impl NormValue {
    pub fn exact(v: Rational) -> Self {
        NormValue {
            exact: Some(v.clone()),
            lower: v.clone(),
            upper: v,
        }
    }

    pub fn from_interval(iv: Interval) -> Self {
        if iv.is_exact() {
            NormValue::exact(iv.lo)
        } else {
            NormValue {
                exact: None,
                lower: iv.lo,
                upper: iv.hi,
            }
        }
    }

    pub fn interval(&self) -> Interval {
        Interval {
            lo: self.lower.clone(),
            hi: self.upper.clone(),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn contains(&self, v: &Rational) -> bool {
        self.interval().contains(v)
    }

    /// Two values agree if they overlap (equal when both exact).
    pub fn agrees_with(&self, other: &NormValue) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a == b,
            _ => self.interval().overlaps(&other.interval()),
        }
    }

    /// Certified `self ≤ other` when decidable from the enclosures.
    pub fn certainly_le(&self, other: &NormValue) -> bool {
        self.upper <= other.lower
    }

    /// `self ≤ other` is not refuted by the enclosures.
    pub fn possibly_le(&self, other: &NormValue) -> bool {
        self.lower <= other.upper
    }

    pub fn scale(&self, c: &Rational) -> NormValue {
        NormValue::from_interval(self.interval().scale(&c.abs()))
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "[{}, {}]", self.lower, self.upper),
        }
    }
}

/// Additive summary of a coefficient list under a base norm: the power sum for `ℓ_q`,
/// the maximum for `sup`. The norm is a monotone function of the summary.
pub(crate) fn coefficient_summary<'a, I>(coeffs: I, base: &BaseNorm, bits: u32) -> Interval
where
    I: IntoIterator<Item = &'a Rational>,
{
    let mut acc = Interval::zero();
    for c in coeffs {
        let a = c.abs();
        acc = match base {
            BaseNorm::Sup => acc.max(&Interval::exact(a)),
            BaseNorm::Lq(q) => acc.add(&Interval::exact(a).pow(q, bits)),
        };
    }
    acc
}

/// Norm value from a summary produced by [`coefficient_summary`].
pub(crate) fn summary_to_norm(summary: &Interval, base: &BaseNorm, bits: u32) -> Interval {
    match base {
        BaseNorm::Sup => summary.clone(),
        BaseNorm::Lq(q) if q.is_one() => summary.clone(),
        BaseNorm::Lq(q) => summary.pow(&q.recip(), bits),
    }
}

/// Runs `f` with increasing precision until the result meets the interval tolerance.
pub(crate) fn with_precision<F>(mut f: F) -> Interval
where
    F: FnMut(u32) -> Interval,
{
    let mut bits = INTERVAL_REL_TOL_BITS + 24;
    loop {
        let iv = f(bits);
        if iv.relative_width_within(INTERVAL_REL_TOL_BITS) || bits > 4096 {
            return iv;
        }
        bits *= 2;
    }
}

/// Plain base norm of a coefficient list.
pub fn list_norm(coeffs: &[Rational], base: &BaseNorm) -> NormValue {
    NormValue::from_interval(with_precision(|bits| {
        summary_to_norm(&coefficient_summary(coeffs, base, bits), base, bits)
    }))
}

/// `‖Σ_{s∈I} x(s) e_{|s|}‖_E` for a segment `I` of `x`'s tree.
pub fn base_norm_of_segment(x: &TreeVector, segment: &Segment, base: &BaseNorm) -> Result<NormValue> {
    segment.check()?;
    for n in segment.nodes() {
        if !x.tree().contains(n) {
            return Err(Error::NotASegment(format!("{n} is not in the vector's tree")));
        }
    }
    let coeffs: Vec<Rational> = segment.nodes().iter().map(|n| x.get(n)).collect();
    Ok(list_norm(&coeffs, base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{chain_tree, make_tree};

    fn node(p: &[u64]) -> TreeNode {
        TreeNode::from(p)
    }

    fn two_chain(a: i64, b: i64) -> (TreeVector, Segment) {
        let t = Arc::new(chain_tree(2).unwrap());
        let x = TreeVector::from_entries(t.clone(), [(node(&[]), int(a)), (node(&[0]), int(b))])
            .unwrap();
        let seg = Segment::new(&t, [node(&[]), node(&[0])]).unwrap();
        (x, seg)
    }

    #[test]
    fn segment_norm_examples() {
        let (x, seg) = two_chain(1, 2);
        assert_eq!(base_norm_of_segment(&x, &seg, &BaseNorm::l1()).unwrap(), NormValue::exact(int(3)));
        assert_eq!(base_norm_of_segment(&x, &seg, &BaseNorm::Sup).unwrap(), NormValue::exact(int(2)));
        let (x, seg) = two_chain(3, 4);
        let v = base_norm_of_segment(&x, &seg, &BaseNorm::lq(int(2)).unwrap()).unwrap();
        assert!(v.contains(&int(5)));
        assert!(v.interval().relative_width_within(INTERVAL_REL_TOL_BITS));
    }

    #[test]
    fn irrational_roots_are_enclosed() {
        let (x, seg) = two_chain(1, 1);
        let v = base_norm_of_segment(&x, &seg, &BaseNorm::lq(int(2)).unwrap()).unwrap();
        assert!(!v.is_exact());
        assert!(&v.lower * &v.lower <= int(2));
        assert!(&v.upper * &v.upper >= int(2));
        assert!(v.interval().relative_width_within(INTERVAL_REL_TOL_BITS));
        // non-integer q: (1 + 1)^(2/3) = 2^(2/3)
        let v = base_norm_of_segment(&x, &seg, &BaseNorm::lq(rat(3, 2)).unwrap()).unwrap();
        let cube = |r: &Rational| r * r * r;
        assert!(cube(&v.lower) <= int(4) && cube(&v.upper) >= int(4));
    }

    #[test]
    fn non_segment_rejected() {
        let t = Arc::new(make_tree([vec![0u64], vec![1]]));
        let x = TreeVector::unit(t.clone(), node(&[0])).unwrap();
        let bad = Segment::new(&t, [node(&[0]), node(&[1])]);
        assert!(bad.is_err());
        let other = chain_tree(3).unwrap();
        let seg = Segment::new(&other, [node(&[0]), node(&[0, 0])]).unwrap();
        assert!(base_norm_of_segment(&x, &seg, &BaseNorm::l1()).is_err());
    }

    #[test]
    fn vector_ops() {
        let t = Arc::new(make_tree([vec![0u64], vec![1], vec![1, 0]]));
        let x = TreeVector::from_entries(
            t.clone(),
            [(node(&[0]), int(2)), (node(&[1, 0]), rat(-1, 3))],
        )
        .unwrap();
        assert!(x.restrict(&[]).unwrap().is_zero());
        assert_eq!(x.restrict(&x.support()).unwrap(), x);
        assert!(x.scale(&Rational::zero()).is_zero());
        assert_eq!(x.add(&x.scale(&int(-1))).unwrap().support_len(), 0);
        let other = Arc::new(chain_tree(2).unwrap());
        assert_eq!(x.add(&TreeVector::zero(other)), Err(Error::MixedTrees));
        assert!(x.restrict(&[node(&[7])]).is_err());
        assert!(TreeVector::unit(t, node(&[5])).is_err());
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-4").unwrap(), int(-4));
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&rat(6, 4)), "3/2");
        assert_eq!(BaseNorm::parse("l3/2").unwrap(), BaseNorm::Lq(rat(3, 2)));
        assert_eq!(BaseNorm::parse("c0").unwrap(), BaseNorm::Sup);
        assert!(BaseNorm::parse("l1/2").is_err());
    }

    #[test]
    fn root_bounds() {
        let (lo, hi) = nth_root_bounds(&rat(27, 8), 3, 40);
        assert_eq!((lo, hi), (rat(3, 2), rat(3, 2)));
        let (lo, hi) = nth_root_bounds(&rat(1, 1_000_000_007), 2, 40);
        assert!(&lo * &lo <= rat(1, 1_000_000_007) && &hi * &hi >= rat(1, 1_000_000_007));
        assert!(Interval { lo, hi }.relative_width_within(40));
    }
}
