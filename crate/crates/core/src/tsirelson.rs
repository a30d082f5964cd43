//! Tree-parametrized Tsirelson norm.
//!
//! `‖x‖_θ = max{‖x‖_∞, ½ max Σ_i ‖E_i x‖_θ}` where the inner maximum runs over
//! families `k ≤ E_1 < … < E_k` of finite sets. The incomparable variant also
//! requires the sets to be pairwise completely incomparable; the standard
//! variant does not.
//!
//! Values are computed exactly by recursion over subsets of the support. All
//! intermediate values are integers after scaling by `D · 2^(n-1)`, where `D`
//! is the common denominator of the coefficients and `n = |supp(x)|`, so the
//! inner loops run on `i128` (falling back to big integers when needed).

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{fits_i128, ScaledInt};
use crate::sequence::FiniteBlockSequence;
use crate::tree::{completely_incomparable, FiniteTree, TreeNode};
use crate::vector::{Rational, TreeVector};

/// Default cap on `|supp(x)|` for the subset recursion.
pub const SUPPORT_CAP: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TsirelsonVariant {
    /// Families must be pairwise completely incomparable.
    Incomparable,
    /// No incomparability restriction.
    Standard,
}

impl TsirelsonVariant {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "incomparable" => Ok(TsirelsonVariant::Incomparable),
            "standard" => Ok(TsirelsonVariant::Standard),
            other => Err(Error::Parse(format!("unknown Tsirelson variant {other:?}"))),
        }
    }
}

impl fmt::Display for TsirelsonVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TsirelsonVariant::Incomparable => "incomparable",
            TsirelsonVariant::Standard => "standard",
        })
    }
}

/// How a value is realized: by a single coordinate, or by an admissible family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Derivation {
    Sup {
        #[serde(serialize_with = "ser_node")]
        node: TreeNode,
        #[serde(serialize_with = "ser_rat")]
        value: Rational,
    },
    Family {
        #[serde(serialize_with = "ser_rat")]
        value: Rational,
        sets: Vec<FamilyMember>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyMember {
    #[serde(serialize_with = "ser_nodes")]
    pub set: Vec<TreeNode>,
    pub derivation: Derivation,
}

impl Derivation {
    pub fn value(&self) -> &Rational {
        match self {
            Derivation::Sup { value, .. } | Derivation::Family { value, .. } => value,
        }
    }

    /// Nesting depth of families (0 for a single coordinate).
    pub fn depth(&self) -> usize {
        match self {
            Derivation::Sup { .. } => 0,
            Derivation::Family { sets, .. } => {
                1 + sets.iter().map(|m| m.derivation.depth()).max().unwrap_or(0)
            }
        }
    }
}

pub(crate) fn ser_rat<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub(crate) fn ser_node<S: serde::Serializer>(n: &TreeNode, s: S) -> std::result::Result<S::Ok, S::Error> {
    n.path().serialize(s)
}

pub(crate) fn ser_nodes<S: serde::Serializer>(
    n: &[TreeNode],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    n.iter().map(|n| n.path().to_vec()).collect::<Vec<_>>().serialize(s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TsirelsonResult {
    pub value: Rational,
    pub witness: Derivation,
}

/// `‖x‖_θ` (incomparable) or `‖x‖_{T,θ}` (standard).
pub fn tsirelson_norm(x: &TreeVector, variant: TsirelsonVariant) -> Result<Rational> {
    Ok(Evaluation::full(x, variant, SUPPORT_CAP)?.value())
}

pub fn tsirelson_norm_with_witness(x: &TreeVector, variant: TsirelsonVariant) -> Result<TsirelsonResult> {
    Evaluation::full(x, variant, SUPPORT_CAP)?.result()
}

/// The `m`-th iterate `‖x‖_{θ,m}`; `‖x‖_{θ,0} = ‖x‖_∞`.
pub fn tsirelson_iterate(x: &TreeVector, variant: TsirelsonVariant, m: usize) -> Result<Rational> {
    Ok(Evaluation::iterate(x, variant, m, SUPPORT_CAP)?.value())
}

pub fn tsirelson_iterate_with_witness(
    x: &TreeVector,
    variant: TsirelsonVariant,
    m: usize,
) -> Result<TsirelsonResult> {
    Evaluation::iterate(x, variant, m, SUPPORT_CAP)?.result()
}

/// Outcome of re-evaluating the implicit equation at the full support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointCheck {
    pub value: Rational,
    pub recomputed: Rational,
    pub families_checked: u64,
}

impl FixedPointCheck {
    pub fn holds(&self) -> bool {
        self.value == self.recomputed
    }
}

/// Recomputes `max{‖x‖_∞, ½ max Σ f(E_i)}` at `supp(x)` from the filled table of
/// `f` on proper subsets, enumerating admissible families explicitly from tree
/// comparisons and enumeration indices.
pub fn check_fixed_point(x: &TreeVector, variant: TsirelsonVariant) -> Result<FixedPointCheck> {
    let eval = Evaluation::full(x, variant, SUPPORT_CAP)?;
    let layout = &eval.layout;
    let n = layout.nodes.len();
    if n == 0 {
        return Ok(FixedPointCheck {
            value: Rational::zero(),
            recomputed: Rational::zero(),
            families_checked: 0,
        });
    }
    let table: Vec<Rational> = (0..1usize << n).map(|m| eval.value_at(m)).collect();
    let indices: Vec<u128> = layout
        .nodes
        .iter()
        .map(|s| x.tree().index_of(s))
        .collect::<Result<_>>()?;
    let mut walker = FamilyWalker {
        nodes: &layout.nodes,
        indices: &indices,
        table: &table,
        variant,
        sets: Vec::new(),
        best: Rational::zero(),
        count: 0,
    };
    walker.walk(0);
    let sup = x.sup();
    let recomputed = sup.max(walker.best / Rational::from_integer(2.into()));
    Ok(FixedPointCheck {
        value: table[(1 << n) - 1].clone(),
        recomputed,
        families_checked: walker.count,
    })
}

struct FamilyWalker<'a> {
    nodes: &'a [TreeNode],
    indices: &'a [u128],
    table: &'a [Rational],
    variant: TsirelsonVariant,
    sets: Vec<usize>,
    best: Rational,
    count: u64,
}

impl FamilyWalker<'_> {
    fn walk(&mut self, pos: usize) {
        if pos == self.nodes.len() {
            self.score();
            return;
        }
        self.walk(pos + 1);
        let (nodes, variant) = (self.nodes, self.variant);
        let fits = |sets: &[usize]| match variant {
            TsirelsonVariant::Standard => true,
            TsirelsonVariant::Incomparable => sets.iter().all(|&mask| {
                (0..nodes.len())
                    .filter(|j| mask >> j & 1 == 1)
                    .all(|j| !nodes[j].comparable(&nodes[pos]))
            }),
        };
        let bit = 1usize << pos;
        if let Some((&current, closed)) = self.sets.split_last() {
            if fits(closed) {
                let last = self.sets.len() - 1;
                self.sets[last] = current | bit;
                self.walk(pos + 1);
                self.sets[last] = current;
            }
        }
        if fits(&self.sets) {
            self.sets.push(bit);
            self.walk(pos + 1);
            self.sets.pop();
        }
    }

    fn score(&mut self) {
        let k = self.sets.len();
        if k < 2 {
            return;
        }
        let first = self.sets[0].trailing_zeros() as usize;
        if (k as u128) > self.indices[first] {
            return;
        }
        self.count += 1;
        let total: Rational = self.sets.iter().map(|&m| &self.table[m]).sum();
        if total > self.best {
            self.best = total;
        }
    }
}

/// Support nodes in enumeration order with their comparability masks.
struct Layout {
    nodes: Vec<TreeNode>,
    index: Vec<u128>,
    comparable: Vec<u32>,
    scaled: Vec<BigInt>,
    scale: BigInt,
}

impl Layout {
    fn new(x: &TreeVector, variant: TsirelsonVariant, cap: usize) -> Result<Layout> {
        let n = x.support_len();
        if n > cap {
            return Err(Error::SupportCapExceeded { size: n, cap });
        }
        let nodes = x.support();
        let enumeration = x.tree().enumeration();
        let index = nodes
            .iter()
            .map(|s| enumeration.index(s))
            .collect::<Result<Vec<_>>>()?;
        let comparable = (0..n)
            .map(|i| match variant {
                TsirelsonVariant::Standard => 0,
                TsirelsonVariant::Incomparable => (0..n)
                    .filter(|&j| j != i && nodes[i].comparable(&nodes[j]))
                    .fold(0u32, |m, j| m | 1 << j),
            })
            .collect();
        let denom = x
            .entries()
            .values()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let scale = denom << n.saturating_sub(1);
        let scaled = nodes
            .iter()
            .map(|s| {
                let v = (x.get(s).abs() * Rational::from_integer(scale.clone())).to_integer();
                v
            })
            .collect();
        Ok(Layout {
            nodes,
            index,
            comparable,
            scaled,
            scale,
        })
    }

    fn len(&self) -> usize {
        self.nodes.len()
    }
}

/// `f` over all subsets of the support, together with the family tables `h`
/// derived from the same `f`.
#[derive(Clone, PartialEq, Eq)]
struct Tables<T> {
    f: Vec<T>,
    h: Vec<T>,
}

/// Subset recursion engine over one layout.
struct Engine<'a, T> {
    layout: &'a Layout,
    values: Vec<T>,
    max_abs: Vec<T>,
    cmp_union: Vec<u32>,
    h_offset: Vec<usize>,
    full: u32,
    two: T,
}

impl<'a, T: ScaledInt> Engine<'a, T> {
    fn new(layout: &'a Layout, values: Vec<T>) -> Self {
        let n = layout.len();
        let size = 1usize << n;
        let mut max_abs = vec![T::zero(); size];
        let mut cmp_union = vec![0u32; size];
        let mut h_offset = vec![0usize; size + 1];
        for mask in 1..size {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            max_abs[mask] = max_abs[rest].clone().max(values[low].clone());
            cmp_union[mask] = cmp_union[rest] | layout.comparable[low];
        }
        for mask in 0..size {
            h_offset[mask + 1] = h_offset[mask] + (mask as u32).count_ones() as usize;
        }
        Engine {
            layout,
            values,
            max_abs,
            cmp_union,
            h_offset,
            full: (size - 1) as u32,
            two: T::from_big(&BigInt::from(2)),
        }
    }

    fn size(&self) -> usize {
        1usize << self.layout.len()
    }

    /// Elements of `within` after every element of `set` and incomparable to it.
    fn successors(&self, within: u32, set: u32) -> u32 {
        let hb = 31 - set.leading_zeros();
        let above = if hb >= 31 { 0 } else { self.full & !((2u32 << hb) - 1) };
        within & above & !self.cmp_union[set as usize]
    }

    /// Best `Σ f(E_i)` over at most `c ≥ 1` successive admissible sets inside `r`.
    fn h_lookup(&self, h: &[T], r: u32, c: usize) -> T {
        if r == 0 || c == 0 {
            return T::zero();
        }
        let pop = r.count_ones() as usize;
        h[self.h_offset[r as usize] + c.min(pop) - 1].clone()
    }

    fn fill_h_entries(&self, f: &[T], h: &mut [T], r: u32) {
        let pop = r.count_ones() as usize;
        let off = self.h_offset[r as usize];
        let mut best = vec![T::zero(); pop];
        let mut e = r;
        while e != 0 {
            let fe = &f[e as usize];
            let rest = self.successors(r, e);
            for c in 1..=pop {
                let cand = if c > 1 && rest != 0 {
                    fe.plus(&self.h_lookup(h, rest, c - 1))
                } else {
                    fe.clone()
                };
                if cand > best[c - 1] {
                    best[c - 1] = cand;
                }
            }
            e = (e - 1) & r;
        }
        h[off..off + pop].clone_from_slice(&best);
    }

    /// Best admissible family sum with `k ≥ 2` for the set `s`: first set `E_1`,
    /// rest chosen among successors, `k ≤ index(min E_1)`.
    fn family_best(&self, f: &[T], h: &[T], s: u32) -> Option<T> {
        let mut best: Option<T> = None;
        let mut e1 = (s - 1) & s;
        while e1 != 0 {
            let k = self.layout.index[e1.trailing_zeros() as usize];
            if k >= 2 {
                let rest = self.successors(s, e1);
                if rest != 0 {
                    let c = usize::try_from(k - 1).unwrap_or(usize::MAX);
                    let cand = f[e1 as usize].plus(&self.h_lookup(h, rest, c));
                    if best.as_ref().map_or(true, |b| &cand > b) {
                        best = Some(cand);
                    }
                }
            }
            e1 = (e1 - 1) & s;
        }
        best
    }

    fn combine(&self, s: u32, family: Option<T>) -> T {
        let sup = self.max_abs[s as usize].clone();
        match family {
            Some(v) => sup.max(v.div_exact(&self.two)),
            None => sup,
        }
    }

    /// Least fixed point, filling `f` and `h` in increasing mask order.
    fn solve(&self) -> Tables<T> {
        let size = self.size();
        let mut f = vec![T::zero(); size];
        let mut h = vec![T::zero(); self.h_offset[size]];
        for mask in 1..size as u32 {
            let fam = self.family_best(&f, &h, mask);
            f[mask as usize] = self.combine(mask, fam);
            self.fill_h_entries(&f, &mut h, mask);
        }
        Tables { f, h }
    }

    fn h_for(&self, f: &[T]) -> Vec<T> {
        let size = self.size();
        let mut h = vec![T::zero(); self.h_offset[size]];
        for mask in 1..size as u32 {
            self.fill_h_entries(f, &mut h, mask);
        }
        h
    }

    /// Layers `0..=m` of the iteration, stopping early once a layer repeats.
    fn iterate(&self, m: usize) -> Vec<Tables<T>> {
        let size = self.size();
        let f0 = self.max_abs.clone();
        let h0 = self.h_for(&f0);
        let mut layers = vec![Tables { f: f0, h: h0 }];
        for _ in 0..m {
            let prev = layers.last().unwrap();
            let mut f = vec![T::zero(); size];
            for mask in 1..size as u32 {
                let fam = self.family_best(&prev.f, &prev.h, mask);
                f[mask as usize] = self.combine(mask, fam);
            }
            if f == prev.f {
                break;
            }
            let h = self.h_for(&f);
            layers.push(Tables { f, h });
        }
        layers
    }

    fn argmax_value(&self, s: u32) -> usize {
        let mut arg = s.trailing_zeros() as usize;
        for i in 0..self.layout.len() {
            if s >> i & 1 == 1 && self.values[i] > self.values[arg] {
                arg = i;
            }
        }
        arg
    }

    /// Rebuilds a derivation of `value_layer.f[s]` whose families are valued in
    /// `family_layer` (the same layer for the fixed point).
    fn derive(&self, layers: &[Tables<T>], layer: usize, fixed: bool, s: u32) -> Derivation {
        let to_rat = |v: &T| {
            Rational::new(v.to_big(), self.layout.scale.clone())
        };
        let target = &layers[layer].f[s as usize];
        if target == &self.max_abs[s as usize] || (!fixed && layer == 0) {
            let i = self.argmax_value(s);
            return Derivation::Sup {
                node: self.layout.nodes[i].clone(),
                value: to_rat(&self.values[i]),
            };
        }
        let fam_layer = if fixed { layer } else { layer - 1 };
        let Tables { f, h } = &layers[fam_layer];
        let goal = target.plus(target);
        let mut chosen = Vec::new();
        let mut e1 = (s - 1) & s;
        let mut tail = None;
        while e1 != 0 {
            let k = self.layout.index[e1.trailing_zeros() as usize];
            if k >= 2 {
                let rest = self.successors(s, e1);
                if rest != 0 {
                    let c = usize::try_from(k - 1).unwrap_or(usize::MAX);
                    if f[e1 as usize].plus(&self.h_lookup(h, rest, c)) == goal {
                        chosen.push(e1);
                        tail = Some((rest, c));
                        break;
                    }
                }
            }
            e1 = (e1 - 1) & s;
        }
        let (mut r, mut c) = tail.expect("family value is realized");
        let mut remaining = self.h_lookup(h, r, c);
        while r != 0 && c > 0 {
            let c_eff = c.min(r.count_ones() as usize);
            let mut e = r;
            let mut next = None;
            while e != 0 {
                let rest = self.successors(r, e);
                let more = if c_eff > 1 && rest != 0 {
                    self.h_lookup(h, rest, c_eff - 1)
                } else {
                    T::zero()
                };
                if f[e as usize].plus(&more) == remaining {
                    next = Some((e, rest, more));
                    break;
                }
                e = (e - 1) & r;
            }
            let (e, rest, more) = next.expect("family tail is realized");
            chosen.push(e);
            if more == T::zero() {
                break;
            }
            r = rest;
            c = c_eff - 1;
            remaining = more;
        }
        let sets = chosen
            .iter()
            .map(|&e| FamilyMember {
                set: (0..self.layout.len())
                    .filter(|i| e >> i & 1 == 1)
                    .map(|i| self.layout.nodes[i].clone())
                    .collect(),
                derivation: self.derive(layers, fam_layer, fixed, e),
            })
            .collect();
        Derivation::Family {
            value: to_rat(target),
            sets,
        }
    }
}

enum Tabled {
    Small(Vec<Tables<i128>>),
    Big(Vec<Tables<BigInt>>),
}

/// A completed evaluation: the layout plus every computed layer.
struct Evaluation {
    layout: Layout,
    tables: Tabled,
    fixed: bool,
}

impl Evaluation {
    fn full(x: &TreeVector, variant: TsirelsonVariant, cap: usize) -> Result<Self> {
        Self::build(x, variant, cap, None)
    }

    fn iterate(x: &TreeVector, variant: TsirelsonVariant, m: usize, cap: usize) -> Result<Self> {
        Self::build(x, variant, cap, Some(m))
    }

    fn build(x: &TreeVector, variant: TsirelsonVariant, cap: usize, m: Option<usize>) -> Result<Self> {
        let layout = Layout::new(x, variant, cap)?;
        let total: BigInt = layout.scaled.iter().sum();
        let tables = if fits_i128(&total) {
            let values = layout.scaled.iter().map(|v| v.to_i128().unwrap()).collect();
            let engine = Engine::<i128>::new(&layout, values);
            Tabled::Small(match m {
                None => vec![engine.solve()],
                Some(m) => engine.iterate(m),
            })
        } else {
            let engine = Engine::<BigInt>::new(&layout, layout.scaled.clone());
            Tabled::Big(match m {
                None => vec![engine.solve()],
                Some(m) => engine.iterate(m),
            })
        };
        Ok(Evaluation {
            layout,
            tables,
            fixed: m.is_none(),
        })
    }

    fn value_at(&self, mask: usize) -> Rational {
        let v = match &self.tables {
            Tabled::Small(l) => BigInt::from(l.last().unwrap().f[mask]),
            Tabled::Big(l) => l.last().unwrap().f[mask].clone(),
        };
        Rational::new(v, self.layout.scale.clone())
    }

    fn value(&self) -> Rational {
        if self.layout.len() == 0 {
            return Rational::zero();
        }
        self.value_at((1 << self.layout.len()) - 1)
    }

    fn result(&self) -> Result<TsirelsonResult> {
        let n = self.layout.len();
        if n == 0 {
            return Ok(TsirelsonResult {
                value: Rational::zero(),
                witness: Derivation::Sup {
                    node: TreeNode::root(),
                    value: Rational::zero(),
                },
            });
        }
        let full = ((1usize << n) - 1) as u32;
        let witness = match &self.tables {
            Tabled::Small(l) => {
                let values = self.layout.scaled.iter().map(|v| v.to_i128().unwrap()).collect();
                Engine::<i128>::new(&self.layout, values).derive(l, l.len() - 1, self.fixed, full)
            }
            Tabled::Big(l) => Engine::<BigInt>::new(&self.layout, self.layout.scaled.clone())
                .derive(l, l.len() - 1, self.fixed, full),
        };
        Ok(TsirelsonResult {
            value: self.value(),
            witness,
        })
    }
}

/// Checks that `derivation` is admissible for `variant` and evaluates it
/// from scratch against `x`.
pub fn replay_derivation(
    x: &TreeVector,
    variant: TsirelsonVariant,
    derivation: &Derivation,
) -> Result<Rational> {
    match derivation {
        Derivation::Sup { node, .. } => Ok(x.get(node).abs()),
        Derivation::Family { sets, .. } => {
            let k = sets.len();
            if k < 2 {
                return Err(Error::Precondition("family needs at least two sets".into()));
            }
            let first_min = sets[0].set.iter().min().ok_or_else(|| {
                Error::Precondition("empty set in family".into())
            })?;
            if (k as u128) > x.tree().index_of(first_min)? {
                return Err(Error::Precondition(format!(
                    "k = {k} exceeds index of min E_1 = {first_min}"
                )));
            }
            for w in sets.windows(2) {
                let max_a = w[0].set.iter().max().unwrap();
                let min_b = w[1]
                    .set
                    .iter()
                    .min()
                    .ok_or_else(|| Error::Precondition("empty set in family".into()))?;
                if max_a >= min_b {
                    return Err(Error::Precondition("sets are not successive".into()));
                }
            }
            if variant == TsirelsonVariant::Incomparable {
                for (i, a) in sets.iter().enumerate() {
                    for (j, b) in sets.iter().enumerate().skip(i + 1) {
                        if !completely_incomparable(&a.set, &b.set) {
                            return Err(Error::ComparableSupports(i, j));
                        }
                    }
                }
            }
            let mut total = Rational::zero();
            for m in sets {
                let restricted = x.restrict(&m.set)?;
                let inner = replay_derivation(&restricted, variant, &m.derivation)?;
                total += inner;
            }
            Ok(total / Rational::from_integer(2.into()))
        }
    }
}

/// Both sides of the block-domination lemma for one coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    #[serde(serialize_with = "ser_rat")]
    pub index_norm: Rational,
    #[serde(serialize_with = "ser_rat")]
    pub block_norm: Rational,
    pub holds: bool,
}

/// The quantities of the 18-equivalence chain for one coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SandwichReport {
    /// `‖Σ a_n e_{s_{p_n+1}}‖_{T,θ}`.
    #[serde(serialize_with = "ser_rat")]
    pub index_standard: Rational,
    /// `‖Σ a_n e_{s_{p_n+1}}‖_θ`.
    #[serde(serialize_with = "ser_rat")]
    pub index_incomparable: Rational,
    /// `‖Σ a_n y_n‖_θ`.
    #[serde(serialize_with = "ser_rat")]
    pub block_incomparable: Rational,
    /// `‖Σ a_n y_n‖_{T,θ}`.
    #[serde(serialize_with = "ser_rat")]
    pub block_standard: Rational,
    #[serde(serialize_with = "ser_rat")]
    pub bound: Rational,
    pub left_holds: bool,
    pub domination_holds: bool,
    pub index_equality_holds: bool,
    pub right_holds: bool,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.left_holds && self.domination_holds && self.index_equality_holds && self.right_holds
    }
}

/// Validated inputs shared by the lemma and sandwich checks.
struct BlockCase {
    index_vector: TreeVector,
    block_vector: TreeVector,
}

fn prepare_case(tree: &Arc<FiniteTree>, seq: &FiniteBlockSequence, coeffs: &[Rational]) -> Result<BlockCase> {
    if seq.blocks().len() != coeffs.len() {
        return Err(Error::LengthMismatch(seq.blocks().len(), coeffs.len()));
    }
    seq.validate()?;
    for b in seq.blocks() {
        if !b.tree().as_ref().eq(tree.as_ref()) {
            return Err(Error::MixedTrees);
        }
    }
    if !seq.incomparable_supports() {
        return Err(Error::Precondition(
            "block supports are not pairwise completely incomparable".into(),
        ));
    }
    for (i, b) in seq.blocks().iter().enumerate() {
        let norm = tsirelson_norm(b, TsirelsonVariant::Incomparable)?;
        if !norm.is_one() {
            return Err(Error::Precondition(format!(
                "block {i} is not normalized (norm {norm})"
            )));
        }
    }
    let enumeration = tree.enumeration();
    let mut index_vector = TreeVector::zero(tree.clone());
    let mut block_vector = TreeVector::zero(tree.clone());
    for ((b, w), a) in seq.blocks().iter().zip(seq.windows()).zip(coeffs) {
        let first = enumeration.node_at(w.start);
        if !tree.contains(&first) {
            return Err(Error::Precondition(format!(
                "index node s_{} = {first} is not in the tree",
                w.start
            )));
        }
        index_vector.set(first, a.clone())?;
        block_vector = block_vector.add(&b.scale(a))?;
    }
    Ok(BlockCase {
        index_vector,
        block_vector,
    })
}

/// `‖Σ a_n e_{s_{p_n+1}}‖_θ ≤ ‖Σ a_n y_n‖_θ` for a normalized block sequence with
/// completely incomparable supports.
pub fn verify_block_domination(
    tree: &Arc<FiniteTree>,
    seq: &FiniteBlockSequence,
    coeffs: &[Rational],
) -> Result<LemmaReport> {
    let case = prepare_case(tree, seq, coeffs)?;
    let index_norm = tsirelson_norm(&case.index_vector, TsirelsonVariant::Incomparable)?;
    let block_norm = tsirelson_norm(&case.block_vector, TsirelsonVariant::Incomparable)?;
    Ok(LemmaReport {
        holds: index_norm <= block_norm,
        index_norm,
        block_norm,
    })
}

/// `‖Σ a_n e_{s_{p_n+1}}‖_{T,θ} ≤ ‖Σ a_n y_n‖_θ ≤ 18 ‖Σ a_n e_{s_{p_n+1}}‖_{T,θ}`, plus
/// `‖y‖_θ ≤ ‖y‖_{T,θ}` and the equality of both norms on the index vector.
pub fn verify_sandwich18(
    tree: &Arc<FiniteTree>,
    seq: &FiniteBlockSequence,
    coeffs: &[Rational],
) -> Result<SandwichReport> {
    let case = prepare_case(tree, seq, coeffs)?;
    let index_standard = tsirelson_norm(&case.index_vector, TsirelsonVariant::Standard)?;
    let index_incomparable = tsirelson_norm(&case.index_vector, TsirelsonVariant::Incomparable)?;
    let block_incomparable = tsirelson_norm(&case.block_vector, TsirelsonVariant::Incomparable)?;
    let block_standard = tsirelson_norm(&case.block_vector, TsirelsonVariant::Standard)?;
    let bound = &index_standard * Rational::from_integer(18.into());
    Ok(SandwichReport {
        left_holds: index_standard <= block_incomparable,
        domination_holds: block_incomparable <= block_standard,
        index_equality_holds: index_incomparable == index_standard,
        right_holds: block_incomparable <= bound,
        index_standard,
        index_incomparable,
        block_incomparable,
        block_standard,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{chain_tree, make_tree, random_tree, star_tree};
    use crate::vector::{int, rat};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::{BTreeSet, HashMap};

    fn node(p: &[u64]) -> TreeNode {
        TreeNode::from(p)
    }

    /// Direct recursion on node sets with brute-force family enumeration.
    struct Naive<'a> {
        x: &'a TreeVector,
        variant: TsirelsonVariant,
        memo: HashMap<BTreeSet<TreeNode>, Rational>,
    }

    impl Naive<'_> {
        fn norm(&mut self, s: &BTreeSet<TreeNode>) -> Rational {
            if let Some(v) = self.memo.get(s) {
                return v.clone();
            }
            let elems: Vec<TreeNode> = s.iter().cloned().collect();
            let sup = elems.iter().map(|n| self.x.get(n).abs()).max().unwrap_or_default();
            let mut best = Rational::zero();
            // assign each element to: skipped (0) or set number 1..=n, then check.
            let n = elems.len();
            let mut labels = vec![0usize; n];
            loop {
                if let Some(v) = self.family_value(&elems, &labels) {
                    best = best.max(v);
                }
                let mut i = 0;
                while i < n {
                    labels[i] += 1;
                    if labels[i] <= n {
                        break;
                    }
                    labels[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
            }
            let v = sup.max(best / int(2));
            self.memo.insert(s.clone(), v.clone());
            v
        }

        fn family_value(&mut self, elems: &[TreeNode], labels: &[usize]) -> Option<Rational> {
            let k = *labels.iter().max()?;
            if k < 2 {
                return None;
            }
            let sets: Vec<BTreeSet<TreeNode>> = (1..=k)
                .map(|l| {
                    elems
                        .iter()
                        .zip(labels)
                        .filter(|(_, &x)| x == l)
                        .map(|(n, _)| n.clone())
                        .collect()
                })
                .collect();
            if sets.iter().any(|s| s.is_empty()) {
                return None;
            }
            for w in sets.windows(2) {
                if w[0].iter().max() >= w[1].iter().min() {
                    return None;
                }
            }
            let min = sets[0].iter().min().unwrap();
            if (k as u128) > self.x.tree().index_of(min).unwrap() {
                return None;
            }
            if self.variant == TsirelsonVariant::Incomparable {
                for i in 0..k {
                    for j in i + 1..k {
                        if !completely_incomparable(&sets[i], &sets[j]) {
                            return None;
                        }
                    }
                }
            }
            Some(sets.iter().map(|s| self.norm(s)).sum())
        }
    }

    fn naive(x: &TreeVector, variant: TsirelsonVariant) -> Rational {
        let mut n = Naive {
            x,
            variant,
            memo: HashMap::new(),
        };
        n.norm(&x.support().into_iter().collect())
    }

    fn random_vector(rng: &mut ChaCha8Rng, tree: &Arc<FiniteTree>, max_support: usize) -> TreeVector {
        let nodes: Vec<TreeNode> = tree.iter().cloned().collect();
        let mut x = TreeVector::zero(tree.clone());
        let k = rng.gen_range(1..=max_support.min(nodes.len()));
        for _ in 0..k {
            let n = nodes[rng.gen_range(0..nodes.len())].clone();
            x.set(n, rat(rng.gen_range(-6..=6), rng.gen_range(1..=4))).unwrap();
        }
        x
    }

    #[test]
    fn single_node_and_zero() {
        let t = Arc::new(star_tree(3, 2).unwrap());
        let x = TreeVector::from_entries(t.clone(), [(node(&[3]), rat(-5, 7))]).unwrap();
        for v in [TsirelsonVariant::Incomparable, TsirelsonVariant::Standard] {
            assert_eq!(tsirelson_norm(&x, v).unwrap(), rat(5, 7));
            assert_eq!(tsirelson_norm(&TreeVector::zero(t.clone()), v).unwrap(), int(0));
        }
    }

    #[test]
    fn chain_support_degenerates_to_sup() {
        let t = Arc::new(chain_tree(8).unwrap());
        let x = TreeVector::from_entries(
            t.clone(),
            (0..8).map(|k| (TreeNode::new(vec![0; k]), rat(k as i64 + 1, 3))),
        )
        .unwrap();
        assert_eq!(tsirelson_norm(&x, TsirelsonVariant::Incomparable).unwrap(), rat(8, 3));
        let c = check_fixed_point(&x, TsirelsonVariant::Incomparable).unwrap();
        assert!(c.holds());
        assert_eq!(c.families_checked, 0);
    }

    #[test]
    fn star_singletons_family() {
        // children (4)..(7) of star_tree(4,4) have indices 5..8 ≥ 4
        let n = 4;
        let t = Arc::new(star_tree(n, 4).unwrap());
        let x = TreeVector::from_entries(t.clone(), (4..8).map(|l| (node(&[l]), int(1)))).unwrap();
        for v in [TsirelsonVariant::Incomparable, TsirelsonVariant::Standard] {
            let r = tsirelson_norm_with_witness(&x, v).unwrap();
            assert!(r.value >= rat(n as i64, 2));
            assert_eq!(r.value, naive(&x, v));
            assert_eq!(r.value, int(2));
            assert_eq!(replay_derivation(&x, v, &r.witness).unwrap(), r.value);
        }
    }

    #[test]
    fn agrees_with_naive_recursion() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for case in 0..120 {
            let tree = Arc::new(random_tree(case, 14, 3).unwrap());
            let x = random_vector(&mut rng, &tree, 6);
            for v in [TsirelsonVariant::Incomparable, TsirelsonVariant::Standard] {
                let r = tsirelson_norm_with_witness(&x, v).unwrap();
                assert_eq!(r.value, naive(&x, v), "case {case} {v}");
                assert_eq!(replay_derivation(&x, v, &r.witness).unwrap(), r.value);
                assert!(check_fixed_point(&x, v).unwrap().holds());
            }
        }
    }

    #[test]
    fn iterates_increase_and_stabilize() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for case in 0..60 {
            let tree = Arc::new(random_tree(case + 100, 20, 4).unwrap());
            let x = random_vector(&mut rng, &tree, 8);
            for v in [TsirelsonVariant::Incomparable, TsirelsonVariant::Standard] {
                let limit = tsirelson_norm(&x, v).unwrap();
                assert_eq!(tsirelson_iterate(&x, v, 0).unwrap(), x.sup());
                let mut prev = Rational::zero();
                for m in 0..=x.support_len() {
                    let it = tsirelson_iterate_with_witness(&x, v, m).unwrap();
                    assert!(it.value >= prev);
                    assert!(it.value <= limit);
                    assert!(it.witness.depth() <= m);
                    assert_eq!(replay_derivation(&x, v, &it.witness).unwrap(), it.value);
                    prev = it.value;
                }
                assert_eq!(prev, limit);
            }
        }
    }

    #[test]
    fn dominations() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for case in 0..80 {
            let tree = Arc::new(random_tree(case + 7, 25, 4).unwrap());
            let x = random_vector(&mut rng, &tree, 10);
            let inc = tsirelson_norm(&x, TsirelsonVariant::Incomparable).unwrap();
            let std = tsirelson_norm(&x, TsirelsonVariant::Standard).unwrap();
            assert!(x.sup() <= inc && inc <= std && std <= x.l1());
        }
    }

    #[test]
    fn cap_and_big_integer_path() {
        let t = Arc::new(star_tree(15, 20).unwrap());
        let x = TreeVector::from_entries(t.clone(), (20..35).map(|l| (node(&[l]), int(1)))).unwrap();
        assert_eq!(
            tsirelson_norm(&x, TsirelsonVariant::Standard),
            Err(Error::SupportCapExceeded { size: 15, cap: 14 })
        );
        // huge coefficients force the big-integer engine; result scales linearly
        let t = Arc::new(make_tree([vec![5u64], vec![6], vec![7, 0]]));
        let small = TreeVector::from_entries(
            t.clone(),
            [(node(&[5]), int(1)), (node(&[6]), int(1)), (node(&[7, 0]), rat(1, 3))],
        )
        .unwrap();
        let huge_factor = Rational::from_integer(BigInt::one() << 200usize);
        let huge = small.scale(&huge_factor);
        for v in [TsirelsonVariant::Incomparable, TsirelsonVariant::Standard] {
            let a = tsirelson_norm(&small, v).unwrap();
            let b = tsirelson_norm(&huge, v).unwrap();
            assert_eq!(a * &huge_factor, b);
            let w = tsirelson_norm_with_witness(&huge, v).unwrap();
            assert_eq!(replay_derivation(&huge, v, &w.witness).unwrap(), w.value);
        }
    }
}
