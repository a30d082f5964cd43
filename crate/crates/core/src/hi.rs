//! Ground norm, the `(m_j, n_j)` schedule, and certified bounds for the norm
//! induced by the norming set `D_G`.
//!
//! Ground functionals are `±1` along a chain. `D_G` closes them under sign
//! changes, restriction to enumeration intervals and `(A_n, 1/m)`-operations
//! on successively supported functionals. [`dg_lower_bound`] searches the
//! functionals reachable with a bounded nesting depth of operations and returns
//! one of them as a replayable witness.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{fits_i128, ScaledInt};
use crate::tree::{maximal_chains, FiniteTree, TreeNode};
use crate::vector::{Rational, TreeVector};

/// `‖x‖_G`: the largest absolute sum of `x` along a chain.
pub fn ground_norm(x: &TreeVector) -> Result<Rational> {
    if x.tree().is_empty() {
        return Err(Error::EmptyTree);
    }
    Ok(maximal_chains(x.tree())
        .iter()
        .map(|c| c.nodes().iter().map(|n| x.get(n).abs()).sum::<Rational>())
        .max()
        .unwrap_or_else(Rational::zero))
}

/// `‖x‖_1`, an upper bound for `‖x‖_{D_G}` since every functional of `D_G`
/// has entries in `[-1, 1]`.
pub fn dg_upper_bound(x: &TreeVector) -> Rational {
    x.l1()
}

/// Parameters of one `(A_n, 1/m)`-operation: at most `n` successive functionals,
/// summed and divided by `m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpPair {
    pub m: BigUint,
    pub n: BigUint,
}

impl OpPair {
    pub fn new(m: u64, n: u64) -> Self {
        OpPair {
            m: m.into(),
            n: n.into(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.m.is_zero() || self.n.is_zero() {
            return Err(Error::InvalidOperation(format!(
                "m and n must be positive, got m={} n={}",
                self.m, self.n
            )));
        }
        Ok(())
    }

    /// Parses `"m:n"`.
    pub fn parse(s: &str) -> Result<Self> {
        let (m, n) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected m:n, got {s:?}")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<BigUint>()
                .map_err(|_| Error::Parse(format!("not a natural: {v:?}")))
        };
        let op = OpPair {
            m: parse(m)?,
            n: parse(n)?,
        };
        op.validate()?;
        Ok(op)
    }

    /// Parses a comma-separated list of `m:n` pairs.
    pub fn parse_list(s: &str) -> Result<Vec<Self>> {
        s.split(',')
            .filter(|p| !p.trim().is_empty())
            .map(OpPair::parse)
            .collect()
    }
}

impl fmt::Display for OpPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.m, self.n)
    }
}

/// How a functional was built from ground functionals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Provenance {
    /// `Σ ε_i e*_{s_i}` along a chain `s_1 ≺ … ≺ s_r`.
    Ground {
        #[serde(serialize_with = "crate::tsirelson::ser_nodes")]
        chain: Vec<TreeNode>,
        signs: Vec<i8>,
    },
    /// Restriction to the enumeration interval `[lo, hi]`.
    Restrict {
        lo: u128,
        hi: u128,
        inner: Box<Provenance>,
    },
    /// `(1/m)(f_1 + … + f_k)` with `k ≤ n` and `f_1 < … < f_k`.
    EvenOp {
        #[serde(serialize_with = "ser_big")]
        m: BigUint,
        #[serde(serialize_with = "ser_big")]
        n: BigUint,
        parts: Vec<Provenance>,
    },
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl Provenance {
    /// Builds the coefficient vector, checking every closure rule on the way.
    pub fn materialize(&self, tree: &FiniteTree) -> Result<BTreeMap<TreeNode, Rational>> {
        let entries = match self {
            Provenance::Ground { chain, signs } => {
                if chain.len() != signs.len() {
                    return Err(Error::LengthMismatch(chain.len(), signs.len()));
                }
                for w in chain.windows(2) {
                    if w[0] == w[1] || !w[0].is_prefix_of(&w[1]) {
                        return Err(Error::Precondition(format!(
                            "ground chain is not strictly increasing at {} ⊀ {}",
                            w[0], w[1]
                        )));
                    }
                }
                let mut out = BTreeMap::new();
                for (n, &s) in chain.iter().zip(signs) {
                    if s != 1 && s != -1 {
                        return Err(Error::Precondition(format!("ground sign {s} is not ±1")));
                    }
                    out.insert(n.clone(), Rational::from_integer(BigInt::from(s)));
                }
                out
            }
            Provenance::Restrict { lo, hi, inner } => {
                let enumeration = tree.enumeration();
                let mut out = BTreeMap::new();
                for (n, v) in inner.materialize(tree)? {
                    let i = enumeration.index(&n)?;
                    if *lo <= i && i <= *hi {
                        out.insert(n, v);
                    }
                }
                out
            }
            Provenance::EvenOp { m, n, parts } => {
                if m.is_zero() {
                    return Err(Error::InvalidOperation("m = 0".into()));
                }
                if BigUint::from(parts.len()) > *n {
                    return Err(Error::InvalidOperation(format!(
                        "{} parts exceed n = {n}",
                        parts.len()
                    )));
                }
                let mats = parts
                    .iter()
                    .map(|p| p.materialize(tree))
                    .collect::<Result<Vec<_>>>()?;
                for (i, w) in mats.windows(2).enumerate() {
                    let (Some(a), Some(b)) = (w[0].keys().next_back(), w[1].keys().next()) else {
                        return Err(Error::InvalidOperation(format!("part {i} or {} is empty", i + 1)));
                    };
                    if a >= b {
                        return Err(Error::InvalidOperation(format!(
                            "supports of parts {i} and {} are not successive",
                            i + 1
                        )));
                    }
                }
                let m = Rational::from_integer(BigInt::from(m.clone()));
                let mut out = BTreeMap::new();
                for mat in mats {
                    for (k, v) in mat {
                        out.insert(k, v / &m);
                    }
                }
                out
            }
        };
        if let Some((n, v)) = entries.iter().find(|(_, v)| v.abs() > Rational::one()) {
            return Err(Error::Precondition(format!("entry {v} at {n} leaves [-1, 1]")));
        }
        Ok(entries)
    }

    /// Number of nested operations.
    pub fn op_depth(&self) -> usize {
        match self {
            Provenance::Ground { .. } => 0,
            Provenance::Restrict { inner, .. } => inner.op_depth(),
            Provenance::EvenOp { parts, .. } => {
                1 + parts.iter().map(Provenance::op_depth).max().unwrap_or(0)
            }
        }
    }
}

/// An element of `D_G` with its derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functional {
    pub entries: BTreeMap<TreeNode, Rational>,
    pub provenance: Provenance,
}

impl Functional {
    pub fn from_provenance(tree: &FiniteTree, provenance: Provenance) -> Result<Self> {
        Ok(Functional {
            entries: provenance.materialize(tree)?,
            provenance,
        })
    }

    /// `f(x) = Σ_s f(s) x(s)`.
    pub fn apply(&self, x: &TreeVector) -> Rational {
        self.entries.iter().map(|(n, v)| v * x.get(n)).sum()
    }
}

/// Certified lower bound for `‖x‖_{D_G}` and the functional attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerBound {
    pub value: Rational,
    pub functional: Functional,
}

/// Best value over functionals built from ground functionals by interval
/// restriction and at most `depth` nested operations from `ops`.
pub fn dg_lower_bound(x: &TreeVector, depth: usize, ops: &[OpPair]) -> Result<LowerBound> {
    if x.tree().is_empty() {
        return Err(Error::EmptyTree);
    }
    for op in ops {
        op.validate()?;
    }
    let layout = SearchLayout::new(x)?;
    let total: BigInt = layout.scaled.iter().sum();
    let lcm_m = ops
        .iter()
        .fold(BigInt::one(), |acc, op| acc.lcm(&BigInt::from(op.m.clone())));
    let depth_scale = num_traits::pow(lcm_m, depth);
    let (value, provenance) =
        if fits_i128(&(&total * &depth_scale)) && fits_i128(&(&depth_scale * &layout.denom)) {
            run_search::<i128>(&layout, depth, ops, &depth_scale)
        } else {
            run_search::<BigInt>(&layout, depth, ops, &depth_scale)
        };
    let functional = Functional::from_provenance(x.tree(), provenance)?;
    debug_assert_eq!(functional.apply(x), value);
    Ok(LowerBound { value, functional })
}

struct SearchLayout {
    support: Vec<TreeNode>,
    index: Vec<u128>,
    scaled: Vec<BigInt>,
    denom: BigInt,
    /// For each maximal chain: its nodes and which support positions it meets.
    chains: Vec<(Vec<TreeNode>, Vec<bool>)>,
    signs: BTreeMap<TreeNode, i8>,
}

impl SearchLayout {
    fn new(x: &TreeVector) -> Result<Self> {
        let support = x.support();
        let enumeration = x.tree().enumeration();
        let index = support
            .iter()
            .map(|s| enumeration.index(s))
            .collect::<Result<Vec<_>>>()?;
        let denom = x
            .entries()
            .values()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let scaled = support
            .iter()
            .map(|s| (x.get(s).abs() * Rational::from_integer(denom.clone())).to_integer())
            .collect();
        let chains = maximal_chains(x.tree())
            .into_iter()
            .map(|c| {
                let meets = support.iter().map(|s| c.contains(s)).collect();
                (c.nodes().to_vec(), meets)
            })
            .collect();
        let signs = x
            .entries()
            .iter()
            .map(|(n, v)| (n.clone(), if v.is_negative() { -1 } else { 1 }))
            .collect();
        Ok(SearchLayout {
            support,
            index,
            scaled,
            denom,
            chains,
            signs,
        })
    }

    fn ground(&self, chain: usize) -> Provenance {
        let nodes = self.chains[chain].0.clone();
        let signs = nodes
            .iter()
            .map(|n| self.signs.get(n).copied().unwrap_or(1))
            .collect();
        Provenance::Ground {
            chain: nodes,
            signs,
        }
    }
}

/// Window tables for one nesting level: `w[a][b]` is the best value on support
/// positions `a..=b` (scaled).
struct Level<T> {
    w: Vec<Vec<T>>,
}

fn run_search<T: ScaledInt>(
    layout: &SearchLayout,
    depth: usize,
    ops: &[OpPair],
    depth_scale: &BigInt,
) -> (Rational, Provenance) {
    let n = layout.support.len();
    let scale_big = depth_scale * &layout.denom;
    let unscale = |v: &T| Rational::new(v.to_big(), scale_big.clone());
    if n == 0 {
        return (Rational::zero(), layout.ground(0));
    }
    let values: Vec<T> = layout
        .scaled
        .iter()
        .map(|v| T::from_big(&(v * depth_scale)))
        .collect();
    let m_vals: Vec<T> = ops.iter().map(|op| T::from_big(&BigInt::from(op.m.clone()))).collect();
    let n_caps: Vec<usize> = ops
        .iter()
        .map(|op| op.n.to_usize().unwrap_or(usize::MAX).min(n))
        .collect();
    let max_pieces = n_caps.iter().copied().max().unwrap_or(0);

    // ground level, with the chain realizing each window
    let mut w0 = vec![vec![T::zero(); n]; n];
    let mut w0_chain = vec![vec![0usize; n]; n];
    for a in 0..n {
        for (ci, (_, meets)) in layout.chains.iter().enumerate() {
            let mut acc = T::zero();
            for b in a..n {
                if meets[b] {
                    acc = acc.plus(&values[b]);
                }
                if acc > w0[a][b] {
                    w0[a][b] = acc.clone();
                    w0_chain[a][b] = ci;
                }
            }
        }
    }
    let mut levels = vec![Level { w: w0 }];
    for d in 1..=depth {
        let prev = &levels[d - 1].w;
        let starts: Vec<usize> = if d == depth { vec![0] } else { (0..n).collect() };
        let mut w = prev.clone();
        for &a in &starts {
            let table = partition_table(prev, a, n, max_pieces);
            for b in a..n {
                for (oi, m) in m_vals.iter().enumerate() {
                    let j = n_caps[oi].min(b - a + 1);
                    let cand = table[j][b].div_exact(m);
                    if cand > w[a][b] {
                        w[a][b] = cand;
                    }
                }
            }
        }
        levels.push(Level { w });
    }

    let top = levels[depth].w[0][n - 1].clone();
    let builder = WitnessBuilder {
        layout,
        levels: &levels,
        w0_chain: &w0_chain,
        m_vals: &m_vals,
        n_caps: &n_caps,
        ops,
        max_pieces,
    };
    let provenance = builder.build(depth, 0, n - 1, true);
    (unscale(&top), provenance)
}

/// `t[j][b]`: best sum of `prev` over at most `j` consecutive pieces covering `a..=b`.
fn partition_table<T: ScaledInt>(prev: &[Vec<T>], a: usize, n: usize, pieces: usize) -> Vec<Vec<T>> {
    let mut t = vec![vec![T::zero(); n]; pieces + 1];
    if pieces == 0 {
        return t;
    }
    for b in a..n {
        t[1][b] = prev[a][b].clone();
    }
    for j in 2..=pieces {
        for b in a..n {
            let mut best = t[j - 1][b].clone();
            for c in a..b {
                let cand = t[j - 1][c].plus(&prev[c + 1][b]);
                if cand > best {
                    best = cand;
                }
            }
            t[j][b] = best;
        }
    }
    t
}

struct WitnessBuilder<'a, T> {
    layout: &'a SearchLayout,
    levels: &'a [Level<T>],
    w0_chain: &'a [Vec<usize>],
    m_vals: &'a [T],
    n_caps: &'a [usize],
    ops: &'a [OpPair],
    max_pieces: usize,
}

impl<T: ScaledInt> WitnessBuilder<'_, T> {
    fn build(&self, d: usize, a: usize, b: usize, top: bool) -> Provenance {
        let n = self.layout.support.len();
        let target = &self.levels[d].w[a][b];
        if d == 0 || self.levels[d - 1].w[a][b] == *target {
            if d > 0 {
                return self.build(d - 1, a, b, top);
            }
            let ground = self.layout.ground(self.w0_chain[a][b]);
            if top && a == 0 && b == n - 1 {
                return ground;
            }
            return Provenance::Restrict {
                lo: self.layout.index[a],
                hi: self.layout.index[b],
                inner: Box::new(ground),
            };
        }
        let prev = &self.levels[d - 1].w;
        let table = partition_table(prev, a, n, self.max_pieces);
        for (oi, m) in self.m_vals.iter().enumerate() {
            let j = self.n_caps[oi].min(b - a + 1);
            if table[j][b].div_exact(m) != *target {
                continue;
            }
            // walk the partition back from b
            let mut pieces = Vec::new();
            let (mut jj, mut end) = (j, b);
            loop {
                let goal = &table[jj][end];
                if jj == 1 || *goal == prev[a][end] {
                    pieces.push((a, end));
                    break;
                }
                if *goal == table[jj - 1][end] {
                    jj -= 1;
                    continue;
                }
                let c = (a..end)
                    .find(|&c| table[jj - 1][c].plus(&prev[c + 1][end]) == *goal)
                    .expect("partition value is realized");
                pieces.push((c + 1, end));
                end = c;
                jj -= 1;
            }
            pieces.reverse();
            let parts = pieces
                .into_iter()
                .filter(|&(s, e)| prev[s][e] != T::zero())
                .map(|(s, e)| self.build(d - 1, s, e, false))
                .collect();
            return Provenance::EvenOp {
                m: self.ops[oi].m.clone(),
                n: self.ops[oi].n.clone(),
                parts,
            };
        }
        unreachable!("window value is realized by some operation")
    }
}

/// One row of the strict-singularity table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularityRow {
    #[serde(serialize_with = "ser_big")]
    pub m: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub n: BigUint,
    #[serde(serialize_with = "crate::tsirelson::ser_rat")]
    pub ground: Rational,
    #[serde(serialize_with = "crate::tsirelson::ser_rat")]
    pub lower: Rational,
    #[serde(serialize_with = "crate::tsirelson::ser_rat")]
    pub upper: Rational,
    #[serde(serialize_with = "crate::tsirelson::ser_rat")]
    pub ratio: Rational,
}

impl SingularityRow {
    /// `lower ≥ n/m` and `ground = 1`.
    pub fn satisfies_ratio_law(&self) -> bool {
        let nm = Rational::new(BigInt::from(self.n.clone()), BigInt::from(self.m.clone()));
        self.ground.is_one() && self.lower >= nm
    }
}

/// `x = Σ_{i≤n} e_{t_i}` over the first `n` leaves of `tree` (pairwise
/// incomparable), compared under the ground norm and one `(A_n, 1/m)` layer.
pub fn strict_singularity_witness(tree: &FiniteTree, n: usize, m: u64) -> Result<(SingularityRow, Functional)> {
    if m < 2 {
        return Err(Error::InvalidOperation(format!("m = {m} must be at least 2")));
    }
    let leaves = tree.leaves();
    if leaves.len() < n {
        return Err(Error::InsufficientIncomparable {
            needed: n,
            available: leaves.len(),
        });
    }
    let tree = std::sync::Arc::new(tree.clone());
    let x = TreeVector::from_entries(
        tree,
        leaves.into_iter().take(n).map(|l| (l, Rational::one())),
    )?;
    let ground = ground_norm(&x)?;
    let op = OpPair::new(m, n as u64);
    let lb = dg_lower_bound(&x, 1, std::slice::from_ref(&op))?;
    let ratio = if ground.is_zero() {
        Rational::zero()
    } else {
        &lb.value / &ground
    };
    Ok((
        SingularityRow {
            m: op.m,
            n: op.n,
            ground,
            upper: dg_upper_bound(&x),
            lower: lb.value,
            ratio,
        },
        lb.functional,
    ))
}

/// [`strict_singularity_witness`] for each `(m, n)` pair.
pub fn singularity_table(tree: &FiniteTree, pairs: &[(u64, usize)]) -> Result<Vec<SingularityRow>> {
    pairs
        .iter()
        .map(|&(m, n)| strict_singularity_witness(tree, n, m).map(|(row, _)| row))
        .collect()
}

/// The sequences `m_1 = 2, m_{j+1} = m_j^5` and `n_1 = 4, n_{j+1} = (5 n_j)^{s_j}`
/// with `s_j = log_2(m_{j+1}^3)`, plus small pairs for desk-scale runs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Schedule {
    #[serde(serialize_with = "ser_big_list")]
    pub m: Vec<BigUint>,
    #[serde(serialize_with = "ser_big_list")]
    pub n: Vec<BigUint>,
    pub s: Vec<u64>,
    pub scaled_pairs: Vec<(u64, u64)>,
}

fn ser_big_list<S: serde::Serializer>(v: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|b| b.to_string()).collect::<Vec<_>>().serialize(s)
}

/// Desk-scale `(m, n)` pairs with `n/m` growing.
pub const SCALED_PAIRS: [(u64, u64); 4] = [(2, 4), (2, 8), (2, 16), (4, 64)];

/// Largest `n_j` bit length the schedule will materialize.
pub const SCHEDULE_MAX_BITS: u64 = 1 << 22;

pub fn schedule(j_max: usize) -> Result<Schedule> {
    if j_max == 0 {
        return Err(Error::Precondition("j_max must be at least 1".into()));
    }
    // m_j = 2^(5^(j-1)), so log_2 m_{j+1} = 5^j
    let mut m = Vec::with_capacity(j_max);
    let mut n = Vec::with_capacity(j_max);
    let mut s = Vec::with_capacity(j_max.saturating_sub(1));
    m.push(BigUint::from(2u32));
    n.push(BigUint::from(4u32));
    for j in 1..j_max {
        let next_m = num_traits::pow(m[j - 1].clone(), 5);
        let log_m = next_m.bits() - 1;
        let s_j = 3 * log_m;
        let base = &n[j - 1] * 5u32;
        let estimate = base.bits().saturating_mul(s_j);
        if estimate > SCHEDULE_MAX_BITS {
            return Err(Error::ScheduleTooLarge(format!(
                "n_{} has about {estimate} bits (limit {SCHEDULE_MAX_BITS})",
                j + 1
            )));
        }
        let exp = u32::try_from(s_j).map_err(|_| Error::ScheduleTooLarge(format!("s_{j} = {s_j}")))?;
        n.push(num_traits::pow(base, exp as usize));
        m.push(next_m);
        s.push(s_j);
    }
    Ok(Schedule {
        m,
        n,
        s,
        scaled_pairs: SCALED_PAIRS.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{make_tree, random_tree, star_tree};
    use crate::vector::{int, rat};
    use std::sync::Arc;

    fn node(p: &[u64]) -> TreeNode {
        TreeNode::from(p)
    }

    #[test]
    fn ground_norm_examples() {
        let t = Arc::new(make_tree([vec![0u64, 0], vec![1]]));
        let x = TreeVector::from_entries(
            t.clone(),
            [(node(&[0]), int(1)), (node(&[0, 0]), int(1)), (node(&[1]), int(-1))],
        )
        .unwrap();
        assert_eq!(ground_norm(&x).unwrap(), int(2));
        let star = Arc::new(star_tree(5, 0).unwrap());
        let y = TreeVector::from_entries(star.clone(), (0..5).map(|i| (node(&[i]), int(1)))).unwrap();
        assert_eq!(ground_norm(&y).unwrap(), int(1));
        let z = TreeVector::from_entries(star, [(node(&[2]), rat(-3, 4))]).unwrap();
        assert_eq!(ground_norm(&z).unwrap(), rat(3, 4));
        let empty = TreeVector::zero(Arc::new(FiniteTree::empty()));
        assert_eq!(ground_norm(&empty), Err(Error::EmptyTree));
    }

    #[test]
    fn depth_zero_is_ground() {
        for seed in 0..30 {
            let t = Arc::new(random_tree(seed, 20, 3).unwrap());
            let mut x = TreeVector::zero(t.clone());
            for (i, n) in t.iter().enumerate().filter(|(i, _)| i % 2 == 0) {
                x.set(n.clone(), rat(i as i64 % 5 - 2, 3)).unwrap();
            }
            let lb = dg_lower_bound(&x, 0, &[OpPair::new(2, 4)]).unwrap();
            assert_eq!(lb.value, ground_norm(&x).unwrap());
            assert_eq!(lb.functional.apply(&x), lb.value);
        }
    }

    #[test]
    fn four_incomparable_units() {
        let t = Arc::new(star_tree(4, 0).unwrap());
        let x = TreeVector::from_entries(t.clone(), (0..4).map(|i| (node(&[i]), int(1)))).unwrap();
        let lb = dg_lower_bound(&x, 1, &[OpPair::new(2, 4)]).unwrap();
        assert_eq!(lb.value, int(2));
        assert_eq!(lb.functional.apply(&x), int(2));
        for i in 0..4 {
            assert_eq!(lb.functional.entries[&node(&[i])], rat(1, 2));
        }
        assert_eq!(lb.functional.provenance.op_depth(), 1);
        assert_eq!(dg_upper_bound(&x), int(4));
    }

    #[test]
    fn depth_monotone_and_bracketed() {
        let ops = [OpPair::new(2, 4), OpPair::new(3, 9)];
        for seed in 0..25 {
            let t = Arc::new(random_tree(seed + 40, 18, 4).unwrap());
            let mut x = TreeVector::zero(t.clone());
            for (i, n) in t.iter().enumerate() {
                if i % 3 != 1 {
                    x.set(n.clone(), rat((i as i64 * 7) % 9 - 4, 2)).unwrap();
                }
            }
            let mut prev = ground_norm(&x).unwrap();
            for d in 0..=2 {
                let lb = dg_lower_bound(&x, d, &ops).unwrap();
                assert!(lb.value >= prev);
                assert!(lb.value <= dg_upper_bound(&x));
                assert_eq!(lb.functional.apply(&x), lb.value);
                assert!(lb.functional.entries.values().all(|v| v.abs() <= int(1)));
                prev = lb.value;
            }
        }
    }

    #[test]
    fn provenance_rules_are_enforced() {
        let t = star_tree(3, 0).unwrap();
        let bad_chain = Provenance::Ground {
            chain: vec![node(&[0]), node(&[1])],
            signs: vec![1, 1],
        };
        assert!(bad_chain.materialize(&t).is_err());
        let g = |i: u64| Provenance::Ground {
            chain: vec![node(&[i])],
            signs: vec![1],
        };
        let too_many = Provenance::EvenOp {
            m: 2u32.into(),
            n: 1u32.into(),
            parts: vec![g(0), g(1)],
        };
        assert!(too_many.materialize(&t).is_err());
        let unordered = Provenance::EvenOp {
            m: 2u32.into(),
            n: 3u32.into(),
            parts: vec![g(1), g(0)],
        };
        assert!(unordered.materialize(&t).is_err());
        let big = Provenance::EvenOp {
            m: 1u32.into(),
            n: 3u32.into(),
            parts: vec![
                Provenance::EvenOp {
                    m: 1u32.into(),
                    n: 1u32.into(),
                    parts: vec![g(0)],
                },
            ],
        };
        assert!(big.materialize(&t).is_ok());
    }

    #[test]
    fn schedule_values() {
        let s = schedule(3).unwrap();
        assert_eq!(s.m[0], BigUint::from(2u32));
        assert_eq!(s.m[1], BigUint::from(32u32));
        assert_eq!(s.m[2], BigUint::from(33_554_432u64));
        assert_eq!(s.s[0], 15);
        assert_eq!(s.n[0], BigUint::from(4u32));
        assert_eq!(s.n[1], num_traits::pow(BigUint::from(20u32), 15));
        assert_eq!(s.n[2], num_traits::pow(s.n[1].clone() * 5u32, 75));
        assert!(schedule(0).is_err());
        assert!(matches!(schedule(6), Err(Error::ScheduleTooLarge(_))));
    }

    #[test]
    fn singularity_rows() {
        let t = star_tree(16, 4).unwrap();
        let (row, f) = strict_singularity_witness(&t, 4, 2).unwrap();
        assert_eq!((row.ground.clone(), row.lower.clone(), row.ratio.clone()), (int(1), int(2), int(2)));
        assert!(row.satisfies_ratio_law());
        assert_eq!(f.provenance.op_depth(), 1);
        let (row, _) = strict_singularity_witness(&t, 8, 2).unwrap();
        assert_eq!(row.ratio, int(4));
        let (row, _) = strict_singularity_witness(&t, 5, 5).unwrap();
        assert_eq!(row.ratio, int(1));
        assert_eq!(
            strict_singularity_witness(&t, 20, 2).unwrap_err(),
            Error::InsufficientIncomparable {
                needed: 20,
                available: 16
            }
        );
    }

    #[test]
    fn op_parsing() {
        let ops = OpPair::parse_list("2:4,2:8, 4:64").unwrap();
        assert_eq!(ops, vec![OpPair::new(2, 4), OpPair::new(2, 8), OpPair::new(4, 64)]);
        assert!(OpPair::parse("0:4").is_err());
        assert!(OpPair::parse("2").is_err());
    }
}
