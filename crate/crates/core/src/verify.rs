//! Seeded experiment suites with exact, reproducible reports.
//!
//! Every case is a pure function of `(experiment, parameters, seed, case id)`.
//! Cases run in parallel (capped by `BAIRE_LAB_THREADS`) and are reported in id
//! order. A failing case carries a [`ReplayBundle`] that [`replay`] re-checks.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baire::{baire_norm, baire_norm_oracle, baire_norm_with_witness, BaireParams, BaireResult, Exponent, ORACLE_CAP};
use crate::error::{Error, Result};
use crate::hi::{dg_lower_bound, dg_upper_bound, ground_norm, strict_singularity_witness, OpPair};
use crate::sequence::{generate_incomparable_blocks_with, random_coefficient, FiniteBlockSequence, NormContext, NormKind, Window};
use crate::tree::{chain_tree, random_tree, star_tree, FiniteTree, TreeNode};
use crate::tsirelson::{
    check_fixed_point, tsirelson_iterate, tsirelson_norm, verify_block_domination, verify_sandwich18, TsirelsonVariant,
};
use crate::vector::{format_rational, list_norm, parse_rational, BaseNorm, NormValue, Rational, TreeVector};

/// Environment variable capping the worker threads of a suite.
pub const THREADS_ENV: &str = "BAIRE_LAB_THREADS";

/// Small `(m, n)` pairs used by the default singularity suite.
pub const DEFAULT_HI_PAIRS: [(u64, usize); 4] = [(2, 4), (2, 8), (2, 16), (4, 64)];

/// A self-contained description of one case, enough to recompute it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum ReplayBundle {
    Oracle {
        tree: Vec<Vec<u64>>,
        entries: Vec<(Vec<u64>, String)>,
        p: String,
        base: String,
    },
    Branch {
        tree: Vec<Vec<u64>>,
        entries: Vec<(Vec<u64>, String)>,
        p: String,
        base: String,
    },
    FixedPoint {
        tree: Vec<Vec<u64>>,
        entries: Vec<(Vec<u64>, String)>,
    },
    Tsirelson {
        tree: Vec<Vec<u64>>,
        blocks: Vec<Vec<(Vec<u64>, String)>>,
        windows: Vec<(String, String)>,
        coeffs: Vec<String>,
    },
    Hi {
        tree: Vec<Vec<u64>>,
        m: u64,
        n: usize,
    },
}

/// Outcome of one case: named checks and the exact values behind them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseRecord {
    pub id: u64,
    pub pass: bool,
    pub checks: BTreeMap<String, bool>,
    pub values: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replay: Option<ReplayBundle>,
}

impl CaseRecord {
    fn new(id: u64) -> Self {
        CaseRecord {
            id,
            pass: true,
            checks: BTreeMap::new(),
            values: BTreeMap::new(),
            error: None,
            replay: None,
        }
    }

    fn check(&mut self, name: &str, ok: bool) {
        self.checks.insert(name.to_string(), ok);
        self.pass &= ok;
    }

    fn value(&mut self, name: &str, v: impl ToString) {
        self.values.insert(name.to_string(), v.to_string());
    }

    /// Whether the named check ran and held.
    pub fn holds(&self, name: &str) -> bool {
        self.checks.get(name).copied().unwrap_or(false)
    }
}

/// Report of one suite run. Serializes without the wall time, so identical
/// inputs give byte-identical JSON.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub parameters: BTreeMap<String, String>,
    pub inputs_digest: String,
    pub pass: bool,
    pub cases: Vec<CaseRecord>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseRecord> {
        self.cases.iter().filter(|c| !c.pass)
    }

    /// Whether every case ran the named check and it held.
    pub fn all_hold(&self, check: &str) -> bool {
        self.cases.iter().all(|c| c.holds(check))
    }
}

fn tree_paths(tree: &FiniteTree) -> Vec<Vec<u64>> {
    tree.iter().map(|n| n.path().to_vec()).collect()
}

fn entry_list(x: &TreeVector) -> Vec<(Vec<u64>, String)> {
    x.entries()
        .iter()
        .map(|(n, v)| (n.path().to_vec(), format_rational(v)))
        .collect()
}

fn build_tree(paths: &[Vec<u64>]) -> Arc<FiniteTree> {
    Arc::new(FiniteTree::from_paths_reporting(paths.iter().cloned()).0)
}

fn build_vector(tree: &Arc<FiniteTree>, entries: &[(Vec<u64>, String)]) -> Result<TreeVector> {
    let mut x = TreeVector::zero(tree.clone());
    for (p, v) in entries {
        x.set(TreeNode::new(p.clone()), parse_rational(v)?)?;
    }
    Ok(x)
}

/// Per-case RNG derived from the suite seed and the case id.
fn case_rng(seed: u64, id: u64, salt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt.rotate_left(17));
    rng.set_stream(id);
    rng
}

fn pool() -> rayon::ThreadPool {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

/// Runs `case` for ids `0..cases`, digests the inputs and assembles the report.
fn run_cases<F>(experiment: &str, parameters: BTreeMap<String, String>, cases: u64, case: F) -> ExperimentReport
where
    F: Fn(u64) -> (ReplayBundle, CaseRecord) + Sync,
{
    let start = Instant::now();
    let mut results: Vec<(ReplayBundle, CaseRecord)> = pool().install(|| (0..cases).into_par_iter().map(&case).collect());
    results.sort_by_key(|(_, r)| r.id);
    let mut hasher = Sha256::new();
    hasher.update(experiment.as_bytes());
    hasher.update(serde_json::to_vec(&parameters).expect("parameters serialize"));
    for (bundle, _) in &results {
        hasher.update(serde_json::to_vec(bundle).expect("bundle serializes"));
    }
    let records: Vec<CaseRecord> = results
        .into_iter()
        .map(|(bundle, mut r)| {
            if !r.pass {
                r.replay = Some(bundle);
            }
            r
        })
        .collect();
    ExperimentReport {
        experiment: experiment.to_string(),
        parameters,
        inputs_digest: hex::encode(hasher.finalize()),
        pass: records.iter().all(|r| r.pass),
        cases: records,
        wall_time: start.elapsed(),
    }
}

fn params_map(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn finish(record: &mut CaseRecord, outcome: Result<()>) {
    if let Err(e) = outcome {
        record.error = Some(e.to_string());
        record.pass = false;
    }
}

fn random_sparse_vector(rng: &mut ChaCha8Rng, tree: &Arc<FiniteTree>, max_support: usize) -> TreeVector {
    let nodes: Vec<&TreeNode> = tree.iter().collect();
    let k = rng.gen_range(1..=max_support.min(nodes.len()));
    let picked = rand::seq::index::sample(rng, nodes.len(), k).into_vec();
    let mut x = TreeVector::zero(tree.clone());
    for i in picked {
        let c = random_coefficient(rng);
        x.set(nodes[i].clone(), c).expect("node is in the tree");
    }
    x
}

/// Sign-flip invariance and `sup ≤ ‖x‖ ≤ ‖x‖_1` for a Baire norm.
fn baire_invariants(record: &mut CaseRecord, x: &TreeVector, params: &BaireParams, value: &NormValue) -> Result<()> {
    let flips: Vec<TreeNode> = x.support().into_iter().step_by(2).collect();
    let flipped = baire_norm(&x.flip_signs(flips.iter()), params)?;
    record.check("unconditional", flipped.agrees_with(value));
    if params.base.is_l1() {
        record.check(
            "bracketing",
            NormValue::exact(x.sup()).possibly_le(value) && value.possibly_le(&NormValue::exact(x.l1())),
        );
    }
    Ok(())
}

/// Agreement of two evaluations: exactly on `p`-power sums or values when those
/// are rational, by overlap of certified intervals otherwise.
fn baire_agreement(a: &BaireResult, b: &BaireResult) -> (bool, &'static str) {
    match (&a.power_sum, &b.power_sum) {
        (Some(x), Some(y)) if x.is_exact() && y.is_exact() => (x.exact == y.exact, "exact"),
        _ if a.value.is_exact() && b.value.is_exact() => (a.value.exact == b.value.exact, "exact"),
        _ => (a.value.agrees_with(&b.value), "interval"),
    }
}

fn oracle_case(x: &TreeVector, params: &BaireParams, record: &mut CaseRecord) -> Result<()> {
    let dp = baire_norm_with_witness(x, params)?;
    let oracle = baire_norm_oracle(x, params, ORACLE_CAP)?;
    let (agree, mode) = baire_agreement(&dp, &oracle);
    record.value("dp", &dp.value);
    record.value("oracle", &oracle.value);
    record.value("mode", mode);
    record.check("agree", agree);
    baire_invariants(record, x, params, &dp.value)?;
    if params.p == Exponent::Zero && params.base.is_l1() {
        let g = ground_norm(x)?;
        record.value("ground", format_rational(&g));
        record.check("ground_matches", dp.value.exact.as_ref() == Some(&g));
        let lb = dg_lower_bound(x, 1, &[OpPair::new(2, 4)])?;
        let up = dg_upper_bound(x);
        record.check("dg_bracketing", g <= lb.value && lb.value <= up && lb.functional.apply(x) == lb.value);
    }
    Ok(())
}

/// Oracle cross-check of the Baire-sum evaluator on random trees with
/// `|supp| ≤ max_support`, cycling `p` through `0, 1, 2` with an `ℓ_1` base.
pub fn run_oracle_equivalence(cases: u64, seed: u64, max_support: usize) -> ExperimentReport {
    let parameters = params_map(&[
        ("cases", cases.to_string()),
        ("seed", seed.to_string()),
        ("max_support", max_support.to_string()),
    ]);
    run_cases("oracle", parameters, cases, |id| {
        let mut rng = case_rng(seed, id, 1);
        let tree = Arc::new(random_tree(rng.gen(), 16, 3).expect("positive size"));
        let x = random_sparse_vector(&mut rng, &tree, max_support.max(1));
        let p = match id % 3 {
            0 => Exponent::Zero,
            1 => Exponent::P(crate::vector::int(1)),
            _ => Exponent::P(crate::vector::int(2)),
        };
        let params = BaireParams::new(p, BaseNorm::l1());
        let bundle = ReplayBundle::Oracle {
            tree: tree_paths(&tree),
            entries: entry_list(&x),
            p: params.p.to_string(),
            base: params.base.to_string(),
        };
        let mut record = CaseRecord::new(id);
        let outcome = oracle_case(&x, &params, &mut record);
        finish(&mut record, outcome);
        (bundle, record)
    })
}

fn branch_case(x: &TreeVector, params: &BaireParams, record: &mut CaseRecord) -> Result<()> {
    let coeffs: Vec<Rational> = x.tree().iter().map(|n| x.get(n)).collect();
    let norm = baire_norm(x, params)?;
    let plain = list_norm(&coeffs, &params.base);
    record.value("baire", &norm);
    record.value("base", &plain);
    let equal = if norm.is_exact() && plain.is_exact() {
        norm.exact == plain.exact
    } else {
        norm.agrees_with(&plain)
    };
    record.check("isometry", equal);
    baire_invariants(record, x, params, &norm)
}

/// Chain-supported vectors against the plain base norm of their coefficients,
/// cycling through `(p, base) = (1, ℓ_1), (2, ℓ_2), (0, ℓ_1)`.
pub fn run_branch_isometry(max_len: usize, cases: u64, seed: u64) -> ExperimentReport {
    let parameters = params_map(&[
        ("cases", cases.to_string()),
        ("seed", seed.to_string()),
        ("max_len", max_len.to_string()),
    ]);
    run_cases("branch", parameters, cases, |id| {
        let mut rng = case_rng(seed, id, 2);
        let len = rng.gen_range(1..=max_len.max(1));
        let tree = Arc::new(chain_tree(len).expect("positive length"));
        let mut x = TreeVector::zero(tree.clone());
        for n in tree.iter() {
            if rng.gen_bool(0.8) {
                x.set(n.clone(), random_coefficient(&mut rng)).expect("node is in the tree");
            }
        }
        let params = match id % 3 {
            0 => BaireParams::new(Exponent::P(crate::vector::int(1)), BaseNorm::l1()),
            1 => BaireParams::new(
                Exponent::P(crate::vector::int(2)),
                BaseNorm::lq(crate::vector::int(2)).expect("q >= 1"),
            ),
            _ => BaireParams::zero(BaseNorm::l1()),
        };
        let bundle = ReplayBundle::Branch {
            tree: tree_paths(&tree),
            entries: entry_list(&x),
            p: params.p.to_string(),
            base: params.base.to_string(),
        };
        let mut record = CaseRecord::new(id);
        let outcome = branch_case(&x, &params, &mut record);
        finish(&mut record, outcome);
        (bundle, record)
    })
}

fn fixed_point_case(x: &TreeVector, record: &mut CaseRecord) -> Result<()> {
    let inc = tsirelson_norm(x, TsirelsonVariant::Incomparable)?;
    let std_norm = tsirelson_norm(x, TsirelsonVariant::Standard)?;
    record.value("incomparable", format_rational(&inc));
    record.value("standard", format_rational(&std_norm));
    let mut fixed = true;
    let mut stable = true;
    for (v, value) in [(TsirelsonVariant::Incomparable, &inc), (TsirelsonVariant::Standard, &std_norm)] {
        let fp = check_fixed_point(x, v)?;
        fixed &= fp.holds() && &fp.value == value;
        stable &= &tsirelson_iterate(x, v, x.support_len())? == value;
    }
    record.check("fixed_point", fixed);
    record.check("stabilizes", stable);
    record.check("bracketing", x.sup() <= inc && inc <= std_norm && std_norm <= x.l1());
    let flips: Vec<TreeNode> = x.support().into_iter().step_by(2).collect();
    let flipped = x.flip_signs(flips.iter());
    record.check("unconditional", tsirelson_norm(&flipped, TsirelsonVariant::Incomparable)? == inc);
    Ok(())
}

/// Implicit-equation and iterate-stabilization checks for both Tsirelson
/// variants on random vectors with `|supp| ≤ max_support`.
pub fn run_tsirelson_fixed_point(cases: u64, seed: u64, max_support: usize) -> ExperimentReport {
    let parameters = params_map(&[
        ("cases", cases.to_string()),
        ("seed", seed.to_string()),
        ("max_support", max_support.to_string()),
    ]);
    run_cases("tsirelson_fixed_point", parameters, cases, |id| {
        let mut rng = case_rng(seed, id, 3);
        let tree = Arc::new(random_tree(rng.gen(), 24, 4).expect("positive size"));
        let x = random_sparse_vector(&mut rng, &tree, max_support.max(1));
        let bundle = ReplayBundle::FixedPoint {
            tree: tree_paths(&tree),
            entries: entry_list(&x),
        };
        let mut record = CaseRecord::new(id);
        let outcome = fixed_point_case(&x, &mut record);
        finish(&mut record, outcome);
        (bundle, record)
    })
}

fn block_case(tree: &Arc<FiniteTree>, seq: &FiniteBlockSequence, coeffs: &[Rational], record: &mut CaseRecord) -> Result<()> {
    let lemma = verify_block_domination(tree, seq, coeffs)?;
    record.value("lemma_index", format_rational(&lemma.index_norm));
    record.value("lemma_block", format_rational(&lemma.block_norm));
    record.check("lemma", lemma.holds);
    let s = verify_sandwich18(tree, seq, coeffs)?;
    record.value("index_standard", format_rational(&s.index_standard));
    record.value("index_incomparable", format_rational(&s.index_incomparable));
    record.value("block_incomparable", format_rational(&s.block_incomparable));
    record.value("block_standard", format_rational(&s.block_standard));
    record.value("bound", format_rational(&s.bound));
    record.check("left", s.left_holds);
    record.check("domination", s.domination_holds);
    record.check("index_equality", s.index_equality_holds);
    record.check("right", s.right_holds);
    let block_vector = seq.combine(coeffs)?;
    record.check(
        "bracketing",
        block_vector.sup() <= s.block_incomparable
            && s.block_standard <= block_vector.l1(),
    );
    Ok(())
}

/// Block-domination lemma and the 18-equivalence chain on seeded trees,
/// normalized incomparable block sequences and coefficients.
pub fn run_tsirelson_suite(cases: u64, seed: u64) -> ExperimentReport {
    let parameters = params_map(&[("cases", cases.to_string()), ("seed", seed.to_string())]);
    run_cases("tsirelson", parameters, cases, |id| {
        let mut rng = case_rng(seed, id, 4);
        let mut record = CaseRecord::new(id);
        // redraw until the tree has room for two incomparable blocks
        let tree = loop {
            let t = random_tree(rng.gen(), 30, 4).expect("positive size");
            if t.leaves().len() >= 2 {
                break Arc::new(t);
            }
        };
        let leaves = tree.leaves().len();
        let count = rng.gen_range(2..=leaves.min(4));
        let max_extra = if count <= 3 { 2 } else { 1 };
        let ctx = NormContext::new(NormKind::Tsirelson(TsirelsonVariant::Incomparable), tree.clone())
            .expect("nonempty tree");
        let blocks = generate_incomparable_blocks_with(&tree, count, rng.gen(), &ctx, max_extra);
        // comparable magnitudes, so that families beat the largest coefficient
        let coeffs: Vec<Rational> = (0..count)
            .map(|_| {
                let sign = if rng.gen_bool(0.5) { -1 } else { 1 };
                crate::vector::rat(sign * rng.gen_range(3..=6), 6)
            })
            .collect();
        let bundle = ReplayBundle::Tsirelson {
            tree: tree_paths(&tree),
            blocks: blocks
                .as_ref()
                .map(|s| s.blocks().iter().map(entry_list).collect())
                .unwrap_or_default(),
            windows: blocks
                .as_ref()
                .map(|s| s.windows().iter().map(|w| (w.start.to_string(), w.end.to_string())).collect())
                .unwrap_or_default(),
            coeffs: coeffs.iter().map(format_rational).collect(),
        };
        let outcome = blocks.and_then(|seq| block_case(&tree, &seq, &coeffs, &mut record));
        finish(&mut record, outcome);
        (bundle, record)
    })
}

fn hi_case(tree: &FiniteTree, m: u64, n: usize, record: &mut CaseRecord) -> Result<()> {
    let (row, functional) = strict_singularity_witness(tree, n, m)?;
    record.value("m", &row.m);
    record.value("n", &row.n);
    record.value("ground", format_rational(&row.ground));
    record.value("lower", format_rational(&row.lower));
    record.value("upper", format_rational(&row.upper));
    record.value("ratio", format_rational(&row.ratio));
    record.check("ratio_law", row.satisfies_ratio_law());
    record.check("bracketing", row.ground <= row.lower && row.lower <= row.upper);
    let replayed = crate::hi::Functional::from_provenance(tree, functional.provenance.clone())?;
    record.check("witness_replays", replayed.entries == functional.entries);
    Ok(())
}

/// Strict-singularity rows for each `(m, n)` on a star with enough leaves.
pub fn run_hi_suite(pairs: &[(u64, usize)]) -> ExperimentReport {
    let width = pairs.iter().map(|&(_, n)| n).max().unwrap_or(1).max(1);
    let tree = star_tree(width, 4).expect("positive width");
    let label: Vec<String> = pairs.iter().map(|(m, n)| format!("{m}:{n}")).collect();
    let parameters = params_map(&[("pairs", label.join(","))]);
    let pairs = pairs.to_vec();
    run_cases("hi", parameters, pairs.len() as u64, |id| {
        let (m, n) = pairs[id as usize];
        let bundle = ReplayBundle::Hi {
            tree: tree_paths(&tree),
            m,
            n,
        };
        let mut record = CaseRecord::new(id);
        let outcome = hi_case(&tree, m, n, &mut record);
        finish(&mut record, outcome);
        (bundle, record)
    })
}

/// Whether the `ratio` values of an HI report strictly increase by case id.
pub fn ratios_strictly_increasing(report: &ExperimentReport) -> bool {
    let ratios: Option<Vec<Rational>> = report
        .cases
        .iter()
        .map(|c| c.values.get("ratio").and_then(|r| parse_rational(r).ok()))
        .collect();
    ratios.is_some_and(|r| r.windows(2).all(|w| w[0] < w[1]))
}

/// Recomputes one case from its bundle.
pub fn replay(bundle: &ReplayBundle) -> Result<CaseRecord> {
    let mut record = CaseRecord::new(0);
    let outcome = match bundle {
        ReplayBundle::Oracle { tree, entries, p, base } | ReplayBundle::Branch { tree, entries, p, base } => {
            let t = build_tree(tree);
            let x = build_vector(&t, entries)?;
            let params = BaireParams::new(Exponent::parse(p)?, BaseNorm::parse(base)?);
            if matches!(bundle, ReplayBundle::Oracle { .. }) {
                oracle_case(&x, &params, &mut record)
            } else {
                branch_case(&x, &params, &mut record)
            }
        }
        ReplayBundle::FixedPoint { tree, entries } => {
            let t = build_tree(tree);
            let x = build_vector(&t, entries)?;
            fixed_point_case(&x, &mut record)
        }
        ReplayBundle::Tsirelson {
            tree,
            blocks,
            windows,
            coeffs,
        } => {
            let t = build_tree(tree);
            let blocks = blocks
                .iter()
                .map(|b| build_vector(&t, b))
                .collect::<Result<Vec<_>>>()?;
            let windows = windows
                .iter()
                .map(|(a, b)| {
                    let parse = |s: &str| s.parse::<u128>().map_err(|_| Error::Parse(format!("bad index {s:?}")));
                    Ok(Window {
                        start: parse(a)?,
                        end: parse(b)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let coeffs = coeffs
                .iter()
                .map(|c| parse_rational(c))
                .collect::<Result<Vec<_>>>()?;
            FiniteBlockSequence::new(blocks, windows).and_then(|seq| block_case(&t, &seq, &coeffs, &mut record))
        }
        ReplayBundle::Hi { tree, m, n } => hi_case(&build_tree(tree), *m, *n, &mut record),
    };
    finish(&mut record, outcome);
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_are_reproducible() {
        let a = run_oracle_equivalence(12, 7, 6);
        let b = run_oracle_equivalence(12, 7, 6);
        assert!(a.pass);
        assert_eq!(a.to_json(), b.to_json());
        let c = run_oracle_equivalence(12, 8, 6);
        assert_ne!(a.inputs_digest, c.inputs_digest);
    }

    #[test]
    fn empty_suite_passes() {
        let r = run_tsirelson_suite(0, 1);
        assert!(r.pass);
        assert!(r.cases.is_empty());
    }

    #[test]
    fn hi_examples() {
        let r = run_hi_suite(&[(2, 4)]);
        assert!(r.pass);
        assert_eq!(r.cases[0].values["ratio"], "2");
        let r = run_hi_suite(&[(2, 4), (2, 8), (2, 16)]);
        assert!(r.pass && ratios_strictly_increasing(&r));
        let r = run_hi_suite(&[(4, 4)]);
        assert!(r.pass);
        assert_eq!(r.cases[0].values["ratio"], "1");
    }

    #[test]
    fn replay_reproduces_records() {
        let r = run_branch_isometry(6, 5, 3);
        assert!(r.pass);
        let t = Arc::new(chain_tree(3).unwrap());
        let mut x = TreeVector::zero(t.clone());
        x.set(TreeNode::root(), crate::vector::int(2)).unwrap();
        let bundle = ReplayBundle::Branch {
            tree: tree_paths(&t),
            entries: entry_list(&x),
            p: "1".into(),
            base: "l1".into(),
        };
        assert!(replay(&bundle).unwrap().pass);
        let broken = ReplayBundle::Hi {
            tree: tree_paths(&star_tree(3, 0).unwrap()),
            m: 2,
            n: 4,
        };
        let rec = replay(&broken).unwrap();
        assert!(!rec.pass && rec.error.is_some());
    }

    #[test]
    fn small_suites_pass() {
        assert!(run_tsirelson_fixed_point(10, 2, 7).pass);
        let r = run_tsirelson_suite(10, 1);
        assert!(r.pass, "{}", r.to_json());
    }
}
