//! Command-line front end. [`run`] parses arguments, dispatches and returns the
//! process exit code: 0 on success, 1 when a verification fails, 2 on bad input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::baire::{baire_norm_oracle, baire_norm_with_witness, family_nodes, BaireParams, Exponent, ORACLE_CAP};
use crate::error::{Error, Result};
use crate::hi::{dg_lower_bound, dg_upper_bound, ground_norm, schedule, singularity_table, OpPair};
use crate::io::{parse_tree, parse_vector, tree_to_json, vector_to_json};
use crate::tree::{chain_tree, comb_tree, random_tree, rank, star_tree, FiniteTree};
use crate::tsirelson::{tsirelson_iterate_with_witness, tsirelson_norm_with_witness, TsirelsonVariant};
use crate::vector::{format_rational, BaseNorm, NormValue, TreeVector};
use crate::verify::{self, ExperimentReport, ReplayBundle};

#[derive(Parser, Debug)]
#[command(name = "baire-lab", version, about = "Exact tree-indexed norms and seeded verification suites")]
struct Cli {
    /// Emit JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// l_p-Baire sum of a base norm.
    Baire(BaireArgs),
    /// Parametrized Tsirelson norm with its derivation.
    Tsirelson(TsirelsonArgs),
    /// Largest absolute chain sum.
    Ground(VectorInput),
    /// Norming-set bounds and the (m_j, n_j) schedule.
    Hi {
        #[command(subcommand)]
        command: HiCommand,
    },
    /// Rank of a tree.
    Rank {
        #[arg(long)]
        tree: PathBuf,
    },
    /// Generate trees and vectors as JSON.
    Gen {
        #[command(subcommand)]
        command: GenCommand,
    },
    /// Run a verification suite or replay a failing case.
    Verify {
        #[command(subcommand)]
        command: VerifyCommand,
    },
}

#[derive(Args, Debug)]
struct VectorInput {
    #[arg(long)]
    tree: PathBuf,
    #[arg(long)]
    vector: PathBuf,
}

#[derive(Args, Debug)]
struct BaireArgs {
    #[command(flatten)]
    input: VectorInput,
    /// `0` for the single-segment variant, otherwise a rational p >= 1.
    #[arg(long, default_value = "1")]
    p: String,
    /// `l1`, `l<q>` with rational q >= 1, or `sup`.
    #[arg(long, default_value = "l1")]
    base: String,
    /// Also evaluate by brute-force family enumeration.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args, Debug)]
struct TsirelsonArgs {
    #[command(flatten)]
    input: VectorInput,
    #[arg(long, default_value = "incomparable")]
    variant: String,
    /// Evaluate the m-th iterate instead of the fixed point.
    #[arg(long)]
    iterate: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum HiCommand {
    /// Strict-singularity table (CSV unless --json).
    Witness {
        #[arg(long)]
        tree: PathBuf,
        /// Comma-separated m:n pairs.
        #[arg(long, default_value = "2:4,2:8,2:16,4:64")]
        pairs: String,
    },
    /// The (m_j, n_j) schedule as decimal strings.
    Schedule {
        #[arg(long, default_value_t = 3)]
        jmax: usize,
    },
    /// Lower and upper bounds with the witness functional.
    Bounds {
        #[command(flatten)]
        input: VectorInput,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value = "2:4")]
        ops: String,
    },
}

#[derive(Subcommand, Debug)]
enum GenCommand {
    Chain {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Star {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        offset: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Comb {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        max_nodes: usize,
        #[arg(long, default_value_t = 3)]
        max_branch: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random rational coefficients on a given tree.
    Vector {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of support nodes (capped by the tree size).
        #[arg(long, default_value_t = 6)]
        support: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct SuiteArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    cases: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Chain-supported vectors against the plain base norm.
    Branch {
        #[command(flatten)]
        suite: SuiteArgs,
        #[arg(long, default_value_t = 20)]
        max_len: usize,
    },
    /// Block domination and the 18-equivalence chain.
    Tsirelson {
        #[command(flatten)]
        suite: SuiteArgs,
    },
    /// Implicit equation and iterate stabilization.
    FixedPoint {
        #[command(flatten)]
        suite: SuiteArgs,
        #[arg(long, default_value_t = 12)]
        max_support: usize,
    },
    /// Dynamic program against brute-force family enumeration.
    Oracle {
        #[command(flatten)]
        suite: SuiteArgs,
        #[arg(long, default_value_t = 8)]
        max_support: usize,
    },
    /// Strict-singularity ratio law.
    Hi {
        #[arg(long, default_value = "2:4,2:8,2:16,4:64")]
        pairs: String,
        /// Accepted for a uniform interface; the suite draws no random inputs.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Use only the first N pairs.
        #[arg(long)]
        cases: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute a case from a replay bundle.
    Replay {
        #[arg(long)]
        bundle: PathBuf,
    },
}

enum Outcome {
    Ok,
    Failed,
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::Failed) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_tree(path: &Path) -> Result<Arc<FiniteTree>> {
    let parsed = parse_tree(&read(path)?)?;
    if parsed.closure_added {
        eprintln!("note: prefix closure added nodes to {}", path.display());
    }
    Ok(Arc::new(parsed.tree))
}

fn load_vector(input: &VectorInput) -> Result<TreeVector> {
    let tree = load_tree(&input.tree)?;
    parse_vector(&read(&input.vector)?, tree)
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| Error::Parse(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{text}");
            Ok(())
        }
    }
}

fn norm_json(v: &NormValue) -> Value {
    match &v.exact {
        Some(x) => Value::String(format_rational(x)),
        None => json!({"lower": format_rational(&v.lower), "upper": format_rational(&v.upper)}),
    }
}

fn table(rows: &[(String, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:<width$}  {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn node_list(nodes: &[crate::tree::TreeNode]) -> String {
    nodes.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Baire(args) => {
            let x = load_vector(&args.input)?;
            let params = BaireParams::new(Exponent::parse(&args.p)?, BaseNorm::parse(&args.base)?);
            let r = baire_norm_with_witness(&x, &params)?;
            let oracle = if args.oracle {
                Some(baire_norm_oracle(&x, &params, ORACLE_CAP)?)
            } else {
                None
            };
            if cli.json {
                let mut out = json!({
                    "value": norm_json(&r.value),
                    "family": family_nodes(&r.family).iter()
                        .map(|s| s.iter().map(|n| n.path().to_vec()).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                });
                if let Some(o) = &oracle {
                    out["oracle"] = norm_json(&o.value);
                }
                emit(None, &out.to_string())?;
            } else {
                let mut rows = vec![("value".to_string(), r.value.to_string())];
                for (i, s) in r.family.iter().enumerate() {
                    rows.push((format!("segment {i}"), node_list(s.nodes())));
                }
                if let Some(o) = &oracle {
                    rows.push(("oracle".into(), o.value.to_string()));
                }
                emit(None, &table(&rows))?;
            }
            if let Some(o) = oracle {
                if !o.value.agrees_with(&r.value) {
                    eprintln!("oracle disagrees: {} vs {}", o.value, r.value);
                    return Ok(Outcome::Failed);
                }
            }
        }
        Command::Tsirelson(args) => {
            let x = load_vector(&args.input)?;
            let variant = TsirelsonVariant::parse(&args.variant)?;
            let r = match args.iterate {
                Some(m) => tsirelson_iterate_with_witness(&x, variant, m)?,
                None => tsirelson_norm_with_witness(&x, variant)?,
            };
            if cli.json {
                let out = json!({
                    "value": format_rational(&r.value),
                    "witness_family_tree": serde_json::to_value(&r.witness).expect("derivation serializes"),
                });
                emit(None, &out.to_string())?;
            } else {
                emit(
                    None,
                    &table(&[
                        ("value".into(), r.value.to_string()),
                        ("variant".into(), variant.to_string()),
                        ("witness depth".into(), r.witness.depth().to_string()),
                    ]),
                )?;
            }
        }
        Command::Ground(input) => {
            let x = load_vector(input)?;
            let g = ground_norm(&x)?;
            if cli.json {
                emit(None, &json!({"value": format_rational(&g)}).to_string())?;
            } else {
                emit(None, &g.to_string())?;
            }
        }
        Command::Hi { command } => return hi(cli.json, command),
        Command::Rank { tree } => {
            let t = load_tree(tree)?;
            let r = rank(&t)?;
            if cli.json {
                emit(None, &json!({"rank": r}).to_string())?;
            } else {
                emit(None, &r.to_string())?;
            }
        }
        Command::Gen { command } => gen(command)?,
        Command::Verify { command } => return verify_command(cli.json, command),
    }
    Ok(Outcome::Ok)
}

fn small_pairs(text: &str) -> Result<Vec<(u64, usize)>> {
    OpPair::parse_list(text)?
        .into_iter()
        .map(|op| {
            let m = u64::try_from(&op.m).map_err(|_| Error::InvalidOperation(format!("m = {} is too large", op.m)))?;
            let n = usize::try_from(&op.n).map_err(|_| Error::InvalidOperation(format!("n = {} is too large", op.n)))?;
            Ok((m, n))
        })
        .collect()
}

fn hi(as_json: bool, command: &HiCommand) -> Result<Outcome> {
    match command {
        HiCommand::Witness { tree, pairs } => {
            let t = load_tree(tree)?;
            let pairs = small_pairs(pairs)?;
            let rows = singularity_table(&t, &pairs)?;
            if as_json {
                emit(None, &serde_json::to_string(&rows).expect("rows serialize"))?;
            } else {
                let mut lines = vec!["m,n,ground,lower,upper,ratio".to_string()];
                for r in &rows {
                    lines.push(format!(
                        "{},{},{},{},{},{}",
                        r.m,
                        r.n,
                        format_rational(&r.ground),
                        format_rational(&r.lower),
                        format_rational(&r.upper),
                        format_rational(&r.ratio)
                    ));
                }
                emit(None, &lines.join("\n"))?;
            }
            if rows.iter().any(|r| !r.satisfies_ratio_law()) {
                return Ok(Outcome::Failed);
            }
        }
        HiCommand::Schedule { jmax } => {
            let s = schedule(*jmax)?;
            emit(None, &serde_json::to_string(&s).expect("schedule serializes"))?;
        }
        HiCommand::Bounds { input, depth, ops } => {
            let x = load_vector(input)?;
            let ops = OpPair::parse_list(ops)?;
            if ops.is_empty() {
                return Err(Error::InvalidOperation("no operations given".into()));
            }
            let g = ground_norm(&x)?;
            let lb = dg_lower_bound(&x, *depth, &ops)?;
            let up = dg_upper_bound(&x);
            if as_json {
                let out = json!({
                    "ground": format_rational(&g),
                    "lower": format_rational(&lb.value),
                    "upper": format_rational(&up),
                    "functional": serde_json::to_value(&lb.functional.provenance).expect("provenance serializes"),
                });
                emit(None, &out.to_string())?;
            } else {
                emit(
                    None,
                    &table(&[
                        ("ground".into(), g.to_string()),
                        ("lower".into(), lb.value.to_string()),
                        ("upper".into(), up.to_string()),
                        ("operation depth".into(), lb.functional.provenance.op_depth().to_string()),
                    ]),
                )?;
            }
        }
    }
    Ok(Outcome::Ok)
}

fn gen(command: &GenCommand) -> Result<()> {
    let (tree, out) = match command {
        GenCommand::Chain { n, out } => (chain_tree(*n)?, out),
        GenCommand::Star { n, offset, out } => (star_tree(*n, *offset)?, out),
        GenCommand::Comb { n, out } => (comb_tree(*n)?, out),
        GenCommand::Random {
            seed,
            max_nodes,
            max_branch,
            out,
        } => (random_tree(*seed, *max_nodes, *max_branch)?, out),
        GenCommand::Vector {
            tree,
            seed,
            support,
            out,
        } => {
            let t = load_tree(tree)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let nodes: Vec<_> = t.iter().cloned().collect();
            let k = (*support).min(nodes.len());
            let picked = rand::seq::index::sample(&mut rng, nodes.len(), k).into_vec();
            let mut x = TreeVector::zero(t.clone());
            for i in picked {
                let c = crate::sequence::random_coefficient(&mut rng);
                x.set(nodes[i].clone(), c)?;
            }
            return emit(out.as_ref(), &vector_to_json(&x));
        }
    };
    emit(out.as_ref(), &tree_to_json(&tree))
}

fn report_outcome(as_json: bool, report: &ExperimentReport, out: Option<&PathBuf>) -> Result<Outcome> {
    if let Some(path) = out {
        emit(Some(path), &report.to_json())?;
    }
    if as_json && out.is_none() {
        emit(None, &report.to_json())?;
    } else {
        let failed = report.failures().count();
        emit(
            None,
            &table(&[
                ("experiment".into(), report.experiment.clone()),
                ("cases".into(), report.cases.len().to_string()),
                ("failed".into(), failed.to_string()),
                ("digest".into(), report.inputs_digest.clone()),
                ("result".into(), if report.pass { "pass".into() } else { "FAIL".into() }),
            ]),
        )?;
    }
    eprintln!("wall time: {:.3}s", report.wall_time.as_secs_f64());
    Ok(if report.pass { Outcome::Ok } else { Outcome::Failed })
}

fn verify_command(as_json: bool, command: &VerifyCommand) -> Result<Outcome> {
    match command {
        VerifyCommand::Branch { suite, max_len } => {
            if *max_len == 0 {
                return Err(Error::Precondition("max-len must be at least 1".into()));
            }
            let r = verify::run_branch_isometry(*max_len, suite.cases, suite.seed);
            report_outcome(as_json, &r, suite.out.as_ref())
        }
        VerifyCommand::Tsirelson { suite } => {
            let r = verify::run_tsirelson_suite(suite.cases, suite.seed);
            report_outcome(as_json, &r, suite.out.as_ref())
        }
        VerifyCommand::FixedPoint { suite, max_support } => {
            let r = verify::run_tsirelson_fixed_point(suite.cases, suite.seed, *max_support);
            report_outcome(as_json, &r, suite.out.as_ref())
        }
        VerifyCommand::Oracle { suite, max_support } => {
            if *max_support > ORACLE_CAP {
                return Err(Error::OracleCapExceeded {
                    size: *max_support,
                    cap: ORACLE_CAP,
                });
            }
            let r = verify::run_oracle_equivalence(suite.cases, suite.seed, *max_support);
            report_outcome(as_json, &r, suite.out.as_ref())
        }
        VerifyCommand::Hi { pairs, cases, out, .. } => {
            let mut pairs = small_pairs(pairs)?;
            if let Some(n) = cases {
                pairs.truncate(usize::try_from(*n).unwrap_or(usize::MAX));
            }
            if pairs.is_empty() {
                return Err(Error::Precondition("pairs must be nonempty".into()));
            }
            let r = verify::run_hi_suite(&pairs);
            report_outcome(as_json, &r, out.as_ref())
        }
        VerifyCommand::Replay { bundle } => {
            let text = read(bundle)?;
            let value: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bundle json: {e}")))?;
            // accept a bare bundle or a case record carrying one
            let raw = value.get("replay").cloned().unwrap_or(value);
            let b: ReplayBundle = serde_json::from_value(raw).map_err(|e| Error::Parse(format!("bundle: {e}")))?;
            let record = verify::replay(&b)?;
            let text = serde_json::to_string_pretty(&record).expect("record serializes");
            if as_json {
                emit(None, &text)?;
            } else {
                let mut rows: Vec<(String, String)> = record
                    .checks
                    .iter()
                    .map(|(k, v)| (k.clone(), if *v { "pass".into() } else { "FAIL".into() }))
                    .collect();
                if let Some(e) = &record.error {
                    rows.push(("error".into(), e.clone()));
                }
                emit(None, &table(&rows))?;
            }
            Ok(if record.pass { Outcome::Ok } else { Outcome::Failed })
        }
    }
}
