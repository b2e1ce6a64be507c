//! `toricbk` command-line tool.
//!
//! Exit codes: 0 yes/valid, 1 invalid input, 2 unreadable or malformed input,
//! 3 no, 4 undetermined.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use toricbk::analysis::{aut_report, decide_reduction_sl, decide_reduction_sp, decide_split, reduce_to_levi, SpSearch, Verdict};
use toricbk::building::GroupSpec;
use toricbk::field::parse_rational;
use toricbk::helly::{HellySearch, HellyWitness, WitnessSearch, DEFAULT_BUDGET};
use toricbk::json::{
    flag_from_doc, flag_value, frame_value, labeled_flag_value, matrix_value, parse_flag, parse_klyachko, parse_plmap,
    plmap_value, to_canonical_string, vector_value,
};
use toricbk::plmap::PLMap;
use toricbk::{Error, Field, Fp, Rational, F2, F3, F5, F7};

const EXIT_YES: u8 = 0;
const EXIT_INVALID: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_NO: u8 = 3;
const EXIT_UNDETERMINED: u8 = 4;

#[derive(Parser)]
#[command(name = "toricbk", version, about = "Toric principal bundles through piecewise-linear maps into buildings")]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Seed for every randomized phase.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Search budget; defaults to TORICBK_BUDGET or the built-in value.
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a PL map: fan, integrality, group conditions, agreement on shared faces.
    Validate { plmap: PathBuf },
    /// Decide whether the bundle splits equivariantly.
    Split { plmap: PathBuf },
    /// Decide reduction of structure group.
    Reduce {
        plmap: PathBuf,
        #[arg(long, value_enum)]
        target: Target,
        /// Flag file for the Levi target.
        #[arg(long)]
        flag: Option<PathBuf>,
    },
    /// Lie algebra dimension of the equivariant automorphism group.
    Aut { plmap: PathBuf },
    /// Evaluate at a point given as comma-separated rationals.
    Eval {
        plmap: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Build a PL map from ray flags.
    Klyachko { data: PathBuf },
    /// Helly number searches over a prime field.
    Helly(HellyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Sl,
    Sp,
    Torus,
    Levi,
}

#[derive(Clone, Copy, ValueEnum)]
enum HellyMode {
    Search,
    Verify,
    Bounds,
}

#[derive(Args)]
struct HellyArgs {
    #[arg(value_enum)]
    mode: HellyMode,
    #[arg(long, default_value = "GL")]
    group: String,
    /// Matrix size (2r for Sp(2r)).
    #[arg(long)]
    size: usize,
    #[arg(long)]
    prime: u32,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    family_size: Option<usize>,
    #[arg(long)]
    max_family: Option<usize>,
}

struct Outcome {
    code: u8,
    report: Value,
}

impl Outcome {
    fn new(code: u8, report: Value) -> Self {
        Outcome { code, report }
    }
}

fn error_outcome(e: &Error) -> Outcome {
    let code = match e {
        Error::Parse(_) => EXIT_PARSE,
        _ => EXIT_INVALID,
    };
    Outcome::new(code, json!({ "verdict": "error", "diagnostics": [e.to_string()] }))
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_plmap(path: &Path) -> Result<PLMap<Rational>, Error> {
    parse_plmap(&read(path)?)?.to_plmap()
}

/// Loads and validates; invalid maps end the command with exit code 1.
fn load_valid(path: &Path) -> Result<Result<PLMap<Rational>, Outcome>, Error> {
    let p = load_plmap(path)?;
    Ok(match p.validate()? {
        Ok(()) => Ok(p),
        Err(d) => Err(Outcome::new(
            EXIT_INVALID,
            json!({ "verdict": "invalid", "diagnostics": d.iter().map(|x| x.to_string()).collect::<Vec<_>>() }),
        )),
    })
}

fn verdict_outcome<T>(v: &Verdict<T>, witness: impl FnOnce(&T) -> Value) -> Outcome {
    match v {
        Verdict::Yes(t) => Outcome::new(EXIT_YES, json!({ "verdict": "yes", "witness": witness(t), "diagnostics": [] })),
        Verdict::No(r) => Outcome::new(EXIT_NO, json!({ "verdict": "no", "witness": null, "diagnostics": [r] })),
        Verdict::Undetermined(r) => {
            Outcome::new(EXIT_UNDETERMINED, json!({ "verdict": "undetermined", "witness": null, "diagnostics": [r] }))
        }
    }
}

fn run(cli: &Cli, budget: usize) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Validate { plmap } => Ok(match load_valid(plmap)? {
            Ok(_) => Outcome::new(EXIT_YES, json!({ "verdict": "valid", "diagnostics": [] })),
            Err(o) => o,
        }),
        Command::Split { plmap } => {
            let p = match load_valid(plmap)? {
                Ok(p) => p,
                Err(o) => return Ok(o),
            };
            Ok(verdict_outcome(&decide_split(&p)?, |f| frame_value(f)))
        }
        Command::Reduce { plmap, target, flag } => {
            let p = match load_valid(plmap)? {
                Ok(p) => p,
                Err(o) => return Ok(o),
            };
            match target {
                Target::Sl => {
                    let ok = decide_reduction_sl(&p)?;
                    let v = if ok { Verdict::Yes(()) } else { Verdict::No("weights do not sum to zero".into()) };
                    Ok(verdict_outcome(&v, |_| Value::Null))
                }
                Target::Torus => Ok(verdict_outcome(&decide_split(&p)?, |f| frame_value(f))),
                Target::Sp => {
                    let search = SpSearch { seed: cli.seed, grid_budget: budget, ..SpSearch::default() };
                    let v = decide_reduction_sp(&p, &search)?;
                    Ok(verdict_outcome(&v, |c| {
                        json!({ "form": matrix_value(&c.form.gram().row_vectors()), "plmap": plmap_value(&c.map) })
                    }))
                }
                Target::Levi => {
                    let path = flag.as_ref().ok_or_else(|| Error::Precondition("--flag is required for levi".into()))?;
                    let doc = parse_flag(&read(path)?)?;
                    let f0 = flag_from_doc::<Rational>(p.group().size(), &doc.flag)?;
                    let v = match reduce_to_levi(&p, &f0) {
                        Ok(blocks) => Verdict::Yes(blocks),
                        Err(Error::Precondition(r)) => Verdict::No(r),
                        Err(e) => return Err(e),
                    };
                    Ok(verdict_outcome(&v, |blocks| {
                        json!({ "flag": flag_value(&f0), "blocks": blocks.iter().map(plmap_value).collect::<Vec<_>>() })
                    }))
                }
            }
        }
        Command::Aut { plmap } => {
            let p = match load_valid(plmap)? {
                Ok(p) => p,
                Err(o) => return Ok(o),
            };
            let a = aut_report(&p)?;
            let constraints: Vec<Value> = a
                .constraints
                .iter()
                .map(|c| {
                    json!({
                        "ray": c.ray,
                        "frame": frame_value(&c.frame),
                        "weights": vector_value(&c.weights),
                        "forbidden": c.forbidden,
                    })
                })
                .collect();
            let agree = a.dimension == a.dimension_by_intersection;
            let diagnostics: Vec<String> = if agree {
                Vec::new()
            } else {
                vec![format!("assembly paths disagree: {} vs {}", a.dimension, a.dimension_by_intersection)]
            };
            Ok(Outcome::new(
                if agree { EXIT_YES } else { EXIT_UNDETERMINED },
                json!({
                    "verdict": if agree { "yes" } else { "undetermined" },
                    "witness": {
                        "dimension": a.dimension,
                        "dimension_by_intersection": a.dimension_by_intersection,
                        "constraints": constraints,
                        "ray_flags": a.ray_flags.iter().map(flag_value).collect::<Vec<_>>(),
                    },
                    "diagnostics": diagnostics,
                }),
            ))
        }
        Command::Eval { plmap, point } => {
            let p = match load_valid(plmap)? {
                Ok(p) => p,
                Err(o) => return Ok(o),
            };
            let v = point
                .split(',')
                .map(|s| parse_rational(s.trim()).ok_or_else(|| Error::Parse(format!("bad coordinate {s:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let lf = p.eval(&v)?;
            Ok(Outcome::new(EXIT_YES, json!({ "verdict": "yes", "witness": labeled_flag_value(&lf), "diagnostics": [] })))
        }
        Command::Klyachko { data } => {
            let k = parse_klyachko(&read(data)?)?.to_data()?;
            match PLMap::from_klyachko(&k) {
                Ok(p) => Ok(Outcome::new(EXIT_YES, plmap_value(&p))),
                Err(e @ Error::Incompatible { .. }) => {
                    Ok(Outcome::new(EXIT_NO, json!({ "verdict": "no", "witness": null, "diagnostics": [e.to_string()] })))
                }
                Err(e) => Err(e),
            }
        }
        Command::Helly(args) => match args.prime {
            2 => helly::<F2>(args, budget, cli.seed),
            3 => helly::<F3>(args, budget, cli.seed),
            5 => helly::<F5>(args, budget, cli.seed),
            7 => helly::<F7>(args, budget, cli.seed),
            11 => helly::<Fp<11>>(args, budget, cli.seed),
            13 => helly::<Fp<13>>(args, budget, cli.seed),
            p => Err(Error::Precondition(format!("prime {p} is not supported (use 2, 3, 5, 7, 11 or 13)"))),
        },
    }
}

fn witness_value<F: Field>(w: &HellyWitness<F>, setup: &Value, seed: u64) -> Value {
    json!({
        "setup": setup,
        "k": w.k,
        "flags": w.flags.iter().map(flag_value).collect::<Vec<_>>(),
        "subset_frames": w.subset_frames.iter().map(frame_value).collect::<Vec<_>>(),
        "refutation": w.refutation,
        "seed": seed,
    })
}

fn helly<F: Field>(args: &HellyArgs, budget: usize, seed: u64) -> Result<Outcome, Error> {
    let group = GroupSpec::<F>::new(args.group.parse()?, args.size)?;
    let setup = json!({ "group": group.kind().to_string(), "size": args.size, "prime": args.prime });
    let search = HellySearch::new(group, budget)?;
    let need_k = || args.k.ok_or_else(|| Error::Precondition("--k is required".into()));
    match args.mode {
        HellyMode::Search => {
            let k = need_k()?;
            let size = args.family_size.unwrap_or(k + 1);
            Ok(match search.find_witness(k, size, budget, seed)? {
                WitnessSearch::Found(w) => Outcome::new(
                    EXIT_YES,
                    json!({ "verdict": "yes", "witness": witness_value(&w, &setup, seed), "diagnostics": [] }),
                ),
                WitnessSearch::NoneExists => Outcome::new(
                    EXIT_NO,
                    json!({ "verdict": "no", "witness": null, "diagnostics": ["exhaustive search found no witness"] }),
                ),
                WitnessSearch::BudgetExhausted { .. } => Outcome::new(
                    EXIT_UNDETERMINED,
                    json!({ "verdict": "undetermined", "witness": null, "diagnostics": ["budget exhausted"] }),
                ),
            })
        }
        HellyMode::Verify => {
            let k = need_k()?;
            let max_family = args.max_family.unwrap_or(k + 3);
            let r = search.verify_upper(k, max_family, budget, seed)?;
            let (code, verdict) = match (&r.counterexample, r.exhaustive) {
                (Some(_), _) => (EXIT_NO, "no"),
                (None, true) => (EXIT_YES, "yes"),
                (None, false) => (EXIT_UNDETERMINED, "undetermined"),
            };
            Ok(Outcome::new(
                code,
                json!({
                    "verdict": verdict,
                    "witness": r.counterexample.as_ref().map(|w| witness_value(w, &setup, seed)),
                    "k": k,
                    "max_family": max_family,
                    "exhaustive": r.exhaustive,
                    "checked": r.checked,
                    "diagnostics": [],
                }),
            ))
        }
        HellyMode::Bounds => {
            let b = search.helly_bounds(args.max_family, budget, seed)?;
            let upper = match (&b.upper.counterexample, b.upper.exhaustive) {
                (Some(_), _) => "counterexample".to_string(),
                (None, true) => format!("verified-to({})", b.upper.max_family),
                (None, false) => "open".to_string(),
            };
            Ok(Outcome::new(
                EXIT_YES,
                json!({
                    "verdict": "yes",
                    "lower": b.lower,
                    "upper": upper,
                    "witness": b.witness.as_ref().map(|w| witness_value(w, &setup, seed)),
                    "counterexample": b.upper.counterexample.as_ref().map(|w| witness_value(w, &setup, seed)),
                    "search_exhausted": b.search_exhausted,
                    "diagnostics": [],
                }),
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE } else { EXIT_YES });
        }
    };
    if let Some(t) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
    let env_budget = std::env::var("TORICBK_BUDGET").ok().and_then(|s| s.parse().ok());
    let budget = cli.budget.or(env_budget).unwrap_or(DEFAULT_BUDGET);
    let mut out = run(&cli, budget).unwrap_or_else(|e| error_outcome(&e));
    if let Value::Object(m) = &mut out.report {
        if m.contains_key("verdict") {
            m.insert("seed".into(), json!(cli.seed));
            m.insert("budget".into(), json!(budget));
        }
    }
    let text = to_canonical_string(&out.report);
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_INVALID);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(out.code)
}
