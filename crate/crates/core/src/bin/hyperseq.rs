//! Command-line front end.
//!
//! Exit codes: 0 success (proof found, derivation checks, valid, countermodel
//! found, all criteria pass); 1 negative answer (unprovable-exhausted, check
//! failed, invalid, no countermodel, a criterion failed); 2 unknown (limits
//! hit); 3 internal error (self-check or cross-check failure); 64 usage or
//! parse error; 65 malformed input file; 66 unreadable input file; 73
//! unwritable output file.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hyperseq::calculus::{
    check_derivation, default_limits, search, CalculusSpec, Derivation, Limits, RuleId, SearchOutcome,
    System,
};
use hyperseq::decide::{decide, default_decide_limits, DecideSystem, Verdict};
use hyperseq::kripke::{bounded_validity, countermodels_hypersequent, BoundedVerdict, FrameClass, KripkeModel};
use hyperseq::named::named;
use hyperseq::ps4::{builtin_fig5_model, ps4_countermodel, Ps4Model};
use hyperseq::replicate::run_all;
use hyperseq::syntax::{parse_formula, parse_hypersequent, Formula, Hypersequent};
use hyperseq::transform::{eliminate_merge, invert, translate, InvertItem};

const OK: u8 = 0;
const NO: u8 = 1;
const UNKNOWN: u8 = 2;
const INTERNAL: u8 = 3;
const USAGE: u8 = 64;
const DATA: u8 = 65;
const NO_INPUT: u8 = 66;
const CANT_CREATE: u8 = 73;

#[derive(Parser)]
#[command(name = "hyperseq", version, about = "Relational hypersequent calculi for modal logics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a hypersequent and print it in canonical form.
    Parse {
        goal: String,
        /// Print the JSON encoding instead.
        #[arg(long)]
        json: bool,
    },
    /// Cut-free proof search (or the decision procedure with --cut).
    Prove {
        goal: String,
        #[arg(long, default_value = "rk")]
        system: String,
        /// Allow Cut; only RK4 and RS4, which go through `decide`.
        #[arg(long)]
        cut: bool,
        #[arg(long)]
        max_components: Option<usize>,
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(long)]
        max_states: Option<usize>,
        /// Write the derivation here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Check a derivation file.
    Check {
        file: PathBuf,
        #[arg(long, default_value = "rk")]
        system: String,
        #[arg(long)]
        cut: bool,
        /// Extra rules, comma separated (e.g. Merge).
        #[arg(long, value_delimiter = ',')]
        rules: Vec<String>,
    },
    /// Look for a branch countermodel.
    Countermodel {
        goal: String,
        #[arg(long, value_enum, default_value_t = Semantics::Kripke)]
        semantics: Semantics,
        /// Model file; without it Kripke models are enumerated and PS4 uses
        /// the builtin six-point model.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Frame class for enumeration.
        #[arg(long, default_value = "K")]
        class: String,
        /// Largest number of worlds for enumeration.
        #[arg(long, default_value_t = 4)]
        bound: usize,
    },
    /// Decide validity over K4 or S4 frames.
    Decide {
        goal: String,
        #[arg(long, default_value = "rs4cut")]
        system: String,
        /// Cross-check the verdict against Kripke enumeration up to n worlds.
        #[arg(long, value_name = "N")]
        bound_check: Option<usize>,
        #[arg(long)]
        emit_model: Option<PathBuf>,
        #[arg(long)]
        emit_certificate: Option<PathBuf>,
    },
    /// Print the formula translation of a hypersequent.
    Translate { goal: String },
    /// Remove a Merge of components i and i+1 from an RTB derivation.
    MergeEliminate {
        file: PathBuf,
        #[arg(long)]
        component: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Invert a logical rule in a derivation (items 1-4: or, and, neg, box).
    Invert {
        file: PathBuf,
        #[arg(long)]
        system: String,
        #[arg(long)]
        item: u8,
        #[arg(long)]
        component: usize,
        #[arg(long)]
        formula: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run every acceptance check and print one JSON report.
    Replicate {
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Semantics {
    Kripke,
    Ps4,
}

struct Fail(u8, String);

type Run = Result<u8, Fail>;

fn usage(msg: impl Into<String>) -> Fail {
    Fail(USAGE, msg.into())
}

fn goal(text: &str) -> Result<Hypersequent, Fail> {
    if let Some(h) = named(text) {
        return Ok(h);
    }
    parse_hypersequent(text).map_err(|e| usage(format!("parse error: {e}")))
}

fn formula(text: &str) -> Result<Formula, Fail> {
    parse_formula(text).map_err(|e| usage(format!("parse error: {e}")))
}

fn system(name: &str) -> Result<System, Fail> {
    name.parse().map_err(usage)
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail(NO_INPUT, format!("{}: {e}", path.display())))
}

fn read_derivation(path: &Path) -> Result<Derivation, Fail> {
    Derivation::from_json(&read(path)?).map_err(|e| Fail(DATA, format!("{}: {e}", path.display())))
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), Fail> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Fail(CANT_CREATE, format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    if let Some(n) = std::env::var("HYPERSEQ_JOBS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("hyperseq: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run(cmd: Command) -> Run {
    match cmd {
        Command::Parse { goal: g, json } => {
            let h = goal(&g)?;
            if json {
                println!("{}", serde_json::to_string(&h).expect("hypersequents serialize"));
            } else {
                println!("{h}");
            }
            Ok(OK)
        }
        Command::Prove {
            goal: g,
            system: s,
            cut,
            max_components,
            max_depth,
            max_states,
            output,
        } => {
            let h = goal(&g)?;
            if cut {
                let sys: DecideSystem = s
                    .parse()
                    .map_err(|_| usage(format!("--cut is only supported for RK4 and RS4, not `{s}`")))?;
                return run_decide(&h, sys, None, None, output.as_deref());
            }
            let sys = system(&s)?;
            let d = default_limits(&h);
            let limits = Limits {
                max_components: max_components.unwrap_or(d.max_components),
                max_depth: max_depth.unwrap_or(d.max_depth),
                max_states: max_states.unwrap_or(d.max_states),
            };
            let (out, stats) = search(&h, &CalculusSpec::system(sys), limits);
            eprintln!("{} ({} states)", out.label(), stats.states);
            match out {
                SearchOutcome::Proof(d) => {
                    emit(&d.to_json_pretty(), output.as_deref())?;
                    Ok(OK)
                }
                SearchOutcome::UnprovableExhausted => Ok(NO),
                SearchOutcome::UnknownLimitHit => Ok(UNKNOWN),
            }
        }
        Command::Check {
            file,
            system: s,
            cut,
            rules,
        } => {
            let mut spec = CalculusSpec::system(system(&s)?);
            if cut {
                spec = spec.with_cut();
            }
            let extra = rules
                .iter()
                .map(|r| {
                    RuleId::ALL
                        .into_iter()
                        .find(|x| x.to_string().eq_ignore_ascii_case(r))
                        .ok_or_else(|| usage(format!("unknown rule `{r}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let spec = spec.with_rules(&extra);
            let d = read_derivation(&file)?;
            match check_derivation(&d, &spec) {
                Ok(()) => {
                    println!("ok: {} ({} nodes) in {}", d.end(), d.size(), spec.name);
                    Ok(OK)
                }
                Err(e) => {
                    println!("rejected: {e}");
                    Ok(NO)
                }
            }
        }
        Command::Countermodel {
            goal: g,
            semantics,
            model,
            class,
            bound,
        } => {
            let h = goal(&g)?;
            match semantics {
                Semantics::Kripke => kripke_countermodel(&h, model.as_deref(), &class, bound),
                Semantics::Ps4 => {
                    let m = match model {
                        Some(p) => serde_json::from_str::<Ps4Model>(&read(&p)?)
                            .map_err(|e| Fail(DATA, format!("{}: {e}", p.display())))?,
                        None => builtin_fig5_model(),
                    };
                    Ok(match ps4_countermodel(&m, &h) {
                        Some(b) => {
                            println!("branch: {}", names(m.frame.names(), &b));
                            OK
                        }
                        None => {
                            println!("no countermodel");
                            NO
                        }
                    })
                }
            }
        }
        Command::Decide {
            goal: g,
            system: s,
            bound_check,
            emit_model,
            emit_certificate,
        } => {
            let h = goal(&g)?;
            let sys: DecideSystem = s.parse().map_err(usage)?;
            let code = run_decide(&h, sys, emit_model.as_deref(), emit_certificate.as_deref(), None)?;
            if let Some(n) = bound_check {
                let b = bounded_validity(&h, sys.frame_class(), n);
                let agrees = code != OK || b.is_valid();
                println!(
                    "bound check ({} worlds): {}",
                    n,
                    if b.is_valid() { "no countermodel" } else { "countermodel" }
                );
                if !agrees {
                    return Err(Fail(INTERNAL, "valid verdict contradicted by a bounded countermodel".into()));
                }
            }
            Ok(code)
        }
        Command::Translate { goal: g } => {
            let h = goal(&g)?;
            let t = translate(&h).map_err(|e| usage(e.to_string()))?;
            for line in &t.trace {
                eprintln!("{line}");
            }
            println!("{}", t.formula);
            Ok(OK)
        }
        Command::MergeEliminate { file, component, output } => {
            let d = read_derivation(&file)?;
            let e = eliminate_merge(&d, component).map_err(|e| Fail(NO, e.to_string()))?;
            emit(&e.to_json_pretty(), output.as_deref())?;
            Ok(OK)
        }
        Command::Invert {
            file,
            system: s,
            item,
            component,
            formula: f,
            output,
        } => {
            let spec = CalculusSpec::system(system(&s)?);
            let item = InvertItem::from_number(item).ok_or_else(|| usage("--item must be 1, 2, 3 or 4"))?;
            let f = formula(&f)?;
            let d = read_derivation(&file)?;
            let e = invert(&d, &spec, item, component, &f).map_err(|e| Fail(NO, e.to_string()))?;
            emit(&e.to_json_pretty(), output.as_deref())?;
            Ok(OK)
        }
        Command::Replicate { output } => {
            let report = run_all();
            for e in &report.entries {
                eprintln!(
                    "[{}] {:>2} {} {:.2}s",
                    if e.passed { "PASS" } else { "FAIL" },
                    e.criterion,
                    e.claim,
                    e.wall_seconds
                );
            }
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            emit(&text, output.as_deref())?;
            Ok(if report.passed { OK } else { NO })
        }
    }
}

fn names(all: &[String], branch: &[usize]) -> String {
    let v: Vec<&str> = branch.iter().map(|&w| all[w].as_str()).collect();
    format!("({})", v.join(","))
}

fn kripke_countermodel(h: &Hypersequent, model: Option<&Path>, class: &str, bound: usize) -> Run {
    if let Some(p) = model {
        let m: KripkeModel =
            serde_json::from_str(&read(p)?).map_err(|e| Fail(DATA, format!("{}: {e}", p.display())))?;
        let b = countermodels_hypersequent(&m, h).map_err(|e| Fail(DATA, e.to_string()))?;
        return Ok(match b {
            Some(b) => {
                println!("branch: {}", names(m.frame.names(), &b));
                OK
            }
            None => {
                println!("no countermodel");
                NO
            }
        });
    }
    let class: FrameClass = class.parse().map_err(usage)?;
    match bounded_validity(h, class, bound) {
        BoundedVerdict::Countermodel { model, branch } => {
            println!("branch: {}", names(model.frame.names(), &branch));
            println!("{}", serde_json::to_string_pretty(&model).expect("models serialize"));
            Ok(OK)
        }
        BoundedVerdict::NoCountermodelUpToBound { frames, models } => {
            println!("no countermodel up to {bound} worlds ({frames} frames, {models} models)");
            Ok(NO)
        }
    }
}

fn run_decide(
    h: &Hypersequent,
    sys: DecideSystem,
    emit_model: Option<&Path>,
    emit_certificate: Option<&Path>,
    derivation_out: Option<&Path>,
) -> Run {
    let (v, stats) = decide(h, sys, default_decide_limits(h)).map_err(|e| Fail(INTERNAL, e.to_string()))?;
    println!("{} ({} states)", v.label(), stats.states);
    match v {
        Verdict::Valid(d) => {
            if let Some(p) = emit_certificate {
                emit(&d.to_json_pretty(), Some(p))?;
            }
            if let Some(p) = derivation_out {
                emit(&d.to_json_pretty(), Some(p))?;
            }
            Ok(OK)
        }
        Verdict::Invalid { model, branch } => {
            println!("branch: {}", names(model.frame.names(), &branch));
            let text = serde_json::to_string_pretty(&model).expect("models serialize");
            match emit_model {
                Some(p) => emit(&text, Some(p))?,
                None => println!("{text}"),
            }
            Ok(NO)
        }
        Verdict::Unknown => Ok(UNKNOWN),
    }
}
