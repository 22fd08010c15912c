//! The `cxk` command line: proving, checking, transforming and the
//! separation matrix. Exit codes: 0 success, 1 definitive negative,
//! 2 input error, 3 resource bound.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bridge::{nd_to_sc, normalize, sc_to_nd, BridgeError};
use crate::embedding::{translate_f, EmbedError};
use crate::formula::{parse, Formula};
use crate::natded::{check_derivation, maximum_formulas, Derivation, MaxOccurrence, NdSystemId};
use crate::prover::{decide, eliminate_cut, Cell, ProverError, SearchConfig, Verdict, SEPARATION_CALCULI};
use crate::reduction::{normalize_by_reduction, reduce_step, NormalizeError, DEFAULT_MAX_STEPS};
use crate::sequent::{check_proof, parse_sequent_with, weaken_proof, CalculusId, SequentProof};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

pub const BUDGET_ENV: &str = "CXK_BUDGET";

#[derive(Parser, Debug)]
#[command(name = "cxk", version, about = "Proof kernel for connexive logics C, C3, MC and CN")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide a formula or a sequent `a, b => c`; prints the proof on success.
    Prove {
        calculus: CalculusId,
        sequent: String,
        #[command(flatten)]
        budget: Budget,
        /// Print only the verdict.
        #[arg(long)]
        quiet: bool,
    },
    /// Check a proof (sc) or derivation (nd) file.
    Check {
        kind: Kind,
        /// Calculus for `sc`, system for `nd`.
        system: String,
        /// Path, or `-` for stdin.
        file: String,
    },
    /// Translate, normalize, reduce or weaken proofs and derivations.
    Transform {
        #[command(subcommand)]
        verb: Verb,
    },
    /// Separation table for sC, sC3, sMC, sCN, one formula per input line.
    Matrix {
        file: String,
        #[command(flatten)]
        budget: Budget,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Sc,
    Nd,
}

#[derive(Args, Debug, Clone, Copy)]
struct Budget {
    /// Node budget for proof search (default from CXK_BUDGET).
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Derivation to sequent proof (may contain cuts).
    Nd2sc {
        #[arg(long)]
        system: NdSystemId,
        file: String,
    },
    /// Cut-free sequent proof to normal derivation.
    Sc2nd {
        #[arg(long)]
        calculus: CalculusId,
        file: String,
    },
    /// Normal form through the sequent calculus.
    Normalize {
        #[arg(long)]
        system: NdSystemId,
        file: String,
        #[command(flatten)]
        budget: Budget,
    },
    /// One reduction step at `--at`, or reduction to normal form.
    Reduce {
        #[arg(long)]
        system: NdSystemId,
        file: String,
        /// Dotted premise path of a maximum formula, e.g. `0.1`; `root` for the root.
        #[arg(long)]
        at: Option<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        steps: usize,
    },
    /// Add formulas to every context of a cut-free proof.
    Weaken {
        #[arg(long)]
        calculus: CalculusId,
        file: String,
        /// Comma-separated formulas.
        #[arg(long = "with")]
        extra: String,
    },
    /// Print the `~`-free translation of a formula.
    Translate { formula: String },
    /// Replace a proof with cuts by a cut-free proof of its conclusion.
    Cutfree {
        #[arg(long)]
        calculus: CalculusId,
        file: String,
        #[command(flatten)]
        budget: Budget,
    },
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Outcome of a command: exit code plus message for stderr.
struct Fail(i32, String);

impl Fail {
    fn input(msg: impl ToString) -> Self {
        Fail(EXIT_INPUT, msg.to_string())
    }
}

impl From<ProverError> for Fail {
    fn from(e: ProverError) -> Self {
        match e {
            ProverError::ResourceExceeded(_) => Fail(EXIT_RESOURCE, e.to_string()),
            ProverError::NoCutFreeProof(_) => Fail(EXIT_NEGATIVE, e.to_string()),
            ProverError::InvalidProof { .. } => Fail(EXIT_NEGATIVE, e.to_string()),
            _ => Fail::input(e),
        }
    }
}

impl From<BridgeError> for Fail {
    fn from(e: BridgeError) -> Self {
        match e {
            BridgeError::Prover(p) => p.into(),
            BridgeError::Unsupported(_) => Fail::input(e),
            other => Fail(EXIT_NEGATIVE, other.to_string()),
        }
    }
}

/// Runs `cxk` with `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let mut io = Io { stdin, out, err };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            let _ = writeln!(io.err, "error: {msg}");
            code
        }
    }
}

fn config(b: Budget) -> Result<SearchConfig, Fail> {
    let budget = match b.budget {
        Some(n) => Some(n),
        None => match std::env::var(BUDGET_ENV) {
            Ok(v) => Some(v.trim().parse::<u64>().map_err(|_| Fail::input(format!("{BUDGET_ENV}={v:?} is not a number")))?),
            Err(_) => None,
        },
    };
    Ok(budget.map_or_else(SearchConfig::default, SearchConfig::with_budget))
}

fn read_input(io: &mut Io, file: &str) -> Result<String, Fail> {
    let mut text = String::new();
    if file == "-" {
        io.stdin.read_to_string(&mut text).map_err(Fail::input)?;
    } else {
        text = std::fs::read_to_string(file).map_err(|e| Fail::input(format!("{file}: {e}")))?;
    }
    Ok(text)
}

fn read_proof(io: &mut Io, calc: CalculusId, file: &str) -> Result<SequentProof, Fail> {
    let text = read_input(io, file)?;
    SequentProof::from_json_str(&text, !calc.is_connexive()).map_err(Fail::input)
}

fn read_derivation(io: &mut Io, file: &str) -> Result<Derivation, Fail> {
    let text = read_input(io, file)?;
    Derivation::from_json_str(&text).map_err(Fail::input)
}

fn emit(io: &mut Io, text: &str) -> Result<i32, Fail> {
    writeln!(io.out, "{text}").map_err(Fail::input)?;
    Ok(EXIT_OK)
}

fn dispatch(cmd: Command, io: &mut Io) -> Result<i32, Fail> {
    match cmd {
        Command::Prove { calculus, sequent, budget, quiet } => {
            let cfg = config(budget)?;
            let s = parse_sequent_with(&sequent, !calculus.is_connexive()).map_err(Fail::input)?;
            let res = decide(calculus, &s, &cfg)?;
            match res.verdict {
                Verdict::Provable(p) => {
                    if quiet {
                        emit(io, "provable")
                    } else {
                        emit(io, &p.to_json_string())
                    }
                }
                Verdict::Unprovable => {
                    let _ = writeln!(io.out, "unprovable");
                    Ok(EXIT_NEGATIVE)
                }
                Verdict::ResourceExceeded => {
                    Err(Fail(EXIT_RESOURCE, format!("node budget exhausted after {} nodes", res.stats.nodes)))
                }
            }
        }
        Command::Check { kind, system, file } => match kind {
            Kind::Sc => {
                let calc: CalculusId = system.parse().map_err(Fail::input)?;
                let proof = read_proof(io, calc, &file)?;
                let report = check_proof(calc, &proof);
                match report.fault {
                    None => emit(io, &format!("valid ({} nodes)", report.nodes_checked)),
                    Some(f) => {
                        let _ = writeln!(io.out, "invalid: {f}");
                        Ok(EXIT_NEGATIVE)
                    }
                }
            }
            Kind::Nd => {
                let sys: NdSystemId = system.parse().map_err(Fail::input)?;
                let d = read_derivation(io, &file)?;
                let report = check_derivation(sys, &d);
                match report.fault {
                    None => emit(io, &format!("valid ({} nodes)", report.nodes_checked)),
                    Some(f) => {
                        let _ = writeln!(io.out, "invalid: {f}");
                        Ok(EXIT_NEGATIVE)
                    }
                }
            }
        },
        Command::Transform { verb } => transform(verb, io),
        Command::Matrix { file, budget } => matrix(&file, budget, io),
    }
}

fn parse_path(text: &str) -> Result<Vec<usize>, Fail> {
    let t = text.trim();
    if t.is_empty() || t == "root" {
        return Ok(vec![]);
    }
    t.split('.').map(|p| p.parse::<usize>().map_err(|_| Fail::input(format!("bad path {text:?}")))).collect()
}

fn transform(verb: Verb, io: &mut Io) -> Result<i32, Fail> {
    match verb {
        Verb::Nd2sc { system, file } => {
            let d = read_derivation(io, &file)?;
            let p = nd_to_sc(system, &d)?;
            emit(io, &p.to_json_string())
        }
        Verb::Sc2nd { calculus, file } => {
            let p = read_proof(io, calculus, &file)?;
            let d = sc_to_nd(calculus, &p)?;
            emit(io, &d.to_json_string())
        }
        Verb::Normalize { system, file, budget } => {
            let cfg = config(budget)?;
            let d = read_derivation(io, &file)?;
            let n = normalize(system, &d, &cfg)?;
            emit(io, &n.to_json_string())
        }
        Verb::Reduce { system, file, at, steps } => {
            let d = read_derivation(io, &file)?;
            if let Some(at) = at {
                let path = parse_path(&at)?;
                let formula = d.at(&path).ok_or_else(|| Fail::input(format!("no node at {at}")))?.formula.clone();
                let occ = MaxOccurrence { path, formula };
                if !maximum_formulas(&d).contains(&occ) {
                    return Err(Fail(EXIT_NEGATIVE, format!("no maximum formula at {at}")));
                }
                let out = reduce_step(system, &d, &occ).map_err(|e| Fail(EXIT_NEGATIVE, e.to_string()))?;
                return emit(io, &out.to_json_string());
            }
            match normalize_by_reduction(system, &d, steps) {
                Ok((out, used)) => {
                    let _ = writeln!(io.err, "{used} steps");
                    emit(io, &out.to_json_string())
                }
                Err(NormalizeError::StepLimit(limit)) => {
                    let _ = writeln!(io.out, "{}", limit.derivation.to_json_string());
                    Err(Fail(EXIT_RESOURCE, limit.to_string()))
                }
                Err(NormalizeError::Reduce(e)) => Err(Fail(EXIT_NEGATIVE, e.to_string())),
            }
        }
        Verb::Weaken { calculus, file, extra } => {
            let p = read_proof(io, calculus, &file)?;
            let extra = parse_list(&extra)?;
            let w = weaken_proof(calculus, &p, &extra).map_err(|e| Fail(EXIT_NEGATIVE, e.to_string()))?;
            emit(io, &w.to_json_string())
        }
        Verb::Translate { formula } => {
            let f = parse(&formula).map_err(Fail::input)?;
            let t = translate_f(&f).map_err(|e: EmbedError| Fail::input(e))?;
            emit(io, &t.to_string())
        }
        Verb::Cutfree { calculus, file, budget } => {
            let cfg = config(budget)?;
            let p = read_proof(io, calculus, &file)?;
            let q = eliminate_cut(calculus, &p, &cfg)?;
            emit(io, &q.to_json_string())
        }
    }
}

fn parse_list(text: &str) -> Result<BTreeSet<Formula>, Fail> {
    let s = parse_sequent_with(&format!("{text} => p"), false).map_err(Fail::input)?;
    Ok(s.ctx)
}

fn matrix(file: &str, budget: Budget, io: &mut Io) -> Result<i32, Fail> {
    let cfg = config(budget)?;
    let text = read_input(io, file)?;
    let header: Vec<String> = SEPARATION_CALCULI.iter().map(|c| format!("s{}", c.name()[1..].to_uppercase())).collect();
    let mut code = EXIT_OK;
    writeln!(io.out, "formula,{}", header.join(",")).map_err(Fail::input)?;
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let cells: Vec<String> = match parse(line) {
            Ok(f) => SEPARATION_CALCULI
                .iter()
                .map(|&c| match decide(c, &crate::sequent::Sequent::goal(f.clone()), &cfg) {
                    Ok(r) => {
                        if r.cell() == Cell::ResourceExceeded && code == EXIT_OK {
                            code = EXIT_RESOURCE;
                        }
                        r.cell().symbol().to_string()
                    }
                    Err(_) => {
                        code = EXIT_INPUT;
                        "ERR".to_string()
                    }
                })
                .collect(),
            Err(_) => {
                code = EXIT_INPUT;
                vec!["ERR".to_string(); SEPARATION_CALCULI.len()]
            }
        };
        writeln!(io.out, "{},{}", csv_field(line), cells.join(",")).map_err(Fail::input)?;
    }
    Ok(code)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
