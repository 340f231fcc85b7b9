use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use l2int::derivation::Derivation;
use l2int::duality::{dual_derivation, dual_formula, dual_term};
use l2int::meaning::{compare, sense};
use l2int::rewrite::{normalize, DEFAULT_FUEL};
use l2int::testkit::{gen_derivation, GenConfig};
use l2int::textio::{parse_derivation_json, parse_formula, parse_term, print_derivation_json};
use l2int::typing::infer_principal;
use l2int::Term;

const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const USAGE: u8 = 2;
const FUEL: u8 = 3;

#[derive(Parser)]
#[command(name = "l2i", version, about = "Proof and refutation terms for bi-intuitionistic logic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate derivation files (JSON)
    Check {
        #[arg(required = true)]
        files: Vec<String>,
    },
    /// Print the principal typing of a term
    Infer {
        #[arg(short = 'e', long = "expr")]
        term: String,
    },
    /// Reduce a term to normal form
    Normalize {
        #[arg(short = 'e', long = "expr")]
        term: String,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
        /// Print every step before the result
        #[arg(long)]
        trace: bool,
    },
    /// Dualize a term, a formula or a derivation file
    Dualize(DualizeArgs),
    /// Compare the denotations of two terms
    Equal {
        #[arg(short = 'e', long = "expr", num_args = 1, required = true)]
        terms: Vec<String>,
        #[arg(long)]
        modulo_duality: bool,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
    },
    /// Compare the senses of two derivation files
    Sense { first: String, second: String },
    /// Print random valid derivations, one JSON document per line
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        max_height: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct DualizeArgs {
    #[arg(short = 'e', long = "expr")]
    term: Option<String>,
    #[arg(long)]
    formula: Option<String>,
    file: Option<String>,
}

/// A failed command: exit code plus message for standard error.
struct Failure(u8, String);

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure(USAGE, msg.to_string())
}

fn read_derivation(path: &str) -> Result<Derivation, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?;
    parse_derivation_json(&text).map_err(|e| usage(format!("{path}: {e}")))
}

fn term_arg(text: &str) -> Result<Term, Failure> {
    parse_term(text).map_err(|e| usage(format!("{e}\n  {text}")))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Check { files } => {
            let mut code = OK;
            for path in &files {
                let d = match read_derivation(path) {
                    Ok(d) => d,
                    Err(Failure(c, msg)) => {
                        eprintln!("{msg}");
                        code = code.max(c);
                        continue;
                    }
                };
                match d.validate() {
                    Ok(()) => println!("{path}: valid, height {}", d.height()),
                    Err(vs) => {
                        println!("{path}: invalid");
                        for v in vs {
                            println!("  {v}");
                        }
                        code = code.max(NEGATIVE);
                    }
                }
            }
            Ok(code)
        }
        Command::Infer { term } => {
            let t = term_arg(&term)?;
            match infer_principal(&t) {
                Ok(p) => {
                    println!("{p}");
                    Ok(OK)
                }
                Err(e) => {
                    println!("untypable");
                    eprintln!("{e}");
                    Ok(NEGATIVE)
                }
            }
        }
        Command::Normalize { term, fuel, trace } => {
            let t = term_arg(&term)?;
            match normalize(&t, fuel) {
                Ok((nf, tr)) => {
                    if trace {
                        print!("{tr}");
                    }
                    println!("{nf}");
                    eprintln!("{} steps", tr.len());
                    Ok(OK)
                }
                Err(e) => {
                    if trace {
                        print!("{}", e.trace);
                    }
                    eprintln!("{e}; last term: {}", e.last);
                    Ok(FUEL)
                }
            }
        }
        Command::Dualize(args) => {
            if let Some(term) = args.term {
                println!("{}", dual_term(&term_arg(&term)?));
            } else if let Some(f) = args.formula {
                let f = parse_formula(&f).map_err(|e| usage(format!("{e}\n  {f}")))?;
                println!("{}", dual_formula(&f));
            } else if let Some(path) = args.file {
                let d = read_derivation(&path)?;
                let dual = dual_derivation(&d).map_err(|e| Failure(NEGATIVE, format!("{path}: {e}")))?;
                println!("{}", print_derivation_json(&dual, true));
                eprintln!("height: original {}, dual {}", d.height(), dual.height());
            }
            Ok(OK)
        }
        Command::Equal { terms, modulo_duality, fuel } => {
            let [t, u] = terms.as_slice() else {
                return Err(usage("equal needs exactly two -e TERM arguments"));
            };
            let (t, u) = (term_arg(t)?, term_arg(u)?);
            for x in [&t, &u] {
                if let Err(e) = infer_principal(x) {
                    return Err(Failure(NEGATIVE, format!("{x} is not typable: {e}")));
                }
            }
            match compare(&t, &u, modulo_duality, fuel) {
                Ok(v) => {
                    println!("{v}");
                    eprintln!("decided by normal forms under the leftmost-outermost strategy");
                    Ok(if v.is_affirmative() { OK } else { NEGATIVE })
                }
                Err(e) => Err(Failure(FUEL, e.to_string())),
            }
        }
        Command::Sense { first, second } => {
            let (d1, d2) = (read_derivation(&first)?, read_derivation(&second)?);
            let s1 = sense(&d1).map_err(|e| Failure(NEGATIVE, format!("{first}: {e}")))?;
            let s2 = sense(&d2).map_err(|e| Failure(NEGATIVE, format!("{second}: {e}")))?;
            if s1 == s2 {
                println!("synonymous");
                Ok(OK)
            } else {
                println!("non-synonymous");
                Ok(NEGATIVE)
            }
        }
        Command::Gen { seed, max_height, count } => {
            for i in 0..count as u64 {
                let cfg = GenConfig::with_seed(seed.wrapping_add(i), max_height);
                let d = gen_derivation(&cfg).map_err(|e| Failure(NEGATIVE, e.to_string()))?;
                println!("{}", print_derivation_json(&d, false));
            }
            Ok(OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("l2i: {msg}");
            ExitCode::from(code)
        }
    }
}
