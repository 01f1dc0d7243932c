//! Command-line surface for the workbench.
//!
//! Exit codes: 0 = success / the property holds; 1 = the property fails or a
//! failure witness was found; 2 = usage or input error; 3 = budget exceeded.
//! Diagnostics go to stderr, results to stdout.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use malcev::algebra::AlgTerm;
use malcev::commutator::CommutatorEngine;
use malcev::error::Error;
use malcev::fileio::{parse_algebra_file, AlgebraFile};
use malcev::pwgen::{eq_commutator, eq_standard, MalcevCondition};
use malcev::rel::{BinRel, Partition};
use malcev::relcalc::{check_eq_exhaustive, check_inclusion, con_lattice, ExhaustiveOutcome, InclusionOutcome};
use malcev::searchcheck::{
    check_commutator_eq, check_fails_on_3set, find_condition_witness, scenario_taylor_counterexample,
    CommEqOutcome, SearchOutcome,
};
use malcev::termgraph::build_graph;
use malcev::termlang::{herringbone, RelTerm};

#[derive(Parser)]
#[command(name = "malcev", version, about = "Congruence lattices, TC-commutators and Pixley-Wille Mal'cev conditions on finite algebras")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RenderFormat {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Cmd {
    /// List every congruence of the algebra, one block notation per line.
    Congruences { file: PathBuf },
    /// Compute the TC-commutator [alpha, beta].
    Commutator {
        file: PathBuf,
        /// Partition literal, e.g. {{0,2},{1,3}}.
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
    },
    /// Check a congruence inclusion lhs ≤ rhs under an assignment, or
    /// exhaustively over all congruence assignments.
    CheckEq {
        file: PathBuf,
        /// Relational term, e.g. "a ^ (b o g)".
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        /// VAR=PARTITION binding; repeatable.
        #[arg(long = "assign", value_name = "VAR=P")]
        assign: Vec<String>,
        /// Quantify over every congruence assignment instead.
        #[arg(long, conflicts_with = "assign")]
        exhaustive: bool,
        /// Assignment budget for --exhaustive.
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Check the commutator equation lhs ≈_C rhs for algebra terms.
    CheckCommutatorEq {
        file: PathBuf,
        /// Algebra term, e.g. "plus(x1,neg(x2))".
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
    /// Print the labelled graph of a {meet, composition}-term.
    Graph {
        #[arg(long)]
        term: String,
        /// Emit GraphViz instead of edge lines.
        #[arg(long)]
        dot: bool,
    },
    /// Run the Pixley-Wille construction on lhs ≤ rhs.
    PixleyWille {
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        /// Join fold depth for a right-hand side containing v.
        #[arg(long)]
        k: Option<usize>,
        /// Emit commutator equations (≈_C) instead of standard ones.
        #[arg(long)]
        commutator: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: RenderFormat,
    },
    /// Print the herringbone lattice term y^N in the variables x, y, z.
    Herringbone { n: usize },
    /// Search for terms of the algebra witnessing a condition document.
    Search {
        file: PathBuf,
        /// Path to a machine-format condition JSON.
        #[arg(long)]
        condition: PathBuf,
        /// Cap on generated elements per unknown.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Run a named scenario; currently `taylor-counterexample`.
    Scenario {
        name: String,
        /// Herringbone levels to test.
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
        n: Vec<usize>,
    },
    /// Exhaustively look for a failing pairwise-trivial-meet assignment on
    /// the 3-element set.
    #[command(name = "check-3set")]
    Check3Set {
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e);
            match e {
                Error::BudgetExceeded { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn load(file: &PathBuf) -> Result<AlgebraFile, Error> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| Error::File { line: 0, msg: format!("{}: {}", file.display(), e) })?;
    parse_algebra_file(&text)
}

fn parse_congruence(file: &AlgebraFile, text: &str) -> Result<Partition, Error> {
    let p = Partition::parse(file.algebra.size(), text)?;
    file.algebra.check_congruence(&p)?;
    Ok(p)
}

fn parse_assignments(file: &AlgebraFile, entries: &[String]) -> Result<BTreeMap<String, BinRel>, Error> {
    let mut out = BTreeMap::new();
    for entry in entries {
        let (var, part) = entry.split_once('=').ok_or_else(|| Error::Parse {
            pos: 0,
            msg: format!("expected VAR=PARTITION, found `{}`", entry),
        })?;
        let p = Partition::parse(file.algebra.size(), part)?;
        out.insert(var.trim().to_string(), p.to_binrel());
    }
    Ok(out)
}

fn run(cmd: Cmd) -> Result<u8, Error> {
    match cmd {
        Cmd::Congruences { file } => {
            let f = load(&file)?;
            for p in con_lattice(&f.algebra)? {
                println!("{}", p);
            }
            Ok(0)
        }
        Cmd::Commutator { file, alpha, beta } => {
            let f = load(&file)?;
            let alpha = parse_congruence(&f, &alpha)?;
            let beta = parse_congruence(&f, &beta)?;
            let result = CommutatorEngine::new(&f.algebra).commutator(&alpha, &beta)?;
            println!("{}", result);
            Ok(0)
        }
        Cmd::CheckEq { file, lhs, rhs, assign, exhaustive, budget } => {
            let f = load(&file)?;
            let lhs = RelTerm::parse(&lhs)?;
            let rhs = RelTerm::parse(&rhs)?;
            if exhaustive {
                match check_eq_exhaustive(&f.algebra, &lhs, &rhs, budget)? {
                    ExhaustiveOutcome::Holds => {
                        println!("holds");
                        Ok(0)
                    }
                    ExhaustiveOutcome::Fails { assignment, witness } => {
                        println!("fails: witness ({},{})", witness.0, witness.1);
                        for (var, p) in assignment {
                            println!("  {} = {}", var, p);
                        }
                        Ok(1)
                    }
                }
            } else {
                let assignment = parse_assignments(&f, &assign)?;
                match check_inclusion(&f.algebra, &lhs, &rhs, &assignment)? {
                    InclusionOutcome::Holds => {
                        println!("holds");
                        Ok(0)
                    }
                    InclusionOutcome::Fails { witness } => {
                        println!("fails: witness ({},{})", witness.0, witness.1);
                        Ok(1)
                    }
                }
            }
        }
        Cmd::CheckCommutatorEq { file, lhs, rhs } => {
            let f = load(&file)?;
            let lhs = AlgTerm::parse(&lhs)?;
            let rhs = AlgTerm::parse(&rhs)?;
            match check_commutator_eq(&f.algebra, &lhs, &rhs, None)? {
                CommEqOutcome::Holds => {
                    println!("holds");
                    Ok(0)
                }
                CommEqOutcome::Fails { theta, tuple } => {
                    println!("fails: theta = {}, tuple = {:?}", theta, tuple);
                    Ok(1)
                }
            }
        }
        Cmd::Graph { term, dot } => {
            let t = RelTerm::parse(&term)?;
            let g = build_graph(&t)?;
            if dot {
                print!("{}", g.render_dot());
            } else {
                print!("{}", g.render_edges());
            }
            Ok(0)
        }
        Cmd::PixleyWille { lhs, rhs, k, commutator, format } => {
            let p = RelTerm::parse(&lhs)?;
            let q = RelTerm::parse(&rhs)?;
            let cond = if commutator {
                eq_commutator(&p, &q, k)?
            } else {
                eq_standard(&p, &q, k)?
            };
            match format {
                RenderFormat::Text => print!("{}", cond.render_text()),
                RenderFormat::Machine => println!("{}", cond.render_machine()),
            }
            Ok(0)
        }
        Cmd::Herringbone { n } => {
            println!("{}", herringbone(n));
            Ok(0)
        }
        Cmd::Search { file, condition, budget } => {
            let f = load(&file)?;
            let text = std::fs::read_to_string(&condition)
                .map_err(|e| Error::File { line: 0, msg: format!("{}: {}", condition.display(), e) })?;
            let cond = MalcevCondition::parse_machine(&text)?;
            match find_condition_witness(&f.algebra, &cond, budget)? {
                SearchOutcome::Witness(w) => {
                    let terms: BTreeMap<&String, String> =
                        w.assignments.iter().map(|(k, t)| (k, t.to_string())).collect();
                    let doc = json!({
                        "found": true,
                        "witness": terms,
                        "stats": { "generated": w.stats.generated, "explored": w.stats.explored },
                    });
                    println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
                    Ok(0)
                }
                SearchOutcome::ProvenAbsent { stats } => {
                    let doc = json!({
                        "found": false,
                        "proven_absent": true,
                        "stats": { "generated": stats.generated, "explored": stats.explored },
                    });
                    println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
                    Ok(1)
                }
            }
        }
        Cmd::Scenario { name, n } => {
            if name != "taylor-counterexample" {
                return Err(Error::Parse {
                    pos: 0,
                    msg: format!("unknown scenario `{}`; available: taylor-counterexample", name),
                });
            }
            let report = scenario_taylor_counterexample(&n)?;
            println!("{}", report.render());
            Ok(if report.all_pass() { 0 } else { 1 })
        }
        Cmd::Check3Set { lhs, rhs } => {
            let p = RelTerm::parse(&lhs)?;
            let q = RelTerm::parse(&rhs)?;
            match check_fails_on_3set(&p, &q)? {
                Some(failure) => {
                    println!("fails: witness ({},{})", failure.witness.0, failure.witness.1);
                    for (var, part) in failure.assignment {
                        println!("  {} = {}", var, part);
                    }
                    Ok(1)
                }
                None => {
                    println!("holds on every pairwise-trivial-meet assignment");
                    Ok(0)
                }
            }
        }
    }
}
