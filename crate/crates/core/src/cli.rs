//! Command-line front end. `run` parses arguments, dispatches to the library
//! and returns the process exit status: 0 on success, 1 on bad input or a
//! failed precondition, 2 when a size limit or search budget runs out.

use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gauss::{
    compatible, compatible_bipartitions, condition_i, condition_ii, irreducible, realizable, sphere_curves_homeomorphic,
    BIPARTITION_LIMIT,
};
use crate::homotopy::{enumerate_strings, homotopic_heuristic, normalize, Budget, Equivalence, Normalizer, Status, ENUMERATE_LIMIT};
use crate::invariants::{
    based_matrix, genus, hg_lower_bound, hr_lower_bound, linking_numbers, primitive_matrix, realize_u_polynomial, rho,
    slice_obstructions, u_polynomial, BasedMatrix, SliceVerdict, UPolynomial, SIGMA_LIMIT,
};
use crate::lie::{co_jacobi_check, cobracket};
use crate::model::{family4_permutation, lattice_string, parse_permutation, permutation_string, Bipartition, GaussWord};
use crate::skein::{eta, nabla, OrientedForest, SKEIN_LIMIT};
use crate::{ArrowDiagram, VirtualString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "vstrings", version, about = "Virtual strings, their invariants and the skein polynomial of arrow diagrams")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    #[arg(long, global = true)]
    pub max_states: Option<usize>,
    #[arg(long, global = true)]
    pub max_rank_increase: Option<usize>,
    /// Overrides the size limit of the chosen command.
    #[arg(long, global = true)]
    pub max_size: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Canonical code and export form of a string or arrow diagram.
    Parse {
        input: String,
        /// Read the input as an arrow diagram (signed tails).
        #[arg(long)]
        diagram: bool,
    },
    /// u-polynomial, based matrices, genus and bounds.
    Invariants { input: String },
    /// Searches for a homotopic string of least rank.
    Reduce { input: String },
    /// Homotopy classes of strings with `rank` arrows, up to heuristic equality.
    Enumerate { rank: usize },
    /// Compares two strings up to homotopy.
    Equivalent { first: String, second: String },
    #[command(subcommand)]
    Gauss(GaussCommand),
    /// The cobracket of the class of a string.
    Cobracket {
        input: String,
        /// Also evaluate the co-Jacobi sum.
        #[arg(long)]
        co_jacobi: bool,
    },
    /// The skein polynomial of an arrow diagram.
    Nabla { input: String },
    /// The weight of an oriented forest given as `a>b c>d ...`.
    Eta { forest: String },
    #[command(subcommand)]
    Families(FamilyCommand),
    /// Obstructions to sliceness.
    Slice { input: String },
}

#[derive(Debug, Subcommand)]
pub enum GaussCommand {
    /// Realizability on the sphere, or compatibility of one bipartition.
    Check {
        word: String,
        #[arg(long)]
        bipartition: Option<String>,
    },
    /// Every compatible bipartition.
    Bipartitions { word: String },
    /// Whether two sphere curves `WORD:X|Y` are homeomorphic.
    Homeomorphic { first: String, second: String },
}

#[derive(Debug, Subcommand)]
pub enum FamilyCommand {
    /// The string with permutation i -> i+q (i <= p), i -> i-p otherwise.
    Lattice { p: usize, q: usize },
    /// The string of a permutation in cycle notation, e.g. `(134)(2)`.
    Permutation {
        cycles: String,
        #[arg(long)]
        size: Option<usize>,
    },
    /// The four-parameter family with two lattice pieces.
    Family4(Family4Args),
    /// A string realizing a polynomial with u(0) = u'(1) = 0.
    UPoly { polynomial: String },
}

#[derive(Debug, Args)]
pub struct Family4Args {
    p: usize,
    q: usize,
    p2: usize,
    q2: usize,
}

struct Output {
    text: String,
    json: Value,
    status: i32,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Output { text, json, status: 0 }
    }
}

fn read_input(arg: &str, stdin: &mut dyn Read) -> Result<String> {
    if arg != "-" {
        return Ok(arg.to_string());
    }
    let mut buf = String::new();
    stdin.read_to_string(&mut buf).map_err(|e| Error::Parse(format!("stdin: {e}")))?;
    Ok(buf.trim().to_string())
}

fn matrix_json(m: &BasedMatrix) -> Value {
    json!(m.rows())
}

fn budget(cli: &Cli) -> Budget {
    let d = Budget::default();
    Budget {
        max_states: cli.max_states.unwrap_or(d.max_states),
        max_rank_increase: cli.max_rank_increase.unwrap_or(d.max_rank_increase),
    }
}

fn string_output(s: &VirtualString) -> Output {
    Output::ok(s.render(), s.to_json())
}

fn invariants_output(s: &VirtualString, limit: usize) -> Result<Output> {
    let u = u_polynomial(s);
    let t = based_matrix(s);
    let t0 = primitive_matrix(s);
    let sigma = t0.sigma(limit)?;
    let report = slice_obstructions(s, limit)?;
    let links = linking_numbers(s);
    let text = format!(
        "u = {u}\nlinking numbers = {links:?}\nT =\n{t}\nT0 =\n{t0}\ngenus = {}\nsigma = {sigma}\nrho = {}\nhomotopy rank >= {}\nhomotopy genus >= {}\nslice: {}",
        genus(s),
        rho(s),
        hr_lower_bound(s),
        hg_lower_bound(s),
        verdict_text(report.verdict),
    );
    let json = json!({
        "u": u.to_string(),
        "u_coefficients": u.terms().map(|(k, c)| json!([k, c])).collect::<Vec<_>>(),
        "linking_numbers": links,
        "based_matrix": matrix_json(&t),
        "primitive_matrix": matrix_json(&t0),
        "genus": genus(s),
        "sigma": sigma,
        "rho": rho(s),
        "homotopy_rank_lower_bound": hr_lower_bound(s),
        "homotopy_genus_lower_bound": hg_lower_bound(s),
        "slice": report,
    });
    Ok(Output::ok(text, json))
}

fn verdict_text(v: SliceVerdict) -> &'static str {
    match v {
        SliceVerdict::NotSlice => "NOT_SLICE",
        SliceVerdict::Unknown => "UNKNOWN",
    }
}

fn status_text(s: Status) -> &'static str {
    match s {
        Status::Trivial => "TRIVIAL",
        Status::Reduced => "REDUCED",
        Status::BudgetExhausted => "BUDGET_EXHAUSTED",
    }
}

fn parse_curve(text: &str) -> Result<(GaussWord, Bipartition)> {
    let (w, b) = text.split_once(':').ok_or_else(|| Error::Parse("sphere curve needs the form WORD:X|Y".into()))?;
    let w = GaussWord::parse(w)?;
    let b = Bipartition::parse(b, &w)?;
    Ok((w, b))
}

fn yes(b: bool) -> &'static str {
    if b { "yes" } else { "no" }
}

fn gauss(cmd: &GaussCommand, cli: &Cli, stdin: &mut dyn Read) -> Result<Output> {
    let limit = cli.max_size.unwrap_or(BIPARTITION_LIMIT);
    match cmd {
        GaussCommand::Check { word, bipartition } => {
            let w = GaussWord::parse(&read_input(word, stdin)?)?;
            let (ci, cii) = (condition_i(&w), condition_ii(&w));
            if let Some(b) = bipartition {
                let b = Bipartition::parse(b, &w)?;
                let ok = compatible(&w, &b)?;
                let text = format!(
                    "condition (i): {}\ncondition (ii): {}\nbipartition {}: {}",
                    yes(ci),
                    yes(cii),
                    b.render(&w),
                    if ok { "compatible" } else { "not compatible" }
                );
                return Ok(Output::ok(
                    text,
                    json!({"condition_i": ci, "condition_ii": cii, "bipartition": b.render(&w), "compatible": ok}),
                ));
            }
            let count = if ci && cii { compatible_bipartitions(&w, limit)?.len() } else { 0 };
            let real = realizable(&w);
            let text = format!(
                "condition (i): {}\ncondition (ii): {}\ncompatible bipartitions: {count}\nirreducible: {}\n{}",
                yes(ci),
                yes(cii),
                yes(irreducible(&w)),
                if real { "realizable" } else { "not realizable" }
            );
            let json = json!({
                "condition_i": ci,
                "condition_ii": cii,
                "compatible_bipartitions": count,
                "irreducible": irreducible(&w),
                "realizable": real,
            });
            Ok(Output::ok(text, json))
        }
        GaussCommand::Bipartitions { word } => {
            let w = GaussWord::parse(&read_input(word, stdin)?)?;
            let all: Vec<String> = compatible_bipartitions(&w, limit)?.iter().map(|b| b.render(&w)).collect();
            Ok(Output::ok(all.join("\n"), json!(all)))
        }
        GaussCommand::Homeomorphic { first, second } => {
            let a = parse_curve(first)?;
            let b = parse_curve(second)?;
            let same = sphere_curves_homeomorphic((&a.0, &a.1), (&b.0, &b.1))?;
            Ok(Output::ok(if same { "homeomorphic" } else { "not homeomorphic" }.into(), json!({"homeomorphic": same})))
        }
    }
}

fn families(cmd: &FamilyCommand) -> Result<Output> {
    let s = match cmd {
        FamilyCommand::Lattice { p, q } => lattice_string(*p, *q)?,
        FamilyCommand::Permutation { cycles, size } => permutation_string(&parse_permutation(cycles, *size)?)?,
        FamilyCommand::Family4(a) => {
            if a.p.min(a.q).min(a.p2).min(a.q2) == 0 {
                return Err(Error::Precondition("family parameters must be positive".into()));
            }
            permutation_string(&family4_permutation(a.p, a.q, a.p2, a.q2))?
        }
        FamilyCommand::UPoly { polynomial } => realize_u_polynomial(&UPolynomial::parse(polynomial)?)?,
    };
    Ok(string_output(&s))
}

fn dispatch(cli: &Cli, stdin: &mut dyn Read) -> Result<Output> {
    let budget = budget(cli);
    match &cli.command {
        Command::Parse { input, diagram } => {
            let text = read_input(input, stdin)?;
            let (render, mut json, code, rank) = if *diagram {
                let d = ArrowDiagram::parse(&text)?;
                (d.render(), d.to_json(), d.code(), d.rank())
            } else {
                let s = VirtualString::parse(&text)?;
                (s.render(), s.to_json(), s.code(), s.rank())
            };
            json["code"] = json!(code.to_string());
            Ok(Output::ok(format!("{render}\nrank = {rank}\ncode = {code}"), json))
        }
        Command::Invariants { input } => {
            let s = VirtualString::parse(&read_input(input, stdin)?)?;
            invariants_output(&s, cli.max_size.unwrap_or(SIGMA_LIMIT))
        }
        Command::Reduce { input } => {
            let s = VirtualString::parse(&read_input(input, stdin)?)?;
            let r = normalize(&s, budget);
            let mut text = format!("{}\nstatus = {}\nstates = {}", r.normal_form.render(), status_text(r.status), r.states_visited);
            for step in &r.moves_applied {
                text.push_str(&format!("\n  {} -> {}", step.mv, step.result));
            }
            let json = json!({
                "normal_form": r.normal_form.to_json(),
                "code": r.normal_form.code().to_string(),
                "status": r.status,
                "moves_applied": r.moves_applied,
                "states_visited": r.states_visited,
            });
            let status = if r.status == Status::BudgetExhausted { 2 } else { 0 };
            Ok(Output { text, json, status })
        }
        Command::Enumerate { rank } => {
            let limit = cli.max_size.unwrap_or(ENUMERATE_LIMIT);
            let codes = enumerate_strings(*rank, limit)?;
            let nz = Normalizer::new(budget);
            let mut classes = std::collections::BTreeSet::new();
            for c in &codes {
                if let Some(k) = nz.class_key(&c.decode()) {
                    if k.rank() == *rank {
                        classes.insert(k);
                    }
                }
            }
            let list: Vec<String> = classes.iter().map(|c| c.to_string()).collect();
            let text = format!("strings = {}\nclasses of rank {rank} = {}\n{}", codes.len(), list.len(), list.join("\n"));
            Ok(Output::ok(text.trim_end().to_string(), json!({"strings": codes.len(), "classes": list})))
        }
        Command::Equivalent { first, second } => {
            let a = VirtualString::parse(&read_input(first, stdin)?)?;
            let b = VirtualString::parse(&read_input(second, stdin)?)?;
            let v = homotopic_heuristic(&a, &b, budget);
            let text = match &v {
                Equivalence::Homotopic => "HOMOTOPIC".to_string(),
                Equivalence::Distinct { reason } => format!("DISTINCT: {reason}"),
                Equivalence::Unknown => "UNKNOWN".to_string(),
            };
            Ok(Output::ok(text, json!(v)))
        }
        Command::Gauss(g) => gauss(g, cli, stdin),
        Command::Cobracket { input, co_jacobi } => {
            let s = VirtualString::parse(&read_input(input, stdin)?)?;
            let nz = Normalizer::new(budget);
            let nu = cobracket(&s, &nz);
            let mut text = nu.to_string();
            let mut json = json!({"cobracket": nu.to_json()});
            if *co_jacobi {
                let ok = co_jacobi_check(&s, &nz);
                text.push_str(&format!("\nco-Jacobi: {}", if ok { "holds" } else { "fails" }));
                json["co_jacobi"] = json!(ok);
            }
            Ok(Output::ok(text, json))
        }
        Command::Nabla { input } => {
            let d = ArrowDiagram::parse(&read_input(input, stdin)?)?;
            let nz = Normalizer::new(budget);
            let p = nabla(&d, &nz, cli.max_size.unwrap_or(SKEIN_LIMIT))?;
            Ok(Output::ok(p.to_string(), p.to_json()))
        }
        Command::Eta { forest } => {
            let f = OrientedForest::parse(&read_input(forest, stdin)?)?;
            let v = eta(&f);
            Ok(Output::ok(v.to_string(), json!({"eta": v.to_string(), "vertices": f.vertex_count(), "edges": f.edges()})))
        }
        Command::Families(f) => families(f),
        Command::Slice { input } => {
            let s = VirtualString::parse(&read_input(input, stdin)?)?;
            let r = slice_obstructions(&s, cli.max_size.unwrap_or(SIGMA_LIMIT))?;
            let text = format!(
                "{}\nu = 0: {}\nT hyperbolic: {}\nsigma = {}\nslice genus >= {}",
                verdict_text(r.verdict),
                yes(r.u_zero),
                yes(r.matrix_hyperbolic),
                r.sigma,
                r.slice_genus_lower_bound
            );
            Ok(Output::ok(text, json!(r)))
        }
    }
}

/// Runs one command. `args` includes the program name.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let first = e.to_string().lines().next().unwrap_or("usage error").to_string();
                    let _ = writeln!(err, "error[usage]: {}", first.trim_start_matches("error: "));
                    1
                }
            };
        }
    };
    match dispatch(&cli, stdin) {
        Ok(o) => {
            let _ = match cli.format {
                Format::Text => writeln!(out, "{}", o.text),
                Format::Json => writeln!(out, "{}", o.json),
            };
            if o.status == 2 {
                let _ = writeln!(err, "error[limit]: search budget exhausted");
            }
            o.status
        }
        Err(e) => {
            let (kind, status) = if e.is_limit() { ("limit", 2) } else { ("input", 1) };
            let _ = writeln!(err, "error[{kind}]: {e}");
            status
        }
    }
}
