//! `tsr`: command-line front end.
//!
//! Exit codes: 0 when the property holds, 1 when it does not, 2 on usage,
//! parse or validation errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tsr_core::analysis::deadlock_states;
use tsr_core::convert::{canonicalize, iso_check, mr, rm};
use tsr_core::language::{self, LanguageVerdict};
use tsr_core::model::{MixTs, StateTable, Trace, Tsr};
use tsr_core::refine::{
    check_mixts_refinement, check_refinement_with, greatest_mixts_refinement_relation, greatest_refinement_relation,
    AlphabetMode, RefineOptions, RefinementReport,
};
use tsr_core::textio::{self, System, TextError};

#[derive(Parser, Debug)]
#[command(name = "tsr", version, about = "Check transition systems with responses")]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a file and print a summary.
    Check { file: PathBuf },
    /// Is every response backed by a transition (every must edge a may edge)?
    Modal { file: PathBuf },
    /// Report deadlocked states.
    Deadlocks { file: PathBuf },
    /// Does CONCRETE refine ABSTRACT?
    Refine {
        r#abstract: PathBuf,
        concrete: PathBuf,
        /// Also require deadlocked states to be reflected.
        #[arg(long)]
        safe: bool,
        /// Cross-check the verdict against the greatest-fixpoint relation.
        #[arg(long)]
        oracle: bool,
        /// Fail instead of unioning differing alphabets.
        #[arg(long)]
        strict: bool,
    },
    /// Convert between the two system kinds.
    Convert {
        file: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
        /// Write to this file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Canonical form of a mixed system.
    Canon { file: PathBuf },
    /// Are the reachable parts of two systems isomorphic?
    Iso { first: PathBuf, second: PathBuf },
    /// Finite-trace language questions.
    Lang {
        #[command(subcommand)]
        query: LangCommand,
    },
    /// Graphviz rendering.
    Dot { file: PathBuf },
    /// Reformat a file canonically.
    Fmt {
        file: PathBuf,
        /// Rewrite the file instead of printing.
        #[arg(short, long)]
        in_place: bool,
    },
}

#[derive(Subcommand, Debug)]
enum LangCommand {
    /// Is the language empty?
    Empty { file: PathBuf },
    /// Is the space-separated word accepted?
    Member {
        file: PathBuf,
        #[arg(num_args = 0.., allow_hyphen_values = true)]
        word: Vec<String>,
    },
    /// Is L(CONCRETE) contained in L(ABSTRACT)?
    Includes { r#abstract: PathBuf, concrete: PathBuf },
    /// Do both files accept the same words?
    Equiv { first: PathBuf, second: PathBuf },
    /// List accepted words up to a length.
    Enum {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        maxlen: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    Tsr,
    Mixts,
}

/// Result of one command, rendered either as text or as JSON.
struct Report {
    holds: bool,
    lines: Vec<String>,
    json: Value,
}

impl Report {
    fn success(lines: Vec<String>, json: Value) -> Self {
        Report {
            holds: true,
            lines,
            json,
        }
    }

    fn emit(self, as_json: bool) -> ExitCode {
        let mut out = io::stdout().lock();
        // a closed pipe (e.g. `| head`) is not an error worth reporting
        let _ = if as_json {
            writeln!(out, "{}", serde_json::to_string_pretty(&self.json).expect("json value"))
        } else {
            self.lines.iter().try_for_each(|line| writeln!(out, "{line}"))
        };
        ExitCode::from(if self.holds { 0 } else { 1 })
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load(path: &Path) -> Result<System> {
    let text = read(path)?;
    textio::load(&text).map_err(|e| match e {
        TextError::Parse(p) => anyhow!("{}:{}:{}: {}", path.display(), p.line, p.column, p.message),
        other => anyhow!("{}: {other}", path.display()),
    })
}

fn load_tsr(path: &Path) -> Result<Tsr> {
    match load(path)? {
        System::Tsr(t) => Ok(t),
        System::MixTs(_) => bail!("{}: expected a tsr system, found mixts", path.display()),
    }
}

fn load_as_mixts(path: &Path) -> Result<MixTs> {
    Ok(match load(path)? {
        System::Tsr(t) => rm(&t),
        System::MixTs(m) => m,
    })
}

fn word_json(trace: &Trace, verdict_alphabet: &tsr_core::ActionTable) -> Value {
    json!(trace.names(verdict_alphabet))
}

fn counterexample_line(trace: &Trace, alphabet: &tsr_core::ActionTable) -> String {
    let rendered = trace.render(alphabet);
    if rendered.is_empty() {
        "counterexample:".to_string()
    } else {
        format!("counterexample: {rendered}")
    }
}

fn check(file: &Path) -> Result<Report> {
    let system = load(file)?;
    let (lines, json) = match &system {
        System::Tsr(t) => (
            vec![
                "kind: tsr".to_string(),
                format!("system: {}", t.name()),
                format!("states: {}", t.states().len()),
                format!("actions: {}", t.actions().len()),
                format!("transitions: {}", t.transition_count()),
            ],
            json!({"kind": "tsr", "system": t.name(), "states": t.states().len(),
                   "actions": t.actions().len(), "transitions": t.transition_count()}),
        ),
        System::MixTs(m) => {
            let may = m.transitions(tsr_core::Modality::May).count();
            let must = m.transitions(tsr_core::Modality::Must).count();
            (
                vec![
                    "kind: mixts".to_string(),
                    format!("system: {}", m.name()),
                    format!("states: {}", m.states().len()),
                    format!("actions: {}", m.actions().len()),
                    format!("may: {may}"),
                    format!("must: {must}"),
                ],
                json!({"kind": "mixts", "system": m.name(), "states": m.states().len(),
                       "actions": m.actions().len(), "may": may, "must": must}),
            )
        }
    };
    Ok(Report::success(lines, json))
}

fn modal(file: &Path) -> Result<Report> {
    let (holds, offending) = match load(file)? {
        System::Tsr(t) => {
            let mut offending = Vec::new();
            for s in t.state_ids() {
                for &a in t.responses(s) {
                    if t.step(s, a).is_none() {
                        offending.push((t.state_name(s).to_string(), t.actions().name(a).to_string()));
                    }
                }
            }
            (offending.is_empty(), offending)
        }
        System::MixTs(m) => {
            let offending: Vec<(String, String)> = m
                .transitions(tsr_core::Modality::Must)
                .filter(|&(s, a, t)| m.may_step(s, a) != Some(t))
                .map(|(s, a, _)| (m.state_name(s).to_string(), m.actions().name(a).to_string()))
                .collect();
            (offending.is_empty(), offending)
        }
    };
    let mut lines = vec![format!("modal: {holds}")];
    lines.extend(offending.iter().map(|(s, a)| format!("unbacked: {s} {a}")));
    let json = json!({"modal": holds, "unbacked": offending.iter().map(|(s, a)| json!([s, a])).collect::<Vec<_>>()});
    Ok(Report { holds, lines, json })
}

fn names(states: &StateTable, set: &std::collections::BTreeSet<tsr_core::StateId>) -> Vec<String> {
    set.iter().map(|&s| states.name(s).to_string()).collect()
}

fn deadlocks(file: &Path) -> Result<Report> {
    let t = load_tsr(file)?;
    let report = deadlock_states(&t);
    let all = names(t.states(), &report.deadlocked);
    let reachable = names(t.states(), &report.reachable_deadlocked);
    let lines = vec![
        format!("deadlocked: {}", all.join(" ")).trim_end().to_string(),
        format!("reachable deadlocked: {}", reachable.join(" ")).trim_end().to_string(),
        format!("deadlock free: {}", report.deadlock_free),
    ];
    let json = json!({"deadlocked": all, "reachable_deadlocked": reachable, "deadlock_free": report.deadlock_free});
    Ok(Report {
        holds: report.deadlock_free,
        lines,
        json,
    })
}

fn refinement_report(report: &RefinementReport, left: &StateTable, right: &StateTable, label: &str) -> Report {
    let pair_names = |(a, b): (tsr_core::StateId, tsr_core::StateId)| (left.name(a).to_string(), right.name(b).to_string());
    let mut lines = vec![format!("{label}: {}", if report.holds { "holds" } else { "fails" })];
    let relation: Option<Vec<Value>> = report.relation.as_ref().map(|rel| {
        rel.iter()
            .map(|&p| {
                let (a, b) = pair_names(p);
                json!([a, b])
            })
            .collect()
    });
    if let Some(rel) = &report.relation {
        let rendered: Vec<String> = rel
            .iter()
            .map(|&p| {
                let (a, b) = pair_names(p);
                format!("({a},{b})")
            })
            .collect();
        lines.push(format!("relation: {}", rendered.join(" ")));
    }
    let mut cex_json = Value::Null;
    if let Some(cex) = &report.counterexample {
        let (a, b) = pair_names(cex.pair);
        let action = cex.action.map(|x| report.alphabet.name(x).to_string());
        lines.push(format!(
            "violation: {} at ({a},{b}){}",
            cex.violation,
            action.as_ref().map(|x| format!(" on {x}")).unwrap_or_default()
        ));
        lines.push(counterexample_line(&cex.trace, &report.alphabet));
        cex_json = json!({
            "trace": word_json(&cex.trace, &report.alphabet),
            "pair": [a, b],
            "violation": cex.violation.to_string(),
            "action": action,
        });
    }
    let json = json!({
        "holds": report.holds,
        "safe": report.safe,
        "relation": relation,
        "counterexample": cex_json,
    });
    Report {
        holds: report.holds,
        lines,
        json,
    }
}

fn refine(abstract_: &Path, concrete: &Path, safe: bool, oracle: bool, strict: bool) -> Result<Report> {
    let (mut report, gfp_holds) = match (load(abstract_)?, load(concrete)?) {
        (System::Tsr(t1), System::Tsr(t2)) => {
            let options = RefineOptions {
                safe,
                alphabet: if strict { AlphabetMode::Strict } else { AlphabetMode::Union },
            };
            let report = check_refinement_with(&t1, &t2, options)?;
            let gfp = oracle.then(|| {
                greatest_refinement_relation(&t1, &t2, safe).contains(&(t1.initial(), t2.initial()))
            });
            let label = if safe { "safe refinement" } else { "refinement" };
            (refinement_report(&report, t1.states(), t2.states(), label), gfp)
        }
        (System::MixTs(m1), System::MixTs(m2)) => {
            if safe {
                bail!("--safe applies to tsr systems only");
            }
            if strict && !m1.actions().same_names(m2.actions()) {
                bail!("alphabets differ: {:?} vs {:?}", m1.actions().names(), m2.actions().names());
            }
            let report = check_mixts_refinement(&m1, &m2);
            let gfp = oracle
                .then(|| greatest_mixts_refinement_relation(&m1, &m2).contains(&(m1.initial(), m2.initial())));
            (refinement_report(&report, m1.states(), m2.states(), "mixed refinement"), gfp)
        }
        _ => bail!("refine needs two files of the same kind"),
    };
    if let Some(expected) = gfp_holds {
        if expected != report.holds {
            bail!("internal error: fixpoint oracle says {expected}, rooted check says {}", report.holds);
        }
        report.lines.insert(1, "oracle: agrees".to_string());
        report.json["oracle"] = json!("agrees");
    }
    Ok(report)
}

fn write_or_print(text: &str, output: Option<&Path>) -> Result<Report> {
    match output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
            Ok(Report::success(vec![], json!({"written": path.display().to_string()})))
        }
        None => Ok(Report::success(vec![text.trim_end().to_string()], json!({"text": text}))),
    }
}

fn convert(file: &Path, to: Target, output: Option<&Path>) -> Result<Report> {
    let converted = match (load(file)?, to) {
        (System::Tsr(t), Target::Mixts) => System::MixTs(rm(&t)),
        (System::MixTs(m), Target::Tsr) => System::Tsr(mr(&m)),
        (same, _) => same,
    };
    write_or_print(&converted.to_text(), output)
}

fn canon(file: &Path) -> Result<Report> {
    match load(file)? {
        System::MixTs(m) => write_or_print(&textio::mixts_to_text(&canonicalize(&m)), None),
        System::Tsr(_) => bail!("{}: canon expects a mixts system", file.display()),
    }
}

fn iso(first: &Path, second: &Path) -> Result<Report> {
    let (m1, m2) = (load_as_mixts(first)?, load_as_mixts(second)?);
    let mapping = iso_check(&m1, &m2);
    let holds = mapping.is_some();
    let mut lines = vec![format!("isomorphic: {holds}")];
    let pairs: Vec<(String, String)> = mapping
        .iter()
        .flatten()
        .map(|(&a, &b)| (m1.state_name(a).to_string(), m2.state_name(b).to_string()))
        .collect();
    lines.extend(pairs.iter().map(|(a, b)| format!("{a} -> {b}")));
    let json = json!({
        "isomorphic": holds,
        "mapping": mapping.map(|_| pairs.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>()),
    });
    Ok(Report { holds, lines, json })
}

fn verdict_report(label: &str, verdict: &LanguageVerdict) -> Report {
    let mut lines = vec![format!("{label}: {}", verdict.holds)];
    if let Some(w) = &verdict.witness {
        lines.push(counterexample_line(w, &verdict.alphabet));
    }
    let json = json!({
        "holds": verdict.holds,
        "counterexample": verdict.witness.as_ref().map(|w| word_json(w, &verdict.alphabet)),
    });
    Report {
        holds: verdict.holds,
        lines,
        json,
    }
}

fn lang(query: &LangCommand) -> Result<Report> {
    match query {
        LangCommand::Empty { file } => Ok(verdict_report("empty", &language::is_empty(&load_tsr(file)?))),
        LangCommand::Member { file, word } => {
            let t = load_tsr(file)?;
            let tokens: Vec<&str> = word.iter().flat_map(|w| w.split_whitespace()).collect();
            let accepted = language::accepts_names(&t, &tokens)?;
            Ok(Report {
                holds: accepted,
                lines: vec![format!("accepted: {accepted}")],
                json: json!({"accepted": accepted, "word": tokens}),
            })
        }
        LangCommand::Includes { r#abstract, concrete } => {
            let verdict = language::includes(&load_tsr(r#abstract)?, &load_tsr(concrete)?);
            Ok(verdict_report("included", &verdict))
        }
        LangCommand::Equiv { first, second } => {
            let verdict = language::equivalent(&load_tsr(first)?, &load_tsr(second)?);
            Ok(verdict_report("equivalent", &verdict))
        }
        LangCommand::Enum { file, maxlen } => {
            let t = load_tsr(file)?;
            let words = language::enumerate(&t, *maxlen)?;
            let lines = words
                .iter()
                .map(|w| if w.is_empty() { "ε".to_string() } else { w.render(t.actions()) })
                .collect();
            let json = json!({"maxlen": maxlen, "words": words.iter().map(|w| word_json(w, t.actions())).collect::<Vec<_>>()});
            Ok(Report::success(lines, json))
        }
    }
}

fn fmt(file: &Path, in_place: bool) -> Result<Report> {
    let text = load(file)?.to_text();
    write_or_print(&text, in_place.then_some(file))
}

fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Check { file } => check(file),
        Command::Modal { file } => modal(file),
        Command::Deadlocks { file } => deadlocks(file),
        Command::Refine {
            r#abstract,
            concrete,
            safe,
            oracle,
            strict,
        } => refine(r#abstract, concrete, *safe, *oracle, *strict),
        Command::Convert { file, to, output } => convert(file, *to, output.as_deref()),
        Command::Canon { file } => canon(file),
        Command::Iso { first, second } => iso(first, second),
        Command::Lang { query } => lang(query),
        Command::Dot { file } => {
            let system = load(file)?;
            let dot = system.to_dot();
            Ok(Report::success(vec![dot.trim_end().to_string()], json!({"dot": dot})))
        }
        Command::Fmt { file, in_place } => fmt(file, *in_place),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => report.emit(cli.json),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
