//! `ppgram`: command-line front end for parametric grammars.
//!
//! Exit status: 0 on success (including negative answers such as `member=no`
//! or `result=unsat`), 1 when a domain check fails, 2 on usage or parse errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ppgram_core::engines::{brute_force_member, derive, enumerate_language, MembershipAnswer};
use ppgram_core::oracle::{
    adversary_bound, run_learner, AdversarialTeacher, AdversaryMode, HypothesisSpace, Limits, Strategy, Teacher,
};
use ppgram_core::reductions::{
    dpll_solve, factor_via_ppcsg, factoring_to_ppcsg_with, parse_dimacs, sat_solve_via_grammar, sat_to_ppcfg,
    CollapseGadget, FactorOutcome,
};
use ppgram_core::text::{parse_grammar, parse_setting, write_grammar, write_plain, write_translation};
use ppgram_core::transforms::{binarize, homogenize, SettingTranslation};
use ppgram_core::{DerivationBudget, Mode, ParameterSetting, Ppcfg, Word, EPSILON_TOKEN};

/// Largest adversary size the CLI accepts.
const ADVERSARY_GUARD: usize = 14;
/// Largest variable count `solve-sat` enumerates.
const SAT_VARIABLE_GUARD: u32 = 24;

#[derive(Parser)]
#[command(
    name = "ppgram",
    version,
    about = "Parametric grammars: validation, membership, transforms, oracles and reductions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a grammar file; prints `ok` or one violation per line.
    Validate {
        path: PathBuf,
        /// Validate under this mode instead of the declared one.
        #[arg(long, value_enum)]
        mode: Option<GrammarMode>,
    },
    /// Write the plain grammar selected by a setting.
    Instantiate {
        path: PathBuf,
        #[arg(long)]
        setting: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Decide whether a word is derivable under a setting.
    Member {
        path: PathBuf,
        #[arg(long)]
        setting: Option<String>,
        /// Space-separated terminal names; `_eps` is the empty word.
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[command(flatten)]
        budget: Budget,
        /// Print the derivation, one sentential form per line.
        #[arg(long)]
        witness: bool,
    },
    /// List every derivable word up to a length, shortest first.
    Enumerate {
        path: PathBuf,
        #[arg(long)]
        setting: Option<String>,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        out: Output,
    },
    /// Pad every group to the largest arity.
    Homogenize {
        path: PathBuf,
        #[command(flatten)]
        out: Output,
        /// Write the setting translation here.
        #[arg(long)]
        translation: Option<PathBuf>,
    },
    /// Replace each k-ary group by a chain of k - 1 binary groups.
    Binarize {
        path: PathBuf,
        #[command(flatten)]
        out: Output,
        #[arg(long)]
        translation: Option<PathBuf>,
    },
    /// Run a learner against the adversarial teacher and count queries.
    Adversary {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = StrategyArg::Exhaustive)]
        strategy: StrategyArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Literal)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the transcript (tab-separated) here.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Encode a DIMACS formula as a grammar.
    ReduceSat {
        dimacs: PathBuf,
        #[command(flatten)]
        out: Output,
        #[command(flatten)]
        sat: SatInput,
    },
    /// Decide a DIMACS formula through the grammar and check it with DPLL.
    SolveSat {
        dimacs: PathBuf,
        #[command(flatten)]
        sat: SatInput,
    },
    /// Encode factoring of N as a context-sensitive grammar.
    ReduceFactor {
        #[arg(long)]
        n: u64,
        /// Also print the setting that encodes this divisor candidate.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, value_enum, default_value_t = GadgetArg::ValuePreserving)]
        gadget: GadgetArg,
        #[command(flatten)]
        out: Output,
    },
    /// Factor N through the grammar encoding.
    Factor {
        #[arg(long)]
        n: u64,
    },
}

#[derive(Args)]
struct Output {
    /// Output file; standard output when absent.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Budget {
    /// Longest sentential form kept (default `2|w| + 8`).
    #[arg(long)]
    budget_len: Option<usize>,
    #[arg(long, default_value_t = DerivationBudget::DEFAULT_MAX_FORMS)]
    budget_forms: usize,
}

#[derive(Args)]
struct SatInput {
    /// Reject clauses with more than three literals.
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GrammarMode {
    Cf,
    Cs,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Exhaustive,
    Random,
    Bitwise,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Literal,
    Sound,
}

#[derive(Clone, Copy, ValueEnum)]
enum GadgetArg {
    ValuePreserving,
    Lossy,
}

/// Marks errors in the invocation or its inputs (exit 2).
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Usage(msg.into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.is::<Usage>()) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn load_grammar(path: &Path) -> Result<Ppcfg> {
    parse_grammar(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(out: &Output, text: &str) -> Result<()> {
    match &out.output {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn setting_for(g: &Ppcfg, text: Option<&str>) -> Result<ParameterSetting> {
    match text {
        Some(t) => parse_setting(g, t).map_err(|e| usage(e.to_string())),
        None if g.choice_groups().is_empty() => Ok(ParameterSetting::all_first(g.n())),
        None => Err(usage("grammar has choice-bearing groups; pass --setting")),
    }
}

fn parse_word(g: &Ppcfg, text: &str) -> Result<Word> {
    let text = text.trim();
    if text == EPSILON_TOKEN {
        return Ok(Vec::new());
    }
    g.symbols
        .parse_word(text)
        .map_err(|e| usage(format!("word is not over the terminal alphabet: `{}`", e.0)))
}

fn render_word(g: &Ppcfg, w: &[ppgram_core::Symbol]) -> String {
    if w.is_empty() {
        EPSILON_TOKEN.to_owned()
    } else {
        g.symbols.render(w)
    }
}

fn budget(b: &Budget, word_len: usize) -> Result<DerivationBudget> {
    let max_len = b.budget_len.unwrap_or(2 * word_len + 8);
    DerivationBudget::new(max_len, b.budget_forms).map_err(|e| usage(e.to_string()))
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Validate { path, mode } => {
            let g = load_grammar(&path)?;
            let mode = match mode {
                Some(GrammarMode::Cf) => Mode::ContextFree,
                Some(GrammarMode::Cs) => Mode::ContextSensitive,
                None => g.mode,
            };
            let report = g.validate_as(mode);
            println!("{report}");
            Ok(if report.is_ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Instantiate { path, setting, out } => {
            let g = load_grammar(&path)?;
            let p = setting_for(&g, setting.as_deref())?;
            emit(&out, &write_plain(&g.instantiate(&p)?))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Member {
            path,
            setting,
            word,
            budget: b,
            witness,
        } => {
            let g = load_grammar(&path)?;
            let p = setting_for(&g, setting.as_deref())?;
            let w = parse_word(&g, &word)?;
            let plain = g.instantiate(&p)?;
            let b = budget(&b, w.len())?;
            let ans: MembershipAnswer = if plain.is_context_free() {
                brute_force_member(&plain, &w, &b)?
            } else {
                derive(&plain, &[plain.start], &w, &b, None)?
            };
            println!("member={}", ans.verdict.as_str());
            if let (true, Some(d)) = (witness, &ans.witness) {
                println!("{}", d.render(&plain));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Enumerate {
            path,
            setting,
            max_len,
            budget: b,
            out,
        } => {
            let g = load_grammar(&path)?;
            let p = setting_for(&g, setting.as_deref())?;
            let plain = g.instantiate(&p)?;
            let lang = enumerate_language(&plain, max_len, &budget(&b, max_len)?)?;
            let mut words: Vec<&Word> = lang.words.iter().collect();
            words.sort_by(|a, b| g.symbols.shortlex_cmp(a, b));
            let mut text = String::new();
            for w in words {
                let _ = writeln!(text, "{}", render_word(&g, w));
            }
            emit(&out, &text)?;
            if !lang.complete {
                eprintln!("warning: derivation budget reached; list may be incomplete");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Homogenize { path, out, translation } => {
            let g = load_grammar(&path)?;
            let (h, t) = homogenize(&g)?;
            write_transform(&out, translation.as_deref(), &h, &t)
        }
        Command::Binarize { path, out, translation } => {
            let g = load_grammar(&path)?;
            let (b, t) = binarize(&g)?;
            write_transform(&out, translation.as_deref(), &b, &t)
        }
        Command::Adversary {
            n,
            strategy,
            mode,
            seed,
            output,
        } => adversary(n, strategy, mode, seed, output),
        Command::ReduceSat { dimacs, out, sat } => {
            let inst = parse_dimacs(&read(&dimacs)?, sat.strict).map_err(|e| usage(e.to_string()))?;
            let r = sat_to_ppcfg(&inst);
            emit(&out, &write_grammar(&r.grammar))?;
            if out.output.is_some() {
                println!(
                    "reduce-sat vars={} clauses={} groups={}",
                    inst.num_vars,
                    inst.clauses.len(),
                    r.grammar.n()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::SolveSat { dimacs, sat } => {
            let inst = parse_dimacs(&read(&dimacs)?, sat.strict).map_err(|e| usage(e.to_string()))?;
            if inst.num_vars as u32 > SAT_VARIABLE_GUARD {
                return Err(usage(format!(
                    "{} variables exceed the guard of {SAT_VARIABLE_GUARD}",
                    inst.num_vars
                )));
            }
            let via = sat_solve_via_grammar(&inst, 1u128 << SAT_VARIABLE_GUARD)?;
            let direct = dpll_solve(&inst);
            if via.is_some() != direct.is_some() {
                bail!("grammar search and DPLL disagree on satisfiability");
            }
            match via {
                Some((a, _)) => println!("sat result=sat assignment={}", a.to_bits()),
                None => println!("sat result=unsat"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ReduceFactor { n, p, gadget, out } => {
            let gadget = match gadget {
                GadgetArg::ValuePreserving => CollapseGadget::ValuePreserving,
                GadgetArg::Lossy => CollapseGadget::Lossy,
            };
            let r = factoring_to_ppcsg_with(n, gadget).map_err(|e| usage(e.to_string()))?;
            emit(&out, &write_grammar(&r.grammar))?;
            let mut line = format!("reduce-factor n={n} target={}", r.target.render());
            if let Some(p) = p {
                let s = r.number_to_setting(p).map_err(|e| usage(e.to_string()))?;
                let choices: Vec<String> = s.choices().iter().map(usize::to_string).collect();
                let _ = write!(line, " p={p} setting={}", choices.join(","));
            }
            if out.output.is_some() {
                println!("{line}");
            } else {
                eprintln!("{line}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Factor { n } => {
            match factor_via_ppcsg(n).map_err(|e| match e {
                ppgram_core::reductions::FactoringError::ZeroN => usage(e.to_string()),
                other => anyhow!(other),
            })? {
                FactorOutcome::Factors { p, q } => println!("factor n={n} p={p} q={q}"),
                FactorOutcome::PrimeOrUnit => println!("factor n={n} result=prime-or-unit"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn write_transform(out: &Output, translation: Option<&Path>, g: &Ppcfg, t: &SettingTranslation) -> Result<ExitCode> {
    emit(out, &write_grammar(g))?;
    if let Some(path) = translation {
        fs::write(path, write_translation(t)).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn adversary(n: usize, strategy: StrategyArg, mode: ModeArg, seed: u64, output: Option<PathBuf>) -> Result<ExitCode> {
    if n == 0 || n > ADVERSARY_GUARD {
        return Err(usage(format!("N must be in 1..={ADVERSARY_GUARD}, got {n}")));
    }
    let strategy = match strategy {
        StrategyArg::Exhaustive => Strategy::ExhaustiveEquivalence,
        StrategyArg::Random => Strategy::RandomMembershipThenEquivalence,
        StrategyArg::Bitwise => Strategy::BitwiseProbe,
    };
    let (mode, mode_name) = match mode {
        ModeArg::Literal => (AdversaryMode::Literal, "literal"),
        ModeArg::Sound => (AdversaryMode::Sound, "sound"),
    };
    let mut teacher = AdversarialTeacher::new(n, mode)?;
    let space = HypothesisSpace::from_family(teacher.family().clone(), n, &DerivationBudget::default())?;
    let limits = Limits {
        max_queries: 4 << n,
        seed,
    };
    let (transcript, _) = run_learner(strategy, &space, &mut teacher, limits)?;
    let queries = transcript
        .first_true()
        .map_or(transcript.distinct(), |e| e.distinct_so_far);
    let bound = adversary_bound(n);
    if let Some(path) = output {
        fs::write(&path, transcript.to_tsv(&space.family.symbols))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    println!(
        "N={n} strategy={} mode={mode_name} queries={queries} bound={bound} ok={}",
        strategy.name(),
        queries as u64 >= bound
    );
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
