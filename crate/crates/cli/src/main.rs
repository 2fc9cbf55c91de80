use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mpsynth::lp::ExportOptions;
use mpsynth::mdp::explicit::load_explicit_model;
use mpsynth::mdp::Model;
use mpsynth::pareto::{write_csv, write_svg};
use mpsynth::prism::{load_prism_model, parse_property, Query, DEFAULT_STATE_CAP};
use mpsynth::query::{evaluate, export_query, QueryOutcome};
use mpsynth::rational::parse_rational;
use mpsynth::session::{Session, HELP};
use mpsynth::strategy::{strategy_from_json, strategy_to_json, Strategy};
use mpsynth::{Error, Rational};

#[derive(Parser)]
#[command(
    name = "mpsynth",
    version,
    about = "Multi-objective mean-payoff strategy synthesis for MDPs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dialect {
    Explicit,
    Prism,
}

#[derive(Args)]
struct ModelArgs {
    /// Model file.
    #[arg(long)]
    model: PathBuf,
    /// Model language; guessed from the extension (.prism, .nm, .pm) when omitted.
    #[arg(long, value_enum)]
    dialect: Option<Dialect>,
    /// Upper bound on explored states for PRISM models.
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    max_states: usize,
}

#[derive(Args)]
struct PropArgs {
    /// Property text, or a file containing it.
    #[arg(long)]
    prop: String,
    /// Target gap for Pareto approximation.
    #[arg(long, default_value = "1/100", value_parser = positive_rational)]
    epsilon: Rational,
}

#[derive(Subcommand)]
enum Command {
    /// Print the verdict, optimum or Pareto summary of a property.
    Check {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        prop: PropArgs,
    },
    /// Like `check`, and write the witness strategy or Pareto artifacts.
    Synth {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        prop: PropArgs,
        #[arg(long)]
        out_strategy: Option<PathBuf>,
        #[arg(long)]
        out_csv: Option<PathBuf>,
        #[arg(long)]
        out_svg: Option<PathBuf>,
    },
    /// Approximate the Pareto curve of a property with two numerical items.
    Pareto {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        prop: PropArgs,
        #[arg(long)]
        out_csv: Option<PathBuf>,
        #[arg(long)]
        out_svg: Option<PathBuf>,
    },
    /// Simulate a strategy read from JSON or synthesized for a property.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, conflicts_with = "strategy", required_unless_present = "strategy")]
        prop: Option<String>,
        /// Strategy JSON file.
        #[arg(long)]
        strategy: Option<PathBuf>,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Read session commands from standard input.
        #[arg(long)]
        interactive: bool,
    },
    /// Write the LP (or MILP, for mlessmulti) behind a property.
    ExportLp {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        prop: String,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out_lp: Option<PathBuf>,
        /// Big-M for indicator rows whose atoms carry none.
        #[arg(long, value_parser = positive_rational)]
        big_m: Option<Rational>,
        /// Margin turning strict atoms `e > c` into `e >= c + eps`.
        #[arg(long, value_parser = positive_rational)]
        strict_eps: Option<Rational>,
    },
}

fn positive_rational(s: &str) -> Result<Rational, String> {
    let r = parse_rational(s)?;
    if r > Rational::from_integer(0.into()) {
        Ok(r)
    } else {
        Err(format!("{s} is not positive"))
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn load_model(args: &ModelArgs) -> Result<Model, String> {
    let text = read(&args.model)?;
    let dialect = args
        .dialect
        .unwrap_or_else(|| match args.model.extension().and_then(|e| e.to_str()) {
            Some("prism" | "nm" | "pm") => Dialect::Prism,
            _ => Dialect::Explicit,
        });
    let model = match dialect {
        Dialect::Explicit => load_explicit_model(&text),
        Dialect::Prism => load_prism_model(&text, args.max_states),
    };
    model.map_err(|e| format!("{}: {e}", args.model.display()))
}

fn load_query(prop: &str) -> Result<Query, String> {
    let path = Path::new(prop);
    let text = if path.is_file() {
        read(path)?
    } else {
        prop.to_string()
    };
    parse_property(text.trim()).map_err(|e| e.to_string())
}

fn err(e: Error) -> String {
    e.to_string()
}

fn write_pareto(outcome: &QueryOutcome, csv: Option<&PathBuf>, svg: Option<&PathBuf>) -> Result<(), String> {
    let QueryOutcome::Pareto { approx, .. } = outcome else {
        if csv.is_some() || svg.is_some() {
            return Err("--out-csv and --out-svg need a property with two numerical items".into());
        }
        return Ok(());
    };
    if let Some(p) = csv {
        write(p, &write_csv(approx))?;
    }
    if let Some(p) = svg {
        if approx.is_empty() {
            eprintln!("no achievable points; {} not written", p.display());
        } else {
            write(p, &write_svg(approx, 640, 480).map_err(err)?)?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), String> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut say = |s: &str| out.write_all(s.as_bytes()).map_err(|e| e.to_string());
    match cli.command {
        Command::Check { model, prop } => {
            let m = load_model(&model)?;
            let q = load_query(&prop.prop)?;
            say(&evaluate(&m, &q, &prop.epsilon).map_err(err)?.summary())
        }
        Command::Synth {
            model,
            prop,
            out_strategy,
            out_csv,
            out_svg,
        } => {
            let m = load_model(&model)?;
            let q = load_query(&prop.prop)?;
            let outcome = evaluate(&m, &q, &prop.epsilon).map_err(err)?;
            say(&outcome.summary())?;
            if let Some(p) = &out_strategy {
                match outcome.strategy() {
                    Some(st) => write(p, &strategy_to_json(&m.mdp, st))?,
                    None => eprintln!("no witness strategy; {} not written", p.display()),
                }
            }
            write_pareto(&outcome, out_csv.as_ref(), out_svg.as_ref())
        }
        Command::Pareto {
            model,
            prop,
            out_csv,
            out_svg,
        } => {
            let m = load_model(&model)?;
            let q = load_query(&prop.prop)?;
            if q.numerical().count() != 2 {
                return Err("pareto needs a property with exactly two numerical items".into());
            }
            let outcome = evaluate(&m, &q, &prop.epsilon).map_err(err)?;
            say(&outcome.summary())?;
            write_pareto(&outcome, out_csv.as_ref(), out_svg.as_ref())
        }
        Command::Simulate {
            model,
            prop,
            strategy,
            steps,
            seed,
            interactive,
        } => {
            let m = load_model(&model)?;
            let st: Strategy = match (&strategy, &prop) {
                (Some(path), _) => strategy_from_json(&m.mdp, &read(path)?).map_err(err)?,
                (None, Some(prop)) => {
                    let q = load_query(prop)?;
                    let outcome = evaluate(&m, &q, &Rational::new(1.into(), 100.into())).map_err(err)?;
                    match outcome.strategy() {
                        Some(st) => st.clone(),
                        None => return Err(format!("no strategy to simulate: {}", outcome.summary().trim())),
                    }
                }
                (None, None) => unreachable!("clap requires --prop or --strategy"),
            };
            let mut session = Session::new(&m.mdp, &m.rewards, st, seed);
            if !interactive {
                let start = format!("start {}\n", session.state_name());
                let text = session
                    .handle(&format!("step {steps}"))
                    .expect("step never quits");
                return say(&(start + &text));
            }
            say(&format!("start {}\n{HELP}", session.state_name()))?;
            for line in io::stdin().lock().lines() {
                let line = line.map_err(|e| e.to_string())?;
                match session.handle(&line) {
                    Some(text) => say(&text)?,
                    None => break,
                }
            }
            Ok(())
        }
        Command::ExportLp {
            model,
            prop,
            out_lp,
            big_m,
            strict_eps,
        } => {
            let m = load_model(&model)?;
            let q = load_query(&prop)?;
            let opts = ExportOptions {
                big_m,
                strict_epsilon: strict_eps,
            };
            let text = export_query(&m, &q, &opts).map_err(|e| match e {
                Error::Export(msg) if msg.contains("big-M") || msg.contains("epsilon") => {
                    format!("LP export: {msg} (see --big-m and --strict-eps)")
                }
                other => other.to_string(),
            })?;
            match out_lp {
                Some(p) => write(&p, &text),
                None => say(&text),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
