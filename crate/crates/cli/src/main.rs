//! `ncforge`: exact verification CLI for noncommutative differential
//! calculus on localized quiver path algebras.

use ncforge_cli::{config, runner};
use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use ncforge_core::confluence::check_confluence;
use ncforge_core::expr;
use ncforge_core::fusion;
use ncforge_core::presentation::{self, LetterKind};
use ncforge_core::quiver::{self, DimensionVector};
use ncforge_core::repspaces;
use ncforge_core::structures;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ncforge",
    about = "Exact symbolic verification for noncommutative differential calculus on quivers",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite from a JSON configuration.
    Run {
        /// Path to the suite configuration (a single config or an array).
        config: PathBuf,
        /// Emit the structured JSON report on stdout instead of text.
        #[arg(long)]
        json: bool,
        /// Write the JSON report(s) to a file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normalize an expression over the algebra described by a quiver file.
    Normalize {
        /// Quiver JSON file describing the algebra (localized double).
        quiver: PathBuf,
        /// Expression in the surface grammar.
        expr: String,
        /// Interpret over the plain path algebra of the double instead of
        /// the localized one.
        #[arg(long)]
        plain: bool,
    },
    /// Fuse two vertices of the localized double of a quiver and print the
    /// fused presentation.
    Fuse {
        quiver: PathBuf,
        /// The kept and merged vertex ids.
        #[arg(long, num_args = 2, value_names = ["V1", "V2"])]
        pair: Vec<String>,
    },
    /// Randomized exact verification of the traced moment identities on
    /// representation spaces.
    Rep {
        quiver: PathBuf,
        /// Comma-separated dimensions, one per vertex in declaration order.
        #[arg(long)]
        dims: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(3)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { config: path, json, out } => {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading {}", path.display()))?;
            let configs: Vec<config::SuiteConfig> = if text.trim_start().starts_with('[') {
                serde_json::from_str(&text).context("parsing config array")?
            } else {
                vec![serde_json::from_str(&text).context("parsing config")?]
            };
            let mut reports = Vec::new();
            for cfg in &configs {
                let report = runner::run_suite(cfg)?;
                if !json {
                    print!("{}", report.render_text());
                    eprintln!("({} ran in {} ms)", report.suite, report.elapsed_ms);
                }
                reports.push(report);
            }
            let payload = serde_json::to_string_pretty(&reports).unwrap();
            if json {
                println!("{payload}");
            }
            if let Some(out) = out {
                std::fs::write(&out, payload)
                    .with_context(|| format!("writing {}", out.display()))?;
            }
            Ok(ExitCode::from(runner::exit_code(&reports) as u8))
        }
        Command::Normalize { quiver: path, expr: text, plain } => {
            let file = config::load_quiver_file(&path)?;
            let q = config::quiver_from_file(&file)?;
            let dq = quiver::double(&q);
            let p = if plain {
                presentation::path_algebra(&dq.quiver)
            } else {
                presentation::double_localized(&dq)
            };
            let v = expr::parse_eval(&p, &text).map_err(|e| anyhow!("{e}"))?;
            match v {
                expr::Value::Elt(e) => println!("{}", p.element_string(&e)),
                expr::Value::Form(f) => println!("{}", ncforge_core::forms::form_string(&p, &f)),
                _ => println!("(double derivation or polyvector)"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fuse { quiver: path, pair } => {
            let file = config::load_quiver_file(&path)?;
            let q = config::quiver_from_file(&file)?;
            let p = presentation::double_localized(&quiver::double(&q));
            let ctx = fusion::fuse_presentation(&p, &pair[0], &pair[1])
                .map_err(|e| anyhow!("{e}"))?;
            println!("fused vertices: {}", ctx.fused.vertices.join(", "));
            for l in &ctx.fused.letters {
                let kind = match l.kind {
                    LetterKind::Arrow => "arrow",
                    LetterKind::Inverse => "inverse",
                    LetterKind::Unit => "unit",
                };
                println!(
                    "  letter {:8} {} -> {}  ({kind})",
                    l.id,
                    ctx.fused.vertices[l.src as usize],
                    ctx.fused.vertices[l.tgt as usize]
                );
            }
            for r in &ctx.fused.rules {
                let lhs = ctx
                    .fused
                    .word_string(&ncforge_core::word::Word::path(r.lhs.clone()));
                println!("  rule {} -> {}", lhs, ctx.fused.element_string(&r.rhs));
            }
            let rep = check_confluence(&ctx.fused).map_err(|e| anyhow!("{e}"))?;
            println!(
                "confluence: {} overlaps, all resolvable: {}",
                rep.overlaps.len(),
                rep.all_resolvable
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Rep { quiver: path, dims, trials, seed } => {
            let file = config::load_quiver_file(&path)?;
            let q = config::quiver_from_file(&file)?;
            let dims: Vec<usize> = dims
                .split(',')
                .map(|s| s.trim().parse().context("parsing dimensions"))
                .collect::<Result<_>>()?;
            let (data, _) = structures::standard_multiplicative(&q)?;
            let dv: DimensionVector = config::folded_dims(&q, &dims)?;
            let checks = repspaces::check_moment_conditions(&data, &dv, trials, seed)
                .map_err(|e| anyhow!("{e}"))?;
            let report = ncforge_core::Report::new("rep-moment", Some(seed), checks);
            print!("{}", report.render_text());
            let reports = [report];
            Ok(ExitCode::from(runner::exit_code(&reports) as u8))
        }
    }
}
