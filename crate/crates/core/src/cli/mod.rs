//! The `hsf` command line.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 invalid ruleset, 3 unknown
//! words under `--strict`.

mod repl;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::generator::{enumerate_variants_capped, round_trip_check, DEFAULT_CAP};
use crate::lexicon::{load_ruleset, validate_ruleset, Diagnostic};
use crate::pipeline::{Engine, EngineError, ParseTrace};
use crate::stats::{bench, ruleset_stats};
use crate::tokenizer::Token;
pub use repl::run_repl;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Plain,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "hsf", version, about = "Layered synonym-forest text normalization")]
struct Cli {
    /// Ruleset file (JSON).
    #[arg(short, long, global = true, env = "HSF_RULESET")]
    ruleset: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,
    /// Exit with status 3 when the input contains unknown words.
    #[arg(long, global = true)]
    strict: bool,
    /// Layer to inspect (tokenize, digest).
    #[arg(long, global = true)]
    layer: Option<u32>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Input {
    /// Text to process. Read from standard input when neither this nor
    /// --file is given.
    #[arg(conflicts_with = "file")]
    text: Option<String>,
    #[arg(short, long)]
    file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a ruleset and list its diagnostics.
    Validate,
    /// Show the tokens of a layer.
    Tokenize(Input),
    /// Show the (representative, label) tuples of a layer.
    Digest(Input),
    /// Print the canonical form.
    Normalize(Input),
    /// Print the full layer-by-layer trace.
    Parse(Input),
    /// Enumerate the surface variants of a framework.
    Generate {
        framework: String,
        /// Fixed surface for a slot, as INDEX=SURFACE.
        #[arg(long = "slot", value_parser = parse_slot)]
        slots: Vec<(usize, String)>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Normalize every variant and fail unless all reach the canonical form.
        #[arg(long)]
        check: bool,
    },
    /// Report ruleset size and the size-model footprint.
    Stats,
    /// Time normalization over a corpus, one input per line.
    Bench {
        corpus: Option<PathBuf>,
        #[arg(short, long, conflicts_with = "corpus")]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        repeat: usize,
    },
    /// Interactive session.
    Repl,
}

fn parse_slot(s: &str) -> Result<(usize, String), String> {
    let (i, surface) = s.split_once('=').ok_or("expected INDEX=SURFACE")?;
    let i = i.trim().parse().map_err(|e| format!("bad slot index '{i}': {e}"))?;
    Ok((i, surface.to_string()))
}

/// A failure together with the exit code it maps to.
struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
    diagnostics: Vec<Diagnostic>,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            kind: "usage",
            message: message.into(),
            diagnostics: Vec::new(),
        }
    }

    fn io(what: &Path, e: std::io::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            kind: "io",
            message: format!("{}: {e}", what.display()),
            diagnostics: Vec::new(),
        }
    }

    fn invalid(message: String, diagnostics: Vec<Diagnostic>) -> Self {
        Failure {
            code: EXIT_INVALID,
            kind: "invalid ruleset",
            message,
            diagnostics,
        }
    }

    fn report(&self, format: Format, stderr: &mut dyn Write) {
        let _ = match format {
            Format::Json => writeln!(
                stderr,
                "{}",
                json!({"error": {"kind": self.kind, "message": self.message, "diagnostics": self.diagnostics}})
            ),
            Format::Plain => {
                let _ = writeln!(stderr, "error: {}", self.message);
                self.diagnostics.iter().try_for_each(|d| writeln!(stderr, "{d}"))
            }
        };
    }
}

type Outcome = Result<i32, Failure>;

struct Ctx<'a> {
    cli: &'a Cli,
    stdin: &'a mut dyn BufRead,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn ruleset_path(&self) -> Result<&Path, Failure> {
        self.cli
            .ruleset
            .as_deref()
            .ok_or_else(|| Failure::usage("no ruleset given (use -r or HSF_RULESET)"))
    }

    fn engine(&self) -> Result<Engine, Failure> {
        let path = self.ruleset_path()?;
        let bytes = fs::read(path).map_err(|e| Failure::io(path, e))?;
        Engine::from_json(&bytes).map_err(|e| match e {
            EngineError::Invalid(diags) => Failure::invalid(format!("ruleset has {} error(s)", diags.len()), diags),
            other => Failure::invalid(other.to_string(), Vec::new()),
        })
    }

    fn read_input(&mut self, input: &Input) -> Result<String, Failure> {
        match (&input.text, &input.file) {
            (Some(t), _) => Ok(t.clone()),
            (None, Some(path)) => fs::read_to_string(path).map_err(|e| Failure::io(path, e)),
            (None, None) => {
                let mut s = String::new();
                self.stdin
                    .read_to_string(&mut s)
                    .map_err(|e| Failure::io(Path::new("<stdin>"), e))?;
                Ok(s)
            }
        }
    }

    /// Sends the primary result to `--out` or standard output.
    fn emit(&mut self, text: &str) -> Result<(), Failure> {
        match &self.cli.out {
            Some(path) => fs::write(path, format!("{text}\n")).map_err(|e| Failure::io(path, e)),
            None => writeln!(self.stdout, "{text}").map_err(|e| Failure::io(Path::new("<stdout>"), e)),
        }
    }

    fn emit_json<T: Serialize + ?Sized>(&mut self, value: &T) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(value).expect("cli output types serialize");
        self.emit(&text)
    }

    fn strict_code(&self, unknown_count: usize) -> i32 {
        if self.cli.strict && unknown_count > 0 {
            EXIT_UNKNOWN
        } else {
            EXIT_OK
        }
    }

    fn parse_input(&mut self, input: &Input) -> Result<(Engine, ParseTrace), Failure> {
        let engine = self.engine()?;
        let text = self.read_input(input)?;
        let trace = engine.parse(&text).map_err(|e| Failure::usage(e.to_string()))?;
        Ok((engine, trace))
    }
}

fn token_line(tokens: &[Token]) -> String {
    tokens
        .iter()
        .filter(|t| !t.is_filler())
        .map(|t| match &t.label {
            Some(l) => format!("{}/{}", t.surface, l),
            None => t.surface.clone(),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn layer_index(engine: &Engine, layer: Option<u32>) -> Result<usize, Failure> {
    let id = layer.unwrap_or(1);
    if id == 0 || id as usize > engine.layers().len() {
        return Err(Failure::usage(format!(
            "no layer {id} (ruleset has {})",
            engine.layers().len()
        )));
    }
    Ok(id as usize - 1)
}

fn validate(ctx: &mut Ctx) -> Outcome {
    let path = ctx.ruleset_path()?;
    let bytes = fs::read(path).map_err(|e| Failure::io(path, e))?;
    let rs = load_ruleset(&bytes).map_err(|e| Failure::invalid(e.to_string(), Vec::new()))?;
    let diags = validate_ruleset(&rs);
    let valid = !diags.iter().any(Diagnostic::is_error);
    match ctx.cli.format {
        Format::Json => ctx.emit_json(&json!({"valid": valid, "diagnostics": diags}))?,
        Format::Plain => {
            let mut lines: Vec<String> = diags.iter().map(ToString::to_string).collect();
            lines.push(if valid { "ok".into() } else { "invalid".into() });
            ctx.emit(&lines.join("\n"))?;
        }
    }
    Ok(if valid { EXIT_OK } else { EXIT_INVALID })
}

fn tokenize(ctx: &mut Ctx, input: &Input, digest: bool) -> Outcome {
    let (engine, trace) = ctx.parse_input(input)?;
    let li = layer_index(&engine, ctx.cli.layer)?;
    let records = trace.sentences.iter().map(|s| &s.layers[li]);
    if digest {
        let words: Vec<_> = records.flat_map(|r| r.digested.iter()).collect();
        match ctx.cli.format {
            Format::Json => ctx.emit_json(&words)?,
            Format::Plain => {
                let lines: Vec<String> = words
                    .iter()
                    .map(|w| format!("({}, {})", w.representative, w.label))
                    .collect();
                ctx.emit(&lines.join("\n"))?;
            }
        }
    } else {
        let tokens: Vec<&Token> = records.flat_map(|r| r.tokens.iter()).collect();
        match ctx.cli.format {
            Format::Json => ctx.emit_json(&tokens)?,
            Format::Plain => {
                let lines: Vec<String> = tokens
                    .iter()
                    .map(|t| {
                        format!(
                            "{}..{}\t{}\t{}\t{}",
                            t.span.start,
                            t.span.end,
                            serde_json::to_value(t.kind).expect("kind serializes").as_str().unwrap_or(""),
                            t.label.as_deref().unwrap_or("-"),
                            t.surface.escape_debug()
                        )
                    })
                    .collect();
                ctx.emit(&lines.join("\n"))?;
            }
        }
    }
    Ok(ctx.strict_code(trace.unknown_count))
}

fn normalize(ctx: &mut Ctx, input: &Input, full: bool) -> Outcome {
    let (_, trace) = ctx.parse_input(input)?;
    match (full, ctx.cli.format) {
        (true, _) => ctx.emit_json(&trace)?,
        (false, Format::Json) => ctx.emit_json(&json!({
            "canonical": trace.canonical,
            "unknown_count": trace.unknown_count,
        }))?,
        (false, Format::Plain) => ctx.emit(&trace.canonical)?,
    }
    Ok(ctx.strict_code(trace.unknown_count))
}

fn generate(ctx: &mut Ctx, framework: &str, slots: &[(usize, String)], cap: usize, check: bool) -> Outcome {
    let engine = ctx.engine()?;
    let slots: BTreeMap<usize, String> = slots.iter().cloned().collect();
    let vs = enumerate_variants_capped(&engine, framework, &slots, cap).map_err(|e| Failure::usage(e.to_string()))?;
    let report = check.then(|| round_trip_check(&engine, &vs));
    match ctx.cli.format {
        Format::Json => ctx.emit_json(&json!({"variants": vs, "round_trip": report}))?,
        Format::Plain => ctx.emit(&vs.variants.join("\n"))?,
    }
    match report {
        Some(r) if !r.passed() => {
            let lines: Vec<String> = r
                .failures
                .iter()
                .map(|f| format!("round trip failed: {} -> {} (expected {})", f.variant, f.got, r.expected))
                .collect();
            Err(Failure {
                code: EXIT_USAGE,
                kind: "round trip",
                message: lines.join("\n"),
                diagnostics: Vec::new(),
            })
        }
        _ => Ok(EXIT_OK),
    }
}

fn stats(ctx: &mut Ctx) -> Outcome {
    let engine = ctx.engine()?;
    let path = ctx.ruleset_path()?;
    let size = fs::metadata(path).map_err(|e| Failure::io(path, e))?.len();
    let s = ruleset_stats(&engine, Some(size));
    match ctx.cli.format {
        Format::Json => ctx.emit_json(&s)?,
        Format::Plain => {
            let mut lines = vec![format!("on-disk bytes: {size}")];
            for l in &s.layers {
                lines.push(format!(
                    "layer {}: {} classes, {} members, {} recognizers, {} frameworks, {} index nodes, ~{} bytes",
                    l.id, l.classes, l.members, l.recognizers, l.frameworks, l.index_nodes, l.estimated_bytes
                ));
            }
            lines.push(format!("total members: {}", s.total_members));
            lines.push(format!("estimated resident bytes: {}", s.estimated_resident_bytes));
            ctx.emit(&lines.join("\n"))?;
        }
    }
    Ok(EXIT_OK)
}

fn run_bench(ctx: &mut Ctx, corpus: Option<&Path>, repeat: usize) -> Outcome {
    let engine = ctx.engine()?;
    let path = corpus.ok_or_else(|| Failure::usage("no corpus given"))?;
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let r = bench(&engine, &text, repeat).map_err(|e| Failure::usage(e.to_string()))?;
    match ctx.cli.format {
        Format::Json => ctx.emit_json(&r)?,
        Format::Plain => ctx.emit(&format!(
            "lines: {}\nchars: {}\nrepetitions: {}\nwall seconds: {:.4}\nchars/second: {:.0}\np50 latency: {:.1} us\np99 latency: {:.1} us\npeak working set: {} bytes",
            r.lines,
            r.chars,
            r.repetitions,
            r.wall_seconds,
            r.chars_per_second,
            r.p50_micros,
            r.p99_micros,
            r.peak_working_set_bytes
        ))?,
    }
    Ok(EXIT_OK)
}

fn dispatch(ctx: &mut Ctx) -> Outcome {
    let cli = ctx.cli;
    match &cli.command {
        Command::Validate => validate(ctx),
        Command::Tokenize(input) => tokenize(ctx, input, false),
        Command::Digest(input) => tokenize(ctx, input, true),
        Command::Normalize(input) => normalize(ctx, input, false),
        Command::Parse(input) => normalize(ctx, input, true),
        Command::Generate {
            framework,
            slots,
            cap,
            check,
        } => generate(ctx, framework, slots, *cap, *check),
        Command::Stats => stats(ctx),
        Command::Bench { corpus, file, repeat } => run_bench(ctx, corpus.as_deref().or(file.as_deref()), *repeat),
        Command::Repl => {
            let engine = ctx.engine()?;
            run_repl(&engine, &mut *ctx.stdin, &mut *ctx.stdout).map_err(|e| Failure::io(Path::new("<stdio>"), e))?;
            Ok(EXIT_OK)
        }
    }
}

/// Whether the raw arguments ask for JSON, for errors raised before clap has
/// produced a `Cli`.
fn wants_json(args: &[OsString]) -> bool {
    args.windows(2).any(|w| w[0] == "--format" && w[1] == "json") || args.iter().any(|a| a == "--format=json")
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let format = if wants_json(&args) { Format::Json } else { Format::Plain };
                    match format {
                        Format::Json => Failure::usage(e.kind().to_string()).report(format, stderr),
                        Format::Plain => {
                            let _ = write!(stderr, "{e}");
                        }
                    }
                    EXIT_USAGE
                }
            };
        }
    };
    let format = cli.format;
    let mut ctx = Ctx {
        cli: &cli,
        stdin,
        stdout,
        stderr,
    };
    match dispatch(&mut ctx) {
        Ok(code) => code,
        Err(f) => {
            f.report(format, ctx.stderr);
            f.code
        }
    }
}
