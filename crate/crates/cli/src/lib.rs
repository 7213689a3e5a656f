//! The `og` command line: typecheck, solve, verify and draw `.og` files.
//!
//! Exit codes: 0 success, 1 usage, 2 parse, type or profile errors and
//! non-closed games, 3 budget refusals, 4 I/O failures.

mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use og_core::{dsl, ClosedGame, Quantifier, SearchConfig};
use serde_json::Value as Json;
use thiserror::Error;

pub use report::{check_report, eq_report, verify_report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{}{source}", if positioned(source) { "" } else { " " })]
    Game {
        path: String,
        source: og_core::Error,
    },
    #[error("profile: {0}")]
    Profile(String),
}

fn positioned(e: &og_core::Error) -> bool {
    matches!(
        e,
        og_core::Error::Syntax { .. } | og_core::Error::Type { .. }
    )
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Game { source, .. } if source.is_budget() => 3,
            CliError::Game { .. } | CliError::Profile(_) => 2,
            CliError::Io { .. } => 4,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "og",
    version,
    about = "Typecheck, solve and draw open-game diagrams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and typecheck a file and report its interface.
    Check(Common),
    /// Enumerate every equilibrium of a closed game.
    Eq {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        search: Search,
    },
    /// Check one strategy profile and report payoffs and deviations.
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        search: Search,
        /// Profile as inline JSON or a path to a JSON file.
        #[arg(long)]
        profile: String,
    },
    /// Export the diagram as Graphviz DOT.
    Dot(Common),
}

#[derive(Args, Debug)]
struct Common {
    file: PathBuf,
    /// Override a `param` declaration, as `name=value`. Repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE", value_parser = parse_param)]
    params: Vec<(String, String)>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Search {
    /// Tie tolerance for utility-maximising players.
    #[arg(long, default_value_t = 1e-9, value_parser = parse_tol, allow_negative_numbers = true)]
    tol: f64,
    /// Maximum number of equilibrium checks.
    #[arg(long, default_value_t = 10_000_000, value_parser = parse_positive)]
    budget: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, env = "OG_WORKERS", value_parser = parse_positive)]
    workers: Option<u64>,
    #[arg(long, value_enum, default_value_t = QuantifierArg::Reachable)]
    quantifier: QuantifierArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum QuantifierArg {
    Reachable,
    Literal,
}

fn parse_param(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(format!("expected NAME=VALUE, got `{s}`")),
    }
}

fn parse_positive(s: &str) -> Result<u64, String> {
    match s.parse::<u64>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("expected a positive integer, got `{s}`")),
    }
}

fn parse_tol(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t >= 0.0 && t.is_finite() => Ok(t),
        _ => Err(format!("tolerance must be a finite number >= 0, got `{s}`")),
    }
}

impl Search {
    fn config(&self) -> SearchConfig {
        let workers = self.workers.map(|w| w as usize).unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
        let quantifier = match self.quantifier {
            QuantifierArg::Reachable => Quantifier::Reachable,
            QuantifierArg::Literal => Quantifier::Literal,
        };
        SearchConfig {
            tol: self.tol,
            budget: self.budget,
            workers: workers.max(1),
            quantifier,
        }
    }
}

fn game_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "game".into())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn game_err(path: &Path) -> impl Fn(og_core::Error) -> CliError + '_ {
    move |source| CliError::Game {
        path: path.display().to_string(),
        source,
    }
}

fn load(c: &Common) -> Result<dsl::Checked, CliError> {
    dsl::load(&read(&c.file)?, &c.params).map_err(game_err(&c.file))
}

fn closed(c: &Common) -> Result<ClosedGame, CliError> {
    let g = load(c)?.elaborate().map_err(game_err(&c.file))?;
    ClosedGame::try_from(g).map_err(game_err(&c.file))
}

fn read_profile(arg: &str) -> Result<Json, CliError> {
    let text = if arg.trim_start().starts_with(['{', '[']) {
        arg.to_string()
    } else {
        read(Path::new(arg))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Profile(e.to_string()))
}

/// Runs one command and returns what it prints.
fn execute(cli: Cli) -> Result<(String, Option<PathBuf>), CliError> {
    match cli.command {
        Command::Check(c) => {
            let checked = load(&c)?;
            let game = checked.elaborate().map_err(game_err(&c.file))?;
            let r = check_report(&game_name(&c.file), &game);
            Ok((render(&r, c.format, report::check_text), c.out))
        }
        Command::Eq { common, search } => {
            let g = closed(&common)?;
            let start = Instant::now();
            let eqs = og_core::equilibria(&g, &search.config()).map_err(game_err(&common.file))?;
            let r = eq_report(&game_name(&common.file), &g, &eqs, start.elapsed())
                .map_err(game_err(&common.file))?;
            Ok((render(&r, common.format, report::eq_text), common.out))
        }
        Command::Verify {
            common,
            search,
            profile,
        } => {
            let g = closed(&common)?;
            let json = read_profile(&profile)?;
            let sigma = og_core::profile_json::profile_from_json(g.game().sigma(), &json)
                .map_err(|e| CliError::Profile(e.to_string()))?;
            let start = Instant::now();
            let d =
                og_core::diagnose(&g, &sigma, &search.config()).map_err(game_err(&common.file))?;
            let r = verify_report(&game_name(&common.file), &g, &d, start.elapsed());
            Ok((render(&r, common.format, report::verify_text), common.out))
        }
        Command::Dot(c) => {
            let checked = load(&c)?;
            Ok((
                dsl::export_dot(&game_name(&c.file), &checked.diagram),
                c.out,
            ))
        }
    }
}

fn render(r: &Json, format: Format, text: fn(&Json) -> String) -> String {
    match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(r).unwrap_or_default()),
        Format::Text => text(r),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    let result = execute(cli).and_then(|(text, out)| match out {
        Some(path) => std::fs::write(&path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(name: &str) -> String {
        format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
    }

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("og").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn params_and_tolerance() {
        assert_eq!(parse_param(" N = 5"), Ok(("N".into(), "5".into())));
        assert!(parse_param("=5").is_err());
        assert!(parse_param("N").is_err());
        assert_eq!(parse_tol("0"), Ok(0.0));
        assert!(parse_tol("-1e-9").is_err());
        assert!(parse_tol("inf").is_err());
        assert!(parse_positive("0").is_err());
    }

    #[test]
    fn reports_are_stable_apart_from_timing() {
        let strip = |s: String| -> String { s.lines().filter(|l| !l.contains("elapsed_ms")).collect() };
        let (code, a, _) = run_capture(&["eq", &fixture("ultimatum.og"), "--workers", "1"]);
        assert_eq!(code, 0);
        let (_, b, _) = run_capture(&["eq", &fixture("ultimatum.og"), "--workers", "3"]);
        assert_eq!(strip(a), strip(b));
    }

    #[test]
    fn text_format() {
        let (code, out, _) = run_capture(&["eq", &fixture("meeting_ny.og"), "--format", "text"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("meeting_ny: 2 equilibria among 4 profiles"));
        let (_, out, _) = run_capture(&["check", &fixture("decision.og"), "--format", "text"]);
        assert!(out.contains("closed: false"));
    }

    #[test]
    fn errors_carry_position() {
        let (code, _, err) = run_capture(&["check", &fixture("invalid/bent_counit.og")]);
        assert_eq!(code, 2);
        assert!(err.contains("bent_counit.og:3:11: type error"), "{err}");
    }
}
