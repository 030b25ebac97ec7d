//! The `serint` command line: argument parsing, command execution and
//! rendering, kept in a library so tests can drive it in-process.

pub mod args;
pub mod commands;
pub mod report;

use std::ffi::OsString;
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;
use rayon::prelude::*;
use serde_json::Map;

use args::{Cli, Format, GlobalOpts};
pub use report::Output;
use report::Report;

/// Parses `args` (including the program name) and runs the request.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => return usage_error(e),
    };
    if let Some(path) = &cli.batch {
        return run_batch(path, &cli.opts);
    }
    match &cli.command {
        Some(cmd) => commands::execute(&cli.opts, cmd).render(cli.opts.output, true),
        None => Output {
            code: 1,
            stdout: String::new(),
            stderr: "error: a subcommand or --batch is required (see --help)\n".into(),
        },
    }
}

fn usage_error(e: clap::Error) -> Output {
    let text = e.render().to_string();
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Output {
            code: 0,
            stdout: text,
            stderr: String::new(),
        },
        _ => Output {
            code: 1,
            stdout: String::new(),
            stderr: text,
        },
    }
}

/// Global flags of the outer invocation, placed before each batch line so
/// the line's own flags take precedence.
fn inherited(opts: &GlobalOpts) -> Vec<String> {
    let output = match opts.output {
        Format::Text => "text",
        Format::Json => "json",
    };
    vec![
        "serint".into(),
        format!("--tol-abs={}", opts.tol_abs),
        format!("--tol-rel={}", opts.tol_rel),
        format!("--max-terms={}", opts.max_terms),
        format!("--precision-bits={}", opts.precision_bits),
        format!("--output={output}"),
    ]
}

fn batch_line(line: &str, opts: &GlobalOpts) -> (Report, Format) {
    let failed = |msg: String| {
        let mut input = Map::new();
        input.insert("line".into(), line.into());
        (Report::error("batch", input, msg), opts.output)
    };
    let words = match shell_words::split(line) {
        Ok(w) => w,
        Err(e) => return failed(e.to_string()),
    };
    let cli = match Cli::try_parse_from(inherited(opts).into_iter().chain(words)) {
        Ok(cli) => cli,
        Err(e) => return failed(e.render().to_string().trim_end().to_string()),
    };
    match (&cli.batch, &cli.command) {
        (Some(_), _) => failed("--batch cannot be nested".into()),
        (None, None) => failed("missing subcommand".into()),
        (None, Some(cmd)) => (commands::execute(&cli.opts, cmd), cli.opts.output),
    }
}

/// Runs every non-blank, non-`#` line of the file, possibly in parallel.
/// Reports keep input order; the exit code is the first nonzero one.
pub fn run_batch(path: &Path, opts: &GlobalOpts) -> Output {
    let content = match std::fs::read_to_string(path) {
        Ok(c) => c,
        Err(e) => {
            return Output {
                code: 1,
                stdout: String::new(),
                stderr: format!("error: cannot read {}: {e}\n", path.display()),
            }
        }
    };
    let lines: Vec<&str> = content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let outputs: Vec<(Output, Format)> = lines
        .par_iter()
        .map(|line| {
            let (report, format) = batch_line(line, opts);
            (report.render(format, false), format)
        })
        .collect();
    let mut all = Output::default();
    for (out, format) in outputs {
        // blank line between text reports; JSON stays one object per line
        if format == Format::Text && !all.stdout.is_empty() && !out.stdout.is_empty() {
            all.stdout.push('\n');
        }
        all.stdout.push_str(&out.stdout);
        all.stderr.push_str(&out.stderr);
        if all.code == 0 {
            all.code = out.code;
        }
    }
    all
}
