//! `uimlc` command line driver.
//!
//! Exit codes: 0 on success, 1 when the input is rejected (diagnostics,
//! runaway behavior), 2 on usage errors including unreadable input files.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::behavior::{check_event, format_trace, load_events, run_with, Engine, NoExternals};
use crate::diag::{has_errors, Diagnostic, Severity};
use crate::emit::{emit, EmitOptions};
use crate::logical::{lower, parse_logical};
use crate::parser::{parse_uiml_full, serialize, SourceMap};
use crate::transform::{load_hints, split, HintSet};
use crate::vocabulary::{load_vocabulary, validate_document, FamilyId, Registry, Vocabulary};
use crate::UimlDocument;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "uimlc", version, about = "Compile UIML for several platform families")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a UIML file and check it against the generic vocabulary.
    Validate {
        input: PathBuf,
        /// Vocabulary JSON to validate against instead of the built-in one.
        #[arg(long)]
        vocab: Option<PathBuf>,
    },
    /// Turn a logical model (JSON) into generic UIML.
    Lower {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compile a generic UIML file to target markup for each family.
    Render {
        input: PathBuf,
        #[arg(long = "family")]
        families: Vec<FamilyId>,
        /// Mapping hints JSON; overrides in-document hints.
        #[arg(long)]
        hints: Option<PathBuf>,
        #[arg(long)]
        vocab: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the document's rules against a list of events and print the trace.
    Simulate {
        input: PathBuf,
        /// Events JSON; no events when omitted.
        #[arg(long)]
        events: Option<PathBuf>,
        #[arg(long)]
        vocab: Option<PathBuf>,
    },
}

/// Entry point for the binary.
pub fn main() -> i32 {
    run(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock())
}

pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match CliConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let mut ctx = Ctx {
        stdout,
        stderr,
        color: std::env::var("UIMLC_COLOR").as_deref() == Ok("1"),
    };
    let result = match config.command {
        Command::Validate { input, vocab } => ctx.validate(&input, vocab.as_deref()),
        Command::Lower { input, out } => ctx.lower(&input, &out),
        Command::Render {
            input,
            families,
            hints,
            vocab,
            out,
        } => ctx.render(&input, &families, hints.as_deref(), vocab.as_deref(), &out),
        Command::Simulate { input, events, vocab } => {
            ctx.simulate(&input, events.as_deref(), vocab.as_deref())
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(code) => code,
    }
}

struct Ctx<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
    color: bool,
}

type Outcome = Result<(), i32>;

impl Ctx<'_> {
    fn usage(&mut self, message: &str) -> i32 {
        let _ = writeln!(self.stderr, "uimlc: {message}");
        EXIT_USAGE
    }

    fn fail(&mut self, file: &Path, message: &str) -> i32 {
        let _ = writeln!(self.stderr, "{}: {message}", file.display());
        EXIT_REJECTED
    }

    fn read(&mut self, path: &Path) -> Result<Vec<u8>, i32> {
        fs::read(path).map_err(|e| self.usage(&format!("cannot read {}: {e}", path.display())))
    }

    fn read_text(&mut self, path: &Path) -> Result<String, i32> {
        let bytes = self.read(path)?;
        String::from_utf8(bytes).map_err(|_| self.fail(path, "file is not valid UTF-8"))
    }

    /// Prints diagnostics and returns `Err` if any of them is an error.
    fn report(&mut self, file: &Path, map: Option<&SourceMap>, mut diags: Vec<Diagnostic>) -> Outcome {
        for d in &mut diags {
            if let Some(map) = map {
                map.locate(d);
            }
            let code = match (self.color, d.severity) {
                (false, _) => d.code.to_owned(),
                (true, Severity::Error) => format!("\x1b[31m{}\x1b[0m", d.code),
                (true, Severity::Warning) => format!("\x1b[33m{}\x1b[0m", d.code),
            };
            let _ = writeln!(
                self.stderr,
                "{}:{}:{}: {} {}",
                file.display(),
                d.line,
                d.column,
                code,
                d.message
            );
        }
        if has_errors(&diags) {
            Err(EXIT_REJECTED)
        } else {
            Ok(())
        }
    }

    /// Reports diagnostics for input that has already been rejected.
    fn reject(&mut self, file: &Path, map: Option<&SourceMap>, diags: Vec<Diagnostic>) -> i32 {
        let _ = self.report(file, map, diags);
        EXIT_REJECTED
    }

    fn vocabulary(&mut self, path: Option<&Path>) -> Result<Vocabulary, i32> {
        let Some(path) = path else {
            return Ok(Registry::builtin().generic);
        };
        let text = self.read_text(path)?;
        load_vocabulary(&text).map_err(|d| self.reject(path, None, d))
    }

    /// Parses and validates a UIML file.
    fn load(&mut self, input: &Path, vocab: &Vocabulary) -> Result<(UimlDocument, SourceMap), i32> {
        let bytes = self.read(input)?;
        let name = input.display().to_string();
        let parsed = parse_uiml_full(&bytes, &name);
        let map = parsed.source_map;
        self.report(input, Some(&map), parsed.diagnostics)?;
        let doc = parsed.document.expect("document present when no errors");
        self.report(input, Some(&map), validate_document(&doc, vocab))?;
        Ok((doc, map))
    }

    fn validate(&mut self, input: &Path, vocab: Option<&Path>) -> Outcome {
        let vocab = self.vocabulary(vocab)?;
        self.load(input, &vocab).map(drop)
    }

    fn lower(&mut self, input: &Path, out: &Path) -> Outcome {
        let text = self.read_text(input)?;
        let model = parse_logical(&text).map_err(|d| self.reject(input, None, d))?;
        let doc = lower(&model).map_err(|d| self.reject(input, None, d))?;
        self.report(input, None, validate_document(&doc, &Registry::builtin().generic))?;
        let target = out.join(format!("{}.uiml", stem(input)));
        write_all(&[(target, serialize(&doc))]).map_err(|e| self.fail(out, &e))
    }

    fn render(
        &mut self,
        input: &Path,
        families: &[FamilyId],
        hints: Option<&Path>,
        vocab: Option<&Path>,
        out: &Path,
    ) -> Outcome {
        if families.is_empty() {
            return Err(self.usage("render needs at least one --family"));
        }
        let vocab = self.vocabulary(vocab)?;
        let external = match hints {
            None => HintSet::default(),
            Some(path) => {
                let text = self.read_text(path)?;
                load_hints(&text).map_err(|d| self.reject(path, None, d))?
            }
        };
        let (doc, map) = self.load(input, &vocab)?;
        let registry = Registry::builtin().with_generic(vocab);
        let platforms =
            split(&doc, families, &external, &registry).map_err(|d| self.reject(input, Some(&map), d))?;
        let opts = EmitOptions::default();
        let stem = stem(input);
        let mut files = Vec::new();
        for (family, platform) in &platforms {
            let base = format!("{stem}.{}", family.as_str());
            files.push((out.join(format!("{base}.{}", family.extension())), emit(*family, platform, &opts)));
            files.push((out.join(format!("{base}.uiml")), serialize(platform)));
        }
        write_all(&files).map_err(|e| self.fail(out, &e))
    }

    fn simulate(&mut self, input: &Path, events: Option<&Path>, vocab: Option<&Path>) -> Outcome {
        let vocab = self.vocabulary(vocab)?;
        let events = match events {
            None => Vec::new(),
            Some(path) => {
                let text = self.read_text(path)?;
                load_events(&text).map_err(|d| self.reject(path, None, vec![d]))?
            }
        };
        let (doc, _) = self.load(input, &vocab)?;
        let bad: Vec<Diagnostic> = events.iter().filter_map(|e| check_event(&doc, &vocab, e)).collect();
        self.report(input, None, bad)?;
        match run_with(&Engine::new(&doc), &events, &mut NoExternals) {
            Ok(trace) => {
                let _ = self.stdout.write_all(format_trace(&trace).as_bytes());
                Ok(())
            }
            Err(e) => Err(self.fail(input, &e.to_string())),
        }
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "out".to_owned(), |s| s.to_string_lossy().into_owned())
}

/// Writes every file or none: on the first failure the files already written
/// are removed.
fn write_all(files: &[(PathBuf, String)]) -> Result<(), String> {
    let mut written: Vec<&Path> = Vec::new();
    for (path, contents) in files {
        let result = path
            .parent()
            .map_or(Ok(()), fs::create_dir_all)
            .and_then(|()| fs::write(path, contents));
        if let Err(e) = result {
            for done in written {
                let _ = fs::remove_file(done);
            }
            return Err(format!("cannot write {}: {e}", path.display()));
        }
        written.push(path);
    }
    Ok(())
}
