mod args;
mod commands;
mod output;
mod plot;

use args::{Cli, Command};
use clap::Parser;
use commands::RunError;
use output::OutputError;
use radlab::report::canonical_json;
use radlab::Error;
use std::io::Write;
use std::process::ExitCode;

const EXIT_USAGE: u8 = 64;
const EXIT_IO: u8 = 74;
const EXIT_NONCONVERGENCE: u8 = 3;

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("radlab: error: {msg}");
    ExitCode::from(code)
}

fn lab_code(e: &Error) -> u8 {
    match e {
        Error::NonConvergence(_) => EXIT_NONCONVERGENCE,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let argv = match args::expand_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e @ args::ConfigError::Io { .. }) => return fail(EXIT_IO, e),
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Eigs(a) => commands::eigs(a),
        Command::Deficit(a) => commands::deficit_cmd(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Probe(a) => commands::probe(a),
        Command::Scan(a) => commands::scan(a),
        Command::Fit(a) => commands::fit(a),
        Command::Sets(a) => commands::sets(a),
        Command::FourierCheck(a) => commands::fourier(a),
        Command::Lorentz(a) => commands::lorentz(a),
        Command::Selftest(a) => commands::selftest(a),
    };
    let mut out = match result {
        Ok(o) => o,
        Err(RunError::Lab(e)) => return fail(lab_code(&e), e),
        Err(e @ RunError::Usage(_)) => return fail(EXIT_USAGE, e),
        Err(e @ RunError::Io { .. }) => return fail(EXIT_IO, e),
    };
    if let Err(e) = output::apply_overrides(&mut out.report, &out.common.tol) {
        return fail(EXIT_USAGE, e);
    }
    for (label, secs) in &out.timings {
        eprintln!("{label}: {secs:.3} s");
    }
    let doc = output::envelope(&out);
    let text = match canonical_json(&doc) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let written = (|| -> Result<(), OutputError> {
        if let Some(p) = &out.common.json {
            output::write_file(p, text.as_bytes())?;
        }
        if let Some(p) = &out.common.csv {
            let table = out
                .table
                .as_ref()
                .ok_or_else(|| OutputError::Usage(format!("{} has no CSV form", out.command)))?;
            output::write_file(p, &output::csv_bytes(table)?)?;
        }
        if let Some(p) = &out.common.svg {
            let plot = out
                .plot
                .as_ref()
                .ok_or_else(|| OutputError::Usage(format!("{} has no SVG form", out.command)))?;
            output::write_file(p, plot.render().as_bytes())?;
        }
        Ok(())
    })();
    match written {
        Err(e @ OutputError::Io { .. }) => return fail(EXIT_IO, e),
        Err(e) => return fail(EXIT_USAGE, e),
        Ok(()) => {}
    }
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return fail(EXIT_IO, "cannot write to stdout");
    }
    ExitCode::from(output::status(&out.report) as u8)
}
