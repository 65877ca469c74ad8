use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qhvk::{cmd_export, cmd_norm, cmd_sl2z, cmd_verify, parse_beta, CliError, ExportWhat, Format, Suite, EXIT_INPUT};

#[derive(Parser)]
#[command(name = "qhvk", version, about = "Exact checks for quasi-Hopf algebras over Q(zeta_24)")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include per-stage timings in JSON output.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification suite on `uqsl2`, `salg` or a definition file.
    Verify {
        target: String,
        #[arg(long, default_value = "zeta^21")]
        beta: String,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Search for an R-matrix: `uqsl2 --eps ±1` or the `q0` control.
    #[command(allow_negative_numbers = true)]
    Norm {
        #[arg(default_value = "uqsl2")]
        target: String,
        #[arg(long)]
        eps: Option<i64>,
    },
    /// SL(2,Z) matrices on the centre of uqsl2 with relation checks.
    Sl2z {
        #[arg(long, default_value = "zeta^21")]
        beta: String,
    },
    /// Dump a built-in object.
    #[command(allow_negative_numbers = true)]
    Export {
        #[arg(value_enum)]
        what: ExportWhat,
        #[arg(long, default_value = "zeta^21")]
        beta: String,
        /// Export Φ_ε instead of the β-dependent coassociator.
        #[arg(long)]
        eps: Option<i64>,
    },
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("QHVK_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("QHVK_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: &Cli) -> Result<(String, i32), CliError> {
    init_threads()?;
    let render = |rep: qhvk::RunReport| {
        let rep = rep.with_timings(cli.timings);
        let text = match cli.format {
            Format::Json => rep.to_json(),
            Format::Text => rep.to_text(),
        };
        (text, rep.exit_code)
    };
    match &cli.cmd {
        Cmd::Verify { target, beta, suite } => Ok(render(cmd_verify(target, &parse_beta(beta)?, *suite)?)),
        Cmd::Norm { target, eps } => Ok(render(cmd_norm(target, *eps)?)),
        Cmd::Sl2z { beta } => Ok(render(cmd_sl2z(&parse_beta(beta)?)?)),
        Cmd::Export { what, beta, eps } => Ok((cmd_export(*what, &parse_beta(beta)?, *eps, cli.format)?, 0)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { 0 });
        }
    };
    let (text, code) = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("qhvk: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let written = match &cli.out {
        Some(p) => std::fs::write(p, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("qhvk: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code as u8)
}
