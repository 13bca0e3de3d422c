use std::process::ExitCode;

use clap::Parser;
use fsing_cli::{run, Cli, Format};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli.command, &cli.opts) {
        Ok(report) => {
            let out = match cli.opts.format {
                Format::Text => report.render_text(),
                Format::Json => report.render_json(),
            };
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            match cli.opts.format {
                Format::Json => {
                    let payload = serde_json::json!({
                        "error": { "kind": e.kind(), "message": e.to_string() },
                        "exit_code": e.exit_code(),
                    });
                    eprintln!("{}", serde_json::to_string_pretty(&payload).expect("payload serializes"));
                }
                Format::Text => eprintln!("error: {e}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
