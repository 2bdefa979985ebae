use std::io::Write;

use clap::Parser;

use h8ext::cli::{run, Cli};

fn main() {
    let out = run(&Cli::parse());
    // a closed pipe (e.g. `| head`) is not an error worth reporting
    if !out.stdout.is_empty() {
        let _ = writeln!(std::io::stdout().lock(), "{}", out.stdout);
    }
    if !out.stderr.is_empty() {
        let _ = writeln!(std::io::stderr().lock(), "{}", out.stderr);
    }
    std::process::exit(out.code);
}
