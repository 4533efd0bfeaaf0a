use std::io::Write;
use std::process::ExitCode;

use superderiv::cli::{run_command, SEED_ENV};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let env_seed = std::env::var(SEED_ENV).ok();
    let out = run_command(&argv, env_seed.as_deref());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    std::io::stdout().flush().ok();
    ExitCode::from(u8::try_from(out.code).unwrap_or(2))
}
