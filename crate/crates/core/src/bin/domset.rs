use std::path::PathBuf;
use std::process::ExitCode;

fn main() -> ExitCode {
    let env_config = std::env::var_os(domset::cli::CONFIG_ENV).map(PathBuf::from);
    let code = domset::cli::run(std::env::args_os(), env_config.as_deref(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code as u8)
}
