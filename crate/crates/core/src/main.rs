use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<std::ffi::OsString> = std::env::args_os().collect();
    let level = if vaxcontract::cli::quiet_requested(&args) { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let code = vaxcontract::cli::main_with(args, &mut io::stdout(), &mut io::stderr());
    ExitCode::from(code as u8)
}
