use std::io::{self, Write};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("DRL_LOG")).format_timestamp(None).init();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = io::BufWriter::new(stdout.lock());
    let mut err = stderr.lock();
    let code = drl_core::cli::run(std::env::args_os(), &mut out, &mut err);
    let _ = out.flush();
    std::process::exit(code);
}
