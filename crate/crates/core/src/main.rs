use std::io::Write;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FRICTION_LOG", "error")).init();
    let (code, stdout, stderr) = friction::cli::run(std::env::args_os());
    std::io::stdout().write_all(stdout.as_bytes()).ok();
    std::io::stderr().write_all(stderr.as_bytes()).ok();
    std::process::exit(code);
}
