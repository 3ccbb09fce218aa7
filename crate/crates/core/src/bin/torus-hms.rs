use std::io::Write;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let (code, out) = torus_hms::cli::run(std::env::args_os());
    if code == torus_hms::cli::EXIT_INPUT && !out.starts_with('{') {
        eprint!("{out}");
    } else {
        let mut stdout = std::io::stdout().lock();
        let _ = stdout.write_all(out.as_bytes());
    }
    std::process::exit(code);
}
