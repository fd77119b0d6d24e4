fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = besov_cli::init_threads() {
        eprintln!("besov-ns: {e}");
        std::process::exit(e.exit_code());
    }
    std::process::exit(besov_cli::run(std::env::args_os()));
}
