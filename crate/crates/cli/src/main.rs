fn main() {
    // Unlocked handles: the server logs to stderr from worker threads.
    let code = approval_cli::run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
