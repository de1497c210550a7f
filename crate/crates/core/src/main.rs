use std::io::Write;

fn main() {
    let (code, text) = fglab::cli::run(std::env::args_os());
    if code == fglab::cli::EXIT_USAGE || code == fglab::cli::EXIT_GUARD {
        eprint!("{text}");
    } else {
        let _ = std::io::stdout().write_all(text.as_bytes());
    }
    std::process::exit(code);
}
