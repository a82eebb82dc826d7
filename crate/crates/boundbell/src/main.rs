use std::process::exit;

fn main() {
    exit(boundbell::cli::run(std::env::args_os()));
}
