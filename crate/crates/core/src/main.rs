fn main() {
    std::process::exit(becback::cli::run(std::env::args_os()));
}
