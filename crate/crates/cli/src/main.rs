fn main() {
    std::process::exit(he_cli::run(std::env::args_os()));
}
