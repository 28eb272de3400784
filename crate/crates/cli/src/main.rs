fn main() {
    std::process::exit(esspec_cli::run(std::env::args_os()));
}
