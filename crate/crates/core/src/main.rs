fn main() {
    std::process::exit(ledgergraph::cli::run(std::env::args_os()));
}
