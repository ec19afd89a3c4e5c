fn main() {
    std::process::exit(taxflow::cli::run_cli(std::env::args_os()));
}
