fn main() {
    std::process::exit(sticky_cli::run_cli(std::env::args_os()));
}
