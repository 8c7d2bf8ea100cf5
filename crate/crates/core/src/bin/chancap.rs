fn main() {
    std::process::exit(chancap::cli::main_with_args(std::env::args_os()));
}
