fn main() {
    std::process::exit(trendscape_cli::main_with_args(std::env::args_os()));
}
