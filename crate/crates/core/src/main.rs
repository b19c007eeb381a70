fn main() {
    std::process::exit(causet::cli::main_with_args(std::env::args_os()));
}
