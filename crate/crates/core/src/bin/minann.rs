fn main() {
    std::process::exit(minann::cli::main_with_args(std::env::args_os()));
}
