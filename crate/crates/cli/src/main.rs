fn main() {
    std::process::exit(branchwise_cli::main_with_args(std::env::args_os()));
}
