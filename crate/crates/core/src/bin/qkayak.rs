fn main() {
    std::process::exit(qkayak::cli::main_with_args(std::env::args_os()));
}
