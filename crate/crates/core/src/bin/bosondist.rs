fn main() {
    std::process::exit(bosondist::cli::main_with_args(std::env::args_os()));
}
