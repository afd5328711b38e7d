fn main() {
    std::process::exit(ctcsim::cli::main_with_args(std::env::args_os()));
}
