fn main() {
    std::process::exit(fracdisp::cli::main_with_args(std::env::args_os()));
}
