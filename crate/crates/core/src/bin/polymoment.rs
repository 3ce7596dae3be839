fn main() {
    std::process::exit(polymoment::cli::main_with_args(std::env::args_os()));
}
