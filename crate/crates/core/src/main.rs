fn main() {
    std::process::exit(qbs_core::cli::main_with_args(std::env::args_os()));
}
