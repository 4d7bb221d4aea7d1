fn main() {
    std::process::exit(scmodes::cli::run_from_args(std::env::args_os()));
}
