fn main() {
    std::process::exit(outbreak_sim::cli::run_from_args(std::env::args_os()));
}
