fn main() {
    std::process::exit(dyadic_bellman::cli::run(std::env::args_os()));
}
