fn main() {
    std::process::exit(effortlab::cli::run(std::env::args_os()));
}
