fn main() {
    std::process::exit(extremefit::cli::run(std::env::args()));
}
