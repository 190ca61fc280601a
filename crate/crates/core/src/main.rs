fn main() {
    std::process::exit(laxforge::cli::run(std::env::args()));
}
