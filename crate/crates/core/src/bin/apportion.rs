fn main() {
    std::process::exit(apportion::cli::run());
}
