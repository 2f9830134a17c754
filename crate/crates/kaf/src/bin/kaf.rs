fn main() {
    std::process::exit(kaf::cli::run());
}
