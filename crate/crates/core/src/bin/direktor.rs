fn main() {
    std::process::exit(direktor::cli::run());
}
