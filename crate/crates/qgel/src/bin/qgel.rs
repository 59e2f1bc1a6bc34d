fn main() {
    std::process::exit(qgel::cli::run());
}
