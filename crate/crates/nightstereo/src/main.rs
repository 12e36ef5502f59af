fn main() {
    std::process::exit(nightstereo::cli::main());
}
