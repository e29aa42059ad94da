fn main() {
    std::process::exit(carcino::cli::main());
}
