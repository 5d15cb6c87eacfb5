fn main() {
    std::process::exit(sbstoch::cli::main());
}
