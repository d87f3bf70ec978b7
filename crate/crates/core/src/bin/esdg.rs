fn main() {
    std::process::exit(esdg::cli::main());
}
