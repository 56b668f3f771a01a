fn main() {
    std::process::exit(cvbell::cli::main());
}
