fn main() {
    std::process::exit(infoplane::cli::main());
}
