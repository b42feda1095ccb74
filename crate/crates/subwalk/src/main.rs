fn main() {
    std::process::exit(subwalk::cli::main());
}
