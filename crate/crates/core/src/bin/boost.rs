fn main() {
    std::process::exit(agnostic_boost::cli::main());
}
