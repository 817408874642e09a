fn main() {
    std::process::exit(optocycle::cli::main());
}
