fn main() {
    std::process::exit(hypolab::cli::main());
}
