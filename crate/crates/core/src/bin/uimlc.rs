fn main() {
    std::process::exit(uimlc::cli::main());
}
