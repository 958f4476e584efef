fn main() {
    std::process::exit(dinls::cli::main_entry());
}
