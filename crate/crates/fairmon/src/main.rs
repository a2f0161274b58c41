fn main() {
    std::process::exit(fairmon::cli::main_entry());
}
