fn main() {
    std::process::exit(gadgetry_cli::main_entry());
}
